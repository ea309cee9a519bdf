// Acceptance suite: eleven numbered criteria covering the analytic
// correlation values, the compensation condition, the two independent
// steady-state solvers, the decomposition identities, the delayed
// correlations, spectra, emission rates, and the Monte Carlo click
// statistics. The CLI `verify` verb and the acceptance test binary
// both run this suite; tolerances live here and nowhere else.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace resfluor {

struct CriterionResult {
    std::string id;
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;
};

struct SuiteOptions {
    // Skip the Monte Carlo criterion (A11); everything else runs in
    // seconds.
    bool quick = false;
    // Self-test fault injection: evaluates A2 against a homodyne
    // correlation with the numerator sign flipped, which must make A2
    // fail. Verifies the suite can actually catch a regression.
    bool inject_homodyne_sign_flip = false;
    std::uint64_t seed = 20260816;
};

struct SuiteReport {
    std::vector<CriterionResult> criteria;
    bool all_passed() const;
};

SuiteReport run_acceptance_suite(const SuiteOptions& opts);

// One line per criterion: id, PASS/FAIL/SKIP, name, measured vs
// expected detail.
void print_report(const SuiteReport& report, std::ostream& out);

}  // namespace resfluor
