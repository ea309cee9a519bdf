// Acceptance gate: runs every criterion and prints one verdict line
// per criterion. Exit code 0 only if all pass. --skip-mc drops the
// Monte Carlo criterion for fast runs; --seed reseeds it.
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "resfluor/verify.hpp"

int main(int argc, char** argv) {
    resfluor::SuiteOptions opts;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--skip-mc") {
            opts.quick = true;
        } else if (arg == "--seed" && i + 1 < argc) {
            opts.seed = std::strtoull(argv[++i], nullptr, 10);
        } else {
            std::cerr << "usage: acceptance [--skip-mc] [--seed N]\n";
            return 2;
        }
    }

    const resfluor::SuiteReport report = resfluor::run_acceptance_suite(opts);
    resfluor::print_report(report, std::cout);
    return report.all_passed() ? 0 : 1;
}
