// Steady-state normally ordered moments of the joint emitter+detector
// system, computed two independent ways: a block-recursive solve of the
// moment equations in the weak-drive/weak-coupling limit, and a direct
// null-space solve of the truncated Liouvillian.
#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "resfluor/model.hpp"

namespace resfluor {

// Map from moment index to steady-state value, complete for all valid
// indices with order() <= order_max. entry(m,n,mu,nu) equals
// conj(entry(n,m,nu,mu)) exactly; entry(0,0,0,0) = 1.
struct MomentTable {
    std::map<MomentIndex, Complex> entries;
    SystemParams params;
    int order_max = 0;

    bool contains(const MomentIndex& idx) const {
        return entries.count(idx) != 0;
    }
    // Value lookup; throws std::out_of_range for absent indices.
    Complex at(const MomentIndex& idx) const;
};

// Dense density operator on the truncated joint space. Basis ordering:
// emitter level (0 = ground, 1 = excited) outermost, detector Fock
// level innermost, i.e. row index = level * (n_max + 1) + photons.
struct DensityOperator {
    Eigen::MatrixXcd matrix;
    int n_max = 0;

    int dim() const { return static_cast<int>(matrix.rows()); }
    // Total population of detector Fock levels n_max and n_max - 1,
    // the truncation-quality figure the solvers gate on.
    double top_two_population() const;
};

// Nonzero couplings of the moment evolution equation
// d/dt C_idx = sum over targets of coeff * C_target
// in the sensor (cascaded) limit: the diagonal decay, the four
// emitter drive elements, the detector drive elements, and the
// emitter->detector coupling elements. Order-raising coupling terms
// are the o(omega, g) corrections this family of equations drops.
std::vector<std::pair<MomentIndex, Complex>> regression_coefficients(
    const MomentIndex& idx, const SystemParams& params);

// Block-recursive steady state: solves order k moments from orders
// < k, exact to leading order in (omega_sigma, g). params.omega_a is
// used as given; derive it with resolve_drive() when homodyning.
MomentTable solve_recursive(const SystemParams& params, int order_max);

// Independent oracle: dense null-space solve of the full truncated
// Liouvillian (master equation with emitter drive, detector drive per
// h, both decay channels). Errors if the top two Fock levels carry
// more than trunc.tol population or the null space is not unique.
DensityOperator liouvillian_steady_state(const SystemParams& params,
                                         const HomodyneConfig& h,
                                         const TruncationConfig& trunc);

// Extracts all moments of order <= order_max from a density operator.
// Requires dens.n_max >= order_max.
MomentTable moments_from_density(const DensityOperator& dens,
                                 const SystemParams& params, int order_max);

// Normalized zero-delay correlation <a^dag^N a^N> / <a^dag a>^N.
// The result must be real within 1e-10 relative; a larger imaginary
// residue is an error.
double gN_from_moments(const MomentTable& table, int N);

}  // namespace resfluor
