#include "resfluor/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace resfluor {

namespace {

std::string index_string(const MomentIndex& idx) {
    return "(" + std::to_string(idx.m) + "," + std::to_string(idx.n) + "," +
           std::to_string(idx.mu) + "," + std::to_string(idx.nu) + ")";
}

// All valid indices of the given total order. Sorted so that m + n is
// ascending: the in-block coupling elements always raise m + n, which
// makes every block matrix triangular with a nonzero diagonal.
std::vector<MomentIndex> block_indices(int order) {
    std::vector<MomentIndex> out;
    for (int m = 0; m <= 1; ++m)
        for (int n = 0; n <= 1; ++n)
            for (int mu = 0; m + n + mu <= order; ++mu)
                out.push_back({m, n, mu, order - m - n - mu});
    std::sort(out.begin(), out.end(),
              [](const MomentIndex& a, const MomentIndex& b) {
                  return std::make_tuple(a.m + a.n, a.m, a.mu) <
                         std::make_tuple(b.m + b.n, b.m, b.mu);
              });
    return out;
}

// Exact conjugation symmetry: each entry with a lexicographically
// smaller partner is overwritten by the conjugate of that partner,
// and self-conjugate entries are made real.
void canonicalize_block(std::map<MomentIndex, Complex>& entries,
                        const std::vector<MomentIndex>& idxs) {
    for (const auto& idx : idxs) {
        const MomentIndex c = idx.conjugate();
        if (c < idx)
            entries[idx] = std::conj(entries.at(c));
        else if (c == idx)
            entries[idx] = Complex(entries.at(idx).real(), 0.0);
    }
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c)
            out.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) =
                A(r, c) * B;
    return out;
}

struct JointOperators {
    Eigen::MatrixXcd sigma;
    Eigen::MatrixXcd a;
};

// Joint-space lowering operators, emitter outermost in the tensor
// ordering (row index = level * (n_max + 1) + photons).
JointOperators make_operators(int n_max) {
    const int nf = n_max + 1;
    Eigen::MatrixXcd af = Eigen::MatrixXcd::Zero(nf, nf);
    for (int k = 1; k < nf; ++k) af(k - 1, k) = std::sqrt(double(k));
    Eigen::MatrixXcd sm = Eigen::MatrixXcd::Zero(2, 2);
    sm(0, 1) = 1.0;
    return {kron(sm, Eigen::MatrixXcd::Identity(nf, nf)),
            kron(Eigen::MatrixXcd::Identity(2, 2), af)};
}

}  // namespace

Complex MomentTable::at(const MomentIndex& idx) const {
    auto it = entries.find(idx);
    if (it == entries.end())
        throw std::out_of_range("moment " + index_string(idx) +
                                " not in table (order_max = " +
                                std::to_string(order_max) + ")");
    return it->second;
}

double DensityOperator::top_two_population() const {
    const int nf = n_max + 1;
    double pop = 0.0;
    for (int level = 0; level < 2; ++level)
        for (int photons = n_max - 1; photons <= n_max; ++photons) {
            const int i = level * nf + photons;
            pop += matrix(i, i).real();
        }
    return pop;
}

std::vector<std::pair<MomentIndex, Complex>> regression_coefficients(
    const MomentIndex& idx, const SystemParams& params) {
    if (!idx.valid())
        throw std::invalid_argument("invalid moment index " +
                                    index_string(idx));
    const int m = idx.m, n = idx.n, mu = idx.mu, nu = idx.nu;
    const Complex I(0.0, 1.0);

    std::vector<std::pair<MomentIndex, Complex>> out;
    auto add = [&out](MomentIndex target, Complex coeff) {
        if (coeff != Complex(0.0, 0.0)) out.emplace_back(target, coeff);
    };

    add(idx, Complex(-0.5 * params.gamma_sigma * (m + n) -
                         0.5 * params.Gamma * (mu + nu),
                     0.0));
    add({m, 1 - n, mu, nu}, -I * params.omega_sigma * double(n + 2 * m * (1 - n)));
    add({1 - m, n, mu, nu}, I * params.omega_sigma * double(m + 2 * n * (1 - m)));
    if (nu >= 1) add({m, n, mu, nu - 1}, Complex(params.omega_a * nu, 0.0));
    if (mu >= 1) add({m, n, mu - 1, nu}, Complex(params.omega_a * mu, 0.0));
    if (mu >= 1) add({1 - m, n, mu - 1, nu}, I * params.g * double((1 - m) * mu));
    if (nu >= 1) add({m, 1 - n, mu, nu - 1}, -I * params.g * double((1 - n) * nu));
    return out;
}

MomentTable solve_recursive(const SystemParams& params, int order_max) {
    if (order_max < 0)
        throw std::invalid_argument("order_max must be non-negative");
    if (!(params.gamma_sigma > 0.0) || !(params.Gamma > 0.0))
        throw std::invalid_argument("gamma_sigma and Gamma must be positive");

    MomentTable table;
    table.params = params;
    table.order_max = order_max;
    table.entries[{0, 0, 0, 0}] = Complex(1.0, 0.0);

    for (int k = 1; k <= order_max; ++k) {
        const std::vector<MomentIndex> idxs = block_indices(k);
        const int dim = static_cast<int>(idxs.size());
        std::map<MomentIndex, int> col;
        for (int i = 0; i < dim; ++i) col[idxs[i]] = i;

        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
        for (int i = 0; i < dim; ++i) {
            for (const auto& [target, coeff] :
                 regression_coefficients(idxs[i], params)) {
                const int t_order = target.order();
                if (t_order == k)
                    M(i, col.at(target)) += coeff;
                else if (t_order == k - 1)
                    rhs(i) += coeff * table.at(target);
            }
        }

        const Eigen::VectorXcd v = M.partialPivLu().solve(-rhs);
        for (int i = 0; i < dim; ++i) table.entries[idxs[i]] = v(i);
        canonicalize_block(table.entries, idxs);
    }
    return table;
}

DensityOperator liouvillian_steady_state(const SystemParams& params,
                                         const HomodyneConfig& h,
                                         const TruncationConfig& trunc) {
    const ValidationReport report = validate(params, h, trunc);
    if (!report.ok())
        throw std::invalid_argument("invalid configuration: " +
                                    report.violations.front());

    const SystemParams p = resolve_drive(params, h);

    const int nf = trunc.n_max + 1;
    const int D = 2 * nf;
    const int D2 = D * D;
    const auto [sigma, a] = make_operators(trunc.n_max);
    const Eigen::MatrixXcd H =
        p.omega_sigma * (sigma + sigma.adjoint()) +
        p.g * (sigma * a.adjoint() + sigma.adjoint() * a) +
        Complex(0.0, 1.0) * p.omega_a * (a.adjoint() - a);

    const Eigen::MatrixXcd idD = Eigen::MatrixXcd::Identity(D, D);
    // Column-major vectorization: vec(A X B) = (B^T kron A) vec(X).
    auto dissipator = [&](const Eigen::MatrixXcd& c,
                          double rate) -> Eigen::MatrixXcd {
        const Eigen::MatrixXcd cdc = c.adjoint() * c;
        return 0.5 * rate *
               (2.0 * kron(c.conjugate(), c) - kron(idD, cdc) -
                kron(cdc.transpose(), idD));
    };
    const Eigen::MatrixXcd L =
        Complex(0.0, 1.0) * (kron(H.transpose(), idD) - kron(idD, H)) +
        dissipator(sigma, p.gamma_sigma) + dissipator(a, p.Gamma);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("Liouvillian eigendecomposition failed");
    const Eigen::VectorXcd evals = es.eigenvalues();
    const double scale = std::max(evals.cwiseAbs().maxCoeff(), 1e-300);
    int null_index = 0;
    int null_count = 0;
    for (int i = 0; i < D2; ++i) {
        if (std::abs(evals(i)) <= 1e-10 * scale) {
            null_index = i;
            ++null_count;
        }
    }
    if (null_count == 0)
        throw std::runtime_error(
            "steady-state solve did not converge: no Liouvillian "
            "eigenvalue within 1e-10 of zero");
    if (null_count > 1)
        throw std::runtime_error(
            "steady state is not unique: the Liouvillian null space has "
            "dimension " + std::to_string(null_count));
    const Eigen::VectorXcd x = es.eigenvectors().col(null_index);

    const double residual = (L * x).norm() / (scale * x.norm());
    if (residual > 1e-10)
        throw std::runtime_error(
            "steady-state solve did not converge (relative residual " +
            std::to_string(residual) + ")");

    // The null vector carries an arbitrary complex phase; dividing by
    // the complex trace removes it before hermitization.
    Eigen::MatrixXcd rho(D, D);
    for (int c = 0; c < D; ++c)
        for (int r = 0; r < D; ++r) rho(r, c) = x(c * D + r);
    const Complex tr = rho.trace();
    if (!(std::abs(tr) > 1e-12))
        throw std::runtime_error("steady-state solve returned zero trace");
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint()).eval();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hermitian_es(rho);
    if (hermitian_es.eigenvalues().minCoeff() < -1e-10)
        throw std::runtime_error(
            "steady state has a negative eigenvalue: " +
            std::to_string(hermitian_es.eigenvalues().minCoeff()));

    DensityOperator dens{rho, trunc.n_max};
    if (dens.top_two_population() > trunc.tol)
        throw std::runtime_error(
            "detector truncation insufficient: top two Fock levels hold " +
            std::to_string(dens.top_two_population()) +
            " population (tolerance " + std::to_string(trunc.tol) +
            "); increase n_max");
    return dens;
}

MomentTable moments_from_density(const DensityOperator& dens,
                                 const SystemParams& params, int order_max) {
    if (order_max < 0)
        throw std::invalid_argument("order_max must be non-negative");
    if (dens.n_max < order_max)
        throw std::invalid_argument(
            "detector truncation too small for order " +
            std::to_string(order_max) + " moments: n_max = " +
            std::to_string(dens.n_max));

    const auto [sigma, a] = make_operators(dens.n_max);
    std::vector<Eigen::MatrixXcd> a_pow(order_max + 1);
    a_pow[0] = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    for (int k = 1; k <= order_max; ++k) a_pow[k] = a_pow[k - 1] * a;

    MomentTable table;
    table.params = params;
    table.order_max = order_max;
    for (int k = 0; k <= order_max; ++k) {
        const std::vector<MomentIndex> idxs = block_indices(k);
        for (const auto& idx : idxs) {
            Eigen::MatrixXcd op = a_pow[idx.mu].adjoint() * a_pow[idx.nu];
            if (idx.n == 1) op = sigma * op;
            if (idx.m == 1) op = sigma.adjoint() * op;
            table.entries[idx] = (dens.matrix * op).trace();
        }
        canonicalize_block(table.entries, idxs);
    }
    table.entries[{0, 0, 0, 0}] = Complex(1.0, 0.0);
    return table;
}

double gN_from_moments(const MomentTable& table, int N) {
    if (N < 1)
        throw std::invalid_argument("correlation order must be at least 1");
    if (table.order_max < 2 * N)
        throw std::invalid_argument(
            "moment table holds orders up to " +
            std::to_string(table.order_max) + "; g" + std::to_string(N) +
            " needs order " + std::to_string(2 * N));

    const Complex den = table.at({0, 0, 1, 1});
    if (!(den.real() > 0.0))
        throw std::runtime_error("detector population is not positive");
    const Complex val = table.at({0, 0, N, N}) / std::pow(den.real(), N);
    if (std::abs(val.imag()) > 1e-10 * std::max(1.0, std::abs(val.real())))
        throw std::runtime_error(
            "correlation of order " + std::to_string(N) +
            " has a nonreal residue " + std::to_string(val.imag()));
    return val.real();
}

}  // namespace resfluor
