#include "memwave/biorthogonal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memwave/error.hpp"
#include "memwave/numerics.hpp"

namespace memwave {

cplx exp_inner_product(cplx a, cplx b, double T) {
    // Integral of e^{-(a + conj b) t} over (-T/2, T/2) = 2 sinh(s T / 2) / s.
    const cplx s = a + std::conj(b);
    const cplx h = 0.5 * s * T;
    if (std::abs(h) < 1e-4) {
        const cplx h2 = h * h;
        return T * (1.0 + h2 / 6.0 + h2 * h2 / 120.0);
    }
    return 2.0 * std::sinh(h) / s;
}

double default_regularization(const Eigen::MatrixXcd& G) {
    return 1e-12 * G.trace().real() / static_cast<double>(G.rows());
}

std::size_t DualFamily::index_of(int n, int j) const {
    for (std::size_t q = 0; q < family.size(); ++q) {
        if (family[q].n == n && family[q].j == j) return q;
    }
    throw DimensionError("no family member with the requested indices");
}

cplx DualFamily::evaluate(std::size_t m, double t) const {
    cplx acc = 0.0;
    for (std::size_t b = 0; b < family.size(); ++b)
        acc += coefficients(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(b)) * std::exp(-family[b].lambda * t);
    return acc;
}

Eigen::MatrixXcd DualFamily::pairing() const {
    const auto K = static_cast<Eigen::Index>(family.size());
    Eigen::MatrixXcd G(K, K);
    for (Eigen::Index a = 0; a < K; ++a)
        for (Eigen::Index b = 0; b < K; ++b)
            G(a, b) = exp_inner_product(family[static_cast<std::size_t>(a)].lambda, family[static_cast<std::size_t>(b)].lambda, T);
    return coefficients * G;
}

double DualFamily::pairing_defect() const {
    const Eigen::MatrixXcd P = pairing();
    return (P - Eigen::MatrixXcd::Identity(P.rows(), P.cols())).cwiseAbs().maxCoeff();
}

DualFamily dual_family_gram(const ModelParams& params, int N, double regularization, bool apply_resonance_convention) {
    validate_memory(params.M);
    validate_velocity(params.c);
    if (!(params.T > 0.0)) throw InvalidParameter("time horizon T must be positive");
    if (N < 1) throw InvalidParameter("dual family needs N >= 1");
    if (!(regularization >= 0.0)) throw InvalidParameter("regularization must be nonnegative");

    DualFamily d;
    d.T = params.T;
    d.regularization = regularization;
    d.family = Spectrum(params.M, params.c, N, apply_resonance_convention).all();
    const auto K = static_cast<Eigen::Index>(d.family.size());
    for (Eigen::Index a = 0; a < K; ++a)
        for (Eigen::Index b = a + 1; b < K; ++b)
            if (std::abs(d.family[static_cast<std::size_t>(a)].lambda - d.family[static_cast<std::size_t>(b)].lambda) == 0.0)
                throw DegeneracyError("repeated exponent in the family; enable the resonance convention");

    d.gram.resize(K, K);
#pragma omp parallel for
    for (Eigen::Index a = 0; a < K; ++a)
        for (Eigen::Index b = 0; b < K; ++b)
            d.gram(a, b) = exp_inner_product(d.family[static_cast<std::size_t>(a)].lambda,
                                             d.family[static_cast<std::size_t>(b)].lambda, d.T);
    d.condition_number = hermitian_condition_number(d.gram);
    if (regularization == 0.0 && !(d.condition_number < max_unregularized_condition)) {
        std::ostringstream os;
        os << "Gram matrix is numerically singular (condition " << d.condition_number
           << "); use a positive regularization or a smaller N";
        throw ConditioningError(os.str(), d.condition_number, std::max(1, (3 * N) / 4));
    }
    Eigen::MatrixXcd A = d.gram;
    A.diagonal().array() += regularization;
    d.coefficients = A.partialPivLu().inverse();

    const Eigen::MatrixXcd CG = d.coefficients * d.gram;
    const Eigen::MatrixXcd norms2 = CG * d.coefficients.adjoint();
    d.atoms.reserve(d.family.size());
    for (Eigen::Index m = 0; m < K; ++m) {
        const auto& f = d.family[static_cast<std::size_t>(m)];
        d.atoms.push_back({f.n, f.j, f.lambda, std::sqrt(std::max(norms2(m, m).real(), 0.0))});
    }
    return d;
}

double atom_growth_exponent(const DualFamily& family) {
    int N = 0;
    for (const auto& a : family.atoms) N = std::max(N, std::abs(a.m));
    if (N < 2) throw InvalidParameter("growth fit needs at least two mode levels");
    std::vector<double> m(static_cast<std::size_t>(N)), v(static_cast<std::size_t>(N), 0.0);
    for (int q = 1; q <= N; ++q) m[static_cast<std::size_t>(q - 1)] = q;
    for (const auto& a : family.atoms) {
        auto& slot = v[static_cast<std::size_t>(std::abs(a.m) - 1)];
        slot = std::max(slot, a.norm);
    }
    return fit_loglog(m, v).slope;
}

SummationCheck summation_inequality_check(std::span<const cplx> coeffs, const DualFamily& family) {
    if (coeffs.size() != family.family.size()) throw DimensionError("coefficient count differs from family size");
    SummationCheck s;
    for (std::size_t a = 0; a < coeffs.size(); ++a) {
        const double n = family.family[a].n;
        s.lhs += std::norm(coeffs[a]) / (n * n * n * n);
    }
    cplx rhs = 0.0;
    for (std::size_t a = 0; a < coeffs.size(); ++a)
        for (std::size_t b = 0; b < coeffs.size(); ++b)
            rhs += coeffs[a] * std::conj(coeffs[b]) * exp_inner_product(family.family[a].lambda, family.family[b].lambda, family.T);
    s.rhs = rhs.real();
    s.ratio = s.rhs > 0.0 ? s.lhs / s.rhs : 0.0;
    return s;
}

}  // namespace memwave
