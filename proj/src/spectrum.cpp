#include "memwave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "memwave/error.hpp"
#include "memwave/numerics.hpp"

namespace memwave {

cplx EigenTriple::mu(int j) const {
    switch (j) {
        case 1: return mu1;
        case 2: return mu2;
        case 3: return mu3;
        default: throw InvalidParameter("branch index must be 1, 2 or 3");
    }
}

double EigenTriple::vieta_residual() const {
    const double nn = static_cast<double>(n) * n;
    const cplx m1 = mu1;
    const double scale1 = std::abs(m1) + std::abs(mu2) + std::abs(mu3);
    const double r1 = std::abs(m1 + mu2 + mu3) / scale1;
    const double r2 = std::abs(m1 * mu2 + m1 * mu3 + mu2 * mu3 - nn) / nn;
    const double r3 = std::abs(m1 * mu2 * mu3 - M * nn) / (std::abs(M) * nn);
    return std::max({r1, r2, r3});
}

EigenTriple solve_cubic_spectrum(int n, double M) {
    validate_memory(M);
    if (n < 1) throw InvalidParameter("cubic spectrum needs a positive mode index");
    const double a = std::abs(M);
    const double nn = static_cast<double>(n) * n;
    auto f = [&](double x) { return x * x * x + nn * (x - a); };
    double lo = 0.0, hi = a;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) x -= f(x) / (3.0 * x * x + nn);

    EigenTriple e;
    e.n = n;
    e.M = M;
    const double s = M > 0.0 ? 1.0 : -1.0;
    e.mu1 = s * x;
    e.mu1_minus_M = -(e.mu1 * e.mu1 * e.mu1) / nn;
    const double beta = std::sqrt(3.0 * (x / 2.0) * (x / 2.0) + nn);
    e.mu2 = {-e.mu1 / 2.0, beta};
    e.mu3 = std::conj(e.mu2);
    return e;
}

double asymptotic_mu1(int n, double M) {
    const double nn = static_cast<double>(n) * n;
    return M - M * M * M / nn;
}

double mu1_asymptotic_remainder(const EigenTriple& e) {
    const double nn = static_cast<double>(e.n) * e.n;
    const double m = e.mu1, M = e.M;
    return -e.mu1_minus_M * (M * M + M * m + m * m) / nn;
}

double branch2_imag_excess(const EigenTriple& e) {
    const double q = 0.75 * e.mu1 * e.mu1;
    return q / (std::sqrt(q + static_cast<double>(e.n) * e.n) + e.n);
}

double resonance_velocity(int n, double M) {
    const EigenTriple e = solve_cubic_spectrum(n, M);
    return e.mu2.imag() / n;
}

namespace {

bool near_resonance(double c, double v, double tol) { return std::abs(std::abs(c) - v) <= tol * std::abs(c); }

// Mode index whose branch-2 eigenvalue the convention moves: -n_c for c > 0.
int adjusted_mode(int n_c, double c) { return c > 0.0 ? -n_c : n_c; }

cplx adjusted_lambda(int n, double c, const EigenTriple& e) {
    return cplx(0.0, c * n) + cplx(0.0, e.mu2.imag()) - cplx(0.0, 0.5) + e.mu1 / 2.0;
}

}  // namespace

std::optional<Resonance> detect_resonance(const ModelParams& params, int N, double tol) {
    validate_memory(params.M);
    validate_velocity(params.c);
    if (N < 1) throw InvalidParameter("resonance scan needs N >= 1");
    std::optional<Resonance> found;
    // The resonance values lie in (1, sqrt(1 + 3 M^2 / 4)].
    if (std::abs(params.c) <= 1.0) return found;
    for (int n = 1; n <= N; ++n) {
        const double v = resonance_velocity(n, params.M);
        if (near_resonance(params.c, v, tol)) {
            if (found)
                throw AmbiguityError("resonance tolerance matches both n = " + std::to_string(found->n_c) +
                                     " and n = " + std::to_string(n));
            found = Resonance{n, v};
        }
    }
    return found;
}

ShiftedEigenvalue shifted_eigenvalue(int n, int j, const ModelParams& params, bool apply_resonance_convention,
                                     double tol) {
    validate_velocity(params.c);
    if (n == 0) throw InvalidParameter("mode 0 carries no eigenvalue");
    if (j < 1 || j > 3) throw InvalidParameter("branch index must be 1, 2 or 3");
    const EigenTriple e = solve_cubic_spectrum(std::abs(n), params.M);
    ShiftedEigenvalue out{n, j, cplx(0.0, params.c * n) + e.mu(j), false};
    if (apply_resonance_convention && j == 2 && n == adjusted_mode(std::abs(n), params.c) &&
        near_resonance(params.c, e.mu2.imag() / std::abs(n), tol)) {
        out.lambda = adjusted_lambda(n, params.c, e);
        out.resonance_adjusted = true;
    }
    return out;
}

Spectrum::Spectrum(double M, double c, int N, bool apply_resonance_convention, double tol)
    : M_(M), c_(c), N_(N), apply_(apply_resonance_convention) {
    validate_memory(M);
    validate_velocity(c);
    if (N < 1) throw InvalidParameter("spectrum needs N >= 1");
    triples_.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) triples_.push_back(solve_cubic_spectrum(n, M));
    if (std::abs(c) > 1.0) {
        for (int n = 1; n <= N; ++n) {
            const double v = triples_[static_cast<std::size_t>(n - 1)].mu2.imag() / n;
            if (near_resonance(c, v, tol)) {
                if (resonance_)
                    throw AmbiguityError("resonance tolerance matches more than one mode");
                resonance_ = Resonance{n, v};
            }
            // Resonance values decrease in n; once below |c| no later mode can match.
            if (v < std::abs(c) * (1.0 - tol)) break;
        }
    }
}

const EigenTriple& Spectrum::triple(int n) const {
    if (n < 1 || n > N_) throw DimensionError("mode outside cached spectrum");
    return triples_[static_cast<std::size_t>(n - 1)];
}

ShiftedEigenvalue Spectrum::eigenvalue(int n, int j) const {
    if (n == 0 || std::abs(n) > N_) throw DimensionError("mode outside cached spectrum");
    const EigenTriple& e = triple(std::abs(n));
    ShiftedEigenvalue out{n, j, cplx(0.0, c_ * n) + e.mu(j), false};
    if (apply_ && resonance_ && j == 2 && n == adjusted_mode(resonance_->n_c, c_)) {
        out.lambda = adjusted_lambda(n, c_, e);
        out.resonance_adjusted = true;
    }
    return out;
}

std::vector<ShiftedEigenvalue> Spectrum::all() const {
    std::vector<ShiftedEigenvalue> out;
    out.reserve(6 * static_cast<std::size_t>(N_));
    for (int n = -N_; n <= N_; ++n) {
        if (n == 0) continue;
        for (int j = 1; j <= 3; ++j) out.push_back(eigenvalue(n, j));
    }
    return out;
}

Eigenvector eigenvector(const ShiftedEigenvalue& ev, double c) {
    const cplx shift(0.0, c * ev.n);
    return {ev.n, ev.j, {cplx(1.0), -ev.lambda, 1.0 / (ev.lambda - shift)}};
}

std::array<cplx, 3> apply_moving_frame_symbol(int n, double M, double c, const std::array<cplx, 3>& v) {
    const double nn = static_cast<double>(n) * n;
    const cplx icn(0.0, c * n);
    return {-v[1], (1.0 - c * c) * nn * v[0] + 2.0 * icn * v[1] - M * nn * v[2], icn * v[2] + v[0]};
}

double eigenvector_residual(const Eigenvector& v, cplx lambda, double M, double c) {
    const auto Av = apply_moving_frame_symbol(v.n, M, c, v.components);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 3; ++k) {
        num += std::norm(Av[k] - lambda * v.components[k]);
        den += std::norm(v.components[k]);
    }
    return std::sqrt(num) / (std::abs(lambda) * std::sqrt(den));
}

RieszMatrix riesz_matrix(int n, const ModelParams& params) { return riesz_matrix(n, params.M, params.c); }

RieszMatrix riesz_matrix(int n, double M, double c) {
    validate_velocity(c);
    if (n == 0) throw InvalidParameter("mode 0 carries no Riesz block");
    const EigenTriple e = solve_cubic_spectrum(std::abs(n), M);
    RieszMatrix r;
    r.n = n;
    const double an = std::abs(n);
    for (int j = 1; j <= 3; ++j) {
        const cplx mu = e.mu(j);
        const cplx lam = cplx(0.0, c * n) + mu;
        r.B(0, j - 1) = 1.0;
        r.B(1, j - 1) = lam / an;
        r.B(2, j - 1) = 1.0 / mu;
    }
    const Eigen::Matrix3cd BB = r.B.adjoint() * r.B;
    const auto ev = hermitian3_eigenvalues(BB);
    for (int k = 0; k < 3; ++k) r.singular_values[static_cast<std::size_t>(k)] = std::sqrt(std::max(ev[static_cast<std::size_t>(k)], 0.0));
    r.det = r.B.determinant();
    return r;
}

Eigen::Matrix3cd riesz_limit_matrix(double M, double c) {
    Eigen::Matrix3cd B;
    const double a = c, b = c + 1.0, d = c - 1.0;
    B << 1.0 + a * a + 1.0 / (M * M), 1.0 + a * b, 1.0 + a * d,
         1.0 + a * b, 1.0 + b * b, 1.0 + b * d,
         1.0 + a * d, 1.0 + b * d, 1.0 + d * d;
    return B;
}

}  // namespace memwave
