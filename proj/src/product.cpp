#include <cmath>
#include <string>

#include "memwave/biorthogonal.hpp"
#include "memwave/error.hpp"

namespace memwave {

namespace {

// Sum over n > N of 1/n^2, i.e. the trigamma function at N + 1.
double tail_zeta2(int N) {
    const double x = N + 1.0;
    const double x2 = x * x;
    return 1.0 / x + 1.0 / (2.0 * x2) + 1.0 / (6.0 * x2 * x) - 1.0 / (30.0 * x2 * x2 * x);
}

simd::ScaledComplex scaled_exp(cplx t) {
    const double ln2 = std::log(2.0);
    const double e = std::floor(t.real() / ln2);
    simd::ScaledComplex s;
    s.mantissa = std::exp(t.real() - e * ln2) * cplx(std::cos(t.imag()), std::sin(t.imag()));
    s.exponent = static_cast<std::int64_t>(e);
    s.normalize();
    return s;
}

simd::ScaledComplex scaled(cplx v) {
    simd::ScaledComplex s;
    s.mantissa = v;
    s.normalize();
    return s;
}

cplx weight_of(cplx lambda) { return 1.0 / (cplx(0.0, 1.0) * std::conj(lambda)); }

}  // namespace

double branch_scale(int j, double c) {
    switch (j) {
        case 1: return c;
        case 2: return c + 1.0;
        case 3: return c - 1.0;
        default: throw InvalidParameter("branch index must be 1, 2 or 3");
    }
}

double nu_asymptotic_constant(int j, double M, double c) {
    switch (j) {
        case 1: return M / c;
        case 2: return -M / (2.0 * (c + 1.0));
        case 3: return -M / (2.0 * (c - 1.0));
        default: throw InvalidParameter("branch index must be 1, 2 or 3");
    }
}

cplx NuSequence::at(int n) const {
    if (n == 0 || std::abs(n) > N) throw DimensionError("nu index out of range");
    return values[static_cast<std::size_t>(n < 0 ? n + N : n + N - 1)];
}

NuSequence nu_sequence(int j, const Spectrum& spectrum) {
    NuSequence s;
    s.branch = j;
    s.scale = branch_scale(j, spectrum.c());
    s.N = spectrum.N();
    s.values.reserve(2 * static_cast<std::size_t>(s.N));
    for (int n = -s.N; n <= s.N; ++n) {
        if (n == 0) continue;
        int source = j;
        if (n < 0 && j == 2) source = 3;
        if (n < 0 && j == 3) source = 2;
        s.values.push_back(spectrum.eigenvalue(n, source).lambda / s.scale);
    }
    return s;
}

ProductEvaluator::ProductEvaluator(double M, double c, int N_prod, bool apply_resonance_convention)
    : spectrum_(M, c, N_prod, apply_resonance_convention) {
    if (N_prod < 2) throw InvalidParameter("product truncation must be at least 2");
    const int N = N_prod;
    weights_.resize(6 * static_cast<std::size_t>(N));
    static constexpr int level_n[6] = {1, -1, 1, -1, 1, -1};
    static constexpr int level_j[6] = {1, 1, 2, 3, 3, 2};
    for (int n = 1; n <= N; ++n) {
        for (int q = 0; q < 6; ++q)
            weights_[slot(level_n[q] * n, level_j[q])] = weight_of(spectrum_.eigenvalue(level_n[q] * n, level_j[q]).lambda);
    }
    tail_ = tail_of(std::span<const cplx>(weights_).subspan(6 * static_cast<std::size_t>(N - 1), 6));

    for (int j = 1; j <= 3; ++j) {
        const NuSequence nu = nu_sequence(j, spectrum_);
        auto& w = nu_weights_[j - 1];
        w.resize(2 * static_cast<std::size_t>(N));
        for (int n = 1; n <= N; ++n) {
            w[2 * static_cast<std::size_t>(n - 1)] = weight_of(nu.at(n));
            w[2 * static_cast<std::size_t>(n - 1) + 1] = weight_of(nu.at(-n));
        }
        nu_tail_[j - 1] = tail_of(std::span<const cplx>(w).subspan(2 * static_cast<std::size_t>(N - 1), 2));
    }
}

std::size_t ProductEvaluator::slot(int n, int j) const {
    const std::size_t base = 6 * static_cast<std::size_t>(std::abs(n) - 1);
    if (j == 1) return base + (n > 0 ? 0 : 1);
    if (j == 2) return base + (n > 0 ? 2 : 5);
    return base + (n > 0 ? 4 : 3);
}

ProductEvaluator::Tail ProductEvaluator::tail_of(std::span<const cplx> last_level) const {
    // Level sums behave like A / n^2; extrapolate from the last computed level.
    const double N = spectrum_.N();
    cplx s1 = 0.0, s2 = 0.0;
    for (cplx w : last_level) {
        s1 += w;
        s2 += w * w;
    }
    const double z2 = tail_zeta2(spectrum_.N());
    return {N * N * s1 * z2, N * N * s2 * z2, N * N * std::abs(s2) * z2};
}

ProductValue ProductEvaluator::finish(simd::ScaledComplex acc, cplx z, const Tail& t) const {
    acc *= scaled_exp(z * t.s1 - 0.5 * z * z * t.s2);
    ProductValue v;
    v.value = acc;
    v.tail_error = 0.5 * std::norm(z) * t.s2_abs + std::abs(z) * std::abs(t.s1) / spectrum_.N();
    return v;
}

ProductValue ProductEvaluator::operator()(cplx z) const {
    simd::ScaledComplex acc = simd::product_one_plus(z, weights_);
    acc *= scaled(z * z * z);
    return finish(acc, z, tail_);
}

ProductValue ProductEvaluator::factored(cplx z) const {
    simd::ScaledComplex acc;
    double err = 0.0;
    for (int j = 1; j <= 3; ++j) {
        const double cj = branch_scale(j, spectrum_.c());
        const cplx u = z / cj;
        simd::ScaledComplex pj = simd::product_one_plus(u, nu_weights_[j - 1]);
        pj *= scaled(cj * u);
        const ProductValue v = finish(pj, u, nu_tail_[j - 1]);
        acc *= v.value;
        err += v.tail_error;
    }
    ProductValue out;
    out.value = acc;
    out.tail_error = err;
    return out;
}

cplx ProductEvaluator::zero(int m, int j) const {
    return cplx(0.0, -1.0) * std::conj(spectrum_.eigenvalue(m, j).lambda);
}

ProductValue ProductEvaluator::derivative_at_zero(int m, int j) const {
    const cplx z = zero(m, j);
    const std::size_t k = slot(m, j);
    const double scale = std::abs(z);
    for (std::size_t q = 0; q < weights_.size(); ++q) {
        if (q != k && std::abs(1.0 + z * weights_[q]) <= 1e-12 * std::max(1.0, scale * std::abs(weights_[q])))
            throw DegeneracyError("double zero of the product at mode " + std::to_string(m) + ", branch " +
                                  std::to_string(j) + "; apply the resonance convention");
    }
    const std::span<const cplx> all(weights_);
    simd::ScaledComplex acc = simd::product_one_plus(z, all.first(k));
    acc *= simd::product_one_plus(z, all.subspan(k + 1));
    acc *= scaled(z * z * z * weights_[k]);
    return finish(acc, z, tail_);
}

double ProductEvaluator::exponential_type_probe(double y) const {
    return (*this)(cplx(0.0, y)).log_abs() / std::abs(y);
}

}  // namespace memwave
