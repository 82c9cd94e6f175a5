#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "memwave/biorthogonal.hpp"
#include "memwave/error.hpp"
#include "memwave/numerics.hpp"

using namespace memwave;

namespace {


// log of z^3 prod (1 + z / (i conj lambda)) over |n| <= N, no tail.
cplx naive_log_product(cplx z, double M, double c, int N) {
    cplx acc = 3.0 * std::log(z);
    for (int n = 1; n <= N; ++n) {
        const EigenTriple e = solve_cubic_spectrum(n, M);
        for (int j = 1; j <= 3; ++j)
            for (int s : {1, -1}) {
                const cplx lam = cplx(0.0, c * s * n) + e.mu(j);
                acc += std::log(1.0 + z / (cplx(0.0, 1.0) * std::conj(lam)));
            }
    }
    return acc;
}

}  // namespace

TEST_CASE("exp inner product matches quadrature") {
    const GaussRule g = gauss_legendre(16);
    for (auto [a, b] : {std::pair<cplx, cplx>{{0.7, 3.0}, {0.2, -5.0}}, {{1e-7, 2.0}, {-1e-7, 2.0}}, {{-1.5, 0.0}, {0.3, 9.0}}}) {
        const double T = 6.0;
        const cplx q = integrate([&](double t) { return std::exp(-a * t) * std::conj(std::exp(-b * t)); }, -T / 2, T / 2,
                                 64, g);
        CHECK(std::abs(exp_inner_product(a, b, T) - q) < 1e-12 * std::max(1.0, std::abs(q)));
    }
}

TEST_CASE("product agrees with an independent long truncation") {
    const ProductEvaluator P(1.0, 2.0, 4000);
    for (cplx z : {cplx(0.3, 0.4), cplx(2.5, -1.0), cplx(-4.0, 7.0)}) {
        // The truncation error of the reference is O(1 / N); extrapolate it away.
        const cplx ref = 2.0 * naive_log_product(z, 1.0, 2.0, 400000) - naive_log_product(z, 1.0, 2.0, 200000);
        const ProductValue v = P(z);
        const double err = std::abs(v.log_abs() - ref.real());
        CHECK(err < 1e-6);
        CHECK(err <= v.tail_error);
        CHECK(std::abs(std::arg(v.to_complex() / std::exp(cplx(0.0, ref.imag())))) < 1e-6);
    }
}

TEST_CASE("direct and factored product agree") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> re(-50.0, 50.0), im(-1.0, 1.0);
    for (double c : {2.0, 0.5}) {
        const ProductEvaluator P(1.0, c, 2000);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const cplx z(re(gen), im(gen));
            const cplx a = P(z).to_complex(), b = P.factored(z).to_complex();
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
        CHECK(worst <= 1e-10);
        for (cplx z : {cplx(-3.0, 20.0), cplx(50.0, -40.0), cplx(0.0, 300.0)}) {
            const ProductValue a = P(z), b = P.factored(z);
            CHECK(std::abs(a.log_abs() - b.log_abs()) < 1e-10 * std::max(1.0, std::abs(a.log_abs())));
        }
    }
}

TEST_CASE("nu sequences approach i n plus a branch constant") {
    for (double c : {2.0, 0.5}) {
        const double M = 1.0;
        const Spectrum s(M, c, 4000);
        CHECK(nu_asymptotic_constant(1, M, c) == doctest::Approx(M / c));
        CHECK(nu_asymptotic_constant(2, M, c) == doctest::Approx(-M / (2 * (c + 1))));
        CHECK(nu_asymptotic_constant(3, M, c) == doctest::Approx(-M / (2 * (c - 1))));
        for (int j = 1; j <= 3; ++j) {
            const NuSequence nu = nu_sequence(j, s);
            CHECK(nu.scale == doctest::Approx(branch_scale(j, c)));
            std::vector<double> ns, dev;
            for (int n = 50; n <= 4000; n *= 2) {
                CHECK(std::abs(nu.at(-n) - std::conj(nu.at(n))) < 1e-12 * n);
                ns.push_back(n);
                dev.push_back(std::abs(nu.at(n) - cplx(0.0, n) - nu_asymptotic_constant(j, M, c)));
            }
            CHECK(fit_loglog(ns, dev).slope <= -0.8);
        }
    }
}

TEST_CASE("product vanishes at the mapped spectrum") {
    const ProductEvaluator P(1.0, 2.0, 2000);
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> m(-2000, 2000), j(1, 3);
    for (int k = 0; k < 20; ++k) {
        int n = m(gen);
        if (n == 0) n = 1;
        const cplx z0 = P.zero(n, j(gen));
        double near = 0.0;
        for (int q = 0; q < 16; ++q) near = std::max(near, P(z0 + 0.25 * std::polar(1.0, 2 * pi * q / 16)).log_abs());
        CHECK(std::exp(P(z0).log_abs() - near) < 1e-6);
    }
}

TEST_CASE("exponential type along the imaginary axis") {
    const double c = 2.0;
    const double type = pi * (1 / c + 1 / (c + 1) + 1 / (c - 1));
    const ProductEvaluator P(1.0, c, 10000);
    for (double y : {1000.0, -1000.0}) CHECK(std::abs(P.exponential_type_probe(y) - type) / type < 0.15);
}

TEST_CASE("derivative at the zeros has a polynomial floor") {
    const ProductEvaluator P(1.0, 2.0, 4000);
    std::vector<double> ms, lo;
    for (int m = 1; m <= 64; m *= 2) {
        double v = 1e300;
        for (int s : {1, -1})
            for (int j = 1; j <= 3; ++j) {
                const double d = std::exp(P.derivative_at_zero(s * m, j).log_abs());
                v = std::min(v, double(m) * m * d);
                // Derivative against a centred difference of the product.
                const cplx z0 = P.zero(s * m, j);
                const double h = 1e-5;
                const cplx fd = (P(z0 + h).to_complex() - P(z0 - h).to_complex()) / (2 * h);
                CHECK(std::abs(fd) == doctest::Approx(d).epsilon(1e-4));
            }
        ms.push_back(m);
        lo.push_back(v);
    }
    CHECK(lo.front() > 0.0);
    CHECK(fit_loglog(ms, lo).slope >= -0.25);
}

TEST_CASE("dual family is biorthogonal") {
    const ModelParams p{1.0, 2.0, 12.0};
    const DualFamily d = dual_family_gram(p, 8, 0.0);
    CHECK(d.family.size() == 48);
    CHECK(d.pairing_defect() <= 1e-8);
    CHECK(atom_growth_exponent(d) <= 2.3);
    // Quadrature pairing for a few members.
    const GaussRule g = gauss_legendre(16);
    for (std::size_t m : {std::size_t{0}, std::size_t{17}, std::size_t{47}}) {
        for (std::size_t n : {std::size_t{0}, std::size_t{17}, std::size_t{30}}) {
            const cplx lam = d.family[n].lambda;
            const cplx q = integrate([&](double t) { return d.evaluate(m, t) * std::conj(std::exp(-lam * t)); }, -6.0,
                                     6.0, 400, g);
            CHECK(std::abs(q - (m == n ? 1.0 : 0.0)) < 1e-7);
        }
    }
    CHECK(d.index_of(d.family[5].n, d.family[5].j) == 5);
    CHECK_THROWS_AS(d.index_of(9, 1), DimensionError);
}

TEST_CASE("summation inequality for a single coefficient") {
    const DualFamily d = dual_family_gram({1.0, 2.0, 12.0}, 4, 0.0);
    std::vector<cplx> a(d.family.size(), 0.0);
    const std::size_t k = 7;
    a[k] = cplx(2.0, -1.0);
    const SummationCheck s = summation_inequality_check(a, d);
    const double n = d.family[k].n;
    CHECK(s.lhs == doctest::Approx(5.0 / (n * n * n * n)));
    // |a|^2 times the integral of e^{-2 Re(lambda) t}.
    const double r = 2 * d.family[k].lambda.real();
    CHECK(s.rhs == doctest::Approx(5.0 * 2.0 * std::sinh(r * 6.0) / r).epsilon(1e-12));
    std::vector<cplx> bad(3);
    CHECK_THROWS_AS(summation_inequality_check(bad, d), DimensionError);
}

TEST_CASE("short horizon triggers the conditioning error") {
    try {
        (void)dual_family_gram({1.0, 2.0, 0.5}, 12, 0.0);
        FAIL("expected a conditioning error");
    } catch (const ConditioningError& e) {
        CHECK(e.condition_number() >= max_unregularized_condition);
        CHECK(e.suggested_N() == 9);
    }
    const DualFamily d = dual_family_gram({1.0, 2.0, 0.5}, 12, 1e-6);
    CHECK(d.regularization == 1e-6);
}
