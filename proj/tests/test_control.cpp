#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "memwave/biorthogonal.hpp"
#include "memwave/control.hpp"
#include "memwave/error.hpp"
#include "memwave/numerics.hpp"
#include "memwave/simulator.hpp"

using namespace memwave;

namespace {

FourierField default_y0(int N) { return FourierField::from_modes(N, {{1, 0.1}, {-1, 0.1}, {2, 0.05}, {-2, 0.05}}); }

// Squared L2 norm over (0, T) x support(t) by tensor quadrature of evaluate().
double quadrature_norm2(const ControlField& u) {
    const GaussRule g = gauss_legendre(12);
    return integrate(
        [&](double t) {
            const ControlSet s = u.support_at(t);
            double acc = 0.0;
            for (const Arc& a : s.arcs())
                acc += integrate([&](double x) { return std::norm(u.evaluate(t, x)); }, a.lo, a.hi, 8, g);
            return acc;
        },
        0.0, u.T(), 48, g);
}

struct Fixture {
    ModelParams p;
    FourierField y0 = default_y0(6), y1 = FourierField(6);
    MomentData md = moment_rhs(y0, y1, p, p.N);
    Synthesis syn = synthesize_least_norm(p, md, 0.0);
};

}  // namespace

TEST_CASE("moment right-hand sides") {
    const ModelParams p;
    SUBCASE("unit displacement at n = 1") {
        const FourierField y0 = FourierField::from_modes(2, {{1, 1.0}});
        const MomentData md = moment_rhs(y0, FourierField(2), p, 2);
        CHECK(md.rhs(1, 1).real() == doctest::Approx(-4.28723).epsilon(1e-5));
        for (int j = 1; j <= 3; ++j) {
            const cplx mu = solve_cubic_spectrum(1, 1.0).mu(j);
            CHECK(std::abs(md.rhs(1, j) + two_pi * std::conj(mu)) < 1e-13);
            CHECK(md.rhs(-1, j) == cplx(0.0));
        }
    }
    SUBCASE("unit velocity at n = 2") {
        const FourierField y1 = FourierField::from_modes(3, {{2, 1.0}});
        const MomentData md = moment_rhs(FourierField(3), y1, p, 3);
        for (int j = 1; j <= 3; ++j) CHECK(std::abs(md.rhs(2, j) + two_pi) < 1e-14);
        CHECK(md.modal_count() == 18);
        CHECK_FALSE(md.all_zero());
    }
    SUBCASE("companion rows are homogeneous and deduplicated") {
        const MomentData md = moment_rhs(default_y0(6), FourierField(6), p, 6);
        CHECK(md.rows.size() == 72);
        for (std::size_t k = md.modal_count(); k < md.rows.size(); ++k) {
            CHECK(md.rows[k].zero_row);
            CHECK(md.rows[k].frequency == 0);
            CHECK(md.rows[k].rhs == cplx(0.0));
        }
    }
    SUBCASE("modes above N are rejected") {
        const FourierField y0 = FourierField::from_modes(8, {{7, 1.0}});
        CHECK_THROWS_AS(moment_rhs(y0, FourierField(8), p, 6), DimensionError);
    }
}

TEST_CASE("least-norm synthesis meets every constraint") {
    const Fixture f;
    CHECK_FALSE(f.syn.subcritical);
    CHECK(f.syn.residuals.max_abs <= 1e-8);
    const ConstraintResiduals q = constraint_residuals_quadrature(f.syn.control, f.md);
    CHECK(q.max_abs <= 1e-8);
    CHECK(q.rms <= q.max_abs);
    CHECK(q.values.size() == f.md.rows.size());
}

TEST_CASE("minimum-norm properties") {
    const Fixture f;
    const ControlField& u = f.syn.control;
    // The least-norm control is orthogonal to every x-constant null direction,
    // so its support mean already vanishes.
    for (int i = 0; i <= 12; ++i) CHECK(std::abs(u.support_mean(f.p.T * i / 12.0)) < 1e-10);
    // Its energy is d^H A^{-1} d, the extremal value of the duality quotient.
    const YoungFit y = young_inequality_fit(f.p, f.md, 10, 1);
    CHECK(u.l2_norm() * u.l2_norm() == doctest::Approx(y.supremum).epsilon(1e-8));
    CHECK(quadrature_norm2(u) == doctest::Approx(y.supremum).epsilon(1e-8));
    CHECK(y.max_ratio <= y.supremum * (1 + 1e-12));
}

TEST_CASE("mean-zero correction and frame change") {
    const Fixture f;
    const ControlField corrected = mean_zero_correction(f.syn.control);
    for (const auto& a : corrected.atoms())
        if (a.p == 0) CHECK(a.rate != cplx(0.0));
    const ConstraintResiduals pre = constraint_residuals_quadrature(f.syn.control, f.md);
    const ConstraintResiduals post = constraint_residuals_quadrature(corrected, f.md);
    for (std::size_t k = 0; k < f.md.modal_count(); ++k) CHECK(std::abs(pre.values[k] - post.values[k]) <= 1e-10);
    CHECK(post.max_abs <= 1e-8);
    for (int i = 0; i <= 12; ++i) CHECK(std::abs(corrected.support_mean(f.p.T * i / 12.0)) <= 1e-10);
    CHECK(corrected.l2_norm() == doctest::Approx(f.syn.control.l2_norm()).epsilon(1e-8));

    const ControlField phys = to_physical_frame(corrected, f.p.c);
    CHECK(phys.frame() == Frame::physical);
    CHECK_THROWS_AS(to_physical_frame(phys, f.p.c), FrameError);
    CHECK(phys.l2_norm() == doctest::Approx(corrected.l2_norm()).epsilon(1e-10));
    CHECK(quadrature_norm2(phys) == doctest::Approx(corrected.l2_norm() * corrected.l2_norm()).epsilon(1e-8));
    // u(t, x) = w(t, x + c t).
    for (double t : {0.3, 4.1, 11.7})
        for (double x : {0.1, 1.0, 3.3, 5.9}) {
            const double xi = wrap_angle(x + f.p.c * t);
            CHECK(std::abs(phys.evaluate(t, x) - corrected.evaluate(t, xi)) < 1e-12);
            CHECK(phys.expansion(t, xi) == corrected.expansion(t, xi));
        }
    // Constraints are frame independent.
    CHECK(constraint_residuals_quadrature(phys, f.md).max_abs <= 1e-8);
    CHECK(phys.imaginary_ratio() <= 1e-9);
}

TEST_CASE("physical support is the reference arc moved by -c t") {
    const Fixture f;
    const ControlField phys = to_physical_frame(mean_zero_correction(f.syn.control), f.p.c);
    for (int i = 0; i <= 40; ++i) {
        const double t = f.p.T * i / 40.0;
        for (int k = 0; k < 64; ++k) {
            const double x = two_pi * (k + 0.37) / 64.0;
            const double xi = std::fmod(std::fmod(x + f.p.c * t, two_pi) + two_pi, two_pi);
            const bool inside = xi >= 0.0 && xi <= pi / 2.0;
            CHECK(phys.in_support(t, x) == inside);
            if (!inside) CHECK(phys.evaluate(t, x) == cplx(0.0));
        }
    }
}

TEST_CASE("mode projections: closed form, quadrature and grid transform") {
    const Fixture f;
    const ControlField phys = to_physical_frame(mean_zero_correction(f.syn.control), f.p.c);
    const GaussRule g = gauss_legendre(16);
    for (double t : {0.0, 2.5, 7.9}) {
        const ControlSet s = phys.support_at(t);
        for (int n : {-3, 1, 6}) {
            cplx q = 0.0;
            for (const Arc& a : s.arcs())
                q += integrate([&](double x) { return phys.evaluate(t, x) * std::exp(cplx(0.0, -n * x)); }, a.lo, a.hi,
                               16, g);
            CHECK(std::abs(phys.mode_projection(n, t) - q / two_pi) < 1e-12);
        }
        // Grid projection converges at second order.
        std::vector<double> ks, err;
        for (int K : {256, 1024, 4096}) {
            const FourierField gp = project_on_grid(phys, t, 6, K);
            double e = 0.0;
            for (int n = -6; n <= 6; ++n)
                if (n) e = std::max(e, std::abs(gp[n] - phys.mode_projection(n, t)));
            ks.push_back(K);
            err.push_back(e);
        }
        CHECK(fit_loglog(ks, err).slope <= -1.8);
    }
}

TEST_CASE("zero data gives the zero control") {
    const ModelParams p;
    const MomentData md = moment_rhs(FourierField(6), FourierField(6), p, 6);
    CHECK(md.all_zero());
    const Synthesis s = synthesize_least_norm(p, md, 0.0);
    CHECK(s.control.l2_norm() == 0.0);
    const FourierField b = separable_profile(p.omega0, 64);
    const SeparatedControl sc = synthesize_separated(p, md, b, dual_family_gram(p, 6, 0.0));
    for (double t : {0.0, 3.0, 12.0}) CHECK(sc.v(t) == cplx(0.0));
}

TEST_CASE("separable profile is supported in the arc with zero mean") {
    const ModelParams p;
    const FourierField b = separable_profile(p.omega0, 64);
    CHECK(b[1] != cplx(0.0));
    const auto samples = b.sample(512);
    double outside = 0.0, inside = 0.0;
    for (int k = 0; k < 512; ++k) {
        const double x = two_pi * k / 512;
        (p.omega0.contains(x) ? inside : outside) = std::max((p.omega0.contains(x) ? inside : outside), std::abs(samples[k]));
    }
    CHECK(outside < 1e-3 * inside);
}

TEST_CASE("separable control for a single row and the full data") {
    const ModelParams p;
    const FourierField b = separable_profile(p.omega0, 64);
    const DualFamily dual = dual_family_gram(p, 6, 0.0);
    SUBCASE("single mode") {
        const FourierField y0 = FourierField::from_modes(6, {{3, 0.2}});
        const MomentData md = moment_rhs(y0, FourierField(6), p, 6);
        const SeparatedControl sc = synthesize_separated(p, md, b, dual);
        const ConstraintResiduals q = constraint_residuals_quadrature(sc.field, md, 48, 64, 12);
        CHECK(q.max_abs <= 1e-8);
    }
    SUBCASE("default data drives the state to rest") {
        const FourierField y0 = default_y0(6);
        const MomentData md = moment_rhs(y0, FourierField(6), p, 6);
        const SeparatedControl sc = synthesize_separated(p, md, b, dual);
        CHECK(constraint_residuals_quadrature(sc.field, md, 48, 64, 12).max_abs <= 1e-8);
        // v(t) reproduces the field's time factor.
        const auto& atoms = sc.field.atoms();
        for (double t : {1.0, 6.0}) {
            cplx f1 = 0.0;
            for (const auto& a : atoms)
                if (a.p == 1) f1 += a.coef * std::exp(-a.rate * t);
            CHECK(std::abs(f1 - b[1] * sc.v(t)) < 1e-10 * std::max(1.0, std::abs(f1)));
        }
        SimulationOptions o;
        o.N_t = 12288;
        const ControlField phys = to_physical_frame(mean_zero_correction(sc.field), p.c);
        CHECK(terminal_report(simulate_forward(p, y0, FourierField(6), phys, o)).relative_total <= 1e-4);
    }
}

TEST_CASE("profile with a vanishing mode is rejected") {
    const ModelParams p;
    FourierField b = separable_profile(p.omega0, 64);
    b.at(3) = 0.0;
    const MomentData md = moment_rhs(default_y0(6), FourierField(6), p, 6);
    CHECK_THROWS_AS(synthesize_separated(p, md, b, dual_family_gram(p, 6, 0.0)), UnscalableRowError);
}

TEST_CASE("real data produce a real control") {
    const ModelParams p;
    const FourierField y0 = FourierField::from_modes(5, {{1, 0.3}, {-1, 0.3}, {4, cplx(0.1, 0.2)}, {-4, cplx(0.1, -0.2)}});
    const FourierField y1 = FourierField::from_modes(5, {{2, cplx(0.0, 0.5)}, {-2, cplx(0.0, -0.5)}});
    ModelParams q = p;
    q.N = 5;
    const MomentData md = moment_rhs(y0, y1, q, 5);
    const Synthesis s = synthesize_least_norm(q, md, 0.0);
    const ControlField phys = to_physical_frame(mean_zero_correction(s.control), q.c);
    CHECK(phys.imaginary_ratio() <= 1e-9);
    // Complex data give a genuinely complex control.
    const FourierField z0 = FourierField::from_modes(5, {{1, 0.3}});
    const Synthesis sz = synthesize_least_norm(q, moment_rhs(z0, FourierField(5), q, 5), 0.0);
    CHECK(to_physical_frame(mean_zero_correction(sz.control), q.c).imaginary_ratio() > 1e-3);
}

TEST_CASE("duality quotient constant is stable across N") {
    std::vector<double> sup;
    for (int N : {4, 6, 8}) {
        ModelParams p;
        p.N = N;
        const MomentData md = moment_rhs(default_y0(N), FourierField(N), p, N);
        const YoungFit y = young_inequality_fit(p, md, 100, 20191105);
        CHECK(std::isfinite(y.supremum));
        CHECK(y.max_ratio > 0.0);
        CHECK(y.max_ratio <= y.supremum * (1 + 1e-12));
        sup.push_back(y.supremum);
    }
    // The data live on |n| <= 2, so added modes only refine the constant.
    CHECK(sup[1] / sup[0] == doctest::Approx(1.0).epsilon(0.5));
    CHECK(sup[2] / sup[1] == doctest::Approx(1.0).epsilon(0.5));
}

TEST_CASE("subcritical horizon is flagged") {
    ModelParams p;
    p.T = 5.0;
    CHECK(p.T < p.minimal_time());
    const MomentData md = moment_rhs(default_y0(4), FourierField(4), p, 4);
    p.N = 4;
    const Synthesis s = synthesize_least_norm(p, md, 1e-10);
    CHECK(s.subcritical);
    CHECK_FALSE(s.warnings.empty());
}
