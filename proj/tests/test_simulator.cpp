#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "memwave/error.hpp"
#include "memwave/numerics.hpp"
#include "memwave/simulator.hpp"
#include "memwave/spectrum.hpp"

using namespace memwave;

namespace {

using Mat3 = Eigen::Matrix3cd;

// Scaling and squaring with a 20-term Taylor series.
Mat3 taylor_expm(const Mat3& A) {
    const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    while (norm / std::ldexp(1.0, s) > 0.5) ++s;
    const Mat3 B = A / std::ldexp(1.0, s);
    Mat3 term = Mat3::Identity(), E = Mat3::Identity();
    for (int k = 1; k <= 20; ++k) {
        term = term * B / double(k);
        E += term;
    }
    for (int k = 0; k < s; ++k) E = E * E;
    return E;
}

Mat3 generator(int n, double M) {
    const double nn = double(n) * n;
    Mat3 A;
    A << 0, 1, 0, -nn, 0, -M, -nn, 0, 0;
    return A;
}

FourierField default_y0(int N) { return FourierField::from_modes(N, {{1, 0.1}, {-1, 0.1}, {2, 0.05}, {-2, 0.05}}); }

ControlField no_control(const ModelParams& p) { return ControlField(Frame::physical, p.omega0, p.c, p.T, {}); }

ControlField synthesized(const ModelParams& p, const FourierField& y0, const FourierField& y1) {
    const MomentData md = moment_rhs(y0, y1, p, p.N);
    return to_physical_frame(mean_zero_correction(synthesize_least_norm(p, md, 0.0).control), p.c);
}

StateTriple random_terminal(int N, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> d;
    StateTriple s = StateTriple::zero(N);
    for (FourierField* f : {&s.first, &s.second, &s.third})
        for (int n = -N; n <= N; ++n)
            if (n) f->at(n) = cplx(d(gen), d(gen));
    return s;
}

}  // namespace

TEST_CASE("mode flow matches an independent matrix exponential") {
    for (double M : {1.0, -2.0}) {
        for (int n = -8; n <= 8; ++n) {
            if (n == 0) continue;
            for (double t : {0.01, 0.7, 5.0}) {
                const auto F = mode_flow(n, M, t);
                const Mat3 E = taylor_expm(generator(n, M) * t);
                double err = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(F[i][k] - E(i, k)));
                CHECK(err <= 1e-8 * std::max(1.0, E.cwiseAbs().maxCoeff()));
            }
        }
    }
    CHECK_THROWS_AS(mode_flow(0, 1.0, 1.0), InvalidParameter);
}

TEST_CASE("free evolution grows at the rate of the real root") {
    const double mu = solve_cubic_spectrum(1, 1.0).mu1;
    std::vector<double> ts, logs;
    for (double t = 20.0; t <= 40.0; t += 5.0) {
        const auto F = mode_flow(1, 1.0, t);
        double m = 0.0;
        for (const auto& row : F)
            for (cplx v : row) m = std::max(m, std::abs(v));
        ts.push_back(t);
        logs.push_back(std::log(m));
    }
    CHECK(fit_line(ts, logs).slope == doctest::Approx(mu).epsilon(1e-6));
}

TEST_CASE("forward simulation of free modes against the oracle") {
    ModelParams p;
    p.T = 5.0;
    p.N = 8;
    std::mt19937 gen(3);
    std::normal_distribution<double> d;
    FourierField y0(8), y1(8);
    for (int n = -8; n <= 8; ++n)
        if (n) {
            y0.at(n) = cplx(d(gen), d(gen));
            y1.at(n) = cplx(d(gen), d(gen));
        }
    SimulationOptions o;
    o.N_t = 2000;
    const Trajectory tr = simulate_forward(p, y0, y1, no_control(p), o);
    for (int n = -8; n <= 8; ++n) {
        if (n == 0) continue;
        const Eigen::Vector3cd x0(y0[n], y1[n], 0.0);
        const Eigen::Vector3cd ref = taylor_expm(generator(n, p.M) * p.T) * x0;
        const Eigen::Vector3cd got(tr.terminal.first[n], tr.terminal.second[n], tr.terminal.third[n]);
        CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
    CHECK(tr.z_consistency <= 1e-8);
    o.integrator = Integrator::rk4;
    const Trajectory rk = simulate_forward(p, y0, y1, no_control(p), o);
    for (int n = 1; n <= 8; ++n)
        CHECK(std::abs(rk.terminal.first[n] - tr.terminal.first[n]) <= 1e-6 * std::max(1.0, std::abs(tr.terminal.first[n])));
}

TEST_CASE("zero data and zero control stay at rest") {
    const ModelParams p;
    SimulationOptions o;
    o.N_t = minimal_steps(p.T, 6);
    const Trajectory tr = simulate_forward(p, FourierField(6), FourierField(6), no_control(p), o);
    for (const auto& s : tr.snapshots)
        for (const FourierField* f : {&s.first, &s.second, &s.third})
            for (cplx v : f->data()) CHECK(v == cplx(0.0));
    CHECK(tr.snapshots.size() == tr.times.size());
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == doctest::Approx(p.T));
    CHECK(tr.h == doctest::Approx(p.T / o.N_t));
}

TEST_CASE("snapshot stride") {
    const ModelParams p;
    SimulationOptions o;
    o.N_t = 1000;
    const Trajectory a = simulate_forward(p, default_y0(6), FourierField(6), no_control(p), o);
    CHECK(a.snapshots.size() == 201);
    o.stride = 100;
    const Trajectory b = simulate_forward(p, default_y0(6), FourierField(6), no_control(p), o);
    CHECK(b.snapshots.size() == 11);
    CHECK(b.terminal.first[1] == a.terminal.first[1]);
}

TEST_CASE("input errors") {
    const ModelParams p;
    SimulationOptions o;
    CHECK(minimal_steps(12.0, 6) == 720);
    o.N_t = 719;
    CHECK_THROWS_AS(simulate_forward(p, default_y0(6), FourierField(6), no_control(p), o), InvalidParameter);
    o.N_t = 720;
    const ControlField moving(Frame::moving, p.omega0, p.c, p.T, {});
    CHECK_THROWS_AS(simulate_forward(p, default_y0(6), FourierField(6), moving, o), FrameError);
    CHECK_THROWS_AS(simulate_forward(p, default_y0(6), FourierField(4), no_control(p), o), DimensionError);
    CHECK_NOTHROW(simulate_forward(p, default_y0(6), FourierField(6), no_control(p), o));
}

TEST_CASE("synthesized control drives the truncated state to rest") {
    const ModelParams p;
    const FourierField y0 = default_y0(6), y1(6);
    const ControlField u = synthesized(p, y0, y1);
    SimulationOptions o;
    o.N_t = 8192;
    const Trajectory tr = simulate_forward(p, y0, y1, u, o);
    const TerminalReport r = terminal_report(tr);
    CHECK(r.relative_total <= 1e-3);
    CHECK(tr.z_consistency <= 1e-8);
    CHECK(r.initial_total == doctest::Approx(sobolev_norm(y0, 1.0) + sobolev_norm(y1, 0.0)));
    const TerminalReport free = terminal_report(simulate_forward(p, y0, y1, no_control(p), o));
    CHECK(free.relative_total > 1.0);

    o.integrator = Integrator::rk4;
    const TerminalReport rk = terminal_report(simulate_forward(p, y0, y1, u, o));
    CHECK(rk.relative_total <= 1e-3);

    // The grid transform path converges to the closed-form projection.
    SimulationOptions g;
    g.N_t = 768;
    g.projection = Projection::grid;
    const Trajectory ref = simulate_forward(p, y0, y1, u, {768});
    std::vector<double> ks, err;
    for (int K : {256, 1024, 4096}) {
        g.grid_size = K;
        const Trajectory tg = simulate_forward(p, y0, y1, u, g);
        double e = 0.0;
        for (int n = 1; n <= 6; ++n) e = std::max(e, std::abs(tg.terminal.first[n] - ref.terminal.first[n]));
        ks.push_back(K);
        err.push_back(e);
    }
    CHECK(fit_loglog(ks, err).slope <= -1.8);
}

TEST_CASE("solutions scale linearly") {
    const ModelParams p;
    const FourierField y0 = default_y0(6), y1(6);
    const ControlField u = synthesized(p, y0, y1);
    SimulationOptions o;
    o.N_t = 1024;
    const Trajectory a = simulate_forward(p, y0, y1, u, o);
    std::vector<ControlAtom> scaled = u.atoms();
    for (auto& at : scaled) at.coef *= 3.0;
    const Trajectory b = simulate_forward(p, cplx(3.0) * y0, cplx(3.0) * y1,
                                          ControlField(Frame::physical, u.reference_support(), p.c, p.T, scaled), o);
    double sup_a = 0.0, sup_b = 0.0;
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        sup_a = std::max(sup_a, state_norm(a.snapshots[k], 0.0));
        sup_b = std::max(sup_b, state_norm(b.snapshots[k], 0.0));
    }
    // The controlled state cancels terms of size e^{mu1 T}; roundoff scales with them.
    const double growth = std::exp(solve_cubic_spectrum(1, p.M).mu1 * p.T);
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        const double na = state_norm(a.snapshots[k], 0.0), nb = state_norm(b.snapshots[k], 0.0);
        CHECK(std::abs(nb - 3.0 * na) <= 1e-12 * growth * sup_b);
    }
    // The energy-to-input ratio does not depend on the input scale.
    const double in_a = sobolev_norm(y0, 1.0) + sobolev_norm(y1, 0.0) + u.l2_norm();
    const double in_b = 3.0 * (sobolev_norm(y0, 1.0) + sobolev_norm(y1, 0.0)) +
                        ControlField(Frame::physical, u.reference_support(), p.c, p.T, scaled).l2_norm();
    CHECK(sup_b / in_b == doctest::Approx(sup_a / in_a).epsilon(1e-12));
}

TEST_CASE("adjoint solution") {
    const ModelParams p;
    const StateTriple term = random_terminal(4, 5);
    const AdjointSolution adj = simulate_adjoint_exact(p, term);
    CHECK(adj.N() == 4);
    SUBCASE("terminal values are reproduced") {
        const StateTriple s = adj.state(p.T);
        for (int n = -4; n <= 4; ++n) {
            if (n == 0) continue;
            CHECK(std::abs(s.first[n] - term.first[n]) < 1e-12);
            CHECK(std::abs(s.second[n] - term.second[n]) < 1e-12);
            CHECK(std::abs(s.third[n] - term.third[n]) < 1e-12);
        }
    }
    SUBCASE("physical components satisfy the adjoint system") {
        const double h = 1e-4;
        for (int n : {-4, -1, 2, 3}) {
            const double nn = double(n) * n;
            for (double t : {0.5, 6.0, 11.0}) {
                const auto m = adj.physical_mode(n, t), mp = adj.physical_mode(n, t + h), mm = adj.physical_mode(n, t - h);
                const double scale = std::max({1.0, std::abs(m[0]) * nn, std::abs(m[2]) * nn});
                // p' = p_t
                CHECK(std::abs((mp[0] - mm[0]) / (2 * h) - m[1]) < 1e-6 * scale);
                // p_tt + n^2 p - M n^2 q = 0
                CHECK(std::abs((mp[1] - mm[1]) / (2 * h) + nn * m[0] - p.M * nn * m[2]) < 1e-6 * scale);
                // q' = -p
                CHECK(std::abs((mp[2] - mm[2]) / (2 * h) + m[0]) < 1e-6 * scale);
            }
        }
    }
    SUBCASE("exponents are the shifted eigenvalues") {
        for (int n : {-3, 1, 4}) {
            const auto& ex = adj.exponents(n);
            for (int j = 1; j <= 3; ++j)
                CHECK(std::abs(ex[static_cast<std::size_t>(j - 1)] - shifted_eigenvalue(n, j, p, false).lambda) < 1e-12);
        }
        CHECK_THROWS_AS(adj.coefficients(5), DimensionError);
    }
    SUBCASE("zero terminal data") {
        const AdjointSolution z = simulate_adjoint_exact(p, StateTriple::zero(4));
        const StateTriple s = z.state(3.0);
        for (cplx v : s.first.data()) CHECK(v == cplx(0.0));
    }
}

TEST_CASE("duality identity") {
    ModelParams p;
    p.N = 4;
    std::mt19937 gen(9);
    std::normal_distribution<double> d;
    FourierField y0(4), y1(4);
    for (int n = -4; n <= 4; ++n)
        if (n) {
            y0.at(n) = 0.1 * cplx(d(gen), d(gen));
            y1.at(n) = 0.1 * cplx(d(gen), d(gen));
        }
    const ControlField u = synthesized(p, default_y0(4), FourierField(4));
    const StateTriple term = random_terminal(4, 21);
    SimulationOptions o;
    o.N_t = 4096;
    const DualityTerms t = duality_residual(p, y0, y1, u, term, o);
    CHECK(t.residual <= 1e-6);
    cplx sum = 0.0;
    for (cplx v : t.rhs_terms) sum += v;
    CHECK(std::abs(sum - t.rhs) < 1e-12 * std::abs(t.rhs));
    std::vector<double> steps, res;
    for (int Nt : {512, 2048, 8192}) {
        o.N_t = Nt;
        steps.push_back(Nt);
        res.push_back(duality_residual(p, y0, y1, u, term, o).residual);
    }
    CHECK(fit_loglog(steps, res).slope <= -3.5);
}
