#include "memwave/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "memwave/error.hpp"
#include "memwave/numerics.hpp"
#include "memwave/spectrum.hpp"

namespace memwave {

namespace {

using Vec3 = std::array<cplx, 3>;
using Mat3 = std::array<Vec3, 3>;

Vec3 mat_vec(const Mat3& A, const Vec3& x) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) r[i] += A[i][k] * x[k];
    return r;
}

Vec3 column(const Mat3& A, int k) { return {A[0][k], A[1][k], A[2][k]}; }

// Right-hand side of the mode ODE.
Vec3 mode_rhs(int n, double M, const Vec3& x, cplx f) {
    const double n2 = static_cast<double>(n) * n;
    return {x[1], -n2 * x[0] - M * x[2] + f, -n2 * x[0]};
}

std::vector<cplx> sources_at(const ControlField& u, const std::vector<ModeSource>& modes, Projection proj, int N, int K,
                             double t) {
    std::vector<cplx> f(static_cast<std::size_t>(2 * N));
    if (proj == Projection::closed_form) {
        for (std::size_t q = 0; q < modes.size(); ++q) f[q] = u.evaluate_source(modes[q], t);
    } else {
        const FourierField g = project_on_grid(u, t, N, K);
        std::copy(g.data().begin(), g.data().end(), f.begin());
    }
    return f;
}

}  // namespace

int minimal_steps(double T, int N) { return static_cast<int>(std::ceil(10.0 * T * N - 1e-9)); }

std::array<std::array<cplx, 3>, 3> mode_flow(int n, double M, double t) {
    if (n == 0) throw InvalidParameter("mode flow is defined for n != 0");
    const EigenTriple e = solve_cubic_spectrum(std::abs(n), M);
    const double n2 = static_cast<double>(n) * n;
    Eigen::Matrix3cd V;
    Eigen::Vector3cd d;
    for (int j = 0; j < 3; ++j) {
        const cplx mu = e.mu(j + 1);
        V(0, j) = 1.0;
        V(1, j) = mu;
        V(2, j) = -n2 / mu;
        d(j) = std::exp(mu * t);
    }
    const Eigen::Matrix3cd E = V * d.asDiagonal() * V.inverse();
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) out[i][k] = E(i, k);
    return out;
}

Trajectory simulate_forward(const ModelParams& params, const FourierField& y0, const FourierField& y1,
                            const ControlField& u, const SimulationOptions& options) {
    params.validate();
    if (u.frame() != Frame::physical) throw FrameError("forward simulation expects a physical-frame control");
    if (y0.N() != y1.N()) throw DimensionError("initial displacement and velocity have different truncations");
    const int N = y0.N();
    if (N < 1) throw DimensionError("initial data need at least one mode");
    const int need = minimal_steps(params.T, N);
    if (options.N_t < need)
        throw InvalidParameter("N_t = " + std::to_string(options.N_t) + " is below the resolution floor " +
                               std::to_string(need) + " (10 T N)");
    const int K = options.grid_size > 0 ? options.grid_size : default_grid_size(N);
    const int stride = options.stride > 0 ? options.stride : (options.N_t + 199) / 200;

    Trajectory tr;
    tr.params = params;
    tr.N = N;
    tr.N_t = options.N_t;
    tr.h = params.T / options.N_t;
    const double h = tr.h;
    const std::size_t slots = static_cast<std::size_t>(2 * N);

    std::vector<Vec3> x(slots);
    std::vector<Mat3> Eh(slots), Ehalf(slots);
    std::vector<cplx> integral(slots, 0.0);
    std::vector<double> zmax(slots, 0.0), zerr(slots, 0.0);
    for (std::size_t q = 0; q < slots; ++q) {
        const int n = FourierField::mode_at(N, q);
        x[q] = {y0.data()[q], y1.data()[q], 0.0};
        if (options.integrator == Integrator::exponential) {
            Eh[q] = mode_flow(n, params.M, h);
            Ehalf[q] = mode_flow(n, params.M, h / 2.0);
        }
    }
    const std::vector<ModeSource> modes =
        options.projection == Projection::closed_form ? u.mode_sources(N) : std::vector<ModeSource>{};
    auto src = [&](double t) { return sources_at(u, modes, options.projection, N, K, t); };

    auto record = [&](double t) {
        StateTriple s = StateTriple::zero(N);
        for (std::size_t q = 0; q < slots; ++q) {
            s.first.data()[q] = x[q][0];
            s.second.data()[q] = x[q][1];
            s.third.data()[q] = x[q][2];
        }
        tr.times.push_back(t);
        tr.snapshots.push_back(std::move(s));
    };
    record(0.0);

    std::vector<cplx> f0 = src(0.0);
    for (int k = 0; k < options.N_t; ++k) {
        const double t = k * h;
        const std::vector<cplx> fm = src(t + h / 2.0);
        const std::vector<cplx> f1 = src(t + h);
        for (std::size_t q = 0; q < slots; ++q) {
            const int n = FourierField::mode_at(N, q);
            const Vec3 old = x[q];
            if (options.integrator == Integrator::exponential) {
                Vec3 nx = mat_vec(Eh[q], old);
                const Vec3 a = column(Eh[q], 1), b = column(Ehalf[q], 1);
                for (int i = 0; i < 3; ++i) nx[i] += h / 6.0 * (f0[q] * a[i] + 4.0 * fm[q] * b[i]);
                nx[1] += h / 6.0 * f1[q];
                x[q] = nx;
            } else {
                const Vec3 k1 = mode_rhs(n, params.M, old, f0[q]);
                Vec3 tmp;
                for (int i = 0; i < 3; ++i) tmp[i] = old[i] + 0.5 * h * k1[i];
                const Vec3 k2 = mode_rhs(n, params.M, tmp, fm[q]);
                for (int i = 0; i < 3; ++i) tmp[i] = old[i] + 0.5 * h * k2[i];
                const Vec3 k3 = mode_rhs(n, params.M, tmp, fm[q]);
                for (int i = 0; i < 3; ++i) tmp[i] = old[i] + h * k3[i];
                const Vec3 k4 = mode_rhs(n, params.M, tmp, f1[q]);
                for (int i = 0; i < 3; ++i) x[q][i] = old[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            // Trapezoid with the end-point derivative correction.
            integral[q] += 0.5 * h * (old[0] + x[q][0]) - h * h / 12.0 * (x[q][1] - old[1]);
        }
        f0 = f1;
        if ((k + 1) % stride == 0 || k + 1 == options.N_t) {
            for (std::size_t q = 0; q < slots; ++q) {
                const double n = FourierField::mode_at(N, q);
                zmax[q] = std::max(zmax[q], std::abs(x[q][2]));
                zerr[q] = std::max(zerr[q], std::abs(x[q][2] + n * n * integral[q]));
            }
            record((k + 1) * h);
        }
    }
    for (std::size_t q = 0; q < slots; ++q)
        if (zmax[q] > 0.0) tr.z_consistency = std::max(tr.z_consistency, zerr[q] / zmax[q]);
    tr.terminal = tr.snapshots.back();
    return tr;
}

AdjointSolution::AdjointSolution(const ModelParams& params, const StateTriple& terminal)
    : params_(params), N_(terminal.N()) {
    params.validate();
    if (N_ < 1) throw DimensionError("adjoint terminal data need at least one mode");
    // Per mode the three roots are always distinct, so the exact spectrum is used.
    const Spectrum spec(params.M, params.c, N_, false);
    const std::size_t slots = static_cast<std::size_t>(2 * N_);
    coeffs_.resize(slots);
    lambdas_.resize(slots);
    basis_.resize(slots);
    for (std::size_t q = 0; q < slots; ++q) {
        const int n = FourierField::mode_at(N_, q);
        Eigen::Matrix3cd P;
        for (int j = 0; j < 3; ++j) {
            const ShiftedEigenvalue ev = spec.eigenvalue(n, j + 1);
            lambdas_[q][j] = ev.lambda;
            basis_[q][j] = eigenvector(ev, params.c).components;
            for (int i = 0; i < 3; ++i) P(i, j) = basis_[q][j][i];
        }
        const Eigen::Vector3cd rhs(terminal.first.data()[q], terminal.second.data()[q], terminal.third.data()[q]);
        Eigen::FullPivLU<Eigen::Matrix3cd> lu(P);
        if (!lu.isInvertible()) throw DegeneracyError("eigenvector basis is singular at mode " + std::to_string(n));
        const Eigen::Vector3cd b = lu.solve(rhs);
        for (int j = 0; j < 3; ++j) coeffs_[q][j] = b(j);
    }
}

std::size_t AdjointSolution::slot(int n) const {
    if (n == 0 || std::abs(n) > N_) throw DimensionError("mode outside the adjoint truncation");
    return static_cast<std::size_t>(n < 0 ? n + N_ : n + N_ - 1);
}

const std::array<cplx, 3>& AdjointSolution::coefficients(int n) const { return coeffs_[slot(n)]; }
const std::array<cplx, 3>& AdjointSolution::exponents(int n) const { return lambdas_[slot(n)]; }

StateTriple AdjointSolution::state(double t) const {
    StateTriple s = StateTriple::zero(N_);
    for (std::size_t q = 0; q < coeffs_.size(); ++q) {
        Vec3 v{};
        for (int j = 0; j < 3; ++j) {
            const cplx w = coeffs_[q][j] * std::exp(lambdas_[q][j] * (params_.T - t));
            for (int i = 0; i < 3; ++i) v[i] += w * basis_[q][j][i];
        }
        s.first.data()[q] = v[0];
        s.second.data()[q] = v[1];
        s.third.data()[q] = v[2];
    }
    return s;
}

std::array<cplx, 3> AdjointSolution::physical_mode(int n, double t) const {
    const std::size_t q = slot(n);
    Vec3 v{};
    for (int j = 0; j < 3; ++j) {
        const cplx w = coeffs_[q][j] * std::exp(lambdas_[q][j] * (params_.T - t));
        for (int i = 0; i < 3; ++i) v[i] += w * basis_[q][j][i];
    }
    const cplx ph = std::exp(cplx(0.0, n * params_.c * t));
    const cplx inc(0.0, n * params_.c);
    return {v[0] * ph, (v[1] + inc * v[0]) * ph, v[2] * ph};
}

AdjointSolution simulate_adjoint_exact(const ModelParams& params, const StateTriple& terminal) {
    return AdjointSolution(params, terminal);
}

DualityTerms duality_residual(const ModelParams& params, const FourierField& y0, const FourierField& y1,
                              const ControlField& u, const StateTriple& adjoint_terminal,
                              const SimulationOptions& options) {
    const Trajectory tr = simulate_forward(params, y0, y1, u, options);
    const AdjointSolution adj(params, adjoint_terminal);
    if (adj.N() != tr.N) throw DimensionError("forward and adjoint truncations differ");
    const int N = tr.N;
    const std::vector<ModeSource> modes = u.mode_sources(N);

    DualityTerms d;
    // Left side by composite Gauss quadrature of the source pairing.
    const GaussRule rule = gauss_legendre(10);
    const int panels = std::max(64, static_cast<int>(std::ceil(2.0 * params.T * N * (std::abs(params.c) + 1.0))));
    d.lhs = integrate(
        [&](double t) {
            cplx acc = 0.0;
            for (const ModeSource& s : modes) acc += u.evaluate_source(s, t) * std::conj(adj.physical_mode(s.n, t)[0]);
            return two_pi * acc;
        },
        0.0, params.T, panels, rule);

    d.rhs_terms.fill(0.0);
    for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        const auto pT = adj.physical_mode(n, params.T);
        const auto p0 = adj.physical_mode(n, 0.0);
        d.rhs_terms[0] += two_pi * tr.terminal.second[n] * std::conj(pT[0]);
        d.rhs_terms[1] -= two_pi * tr.terminal.first[n] * std::conj(pT[1]);
        d.rhs_terms[2] -= two_pi * params.M * tr.terminal.third[n] * std::conj(pT[2]);
        d.rhs_terms[3] -= two_pi * y1[n] * std::conj(p0[0]);
        d.rhs_terms[4] += two_pi * y0[n] * std::conj(p0[1]);
    }
    d.rhs = 0.0;
    double scale = std::abs(d.lhs);
    for (const cplx& v : d.rhs_terms) {
        d.rhs += v;
        scale = std::max(scale, std::abs(v));
    }
    d.residual = scale > 0.0 ? std::abs(d.lhs - d.rhs) / scale : 0.0;
    return d;
}

TerminalReport terminal_report(const Trajectory& traj) {
    TerminalReport r;
    r.y_h1 = sobolev_norm(traj.terminal.first, 1.0);
    r.yt_l2 = sobolev_norm(traj.terminal.second, 0.0);
    r.z_l2 = sobolev_norm(traj.terminal.third, 0.0);
    if (!traj.snapshots.empty())
        r.initial_total = sobolev_norm(traj.snapshots.front().first, 1.0) + sobolev_norm(traj.snapshots.front().second, 0.0);
    const double total = r.y_h1 + r.yt_l2 + r.z_l2;
    r.relative_total = r.initial_total > 0.0 ? total / r.initial_total : total;
    return r;
}

}  // namespace memwave
