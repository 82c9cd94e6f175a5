#pragma once

#include <array>
#include <vector>

#include "memwave/control.hpp"
#include "memwave/model.hpp"

namespace memwave {

enum class Projection { closed_form, grid };
enum class Integrator { exponential, rk4 };

struct SimulationOptions {
    int N_t = 0;
    int stride = 0;  // 0 selects ceil(N_t / 200)
    Projection projection = Projection::closed_form;
    int grid_size = 0;  // 0 selects default_grid_size(N)
    Integrator integrator = Integrator::exponential;
};

// Per-mode state (y, y_t, z) with the source entering the y_t row.
struct Trajectory {
    ModelParams params;
    int N = 0;
    int N_t = 0;
    double h = 0.0;
    std::vector<double> times;
    std::vector<StateTriple> snapshots;
    StateTriple terminal;
    // max |z_n(t) + n^2 int_0^t y_n| over snapshots, relative to max |z_n|.
    double z_consistency = 0.0;
};

// Smallest step count accepted for a horizon T and truncation N.
int minimal_steps(double T, int N);

// Homogeneous flow e^{tA_n} for A_n = [[0,1,0],[-n^2,0,-M],[-n^2,0,0]].
std::array<std::array<cplx, 3>, 3> mode_flow(int n, double M, double t);

Trajectory simulate_forward(const ModelParams& params, const FourierField& y0, const FourierField& y1,
                            const ControlField& u, const SimulationOptions& options);

// Adjoint solution in the moving frame, sum_j b_j e^{lambda_j (T - t)} Psi_j per mode.
class AdjointSolution {
public:
    AdjointSolution(const ModelParams& params, const StateTriple& terminal);

    int N() const { return N_; }
    const std::array<cplx, 3>& coefficients(int n) const;
    const std::array<cplx, 3>& exponents(int n) const;

    StateTriple state(double t) const;
    // (p, p_t, q) of mode n in the physical frame.
    std::array<cplx, 3> physical_mode(int n, double t) const;

private:
    std::size_t slot(int n) const;

    ModelParams params_;
    int N_ = 0;
    std::vector<std::array<cplx, 3>> coeffs_;
    std::vector<std::array<cplx, 3>> lambdas_;
    std::vector<std::array<std::array<cplx, 3>, 3>> basis_;  // basis_[slot][j] = Psi_j
};

AdjointSolution simulate_adjoint_exact(const ModelParams& params, const StateTriple& terminal);

struct DualityTerms {
    cplx lhs;
    std::array<cplx, 5> rhs_terms;
    cplx rhs;
    double residual = 0.0;
};

DualityTerms duality_residual(const ModelParams& params, const FourierField& y0, const FourierField& y1,
                              const ControlField& u, const StateTriple& adjoint_terminal, const SimulationOptions& options);

struct TerminalReport {
    double y_h1 = 0.0;
    double yt_l2 = 0.0;
    double z_l2 = 0.0;
    double initial_total = 0.0;  // |y0|_{H^1} + |y1|_{L^2}
    double relative_total = 0.0;
};

TerminalReport terminal_report(const Trajectory& traj);

}  // namespace memwave
