#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "memwave/model.hpp"

namespace memwave {

// Roots of mu^3 + n^2 mu - M n^2 = 0 for one positive mode n.
struct EigenTriple {
    int n = 0;
    double M = 0.0;
    double mu1 = 0.0;
    // mu1 - M, formed without cancellation (equals -mu1^3 / n^2).
    double mu1_minus_M = 0.0;
    cplx mu2;
    cplx mu3;

    cplx mu(int j) const;
    // Largest of the three Vieta residuals, each relative to its natural scale.
    double vieta_residual() const;
};

EigenTriple solve_cubic_spectrum(int n, double M);

double asymptotic_mu1(int n, double M);
// mu1 - (M - M^3/n^2), accurate down to the n^-4 regime.
double mu1_asymptotic_remainder(const EigenTriple& e);
// Im(mu2) - n, accurate for large n.
double branch2_imag_excess(const EigenTriple& e);

// Value of c at which the branch-2 eigenvalue of mode -n meets the branch-3
// eigenvalue of mode n.
double resonance_velocity(int n, double M);

struct Resonance {
    int n_c = 0;
    double c_value = 0.0;
};

inline constexpr double default_resonance_tol = 1e-9;

std::optional<Resonance> detect_resonance(const ModelParams& params, int N, double tol = default_resonance_tol);

struct ShiftedEigenvalue {
    int n = 0;
    int j = 0;
    cplx lambda;
    bool resonance_adjusted = false;
};

ShiftedEigenvalue shifted_eigenvalue(int n, int j, const ModelParams& params, bool apply_resonance_convention,
                                     double tol = default_resonance_tol);

// Cached roots for modes 1..N with the shifted spectrum on top.
class Spectrum {
public:
    Spectrum(double M, double c, int N, bool apply_resonance_convention = false,
             double tol = default_resonance_tol);

    double M() const { return M_; }
    double c() const { return c_; }
    int N() const { return N_; }
    const EigenTriple& triple(int n) const;
    ShiftedEigenvalue eigenvalue(int n, int j) const;
    std::optional<Resonance> resonance() const { return resonance_; }
    bool convention_applied() const { return apply_; }

    // Ordered by n = -N..-1, 1..N and j = 1, 2, 3 within each n.
    std::vector<ShiftedEigenvalue> all() const;

private:
    double M_, c_;
    int N_;
    bool apply_;
    std::optional<Resonance> resonance_;
    std::vector<EigenTriple> triples_;
};

struct Eigenvector {
    int n = 0;
    int j = 0;
    std::array<cplx, 3> components;
};

Eigenvector eigenvector(const ShiftedEigenvalue& ev, double c);

// Moving-frame operator on one Fourier mode acting on (phi, eta, psi).
std::array<cplx, 3> apply_moving_frame_symbol(int n, double M, double c, const std::array<cplx, 3>& v);

// Relative residual |A v - lambda v| / (|lambda| |v|).
double eigenvector_residual(const Eigenvector& v, cplx lambda, double M, double c);

struct RieszMatrix {
    int n = 0;
    Eigen::Matrix3cd B;
    std::array<double, 3> singular_values;  // ascending
    cplx det;
};

RieszMatrix riesz_matrix(int n, const ModelParams& params);
RieszMatrix riesz_matrix(int n, double M, double c);

// Limit of B_n^* B_n as n -> +infinity.
Eigen::Matrix3cd riesz_limit_matrix(double M, double c);

}  // namespace memwave
