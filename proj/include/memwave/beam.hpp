#pragma once

#include <string>
#include <vector>

#include "memwave/model.hpp"

namespace memwave {

enum class BeamNormalization { printed, exact };

struct BeamParams {
    double epsilon = 0.01;
    double x0 = 1.0;
    double M = 1.0;
    double r = 0.5;
    double L = 0.0;     // half-width of the truncated line; 0 selects default_beam_half_width
    int panels = 400;   // Gauss panels across [-L, L]
    int nodes = 16;
    BeamNormalization normalization = BeamNormalization::printed;

    // Throws on invalid input; returns range warnings.
    std::vector<std::string> validate() const;
    double half_width() const;
};

double default_beam_half_width(double epsilon, double x0);

// Principal symbol tau (tau^2 - xi^2) of the differentiated equation.
double principal_symbol(double tau, double xi);

double beam_constant(const BeamParams& bp);
// Time rate M - M^3 eps^2 of the beam amplitude.
double beam_rate(const BeamParams& bp);

cplx beam_value(const BeamParams& bp, double t, double x);
// d/dx of the beam.
cplx beam_dx(const BeamParams& bp, double t, double x);
// Multiplier g with p_xx = g p.
cplx beam_xx_factor(const BeamParams& bp, double x);

struct BeamState {
    std::vector<double> x;
    std::vector<cplx> p;
    std::vector<cplx> q0;
};

BeamState beam_state(const BeamParams& bp, double t, int samples);

// Integral over |z| > a of z^k e^{-alpha z^2} for k in {0, 2, 4}; a = 0 gives
// the full-line moment.
double gaussian_tail_moment(int k, double alpha, double a);

// max over t in [0, 1] of the L2 norm of p_tt - p_xx + M int_0^t p_xx + M q0_xx.
double beam_residual_norm(const BeamParams& bp, int time_samples = 11);

struct BeamDiagnostics {
    double epsilon = 0.0;
    double residual_norm = 0.0;
    double E0 = 0.0;               // quadrature
    double E0_closed = 0.0;        // Gaussian moments
    double offray_energy = 0.0;    // quadrature, half-weighted like E0
    double offray_closed = 0.0;    // erfc closed form
    double offray_ratio = 0.0;
    double offray_bound = 0.0;     // C e^{-2 eps^{-1/4}} E0 with C = 3
    double h1_norm = 0.0;
    double centroid_drift = 0.0;   // max over t in [0, 1]
    std::vector<std::string> warnings;
};

BeamDiagnostics beam_energy_report(const BeamParams& bp);

// Energy decomposition with the integrand written in the printed proof,
// x^2/eps^2 + (x - x0)^4/eps + (M - M^3 eps^2)^2 against the Gaussian weight.
struct PrintedEnergyTerms {
    double closed[3] = {0.0, 0.0, 0.0};
    double quadrature[3] = {0.0, 0.0, 0.0};
};

PrintedEnergyTerms printed_energy_terms(const BeamParams& bp);

struct BeamSweep {
    std::vector<BeamDiagnostics> rows;
    double residual_slope = 0.0;  // decay exponent, positive means decay
    double E_limit = 0.0;
    double E_rate = 0.0;          // exponent p in E0 = E_limit + A eps^p
    double offray_constant = 0.0; // smallest C with offray_ratio <= C e^{-2 eps^{-1/4}}
    bool h1_monotone = false;
    bool offray_monotone = false;
};

BeamSweep beam_sweep(const BeamParams& base, const std::vector<double>& epsilons);

}  // namespace memwave
