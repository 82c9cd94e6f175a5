#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memwave/biorthogonal.hpp"
#include "memwave/model.hpp"

namespace memwave {

struct MomentRow {
    int n = 0;
    int j = 0;
    cplx lambda;
    int frequency = 0;  // n for the modal rows, 0 for the companion rows
    bool zero_row = false;
    cplx rhs;
};

struct MomentData {
    int N = 0;
    double data_h3 = 0.0;  // |y0|_{H^3}
    double data_h2 = 0.0;  // |y1|_{H^2}
    std::vector<MomentRow> rows;  // modal rows first, then companion rows

    cplx rhs(int n, int j) const;
    std::size_t modal_count() const;
    bool all_zero() const;
};

// Data modes above N must vanish.
MomentData moment_rhs(const FourierField& y0, const FourierField& y1, const ModelParams& params, int N);

enum class Frame { moving, physical };

// coef * e^{ipx} * e^{-rate t}
struct ControlAtom {
    int p = 0;
    cplx rate;
    cplx coef;
};

// Per-mode source f_n(t) = phase(t) * sum coef e^{-rate t}.
struct ModeSource {
    int n = 0;
    std::vector<cplx> rates;
    std::vector<cplx> coefs;
};

class ControlField {
public:
    ControlField() = default;
    ControlField(Frame frame, ControlSet support, double c, double T, std::vector<ControlAtom> atoms);

    Frame frame() const { return frame_; }
    const ControlSet& reference_support() const { return support_; }
    double velocity() const { return c_; }
    double T() const { return T_; }
    const std::vector<ControlAtom>& atoms() const { return atoms_; }

    ControlSet support_at(double t) const;
    bool in_support(double t, double x) const;
    cplx evaluate(double t, double x) const;
    // Unrestricted expansion in the moving coordinate.
    cplx expansion(double t, double xi) const;
    // expansion on the tensor grid ts x xis, row-major in t.
    std::vector<cplx> expansion_grid(const std::vector<double>& ts, const std::vector<double>& xis) const;

    // (1/2pi) times the integral of 1_{support(t)} u(t, x) e^{-inx}.
    cplx mode_projection(int n, double t) const;
    std::vector<ModeSource> mode_sources(int N) const;
    cplx evaluate_source(const ModeSource& s, double t) const;

    // Mean of u(t, .) over its support at time t.
    cplx support_mean(double t) const;
    double l2_norm() const;
    // Discrete L2 ratio |Im u| / |u| on a tensor grid over the support.
    double imaginary_ratio(int time_nodes = 64, int space_nodes = 64) const;

private:
    Frame frame_ = Frame::moving;
    ControlSet support_;
    double c_ = 0.0;
    double T_ = 0.0;
    std::vector<ControlAtom> atoms_;
};

// Grid-transform projection of 1_{support(t)} u(t, .) onto modes |n| <= N.
// Each grid value is weighted by the covered fraction of its cell.
FourierField project_on_grid(const ControlField& u, double t, int N, int K);

struct ConstraintResiduals {
    double max_abs = 0.0;
    double rms = 0.0;
    double max_rel = 0.0;  // max_abs relative to the largest |rhs|
    std::vector<cplx> values;
};

struct Synthesis {
    ControlField control;
    double condition_number = 0.0;
    double regularization = 0.0;
    ConstraintResiduals residuals;  // from the Gram solve
    bool subcritical = false;
    std::vector<std::string> warnings;
};

inline constexpr double max_moment_condition = 1e14;

Synthesis synthesize_least_norm(const ModelParams& params, const MomentData& md, double regularization);
ControlField mean_zero_correction(const ControlField& u);
ControlField to_physical_frame(const ControlField& u, double c);

// Re-integrates u against every constraint by tensor Gauss-Legendre quadrature
// over (0, T) x support. Works in either frame.
ConstraintResiduals constraint_residuals_quadrature(const ControlField& u, const MomentData& md, int time_panels = 48,
                                                    int space_panels = 16, int nodes = 12);

// b = bump * (e^{ix} - kappa) with a smooth bump inside the arc set and kappa
// chosen so that b has zero mean.
FourierField separable_profile(const ControlSet& omega, int modes);

struct SeparatedControl {
    FourierField b;
    std::vector<cplx> rates;        // exponents of v
    std::vector<cplx> time_coeffs;  // v(t) = sum time_coeffs e^{-rates t}
    ControlField field;             // moving frame, full-torus support

    cplx v(double t) const;
};

SeparatedControl synthesize_separated(const ModelParams& params, const MomentData& md, const FourierField& b,
                                      const DualFamily& dual);

struct YoungFit {
    double max_ratio = 0.0;  // best constant seen over the random draws
    double supremum = 0.0;   // exact supremum d^H A^{-1} d
};

YoungFit young_inequality_fit(const ModelParams& params, const MomentData& md, int draws, std::uint64_t seed);

}  // namespace memwave
