#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace memwave {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Maps x into [-pi, pi).
double wrap_angle(double x);

struct Arc {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

// Finite union of disjoint open arcs of the torus, stored inside [-pi, pi).
class ControlSet {
public:
    ControlSet() = default;

    // Each interval (a, b) with a < b and b - a <= 2 pi; arcs crossing the
    // seam at pi are split. Overlapping input arcs are rejected.
    static ControlSet from_intervals(const std::vector<std::pair<double, double>>& intervals);
    static ControlSet full_torus();

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool empty() const { return arcs_.empty(); }
    double measure() const;
    bool is_full() const;
    bool contains(double x) const;

    // The set {x + s : x in this set}.
    ControlSet shifted(double s) const;

    // Length of the intersection with the interval (a, b), b - a <= 2 pi.
    double overlap(double a, double b) const;

    // Closed form of the integral of e^{iqx} over the set.
    cplx exp_integral(int q) const;

    std::vector<std::pair<double, double>> intervals() const;

private:
    std::vector<Arc> arcs_;
};

double minimal_control_time(double c);
void validate_memory(double M);
void validate_velocity(double c);

struct ModelParams {
    double M = 1.0;
    double c = 2.0;
    double T = 12.0;
    ControlSet omega0 = ControlSet::from_intervals({{0.0, pi / 2.0}});
    int N = 6;
    double sigma = 0.0;

    void validate() const;
    double minimal_time() const { return minimal_control_time(c); }
    bool supercritical_time() const { return T > minimal_time(); }
};

// Mean-zero periodic function truncated to modes 0 < |n| <= N.
class FourierField {
public:
    FourierField() = default;
    explicit FourierField(int N);

    static FourierField from_modes(int N, const std::vector<std::pair<int, cplx>>& modes);

    int N() const { return N_; }

    // Zero for modes outside the truncation.
    cplx operator[](int n) const;
    cplx& at(int n);
    void set(int n, cplx value) { at(n) = value; }

    // Storage order: -N, ..., -1, 1, ..., N.
    std::span<const cplx> data() const { return coeffs_; }
    std::span<cplx> data() { return coeffs_; }
    static int mode_at(int N, std::size_t index);

    bool is_real_valued(double tol = 0.0) const;
    int max_active_mode() const;

    // Zero-extends, or drops modes above the new N; dropping a nonzero mode
    // is a DimensionError.
    FourierField resized(int N) const;

    FourierField& operator+=(const FourierField& other);
    FourierField& operator*=(cplx s);
    friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
    friend FourierField operator*(cplx s, FourierField a) { return a *= s; }

    // Values at x_k = 2 pi k / K.
    std::vector<cplx> sample(int K) const;
    static FourierField project(std::span<const cplx> samples, int N);

private:
    std::size_t index(int n) const;

    int N_ = 0;
    std::vector<cplx> coeffs_;
};

int default_grid_size(int N);

double sobolev_norm(const FourierField& f, double sigma);

struct StateTriple {
    FourierField first;
    FourierField second;
    FourierField third;

    static StateTriple zero(int N);
    int N() const;
};

// Norm of the X_{-sigma} scale: component orders (-sigma, -sigma-1, -sigma).
double state_norm(const StateTriple& s, double sigma);

}  // namespace memwave
