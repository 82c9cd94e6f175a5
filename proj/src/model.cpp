#include "memwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memwave/error.hpp"
#include "memwave/simd.hpp"

namespace memwave {

double wrap_angle(double x) {
    double r = std::fmod(x + pi, two_pi);
    if (r < 0.0) r += two_pi;
    r -= pi;
    // fmod can return exactly 2 pi - pi after rounding.
    return r >= pi ? r - two_pi : r;
}

namespace {

void push_normalized(std::vector<Arc>& out, double a, double b) {
    const double len = b - a;
    const double lo = wrap_angle(a);
    const double hi = lo + len;
    if (hi <= pi) {
        out.push_back({lo, hi});
    } else {
        out.push_back({lo, pi});
        out.push_back({-pi, hi - two_pi});
    }
}

std::vector<Arc> sorted(std::vector<Arc> arcs) {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
    return arcs;
}

}  // namespace

ControlSet ControlSet::from_intervals(const std::vector<std::pair<double, double>>& intervals) {
    ControlSet s;
    for (const auto& [a, b] : intervals) {
        if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
            throw InvalidParameter("control arc must satisfy a < b with finite endpoints");
        if (b - a > two_pi + 1e-12) throw InvalidParameter("control arc longer than the torus");
        if (b - a >= two_pi - 1e-12) {
            s.arcs_.push_back({-pi, pi});
            continue;
        }
        push_normalized(s.arcs_, a, b);
    }
    s.arcs_ = sorted(std::move(s.arcs_));
    for (std::size_t k = 1; k < s.arcs_.size(); ++k) {
        if (s.arcs_[k].lo < s.arcs_[k - 1].hi - 1e-14) throw InvalidParameter("control arcs overlap");
    }
    return s;
}

ControlSet ControlSet::full_torus() {
    ControlSet s;
    s.arcs_.push_back({-pi, pi});
    return s;
}

double ControlSet::measure() const {
    double m = 0.0;
    for (const Arc& a : arcs_) m += a.length();
    return m;
}

bool ControlSet::is_full() const { return measure() >= two_pi - 1e-12; }

bool ControlSet::contains(double x) const {
    const double y = wrap_angle(x);
    for (const Arc& a : arcs_) {
        if (y > a.lo && y < a.hi) return true;
    }
    return false;
}

ControlSet ControlSet::shifted(double s) const {
    if (is_full()) return *this;
    ControlSet out;
    for (const Arc& a : arcs_) push_normalized(out.arcs_, a.lo + s, a.hi + s);
    out.arcs_ = sorted(std::move(out.arcs_));
    return out;
}

double ControlSet::overlap(double a, double b) const {
    double acc = 0.0;
    for (const Arc& arc : arcs_) {
        for (double s : {-two_pi, 0.0, two_pi}) acc += std::max(0.0, std::min(b, arc.hi + s) - std::max(a, arc.lo + s));
    }
    return acc;
}

cplx ControlSet::exp_integral(int q) const {
    if (q == 0) return measure();
    if (is_full()) return 0.0;
    const cplx iq(0.0, static_cast<double>(q));
    cplx acc = 0.0;
    for (const Arc& a : arcs_) acc += (std::exp(iq * a.hi) - std::exp(iq * a.lo)) / iq;
    return acc;
}

std::vector<std::pair<double, double>> ControlSet::intervals() const {
    std::vector<std::pair<double, double>> out;
    for (const Arc& a : arcs_) out.emplace_back(a.lo, a.hi);
    return out;
}

double minimal_control_time(double c) {
    validate_velocity(c);
    return two_pi * (1.0 / std::abs(c) + 1.0 / std::abs(1.0 - c) + 1.0 / std::abs(1.0 + c));
}

void validate_memory(double M) {
    if (!std::isfinite(M) || M == 0.0)
        throw InvalidParameter(
            "M must be a nonzero finite number: M = 0 removes the memory term and reduces the "
            "model to the plain wave equation, which this toolkit does not treat");
}

void validate_velocity(double c) {
    if (!std::isfinite(c) || c == 0.0 || c == 1.0 || c == -1.0) {
        std::ostringstream os;
        os << "velocity c = " << c
           << " is excluded: for c in {-1, 0, 1} the shifted eigenvalues of one branch pile up at a "
              "finite point, so no uniform gap and no moving control can exist";
        throw InvalidParameter(os.str());
    }
}

void ModelParams::validate() const {
    validate_memory(M);
    validate_velocity(c);
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParameter("time horizon T must be positive");
    if (omega0.empty() || !(omega0.measure() > 0.0))
        throw InvalidParameter("control set must be nonempty with positive length");
    if (omega0.is_full()) throw InvalidParameter("control set must leave part of the torus uncovered");
    if (N < 1) throw InvalidParameter("mode truncation N must be positive");
    if (!(sigma >= 0.0)) throw InvalidParameter("Sobolev order sigma must be nonnegative");
}

FourierField::FourierField(int N) : N_(N), coeffs_(2 * static_cast<std::size_t>(std::max(N, 0))) {
    if (N < 0) throw DimensionError("negative truncation");
}

FourierField FourierField::from_modes(int N, const std::vector<std::pair<int, cplx>>& modes) {
    FourierField f(N);
    for (const auto& [n, v] : modes) f.at(n) += v;
    return f;
}

std::size_t FourierField::index(int n) const {
    return n < 0 ? static_cast<std::size_t>(n + N_) : static_cast<std::size_t>(n + N_ - 1);
}

int FourierField::mode_at(int N, std::size_t index) {
    const int k = static_cast<int>(index);
    return k < N ? k - N : k - N + 1;
}

cplx FourierField::operator[](int n) const {
    if (n == 0 || std::abs(n) > N_) return 0.0;
    return coeffs_[index(n)];
}

cplx& FourierField::at(int n) {
    if (n == 0) throw DimensionError("mode 0 is excluded from mean-zero fields");
    if (std::abs(n) > N_) throw DimensionError("mode " + std::to_string(n) + " exceeds truncation");
    return coeffs_[index(n)];
}

bool FourierField::is_real_valued(double tol) const {
    for (int n = 1; n <= N_; ++n) {
        if (std::abs((*this)[-n] - std::conj((*this)[n])) > tol) return false;
    }
    return true;
}

int FourierField::max_active_mode() const {
    int m = 0;
    for (int n = 1; n <= N_; ++n) {
        if ((*this)[n] != 0.0 || (*this)[-n] != 0.0) m = n;
    }
    return m;
}

FourierField FourierField::resized(int N) const {
    if (N < max_active_mode())
        throw DimensionError("resizing to N = " + std::to_string(N) + " would drop nonzero modes");
    FourierField out(N);
    for (int n = 1; n <= std::min(N, N_); ++n) {
        out.at(n) = (*this)[n];
        out.at(-n) = (*this)[-n];
    }
    return out;
}

FourierField& FourierField::operator+=(const FourierField& other) {
    if (other.N_ != N_) throw DimensionError("adding fields with different truncations");
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    return *this;
}

FourierField& FourierField::operator*=(cplx s) {
    for (cplx& v : coeffs_) v *= s;
    return *this;
}

std::vector<cplx> FourierField::sample(int K) const {
    if (K < 2 * N_ + 1) throw DimensionError("grid too coarse for the field's modes");
    std::vector<cplx> out(static_cast<std::size_t>(K));
    std::vector<cplx> phase(coeffs_.size());
    for (int k = 0; k < K; ++k) {
        for (std::size_t q = 0; q < coeffs_.size(); ++q) {
            const long long r = (static_cast<long long>(mode_at(N_, q)) * k) % K;
            const double arg = two_pi * static_cast<double>(r) / K;
            phase[q] = {std::cos(arg), std::sin(arg)};
        }
        out[static_cast<std::size_t>(k)] = simd::dot(coeffs_, phase);
    }
    return out;
}

FourierField FourierField::project(std::span<const cplx> samples, int N) {
    const int K = static_cast<int>(samples.size());
    if (K < 2 * N + 1) throw DimensionError("grid too coarse for the requested modes");
    FourierField f(N);
    std::vector<cplx> twiddle(samples.size());
    for (std::size_t q = 0; q < f.coeffs_.size(); ++q) {
        const int n = mode_at(N, q);
        for (int k = 0; k < K; ++k) {
            // Reduce n k mod K before forming the angle to keep it exact.
            const long long r = (static_cast<long long>(n) * k) % K;
            const double arg = two_pi * static_cast<double>(r) / K;
            twiddle[static_cast<std::size_t>(k)] = {std::cos(arg), std::sin(arg)};
        }
        f.coeffs_[q] = simd::dotc(samples, twiddle) / static_cast<double>(K);
    }
    return f;
}

int default_grid_size(int N) {
    int K = 1;
    while (K < 4 * (N + 1)) K *= 2;
    return K;
}

double sobolev_norm(const FourierField& f, double sigma) {
    const auto data = f.data();
    std::vector<double> w(data.size());
    for (std::size_t q = 0; q < data.size(); ++q)
        w[q] = std::pow(static_cast<double>(std::abs(FourierField::mode_at(f.N(), q))), 2.0 * sigma);
    return std::sqrt(simd::weighted_norm2(w, data));
}

StateTriple StateTriple::zero(int N) { return {FourierField(N), FourierField(N), FourierField(N)}; }

int StateTriple::N() const {
    if (first.N() != second.N() || first.N() != third.N())
        throw DimensionError("state components have different truncations");
    return first.N();
}

double state_norm(const StateTriple& s, double sigma) {
    s.N();
    const double a = sobolev_norm(s.first, -sigma);
    const double b = sobolev_norm(s.second, -sigma - 1.0);
    const double c = sobolev_norm(s.third, -sigma);
    return std::sqrt(a * a + b * b + c * c);
}

}  // namespace memwave
