#include "memwave/beam.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memwave/error.hpp"
#include "memwave/numerics.hpp"

namespace memwave {

namespace {

double alpha_of(double eps) { return 2.0 / std::sqrt(eps); }

// Composite Gauss-Legendre over [-L, L] with breaks at x0 -/+ a.
template <class F>
double line_integral(const BeamParams& bp, F&& f) {
    const double L = bp.half_width();
    const double a = std::pow(bp.epsilon, 0.125);
    const double cuts[4] = {-L, bp.x0 - a, bp.x0 + a, L};
    const GaussRule rule = gauss_legendre(bp.nodes);
    double acc = 0.0;
    for (int s = 0; s < 3; ++s) {
        const double len = cuts[s + 1] - cuts[s];
        if (len <= 0.0) continue;
        const int panels = std::max(4, static_cast<int>(std::ceil(bp.panels * len / (2.0 * L))));
        acc += integrate(f, cuts[s], cuts[s + 1], panels, rule);
    }
    return acc;
}

template <class F>
double offray_integral(const BeamParams& bp, F&& f) {
    const double a = std::pow(bp.epsilon, 0.125);
    return line_integral(bp, [&](double x) { return std::abs(x - bp.x0) > a ? f(x) : 0.0; });
}

double energy_density(const BeamParams& bp, double t, double x) {
    const cplx p = beam_value(bp, t, x);
    return std::norm(beam_rate(bp) * p) + std::norm(beam_dx(bp, t, x));
}

}  // namespace

double default_beam_half_width(double epsilon, double x0) {
    return std::abs(x0) + std::max(10.0 * std::pow(epsilon, 0.125), 20.0 * std::pow(epsilon, 0.25));
}

std::vector<std::string> BeamParams::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidParameter("beam epsilon must be positive");
    if (r != 0.5) throw InvalidParameter("only the localization exponent r = 1/2 is implemented");
    if (!std::isfinite(M) || M == 0.0) throw InvalidParameter("beam memory parameter M must be nonzero");
    if (std::abs(M * epsilon) >= 1.0) throw InvalidParameter("beam rate M - M^3 eps^2 must not vanish or flip sign");
    if (L != 0.0 && L < std::abs(x0) + 10.0 * std::pow(epsilon, 0.125))
        throw InvalidParameter("beam half-width L must be at least |x0| + 10 eps^{1/8}");
    if (panels < 1 || nodes < 2) throw InvalidParameter("beam quadrature resolution too small");
    std::vector<std::string> warnings;
    if (epsilon > 0.25) {
        std::ostringstream os;
        os << "epsilon = " << epsilon << " is outside the asymptotic range (0, 0.25]";
        warnings.push_back(os.str());
    }
    return warnings;
}

double BeamParams::half_width() const { return L > 0.0 ? L : default_beam_half_width(epsilon, x0); }

double principal_symbol(double tau, double xi) { return tau * (tau * tau - xi * xi); }

double gaussian_tail_moment(int k, double alpha, double a) {
    const double E = std::erfc(a * std::sqrt(alpha));
    const double G = std::exp(-alpha * a * a);
    const double m0 = std::sqrt(pi / alpha) * E;
    const double m2 = a * G / alpha + std::sqrt(pi) * E / (2.0 * std::pow(alpha, 1.5));
    switch (k) {
        case 0: return m0;
        case 2: return m2;
        case 4: return a * a * a * G / alpha + 1.5 / alpha * m2;
        default: throw InvalidParameter("Gaussian moment order must be 0, 2 or 4");
    }
}

double beam_constant(const BeamParams& bp) {
    const double eps = bp.epsilon;
    if (bp.normalization == BeamNormalization::exact) {
        const double alpha = alpha_of(eps);
        const double m0 = gaussian_tail_moment(0, alpha, 0.0), m2 = gaussian_tail_moment(2, alpha, 0.0);
        return 1.0 / std::sqrt(m0 * (1.0 + 1.0 / (eps * eps)) + 4.0 * m2 / eps);
    }
    if (bp.x0 != 0.0) return std::pow(2.0 / pi, 0.25) * std::pow(eps, 0.875) / bp.x0;
    return std::pow(32.0 / pi, 0.25) * std::pow(eps, 0.625);
}

double beam_rate(const BeamParams& bp) { return bp.M - bp.M * bp.M * bp.M * bp.epsilon * bp.epsilon; }

cplx beam_value(const BeamParams& bp, double t, double x) {
    const double d = x - bp.x0;
    return beam_constant(bp) * std::exp(cplx(-d * d / std::sqrt(bp.epsilon) + beam_rate(bp) * t, x / bp.epsilon));
}

cplx beam_dx(const BeamParams& bp, double t, double x) {
    return cplx(-2.0 * (x - bp.x0) / std::sqrt(bp.epsilon), 1.0 / bp.epsilon) * beam_value(bp, t, x);
}

cplx beam_xx_factor(const BeamParams& bp, double x) {
    const cplx w(-2.0 * (x - bp.x0) / std::sqrt(bp.epsilon), 1.0 / bp.epsilon);
    return w * w - 2.0 / std::sqrt(bp.epsilon);
}

BeamState beam_state(const BeamParams& bp, double t, int samples) {
    bp.validate();
    if (samples < 2) throw InvalidParameter("beam_state needs at least two samples");
    const double L = bp.half_width();
    const double k = beam_rate(bp);
    BeamState s;
    for (int i = 0; i < samples; ++i) {
        const double x = -L + 2.0 * L * i / (samples - 1);
        s.x.push_back(x);
        s.p.push_back(beam_value(bp, t, x));
        s.q0.push_back(beam_value(bp, 0.0, x) / k);
    }
    return s;
}

double beam_residual_norm(const BeamParams& bp, int time_samples) {
    bp.validate();
    const double k = beam_rate(bp);
    double worst = 0.0;
    for (int i = 0; i < time_samples; ++i) {
        const double t = time_samples > 1 ? static_cast<double>(i) / (time_samples - 1) : 0.0;
        const double sq = line_integral(bp, [&](double x) {
            const cplx p = beam_value(bp, t, x), p0 = beam_value(bp, 0.0, x);
            const cplx g = beam_xx_factor(bp, x);
            const cplx ptt = k * k * p;
            const cplx pxx = g * p;
            const cplx memory = g * (p - p0) / k;
            const cplx q0xx = g * p0 / k;
            return std::norm(ptt - pxx + bp.M * memory + bp.M * q0xx);
        });
        worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
}

BeamDiagnostics beam_energy_report(const BeamParams& bp) {
    BeamDiagnostics d;
    d.warnings = bp.validate();
    d.epsilon = bp.epsilon;
    const double eps = bp.epsilon;
    const double k = beam_rate(bp), c = beam_constant(bp), alpha = alpha_of(eps), a = std::pow(eps, 0.125);
    d.residual_norm = beam_residual_norm(bp);
    d.E0 = 0.5 * line_integral(bp, [&](double x) { return energy_density(bp, 0.0, x); });
    d.offray_energy = 0.5 * offray_integral(bp, [&](double x) { return energy_density(bp, 0.0, x); });
    auto closed = [&](double cut) {
        return 0.5 * c * c *
               ((1.0 / (eps * eps) + k * k) * gaussian_tail_moment(0, alpha, cut) + 4.0 / eps * gaussian_tail_moment(2, alpha, cut));
    };
    d.E0_closed = closed(0.0);
    d.offray_closed = closed(a);
    d.offray_ratio = d.offray_energy / d.E0;
    d.offray_bound = 3.0 * std::exp(-2.0 * std::pow(eps, -0.25)) * d.E0;
    d.h1_norm = std::sqrt(line_integral(bp, [&](double x) {
        return std::norm(beam_value(bp, 0.0, x)) + std::norm(beam_dx(bp, 0.0, x));
    }));
    for (int i = 0; i <= 4; ++i) {
        const double t = 0.25 * i;
        const double mass = line_integral(bp, [&](double x) { return energy_density(bp, t, x); });
        const double first = line_integral(bp, [&](double x) { return x * energy_density(bp, t, x); });
        d.centroid_drift = std::max(d.centroid_drift, std::abs(first / mass - bp.x0));
    }
    return d;
}

PrintedEnergyTerms printed_energy_terms(const BeamParams& bp) {
    bp.validate();
    const double eps = bp.epsilon, k = beam_rate(bp), c = beam_constant(bp), alpha = alpha_of(eps);
    const double m0 = gaussian_tail_moment(0, alpha, 0.0), m2 = gaussian_tail_moment(2, alpha, 0.0),
                 m4 = gaussian_tail_moment(4, alpha, 0.0);
    const double pre = 0.5 * c * c;
    PrintedEnergyTerms e;
    e.closed[0] = pre * (bp.x0 * bp.x0 * m0 + m2) / (eps * eps);
    e.closed[1] = pre * m4 / eps;
    e.closed[2] = pre * k * k * m0;
    auto weight = [&](double x) { return std::exp(-alpha * (x - bp.x0) * (x - bp.x0)); };
    e.quadrature[0] = pre * line_integral(bp, [&](double x) { return x * x / (eps * eps) * weight(x); });
    e.quadrature[1] = pre * line_integral(bp, [&](double x) { return std::pow(x - bp.x0, 4) / eps * weight(x); });
    e.quadrature[2] = pre * line_integral(bp, [&](double x) { return k * k * weight(x); });
    return e;
}

BeamSweep beam_sweep(const BeamParams& base, const std::vector<double>& epsilons) {
    if (epsilons.size() < 3) throw InvalidParameter("beam sweep needs at least three epsilon values");
    BeamSweep s;
    s.rows.resize(epsilons.size());
    const auto count = static_cast<long>(epsilons.size());
#pragma omp parallel for
    for (long i = 0; i < count; ++i) {
        BeamParams bp = base;
        bp.epsilon = epsilons[static_cast<std::size_t>(i)];
        bp.L = 0.0;
        s.rows[static_cast<std::size_t>(i)] = beam_energy_report(bp);
    }
    std::vector<double> eps, res, e0;
    for (const auto& r : s.rows) {
        eps.push_back(r.epsilon);
        res.push_back(r.residual_norm);
        e0.push_back(r.E0);
    }
    s.residual_slope = fit_loglog(eps, res).slope;

    // E0 = E + A eps^p: linear least squares in (E, A) for each trial p.
    auto fit = [&](double p, double* E) {
        std::vector<double> x;
        for (double e : eps) x.push_back(std::pow(e, p));
        const LineFit lf = fit_line(x, e0);
        double sse = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) sse += std::pow(lf.intercept + lf.slope * x[i] - e0[i], 2);
        if (E) *E = lf.intercept;
        return sse;
    };
    double best_p = 0.05, best = fit(best_p, nullptr);
    for (double p = 0.05; p <= 4.0; p += 0.005) {
        const double v = fit(p, nullptr);
        if (v < best) {
            best = v;
            best_p = p;
        }
    }
    double lo = std::max(0.01, best_p - 0.005), hi = best_p + 0.005;
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (fit(m1, nullptr) < fit(m2, nullptr)) hi = m2; else lo = m1;
    }
    s.E_rate = 0.5 * (lo + hi);
    fit(s.E_rate, &s.E_limit);

    for (const auto& r : s.rows)
        s.offray_constant = std::max(s.offray_constant, r.offray_ratio / std::exp(-2.0 * std::pow(r.epsilon, -0.25)));
    s.h1_monotone = s.offray_monotone = true;
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        if (!(std::abs(s.rows[i].h1_norm - 1.0) < std::abs(s.rows[i - 1].h1_norm - 1.0))) s.h1_monotone = false;
        if (!(s.rows[i].offray_energy < s.rows[i - 1].offray_energy)) s.offray_monotone = false;
    }
    return s;
}

}  // namespace memwave
