#include "memwave/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memwave/error.hpp"
#include "memwave/numerics.hpp"
#include "memwave/rng.hpp"

namespace memwave {

namespace {

// Integral of e^{-s t} over (0, T).
cplx time_integral(cplx s, double T) {
    const cplx h = s * T;
    if (std::abs(h) < 1e-4) return T * (1.0 - h / 2.0 + h * h / 6.0 - h * h * h / 24.0);
    return (1.0 - std::exp(-h)) / s;
}

Eigen::MatrixXcd assemble_moment_gram(const ModelParams& params, const MomentData& md) {
    const auto K = static_cast<Eigen::Index>(md.rows.size());
    Eigen::MatrixXcd A(K, K);
#pragma omp parallel for
    for (Eigen::Index k = 0; k < K; ++k) {
        const MomentRow& rk = md.rows[static_cast<std::size_t>(k)];
        for (Eigen::Index l = 0; l < K; ++l) {
            const MomentRow& rl = md.rows[static_cast<std::size_t>(l)];
            A(k, l) = time_integral(rl.lambda + std::conj(rk.lambda), params.T) *
                      params.omega0.exp_integral(rl.frequency - rk.frequency);
        }
    }
    return A;
}

Eigen::VectorXcd rhs_vector(const MomentData& md) {
    Eigen::VectorXcd d(static_cast<Eigen::Index>(md.rows.size()));
    for (std::size_t k = 0; k < md.rows.size(); ++k) d(static_cast<Eigen::Index>(k)) = md.rows[k].rhs;
    return d;
}

ConstraintResiduals summarize(std::vector<cplx> values, const MomentData& md) {
    ConstraintResiduals r;
    double sq = 0.0, scale = 0.0;
    for (const cplx& v : values) {
        r.max_abs = std::max(r.max_abs, std::abs(v));
        sq += std::norm(v);
    }
    for (const auto& row : md.rows) scale = std::max(scale, std::abs(row.rhs));
    r.rms = values.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(values.size()));
    r.max_rel = scale > 0.0 ? r.max_abs / scale : r.max_abs;
    r.values = std::move(values);
    return r;
}

bool same_rate(cplx a, cplx b) { return a == b; }

}  // namespace

cplx MomentData::rhs(int n, int j) const {
    for (const auto& r : rows) {
        if (!r.zero_row && r.n == n && r.j == j) return r.rhs;
    }
    throw DimensionError("no modal row with the requested indices");
}

std::size_t MomentData::modal_count() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const MomentRow& r) { return !r.zero_row; }));
}

bool MomentData::all_zero() const {
    return std::all_of(rows.begin(), rows.end(), [](const MomentRow& r) { return r.rhs == 0.0; });
}

MomentData moment_rhs(const FourierField& y0, const FourierField& y1, const ModelParams& params, int N) {
    validate_memory(params.M);
    validate_velocity(params.c);
    if (N < 1) throw InvalidParameter("moment problem needs N >= 1");
    if (y0.max_active_mode() > N || y1.max_active_mode() > N)
        throw DimensionError("initial data carry modes above the truncation N = " + std::to_string(N));
    MomentData md;
    md.N = N;
    md.data_h3 = sobolev_norm(y0, 3.0);
    md.data_h2 = sobolev_norm(y1, 2.0);
    const Spectrum spec(params.M, params.c, N);
    for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        const EigenTriple& e = spec.triple(std::abs(n));
        for (int j = 1; j <= 3; ++j) {
            const cplx rhs = -two_pi * (std::conj(e.mu(j)) * y0[n] + y1[n]);
            md.rows.push_back({n, j, spec.eigenvalue(n, j).lambda, n, false, rhs});
        }
    }
    const std::size_t modal = md.rows.size();
    for (std::size_t k = 0; k < modal; ++k) {
        const cplx lam = md.rows[k].lambda;
        // A coincident exponent gives a duplicate companion row; keep one.
        const bool dup = std::any_of(md.rows.begin() + static_cast<std::ptrdiff_t>(modal), md.rows.end(), [&](const MomentRow& r) {
            return std::abs(r.lambda - lam) <= 1e-12 * std::max(1.0, std::abs(lam));
        });
        if (!dup) md.rows.push_back({md.rows[k].n, md.rows[k].j, lam, 0, true, 0.0});
    }
    return md;
}

ControlField::ControlField(Frame frame, ControlSet support, double c, double T, std::vector<ControlAtom> atoms)
    : frame_(frame), support_(std::move(support)), c_(c), T_(T), atoms_(std::move(atoms)) {}

ControlSet ControlField::support_at(double t) const {
    return frame_ == Frame::physical ? support_.shifted(-c_ * t) : support_;
}

bool ControlField::in_support(double t, double x) const {
    return support_.contains(frame_ == Frame::physical ? x + c_ * t : x);
}

cplx ControlField::expansion(double t, double xi) const {
    cplx acc = 0.0;
    for (const auto& a : atoms_) acc += a.coef * std::exp(cplx(0.0, a.p * xi) - a.rate * t);
    return acc;
}

std::vector<cplx> ControlField::expansion_grid(const std::vector<double>& ts, const std::vector<double>& xis) const {
    // Factor the atoms by frequency: u(t, xi) = sum_p A_p(t) e^{ip xi}.
    std::vector<int> freqs;
    for (const auto& a : atoms_)
        if (std::find(freqs.begin(), freqs.end(), a.p) == freqs.end()) freqs.push_back(a.p);
    std::vector<std::size_t> slot(atoms_.size());
    for (std::size_t k = 0; k < atoms_.size(); ++k)
        slot[k] = static_cast<std::size_t>(std::find(freqs.begin(), freqs.end(), atoms_[k].p) - freqs.begin());
    std::vector<cplx> phase(freqs.size() * xis.size());
    for (std::size_t f = 0; f < freqs.size(); ++f)
        for (std::size_t ix = 0; ix < xis.size(); ++ix) phase[f * xis.size() + ix] = std::exp(cplx(0.0, freqs[f] * xis[ix]));
    std::vector<cplx> out(ts.size() * xis.size());
#pragma omp parallel for
    for (std::size_t it = 0; it < ts.size(); ++it) {
        std::vector<cplx> amp(freqs.size(), 0.0);
        for (std::size_t k = 0; k < atoms_.size(); ++k) amp[slot[k]] += atoms_[k].coef * std::exp(-atoms_[k].rate * ts[it]);
        for (std::size_t ix = 0; ix < xis.size(); ++ix) {
            cplx acc = 0.0;
            for (std::size_t f = 0; f < freqs.size(); ++f) acc += amp[f] * phase[f * xis.size() + ix];
            out[it * xis.size() + ix] = acc;
        }
    }
    return out;
}

cplx ControlField::evaluate(double t, double x) const {
    if (!in_support(t, x)) return 0.0;
    return expansion(t, frame_ == Frame::physical ? x + c_ * t : x);
}

cplx ControlField::mode_projection(int n, double t) const {
    cplx acc = 0.0;
    for (const auto& a : atoms_) acc += a.coef * std::exp(-a.rate * t) * support_.exp_integral(a.p - n);
    acc /= two_pi;
    if (frame_ == Frame::physical) acc *= std::exp(cplx(0.0, n * c_ * t));
    return acc;
}

std::vector<ModeSource> ControlField::mode_sources(int N) const {
    std::vector<ModeSource> out;
    for (int n = -N; n <= N; ++n) {
        if (n == 0) continue;
        ModeSource s;
        s.n = n;
        for (const auto& a : atoms_) {
            const cplx w = a.coef * support_.exp_integral(a.p - n) / two_pi;
            if (w == 0.0) continue;
            auto it = std::find_if(s.rates.begin(), s.rates.end(), [&](cplx r) { return same_rate(r, a.rate); });
            if (it == s.rates.end()) {
                s.rates.push_back(a.rate);
                s.coefs.push_back(w);
            } else {
                s.coefs[static_cast<std::size_t>(it - s.rates.begin())] += w;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

cplx ControlField::evaluate_source(const ModeSource& s, double t) const {
    cplx acc = 0.0;
    for (std::size_t q = 0; q < s.rates.size(); ++q) acc += s.coefs[q] * std::exp(-s.rates[q] * t);
    if (frame_ == Frame::physical) acc *= std::exp(cplx(0.0, s.n * c_ * t));
    return acc;
}

cplx ControlField::support_mean(double t) const {
    cplx acc = 0.0;
    for (const auto& a : atoms_) acc += a.coef * std::exp(-a.rate * t) * support_.exp_integral(a.p);
    return acc / support_.measure();
}

double ControlField::l2_norm() const {
    double acc = 0.0;
    const bool full = support_.is_full();
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
        for (std::size_t b = 0; b < atoms_.size(); ++b) {
            if (full && atoms_[a].p != atoms_[b].p) continue;
            const cplx space = support_.exp_integral(atoms_[a].p - atoms_[b].p);
            acc += (atoms_[a].coef * std::conj(atoms_[b].coef) * space *
                    time_integral(atoms_[a].rate + std::conj(atoms_[b].rate), T_))
                       .real();
        }
    }
    return std::sqrt(std::max(acc, 0.0));
}

double ControlField::imaginary_ratio(int time_nodes, int space_nodes) const {
    const GaussRule rule = gauss_legendre(8);
    const int tp = std::max(1, time_nodes / 8), xp = std::max(1, space_nodes / 8);
    std::vector<double> ts, wts, xs, wxs;
    for (int p = 0; p < tp; ++p) {
        const double h = T_ / tp;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            ts.push_back((p + 0.5) * h + 0.5 * h * rule.nodes[k]);
            wts.push_back(0.5 * h * rule.weights[k]);
        }
    }
    for (const Arc& arc : support_.arcs()) {
        const double h = arc.length() / xp;
        for (int p = 0; p < xp; ++p) {
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                xs.push_back(arc.lo + (p + 0.5) * h + 0.5 * h * rule.nodes[k]);
                wxs.push_back(0.5 * h * rule.weights[k]);
            }
        }
    }
    const std::vector<cplx> grid = expansion_grid(ts, xs);
    double im = 0.0, all = 0.0;
    for (std::size_t it = 0; it < ts.size(); ++it) {
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            const cplx u = grid[it * xs.size() + ix];
            const double w = wts[it] * wxs[ix];
            im += w * u.imag() * u.imag();
            all += w * std::norm(u);
        }
    }
    return all > 0.0 ? std::sqrt(im / all) : 0.0;
}

FourierField project_on_grid(const ControlField& u, double t, int N, int K) {
    const double h = two_pi / K;
    const ControlSet omega = u.support_at(t);
    const double shift = u.frame() == Frame::physical ? u.velocity() * t : 0.0;
    std::vector<cplx> samples(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double x = two_pi * k / K;
        const double frac = omega.overlap(x - h / 2.0, x + h / 2.0) / h;
        if (frac > 0.0) samples[static_cast<std::size_t>(k)] = frac * u.expansion(t, x + shift);
    }
    return FourierField::project(samples, N);
}

Synthesis synthesize_least_norm(const ModelParams& params, const MomentData& md, double regularization) {
    params.validate();
    if (!(regularization >= 0.0)) throw InvalidParameter("regularization must be nonnegative");
    Synthesis s;
    s.regularization = regularization;
    s.subcritical = !params.supercritical_time();
    if (s.subcritical) {
        std::ostringstream os;
        os << "T = " << params.T << " does not exceed the minimal time " << params.minimal_time()
           << "; the control norm is expected to blow up with N";
        s.warnings.push_back(os.str());
    }
    if (md.all_zero()) {
        s.control = ControlField(Frame::moving, params.omega0, params.c, params.T, {});
        s.residuals = summarize(std::vector<cplx>(md.rows.size(), 0.0), md);
        return s;
    }
    const Eigen::MatrixXcd A = assemble_moment_gram(params, md);
    s.condition_number = hermitian_condition_number(A);
    if (regularization == 0.0 && !(s.condition_number < max_moment_condition)) {
        std::ostringstream os;
        os << "moment Gram matrix is numerically singular (condition " << s.condition_number
           << "); reduce N or add regularization";
        throw ConditioningError(os.str(), s.condition_number, std::max(1, (3 * md.N) / 4));
    }
    Eigen::MatrixXcd Areg = A;
    Areg.diagonal().array() += regularization;
    const Eigen::VectorXcd d = rhs_vector(md);
    const Eigen::VectorXcd kappa = Areg.partialPivLu().solve(d);
    const Eigen::VectorXcd res = A * kappa - d;
    s.residuals = summarize(std::vector<cplx>(res.data(), res.data() + res.size()), md);

    std::vector<ControlAtom> atoms;
    atoms.reserve(md.rows.size());
    for (std::size_t k = 0; k < md.rows.size(); ++k)
        atoms.push_back({md.rows[k].frequency, md.rows[k].lambda, kappa(static_cast<Eigen::Index>(k))});
    s.control = ControlField(Frame::moving, params.omega0, params.c, params.T, std::move(atoms));
    return s;
}

ControlField mean_zero_correction(const ControlField& u) {
    if (u.frame() != Frame::moving) throw FrameError("mean-zero correction expects a moving-frame control");
    const ControlSet& omega = u.reference_support();
    const double len = omega.measure();
    std::vector<ControlAtom> out;
    std::vector<ControlAtom> constants;
    for (const auto& a : u.atoms()) {
        if (a.p == 0) continue;  // constant in x: equal to its own mean
        out.push_back(a);
        const cplx m = a.coef * omega.exp_integral(a.p) / len;
        if (m == 0.0) continue;
        auto it = std::find_if(constants.begin(), constants.end(), [&](const ControlAtom& c) { return same_rate(c.rate, a.rate); });
        if (it == constants.end())
            constants.push_back({0, a.rate, -m});
        else
            it->coef -= m;
    }
    out.insert(out.end(), constants.begin(), constants.end());
    return ControlField(Frame::moving, omega, u.velocity(), u.T(), std::move(out));
}

ControlField to_physical_frame(const ControlField& u, double c) {
    if (u.frame() != Frame::moving) throw FrameError("control is already in the physical frame");
    validate_velocity(c);
    return ControlField(Frame::physical, u.reference_support(), c, u.T(), u.atoms());
}

ConstraintResiduals constraint_residuals_quadrature(const ControlField& u, const MomentData& md, int time_panels,
                                                    int space_panels, int nodes) {
    const GaussRule rule = gauss_legendre(nodes);
    std::vector<double> ts, wts, xs, wxs;
    const double T = u.T();
    for (int p = 0; p < time_panels; ++p) {
        const double h = T / time_panels;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            ts.push_back((p + 0.5) * h + 0.5 * h * rule.nodes[k]);
            wts.push_back(0.5 * h * rule.weights[k]);
        }
    }
    for (const Arc& arc : u.reference_support().arcs()) {
        const double h = arc.length() / space_panels;
        for (int p = 0; p < space_panels; ++p) {
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                xs.push_back(arc.lo + (p + 0.5) * h + 0.5 * h * rule.nodes[k]);
                wxs.push_back(0.5 * h * rule.weights[k]);
            }
        }
    }
    // Moving-coordinate values on the tensor grid.
    const std::vector<cplx> grid = u.expansion_grid(ts, xs);

    std::vector<cplx> values(md.rows.size());
#pragma omp parallel for
    for (std::size_t k = 0; k < md.rows.size(); ++k) {
        const MomentRow& r = md.rows[k];
        std::vector<cplx> ex(xs.size());
        for (std::size_t ix = 0; ix < xs.size(); ++ix) ex[ix] = wxs[ix] * std::exp(cplx(0.0, -r.frequency * xs[ix]));
        cplx acc = 0.0;
        for (std::size_t it = 0; it < ts.size(); ++it) {
            cplx row = 0.0;
            for (std::size_t ix = 0; ix < xs.size(); ++ix) row += grid[it * xs.size() + ix] * ex[ix];
            acc += wts[it] * std::exp(-std::conj(r.lambda) * ts[it]) * row;
        }
        values[k] = acc - r.rhs;
    }
    return summarize(std::move(values), md);
}

FourierField separable_profile(const ControlSet& omega, int modes) {
    if (omega.empty()) throw InvalidParameter("empty control set");
    if (modes < 1) throw InvalidParameter("profile needs at least one mode");
    const Arc* widest = &omega.arcs().front();
    for (const Arc& a : omega.arcs())
        if (a.length() > widest->length()) widest = &a;
    const double mid = 0.5 * (widest->lo + widest->hi);
    const double half = 0.45 * widest->length();
    auto bump = [&](double x) {
        const double s = (x - mid) / half;
        return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    };
    const GaussRule rule = gauss_legendre(16);
    auto coefficient = [&](int q) {
        return integrate([&](double x) { return bump(x) * std::exp(cplx(0.0, -q * x)); }, mid - half, mid + half, 64, rule) /
               two_pi;
    };
    std::vector<cplx> B(static_cast<std::size_t>(2 * modes + 3));
    for (int q = -modes - 1; q <= modes + 1; ++q) B[static_cast<std::size_t>(q + modes + 1)] = coefficient(q);
    auto Bq = [&](int q) { return B[static_cast<std::size_t>(q + modes + 1)]; };
    const cplx kappa = Bq(-1) / Bq(0);
    FourierField b(modes);
    for (int n = -modes; n <= modes; ++n) {
        if (n == 0) continue;
        b.at(n) = Bq(n - 1) - kappa * Bq(n);
    }
    return b;
}

cplx SeparatedControl::v(double t) const {
    cplx acc = 0.0;
    for (std::size_t q = 0; q < rates.size(); ++q) acc += time_coeffs[q] * std::exp(-rates[q] * t);
    return acc;
}

SeparatedControl synthesize_separated(const ModelParams& params, const MomentData& md, const FourierField& b,
                                      const DualFamily& dual) {
    params.validate();
    for (const auto& f : dual.family)
        if (f.resonance_adjusted)
            throw DegeneracyError("separable synthesis needs the unadjusted spectrum; the velocity is resonant");
    if (std::abs(dual.T - params.T) > 1e-12 * params.T) throw InvalidParameter("dual family built for another horizon");
    double bmax = 0.0;
    for (const cplx& v : b.data()) bmax = std::max(bmax, std::abs(v));
    for (int n = 1; n <= md.N; ++n) {
        for (int m : {n, -n}) {
            if (!(std::abs(b[m]) > 1e-14 * bmax))
                throw UnscalableRowError("profile coefficient vanishes at mode " + std::to_string(m), m);
        }
    }
    const auto K = static_cast<Eigen::Index>(dual.family.size());
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(K);
    for (const auto& row : md.rows) {
        if (row.zero_row) continue;
        const std::size_t m = dual.index_of(row.n, row.j);
        if (std::abs(dual.family[m].lambda - row.lambda) > 1e-12 * std::abs(row.lambda))
            throw DimensionError("dual family exponents do not match the moment data");
        d(static_cast<Eigen::Index>(m)) = row.rhs * std::exp(std::conj(row.lambda) * (params.T / 2.0)) / (two_pi * b[row.n]);
    }
    SeparatedControl sc;
    sc.b = b;
    const Eigen::VectorXcd V = dual.coefficients.transpose() * d;
    for (Eigen::Index q = 0; q < K; ++q) {
        const cplx lam = dual.family[static_cast<std::size_t>(q)].lambda;
        sc.rates.push_back(lam);
        sc.time_coeffs.push_back(std::exp(lam * (params.T / 2.0)) * V(q));
    }
    std::vector<ControlAtom> atoms;
    for (int p = -b.N(); p <= b.N(); ++p) {
        if (p == 0 || b[p] == 0.0) continue;
        for (std::size_t q = 0; q < sc.rates.size(); ++q) atoms.push_back({p, sc.rates[q], b[p] * sc.time_coeffs[q]});
    }
    sc.field = ControlField(Frame::moving, ControlSet::full_torus(), params.c, params.T, std::move(atoms));
    return sc;
}

YoungFit young_inequality_fit(const ModelParams& params, const MomentData& md, int draws, std::uint64_t seed) {
    const Eigen::MatrixXcd A = assemble_moment_gram(params, md);
    const Eigen::VectorXcd d = rhs_vector(md);
    YoungFit f;
    f.supremum = d.dot(A.partialPivLu().solve(d)).real();
    SeededRng rng(seed);
    for (int k = 0; k < draws; ++k) {
        Eigen::VectorXcd a(d.size());
        for (Eigen::Index q = 0; q < a.size(); ++q) a(q) = rng.complex_normal();
        const double num = std::norm(d.dot(a));
        const double den = a.dot(A * a).real();
        f.max_ratio = std::max(f.max_ratio, num / den);
    }
    return f;
}

}  // namespace memwave
