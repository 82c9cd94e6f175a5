#include <algorithm>
#include <cmath>
#include <limits>

#include "memwave/beam.hpp"
#include "memwave/biorthogonal.hpp"
#include "memwave/cli.hpp"
#include "memwave/control.hpp"
#include "memwave/error.hpp"
#include "memwave/gaps.hpp"
#include "memwave/numerics.hpp"
#include "memwave/rng.hpp"
#include "memwave/simulator.hpp"
#include "memwave/spectrum.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace memwave {

namespace {

void check_le(SuiteResult& s, const std::string& name, double value, double threshold, bool asserted = true) {
    s.checks.push_back({name, value <= threshold, value, threshold, "<=", asserted});
}

void check_ge(SuiteResult& s, const std::string& name, double value, double threshold, bool asserted = true) {
    s.checks.push_back({name, value >= threshold, value, threshold, ">=", asserted});
}

void check_true(SuiteResult& s, const std::string& name, bool ok, double value = 0.0) {
    s.checks.push_back({name, ok, value, 0.0, "holds", true});
}

nlohmann::json cplx_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

std::vector<double> log_spaced(double a, double b, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(std::round(a * std::pow(b / a, static_cast<double>(i) / (count - 1))));
    return out;
}

FourierField random_field(SeededRng& rng, int N, double decay) {
    FourierField f(N);
    for (int n = -N; n <= N; ++n)
        if (n != 0) f.at(n) = rng.complex_normal() / std::pow(std::abs(n), decay);
    return f;
}

std::pair<FourierField, FourierField> data_of(const RunConfig& cfg) {
    const int N = cfg.params.N;
    FourierField y0 = cfg.y0.N() > 0 ? cfg.y0 : default_displacement(N);
    FourierField y1 = cfg.y1.N() > 0 ? cfg.y1 : FourierField(N);
    return {y0.resized(N), y1.resized(N)};
}

}  // namespace

SuiteResult spectrum_suite(const RunConfig& cfg) {
    SuiteResult s;
    s.name = "spectrum";
    const double M = cfg.params.M;
    validate_memory(M);
    double vieta = 0.0;
    long bound_violations = 0, monotone_violations = 0;
    const double lower = std::abs(M) / (M * M + 1.0);
    double prev_abs = 0.0, prev_ratio = std::numeric_limits<double>::infinity();
    CsvTable table{{"n", "mu1", "mu2_re", "mu2_im", "mu2_im_minus_n"}, {}};
    for (int n = 1; n <= cfg.n_max; ++n) {
        const EigenTriple e = solve_cubic_spectrum(n, M);
        vieta = std::max(vieta, e.vieta_residual());
        const double a = std::abs(e.mu1);
        if (!(a >= lower && a < std::abs(M))) ++bound_violations;
        if (n > 1 && !(a > prev_abs && a / n < prev_ratio)) ++monotone_violations;
        prev_abs = a;
        prev_ratio = a / n;
        if (n <= 200) table.rows.push_back({double(n), e.mu1, e.mu2.real(), e.mu2.imag(), branch2_imag_excess(e)});
    }
    check_le(s, "vieta_residual", vieta, 1e-9);
    check_le(s, "mu1_bound_violations", double(bound_violations), 0.0);
    check_le(s, "mu1_monotonicity_violations", double(monotone_violations), 0.0);

    std::vector<double> ns = log_spaced(100.0, std::max(1000.0, double(cfg.n_max)), 25), rem, exc;
    for (double n : ns) {
        const EigenTriple e = solve_cubic_spectrum(static_cast<int>(n), M);
        rem.push_back(std::abs(mu1_asymptotic_remainder(e)));
        exc.push_back(std::abs(branch2_imag_excess(e) - 3.0 * M * M / (8.0 * n)));
    }
    const double slope = fit_loglog(ns, rem).slope;
    check_le(s, "mu1_remainder_loglog_slope", slope, -3.5);
    s.results["mu1_remainder_slope"] = slope;
    s.results["mu2_excess_correction_slope"] = fit_loglog(ns, exc).slope;
    s.tables["spectrum"] = std::move(table);

    const Spectrum spec(M, cfg.params.c, std::max(cfg.params.N, 30));
    CsvTable lam{{"n", "j", "re", "im"}, {}};
    for (const auto& ev : spec.all()) lam.rows.push_back({double(ev.n), double(ev.j), ev.lambda.real(), ev.lambda.imag()});
    s.tables["lambda"] = std::move(lam);
    return s;
}

SuiteResult gaps_suite(const RunConfig& cfg) {
    SuiteResult s;
    s.name = "gaps";
    cfg.params.validate();
    const GapReport g = gap_report(cfg.params, cfg.gap_N);
    for (const auto& w : g.warnings) s.warnings.push_back(w);
    check_ge(s, "branch1_cross_gap", g.min_gap_branch1_cross, g.bound_branch1_cross);
    check_ge(s, "branch1_self_gap", g.min_gap_branch1_self, g.bound_branch1_self);
    check_true(s, "epsilon_ladders", g.ladders_hold());
    check_ge(s, "close_pair_gamma", g.gamma_fit, std::numeric_limits<double>::min());
    CsvTable pairs{{"m", "partner", "distance", "scaled"}, {}};
    for (const auto& p : g.close_pairs) pairs.rows.push_back({double(p.m), double(p.partner), p.distance, p.scaled});
    s.results["N_epsilon"] = g.N_epsilon;
    s.results["epsilon_used"] = g.epsilon_used;
    s.results["min_gap_all"] = g.min_gap_all;
    s.results["coincidences_at_c"] = g.coincidences.size();

    ModelParams res = cfg.params;
    res.c = resonance_velocity(1, res.M);
    const GapReport gr = gap_report(res, cfg.gap_N);
    const bool single = gr.coincidences.size() == 1 && std::abs(gr.coincidences[0].n1) == 1 &&
                        std::abs(gr.coincidences[0].n2) == 1;
    check_true(s, "resonant_velocity_single_coincidence", single, double(gr.coincidences.size()));
    s.results["resonant_velocity"] = res.c;
    s.tables["close_pairs"] = std::move(pairs);
    return s;
}

SuiteResult riesz_suite(const RunConfig& cfg) {
    SuiteResult s;
    s.name = "riesz";
    cfg.params.validate();
    const double M = cfg.params.M, c = cfg.params.c;
    double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
    CsvTable table{{"n", "s1", "s2", "s3"}, {}};
    for (int n = -1000; n <= 1000; ++n) {
        if (n == 0) continue;
        const RieszMatrix r = riesz_matrix(n, M, c);
        smin = std::min(smin, r.singular_values[0]);
        smax = std::max(smax, r.singular_values[2]);
        table.rows.push_back({double(n), r.singular_values[0], r.singular_values[1], r.singular_values[2]});
    }
    check_ge(s, "singular_value_floor", smin, 1e-3);
    check_le(s, "singular_value_ceiling", smax, 1e3);
    s.results["singular_value_interval"] = {smin, smax};

    const Eigen::Matrix3cd limit = riesz_limit_matrix(M, c);
    std::vector<double> ns = {100.0, 1000.0, 10000.0}, dev;
    for (double n : ns) {
        const RieszMatrix r = riesz_matrix(static_cast<int>(n), M, c);
        dev.push_back((r.B.adjoint() * r.B - limit).cwiseAbs().maxCoeff());
    }
    const double slope = fit_loglog(ns, dev).slope;
    check_le(s, "limit_deviation_loglog_slope", slope, -0.9);
    check_le(s, "limit_deviation_at_1e4_vs_1e-4", dev.back(), 1e-4, false);
    const double det = limit.determinant().real();
    check_le(s, "limit_det_vs_derived_4_over_M2", std::abs(det - 4.0 / (M * M)), 1e-10);
    check_le(s, "limit_det_vs_printed_6_over_M2", std::abs(det - 6.0 / (M * M)), 1e-10, false);
    s.results["limit_deviation"] = dev;
    s.results["limit_det"] = det;
    s.tables["riesz"] = std::move(table);
    return s;
}

SuiteResult biorth_suite(const RunConfig& cfg) {
    SuiteResult s;
    s.name = "biorth";
    cfg.params.validate();
    const DualFamily dual = dual_family_gram(cfg.params, cfg.biorth_N, cfg.reg);
    check_le(s, "pairing_defect", dual.pairing_defect(), 1e-8);
    const double growth = atom_growth_exponent(dual);
    check_le(s, "atom_growth_exponent", growth, 2.3);
    s.results["gram_condition"] = dual.condition_number;

    SeededRng rng(cfg.seed);
    double worst = 0.0;
    bool finite = true;
    for (int d = 0; d < 100; ++d) {
        std::vector<cplx> a(dual.family.size());
        for (auto& v : a) v = rng.complex_normal();
        const SummationCheck sc = summation_inequality_check(a, dual);
        finite = finite && std::isfinite(sc.ratio) && sc.ratio > 0.0;
        worst = std::max(worst, sc.ratio);
    }
    check_true(s, "summation_ratio_finite", finite, worst);
    s.results["summation_ratio_max"] = worst;

    const ProductEvaluator P(cfg.params.M, cfg.params.c, cfg.N_prod);
    double zero_worst = 0.0;
    CsvTable zeros{{"m", "j", "relative_value"}, {}};
    for (int k = 0; k < 20; ++k) {
        int m = 1 + static_cast<int>(rng.uniform() * cfg.N_prod);
        m = std::min(m, cfg.N_prod);
        if (rng.uniform() < 0.5) m = -m;
        const int j = 1 + std::min(2, static_cast<int>(rng.uniform() * 3));
        const cplx z0 = P.zero(m, j);
        double nb = 0.0;
        for (int q = 0; q < 16; ++q) nb = std::max(nb, P(z0 + 0.25 * std::exp(cplx(0.0, two_pi * q / 16))).log_abs());
        const double rel = std::exp(P(z0).log_abs() - nb);
        zero_worst = std::max(zero_worst, rel);
        zeros.rows.push_back({double(m), double(j), rel});
    }
    check_le(s, "product_zero_relative", zero_worst, 1e-6);
    double factor_worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const cplx z(100.0 * (rng.uniform() - 0.5), 2.0 * rng.uniform() - 1.0);
        const cplx a = P(z).to_complex(), b = P.factored(z).to_complex();
        factor_worst = std::max(factor_worst, std::abs(a - b) / std::abs(a));
    }
    check_le(s, "factorization_relative", factor_worst, 1e-8);
    const Spectrum& spec = P.spectrum();
    for (int j = 1; j <= 3; ++j) {
        const NuSequence nu = nu_sequence(j, spec);
        const cplx limit = nu_asymptotic_constant(j, cfg.params.M, cfg.params.c);
        std::vector<double> ns, dev;
        for (int n = 50; n <= spec.N(); n = n * 5 / 4 + 1) {
            ns.push_back(n);
            dev.push_back(std::abs(nu.at(n) - cplx(0.0, n) - limit));
        }
        check_le(s, "nu_asymptotic_slope_branch" + std::to_string(j), fit_loglog(ns, dev).slope, -0.8);
    }
    const double type = pi * (1.0 / std::abs(cfg.params.c) + 1.0 / std::abs(1.0 + cfg.params.c) +
                              1.0 / std::abs(1.0 - cfg.params.c));
    for (double y : {1000.0, -1000.0}) {
        const double probe = P.exponential_type_probe(y);
        check_le(s, y > 0 ? "exponential_type_upper" : "exponential_type_lower", std::abs(probe - type) / type, 0.15);
    }
    std::vector<double> ms, mins;
    double floor = std::numeric_limits<double>::infinity();
    CsvTable der{{"m", "j", "m2_abs_derivative"}, {}};
    for (int m = 1; m <= 64; m *= 2) {
        double lo = std::numeric_limits<double>::infinity();
        for (int sign : {1, -1}) {
            for (int j = 1; j <= 3; ++j) {
                const double v = double(m) * m * std::exp(P.derivative_at_zero(sign * m, j).log_abs());
                lo = std::min(lo, v);
                der.rows.push_back({double(sign * m), double(j), v});
            }
        }
        ms.push_back(m);
        mins.push_back(lo);
        floor = std::min(floor, lo);
    }
    check_ge(s, "derivative_floor", floor, std::numeric_limits<double>::min());
    check_ge(s, "derivative_floor_loglog_slope", fit_loglog(ms, mins).slope, -0.25);
    s.results["derivative_floor"] = floor;
    s.tables["product_zeros"] = std::move(zeros);
    s.tables["product_derivative"] = std::move(der);
    return s;
}

SuiteResult control_suite(const RunConfig& cfg) {
    SuiteResult s;
    s.name = "control";
    const ModelParams& p = cfg.params;
    p.validate();
    const auto [y0, y1] = data_of(cfg);
    const MomentData md = moment_rhs(y0, y1, p, p.N);
    Synthesis syn;
    try {
        syn = synthesize_least_norm(p, md, cfg.reg);
    } catch (const ConditioningError& e) {
        s.warnings.push_back(std::string(e.what()) + "; retrying with default regularization");
        const double reg = 1e-12 * md.rows.size();
        syn = synthesize_least_norm(p, md, reg);
    }
    for (const auto& w : syn.warnings) s.warnings.push_back(w);
    s.results["moment_condition"] = syn.condition_number;
    s.results["gram_residual_max"] = syn.residuals.max_abs;

    // Below the minimal time the tolerances are reported, not asserted.
    const bool strict = !syn.subcritical;
    const ConstraintResiduals pre = constraint_residuals_quadrature(syn.control, md);
    const ControlField corrected = mean_zero_correction(syn.control);
    const ConstraintResiduals post = constraint_residuals_quadrature(corrected, md);
    double invariance = 0.0;
    for (std::size_t k = 0; k < md.rows.size(); ++k)
        if (!md.rows[k].zero_row) invariance = std::max(invariance, std::abs(pre.values[k] - post.values[k]));
    const ControlField phys = to_physical_frame(corrected, p.c);
    check_le(s, "constraint_residual_max", post.max_abs, 1e-8, strict);
    s.results["constraint_residual_rms"] = post.rms;
    check_le(s, "mean_zero_invariance", invariance, 1e-10, strict);
    double mean = 0.0;
    for (int i = 0; i <= 8; ++i) mean = std::max(mean, std::abs(corrected.support_mean(p.T * i / 8.0)));
    check_le(s, "support_mean", mean, 1e-10, strict);
    if (y0.is_real_valued() && y1.is_real_valued())
        check_le(s, "control_imaginary_ratio", phys.imaginary_ratio(), 1e-9, strict);

    SimulationOptions opt;
    opt.N_t = cfg.N_t;
    const Trajectory tr = simulate_forward(p, y0, y1, phys, opt);
    const TerminalReport rep = terminal_report(tr);
    check_le(s, "terminal_relative", rep.relative_total, 1e-3, strict);
    check_le(s, "z_consistency", tr.z_consistency, 1e-8, strict);
    s.results["terminal"] = {{"y_h1", rep.y_h1}, {"yt_l2", rep.yt_l2}, {"z_l2", rep.z_l2}, {"initial", rep.initial_total}};
    s.results["control_l2"] = phys.l2_norm();

    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : corrected.atoms()) atoms.push_back(nlohmann::json{{"p", a.p}, {"rate", cplx_json(a.rate)}, {"coef", cplx_json(a.coef)}});
    s.results["control_atoms_moving_frame"] = std::move(atoms);

    CsvTable grid{{"t", "x", "re_u", "im_u"}, {}};
    for (int i = 0; i <= 40; ++i) {
        const double t = p.T * i / 40.0;
        for (int k = 0; k < 64; ++k) {
            const double x = -pi + two_pi * k / 64.0;
            const cplx u = phys.evaluate(t, x);
            grid.rows.push_back({t, x, u.real(), u.imag()});
        }
    }
    s.tables["control_grid"] = std::move(grid);
    CsvTable traj{{"t", "y_h1", "yt_l2", "z_l2"}, {}};
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        traj.rows.push_back({tr.times[k], sobolev_norm(tr.snapshots[k].first, 1.0), sobolev_norm(tr.snapshots[k].second, 0.0),
                             sobolev_norm(tr.snapshots[k].third, 0.0)});
    s.tables["trajectory"] = std::move(traj);

    if (detect_resonance(p, p.N)) {
        s.warnings.push_back("separable synthesis skipped: the velocity is resonant");
    } else {
        try {
            const FourierField b = separable_profile(p.omega0, 64);
            const DualFamily dual = dual_family_gram(p, p.N, cfg.reg, false);
            const SeparatedControl sep = synthesize_separated(p, md, b, dual);
            const ControlField sep_phys = to_physical_frame(mean_zero_correction(sep.field), p.c);
            const double sep_rel = terminal_report(simulate_forward(p, y0, y1, sep_phys, opt)).relative_total;
            check_le(s, "separable_terminal_vs_least_norm", sep_rel, 10.0 * std::max(rep.relative_total, 1e-12),
                     strict);
            s.results["separable_terminal_relative"] = sep_rel;
        } catch (const ConditioningError& e) {
            s.warnings.push_back(std::string("separable synthesis skipped: ") + e.what());
        }
    }

    if (syn.subcritical) {
        s.warning_status = true;
        // Norm trend of the least-norm control as N grows below the minimal time.
        nlohmann::json trend = nlohmann::json::array();
        const int first = std::max(1, std::max(y0.max_active_mode(), y1.max_active_mode()));
        for (int n = first; n <= p.N; ++n) {
            const MomentData mdn = moment_rhs(y0.resized(n), y1.resized(n), p, n);
            try {
                const Synthesis sn = synthesize_least_norm(p, mdn, cfg.reg);
                trend.push_back(nlohmann::json{{"N", mdn.N}, {"control_l2", sn.control.l2_norm()}, {"condition", sn.condition_number}});
            } catch (const ConditioningError& e) {
                trend.push_back(nlohmann::json{{"N", mdn.N}, {"condition", e.condition_number()}, {"note", "numerically singular"}});
            }
        }
        s.results["subcritical_norm_trend"] = std::move(trend);
    }
    return s;
}

SuiteResult simulate_suite(const RunConfig& cfg) {
    SuiteResult s;
    s.name = "simulate";
    const ModelParams& p = cfg.params;
    p.validate();

    // Free single-mode runs against the Pade matrix exponential.
    double oracle = 0.0, rk4 = 0.0;
    ModelParams short_run = p;
    short_run.T = 5.0;
    for (int n = -8; n <= 8; ++n) {
        if (n == 0) continue;
        FourierField y0(8), y1(8);
        y0.at(n) = 1.0;
        y1.at(n) = cplx(0.0, 0.5);
        SimulationOptions opt;
        opt.N_t = 2000;
        opt.stride = 20;
        const ControlField none(Frame::physical, p.omega0, p.c, short_run.T, {});
        const Trajectory tr = simulate_forward(short_run, y0, y1, none, opt);
        Eigen::Matrix3d A;
        A << 0, 1, 0, -double(n) * n, 0, -p.M, -double(n) * n, 0, 0;
        const Eigen::Vector3cd x0(1.0, cplx(0.0, 0.5), 0.0);
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            const Eigen::Matrix3d E = (A * tr.times[k]).exp();
            const Eigen::Vector3cd ref = E.cast<cplx>() * x0;
            const Eigen::Vector3cd got(tr.snapshots[k].first[n], tr.snapshots[k].second[n], tr.snapshots[k].third[n]);
            oracle = std::max(oracle, (got - ref).norm() / std::max(1.0, ref.norm()));
        }
        opt.integrator = Integrator::rk4;
        const Trajectory tk = simulate_forward(short_run, y0, y1, none, opt);
        const Eigen::Vector3cd a(tr.terminal.first[n], tr.terminal.second[n], tr.terminal.third[n]);
        const Eigen::Vector3cd b(tk.terminal.first[n], tk.terminal.second[n], tk.terminal.third[n]);
        rk4 = std::max(rk4, (a - b).norm() / std::max(1.0, a.norm()));
    }
    check_le(s, "matrix_exponential_oracle", oracle, 1e-8);
    check_le(s, "rk4_cross_check", rk4, 1e-6);

    // Duality identity on seeded random data at N = 4.
    ModelParams dp = p;
    dp.N = 4;
    SeededRng rng(cfg.seed ^ 0x5eedULL);
    const FourierField y0 = random_field(rng, 4, 3.0), y1 = random_field(rng, 4, 2.0);
    std::vector<ControlAtom> atoms;
    for (int k = 0; k < 12; ++k) {
        const int q = static_cast<int>(std::floor(rng.uniform() * 9.0)) - 4;
        atoms.push_back({q, cplx(rng.uniform() - 0.5, 12.0 * rng.uniform() - 6.0), rng.complex_normal()});
    }
    const ControlField u = to_physical_frame(ControlField(Frame::moving, dp.omega0, dp.c, dp.T, atoms), dp.c);
    StateTriple term{random_field(rng, 4, 0.0), random_field(rng, 4, 0.0), random_field(rng, 4, 0.0)};
    std::vector<double> nts = {512.0, 2048.0, 8192.0}, res;
    for (double nt : nts) {
        SimulationOptions opt;
        opt.N_t = static_cast<int>(nt);
        res.push_back(duality_residual(dp, y0, y1, u, term, opt).residual);
    }
    SimulationOptions opt4096;
    opt4096.N_t = 4096;
    const DualityTerms d4 = duality_residual(dp, y0, y1, u, term, opt4096);
    check_le(s, "duality_residual_4096", d4.residual, 1e-6);
    check_le(s, "duality_order_slope", fit_loglog(nts, res).slope, -3.5);
    s.results["duality_residuals"] = res;
    nlohmann::json terms = nlohmann::json::array();
    for (const cplx& t : d4.rhs_terms) terms.push_back(cplx_json(t));
    s.results["duality_terms"] = {{"lhs", cplx_json(d4.lhs)}, {"rhs", terms}};

    // Well-posedness estimate shape: the sup-energy ratio is scale invariant.
    auto ratio = [&](double scale) {
        SimulationOptions opt;
        opt.N_t = 1024;
        const ControlField us(Frame::physical, u.reference_support(), u.velocity(), u.T(), [&] {
            auto a = u.atoms();
            for (auto& x : a) x.coef *= scale;
            return a;
        }());
        const Trajectory tr = simulate_forward(dp, cplx(scale) * y0, cplx(scale) * y1, us, opt);
        double sup = 0.0;
        for (const auto& sn : tr.snapshots)
            sup = std::max(sup, std::hypot(sobolev_norm(sn.first, 1.0), sobolev_norm(sn.second, 0.0), sobolev_norm(sn.third, 0.0)));
        return sup / (sobolev_norm(cplx(scale) * y0, 1.0) + sobolev_norm(cplx(scale) * y1, 0.0) + us.l2_norm());
    };
    const double r1 = ratio(1.0), r2 = ratio(37.5);
    check_le(s, "energy_ratio_scale_invariance", std::abs(r1 - r2) / r1, 1e-10);
    check_le(s, "z_consistency", [&] {
        SimulationOptions opt;
        opt.N_t = 4096;
        return simulate_forward(dp, y0, y1, u, opt).z_consistency;
    }(), 1e-8);
    return s;
}

SuiteResult beam_suite(const RunConfig& cfg) {
    SuiteResult s;
    s.name = "beam";
    BeamParams base;
    base.M = cfg.params.M;
    const BeamSweep sw = beam_sweep(base, cfg.eps_sweep);
    const BeamDiagnostics* smallest = &sw.rows.front();
    CsvTable table{{"epsilon", "residual", "E0", "offray_ratio", "h1_norm"}, {}};
    bool offray_ok = true;
    double printed_worst = 0.0, drift_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : sw.rows) {
        if (r.epsilon < smallest->epsilon) smallest = &r;
        offray_ok = offray_ok && r.offray_ratio <= 3.0 * std::exp(-2.0 * std::pow(r.epsilon, -0.25));
        table.rows.push_back({r.epsilon, r.residual_norm, r.E0, r.offray_ratio, r.h1_norm});
        for (const auto& w : r.warnings) s.warnings.push_back(w);
        BeamParams bp = base;
        bp.epsilon = r.epsilon;
        const PrintedEnergyTerms pe = printed_energy_terms(bp);
        for (int k = 0; k < 3; ++k)
            printed_worst = std::max(printed_worst, std::abs(pe.closed[k] - pe.quadrature[k]) / std::abs(pe.closed[k]));
        drift_margin = std::min(drift_margin, std::pow(r.epsilon, 0.125) - r.centroid_drift);
    }
    check_le(s, "h1_norm_at_smallest_epsilon", std::abs(smallest->h1_norm - 1.0), 0.05);
    check_true(s, "offray_energy_bound", offray_ok, sw.offray_constant);
    check_ge(s, "residual_decay_slope", sw.residual_slope, 0.4);
    check_ge(s, "E0_rate", sw.E_rate, 0.4);
    check_le(s, "gaussian_moment_closed_forms", printed_worst, 1e-8);
    check_ge(s, "centroid_drift_margin", drift_margin, 0.0);
    check_true(s, "offray_monotone", sw.offray_monotone);
    check_true(s, "h1_monotone", sw.h1_monotone);
    s.results["E_limit"] = sw.E_limit;
    s.results["E_limit_distance_to_1"] = std::abs(sw.E_limit - 1.0);
    s.results["E_limit_distance_to_half"] = std::abs(sw.E_limit - 0.5);
    s.results["offray_constant"] = sw.offray_constant;
    s.tables["beam"] = std::move(table);
    return s;
}

}  // namespace memwave
