#include "memwave/gaps.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "memwave/error.hpp"

namespace memwave {

int nearest_partner(int m, double c) {
    validate_velocity(c);
    if (m < 1) throw InvalidParameter("nearest_partner needs m >= 1");
    const double ratio = (1.0 + std::abs(c)) * m / std::abs(1.0 - std::abs(c));
    return static_cast<int>(std::nearbyint(ratio));
}

double default_gap_epsilon(double c) { return 0.05 * std::min(std::abs(1.0 - std::abs(c)), 1.0); }

std::optional<int> ladder_threshold(double M, double epsilon, int n_max) {
    // The excess decreases in n, so the first crossing is the threshold.
    for (int n = 1; n <= n_max; ++n) {
        if (branch2_imag_excess(solve_cubic_spectrum(n, M)) <= epsilon) return n;
    }
    return std::nullopt;
}

bool GapReport::branch1_bounds_hold() const {
    return min_gap_branch1_cross >= bound_branch1_cross && min_gap_branch1_self >= bound_branch1_self;
}

bool GapReport::ladders_hold() const {
    return std::all_of(ladders.begin(), ladders.end(), [](const LadderCheck& l) { return l.passed; });
}

namespace {

using SeqFn = std::function<double(int)>;

// Checks f(n) against f(n+1) with a direction and f(n) against a bound over [from, to].
LadderCheck monotone(const std::string& name, const SeqFn& f, int from, int to, bool increasing, double bound,
                     bool bound_is_lower) {
    LadderCheck ch{name, true, std::numeric_limits<double>::infinity()};
    for (int n = from; n <= to; ++n) {
        const double v = f(n);
        const double m = bound_is_lower ? v - bound : bound - v;
        ch.worst_margin = std::min(ch.worst_margin, m);
        if (n < to) {
            const double step = increasing ? f(n + 1) - v : v - f(n + 1);
            ch.worst_margin = std::min(ch.worst_margin, step);
            if (step <= 0.0) ch.passed = false;
        }
        if (m < 0.0) ch.passed = false;
    }
    return ch;
}

LadderCheck increment(const std::string& name, const SeqFn& f, int from, int to, double bound) {
    LadderCheck ch{name, true, std::numeric_limits<double>::infinity()};
    for (int n = from; n < to; ++n) {
        const double m = f(n) - bound;
        ch.worst_margin = std::min(ch.worst_margin, m);
        if (m < 0.0) ch.passed = false;
    }
    return ch;
}

LadderCheck dominated(const std::string& name, const SeqFn& f, int to, double ref, bool below) {
    LadderCheck ch{name, true, std::numeric_limits<double>::infinity()};
    for (int n = 1; n <= to; ++n) {
        const double m = below ? ref - f(n) : f(n) - ref;
        ch.worst_margin = std::min(ch.worst_margin, m);
        if (m < 0.0) ch.passed = false;
    }
    return ch;
}

}  // namespace

GapReport gap_report(const ModelParams& params, int N, std::optional<double> epsilon, double coincidence_tol) {
    validate_memory(params.M);
    validate_velocity(params.c);
    if (N < 2) throw InvalidParameter("gap report needs N >= 2");

    GapReport r;
    r.params = params;
    r.N = N;
    const double C = std::abs(params.c);
    const double s = params.c > 0.0 ? 1.0 : -1.0;
    const Spectrum spec(params.M, params.c, N);
    // Spectrum of velocity |c|: lambda_n(|c|) = lambda_{sign(c) n}(c).
    auto lam = [&](int n, int j) { return spec.eigenvalue(static_cast<int>(s) * n, j).lambda; };

    r.epsilon_requested = epsilon.value_or(default_gap_epsilon(params.c));
    if (!(r.epsilon_requested > 0.0)) throw InvalidParameter("epsilon must be positive");
    r.epsilon_used = r.epsilon_requested;
    if (auto n1 = ladder_threshold(params.M, r.epsilon_used, N)) {
        r.N_epsilon = *n1;
    } else {
        r.epsilon_used = branch2_imag_excess(spec.triple(N));
        r.N_epsilon = N;
        std::ostringstream os;
        os << "ladder threshold exceeds N = " << N << "; epsilon widened from " << r.epsilon_requested << " to "
           << r.epsilon_used;
        r.warnings.push_back(os.str());
    }

    // Branch-1 separation and the full pairwise census.
    const auto all = spec.all();
    r.bound_branch1_cross = std::abs(params.M) / (params.M * params.M + 1.0);
    r.bound_branch1_self = C;
    double cross = std::numeric_limits<double>::infinity();
    double self = cross, global = cross;
    const std::size_t total = all.size();
    std::vector<double> row_cross(total, cross), row_self(total, cross), row_all(total, cross);
    std::vector<std::vector<Coincidence>> row_hits(total);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t a = 0; a < total; ++a) {
        for (std::size_t b = a + 1; b < total; ++b) {
            const double d = std::abs(all[a].lambda - all[b].lambda);
            row_all[a] = std::min(row_all[a], d);
            const bool a1 = all[a].j == 1, b1 = all[b].j == 1;
            if (a1 && b1) row_self[a] = std::min(row_self[a], d);
            if (a1 != b1) row_cross[a] = std::min(row_cross[a], d);
            const double scale = std::max({1.0, std::abs(all[a].lambda), std::abs(all[b].lambda)});
            if (d <= coincidence_tol * scale)
                row_hits[a].push_back({all[a].n, all[a].j, all[b].n, all[b].j, d});
        }
    }
    for (std::size_t a = 0; a < total; ++a) {
        cross = std::min(cross, row_cross[a]);
        self = std::min(self, row_self[a]);
        global = std::min(global, row_all[a]);
        for (const auto& h : row_hits[a]) r.coincidences.push_back(h);
    }
    r.min_gap_branch1_cross = cross;
    r.min_gap_branch1_self = self;
    r.min_gap_all = global;

    // Close pairs at the nearest partner.
    double gamma = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= N; ++m) {
        const int nm = nearest_partner(m, C);
        if (nm < 1 || nm > N) continue;
        const cplx other = C < 1.0 ? lam(-nm, 2) : lam(nm, 3);
        ClosePair p;
        p.m = m;
        p.partner = nm;
        p.distance = std::abs(lam(m, 2) - other);
        p.scaled = static_cast<double>(m) * m * p.distance;
        gamma = std::min(gamma, p.scaled);
        r.close_pairs.push_back(p);
    }
    r.gamma_fit = r.close_pairs.empty() ? 0.0 : gamma;
    for (ClosePair& p : r.close_pairs) p.bound = r.gamma_fit / (static_cast<double>(p.m) * p.m);

    // Imaginary-part ladders.
    const double eps = r.epsilon_used;
    const int n1 = r.N_epsilon;
    auto im2p = [&](int n) { return lam(n, 2).imag(); };
    auto im2m = [&](int n) { return lam(-n, 2).imag(); };
    auto im3p = [&](int n) { return lam(n, 3).imag(); };
    auto im3m = [&](int n) { return lam(-n, 3).imag(); };
    auto& L = r.ladders;
    if (C < 1.0) {
        L.push_back(monotone("Im l2(n) increasing, >= 1+c (n>=1)", im2p, 1, N, true, 1.0 + C, true));
        L.push_back(monotone("Im l2(-n) increasing, >= 1-c (n>=N_eps)", im2m, n1, N, true, 1.0 - C, true));
        L.push_back(monotone("Im l3(n) decreasing, <= -1+c (n>=N_eps)", im3p, n1, N, false, -1.0 + C, false));
        L.push_back(monotone("Im l3(-n) decreasing, <= -1-c (n>=1)", im3m, 1, N, false, -1.0 - C, false));
        L.push_back(increment("Im l2(n+1) - Im l2(n) >= 1+c-eps", [&](int n) { return im2p(n + 1) - im2p(n); }, n1,
                              N, 1.0 + C - eps));
        L.push_back(increment("Im l2(-n-1) - Im l2(-n) >= 1-c-eps", [&](int n) { return im2m(n + 1) - im2m(n); },
                              n1, N, 1.0 - C - eps));
        L.push_back(dominated("Im l2(-n) <= Im l2(-N_eps) for n <= N_eps", im2m, n1, im2m(n1), true));
        L.push_back(dominated("Im l3(n) >= Im l3(N_eps) for n <= N_eps", im3p, n1, im3p(n1), false));
    } else {
        L.push_back(monotone("Im l2(n) increasing, >= c+1 (n>=1)", im2p, 1, N, true, C + 1.0, true));
        L.push_back(monotone("Im l3(n) increasing, >= c-1-eps (n>=N_eps)", im3p, n1, N, true, C - 1.0 - eps, true));
        L.push_back(monotone("Im l2(-n) decreasing, <= 1-c+eps (n>=N_eps)", im2m, n1, N, false, 1.0 - C + eps, false));
        L.push_back(monotone("Im l3(-n) decreasing, <= -1-c (n>=1)", im3m, 1, N, false, -1.0 - C, false));
        L.push_back(increment("Im l2(n+1) - Im l2(n) >= c+1-eps", [&](int n) { return im2p(n + 1) - im2p(n); }, n1,
                              N, C + 1.0 - eps));
        L.push_back(increment("Im l2(-n) - Im l2(-n-1) >= c-1-eps", [&](int n) { return im2m(n) - im2m(n + 1); },
                              n1, N, C - 1.0 - eps));
        L.push_back(dominated("Im l3(n) <= Im l3(N_eps) for n <= N_eps", im3p, n1, im3p(n1), true));
        L.push_back(dominated("Im l2(-n) >= Im l2(-N_eps) for n <= N_eps", im2m, n1, im2m(n1), false));
    }
    return r;
}

}  // namespace memwave
