#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memwave/model.hpp"
#include "memwave/spectrum.hpp"

namespace memwave {

// Nearest integer to (1 + c) m / |1 - c|, ties to even.
int nearest_partner(int m, double c);

double default_gap_epsilon(double c);

// Smallest n >= 1 from which Im(mu2_n) - n stays below epsilon, or
// std::nullopt if that does not happen up to n_max.
std::optional<int> ladder_threshold(double M, double epsilon, int n_max);

struct ClosePair {
    int m = 0;
    int partner = 0;
    double distance = 0.0;
    double scaled = 0.0;  // m^2 * distance
    double bound = 0.0;   // gamma_fit / m^2
};

struct LadderCheck {
    std::string name;
    bool passed = false;
    double worst_margin = 0.0;  // smallest (value - bound); negative on failure
};

struct Coincidence {
    int n1 = 0, j1 = 0, n2 = 0, j2 = 0;
    double distance = 0.0;
};

struct GapReport {
    ModelParams params;
    int N = 0;
    double epsilon_requested = 0.0;
    double epsilon_used = 0.0;
    int N_epsilon = 0;
    double min_gap_branch1_cross = 0.0;
    double min_gap_branch1_self = 0.0;
    double bound_branch1_cross = 0.0;  // |M| / (M^2 + 1)
    double bound_branch1_self = 0.0;   // |c|
    double min_gap_all = 0.0;
    std::vector<ClosePair> close_pairs;
    double gamma_fit = 0.0;
    std::vector<LadderCheck> ladders;
    std::vector<Coincidence> coincidences;
    std::vector<std::string> warnings;

    bool branch1_bounds_hold() const;
    bool ladders_hold() const;
};

inline constexpr double default_coincidence_tol = 1e-9;

GapReport gap_report(const ModelParams& params, int N, std::optional<double> epsilon = std::nullopt,
                     double coincidence_tol = default_coincidence_tol);

}  // namespace memwave
