#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace memwave {

struct GaussRule {
    std::vector<double> nodes;  // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Composite Gauss-Legendre over equal panels of [a, b].
template <class F>
auto integrate(F&& f, double a, double b, int panels, const GaussRule& rule) {
    using R = decltype(f(a));
    R acc{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        R part{};
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) part += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        acc += 0.5 * h * part;
    }
    return acc;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);
// Fit of log y against log x.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

// Ascending eigenvalues of a 3x3 Hermitian matrix (trigonometric closed form).
std::array<double, 3> hermitian3_eigenvalues(const Eigen::Matrix3cd& A);

// Ratio of extreme eigenvalues of a Hermitian positive semidefinite matrix.
double hermitian_condition_number(const Eigen::MatrixXcd& A);

}  // namespace memwave
