#include "memwave/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace memwave {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("Gauss rule needs at least one node");
    GaussRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs two or more points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t k = 0; k < x.size(); ++k) lx[k] = std::log(x[k]);
    for (std::size_t k = 0; k < y.size(); ++k) ly[k] = std::log(y[k]);
    return fit_line(lx, ly);
}

std::array<double, 3> hermitian3_eigenvalues(const Eigen::Matrix3cd& A) {
    const double a00 = A(0, 0).real(), a11 = A(1, 1).real(), a22 = A(2, 2).real();
    const double p1 = std::norm(A(0, 1)) + std::norm(A(0, 2)) + std::norm(A(1, 2));
    const double q = (a00 + a11 + a22) / 3.0;
    std::array<double, 3> e{};
    if (p1 == 0.0) {
        e = {a00, a11, a22};
        std::sort(e.begin(), e.end());
        return e;
    }
    const double p2 = (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Eigen::Matrix3cd B = (A - q * Eigen::Matrix3cd::Identity()) / p;
    const double r = std::clamp(B.determinant().real() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    e = {lo, 3.0 * q - hi - lo, hi};
    return e;
}

double hermitian_condition_number(const Eigen::MatrixXcd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double hi = ev.cwiseAbs().maxCoeff();
    const double lo = ev.cwiseAbs().minCoeff();
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace memwave
