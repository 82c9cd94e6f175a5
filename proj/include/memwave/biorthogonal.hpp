#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "memwave/model.hpp"
#include "memwave/simd.hpp"
#include "memwave/spectrum.hpp"

namespace memwave {

// Branch scale: c, c + 1, c - 1 for j = 1, 2, 3.
double branch_scale(int j, double c);
// Limit of nu_n^j - i n.
double nu_asymptotic_constant(int j, double M, double c);

struct NuSequence {
    int branch = 0;
    double scale = 0.0;
    int N = 0;
    std::vector<cplx> values;  // n = -N..-1, 1..N
    cplx at(int n) const;
};

NuSequence nu_sequence(int j, const Spectrum& spectrum);

struct ProductValue {
    simd::ScaledComplex value;
    // Estimated |log| error of the tail approximation.
    double tail_error = 0.0;
    double log_abs() const { return value.log_abs(); }
    cplx to_complex() const { return value.value(); }
};

// z^3 times the product of (1 + z / (i conj(lambda))) over the shifted
// spectrum with |n| <= N_prod, plus a second-order tail correction.
class ProductEvaluator {
public:
    ProductEvaluator(double M, double c, int N_prod, bool apply_resonance_convention = false);

    int N_prod() const { return spectrum_.N(); }
    const Spectrum& spectrum() const { return spectrum_; }

    ProductValue operator()(cplx z) const;
    // Same product assembled as c1 c2 c3 P1(z/c1) P2(z/c2) P3(z/c3).
    ProductValue factored(cplx z) const;
    ProductValue derivative_at_zero(int m, int j) const;
    cplx zero(int m, int j) const;

    double exponential_type_probe(double y) const;

private:
    struct Tail {
        cplx s1;  // sum of w over levels n > N_prod
        cplx s2;  // sum of w^2 over the same levels
        double s2_abs;
    };
    std::size_t slot(int n, int j) const;
    Tail tail_of(std::span<const cplx> last_level) const;
    ProductValue finish(simd::ScaledComplex acc, cplx z, const Tail& t) const;

    Spectrum spectrum_;
    std::vector<cplx> weights_;  // 1 / (i conj(lambda)), six per level
    Tail tail_;
    std::vector<cplx> nu_weights_[3];  // 1 / (i conj(nu)), two per level
    Tail nu_tail_[3];
};

struct BiorthogonalAtom {
    int m = 0;
    int k = 0;
    cplx lambda;
    double norm = 0.0;
};

// Dual family to e^{-lambda t} on (-T/2, T/2): theta_m = sum_b C_mb e^{-lambda_b t}
// with C = (G + reg I)^{-1} and G_ab = <e^{-lambda_a t}, e^{-lambda_b t}>.
struct DualFamily {
    double T = 0.0;
    double regularization = 0.0;
    double condition_number = 0.0;
    std::vector<ShiftedEigenvalue> family;
    Eigen::MatrixXcd gram;
    Eigen::MatrixXcd coefficients;
    std::vector<BiorthogonalAtom> atoms;

    std::size_t index_of(int n, int j) const;
    cplx evaluate(std::size_t m, double t) const;
    // <theta_m, e^{-lambda_n t}> from a freshly assembled Gram matrix.
    Eigen::MatrixXcd pairing() const;
    double pairing_defect() const;
};

// Closed form of <e^{-a t}, e^{-b t}> over (-T/2, T/2).
cplx exp_inner_product(cplx a, cplx b, double T);

double default_regularization(const Eigen::MatrixXcd& G);

inline constexpr double max_unregularized_condition = 1e14;

DualFamily dual_family_gram(const ModelParams& params, int N, double regularization,
                            bool apply_resonance_convention = true);

// Growth exponent of max_k |theta_m^k| against m, fitted on log-log axes.
double atom_growth_exponent(const DualFamily& family);

struct SummationCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

// coeffs aligned with family.family.
SummationCheck summation_inequality_check(std::span<const cplx> coeffs, const DualFamily& family);

}  // namespace memwave
