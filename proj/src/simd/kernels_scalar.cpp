#include "memwave/simd.hpp"

namespace memwave::simd::scalar {

cplx dot(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        re += a[k].real() * b[k].real() - a[k].imag() * b[k].imag();
        im += a[k].real() * b[k].imag() + a[k].imag() * b[k].real();
    }
    return {re, im};
}

cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
        im += a[k].imag() * b[k].real() - a[k].real() * b[k].imag();
    }
    return {re, im};
}

double weighted_norm2(const double* w, const cplx* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += w[k] * std::norm(a[k]);
    return s;
}

ScaledComplex product_one_plus(cplx z, const cplx* w, std::size_t n) {
    ScaledComplex acc;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx zw = z * w[k];
        acc.mantissa *= cplx(1.0 + zw.real(), zw.imag());
        if ((k & 15u) == 15u) acc.normalize();
    }
    acc.normalize();
    return acc;
}

}  // namespace memwave::simd::scalar
