#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace memwave::simd {

using cplx = std::complex<double>;

// Complex number kept as mantissa * 2^exponent so that long products of
// factors neither overflow nor underflow.
struct ScaledComplex {
    cplx mantissa{1.0, 0.0};
    std::int64_t exponent = 0;

    double log_abs() const;
    cplx value() const;  // may overflow to inf
    ScaledComplex& operator*=(const ScaledComplex& o);
    ScaledComplex& operator*=(cplx f);
    void normalize();
};

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
// Returns the previous selection. Throws if the ISA is not available.
Isa set_isa(Isa isa);

// Sum of a_k b_k.
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
// Sum of a_k conj(b_k).
cplx dotc(std::span<const cplx> a, std::span<const cplx> b);
// Sum of w_k |a_k|^2.
double weighted_norm2(std::span<const double> w, std::span<const cplx> a);
// Product of (1 + z w_k).
ScaledComplex product_one_plus(cplx z, std::span<const cplx> w);

namespace scalar {
cplx dot(const cplx* a, const cplx* b, std::size_t n);
cplx dotc(const cplx* a, const cplx* b, std::size_t n);
double weighted_norm2(const double* w, const cplx* a, std::size_t n);
ScaledComplex product_one_plus(cplx z, const cplx* w, std::size_t n);
}  // namespace scalar

#if defined(MEMWAVE_HAVE_AVX2)
namespace avx2 {
cplx dot(const cplx* a, const cplx* b, std::size_t n);
cplx dotc(const cplx* a, const cplx* b, std::size_t n);
double weighted_norm2(const double* w, const cplx* a, std::size_t n);
ScaledComplex product_one_plus(cplx z, const cplx* w, std::size_t n);
}  // namespace avx2
#endif

}  // namespace memwave::simd
