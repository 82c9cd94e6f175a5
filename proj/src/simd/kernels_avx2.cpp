#include "memwave/simd.hpp"

#include <immintrin.h>

namespace memwave::simd::avx2 {

namespace {

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }

inline cplx hsum2(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return {_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
}

// Lane-wise complex product of two packed pairs.
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

}  // namespace

cplx dot(const cplx* a, const cplx* b, std::size_t n) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d va = load2(a + k);
        const __m256d vb = load2(b + k);
        acc_re = _mm256_fmadd_pd(va, _mm256_movedup_pd(vb), acc_re);
        acc_im = _mm256_fmadd_pd(_mm256_permute_pd(va, 0x5), _mm256_permute_pd(vb, 0xF), acc_im);
    }
    cplx s = hsum2(_mm256_addsub_pd(acc_re, acc_im));
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d va = load2(a + k);
        const __m256d vb = load2(b + k);
        acc_re = _mm256_fmadd_pd(va, _mm256_movedup_pd(vb), acc_re);
        acc_im = _mm256_fmadd_pd(_mm256_permute_pd(va, 0x5), _mm256_permute_pd(vb, 0xF), acc_im);
    }
    const __m256d neg = _mm256_sub_pd(_mm256_setzero_pd(), acc_im);
    cplx s = hsum2(_mm256_addsub_pd(acc_re, neg));
    for (; k < n; ++k) s += a[k] * std::conj(b[k]);
    return s;
}

double weighted_norm2(const double* w, const cplx* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const __m256d va = load2(a + k);
        const __m128d w2 = _mm_loadu_pd(w + k);
        // (w0, w0, w1, w1)
        const __m256d vw = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
        acc = _mm256_fmadd_pd(vw, _mm256_mul_pd(va, va), acc);
    }
    const cplx h = hsum2(acc);
    double s = h.real() + h.imag();
    for (; k < n; ++k) s += w[k] * std::norm(a[k]);
    return s;
}

ScaledComplex product_one_plus(cplx z, const cplx* w, std::size_t n) {
    // Two registers give four independent partial products.
    const __m256d vz = _mm256_setr_pd(z.real(), z.imag(), z.real(), z.imag());
    const __m256d one = _mm256_setr_pd(1.0, 0.0, 1.0, 0.0);
    __m256d p0 = one;
    __m256d p1 = one;
    ScaledComplex parts[4];
    std::size_t k = 0;
    std::size_t block = 0;
    for (; k + 4 <= n; k += 4) {
        p0 = cmul(p0, _mm256_add_pd(one, cmul(vz, load2(w + k))));
        p1 = cmul(p1, _mm256_add_pd(one, cmul(vz, load2(w + k + 2))));
        if (++block == 4) {
            block = 0;
            alignas(32) double buf[8];
            _mm256_store_pd(buf, p0);
            _mm256_store_pd(buf + 4, p1);
            for (int q = 0; q < 4; ++q) {
                parts[q].mantissa = {buf[2 * q], buf[2 * q + 1]};
                parts[q].normalize();
                buf[2 * q] = parts[q].mantissa.real();
                buf[2 * q + 1] = parts[q].mantissa.imag();
            }
            p0 = _mm256_load_pd(buf);
            p1 = _mm256_load_pd(buf + 4);
        }
    }
    alignas(32) double buf[8];
    _mm256_store_pd(buf, p0);
    _mm256_store_pd(buf + 4, p1);
    ScaledComplex acc;
    for (int q = 0; q < 4; ++q) {
        parts[q].mantissa = {buf[2 * q], buf[2 * q + 1]};
        acc *= parts[q];
    }
    for (; k < n; ++k) {
        const cplx zw = z * w[k];
        acc *= cplx(1.0 + zw.real(), zw.imag());
    }
    acc.normalize();
    return acc;
}

}  // namespace memwave::simd::avx2
