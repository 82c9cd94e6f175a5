#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "memwave/simd.hpp"

namespace memwave::simd {

namespace {

Isa detect() {
    if (const char* env = std::getenv("MEMWAVE_SIMD")) {
        const std::string v(env);
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
    }
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& selection() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("simd kernel: operand lengths differ");
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
    if (isa == Isa::scalar) return true;
#if defined(MEMWAVE_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

Isa active_isa() { return selection().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) {
    if (!isa_available(isa)) throw std::invalid_argument("requested SIMD variant is not available on this CPU");
    return selection().exchange(isa);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    check_sizes(a.size(), b.size());
#if defined(MEMWAVE_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
    return scalar::dot(a.data(), b.data(), a.size());
}

cplx dotc(std::span<const cplx> a, std::span<const cplx> b) {
    check_sizes(a.size(), b.size());
#if defined(MEMWAVE_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::dotc(a.data(), b.data(), a.size());
#endif
    return scalar::dotc(a.data(), b.data(), a.size());
}

double weighted_norm2(std::span<const double> w, std::span<const cplx> a) {
    check_sizes(w.size(), a.size());
#if defined(MEMWAVE_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::weighted_norm2(w.data(), a.data(), a.size());
#endif
    return scalar::weighted_norm2(w.data(), a.data(), a.size());
}

ScaledComplex product_one_plus(cplx z, std::span<const cplx> w) {
#if defined(MEMWAVE_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::product_one_plus(z, w.data(), w.size());
#endif
    return scalar::product_one_plus(z, w.data(), w.size());
}

}  // namespace memwave::simd
