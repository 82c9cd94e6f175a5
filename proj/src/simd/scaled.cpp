#include "memwave/simd.hpp"

#include <algorithm>
#include <cmath>

namespace memwave::simd {

void ScaledComplex::normalize() {
    const double m = std::max(std::abs(mantissa.real()), std::abs(mantissa.imag()));
    if (m == 0.0 || !std::isfinite(m)) return;
    int e = 0;
    std::frexp(m, &e);
    mantissa = {std::ldexp(mantissa.real(), -e), std::ldexp(mantissa.imag(), -e)};
    exponent += e;
}

double ScaledComplex::log_abs() const {
    return std::log(std::abs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

cplx ScaledComplex::value() const {
    const int e = static_cast<int>(std::clamp<std::int64_t>(exponent, -100000, 100000));
    return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
}

ScaledComplex& ScaledComplex::operator*=(const ScaledComplex& o) {
    mantissa *= o.mantissa;
    exponent += o.exponent;
    normalize();
    return *this;
}

ScaledComplex& ScaledComplex::operator*=(cplx f) {
    mantissa *= f;
    normalize();
    return *this;
}

}  // namespace memwave::simd
