#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace memwave {

// Engine output is fully specified by the standard; the conversions below are
// spelled out so that draws are identical across standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::complex<double> complex_normal() {
        const double re = normal();
        return {re, normal()};
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace memwave
