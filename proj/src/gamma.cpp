#include <cmath>
#include <numbers>

#include "geoflow/error.hpp"
#include "geoflow/specfun.hpp"

namespace geoflow::specfun {

namespace {

// B_2, B_4, ..., B_20
constexpr double bernoulli[] = {1.0 / 6.0,       -1.0 / 30.0,     1.0 / 42.0,
                                -1.0 / 30.0,     5.0 / 66.0,      -691.0 / 2730.0,
                                7.0 / 6.0,       -3617.0 / 510.0, 43867.0 / 798.0,
                                -174611.0 / 330.0};

constexpr double asymptotic_start = 16.0;

bool is_pole(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

}  // namespace

cplx log_gamma(cplx z) {
    if (is_pole(z)) throw PoleError("log_gamma pole", z);
    cplx shift_sum = 0.0;
    while (z.real() < asymptotic_start) {
        shift_sum += std::log(z);
        z += 1.0;
    }
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx power = inv;
    for (int k = 1; k <= 10; ++k) {
        series += bernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * power;
        power *= inv2;
    }
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    return (z - 0.5) * std::log(z) - z + half_log_2pi + series - shift_sum;
}

cplx digamma(cplx z) {
    if (is_pole(z)) throw PoleError("digamma pole", z);
    cplx shift_sum = 0.0;
    while (z.real() < asymptotic_start) {
        shift_sum += 1.0 / z;
        z += 1.0;
    }
    const cplx inv = 1.0 / z;
    const cplx inv2 = inv * inv;
    cplx series = 0.0;
    cplx power = inv2;
    for (int k = 1; k <= 10; ++k) {
        series += bernoulli[k - 1] / (2.0 * k) * power;
        power *= inv2;
    }
    return std::log(z) - 0.5 * inv - series - shift_sum;
}

}  // namespace geoflow::specfun
