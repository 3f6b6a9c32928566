#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lyap {

/// Euler's constant.
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;
/// pi^2 / 6, the value of the trigamma function at 1.
inline constexpr double pi2_over_6 = 1.64493406684822643647241516664602519;

namespace detail {

// Below this argument the recurrence is used to shift upward.
inline constexpr double asymptotic_threshold = 10.0;

inline void require_positive(double x, const char* name)
{
    if (!std::isfinite(x) || !(x > 0.0)) {
        throw std::domain_error(std::string(name) + ": argument must be finite and > 0, got "
                                + std::to_string(x));
    }
}

} // namespace detail

/// Digamma function Psi(x) = Gamma'(x)/Gamma(x) for x > 0.
///
/// Shifts the argument above 10 with Psi(x) = Psi(x+1) - 1/x and then sums the
/// asymptotic Bernoulli series. Absolute error is a few ulps of max(1, |Psi(x)|).
inline double digamma(double x)
{
    detail::require_positive(x, "digamma");
    double shift = 0.0;
    while (x < detail::asymptotic_threshold) {
        shift += 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    // B_{2n} / (2n) for n = 1..7
    const double series =
        inv2 * (1.0 / 12
        - inv2 * (1.0 / 120
        - inv2 * (1.0 / 252
        - inv2 * (1.0 / 240
        - inv2 * (1.0 / 132
        - inv2 * (691.0 / 32760
        - inv2 * (1.0 / 12)))))));
    return std::log(x) - 0.5 / x - series - shift;
}

/// Trigamma function Psi'(x) for x > 0.
inline double trigamma(double x)
{
    detail::require_positive(x, "trigamma");
    double shift = 0.0;
    while (x < detail::asymptotic_threshold) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // B_{2n} / x^{2n+1} for n = 1..7
    const double series =
        inv * inv2 * (1.0 / 6
        - inv2 * (1.0 / 30
        - inv2 * (1.0 / 42
        - inv2 * (1.0 / 30
        - inv2 * (5.0 / 66
        - inv2 * (691.0 / 2730
        - inv2 * (7.0 / 6)))))));
    return shift + inv + 0.5 * inv2 + series;
}

/// Generalized harmonic number sum_{s=1}^{m} 1/s^order, for order 1 or 2.
inline double harmonic(int m, int order)
{
    if (m < 0) {
        throw std::domain_error("harmonic: m must be >= 0");
    }
    if (order != 1 && order != 2) {
        throw std::invalid_argument("harmonic: order must be 1 or 2");
    }
    double sum = 0.0;
    // smallest terms first
    for (int s = m; s >= 1; --s) {
        const double ds = static_cast<double>(s);
        sum += order == 1 ? 1.0 / ds : 1.0 / (ds * ds);
    }
    return sum;
}

} // namespace lyap
