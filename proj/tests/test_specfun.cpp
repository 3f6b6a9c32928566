#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <gtest/gtest.h>

#include "lyapunov/specfun.hpp"

using namespace lyap;

namespace {

constexpr double ln2 = std::numbers::ln2;
constexpr double pi = std::numbers::pi;

// Psi(1) = -gamma through the slowly converging series
// gamma = lim (H_n - ln n), with the Euler-Maclaurin tail 1/(2n) - 1/(12 n^2).
double euler_gamma_by_series()
{
    const int n = 1000000;
    long double h = 0.0L;
    for (int s = n; s >= 1; --s) {
        h += 1.0L / s;
    }
    const long double nn = n;
    return static_cast<double>(h - std::log(nn) - 1.0L / (2 * nn) + 1.0L / (12 * nn * nn));
}

} // namespace

TEST(Digamma, KnownValues)
{
    EXPECT_NEAR(digamma(1.0), -euler_gamma, 1e-13);
    EXPECT_NEAR(digamma(1.0), -euler_gamma_by_series(), 1e-12);
    EXPECT_NEAR(digamma(0.5), -euler_gamma - 2.0 * ln2, 1e-13);
    EXPECT_NEAR(digamma(0.5), -1.96351002602142, 1e-13);
    EXPECT_NEAR(digamma(2.0), 1.0 - euler_gamma, 1e-13);
}

TEST(Digamma, MatchesIndependentImplementation)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1e-3, 200.0);
    for (int t = 0; t < 2000; ++t) {
        const double x = u(rng);
        const double ref = boost::math::digamma(x);
        EXPECT_NEAR(digamma(x), ref, 1e-13 * std::max(1.0, std::abs(ref))) << x;
    }
}

TEST(Digamma, RecurrenceResidual)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int t = 0; t < 10000; ++t) {
        double x = u(rng);
        if (x == 0.0) {
            continue;
        }
        const double residual = digamma(x + 1.0) - digamma(x) - 1.0 / x;
        // Psi(x) ~ -1/x for tiny x; the residual is bounded by rounding of that size.
        EXPECT_LE(std::abs(residual), 1e-13 * std::max(1.0, 1.0 / x)) << x;
    }
}

TEST(Digamma, IntegerArgumentsAreHarmonicNumbers)
{
    for (int m = 1; m <= 30; ++m) {
        EXPECT_NEAR(digamma(m), -euler_gamma + harmonic(m - 1, 1), 1e-12) << m;
    }
}

TEST(Digamma, DomainErrors)
{
    EXPECT_THROW(digamma(0.0), std::domain_error);
    EXPECT_THROW(digamma(-1.5), std::domain_error);
    EXPECT_THROW(digamma(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    EXPECT_THROW(digamma(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST(Trigamma, KnownValues)
{
    EXPECT_NEAR(trigamma(1.0), pi * pi / 6.0, 1e-12);
    EXPECT_NEAR(trigamma(2.0), pi * pi / 6.0 - 1.0, 1e-12);
    EXPECT_NEAR(trigamma(0.5), pi * pi / 2.0, 1e-12);
    EXPECT_DOUBLE_EQ(pi2_over_6, pi * pi / 6.0);
}

TEST(Trigamma, RecurrenceAndReference)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.01, 50.0);
    for (int t = 0; t < 5000; ++t) {
        const double x = u(rng);
        const double residual = trigamma(x + 1.0) - trigamma(x) + 1.0 / (x * x);
        EXPECT_LE(std::abs(residual), 1e-12 * std::max(1.0, 1.0 / (x * x))) << x;
        const double ref = boost::math::trigamma(x);
        EXPECT_NEAR(trigamma(x), ref, 1e-13 * std::max(1.0, ref)) << x;
    }
    for (int m = 1; m <= 30; ++m) {
        EXPECT_NEAR(trigamma(m), pi2_over_6 - harmonic(m - 1, 2), 1e-12) << m;
    }
    EXPECT_THROW(trigamma(0.0), std::domain_error);
}

TEST(Harmonic, SmallCases)
{
    EXPECT_EQ(harmonic(0, 1), 0.0);
    EXPECT_EQ(harmonic(0, 2), 0.0);
    EXPECT_NEAR(harmonic(3, 1), 11.0 / 6.0, 1e-15);
    EXPECT_NEAR(harmonic(2, 2), 5.0 / 4.0, 1e-15);
    EXPECT_THROW(harmonic(-1, 1), std::domain_error);
    EXPECT_THROW(harmonic(3, 3), std::invalid_argument);
}
