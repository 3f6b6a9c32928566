#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lyapunov/sigma.hpp"
#include "lyapunov/theory.hpp"

using namespace lyap;

namespace {

constexpr double ln2 = std::numbers::ln2;

// Log-uniform eigenvalues in [0.1, 10] with pairwise relative separation >= 10%.
SigmaSpec random_distinct_spec(std::mt19937_64& rng, int d)
{
    std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
    SigmaSpec spec;
    while (static_cast<int>(spec.y.size()) < d) {
        const double y = std::exp(u(rng));
        bool separated = true;
        for (double other : spec.y) {
            separated = separated && std::abs(y - other) / std::max(y, other) > 0.1;
        }
        if (separated) {
            spec.y.push_back(y);
        }
    }
    return spec;
}

SigmaSpec identity(int d) { return SigmaSpec{std::vector<double>(d, 1.0)}; }

} // namespace

TEST(SigmaSpectrumComplex, DiagonalExampleTopExponent)
{
    const auto mu = sigma_spectrum_complex(SigmaSpec{{1.0, 0.25}});
    ASSERT_EQ(mu.size(), 2u);
    EXPECT_NEAR(mu[0], 4.0 / 3.0 * ln2 - euler_gamma / 2.0, 1e-14);
    EXPECT_NEAR(mu[0], 0.63559, 1e-5);
    EXPECT_NEAR(mu[0], kargin_mu1(Beta::complex, SigmaSpec{{1.0, 0.25}}), 1e-9);
}

TEST(SigmaSpectrumComplex, ScalarAndSymmetry)
{
    for (double c : {0.3, 1.0, 7.5}) {
        const auto mu = sigma_spectrum_complex(SigmaSpec{{c}});
        EXPECT_NEAR(mu[0], -0.5 * std::log(c) - euler_gamma / 2.0, 1e-14);
    }
    EXPECT_EQ(sigma_spectrum_complex(SigmaSpec{{2.0, 3.0}}), sigma_spectrum_complex(SigmaSpec{{2.0, 3.0}}));
    const auto a = sigma_spectrum_complex(SigmaSpec{{2.0, 3.0}});
    const auto b = sigma_spectrum_complex(SigmaSpec{{3.0, 2.0}});
    for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(a[k], b[k], 1e-14);
    }
}

TEST(SigmaSpectrumComplex, CofactorAndLuRoutesAgreeForTopExponent)
{
    // mu_1 through the general LU route, rebuilt here from the determinants.
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto spec = random_distinct_spec(rng, 2 + trial % 4);
        const int d = static_cast<int>(spec.y.size());
        Eigen::MatrixXd v(d, d), m(d, d);
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < d; ++i) {
                v(i, j) = std::pow(spec.y[j], i);
                m(i, j) = i == 0 ? std::log(spec.y[j]) : v(i, j);
            }
        }
        const double mu1 = -0.5 * m.determinant() / v.determinant() - euler_gamma / 2.0;
        EXPECT_NEAR(sigma_spectrum_complex(spec)[0], mu1, 1e-9);
    }
}

TEST(SigmaSpectrumComplex, ConfluentLimitApproachesIdentityCovariance)
{
    const auto mu = sigma_spectrum_complex(SigmaSpec{{1.0, 1.0 + 1e-4}});
    const auto g = gaussian_spectrum(Beta::complex, 2);
    EXPECT_NEAR(mu[0], g.mu[0], 1e-3);
    EXPECT_NEAR(mu[1], g.mu[1], 1e-3);
}

TEST(SigmaSpectrumComplex, DistinctnessErrors)
{
    EXPECT_THROW(sigma_spectrum_complex(SigmaSpec{{1.0, 1.0}}), std::domain_error);
    EXPECT_THROW(sigma_spectrum_complex(SigmaSpec{{1.0, 1.0 + 1e-10}}), std::domain_error);
    EXPECT_THROW(sigma_spectrum_complex(SigmaSpec{}), std::invalid_argument);
    EXPECT_THROW(sigma_spectrum_complex(SigmaSpec{{1.0, -2.0}}), std::invalid_argument);
    EXPECT_THROW(sigma_variance1_complex(SigmaSpec{{2.0, 2.0}}), std::domain_error);
}

TEST(SigmaVariance1Complex, DiagonalExample)
{
    const double expected = std::numbers::pi * std::numbers::pi / 24.0 - 4.0 / 9.0 * ln2 * ln2;
    EXPECT_NEAR(sigma_variance1_complex(SigmaSpec{{1.0, 0.25}}), expected, 1e-14);
    EXPECT_NEAR(expected, 0.197699, 1e-6);
    EXPECT_NEAR(sigma_variance1_complex(SigmaSpec{{4.2}}), pi2_over_6 / 4.0, 1e-15);
    EXPECT_NEAR(sigma_variance1_complex(SigmaSpec{{2.0, 5.0}}), sigma_variance1_complex(SigmaSpec{{5.0, 2.0}}),
                1e-15);
}

TEST(SigmaRoutes, ScaleCovariance)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> log_c(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto spec = random_distinct_spec(rng, 1 + trial % 5);
        const double c = std::exp(log_c(rng));
        SigmaSpec scaled = spec;
        for (double& y : scaled.y) {
            y *= c;
        }
        const auto mu = sigma_spectrum_complex(spec);
        const auto mu_scaled = sigma_spectrum_complex(scaled);
        for (std::size_t k = 0; k < mu.size(); ++k) {
            EXPECT_NEAR(mu_scaled[k], mu[k] - 0.5 * std::log(c), 1e-9);
        }
        EXPECT_NEAR(sigma_variance1_complex(scaled), sigma_variance1_complex(spec), 1e-9);
        if (trial % 10 == 0) {
            const Beta b = trial % 20 == 0 ? Beta::real : Beta::quaternion;
            EXPECT_NEAR(kargin_mu1(b, scaled), kargin_mu1(b, spec) - 0.5 * std::log(c), 1e-9);
            EXPECT_NEAR(kargin_variance1(b, scaled), kargin_variance1(b, spec), 1e-9);
        }
    }
}

TEST(SigmaRoutes, DeterminantAndIntegralRoutesAgree)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto spec = random_distinct_spec(rng, 1 + trial % 5);
        EXPECT_NEAR(kargin_mu1(Beta::complex, spec), sigma_spectrum_complex(spec)[0], 1e-8);
        EXPECT_NEAR(kargin_variance1(Beta::complex, spec), sigma_variance1_complex(spec), 1e-8);
    }
}

TEST(JIntegrals, IdentityCovarianceExamples)
{
    const auto two = j_integrals(Beta::complex, identity(2));
    EXPECT_NEAR(two.J1, -1.0, 1e-10);
    EXPECT_NEAR(two.J2, 0.0, 1e-10);
    EXPECT_LE(two.error, 1e-9);
    const auto three = j_integrals(Beta::complex, identity(3));
    EXPECT_NEAR(three.J1, -1.5, 1e-10);
    EXPECT_NEAR(three.J2, -1.0, 1e-10);
    const auto real = j_integrals(Beta::real, identity(2));
    EXPECT_NEAR(real.J1, 0.0, 1e-10);
    EXPECT_NEAR(real.J2, 0.0, 1e-10);
}

TEST(JIntegrals, MatchResidueSumsWheneverDefined)
{
    for (Beta b : {Beta::real, Beta::complex, Beta::quaternion}) {
        for (int d = 1; d <= 10; ++d) {
            if ((value(b) * d) % 2 != 0) {
                EXPECT_THROW(residue_j_sums(b, d), std::domain_error);
                continue;
            }
            const auto quad = j_integrals(b, identity(d));
            const auto res = residue_j_sums(b, d);
            EXPECT_EQ(res.method, JPair::Method::residue);
            EXPECT_NEAR(quad.J1, res.J1, 1e-8) << value(b) << " " << d;
            EXPECT_NEAR(quad.J2, res.J2, 1e-8) << value(b) << " " << d;
        }
    }
}

TEST(ResidueJSums, Examples)
{
    auto r = residue_j_sums(Beta::complex, 2);
    EXPECT_DOUBLE_EQ(r.J1, -1.0);
    EXPECT_DOUBLE_EQ(r.J2, 0.0);
    r = residue_j_sums(Beta::complex, 3);
    EXPECT_DOUBLE_EQ(r.J1, -1.5);
    EXPECT_DOUBLE_EQ(r.J2, -1.0);
    r = residue_j_sums(Beta::quaternion, 1);
    EXPECT_DOUBLE_EQ(r.J1, -1.0);
    EXPECT_DOUBLE_EQ(r.J2, 0.0);
    EXPECT_THROW(residue_j_sums(Beta::real, 3), std::domain_error);
    EXPECT_THROW(residue_j_sums(Beta::real, 0), std::invalid_argument);
}

TEST(Kargin, IdentityCovarianceReproducesGaussianTopExponent)
{
    for (int d = 1; d <= 6; ++d) {
        EXPECT_NEAR(kargin_mu1(Beta::complex, identity(d)), 0.5 * digamma(d), 1e-9);
    }
    EXPECT_NEAR(kargin_mu1(Beta::real, identity(2)), 0.5 * (-euler_gamma + ln2), 1e-9);
    EXPECT_NEAR(kargin_variance1(Beta::complex, identity(3)), 0.25 * (pi2_over_6 - 1.25), 1e-9);
    EXPECT_NEAR(kargin_variance1(Beta::complex, identity(3)), 0.25 * trigamma(3.0), 1e-9);
    EXPECT_NEAR(kargin_variance1(Beta::quaternion, identity(1)), 0.25 * trigamma(2.0), 1e-9);
    for (Beta b : {Beta::real, Beta::complex, Beta::quaternion}) {
        for (int d = 1; d <= 5; ++d) {
            const auto g = gaussian_spectrum(b, d);
            EXPECT_NEAR(kargin_mu1(b, identity(d)), g.mu[0], 1e-9);
            EXPECT_NEAR(kargin_variance1(b, identity(d)), g.n_sigma2[0], 1e-9);
        }
    }
}

TEST(Kargin, DiagonalVarianceExample)
{
    EXPECT_NEAR(kargin_variance1(Beta::complex, SigmaSpec{{1.0, 0.25}}), 0.197699, 1e-6);
}

TEST(Quadrature, ReportsNonConvergence)
{
    QuadratureOptions tight;
    tight.abs_tol = 1e-30;
    tight.max_intervals = 20;
    try {
        j_integrals(Beta::complex, identity(2), tight);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_GT(e.error(), 0.0);
        EXPECT_TRUE(std::isfinite(e.estimate()));
    }
}
