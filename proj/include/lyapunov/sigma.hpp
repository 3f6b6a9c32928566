#pragma once

// Lyapunov data for Gaussian factors with a general covariance,
// A = Sigma^{1/2} G, described by the eigenvalues y_1..y_d of Sigma^{-1}.
//
// Two independent routes are provided for the top exponent and its variance:
// the determinant (Vandermonde) formulas valid for complex entries, and the
// real-integral route through J1, J2 valid for beta = 1, 2, 4.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beta.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace lyap {

struct SigmaSpec {
    std::vector<double> y;  // eigenvalues of Sigma^{-1}
};

/// Relative separation below which two eigenvalues count as coincident.
inline constexpr double distinctness_tolerance = 1e-8;

inline void validate(const SigmaSpec& spec)
{
    if (spec.y.empty()) {
        throw std::invalid_argument("sigma spec: no eigenvalues");
    }
    for (double v : spec.y) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw std::invalid_argument("sigma spec: eigenvalues must be finite and positive");
        }
    }
}

inline void require_distinct(const SigmaSpec& spec)
{
    validate(spec);
    const auto& y = spec.y;
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            if (std::abs(y[i] - y[j]) / std::max(y[i], y[j]) <= distinctness_tolerance) {
                throw std::domain_error("sigma spec: eigenvalues " + std::to_string(y[i]) + " and "
                                        + std::to_string(y[j])
                                        + " are not distinct; the determinant formulas need "
                                          "distinct eigenvalues");
            }
        }
    }
}

namespace detail {

// y / max(y); the spectra shift by -1/2 log(scale) under y -> scale * y.
struct NormalizedSigma {
    std::vector<double> y;
    double log_scale;
};

inline NormalizedSigma normalize(const SigmaSpec& spec)
{
    const double scale = *std::max_element(spec.y.begin(), spec.y.end());
    NormalizedSigma out{spec.y, std::log(scale)};
    for (double& v : out.y) {
        v /= scale;
    }
    return out;
}

// Sum_j f(y_j) / prod_{l != j} (1 - y_j / y_l); the weights sum to one.
template <class F>
double cofactor_sum(const std::vector<double>& y, F f)
{
    double sum = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        double denom = 1.0;
        for (std::size_t l = 0; l < y.size(); ++l) {
            if (l != j) {
                denom *= 1.0 - y[j] / y[l];
            }
        }
        sum += f(y[j]) / denom;
    }
    return sum;
}

} // namespace detail

/// Full Lyapunov spectrum mu_1..mu_d for complex Gaussian factors with covariance
/// Sigma. k = 1 uses the explicit cofactor expansion; k >= 2 the ratio of the
/// modified Vandermonde determinant to the Vandermonde determinant, obtained by
/// Cramer's rule from a fully pivoted LU factorization.
inline std::vector<double> sigma_spectrum_complex(const SigmaSpec& spec)
{
    require_distinct(spec);
    const auto norm = detail::normalize(spec);
    const auto& y = norm.y;
    const int d = static_cast<int>(y.size());

    std::vector<double> mu(d);
    mu[0] = -0.5 * detail::cofactor_sum(y, [](double v) { return std::log(v); })
            + 0.5 * digamma(1.0) - 0.5 * norm.log_scale;
    if (d == 1) {
        return mu;
    }

    // Row i of the Vandermonde matrix holds y_j^i.
    Eigen::MatrixXd vandermonde(d, d);
    Eigen::MatrixXd replaced_rows(d, d);  // column k: log(y_j) y_j^k
    for (int j = 0; j < d; ++j) {
        double power = 1.0;
        for (int i = 0; i < d; ++i) {
            vandermonde(i, j) = power;
            replaced_rows(j, i) = std::log(y[j]) * power;
            power *= y[j];
        }
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(vandermonde.transpose());
    const Eigen::MatrixXd ratios = lu.solve(replaced_rows);
    for (int k = 1; k < d; ++k) {
        mu[k] = -0.5 * ratios(k, k) + 0.5 * digamma(static_cast<double>(k + 1))
                - 0.5 * norm.log_scale;
    }
    return mu;
}

/// N * sigma_1^2 for complex Gaussian factors with covariance Sigma.
inline double sigma_variance1_complex(const SigmaSpec& spec)
{
    require_distinct(spec);
    // Invariant under y -> c y; normalizing keeps the logs small.
    const auto y = detail::normalize(spec).y;
    const double first = detail::cofactor_sum(y, [](double v) { return std::log(v); });
    const double second = detail::cofactor_sum(y, [](double v) {
        const double l = std::log(v);
        return l * l;
    });
    return 0.25 * (trigamma(1.0) + second - first * first);
}

struct JPair {
    enum class Method { quadrature, residue };
    double J1 = 0.0;
    double J2 = 0.0;
    Method method = Method::quadrature;
    double error = 0.0;  // summed quadrature error estimate (0 for residue sums)
};

/// J1 and J2 as real integrals. The range is split at x = 1; the tail is mapped
/// to s in (0, 1] by x = 1 / s^2, which turns the algebraic decay x^{-beta d / 2}
/// into the bounded factor s^{beta d - 1}.
inline JPair j_integrals(Beta beta, const SigmaSpec& spec, QuadratureOptions opts = {})
{
    validate(spec);
    const double hb = half_beta(beta);
    const auto& y = spec.y;
    const auto log_product = [&](double x) {
        double s = 0.0;
        for (double v : y) {
            s -= hb * std::log1p(x / v);
        }
        return s;
    };
    // log of prod (1 + 1/(s^2 y))^{-beta/2} / s, written to stay finite as s -> 0.
    const double power = 2.0 * hb * static_cast<double>(y.size()) - 1.0;
    double log_y_sum = 0.0;
    for (double v : y) {
        log_y_sum += std::log(v);
    }
    const auto log_tail = [&](double s) {
        double acc = hb * log_y_sum + power * std::log(s);
        for (double v : y) {
            acc -= hb * std::log1p(s * s * v);
        }
        return acc;
    };
    // (1 - prod) / x on (0, 1], finite as x -> 0.
    const auto head = [&](double x) { return -std::expm1(log_product(x)) / x; };

    const auto j1_head = integrate_adaptive(head, 0.0, 1.0, opts);
    const auto j1_tail = integrate_adaptive([&](double s) { return 2.0 * std::exp(log_tail(s)); }, 0.0, 1.0, opts);
    const auto j2_head = integrate_adaptive(
        [&](double x) { return head(x) * std::log(x); }, 0.0, 1.0, opts);
    const auto j2_tail = integrate_adaptive(
        [&](double s) { return -4.0 * std::exp(log_tail(s)) * std::log(s); }, 0.0, 1.0, opts);

    JPair out;
    out.method = JPair::Method::quadrature;
    out.J1 = -j1_head.value + j1_tail.value;
    out.J2 = 2.0 * (j2_head.value - j2_tail.value) + 2.0 * pi2_over_6;
    out.error = j1_head.error + j1_tail.error + 2.0 * (j2_head.error + j2_tail.error);
    return out;
}

/// Closed forms of J1, J2 at Sigma = identity, available when beta*d/2 is a
/// positive integer m: -J1 = H_{m-1}, -J2 = sum_{s=2}^{m-1} (2/s) H_{s-1}.
inline JPair residue_j_sums(Beta beta, int d)
{
    if (d < 1) {
        throw std::invalid_argument("residue_j_sums: d must be >= 1");
    }
    const int twice_m = value(beta) * d;
    if (twice_m % 2 != 0) {
        throw std::domain_error("residue_j_sums: beta*d/2 must be a positive integer");
    }
    const int m = twice_m / 2;
    double alpha_sum = 0.0;
    for (int s = m - 1; s >= 2; --s) {
        alpha_sum += 2.0 / s * harmonic(s - 1, 1);
    }
    return JPair{-harmonic(m - 1, 1), -alpha_sum, JPair::Method::residue, 0.0};
}

/// Largest Lyapunov exponent for A = Sigma^{1/2} G, any beta.
inline double kargin_mu1(Beta beta, const SigmaSpec& spec)
{
    const JPair j = j_integrals(beta, spec);
    return 0.5 * (-euler_gamma + std::log(2.0 / value(beta)) - j.J1);
}

/// N * sigma_1^2 for A = Sigma^{1/2} G, any beta.
inline double kargin_variance1(Beta beta, const SigmaSpec& spec)
{
    const JPair j = j_integrals(beta, spec);
    return 0.25 * (pi2_over_6 - j.J2 - j.J1 * j.J1);
}

} // namespace lyap
