#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lyap {

/// Streaming count / mean / sum of squared deviations (Welford), mergeable.
struct RunningMoments {
    long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningMoments& other)
    {
        if (other.count == 0) {
            return;
        }
        if (count == 0) {
            *this = other;
            return;
        }
        const double n_a = static_cast<double>(count);
        const double n_b = static_cast<double>(other.count);
        const double n = n_a + n_b;
        const double delta = other.mean - mean;
        mean += delta * n_b / n;
        m2 += other.m2 + delta * delta * n_a * n_b / n;
        count += other.count;
    }

    /// Unbiased sample variance (divisor count - 1); 0 for fewer than two samples.
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

/// Mean, per-sample variance and standard error of the mean for samples split
/// into classes with fixed nominal proportions. Classes are combined with the
/// nominal weights (renormalized over classes that were observed), so the
/// spread between class means does not enter the variance.
struct StratifiedSummary {
    double mean = 0.0;
    double variance = 0.0;
    double standard_error = 0.0;
};

inline StratifiedSummary stratified_summary(std::span<const RunningMoments> strata,
                                            std::span<const double> weights)
{
    if (strata.size() != weights.size()) {
        throw std::invalid_argument("stratified_summary: size mismatch");
    }
    double total_weight = 0.0;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        if (strata[s].count > 0) {
            total_weight += weights[s];
        }
    }
    if (!(total_weight > 0.0)) {
        throw std::runtime_error("stratified_summary: no samples");
    }
    StratifiedSummary out;
    double se2 = 0.0;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        if (strata[s].count == 0) {
            continue;
        }
        const double w = weights[s] / total_weight;
        const double var = strata[s].variance();
        out.mean += w * strata[s].mean;
        out.variance += w * var;
        se2 += w * w * var / static_cast<double>(strata[s].count);
    }
    out.standard_error = std::sqrt(se2);
    return out;
}

struct TestResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// Jarque-Bera normality test; the statistic is asymptotically chi-square with
/// two degrees of freedom, whose survival function is exp(-x/2).
inline TestResult jarque_bera(std::span<const double> xs)
{
    const double n = static_cast<double>(xs.size());
    if (xs.size() < 8) {
        throw std::invalid_argument("jarque_bera: need at least 8 samples");
    }
    double mean = 0.0;
    for (double x : xs) {
        mean += x;
    }
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double c = x - mean;
        const double c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double skew = m3 / std::pow(m2, 1.5);
    const double excess = m4 / (m2 * m2) - 3.0;
    const double jb = n / 6.0 * (skew * skew + 0.25 * excess * excess);
    return TestResult{jb, std::exp(-0.5 * jb)};
}

/// Kolmogorov survival function P(K > lambda).
inline double kolmogorov_survival(double lambda)
{
    if (lambda < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-17) {
            break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
template <class Cdf>
TestResult ks_test(std::vector<double> xs, Cdf cdf)
{
    if (xs.empty()) {
        throw std::invalid_argument("ks_test: no samples");
    }
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double sqrt_n = std::sqrt(n);
    // Stephens' small-sample correction.
    return TestResult{d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

/// Sum with Neumaier compensation.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            correction_ += (sum_ - t) + x;
        } else {
            correction_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + correction_; }

private:
    double sum_ = 0.0;
    double correction_ = 0.0;
};

} // namespace lyap
