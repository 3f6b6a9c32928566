#pragma once

// Closed-form Lyapunov spectra and N-scaled variances for Gaussian,
// rectangular Gaussian, Gaussian/inverse-Gaussian mixtures and truncated
// Haar unitary factors. Index i runs 1..d in the formulas; storage is
// 0-based in descending order of mu.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "beta.hpp"
#include "specfun.hpp"

namespace lyap {

struct TheorySpectrum {
    Beta beta = Beta::complex;
    int d = 0;
    std::vector<double> mu;        // descending
    std::vector<double> n_sigma2;  // N * sigma_i^2
    // Set for truncated unitary factors with 0 < n < d, where the formulas are
    // extrapolated beyond the regime in which they are proved.
    bool beyond_proved_regime = false;
};

/// One factor shape of a rectangular product: output dimension d + offset,
/// occurring with long-run frequency `proportion`.
struct RectangularShape {
    int offset = 0;
    double proportion = 1.0;
};

struct RectangularSpec {
    std::vector<RectangularShape> shapes;
};

struct MixtureSpec {
    double alpha_plus = 1.0;
    double alpha_minus = 0.0;
};

inline constexpr double proportion_tolerance = 1e-12;

inline void validate(const RectangularSpec& spec)
{
    if (spec.shapes.empty()) {
        throw std::invalid_argument("rectangular spec: no shapes");
    }
    double total = 0.0;
    for (std::size_t a = 0; a < spec.shapes.size(); ++a) {
        const auto& s = spec.shapes[a];
        if (s.offset < 0) {
            throw std::invalid_argument("rectangular spec: offsets must be >= 0");
        }
        if (!(s.proportion > 0.0) || !std::isfinite(s.proportion)) {
            throw std::invalid_argument("rectangular spec: proportions must be positive");
        }
        for (std::size_t b = 0; b < a; ++b) {
            if (spec.shapes[b].offset == s.offset) {
                throw std::invalid_argument("rectangular spec: offsets must be distinct");
            }
        }
        total += s.proportion;
    }
    if (std::abs(total - 1.0) > proportion_tolerance) {
        throw std::invalid_argument("rectangular spec: proportions must sum to 1");
    }
}

inline void validate(const MixtureSpec& mix)
{
    const auto in_unit = [](double a) { return a >= 0.0 && a <= 1.0; };
    if (!in_unit(mix.alpha_plus) || !in_unit(mix.alpha_minus)
        || std::abs(mix.alpha_plus + mix.alpha_minus - 1.0) > proportion_tolerance) {
        throw std::invalid_argument("mixture spec: proportions must lie in [0,1] and sum to 1");
    }
}

inline MixtureSpec mixture_from_alpha_plus(double alpha_plus)
{
    MixtureSpec mix{alpha_plus, 1.0 - alpha_plus};
    validate(mix);
    return mix;
}

namespace detail {

inline void require_dimension(int d)
{
    if (d < 1) {
        throw std::invalid_argument("dimension d must be >= 1");
    }
}

// Shapes sorted by offset so that the weighted sums do not depend on input order.
inline std::vector<RectangularShape> canonical_shapes(const RectangularSpec& spec)
{
    auto shapes = spec.shapes;
    std::sort(shapes.begin(), shapes.end(),
              [](const auto& a, const auto& b) { return a.offset < b.offset; });
    return shapes;
}

} // namespace detail

/// Spectrum of products of rectangular Gaussian factors whose output dimension
/// d + gamma_s occurs with frequency alpha_s.
inline TheorySpectrum rectangular_spectrum(Beta beta, int d, const RectangularSpec& spec)
{
    detail::require_dimension(d);
    validate(spec);
    const auto shapes = detail::canonical_shapes(spec);
    const double hb = half_beta(beta);
    const double log_scale = 0.5 * std::log(2.0 / value(beta));

    TheorySpectrum out{beta, d, {}, {}, false};
    out.mu.reserve(d);
    out.n_sigma2.reserve(d);
    for (int i = 1; i <= d; ++i) {
        double psi = 0.0;
        double psi1 = 0.0;
        for (const auto& s : shapes) {
            const double arg = hb * static_cast<double>(s.offset + d - i + 1);
            psi += s.proportion * digamma(arg);
            psi1 += s.proportion * trigamma(arg);
        }
        out.mu.push_back(log_scale + 0.5 * psi);
        out.n_sigma2.push_back(0.25 * psi1);
    }
    return out;
}

/// Spectrum of products of d x d standard Gaussian factors.
inline TheorySpectrum gaussian_spectrum(Beta beta, int d)
{
    return rectangular_spectrum(beta, d, RectangularSpec{{{0, 1.0}}});
}

/// Products with a proportion alpha_plus of Gaussian and alpha_minus of
/// inverse Gaussian factors.
inline TheorySpectrum mixture_spectrum(Beta beta, int d, const MixtureSpec& mix)
{
    validate(mix);
    const TheorySpectrum plus = gaussian_spectrum(beta, d);
    TheorySpectrum out{beta, d, std::vector<double>(d), std::vector<double>(d), false};
    for (int i = 0; i < d; ++i) {
        const int mirror = d - 1 - i;
        out.mu[i] = mix.alpha_plus * plus.mu[i] - mix.alpha_minus * plus.mu[mirror];
        out.n_sigma2[i] = mix.alpha_plus * plus.n_sigma2[i] + mix.alpha_minus * plus.n_sigma2[mirror];
    }
    return out;
}

/// Top-left d x d blocks of (d+n) x (d+n) Haar unitary matrices.
inline TheorySpectrum truncated_unitary_spectrum(Beta beta, int d, int n)
{
    detail::require_dimension(d);
    if (n < 0) {
        throw std::invalid_argument("truncation n must be >= 0");
    }
    const double hb = half_beta(beta);
    TheorySpectrum out{beta, d, {}, {}, n > 0 && n < d};
    out.mu.reserve(d);
    out.n_sigma2.reserve(d);
    for (int i = 1; i <= d; ++i) {
        const double lo = hb * static_cast<double>(d - i + 1);
        const double hi = hb * static_cast<double>(n + d - i + 1);
        if (n == 0) {
            out.mu.push_back(0.0);
            out.n_sigma2.push_back(0.0);
            continue;
        }
        out.mu.push_back(0.5 * (digamma(lo) - digamma(hi)));
        out.n_sigma2.push_back(0.25 * (trigamma(lo) - trigamma(hi)));
    }
    return out;
}

} // namespace lyap
