#pragma once

// Globally adaptive Gauss-Kronrod (7/15 point) quadrature on a finite interval.
// The interval with the largest error estimate is bisected until the summed
// error estimate falls below the absolute tolerance.

#include <array>
#include <cmath>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace lyap {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : std::runtime_error(what + " (estimate " + std::to_string(estimate) + ", error "
                             + std::to_string(error) + ")"),
          estimate_(estimate), error_(error)
    {
    }
    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-11;
    int max_intervals = 5000;
};

namespace detail {

// Kronrod nodes on [0,1]; odd indices are the embedded Gauss nodes.
inline constexpr std::array<double, 8> gk15_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> k15_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> g7_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gk15(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * k15_weights[7];
    double gauss = fc * g7_weights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * gk15_nodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += k15_weights[j] * pair;
        if (j % 2 == 1) {
            gauss += g7_weights[j / 2] * pair;
        }
    }
    return Panel{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Integrates f over [a, b]. The integrand is never evaluated at the endpoints,
/// so integrable endpoint singularities are allowed.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, QuadratureOptions opts = {})
{
    std::vector<detail::Panel> panels{detail::gk15(f, a, b)};
    double value = panels.front().value;
    double error = panels.front().error;
    while (error > opts.abs_tol) {
        if (static_cast<int>(panels.size()) >= opts.max_intervals) {
            throw QuadratureError("adaptive quadrature did not converge", value, error);
        }
        std::pop_heap(panels.begin(), panels.end());
        const detail::Panel worst = panels.back();
        panels.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureError("adaptive quadrature exhausted interval resolution", value, error);
        }
        for (const auto& half : {detail::gk15(f, worst.a, mid), detail::gk15(f, mid, worst.b)}) {
            panels.push_back(half);
            std::push_heap(panels.begin(), panels.end());
        }
        // Re-sum rather than update incrementally so rounding does not accumulate.
        value = 0.0;
        error = 0.0;
        for (const auto& p : panels) {
            value += p.value;
            error += p.error;
        }
    }
    return QuadratureResult{value, error, static_cast<int>(panels.size())};
}

} // namespace lyap
