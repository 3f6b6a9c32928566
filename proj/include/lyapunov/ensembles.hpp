#pragma once

// Seeded samplers for the factor ensembles of a random matrix product.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "beta.hpp"
#include "field_matrix.hpp"
#include "sigma.hpp"
#include "theory.hpp"

namespace lyap {

using Rng = std::mt19937_64;

struct StandardGaussian {
    Beta beta = Beta::complex;
    int d = 1;
};
struct GeneralSigmaGaussian {
    Beta beta = Beta::complex;
    SigmaSpec sigma;
};
struct InverseGaussian {
    Beta beta = Beta::complex;
    int d = 1;
};
struct GaussianInverseMixture {
    Beta beta = Beta::complex;
    int d = 1;
    double alpha_plus = 0.5;
};
struct RectangularGaussian {
    Beta beta = Beta::complex;
    int d = 1;
    RectangularSpec shapes;
};
struct TruncatedUnitary {
    Beta beta = Beta::complex;
    int d = 1;
    int n = 0;
};

using EnsembleSpec = std::variant<StandardGaussian, GeneralSigmaGaussian, InverseGaussian,
                                  GaussianInverseMixture, RectangularGaussian, TruncatedUnitary>;

inline Beta beta_of(const EnsembleSpec& spec)
{
    return std::visit([](const auto& e) { return e.beta; }, spec);
}

/// Dimension d of the square product (the frame dimension).
inline int dimension(const EnsembleSpec& spec)
{
    return std::visit(
        [](const auto& e) -> int {
            if constexpr (std::is_same_v<std::decay_t<decltype(e)>, GeneralSigmaGaussian>) {
                return static_cast<int>(e.sigma.y.size());
            } else {
                return e.d;
            }
        },
        spec);
}

inline void validate(const EnsembleSpec& spec)
{
    if (dimension(spec) < 1) {
        throw std::invalid_argument("ensemble: dimension must be >= 1");
    }
    std::visit(
        [](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, GeneralSigmaGaussian>) {
                validate(e.sigma);
            } else if constexpr (std::is_same_v<T, GaussianInverseMixture>) {
                validate(mixture_from_alpha_plus(e.alpha_plus));
            } else if constexpr (std::is_same_v<T, RectangularGaussian>) {
                validate(e.shapes);
            } else if constexpr (std::is_same_v<T, TruncatedUnitary>) {
                if (e.n < 0) {
                    throw std::invalid_argument("ensemble: truncation n must be >= 0");
                }
            }
        },
        spec);
}

/// Nominal long-run frequency of each factor class. Steps of different classes
/// have different increment distributions; estimators stratify on the class.
inline std::vector<double> stratum_weights(const EnsembleSpec& spec)
{
    if (const auto* mix = std::get_if<GaussianInverseMixture>(&spec)) {
        return {mix->alpha_plus, 1.0 - mix->alpha_plus};
    }
    if (const auto* rect = std::get_if<RectangularGaussian>(&spec)) {
        std::vector<double> w;
        for (const auto& s : detail::canonical_shapes(rect->shapes)) {
            w.push_back(s.proportion);
        }
        return w;
    }
    return {1.0};
}

inline bool has_square_factors(const EnsembleSpec& spec)
{
    if (const auto* rect = std::get_if<RectangularGaussian>(&spec)) {
        for (const auto& s : rect->shapes.shapes) {
            if (s.offset != 0) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Elementary samplers

/// Standard Gaussian matrix with density proportional to exp(-(beta/2) Tr G^+ G):
/// each entry has beta independent real components of variance 1/beta.
inline FieldMatrix sample_gaussian(Beta beta, int rows, int cols, Rng& rng)
{
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("sample_gaussian: dimensions must be >= 1");
    }
    std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / value(beta)));
    const int e = embedding_factor(beta);
    FieldMatrix g{beta, Eigen::MatrixXcd(e * rows, e * cols)};
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            switch (beta) {
            case Beta::real:
                g.data(i, j) = Complex(normal(rng), 0.0);
                break;
            case Beta::complex: {
                const double re = normal(rng);
                g.data(i, j) = Complex(re, normal(rng));
                break;
            }
            case Beta::quaternion: {
                const double c0 = normal(rng);
                const double c1 = normal(rng);
                const double c2 = normal(rng);
                const double c3 = normal(rng);
                const Complex a(c0, c1);
                const Complex b(c2, c3);
                g.data(2 * i, 2 * j) = a;
                g.data(2 * i, 2 * j + 1) = b;
                g.data(2 * i + 1, 2 * j) = -std::conj(b);
                g.data(2 * i + 1, 2 * j + 1) = std::conj(a);
                break;
            }
            }
        }
    }
    return g;
}

/// Haar-distributed m x m orthogonal, unitary or unitary symplectic matrix.
///
/// QR of a standard Gaussian matrix followed by Q -> Q diag(r_jj / |r_jj|), which
/// makes the triangular factor's diagonal positive; without it the distribution
/// of Q depends on the QR implementation's sign convention. The quaternion case
/// uses quaternion Gram-Schmidt, which yields the positive-diagonal factor
/// directly.
inline FieldMatrix sample_haar_unitary(Beta beta, int m, Rng& rng)
{
    FieldMatrix g = sample_gaussian(beta, m, m, rng);
    if (beta == Beta::quaternion) {
        orthonormalize_columns(g);
        return g;
    }
    if (beta == Beta::real) {
        const Eigen::MatrixXd a = g.data.real();
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        Eigen::MatrixXd q = qr.householderQ();
        for (int j = 0; j < m; ++j) {
            if (qr.matrixQR()(j, j) < 0.0) {
                q.col(j) = -q.col(j);
            }
        }
        return FieldMatrix{beta, q.cast<Complex>()};
    }
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g.data);
    Eigen::MatrixXcd q = qr.householderQ();
    for (int j = 0; j < m; ++j) {
        const Complex r = qr.matrixQR()(j, j);
        q.col(j) *= r / std::abs(r);
    }
    return FieldMatrix{beta, q};
}

/// Inverse factors whose Gaussian draw has a 2-norm condition number above this
/// are redrawn.
inline constexpr double inverse_condition_limit = 1e12;

inline double condition_number(const FieldMatrix& m)
{
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.data);
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

/// Inverse of a fresh d x d Gaussian matrix. `redraws` counts rejected draws.
inline FieldMatrix sample_inverse_gaussian(Beta beta, int d, Rng& rng, int& redraws)
{
    for (;;) {
        FieldMatrix g = sample_gaussian(beta, d, d, rng);
        if (!(condition_number(g) <= inverse_condition_limit)) {
            ++redraws;
            continue;
        }
        FieldMatrix inv{beta, g.data.fullPivLu().inverse()};
        if (beta == Beta::real) {
            inv.data = inv.data.real().cast<Complex>();
        } else if (beta == Beta::quaternion) {
            enforce_quaternion_structure(inv.data);
        }
        return inv;
    }
}

// ---------------------------------------------------------------------------
// Factor streams

/// Deterministic schedule of rectangular shapes: each step takes the shape whose
/// count lags furthest behind its target proportion (ties to the smaller
/// offset), so after N steps every count is within one of proportion * N.
class RectangularSchedule {
public:
    explicit RectangularSchedule(const RectangularSpec& spec)
        : shapes_(detail::canonical_shapes(spec)), counts_(shapes_.size(), 0)
    {
        validate(spec);
    }

    /// Index into shapes() of the next factor's output shape.
    int next()
    {
        ++steps_;
        int best = 0;
        double best_deficit = -1e300;
        for (std::size_t s = 0; s < shapes_.size(); ++s) {
            const double deficit = shapes_[s].proportion * static_cast<double>(steps_)
                                   - static_cast<double>(counts_[s]);
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best = static_cast<int>(s);
            }
        }
        ++counts_[best];
        return best;
    }

    const std::vector<RectangularShape>& shapes() const { return shapes_; }
    const std::vector<long>& counts() const { return counts_; }

private:
    std::vector<RectangularShape> shapes_;
    std::vector<long> counts_;
    long steps_ = 0;
};

struct Factor {
    FieldMatrix matrix;
    int stratum = 0;  // index into stratum_weights(spec)
    int redraws = 0;
};

/// Stream of factors A_1, A_2, ... for one chain.
class FactorSampler {
public:
    explicit FactorSampler(EnsembleSpec spec) : spec_(std::move(spec))
    {
        validate(spec_);
        if (const auto* rect = std::get_if<RectangularGaussian>(&spec_)) {
            schedule_.emplace(rect->shapes);
        }
    }

    const EnsembleSpec& spec() const { return spec_; }

    Factor next(Rng& rng)
    {
        return std::visit([&](const auto& e) { return draw(e, rng); }, spec_);
    }

    /// Advances past `steps` factors without drawing them. Only the rectangular
    /// schedule carries state between steps.
    void skip(long steps)
    {
        if (!schedule_) {
            return;
        }
        for (long j = 0; j < steps; ++j) {
            previous_offset_ = schedule_->shapes()[schedule_->next()].offset;
        }
    }

private:
    Factor draw(const StandardGaussian& e, Rng& rng)
    {
        return Factor{sample_gaussian(e.beta, e.d, e.d, rng), 0, 0};
    }

    Factor draw(const GeneralSigmaGaussian& e, Rng& rng)
    {
        const int d = static_cast<int>(e.sigma.y.size());
        FieldMatrix g = sample_gaussian(e.beta, d, d, rng);
        const int f = embedding_factor(e.beta);
        // Sigma taken diagonal: row i scaled by y_i^{-1/2}.
        for (int i = 0; i < d; ++i) {
            const double s = 1.0 / std::sqrt(e.sigma.y[i]);
            g.data.middleRows(f * i, f) *= s;
        }
        return Factor{std::move(g), 0, 0};
    }

    Factor draw(const InverseGaussian& e, Rng& rng)
    {
        Factor out{FieldMatrix{}, 0, 0};
        out.matrix = sample_inverse_gaussian(e.beta, e.d, rng, out.redraws);
        return out;
    }

    Factor draw(const GaussianInverseMixture& e, Rng& rng)
    {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < e.alpha_plus) {
            return Factor{sample_gaussian(e.beta, e.d, e.d, rng), 0, 0};
        }
        Factor out{FieldMatrix{}, 1, 0};
        out.matrix = sample_inverse_gaussian(e.beta, e.d, rng, out.redraws);
        return out;
    }

    Factor draw(const RectangularGaussian& e, Rng& rng)
    {
        const int shape = schedule_->next();
        const int out_dim = e.d + schedule_->shapes()[shape].offset;
        const int in_dim = e.d + previous_offset_;
        previous_offset_ = schedule_->shapes()[shape].offset;
        return Factor{sample_gaussian(e.beta, out_dim, in_dim, rng), shape, 0};
    }

    Factor draw(const TruncatedUnitary& e, Rng& rng)
    {
        const FieldMatrix u = sample_haar_unitary(e.beta, e.d + e.n, rng);
        const int f = embedding_factor(e.beta);
        return Factor{FieldMatrix{e.beta, u.data.topLeftCorner(f * e.d, f * e.d)}, 0, 0};
    }

    EnsembleSpec spec_;
    std::optional<RectangularSchedule> schedule_;
    int previous_offset_ = 0;
};

/// The factor A_step (1-based) of a product. Stateless: the rectangular schedule
/// is replayed from the start, so this costs O(step) for rectangular ensembles;
/// chains use FactorSampler instead.
inline Factor sample_factor(const EnsembleSpec& spec, long step, Rng& rng)
{
    if (step < 1) {
        throw std::invalid_argument("sample_factor: step index is 1-based");
    }
    FactorSampler sampler(spec);
    sampler.skip(step - 1);
    return sampler.next(rng);
}

} // namespace lyap
