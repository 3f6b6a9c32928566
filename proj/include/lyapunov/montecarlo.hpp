#pragma once

// Monte Carlo simulation of random matrix products.
//
// A chain carries an orthonormal d x k frame through the product. At step j
// the frame is multiplied by a fresh factor and re-orthonormalized; the log of
// the i-th diagonal entry of the triangular factor, xi_j^(i), is the growth of
// the i-th direction, and sum_{i<=k} xi_j^(i) is the growth of the log k-volume
// spanned by the frame. Renormalizing every step keeps all quantities O(1).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "ensembles.hpp"
#include "field_matrix.hpp"
#include "stats.hpp"

namespace lyap {

struct ChainResult {
    int k_max = 0;
    Eigen::MatrixXd increments;          // N x k_max, xi_j^(i) = log r_ii(j)
    std::vector<std::uint8_t> strata;    // factor class of each step
    std::uint64_t seed = 0;
    long redraw_count = 0;

    long steps() const { return static_cast<long>(increments.rows()); }
};

struct McEstimate {
    std::vector<double> mu_hat;
    std::vector<double> se_mu;
    std::vector<double> n_sigma2_hat;
    std::vector<double> partial_sum_mu;         // sum_{i<=k} mu_hat[i]
    std::vector<double> partial_sum_n_sigma2;   // N Var of the k-volume growth rate
    std::vector<double> se_partial_sum;
    long N = 0;
    int chains = 0;
    long redraws = 0;
};

/// Seed of chain `chain` derived from the master seed (splitmix64 of
/// master + (chain + 1) * golden-ratio increment).
inline std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain)
{
    std::uint64_t z = master + (chain + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline ChainResult run_chain(const EnsembleSpec& spec, int k_max, long N, Rng& rng)
{
    const int d = dimension(spec);
    if (k_max < 1 || k_max > d) {
        throw std::invalid_argument("run_chain: k_max must lie in [1, d]");
    }
    if (N < 1) {
        throw std::invalid_argument("run_chain: N must be >= 1");
    }
    FactorSampler sampler(spec);
    FieldMatrix frame = identity_frame(beta_of(spec), d, k_max);

    ChainResult out;
    out.k_max = k_max;
    out.increments.resize(N, k_max);
    out.strata.resize(N);
    for (long j = 0; j < N; ++j) {
        Factor factor = sampler.next(rng);
        frame = factor.matrix * frame;
        const std::vector<double> r = orthonormalize_columns(frame);
        for (int i = 0; i < k_max; ++i) {
            const double xi = std::log(r[i]);
            if (!std::isfinite(xi)) {
                throw std::runtime_error("run_chain: non-finite increment");
            }
            out.increments(j, i) = xi;
        }
        out.strata[j] = static_cast<std::uint8_t>(factor.stratum);
        out.redraw_count += factor.redraws;
    }
    return out;
}

inline ChainResult run_chain(const EnsembleSpec& spec, int k_max, long N, std::uint64_t seed)
{
    Rng rng(seed);
    ChainResult out = run_chain(spec, k_max, N, rng);
    out.seed = seed;
    return out;
}

/// Runs fn(c) for c in [0, count) on up to `threads` threads. Exceptions are
/// rethrown on the calling thread, lowest index first.
template <class Fn>
void parallel_for(int count, int threads, Fn fn)
{
    std::vector<std::exception_ptr> errors(count);
    const auto work = [&](std::atomic<int>& next) {
        for (int c = next++; c < count; c = next++) {
            try {
                fn(c);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    std::atomic<int> next{0};
    const int pool = std::clamp(threads, 1, std::max(count, 1));
    if (pool == 1) {
        work(next);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(pool);
        for (int t = 0; t < pool; ++t) {
            workers.emplace_back([&] { work(next); });
        }
        for (auto& w : workers) {
            w.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// Aggregates chains into per-index and partial-sum estimates. Chains are
/// reduced in index order, so the result does not depend on scheduling.
inline McEstimate aggregate(const EnsembleSpec& spec, const std::vector<ChainResult>& chains)
{
    if (chains.empty()) {
        throw std::invalid_argument("aggregate: no chains");
    }
    const int k_max = chains.front().k_max;
    const std::vector<double> weights = stratum_weights(spec);
    const std::size_t n_strata = weights.size();

    // [index][stratum]
    std::vector<std::vector<RunningMoments>> single(k_max, std::vector<RunningMoments>(n_strata));
    std::vector<std::vector<RunningMoments>> partial(k_max, std::vector<RunningMoments>(n_strata));
    McEstimate est;
    est.N = chains.front().steps();
    est.chains = static_cast<int>(chains.size());
    for (const auto& chain : chains) {
        std::vector<std::vector<RunningMoments>> s1(k_max, std::vector<RunningMoments>(n_strata));
        std::vector<std::vector<RunningMoments>> s2(k_max, std::vector<RunningMoments>(n_strata));
        for (long j = 0; j < chain.steps(); ++j) {
            const std::size_t s = chain.strata[j];
            double running = 0.0;
            for (int i = 0; i < k_max; ++i) {
                const double xi = chain.increments(j, i);
                running += xi;
                s1[i][s].add(xi);
                s2[i][s].add(running);
            }
        }
        for (int i = 0; i < k_max; ++i) {
            for (std::size_t s = 0; s < n_strata; ++s) {
                single[i][s].merge(s1[i][s]);
                partial[i][s].merge(s2[i][s]);
            }
        }
        est.redraws += chain.redraw_count;
    }

    double cumulative = 0.0;
    for (int i = 0; i < k_max; ++i) {
        const auto one = stratified_summary(single[i], weights);
        const auto vol = stratified_summary(partial[i], weights);
        est.mu_hat.push_back(one.mean);
        est.se_mu.push_back(one.standard_error);
        est.n_sigma2_hat.push_back(one.variance);
        cumulative += one.mean;
        est.partial_sum_mu.push_back(cumulative);
        est.partial_sum_n_sigma2.push_back(vol.variance);
        est.se_partial_sum.push_back(vol.standard_error);
    }
    return est;
}

/// Runs `chains` independent chains of N steps, chain c seeded with
/// chain_seed(master_seed, c), and aggregates them.
///
/// Means are grand means of the increments. Variances are per-step sample
/// variances (divisor count - 1), which equal N Var(mu_hat) for independent
/// steps. Ensembles mixing several factor classes in fixed proportions are
/// stratified by class; for single-class ensembles this is the plain pooled
/// estimator.
inline McEstimate estimate(const EnsembleSpec& spec, int k_max, long N, int chains,
                           std::uint64_t master_seed, int threads = 1)
{
    if (chains < 1) {
        throw std::invalid_argument("estimate: chains must be >= 1");
    }
    std::vector<ChainResult> results(chains);
    parallel_for(chains, threads, [&](int c) {
        results[c] = run_chain(spec, k_max, N, chain_seed(master_seed, static_cast<std::uint64_t>(c)));
    });
    return aggregate(spec, results);
}

// ---------------------------------------------------------------------------
// Stability exponents

struct StabilityExponent {
    double lambda = 0.0;  // growth rate of the eigenvalue modulus
    double theta = 0.0;   // eigenvalue phase
};

inline constexpr long default_stability_cap = 2000;

namespace detail {

inline std::vector<std::vector<int>> subsets_of_size(int m, int k)
{
    std::vector<std::vector<int>> out;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        out.push_back(idx);
        int p = k - 1;
        while (p >= 0 && idx[p] == m - k + p) {
            --p;
        }
        if (p < 0) {
            return out;
        }
        ++idx[p];
        for (int q = p + 1; q < k; ++q) {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

// k-th compound matrix: all k x k minors of a, rows and columns indexed by
// k-subsets in lexicographic order.
inline Eigen::MatrixXcd compound(const Eigen::MatrixXcd& a, const std::vector<std::vector<int>>& subsets)
{
    const auto n = static_cast<Eigen::Index>(subsets.size());
    const int k = static_cast<int>(subsets.front().size());
    Eigen::MatrixXcd out(n, n);
    Eigen::MatrixXcd minor(k, k);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            for (int p = 0; p < k; ++p) {
                for (int q = 0; q < k; ++q) {
                    minor(p, q) = a(subsets[r][p], subsets[c][q]);
                }
            }
            out(r, c) = minor.determinant();
        }
    }
    return out;
}

} // namespace detail

/// Stability exponents of P_N = A_N ... A_1 from the eigenvalues z_k of P_N,
/// z_k = exp(N lambda_k + i theta_k), sorted by decreasing lambda.
///
/// The explicit product loses every eigenvalue smaller than about 1e-16 times
/// the largest, which happens after a few dozen steps. Instead the k-th
/// compound of the product, whose dominant eigenvalue is z_1 ... z_k, is
/// accumulated for every k with per-step rescaling by the largest entry modulus
/// and a compensated sum of the log scales. For quaternion factors the
/// eigenvalues of the complex embedding come in conjugate pairs; one value per
/// pair is returned. Only suitable for small d: the compounds have
/// C(embedded d, k) rows.
inline std::vector<StabilityExponent> stability_exponents(const EnsembleSpec& spec, long N, Rng& rng,
                                                          long max_steps = default_stability_cap)
{
    if (!has_square_factors(spec)) {
        throw std::invalid_argument("stability_exponents: factors must be square");
    }
    if (N < 1 || N > max_steps) {
        throw std::invalid_argument("stability_exponents: N must lie in [1, " + std::to_string(max_steps)
                                    + "]");
    }
    const Beta beta = beta_of(spec);
    const int m = embedding_factor(beta) * dimension(spec);
    if (m > 12) {
        throw std::invalid_argument("stability_exponents: embedded dimension above 12 is not supported");
    }

    std::vector<std::vector<std::vector<int>>> subsets(m + 1);
    std::vector<Eigen::MatrixXcd> products(m + 1);
    std::vector<CompensatedSum> log_scale(m + 1);
    for (int k = 1; k <= m; ++k) {
        subsets[k] = detail::subsets_of_size(m, k);
        products[k] = Eigen::MatrixXcd::Identity(subsets[k].size(), subsets[k].size());
    }

    FactorSampler sampler(spec);
    for (long j = 0; j < N; ++j) {
        const Factor factor = sampler.next(rng);
        for (int k = 1; k <= m; ++k) {
            Eigen::MatrixXcd next = k == 1 ? factor.matrix.data * products[k]
                                           : detail::compound(factor.matrix.data, subsets[k]) * products[k];
            const double scale = next.cwiseAbs().maxCoeff();
            if (!(scale > 0.0) || !std::isfinite(scale)) {
                throw std::runtime_error("stability_exponents: degenerate product");
            }
            products[k] = next / scale;
            log_scale[k].add(std::log(scale));
        }
    }

    std::vector<StabilityExponent> all;
    all.reserve(m);
    double previous_log = 0.0;
    Complex previous_top(1.0, 0.0);
    for (int k = 1; k <= m; ++k) {
        const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(products[k], false);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("stability_exponents: eigensolver failed");
        }
        const auto& ev = solver.eigenvalues();
        Eigen::Index top = 0;
        ev.cwiseAbs().maxCoeff(&top);
        const double log_k = log_scale[k].value() + std::log(std::abs(ev(top)));
        all.push_back(StabilityExponent{(log_k - previous_log) / static_cast<double>(N),
                                        std::arg(ev(top) / previous_top)});
        previous_log = log_k;
        previous_top = ev(top);
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const auto& a, const auto& b) { return a.lambda > b.lambda; });
    if (beta != Beta::quaternion) {
        return all;
    }
    std::vector<StabilityExponent> unique;
    for (std::size_t k = 0; k < all.size(); k += 2) {
        unique.push_back(all[k]);
    }
    return unique;
}

// ---------------------------------------------------------------------------
// Singular value / eigenvalue ratio

struct RatioResult {
    double mean = 0.0;
    std::vector<double> ratios;
};

/// Ratio of the largest singular value to the largest eigenvalue modulus of a
/// d x d standard Gaussian matrix (scaled by 1/sqrt(d)), averaged over samples.
inline RatioResult spectral_ratio(Beta beta, int d, int samples, Rng& rng)
{
    if (d < 2) {
        throw std::invalid_argument("spectral_ratio: d must be >= 2");
    }
    if (samples < 1) {
        throw std::invalid_argument("spectral_ratio: samples must be >= 1");
    }
    RatioResult out;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int s = 0; s < samples; ++s) {
        const FieldMatrix g = sample_gaussian(beta, d, d, rng);
        double top_singular = 0.0;
        double top_modulus = 0.0;
        if (beta == Beta::real) {
            const Eigen::MatrixXd x = g.data.real() * scale;
            const Eigen::EigenSolver<Eigen::MatrixXd> eig(x, false);
            top_modulus = eig.eigenvalues().cwiseAbs().maxCoeff();
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(x.transpose() * x,
                                                                     Eigen::EigenvaluesOnly);
            top_singular = std::sqrt(gram.eigenvalues().maxCoeff());
        } else {
            const Eigen::MatrixXcd x = g.data * scale;
            const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(x, false);
            top_modulus = eig.eigenvalues().cwiseAbs().maxCoeff();
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gram(x.adjoint() * x,
                                                                      Eigen::EigenvaluesOnly);
            top_singular = std::sqrt(gram.eigenvalues().maxCoeff());
        }
        out.ratios.push_back(top_singular / top_modulus);
    }
    out.mean = std::accumulate(out.ratios.begin(), out.ratios.end(), 0.0)
               / static_cast<double>(out.ratios.size());
    return out;
}

} // namespace lyap
