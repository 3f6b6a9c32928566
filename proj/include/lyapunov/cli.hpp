#pragma once

// Command implementations behind the `lyap` tool: run configuration, the
// theory / simulate / compare / ratio tables, and their CSV and JSON renderings.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ensembles.hpp"
#include "montecarlo.hpp"
#include "sigma.hpp"
#include "theory.hpp"

namespace lyap::cli {

using nlohmann::json;

inline constexpr const char* version = "0.1.0";

/// z-scores beyond this flag a theory/simulation disagreement.
inline constexpr double z_gate = 5.0;

enum class Format { csv, json };

struct RunConfig {
    EnsembleSpec ensemble = StandardGaussian{};
    long N = 100000;
    int chains = 1;
    int k_max = 0;       // 0: use d
    std::uint64_t seed = 1;
    Format format = Format::csv;
    int threads = 1;     // 0: one per hardware thread

    int resolved_k_max() const { return k_max > 0 ? k_max : dimension(ensemble); }
    int resolved_threads() const
    {
        return threads > 0 ? threads : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    }
};

inline void validate(const RunConfig& config)
{
    validate(config.ensemble);
    if (config.N < 1 || config.chains < 1 || config.k_max < 0 || config.threads < 0) {
        throw std::invalid_argument("config: N and chains must be positive");
    }
    if (config.resolved_k_max() > dimension(config.ensemble)) {
        throw std::invalid_argument("config: k_max must not exceed d");
    }
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const EnsembleSpec& spec)
{
    return std::visit(
        [](const auto& e) -> json {
            using T = std::decay_t<decltype(e)>;
            json j;
            j["beta"] = value(e.beta);
            if constexpr (std::is_same_v<T, StandardGaussian>) {
                j["type"] = "standard_gaussian";
                j["d"] = e.d;
            } else if constexpr (std::is_same_v<T, GeneralSigmaGaussian>) {
                j["type"] = "general_sigma";
                j["y"] = e.sigma.y;
            } else if constexpr (std::is_same_v<T, InverseGaussian>) {
                j["type"] = "inverse_gaussian";
                j["d"] = e.d;
            } else if constexpr (std::is_same_v<T, GaussianInverseMixture>) {
                j["type"] = "mixture";
                j["d"] = e.d;
                j["alpha_plus"] = e.alpha_plus;
            } else if constexpr (std::is_same_v<T, RectangularGaussian>) {
                j["type"] = "rectangular";
                j["d"] = e.d;
                j["shapes"] = json::array();
                for (const auto& s : e.shapes.shapes) {
                    j["shapes"].push_back({{"offset", s.offset}, {"proportion", s.proportion}});
                }
            } else {
                j["type"] = "truncated_unitary";
                j["d"] = e.d;
                j["n"] = e.n;
            }
            return j;
        },
        spec);
}

inline EnsembleSpec ensemble_from_json(const json& j)
{
    const std::string type = j.at("type").get<std::string>();
    const Beta beta = beta_from_int(j.value("beta", 2));
    EnsembleSpec spec;
    if (type == "standard_gaussian") {
        spec = StandardGaussian{beta, j.at("d").get<int>()};
    } else if (type == "general_sigma") {
        spec = GeneralSigmaGaussian{beta, SigmaSpec{j.at("y").get<std::vector<double>>()}};
    } else if (type == "inverse_gaussian") {
        spec = InverseGaussian{beta, j.at("d").get<int>()};
    } else if (type == "mixture") {
        spec = GaussianInverseMixture{beta, j.at("d").get<int>(), j.at("alpha_plus").get<double>()};
    } else if (type == "rectangular") {
        RectangularSpec shapes;
        for (const auto& s : j.at("shapes")) {
            shapes.shapes.push_back({s.at("offset").get<int>(), s.at("proportion").get<double>()});
        }
        spec = RectangularGaussian{beta, j.at("d").get<int>(), shapes};
    } else if (type == "truncated_unitary") {
        spec = TruncatedUnitary{beta, j.at("d").get<int>(), j.at("n").get<int>()};
    } else {
        throw std::invalid_argument("unknown ensemble type '" + type + "'");
    }
    validate(spec);
    return spec;
}

inline json to_json(const RunConfig& c)
{
    return json{{"ensemble", to_json(c.ensemble)},
                {"N", c.N},
                {"chains", c.chains},
                {"k_max", c.resolved_k_max()},
                {"seed", c.seed},
                {"format", c.format == Format::csv ? "csv" : "json"},
                {"threads", c.threads == 0 ? json("auto") : json(c.threads)}};
}

inline Format format_from_string(const std::string& s)
{
    if (s == "csv") {
        return Format::csv;
    }
    if (s == "json") {
        return Format::json;
    }
    throw std::invalid_argument("format must be csv or json");
}

inline int threads_from_json(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() != "auto") {
            throw std::invalid_argument("threads must be a positive integer or \"auto\"");
        }
        return 0;
    }
    const int t = j.get<int>();
    if (t < 1) {
        throw std::invalid_argument("threads must be a positive integer or \"auto\"");
    }
    return t;
}

/// Fields absent from the document keep the values already in `base`.
inline RunConfig config_from_json(const json& j, RunConfig base = {})
{
    if (j.contains("ensemble")) {
        base.ensemble = ensemble_from_json(j.at("ensemble"));
    }
    if (j.contains("N")) {
        base.N = j.at("N").get<long>();
    }
    if (j.contains("chains")) {
        base.chains = j.at("chains").get<int>();
    }
    if (j.contains("k_max")) {
        base.k_max = j.at("k_max").get<int>();
    }
    if (j.contains("seed")) {
        base.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("format")) {
        base.format = format_from_string(j.at("format").get<std::string>());
    }
    if (j.contains("threads")) {
        base.threads = threads_from_json(j.at("threads"));
    }
    return base;
}

// ---------------------------------------------------------------------------
// Tables

/// Formats to 15 significant digits.
inline std::string format_number(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

inline double round_to_15(double x)
{
    return std::isfinite(x) ? std::stod(format_number(x)) : x;
}

using Cell = std::optional<double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json config = json::object();
    json meta = json::object();
};

inline bool integral_column(const std::string& name) { return name == "i" || name == "samples"; }

inline std::string render_csv(const Table& t)
{
    std::ostringstream out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        out << (c ? "," : "") << t.columns[c];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                out << ',';
            }
            if (row[c]) {
                out << (integral_column(t.columns[c]) ? std::to_string(static_cast<long>(*row[c]))
                                            : format_number(*row[c]));
            }
        }
        out << '\n';
    }
    return out.str();
}

inline json table_to_json(const Table& t)
{
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            const auto& name = t.columns[c];
            if (!row[c]) {
                r[name] = nullptr;
            } else if (integral_column(name)) {
                r[name] = static_cast<long>(*row[c]);
            } else if (std::isfinite(*row[c])) {
                r[name] = round_to_15(*row[c]);
            } else {
                r[name] = format_number(*row[c]);
            }
        }
        rows.push_back(std::move(r));
    }
    return json{{"config", t.config}, {"rows", rows}, {"meta", t.meta}};
}

inline std::string render_json(const Table& t) { return table_to_json(t).dump(2) + "\n"; }

inline std::string render(const Table& t, Format f)
{
    return f == Format::csv ? render_csv(t) : render_json(t);
}

// ---------------------------------------------------------------------------
// Commands

struct TheoryRows {
    std::vector<double> mu;
    std::vector<Cell> n_sigma2;
    std::vector<std::string> notes;
};

/// Closed-form rows for an ensemble. General covariance with real or
/// quaternion entries has only the top exponent (integral route); with complex
/// entries the full spectrum is available but the variance only for i = 1.
inline TheoryRows theory_rows(const EnsembleSpec& spec)
{
    TheoryRows out;
    const auto from_spectrum = [&](const TheorySpectrum& s) {
        out.mu = s.mu;
        out.n_sigma2.assign(s.n_sigma2.begin(), s.n_sigma2.end());
        if (s.beyond_proved_regime) {
            out.notes.push_back("truncation n < d: formulas extrapolated beyond the proved regime n >= d");
        }
    };
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, StandardGaussian>) {
                from_spectrum(gaussian_spectrum(e.beta, e.d));
            } else if constexpr (std::is_same_v<T, InverseGaussian>) {
                from_spectrum(mixture_spectrum(e.beta, e.d, MixtureSpec{0.0, 1.0}));
            } else if constexpr (std::is_same_v<T, GaussianInverseMixture>) {
                from_spectrum(mixture_spectrum(e.beta, e.d, mixture_from_alpha_plus(e.alpha_plus)));
            } else if constexpr (std::is_same_v<T, RectangularGaussian>) {
                from_spectrum(rectangular_spectrum(e.beta, e.d, e.shapes));
            } else if constexpr (std::is_same_v<T, TruncatedUnitary>) {
                from_spectrum(truncated_unitary_spectrum(e.beta, e.d, e.n));
            } else {
                bool determinant_route = e.beta == Beta::complex;
                if (determinant_route) {
                    try {
                        require_distinct(e.sigma);
                    } catch (const std::domain_error&) {
                        determinant_route = false;
                        out.notes.push_back("repeated covariance eigenvalues: top exponent only");
                    }
                }
                if (determinant_route) {
                    out.mu = sigma_spectrum_complex(e.sigma);
                    out.n_sigma2.assign(out.mu.size(), std::nullopt);
                    out.n_sigma2[0] = sigma_variance1_complex(e.sigma);
                    if (out.mu.size() > 1) {
                        out.notes.push_back("general covariance: variances known for i = 1 only");
                    }
                } else {
                    out.mu = {kargin_mu1(e.beta, e.sigma)};
                    out.n_sigma2 = {kargin_variance1(e.beta, e.sigma)};
                    if (e.beta != Beta::complex) {
                        out.notes.push_back(
                            "general covariance with real or quaternion entries: only the top "
                            "exponent has a closed form (no orthogonal/symplectic analogue of the "
                            "Harish-Chandra-Itzykson-Zuber integral)");
                    }
                }
            }
        },
        spec);
    return out;
}

inline json base_meta(const RunConfig& c)
{
    return json{{"seed", c.seed}, {"version", version}, {"wall_ms", 0.0}, {"redraws", 0}};
}

inline Table cmd_theory(const RunConfig& config)
{
    validate(config);
    const TheoryRows rows = theory_rows(config.ensemble);
    Table t;
    t.columns = {"i", "mu", "n_sigma2"};
    for (std::size_t i = 0; i < rows.mu.size(); ++i) {
        t.rows.push_back({static_cast<double>(i + 1), rows.mu[i], rows.n_sigma2[i]});
    }
    t.config = to_json(config);
    t.meta = base_meta(config);
    t.meta["notes"] = rows.notes;
    return t;
}

struct Timed {
    McEstimate estimate;
    double wall_ms;
};

inline Timed timed_estimate(const RunConfig& c)
{
    const auto start = std::chrono::steady_clock::now();
    McEstimate est = estimate(c.ensemble, c.resolved_k_max(), c.N, c.chains, c.seed, c.resolved_threads());
    const auto stop = std::chrono::steady_clock::now();
    return {std::move(est), std::chrono::duration<double, std::milli>(stop - start).count()};
}

inline json run_meta(const RunConfig& c, const Timed& run)
{
    json meta = base_meta(c);
    meta["wall_ms"] = run.wall_ms;
    meta["redraws"] = run.estimate.redraws;
    meta["N"] = run.estimate.N;
    meta["chains"] = run.estimate.chains;
    return meta;
}

inline Table cmd_simulate(const RunConfig& config)
{
    validate(config);
    const Timed run = timed_estimate(config);
    const McEstimate& e = run.estimate;
    Table t;
    t.columns = {"i", "mu_mc", "se_mu", "n_sigma2_mc", "partial_sum_mu", "partial_sum_n_sigma2"};
    for (std::size_t i = 0; i < e.mu_hat.size(); ++i) {
        t.rows.push_back({static_cast<double>(i + 1), e.mu_hat[i], e.se_mu[i], e.n_sigma2_hat[i],
                          e.partial_sum_mu[i], e.partial_sum_n_sigma2[i]});
    }
    t.config = to_json(config);
    t.meta = run_meta(config, run);
    return t;
}

struct CompareResult {
    Table table;
    bool regression = false;  // some |z| exceeded the gate
};

inline double z_score(double mu_mc, double mu_theory, double se)
{
    const double diff = mu_mc - mu_theory;
    if (se > 0.0) {
        return diff / se;
    }
    // Deterministic increments (for example unitary factors).
    if (std::abs(diff) <= 1e-12) {
        return 0.0;
    }
    return diff > 0 ? INFINITY : -INFINITY;
}

/// Joins theory and simulation. `theory_ensemble` replaces the simulated
/// ensemble on the theory side; it exists to check that the gate fires.
inline CompareResult cmd_compare(const RunConfig& config,
                                 const std::optional<EnsembleSpec>& theory_ensemble = std::nullopt)
{
    validate(config);
    const TheoryRows theory = theory_rows(theory_ensemble.value_or(config.ensemble));
    const int k_max = config.resolved_k_max();
    if (static_cast<std::size_t>(k_max) > theory.mu.size()) {
        throw std::invalid_argument("compare: closed forms exist only for i <= "
                                    + std::to_string(theory.mu.size())
                                    + " for this ensemble; lower --k-max");
    }
    const Timed run = timed_estimate(config);
    const McEstimate& e = run.estimate;

    CompareResult out;
    Table& t = out.table;
    t.columns = {"i", "mu_theory", "n_sigma2_theory", "mu_mc", "se_mu", "n_sigma2_mc", "z"};
    for (int i = 0; i < k_max; ++i) {
        const double z = z_score(e.mu_hat[i], theory.mu[i], e.se_mu[i]);
        if (!(std::abs(z) <= z_gate)) {
            out.regression = true;
        }
        t.rows.push_back({static_cast<double>(i + 1), theory.mu[i], theory.n_sigma2[i], e.mu_hat[i],
                          e.se_mu[i], e.n_sigma2_hat[i], z});
    }
    t.config = to_json(config);
    t.meta = run_meta(config, run);
    t.meta["notes"] = theory.notes;
    t.meta["z_gate"] = z_gate;
    t.meta["regression"] = out.regression;
    return out;
}

inline Table cmd_ratio(Beta beta, int d, int samples, std::uint64_t seed)
{
    const auto start = std::chrono::steady_clock::now();
    Rng rng(seed);
    const RatioResult r = spectral_ratio(beta, d, samples, rng);
    const auto stop = std::chrono::steady_clock::now();
    Table t;
    t.columns = {"estimate", "reference", "min_ratio", "samples"};
    t.rows.push_back({r.mean, std::sqrt(2.0), *std::min_element(r.ratios.begin(), r.ratios.end()),
                      static_cast<double>(samples)});
    t.config = json{{"beta", value(beta)}, {"d", d}, {"samples", samples}, {"seed", seed}};
    t.meta = json{{"seed", seed},
                  {"version", version},
                  {"wall_ms", std::chrono::duration<double, std::milli>(stop - start).count()},
                  {"redraws", 0}};
    return t;
}

} // namespace lyap::cli
