// lyap: closed-form Lyapunov spectra of random matrix products and their
// Monte Carlo verification.
//
//   lyap theory   --ensemble '{"type":"truncated_unitary","beta":2,"d":2,"n":2}'
//   lyap simulate --config run.json --N 100000 --chains 4
//   lyap compare  --config run.json --format json --out report.json
//   lyap ratio    --beta 2 --d 500 --samples 20

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "lyapunov/cli.hpp"

namespace {

using lyap::cli::json;

struct Flags {
    std::string config_path;
    std::string ensemble;
    std::optional<long> N;
    std::optional<int> chains;
    std::optional<int> k_max;
    std::optional<std::uint64_t> seed;
    std::string threads;
    std::string format;
    std::string out;
    bool dump_config = false;
    std::string theory_ensemble;
};

void add_run_flags(CLI::App& cmd, Flags& f)
{
    cmd.add_option("--config", f.config_path, "JSON run configuration file")->check(CLI::ExistingFile);
    cmd.add_option("--ensemble", f.ensemble, "ensemble as a JSON object");
    cmd.add_option("--N", f.N, "steps per chain");
    cmd.add_option("--chains", f.chains, "independent chains");
    cmd.add_option("--k-max", f.k_max, "number of leading exponents");
    cmd.add_option("--seed", f.seed, "64-bit master seed");
    cmd.add_option("--threads", f.threads, "worker threads or 'auto'");
    cmd.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--out", f.out, "write output here instead of stdout");
    cmd.add_flag("--dump-config", f.dump_config, "print the resolved configuration and exit");
}

lyap::cli::RunConfig resolve(const Flags& f)
{
    lyap::cli::RunConfig config;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        config = lyap::cli::config_from_json(json::parse(in), config);
    }
    if (!f.ensemble.empty()) {
        config.ensemble = lyap::cli::ensemble_from_json(json::parse(f.ensemble));
    }
    if (f.N) config.N = *f.N;
    if (f.chains) config.chains = *f.chains;
    if (f.k_max) config.k_max = *f.k_max;
    if (f.seed) config.seed = *f.seed;
    if (!f.threads.empty()) {
        config.threads = lyap::cli::threads_from_json(
            f.threads == "auto" ? json("auto") : json(std::stoi(f.threads)));
    }
    if (!f.format.empty()) config.format = lyap::cli::format_from_string(f.format);
    lyap::cli::validate(config);
    return config;
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path);
    }
    out << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lyapunov exponents of random matrix products: closed forms and Monte Carlo checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lyap::cli::version);

    Flags theory_flags, simulate_flags, compare_flags;
    auto* theory = app.add_subcommand("theory", "closed-form exponents and N-scaled variances");
    add_run_flags(*theory, theory_flags);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
    add_run_flags(*simulate, simulate_flags);
    auto* compare = app.add_subcommand("compare", "theory vs simulation; exit status 1 if any |z| > 5");
    add_run_flags(*compare, compare_flags);
    compare->add_option("--theory-ensemble", compare_flags.theory_ensemble,
                        "compare against the closed form of a different ensemble (gate self-test)")
        ->group("");

    int ratio_beta = 2, ratio_d = 500, ratio_samples = 20;
    std::uint64_t ratio_seed = 1;
    std::string ratio_format = "csv", ratio_out;
    auto* ratio = app.add_subcommand("ratio", "largest singular value over largest eigenvalue modulus");
    ratio->add_option("--beta", ratio_beta)->check(CLI::IsMember({1, 2, 4}));
    ratio->add_option("--d", ratio_d);
    ratio->add_option("--samples", ratio_samples);
    ratio->add_option("--seed", ratio_seed);
    ratio->add_option("--format", ratio_format)->check(CLI::IsMember({"csv", "json"}));
    ratio->add_option("--out", ratio_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ratio) {
            const auto table = lyap::cli::cmd_ratio(lyap::beta_from_int(ratio_beta), ratio_d,
                                                    ratio_samples, ratio_seed);
            emit(lyap::cli::render(table, lyap::cli::format_from_string(ratio_format)), ratio_out);
            return 0;
        }
        const Flags& flags = *theory ? theory_flags : *simulate ? simulate_flags : compare_flags;
        const auto config = resolve(flags);
        if (flags.dump_config) {
            emit(lyap::cli::to_json(config).dump(2) + "\n", flags.out);
            return 0;
        }
        if (*theory) {
            emit(lyap::cli::render(lyap::cli::cmd_theory(config), config.format), flags.out);
            return 0;
        }
        if (*simulate) {
            emit(lyap::cli::render(lyap::cli::cmd_simulate(config), config.format), flags.out);
            return 0;
        }
        std::optional<lyap::EnsembleSpec> theory_ensemble;
        if (!flags.theory_ensemble.empty()) {
            theory_ensemble = lyap::cli::ensemble_from_json(json::parse(flags.theory_ensemble));
        }
        const auto result = lyap::cli::cmd_compare(config, theory_ensemble);
        emit(lyap::cli::render(result.table, config.format), flags.out);
        if (result.regression) {
            std::cerr << "lyap compare: |z| > " << lyap::cli::z_gate << " for at least one index\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "lyap: " << e.what() << "\n";
        return 2;
    }
}
