// Command-line front end for the NSA-NSA experiment harness.
//
//   combofilter run     --preset example1 --out results/
//   combofilter sweep   --preset example1 --param N0 --values 1,2,8,32 --out sweep/
//   combofilter compare --config cmp.json --pair nsa_nsa nlms_nsa --out cmp/
//
// Every flag can also be set through COMBOFILTER_<FLAG> (e.g. COMBOFILTER_TRIALS).

#include <iostream>

#include "CLI11.hpp"
#include "combofilter/commands.hpp"

namespace {

void add_common(CLI::App& cmd, combofilter::CommandOptions& opts, std::string& preset,
                std::string& config, std::size_t& trials, std::uint64_t& seed) {
    cmd.add_option("--preset", preset, "Built-in experiment (example1, example2)")
        ->envname("COMBOFILTER_PRESET");
    cmd.add_option("--config", config, "JSON experiment config or manifest")
        ->envname("COMBOFILTER_CONFIG");
    cmd.add_option("--out", opts.out, "Output directory")
        ->envname("COMBOFILTER_OUT")
        ->capture_default_str();
    cmd.add_option("--trials", trials, "Monte Carlo trials (overrides config)")
        ->envname("COMBOFILTER_TRIALS");
    cmd.add_option("--seed", seed, "Master seed (overrides config)")->envname("COMBOFILTER_SEED");
    cmd.add_option("--jobs", opts.jobs, "Trials run concurrently")
        ->envname("COMBOFILTER_JOBS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void finish(const CLI::App& cmd, combofilter::CommandOptions& opts, const std::string& preset,
            const std::string& config, std::size_t trials, std::uint64_t seed) {
    if (cmd.count("--preset") > 0 || !preset.empty()) opts.preset = preset;
    if (cmd.count("--config") > 0 || !config.empty()) opts.config = config;
    if (cmd.count("--trials") > 0) opts.trials = trials;
    if (cmd.count("--seed") > 0) opts.seed = seed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NSA-NSA adaptive filter experiment harness"};
    app.require_subcommand(1);

    combofilter::CommandOptions opts;
    std::string preset;
    std::string config;
    std::size_t trials = 0;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Monte Carlo run writing curves and a report");
    add_common(*run, opts, preset, config, trials, seed);

    auto* sweep = app.add_subcommand("sweep", "Sweep N0 or rho_a for the first combination");
    add_common(*sweep, opts, preset, config, trials, seed);
    std::string param;
    std::vector<double> values;
    sweep->add_option("--param", param, "N0 or rho_a")->required();
    sweep->add_option("--values", values, "Comma-separated parameter values")->delimiter(',');

    auto* compare = app.add_subcommand("compare", "Co-registered curves plus a delta CSV");
    add_common(*compare, opts, preset, config, trials, seed);
    std::vector<std::string> pair;
    compare->add_option("--pair", pair, "Algorithm names A B (delta = A - B)")->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : combofilter::kExitConfig;
    }

    if (run->parsed()) {
        finish(*run, opts, preset, config, trials, seed);
        return combofilter::cmd_run(opts, std::cerr);
    }
    if (sweep->parsed()) {
        finish(*sweep, opts, preset, config, trials, seed);
        return combofilter::cmd_sweep(opts, param, values, std::cerr);
    }
    finish(*compare, opts, preset, config, trials, seed);
    std::optional<std::pair<std::string, std::string>> names;
    if (pair.size() == 2) names = std::make_pair(pair[0], pair[1]);
    return combofilter::cmd_compare(opts, names, std::cerr);
}
