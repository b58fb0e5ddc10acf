#include "combofilter/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "combofilter/config.hpp"
#include "combofilter/csv.hpp"

namespace combofilter {

namespace fs = std::filesystem;

ExperimentConfig resolve_config(const CommandOptions& options) {
    ExperimentConfig cfg;
    if (options.config) {
        if (options.preset) {
            throw ConfigError("preset", "--preset and --config are mutually exclusive");
        }
        cfg = load_config(*options.config);
    } else {
        cfg = preset(options.preset.value_or("example1"));
    }
    if (options.trials) cfg.trials = *options.trials;
    if (options.seed) cfg.rng.master_seed = *options.seed;
    validate(cfg);
    return cfg;
}

namespace {

std::string source_of(const CommandOptions& options) {
    if (options.config) return options.config->string();
    return "preset:" + options.preset.value_or("example1");
}

void write_manifest(const CommandOptions& options, const std::string& command,
                    const ExperimentConfig& cfg) {
    RunManifest manifest{command, source_of(options), options.out.string(), cfg};
    write_text(options.out / "manifest.json", manifest_to_json(manifest));
}

void write_curves(const fs::path& dir, const MonteCarloResult& result) {
    for (const auto& alg : result.algorithms) {
        write_curve_csv(dir / ("curve_" + alg.name + ".csv"), alg.curve);
        if (alg.mixing) {
            write_mixing_csv(dir / ("mixing_" + alg.name + ".csv"), *alg.mixing);
        }
    }
}

// Shared error mapping for all subcommands.
template <typename Fn>
int guarded(std::ostream& log, Fn&& body) {
    try {
        return body();
    } catch (const ConfigError& err) {
        log << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const OutputError& err) {
        log << "output error: " << err.what() << '\n';
        return kExitOutput;
    } catch (const std::exception& err) {
        log << "error: " << err.what() << '\n';
        return kExitFailure;
    }
}

std::string value_label(double value) {
    std::string text = format_double(value);
    std::replace(text.begin(), text.end(), '+', 'p');
    return text;
}

}  // namespace

int cmd_run(const CommandOptions& options, std::ostream& log) {
    return guarded(log, [&] {
        const auto cfg = resolve_config(options);
        prepare_output_dir(options.out);
        const auto result = run_monte_carlo(cfg, options.jobs);
        write_curves(options.out, result);
        write_report_csv(options.out / "report.csv", result);
        write_manifest(options, "run", cfg);
        for (const auto& alg : result.algorithms) {
            log << alg.name << ": steady state " << format_double(emse_db(alg.steady_state))
                << " dB";
            if (alg.report) {
                log << ", verdict " << to_string(alg.report->verdict);
            }
            log << '\n';
        }
        return kExitOk;
    });
}

int cmd_sweep(const CommandOptions& options, const std::string& param,
              const std::vector<double>& values, std::ostream& log) {
    return guarded(log, [&] {
        const bool is_window = param == "N0" || param == "n0" || param == "window_length";
        const bool is_rho = param == "rho_a";
        if (!is_window && !is_rho) {
            throw ConfigError("param", "unknown sweep parameter '" + param +
                                           "' (expected N0 or rho_a)");
        }
        if (values.empty()) {
            throw ConfigError("values", "at least one value is required");
        }
        for (double v : values) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ConfigError("values", "every value must be a finite number > 0");
            }
            if (is_window && v != std::floor(v)) {
                throw ConfigError("values", "N0 values must be positive integers");
            }
        }

        auto cfg = resolve_config(options);
        const auto target = std::find_if(cfg.algorithms.begin(), cfg.algorithms.end(),
                                         [](const auto& a) { return is_combination(a.kind); });
        if (target == cfg.algorithms.end()) {
            throw ConfigError("algorithms", "sweep needs a combination algorithm");
        }
        cfg.algorithms = {*target};
        const std::string label = is_window ? "N0" : "rho_a";

        prepare_output_dir(options.out);
        std::vector<SweepRow> rows;
        for (double v : values) {
            auto run_cfg = cfg;
            if (is_window) {
                run_cfg.combiner.window_length = static_cast<std::uint64_t>(v);
            } else {
                run_cfg.combiner.rho_a = v;
            }
            const auto result = run_monte_carlo(run_cfg, options.jobs);
            const auto& alg = result.algorithms.front();
            write_curve_csv(options.out / ("curve_" + alg.name + "_" + label + "_" +
                                           value_label(v) + ".csv"),
                            alg.curve);
            rows.push_back({v, emse_db(alg.steady_state), alg.convergence_time});
            log << label << "=" << format_double(v) << ": steady state "
                << format_double(emse_db(alg.steady_state)) << " dB\n";
        }
        write_sweep_summary(options.out / "sweep_summary.csv", rows);
        write_manifest(options, "sweep", cfg);
        return kExitOk;
    });
}

int cmd_compare(const CommandOptions& options,
                const std::optional<std::pair<std::string, std::string>>& pair,
                std::ostream& log) {
    return guarded(log, [&] {
        const auto cfg = resolve_config(options);
        if (cfg.algorithms.size() < 2) {
            throw ConfigError("algorithms", "compare needs at least two algorithms");
        }
        auto names = pair.value_or(std::make_pair(cfg.algorithms[0].name, cfg.algorithms[1].name));
        for (const auto& name : {names.first, names.second}) {
            const bool known = std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(),
                                           [&](const auto& a) { return a.name == name; });
            if (!known) {
                throw ConfigError("pair", "no algorithm named '" + name + "'");
            }
        }
        prepare_output_dir(options.out);
        const auto result = run_monte_carlo(cfg, options.jobs);
        write_curves(options.out, result);
        const auto& a = result.at(names.first);
        const auto& b = result.at(names.second);
        write_delta_csv(options.out / ("delta_" + a.name + "_vs_" + b.name + ".csv"), a.curve,
                        b.curve);
        write_manifest(options, "compare", cfg);
        log << a.name << " vs " << b.name << ": steady-state delta "
            << format_double(emse_db(a.steady_state) - emse_db(b.steady_state)) << " dB\n";
        return kExitOk;
    });
}

}  // namespace combofilter
