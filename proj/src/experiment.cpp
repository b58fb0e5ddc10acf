#include "combofilter/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "combofilter/errors.hpp"

namespace combofilter {

bool is_combination(AlgorithmKind kind) noexcept {
    return kind == AlgorithmKind::NsaNsa || kind == AlgorithmKind::NlmsNsa;
}

namespace {

// Rethrows std::invalid_argument from a module validator as a ConfigError
// attributed to `field`.
template <typename Fn>
void check_section(const std::string& field, Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(field, err.what());
    }
}

}  // namespace

void validate(const ExperimentConfig& config) {
    if (config.trials < 1) {
        throw ConfigError("trials", "must be >= 1");
    }
    if (config.horizon < 1) {
        throw ConfigError("horizon", "must be >= 1");
    }
    if (config.steady_window < 1 || config.steady_window >= config.horizon) {
        throw ConfigError("steady_window", "must satisfy 1 <= steady_window < horizon");
    }
    if (!std::isfinite(config.convergence_threshold_db)) {
        throw ConfigError("convergence_threshold_db", "must be finite");
    }
    if (!(config.tol_db >= 0.0) || !std::isfinite(config.tol_db)) {
        throw ConfigError("tol_db", "must be a finite value >= 0");
    }
    check_section("scenario", [&] { validate(config.scenario); });
    if (config.scenario.change_at && *config.scenario.change_at >= config.horizon) {
        throw ConfigError("scenario.change_at", "must lie inside the horizon");
    }
    if (!(config.mu_fast > 0.0) || !std::isfinite(config.mu_fast)) {
        throw ConfigError("filters.mu_fast", "must be a finite value > 0");
    }
    if (!(config.mu_slow > 0.0) || !std::isfinite(config.mu_slow)) {
        throw ConfigError("filters.mu_slow", "must be a finite value > 0");
    }
    if (!(config.regularization > 0.0) || !std::isfinite(config.regularization)) {
        throw ConfigError("filters.regularization", "must be a finite value > 0");
    }
    const auto& comb = config.combiner;
    if (!(comb.rho_a > 0.0) || !std::isfinite(comb.rho_a)) {
        throw ConfigError("combiner.rho_a", "must be a finite value > 0");
    }
    if (!(comb.nu_a > 0.0) || !std::isfinite(comb.nu_a)) {
        throw ConfigError("combiner.nu_a", "must be a finite value > 0");
    }
    if (!(comb.a_plus > 0.0) || !std::isfinite(comb.a_plus)) {
        throw ConfigError("combiner.a_plus", "must be a finite value > 0");
    }
    if (comb.window_length < 1) {
        throw ConfigError("combiner.window_length", "must be >= 1");
    }
    if (!(comb.eps_u > 0.0 && comb.eps_u < comb.a_plus)) {
        throw ConfigError("combiner.eps_u", "must lie in (0, a_plus)");
    }
    if (config.algorithms.empty()) {
        throw ConfigError("algorithms", "must list at least one algorithm");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < config.algorithms.size(); ++i) {
        const auto& name = config.algorithms[i].name;
        const std::string field = "algorithms[" + std::to_string(i) + "].name";
        if (name.empty()) {
            throw ConfigError(field, "must not be empty");
        }
        if (name.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                   "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") != std::string::npos) {
            throw ConfigError(field, "may only contain letters, digits, '_', '-' and '.'");
        }
        if (!names.insert(name).second) {
            throw ConfigError(field, "duplicate algorithm name '" + name + "'");
        }
    }
}

double a_priori_error(std::span<const double> w0, std::span<const double> w,
                      const TapDelayLine& x) noexcept {
    const auto xs = x.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        acc += (w0[i] - w[i]) * xs[i];
    }
    return acc;
}

double emse_db(double e_a_sq_mean) noexcept {
    if (e_a_sq_mean <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(e_a_sq_mean);
}

namespace {

FilterConfig fast_config(const ExperimentConfig& config, UpdateRule rule) {
    return {config.mu_fast, config.regularization, config.scenario.num_taps, rule};
}

FilterConfig slow_config(const ExperimentConfig& config) {
    return {config.mu_slow, config.regularization, config.scenario.num_taps, UpdateRule::Nsa};
}

void reserve_all(AlgorithmTrajectory& t, std::size_t horizon, bool combination) {
    t.output.reserve(horizon);
    t.e_a.reserve(horizon);
    if (combination) {
        t.e_a1.reserve(horizon);
        t.e_a2.reserve(horizon);
        t.lambda.reserve(horizon);
        t.a.reserve(horizon);
        t.lambda_u.reserve(horizon);
    }
}

AlgorithmTrajectory run_single(const ExperimentConfig& config, const TrialSignals& signals,
                               const FilterConfig& filter_config) {
    AlgorithmTrajectory traj;
    reserve_all(traj, config.horizon, false);
    auto filter = make_filter(filter_config);
    TapDelayLine x(config.scenario.num_taps);
    for (std::size_t n = 0; n < config.horizon; ++n) {
        x.push(signals.input[n]);
        const auto w0 = signals.system_at(n);
        const double d = signals.desired[n];
        const double y = predict(filter, x);
        traj.output.push_back(y);
        traj.e_a.push_back(a_priori_error(w0, filter.weights, x));
        filter = update(std::move(filter), x, d - y);
    }
    return traj;
}

AlgorithmTrajectory run_combination(const ExperimentConfig& config, const TrialSignals& signals,
                                    const AlgorithmSpec& spec) {
    AlgorithmTrajectory traj;
    reserve_all(traj, config.horizon, true);
    const auto fast_rule =
        spec.kind == AlgorithmKind::NlmsNsa ? UpdateRule::Nlms : UpdateRule::Nsa;
    CombinerConfig comb = config.combiner;
    comb.mixing_rule = spec.mixing_rule;
    comb.transfer = spec.transfer;
    auto state = make_combiner(fast_config(config, fast_rule), slow_config(config), comb);

    TapDelayLine x(config.scenario.num_taps);
    for (std::size_t n = 0; n < config.horizon; ++n) {
        x.push(signals.input[n]);
        const auto w0 = signals.system_at(n);
        const double e_a1 = a_priori_error(w0, state.fast.weights, x);
        const double e_a2 = a_priori_error(w0, state.slow.weights, x);

        auto result = step(std::move(state), x, signals.desired[n]);
        state = std::move(result.state);
        const auto& diag = result.diagnostics;

        traj.output.push_back(diag.y);
        traj.e_a1.push_back(e_a1);
        traj.e_a2.push_back(e_a2);
        traj.e_a.push_back(combined_error(diag.lambda, e_a1, e_a2));
        traj.lambda.push_back(diag.lambda);
        traj.a.push_back(diag.a);
        traj.lambda_u.push_back(diag.lambda_reported);
        if (diag.transfer_fired) {
            ++traj.transfers;
        }
    }
    return traj;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index) {
    const auto signals = generate_trial(config.scenario, config.rng, trial_index, config.horizon);
    TrialResult result;
    result.reserve(config.algorithms.size());
    for (const auto& spec : config.algorithms) {
        switch (spec.kind) {
            case AlgorithmKind::NsaFast:
                result.push_back(run_single(config, signals, fast_config(config, UpdateRule::Nsa)));
                break;
            case AlgorithmKind::NsaSlow:
                result.push_back(run_single(config, signals, slow_config(config)));
                break;
            case AlgorithmKind::NsaNsa:
            case AlgorithmKind::NlmsNsa:
                result.push_back(run_combination(config, signals, spec));
                break;
        }
    }
    return result;
}

std::vector<double> LearningCurve::db() const {
    std::vector<double> out(mean_sq.size());
    std::transform(mean_sq.begin(), mean_sq.end(), out.begin(), emse_db);
    return out;
}

const char* to_string(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::MatchesBest:
            return "matches_best";
        case Verdict::BetterThanBoth:
            return "better_than_both";
        case Verdict::Violation:
            return "violation";
    }
    return "violation";
}

const AlgorithmSummary& MonteCarloResult::at(const std::string& name) const {
    for (const auto& alg : algorithms) {
        if (alg.name == name) {
            return alg;
        }
    }
    throw std::out_of_range("no algorithm named '" + name + "'");
}

MonteCarloAccumulator::MonteCarloAccumulator(const ExperimentConfig& config)
    : config_(&config), sums_(config.algorithms.size()) {
    for (std::size_t i = 0; i < sums_.size(); ++i) {
        sums_[i].e_a_sq.assign(config.horizon, 0.0);
        if (is_combination(config.algorithms[i].kind)) {
            sums_[i].lambda.assign(config.horizon, 0.0);
            sums_[i].a.assign(config.horizon, 0.0);
        }
    }
}

void MonteCarloAccumulator::add(const TrialResult& trial) {
    const std::size_t horizon = config_->horizon;
    const std::size_t window = config_->steady_window;
    const std::size_t start = horizon - window;
    for (std::size_t i = 0; i < sums_.size(); ++i) {
        auto& s = sums_[i];
        const auto& t = trial[i];
        for (std::size_t n = 0; n < horizon; ++n) {
            s.e_a_sq[n] += t.e_a[n] * t.e_a[n];
        }
        s.sj += window_product_sum(t.e_a, t.e_a, window);
        if (!s.lambda.empty()) {
            for (std::size_t n = 0; n < horizon; ++n) {
                s.lambda[n] += t.lambda[n];
                s.a[n] += t.a[n];
            }
            s.s11 += window_product_sum(t.e_a1, t.e_a1, window);
            s.s22 += window_product_sum(t.e_a2, t.e_a2, window);
            s.s12 += window_product_sum(t.e_a1, t.e_a2, window);
            for (std::size_t n = start; n < horizon; ++n) {
                const double lu = t.lambda_u[n];
                const double eu = lu * t.e_a1[n] + (1.0 - lu) * t.e_a2[n];
                s.su += eu * eu;
                s.sl += t.lambda[n];
                s.sl2 += t.lambda[n] * t.lambda[n];
            }
            s.transfers += static_cast<double>(t.transfers);
        }
    }
    ++count_;
}

MonteCarloResult MonteCarloAccumulator::finish() const {
    const auto& cfg = *config_;
    const double trials = static_cast<double>(count_);
    const double samples = trials * static_cast<double>(cfg.steady_window);
    const double lambda_plus = lambda_from_a(cfg.combiner.a_plus);

    MonteCarloResult out;
    for (std::size_t i = 0; i < sums_.size(); ++i) {
        const auto& s = sums_[i];
        AlgorithmSummary summary;
        summary.name = cfg.algorithms[i].name;
        summary.kind = cfg.algorithms[i].kind;
        summary.curve.mean_sq.resize(cfg.horizon);
        for (std::size_t n = 0; n < cfg.horizon; ++n) {
            summary.curve.mean_sq[n] = s.e_a_sq[n] / trials;
        }
        summary.steady_state = s.sj / samples;
        summary.convergence_time =
            convergence_time(summary.curve.db(),
                             emse_db(summary.steady_state) + cfg.convergence_threshold_db);

        if (!s.lambda.empty()) {
            MixingTrace mix;
            mix.lambda_mean.resize(cfg.horizon);
            mix.a_mean.resize(cfg.horizon);
            for (std::size_t n = 0; n < cfg.horizon; ++n) {
                mix.lambda_mean[n] = s.lambda[n] / trials;
                mix.a_mean[n] = s.a[n] / trials;
            }
            summary.mixing = std::move(mix);

            SteadyStateReport report;
            report.j_ex_1 = s.s11 / samples;
            report.j_ex_2 = s.s22 / samples;
            report.j_ex_12 = s.s12 / samples;
            report.j_ex = summary.steady_state;
            report.j_ex_u = s.su / samples;
            report.lambda_mean = s.sl / samples;
            report.lambda_variance =
                std::max(0.0, s.sl2 / samples - report.lambda_mean * report.lambda_mean);
            report.lambda_predicted =
                predicted_mixing(report.j_ex_1, report.j_ex_2, report.j_ex_12, lambda_plus);
            report.verdict = check_optimality(report, cfg.tol_db);
            summary.report = report;
            summary.mean_transfers = s.transfers / trials;
        }
        out.algorithms.push_back(std::move(summary));
    }
    return out;
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& config, unsigned jobs) {
    validate(config);
    jobs = std::max(1u, jobs);
    MonteCarloAccumulator acc(config);
    std::size_t next = 0;
    while (next < config.trials) {
        const std::size_t batch = std::min<std::size_t>(jobs, config.trials - next);
        std::vector<TrialResult> results(batch);
        if (batch == 1) {
            results[0] = run_trial(config, next);
        } else {
            std::vector<std::jthread> workers;
            workers.reserve(batch);
            for (std::size_t i = 0; i < batch; ++i) {
                workers.emplace_back([&config, &results, i, next] {
                    results[i] = run_trial(config, next + i);
                });
            }
        }
        for (const auto& r : results) {
            acc.add(r);
        }
        next += batch;
    }
    return acc.finish();
}

double window_product_sum(std::span<const double> a, std::span<const double> b,
                          std::size_t window) noexcept {
    const std::size_t n = std::min(a.size(), b.size());
    const std::size_t start = n > window ? n - window : 0;
    double acc = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double estimate_cross_emse(std::span<const std::vector<double>> e_a1,
                           std::span<const std::vector<double>> e_a2, std::size_t window) {
    if (e_a1.size() != e_a2.size() || e_a1.empty()) {
        throw std::invalid_argument("estimate_cross_emse: trajectory sets must be non-empty and paired");
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < e_a1.size(); ++t) {
        if (e_a1[t].size() < window || e_a2[t].size() < window) {
            throw std::invalid_argument("estimate_cross_emse: trajectory shorter than window");
        }
        acc += window_product_sum(e_a1[t], e_a2[t], window);
    }
    return acc / (static_cast<double>(e_a1.size()) * static_cast<double>(window));
}

double predicted_combined_emse(double j_ex_1, double j_ex_2, double j_ex_12) noexcept {
    const double d1 = j_ex_1 - j_ex_12;
    const double d2 = j_ex_2 - j_ex_12;
    if (d1 + d2 == 0.0) {
        return j_ex_12;
    }
    return j_ex_12 + d1 * d2 / (d1 + d2);
}

double predicted_mixing(double j_ex_1, double j_ex_2, double j_ex_12, double lambda_plus) noexcept {
    const double d1 = j_ex_1 - j_ex_12;
    const double d2 = j_ex_2 - j_ex_12;
    const double lo = 1.0 - lambda_plus;
    if (d1 + d2 == 0.0) {
        return 0.5;
    }
    return std::clamp(d2 / (d1 + d2), std::min(lo, lambda_plus), std::max(lo, lambda_plus));
}

Verdict check_optimality(const SteadyStateReport& report, double tol_db) noexcept {
    const double best = std::min(report.j_ex_1, report.j_ex_2);
    if (report.j_ex == best) {
        return Verdict::MatchesBest;
    }
    const double gap_db = emse_db(report.j_ex) - emse_db(best);
    if (std::abs(gap_db) <= tol_db) {
        return Verdict::MatchesBest;
    }
    if (gap_db < -tol_db) {
        if (report.j_ex_12 < best) {
            const double predicted =
                predicted_combined_emse(report.j_ex_1, report.j_ex_2, report.j_ex_12);
            const double model_gap_db = emse_db(report.j_ex) - emse_db(predicted);
            return std::abs(model_gap_db) <= tol_db ? Verdict::BetterThanBoth
                                                     : Verdict::Violation;
        }
        return Verdict::BetterThanBoth;
    }
    return Verdict::Violation;
}

std::optional<std::size_t> convergence_time(std::span<const double> curve_db,
                                            double threshold_db, std::size_t hold) {
    hold = std::max<std::size_t>(hold, 1);
    std::size_t run = 0;
    for (std::size_t n = 0; n < curve_db.size(); ++n) {
        if (curve_db[n] < threshold_db) {
            if (++run == hold) {
                return n + 1 - hold;
            }
        } else {
            run = 0;
        }
    }
    return std::nullopt;
}

}  // namespace combofilter
