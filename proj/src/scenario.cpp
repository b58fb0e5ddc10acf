#include "combofilter/scenario.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace combofilter {

Rng RngSpec::stream(std::uint64_t trial, Stream which) const {
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed & 0xffffffffu),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(trial & 0xffffffffu),
        static_cast<std::uint32_t>(trial >> 32),
        static_cast<std::uint32_t>(which),
    };
    return Rng(seq);
}

void validate(const NoiseModel& model) {
    if (!(model.impulse_probability >= 0.0 && model.impulse_probability <= 1.0)) {
        throw std::invalid_argument("impulse_probability must lie in [0, 1]");
    }
    if (!(model.impulse_variance > 0.0) || std::isinf(model.impulse_variance)) {
        throw std::invalid_argument("impulse_variance must be a finite value > 0");
    }
    if (std::isnan(model.snr_db) || model.snr_db == -HUGE_VAL) {
        throw std::invalid_argument("snr_db must be a number or +inf");
    }
}

std::vector<double> gen_wgn(std::size_t n_samples, double variance, Rng& rng) {
    assert(variance > 0.0);
    std::normal_distribution<double> dist(0.0, std::sqrt(variance));
    std::vector<double> out(n_samples);
    for (auto& s : out) {
        s = dist(rng);
    }
    return out;
}

std::vector<double> gen_bg_impulse(std::size_t n_samples, const NoiseModel& model,
                                   Rng& occurrence, Rng& amplitude) {
    std::bernoulli_distribution hit(model.impulse_probability);
    std::normal_distribution<double> impulse(0.0, std::sqrt(model.impulse_variance));
    std::vector<double> out(n_samples);
    for (auto& s : out) {
        const double value = impulse(amplitude);
        s = hit(occurrence) ? value : 0.0;
    }
    return out;
}

double snr_to_variance(std::span<const double> w0, double input_variance, double snr_db) {
    const double signal_power = input_variance * dot(w0, w0);
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

double desired_signal(std::span<const double> w0, const TapDelayLine& x, double g, double v) {
    return dot(w0, x.values()) + g + v;
}

std::vector<double> draw_unknown_system(std::size_t num_taps, Rng& rng) {
    assert(num_taps >= 1);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> taps(num_taps);
    double norm_sq = 0.0;
    // A zero draw has probability zero, but keep the unit-norm contract exact.
    while (norm_sq == 0.0) {
        for (auto& t : taps) {
            t = dist(rng);
        }
        norm_sq = dot(taps, taps);
    }
    const double inv_norm = 1.0 / std::sqrt(norm_sq);
    for (auto& t : taps) {
        t *= inv_norm;
    }
    return taps;
}

SystemModel apply_abrupt_change(SystemModel model, std::size_t n, Rng& redraw) {
    if (!model.change_at || *model.change_at != n) {
        return model;
    }
    switch (model.change_kind) {
        case ChangeKind::SignFlip:
            for (auto& t : model.taps) {
                t = -t;
            }
            break;
        case ChangeKind::Redraw:
            model.taps = draw_unknown_system(model.taps.size(), redraw);
            break;
    }
    return model;
}

void validate(const ScenarioConfig& config) {
    if (config.num_taps < 1) {
        throw std::invalid_argument("num_taps must be >= 1");
    }
    if (!(config.input_variance > 0.0) || std::isinf(config.input_variance)) {
        throw std::invalid_argument("input_variance must be a finite value > 0");
    }
    validate(config.noise);
}

std::span<const double> TrialSignals::system_at(std::size_t n) const {
    std::size_t k = 0;
    while (k + 1 < segment_start.size() && segment_start[k + 1] <= n) {
        ++k;
    }
    return system_taps[k];
}

TrialSignals generate_trial(const ScenarioConfig& config, const RngSpec& rng,
                            std::uint64_t trial, std::size_t horizon) {
    auto system_rng = rng.stream(trial, Stream::System);
    auto input_rng = rng.stream(trial, Stream::Input);
    auto background_rng = rng.stream(trial, Stream::Background);
    auto occurrence_rng = rng.stream(trial, Stream::ImpulseOccurrence);
    auto amplitude_rng = rng.stream(trial, Stream::ImpulseAmplitude);
    auto redraw_rng = rng.stream(trial, Stream::ChangeRedraw);

    SystemModel system{draw_unknown_system(config.num_taps, system_rng), config.change_at,
                       config.change_kind};

    TrialSignals signals;
    signals.input = gen_wgn(horizon, config.input_variance, input_rng);

    const double background_variance =
        std::isinf(config.noise.snr_db)
            ? 0.0
            : snr_to_variance(system.taps, config.input_variance, config.noise.snr_db);
    const auto background = background_variance > 0.0
                                ? gen_wgn(horizon, background_variance, background_rng)
                                : std::vector<double>(horizon, 0.0);
    const auto impulses = gen_bg_impulse(horizon, config.noise, occurrence_rng, amplitude_rng);

    signals.system_taps.push_back(system.taps);
    signals.segment_start.push_back(0);
    signals.desired.resize(horizon);

    TapDelayLine x(config.num_taps);
    for (std::size_t n = 0; n < horizon; ++n) {
        if (system.change_at && *system.change_at == n) {
            system = apply_abrupt_change(std::move(system), n, redraw_rng);
            signals.system_taps.push_back(system.taps);
            signals.segment_start.push_back(n);
        }
        x.push(signals.input[n]);
        signals.desired[n] = desired_signal(system.taps, x, background[n], impulses[n]);
    }
    return signals;
}

}  // namespace combofilter
