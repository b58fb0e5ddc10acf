#ifndef COMBOFILTER_SCENARIO_HPP
#define COMBOFILTER_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "combofilter/filters.hpp"

namespace combofilter {

using Rng = std::mt19937_64;

/// Independent random streams used by one Monte Carlo trial.
enum class Stream : std::uint32_t {
    Input = 1,
    Background = 2,
    ImpulseOccurrence = 3,
    ImpulseAmplitude = 4,
    System = 5,
    ChangeRedraw = 6,
};

/// Derives every random stream from one master seed. Streams for distinct
/// (trial, stream) pairs are seeded through std::seed_seq and never share
/// state.
struct RngSpec {
    std::uint64_t master_seed{1};

    Rng stream(std::uint64_t trial, Stream which) const;

    bool operator==(const RngSpec&) const = default;
};

enum class ChangeKind { SignFlip, Redraw };

struct SystemModel {
    std::vector<double> taps;
    std::optional<std::size_t> change_at;
    ChangeKind change_kind{ChangeKind::SignFlip};

    bool operator==(const SystemModel&) const = default;
};

/// Bernoulli-Gaussian impulses plus a Gaussian background at a target SNR.
struct NoiseModel {
    double impulse_probability{0.01};
    double impulse_variance{1e4 / 12.0};
    /// +inf disables the background noise.
    double snr_db{10.0};

    bool operator==(const NoiseModel&) const = default;
};

void validate(const NoiseModel& model);

/// i.i.d. N(0, variance) samples. Requires variance > 0.
std::vector<double> gen_wgn(std::size_t n_samples, double variance, Rng& rng);

/// v(n) = A(n) I(n), A ~ Bernoulli(c) from `occurrence`, I ~ N(0, sigma_I^2)
/// from `amplitude`. One amplitude is drawn per sample whatever A is, so the
/// amplitude stream stays aligned across values of c.
std::vector<double> gen_bg_impulse(std::size_t n_samples, const NoiseModel& model,
                                   Rng& occurrence, Rng& amplitude);

/// Background variance giving `snr_db` against the clean output power
/// input_variance * |w0|^2 of a white-input FIR system.
double snr_to_variance(std::span<const double> w0, double input_variance, double snr_db);

/// d = w0^T x + g + v.
double desired_signal(std::span<const double> w0, const TapDelayLine& x, double g, double v);

/// Unit-norm Gaussian FIR taps.
std::vector<double> draw_unknown_system(std::size_t num_taps, Rng& rng);

/// Applies the scheduled change when n == change_at; identity otherwise.
/// `redraw` is consumed only by ChangeKind::Redraw.
SystemModel apply_abrupt_change(SystemModel model, std::size_t n, Rng& redraw);

/// Everything needed to synthesize one trial's signals.
struct ScenarioConfig {
    std::size_t num_taps{10};
    double input_variance{1.0};
    NoiseModel noise{};
    std::optional<std::size_t> change_at{10000};
    ChangeKind change_kind{ChangeKind::SignFlip};

    bool operator==(const ScenarioConfig&) const = default;
};

void validate(const ScenarioConfig& config);

/// Pre-generated signals of one trial. `system_taps[k]` is the system in
/// force from sample `segment_start[k]` on.
struct TrialSignals {
    std::vector<double> input;
    std::vector<double> desired;
    std::vector<std::vector<double>> system_taps;
    std::vector<std::size_t> segment_start;

    /// Taps in force at sample n.
    std::span<const double> system_at(std::size_t n) const;
};

TrialSignals generate_trial(const ScenarioConfig& config, const RngSpec& rng,
                            std::uint64_t trial, std::size_t horizon);

}  // namespace combofilter

#endif  // COMBOFILTER_SCENARIO_HPP
