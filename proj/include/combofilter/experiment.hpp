#ifndef COMBOFILTER_EXPERIMENT_HPP
#define COMBOFILTER_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "combofilter/combiner.hpp"
#include "combofilter/filters.hpp"
#include "combofilter/scenario.hpp"

namespace combofilter {

enum class AlgorithmKind {
    NsaFast,  ///< standalone NSA with mu_fast
    NsaSlow,  ///< standalone NSA with mu_slow
    NsaNsa,   ///< NSA(mu_fast) + NSA(mu_slow) combination
    NlmsNsa,  ///< NLMS(mu_fast) + NSA(mu_slow) combination
};

bool is_combination(AlgorithmKind kind) noexcept;

struct AlgorithmSpec {
    std::string name;
    AlgorithmKind kind{AlgorithmKind::NsaNsa};
    MixingRule mixing_rule{MixingRule::SignCost};
    Transfer transfer{Transfer::Tracking};

    bool operator==(const AlgorithmSpec&) const = default;
};

struct ExperimentConfig {
    std::size_t trials{50};
    std::size_t horizon{20000};
    /// Trailing samples treated as steady state.
    std::size_t steady_window{2000};
    /// Margin above a curve's steady-state level used for convergence times.
    double convergence_threshold_db{3.0};
    double tol_db{1.0};

    ScenarioConfig scenario{};
    RngSpec rng{};

    double mu_fast{0.05};
    double mu_slow{0.005};
    double regularization{1e-4};
    /// mixing_rule and transfer are taken from each AlgorithmSpec.
    CombinerConfig combiner{};

    std::vector<AlgorithmSpec> algorithms;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError (see config.hpp) naming the offending field.
void validate(const ExperimentConfig& config);

/// Per-sample records of one algorithm over one trial. Component and mixing
/// series are empty for standalone filters.
struct AlgorithmTrajectory {
    std::vector<double> output;
    std::vector<double> e_a;
    std::vector<double> e_a1;
    std::vector<double> e_a2;
    std::vector<double> lambda;
    std::vector<double> a;
    std::vector<double> lambda_u;
    std::size_t transfers{0};
};

/// One entry per configured algorithm, in configuration order.
using TrialResult = std::vector<AlgorithmTrajectory>;

/// (w0 - w)^T x.
double a_priori_error(std::span<const double> w0, std::span<const double> w,
                      const TapDelayLine& x) noexcept;

/// 10 log10(mean); -inf for a zero mean.
double emse_db(double e_a_sq_mean) noexcept;

/// Runs every configured algorithm over the same trial signals.
TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial_index);

struct LearningCurve {
    /// Trial mean of e_a^2 per sample.
    std::vector<double> mean_sq;

    std::vector<double> db() const;
};

struct MixingTrace {
    std::vector<double> lambda_mean;
    std::vector<double> a_mean;
};

enum class Verdict { MatchesBest, BetterThanBoth, Violation };

const char* to_string(Verdict verdict) noexcept;

struct SteadyStateReport {
    double j_ex_1{};
    double j_ex_2{};
    double j_ex_12{};
    double j_ex{};
    double j_ex_u{};
    double lambda_mean{};
    /// Pooled variance of lambda over the window and all trials.
    double lambda_variance{};
    /// Clipped optimal mean mixing parameter implied by j_ex_1, j_ex_2, j_ex_12.
    double lambda_predicted{};
    Verdict verdict{Verdict::Violation};
};

struct AlgorithmSummary {
    std::string name;
    AlgorithmKind kind{};
    LearningCurve curve;
    std::optional<MixingTrace> mixing;
    /// Mean e_a^2 over the steady-state window and all trials.
    double steady_state{};
    std::optional<std::size_t> convergence_time;
    std::optional<SteadyStateReport> report;
    double mean_transfers{};
};

struct MonteCarloResult {
    std::vector<AlgorithmSummary> algorithms;

    const AlgorithmSummary& at(const std::string& name) const;
};

/// Sums trial results in the order they are added.
class MonteCarloAccumulator {
public:
    explicit MonteCarloAccumulator(const ExperimentConfig& config);

    void add(const TrialResult& trial);
    std::size_t trials() const noexcept { return count_; }
    MonteCarloResult finish() const;

private:
    struct Sums {
        std::vector<double> e_a_sq;
        std::vector<double> lambda;
        std::vector<double> a;
        double s11{}, s22{}, s12{}, sj{}, su{}, sl{}, sl2{};
        double transfers{};
    };

    const ExperimentConfig* config_;
    std::vector<Sums> sums_;
    std::size_t count_{0};
};

/// Monte Carlo average over config.trials trials. Up to `jobs` trials run
/// concurrently; the reduction always proceeds in trial-index order, so the
/// result is bit-identical for any `jobs`.
MonteCarloResult run_monte_carlo(const ExperimentConfig& config, unsigned jobs = 1);

/// Sum of a[n] * b[n] over the final `window` samples.
double window_product_sum(std::span<const double> a, std::span<const double> b,
                          std::size_t window) noexcept;

/// Mean of e_a1 * e_a2 over the final `window` samples of every trajectory.
double estimate_cross_emse(std::span<const std::vector<double>> e_a1,
                           std::span<const std::vector<double>> e_a2, std::size_t window);

/// J_ex,12 + dJ1 dJ2 / (dJ1 + dJ2) with dJi = J_ex,i - J_ex,12.
double predicted_combined_emse(double j_ex_1, double j_ex_2, double j_ex_12) noexcept;

/// dJ2 / (dJ1 + dJ2) clipped to [1 - lambda_plus, lambda_plus].
double predicted_mixing(double j_ex_1, double j_ex_2, double j_ex_12, double lambda_plus) noexcept;

Verdict check_optimality(const SteadyStateReport& report, double tol_db) noexcept;

/// First index from which the curve stays strictly below `threshold_db` for
/// `hold` consecutive samples; nullopt if that never happens.
std::optional<std::size_t> convergence_time(std::span<const double> curve_db,
                                            double threshold_db, std::size_t hold = 100);

}  // namespace combofilter

#endif  // COMBOFILTER_EXPERIMENT_HPP
