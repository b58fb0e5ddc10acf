#ifndef COMBOFILTER_COMBINER_HPP
#define COMBOFILTER_COMBINER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "combofilter/filters.hpp"

namespace combofilter {

/// Cost function driving the auxiliary mixing variable.
///   SignCost:    a += rho_a * sign(e) * (y1 - y2) * lambda * (1 - lambda)
///   SquaredCost: a += nu_a  *      e  * (y1 - y2) * lambda * (1 - lambda)
enum class MixingRule { SignCost, SquaredCost };

/// None keeps the standard convex scheme (a clamped to [-a+, a+] on every
/// sample, no coefficient copy). Tracking runs the windowed clamp that
/// copies the fast weights into the slow filter on upper saturation.
enum class Transfer { None, Tracking };

struct CombinerConfig {
    double rho_a{10.0};
    double nu_a{10.0};
    double a_plus{4.0};
    std::uint64_t window_length{2};
    double eps_u{1e-2};
    MixingRule mixing_rule{MixingRule::SignCost};
    Transfer transfer{Transfer::Tracking};

    bool operator==(const CombinerConfig&) const = default;
};

/// Throws std::invalid_argument on rho_a <= 0, nu_a <= 0, a_plus <= 0,
/// window_length < 1 or eps_u outside (0, a_plus).
void validate(const CombinerConfig& config);

struct CombinerState {
    double a{0.0};
    double lambda{0.5};
    /// Loop index of the iteration about to run; starts at 1.
    std::uint64_t n{1};
    FilterState fast;
    FilterState slow;
    CombinerConfig config;

    bool operator==(const CombinerState&) const = default;
};

/// Initial state: zero weights, a = 0, lambda = 0.5, n = 1.
CombinerState make_combiner(const FilterConfig& fast, const FilterConfig& slow,
                            const CombinerConfig& config);

struct StepDiagnostics {
    double y1{}, y2{}, y{};
    double e1{}, e2{}, e{};
    /// Mixing variable and parameter the output was formed with.
    double a{};
    double lambda{};
    /// Thresholded lambda_u for the same sample.
    double lambda_reported{};
    bool transfer_fired{false};
};

struct StepResult {
    CombinerState state;
    StepDiagnostics diagnostics;
};

struct ClampResult {
    CombinerState state;
    bool transfer_fired{false};
};

double lambda_from_a(double a) noexcept;

double combined_output(double lambda, double y1, double y2) noexcept;
double combined_error(double lambda, double e1, double e2) noexcept;

/// Derivative of the combined error e = d - y with respect to a, holding the
/// component outputs fixed: lambda (1 - lambda) (y2 - y1).
double error_gradient_wrt_a(double lambda, double y1, double y2) noexcept;

/// Sign-cost mixing update. Not clamped.
double update_a_sign(double a, double e, double y1, double y2, double lambda,
                     double rho_a) noexcept;

/// Squared-cost mixing update. Not clamped.
double update_a_grad(double a, double e, double y1, double y2, double lambda,
                     double nu_a) noexcept;

/// Windowed clamp with tracking weight transfer. Acts only when
/// (n - 1) mod N0 == 0: a < -a+ pins (a, lambda) to (-a+, 0); a >= a+ pins
/// them to (a+, 1) and copies the fast weights into the slow filter.
ClampResult clamp_and_transfer(CombinerState state);

/// Standard every-sample clamp of a to [-a+, a+]; lambda follows the sigmoid.
CombinerState clamp_standard(CombinerState state);

/// Elementwise lambda * w1 + (1 - lambda) * w2.
std::vector<double> combined_weights(double lambda, std::span<const double> w1,
                                     std::span<const double> w2);

/// 1 above a+ - eps_u, 0 below -a+ + eps_u, lambda in between.
double lambda_reported(double a, double lambda, double a_plus, double eps_u) noexcept;

/// Largest mixing step that still contracts |e| to first order:
/// 2|e| / ((y1 - y2)^2 lambda^2 (1 - lambda)^2). +inf when the denominator
/// vanishes.
double rho_a_upper_bound(double e, double y1, double y2, double lambda) noexcept;

/// One full iteration: predict, form the combined error, adapt both
/// components, adapt a, recompute lambda, then clamp/transfer.
StepResult step(CombinerState state, const TapDelayLine& x, double d);

}  // namespace combofilter

#endif  // COMBOFILTER_COMBINER_HPP
