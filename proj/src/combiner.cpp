#include "combofilter/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace combofilter {

void validate(const CombinerConfig& config) {
    if (!(config.rho_a > 0.0)) {
        throw std::invalid_argument("combiner rho_a must be > 0");
    }
    if (!(config.nu_a > 0.0)) {
        throw std::invalid_argument("combiner nu_a must be > 0");
    }
    if (!(config.a_plus > 0.0)) {
        throw std::invalid_argument("combiner a_plus must be > 0");
    }
    if (config.window_length < 1) {
        throw std::invalid_argument("combiner window_length must be >= 1");
    }
    if (!(config.eps_u > 0.0 && config.eps_u < config.a_plus)) {
        throw std::invalid_argument("combiner eps_u must lie in (0, a_plus)");
    }
}

CombinerState make_combiner(const FilterConfig& fast, const FilterConfig& slow,
                            const CombinerConfig& config) {
    validate(config);
    if (fast.num_taps != slow.num_taps) {
        throw std::invalid_argument("component filters must have equal num_taps");
    }
    CombinerState state;
    state.fast = make_filter(fast);
    state.slow = make_filter(slow);
    state.config = config;
    return state;
}

double lambda_from_a(double a) noexcept { return 1.0 / (1.0 + std::exp(-a)); }

double combined_output(double lambda, double y1, double y2) noexcept {
    return lambda * y1 + (1.0 - lambda) * y2;
}

double combined_error(double lambda, double e1, double e2) noexcept {
    return lambda * e1 + (1.0 - lambda) * e2;
}

double error_gradient_wrt_a(double lambda, double y1, double y2) noexcept {
    return lambda * (1.0 - lambda) * (y2 - y1);
}

double update_a_sign(double a, double e, double y1, double y2, double lambda,
                     double rho_a) noexcept {
    return a + rho_a * sign(e) * (y1 - y2) * lambda * (1.0 - lambda);
}

double update_a_grad(double a, double e, double y1, double y2, double lambda,
                     double nu_a) noexcept {
    return a + nu_a * e * (y1 - y2) * lambda * (1.0 - lambda);
}

ClampResult clamp_and_transfer(CombinerState state) {
    const auto& cfg = state.config;
    if ((state.n - 1) % cfg.window_length != 0) {
        return {std::move(state), false};
    }
    bool fired = false;
    if (state.a < -cfg.a_plus) {
        state.a = -cfg.a_plus;
        state.lambda = 0.0;
    }
    if (state.a >= cfg.a_plus) {
        state.a = cfg.a_plus;
        state.lambda = 1.0;
        state.slow.weights = state.fast.weights;
        fired = true;
    }
    return {std::move(state), fired};
}

CombinerState clamp_standard(CombinerState state) {
    const double bound = state.config.a_plus;
    if (state.a > bound || state.a < -bound) {
        state.a = std::clamp(state.a, -bound, bound);
        state.lambda = lambda_from_a(state.a);
    }
    return state;
}

std::vector<double> combined_weights(double lambda, std::span<const double> w1,
                                     std::span<const double> w2) {
    if (w1.size() != w2.size()) {
        throw std::invalid_argument("combined_weights: length mismatch");
    }
    std::vector<double> w(w1.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = lambda * w1[i] + (1.0 - lambda) * w2[i];
    }
    return w;
}

double lambda_reported(double a, double lambda, double a_plus, double eps_u) noexcept {
    if (a >= a_plus - eps_u) return 1.0;
    if (a <= -a_plus + eps_u) return 0.0;
    return lambda;
}

double rho_a_upper_bound(double e, double y1, double y2, double lambda) noexcept {
    const double diff = y1 - y2;
    const double mix = lambda * (1.0 - lambda);
    const double denom = diff * diff * mix * mix;
    if (denom == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 2.0 * std::abs(e) / denom;
}

StepResult step(CombinerState state, const TapDelayLine& x, double d) {
    const CombinerConfig cfg = state.config;
    StepDiagnostics diag;
    diag.a = state.a;
    diag.lambda = state.lambda;
    diag.lambda_reported = lambda_reported(state.a, state.lambda, cfg.a_plus, cfg.eps_u);

    diag.y1 = predict(state.fast, x);
    diag.y2 = predict(state.slow, x);
    diag.e1 = d - diag.y1;
    diag.e2 = d - diag.y2;
    diag.y = combined_output(state.lambda, diag.y1, diag.y2);
    diag.e = combined_error(state.lambda, diag.e1, diag.e2);

    state.fast = update(std::move(state.fast), x, diag.e1);
    state.slow = update(std::move(state.slow), x, diag.e2);

    switch (cfg.mixing_rule) {
        case MixingRule::SignCost:
            state.a = update_a_sign(state.a, diag.e, diag.y1, diag.y2, state.lambda, cfg.rho_a);
            break;
        case MixingRule::SquaredCost:
            state.a = update_a_grad(state.a, diag.e, diag.y1, diag.y2, state.lambda, cfg.nu_a);
            break;
    }
    state.lambda = lambda_from_a(state.a);

    switch (cfg.transfer) {
        case Transfer::Tracking: {
            auto clamped = clamp_and_transfer(std::move(state));
            state = std::move(clamped.state);
            diag.transfer_fired = clamped.transfer_fired;
            break;
        }
        case Transfer::None:
            state = clamp_standard(std::move(state));
            break;
    }
    ++state.n;
    return {std::move(state), diag};
}

}  // namespace combofilter
