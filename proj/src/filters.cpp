#include "combofilter/filters.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace combofilter {

void validate(const FilterConfig& config) {
    if (!(config.step_size > 0.0)) {
        throw std::invalid_argument("filter step_size must be > 0");
    }
    if (!(config.regularization > 0.0)) {
        throw std::invalid_argument("filter regularization must be > 0");
    }
    if (config.num_taps < 1) {
        throw std::invalid_argument("filter num_taps must be >= 1");
    }
}

TapDelayLine::TapDelayLine(std::size_t num_taps) : taps_(num_taps, 0.0) {}

TapDelayLine TapDelayLine::from_values(std::initializer_list<double> values) {
    return from_values(std::span<const double>(values.begin(), values.size()));
}

TapDelayLine TapDelayLine::from_values(std::span<const double> values) {
    TapDelayLine line(values.size());
    std::copy(values.begin(), values.end(), line.taps_.begin());
    return line;
}

void TapDelayLine::push(double sample) {
    if (taps_.empty()) {
        return;
    }
    std::shift_right(taps_.begin(), taps_.end(), 1);
    taps_.front() = sample;
}

double TapDelayLine::energy() const noexcept { return dot(taps_, taps_); }

FilterState make_filter(const FilterConfig& config) {
    validate(config);
    return FilterState{std::vector<double>(config.num_taps, 0.0), config};
}

int sign(double x) noexcept {
    if (x > 0.0) return 1;
    if (x < 0.0) return -1;
    return 0;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    assert(a.size() == b.size());
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double predict(const FilterState& state, const TapDelayLine& x) noexcept {
    return dot(state.weights, x.values());
}

namespace {

// w += gain * x / (eps + |x|^2)
void normalized_step(FilterState& state, const TapDelayLine& x, double gain) {
    assert(state.weights.size() == x.size());
    if (gain == 0.0) {
        return;
    }
    const double scale = gain / (state.config.regularization + x.energy());
    const auto xs = x.values();
    for (std::size_t i = 0; i < state.weights.size(); ++i) {
        state.weights[i] += scale * xs[i];
    }
}

}  // namespace

FilterState nsa_update(FilterState state, const TapDelayLine& x, double e) {
    normalized_step(state, x, state.config.step_size * sign(e));
    return state;
}

FilterState nlms_update(FilterState state, const TapDelayLine& x, double e) {
    normalized_step(state, x, state.config.step_size * e);
    return state;
}

FilterState update(FilterState state, const TapDelayLine& x, double e) {
    switch (state.config.rule) {
        case UpdateRule::Nlms:
            return nlms_update(std::move(state), x, e);
        case UpdateRule::Nsa:
            break;
    }
    return nsa_update(std::move(state), x, e);
}

}  // namespace combofilter
