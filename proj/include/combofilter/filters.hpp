#ifndef COMBOFILTER_FILTERS_HPP
#define COMBOFILTER_FILTERS_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace combofilter {

/// Weight-update rule of a component filter.
enum class UpdateRule { Nsa, Nlms };

struct FilterConfig {
    double step_size{0.05};
    double regularization{1e-4};
    std::size_t num_taps{10};
    UpdateRule rule{UpdateRule::Nsa};

    bool operator==(const FilterConfig&) const = default;
};

/// Throws std::invalid_argument unless step_size > 0, regularization > 0 and
/// num_taps >= 1.
void validate(const FilterConfig& config);

/// Input regressor, newest sample first. Starts zero-filled.
class TapDelayLine {
public:
    explicit TapDelayLine(std::size_t num_taps);

    /// Builds a line holding exactly `values` (newest first).
    static TapDelayLine from_values(std::initializer_list<double> values);
    static TapDelayLine from_values(std::span<const double> values);

    /// Shifts `sample` in and drops the oldest entry.
    void push(double sample);

    std::span<const double> values() const noexcept { return taps_; }
    std::size_t size() const noexcept { return taps_.size(); }
    double operator[](std::size_t i) const noexcept { return taps_[i]; }

    /// Squared Euclidean norm of the current contents.
    double energy() const noexcept;

private:
    std::vector<double> taps_;
};

struct FilterState {
    std::vector<double> weights;
    FilterConfig config;

    bool operator==(const FilterState&) const = default;
};

/// Validated filter with all-zero weights.
FilterState make_filter(const FilterConfig& config);

/// Returns 1, 0 or -1. sign(0) is exactly 0.
int sign(double x) noexcept;

double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Filter output w^T x.
double predict(const FilterState& state, const TapDelayLine& x) noexcept;

/// Normalized sign algorithm: w += mu * sign(e) * x / (eps + |x|^2).
FilterState nsa_update(FilterState state, const TapDelayLine& x, double e);

/// Normalized LMS: w += mu * e * x / (eps + |x|^2).
FilterState nlms_update(FilterState state, const TapDelayLine& x, double e);

/// Dispatches on state.config.rule.
FilterState update(FilterState state, const TapDelayLine& x, double e);

}  // namespace combofilter

#endif  // COMBOFILTER_FILTERS_HPP
