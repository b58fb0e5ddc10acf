// Frozen-output scalar model of the mixing stage, shared by the unit and
// acceptance suites. The model error is written out directly rather than via
// combined_output() so it stays independent of the code under test.
#ifndef COMBOFILTER_TESTS_MIXING_CHECKS_HPP
#define COMBOFILTER_TESTS_MIXING_CHECKS_HPP

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>

#include "combofilter/combiner.hpp"

namespace combofilter::testing {

inline double frozen_error(double a, double d, double y1, double y2) {
    const double s = 1.0 / (1.0 + std::exp(-a));
    return d - (s * y1 + (1.0 - s) * y2);
}

struct ScalarInstance {
    double a, d, y1, y2;
};

/// a in [-a_plus, a_plus]; outputs in [-5, 5] with |y1 - y2| >= 0.1 so the
/// derivative is not swamped by cancellation in d - y.
inline ScalarInstance draw_instance(std::mt19937_64& rng, double a_plus) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> gap(0.1, 5.0);
    ScalarInstance inst{};
    inst.a = a_plus * unit(rng);
    inst.y1 = 5.0 * unit(rng);
    inst.y2 = inst.y1 + (unit(rng) < 0.0 ? -1.0 : 1.0) * gap(rng);
    inst.d = 5.0 * unit(rng);
    return inst;
}

struct GradientCheck {
    std::size_t count{0};
    double worst_relative{0.0};
};

/// Central differences of frozen_error (step h) against error_gradient_wrt_a.
inline GradientCheck check_gradient(std::size_t n, std::uint64_t seed, double h = 1e-5) {
    std::mt19937_64 rng(seed);
    GradientCheck out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = draw_instance(rng, 4.0);
        const double fd = (frozen_error(s.a + h, s.d, s.y1, s.y2) -
                           frozen_error(s.a - h, s.d, s.y1, s.y2)) /
                          (2.0 * h);
        const double analytic = error_gradient_wrt_a(lambda_from_a(s.a), s.y1, s.y2);
        const double rel = std::abs(fd - analytic) / std::abs(analytic);
        out.worst_relative = std::max(out.worst_relative, rel);
        ++out.count;
    }
    return out;
}

struct ContractionCheck {
    std::size_t count{0};
    std::size_t increased{0};
    std::size_t strictly_decreased{0};
};

/// Applies one sign-rule update with rho_a = fraction * bound and compares
/// |e| before and after in the frozen-output model.
inline ContractionCheck check_contraction(std::size_t n, std::uint64_t seed, double fraction,
                                          double a_plus = 4.0) {
    std::mt19937_64 rng(seed);
    ContractionCheck out;
    while (out.count < n) {
        const auto s = draw_instance(rng, a_plus);
        const double lambda = lambda_from_a(s.a);
        const double e = frozen_error(s.a, s.d, s.y1, s.y2);
        if (e == 0.0) continue;
        const double bound = rho_a_upper_bound(e, s.y1, s.y2, lambda);
        const double a_next = update_a_sign(s.a, e, s.y1, s.y2, lambda, fraction * bound);
        const double e_next = frozen_error(a_next, s.d, s.y1, s.y2);
        ++out.count;
        if (std::abs(e_next) > std::abs(e)) ++out.increased;
        if (std::abs(e_next) < std::abs(e)) ++out.strictly_decreased;
    }
    return out;
}

/// Balanced instance with a small residual: a = 0, y1 = 1, y2 = -1, d = 0.01.
/// An oversized step carries y past d.
inline bool overshoot_instance_increases(double fraction) {
    const double a = 0.0, d = 0.01, y1 = 1.0, y2 = -1.0;
    const double lambda = lambda_from_a(a);
    const double e = frozen_error(a, d, y1, y2);
    const double rho = fraction * rho_a_upper_bound(e, y1, y2, lambda);
    const double e_next = frozen_error(update_a_sign(a, e, y1, y2, lambda, rho), d, y1, y2);
    return std::abs(e_next) > std::abs(e);
}

}  // namespace combofilter::testing

#endif  // COMBOFILTER_TESTS_MIXING_CHECKS_HPP
