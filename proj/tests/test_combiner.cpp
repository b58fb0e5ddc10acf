#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "combofilter/combiner.hpp"
#include "mixing_checks.hpp"

namespace combofilter {
namespace {

TEST(LambdaFromA, Examples) {
    EXPECT_EQ(lambda_from_a(0.0), 0.5);
    // 50-digit reference: 0.98201379003790844197
    EXPECT_NEAR(lambda_from_a(4.0), 0.98201379003790844197, 1e-16);
    for (double a : {-7.5, -1.0, 0.3, 2.0, 9.0}) {
        EXPECT_NEAR(lambda_from_a(-a), 1.0 - lambda_from_a(a), 1e-15);
    }
}

TEST(LambdaFromA, StrictlyIncreasing) {
    double prev = lambda_from_a(-20.0);
    for (double a = -19.9; a <= 20.0; a += 0.1) {
        const double cur = lambda_from_a(a);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(CombinedOutput, Examples) {
    EXPECT_EQ(combined_output(0.5, 1.0, 3.0), 2.0);
    EXPECT_EQ(combined_output(1.0, 1.7, -123.0), 1.7);
    EXPECT_EQ(combined_output(0.0, 1.7, -123.0), -123.0);
    EXPECT_EQ(combined_output(0.25, 4.0, 0.0), 1.0);
}

TEST(CombinedError, ExamplesAndIdentity) {
    EXPECT_EQ(combined_error(0.5, 1.0, 3.0), 2.0);
    EXPECT_EQ(combined_error(1.0, -0.4, 8.0), -0.4);
    EXPECT_EQ(combined_error(0.25, 4.0, 0.0), 1.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double d = u(rng), y1 = u(rng), y2 = u(rng), l = lam(rng);
        const double e = combined_error(l, d - y1, d - y2);
        const double ref = d - combined_output(l, y1, y2);
        EXPECT_NEAR(e, ref, 1e-12 * (std::abs(d) + std::abs(y1) + std::abs(y2)));
        const double y = combined_output(l, y1, y2);
        EXPECT_GE(y, std::min(y1, y2) - 1e-12 * std::abs(y1 - y2));
        EXPECT_LE(y, std::max(y1, y2) + 1e-12 * std::abs(y1 - y2));
    }
}

TEST(UpdateASign, Examples) {
    EXPECT_EQ(update_a_sign(0.7, 3.0, 2.0, 2.0, 0.3, 10.0), 0.7);
    EXPECT_EQ(update_a_sign(0.0, 1.0, 2.0, 0.0, 0.5, 10.0), 5.0);
    EXPECT_EQ(update_a_sign(0.2, 0.003, 1.3, -0.4, 0.7, 10.0),
              update_a_sign(0.2, 3.0, 1.3, -0.4, 0.7, 10.0));
    // Not clamped here.
    EXPECT_EQ(update_a_sign(3.0, 1.0, 4.0, 0.0, 0.5, 10.0), 13.0);
}

TEST(UpdateAGrad, Examples) {
    EXPECT_EQ(update_a_grad(0.7, 3.0, 2.0, 2.0, 0.3, 10.0), 0.7);
    EXPECT_EQ(update_a_grad(0.0, 1.0, 2.0, 0.0, 0.5, 10.0), 5.0);
    const double inc1 = update_a_grad(0.0, 1.0, 1.3, -0.4, 0.7, 10.0);
    const double inc2 = update_a_grad(0.0, 2.0, 1.3, -0.4, 0.7, 10.0);
    EXPECT_DOUBLE_EQ(inc2, 2.0 * inc1);
}

CombinerState two_tap_state(double a, std::uint64_t n, std::uint64_t window = 2) {
    CombinerConfig cfg;
    cfg.a_plus = 4.0;
    cfg.window_length = window;
    auto st = make_combiner({0.1, 1e-4, 2}, {0.01, 1e-4, 2}, cfg);
    st.fast.weights = {0.6, -0.1};
    st.slow.weights = {0.05, 0.3};
    st.a = a;
    st.lambda = lambda_from_a(a);
    st.n = n;
    return st;
}

TEST(ClampAndTransfer, UpperBranchCopiesWeights) {
    const auto out = clamp_and_transfer(two_tap_state(5.0, 1));
    EXPECT_EQ(out.state.a, 4.0);
    EXPECT_EQ(out.state.lambda, 1.0);
    EXPECT_EQ(out.state.slow.weights, out.state.fast.weights);
    EXPECT_TRUE(out.transfer_fired);
}

TEST(ClampAndTransfer, LowerBranchLeavesWeights) {
    const auto in = two_tap_state(-6.0, 3);
    const auto out = clamp_and_transfer(in);
    EXPECT_EQ(out.state.a, -4.0);
    EXPECT_EQ(out.state.lambda, 0.0);
    EXPECT_EQ(out.state.fast.weights, in.fast.weights);
    EXPECT_EQ(out.state.slow.weights, in.slow.weights);
    EXPECT_FALSE(out.transfer_fired);
}

TEST(ClampAndTransfer, InsideBandUnchanged) {
    const auto in = two_tap_state(1.0, 1);
    const auto out = clamp_and_transfer(in);
    EXPECT_EQ(out.state, in);
    EXPECT_FALSE(out.transfer_fired);
}

TEST(ClampAndTransfer, WindowMissUnchanged) {
    const auto in = two_tap_state(5.0, 2);
    const auto out = clamp_and_transfer(in);
    EXPECT_EQ(out.state, in);
    EXPECT_FALSE(out.transfer_fired);
}

TEST(ClampAndTransfer, BoundaryTies) {
    // a == -a+ is inside the lower strict branch boundary; a == a+ fires.
    const auto low = clamp_and_transfer(two_tap_state(-4.0, 1));
    EXPECT_EQ(low.state.a, -4.0);
    EXPECT_EQ(low.state.lambda, lambda_from_a(-4.0));
    const auto high = clamp_and_transfer(two_tap_state(4.0, 1));
    EXPECT_EQ(high.state.lambda, 1.0);
    EXPECT_TRUE(high.transfer_fired);
}

TEST(ClampStandard, ClampsEverySample) {
    auto st = two_tap_state(6.5, 2);
    const auto out = clamp_standard(st);
    EXPECT_EQ(out.a, 4.0);
    EXPECT_EQ(out.lambda, lambda_from_a(4.0));
    EXPECT_EQ(out.slow.weights, st.slow.weights);
    EXPECT_EQ(clamp_standard(two_tap_state(-9.0, 2)).a, -4.0);
}

TEST(CombinedWeights, Examples) {
    const std::vector<double> w{0.3, -1.2, 5.0};
    EXPECT_EQ(combined_weights(0.37, w, w), w);
    EXPECT_EQ(combined_weights(0.0, std::vector<double>{9.0, 9.0}, std::vector<double>{2.0, 0.5}),
              (std::vector<double>{2.0, 0.5}));
    EXPECT_EQ(combined_weights(0.5, std::vector<double>{2.0, 0.0}, std::vector<double>{0.0, 2.0}),
              (std::vector<double>{1.0, 1.0}));
    EXPECT_THROW(combined_weights(0.5, std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                 std::invalid_argument);
}

TEST(LambdaReported, Branches) {
    EXPECT_EQ(lambda_reported(4.0, 0.98, 4.0, 1e-2), 1.0);
    EXPECT_EQ(lambda_reported(3.995, 0.98, 4.0, 1e-2), 1.0);
    EXPECT_EQ(lambda_reported(-4.0, 0.02, 4.0, 1e-2), 0.0);
    EXPECT_EQ(lambda_reported(0.0, 0.5, 4.0, 1e-2), 0.5);
}

TEST(RhoAUpperBound, Examples) {
    EXPECT_DOUBLE_EQ(rho_a_upper_bound(1.0, 2.0, 0.0, 0.5), 8.0);
    EXPECT_EQ(rho_a_upper_bound(1.0, 3.0, 3.0, 0.5), std::numeric_limits<double>::infinity());
    EXPECT_EQ(rho_a_upper_bound(1.0, 3.0, 1.0, 1.0), std::numeric_limits<double>::infinity());
    EXPECT_DOUBLE_EQ(rho_a_upper_bound(-2.0, 2.0, 0.0, 0.5), 2.0 * rho_a_upper_bound(1.0, 2.0, 0.0, 0.5));
}

// Frozen values come from tests/oracles/combiner_step_oracle.py.
struct StepOracle {
    double lambda, y1, y2, y, e1, e2, e;
    std::vector<double> w1, w2;
    double a_next, lambda_next;
    bool fired;
};

void expect_step(const StepResult& r, const StepOracle& o) {
    const auto& d = r.diagnostics;
    EXPECT_NEAR(d.lambda, o.lambda, 1e-15);
    EXPECT_NEAR(d.y1, o.y1, 1e-15);
    EXPECT_NEAR(d.y2, o.y2, 1e-15);
    EXPECT_NEAR(d.y, o.y, 1e-15);
    EXPECT_NEAR(d.e1, o.e1, 1e-15);
    EXPECT_NEAR(d.e2, o.e2, 1e-15);
    EXPECT_NEAR(d.e, o.e, 1e-15);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(r.state.fast.weights[i], o.w1[i], 1e-15);
        EXPECT_NEAR(r.state.slow.weights[i], o.w2[i], 1e-15);
    }
    EXPECT_NEAR(r.state.a, o.a_next, 1e-14);
    EXPECT_NEAR(r.state.lambda, o.lambda_next, 1e-15);
    EXPECT_EQ(d.transfer_fired, o.fired);
}

TEST(Step, HandTraceInsideBand) {
    auto st = two_tap_state(0.3, 1);
    st.fast.weights = {0.2, -0.1};
    const auto r = step(st, TapDelayLine::from_values({1.5, -0.5}), 0.7);
    expect_step(r, {0.57444251681165898715, 0.35, -0.075, 0.16913806964495506954, 0.35, 0.775,
                    0.53086193035504493046, {0.25999760009599616015, -0.11999920003199872005},
                    {0.055999760009599616015, 0.29800007999680012799}, 1.3389478246856699435,
                    0.79231685834437931409, false});
    EXPECT_EQ(r.state.n, 2u);
}

TEST(Step, HandTraceUpperClampWithTransfer) {
    const auto r = step(two_tap_state(3.9, 3), TapDelayLine::from_values({1.5, -0.5}), 1.5);
    expect_step(r, {0.98015969426592249345, 0.95, -0.075, 0.92966368662257055578, 0.55, 1.575,
                    0.57033631337742944422, {0.65999760009599616015, -0.11999920003199872005},
                    {0.65999760009599616015, -0.11999920003199872005}, 4.0, 1.0, true});
    EXPECT_EQ(r.state.slow.weights, r.state.fast.weights);
}

TEST(Step, HandTraceWindowMiss) {
    const auto r = step(two_tap_state(3.9, 2), TapDelayLine::from_values({1.5, -0.5}), 1.5);
    expect_step(r, {0.98015969426592249345, 0.95, -0.075, 0.92966368662257055578, 0.55, 1.575,
                    0.57033631337742944422, {0.65999760009599616015, -0.11999920003199872005},
                    {0.055999760009599616015, 0.29800007999680012799}, 4.0993283470251723371,
                    0.98368672601254971647, false});
}

TEST(Step, ZeroErrorFixedPoint) {
    auto st = two_tap_state(0.8, 1);
    st.slow.weights = st.fast.weights;
    const auto x = TapDelayLine::from_values({0.4, 2.0});
    const double d = predict(st.fast, x);
    const auto r = step(st, x, d);
    EXPECT_EQ(r.state.fast.weights, st.fast.weights);
    EXPECT_EQ(r.state.slow.weights, st.slow.weights);
    EXPECT_EQ(r.state.a, st.a);
}

TEST(Step, SymmetricComponentsNeverMoveA) {
    auto st = make_combiner({0.05, 1e-4, 4}, {0.05, 1e-4, 4}, CombinerConfig{});
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    TapDelayLine x(4);
    for (int n = 0; n < 2000; ++n) {
        x.push(g(rng));
        auto r = step(std::move(st), x, 3.0 * g(rng));
        EXPECT_EQ(r.diagnostics.y1, r.diagnostics.y2);
        st = std::move(r.state);
        ASSERT_EQ(st.a, 0.0);
    }
}

class CombinerRun : public ::testing::TestWithParam<std::tuple<MixingRule, Transfer, std::uint64_t>> {};

TEST_P(CombinerRun, PerStepInvariants) {
    const auto [rule, transfer, window] = GetParam();
    CombinerConfig cfg;
    cfg.mixing_rule = rule;
    cfg.transfer = transfer;
    cfg.window_length = window;
    auto st = make_combiner({0.05, 1e-4, 6}, {0.005, 1e-4, 6}, cfg);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    std::bernoulli_distribution spike(0.01);
    const std::vector<double> w0{0.5, -0.3, 0.2, 0.6, -0.1, 0.4};
    TapDelayLine x(6);
    for (int n = 0; n < 6000; ++n) {
        x.push(g(rng));
        const double d = dot(w0, x.values()) + 0.3 * g(rng) + (spike(rng) ? 90.0 * g(rng) : 0.0);
        const auto n_before = st.n;
        auto r = step(std::move(st), x, d);
        st = std::move(r.state);
        const auto& dg = r.diagnostics;
        const double scale = std::abs(dg.e1) + std::abs(dg.e2) + std::abs(d) + 1.0;
        EXPECT_NEAR(dg.e, dg.lambda * dg.e1 + (1.0 - dg.lambda) * dg.e2, 1e-12 * scale);
        EXPECT_NEAR(dg.y, d - dg.e, 1e-12 * scale);
        EXPECT_GE(st.lambda, 0.0);
        EXPECT_LE(st.lambda, 1.0);
        if (transfer == Transfer::None || (n_before - 1) % window == 0) {
            EXPECT_LE(std::abs(st.a), cfg.a_plus);
        }
        if (dg.transfer_fired) {
            EXPECT_EQ(st.slow.weights, st.fast.weights);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(
    RulesAndTransfers, CombinerRun,
    ::testing::Values(std::make_tuple(MixingRule::SignCost, Transfer::Tracking, 2u),
                      std::make_tuple(MixingRule::SignCost, Transfer::Tracking, 7u),
                      std::make_tuple(MixingRule::SquaredCost, Transfer::Tracking, 2u),
                      std::make_tuple(MixingRule::SignCost, Transfer::None, 2u),
                      std::make_tuple(MixingRule::SquaredCost, Transfer::None, 1u)));

TEST(Step, SpikeMagnitudeDoesNotMatterUnderSignRule) {
    // Same streams except one impulse scaled by 1e6; its sign dominates e either way.
    auto run = [](double spike_scale) {
        auto st = make_combiner({0.05, 1e-4, 4}, {0.005, 1e-4, 4}, CombinerConfig{});
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g(0.0, 1.0);
        const std::vector<double> w0{0.5, -0.5, 0.5, -0.5};
        TapDelayLine x(4);
        std::vector<double> a_traj;
        for (int n = 0; n < 3000; ++n) {
            x.push(g(rng));
            double d = dot(w0, x.values()) + 0.1 * g(rng);
            if (n == 1500) d += 500.0 * spike_scale;
            auto r = step(std::move(st), x, d);
            st = std::move(r.state);
            a_traj.push_back(st.a);
        }
        return std::make_pair(a_traj, st);
    };
    const auto [a1, s1] = run(1.0);
    const auto [a2, s2] = run(1e6);
    EXPECT_EQ(a1, a2);
    EXPECT_EQ(s1.fast.weights, s2.fast.weights);
    EXPECT_EQ(s1.slow.weights, s2.slow.weights);
}

TEST(MixingScalarModel, GradientMatchesFiniteDifferences) {
    const auto check = testing::check_gradient(2000, 3);
    EXPECT_EQ(check.count, 2000u);
    EXPECT_LT(check.worst_relative, 1e-6);
}

TEST(MixingScalarModel, SmallStepsContract) {
    const auto check = testing::check_contraction(2000, 4, 0.1);
    EXPECT_EQ(check.increased, 0u);
    EXPECT_EQ(check.strictly_decreased, check.count);
}

TEST(MixingScalarModel, OversizedStepOvershoots) {
    EXPECT_TRUE(testing::overshoot_instance_increases(3.0));
    EXPECT_FALSE(testing::overshoot_instance_increases(0.1));
}

}  // namespace
}  // namespace combofilter
