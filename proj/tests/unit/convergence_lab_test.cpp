#include <gtest/gtest.h>

#include <cmath>

#include "gbmlab/convergence_lab.hpp"
#include "gbmlab/report.hpp"

using namespace gbmlab;

namespace {

const VolBand kBand(0.5, 1.5);

SampledPath bang_bang_path(std::uint64_t seed, std::size_t n) {
    return simulate_path(
        VolatilityControl::bang_bang(kBand, [](double, double b) { return b > 0.0; }),
        TimeGrid(1.0, n), seed);
}

// Overwrites a simulated path with B_t = t and <B>_t = s^2 t.
SampledPath ramp_path(std::size_t n, double sigma) {
    auto path = simulate_path(VolatilityControl::constant(kBand, 1.0), TimeGrid(1.0, n), 0);
    for (std::size_t k = 0; k <= n; ++k) {
        path.b[k] = path.grid.node(k);
        path.qv[k] = sigma * sigma * path.grid.node(k);
    }
    return path;
}

LocalTimeField tent_field(std::size_t intervals) {
    LocalTimeField field;
    field.x_grid = uniform_grid(-1.0, 1.0, intervals);
    field.t_grid = {1.0};
    field.t_nodes = {0};
    for (double x : field.x_grid) field.values.push_back(1.0 - std::abs(x));
    return field;
}

}  // namespace

TEST(QvEpsilonApprox, MeshBandwidthIsRealizedVariance) {
    const auto path = bang_bang_path(1, 1024);
    double rv = 0.0;
    for (std::size_t k = 0; k < 512; ++k) {
        rv += (path.b[k + 1] - path.b[k]) * (path.b[k + 1] - path.b[k]);
    }
    EXPECT_NEAR(qv_epsilon_approx(path, path.grid.mesh(), 0.5), rv, 1e-12);
}

TEST(QvEpsilonApprox, LinearRamp) {
    const auto path = ramp_path(256, 1.0);
    for (std::size_t m : {1u, 4u, 32u}) {
        const double eps = m * path.grid.mesh();
        // windows must fit before T, so the last admissible start is T - eps
        EXPECT_NEAR(qv_epsilon_approx(path, eps, 1.0), eps * (1.0 - eps + path.grid.mesh()), 1e-12) << m;
        EXPECT_NEAR(qv_epsilon_approx(path, eps, 0.25), eps * 0.25, 1e-12) << m;
    }
}

TEST(QvEpsilonApprox, RejectsOffMeshBandwidth) {
    const auto path = ramp_path(64, 1.0);
    EXPECT_THROW(qv_epsilon_approx(path, 1.5 * path.grid.mesh(), 1.0), std::invalid_argument);
    EXPECT_THROW(qv_epsilon_approx(path, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(qv_shift_average(path, 0.3 * path.grid.mesh(), 1.0), std::invalid_argument);
}

TEST(QvShiftAverage, ClosedFormForConstantVolatility) {
    const std::size_t n = 1024;
    const double sigma = 1.3;
    const auto path = ramp_path(n, sigma);
    const double dt = path.grid.mesh();
    for (std::size_t m : {1u, 8u, 128u}) {
        for (std::size_t K : {0u, 100u, 1024u}) {
            const double expected = sigma * sigma * dt * static_cast<double>(std::min(K, n - m + 1));
            EXPECT_NEAR(qv_shift_average(path, m * dt, path.grid.node(K)), expected, 1e-12) << m << ' ' << K;
        }
    }
    EXPECT_EQ(qv_shift_average(ramp_path(n, 0.0), 8 * dt, 1.0), 0.0);
}

TEST(LocaltimeSquareSum, ZeroField) {
    auto field = tent_field(64);
    for (auto& v : field.values) v = 0.0;
    const auto s = localtime_square_sum(field, 1.0, -1.0, 1.0, 5);
    EXPECT_EQ(s.lhs, 0.0);
    EXPECT_EQ(s.rhs, 0.0);
    EXPECT_EQ(s.ratio(), 0.0);
}

TEST(LocaltimeSquareSum, TentProfile) {
    const auto field = tent_field(64);
    for (unsigned level : {1u, 3u, 6u}) {
        const auto s = localtime_square_sum(field, 1.0, -1.0, 1.0, level);
        EXPECT_NEAR(s.lhs, 4.0 * std::ldexp(1.0, -static_cast<int>(level)), 1e-12) << level;
        EXPECT_NEAR(s.rhs, 4.0, 1e-12);
    }
    EXPECT_THROW(localtime_square_sum(field, 1.0, -1.5, 1.0, 2), std::invalid_argument);
    EXPECT_THROW(localtime_square_sum(field, 0.5, -1.0, 1.0, 2), std::invalid_argument);
}

TEST(ConvergenceTable, LinRatioStaysNearOne) {
    ConvergenceSpec spec;
    spec.experiment = "lin_square_sum";
    spec.ladder = {6};
    spec.control = VolatilityControl::bang_bang(kBand, [](double, double b) { return b > 0.0; });
    spec.n_steps = 1u << 14;
    spec.seeds = 20;
    const auto rows = convergence_table(spec);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].target, 1.0);
    EXPECT_NEAR(rows[0].estimate, 1.0, 0.2);
}

TEST(ConvergenceTable, AppendixLadderShrinks) {
    ConvergenceSpec spec;
    spec.experiment = "appendix_eps";
    spec.ladder = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    const auto rows = convergence_table(spec);
    ASSERT_EQ(rows.size(), 5u);
    std::vector<double> errors;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].level, i);
        EXPECT_EQ(rows[i].ladder_value, spec.ladder[i]);
        errors.push_back(rows[i].abs_error);
    }
    EXPECT_TRUE(trend_passes(errors));
    EXPECT_LT(errors.back(), errors.front());
}

TEST(ConvergenceTable, BatchesSplitSeeds) {
    ConvergenceSpec spec;
    spec.experiment = "qv_shift";
    spec.ladder = {1.0 / 16, 1.0 / 64};
    spec.n_steps = 256;
    spec.seeds = 6;
    spec.batches = 3;
    const auto rows = convergence_table(spec);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[4].level, 1u);
    EXPECT_EQ(rows[4].seed_batch, 1u);
    // constant unit volatility: every path has the same quadratic variation
    EXPECT_NEAR(rows[0].estimate, 1.0 - 1.0 / 16 + 1.0 / 256, 1e-12);
}

TEST(ConvergenceTable, Validation) {
    ConvergenceSpec spec;
    spec.experiment = "appendix_eps";
    spec.seeds = 2;
    EXPECT_THROW(convergence_table(spec), std::invalid_argument);
    spec.ladder = {0.25};
    spec.batches = 3;
    EXPECT_THROW(convergence_table(spec), std::invalid_argument);
    spec.batches = 1;
    spec.experiment = "nope";
    EXPECT_THROW(convergence_table(spec), std::invalid_argument);
}
