#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gbmlab/quad_cov.hpp"
#include "gbmlab/young_pvar.hpp"

using namespace gbmlab;

namespace {

const VolBand kBand(0.5, 1.5);

SampledPath path_for(std::uint64_t seed, std::size_t n = 1u << 14) {
    return simulate_path(
        VolatilityControl::bang_bang(kBand, [](double, double b) { return b > 0.0; }),
        TimeGrid(1.0, n), seed);
}

LocalTimeField field_for(const SampledPath& path) {
    const double eps = default_bandwidth(path);
    return local_time_field(path, default_x_grid(path, eps), eps, path.n_steps());
}

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

double realized_variance(const SampledPath& path) {
    double s = 0.0;
    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        s += (path.b[k + 1] - path.b[k]) * (path.b[k + 1] - path.b[k]);
    }
    return s;
}

// Index of the last field level strictly below zero.
std::size_t left_of_zero(const LocalTimeField& field) {
    const auto it = std::lower_bound(field.x_grid.begin(), field.x_grid.end(), 0.0);
    return static_cast<std::size_t>(it - field.x_grid.begin()) - 1;
}

// Left-point Abel sum of sign against the final profile: the jump of sign
// is split over two cells when zero is itself a grid level.
double sign_jump_mass(const LocalTimeField& field) {
    const std::size_t j = left_of_zero(field);
    const auto row = field.final_row();
    return field.x_grid[j + 1] == 0.0 ? row[j] + row[j + 1] : 2.0 * row[j];
}

}  // namespace

TEST(QuadraticCovariation, IdentityMatchesItoAlgebraAtEveryLevel) {
    const auto path = path_for(1, 4096);
    for (std::size_t coarsen : {1u, 2u, 16u, 512u, 4096u}) {
        double ito = 0.0;
        for (std::size_t k = 0; k + coarsen <= path.n_steps(); k += coarsen) {
            ito += path.b[k] * (path.b[k + coarsen] - path.b[k]);
        }
        const double qc = quadratic_covariation([](double x) { return x; }, path, coarsen);
        EXPECT_NEAR(qc + 2.0 * ito, path.b_final() * path.b_final(), 1e-12);
    }
    EXPECT_NEAR(quadratic_covariation([](double x) { return x; }, path, 1), realized_variance(path),
                1e-12);
}

TEST(QuadraticCovariation, ConstantGivesZero) {
    const auto path = path_for(2, 1024);
    EXPECT_EQ(quadratic_covariation([](double) { return 3.0; }, path, 4), 0.0);
}

TEST(QuadraticCovariation, CoarseningMustDivide) {
    const auto path = path_for(2, 1000);
    EXPECT_THROW(quadratic_covariation([](double x) { return x; }, path, 3), std::invalid_argument);
    EXPECT_THROW(quadratic_covariation([](double x) { return x; }, path, 0), std::invalid_argument);
}

TEST(QuadraticCovariation, Bilinear) {
    const auto path = path_for(3, 2048);
    const auto f = [](double x) { return std::sin(x); };
    const auto g = [](double x) { return x * x; };
    const double combined =
        quadratic_covariation([&](double x) { return 2.0 * f(x) - 0.5 * g(x); }, path, 4);
    EXPECT_NEAR(combined,
                2.0 * quadratic_covariation(f, path, 4) - 0.5 * quadratic_covariation(g, path, 4), 1e-12);
}

TEST(QuadraticCovariation, SmoothIntegrandApproachesQvIntegralOfDerivative) {
    std::vector<double> coarse_err(2, 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto path = path_for(seed);
        const double target = qv_integral([](double x) { return std::cos(x); }, path);
        const auto f = [](double x) { return std::sin(x); };
        coarse_err[0] += std::abs(quadratic_covariation(f, path, 64) - target);
        const double fine = quadratic_covariation(f, path, 1);
        coarse_err[1] += std::abs(fine - target);
        EXPECT_NEAR(fine, target, 0.05 * std::abs(target)) << seed;
    }
    EXPECT_LT(coarse_err[1], coarse_err[0]);
}

TEST(BouleauYor, IdentityBothSidesApproachQuadraticVariation) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto path = path_for(seed);
        const auto field = field_for(path);
        const auto res = bouleau_yor_residual([](double x) { return x; }, path, field,
                                              dyadic_levels(8, 14));
        EXPECT_NEAR(res.finest.lhs, realized_variance(path), 1e-12);
        EXPECT_NEAR(res.finest.rhs, trapezoid(field.x_grid, field.final_row()), 1e-12);
        EXPECT_LE(res.finest.residual, 0.05 * path.qv_final());
        EXPECT_EQ(res.trend_pass, trend_passes(res.sweep.residuals));
        EXPECT_EQ(res.sweep.estimates.size(), 7u);
    }
}

TEST(BouleauYor, ConstantHasZeroSides) {
    const auto path = path_for(4, 1024);
    const auto res =
        bouleau_yor_residual([](double) { return 2.0; }, path, field_for(path), dyadic_levels(4, 10));
    EXPECT_EQ(res.finest.lhs, 0.0);
    EXPECT_EQ(res.finest.rhs, 0.0);
    EXPECT_EQ(res.finest.residual, 0.0);
}

TEST(BouleauYor, SignReducesToTwiceLocalTimeAtZero) {
    double coarse = 0.0;
    double fine = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto path = path_for(seed);
        const auto field = field_for(path);
        const auto res = bouleau_yor_residual(sign, path, field, dyadic_levels(8, 14));
        // Abel summation: the only jump of sign on the grid sits at zero
        EXPECT_NEAR(res.finest.rhs, sign_jump_mass(field), 1e-12);
        coarse += res.sweep.residuals.front();
        fine += res.sweep.residuals.back();
    }
    // the partition sum of a jump function is noisy; only the seed-averaged
    // residual is expected to fall under refinement
    EXPECT_LT(fine, coarse);
}

TEST(BouleauYor, ValidatesLevels) {
    const auto path = path_for(5, 1024);
    const auto field = field_for(path);
    const auto f = [](double x) { return x; };
    EXPECT_THROW(bouleau_yor_residual(f, path, field, {}), std::invalid_argument);
    EXPECT_THROW(bouleau_yor_residual(f, path, field, {8, 4}), std::invalid_argument);
    EXPECT_THROW(bouleau_yor_residual(f, path, field, {3}), std::invalid_argument);
}

TEST(ItoFormula, ZeroIntegrand) {
    const auto path = path_for(6, 1024);
    const auto r = ito_formula_residual([](double) { return 0.0; }, [](double) { return 1.5; }, path,
                                        field_for(path));
    EXPECT_EQ(r.residual, 0.0);
}

TEST(ItoFormula, SquareReducesToOccupationDiscrepancy) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto path = path_for(seed);
        const auto field = field_for(path);
        const auto r = ito_formula_residual([](double x) { return x; }, [](double x) { return 0.5 * x * x; },
                                            path, field);
        const double mass = trapezoid(field.x_grid, field.final_row());
        EXPECT_NEAR(r.residual, 0.5 * std::abs(realized_variance(path) - mass), 1e-12);
        EXPECT_LE(r.residual, 0.02 * path.qv_final());
    }
}

TEST(ItoFormula, AbsReducesToTanakaMismatchAtZero) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto path = path_for(seed);
        const auto field = field_for(path);
        const auto r =
            ito_formula_residual(sign, [](double x) { return std::abs(x); }, path, field);
        const double occupation_at_zero = 0.5 * sign_jump_mass(field);
        EXPECT_NEAR(r.residual, std::abs(local_time_tanaka(path, 0.0, 1.0) - occupation_at_zero), 1e-12);
    }
}

TEST(ItoFormula, SampledIntegrandBuildsItsPrimitive) {
    const auto path = path_for(7);
    const auto field = field_for(path);
    const auto f = SampledFunction::from([](double x) { return x; },
                                         uniform_grid(field.x_grid.front(), field.x_grid.back(), 500));
    const auto sampled = ito_formula_residual(f, path, field);
    const auto exact = ito_formula_residual([](double x) { return x; }, [](double x) { return 0.5 * x * x; },
                                            path, field);
    // linear interpolation of the primitive costs h^2 / 8 between nodes
    const double h = (field.x_grid.back() - field.x_grid.front()) / 500.0;
    EXPECT_NEAR(sampled.lhs, exact.lhs, h * h / 4.0);
    EXPECT_NEAR(sampled.rhs, exact.rhs, 1e-10);
}

TEST(CovariationSweep, ConstantGivesZeros) {
    const auto path = path_for(8, 1024);
    const auto f = SampledFunction::from([](double) { return 4.0; }, uniform_grid(-5, 5, 10));
    const auto table = covariation_sweep(f, path, dyadic_levels(4, 10), {1, 8});
    ASSERT_EQ(table.values.size(), 7u);
    for (const auto& row : table.values) {
        ASSERT_EQ(row.size(), 3u);
        for (double v : row) EXPECT_NEAR(v, 0.0, 1e-14);
    }
}

TEST(CovariationSweep, MollifiedColumnsConvergeForSmoothF) {
    const auto path = path_for(9);
    const auto f = SampledFunction::from([](double x) { return std::sin(x); }, uniform_grid(-6, 6, 4000));
    const auto table = covariation_sweep(f, path, dyadic_levels(8, 14), {16, 64, 256, 1024});
    for (const auto& row : table.values) {
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t c = 1; c < row.size(); ++c) {
            const double gap = std::abs(row[c] - row[0]);
            EXPECT_LT(gap, prev);
            prev = gap;
        }
        EXPECT_LT(prev, 0.02 * std::abs(row[0]));
    }
    const double target = qv_integral([](double x) { return std::cos(x); }, path);
    EXPECT_LT(std::abs(table.values.back()[0] - target), std::abs(table.values.front()[0] - target));
}
