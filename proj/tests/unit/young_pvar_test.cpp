#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gbmlab/local_time.hpp"
#include "gbmlab/young_pvar.hpp"

using namespace gbmlab;

namespace {

// Exhaustive sup over all index subsequences containing both endpoints.
double brute_force_pvar(const std::vector<double>& y, double p) {
    const std::size_t inner = y.size() - 2;
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << inner); ++mask) {
        double sum = 0.0;
        std::size_t prev = 0;
        for (std::size_t i = 1; i < y.size(); ++i) {
            if (i == y.size() - 1 || (mask >> (i - 1)) & 1u) {
                sum += std::pow(std::abs(y[i] - y[prev]), p);
                prev = i;
            }
        }
        best = std::max(best, sum);
    }
    return best;
}

std::vector<double> random_walk(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> z(0.0, scale);
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) y[i] = y[i - 1] + z(rng);
    return y;
}

// Composite trapezoid on [0, 2]; spectrally accurate for the bump because
// every derivative vanishes at both ends.
double bump_integral_oracle(std::size_t n, double weight_power = 0.0) {
    const double h = 2.0 / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double x = h * static_cast<double>(i);
        sum += std::pow(x, weight_power) * std::exp(1.0 / ((x - 1.0) * (x - 1.0) - 1.0));
    }
    return sum * h;
}

}  // namespace

TEST(PVariation, Examples) {
    const auto a = p_variation(std::vector<double>{0, 1, 0}, 1.0);
    EXPECT_EQ(a.value, 2.0);
    EXPECT_EQ(a.witness, (std::vector<std::size_t>{0, 1, 2}));

    const auto b = p_variation(std::vector<double>{0, 1, 2, 3}, 2.0);
    EXPECT_EQ(b.value, 9.0);
    EXPECT_EQ(b.witness, (std::vector<std::size_t>{0, 3}));

    const auto c = p_variation(std::vector<double>{0, 1, 0, 1}, 2.0);
    EXPECT_EQ(c.value, 3.0);
    EXPECT_EQ(c.witness, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(PVariation, Errors) {
    EXPECT_THROW(p_variation(std::vector<double>{0, 1}, 0.5), std::invalid_argument);
    EXPECT_THROW(p_variation(std::vector<double>{0}, 2.0), std::invalid_argument);
}

TEST(PVariation, MatchesBruteForceOnRandomCorpus) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> length(2, 12);
    const double ps[] = {1.0, 1.5, 2.0, 3.0};
    int mismatches = 0;
    for (int c = 0; c < 1000; ++c) {
        auto y = random_walk(rng, length(rng));
        if (c % 3 == 0) {
            for (auto& v : y) v = std::round(4.0 * v);  // integer data with many ties
        }
        const double p = ps[c % 4];
        const auto cert = p_variation(y, p);
        const double brute = brute_force_pvar(y, p);
        if (std::abs(cert.value - brute) > 1e-12 * std::max(1.0, brute)) ++mismatches;
        EXPECT_EQ(partition_sum(y, cert.witness, p), cert.value);
        EXPECT_EQ(cert.witness.front(), 0u);
        EXPECT_EQ(cert.witness.back(), y.size() - 1);
    }
    EXPECT_EQ(mismatches, 0);
}

TEST(PVariation, SeminormNonincreasingInP) {
    std::mt19937_64 rng(5);
    for (int c = 0; c < 50; ++c) {
        const auto y = random_walk(rng, 30);
        double prev = std::numeric_limits<double>::infinity();
        for (double p : {1.0, 1.5, 2.0, 3.0}) {
            const double s = p_seminorm(y, p);
            EXPECT_LE(s, prev * (1 + 1e-12));
            prev = s;
        }
    }
}

TEST(PVariation, NormAddsSupremum) {
    const std::vector<double> y{0.5, -2.0, 1.0};
    EXPECT_DOUBLE_EQ(p_seminorm(y, 1.0), 5.5);
    EXPECT_DOUBLE_EQ(p_norm(y, 1.0), 7.5);
    const auto f = SampledFunction({0, 1, 2}, y);
    EXPECT_EQ(p_variation(f, 1.0).value, 5.5);
}

TEST(YoungIntegral, ConstantIntegrandTelescopes) {
    const auto g = SampledFunction::from([](double x) { return std::sin(3 * x); }, uniform_grid(0, 2, 50));
    const auto f = SampledFunction({-1.0, 5.0}, {2.5, 2.5});
    EXPECT_NEAR(young_integral(f, g), 2.5 * (g(2.0) - g(0.0)), 1e-13);
}

TEST(YoungIntegral, IdentityAgainstIdentity) {
    const auto id = SampledFunction::from([](double x) { return x; }, uniform_grid(0, 1, 1023));
    EXPECT_NEAR(young_integral(id, id), 0.5, 1e-3);
    EXPECT_NEAR(young_integral(id, id, YoungRule::midpoint), 0.5, 1e-12);
}

TEST(YoungIntegral, IntegrationByParts) {
    const auto f = SampledFunction::from([](double x) { return std::exp(-x) * std::cos(2 * x); },
                                         uniform_grid(0, 3, 1000));
    const auto g = SampledFunction::from([](double x) { return x * x - std::sin(x); }, uniform_grid(0, 3, 1300));
    const double boundary = f(3) * g(3) - f(0) * g(0);
    EXPECT_NEAR(young_integral(f, g, YoungRule::midpoint) + young_integral(g, f, YoungRule::midpoint),
                boundary, 1e-6);
    // left sums miss the covariation of the two sample paths, which is O(mesh)
    EXPECT_NEAR(young_integral(f, g) + young_integral(g, f), boundary, 2e-2);
}

TEST(YoungIntegral, UsesOverlapAndRejectsDisjointDomains) {
    const auto f = SampledFunction({0.0, 1.0}, {1.0, 1.0});
    const auto g = SampledFunction({0.5, 3.0}, {0.0, 5.0});
    EXPECT_NEAR(young_integral(f, g), 1.0, 1e-14);  // g rises by 1 on [0.5, 1]
    const auto far = SampledFunction({2.0, 3.0}, {0.0, 1.0});
    EXPECT_THROW(young_integral(f, far), std::invalid_argument);
}

TEST(YoungIntegral, LinearInIntegrand) {
    std::mt19937_64 rng(3);
    const auto grid = uniform_grid(0, 1, 200);
    const SampledFunction f1(grid, random_walk(rng, grid.size(), 0.1));
    const SampledFunction f2(grid, random_walk(rng, grid.size(), 0.1));
    const SampledFunction g(grid, random_walk(rng, grid.size(), 0.1));
    std::vector<double> mix(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) mix[i] = 1.5 * f1.y()[i] - 0.25 * f2.y()[i];
    EXPECT_NEAR(young_integral(SampledFunction(grid, mix), g),
                1.5 * young_integral(f1, g) - 0.25 * young_integral(f2, g), 1e-13);
}

TEST(YoungIntegral, LoveYoungBoundOnRandomCorpus) {
    std::mt19937_64 rng(11);
    const std::pair<double, double> classes[] = {{1.5, 1.5}, {1.0, 2.5}, {1.2, 4.0}};
    for (int c = 0; c < 60; ++c) {
        const auto [p, q] = classes[c % 3];
        const auto grid = uniform_grid(0, 1, 60);
        const SampledFunction f(grid, random_walk(rng, grid.size()));
        const SampledFunction g(grid, random_walk(rng, grid.size()));
        const double C = love_young_constant(p, q);
        const double gp = p_seminorm(g.y(), q);
        const double integral = young_integral(f, g);
        EXPECT_LE(std::abs(integral), C * p_norm(f.y(), p) * gp);
        const double remainder = integral - f.y().front() * (g.y().back() - g.y().front());
        EXPECT_LE(std::abs(remainder), (C - 1.0) * p_seminorm(f.y(), p) * gp);
    }
}

TEST(YoungIntegral, LoveYoungConstant) {
    EXPECT_NEAR(love_young_constant(1.0, 1.0), 1.0 + std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
    EXPECT_THROW(love_young_constant(2.0, 2.0), std::invalid_argument);
    EXPECT_THROW(love_young_constant(3.0, 2.0), std::invalid_argument);
}

namespace {

LocalTimeField test_field() {
    const auto path = simulate_path(
        VolatilityControl::bang_bang(VolBand(0.5, 1.5), [](double, double b) { return b > 0.0; }),
        TimeGrid(1.0, 1u << 14), 12);
    const double eps = default_bandwidth(path);
    return local_time_field(path, default_x_grid(path, eps), eps, 1u << 10);
}

}  // namespace

TEST(IntegralWrtLocalTime, Examples) {
    const auto field = test_field();
    EXPECT_EQ(integral_wrt_localtime([](double) { return 4.0; }, field, 1.0), 0.0);
    const double mass = trapezoid(field.x_grid, field.final_row());
    const double linear = integral_wrt_localtime([](double x) { return x; }, field, 1.0);
    EXPECT_NEAR(linear, -mass, 1e-12);
    // mass is the trapezoid of an occupation field; it matches <B>_T within 2%
    EXPECT_GT(mass, 0.0);
    for (const RealFn& f : {RealFn([](double x) { return std::sin(5 * x); }),
                            RealFn([](double x) { return x > 0.1 ? 1.0 : -1.0; })}) {
        EXPECT_NEAR(integral_wrt_localtime(f, field, 1.0), integral_wrt_localtime_direct(f, field, 1.0),
                    1e-8);
    }
}

TEST(IntegralWrtLocalTime, SmoothIntegrandMatchesDerivativeForm) {
    // Left-point sums against df differ from the trapezoid of L f' by
    // O(h * TV(L)); the gap must be small and shrink with the x spacing.
    const auto path = simulate_path(
        VolatilityControl::bang_bang(VolBand(0.5, 1.5), [](double, double b) { return b > 0.0; }),
        TimeGrid(1.0, 1u << 14), 12);
    const double eps = default_bandwidth(path);
    const auto coarse = default_x_grid(path, eps);
    std::vector<double> gaps;
    for (std::size_t refine : {1u, 4u}) {
        const auto xs = uniform_grid(coarse.front(), coarse.back(), (coarse.size() - 1) * refine);
        const auto field = local_time_field(path, xs, eps, path.n_steps());
        std::vector<double> integrand(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) integrand[j] = std::cos(xs[j]) * field.final_row()[j];
        const double expected = -trapezoid(xs, integrand);
        const double value = integral_wrt_localtime([](double x) { return std::sin(x); }, field, 1.0);
        EXPECT_NEAR(value, expected, 0.02 * std::abs(expected));
        gaps.push_back(std::abs(value - expected));
    }
    EXPECT_LT(gaps[1], 0.5 * gaps[0]);
}

TEST(Mollifier, ConstantMatchesQuadratureOracle) {
    const double oracle = 1.0 / bump_integral_oracle(20000);
    EXPECT_NEAR(mollifier_constant(), oracle, 1e-8 * oracle);
    EXPECT_NEAR(mollifier_constant(), 2.252284, 5e-7);
    EXPECT_NEAR(oracle * bump_integral_oracle(40000), 1.0, 1e-12);
    // integral of theta with the library constant
    const double h = 2.0 / 40000.0;
    double sum = 0.0;
    for (int i = 1; i < 40000; ++i) sum += mollifier(h * i);
    EXPECT_NEAR(sum * h, 1.0, 1e-10);
}

TEST(Mollifier, VanishesAtAndBeyondTheEnds) {
    EXPECT_EQ(mollifier(0.0), 0.0);
    EXPECT_EQ(mollifier(2.0), 0.0);
    EXPECT_EQ(mollifier(-1.0), 0.0);
    EXPECT_EQ(mollifier(2.5), 0.0);
    EXPECT_LT(mollifier(1e-3), 1e-200);
    EXPECT_LT(mollifier(2.0 - 1e-3), 1e-200);
    EXPECT_NEAR(mollifier(1.0), mollifier_constant() * std::exp(-1.0), 1e-15);
}

TEST(Mollifier, RuleIsNormalisedAndCentred) {
    const auto& rule = mollifier_rule();
    ASSERT_EQ(rule.nodes.size(), 64u);
    double mass = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        EXPECT_GT(rule.nodes[i], 0.0);
        EXPECT_LT(rule.nodes[i], 2.0);
        mass += rule.weights[i];
        first += rule.weights[i] * rule.nodes[i];
    }
    EXPECT_NEAR(mass, 1.0, 1e-15);
    EXPECT_NEAR(first, 1.0, 1e-14);
    // the rule itself approximates the true first moment of theta
    const double oracle = bump_integral_oracle(20000, 1.0) / bump_integral_oracle(20000);
    EXPECT_NEAR(oracle, 1.0, 1e-12);
}

TEST(GaussLegendre, ExactForPolynomials) {
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(10, x, w);
    for (int deg = 0; deg < 20; ++deg) {
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * std::pow(x[i], deg);
        EXPECT_NEAR(sum, deg % 2 ? 0.0 : 2.0 / (deg + 1), 1e-14) << deg;
    }
}

TEST(Mollify, Examples) {
    const auto grid = uniform_grid(-2, 2, 400);
    const auto c = mollify([](double) { return 1.7; }, grid, 3);
    for (double v : c.y()) EXPECT_NEAR(v, 1.7, 1e-14);

    for (int n : {1, 4, 16}) {
        const auto shifted = mollify([](double x) { return x; }, grid, n);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            EXPECT_NEAR(shifted.y()[i], grid[i] - 1.0 / n, 1e-13);
        }
    }

    const int n = 8;
    const auto step = mollify([](double x) { return x >= 0.0 ? 1.0 : 0.0; }, grid, n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        if (x < 0.0) EXPECT_EQ(step.y()[i], 0.0) << x;
        if (x >= 2.0 / n) EXPECT_NEAR(step.y()[i], 1.0, 1e-14) << x;
    }
    EXPECT_THROW(mollify([](double x) { return x; }, grid, 0), std::invalid_argument);
}

TEST(Mollify, SampledInputUsesClampedExtension) {
    const auto f = SampledFunction::from([](double x) { return std::abs(x); }, uniform_grid(-1, 1, 200));
    const auto fn = mollify(f, 5);
    EXPECT_EQ(fn.x(), f.x());
    EXPECT_LE(fn.sup_norm(), f.sup_norm() + 1e-15);
    // far from the kink the mollified |x| is a shifted copy
    EXPECT_NEAR(fn(0.8), 0.8 - 0.2, 1e-12);
}

TEST(Mollify, ContractsPVariationAndSupNorm) {
    std::mt19937_64 rng(8);
    const auto grid = uniform_grid(0, 1, 80);
    for (int c = 0; c < 20; ++c) {
        const SampledFunction f(grid, random_walk(rng, grid.size(), 0.2));
        for (int n : {1, 5, 40}) {
            const auto fn = mollify(f, n);
            EXPECT_LE(fn.sup_norm(), f.sup_norm() + 1e-14);
            for (double p : {1.0, 1.5, 2.0}) {
                EXPECT_LE(p_seminorm(fn.y(), p), p_seminorm(f.y(), p) + 1e-9);
            }
        }
    }
}

TEST(Antiderivative, Examples) {
    const auto grid = uniform_grid(-1, 2, 30);
    const auto one = antiderivative_of(SampledFunction::from([](double) { return 1.0; }, grid), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(one.y()[i], grid[i] + 1.0, 1e-14);
    const auto zero = antiderivative_of(SampledFunction::from([](double) { return 0.0; }, grid), 3.5);
    for (double v : zero.y()) EXPECT_EQ(v, 3.5);
    const auto sq = antiderivative_of(
        SampledFunction::from([](double x) { return 2 * x; }, uniform_grid(0, 1, 1023)), 0.0);
    EXPECT_NEAR(sq(1.0), 1.0, 1e-5);
}
