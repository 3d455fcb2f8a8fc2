#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gbmlab/report.hpp"
#include "gbmlab/sampled_function.hpp"
#include "gbmlab/scenario_sim.hpp"

namespace gbmlab {

enum class LocalTimeEstimator { occupation, tanaka };

// L(x, t) tabulated on x_grid x t_grid for one path. Row `it` holds the
// x-profile at time t_grid[it].
struct LocalTimeField {
    std::vector<double> x_grid;
    std::vector<double> t_grid;
    std::vector<std::size_t> t_nodes;  // path node index of each t_grid entry
    std::vector<double> values;        // row-major [t][x]
    double bandwidth = 0.0;
    LocalTimeEstimator estimator = LocalTimeEstimator::occupation;
    std::uint64_t seed = 0;
    std::string control_id;

    std::size_t nx() const { return x_grid.size(); }
    std::size_t nt() const { return t_grid.size(); }
    double at(std::size_t it, std::size_t ix) const { return values[it * nx() + ix]; }
    std::span<const double> row(std::size_t it) const {
        return {values.data() + it * nx(), nx()};
    }
    std::span<const double> final_row() const { return row(nt() - 1); }
    // Row index of time t; throws std::invalid_argument if t is not on t_grid.
    std::size_t row_of(double t) const;
};

// eps = mesh^(1/3) * sqrt(<B>_T / T)
double default_bandwidth(const SampledPath& path);

// Equally spaced levels covering [min B - eps, max B + eps] with spacing
// 2 eps / m for an integer m >= 8, and at least 64 levels. Commensurate
// spacing makes the trapezoid x-integral of the occupation estimator equal
// <B>_t up to steps that land on a lattice boundary.
std::vector<double> default_x_grid(const SampledPath& path, double eps);

// (1 / 2eps) sum_{t_k < t} 1{|B_k - x| < eps} (qv_{k+1} - qv_k)
double local_time_occupation(const SampledPath& path, double x, double eps, double t);

// |B_t - x| - |x| - sum_{t_k < t} sign(B_k - x) dB_k with sign(0) = 0,
// accumulated step by step so every step contributes a nonnegative amount.
double local_time_tanaka(const SampledPath& path, double x, double t);

// Occupation-density field. t_stride selects every t_stride-th node; the
// final node is always included.
LocalTimeField local_time_field(const SampledPath& path, std::vector<double> x_grid, double eps,
                                std::size_t t_stride = 1);

// Field of Tanaka estimates; needs no bandwidth and resolves x below the
// occupation bandwidth. `bandwidth` is set to the largest path increment.
LocalTimeField tanaka_field(const SampledPath& path, std::vector<double> x_grid,
                            std::size_t t_stride = 1);

double trapezoid(std::span<const double> x, std::span<const double> y);

// Occupation-times formula at t_max: lhs = sum f(B_k) dqv_k, rhs = trapezoid
// of f(x) L(x, t_max). Scale is sum |f(B_k)| dqv_k.
ExperimentReport occupation_check(const SampledPath& path, const RealFn& f, double eps);
ExperimentReport occupation_check(const SampledPath& path, const RealFn& f, double eps,
                                  const std::vector<double>& x_grid);

// Header: "t" then the x values; one row per t.
void write_csv(const LocalTimeField& field, std::ostream& out);

}  // namespace gbmlab
