#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbmlab/local_time.hpp"
#include "gbmlab/scenario_sim.hpp"

namespace gbmlab {

// (1/eps) sum_{t_k < t, t_k + eps <= T} (B_{t_k + eps} - B_{t_k})^2 dt.
// eps must be a positive integer multiple of the mesh.
double qv_epsilon_approx(const SampledPath& path, double eps, double t);

// (1/eps) sum_{t_k < t, t_k + eps <= T} (<B>_{t_k + eps} - <B>_{t_k}) dt.
double qv_shift_average(const SampledPath& path, double eps, double t);

struct SquareSum {
    double lhs = 0.0;  // sum over dyadic level n of (L(a_{i+1}, t) - L(a_i, t))^2
    double rhs = 0.0;  // 4 int_a^b L(x, t) dx (trapezoid on the field grid)
    double ratio() const { return rhs != 0.0 ? lhs / rhs : 0.0; }
};

// Field values at the dyadic points a + 2^-n i (b - a) are interpolated
// linearly from x_grid; [a, b] must lie inside the grid.
SquareSum localtime_square_sum(const LocalTimeField& field, double t, double a, double b,
                               unsigned level);

// Description of one ladder experiment for convergence_table.
struct ConvergenceSpec {
    std::string experiment;      // one of convergence_experiments()
    std::vector<double> ladder;  // eps values, or dyadic levels for lin_square_sum
    VolatilityControl control = VolatilityControl::constant(VolBand(1.0, 1.0), 1.0);
    double t_max = 1.0;
    std::size_t n_steps = 1024;
    std::size_t seeds = 200;
    std::size_t batches = 1;
    std::uint64_t base_seed = 1;
};

struct ConvergenceRow {
    std::string experiment;
    std::size_t level = 0;  // ladder index
    double ladder_value = 0.0;
    std::size_t seed_batch = 0;
    double estimate = 0.0;   // batch mean of the estimator
    double target = 0.0;     // batch mean of the limit it approximates
    double abs_error = 0.0;  // batch mean of |estimate - target|
    double rel_error = 0.0;
    double millis = 0.0;
};

// "appendix_eps", "qv_shift", "lin_square_sum"
std::vector<std::string> convergence_experiments();

// One row per (ladder entry, seed batch), in ladder order.
std::vector<ConvergenceRow> convergence_table(const ConvergenceSpec& spec);

}  // namespace gbmlab
