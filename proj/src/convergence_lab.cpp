#include "gbmlab/convergence_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gbmlab/rng.hpp"

namespace gbmlab {

namespace {

std::size_t shift_steps(const TimeGrid& grid, double eps) {
    const double m = std::round(eps / grid.mesh());
    if (!(eps > 0.0) || m < 1.0 || std::abs(m * grid.mesh() - eps) > 1e-9 * eps) {
        throw std::invalid_argument("eps must be a positive multiple of the mesh");
    }
    return static_cast<std::size_t>(m);
}

template <typename Term>
double shifted_average(const SampledPath& path, double eps, double t, Term&& term) {
    const std::size_t m = shift_steps(path.grid, eps);
    const std::size_t end = path.grid.index_of(t);
    const std::size_t n = path.n_steps();
    double sum = 0.0;
    for (std::size_t k = 0; k < end && k + m <= n; ++k) {
        sum += term(k, k + m);
    }
    return sum * path.grid.mesh() / eps;
}

}  // namespace

double qv_epsilon_approx(const SampledPath& path, double eps, double t) {
    return shifted_average(path, eps, t, [&](std::size_t k, std::size_t km) {
        const double d = path.b[km] - path.b[k];
        return d * d;
    });
}

double qv_shift_average(const SampledPath& path, double eps, double t) {
    return shifted_average(path, eps, t, [&](std::size_t k, std::size_t km) {
        return path.qv[km] - path.qv[k];
    });
}

SquareSum localtime_square_sum(const LocalTimeField& field, double t, double a, double b,
                               unsigned level) {
    const auto& xs = field.x_grid;
    if (!(a < b) || a < xs.front() || b > xs.back()) {
        throw std::invalid_argument("localtime_square_sum: [a, b] outside the field's x range");
    }
    const SampledFunction profile(xs, std::vector<double>(field.row(field.row_of(t)).begin(),
                                                          field.row(field.row_of(t)).end()));
    SquareSum out;
    const std::size_t cells = std::size_t{1} << level;
    double prev = profile(a);
    for (std::size_t i = 1; i <= cells; ++i) {
        const double x = i == cells ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
        const double next = profile(x);
        out.lhs += (next - prev) * (next - prev);
        prev = next;
    }
    std::vector<double> px{a};
    std::vector<double> py{profile(a)};
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (xs[j] > a && xs[j] < b) {
            px.push_back(xs[j]);
            py.push_back(profile.y()[j]);
        }
    }
    px.push_back(b);
    py.push_back(profile(b));
    out.rhs = 4.0 * trapezoid(px, py);
    return out;
}

std::vector<std::string> convergence_experiments() {
    return {"appendix_eps", "qv_shift", "lin_square_sum"};
}

namespace {

struct Sample {
    double estimate = 0.0;
    double target = 0.0;
};

Sample evaluate(const std::string& experiment, const SampledPath& path, double ladder_value) {
    const double T = path.grid.t_max();
    if (experiment == "appendix_eps") {
        return {qv_epsilon_approx(path, ladder_value, T), path.qv_final()};
    }
    if (experiment == "qv_shift") {
        return {qv_shift_average(path, ladder_value, T), path.qv_final()};
    }
    // lin_square_sum: ratio lhs/rhs over the central half of the visited range
    const auto [lo_it, hi_it] = std::minmax_element(path.b.begin(), path.b.end());
    const double a = *lo_it + 0.25 * (*hi_it - *lo_it);
    const double b = *lo_it + 0.75 * (*hi_it - *lo_it);
    const auto level = static_cast<unsigned>(ladder_value);
    const auto field = tanaka_field(path, uniform_grid(a, b, std::size_t{1} << level),
                                    path.n_steps());
    return {localtime_square_sum(field, T, a, b, level).ratio(), 1.0};
}

}  // namespace

std::vector<ConvergenceRow> convergence_table(const ConvergenceSpec& spec) {
    const auto known = convergence_experiments();
    if (std::find(known.begin(), known.end(), spec.experiment) == known.end()) {
        throw std::invalid_argument("unknown convergence experiment '" + spec.experiment + "'");
    }
    if (spec.ladder.empty()) {
        throw std::invalid_argument("convergence_table: empty ladder");
    }
    if (spec.batches == 0 || spec.seeds < spec.batches) {
        throw std::invalid_argument("convergence_table: need at least one seed per batch");
    }
    const TimeGrid grid(spec.t_max, spec.n_steps);
    const std::size_t per_batch = spec.seeds / spec.batches;
    std::vector<ConvergenceRow> rows;
    for (std::size_t li = 0; li < spec.ladder.size(); ++li) {
        for (std::size_t batch = 0; batch < spec.batches; ++batch) {
            const auto start = std::chrono::steady_clock::now();
            ConvergenceRow row;
            row.experiment = spec.experiment;
            row.level = li;
            row.ladder_value = spec.ladder[li];
            row.seed_batch = batch;
            for (std::size_t s = 0; s < per_batch; ++s) {
                const std::uint64_t seed = stream_seed(spec.base_seed, batch * per_batch + s);
                const auto path = simulate_path(spec.control, grid, seed);
                const auto sample = evaluate(spec.experiment, path, spec.ladder[li]);
                row.estimate += sample.estimate;
                row.target += sample.target;
                row.abs_error += std::abs(sample.estimate - sample.target);
            }
            const double n = static_cast<double>(per_batch);
            row.estimate /= n;
            row.target /= n;
            row.abs_error /= n;
            row.rel_error = row.target != 0.0 ? row.abs_error / std::abs(row.target) : row.abs_error;
            row.millis = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace gbmlab
