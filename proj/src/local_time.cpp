#include "gbmlab/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gbmlab {

namespace {

// Contribution of step [b0, b1] to the Tanaka estimate at level x:
// |b1 - x| - |b0 - x| - sign(b0 - x)(b1 - b0), written without cancellation.
double tanaka_step(double b0, double b1, double x) {
    const double d0 = b0 - x;
    const double d1 = b1 - x;
    if ((d0 > 0.0 && d1 >= 0.0) || (d0 < 0.0 && d1 <= 0.0)) {
        return 0.0;
    }
    if (d0 == 0.0) {
        return std::abs(b1 - b0);
    }
    return 2.0 * std::abs(d1);
}

void require_bandwidth(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("local time: bandwidth must be positive");
    }
}

std::vector<std::size_t> strided_nodes(std::size_t n_steps, std::size_t stride) {
    if (stride == 0) {
        throw std::invalid_argument("local time field: t_stride must be positive");
    }
    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < n_steps; k += stride) {
        nodes.push_back(k);
    }
    nodes.push_back(n_steps);
    return nodes;
}

LocalTimeField empty_field(const SampledPath& path, std::vector<double> x_grid,
                           std::size_t t_stride) {
    if (x_grid.empty() || !strictly_increasing(x_grid)) {
        throw std::invalid_argument("local time field: x_grid must be strictly increasing");
    }
    LocalTimeField field;
    field.x_grid = std::move(x_grid);
    field.t_nodes = strided_nodes(path.n_steps(), t_stride);
    for (std::size_t k : field.t_nodes) {
        field.t_grid.push_back(path.grid.node(k));
    }
    field.values.reserve(field.nt() * field.nx());
    field.seed = path.seed;
    field.control_id = path.control_id;
    return field;
}

// Drives `add_step(k, acc)` over all steps and snapshots acc at t_nodes.
template <typename AddStep>
void accumulate(LocalTimeField& field, std::size_t n_steps, AddStep&& add_step) {
    std::vector<double> acc(field.nx(), 0.0);
    std::size_t next = 0;
    auto snapshot_if_due = [&](std::size_t node) {
        if (next < field.t_nodes.size() && field.t_nodes[next] == node) {
            field.values.insert(field.values.end(), acc.begin(), acc.end());
            ++next;
        }
    };
    snapshot_if_due(0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        add_step(k, acc);
        snapshot_if_due(k + 1);
    }
}

}  // namespace

std::size_t LocalTimeField::row_of(double t) const {
    const double tol = 1e-9 * std::max(1.0, t_grid.back());
    const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), t - tol);
    if (it == t_grid.end() || std::abs(*it - t) > tol) {
        throw std::invalid_argument("time " + std::to_string(t) + " is not on the field's t_grid");
    }
    return static_cast<std::size_t>(it - t_grid.begin());
}

double default_bandwidth(const SampledPath& path) {
    const double scale = std::sqrt(path.qv_final() / path.grid.t_max());
    const double eps = std::cbrt(path.grid.mesh()) * scale;
    // a path with zero quadratic variation still needs a usable bandwidth
    return eps > 0.0 ? eps : std::cbrt(path.grid.mesh());
}

std::vector<double> default_x_grid(const SampledPath& path, double eps) {
    require_bandwidth(eps);
    const auto [lo_it, hi_it] = std::minmax_element(path.b.begin(), path.b.end());
    const double lo = *lo_it - eps;
    const double hi = *hi_it + eps;
    for (std::size_t m = 8;; m *= 2) {
        const double h = 2.0 * eps / static_cast<double>(m);
        const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 2;
        if (cells + 1 >= 64 || m > (1u << 20)) {
            std::vector<double> grid(cells + 1);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                grid[j] = lo - h + h * static_cast<double>(j);
            }
            return grid;
        }
    }
}

double local_time_occupation(const SampledPath& path, double x, double eps, double t) {
    require_bandwidth(eps);
    const std::size_t end = path.grid.index_of(t);
    double sum = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        if (std::abs(path.b[k] - x) < eps) {
            sum += path.qv[k + 1] - path.qv[k];
        }
    }
    return sum / (2.0 * eps);
}

double local_time_tanaka(const SampledPath& path, double x, double t) {
    const std::size_t end = path.grid.index_of(t);
    double sum = 0.0;
    for (std::size_t k = 0; k < end; ++k) {
        sum += tanaka_step(path.b[k], path.b[k + 1], x);
    }
    return sum;
}

LocalTimeField local_time_field(const SampledPath& path, std::vector<double> x_grid, double eps,
                                std::size_t t_stride) {
    require_bandwidth(eps);
    LocalTimeField field = empty_field(path, std::move(x_grid), t_stride);
    field.bandwidth = eps;
    field.estimator = LocalTimeEstimator::occupation;
    const auto& xs = field.x_grid;
    const double inv = 1.0 / (2.0 * eps);
    accumulate(field, path.n_steps(), [&](std::size_t k, std::vector<double>& acc) {
        const double b = path.b[k];
        const double w = (path.qv[k + 1] - path.qv[k]) * inv;
        auto j = static_cast<std::size_t>(
            std::lower_bound(xs.begin(), xs.end(), b - eps) - xs.begin());
        j = j > 0 ? j - 1 : 0;
        for (; j < xs.size() && xs[j] < b + eps; ++j) {
            if (std::abs(b - xs[j]) < eps) {
                acc[j] += w;
            }
        }
    });
    return field;
}

LocalTimeField tanaka_field(const SampledPath& path, std::vector<double> x_grid,
                            std::size_t t_stride) {
    LocalTimeField field = empty_field(path, std::move(x_grid), t_stride);
    field.estimator = LocalTimeEstimator::tanaka;
    double max_step = 0.0;
    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        max_step = std::max(max_step, std::abs(path.b[k + 1] - path.b[k]));
    }
    field.bandwidth = max_step > 0.0 ? max_step : path.grid.mesh();
    const auto& xs = field.x_grid;
    accumulate(field, path.n_steps(), [&](std::size_t k, std::vector<double>& acc) {
        const double b0 = path.b[k];
        const double b1 = path.b[k + 1];
        const auto lo = std::lower_bound(xs.begin(), xs.end(), std::min(b0, b1));
        const auto hi = std::upper_bound(lo, xs.end(), std::max(b0, b1));
        for (auto it = lo; it != hi; ++it) {
            acc[static_cast<std::size_t>(it - xs.begin())] += tanaka_step(b0, b1, *it);
        }
    });
    return field;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("trapezoid: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        sum += 0.5 * (y[j] + y[j - 1]) * (x[j] - x[j - 1]);
    }
    return sum;
}

ExperimentReport occupation_check(const SampledPath& path, const RealFn& f, double eps) {
    return occupation_check(path, f, eps, default_x_grid(path, eps));
}

ExperimentReport occupation_check(const SampledPath& path, const RealFn& f, double eps,
                                  const std::vector<double>& x_grid) {
    const double lhs = qv_integral(f, path);
    const double scale = qv_integral([&](double x) { return std::abs(f(x)); }, path);
    const auto field = local_time_field(path, x_grid, eps, path.n_steps());
    const auto profile = field.final_row();
    std::vector<double> integrand(field.nx());
    for (std::size_t j = 0; j < field.nx(); ++j) {
        integrand[j] = f(field.x_grid[j]) * profile[j];
    }
    auto report = make_report("occupation_1d", lhs, trapezoid(field.x_grid, integrand), scale);
    report.seed = path.seed;
    report.params["eps"] = eps;
    report.params["n_steps"] = static_cast<double>(path.n_steps());
    report.params["nx"] = static_cast<double>(field.nx());
    return report;
}

void write_csv(const LocalTimeField& field, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "t";
    for (double x : field.x_grid) {
        out << ',' << x;
    }
    out << '\n';
    for (std::size_t it = 0; it < field.nt(); ++it) {
        out << field.t_grid[it];
        for (double v : field.row(it)) {
            out << ',' << v;
        }
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace gbmlab
