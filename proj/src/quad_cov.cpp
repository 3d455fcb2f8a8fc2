#include "gbmlab/quad_cov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbmlab/young_pvar.hpp"

namespace gbmlab {

namespace {

void require_levels(const std::vector<std::size_t>& levels, std::size_t n_steps) {
    if (levels.empty()) {
        throw std::invalid_argument("partition sweep: no levels");
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == 0 || n_steps % levels[i] != 0) {
            throw std::invalid_argument("partition sweep: level " + std::to_string(levels[i]) +
                                        " does not divide n_steps");
        }
        if (i > 0 && levels[i] <= levels[i - 1]) {
            throw std::invalid_argument("partition sweep: levels must increase");
        }
    }
}

}  // namespace

double quadratic_covariation(const RealFn& f, const SampledPath& path, std::size_t coarsen) {
    const std::size_t n = path.n_steps();
    if (coarsen == 0 || n % coarsen != 0) {
        throw std::invalid_argument("quadratic_covariation: coarsen must divide n_steps");
    }
    double sum = 0.0;
    double f_prev = f(path.b[0]);
    for (std::size_t k = coarsen; k <= n; k += coarsen) {
        const double f_next = f(path.b[k]);
        sum += (f_next - f_prev) * (path.b[k] - path.b[k - coarsen]);
        f_prev = f_next;
    }
    return sum;
}

std::vector<std::size_t> dyadic_levels(unsigned lo, unsigned hi) {
    std::vector<std::size_t> levels;
    for (unsigned e = lo; e <= hi; ++e) {
        levels.push_back(std::size_t{1} << e);
    }
    return levels;
}

BouleauYorResult bouleau_yor_residual(const RealFn& f, const SampledPath& path,
                                      const LocalTimeField& field,
                                      const std::vector<std::size_t>& levels) {
    require_levels(levels, path.n_steps());
    BouleauYorResult out;
    out.sweep.levels = levels;
    out.sweep.reference = integral_wrt_localtime(f, field, path.grid.t_max());
    for (std::size_t level : levels) {
        const double est = quadratic_covariation(f, path, path.n_steps() / level);
        out.sweep.estimates.push_back(est);
        out.sweep.residuals.push_back(std::abs(est + out.sweep.reference));
    }
    out.trend_pass = trend_passes(out.sweep.residuals);
    const double lhs = out.sweep.estimates.back();
    const double rhs = -out.sweep.reference;
    out.finest = make_report("bouleau_yor", lhs, rhs, std::max(std::abs(lhs), std::abs(rhs)));
    out.finest.level = levels.back();
    out.finest.seed = path.seed;
    out.finest.params["eps"] = field.bandwidth;
    return out;
}

ExperimentReport ito_formula_residual(const RealFn& f, const RealFn& F, const SampledPath& path,
                                      const LocalTimeField& field) {
    const double lhs = F(path.b_final()) - F(0.0);
    const double rhs =
        ito_integral(f, path) - 0.5 * integral_wrt_localtime(f, field, path.grid.t_max());
    auto report = make_report("ito_c1", lhs, rhs, std::abs(lhs));
    report.seed = path.seed;
    report.level = path.n_steps();
    report.params["eps"] = field.bandwidth;
    return report;
}

ExperimentReport ito_formula_residual(const SampledFunction& f, const SampledPath& path,
                                      const LocalTimeField& field) {
    const auto F = antiderivative_of(f, 0.0);
    return ito_formula_residual([&](double x) { return f(x); }, [&](double x) { return F(x); },
                                path, field);
}

CovariationTable covariation_sweep(const SampledFunction& f, const SampledPath& path,
                                   const std::vector<std::size_t>& levels,
                                   const std::vector<int>& mollify_levels) {
    require_levels(levels, path.n_steps());
    CovariationTable table;
    table.levels = levels;
    table.mollify_levels = mollify_levels;
    std::vector<SampledFunction> columns{f};
    for (int n : mollify_levels) {
        columns.push_back(mollify(f, n));
    }
    for (std::size_t level : levels) {
        std::vector<double> row;
        for (const auto& g : columns) {
            row.push_back(
                quadratic_covariation([&](double x) { return g(x); }, path, path.n_steps() / level));
        }
        table.values.push_back(std::move(row));
    }
    return table;
}

}  // namespace gbmlab
