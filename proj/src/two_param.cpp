#include "gbmlab/two_param.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gbmlab/local_time.hpp"

namespace gbmlab {

SampledSurface::SampledSurface(std::vector<double> x_grid, std::vector<double> t_grid,
                               std::vector<double> values)
    : x_(std::move(x_grid)), t_(std::move(t_grid)), values_(std::move(values)) {
    if (x_.empty() || t_.empty() || !strictly_increasing(x_) || !strictly_increasing(t_)) {
        throw std::invalid_argument("SampledSurface: grids must be nonempty and increasing");
    }
    if (values_.size() != x_.size() * t_.size()) {
        throw std::invalid_argument("SampledSurface: value count must be nx * nt");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("SampledSurface: non-finite value");
        }
    }
}

SampledSurface SampledSurface::from(const SurfaceFn& fn, std::vector<double> x_grid,
                                    std::vector<double> t_grid) {
    std::vector<double> values;
    values.reserve(x_grid.size() * t_grid.size());
    for (double t : t_grid) {
        for (double x : x_grid) {
            values.push_back(fn(x, t));
        }
    }
    return SampledSurface(std::move(x_grid), std::move(t_grid), std::move(values));
}

SampledSurface SampledSurface::from(const LocalTimeField& field) {
    return SampledSurface(field.x_grid, field.t_grid, field.values);
}

namespace {

void require_pq_grid(const SampledSurface& F, double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0)) {
        throw std::invalid_argument("pq_variation: p and q must be >= 1");
    }
    if (F.nx() < 2 || F.nt() < 2) {
        throw std::invalid_argument("pq_variation: need at least 2 x 2 samples");
    }
}

// Exact optimum over t partitions for a fixed x partition.
double best_over_t(const SampledSurface& F, const std::vector<std::size_t>& xs, double p,
                   double q, std::vector<std::size_t>* t_partition) {
    const std::size_t nt = F.nt();
    std::vector<double> best(nt, 0.0);
    std::vector<std::size_t> parent(nt, 0);
    for (std::size_t j = 1; j < nt; ++j) {
        double top = -1.0;
        for (std::size_t jp = 0; jp < j; ++jp) {
            double inner = 0.0;
            for (std::size_t k = 1; k < xs.size(); ++k) {
                inner += std::pow(std::abs(F.rect_increment(xs[k - 1], xs[k], jp, j)), p);
            }
            const double cand = best[jp] + std::pow(inner, q);
            if (cand > top) {
                top = cand;
                parent[j] = jp;
            }
        }
        best[j] = top;
    }
    if (t_partition) {
        t_partition->clear();
        for (std::size_t j = nt - 1;; j = parent[j]) {
            t_partition->push_back(j);
            if (j == 0) {
                break;
            }
        }
        std::reverse(t_partition->begin(), t_partition->end());
    }
    return best[nt - 1];
}

std::vector<std::size_t> with_endpoints(std::size_t nx, const std::vector<bool>& interior) {
    std::vector<std::size_t> xs{0};
    for (std::size_t i = 1; i + 1 < nx; ++i) {
        if (interior[i]) {
            xs.push_back(i);
        }
    }
    xs.push_back(nx - 1);
    return xs;
}

constexpr std::size_t kExactMaxNx = 14;

}  // namespace

double pq_partition_sum(const SampledSurface& F, const std::vector<std::size_t>& x_partition,
                        const std::vector<std::size_t>& t_partition, double p, double q) {
    double total = 0.0;
    for (std::size_t l = 1; l < t_partition.size(); ++l) {
        double inner = 0.0;
        for (std::size_t k = 1; k < x_partition.size(); ++k) {
            inner += std::pow(std::abs(F.rect_increment(x_partition[k - 1], x_partition[k],
                                                        t_partition[l - 1], t_partition[l])),
                              p);
        }
        total += std::pow(inner, q);
    }
    return total;
}

PQVariation pq_variation_detail(const SampledSurface& F, double p, double q) {
    require_pq_grid(F, p, q);
    const std::size_t nx = F.nx();
    PQVariation out;
    out.value = -1.0;
    if (nx <= kExactMaxNx) {
        const std::size_t interior = nx - 2;
        std::vector<bool> chosen(nx, false);
        for (std::size_t mask = 0; mask < (std::size_t{1} << interior); ++mask) {
            for (std::size_t i = 0; i < interior; ++i) {
                chosen[i + 1] = (mask >> i) & 1U;
            }
            const auto xs = with_endpoints(nx, chosen);
            std::vector<std::size_t> ts;
            const double v = best_over_t(F, xs, p, q, &ts);
            if (v > out.value) {
                out.value = v;
                out.x_partition = xs;
                out.t_partition = std::move(ts);
            }
        }
        out.exact = true;
        return out;
    }
    // greedy insertion/removal from both the coarsest and the finest x partition
    for (bool start_full : {false, true}) {
        std::vector<bool> chosen(nx, start_full);
        double current = best_over_t(F, with_endpoints(nx, chosen), p, q, nullptr);
        for (;;) {
            std::size_t best_flip = nx;
            double best_value = current;
            for (std::size_t i = 1; i + 1 < nx; ++i) {
                chosen[i] = !chosen[i];
                const double v = best_over_t(F, with_endpoints(nx, chosen), p, q, nullptr);
                chosen[i] = !chosen[i];
                if (v > best_value * (1.0 + 1e-14) + 1e-300) {
                    best_value = v;
                    best_flip = i;
                }
            }
            if (best_flip == nx) {
                break;
            }
            chosen[best_flip] = !chosen[best_flip];
            current = best_value;
        }
        if (current > out.value) {
            out.x_partition = with_endpoints(nx, chosen);
            out.value = best_over_t(F, out.x_partition, p, q, &out.t_partition);
        }
    }
    out.exact = false;
    return out;
}

double pq_variation(const SampledSurface& F, double p, double q) {
    return pq_variation_detail(F, p, q).value;
}

double young_integral_2d(const SampledSurface& G, const SampledSurface& F) {
    if (!G.same_grid(F)) {
        throw std::invalid_argument("young_integral_2d: integrand and integrator grids differ");
    }
    double sum = 0.0;
    for (std::size_t j = 1; j < F.nt(); ++j) {
        for (std::size_t i = 1; i < F.nx(); ++i) {
            sum += G.at(i - 1, j - 1) * F.rect_increment(i - 1, i, j - 1, j);
        }
    }
    return sum;
}

double integral_wrt_localtime_2d(const SampledSurface& F, const LocalTimeField& field) {
    const auto L = SampledSurface::from(field);
    if (!L.same_grid(F)) {
        throw std::invalid_argument("integral_wrt_localtime_2d: F must be sampled on the field grids");
    }
    const std::size_t last = F.nt() - 1;
    double boundary = 0.0;
    for (std::size_t i = 1; i < F.nx(); ++i) {
        boundary += L.at(i - 1, last) * (F.at(i, last) - F.at(i - 1, last));
    }
    return young_integral_2d(L, F) - boundary;
}

double integral_wrt_localtime_2d(const SurfaceFn& F, const LocalTimeField& field) {
    return integral_wrt_localtime_2d(SampledSurface::from(F, field.x_grid, field.t_grid), field);
}

ExperimentReport occupation_check_2d(const SampledPath& path, const SurfaceFn& Phi,
                                     const LocalTimeField& field) {
    double lhs = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < path.n_steps(); ++k) {
        const double v = Phi(path.b[k], path.grid.node(k));
        const double dq = path.qv[k + 1] - path.qv[k];
        lhs += v * dq;
        scale += std::abs(v) * dq;
    }
    std::vector<double> inner(field.nx(), 0.0);
    for (std::size_t ix = 0; ix < field.nx(); ++ix) {
        const double x = field.x_grid[ix];
        double sum = 0.0;
        for (std::size_t it = 1; it < field.nt(); ++it) {
            sum += Phi(x, field.t_grid[it - 1]) * (field.at(it, ix) - field.at(it - 1, ix));
        }
        inner[ix] = sum;
    }
    auto report = make_report("occupation_2d", lhs, trapezoid(field.x_grid, inner), scale);
    report.seed = path.seed;
    report.level = path.n_steps();
    report.params["eps"] = field.bandwidth;
    report.params["nt"] = static_cast<double>(field.nt());
    return report;
}

double td_quadratic_covariation(const SurfaceFn& f, const SampledPath& path,
                                std::size_t coarsen) {
    const std::size_t n = path.n_steps();
    if (coarsen == 0 || n % coarsen != 0) {
        throw std::invalid_argument("td_quadratic_covariation: coarsen must divide n_steps");
    }
    double sum = 0.0;
    double f_prev = f(path.b[0], path.grid.node(0));
    for (std::size_t k = coarsen; k <= n; k += coarsen) {
        const double f_next = f(path.b[k], path.grid.node(k));
        sum += (f_next - f_prev) * (path.b[k] - path.b[k - coarsen]);
        f_prev = f_next;
    }
    return sum;
}

ExperimentReport td_ito_residual(const SurfaceFn& F, const SurfaceFn& dtF, const SurfaceFn& dxF,
                                 const SampledPath& path, const LocalTimeField& field) {
    const std::size_t n = path.n_steps();
    const double lhs = F(path.b[n], path.grid.node(n)) - F(0.0, 0.0);
    double time_term = 0.0;
    double ito_term = 0.0;
    double prev_dt = dtF(path.b[0], path.grid.node(0));
    for (std::size_t k = 0; k < n; ++k) {
        const double next_dt = dtF(path.b[k + 1], path.grid.node(k + 1));
        time_term += 0.5 * (prev_dt + next_dt) * (path.grid.node(k + 1) - path.grid.node(k));
        prev_dt = next_dt;
        ito_term += dxF(path.b[k], path.grid.node(k)) * (path.b[k + 1] - path.b[k]);
    }
    const double lt_term = integral_wrt_localtime_2d(dxF, field);
    const double rhs = time_term + ito_term - 0.5 * lt_term;
    auto report = make_report("td_ito", lhs, rhs, std::abs(lhs));
    report.seed = path.seed;
    report.level = n;
    report.params["eps"] = field.bandwidth;
    report.params["time_term"] = time_term;
    report.params["ito_term"] = ito_term;
    report.params["localtime_term"] = lt_term;
    return report;
}

ExperimentReport td_bouleau_yor_residual(const SurfaceFn& f, const SampledPath& path,
                                         const LocalTimeField& field, std::size_t coarsen) {
    const double lhs = td_quadratic_covariation(f, path, coarsen);
    const double rhs = -integral_wrt_localtime_2d(f, field);
    auto report =
        make_report("td_bouleau_yor", lhs, rhs, std::max(std::abs(lhs), std::abs(rhs)));
    report.seed = path.seed;
    report.level = path.n_steps() / coarsen;
    report.params["eps"] = field.bandwidth;
    return report;
}

void write_csv(const SampledSurface& surface, std::ostream& out) {
    const auto old_precision = out.precision(17);
    for (double x : surface.x_grid()) {
        out << ',' << x;
    }
    out << '\n';
    for (std::size_t it = 0; it < surface.nt(); ++it) {
        out << surface.t_grid()[it];
        for (std::size_t ix = 0; ix < surface.nx(); ++ix) {
            out << ',' << surface.at(ix, it);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_number(const std::string& cell) {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) {
        throw std::invalid_argument("surface csv: bad number '" + cell + "'");
    }
    return v;
}

}  // namespace

SampledSurface read_surface_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("surface csv: empty input");
    }
    const auto header = split_csv_line(line);
    if (header.size() < 2) {
        throw std::invalid_argument("surface csv: header needs a corner cell and x values");
    }
    std::vector<double> xs;
    for (std::size_t i = 1; i < header.size(); ++i) {
        xs.push_back(parse_number(header[i]));
    }
    std::vector<double> ts;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != xs.size() + 1) {
            throw std::invalid_argument("surface csv: ragged row");
        }
        ts.push_back(parse_number(cells[0]));
        for (std::size_t i = 1; i < cells.size(); ++i) {
            values.push_back(parse_number(cells[i]));
        }
    }
    return SampledSurface(std::move(xs), std::move(ts), std::move(values));
}

}  // namespace gbmlab
