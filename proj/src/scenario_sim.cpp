#include "gbmlab/scenario_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "gbmlab/rng.hpp"

namespace gbmlab {

VolBand::VolBand(double lo, double hi) : sigma_lo(lo), sigma_hi(hi) {
    if (!(lo > 0.0) || !(lo <= hi) || !std::isfinite(hi)) {
        throw std::invalid_argument("VolBand: need 0 < sigma_lo <= sigma_hi");
    }
}

double VolBand::g(double a) const {
    return a >= 0.0 ? 0.5 * sigma_hi * sigma_hi * a : 0.5 * sigma_lo * sigma_lo * a;
}

TimeGrid::TimeGrid(double t_max, std::size_t n_steps) : t_max_(t_max), n_steps_(n_steps) {
    if (n_steps == 0) {
        throw std::invalid_argument("TimeGrid: n_steps must be positive");
    }
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw std::invalid_argument("TimeGrid: t_max must be positive and finite");
    }
}

double TimeGrid::node(std::size_t k) const {
    if (k == n_steps_) {
        return t_max_;
    }
    return t_max_ * static_cast<double>(k) / static_cast<double>(n_steps_);
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> t(size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        t[k] = node(k);
    }
    return t;
}

std::size_t TimeGrid::index_of(double t) const {
    const double pos = t / mesh();
    const double k = std::round(pos);
    if (k < 0.0 || k > static_cast<double>(n_steps_) ||
        std::abs(t - node(static_cast<std::size_t>(k))) > 1e-9 * t_max_) {
        throw std::invalid_argument("time " + std::to_string(t) + " is not a grid node");
    }
    return static_cast<std::size_t>(k);
}

VolatilityControl VolatilityControl::constant(VolBand band, double sigma, std::string id) {
    if (!band.contains(sigma)) {
        throw std::invalid_argument("constant control: sigma outside band");
    }
    VolatilityControl c(Kind::constant, band, id.empty() ? "const_" + std::to_string(sigma) : id);
    c.sigma_ = sigma;
    return c;
}

VolatilityControl VolatilityControl::piecewise_iid(VolBand band, std::vector<double> levels,
                                                   std::string id) {
    if (levels.empty()) {
        throw std::invalid_argument("piecewise_iid control: no levels");
    }
    for (double s : levels) {
        if (!band.contains(s)) {
            throw std::invalid_argument("piecewise_iid control: level outside band");
        }
    }
    VolatilityControl c(Kind::piecewise_iid, band, id.empty() ? "piecewise_iid" : std::move(id));
    c.levels_ = std::move(levels);
    return c;
}

VolatilityControl VolatilityControl::bang_bang(VolBand band, Predicate high_when, std::string id) {
    if (!high_when) {
        throw std::invalid_argument("bang_bang control: empty predicate");
    }
    VolatilityControl c(Kind::bang_bang, band, id.empty() ? "bang_bang" : std::move(id));
    c.high_when_ = std::move(high_when);
    return c;
}

double VolatilityControl::sigma_at(std::size_t step, double t, double b, std::uint64_t seed) const {
    switch (kind_) {
    case Kind::constant:
        return sigma_;
    case Kind::piecewise_iid: {
        // counter-based draw: depends on (seed, step) only
        const std::uint64_t u = stream_seed(seed ^ 0x5bd1e9955bd1e995ULL, step);
        return levels_[u % levels_.size()];
    }
    case Kind::bang_bang:
        return high_when_(t, b) ? band_.sigma_hi : band_.sigma_lo;
    }
    return sigma_;
}

SampledPath simulate_path(const VolatilityControl& control, const TimeGrid& grid,
                          std::uint64_t seed) {
    const auto z = normal_draws(seed, grid.n_steps());
    return simulate_path(control, grid, z, seed);
}

SampledPath simulate_path(const VolatilityControl& control, const TimeGrid& grid,
                          std::span<const double> driver, std::uint64_t seed) {
    const std::size_t n = grid.n_steps();
    if (driver.size() != n) {
        throw std::invalid_argument("simulate_path: driver length must equal n_steps");
    }
    SampledPath path{grid, std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0),
                     std::vector<double>(n, 0.0), seed, control.id()};
    const double dt = grid.mesh();
    const double sqrt_dt = std::sqrt(dt);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = control.sigma_at(k, grid.node(k), path.b[k], seed);
        path.sigma[k] = s;
        path.b[k + 1] = path.b[k] + s * sqrt_dt * driver[k];
        path.qv[k + 1] = path.qv[k] + s * s * dt;
    }
    return path;
}

double ito_integral(std::span<const double> integrand, const SampledPath& path) {
    if (integrand.size() != path.b.size()) {
        throw std::invalid_argument("ito_integral: integrand length must equal node count");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < path.b.size(); ++k) {
        sum += integrand[k] * (path.b[k + 1] - path.b[k]);
    }
    return sum;
}

double ito_integral(const RealFn& f, const SampledPath& path) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < path.b.size(); ++k) {
        sum += f(path.b[k]) * (path.b[k + 1] - path.b[k]);
    }
    return sum;
}

double qv_integral(const RealFn& f, const SampledPath& path) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < path.b.size(); ++k) {
        sum += f(path.b[k]) * (path.qv[k + 1] - path.qv[k]);
    }
    return sum;
}

}  // namespace gbmlab
