#include "gbmlab/young_pvar.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gbmlab {

PVarCertificate p_variation(std::span<const double> y, double p) {
    if (!(p >= 1.0)) {
        throw std::invalid_argument("p_variation: p must be >= 1");
    }
    const std::size_t n = y.size();
    if (n < 2) {
        throw std::invalid_argument("p_variation: need at least 2 samples");
    }
    // best[j]: sup over partitions of [0, j] that end at j
    std::vector<double> best(n, 0.0);
    std::vector<std::size_t> parent(n, 0);
    for (std::size_t j = 1; j < n; ++j) {
        double top = -1.0;
        for (std::size_t i = 0; i < j; ++i) {
            const double cand = best[i] + std::pow(std::abs(y[j] - y[i]), p);
            if (cand > top) {
                top = cand;
                parent[j] = i;
            }
        }
        best[j] = top;
    }
    PVarCertificate cert;
    cert.p = p;
    cert.value = best[n - 1];
    for (std::size_t j = n - 1;; j = parent[j]) {
        cert.witness.push_back(j);
        if (j == 0) {
            break;
        }
    }
    std::reverse(cert.witness.begin(), cert.witness.end());
    return cert;
}

PVarCertificate p_variation(const SampledFunction& f, double p) {
    return p_variation(f.y(), p);
}

double partition_sum(std::span<const double> y, std::span<const std::size_t> indices, double p) {
    double sum = 0.0;
    for (std::size_t k = 1; k < indices.size(); ++k) {
        sum += std::pow(std::abs(y[indices[k]] - y[indices[k - 1]]), p);
    }
    return sum;
}

double p_seminorm(std::span<const double> y, double p) {
    return std::pow(p_variation(y, p).value, 1.0 / p);
}

double p_norm(std::span<const double> y, double p) {
    double sup = 0.0;
    for (double v : y) {
        sup = std::max(sup, std::abs(v));
    }
    return p_seminorm(y, p) + sup;
}

double young_integral(const SampledFunction& f, const SampledFunction& g, YoungRule rule) {
    const double lo = std::max(f.lo(), g.lo());
    const double hi = std::min(f.hi(), g.hi());
    if (!(lo < hi)) {
        throw std::invalid_argument("young_integral: sample domains do not overlap");
    }
    std::vector<double> grid;
    grid.reserve(f.size() + g.size());
    std::merge(f.x().begin(), f.x().end(), g.x().begin(), g.x().end(), std::back_inserter(grid));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    grid.erase(std::remove_if(grid.begin(), grid.end(),
                              [&](double x) { return x < lo || x > hi; }),
               grid.end());
    if (grid.front() > lo) {
        grid.insert(grid.begin(), lo);
    }
    if (grid.back() < hi) {
        grid.push_back(hi);
    }
    double sum = 0.0;
    double g_prev = g(grid[0]);
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double g_next = g(grid[j]);
        const double xi = rule == YoungRule::left ? grid[j - 1] : 0.5 * (grid[j - 1] + grid[j]);
        sum += f(xi) * (g_next - g_prev);
        g_prev = g_next;
    }
    return sum;
}

double love_young_constant(double p, double q) {
    const double theta = 1.0 / p + 1.0 / q;
    if (!(theta > 1.0)) {
        throw std::invalid_argument("love_young_constant: need 1/p + 1/q > 1");
    }
    return 1.0 + std::riemann_zeta(theta);
}

double integral_wrt_localtime(const RealFn& f, const LocalTimeField& field, double t) {
    const auto row = field.row(field.row_of(t));
    const auto& xs = field.x_grid;
    double sum = 0.0;
    double f_prev = f(xs[0]);
    for (std::size_t j = 1; j < xs.size(); ++j) {
        const double f_next = f(xs[j]);
        sum += row[j - 1] * (f_next - f_prev);
        f_prev = f_next;
    }
    return -sum;
}

double integral_wrt_localtime_direct(const RealFn& f, const LocalTimeField& field, double t) {
    const auto row = field.row(field.row_of(t));
    const auto& xs = field.x_grid;
    double sum = 0.0;
    for (std::size_t j = 1; j < xs.size(); ++j) {
        sum += f(xs[j]) * (row[j] - row[j - 1]);
    }
    return sum;
}

double mollifier_bump(double x) {
    if (!(x > 0.0 && x < 2.0)) {
        return 0.0;
    }
    const double u = x - 1.0;
    return std::exp(1.0 / (u * u - 1.0));
}

double mollifier_constant() {
    static const double c = [] {
        using boost::math::quadrature::gauss_kronrod;
        const double mass =
            gauss_kronrod<double, 61>::integrate(mollifier_bump, 0.0, 1.0, 10, 1e-14) +
            gauss_kronrod<double, 61>::integrate(mollifier_bump, 1.0, 2.0, 10, 1e-14);
        return 1.0 / mass;
    }();
    return c;
}

double mollifier(double x) {
    return mollifier_constant() * mollifier_bump(x);
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

const MollifierRule& mollifier_rule() {
    static const MollifierRule rule = [] {
        std::vector<double> x;
        std::vector<double> w;
        gauss_legendre(64, x, w);
        MollifierRule r;
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = x[i] + 1.0;  // map [-1, 1] onto [0, 2]
            r.nodes.push_back(z);
            r.weights.push_back(w[i] * mollifier(z));
            total += r.weights.back();
        }
        // normalised so the rule integrates constants exactly
        for (double& v : r.weights) {
            v /= total;
        }
        return r;
    }();
    return rule;
}

SampledFunction mollify(const SampledFunction& f, int n) {
    if (n < 1) {
        throw std::invalid_argument("mollify: n must be >= 1");
    }
    const auto& rule = mollifier_rule();
    std::vector<double> y(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * f.clamped(f.x()[j] - rule.nodes[i] / n);
        }
        y[j] = sum;
    }
    return SampledFunction(f.x(), std::move(y), f.interp());
}

SampledFunction mollify(const RealFn& f, std::vector<double> grid, int n) {
    if (n < 1) {
        throw std::invalid_argument("mollify: n must be >= 1");
    }
    const auto& rule = mollifier_rule();
    std::vector<double> y(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * f(grid[j] - rule.nodes[i] / n);
        }
        y[j] = sum;
    }
    return SampledFunction(std::move(grid), std::move(y));
}

SampledFunction antiderivative_of(const SampledFunction& f, double F0) {
    const auto& x = f.x();
    const auto& y = f.y();
    std::vector<double> F(x.size());
    F[0] = F0;
    for (std::size_t j = 1; j < x.size(); ++j) {
        F[j] = F[j - 1] + 0.5 * (y[j] + y[j - 1]) * (x[j] - x[j - 1]);
    }
    return SampledFunction(x, std::move(F));
}

}  // namespace gbmlab
