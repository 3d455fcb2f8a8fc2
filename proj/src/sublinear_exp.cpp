#include "gbmlab/sublinear_exp.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gbmlab/parallel.hpp"
#include "gbmlab/rng.hpp"

namespace gbmlab {

ScenarioFamily::ScenarioFamily(std::vector<VolatilityControl> controls)
    : controls_(std::move(controls)) {
    if (controls_.empty()) {
        throw std::invalid_argument("ScenarioFamily: empty family");
    }
    for (const auto& c : controls_) {
        if (!(c.band() == controls_.front().band())) {
            throw std::invalid_argument("ScenarioFamily: controls must share one band");
        }
    }
}

ScenarioFamily ScenarioFamily::constant_grid(VolBand band, std::size_t levels) {
    if (levels == 0) {
        throw std::invalid_argument("constant_grid: need at least one level");
    }
    std::vector<VolatilityControl> controls;
    for (std::size_t i = 0; i < levels; ++i) {
        double s = band.sigma_hi;
        if (levels > 1) {
            s = band.sigma_lo + (band.sigma_hi - band.sigma_lo) * static_cast<double>(i) /
                                    static_cast<double>(levels - 1);
        }
        controls.push_back(VolatilityControl::constant(band, std::min(s, band.sigma_hi)));
    }
    return ScenarioFamily(std::move(controls));
}

PayoffSample evaluate_payoff(const PathFunctional& payoff, const SamplingPlan& plan) {
    if (plan.n_paths < 2) {
        throw std::invalid_argument("evaluate_payoff: need at least 2 paths");
    }
    const auto& controls = plan.family.controls();
    PayoffSample out;
    out.plan_seed = plan.seed;
    out.n_steps = plan.grid.n_steps();
    out.t_max = plan.grid.t_max();
    out.values.assign(controls.size(), std::vector<double>(plan.n_paths, 0.0));
    for (const auto& c : controls) {
        out.control_ids.push_back(c.id());
    }
    parallel_for(plan.n_paths, plan.jobs, [&](std::size_t i) {
        const std::uint64_t path_seed = stream_seed(plan.seed, i);
        const auto driver = normal_draws(path_seed, plan.grid.n_steps());
        for (std::size_t s = 0; s < controls.size(); ++s) {
            const auto path = simulate_path(controls[s], plan.grid, driver, path_seed);
            try {
                out.values[s][i] = payoff(path);
            } catch (const std::exception& e) {
                throw std::runtime_error("payoff failed in scenario '" + controls[s].id() +
                                         "', path " + std::to_string(i) + ": " + e.what());
            }
        }
    });
    return out;
}

SupEstimate summarize(const PayoffSample& sample) {
    SupEstimate est;
    for (std::size_t s = 0; s < sample.values.size(); ++s) {
        const auto& v = sample.values[s];
        const double n = static_cast<double>(v.size());
        // shifted by the first value so a constant payoff averages to itself exactly
        double shift_sum = 0.0;
        for (double x : v) {
            shift_sum += x - v.front();
        }
        const double mean = v.front() + shift_sum / n;
        double ss = 0.0;
        for (double x : v) {
            ss += (x - mean) * (x - mean);
        }
        const double se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
        est.per_scenario.push_back({sample.control_ids[s], mean, se, v.size()});
        if (s == 0 || mean > est.value) {
            est.value = mean;
            est.argmax_index = s;
            est.argmax_id = sample.control_ids[s];
        }
    }
    return est;
}

SupEstimate estimate_sup(const PathFunctional& payoff, const ScenarioFamily& family,
                         const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                         std::size_t jobs) {
    return summarize(evaluate_payoff(payoff, SamplingPlan{family, grid, n_paths, seed, jobs}));
}

namespace {

void require_same_plan(const PayoffSample& x, const PayoffSample& y) {
    bool same = x.plan_seed == y.plan_seed && x.n_steps == y.n_steps && x.t_max == y.t_max &&
                x.control_ids == y.control_ids && x.values.size() == y.values.size();
    for (std::size_t s = 0; same && s < x.values.size(); ++s) {
        same = x.values[s].size() == y.values[s].size();
    }
    if (!same) {
        throw std::invalid_argument("payoff samples come from different sampling plans");
    }
}

}  // namespace

PayoffSample combine(const PayoffSample& x, const PayoffSample& y,
                     const std::function<double(double, double)>& op) {
    require_same_plan(x, y);
    PayoffSample out = x;
    for (std::size_t s = 0; s < x.values.size(); ++s) {
        for (std::size_t i = 0; i < x.values[s].size(); ++i) {
            out.values[s][i] = op(x.values[s][i], y.values[s][i]);
        }
    }
    return out;
}

MonotoneWitness monotone_check(const PayoffSample& x, const PayoffSample& y) {
    require_same_plan(x, y);
    MonotoneWitness w;
    w.pointwise_dominates = true;
    for (std::size_t s = 0; s < x.values.size(); ++s) {
        for (std::size_t i = 0; i < x.values[s].size(); ++i) {
            if (x.values[s][i] < y.values[s][i]) {
                w.pointwise_dominates = false;
            }
        }
    }
    w.sup_x = summarize(x).value;
    w.sup_y = summarize(y).value;
    w.holds = w.sup_x >= w.sup_y;
    return w;
}

namespace {

double gaussian_expectation(const RealFn& phi, double variance) {
    using boost::math::quadrature::gauss_kronrod;
    const double sd = std::sqrt(variance);
    const double norm = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
    auto integrand = [&](double x) { return phi(x) * norm * std::exp(-0.5 * x * x / variance); };
    auto over = [&](double half_width) {
        // split at 0 where payoffs commonly kink
        return gauss_kronrod<double, 61>::integrate(integrand, -half_width, 0.0, 20, 1e-14) +
               gauss_kronrod<double, 61>::integrate(integrand, 0.0, half_width, 20, 1e-14);
    };
    double prev = over(8.0 * sd);
    if (!std::isfinite(prev)) {
        throw std::domain_error("gnormal_closed_form: non-finite quadrature");
    }
    for (double width = 16.0 * sd; width <= 64.0 * sd; width *= 2.0) {
        const double next = over(width);
        if (!std::isfinite(next)) {
            throw std::domain_error("gnormal_closed_form: non-finite quadrature");
        }
        if (std::abs(next - prev) < 1e-10) {
            return next;
        }
        prev = next;
    }
    throw std::domain_error("gnormal_closed_form: integrand tails do not decay");
}

double closed_form_variance(Convexity convexity, const VolBand& band, double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("gnormal_closed_form: t must be positive");
    }
    const double s = convexity == Convexity::convex ? band.sigma_hi : band.sigma_lo;
    return s * s * t;
}

}  // namespace

double gnormal_closed_form(const RealFn& phi, Convexity convexity, const VolBand& band, double t) {
    return gaussian_expectation(phi, closed_form_variance(convexity, band, t));
}

double gnormal_closed_form(const SampledFunction& phi, Convexity convexity, const VolBand& band,
                           double t) {
    const double variance = closed_form_variance(convexity, band, t);
    const double reach = 8.0 * std::sqrt(variance);
    if (phi.lo() > -reach || phi.hi() < reach) {
        throw std::invalid_argument("gnormal_closed_form: samples must cover +-8 sd");
    }
    // beyond the sampled range the Gaussian weight is below 1e-14
    return gaussian_expectation([&](double x) { return phi.clamped(x); }, variance);
}

}  // namespace gbmlab
