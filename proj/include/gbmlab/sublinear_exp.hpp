#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gbmlab/sampled_function.hpp"
#include "gbmlab/scenario_sim.hpp"

namespace gbmlab {

using PathFunctional = std::function<double(const SampledPath&)>;

// Finite stand-in for the family of measures behind the sublinear
// expectation. Its sup is a lower bound of the true value.
class ScenarioFamily {
public:
    explicit ScenarioFamily(std::vector<VolatilityControl> controls);

    // `levels` constant controls evenly spaced over the band (levels >= 1;
    // a single level sits at sigma_hi).
    static ScenarioFamily constant_grid(VolBand band, std::size_t levels = 5);

    const std::vector<VolatilityControl>& controls() const { return controls_; }
    const VolBand& band() const { return controls_.front().band(); }
    std::size_t size() const { return controls_.size(); }

private:
    std::vector<VolatilityControl> controls_;
};

// Everything that determines which paths a payoff is evaluated on.
struct SamplingPlan {
    ScenarioFamily family;
    TimeGrid grid;
    std::size_t n_paths = 2;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
};

// Payoff values, one row per scenario, one column per path. Paths with the
// same column index share their Gaussian driver (coupled sampling).
struct PayoffSample {
    std::vector<std::string> control_ids;
    std::vector<std::vector<double>> values;
    std::uint64_t plan_seed = 0;
    std::size_t n_steps = 0;
    double t_max = 0.0;
};

struct ScenarioStat {
    std::string control_id;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

struct SupEstimate {
    double value = 0.0;
    std::vector<ScenarioStat> per_scenario;
    std::string argmax_id;
    std::size_t argmax_index = 0;
};

PayoffSample evaluate_payoff(const PathFunctional& payoff, const SamplingPlan& plan);

// Max over scenario means; ties resolve to the lowest scenario index.
SupEstimate summarize(const PayoffSample& sample);

SupEstimate estimate_sup(const PathFunctional& payoff, const ScenarioFamily& family,
                         const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                         std::size_t jobs = 1);

// Pointwise combination of two samples from the same plan.
PayoffSample combine(const PayoffSample& x, const PayoffSample& y,
                     const std::function<double(double, double)>& op);

struct MonotoneWitness {
    bool holds = false;
    bool pointwise_dominates = false;
    double sup_x = 0.0;
    double sup_y = 0.0;
};

// Compares sup estimates of X and Y drawn from one plan; throws
// std::invalid_argument when the samples come from different plans.
MonotoneWitness monotone_check(const PayoffSample& x, const PayoffSample& y);

enum class Convexity { convex, concave };

// Closed form of E[phi(xi)] for xi G-normal with variance interval
// [sigma_lo^2 t, sigma_hi^2 t]: Gaussian integral with variance sigma_hi^2 t
// for convex phi, sigma_lo^2 t for concave phi.
double gnormal_closed_form(const RealFn& phi, Convexity convexity, const VolBand& band, double t);
// Sampled phi must cover at least +-8 standard deviations.
double gnormal_closed_form(const SampledFunction& phi, Convexity convexity, const VolBand& band,
                           double t);

}  // namespace gbmlab
