#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gbmlab/sampled_function.hpp"

namespace gbmlab {

// Volatility band [sigma_lo, sigma_hi]; equal ends reduce to classical BM.
struct VolBand {
    double sigma_lo = 1.0;
    double sigma_hi = 1.0;

    VolBand() = default;
    VolBand(double lo, double hi);

    bool contains(double sigma) const { return sigma >= sigma_lo && sigma <= sigma_hi; }
    // G(a) = (sigma_hi^2 a^+ - sigma_lo^2 a^-) / 2
    double g(double a) const;
    friend bool operator==(const VolBand&, const VolBand&) = default;
};

// Uniform mesh t_k = k * t_max / n_steps, k = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t_max, std::size_t n_steps);

    double t_max() const { return t_max_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t size() const { return n_steps_ + 1; }
    double mesh() const { return t_max_ / static_cast<double>(n_steps_); }
    double node(std::size_t k) const;
    std::vector<double> nodes() const;

    // Index of the node equal to t (relative tolerance 1e-9); throws
    // std::invalid_argument when t is not a node.
    std::size_t index_of(double t) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_max_;
    std::size_t n_steps_;
};

// Adapted volatility rule confined to a VolBand. The value used on
// [t_k, t_{k+1}) depends only on (k, t_k, B_{t_k}) and the path seed.
class VolatilityControl {
public:
    enum class Kind { constant, piecewise_iid, bang_bang };
    // Chooses sigma_hi when it returns true.
    using Predicate = std::function<bool(double t, double b)>;

    static VolatilityControl constant(VolBand band, double sigma, std::string id = {});
    static VolatilityControl piecewise_iid(VolBand band, std::vector<double> levels,
                                           std::string id = {});
    static VolatilityControl bang_bang(VolBand band, Predicate high_when, std::string id = {});

    double sigma_at(std::size_t step, double t, double b, std::uint64_t seed) const;

    Kind kind() const { return kind_; }
    const VolBand& band() const { return band_; }
    const std::string& id() const { return id_; }

private:
    VolatilityControl(Kind kind, VolBand band, std::string id)
        : kind_(kind), band_(band), id_(std::move(id)) {}

    Kind kind_;
    VolBand band_;
    std::string id_;
    double sigma_ = 0.0;
    std::vector<double> levels_;
    Predicate high_when_;
};

struct SampledPath {
    TimeGrid grid;
    std::vector<double> b;      // B at each node
    std::vector<double> qv;     // <B> at each node
    std::vector<double> sigma;  // control value per step
    std::uint64_t seed = 0;
    std::string control_id;

    std::size_t n_steps() const { return grid.n_steps(); }
    double b_final() const { return b.back(); }
    double qv_final() const { return qv.back(); }
};

SampledPath simulate_path(const VolatilityControl& control, const TimeGrid& grid,
                          std::uint64_t seed);

// Simulation driven by caller-supplied standard normal increments
// (one per step). Used for coupled sampling across scenarios.
SampledPath simulate_path(const VolatilityControl& control, const TimeGrid& grid,
                          std::span<const double> driver, std::uint64_t seed);

// Left-point sum  sum_k eta_k (B_{k+1} - B_k); integrand has one value per node.
double ito_integral(std::span<const double> integrand, const SampledPath& path);
// Same with eta_k = f(B_{t_k}).
double ito_integral(const RealFn& f, const SampledPath& path);

// Left-point sum  sum_k f(B_{t_k}) (qv_{k+1} - qv_k).
double qv_integral(const RealFn& f, const SampledPath& path);

}  // namespace gbmlab
