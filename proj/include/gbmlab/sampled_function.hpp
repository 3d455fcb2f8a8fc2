#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gbmlab {

using RealFn = std::function<double(double)>;

enum class Interp { linear, step_left };

// A real function of one variable given by samples on a strictly
// increasing grid. Evaluation outside [x.front(), x.back()] throws
// std::out_of_range.
class SampledFunction {
public:
    SampledFunction(std::vector<double> x, std::vector<double> y,
                    Interp interp = Interp::linear);

    // Samples `fn` at every point of `grid`.
    static SampledFunction from(const RealFn& fn, std::vector<double> grid,
                                Interp interp = Interp::linear);

    double operator()(double at) const;

    // Same as operator() but clamps `at` into the sampled range.
    double clamped(double at) const;

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    Interp interp() const { return interp_; }
    std::size_t size() const { return x_.size(); }
    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }
    double sup_norm() const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    Interp interp_;
};

// n+1 equally spaced points from lo to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n_intervals);

bool strictly_increasing(std::span<const double> v);

}  // namespace gbmlab
