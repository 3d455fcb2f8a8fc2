#include "gbmlab/sampled_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gbmlab {

bool strictly_increasing(std::span<const double> v) {
    return std::adjacent_find(v.begin(), v.end(),
                              [](double a, double b) { return !(a < b); }) == v.end();
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n_intervals) {
    if (n_intervals == 0 || !(lo < hi)) {
        throw std::invalid_argument("uniform_grid: need lo < hi and at least one interval");
    }
    std::vector<double> g(n_intervals + 1);
    const double h = (hi - lo) / static_cast<double>(n_intervals);
    for (std::size_t i = 0; i <= n_intervals; ++i) {
        g[i] = lo + h * static_cast<double>(i);
    }
    g.back() = hi;
    return g;
}

SampledFunction::SampledFunction(std::vector<double> x, std::vector<double> y, Interp interp)
    : x_(std::move(x)), y_(std::move(y)), interp_(interp) {
    if (x_.size() != y_.size()) {
        throw std::invalid_argument("SampledFunction: x and y lengths differ");
    }
    if (x_.empty()) {
        throw std::invalid_argument("SampledFunction: no samples");
    }
    if (!strictly_increasing(x_)) {
        throw std::invalid_argument("SampledFunction: x must be strictly increasing");
    }
}

SampledFunction SampledFunction::from(const RealFn& fn, std::vector<double> grid, Interp interp) {
    std::vector<double> y(grid.size());
    std::transform(grid.begin(), grid.end(), y.begin(), fn);
    return SampledFunction(std::move(grid), std::move(y), interp);
}

double SampledFunction::operator()(double at) const {
    if (!(at >= x_.front() && at <= x_.back())) {
        throw std::out_of_range("SampledFunction: " + std::to_string(at) +
                                " outside sampled range [" + std::to_string(x_.front()) + ", " +
                                std::to_string(x_.back()) + "]");
    }
    return clamped(at);
}

double SampledFunction::clamped(double at) const {
    if (at <= x_.front()) {
        return y_.front();
    }
    if (at >= x_.back()) {
        return y_.back();
    }
    // first index with x > at; at lies in [x[j-1], x[j])
    const auto it = std::upper_bound(x_.begin(), x_.end(), at);
    const auto j = static_cast<std::size_t>(it - x_.begin());
    if (interp_ == Interp::step_left) {
        return y_[j - 1];
    }
    const double w = (at - x_[j - 1]) / (x_[j] - x_[j - 1]);
    return y_[j - 1] + w * (y_[j] - y_[j - 1]);
}

double SampledFunction::sup_norm() const {
    double m = 0.0;
    for (double v : y_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace gbmlab
