#include "gbmlab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gbmlab {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::pair<double, double> central_half(const SampledPath& path) {
    const auto [lo, hi] = std::minmax_element(path.b.begin(), path.b.end());
    const double width = *hi - *lo;
    return {*lo + 0.25 * width, *lo + 0.75 * width};
}

[[noreturn]] void unknown(const std::string& kind, const std::string& name) {
    throw std::invalid_argument("unknown " + kind + " '" + name + "'");
}

}  // namespace

double zigzag(double x) {
    double sum = 0.0;
    for (int k = 0; k <= 4; ++k) {
        const double u = std::ldexp(x, k);
        sum += std::pow(2.0, -2.0 * k / 3.0) * std::abs(u - std::round(u));
    }
    return sum;
}

std::vector<std::string> function_names() {
    return {"one", "identity", "sign", "sin", "zigzag", "indicator"};
}

RealFn make_function(const std::string& name, const SampledPath& path) {
    if (name == "one") return [](double) { return 1.0; };
    if (name == "identity") return [](double x) { return x; };
    if (name == "sign") return sign;
    if (name == "sin") return [](double x) { return std::sin(x); };
    if (name == "zigzag") return zigzag;
    if (name == "indicator") {
        const auto [a, b] = central_half(path);
        return [a, b](double x) { return x >= a && x < b ? 1.0 : 0.0; };
    }
    unknown("function", name);
}

std::vector<std::string> primitive_names() { return {"square", "abs", "sin"}; }

PrimitivePair make_primitive(const std::string& name) {
    if (name == "square") return {[](double x) { return 0.5 * x * x; }, [](double x) { return x; }};
    if (name == "abs") return {[](double x) { return std::abs(x); }, sign};
    if (name == "sin") {
        return {[](double x) { return 1.0 - std::cos(x); }, [](double x) { return std::sin(x); }};
    }
    unknown("primitive pair", name);
}

std::vector<std::string> surface_names() { return {"square_plus_t", "sin_growth", "product"}; }

SurfaceTriple make_surface(const std::string& name) {
    if (name == "square_plus_t") {
        return {[](double x, double t) { return 0.5 * x * x + t; },
                [](double, double) { return 1.0; }, [](double x, double) { return x; }};
    }
    if (name == "sin_growth") {
        return {[](double x, double t) { return std::sin(x) * (1.0 + t); },
                [](double x, double) { return std::sin(x); },
                [](double x, double t) { return std::cos(x) * (1.0 + t); }};
    }
    if (name == "product") {
        return {[](double x, double t) { return x * t; }, [](double x, double) { return x; },
                [](double, double t) { return t; }};
    }
    unknown("surface", name);
}

std::vector<std::string> weight_names() { return {"one", "box", "sin_growth"}; }

SurfaceFn make_weight(const std::string& name, const SampledPath& path) {
    if (name == "one") return [](double, double) { return 1.0; };
    if (name == "sin_growth") return [](double x, double t) { return std::sin(x) * (1.0 + t); };
    if (name == "box") {
        const auto [a, b] = central_half(path);
        const double t_end = 0.5 * path.grid.t_max();
        return [a, b, t_end](double x, double t) { return x >= a && x < b && t < t_end ? 1.0 : 0.0; };
    }
    unknown("weight", name);
}

}  // namespace gbmlab
