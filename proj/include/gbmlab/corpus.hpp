#pragma once

#include <string>
#include <vector>

#include "gbmlab/sampled_function.hpp"
#include "gbmlab/scenario_sim.hpp"
#include "gbmlab/two_param.hpp"

namespace gbmlab {

// Named test integrands. Some depend on the path (the indicator covers the
// central half of the visited range), so each is built per path.

// one, identity, sign, sin, zigzag, indicator
std::vector<std::string> function_names();
RealFn make_function(const std::string& name, const SampledPath& path);

// sum_{k=0}^{4} 2^(-2k/3) tri(2^k x), tri(u) = |u - round(u)|; finite
// 1.5-variation on compacts but not C^1.
double zigzag(double x);

struct PrimitivePair {
    RealFn F;
    RealFn f;  // F' (one-sided where F has a kink)
};
// square: (x^2/2, x), abs: (|x|, sign), sin: (1 - cos x, sin x)
std::vector<std::string> primitive_names();
PrimitivePair make_primitive(const std::string& name);

struct SurfaceTriple {
    SurfaceFn F;
    SurfaceFn dt;
    SurfaceFn dx;
};
// square_plus_t: x^2/2 + t, sin_growth: sin(x)(1 + t), product: x t
std::vector<std::string> surface_names();
SurfaceTriple make_surface(const std::string& name);

// one, box, sin_growth; box is the indicator of the central half of the
// visited range times [0, T/2).
std::vector<std::string> weight_names();
SurfaceFn make_weight(const std::string& name, const SampledPath& path);

}  // namespace gbmlab
