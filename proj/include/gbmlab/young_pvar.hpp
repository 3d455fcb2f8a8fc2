#pragma once

#include <span>
#include <vector>

#include "gbmlab/local_time.hpp"
#include "gbmlab/sampled_function.hpp"

namespace gbmlab {

struct PVarCertificate {
    double p = 1.0;
    double value = 0.0;
    std::vector<std::size_t> witness;  // sample indices of an optimal partition
};

// Exact sup over index subsequences of sum |y_{i_{k+1}} - y_{i_k}|^p,
// O(n^2) dynamic program. Summing the witness terms left to right
// reproduces `value` bit for bit.
PVarCertificate p_variation(std::span<const double> y, double p);
PVarCertificate p_variation(const SampledFunction& f, double p);

// Sum of |dy|^p over a given index partition, left to right.
double partition_sum(std::span<const double> y, std::span<const std::size_t> indices, double p);

// ||f||_(p) = v_p(f)^(1/p) and ||f||_[p] = ||f||_(p) + sup |f|.
double p_seminorm(std::span<const double> y, double p);
double p_norm(std::span<const double> y, double p);

enum class YoungRule { left, midpoint };

// Riemann-Stieltjes sum of f against g on the union of both sample grids,
// restricted to the overlap of their domains.
double young_integral(const SampledFunction& f, const SampledFunction& g,
                      YoungRule rule = YoungRule::left);

// 1 + zeta(1/p + 1/q); requires 1/p + 1/q > 1.
double love_young_constant(double p, double q);

// int f(x) L(dx, t) computed by parts as -sum_j L(x_{j-1}, t)(f(x_j) - f(x_{j-1}))
// on the field's x_grid.
double integral_wrt_localtime(const RealFn& f, const LocalTimeField& field, double t);

// Direct form sum_j f(x_j)(L(x_j, t) - L(x_{j-1}, t)); equals the by-parts
// value whenever L vanishes at both ends of the grid.
double integral_wrt_localtime_direct(const RealFn& f, const LocalTimeField& field, double t);

// theta(x) = c exp(1 / ((x - 1)^2 - 1)) on (0, 2), zero elsewhere.
double mollifier(double x);
// Unnormalised bump exp(1 / ((x - 1)^2 - 1)) on (0, 2).
double mollifier_bump(double x);
double mollifier_constant();

// Fixed 64-point Gauss-Legendre rule on (0, 2) weighted by theta.
struct MollifierRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // theta(z_i) * w_i, summing to 1
};
const MollifierRule& mollifier_rule();

// f_n(x) = int_0^2 theta(z) f(x - z/n) dz on f's grid; f is extended by
// its end values outside its sampled range.
SampledFunction mollify(const SampledFunction& f, int n);
SampledFunction mollify(const RealFn& f, std::vector<double> grid, int n);

// Cumulative trapezoid with F(x_0) = F0.
SampledFunction antiderivative_of(const SampledFunction& f, double F0);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace gbmlab
