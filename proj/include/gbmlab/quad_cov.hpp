#pragma once

#include <vector>

#include "gbmlab/local_time.hpp"
#include "gbmlab/report.hpp"
#include "gbmlab/sampled_function.hpp"
#include "gbmlab/scenario_sim.hpp"

namespace gbmlab {

// sum_k (f(B_{k+1}) - f(B_k))(B_{k+1} - B_k) over every `coarsen`-th node.
double quadratic_covariation(const RealFn& f, const SampledPath& path, std::size_t coarsen);

// Refining partitions given as interval counts, each dividing n_steps.
struct PartitionSweep {
    std::vector<std::size_t> levels;
    std::vector<double> estimates;
    std::vector<double> residuals;
    double reference = 0.0;
};

// {2^lo, ..., 2^hi}
std::vector<std::size_t> dyadic_levels(unsigned lo, unsigned hi);

struct BouleauYorResult {
    PartitionSweep sweep;      // estimates: <f(B),B> per level; reference: int f dL
    ExperimentReport finest;   // lhs <f(B),B>, rhs -int f L(dx, T)
    bool trend_pass = false;   // residual ladder within the 1.25 band
};

BouleauYorResult bouleau_yor_residual(const RealFn& f, const SampledPath& path,
                                      const LocalTimeField& field,
                                      const std::vector<std::size_t>& levels);

// lhs = F(B_T) - F(0); rhs = sum f(B_k) dB_k - (1/2) int f(x) L(dx, T).
ExperimentReport ito_formula_residual(const RealFn& f, const RealFn& F, const SampledPath& path,
                                      const LocalTimeField& field);
// F built from the samples of f by cumulative trapezoid.
ExperimentReport ito_formula_residual(const SampledFunction& f, const SampledPath& path,
                                      const LocalTimeField& field);

struct CovariationTable {
    std::vector<std::size_t> levels;
    std::vector<int> mollify_levels;          // column 0 is the unmollified f
    std::vector<std::vector<double>> values;  // [level][column]
};

CovariationTable covariation_sweep(const SampledFunction& f, const SampledPath& path,
                                   const std::vector<std::size_t>& levels,
                                   const std::vector<int>& mollify_levels = {});

}  // namespace gbmlab
