#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "gbmlab/local_time.hpp"
#include "gbmlab/report.hpp"
#include "gbmlab/scenario_sim.hpp"

namespace gbmlab {

using SurfaceFn = std::function<double(double x, double t)>;

// F(x_i, t_j) on a rectangular grid, stored row-major by t.
class SampledSurface {
public:
    SampledSurface(std::vector<double> x_grid, std::vector<double> t_grid,
                   std::vector<double> values);

    static SampledSurface from(const SurfaceFn& fn, std::vector<double> x_grid,
                               std::vector<double> t_grid);
    static SampledSurface from(const LocalTimeField& field);

    const std::vector<double>& x_grid() const { return x_; }
    const std::vector<double>& t_grid() const { return t_; }
    std::size_t nx() const { return x_.size(); }
    std::size_t nt() const { return t_.size(); }
    double at(std::size_t ix, std::size_t it) const { return values_[it * x_.size() + ix]; }

    // F(x_i1,t_j1) - F(x_i0,t_j1) - F(x_i1,t_j0) + F(x_i0,t_j0)
    double rect_increment(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) const {
        return at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0);
    }

    bool same_grid(const SampledSurface& other) const {
        return x_ == other.x_ && t_ == other.t_;
    }

private:
    std::vector<double> x_;
    std::vector<double> t_;
    std::vector<double> values_;
};

struct PQVariation {
    double value = 0.0;
    bool exact = false;
    std::vector<std::size_t> x_partition;
    std::vector<std::size_t> t_partition;
};

// sup over index partitions of sum_j (sum_i |dF(x_i, t_j)|^p)^q. The t
// partition is optimised exactly by dynamic programming for any fixed x
// partition; x partitions are enumerated exhaustively when nx <= 14 and
// found by greedy insertion/removal otherwise (then a lower bound).
PQVariation pq_variation_detail(const SampledSurface& F, double p, double q);
double pq_variation(const SampledSurface& F, double p, double q);

// Objective for explicit partitions (both include their own endpoints).
double pq_partition_sum(const SampledSurface& F, const std::vector<std::size_t>& x_partition,
                        const std::vector<std::size_t>& t_partition, double p, double q);

// sum_j sum_i G(x_{i-1}, t_{j-1}) dF(x_i, t_j); grids must match.
double young_integral_2d(const SampledSurface& G, const SampledSurface& F);

// int_0^T int F(x,s) L(dx,ds) by parts: young_integral_2d(L, F) minus the
// left-point sum of L(., T) against F(dx, T). F sampled on the field grids.
double integral_wrt_localtime_2d(const SampledSurface& F, const LocalTimeField& field);
double integral_wrt_localtime_2d(const SurfaceFn& F, const LocalTimeField& field);

// lhs = sum Phi(B_k, t_k) dqv_k; rhs = trapezoid in x of the left-point
// Stieltjes sums of Phi(x, .) against L(x, .) on the field's t_grid.
ExperimentReport occupation_check_2d(const SampledPath& path, const SurfaceFn& Phi,
                                     const LocalTimeField& field);

// sum_j (f(B_{t_j}, t_j) - f(B_{t_{j-1}}, t_{j-1}))(B_{t_j} - B_{t_{j-1}}).
double td_quadratic_covariation(const SurfaceFn& f, const SampledPath& path,
                                std::size_t coarsen);

// lhs = F(B_T, T) - F(0, 0); rhs = trapezoid int dtF ds + sum dxF dB
//       - (1/2) integral_wrt_localtime_2d(dxF).
ExperimentReport td_ito_residual(const SurfaceFn& F, const SurfaceFn& dtF, const SurfaceFn& dxF,
                                 const SampledPath& path, const LocalTimeField& field);

// lhs = td_quadratic_covariation(f); rhs = -integral_wrt_localtime_2d(f).
ExperimentReport td_bouleau_yor_residual(const SurfaceFn& f, const SampledPath& path,
                                         const LocalTimeField& field, std::size_t coarsen = 1);

// First row: empty corner then x_grid; first column t_grid.
void write_csv(const SampledSurface& surface, std::ostream& out);
SampledSurface read_surface_csv(std::istream& in);

}  // namespace gbmlab
