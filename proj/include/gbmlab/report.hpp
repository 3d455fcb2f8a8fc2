#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gbmlab {

enum class Verdict { pass, fail, trend_pass, unchecked };

std::string to_string(Verdict v);

// Record of one identity check: both sides, their residual and the scale
// used to normalise it. Tolerance and verdict are filled by whoever applies
// a pass/fail policy (see apply_tolerance).
struct ExperimentReport {
    std::string experiment;
    std::size_t level = 0;
    std::size_t seed_batch = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double scale = 1.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::unchecked;
    double millis = 0.0;
    std::uint64_t seed = 0;
    std::map<std::string, double> params;

    double relative_residual() const { return scale > 0.0 ? residual / scale : residual; }
};

ExperimentReport make_report(std::string experiment, double lhs, double rhs, double scale);

// Sets tolerance = rel_tol * scale + abs_floor and verdict pass iff
// residual <= tolerance.
void apply_tolerance(ExperimentReport& report, double rel_tol, double abs_floor = 0.0);

// True iff every entry is at most `factor` times its predecessor.
bool trend_passes(const std::vector<double>& ladder, double factor = 1.25);

}  // namespace gbmlab
