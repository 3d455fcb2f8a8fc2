#include "gbmlab/report.hpp"

#include <cmath>

namespace gbmlab {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::trend_pass:
        return "trend-pass";
    case Verdict::unchecked:
        return "unchecked";
    }
    return "unchecked";
}

ExperimentReport make_report(std::string experiment, double lhs, double rhs, double scale) {
    ExperimentReport r;
    r.experiment = std::move(experiment);
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = std::abs(lhs - rhs);
    r.scale = scale;
    return r;
}

void apply_tolerance(ExperimentReport& report, double rel_tol, double abs_floor) {
    report.tolerance = rel_tol * report.scale + abs_floor;
    report.verdict = report.residual <= report.tolerance ? Verdict::pass : Verdict::fail;
}

bool trend_passes(const std::vector<double>& ladder, double factor) {
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (!(ladder[i] <= factor * ladder[i - 1])) {
            return false;
        }
    }
    return true;
}

}  // namespace gbmlab
