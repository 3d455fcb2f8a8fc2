#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gbmlab/report.hpp"
#include "gbmlab/scenario_sim.hpp"

namespace gbmlab {

// Malformed or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ControlSpec {
    std::string kind = "bang_bang";  // constant | piecewise_iid | bang_bang
    double sigma = 1.0;              // constant
    std::vector<double> levels;      // piecewise_iid
    double threshold = 0.0;          // bang_bang: sigma_hi while B > threshold
};

VolatilityControl make_control(const VolBand& band, const ControlSpec& spec);

// Per-experiment settings. Zero or empty means "use the registry default".
struct ExperimentEntry {
    std::string id;
    double tolerance = 0.0;
    double abs_floor = -1.0;
    std::vector<std::string> corpus;
    std::vector<double> ladder;
    std::size_t n_steps = 0;
    std::size_t seeds = 0;
    std::size_t paths = 0;
    std::size_t t_stride = 0;
};

struct LabConfig {
    VolBand band{0.5, 1.5};
    ControlSpec control;
    double t_max = 1.0;
    std::size_t n_steps = 1u << 14;
    std::size_t seed_count = 20;
    std::uint64_t seed_base = 1;
    double bandwidth_c = 1.0;  // eps = c * mesh^(1/3) * path scale
    std::string output_dir = "gbmlab_out";
    std::vector<ExperimentEntry> experiments;
};

// JSON text; throws ConfigError.
LabConfig parse_config(std::string_view text);
LabConfig load_config(const std::string& path);

using ExperimentRunner =
    std::function<std::vector<ExperimentReport>(const LabConfig&, const ExperimentEntry&)>;

struct ExperimentInfo {
    std::string id;
    std::string description;
    std::string anchor;  // the named result the experiment checks
    ExperimentEntry defaults;
    std::vector<std::string> corpus_choices;
    ExperimentRunner run;
};

class Registry {
public:
    void add(ExperimentInfo info);
    const ExperimentInfo* find(std::string_view id) const;
    const std::vector<ExperimentInfo>& entries() const { return entries_; }

private:
    std::vector<ExperimentInfo> entries_;
};

Registry default_registry();

// One line per experiment: id, description, anchor (tab separated).
void list_experiments(const Registry& registry, std::ostream& out);

// Fills unset fields of `entry` from the registry defaults and checks the
// corpus names; throws ConfigError.
ExperimentEntry resolve_entry(const ExperimentEntry& entry, const ExperimentInfo& info);

struct RunOptions {
    std::optional<std::string> output_dir;
    std::optional<std::size_t> seeds;
    std::size_t jobs = 1;
    bool timing = false;
};

struct RunOutcome {
    std::vector<ExperimentReport> rows;  // sorted by (experiment, level, seed_batch)
    bool all_pass = false;
    std::string output_dir;
};

// Validates the whole config before running anything (ConfigError), runs
// the experiments and returns the sorted rows. Writes no files.
RunOutcome run_experiments(const LabConfig& config, const Registry& registry,
                           const RunOptions& options);

void write_report_csv(const std::vector<ExperimentReport>& rows, std::ostream& out);
void write_summary_json(const RunOutcome& outcome, std::ostream& out);

// Command-line entry point: `run <config> [--out dir] [--seeds n] [--jobs n]
// [--timing]` and `list`. Returns the process exit code.
int lab_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
             const Registry& registry);

}  // namespace gbmlab
