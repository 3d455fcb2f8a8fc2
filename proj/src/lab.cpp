#include "gbmlab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include "CLI11.hpp"
#include "json.hpp"

#include "gbmlab/convergence_lab.hpp"
#include "gbmlab/corpus.hpp"
#include "gbmlab/local_time.hpp"
#include "gbmlab/parallel.hpp"
#include "gbmlab/quad_cov.hpp"
#include "gbmlab/rng.hpp"
#include "gbmlab/sublinear_exp.hpp"
#include "gbmlab/two_param.hpp"

namespace gbmlab {

using nlohmann::json;

VolatilityControl make_control(const VolBand& band, const ControlSpec& spec) {
    if (spec.kind == "constant") {
        return VolatilityControl::constant(band, spec.sigma);
    }
    if (spec.kind == "piecewise_iid") {
        return VolatilityControl::piecewise_iid(band, spec.levels);
    }
    if (spec.kind == "bang_bang") {
        const double threshold = spec.threshold;
        return VolatilityControl::bang_bang(
            band, [threshold](double, double b) { return b > threshold; }, "bang_bang");
    }
    throw ConfigError("unknown control kind '" + spec.kind + "'");
}

// ---------------------------------------------------------------- config

namespace {

void check_keys(const json& node, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!node.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, value] : node.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get(const json& node, const char* key, const std::string& where) {
    try {
        return node.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad or missing '" + std::string(key) + "' in " + where);
    }
}

std::size_t get_count(const json& node, const char* key, const std::string& where) {
    const auto v = node.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw ConfigError("'" + std::string(key) + "' in " + where + " must be a positive integer");
    }
    return v.get<std::size_t>();
}

ExperimentEntry parse_entry(const json& node, std::size_t index) {
    const std::string where = "experiments[" + std::to_string(index) + "]";
    check_keys(node,
               {"id", "tolerance", "abs_floor", "corpus", "ladder", "n_steps", "seeds", "paths",
                "t_stride"},
               where);
    ExperimentEntry e;
    e.id = get<std::string>(node, "id", where);
    if (node.contains("tolerance")) {
        e.tolerance = get<double>(node, "tolerance", where);
        if (!(e.tolerance > 0.0)) throw ConfigError("tolerance must be positive in " + where);
    }
    if (node.contains("abs_floor")) {
        e.abs_floor = get<double>(node, "abs_floor", where);
        if (!(e.abs_floor >= 0.0)) throw ConfigError("abs_floor must be >= 0 in " + where);
    }
    if (node.contains("corpus")) {
        e.corpus = get<std::vector<std::string>>(node, "corpus", where);
        if (e.corpus.empty()) throw ConfigError("empty corpus in " + where);
    }
    if (node.contains("ladder")) {
        e.ladder = get<std::vector<double>>(node, "ladder", where);
        if (e.ladder.empty()) throw ConfigError("empty ladder in " + where);
    }
    if (node.contains("n_steps")) e.n_steps = get_count(node, "n_steps", where);
    if (node.contains("seeds")) e.seeds = get_count(node, "seeds", where);
    if (node.contains("paths")) e.paths = get_count(node, "paths", where);
    if (node.contains("t_stride")) e.t_stride = get_count(node, "t_stride", where);
    return e;
}

}  // namespace

LabConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, {"band", "control", "grid", "seeds", "bandwidth", "output_dir", "experiments"},
               "config");
    LabConfig cfg;
    if (root.contains("band")) {
        const auto& band = root["band"];
        check_keys(band, {"sigma_lo", "sigma_hi"}, "band");
        try {
            cfg.band = VolBand(get<double>(band, "sigma_lo", "band"),
                               get<double>(band, "sigma_hi", "band"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("invalid band: ") + e.what());
        }
    }
    if (root.contains("control")) {
        const auto& c = root["control"];
        check_keys(c, {"kind", "sigma", "levels", "threshold"}, "control");
        cfg.control.kind = get<std::string>(c, "kind", "control");
        if (c.contains("sigma")) cfg.control.sigma = get<double>(c, "sigma", "control");
        if (c.contains("levels")) cfg.control.levels = get<std::vector<double>>(c, "levels", "control");
        if (c.contains("threshold")) cfg.control.threshold = get<double>(c, "threshold", "control");
    }
    if (root.contains("grid")) {
        const auto& g = root["grid"];
        check_keys(g, {"t_max", "n_steps"}, "grid");
        if (g.contains("t_max")) cfg.t_max = get<double>(g, "t_max", "grid");
        if (g.contains("n_steps")) cfg.n_steps = get_count(g, "n_steps", "grid");
        if (!(cfg.t_max > 0.0)) throw ConfigError("grid.t_max must be positive");
    }
    if (root.contains("seeds")) {
        const auto& s = root["seeds"];
        check_keys(s, {"count", "base"}, "seeds");
        if (s.contains("count")) cfg.seed_count = get_count(s, "count", "seeds");
        if (s.contains("base")) cfg.seed_base = get<std::uint64_t>(s, "base", "seeds");
    }
    if (root.contains("bandwidth")) {
        const auto& bw = root["bandwidth"];
        check_keys(bw, {"c"}, "bandwidth");
        if (bw.contains("c")) cfg.bandwidth_c = get<double>(bw, "c", "bandwidth");
        if (!(cfg.bandwidth_c > 0.0)) throw ConfigError("bandwidth.c must be positive");
    }
    if (root.contains("output_dir")) cfg.output_dir = get<std::string>(root, "output_dir", "config");
    try {
        make_control(cfg.band, cfg.control);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid control: ") + e.what());
    }
    if (!root.contains("experiments") || !root["experiments"].is_array()) {
        throw ConfigError("missing experiment list");
    }
    const auto& list = root["experiments"];
    if (list.empty()) {
        throw ConfigError("empty experiment list");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        cfg.experiments.push_back(parse_entry(list[i], i));
    }
    return cfg;
}

LabConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

// ---------------------------------------------------------------- registry

void Registry::add(ExperimentInfo info) {
    if (find(info.id) != nullptr) {
        throw std::invalid_argument("duplicate experiment id '" + info.id + "'");
    }
    entries_.push_back(std::move(info));
}

const ExperimentInfo* Registry::find(std::string_view id) const {
    for (const auto& e : entries_) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

void list_experiments(const Registry& registry, std::ostream& out) {
    for (const auto& e : registry.entries()) {
        out << e.id << '\t' << e.description << '\t' << e.anchor << '\n';
    }
}

ExperimentEntry resolve_entry(const ExperimentEntry& entry, const ExperimentInfo& info) {
    ExperimentEntry r = entry;
    const ExperimentEntry& d = info.defaults;
    if (r.tolerance <= 0.0) r.tolerance = d.tolerance;
    if (r.abs_floor < 0.0) r.abs_floor = std::max(0.0, d.abs_floor);
    if (r.corpus.empty()) r.corpus = d.corpus;
    if (r.ladder.empty()) r.ladder = d.ladder;
    if (r.n_steps == 0) r.n_steps = d.n_steps;
    if (r.seeds == 0) r.seeds = d.seeds;
    if (r.paths == 0) r.paths = d.paths;
    if (r.t_stride == 0) r.t_stride = d.t_stride;
    for (const auto& name : r.corpus) {
        if (std::find(info.corpus_choices.begin(), info.corpus_choices.end(), name) ==
            info.corpus_choices.end()) {
            throw ConfigError("unknown corpus entry '" + name + "' for experiment '" + info.id + "'");
        }
    }
    return r;
}

// ---------------------------------------------------------------- experiments

namespace {

struct Setting {
    const LabConfig& config;
    const ExperimentEntry& entry;

    std::size_t n_steps() const { return entry.n_steps ? entry.n_steps : config.n_steps; }
    std::size_t seeds() const { return entry.seeds ? entry.seeds : config.seed_count; }
    TimeGrid grid() const { return TimeGrid(config.t_max, n_steps()); }
    double eps(const SampledPath& p) const { return config.bandwidth_c * default_bandwidth(p); }
    SampledPath path(std::size_t s) const {
        return simulate_path(make_control(config.band, config.control), grid(),
                             stream_seed(config.seed_base, s));
    }
};

// Seed averages of the fields of per-path reports.
struct Average {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double scale = 0.0;
    std::size_t count = 0;

    void add(const ExperimentReport& r) { add(r.lhs, r.rhs, r.residual, r.scale); }
    void add(double l, double r, double res, double s) {
        lhs += l;
        rhs += r;
        residual += res;
        scale += s;
        ++count;
    }
    ExperimentReport report(std::string name) const {
        const double n = static_cast<double>(count);
        ExperimentReport r;
        r.experiment = std::move(name);
        r.lhs = lhs / n;
        r.rhs = rhs / n;
        r.residual = residual / n;
        r.scale = scale / n;
        r.params["seeds"] = n;
        return r;
    }
};

// Ladder rows: each must stay within factor * the previous residual.
void apply_trend(std::vector<ExperimentReport>& rows, double factor) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].tolerance = i == 0 ? rows[i].residual : factor * rows[i - 1].residual;
        rows[i].verdict = rows[i].residual <= rows[i].tolerance ? Verdict::trend_pass : Verdict::fail;
    }
}

std::vector<double> interior_levels(const SampledPath& path, std::size_t count) {
    const auto [lo, hi] = std::minmax_element(path.b.begin(), path.b.end());
    std::vector<double> xs(count);
    for (std::size_t j = 0; j < count; ++j) {
        xs[j] = *lo + (*hi - *lo) * static_cast<double>(j + 1) / static_cast<double>(count + 1);
    }
    return xs;
}

std::vector<ExperimentReport> run_occupation_1d(const LabConfig& c, const ExperimentEntry& e) {
    const Setting set{c, e};
    std::vector<ExperimentReport> rows;
    for (std::size_t s = 0; s < set.seeds(); ++s) {
        const auto path = set.path(s);
        const double eps = set.eps(path);
        const auto grid = default_x_grid(path, eps);
        for (const auto& name : e.corpus) {
            auto r = occupation_check(path, make_function(name, path), eps, grid);
            r.experiment = "occupation_1d:" + name;
            r.seed_batch = s;
            r.seed = path.seed;
            apply_tolerance(r, e.tolerance, e.abs_floor);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::vector<ExperimentReport> run_tanaka(const LabConfig& c, const ExperimentEntry& e) {
    const Setting set{c, e};
    std::vector<ExperimentReport> rows;
    for (std::size_t s = 0; s < set.seeds(); ++s) {
        const auto path = set.path(s);
        const double eps = set.eps(path);
        const double T = path.grid.t_max();
        ExperimentReport worst = make_report("tanaka", 0.0, 0.0, path.qv_final());
        for (const double x : interior_levels(path, 32)) {
            const double occ = local_time_occupation(path, x, eps, T);
            const double tan = local_time_tanaka(path, x, T);
            if (std::abs(occ - tan) > worst.residual) {
                worst = make_report("tanaka", occ, tan, path.qv_final());
                worst.params["x"] = x;
            }
        }
        worst.params["eps"] = eps;
        worst.seed_batch = s;
        worst.seed = path.seed;
        apply_tolerance(worst, e.tolerance, e.abs_floor);
        rows.push_back(std::move(worst));
    }
    return rows;
}

std::vector<std::size_t> partition_levels(const std::vector<double>& exponents) {
    std::vector<std::size_t> levels;
    for (const double x : exponents) {
        levels.push_back(std::size_t{1} << static_cast<unsigned>(x));
    }
    return levels;
}

std::vector<ExperimentReport> run_bouleau_yor(const LabConfig& c, const ExperimentEntry& e) {
    const Setting set{c, e};
    const auto levels = partition_levels(e.ladder);
    std::map<std::string, std::vector<Average>> acc;
    for (const auto& name : e.corpus) acc[name].resize(levels.size());
    for (std::size_t s = 0; s < set.seeds(); ++s) {
        const auto path = set.path(s);
        const double eps = set.eps(path);
        const auto field = local_time_field(path, default_x_grid(path, eps), eps, path.n_steps());
        for (const auto& name : e.corpus) {
            const auto res = bouleau_yor_residual(make_function(name, path), path, field, levels);
            const double ref = res.sweep.reference;
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const double est = res.sweep.estimates[i];
                acc[name][i].add(est, -ref, res.sweep.residuals[i],
                                 std::max(std::abs(est), std::abs(ref)));
            }
        }
    }
    std::vector<ExperimentReport> rows;
    for (const auto& name : e.corpus) {
        std::vector<ExperimentReport> ladder;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            auto r = acc[name][i].report("bouleau_yor:" + name);
            r.level = i;
            r.params["intervals"] = static_cast<double>(levels[i]);
            ladder.push_back(std::move(r));
        }
        apply_trend(ladder, 1.25);
        apply_tolerance(ladder.back(), e.tolerance, e.abs_floor);
        rows.insert(rows.end(), ladder.begin(), ladder.end());
    }
    return rows;
}

std::vector<ExperimentReport> run_ito_c1(const LabConfig& c, const ExperimentEntry& e) {
    const Setting set{c, e};
    std::map<std::string, Average> acc;
    for (std::size_t s = 0; s < set.seeds(); ++s) {
        const auto path = set.path(s);
        const double eps = set.eps(path);
        const auto field = local_time_field(path, default_x_grid(path, eps), eps, path.n_steps());
        for (const auto& name : e.corpus) {
            const auto pair = make_primitive(name);
            acc[name].add(ito_formula_residual(pair.f, pair.F, path, field));
        }
    }
    std::vector<ExperimentReport> rows;
    for (const auto& name : e.corpus) {
        auto r = acc[name].report("ito_c1:" + name);
        apply_tolerance(r, e.tolerance, e.abs_floor);
        rows.push_back(std::move(r));
    }
    return rows;
}

template <typename Check>
std::vector<ExperimentReport> run_two_param(const LabConfig& c, const ExperimentEntry& e,
                                            const std::string& prefix, Check&& check) {
    const Setting set{c, e};
    std::map<std::string, Average> acc;
    for (std::size_t s = 0; s < set.seeds(); ++s) {
        const auto path = set.path(s);
        const double eps = set.eps(path);
        const auto field = local_time_field(path, default_x_grid(path, eps), eps, e.t_stride);
        for (const auto& name : e.corpus) {
            acc[name].add(check(name, path, field));
        }
    }
    std::vector<ExperimentReport> rows;
    for (const auto& name : e.corpus) {
        auto r = acc[name].report(prefix + ":" + name);
        r.params["t_stride"] = static_cast<double>(e.t_stride);
        apply_tolerance(r, e.tolerance, e.abs_floor);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ExperimentReport> run_occupation_2d(const LabConfig& c, const ExperimentEntry& e) {
    return run_two_param(c, e, "occupation_2d",
                         [](const std::string& name, const SampledPath& path,
                            const LocalTimeField& field) {
                             return occupation_check_2d(path, make_weight(name, path), field);
                         });
}

std::vector<ExperimentReport> run_td_ito(const LabConfig& c, const ExperimentEntry& e) {
    return run_two_param(c, e, "td_ito",
                         [](const std::string& name, const SampledPath& path,
                            const LocalTimeField& field) {
                             const auto F = make_surface(name);
                             return td_ito_residual(F.F, F.dt, F.dx, path, field);
                         });
}

std::vector<ExperimentReport> run_td_bouleau_yor(const LabConfig& c, const ExperimentEntry& e) {
    return run_two_param(c, e, "td_bouleau_yor",
                         [](const std::string& name, const SampledPath& path,
                            const LocalTimeField& field) {
                             return td_bouleau_yor_residual(make_surface(name).F, path, field);
                         });
}

std::vector<ExperimentReport> run_lin(const LabConfig& c, const ExperimentEntry& e) {
    const Setting set{c, e};
    const unsigned finest = static_cast<unsigned>(*std::max_element(e.ladder.begin(), e.ladder.end()));
    std::vector<Average> acc(e.ladder.size());
    for (std::size_t s = 0; s < set.seeds(); ++s) {
        const auto path = set.path(s);
        const auto [lo, hi] = std::minmax_element(path.b.begin(), path.b.end());
        const double a = *lo + 0.25 * (*hi - *lo);
        const double b = *lo + 0.75 * (*hi - *lo);
        const auto field =
            tanaka_field(path, uniform_grid(a, b, std::size_t{1} << finest), path.n_steps());
        for (std::size_t i = 0; i < e.ladder.size(); ++i) {
            const auto sq = localtime_square_sum(field, path.grid.t_max(), a, b,
                                                 static_cast<unsigned>(e.ladder[i]));
            acc[i].add(sq.ratio(), 1.0, std::abs(sq.ratio() - 1.0), 1.0);
        }
    }
    std::vector<ExperimentReport> rows;
    for (std::size_t i = 0; i < e.ladder.size(); ++i) {
        auto r = acc[i].report("lin_square_sum");
        r.level = i;
        // residual of the seed-averaged ratio, not the average of residuals
        r.residual = std::abs(r.lhs - 1.0);
        r.params["dyadic_level"] = e.ladder[i];
        apply_tolerance(r, e.tolerance, e.abs_floor);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ExperimentReport> run_appendix(const LabConfig& c, const ExperimentEntry& e) {
    const Setting set{c, e};
    ConvergenceSpec spec;
    spec.experiment = "appendix_eps";
    spec.ladder = e.ladder;
    spec.control = make_control(c.band, c.control);
    spec.t_max = c.t_max;
    spec.n_steps = set.n_steps();
    spec.seeds = set.seeds();
    spec.base_seed = c.seed_base;
    std::vector<ExperimentReport> rows;
    for (const auto& row : convergence_table(spec)) {
        auto r = make_report("appendix_eps", row.estimate, row.target, row.target);
        r.level = row.level;
        r.seed_batch = row.seed_batch;
        r.residual = row.abs_error;
        r.params["eps"] = row.ladder_value;
        rows.push_back(std::move(r));
    }
    apply_trend(rows, e.tolerance);
    return rows;
}

std::vector<ExperimentReport> run_sup(const LabConfig& c, const ExperimentEntry& e) {
    const Setting set{c, e};
    const auto family = ScenarioFamily::constant_grid(c.band, 5);
    const auto grid = set.grid();
    const double T = grid.t_max();
    std::vector<ExperimentReport> rows;
    for (const auto& name : e.corpus) {
        const bool convex = name == "square";
        const double sgn = convex ? 1.0 : -1.0;
        const auto est = estimate_sup([sgn](const SampledPath& p) { return sgn * p.b_final() * p.b_final(); },
                                      family, grid, e.paths, c.seed_base);
        const double exact = gnormal_closed_form([sgn](double x) { return sgn * x * x; },
                                                 convex ? Convexity::convex : Convexity::concave,
                                                 c.band, T);
        const auto& top = est.per_scenario[est.argmax_index];
        auto r = make_report("sup_expectation:" + name, est.value, exact, top.std_error);
        const std::size_t expected = convex ? family.size() - 1 : 0;
        r.params["argmax_index"] = static_cast<double>(est.argmax_index);
        r.params["paths"] = static_cast<double>(e.paths);
        r.seed = c.seed_base;
        apply_tolerance(r, e.tolerance, e.abs_floor);
        if (est.argmax_index != expected) r.verdict = Verdict::fail;
        rows.push_back(std::move(r));
    }
    return rows;
}

void require_dyadic(const LabConfig& c, const ExperimentEntry& e, unsigned min_exp) {
    const std::size_t n = e.n_steps ? e.n_steps : c.n_steps;
    double prev = -1.0;
    for (const double x : e.ladder) {
        if (x != std::floor(x) || x < min_exp || x > 30 || x <= prev) {
            throw ConfigError("ladder of '" + e.id + "' must hold increasing integer exponents >= " +
                              std::to_string(min_exp));
        }
        if (n % (std::size_t{1} << static_cast<unsigned>(x)) != 0) {
            throw ConfigError("ladder of '" + e.id + "': 2^" + std::to_string(static_cast<int>(x)) +
                              " does not divide n_steps");
        }
        prev = x;
    }
}

ExperimentEntry defaults(double tol, double floor, std::vector<std::string> corpus,
                         std::vector<double> ladder = {}) {
    ExperimentEntry e;
    e.tolerance = tol;
    e.abs_floor = floor;
    e.corpus = std::move(corpus);
    e.ladder = std::move(ladder);
    return e;
}

}  // namespace

Registry default_registry() {
    Registry reg;
    reg.add({"occupation_1d", "occupation-density identity for f(B) d<B>, per seed",
             "occupation-times formula", defaults(0.02, 0.0, {"one", "indicator", "sin"}),
             function_names(), run_occupation_1d});
    reg.add({"tanaka", "occupation vs Tanaka local-time estimators over 32 interior levels",
             "Tanaka formula", defaults(0.05, 0.0, {}), {}, run_tanaka});
    reg.add({"bouleau_yor", "<f(B),B> against -int f L(dx) on refining partitions",
             "Bouleau-Yor identity",
             defaults(0.05, 1e-3, {"identity", "sign", "sin", "zigzag"},
                      {8, 9, 10, 11, 12, 13, 14}),
             function_names(), run_bouleau_yor});
    reg.add({"ito_c1", "Ito formula with a local-time correction for C1 / bounded-variation f",
             "Ito formula for absolutely continuous F", defaults(0.05, 1e-3, primitive_names()),
             primitive_names(), run_ito_c1});
    auto two = [](double tol, double floor, std::vector<std::string> corpus) {
        auto e = defaults(tol, floor, std::move(corpus));
        e.t_stride = 16;
        return e;
    };
    reg.add({"occupation_2d", "two-parameter occupation identity for Phi(B, t) d<B>",
             "two-parameter occupation formula", two(0.03, 0.0, weight_names()), weight_names(),
             run_occupation_2d});
    reg.add({"td_ito", "time-dependent Ito formula with a two-parameter local-time integral",
             "time-dependent Ito formula", two(0.05, 1e-3, surface_names()), surface_names(),
             run_td_ito});
    reg.add({"td_bouleau_yor", "time-dependent covariation against -int int f L(dx, ds)",
             "time-dependent Bouleau-Yor identity", two(0.05, 1e-3, surface_names()),
             surface_names(), run_td_bouleau_yor});
    auto lin = defaults(0.15, 0.0, {}, {6});
    lin.seeds = 50;
    reg.add({"lin_square_sum", "dyadic square sums of local time against 4 int L dx",
             "local-time square-sum theorem", lin, {}, run_lin});
    auto appendix = defaults(1.25, 0.0, {}, {0.125, 0.0625, 0.03125, 0.015625, 0.0078125});
    appendix.seeds = 200;
    reg.add({"appendix_eps", "mean |(1/eps) int (B_{s+eps}-B_s)^2 ds - <B>_T| across eps",
             "epsilon-approximation of quadratic variation", appendix, {}, run_appendix});
    auto sup = defaults(3.0, 0.0, {"square", "neg_square"});
    sup.paths = 10000;
    sup.n_steps = 64;
    reg.add({"sup_expectation", "scenario sup of E[+-B_T^2] against the G-normal closed forms",
             "G-normal convex/concave closed forms", sup, {"square", "neg_square"}, run_sup});
    return reg;
}

namespace {

void validate(const LabConfig& config, const ExperimentEntry& e) {
    if (e.id == "bouleau_yor") require_dyadic(config, e, 0);
    if (e.id == "lin_square_sum") {
        for (const double x : e.ladder) {
            if (x != std::floor(x) || x < 1 || x > 20) {
                throw ConfigError("lin_square_sum ladder must hold integer levels in [1, 20]");
            }
        }
    }
    if (e.id == "appendix_eps") {
        const double mesh = config.t_max / static_cast<double>(e.n_steps ? e.n_steps : config.n_steps);
        for (const double eps : e.ladder) {
            const double m = std::round(eps / mesh);
            if (!(eps > 0.0) || m < 1.0 || std::abs(m * mesh - eps) > 1e-9 * eps) {
                throw ConfigError("appendix_eps ladder value " + std::to_string(eps) +
                                  " is not a multiple of the mesh");
            }
        }
    }
    if (e.id == "appendix_eps" && !(e.tolerance >= 1.0)) {
        throw ConfigError("appendix_eps tolerance is a trend factor and must be >= 1");
    }
}

}  // namespace

RunOutcome run_experiments(const LabConfig& config, const Registry& registry,
                           const RunOptions& options) {
    if (config.experiments.empty()) {
        throw ConfigError("empty experiment list");
    }
    LabConfig cfg = config;
    if (options.seeds) {
        cfg.seed_count = *options.seeds;
    }
    std::vector<ExperimentEntry> entries;
    std::vector<const ExperimentInfo*> infos;
    for (const auto& raw : cfg.experiments) {
        const auto* info = registry.find(raw.id);
        if (info == nullptr) {
            throw ConfigError("unknown experiment id '" + raw.id + "'");
        }
        for (const auto& seen : entries) {
            if (seen.id == raw.id) throw ConfigError("experiment '" + raw.id + "' listed twice");
        }
        auto e = resolve_entry(raw, *info);
        if (options.seeds) e.seeds = *options.seeds;
        validate(cfg, e);
        entries.push_back(std::move(e));
        infos.push_back(info);
    }

    std::vector<std::vector<ExperimentReport>> results(entries.size());
    parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        auto rows = infos[i]->run(cfg, entries[i]);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        for (auto& r : rows) r.millis = options.timing ? ms : 0.0;
        results[i] = std::move(rows);
    });

    RunOutcome outcome;
    for (auto& block : results) {
        outcome.rows.insert(outcome.rows.end(), std::make_move_iterator(block.begin()),
                            std::make_move_iterator(block.end()));
    }
    std::stable_sort(outcome.rows.begin(), outcome.rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.experiment, a.level, a.seed_batch) <
               std::tie(b.experiment, b.level, b.seed_batch);
    });
    outcome.all_pass = std::all_of(outcome.rows.begin(), outcome.rows.end(), [](const auto& r) {
        return r.verdict == Verdict::pass || r.verdict == Verdict::trend_pass;
    });
    outcome.output_dir = cfg.output_dir;
    return outcome;
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_report_csv(const std::vector<ExperimentReport>& rows, std::ostream& out) {
    out << "experiment,level,seed_batch,lhs,rhs,residual,tolerance,verdict,millis\n";
    for (const auto& r : rows) {
        out << r.experiment << ',' << r.level << ',' << r.seed_batch << ',' << num(r.lhs) << ','
            << num(r.rhs) << ',' << num(r.residual) << ',' << num(r.tolerance) << ','
            << to_string(r.verdict) << ',' << num(std::round(r.millis)) << '\n';
    }
}

void write_summary_json(const RunOutcome& outcome, std::ostream& out) {
    json summary;
    json per = json::object();
    json failures = json::array();
    std::size_t failed = 0;
    for (const auto& r : outcome.rows) {
        const std::string id = r.experiment.substr(0, r.experiment.find(':'));
        auto& entry = per[id];
        if (entry.is_null()) entry = {{"rows", 0}, {"failed", 0}};
        entry["rows"] = entry["rows"].get<int>() + 1;
        if (r.verdict == Verdict::fail || r.verdict == Verdict::unchecked) {
            ++failed;
            entry["failed"] = entry["failed"].get<int>() + 1;
            json f = {{"experiment", r.experiment}, {"level", r.level},
                      {"seed_batch", r.seed_batch}, {"lhs", r.lhs},
                      {"rhs", r.rhs},               {"residual", r.residual},
                      {"tolerance", r.tolerance}};
            for (const auto& [k, v] : r.params) f["params"][k] = v;
            failures.push_back(std::move(f));
        }
    }
    summary["rows"] = outcome.rows.size();
    summary["failed"] = failed;
    summary["all_pass"] = outcome.all_pass;
    summary["experiments"] = per;
    summary["failures"] = failures;
    out << summary.dump(2) << '\n';
}

int lab_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
             const Registry& registry) {
    CLI::App app{"G-Brownian local-time experiment runner"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::size_t seeds = 0;
    std::size_t jobs = 1;
    bool timing = false;
    auto* run = app.add_subcommand("run", "run the experiments of a JSON config");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides config and GBMLAB_OUTPUT_DIR)");
    run->add_option("--seeds", seeds, "seed count for every experiment")->check(CLI::PositiveNumber);
    run->add_option("--jobs", jobs, "experiments run concurrently")->check(CLI::PositiveNumber);
    run->add_flag("--timing", timing, "record wall time in the millis column");
    auto* list = app.add_subcommand("list", "list registered experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        list_experiments(registry, out);
        return 0;
    }

    RunOptions options;
    options.jobs = jobs;
    options.timing = timing;
    if (seeds > 0) options.seeds = seeds;
    if (!out_dir.empty()) {
        options.output_dir = out_dir;
    } else if (const char* env = std::getenv("GBMLAB_OUTPUT_DIR"); env != nullptr && *env) {
        options.output_dir = env;
    }

    RunOutcome outcome;
    try {
        const auto config = load_config(config_path);
        outcome = run_experiments(config, registry, options);
        if (options.output_dir) outcome.output_dir = *options.output_dir;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }

    namespace fs = std::filesystem;
    fs::create_directories(outcome.output_dir);
    {
        std::ofstream csv(fs::path(outcome.output_dir) / "report.csv", std::ios::binary);
        write_report_csv(outcome.rows, csv);
    }
    {
        std::ofstream js(fs::path(outcome.output_dir) / "summary.json", std::ios::binary);
        write_summary_json(outcome, js);
    }
    std::size_t failed = 0;
    for (const auto& r : outcome.rows) {
        if (r.verdict == Verdict::pass || r.verdict == Verdict::trend_pass) continue;
        ++failed;
        err << "FAIL " << r.experiment << " level=" << r.level << " batch=" << r.seed_batch
            << " residual=" << num(r.residual) << " tolerance=" << num(r.tolerance) << '\n';
    }
    out << outcome.rows.size() << " rows, " << failed << " failed; report in "
        << outcome.output_dir << '\n';
    return outcome.all_pass ? 0 : 1;
}

}  // namespace gbmlab
