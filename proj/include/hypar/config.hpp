// Run configuration read from a sectioned YAML document.
//
// Every section is optional. Unknown sections and keys are rejected, and
// each error carries the dotted key path and the line it was found on.
#pragma once

#include "hypar/presets.hpp"
#include "hypar/verify.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace hypar {

struct ChecksConfig {
    bool bounds = true;
    bool positivity = true;
    bool fixed_point = true;
};

struct ConvergeConfig {
    std::vector<int> levels{32, 64, 128};
    /// Horizon of the refinement runs; zero means the run horizon.
    double T = 0.0;
};

struct RunConfig {
    std::string preset = "chase";
    int dimension = 2;
    std::vector<double> extents{1.0, 1.0};
    std::vector<int> cells{64, 64};

    double T = 1.0;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int snapshot_stride = 8;
    bool record_wall_clock = false;

    ModelParameters model;
    CouplingConfig coupling;
    ChecksConfig checks;
    BoundSuiteConfig verify;
    ConvergeConfig converge;
    CustomTables tables;

    GridPtr grid() const { return build_grid(dimension, extents, cells); }
    Scenario scenario() const { return build_scenario(preset, grid(), model, seed, tables); }
    double converge_horizon() const { return converge.T > 0.0 ? converge.T : T; }
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

class Reader {
public:
    Reader(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    /// Rejects keys that were never looked up.
    void finish() const {
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (!seen_.count(k)) throw ParseError(key(k), line_of(kv.first), "unknown key");
        }
    }

    YAML::Node get(const std::string& k) {
        seen_.insert(k);
        return node_[k];
    }

    template <class T>
    void read(const std::string& k, T& out) {
        YAML::Node n = get(k);
        if (!n) return;
        if (!n.IsScalar()) throw ParseError(key(k), line_of(n), "expected a single value");
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            throw ParseError(key(k), line_of(n), "cannot read '" + n.Scalar() + "'");
        }
    }

    template <class T>
    void read_list(const std::string& k, std::vector<T>& out) {
        YAML::Node n = get(k);
        if (!n) return;
        try {
            if (n.IsScalar()) {
                out = {n.as<T>()};
            } else if (n.IsSequence()) {
                out.clear();
                for (const auto& e : n) out.push_back(e.as<T>());
            } else {
                throw ParseError(key(k), line_of(n), "expected a value or a list");
            }
        } catch (const YAML::Exception&) {
            throw ParseError(key(k), line_of(n), "cannot read list");
        }
    }

    int line(const std::string& k) const {
        const YAML::Node n = node_[k];
        return n ? line_of(n) : line_of(node_);
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

struct Check {
    const Reader& r;
    void operator()(bool ok, const std::string& k, const std::string& what) const {
        if (!ok) throw ParseError(r.key(k), r.line(k), what);
    }
};

inline Table read_table(Reader& r, bool has_time, int dim) {
    Table t;
    std::vector<double> x, y, time;
    r.read_list("x", x);
    if (dim == 2) r.read_list("y", y);
    if (has_time) r.read_list("t", time);
    r.read_list("values", t.values);
    r.finish();
    Check check{r};
    check(!x.empty(), "x", "table needs x nodes");
    if (dim == 2) check(!y.empty(), "y", "table needs y nodes");
    if (has_time) check(!time.empty(), "t", "table needs t nodes");
    if (!x.empty()) t.axes.push_back(x);
    if (dim == 2) t.axes.push_back(y);
    if (has_time) t.axes.push_back(time);
    try {
        t.validate(r.key("values"));
    } catch (const InvalidConfiguration& e) {
        throw ParseError(r.key("values"), r.line("values"), e.what());
    }
    return t;
}

inline Table read_drift_table(Reader& r) {
    Table t;
    std::vector<double> time;
    r.read_list("t", time);
    r.read_list("values", t.values);
    r.finish();
    Check{r}(!time.empty(), "t", "drift table needs t nodes");
    t.axes.push_back(time);
    try {
        t.validate(r.key("values"));
    } catch (const InvalidConfiguration& e) {
        throw ParseError(r.key("values"), r.line("values"), e.what());
    }
    return t;
}

inline ReactionTreatment parse_reaction(const std::string& s, const Reader& r) {
    if (s == "exponential_fit") return ReactionTreatment::exponential_fit;
    if (s == "linear") return ReactionTreatment::linear;
    throw ParseError(r.key("reaction"), r.line("reaction"), "expected exponential_fit or linear");
}

} // namespace detail

inline std::string reaction_name(ReactionTreatment t) {
    return t == ReactionTreatment::linear ? "linear" : "exponential_fit";
}

/// Builds a validated configuration from a YAML document.
inline RunConfig parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ParseError("", e.mark.line + 1, e.msg);
    }
    RunConfig cfg;
    if (!root || root.IsNull()) return cfg;
    if (!root.IsMap()) throw ParseError("", detail::line_of(root), "top level must be a set of sections");

    using detail::Check;
    using detail::Reader;
    Reader top(root, "");
    auto section = [&](const std::string& name) -> std::optional<Reader> {
        YAML::Node n = top.get(name);
        if (!n) return std::nullopt;
        if (!n.IsMap()) throw ParseError(name, detail::line_of(n), "section must contain key: value pairs");
        return Reader(n, name);
    };

    if (auto r = section("run")) {
        r->read("preset", cfg.preset);
        r->read("T", cfg.T);
        r->read("seed", cfg.seed);
        r->read("output_dir", cfg.output_dir);
        r->read("snapshot_stride", cfg.snapshot_stride);
        r->read("threads", cfg.coupling.threads);
        r->read("record_wall_clock", cfg.record_wall_clock);
        r->finish();
        const Check check{*r};
        check(is_preset(cfg.preset), "preset", "unknown preset '" + cfg.preset + "'");
        check(cfg.T > 0.0 && std::isfinite(cfg.T), "T", "must be positive");
        check(cfg.snapshot_stride >= 1, "snapshot_stride", "must be at least 1");
        check(cfg.coupling.threads >= 1, "threads", "must be at least 1");
        check(!cfg.output_dir.empty(), "output_dir", "must not be empty");
    }

    if (auto r = section("grid")) {
        r->read("dimension", cfg.dimension);
        const Check check{*r};
        check(cfg.dimension == 1 || cfg.dimension == 2, "dimension", "must be 1 or 2");
        cfg.extents.assign(static_cast<std::size_t>(cfg.dimension), 1.0);
        cfg.cells.assign(static_cast<std::size_t>(cfg.dimension), 64);
        r->read_list("extent", cfg.extents);
        r->read_list("cells", cfg.cells);
        r->finish();
        if (cfg.extents.size() == 1) cfg.extents.resize(static_cast<std::size_t>(cfg.dimension), cfg.extents[0]);
        if (cfg.cells.size() == 1) cfg.cells.resize(static_cast<std::size_t>(cfg.dimension), cfg.cells[0]);
        check(cfg.extents.size() == static_cast<std::size_t>(cfg.dimension), "extent", "one entry per axis");
        check(cfg.cells.size() == static_cast<std::size_t>(cfg.dimension), "cells", "one entry per axis");
        for (double e : cfg.extents) check(e > 0.0 && std::isfinite(e), "extent", "must be positive");
        for (int n : cfg.cells) check(n >= 2, "cells", "need at least two cells per axis");
    }

    if (auto r = section("model")) {
        r->read("mu", cfg.model.mu);
        r->read("horizon", cfg.model.horizon);
        r->read("drift", cfg.model.drift);
        r->finish();
        const Check check{*r};
        check(cfg.model.mu > 0.0 && std::isfinite(cfg.model.mu), "mu", "must be positive");
        check(cfg.model.horizon > 0.0 && std::isfinite(cfg.model.horizon), "horizon", "must be positive");
        check(std::isfinite(cfg.model.drift), "drift", "must be finite");
    }

    if (auto r = section("solver")) {
        CouplingConfig& c = cfg.coupling;
        std::string reaction = reaction_name(c.reaction);
        r->read("dt_parabolic", c.dt_parabolic);
        r->read("cfl", c.cfl);
        r->read("picard_tol", c.picard_tol);
        r->read("max_picard_iters", c.max_picard_iters);
        r->read("window", c.window);
        r->read("min_window", c.min_window);
        r->read("contraction_ratio", c.contraction_ratio);
        r->read("lin_tol", c.lin_tol);
        r->read("reaction", reaction);
        r->finish();
        const Check check{*r};
        c.reaction = detail::parse_reaction(reaction, *r);
        check(c.dt_parabolic > 0.0, "dt_parabolic", "must be positive");
        check(c.cfl > 0.0 && c.cfl <= 0.5, "cfl", "must lie in (0, 0.5]");
        check(c.picard_tol > 0.0, "picard_tol", "must be positive");
        check(c.max_picard_iters >= 2, "max_picard_iters", "must be at least 2");
        check(c.window > 0.0, "window", "must be positive");
        check(c.min_window > 0.0 && c.min_window <= c.window, "min_window", "must be positive and at most window");
        check(c.contraction_ratio > 0.0 && c.contraction_ratio < 1.0, "contraction_ratio", "must lie in (0, 1)");
        check(c.lin_tol > 0.0 && c.lin_tol < 1.0, "lin_tol", "must lie in (0, 1)");
    }

    if (auto r = section("checks")) {
        r->read("bounds", cfg.checks.bounds);
        r->read("positivity", cfg.checks.positivity);
        r->read("fixed_point", cfg.checks.fixed_point);
        r->finish();
    }

    cfg.verify.seed = cfg.seed;
    if (auto r = section("verify")) {
        r->read("instances", cfg.verify.instances);
        r->read("cells", cfg.verify.cells);
        r->read("T", cfg.verify.T);
        r->read("seed", cfg.verify.seed);
        r->read("lin_tol", cfg.verify.lin_tol);
        r->finish();
        const Check check{*r};
        check(cfg.verify.instances >= 1, "instances", "must be at least 1");
        check(cfg.verify.cells >= 2, "cells", "need at least two cells");
        check(cfg.verify.T > 0.0, "T", "must be positive");
        check(cfg.verify.lin_tol > 0.0 && cfg.verify.lin_tol < 1.0, "lin_tol", "must lie in (0, 1)");
    }
    cfg.verify.cfl = cfg.coupling.cfl;
    cfg.verify.dt_parabolic = cfg.coupling.dt_parabolic;

    if (auto r = section("converge")) {
        r->read_list("levels", cfg.converge.levels);
        r->read("T", cfg.converge.T);
        r->finish();
        const Check check{*r};
        check(cfg.converge.levels.size() >= 3, "levels", "need at least three resolutions");
        for (std::size_t i = 0; i < cfg.converge.levels.size(); ++i) {
            check(cfg.converge.levels[i] >= 2, "levels", "need at least two cells");
            if (i > 0)
                check(cfg.converge.levels[i] % cfg.converge.levels[i - 1] == 0 &&
                          cfg.converge.levels[i] > cfg.converge.levels[i - 1],
                      "levels", "each level must refine the previous one by an integer factor");
        }
        check(cfg.converge.T >= 0.0, "T", "must be nonnegative");
    }

    if (auto r = section("tables")) {
        auto table = [&](const std::string& name, bool has_time, std::optional<Table>& out) {
            YAML::Node n = r->get(name);
            if (!n) return;
            if (!n.IsMap()) throw ParseError(r->key(name), detail::line_of(n), "table must be a section");
            Reader t(n, r->key(name));
            out = detail::read_table(t, has_time, cfg.dimension);
        };
        table("alpha", true, cfg.tables.alpha);
        table("beta", true, cfg.tables.beta);
        table("a", true, cfg.tables.a);
        table("b", true, cfg.tables.b);
        table("u0", false, cfg.tables.u0);
        table("w0", false, cfg.tables.w0);
        if (YAML::Node n = r->get("drift")) {
            if (!n.IsMap()) throw ParseError(r->key("drift"), detail::line_of(n), "table must be a section");
            Reader t(n, r->key("drift"));
            cfg.tables.drift = detail::read_drift_table(t);
        }
        r->finish();
        if (cfg.preset != "custom") throw ParseError("tables", top.line("tables"), "tables need preset: custom");
    }
    top.finish();

    try {
        const GridPtr g = cfg.grid();
        if (cfg.model.horizon < g->max_spacing())
            throw ParseError("model.horizon", top.line("model"), "smaller than the grid spacing");
    } catch (const InvalidConfiguration& e) {
        throw ParseError("grid", top.line("grid"), e.what());
    }
    return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open configuration file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

} // namespace hypar
