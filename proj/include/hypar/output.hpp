// Run orchestration and file output.
//
// File formats (all numbers are printed with %.17g):
//
//   norms.csv       time,l1_u,linf_u,tv_u,l1_w,linf_w,mass_u,mass_w
//   snapshots/snapshot_NNNNN.csv
//                   "# time=<t>" and "# dimension=<d> cells=<nx>,<ny> extent=<lx>,<ly>"
//                   followed by i,j,x,y,u,w rows, axis 0 fastest
//   report.json     config echo, Picard diagnostics, bound reports, summary
//   timing.json     wall-clock seconds, thread count, output directory
//   norms.dat       the norms table with a "#" header, whitespace separated
//   final_u.dat, final_w.dat
//                   "x value" (1D) or "x y value" blocks separated by blank lines (2D)
//
// report.json and norms.csv depend only on the configuration and seed.
// Anything machine dependent goes to timing.json; the wall clock is also
// copied into report.json when record_wall_clock is set.
#pragma once

#include "hypar/config.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace hypar {

using Json = nlohmann::ordered_json;

inline constexpr const char* kNormsHeader = "time,l1_u,linf_u,tv_u,l1_w,linf_w,mass_u,mass_w";
inline constexpr const char* kSnapshotColumns = "i,j,x,y,u,w";

struct RunOutcome {
    CoupledRun run;
    /// Every enabled check, in a fixed order.
    std::vector<BoundReport> reports;
    double wall_seconds = 0.0;

    bool pass() const { return all_pass(reports); }
};

/// Runs the configured scenario and evaluates every enabled check.
inline RunOutcome execute_run(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const Scenario s = cfg.scenario();
    RunOutcome out;
    out.run = run_coupled(s.u0, s.w0, s.model, cfg.T, cfg.coupling);
    if (cfg.checks.bounds) out.reports = out.run.reports;
    if (cfg.checks.positivity && s.nonnegative) {
        out.reports.push_back(check_positivity("positivity_u", out.run.u));
        out.reports.push_back(check_positivity("positivity_w", out.run.w));
    }
    if (cfg.checks.fixed_point && cfg.coupling.check_fixed_point) {
        double worst = 0.0, when = 0.0;
        for (const auto& w : out.run.windows)
            if (w.fixed_point_residual > worst) {
                worst = w.fixed_point_residual;
                when = w.start;
            }
        out.reports.push_back(make_report("picard_fixed_point", worst, 2.0 * cfg.coupling.picard_tol, 0.0, when));
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + p.string());
    return f;
}

inline void close_output(std::ofstream& f, const std::filesystem::path& p) {
    f.close();
    if (!f) throw IoError("failed while writing " + p.string());
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json report_json(const BoundReport& r) {
    return Json{{"name", r.name},
                {"lhs", finite_or_null(r.lhs)},
                {"rhs", finite_or_null(r.rhs)},
                {"ratio", finite_or_null(r.ratio)},
                {"tolerance", r.tolerance},
                {"time", r.time},
                {"pass", r.pass}};
}

inline Json reports_json(const std::vector<BoundReport>& reports) {
    Json a = Json::array();
    for (const auto& r : reports) a.push_back(report_json(r));
    return a;
}

inline Json summary_json(const std::vector<BoundReport>& reports) {
    Json failed = Json::array();
    for (const auto& r : reports)
        if (!r.pass) failed.push_back(r.name);
    return Json{{"checks", reports.size()}, {"failed", failed}, {"pass", failed.empty()}};
}

inline void write_json(const std::filesystem::path& p, const Json& j) {
    auto f = open_output(p);
    f << j.dump(2) << '\n';
    close_output(f, p);
}

inline void write_field_dat(const std::filesystem::path& p, const Field& f) {
    auto out = open_output(p);
    const Grid& g = f.grid();
    for (int j = 0; j < g.cells(1); ++j) {
        for (int i = 0; i < g.cells(0); ++i) {
            const std::size_t c = g.index(i, j);
            const Point x = g.center(c);
            if (g.dimension() == 2)
                out << fmt(x[0]) << ' ' << fmt(x[1]) << ' ' << fmt(f[c]) << '\n';
            else
                out << fmt(x[0]) << ' ' << fmt(f[c]) << '\n';
        }
        if (g.dimension() == 2) out << '\n';
    }
    close_output(out, p);
}

} // namespace detail

/// Configuration echo; omits settings that do not change the results.
inline Json config_json(const RunConfig& cfg) {
    const CouplingConfig& c = cfg.coupling;
    return Json{{"preset", cfg.preset},
                {"dimension", cfg.dimension},
                {"extent", cfg.extents},
                {"cells", cfg.cells},
                {"T", cfg.T},
                {"seed", cfg.seed},
                {"snapshot_stride", cfg.snapshot_stride},
                {"model", {{"mu", cfg.model.mu}, {"horizon", cfg.model.horizon}, {"drift", cfg.model.drift}}},
                {"solver",
                 {{"dt_parabolic", c.dt_parabolic},
                  {"cfl", c.cfl},
                  {"picard_tol", c.picard_tol},
                  {"max_picard_iters", c.max_picard_iters},
                  {"window", c.window},
                  {"min_window", c.min_window},
                  {"contraction_ratio", c.contraction_ratio},
                  {"lin_tol", c.lin_tol},
                  {"reaction", reaction_name(c.reaction)}}},
                {"checks",
                 {{"bounds", cfg.checks.bounds},
                  {"positivity", cfg.checks.positivity},
                  {"fixed_point", cfg.checks.fixed_point}}}};
}

inline Json picard_json(const std::vector<PicardDiagnostics>& windows) {
    Json a = Json::array();
    for (const auto& w : windows)
        a.push_back(Json{{"start", w.start},
                         {"length", w.length},
                         {"iterations", w.iterations},
                         {"halvings", w.halvings},
                         {"converged", w.converged},
                         {"distances", w.distances},
                         {"max_ratio", w.max_ratio()},
                         {"fixed_point_residual", w.fixed_point_residual}});
    return a;
}

/// Indices of the stored nodes written as snapshots: 0, stride, 2 stride, ...
inline std::vector<std::size_t> snapshot_nodes(std::size_t nodes, int stride) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < nodes; k += static_cast<std::size_t>(stride)) out.push_back(k);
    return out;
}

inline void write_norms_csv(const std::filesystem::path& p, const Trajectory& u, const Trajectory& w) {
    auto f = detail::open_output(p);
    f << kNormsHeader << '\n';
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Field& a = u.fields[k];
        const Field& b = w.fields[k];
        f << detail::fmt(u.times[k]) << ',' << detail::fmt(l1_norm(a)) << ',' << detail::fmt(linf_norm(a)) << ','
          << detail::fmt(total_variation(a)) << ',' << detail::fmt(l1_norm(b)) << ',' << detail::fmt(linf_norm(b))
          << ',' << detail::fmt(mass(a)) << ',' << detail::fmt(mass(b)) << '\n';
    }
    detail::close_output(f, p);
}

inline void write_snapshot(const std::filesystem::path& p, double t, const Field& u, const Field& w) {
    auto f = detail::open_output(p);
    const Grid& g = u.grid();
    f << "# time=" << detail::fmt(t) << '\n';
    f << "# dimension=" << g.dimension() << " cells=" << g.cells(0) << ',' << g.cells(1)
      << " extent=" << detail::fmt(g.extent(0)) << ',' << detail::fmt(g.dimension() == 2 ? g.extent(1) : 0.0)
      << '\n';
    f << kSnapshotColumns << '\n';
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const auto [i, j] = g.coords(c);
        const Point x = g.center(c);
        f << i << ',' << j << ',' << detail::fmt(x[0]) << ',' << detail::fmt(x[1]) << ',' << detail::fmt(u[c]) << ','
          << detail::fmt(w[c]) << '\n';
    }
    detail::close_output(f, p);
}

inline void write_norms_dat(const std::filesystem::path& p, const Trajectory& u, const Trajectory& w) {
    auto f = detail::open_output(p);
    f << "# time l1_u linf_u tv_u l1_w linf_w mass_u mass_w\n";
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Field& a = u.fields[k];
        const Field& b = w.fields[k];
        f << detail::fmt(u.times[k]) << ' ' << detail::fmt(l1_norm(a)) << ' ' << detail::fmt(linf_norm(a)) << ' '
          << detail::fmt(total_variation(a)) << ' ' << detail::fmt(l1_norm(b)) << ' ' << detail::fmt(linf_norm(b))
          << ' ' << detail::fmt(mass(a)) << ' ' << detail::fmt(mass(b)) << '\n';
    }
    detail::close_output(f, p);
}

inline void prepare_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

/// Writes every output file of a coupled run into `dir`.
inline void emit_outputs(const RunOutcome& outcome, const RunConfig& cfg, const std::filesystem::path& dir) {
    const CoupledRun& run = outcome.run;
    prepare_directory(dir);
    const auto snaps = dir / "snapshots";
    prepare_directory(snaps);
    for (const auto& entry : std::filesystem::directory_iterator(snaps))
        if (entry.path().filename().string().starts_with("snapshot_")) std::filesystem::remove(entry.path());

    write_norms_csv(dir / "norms.csv", run.u, run.w);
    for (std::size_t k : snapshot_nodes(run.u.size(), cfg.snapshot_stride)) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
        write_snapshot(snaps / name, run.u.times[k], run.u.fields[k], run.w.fields[k]);
    }

    Json report{{"config", config_json(cfg)},
                {"steps", run.u.size() - 1},
                {"picard", picard_json(run.windows)},
                {"reports", detail::reports_json(outcome.reports)},
                {"summary", detail::summary_json(outcome.reports)}};
    if (cfg.record_wall_clock) report["wall_clock_seconds"] = outcome.wall_seconds;
    detail::write_json(dir / "report.json", report);
    detail::write_json(dir / "timing.json", Json{{"wall_clock_seconds", outcome.wall_seconds},
                                                 {"threads", cfg.coupling.threads},
                                                 {"output_dir", dir.string()}});

    write_norms_dat(dir / "norms.dat", run.u, run.w);
    detail::write_field_dat(dir / "final_u.dat", run.u.back());
    detail::write_field_dat(dir / "final_w.dat", run.w.back());
}

/// verify.json: the worst report of each check over the randomized suite.
inline void emit_verify(const BoundSuiteResult& r, const BoundSuiteConfig& cfg, const std::filesystem::path& dir) {
    prepare_directory(dir);
    std::vector<BoundReport> reports = r.worst;
    Json j{{"config",
            {{"instances", cfg.instances},
             {"cells", cfg.cells},
             {"T", cfg.T},
             {"seed", cfg.seed},
             {"cfl", cfg.cfl},
             {"dt_parabolic", cfg.dt_parabolic},
             {"lin_tol", cfg.lin_tol}}},
           {"failures", r.failures},
           {"worst", detail::reports_json(reports)},
           {"summary", {{"checks", reports.size()}, {"failed_instances", r.failures}, {"pass", r.pass()}}}};
    detail::write_json(dir / "verify.json", j);
}

struct ConvergeOutcome {
    RefinementStudy study;
    double threshold = 1.5;

    bool pass() const {
        if (study.reductions.empty()) return false;
        return std::all_of(study.reductions.begin(), study.reductions.end(),
                           [&](double r) { return r >= threshold; });
    }
};

inline ConvergeOutcome execute_converge(const RunConfig& cfg) {
    const Scenario base = cfg.scenario();
    InitialData data = [&](const GridPtr& g) {
        const Scenario s = build_scenario(cfg.preset, g, cfg.model, cfg.seed, cfg.tables);
        return std::pair{s.u0, s.w0};
    };
    ConvergeOutcome out;
    out.study = refinement_study(data, base.model, cfg.extents, cfg.converge.levels, cfg.converge_horizon(),
                                 cfg.coupling);
    return out;
}

/// converge.csv (cells,difference,reduction) and converge.json.
inline void emit_converge(const ConvergeOutcome& c, const RunConfig& cfg, const std::filesystem::path& dir) {
    prepare_directory(dir);
    const auto csv = dir / "converge.csv";
    auto f = detail::open_output(csv);
    f << "cells,difference,reduction\n";
    for (std::size_t k = 0; k < c.study.differences.size(); ++k) {
        f << c.study.cells[k] << ',' << detail::fmt(c.study.differences[k]) << ',';
        if (k > 0) f << detail::fmt(c.study.reductions[k - 1]);
        f << '\n';
    }
    detail::close_output(f, csv);
    detail::write_json(dir / "converge.json", Json{{"config", config_json(cfg)},
                                                   {"levels", c.study.cells},
                                                   {"T", cfg.converge_horizon()},
                                                   {"differences", c.study.differences},
                                                   {"reductions", c.study.reductions},
                                                   {"threshold", c.threshold},
                                                   {"pass", c.pass()}});
}

} // namespace hypar
