#include "hypar/output.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hypar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hypar_output_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_chase() {
    return parse_config_text(R"(
run:
  preset: chase
  T: 0.25
  snapshot_stride: 4
grid:
  cells: [16, 16]
solver:
  window: 0.125
)");
}

std::size_t count_snapshots(const fs::path& dir) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir / "snapshots"))
        if (e.path().extension() == ".csv") ++n;
    return n;
}

} // namespace

TEST(EmitOutputs, ZeroDataGivesZeroNorms) {
    RunConfig cfg = parse_config_text(R"(
run:
  preset: custom
  T: 0.1
grid:
  dimension: 1
  cells: 16
tables:
  u0:
    x: [0.0]
    values: [0.0]
  w0:
    x: [0.0]
    values: [0.0]
)");
    const auto dir = scratch("zero");
    emit_outputs(execute_run(cfg), cfg, dir);
    std::istringstream norms(slurp(dir / "norms.csv"));
    std::string line;
    std::getline(norms, line);
    EXPECT_EQ(line, kNormsHeader);
    int rows = 0;
    while (std::getline(norms, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.find(',')), ",0,0,0,0,0,0,0");
    }
    EXPECT_GT(rows, 1);
    fs::remove_all(dir);
}

TEST(EmitOutputs, ReportHasOneEntryPerEnabledCheck) {
    RunConfig cfg = small_chase();
    const auto dir = scratch("report");
    const RunOutcome out = execute_run(cfg);
    emit_outputs(out, cfg, dir);
    const Json j = Json::parse(slurp(dir / "report.json"));
    std::vector<std::string> names;
    for (const auto& r : j["reports"]) names.push_back(r["name"]);
    EXPECT_EQ(names, (std::vector<std::string>{"transport_l1", "transport_linf", "diffusion_l1", "diffusion_gradient",
                                               "positivity_u", "positivity_w", "picard_fixed_point"}));
    bool all = true;
    for (const auto& r : j["reports"]) all = all && r["pass"].get<bool>();
    EXPECT_EQ(j["summary"]["pass"].get<bool>(), all);
    EXPECT_EQ(j["summary"]["checks"].get<std::size_t>(), names.size());
    EXPECT_FALSE(j.contains("wall_clock_seconds"));
    EXPECT_FALSE(j["config"].contains("threads"));
    EXPECT_EQ(j["picard"].size(), out.run.windows.size());
    EXPECT_TRUE(Json::parse(slurp(dir / "timing.json")).contains("wall_clock_seconds"));

    cfg.checks.bounds = false;
    cfg.checks.positivity = false;
    cfg.record_wall_clock = true;
    emit_outputs(execute_run(cfg), cfg, dir);
    const Json k = Json::parse(slurp(dir / "report.json"));
    ASSERT_EQ(k["reports"].size(), 1u);
    EXPECT_EQ(k["reports"][0]["name"], "picard_fixed_point");
    EXPECT_TRUE(k.contains("wall_clock_seconds"));
    fs::remove_all(dir);
}

TEST(EmitOutputs, SummaryReflectsAFailedEntry) {
    RunConfig cfg = small_chase();
    RunOutcome out = execute_run(cfg);
    out.reports.push_back(make_report("synthetic", 2.0, 1.0, 0.0, 0.0));
    const auto dir = scratch("failed");
    emit_outputs(out, cfg, dir);
    const Json j = Json::parse(slurp(dir / "report.json"));
    EXPECT_FALSE(j["summary"]["pass"].get<bool>());
    EXPECT_EQ(j["summary"]["failed"], Json::array({"synthetic"}));
    fs::remove_all(dir);
}

TEST(EmitOutputs, SnapshotCountFollowsStride) {
    RunConfig cfg = small_chase();
    const auto dir = scratch("snapshots");
    const RunOutcome out = execute_run(cfg);
    emit_outputs(out, cfg, dir);
    const std::size_t steps = out.run.u.size() - 1;
    // transport allows 0.5 h / (2 k) = 1/32, so dt_parabolic = 0.01 gives 13 steps per window
    EXPECT_EQ(steps, 26u);
    EXPECT_EQ(count_snapshots(dir), steps / 4 + 1);

    std::istringstream snap(slurp(dir / "snapshots" / "snapshot_00004.csv"));
    std::string l1, l2, l3;
    std::getline(snap, l1);
    std::getline(snap, l2);
    std::getline(snap, l3);
    EXPECT_EQ(l1, "# time=" + detail::fmt(4 * (0.125 / 13)));
    EXPECT_EQ(l2, "# dimension=2 cells=16,16 extent=1,1");
    EXPECT_EQ(l3, kSnapshotColumns);
    std::size_t rows = 0;
    for (std::string line; std::getline(snap, line);) ++rows;
    EXPECT_EQ(rows, 256u);

    // a rerun with a coarser stride removes the stale snapshots
    cfg.snapshot_stride = 20;
    emit_outputs(out, cfg, dir);
    EXPECT_EQ(count_snapshots(dir), 2u);
    fs::remove_all(dir);
}

TEST(EmitOutputs, PlotFilesHaveOneLinePerCell) {
    RunConfig cfg = small_chase();
    const auto dir = scratch("dat");
    const RunOutcome out = execute_run(cfg);
    emit_outputs(out, cfg, dir);
    std::istringstream dat(slurp(dir / "final_u.dat"));
    std::size_t values = 0, blanks = 0;
    for (std::string line; std::getline(dat, line);) (line.empty() ? blanks : values)++;
    EXPECT_EQ(values, 256u);
    EXPECT_EQ(blanks, 16u);
    const std::string norms = slurp(dir / "norms.dat");
    EXPECT_EQ(norms.rfind("# time l1_u", 0), 0u);
    fs::remove_all(dir);
}

TEST(EmitOutputs, ByteIdenticalAcrossRunsAndThreadCounts) {
    RunConfig cfg = small_chase();
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    emit_outputs(execute_run(cfg), cfg, a);
    emit_outputs(execute_run(cfg), cfg, b);
    cfg.coupling.threads = 3;
    emit_outputs(execute_run(cfg), cfg, c);
    for (const char* f : {"norms.csv", "report.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
    }
    EXPECT_EQ(slurp(a / "snapshots" / "snapshot_00024.csv"), slurp(c / "snapshots" / "snapshot_00024.csv"));
    for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST(EmitOutputs, UnwritableDirectoryRaisesIoError) {
    const auto blocker = scratch("blocker");
    { std::ofstream(blocker) << "x"; }
    RunConfig cfg = small_chase();
    cfg.T = 0.05;
    EXPECT_THROW(emit_outputs(execute_run(cfg), cfg, blocker / "sub"), IoError);
    fs::remove(blocker);
}

TEST(EmitVerify, WritesWorstReports) {
    BoundSuiteConfig cfg;
    cfg.instances = 2;
    cfg.cells = 12;
    cfg.T = 0.1;
    const auto r = run_bound_suite(cfg);
    const auto dir = scratch("verify");
    emit_verify(r, cfg, dir);
    const Json j = Json::parse(slurp(dir / "verify.json"));
    EXPECT_EQ(j["worst"].size(), r.worst.size());
    EXPECT_EQ(j["summary"]["pass"].get<bool>(), r.pass());
    fs::remove_all(dir);
}

TEST(EmitConverge, TableMatchesStudy) {
    RunConfig cfg = parse_config_text(R"(
run:
  preset: decoupled
  T: 0.1
grid:
  dimension: 1
  cells: 16
model:
  mu: 0.05
converge:
  levels: [16, 32, 64]
)");
    const ConvergeOutcome c = execute_converge(cfg);
    ASSERT_EQ(c.study.differences.size(), 2u);
    const auto dir = scratch("converge");
    emit_converge(c, cfg, dir);
    std::istringstream csv(slurp(dir / "converge.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "cells,difference,reduction");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 2u);
    EXPECT_EQ(Json::parse(slurp(dir / "converge.json"))["pass"].get<bool>(), c.pass());
    fs::remove_all(dir);
}
