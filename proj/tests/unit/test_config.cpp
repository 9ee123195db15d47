#include "hypar/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace hypar;

namespace {

ParseError parse_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "no ParseError for:\n" << text;
    return ParseError("", 0, "");
}

} // namespace

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
    const RunConfig c = parse_config_text("");
    EXPECT_EQ(c.preset, "chase");
    EXPECT_EQ(c.dimension, 2);
    EXPECT_EQ(c.cells, (std::vector<int>{64, 64}));
    EXPECT_DOUBLE_EQ(c.T, 1.0);
    EXPECT_DOUBLE_EQ(c.coupling.picard_tol, 1e-8);
    EXPECT_EQ(c.coupling.max_picard_iters, 50);
    EXPECT_DOUBLE_EQ(c.coupling.cfl, 0.5);
    EXPECT_DOUBLE_EQ(c.model.horizon, 0.2);
    EXPECT_DOUBLE_EQ(c.model.drift, 0.5);
    EXPECT_EQ(c.snapshot_stride, 8);
    EXPECT_EQ(c.coupling.reaction, ReactionTreatment::exponential_fit);
    EXPECT_EQ(c.converge.levels, (std::vector<int>{32, 64, 128}));
}

TEST(ParseConfig, ReadsEverySection) {
    const RunConfig c = parse_config_text(R"(
run:
  preset: escape
  T: 0.5
  seed: 7
  snapshot_stride: 3
  threads: 2
grid:
  dimension: 1
  extent: 2.0
  cells: 40
model:
  mu: 0.3
  horizon: 0.25
  drift: 0.75
solver:
  picard_tol: 1.0e-9
  reaction: linear
checks:
  positivity: false
verify:
  instances: 5
converge:
  levels: [8, 16, 32]
  T: 0.1
)");
    EXPECT_EQ(c.preset, "escape");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.verify.seed, 7u);
    EXPECT_EQ(c.dimension, 1);
    EXPECT_EQ(c.extents, (std::vector<double>{2.0}));
    EXPECT_EQ(c.cells, (std::vector<int>{40}));
    EXPECT_DOUBLE_EQ(c.model.mu, 0.3);
    EXPECT_EQ(c.coupling.threads, 2);
    EXPECT_EQ(c.coupling.reaction, ReactionTreatment::linear);
    EXPECT_FALSE(c.checks.positivity);
    EXPECT_EQ(c.verify.instances, 5);
    EXPECT_DOUBLE_EQ(c.converge_horizon(), 0.1);
    const Scenario s = c.scenario();
    EXPECT_LT(s.model.drift(0.0), 0.0);
}

TEST(ParseConfig, ScalarGridEntriesApplyToEveryAxis) {
    const RunConfig c = parse_config_text("grid:\n  dimension: 2\n  cells: 16\n  extent: 2.0\n");
    EXPECT_EQ(c.cells, (std::vector<int>{16, 16}));
    EXPECT_EQ(c.extents, (std::vector<double>{2.0, 2.0}));
}

TEST(ParseConfig, NegativeMuNamesTheKeyAndLine) {
    const ParseError e = parse_error("run:\n  T: 1.0\nmodel:\n  mu: -0.1\n");
    EXPECT_EQ(e.key(), "model.mu");
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("model.mu"), std::string::npos);
}

TEST(ParseConfig, UnknownKeysAreRejected) {
    EXPECT_EQ(parse_error("solver:\n  picard_tolerance: 1e-8\n").key(), "solver.picard_tolerance");
    EXPECT_EQ(parse_error("output:\n  dir: x\n").key(), "output");
    EXPECT_EQ(parse_error("run:\n  T: 1\n  colour: red\n").line(), 3);
}

TEST(ParseConfig, InvalidValuesAreRejected) {
    EXPECT_EQ(parse_error("run:\n  T: 0\n").key(), "run.T");
    EXPECT_EQ(parse_error("run:\n  snapshot_stride: 0\n").key(), "run.snapshot_stride");
    EXPECT_EQ(parse_error("run:\n  preset: hunt\n").key(), "run.preset");
    EXPECT_EQ(parse_error("solver:\n  picard_tol: -1\n").key(), "solver.picard_tol");
    EXPECT_EQ(parse_error("solver:\n  cfl: 0.9\n").key(), "solver.cfl");
    EXPECT_EQ(parse_error("solver:\n  reaction: implicit\n").key(), "solver.reaction");
    EXPECT_EQ(parse_error("grid:\n  cells: [10, 10, 10]\n").key(), "grid.cells");
    EXPECT_EQ(parse_error("grid:\n  dimension: 3\n").key(), "grid.dimension");
    EXPECT_EQ(parse_error("run:\n  T: abc\n").key(), "run.T");
    EXPECT_EQ(parse_error("converge:\n  levels: [32, 48, 64]\n").key(), "converge.levels");
    EXPECT_EQ(parse_error("model:\n  horizon: 0.01\n").key(), "model.horizon");
}

TEST(ParseConfig, MalformedDocumentReportsLine) {
    const ParseError e = parse_error("run:\n  T: [1, 2\n");
    EXPECT_GT(e.line(), 0);
    EXPECT_EQ(parse_error("- a\n- b\n").key(), "");
}

TEST(ParseConfig, CustomTablesBuildModel) {
    const RunConfig c = parse_config_text(R"(
run:
  preset: custom
grid:
  dimension: 1
  cells: 20
tables:
  alpha:
    x: [0.0, 1.0]
    t: [0.0, 1.0]
    values: [0.0, 1.0, 2.0, 3.0]
  drift:
    t: [0.0, 1.0]
    values: [-1.0, 1.0]
  u0:
    x: [0.0, 1.0]
    values: [1.0, 2.0]
)");
    ASSERT_TRUE(c.tables.alpha.has_value());
    const Scenario s = c.scenario();
    const Field A = s.model.alpha(0.5, s.w0);
    const auto g = c.grid();
    for (std::size_t k = 0; k < A.size(); ++k) EXPECT_NEAR(A[k], g->center(k)[0] + 1.0, 1e-12);
    EXPECT_NEAR(s.model.drift(0.25), -0.5, 1e-12);
    EXPECT_DOUBLE_EQ(s.model.drift.bound, 1.0);
    EXPECT_NEAR(s.u0[0], 1.0 + g->center(0)[0], 1e-12);
    EXPECT_DOUBLE_EQ(s.model.k_alpha(0.0), 3.0);
}

TEST(ParseConfig, TableErrorsNameTheTable) {
    const std::string head = "run:\n  preset: custom\ngrid:\n  dimension: 1\ntables:\n";
    EXPECT_EQ(parse_error(head + "  b:\n    x: [0, 1]\n    t: [0]\n    values: [1]\n").key(), "tables.b.values");
    EXPECT_EQ(parse_error(head + "  b:\n    x: [1, 0]\n    t: [0]\n    values: [1, 2]\n").key(), "tables.b.values");
    EXPECT_EQ(parse_error(head + "  b:\n    t: [0]\n    values: [1]\n").key(), "tables.b.x");
    EXPECT_EQ(parse_error(head + "  gamma:\n    x: [0]\n").key(), "tables.gamma");
    EXPECT_EQ(parse_error("tables:\n  b:\n    x: [0, 1]\n    y: [0, 1]\n    t: [0]\n    values: [1, 1, 1, 1]\n")
                  .key(),
              "tables");
}

TEST(ParseConfig, ReadsFromFile) {
    const auto p = std::filesystem::temp_directory_path() / "hypar_test_config.yaml";
    {
        std::ofstream f(p);
        f << "run:\n  preset: decoupled\n";
    }
    EXPECT_EQ(parse_config(p).preset, "decoupled");
    std::filesystem::remove(p);
    EXPECT_THROW(parse_config(p), IoError);
}

TEST(Table, MultilinearInterpolationIsExactForBilinearData) {
    Table t;
    t.axes = {{0.0, 1.0, 3.0}, {0.0, 2.0}};
    for (double y : t.axes[1])
        for (double x : t.axes[0]) t.values.push_back(1.0 + 2.0 * x - y + 0.5 * x * y);
    t.validate("t");
    for (double x : {0.0, 0.3, 1.7, 3.0})
        for (double y : {0.0, 0.9, 2.0}) {
            const double q[2] = {x, y};
            EXPECT_NEAR(t(q), 1.0 + 2.0 * x - y + 0.5 * x * y, 1e-12);
        }
    const double outside[2] = {5.0, -1.0};
    EXPECT_NEAR(t(outside), 1.0 + 6.0, 1e-12);
}

TEST(Table, SingleNodeAxisIsConstant) {
    Table t;
    t.axes = {{0.0, 1.0}, {0.5}};
    t.values = {2.0, 4.0};
    const double q[2] = {0.25, 9.0};
    EXPECT_NEAR(t(q), 2.5, 1e-12);
}

TEST(Presets, CatalogListsFourScenarios) {
    ASSERT_EQ(preset_catalog().size(), 4u);
    EXPECT_TRUE(is_preset("chase"));
    EXPECT_FALSE(is_preset("hunt"));
    EXPECT_THROW(build_scenario("hunt", build_grid_1d(1.0, 8), {}, 1), InvalidConfiguration);
}

TEST(Presets, ChaseAndEscapeDifferOnlyInDriftSign) {
    auto g = build_grid_2d(1.0, 1.0, 32, 32);
    const Scenario chase = build_scenario("chase", g, {}, 3);
    const Scenario escape = build_scenario("escape", g, {}, 3);
    EXPECT_DOUBLE_EQ(chase.model.drift(0.0), 0.5);
    EXPECT_DOUBLE_EQ(escape.model.drift(0.0), -0.5);
    EXPECT_EQ(l1_distance(chase.u0, escape.u0), 0.0);
    EXPECT_EQ(l1_distance(chase.w0, escape.w0), 0.0);
    EXPECT_TRUE(chase.nonnegative);
}

TEST(Presets, InitialDataAreNonnegativeBvAndSeeded) {
    auto g = build_grid_2d(1.0, 1.0, 32, 32);
    const Scenario a = build_scenario("chase", g, {}, 1);
    const Scenario b = build_scenario("chase", g, {}, 1);
    const Scenario c = build_scenario("chase", g, {}, 2);
    EXPECT_GE(a.u0.min(), 0.0);
    EXPECT_GE(a.w0.min(), 0.0);
    EXPECT_GT(l1_norm(a.u0), 0.1);
    EXPECT_TRUE(std::isfinite(total_variation(a.u0)));
    EXPECT_EQ(l1_distance(a.u0, b.u0), 0.0);
    EXPECT_GT(l1_distance(a.u0, c.u0), 0.0);
}

TEST(Presets, RatesRespectDeclaredBounds) {
    auto g = build_grid_2d(1.0, 1.0, 16, 16);
    const Scenario s = build_scenario("chase", g, {}, 1);
    for (double scale : {0.0, 1.0, 10.0}) {
        const Field u = scale * s.u0, w = scale * s.w0;
        EXPECT_LE(linf_norm(s.model.alpha(0.0, w)), s.model.k_alpha(0.0) * (1.0 + l1_norm(w)));
        EXPECT_LE(linf_norm(s.model.beta(0.0, u, w)), s.model.k_beta(0.0));
    }
}

TEST(Presets, BumpMassMatchesProfileIntegral) {
    auto g = build_grid_1d(1.0, 4000);
    const Field smooth = bump_mixture(g, {Bump{{0.5, 0.0}, 0.2, 3.0, false}});
    EXPECT_NEAR(l1_norm(smooth), 3.0 * 0.2 * 16.0 / 15.0, 1e-6);
    const Field flat = bump_mixture(g, {Bump{{0.5, 0.0}, 0.2, 3.0, true}});
    EXPECT_NEAR(l1_norm(flat), 3.0 * 0.4, 1e-3);
}
