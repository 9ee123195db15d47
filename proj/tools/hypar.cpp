// hypar command-line driver: run, verify, converge, presets.
#include "hypar/output.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

namespace {

using namespace hypar;

struct Common {
    std::string config;
    std::string output_dir;
    int threads = 0;
};

// Precedence: --output-dir, then HYPAR_OUTPUT_DIR, then the config file.
std::filesystem::path output_dir(const Common& opts, const RunConfig& cfg) {
    if (!opts.output_dir.empty()) return opts.output_dir;
    if (const char* env = std::getenv("HYPAR_OUTPUT_DIR"); env && *env) return env;
    return cfg.output_dir;
}

RunConfig load(const Common& opts) {
    RunConfig cfg = parse_config(opts.config);
    if (opts.threads > 0) cfg.coupling.threads = opts.threads;
    return cfg;
}

void print_reports(const std::vector<BoundReport>& reports) {
    for (const auto& r : reports)
        std::printf("  %-28s ratio %-12.6g lhs %-12.6g rhs %-12.6g %s\n", r.name.c_str(), r.ratio, r.lhs, r.rhs,
                    r.pass ? "pass" : "FAIL");
}

int cmd_run(const Common& opts) {
    const RunConfig cfg = load(opts);
    const auto dir = output_dir(opts, cfg);
    const RunOutcome out = execute_run(cfg);
    emit_outputs(out, cfg, dir);
    std::printf("%s: %zu steps, %zu windows, %.2f s\n", cfg.preset.c_str(), out.run.u.size() - 1,
                out.run.windows.size(), out.wall_seconds);
    print_reports(out.reports);
    std::printf("outputs in %s\n", dir.string().c_str());
    return out.pass() ? 0 : 1;
}

int cmd_verify(const Common& opts) {
    const RunConfig cfg = load(opts);
    const auto dir = output_dir(opts, cfg);
    const BoundSuiteResult r = run_bound_suite(cfg.verify);
    emit_verify(r, cfg.verify, dir);
    std::printf("bound suite: %d instances, %d failed reports\n", r.instances, r.failures);
    print_reports(r.worst);
    return r.pass() ? 0 : 1;
}

int cmd_converge(const Common& opts) {
    const RunConfig cfg = load(opts);
    const auto dir = output_dir(opts, cfg);
    const ConvergeOutcome c = execute_converge(cfg);
    emit_converge(c, cfg, dir);
    for (std::size_t k = 0; k < c.study.differences.size(); ++k)
        std::printf("  %4d vs %4d: L1 difference %.6g\n", c.study.cells[k], c.study.cells[k + 1],
                    c.study.differences[k]);
    for (double r : c.study.reductions) std::printf("  reduction %.4g (need >= %.2g)\n", r, c.threshold);
    return c.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal hyperbolic-parabolic predator-prey solver"};
    app.require_subcommand(1);
    Common opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opts.config, "YAML configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output-dir", opts.output_dir, "Output directory (overrides HYPAR_OUTPUT_DIR)");
        sub->add_option("-t,--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
    };
    auto* run = app.add_subcommand("run", "Run a coupled simulation and write its outputs");
    auto* verify = app.add_subcommand("verify", "Randomized bound suite");
    auto* converge = app.add_subcommand("converge", "Grid refinement study");
    auto* presets = app.add_subcommand("presets", "List the scenario presets");
    add_common(run);
    add_common(verify);
    add_common(converge);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*presets) {
            for (const auto& p : preset_catalog()) std::printf("%-10s %s\n", p.name.c_str(), p.summary.c_str());
            return 0;
        }
        if (*run) return cmd_run(opts);
        if (*verify) return cmd_verify(opts);
        if (*converge) return cmd_converge(opts);
    } catch (const hypar::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
