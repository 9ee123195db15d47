// Randomized bound suites and measured-constant experiments.
#pragma once

#include "hypar/bounds.hpp"
#include "hypar/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace hypar {

// ---------------------------------------------------------------------------
// Randomized single- and paired-run bound suite (1D)

struct BoundSuiteConfig {
    int instances = 100;
    int cells = 32;
    double T = 0.5;
    std::uint64_t seed = 1;
    double cfl = 0.5;
    double dt_parabolic = 0.01;
    double lin_tol = 1e-13;
};

struct BoundSuiteResult {
    int instances = 0;
    /// Worst report per check name, in a fixed order.
    std::vector<BoundReport> worst;
    /// Number of individual reports that failed.
    int failures = 0;

    bool pass() const { return failures == 0; }
};

namespace detail {

/// Smooth random profile sum_k c_k cos(k pi x / L + phase_k), scaled to `amplitude`.
struct RandomProfile {
    std::vector<double> coef, phase, rate;

    static RandomProfile draw(std::mt19937_64& rng, int modes) {
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        RandomProfile p;
        for (int k = 0; k < modes; ++k) {
            p.coef.push_back(U(rng) / (1 + k));
            p.phase.push_back(3.0 * U(rng));
            p.rate.push_back(2.0 * U(rng));
        }
        return p;
    }

    double operator()(double x, double t = 0.0) const {
        double s = 0.0;
        for (std::size_t k = 0; k < coef.size(); ++k)
            s += coef[k] * std::cos(std::numbers::pi * static_cast<double>(k + 1) * x + phase[k] + rate[k] * t);
        return s;
    }
};

inline Field sample(const GridPtr& g, const RandomProfile& p, double scale, double shift = 0.0, double t = 0.0) {
    return Field::from_function(g, [&](const Point& x) { return shift + scale * p(x[0], t); });
}

inline void absorb(std::map<std::string, BoundReport>& worst, std::vector<std::string>& order, int& failures,
                   const BoundReport& r) {
    if (!r.pass) ++failures;
    auto it = worst.find(r.name);
    if (it == worst.end()) {
        order.push_back(r.name);
        worst.emplace(r.name, r);
    } else if (r.ratio > it->second.ratio) {
        it->second = r;
    }
}

} // namespace detail

/// Draws random smooth coefficients on [0, 1] and checks every single-run
/// and paired-run estimate of both sub-solvers. Rates A are time-independent
/// so the transport source-stability estimate applies exactly.
inline BoundSuiteResult run_bound_suite(const BoundSuiteConfig& cfg) {
    if (cfg.instances < 1 || cfg.cells < 2 || !(cfg.T > 0.0)) throw InvalidConfiguration("invalid bound suite setup");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto g = build_grid_1d(1.0, cfg.cells);
    std::map<std::string, BoundReport> worst;
    std::vector<std::string> order;
    int failures = 0;

    for (int inst = 0; inst < cfg.instances; ++inst) {
        using detail::RandomProfile;
        const double c_amp = 0.2 + 1.8 * U(rng);
        const RandomProfile pc = RandomProfile::draw(rng, 4);
        const RandomProfile pA1 = RandomProfile::draw(rng, 3), pA2 = RandomProfile::draw(rng, 3);
        const RandomProfile pa1 = RandomProfile::draw(rng, 3), pa2 = RandomProfile::draw(rng, 3);
        const RandomProfile pu1 = RandomProfile::draw(rng, 5), pu2 = RandomProfile::draw(rng, 5);
        const double A_amp = 2.0 * U(rng), a_amp = U(rng);

        const Field A1 = detail::sample(g, pA1, A_amp), A2 = detail::sample(g, pA2, A_amp);
        auto transport = [&](const Field& u0, const Field& A, const RandomProfile& pa) {
            auto provider = [&](double t) {
                TransportCoefficients k = TransportCoefficients::zero(g);
                for (std::size_t c = 0; c < k.c.size(); ++c) k.c[c][0] = c_amp * pc(g->center(c)[0], t);
                k.A = A;
                k.a = detail::sample(g, pa, a_amp, 0.0, t);
                return k;
            };
            VectorField cap(g);
            for (std::size_t c = 0; c < cap.size(); ++c) cap[c][0] = c_amp * 2.1;  // |pc| <= 1 + 1/2 + 1/3 + 1/4
            const int steps = steps_for(cfg.T, max_stable_dt(cap, *g, cfg.cfl));
            return integrate_transport(u0, provider, 0.0, cfg.T, steps, true);
        };
        const Field u0 = detail::sample(g, pu1, 1.0, 0.5 * U(rng));
        const Field u0b = detail::sample(g, pu2, 1.0, 0.5 * U(rng));
        const TransportRun t1 = transport(u0, A1, pa1);
        const TransportRun t2 = transport(u0b, A1, pa1);
        const TransportRun t3 = transport(u0, A2, pa2);
        for (const auto& r : check_hyperbolic_bounds(t1.trajectory, t1.history))
            detail::absorb(worst, order, failures, r);
        detail::absorb(worst, order, failures, check_transport_datum_stability(t1, t2));
        detail::absorb(worst, order, failures, check_transport_source_stability(t1, t3));

        const double mu = 0.02 + 0.5 * U(rng);
        const double B_amp = 2.0 * U(rng), b_amp = U(rng);
        const RandomProfile pB1 = RandomProfile::draw(rng, 3), pB2 = RandomProfile::draw(rng, 3);
        const RandomProfile pb1 = RandomProfile::draw(rng, 3), pb2 = RandomProfile::draw(rng, 3);
        const RandomProfile pw1 = RandomProfile::draw(rng, 5), pw2 = RandomProfile::draw(rng, 5);
        DiffusionOptions opts;
        opts.lin_tol = cfg.lin_tol;
        const int wsteps = steps_for(cfg.T, cfg.dt_parabolic);
        auto diffusion = [&](const Field& w0, const RandomProfile& pB, const RandomProfile& pb) {
            auto provider = [&](double t) {
                return DiffusionCoefficients{mu, detail::sample(g, pB, B_amp, 0.0, t),
                                             detail::sample(g, pb, b_amp, 0.0, t)};
            };
            return integrate_diffusion(w0, provider, 0.0, cfg.T, wsteps, opts, true);
        };
        const Field w0 = detail::sample(g, pw1, 1.0, 0.5 * U(rng));
        const Field w0b = detail::sample(g, pw2, 1.0, 0.5 * U(rng));
        const DiffusionRun d1 = diffusion(w0, pB1, pb1);
        const DiffusionRun d2 = diffusion(w0b, pB1, pb1);
        const DiffusionRun d3 = diffusion(w0, pB1, pb2);
        const DiffusionRun d4 = diffusion(w0, pB2, pb1);
        for (const auto& r : check_parabolic_bounds(d1.trajectory, d1.history, mu))
            detail::absorb(worst, order, failures, r);
        detail::absorb(worst, order, failures, check_diffusion_datum_stability(d1, d2));
        detail::absorb(worst, order, failures, check_diffusion_source_stability(d1, d3));
        detail::absorb(worst, order, failures, check_diffusion_reaction_stability(d1, d4));
    }
    BoundSuiteResult out;
    out.instances = cfg.instances;
    out.failures = failures;
    for (const auto& name : order) out.worst.push_back(worst.at(name));
    return out;
}

// ---------------------------------------------------------------------------
// Stability experiments on the coupled model

enum class PerturbationKind { initial_datum, source };

struct StabilityRow {
    double size = 0.0;
    double distance = 0.0;
    double constant = 0.0;
};

struct StabilityStudy {
    std::vector<StabilityRow> rows;
    double slope = 0.0;
    double intercept = 0.0;
    /// |residual|_2 / |distance|_2 of the least-squares line.
    double fit_residual = 0.0;
    /// Relative change of the implied constant between the two smallest sizes.
    double constant_spread = 0.0;
    bool linear = false;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double relative_residual = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) throw InvalidConfiguration("least squares needs two points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    LinearFit f;
    f.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    f.intercept = (sy - f.slope * sx) / n;
    double res = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        res += e * e;
        norm += y[i] * y[i];
    }
    f.relative_residual = norm > 0.0 ? std::sqrt(res / norm) : 0.0;
    return f;
}

/// Direction of a perturbation: shapes added to u and w (or to a and b).
struct Perturbation {
    PerturbationKind kind = PerturbationKind::initial_datum;
    Field du;
    Field dw;
};

/// Runs the unperturbed model and one perturbed run per size, and measures
/// |(u1, w1)(T) - (u2, w2)(T)|_1 against the perturbation size
/// (|delta du|_1 + |delta dw|_1 for data, the space-time L1 norm for sources).
inline StabilityStudy stability_experiment(const Field& u0, const Field& w0, const ModelSpec& model, double T,
                                           const CouplingConfig& config, const Perturbation& p,
                                           const std::vector<double>& sizes) {
    if (sizes.size() < 3) throw InvalidConfiguration("stability study needs at least three sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (!(sizes[i] > 0.0) || (i > 0 && !(sizes[i] < sizes[i - 1])))
            throw InvalidConfiguration("perturbation sizes must be positive and decreasing");

    const CoupledRun base = run_coupled(u0, w0, model, T, config);
    const double shape = l1_norm(p.du) + l1_norm(p.dw);
    StabilityStudy study;
    std::vector<double> xs, ys;
    for (double delta : sizes) {
        CoupledRun run;
        if (p.kind == PerturbationKind::initial_datum) {
            run = run_coupled(u0 + delta * p.du, w0 + delta * p.dw, model, T, config);
        } else {
            ModelSpec m = model;
            const Field da = delta * p.du, db = delta * p.dw;
            m.a = [base_a = model.a, da](double t, const GridPtr& g) {
                return (base_a ? base_a(t, g) : Field(g)) + da;
            };
            m.b = [base_b = model.b, db](double t, const GridPtr& g) {
                return (base_b ? base_b(t, g) : Field(g)) + db;
            };
            run = run_coupled(u0, w0, m, T, config);
        }
        const double size = delta * shape * (p.kind == PerturbationKind::source ? T : 1.0);
        const double dist = l1_distance(run.u.back(), base.u.back()) + l1_distance(run.w.back(), base.w.back());
        study.rows.push_back({size, dist, size > 0.0 ? dist / size : 0.0});
        xs.push_back(size);
        ys.push_back(dist);
    }
    const LinearFit fit = least_squares(xs, ys);
    study.slope = fit.slope;
    study.intercept = fit.intercept;
    study.fit_residual = fit.relative_residual;
    const auto& a = study.rows[study.rows.size() - 2];
    const auto& b = study.rows.back();
    study.constant_spread = a.constant > 0.0 ? std::abs(b.constant - a.constant) / a.constant : 0.0;
    study.linear = std::isfinite(study.slope) && study.fit_residual <= 0.05 && study.constant_spread <= 0.2;
    return study;
}

/// Largest |z(t_{k+1}) - z(t_k)|_1 / (t_{k+1} - t_k) over consecutive stored times.
inline double time_lipschitz_modulus(const Trajectory& z) {
    double worst = 0.0;
    for (std::size_t k = 1; k < z.size(); ++k) {
        const double dt = z.times[k] - z.times[k - 1];
        if (dt > 0.0) worst = std::max(worst, l1_distance(z.fields[k], z.fields[k - 1]) / dt);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Grid refinement

/// Cell averages of a fine field on a grid coarser by an integer factor per axis.
inline Field restrict_to(const Field& fine, const GridPtr& coarse) {
    const Grid& f = fine.grid();
    const Grid& c = *coarse;
    if (f.dimension() != c.dimension()) throw InvalidConfiguration("restriction across dimensions");
    const int rx = f.cells(0) / c.cells(0);
    const int ry = f.dimension() == 2 ? f.cells(1) / c.cells(1) : 1;
    if (rx * c.cells(0) != f.cells(0) || ry * c.cells(1) != f.cells(1))
        throw InvalidConfiguration("grids are not nested");
    Field out(coarse);
    for (int j = 0; j < f.cells(1); ++j)
        for (int i = 0; i < f.cells(0); ++i) out[c.index(i / rx, j / ry)] += fine[f.index(i, j)];
    out *= 1.0 / (rx * ry);
    return out;
}

struct RefinementStudy {
    std::vector<int> cells;
    /// L1 difference at T between levels k and k+1, on the coarser grid.
    std::vector<double> differences;
    /// differences[k] / differences[k+1].
    std::vector<double> reductions;
};

using InitialData = std::function<std::pair<Field, Field>(const GridPtr&)>;

inline RefinementStudy refinement_study(const InitialData& data, const ModelSpec& model,
                                        const std::vector<double>& extents, const std::vector<int>& cells_per_axis,
                                        double T, const CouplingConfig& config) {
    if (cells_per_axis.size() < 2) throw InvalidConfiguration("refinement needs two levels");
    const int dim = model.kernel.dimension;
    RefinementStudy s;
    s.cells = cells_per_axis;
    std::vector<CoupledRun> runs;
    std::vector<GridPtr> grids;
    for (int n : cells_per_axis) {
        const std::vector<int> cells(static_cast<std::size_t>(dim), n);
        GridPtr g = build_grid(dim, extents, cells);
        auto [u0, w0] = data(g);
        runs.push_back(run_coupled(u0, w0, model, T, config));
        grids.push_back(std::move(g));
    }
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
        const Field& uc = runs[k].u.back();
        const Field& wc = runs[k].w.back();
        const double d = l1_distance(uc, restrict_to(runs[k + 1].u.back(), grids[k])) +
                         l1_distance(wc, restrict_to(runs[k + 1].w.back(), grids[k]));
        s.differences.push_back(d);
    }
    for (std::size_t k = 0; k + 1 < s.differences.size(); ++k)
        s.reductions.push_back(s.differences[k + 1] > 0.0 ? s.differences[k] / s.differences[k + 1]
                                                           : std::numeric_limits<double>::max());
    return s;
}

// ---------------------------------------------------------------------------
// Heat equation convergence on [0, 1] against exp(-mu pi^2 t) cos(pi x)

struct ConvergenceStudy {
    std::vector<double> steps;
    std::vector<double> errors;
    /// Least-squares slope of log(error) against log(step).
    double order = 0.0;
};

namespace detail {

inline Field cosine_cell_averages(const GridPtr& g, double amplitude) {
    const double h = g->spacing(0);
    Field f(g);
    for (std::size_t c = 0; c < f.size(); ++c) {
        const double x0 = static_cast<double>(c) * h;
        f[c] = amplitude * (std::sin(std::numbers::pi * (x0 + h)) - std::sin(std::numbers::pi * x0)) /
               (std::numbers::pi * h);
    }
    return f;
}

inline double heat_error(int cells, double dt, double mu, double T) {
    auto g = build_grid_1d(1.0, cells);
    DiffusionOptions opts;
    opts.lin_tol = 1e-14;
    const int steps = steps_for(T, dt);
    const Field w0 = cosine_cell_averages(g, 1.0);
    const auto run = integrate_diffusion(w0, [&](double) { return DiffusionCoefficients::zero(g, mu); }, 0.0, T,
                                         steps, opts);
    const Field exact = cosine_cell_averages(g, std::exp(-mu * std::numbers::pi * std::numbers::pi * T));
    return l1_distance(run.trajectory.back(), exact);
}

inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return least_squares(lx, ly).slope;
}

} // namespace detail

/// Joint refinement with dt = dt_factor h^2, so the error is second order in h.
inline ConvergenceStudy heat_spatial_convergence(const std::vector<int>& cells, double mu, double T,
                                                 double dt_factor = 1.0) {
    ConvergenceStudy s;
    for (int n : cells) {
        const double h = 1.0 / n;
        s.steps.push_back(h);
        s.errors.push_back(detail::heat_error(n, dt_factor * h * h, mu, T));
    }
    s.order = detail::log_slope(s.steps, s.errors);
    return s;
}

/// dt-only refinement on a fixed fine grid.
inline ConvergenceStudy heat_temporal_convergence(const std::vector<double>& dts, int cells, double mu, double T) {
    ConvergenceStudy s;
    for (double dt : dts) {
        s.steps.push_back(dt);
        s.errors.push_back(detail::heat_error(cells, dt, mu, T));
    }
    s.order = detail::log_slope(s.steps, s.errors);
    return s;
}

} // namespace hypar
