// Picard iteration for the coupled system
//   du/dt + div(u v(t, w)) = alpha(t, x, w) u + a,
//   dw/dt - mu Lap w      = beta(t, x, u, w) w + b,
// on successive time windows. Each iterate solves the transport problem with
// coefficients frozen from the previous w, and the diffusion problem with B
// frozen from the previous (u, w). Both sub-solvers share the time nodes of
// a window, so frozen coefficients are read at the nodes without interpolation.
#pragma once

#include "hypar/bounds.hpp"
#include "hypar/error.hpp"
#include "hypar/hyperbolic.hpp"
#include "hypar/nonlocal.hpp"
#include "hypar/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <memory>
#include <string>
#include <vector>

namespace hypar {

using AlphaFn = std::function<Field(double t, const Field& w)>;
using BetaFn = std::function<Field(double t, const Field& u, const Field& w)>;
using SourceFn = std::function<Field(double t, const GridPtr& grid)>;
using RateBound = std::function<double(double t)>;

/// Coefficients of the coupled model. Empty callables stand for zero.
struct ModelSpec {
    double mu = 1.0;
    KernelSpec kernel;
    DriftSchedule drift;
    AlphaFn alpha;
    BetaFn beta;
    SourceFn a;
    SourceFn b;

    /// Declared bounds, spot-checked whenever coefficients are frozen:
    /// |alpha(t, x, w)| <= k_alpha(t) (1 + |w|_1) and |beta| <= k_beta(t).
    /// K_alpha and K_beta bound the total variation and are recorded only.
    double K_alpha = 0.0;
    RateBound k_alpha;
    double K_beta = 0.0;
    RateBound k_beta;
};

struct CoupledState {
    double time = 0.0;
    Field u;
    Field w;
};

struct CouplingConfig {
    double cfl = 0.5;
    /// Largest diffusion step; both sub-solvers use the smaller of this and the transport limit.
    double dt_parabolic = 1e-2;
    double picard_tol = 1e-8;
    int max_picard_iters = 50;
    /// Initial window length.
    double window = 0.25;
    double min_window = 1e-3;
    /// Successive distance ratio treated as loss of contraction.
    double contraction_ratio = 0.9;
    double lin_tol = 1e-12;
    ReactionTreatment reaction = ReactionTreatment::exponential_fit;
    int threads = 1;
    /// Solve once more from the converged pair and record the change.
    bool check_fixed_point = true;
};

struct PicardDiagnostics {
    double start = 0.0;
    double length = 0.0;
    /// Number of iterates computed, counting the decoupled first one.
    int iterations = 0;
    bool converged = false;
    /// Times the window was halved before converging.
    int halvings = 0;
    /// d_i = sup_t |u_{i+1} - u_i|_1 + sup_t |w_{i+1} - w_i|_1.
    std::vector<double> distances;
    /// Change from one more iteration at the converged pair; negative when not computed.
    double fixed_point_residual = -1.0;

    double max_ratio(std::size_t skip = 0) const {
        double r = 0.0;
        for (std::size_t i = 1 + skip; i < distances.size(); ++i)
            if (distances[i - 1] > 0.0) r = std::max(r, distances[i] / distances[i - 1]);
        return r;
    }
};

/// Frozen coefficient set for one node of a window.
struct FrozenCoefficients {
    TransportCoefficients transport;
    DiffusionCoefficients diffusion;
};

inline void check_declared_bounds(const ModelSpec& model, double t, const Field& w, const Field* A,
                                  const Field* B) {
    if (A && model.k_alpha) {
        const double cap = model.k_alpha(t) * (1.0 + l1_norm(w));
        if (linf_norm(*A) > cap * (1.0 + 1e-12))
            throw ModelSpecError("alpha exceeds its declared bound k_alpha(t)(1 + |w|_1) at t = " +
                                 std::to_string(t));
    }
    if (B && model.k_beta) {
        if (linf_norm(*B) > model.k_beta(t) * (1.0 + 1e-12))
            throw ModelSpecError("beta exceeds its declared bound k_beta(t) at t = " + std::to_string(t));
    }
}

namespace detail {

inline Field sample_or_zero(const SourceFn& f, double t, const GridPtr& g) {
    if (!f) return Field(g);
    Field out = f(t, g);
    if (out.grid() != *g) throw ModelSpecError("source returned a field on a different grid");
    out.require_finite("source term");
    return out;
}

inline double drift_at(const ModelSpec& model, double t) {
    const double k = model.drift(t);
    if (std::abs(k) > model.drift.bound * (1.0 + 1e-12))
        throw ModelSpecError("drift k(t) = " + std::to_string(k) + " exceeds its declared bound " +
                             std::to_string(model.drift.bound));
    return k;
}

} // namespace detail

/// Transport coefficients at time t: c = v(t, w), A = alpha(t, w), a(t).
inline TransportCoefficients freeze_transport(double t, const Field& w, const ModelSpec& model,
                                              const ConvolutionOperator& conv) {
    const GridPtr& g = w.grid_ptr();
    TransportCoefficients out = TransportCoefficients::zero(g);
    const double k = detail::drift_at(model, t);
    if (k != 0.0) out.c = saturate_velocity(cell_gradient(conv.apply(w)), k);
    if (model.alpha) {
        out.A = model.alpha(t, w);
        out.A.require_finite("alpha");
        check_declared_bounds(model, t, w, &out.A, nullptr);
    }
    out.a = detail::sample_or_zero(model.a, t, g);
    return out;
}

/// Diffusion coefficients at time t: B = beta(t, u, w), b(t).
inline DiffusionCoefficients freeze_diffusion(double t, const Field& u, const Field& w, const ModelSpec& model) {
    const GridPtr& g = w.grid_ptr();
    DiffusionCoefficients out = DiffusionCoefficients::zero(g, model.mu);
    if (model.beta) {
        out.B = model.beta(t, u, w);
        out.B.require_finite("beta");
        check_declared_bounds(model, t, w, nullptr, &out.B);
    }
    out.b = detail::sample_or_zero(model.b, t, g);
    return out;
}

/// Both coefficient sets frozen from the state (u, w) at time t.
/// `conv` must be built on the fields' grid with the model kernel.
inline FrozenCoefficients freeze_coefficients(double t, const Field& u, const Field& w, const ModelSpec& model,
                                              const ConvolutionOperator& conv) {
    return {freeze_transport(t, w, model, conv), freeze_diffusion(t, u, w, model)};
}

inline void validate_model(const ModelSpec& model, const Grid& grid) {
    if (!(model.mu > 0.0) || !std::isfinite(model.mu)) throw InvalidConfiguration("mu must be positive");
    if (model.kernel.dimension != grid.dimension())
        throw InvalidConfiguration("kernel dimension does not match the grid");
    if (!(model.drift.bound >= 0.0) || !std::isfinite(model.drift.bound))
        throw InvalidConfiguration("drift bound must be finite and nonnegative");
    if (!model.drift.k) throw InvalidConfiguration("drift schedule is empty");
}

/// One Picard iterate over a window: both trajectories plus the step histories of its solves.
struct PicardIterate {
    TransportRun u;
    DiffusionRun w;
};

/// Number of equal steps both sub-solvers take on a window of the given length.
inline int window_steps(const Grid& g, const ModelSpec& model, const CouplingConfig& config, double length) {
    double dt = config.dt_parabolic;
    if (model.drift.bound > 0.0) {
        // every saturated velocity satisfies |c_d| < |k| on each axis
        for (int d = 0; d < g.dimension(); ++d)
            dt = std::min(dt, config.cfl * g.spacing(d) / (g.dimension() * model.drift.bound));
    }
    return steps_for(length, dt);
}

/// Solves both frozen problems from `start` over [t0, t1] with `steps` steps.
/// `previous` supplies the frozen coefficients; without it the decoupled
/// first iterate is produced (c = 0, A = 0, B = 0, sources kept).
inline PicardIterate picard_iterate(const CoupledState& start, double t1, int steps, const ModelSpec& model,
                                    const CouplingConfig& config, const ConvolutionOperator& conv,
                                    const PicardIterate* previous) {
    const GridPtr& g = start.u.grid_ptr();
    const double t0 = start.time;
    const double dt = (t1 - t0) / steps;
    auto node = [&](double t) {
        const long n = std::lround((t - t0) / dt);
        return static_cast<std::size_t>(std::clamp<long>(n, 0, steps));
    };

    auto at = [&](const Trajectory& z, double t) -> const Field& { return z.fields[node(t)]; };
    auto transport_provider = [&](double t) {
        if (previous) return freeze_transport(t, at(previous->w.trajectory, t), model, conv);
        TransportCoefficients k = TransportCoefficients::zero(g);
        k.a = detail::sample_or_zero(model.a, t, g);
        return k;
    };
    auto diffusion_provider = [&](double t) {
        if (previous) return freeze_diffusion(t, at(previous->u.trajectory, t), at(previous->w.trajectory, t), model);
        DiffusionCoefficients k = DiffusionCoefficients::zero(g, model.mu);
        k.b = detail::sample_or_zero(model.b, t, g);
        return k;
    };

    DiffusionOptions opts;
    opts.lin_tol = config.lin_tol;
    opts.reaction = config.reaction;

    PicardIterate out;
    if (config.threads > 1) {
        // the two solves only read shared, immutable inputs
        auto w_future = std::async(std::launch::async, [&] {
            return integrate_diffusion(start.w, diffusion_provider, t0, t1, steps, opts);
        });
        out.u = integrate_transport(start.u, transport_provider, t0, t1, steps);
        out.w = w_future.get();
    } else {
        out.u = integrate_transport(start.u, transport_provider, t0, t1, steps);
        out.w = integrate_diffusion(start.w, diffusion_provider, t0, t1, steps, opts);
    }
    return out;
}

inline double iterate_distance(const PicardIterate& a, const PicardIterate& b) {
    return sup_l1_distance(a.u.trajectory, b.u.trajectory) + sup_l1_distance(a.w.trajectory, b.w.trajectory);
}

struct WindowResult {
    CoupledState end;
    PicardDiagnostics diagnostics;
    /// The accepted iterate, whose solves used coefficients frozen from the one before.
    PicardIterate accepted;
};

/// Picard iteration on [state.time, state.time + length]. When two
/// consecutive distance ratios exceed `contraction_ratio` the window is
/// halved and the iteration restarts from the same state.
inline WindowResult picard_window(const CoupledState& state, double length, const ModelSpec& model,
                                  const CouplingConfig& config, const ConvolutionOperator& conv) {
    if (!(length > 0.0)) throw InvalidConfiguration("window length must be positive");
    int halvings = 0;
    for (;;) {
        const double t1 = state.time + length;
        const int steps = window_steps(state.u.grid(), model, config, length);
        PicardDiagnostics diag;
        diag.start = state.time;
        diag.length = length;
        diag.halvings = halvings;

        PicardIterate current = picard_iterate(state, t1, steps, model, config, conv, nullptr);
        diag.iterations = 1;
        int slow = 0;
        bool restart = false;
        for (;;) {
            if (diag.iterations >= config.max_picard_iters)
                throw ConvergenceError("Picard iteration did not reach tolerance " +
                                       std::to_string(config.picard_tol) + " within " +
                                       std::to_string(config.max_picard_iters) + " iterations on window [" +
                                       std::to_string(state.time) + ", " + std::to_string(t1) + "]");
            PicardIterate next = picard_iterate(state, t1, steps, model, config, conv, &current);
            ++diag.iterations;
            const double d = iterate_distance(next, current);
            diag.distances.push_back(d);
            current = std::move(next);
            if (d <= config.picard_tol) {
                diag.converged = true;
                break;
            }
            const std::size_t k = diag.distances.size();
            if (k >= 2 && diag.distances[k - 2] > 0.0 && d / diag.distances[k - 2] > config.contraction_ratio)
                ++slow;
            else
                slow = 0;
            if (slow >= 2) {
                restart = true;
                break;
            }
        }
        if (restart) {
            length *= 0.5;
            ++halvings;
            if (length < config.min_window)
                throw NonContraction("Picard iteration does not contract on windows down to " +
                                     std::to_string(config.min_window) + " starting at t = " +
                                     std::to_string(state.time));
            continue;
        }
        if (config.check_fixed_point) {
            const PicardIterate again = picard_iterate(state, t1, steps, model, config, conv, &current);
            diag.fixed_point_residual = iterate_distance(again, current);
        }
        CoupledState end{t1, current.u.trajectory.back(), current.w.trajectory.back()};
        return {std::move(end), std::move(diag), std::move(current)};
    }
}

struct CoupledRun {
    Trajectory u;
    Trajectory w;
    std::vector<PicardDiagnostics> windows;
    std::vector<TransportStepRecord> transport_history;
    std::vector<DiffusionStepRecord> diffusion_history;
    std::vector<BoundReport> reports;
};

/// Chains Picard windows over [0, T]. A window keeps the length it
/// converged with, so a halving carries over to later windows.
inline CoupledRun run_coupled(const Field& u0, const Field& w0, const ModelSpec& model, double T,
                              const CouplingConfig& config) {
    if (!(T > 0.0)) throw InvalidConfiguration("time horizon must be positive");
    if (u0.grid() != w0.grid()) throw InvalidConfiguration("u0 and w0 live on different grids");
    if (!(config.picard_tol > 0.0) || !(config.window > 0.0) || !(config.min_window > 0.0) ||
        config.max_picard_iters < 2)
        throw InvalidConfiguration("invalid Picard settings");
    u0.require_finite("u0");
    w0.require_finite("w0");
    validate_model(model, u0.grid());

    ConvolutionOperator conv(u0.grid_ptr(), model.kernel, config.threads);
    CoupledRun run;
    run.u.push(0.0, u0);
    run.w.push(0.0, w0);
    CoupledState state{0.0, u0, w0};
    double length = config.window;
    while (state.time < T * (1.0 - 1e-12)) {
        const double remaining = T - state.time;
        const double trial = std::min(length, remaining);
        WindowResult res = picard_window(state, trial, model, config, conv);
        if (res.diagnostics.halvings > 0) length = res.diagnostics.length;
        const auto& ut = res.accepted.u.trajectory;
        const auto& wt = res.accepted.w.trajectory;
        for (std::size_t k = 1; k < ut.size(); ++k) {
            run.u.push(ut.times[k], ut.fields[k]);
            run.w.push(wt.times[k], wt.fields[k]);
        }
        run.transport_history.insert(run.transport_history.end(), res.accepted.u.history.begin(),
                                     res.accepted.u.history.end());
        run.diffusion_history.insert(run.diffusion_history.end(), res.accepted.w.history.begin(),
                                     res.accepted.w.history.end());
        run.windows.push_back(std::move(res.diagnostics));
        state = std::move(res.end);
        if (std::abs(T - state.time) <= 1e-12 * T) state.time = T;
    }
    // the last node is exactly T
    run.u.times.back() = T;
    run.w.times.back() = T;

    run.reports = check_hyperbolic_bounds(run.u, run.transport_history);
    for (auto& r : check_parabolic_bounds(run.w, run.diffusion_history, model.mu)) run.reports.push_back(r);
    return run;
}

} // namespace hypar
