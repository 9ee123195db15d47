// Backward-Euler finite volumes for
//   dw/dt - mu Lap w = B w + b   in Omega,   grad w . nu = 0 on the boundary,
// and the interval Neumann heat kernel built by the method of images.
#pragma once

#include "hypar/error.hpp"
#include "hypar/geometry.hpp"
#include "hypar/linear_solver.hpp"
#include "hypar/trajectory.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

namespace hypar {

struct DiffusionCoefficients {
    double mu = 1.0;
    Field B;
    Field b;

    static DiffusionCoefficients zero(const GridPtr& grid, double mu) { return {mu, Field(grid), Field(grid)}; }
};

/// How the reaction B w enters the implicit system.
enum class ReactionTreatment {
    /// diag(1 - exp(-dt B)): M-matrix for every dt, L1 growth per step bounded by exp(dt |B|_inf).
    exponential_fit,
    /// diag(dt B): textbook backward Euler; positivity needs dt |B+|_inf < 1.
    linear,
};

struct DiffusionOptions {
    double lin_tol = 1e-10;
    ReactionTreatment reaction = ReactionTreatment::exponential_fit;
    /// Called when a step loses the M-matrix guarantee (linear treatment only).
    std::function<void(const std::string&)> warn = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
};

struct DiffusionStepResult {
    Field w;
    SolveStats stats;
};

namespace detail {

/// y = x - dt mu L_h x - r .* x, with L_h the zero-flux 3/5-point Laplacian.
inline void apply_diffusion_operator(const Grid& g, double dt_mu, std::span<const double> react,
                                     std::span<const double> x, std::span<double> y) {
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    const double cx = dt_mu / (g.spacing(0) * g.spacing(0));
    const double cy = g.dimension() == 2 ? dt_mu / (g.spacing(1) * g.spacing(1)) : 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t c = g.index(i, j);
            double lap = 0.0;
            if (i > 0) lap += cx * (x[c - 1] - x[c]);
            if (i + 1 < nx) lap += cx * (x[c + 1] - x[c]);
            if (g.dimension() == 2) {
                if (j > 0) lap += cy * (x[c - static_cast<std::size_t>(nx)] - x[c]);
                if (j + 1 < ny) lap += cy * (x[c + static_cast<std::size_t>(nx)] - x[c]);
            }
            y[c] = x[c] - lap - react[c] * x[c];
        }
}

} // namespace detail

/// Solves (I - dt mu L_h - R) w' = w + dt b, R the reaction diagonal chosen by
/// `options.reaction`, to relative l1 residual `options.lin_tol`.
inline DiffusionStepResult diffusion_step(const Field& w, const DiffusionCoefficients& coeffs, double dt,
                                          const DiffusionOptions& options = {}) {
    const Grid& g = w.grid();
    if (!(dt > 0.0)) throw InvalidConfiguration("diffusion dt must be positive");
    if (!(coeffs.mu > 0.0)) throw InvalidConfiguration("diffusivity mu must be positive");

    const std::size_t n = g.cell_count();
    std::vector<double> react(n), diag(n), rhs(n);
    double b_plus = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        b_plus = std::max(b_plus, coeffs.B[c]);
        react[c] = options.reaction == ReactionTreatment::exponential_fit ? -std::expm1(-dt * coeffs.B[c])
                                                                          : dt * coeffs.B[c];
        rhs[c] = w[c] + dt * coeffs.b[c];
    }
    bool spd = true;
    {
        const double cx = dt * coeffs.mu / (g.spacing(0) * g.spacing(0));
        const double cy = g.dimension() == 2 ? dt * coeffs.mu / (g.spacing(1) * g.spacing(1)) : 0.0;
        for (int j = 0; j < g.cells(1); ++j)
            for (int i = 0; i < g.cells(0); ++i) {
                const std::size_t c = g.index(i, j);
                int faces_x = (i > 0) + (i + 1 < g.cells(0));
                int faces_y = g.dimension() == 2 ? (j > 0) + (j + 1 < g.cells(1)) : 0;
                diag[c] = 1.0 + cx * faces_x + cy * faces_y - react[c];
                if (!(1.0 - react[c] > 0.0)) spd = false;
            }
    }
    if (options.reaction == ReactionTreatment::linear && dt * b_plus >= 1.0 && options.warn)
        options.warn("dt * max(B+) = " + std::to_string(dt * b_plus) +
                     " >= 1: implicit diffusion matrix is no longer an M-matrix");

    Field next = w;
    auto apply = [&](std::span<const double> x, std::span<double> y) {
        detail::apply_diffusion_operator(g, dt * coeffs.mu, react, x, y);
    };
    const int max_it = static_cast<int>(10 * n);
    SolveStats stats;
    bool diag_ok = true;
    for (double d : diag) diag_ok = diag_ok && d != 0.0;
    if (spd) {
        stats = solve_cg(apply, diag, rhs, next.values(), options.lin_tol, max_it);
    } else {
        if (!diag_ok) diag.assign(n, 1.0);
        stats = solve_bicgstab(apply, diag, rhs, next.values(), options.lin_tol, max_it);
    }
    return {std::move(next), stats};
}

struct DiffusionStepRecord {
    double t = 0.0;
    double dt = 0.0;
    double B_linf = 0.0;
    double b_l1 = 0.0;
    int iterations = 0;
};

struct DiffusionRun {
    Trajectory trajectory;
    std::vector<DiffusionStepRecord> history;
    std::vector<DiffusionCoefficients> coefficients;
};

/// Fixed-step backward Euler over [t0, t1]; B and b are frozen at each step's start.
template <class Provider>
DiffusionRun integrate_diffusion(const Field& w0, Provider&& provider, double t0, double t1, int steps,
                                 const DiffusionOptions& options = {}, bool keep_coefficients = false) {
    if (steps < 1) throw InvalidConfiguration("diffusion needs at least one step");
    w0.require_finite("initial diffusion datum");
    DiffusionRun run;
    const double dt = (t1 - t0) / steps;
    Field w = w0;
    run.trajectory.push(t0, w);
    for (int n = 0; n < steps; ++n) {
        const double t = t0 + n * dt;
        DiffusionCoefficients k = provider(t);
        auto step = diffusion_step(w, k, dt, options);
        run.history.push_back({t, dt, linf_norm(k.B), l1_norm(k.b), step.stats.iterations});
        w = std::move(step.w);
        run.trajectory.push(n + 1 == steps ? t1 : t0 + (n + 1) * dt, w);
        if (keep_coefficients) run.coefficients.push_back(std::move(k));
    }
    return run;
}

struct DiffusionConfig {
    double dt = 1e-2;
    DiffusionOptions options;
    bool keep_coefficients = false;
};

template <class Provider>
DiffusionRun simulate_diffusion(const Field& w0, Provider&& provider, double T, const DiffusionConfig& config) {
    if (!(T > 0.0)) throw InvalidConfiguration("time horizon must be positive");
    if (!(config.dt > 0.0)) throw InvalidConfiguration("time step must be positive");
    const int steps = std::max(1, static_cast<int>(std::ceil(T / config.dt - 1e-9)));
    return integrate_diffusion(w0, std::forward<Provider>(provider), 0.0, T, steps, config.options,
                               config.keep_coefficients);
}

// ---------------------------------------------------------------------------
// Interval Neumann kernel

/// Heat kernel of [0, L] with zero-flux ends, as the image sum
///   N = sum_{m=-M..M} G(t-s, x - y - 2mL) + G(t-s, x + y - 2mL),
/// G the free-space Gaussian with diffusivity mu and M = image_terms.
struct NeumannKernel1D {
    double length = 1.0;
    double mu = 1.0;
    int image_terms = 20;
};

inline double heat_kernel_1d(double tau, double z, double mu) {
    return std::exp(-z * z / (4.0 * mu * tau)) / std::sqrt(4.0 * std::numbers::pi * mu * tau);
}

inline void validate(const NeumannKernel1D& k) {
    if (k.image_terms < 1) throw InvalidConfiguration("image_terms must be at least 1");
    if (!(k.length > 0.0) || !(k.mu > 0.0)) throw InvalidConfiguration("kernel length and mu must be positive");
}

inline double neumann_kernel_eval(const NeumannKernel1D& k, double t, double x, double s, double y) {
    validate(k);
    if (!(t > s)) throw DomainError("Neumann kernel needs t > s");
    const double tau = t - s;
    double sum = 0.0;
    for (int m = -k.image_terms; m <= k.image_terms; ++m) {
        const double shift = 2.0 * m * k.length;
        sum += heat_kernel_1d(tau, x - y - shift, k.mu) + heat_kernel_1d(tau, x + y - shift, k.mu);
    }
    return sum;
}

/// Exact integrals of N(t, x, s, .) over each cell of a 1D grid.
inline std::vector<double> neumann_cell_weights(const NeumannKernel1D& k, const Grid& g, double tau, double x) {
    validate(k);
    if (!(tau > 0.0)) throw DomainError("Neumann kernel needs t > s");
    const int n = g.cells(0);
    const double h = g.spacing(0);
    const double sigma = std::sqrt(4.0 * k.mu * tau);
    const double reach = 10.0 * sigma;
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    auto add_range = [&](double centre, bool reflected, double shift) {
        // cells whose y lies within `reach` of the image centre
        const int lo = std::max(0, static_cast<int>(std::floor((centre - reach) / h)));
        const int hi = std::min(n - 1, static_cast<int>(std::floor((centre + reach) / h)));
        for (int j = lo; j <= hi; ++j) {
            const double a = j * h;
            const double b = (j + 1) * h;
            double v;
            if (!reflected)
                v = 0.5 * (std::erf((x - a - shift) / sigma) - std::erf((x - b - shift) / sigma));
            else
                v = 0.5 * (std::erf((x + b - shift) / sigma) - std::erf((x + a - shift) / sigma));
            w[static_cast<std::size_t>(j)] += v;
        }
    };
    for (int m = -k.image_terms; m <= k.image_terms; ++m) {
        const double shift = 2.0 * m * k.length;
        add_range(x - shift, false, shift);   // images of y at x - shift
        add_range(shift - x, true, shift);    // reflected images at shift - x
    }
    return w;
}

using FieldProvider = std::function<Field(double)>;

/// Right-hand side of the Neumann representation
///   w(t,x) = int N(t,x,0,y) w0(y) dy + int_0^t int N(t,x,s,y) (B w + b)(s,y) dy ds
/// at the final stored time, evaluated at the given probe cells. The space
/// integrals are exact per cell for piecewise-constant data; the time
/// integral takes the midpoint of each stored step with the backward-Euler
/// source B(t_n) w(t_{n+1}) + b(t_n).
inline std::vector<double> representation_values(const Trajectory& w_trajectory, const Field& w0,
                                                 const FieldProvider& B, const FieldProvider& b,
                                                 const NeumannKernel1D& kernel,
                                                 std::span<const std::size_t> probe_cells) {
    const Grid& g = w0.grid();
    if (g.dimension() != 1) throw UnsupportedDimension("representation formula is only available in 1D");
    if (w_trajectory.size() < 2) throw InvalidConfiguration("representation check needs at least one step");
    const double t = w_trajectory.end_time();
    const std::size_t steps = w_trajectory.size() - 1;

    std::vector<Field> sources;
    sources.reserve(steps);
    for (std::size_t n = 0; n < steps; ++n) {
        const double tn = w_trajectory.times[n];
        Field f = b(tn);
        const Field Bn = B(tn);
        const Field& next = w_trajectory.fields[n + 1];
        for (std::size_t c = 0; c < f.size(); ++c) f[c] += Bn[c] * next[c];
        sources.push_back(std::move(f));
    }

    std::vector<double> values;
    values.reserve(probe_cells.size());
    for (std::size_t probe : probe_cells) {
        const double x = g.center(probe)[0];
        const auto w_init = neumann_cell_weights(kernel, g, t - w_trajectory.start_time(), x);
        double rhs = 0.0;
        for (std::size_t j = 0; j < w_init.size(); ++j) rhs += w_init[j] * w0[j];
        for (std::size_t n = 0; n < steps; ++n) {
            const double t0 = w_trajectory.times[n];
            const double t1 = w_trajectory.times[n + 1];
            const auto wts = neumann_cell_weights(kernel, g, t - 0.5 * (t0 + t1), x);
            double inner = 0.0;
            for (std::size_t j = 0; j < wts.size(); ++j) inner += wts[j] * sources[n][j];
            rhs += (t1 - t0) * inner;
        }
        values.push_back(rhs);
    }
    return values;
}

/// Largest mismatch between the stored final state and the representation formula.
inline double representation_residual(const Trajectory& w_trajectory, const Field& w0, const FieldProvider& B,
                                      const FieldProvider& b, const NeumannKernel1D& kernel,
                                      std::span<const std::size_t> probe_cells) {
    const auto values = representation_values(w_trajectory, w0, B, b, kernel, probe_cells);
    double worst = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
        worst = std::max(worst, std::abs(values[k] - w_trajectory.back()[probe_cells[k]]));
    return worst;
}

} // namespace hypar
