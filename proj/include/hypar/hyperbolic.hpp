// Explicit donor-cell upwind finite volumes for
//   du/dt + div(u c) = A u + a   in Omega,   u = 0 on inflow boundary.
//
// Face velocities are the mean of the two adjacent cell velocities; on the
// boundary the ghost state is zero, so inflow brings nothing and outflow
// leaves freely. Sources are applied explicitly after the flux update.
#pragma once

#include "hypar/error.hpp"
#include "hypar/geometry.hpp"
#include "hypar/trajectory.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace hypar {

struct TransportCoefficients {
    VectorField c;
    Field A;
    Field a;

    static TransportCoefficients zero(const GridPtr& grid) {
        return {VectorField(grid), Field(grid), Field(grid)};
    }
};

inline constexpr double kVelocityFloor = 1e-14;

/// cfl * min over cells/axes of h_d / (n * max(|c_d|, eps)), capped at dt_cap.
inline double max_stable_dt(const VectorField& c, const Grid& grid, double cfl_number,
                            double dt_cap = std::numeric_limits<double>::infinity()) {
    if (!(cfl_number > 0.0 && cfl_number <= 1.0))
        throw InvalidConfiguration("cfl_number must lie in (0, 1]");
    const int n = grid.dimension();
    double dt = dt_cap;
    for (int d = 0; d < n; ++d) {
        const double speed = std::max(c.max_abs(d), kVelocityFloor);
        dt = std::min(dt, cfl_number * grid.spacing(d) / (n * speed));
    }
    return dt;
}

/// Finite-volume divergence consistent with the transport fluxes:
/// sum over faces of (face velocity . nu) * area / volume, with the boundary
/// face velocity taken from the adjacent cell.
inline Field discrete_divergence(const VectorField& c) {
    const Grid& g = c.grid();
    Field div(c.grid_ptr());
    for (int d = 0; d < g.dimension(); ++d) {
        const auto k = static_cast<std::size_t>(d);
        const double inv_h = 1.0 / g.spacing(d);
        for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
            auto ij = g.coords(cell);
            auto neighbour = [&](int off) -> const Point* {
                auto q = ij;
                q[k] += off;
                if (q[k] < 0 || q[k] >= g.cells(d)) return nullptr;
                return &c[g.index(q[0], q[1])];
            };
            const Point* lo = neighbour(-1);
            const Point* hi = neighbour(+1);
            const double own = c[cell][k];
            const double v_hi = hi ? 0.5 * (own + (*hi)[k]) : own;
            const double v_lo = lo ? 0.5 * (own + (*lo)[k]) : own;
            div[cell] += (v_hi - v_lo) * inv_h;
        }
    }
    return div;
}

/// One explicit step. Refuses dt above the cfl = 1 limit of max_stable_dt.
inline Field transport_step(const Field& u, const TransportCoefficients& coeffs, double dt) {
    const Grid& g = u.grid();
    if (!(dt > 0.0)) throw InvalidConfiguration("transport dt must be positive");
    const double limit = max_stable_dt(coeffs.c, g, 1.0);
    if (dt > limit * (1.0 + 1e-12))
        throw StabilityError("transport dt " + std::to_string(dt) + " exceeds CFL limit " +
                             std::to_string(limit));

    Field out = u;
    for (int d = 0; d < g.dimension(); ++d) {
        const auto k = static_cast<std::size_t>(d);
        const double lambda = dt / g.spacing(d);
        const int nx = g.cells(0);
        const int ny = g.cells(1);
        const int di = d == 0 ? 1 : 0;
        const int dj = d == 1 ? 1 : 0;
        for (int j = 0; j + dj < ny; ++j)
            for (int i = 0; i + di < nx; ++i) {
                const std::size_t lo = g.index(i, j);
                const std::size_t hi = g.index(i + di, j + dj);
                const double cf = 0.5 * (coeffs.c[lo][k] + coeffs.c[hi][k]);
                const double flux = cf > 0.0 ? cf * u[lo] : cf * u[hi];
                out[lo] -= lambda * flux;
                out[hi] += lambda * flux;
            }
    }
    for (const BoundaryFace& f : g.boundary_faces()) {
        const double cn = coeffs.c[f.cell][static_cast<std::size_t>(f.axis)] * f.sign;
        if (cn > 0.0) out[f.cell] -= dt / g.spacing(f.axis) * cn * u[f.cell];
    }
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += dt * (coeffs.A[c] * out[c] + coeffs.a[c]);
    return out;
}

/// Coefficient norms at one step, enough to evaluate the a priori bounds.
struct TransportStepRecord {
    double t = 0.0;
    double dt = 0.0;
    double A_linf = 0.0;
    double a_l1 = 0.0;
    double a_linf = 0.0;
    double div_c_linf = 0.0;
    double c_linf = 0.0;
};

struct TransportRun {
    Trajectory trajectory;
    std::vector<TransportStepRecord> history;
    /// Coefficients per step, kept only on request.
    std::vector<TransportCoefficients> coefficients;
};

inline TransportStepRecord record_of(double t, double dt, const TransportCoefficients& k) {
    return {t,
            dt,
            linf_norm(k.A),
            l1_norm(k.a),
            linf_norm(k.a),
            linf_norm(discrete_divergence(k.c)),
            k.c.max_norm()};
}

/// Fixed-step loop over [t0, t1] with `steps` equal steps; `provider(t)`
/// returns the coefficients frozen at the left end of each step.
template <class Provider>
TransportRun integrate_transport(const Field& u0, Provider&& provider, double t0, double t1,
                                 int steps, bool keep_coefficients = false) {
    if (steps < 1) throw InvalidConfiguration("transport needs at least one step");
    u0.require_finite("initial transport datum");
    TransportRun run;
    const double dt = (t1 - t0) / steps;
    Field u = u0;
    run.trajectory.push(t0, u);
    for (int n = 0; n < steps; ++n) {
        const double t = t0 + n * dt;
        TransportCoefficients k = provider(t);
        run.history.push_back(record_of(t, dt, k));
        u = transport_step(u, k, dt);
        run.trajectory.push(n + 1 == steps ? t1 : t0 + (n + 1) * dt, u);
        if (keep_coefficients) run.coefficients.push_back(std::move(k));
    }
    return run;
}

struct TransportConfig {
    /// Upper bound on the step; the horizon is split into equal steps no longer than this.
    double dt = 1e-2;
    bool keep_coefficients = false;
};

inline int steps_for(double horizon, double dt_max) {
    if (!(horizon > 0.0)) throw InvalidConfiguration("time horizon must be positive");
    if (!(dt_max > 0.0)) throw InvalidConfiguration("time step must be positive");
    return std::max(1, static_cast<int>(std::ceil(horizon / dt_max - 1e-9)));
}

template <class Provider>
TransportRun simulate_transport(const Field& u0, Provider&& provider, double T,
                                const TransportConfig& config) {
    return integrate_transport(u0, std::forward<Provider>(provider), 0.0, T, steps_for(T, config.dt),
                               config.keep_coefficients);
}

} // namespace hypar
