// Compactly supported radial kernel, the domain-renormalized convolution
// and the nonlocal drift velocity built from it.
#pragma once

#include "hypar/error.hpp"
#include "hypar/geometry.hpp"
#include "hypar/parallel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace hypar {

/// Radial profile (1 - s^4)^4 on [0,1), zero beyond.
inline double kernel_profile(double s) {
    if (s >= 1.0) return 0.0;
    const double s2 = s * s;
    const double q = 1.0 - s2 * s2;
    const double q2 = q * q;
    return q2 * q2;
}

/// eta(x) = normalization * (1 - (|x|/horizon)^4)^4 on the ball of radius horizon.
struct KernelSpec {
    double horizon = 0.0;
    double normalization = 0.0;
    int dimension = 1;

    double operator()(double r) const { return normalization * kernel_profile(r / horizon); }
    double operator()(const Point& x) const { return (*this)(std::hypot(x[0], x[1])); }
};

inline double kernel_eval(const KernelSpec& spec, const Point& x) { return spec(x); }

/// Number of midpoint subintervals of [0,1] used to integrate the radial profile.
inline constexpr int kKernelQuadratureCells = 200000;

/// Integral of the unit-horizon, unit-height kernel over R^n by the midpoint rule
/// in the radial variable.
inline double kernel_mass_unit(int dimension) {
    const double ds = 1.0 / kKernelQuadratureCells;
    double sum = 0.0;
    for (int k = 0; k < kKernelQuadratureCells; ++k) {
        const double s = (k + 0.5) * ds;
        sum += dimension == 1 ? kernel_profile(s) : kernel_profile(s) * s;
    }
    sum *= ds;
    return dimension == 1 ? 2.0 * sum : 2.0 * std::numbers::pi * sum;
}

/// Chooses the normalization so that the kernel integrates to one over R^n.
inline KernelSpec normalize_kernel(double horizon, int dimension) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw InvalidConfiguration("kernel horizon must be positive");
    if (dimension != 1 && dimension != 2)
        throw UnsupportedDimension("kernel dimension must be 1 or 2");
    const double scale = dimension == 1 ? horizon : horizon * horizon;
    return {horizon, 1.0 / (kernel_mass_unit(dimension) * scale), dimension};
}

/// Renormalized convolution over the cells of Omega:
///   (rho *_Omega eta)(x) = sum_y rho(y) eta(x-y) vol / sum_y eta(x-y) vol.
///
/// Weights and denominators depend only on the grid and kernel and are
/// built once. Each output cell sums its stencil in a fixed order, so the
/// result does not depend on the thread count.
class ConvolutionOperator {
public:
    ConvolutionOperator(GridPtr grid, KernelSpec kernel, int threads = 1)
        : grid_(std::move(grid)), kernel_(kernel), threads_(threads) {
        const Grid& g = *grid_;
        if (kernel_.dimension != g.dimension())
            throw InvalidConfiguration("kernel and grid dimensions differ");
        if (kernel_.horizon < g.max_spacing())
            throw DegenerateKernel("kernel horizon " + std::to_string(kernel_.horizon) +
                                   " is smaller than the grid spacing " +
                                   std::to_string(g.max_spacing()));

        const int rx = static_cast<int>(std::ceil(kernel_.horizon / g.spacing(0)));
        const int ry = g.dimension() == 2 ? static_cast<int>(std::ceil(kernel_.horizon / g.spacing(1))) : 0;
        for (int dj = -ry; dj <= ry; ++dj)
            for (int di = -rx; di <= rx; ++di) {
                const double w = kernel_(Point{di * g.spacing(0), g.dimension() == 2 ? dj * g.spacing(1) : 0.0});
                if (w > 0.0) stencil_.push_back({di, dj, w});
            }

        const double vol = g.cell_volume();
        denominator_.assign(g.cell_count(), 0.0);
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            const auto [i, j] = g.coords(c);
            double d = 0.0;
            for (const auto& s : stencil_) {
                const int ii = i + s.di;
                const int jj = j + s.dj;
                if (ii < 0 || jj < 0 || ii >= g.cells(0) || jj >= g.cells(1)) continue;
                d += s.weight * vol;
            }
            if (d < 1e-14)
                throw DegenerateKernel("convolution denominator vanishes at cell " + std::to_string(c));
            denominator_[c] = d;
        }
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const KernelSpec& kernel() const { return kernel_; }
    std::size_t stencil_size() const { return stencil_.size(); }
    void set_threads(int threads) { threads_ = threads; }

    /// Denominator sum_y eta(x-y) vol for cell x.
    double denominator(std::size_t cell) const { return denominator_[cell]; }

    Field apply(const Field& rho) const {
        const Grid& g = *grid_;
        Field out(grid_);
        const double vol = g.cell_volume();
        const auto src = rho.values();
        const int nx = g.cells(0);
        const int ny = g.cells(1);
        // One output row at a time; every cell accumulates the taps in stencil order.
        parallel_for(static_cast<std::size_t>(ny), threads_, [&](std::size_t row) {
            const int j = static_cast<int>(row);
            std::vector<double> num(static_cast<std::size_t>(nx), 0.0);
            for (const auto& s : stencil_) {
                const int jj = j + s.dj;
                if (jj < 0 || jj >= ny) continue;
                const int lo = std::max(0, -s.di);
                const int hi = std::min(nx, nx - s.di);
                const double* in = src.data() + g.index(0, jj);
                const double w = s.weight;
                for (int i = lo; i < hi; ++i) num[static_cast<std::size_t>(i)] += in[i + s.di] * w * vol;
            }
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.index(i, j);
                out[c] = num[static_cast<std::size_t>(i)] / denominator_[c];
            }
        });
        return out;
    }

    /// Plain (not renormalized) discrete convolution sum_y rho(y) eta(x-y) vol.
    double plain_convolution_at(const Field& rho, std::size_t cell) const {
        const Grid& g = *grid_;
        const auto [i, j] = g.coords(cell);
        double num = 0.0;
        for (const auto& s : stencil_) {
            const int ii = i + s.di;
            const int jj = j + s.dj;
            if (ii < 0 || jj < 0 || ii >= g.cells(0) || jj >= g.cells(1)) continue;
            num += rho[g.index(ii, jj)] * s.weight * g.cell_volume();
        }
        return num;
    }

private:
    struct Tap {
        int di;
        int dj;
        double weight;
    };

    GridPtr grid_;
    KernelSpec kernel_;
    int threads_;
    std::vector<Tap> stencil_;
    std::vector<double> denominator_;
};

inline Field omega_convolve(const Field& rho, const KernelSpec& spec) {
    return ConvolutionOperator(rho.grid_ptr(), spec).apply(rho);
}

/// Time-dependent drift amplitude k(t); k > 0 chases, k < 0 escapes.
struct DriftSchedule {
    std::function<double(double)> k = [](double) { return 0.0; };
    /// Declared bound on sup |k| over the horizon; sizes the transport time step.
    double bound = 0.0;

    double operator()(double t) const { return k(t); }

    static DriftSchedule constant(double value) {
        return {[value](double) { return value; }, std::abs(value)};
    }
};

/// Cell-centred gradient: central differences inside, one-sided at boundary cells.
inline VectorField cell_gradient(const Field& phi) {
    const Grid& g = phi.grid();
    VectorField grad(phi.grid_ptr());
    for (int d = 0; d < g.dimension(); ++d) {
        const int n = g.cells(d);
        const double h = g.spacing(d);
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            auto ij = g.coords(c);
            const int k = ij[static_cast<std::size_t>(d)];
            auto at = [&](int m) {
                auto q = ij;
                q[static_cast<std::size_t>(d)] = m;
                return phi[g.index(q[0], q[1])];
            };
            double gd;
            if (k == 0)
                gd = (at(1) - at(0)) / h;
            else if (k == n - 1)
                gd = (at(n - 1) - at(n - 2)) / h;
            else
                gd = (at(k + 1) - at(k - 1)) / (2.0 * h);
            grad[c][static_cast<std::size_t>(d)] = gd;
        }
    }
    return grad;
}

/// v = k g / sqrt(1 + |g|^2), applied per cell.
inline VectorField saturate_velocity(const VectorField& g, double k) {
    VectorField v(g.grid_ptr());
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Point& p = g[c];
        const double f = k / std::sqrt(1.0 + p[0] * p[0] + p[1] * p[1]);
        v[c] = {f * p[0], f * p[1]};
    }
    return v;
}

/// Drift towards (k > 0) or away from (k < 0) the local average gradient of w.
inline VectorField velocity_field(double t, const Field& w, const ConvolutionOperator& conv,
                                  const DriftSchedule& schedule) {
    return saturate_velocity(cell_gradient(conv.apply(w)), schedule(t));
}

inline VectorField velocity_field(double t, const Field& w, const KernelSpec& spec,
                                  const DriftSchedule& schedule) {
    return velocity_field(t, w, ConvolutionOperator(w.grid_ptr(), spec), schedule);
}

/// Smallest C with |grad(w1 *_Omega eta) - grad(w2 *_Omega eta)|_inf <= C |w1 - w2|_L1
/// on this grid; bounds the velocity Lipschitz constant after multiplying by |k|.
/// Cost is one convolution per cell, so intended for test-scale grids.
inline double velocity_lipschitz_constant(const ConvolutionOperator& conv) {
    const Grid& g = conv.grid();
    double worst = 0.0;
    Field unit(conv.grid_ptr());
    for (std::size_t y = 0; y < g.cell_count(); ++y) {
        unit[y] = 1.0 / g.cell_volume();
        worst = std::max(worst, cell_gradient(conv.apply(unit)).max_norm());
        unit[y] = 0.0;
    }
    return worst;
}

} // namespace hypar
