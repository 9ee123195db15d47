// Scenario presets and tabulated coefficients.
#pragma once

#include "hypar/coupling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hypar {

// ---------------------------------------------------------------------------
// Tabulated data with multilinear interpolation

/// Values on a tensor grid of nodes. Axis 0 varies fastest in `values`.
/// Queries outside the node range are clamped to the boundary nodes.
struct Table {
    std::vector<std::vector<double>> axes;
    std::vector<double> values;

    std::size_t expected_size() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.size();
        return n;
    }

    void validate(const std::string& what) const {
        if (axes.empty() || axes.size() > 3) throw InvalidConfiguration(what + ": a table needs one to three axes");
        for (const auto& a : axes) {
            if (a.empty()) throw InvalidConfiguration(what + ": empty table axis");
            for (std::size_t i = 1; i < a.size(); ++i)
                if (!(a[i] > a[i - 1])) throw InvalidConfiguration(what + ": table axis must increase strictly");
        }
        if (values.size() != expected_size())
            throw InvalidConfiguration(what + ": table has " + std::to_string(values.size()) + " values, expected " +
                                       std::to_string(expected_size()));
        for (double v : values)
            if (!std::isfinite(v)) throw InvalidConfiguration(what + ": table values must be finite");
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    double min() const { return *std::min_element(values.begin(), values.end()); }

    double operator()(std::span<const double> q) const {
        const std::size_t n = axes.size();
        std::array<std::size_t, 3> lo{};
        std::array<double, 3> w{};
        for (std::size_t d = 0; d < n; ++d) {
            const auto& a = axes[d];
            const double x = std::clamp(q[d], a.front(), a.back());
            if (a.size() == 1) {
                lo[d] = 0;
                w[d] = 0.0;
                continue;
            }
            std::size_t k = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), x) - a.begin());
            k = std::clamp<std::size_t>(k, 1, a.size() - 1) - 1;
            lo[d] = k;
            w[d] = (x - a[k]) / (a[k + 1] - a[k]);
        }
        double sum = 0.0;
        for (unsigned corner = 0; corner < (1u << n); ++corner) {
            double weight = 1.0;
            std::size_t index = 0, stride = 1;
            for (std::size_t d = 0; d < n; ++d) {
                const bool up = (corner >> d) & 1u;
                if (up && axes[d].size() == 1) {
                    weight = 0.0;
                    break;
                }
                weight *= up ? w[d] : 1.0 - w[d];
                index += (lo[d] + (up ? 1 : 0)) * stride;
                stride *= axes[d].size();
            }
            if (weight != 0.0) sum += weight * values[index];
        }
        return sum;
    }
};

/// Samples a space table (axes x[, y]) at the cell centres.
inline Field sample_space_table(const Table& t, const GridPtr& g) {
    if (t.axes.size() != static_cast<std::size_t>(g->dimension()))
        throw InvalidConfiguration("space table dimension does not match the grid");
    return Field::from_function(g, [&](const Point& x) { return t(std::span<const double>(x.data(), t.axes.size())); });
}

/// Samples a space-time table (axes x[, y], t) at time t.
inline Field sample_space_time_table(const Table& tab, double t, const GridPtr& g) {
    const std::size_t dim = static_cast<std::size_t>(g->dimension());
    if (tab.axes.size() != dim + 1) throw InvalidConfiguration("space-time table dimension does not match the grid");
    return Field::from_function(g, [&](const Point& x) {
        std::array<double, 3> q{x[0], x[1], 0.0};
        q[dim] = t;
        return tab(std::span<const double>(q.data(), dim + 1));
    });
}

// ---------------------------------------------------------------------------
// Bump mixtures

struct Bump {
    Point center{};
    double radius = 0.1;
    double height = 1.0;
    /// Flat top with a jump at the rim instead of a smooth quartic profile.
    bool plateau = false;
};

inline double bump_value(const std::vector<Bump>& bumps, const Point& x, int dimension) {
    double v = 0.0;
    for (const auto& b : bumps) {
        const double dy = dimension == 2 ? x[1] - b.center[1] : 0.0;
        const double d = std::hypot(x[0] - b.center[0], dy) / b.radius;
        if (d >= 1.0) continue;
        v += b.plateau ? b.height : b.height * (1.0 - d * d) * (1.0 - d * d);
    }
    return v;
}

/// Cell averages of the mixture, by the midpoint rule on `sub` subcells per axis.
inline Field bump_mixture(const GridPtr& g, const std::vector<Bump>& bumps, int sub = 16) {
    const int dim = g->dimension();
    const int sy = dim == 2 ? sub : 1;
    const double hx = g->spacing(0), hy = dim == 2 ? g->spacing(1) : 0.0;
    return Field::from_function(g, [&](const Point& c) {
        double sum = 0.0;
        for (int b = 0; b < sy; ++b)
            for (int a = 0; a < sub; ++a) {
                const Point x{c[0] + hx * ((a + 0.5) / sub - 0.5), dim == 2 ? c[1] + hy * ((b + 0.5) / sy - 0.5) : 0.0};
                sum += bump_value(bumps, x, dim);
            }
        return sum / (sub * sy);
    });
}

/// `count` bumps with centres drawn in the box [lo, hi] (relative to the extents).
inline std::vector<Bump> random_bumps(std::mt19937_64& rng, const Grid& g, int count, double lo, double hi,
                                      bool with_plateau) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Bump> out;
    const double size = g.dimension() == 2 ? std::min(g.extent(0), g.extent(1)) : g.extent(0);
    for (int k = 0; k < count; ++k) {
        Bump b;
        b.center[0] = g.extent(0) * (lo + (hi - lo) * U(rng));
        b.center[1] = g.dimension() == 2 ? g.extent(1) * (0.2 + 0.6 * U(rng)) : 0.0;
        b.radius = size * (0.08 + 0.07 * U(rng));
        b.plateau = with_plateau && k == 0;
        // heights are set from a target mass in [0.1, 0.3]
        const double target = 0.1 + 0.2 * U(rng);
        const double r = b.radius;
        const double unit = g.dimension() == 2 ? (b.plateau ? std::numbers::pi * r * r : std::numbers::pi * r * r / 3.0)
                                                : (b.plateau ? 2.0 * r : 16.0 * r / 15.0);
        b.height = target / unit;
        out.push_back(b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenarios

struct CustomTables {
    /// Space-time tables (x[, y], t).
    std::optional<Table> alpha, beta, a, b;
    /// Table over t only.
    std::optional<Table> drift;
    /// Space tables (x[, y]).
    std::optional<Table> u0, w0;
};

struct ModelParameters {
    double mu = 0.01;
    double horizon = 0.2;
    double drift = 0.5;
};

struct Scenario {
    std::string name;
    ModelSpec model;
    Field u0;
    Field w0;
    /// Data and sources are nonnegative, so the computed densities must stay nonnegative.
    bool nonnegative = true;
};

struct PresetInfo {
    std::string name;
    std::string summary;
};

inline const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog{
        {"chase", "u moves up the smoothed gradient of w (k > 0); predator-prey growth rates"},
        {"escape", "same rates with k < 0, u moves away from w"},
        {"decoupled", "no drift and constant rates; the two equations do not interact"},
        {"custom", "rates, sources, drift and initial data read from tables"},
    };
    return catalog;
}

inline bool is_preset(const std::string& name) {
    const auto& c = preset_catalog();
    return std::any_of(c.begin(), c.end(), [&](const PresetInfo& p) { return p.name == name; });
}

/// Predator-prey rates: alpha = -0.2 + 0.5 |w|_1, beta = 0.3 - min(|u|_1, 2).
inline void predator_prey_rates(ModelSpec& m) {
    m.alpha = [](double, const Field& w) { return Field(w.grid_ptr(), -0.2 + 0.5 * l1_norm(w)); };
    m.beta = [](double, const Field& u, const Field& w) {
        return Field(w.grid_ptr(), 0.3 - std::min(l1_norm(u), 2.0));
    };
    m.k_alpha = [](double) { return 0.5; };
    m.K_alpha = 0.5;
    m.k_beta = [](double) { return 1.7; };
    m.K_beta = 1.0;
}

inline Scenario build_scenario(const std::string& name, const GridPtr& g, const ModelParameters& p,
                               std::uint64_t seed, const CustomTables& tables = {}) {
    if (!is_preset(name)) throw InvalidConfiguration("unknown preset '" + name + "'");
    Scenario s;
    s.name = name;
    s.model.mu = p.mu;
    s.model.kernel = normalize_kernel(p.horizon, g->dimension());

    std::mt19937_64 rng(seed);
    s.u0 = bump_mixture(g, random_bumps(rng, *g, 3, 0.15, 0.45, true));
    s.w0 = bump_mixture(g, random_bumps(rng, *g, 2, 0.55, 0.85, false));

    if (name == "chase" || name == "escape") {
        s.model.drift = DriftSchedule::constant(name == "chase" ? std::abs(p.drift) : -std::abs(p.drift));
        predator_prey_rates(s.model);
    } else if (name == "decoupled") {
        s.model.drift = DriftSchedule::constant(0.0);
        s.model.alpha = [](double, const Field& w) { return Field(w.grid_ptr(), -0.1); };
        s.model.beta = [](double, const Field&, const Field& w) { return Field(w.grid_ptr(), 0.1); };
        s.model.k_alpha = [](double) { return 0.1; };
        s.model.k_beta = [](double) { return 0.1; };
    } else {
        auto space_time = [](const std::optional<Table>& t, const char* what, std::size_t axes) {
            if (t) {
                t->validate(what);
                if (t->axes.size() != axes) throw InvalidConfiguration(std::string(what) + ": wrong number of axes");
            }
        };
        const std::size_t dim = static_cast<std::size_t>(g->dimension());
        space_time(tables.alpha, "alpha", dim + 1);
        space_time(tables.beta, "beta", dim + 1);
        space_time(tables.a, "a", dim + 1);
        space_time(tables.b, "b", dim + 1);
        space_time(tables.drift, "drift", 1);
        space_time(tables.u0, "u0", dim);
        space_time(tables.w0, "w0", dim);

        if (tables.alpha) {
            const Table t = *tables.alpha;
            s.model.alpha = [t](double time, const Field& w) { return sample_space_time_table(t, time, w.grid_ptr()); };
            s.model.k_alpha = [m = t.max_abs()](double) { return m; };
        }
        if (tables.beta) {
            const Table t = *tables.beta;
            s.model.beta = [t](double time, const Field&, const Field& w) {
                return sample_space_time_table(t, time, w.grid_ptr());
            };
            s.model.k_beta = [m = t.max_abs()](double) { return m; };
        }
        if (tables.a) {
            const Table t = *tables.a;
            s.model.a = [t](double time, const GridPtr& grid) { return sample_space_time_table(t, time, grid); };
            s.nonnegative = s.nonnegative && t.min() >= 0.0;
        }
        if (tables.b) {
            const Table t = *tables.b;
            s.model.b = [t](double time, const GridPtr& grid) { return sample_space_time_table(t, time, grid); };
            s.nonnegative = s.nonnegative && t.min() >= 0.0;
        }
        if (tables.drift) {
            const Table t = *tables.drift;
            s.model.drift.k = [t](double time) { return t(std::span<const double>(&time, 1)); };
            s.model.drift.bound = t.max_abs();
        } else {
            s.model.drift = DriftSchedule::constant(p.drift);
        }
        if (tables.u0) s.u0 = sample_space_table(*tables.u0, g);
        if (tables.w0) s.w0 = sample_space_table(*tables.w0, g);
        s.nonnegative = s.nonnegative && s.u0.min() >= 0.0 && s.w0.min() >= 0.0;
    }
    validate_model(s.model, *g);
    return s;
}

} // namespace hypar
