// Uniform axis-aligned grids over an interval or a rectangle, and the
// cell-averaged fields that live on them.
//
// Cells are ordered row-major with axis 0 fastest: index = i + nx * j.
#pragma once

#include "hypar/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hypar {

using Point = std::array<double, 2>;

/// A boundary face of a cell; the outward unit normal is `sign * e_axis`.
struct BoundaryFace {
    std::size_t cell;
    int axis;
    int sign;
    double area;

    Point normal() const {
        Point n{0.0, 0.0};
        n[static_cast<std::size_t>(axis)] = static_cast<double>(sign);
        return n;
    }
};

class Grid {
public:
    Grid(int dimension, std::span<const double> extents, std::span<const int> cells_per_axis)
        : dimension_(dimension) {
        if (dimension != 1 && dimension != 2)
            throw InvalidConfiguration("grid dimension must be 1 or 2, got " +
                                       std::to_string(dimension));
        if (extents.size() != static_cast<std::size_t>(dimension) ||
            cells_per_axis.size() != static_cast<std::size_t>(dimension))
            throw InvalidConfiguration("grid extents and cell counts need one entry per axis");
        for (int d = 0; d < dimension; ++d) {
            const auto k = static_cast<std::size_t>(d);
            if (!(extents[k] > 0.0) || !std::isfinite(extents[k]))
                throw InvalidConfiguration("grid extent on axis " + std::to_string(d) +
                                           " must be positive");
            if (cells_per_axis[k] < 2)
                throw InvalidConfiguration("grid needs at least 2 cells on axis " +
                                           std::to_string(d));
            extents_[k] = extents[k];
            cells_[k] = cells_per_axis[k];
            spacing_[k] = extents[k] / cells_per_axis[k];
        }
        build_boundary();
    }

    int dimension() const noexcept { return dimension_; }
    double extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
    int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    double min_spacing() const {
        return dimension_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
    }
    double max_spacing() const {
        return dimension_ == 1 ? spacing_[0] : std::max(spacing_[0], spacing_[1]);
    }

    std::size_t cell_count() const noexcept {
        return static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1]);
    }

    double cell_volume() const noexcept { return spacing_[0] * spacing_[1]; }

    /// Measure of Omega (length in 1D, area in 2D).
    double volume() const noexcept { return extents_[0] * extents_[1]; }

    /// Area of a face whose normal points along `axis` (1 in 1D).
    double face_area(int axis) const {
        if (dimension_ == 1) return 1.0;
        return axis == 0 ? spacing_[1] : spacing_[0];
    }

    std::size_t index(int i, int j = 0) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(j);
    }

    std::array<int, 2> coords(std::size_t cell) const {
        const auto nx = static_cast<std::size_t>(cells_[0]);
        return {static_cast<int>(cell % nx), static_cast<int>(cell / nx)};
    }

    Point center(std::size_t cell) const {
        const auto [i, j] = coords(cell);
        Point x{(i + 0.5) * spacing_[0], 0.0};
        if (dimension_ == 2) x[1] = (j + 0.5) * spacing_[1];
        return x;
    }

    const std::vector<BoundaryFace>& boundary_faces() const noexcept { return boundary_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.dimension_ == b.dimension_ && a.extents_ == b.extents_ && a.cells_ == b.cells_;
    }

private:
    void build_boundary() {
        const int nx = cells_[0];
        const int ny = cells_[1];
        for (int j = 0; j < ny; ++j) {
            boundary_.push_back({index(0, j), 0, -1, face_area(0)});
            boundary_.push_back({index(nx - 1, j), 0, +1, face_area(0)});
        }
        if (dimension_ == 2) {
            for (int i = 0; i < nx; ++i) {
                boundary_.push_back({index(i, 0), 1, -1, face_area(1)});
                boundary_.push_back({index(i, ny - 1), 1, +1, face_area(1)});
            }
        }
    }

    int dimension_;
    std::array<double, 2> extents_{1.0, 1.0};
    std::array<int, 2> cells_{1, 1};
    std::array<double, 2> spacing_{1.0, 1.0};
    std::vector<BoundaryFace> boundary_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(int dimension, std::span<const double> extents,
                          std::span<const int> cells_per_axis) {
    return std::make_shared<const Grid>(dimension, extents, cells_per_axis);
}

inline GridPtr build_grid_1d(double length, int cells) {
    const double e[] = {length};
    const int n[] = {cells};
    return build_grid(1, e, n);
}

inline GridPtr build_grid_2d(double lx, double ly, int nx, int ny) {
    const double e[] = {lx, ly};
    const int n[] = {nx, ny};
    return build_grid(2, e, n);
}

/// Cell-averaged scalar state bound to a grid.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid, double value = 0.0)
        : grid_(std::move(grid)), values_(grid_->cell_count(), value) {}
    Field(GridPtr grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_->cell_count())
            throw InvalidConfiguration("field size " + std::to_string(values_.size()) +
                                       " does not match grid cell count " +
                                       std::to_string(grid_->cell_count()));
    }

    template <class Fn>
    static Field from_function(const GridPtr& grid, Fn&& fn) {
        Field f(grid);
        for (std::size_t c = 0; c < f.size(); ++c) f[c] = fn(grid->center(c));
        return f;
    }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t c) { return values_[c]; }
    double operator[](std::size_t c) const { return values_[c]; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }
    void require_finite(const char* what) const {
        if (!all_finite()) throw Error(std::string(what) + ": field contains non-finite values");
    }

    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }

    Field& operator+=(const Field& o) {
        for (std::size_t c = 0; c < size(); ++c) values_[c] += o.values_[c];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (std::size_t c = 0; c < size(); ++c) values_[c] -= o.values_[c];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }

    friend bool operator==(const Field& a, const Field& b) { return a.values_ == b.values_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// One n-vector per cell; the second component is unused (zero) in 1D.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->cell_count(), Point{0.0, 0.0}) {}

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    Point& operator[](std::size_t c) { return values_[c]; }
    const Point& operator[](std::size_t c) const { return values_[c]; }
    std::span<const Point> values() const noexcept { return values_; }

    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](const Point& p) {
            return std::isfinite(p[0]) && std::isfinite(p[1]);
        });
    }

    /// max over cells of the Euclidean norm.
    double max_norm() const {
        double m = 0.0;
        for (const auto& p : values_) m = std::max(m, std::hypot(p[0], p[1]));
        return m;
    }

    /// max over cells of |component d|.
    double max_abs(int axis) const {
        double m = 0.0;
        for (const auto& p : values_) m = std::max(m, std::abs(p[static_cast<std::size_t>(axis)]));
        return m;
    }

    friend bool operator==(const VectorField& a, const VectorField& b) { return a.values_ == b.values_; }

private:
    GridPtr grid_;
    std::vector<Point> values_;
};

struct Norms {
    double l1 = 0.0;
    double linf = 0.0;
    double tv = 0.0;
};

/// Discrete L1 norm: sum of |value| * cell volume.
inline double l1_norm(std::span<const double> v, const Grid& g) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s * g.cell_volume();
}
inline double l1_norm(const Field& f) { return l1_norm(f.values(), f.grid()); }

inline double linf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
inline double linf_norm(const Field& f) { return linf_norm(f.values()); }

/// Discrete total variation: sum over interior faces of |jump| * face area.
inline double total_variation(std::span<const double> v, const Grid& g) {
    const int nx = g.cells(0);
    const int ny = g.cells(1);
    double tv_x = 0.0;
    double tv_y = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) tv_x += std::abs(v[g.index(i + 1, j)] - v[g.index(i, j)]);
    if (g.dimension() == 2)
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i < nx; ++i) tv_y += std::abs(v[g.index(i, j + 1)] - v[g.index(i, j)]);
    return tv_x * g.face_area(0) + tv_y * (g.dimension() == 2 ? g.face_area(1) : 0.0);
}
inline double total_variation(const Field& f) { return total_variation(f.values(), f.grid()); }

/// Signed integral of the field over Omega.
inline double mass(const Field& f) {
    double s = 0.0;
    for (double x : f.values()) s += x;
    return s * f.grid().cell_volume();
}

inline Norms discrete_norms(const Field& f) {
    return {l1_norm(f), linf_norm(f), total_variation(f)};
}

/// L1 distance between two fields on the same grid.
inline double l1_distance(const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += std::abs(a[c] - b[c]);
    return s * a.grid().cell_volume();
}

} // namespace hypar
