#include "hypar/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hypar;

TEST(Grid, Interval) {
    auto g = build_grid_1d(1.0, 4);
    EXPECT_EQ(g->dimension(), 1);
    EXPECT_EQ(g->cell_count(), 4u);
    EXPECT_DOUBLE_EQ(g->spacing(0), 0.25);
    EXPECT_EQ(g->boundary_faces().size(), 2u);
    EXPECT_DOUBLE_EQ(g->center(0)[0], 0.125);
}

TEST(Grid, SquareBoundaryFaces) {
    auto g = build_grid_2d(1.0, 1.0, 8, 8);
    EXPECT_EQ(g->cell_count(), 64u);
    EXPECT_EQ(g->boundary_faces().size(), 32u);
}

TEST(Grid, AnisotropicSpacing) {
    auto g = build_grid_2d(2.0, 1.0, 4, 4);
    EXPECT_DOUBLE_EQ(g->spacing(0), 0.5);
    EXPECT_DOUBLE_EQ(g->spacing(1), 0.25);
    EXPECT_DOUBLE_EQ(g->cell_volume(), 0.125);
}

TEST(Grid, BoundaryAreasSumToPerimeter) {
    auto g2 = build_grid_2d(2.0, 0.5, 6, 3);
    double total = 0.0;
    for (const auto& f : g2->boundary_faces()) {
        total += f.area;
        const Point n = f.normal();
        EXPECT_DOUBLE_EQ(std::abs(n[0]) + std::abs(n[1]), 1.0);
    }
    EXPECT_NEAR(total, 2.0 * (2.0 + 0.5), 1e-14);

    auto g1 = build_grid_1d(3.0, 5);
    double count = 0.0;
    for (const auto& f : g1->boundary_faces()) count += f.area;
    EXPECT_DOUBLE_EQ(count, 2.0);
}

TEST(Grid, OutwardNormalsPointAway) {
    auto g = build_grid_2d(1.0, 1.0, 5, 4);
    for (const auto& f : g->boundary_faces()) {
        const auto ij = g->coords(f.cell);
        const int k = ij[static_cast<std::size_t>(f.axis)];
        if (f.sign < 0) EXPECT_EQ(k, 0);
        else EXPECT_EQ(k, g->cells(f.axis) - 1);
    }
}

TEST(Grid, InvalidConfigurations) {
    const double bad_extent[] = {-1.0};
    const int cells4[] = {4};
    EXPECT_THROW(build_grid(1, bad_extent, cells4), InvalidConfiguration);
    const double unit[] = {1.0};
    const int one[] = {1};
    EXPECT_THROW(build_grid(1, unit, one), InvalidConfiguration);
    const int zero[] = {0};
    EXPECT_THROW(build_grid(1, unit, zero), InvalidConfiguration);
    EXPECT_THROW(build_grid(3, unit, cells4), InvalidConfiguration);
}

TEST(Grid, IndexRoundTrip) {
    auto g = build_grid_2d(1.0, 2.0, 7, 5);
    for (std::size_t c = 0; c < g->cell_count(); ++c) {
        const auto [i, j] = g->coords(c);
        EXPECT_EQ(g->index(i, j), c);
    }
    EXPECT_EQ(g->index(1, 0), 1u);  // axis 0 fastest
    EXPECT_EQ(g->index(0, 1), 7u);
}

TEST(Field, SizeMismatchRejected) {
    auto g = build_grid_1d(1.0, 4);
    EXPECT_THROW(Field(g, std::vector<double>(3, 0.0)), InvalidConfiguration);
}

TEST(Field, FiniteCheck) {
    auto g = build_grid_1d(1.0, 4);
    Field f(g);
    EXPECT_TRUE(f.all_finite());
    f[2] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_FALSE(f.all_finite());
    EXPECT_THROW(f.require_finite("test"), Error);
}

TEST(Norms, ConstantOnUnitSquare) {
    for (int n : {4, 9, 16}) {
        auto g = build_grid_2d(1.0, 1.0, n, n);
        const Norms nm = discrete_norms(Field(g, 1.0));
        EXPECT_NEAR(nm.l1, 1.0, 1e-14);
        EXPECT_DOUBLE_EQ(nm.linf, 1.0);
        EXPECT_DOUBLE_EQ(nm.tv, 0.0);
    }
}

TEST(Norms, ZeroField) {
    const Norms nm = discrete_norms(Field(build_grid_2d(1.0, 1.0, 3, 3)));
    EXPECT_EQ(nm.l1, 0.0);
    EXPECT_EQ(nm.linf, 0.0);
    EXPECT_EQ(nm.tv, 0.0);
}

TEST(Norms, TwoCellStep) {
    auto g = build_grid_1d(1.0, 2);
    const Norms nm = discrete_norms(Field(g, std::vector<double>{0.0, 1.0}));
    EXPECT_DOUBLE_EQ(nm.l1, 0.5);
    EXPECT_DOUBLE_EQ(nm.linf, 1.0);
    EXPECT_DOUBLE_EQ(nm.tv, 1.0);
}

TEST(Norms, TwoDimensionalTvUsesFaceAreas) {
    // a vertical interface x = 1/2 of unit height has TV = jump * length
    auto g = build_grid_2d(1.0, 1.0, 4, 4);
    auto f = Field::from_function(g, [](const Point& x) { return x[0] > 0.5 ? 3.0 : 1.0; });
    EXPECT_NEAR(total_variation(f), 2.0, 1e-14);
}

TEST(Norms, RandomProperties) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto g = trial % 2 ? build_grid_1d(1.7, 11) : build_grid_2d(1.3, 0.6, 5, 7);
        Field a(g), b(g);
        for (std::size_t c = 0; c < a.size(); ++c) {
            a[c] = U(rng);
            b[c] = U(rng);
        }
        const double s = U(rng);
        EXPECT_NEAR(l1_norm(s * a), std::abs(s) * l1_norm(a), 1e-12);
        EXPECT_NEAR(linf_norm(s * a), std::abs(s) * linf_norm(a), 1e-12);
        EXPECT_LE(l1_norm(a + b), l1_norm(a) + l1_norm(b) + 1e-12);
        EXPECT_LE(linf_norm(a + b), linf_norm(a) + linf_norm(b) + 1e-12);
        EXPECT_NEAR(total_variation(a + Field(g, s)), total_variation(a), 1e-12);
        EXPECT_EQ(total_variation(Field(g, s)), 0.0);
    }
}
