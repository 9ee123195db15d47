#include "hypar/parabolic.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace hypar;

namespace {

Field random_field(const GridPtr& g, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    Field f(g);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = U(rng);
    return f;
}

DiffusionOptions quiet(ReactionTreatment r = ReactionTreatment::exponential_fit) {
    DiffusionOptions o;
    o.reaction = r;
    o.warn = nullptr;
    return o;
}

// composite Simpson on [a, b] with n (even) panels
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

} // namespace

TEST(DiffusionStep, ConstantStateIsSteady) {
    auto g = build_grid_2d(1.0, 1.0, 12, 12);
    const Field w(g, 3.0);
    const auto out = diffusion_step(w, DiffusionCoefficients::zero(g, 0.7), 0.05, quiet());
    for (std::size_t c = 0; c < w.size(); ++c) EXPECT_NEAR(out.w[c], 3.0, 3e-10);
}

TEST(DiffusionStep, ConservesMassWithoutReaction) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = trial % 2 ? build_grid_1d(2.0, 64) : build_grid_2d(1.0, 1.5, 16, 20);
        const Field w = random_field(g, rng, 0.0, 1.0);
        const auto out = diffusion_step(w, DiffusionCoefficients::zero(g, 0.3), 0.02, quiet());
        EXPECT_NEAR(mass(out.w), mass(w), 1e-10 * l1_norm(w));
    }
}

TEST(DiffusionStep, CosineModeDecays) {
    // w = cos(pi x) on [0, 1] decays like exp(-mu pi^2 t)
    const double mu = 0.1, T = 0.5;
    double previous = 1.0;
    for (int n : {32, 64, 128}) {
        auto g = build_grid_1d(1.0, n);
        const Field w0 = Field::from_function(g, [](const Point& x) { return std::cos(std::numbers::pi * x[0]); });
        DiffusionConfig cfg;
        cfg.dt = 0.25 / n;
        cfg.options = quiet();
        auto run = simulate_diffusion(w0, [&](double) { return DiffusionCoefficients::zero(g, mu); }, T, cfg);
        const double decay = std::exp(-mu * std::numbers::pi * std::numbers::pi * T);
        double err = 0.0;
        for (std::size_t c = 0; c < w0.size(); ++c)
            err = std::max(err, std::abs(run.trajectory.back()[c] - decay * w0[c]));
        EXPECT_LT(err, 0.6 * previous);
        previous = err;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(DiffusionStep, PositivityWithSignedReaction) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = trial % 2 ? build_grid_1d(1.0, 40) : build_grid_2d(1.0, 1.0, 10, 10);
        DiffusionCoefficients k{0.05, random_field(g, rng, -4.0, 4.0), random_field(g, rng, 0.0, 1.0)};
        Field w = random_field(g, rng, 0.0, 1.0);
        for (int n = 0; n < 5; ++n) {
            w = diffusion_step(w, k, 0.5, quiet()).w;
            ASSERT_GE(w.min(), -1e-12);
        }
    }
}

TEST(DiffusionStep, L1GrowthBoundedByExponential) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = trial % 2 ? build_grid_1d(1.0, 40) : build_grid_2d(1.0, 1.0, 10, 10);
        DiffusionCoefficients k{0.2, random_field(g, rng, -2.0, 2.0), random_field(g, rng, -1.0, 1.0)};
        const Field w = random_field(g, rng, -1.0, 1.0);
        const double dt = 0.1;
        const Field next = diffusion_step(w, k, dt, quiet()).w;
        const double bound = std::exp(dt * linf_norm(k.B)) * (l1_norm(w) + dt * l1_norm(k.b));
        EXPECT_LE(l1_norm(next), bound * (1.0 + 1e-8));
    }
}

TEST(DiffusionStep, LinearTreatmentOvershootsExponential) {
    // uniform B = beta: the linear form grows by 1 / (1 - dt beta) > exp(dt beta)
    auto g = build_grid_1d(1.0, 16);
    const double beta = 2.0, dt = 0.2;
    DiffusionCoefficients k{0.1, Field(g, beta), Field(g)};
    const Field w(g, 1.0);
    const Field lin = diffusion_step(w, k, dt, quiet(ReactionTreatment::linear)).w;
    const Field fit = diffusion_step(w, k, dt, quiet()).w;
    EXPECT_NEAR(lin[5], 1.0 / (1.0 - dt * beta), 1e-9);
    EXPECT_NEAR(fit[5], std::exp(dt * beta), 1e-9);
    EXPECT_GT(l1_norm(lin), std::exp(dt * beta) * l1_norm(w));
}

TEST(DiffusionStep, LinearTreatmentWarnsPastMMatrixLimit) {
    auto g = build_grid_1d(1.0, 8);
    DiffusionCoefficients k{0.1, Field(g, 3.0), Field(g)};
    int warnings = 0;
    DiffusionOptions o;
    o.reaction = ReactionTreatment::linear;
    o.warn = [&](const std::string&) { ++warnings; };
    diffusion_step(Field(g, 1.0), k, 0.5, o);
    EXPECT_EQ(warnings, 1);
    diffusion_step(Field(g, 1.0), k, 0.1, o);
    EXPECT_EQ(warnings, 1);
}

TEST(DiffusionStep, RejectsBadParameters) {
    auto g = build_grid_1d(1.0, 8);
    EXPECT_THROW(diffusion_step(Field(g), DiffusionCoefficients::zero(g, 0.0), 0.1), InvalidConfiguration);
    EXPECT_THROW(diffusion_step(Field(g), DiffusionCoefficients::zero(g, 1.0), 0.0), InvalidConfiguration);
}

TEST(LinearSolver, ReportsNonConvergence) {
    std::vector<double> diag(50, 2.0), rhs(50, 1.0), x(50, 0.0);
    rhs[7] = -3.0;
    auto apply = [](std::span<const double> in, std::span<double> out) {
        for (std::size_t i = 0; i < in.size(); ++i)
            out[i] = 2.0 * in[i] - (i > 0 ? in[i - 1] : 0.0) - (i + 1 < in.size() ? in[i + 1] : 0.0);
    };
    EXPECT_THROW(solve_cg(apply, diag, rhs, x, 1e-14, 2), LinearSolverError);
    std::fill(x.begin(), x.end(), 0.0);
    const auto stats = solve_cg(apply, diag, rhs, x, 1e-12, 500);
    EXPECT_LE(stats.relative_residual, 1e-12);
}

TEST(NeumannKernel, UnitMassOverInterval) {
    // oracle: fine Simpson quadrature of the pointwise kernel
    const NeumannKernel1D k{1.0, 0.5, 20};
    for (double tau : {0.01, 0.1}) {
        for (double x : {0.0, 0.13, 0.5, 0.97}) {
            const double m = simpson([&](double y) { return neumann_kernel_eval(k, tau, x, 0.0, y); }, 0.0, 1.0, 20000);
            EXPECT_NEAR(m, 1.0, 1e-8);
        }
    }
}

TEST(NeumannKernel, Symmetric) {
    const NeumannKernel1D k{1.3, 0.2, 20};
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> U(0.0, 1.3);
    for (int i = 0; i < 50; ++i) {
        const double x = U(rng), y = U(rng);
        EXPECT_NEAR(neumann_kernel_eval(k, 0.3, x, 0.1, y), neumann_kernel_eval(k, 0.3, y, 0.1, x), 1e-12);
    }
}

TEST(NeumannKernel, GaussianEnvelope) {
    // N(t,x,s,y) <= C (1 + (t-s)^{-1/2}) exp(-kappa |x-y|^2 / (t-s)), C = 1, kappa = 1/(8 mu)
    for (double mu : {0.5, 1.0, 2.0}) {
        const NeumannKernel1D k{1.0, mu, 20};
        for (double tau : {1e-4, 1e-3, 0.01, 0.1, 0.5, 3.0}) {
            for (int i = 0; i <= 20; ++i) {
                for (int j = 0; j <= 20; ++j) {
                    const double x = i / 20.0, y = j / 20.0;
                    const double env = (1.0 + 1.0 / std::sqrt(tau)) * std::exp(-(x - y) * (x - y) / (8.0 * mu * tau));
                    const double n = neumann_kernel_eval(k, tau, x, 0.0, y);
                    EXPECT_GE(n, 0.0);
                    EXPECT_LE(n, env);
                }
            }
        }
    }
}

TEST(NeumannKernel, NonPositiveLagRejected) {
    const NeumannKernel1D k{1.0, 1.0, 5};
    EXPECT_THROW(neumann_kernel_eval(k, 0.2, 0.5, 0.2, 0.5), DomainError);
    EXPECT_THROW(neumann_kernel_eval(k, 0.1, 0.5, 0.2, 0.5), DomainError);
    EXPECT_THROW(neumann_kernel_eval(NeumannKernel1D{1.0, 1.0, 0}, 0.2, 0.5, 0.1, 0.5), InvalidConfiguration);
}

TEST(NeumannKernel, CellWeightsMatchQuadrature) {
    const NeumannKernel1D k{1.0, 0.4, 20};
    auto g = build_grid_1d(1.0, 25);
    for (double tau : {0.002, 0.05, 0.8}) {
        const double x = 0.31;
        const auto w = neumann_cell_weights(k, *g, tau, x);
        double total = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double a = j * g->spacing(0);
            const double q =
                simpson([&](double y) { return neumann_kernel_eval(k, tau, x, 0.0, y); }, a, a + g->spacing(0), 2000);
            EXPECT_NEAR(w[j], q, 1e-9);
            total += w[j];
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Representation, CosineWithoutReaction) {
    auto g = build_grid_1d(1.0, 128);
    const double mu = 0.05;
    const Field w0 = Field::from_function(g, [](const Point& x) { return std::cos(std::numbers::pi * x[0]); });
    DiffusionConfig cfg;
    cfg.dt = 1e-3;
    cfg.options = quiet();
    auto run = simulate_diffusion(w0, [&](double) { return DiffusionCoefficients::zero(g, mu); }, 0.2, cfg);
    const FieldProvider zero = [&](double) { return Field(g); };
    const std::vector<std::size_t> probes{0, 17, 64, 100, 127};
    EXPECT_LT(representation_residual(run.trajectory, w0, zero, zero, {1.0, mu, 20}, probes), 5e-3);
}

TEST(Representation, ConstantSourceAddsLinearRamp) {
    // with B = 0 the source term is exactly t b for constant b
    auto g = build_grid_1d(1.0, 64);
    const double mu = 0.2, bval = 0.7;
    const Field w0 = Field::from_function(g, [](const Point& x) { return std::cos(std::numbers::pi * x[0]); });
    auto coeffs = [&](double) { return DiffusionCoefficients{mu, Field(g), Field(g, bval)}; };
    DiffusionConfig cfg;
    cfg.dt = 5e-3;
    cfg.options = quiet();
    const double T = 6.0;
    auto run = simulate_diffusion(w0, coeffs, T, cfg);
    const FieldProvider B = [&](double) { return Field(g); };
    const FieldProvider b = [&](double) { return Field(g, bval); };
    const std::vector<std::size_t> probes{3, 32, 60};
    const auto values = representation_values(run.trajectory, w0, B, b, {1.0, mu, 20}, probes);
    for (std::size_t p = 0; p < probes.size(); ++p) {
        EXPECT_NEAR(values[p], T * bval, 1e-3);  // mean of w0 is zero
        EXPECT_NEAR(values[p], run.trajectory.back()[probes[p]], 2e-3);
    }
}

TEST(Representation, RequiresOneDimension) {
    auto g = build_grid_2d(1.0, 1.0, 4, 4);
    Trajectory t;
    t.push(0.0, Field(g));
    t.push(0.1, Field(g));
    const FieldProvider zero = [&](double) { return Field(g); };
    const std::vector<std::size_t> probes{0};
    EXPECT_THROW(representation_residual(t, Field(g), zero, zero, {}, probes), UnsupportedDimension);
}

TEST(SimulateDiffusion, RecordsHistory) {
    auto g = build_grid_1d(1.0, 10);
    DiffusionConfig cfg;
    cfg.dt = 0.1;
    cfg.options = quiet();
    auto run = simulate_diffusion(Field(g), [&](double) { return DiffusionCoefficients::zero(g, 1.0); }, 1.0, cfg);
    EXPECT_EQ(run.history.size(), 10u);
    EXPECT_EQ(run.trajectory.size(), 11u);
    for (const Field& f : run.trajectory.fields) EXPECT_EQ(linf_norm(f), 0.0);
}
