// Matrix-free Krylov solvers with a Jacobi preconditioner.
//
// Convergence is measured in the l1 norm, ||r||_1 <= tol * ||rhs||_1, which
// is the norm the L1 a priori estimates are stated in.
#pragma once

#include "hypar/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hypar {

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

} // namespace detail

/// Preconditioned conjugate gradients for symmetric positive definite operators.
/// `apply(x, y)` computes y = A x. `x` holds the initial guess on entry.
template <class Apply>
SolveStats solve_cg(Apply&& apply, std::span<const double> diagonal, std::span<const double> rhs,
                    std::span<double> x, double tol, int max_iterations) {
    const std::size_t n = rhs.size();
    const double rhs_norm = detail::norm1(rhs);
    if (rhs_norm == 0.0) {
        for (double& v : x) v = 0.0;
        return {};
    }
    std::vector<double> r(n), z(n), p(n), q(n);
    apply(std::span<const double>(x), std::span<double>(q));
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
    double res = detail::norm1(r) / rhs_norm;
    if (res <= tol) return {0, res};
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diagonal[i];
    p = z;
    double rz = detail::dot(r, z);
    for (int it = 1; it <= max_iterations; ++it) {
        apply(std::span<const double>(p), std::span<double>(q));
        const double pq = detail::dot(p, q);
        if (!(pq > 0.0)) throw LinearSolverError("conjugate gradients: operator is not positive definite");
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res = detail::norm1(r) / rhs_norm;
        if (res <= tol) return {it, res};
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diagonal[i];
        const double rz_new = detail::dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw LinearSolverError("conjugate gradients did not reach relative residual " +
                            std::to_string(tol) + " in " + std::to_string(max_iterations) +
                            " iterations (reached " + std::to_string(res) + ")");
}

/// Jacobi-preconditioned BiCGStab for general nonsingular operators.
template <class Apply>
SolveStats solve_bicgstab(Apply&& apply, std::span<const double> diagonal, std::span<const double> rhs,
                          std::span<double> x, double tol, int max_iterations) {
    const std::size_t n = rhs.size();
    const double rhs_norm = detail::norm1(rhs);
    if (rhs_norm == 0.0) {
        for (double& v : x) v = 0.0;
        return {};
    }
    std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), y(n), zs(n);
    apply(std::span<const double>(x), std::span<double>(v));
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - v[i];
    double res = detail::norm1(r) / rhs_norm;
    if (res <= tol) return {0, res};
    r_hat = r;
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        const double rho_new = detail::dot(r_hat, r);
        if (rho_new == 0.0) throw LinearSolverError("BiCGStab breakdown (rho = 0)");
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        for (std::size_t i = 0; i < n; ++i) y[i] = p[i] / diagonal[i];
        apply(std::span<const double>(y), std::span<double>(v));
        alpha = rho / detail::dot(r_hat, v);
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (detail::norm1(s) / rhs_norm <= tol) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i];
            return {it, detail::norm1(s) / rhs_norm};
        }
        for (std::size_t i = 0; i < n; ++i) zs[i] = s[i] / diagonal[i];
        apply(std::span<const double>(zs), std::span<double>(t));
        const double tt = detail::dot(t, t);
        omega = tt > 0.0 ? detail::dot(t, s) / tt : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * y[i] + omega * zs[i];
            r[i] = s[i] - omega * t[i];
        }
        res = detail::norm1(r) / rhs_norm;
        if (res <= tol) return {it, res};
        if (omega == 0.0) throw LinearSolverError("BiCGStab breakdown (omega = 0)");
    }
    throw LinearSolverError("BiCGStab did not reach relative residual " + std::to_string(tol) +
                            " in " + std::to_string(max_iterations) + " iterations");
}

} // namespace hypar
