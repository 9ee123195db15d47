// A priori and stability estimates evaluated on discrete runs.
//
// Every check compares a measured left side with the estimate's right side
// at each stored time and keeps the worst time. Time integrals are left
// endpoint sums over the stored steps, matching how coefficients are frozen.
#pragma once

#include "hypar/hyperbolic.hpp"
#include "hypar/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace hypar {

inline constexpr double kSingleRunTolerance = 1e-10;
inline constexpr double kPairedRunTolerance = 1e-8;

struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool pass = true;
    double tolerance = 0.0;
    /// Time at which the ratio is largest.
    double time = 0.0;
};

inline double bound_ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? std::numeric_limits<double>::max() : 0.0;
}

inline BoundReport make_report(std::string name, double lhs, double rhs, double tolerance, double time) {
    const double r = bound_ratio(lhs, rhs);
    return {std::move(name), lhs, rhs, r, r <= 1.0 + tolerance, tolerance, time};
}

inline bool all_pass(const std::vector<BoundReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.pass; });
}

namespace detail {

/// Keeps whichever of two reports has the larger ratio.
inline void keep_worst(BoundReport& worst, const BoundReport& candidate, bool first) {
    if (first || candidate.ratio > worst.ratio) worst = candidate;
}

inline void require_history(std::size_t nodes, std::size_t steps, const char* what) {
    if (nodes == 0 || nodes != steps + 1)
        throw InvalidConfiguration(std::string(what) + ": trajectory and step history do not match");
}

inline void require_same_nodes(const Trajectory& a, const Trajectory& b) {
    if (a.times != b.times) throw InvalidConfiguration("paired runs must share their time nodes");
}

} // namespace detail

/// L1 and L-infinity a priori bounds for transport:
///   |u(t)|_1   <= (|u0|_1 + int |a|_1) exp(int |A|_inf)
///   |u(t)|_inf <= (|u0|_inf + int |a|_inf) exp(int |A|_inf + |div c|_inf)
inline std::vector<BoundReport> check_hyperbolic_bounds(const Trajectory& u,
                                                        const std::vector<TransportStepRecord>& history,
                                                        double tolerance = kSingleRunTolerance) {
    detail::require_history(u.size(), history.size(), "transport bounds");
    BoundReport l1{"transport_l1"}, linf{"transport_linf"};
    const double u0_l1 = l1_norm(u.front());
    const double u0_linf = linf_norm(u.front());
    double a_l1 = 0.0, a_linf = 0.0, growth = 0.0, spread = 0.0;
    for (std::size_t m = 0; m < u.size(); ++m) {
        if (m > 0) {
            const TransportStepRecord& r = history[m - 1];
            a_l1 += r.dt * r.a_l1;
            a_linf += r.dt * r.a_linf;
            growth += r.dt * r.A_linf;
            spread += r.dt * r.div_c_linf;
        }
        const double t = u.times[m];
        detail::keep_worst(l1, make_report("transport_l1", l1_norm(u.fields[m]), (u0_l1 + a_l1) * std::exp(growth),
                                           tolerance, t), m == 0);
        detail::keep_worst(linf,
                           make_report("transport_linf", linf_norm(u.fields[m]),
                                       (u0_linf + a_linf) * std::exp(growth + spread), tolerance, t),
                           m == 0);
    }
    return {l1, linf};
}

/// Single-run diffusion bounds with K = 1:
///   |w(t)|_1 <= (|w0|_1 + int |b|_1) exp(int |B|_inf)
///   mu int_0^t |grad w|_1 <= int |B|_inf sup_s |w(s)|_1 + int |b|_1 + |w0|_1
/// The gradient mass uses face jumps of the implicit end-of-step states.
inline std::vector<BoundReport> check_parabolic_bounds(const Trajectory& w,
                                                       const std::vector<DiffusionStepRecord>& history,
                                                       double mu, double tolerance = kSingleRunTolerance) {
    detail::require_history(w.size(), history.size(), "diffusion bounds");
    if (!(mu > 0.0)) throw InvalidConfiguration("diffusivity mu must be positive");
    BoundReport l1{"diffusion_l1"}, grad{"diffusion_gradient"};
    const double w0 = l1_norm(w.front());
    double b_int = 0.0, B_int = 0.0, grad_mass = 0.0, w_sup = w0;
    for (std::size_t m = 0; m < w.size(); ++m) {
        const double wm = l1_norm(w.fields[m]);
        w_sup = std::max(w_sup, wm);
        if (m > 0) {
            const DiffusionStepRecord& r = history[m - 1];
            b_int += r.dt * r.b_l1;
            B_int += r.dt * r.B_linf;
            grad_mass += r.dt * total_variation(w.fields[m]);
        }
        const double t = w.times[m];
        detail::keep_worst(l1, make_report("diffusion_l1", wm, (w0 + b_int) * std::exp(B_int), tolerance, t), m == 0);
        detail::keep_worst(grad, make_report("diffusion_gradient", mu * grad_mass, B_int * w_sup + b_int + w0,
                                             tolerance, t),
                           m == 0);
    }
    return {l1, grad};
}

/// Two runs that differ only in the initial datum:
///   |z1(t) - z2(t)|_1 <= |z1(0) - z2(0)|_1 exp(int rate)
/// where `rates[n]` is the sup norm of the linear rate (A or B) on step n.
inline BoundReport check_datum_stability(std::string name, const Trajectory& r1, const Trajectory& r2,
                                         const std::vector<double>& dts, const std::vector<double>& rates,
                                         double tolerance = kPairedRunTolerance) {
    detail::require_same_nodes(r1, r2);
    detail::require_history(r1.size(), rates.size(), "datum stability");
    BoundReport worst{name};
    const double d0 = l1_distance(r1.front(), r2.front());
    double E = 0.0;
    for (std::size_t m = 0; m < r1.size(); ++m) {
        if (m > 0) E += dts[m - 1] * rates[m - 1];
        detail::keep_worst(worst, make_report(name, l1_distance(r1.fields[m], r2.fields[m]), d0 * std::exp(E),
                                              tolerance, r1.times[m]),
                           m == 0);
    }
    return worst;
}

/// Two runs that differ only in the source term:
///   |z1(t) - z2(t)|_1 <= exp(int rate) int |s1 - s2|_1
inline BoundReport check_source_stability(std::string name, const Trajectory& r1, const Trajectory& r2,
                                          const std::vector<double>& dts, const std::vector<double>& rates,
                                          const std::vector<double>& source_gap_l1,
                                          double tolerance = kPairedRunTolerance) {
    detail::require_same_nodes(r1, r2);
    detail::require_history(r1.size(), rates.size(), "source stability");
    BoundReport worst{name};
    double E = 0.0, gap = 0.0;
    for (std::size_t m = 0; m < r1.size(); ++m) {
        if (m > 0) {
            E += dts[m - 1] * rates[m - 1];
            gap += dts[m - 1] * source_gap_l1[m - 1];
        }
        detail::keep_worst(worst, make_report(name, l1_distance(r1.fields[m], r2.fields[m]), std::exp(E) * gap,
                                              tolerance, r1.times[m]),
                           m == 0);
    }
    return worst;
}

namespace detail {

inline std::vector<double> diffusion_dts(const DiffusionRun& r) {
    std::vector<double> out;
    for (const auto& h : r.history) out.push_back(h.dt);
    return out;
}
inline std::vector<double> diffusion_rates(const DiffusionRun& r) {
    std::vector<double> out;
    for (const auto& h : r.history) out.push_back(h.B_linf);
    return out;
}
inline std::vector<double> transport_dts(const TransportRun& r) {
    std::vector<double> out;
    for (const auto& h : r.history) out.push_back(h.dt);
    return out;
}
inline std::vector<double> transport_rates(const TransportRun& r) {
    std::vector<double> out;
    for (const auto& h : r.history) out.push_back(h.A_linf);
    return out;
}

inline void require_coefficients(std::size_t kept, std::size_t steps) {
    if (kept != steps) throw InvalidConfiguration("paired-run check needs runs with kept coefficients");
}

} // namespace detail

inline BoundReport check_diffusion_datum_stability(const DiffusionRun& r1, const DiffusionRun& r2,
                                                   double tolerance = kPairedRunTolerance) {
    return check_datum_stability("diffusion_datum_stability", r1.trajectory, r2.trajectory, detail::diffusion_dts(r1),
                                 detail::diffusion_rates(r1), tolerance);
}

inline BoundReport check_diffusion_source_stability(const DiffusionRun& r1, const DiffusionRun& r2,
                                                    double tolerance = kPairedRunTolerance) {
    detail::require_coefficients(r1.coefficients.size(), r1.history.size());
    detail::require_coefficients(r2.coefficients.size(), r1.history.size());
    std::vector<double> gap;
    for (std::size_t n = 0; n < r1.coefficients.size(); ++n)
        gap.push_back(l1_distance(r1.coefficients[n].b, r2.coefficients[n].b));
    return check_source_stability("diffusion_source_stability", r1.trajectory, r2.trajectory,
                                  detail::diffusion_dts(r1), detail::diffusion_rates(r1), gap, tolerance);
}

/// Two diffusion runs that differ only in B, with K = 1:
///   |w1 - w2|_1 <= exp(int |B1|_inf + |B2|_inf) (|w0|_1 + int |b|_1) int |B1 - B2|_inf
inline BoundReport check_diffusion_reaction_stability(const DiffusionRun& r1, const DiffusionRun& r2,
                                                      double tolerance = kPairedRunTolerance) {
    detail::require_same_nodes(r1.trajectory, r2.trajectory);
    detail::require_coefficients(r1.coefficients.size(), r1.history.size());
    detail::require_coefficients(r2.coefficients.size(), r1.history.size());
    const std::string name = "diffusion_reaction_stability";
    BoundReport worst{name};
    const double w0 = l1_norm(r1.trajectory.front());
    double E = 0.0, b_int = 0.0, gap = 0.0;
    for (std::size_t m = 0; m < r1.trajectory.size(); ++m) {
        if (m > 0) {
            const auto& k1 = r1.coefficients[m - 1];
            const auto& k2 = r2.coefficients[m - 1];
            const double dt = r1.history[m - 1].dt;
            E += dt * (linf_norm(k1.B) + linf_norm(k2.B));
            b_int += dt * l1_norm(k1.b);
            gap += dt * linf_norm(k1.B - k2.B);
        }
        const double lhs = l1_distance(r1.trajectory.fields[m], r2.trajectory.fields[m]);
        detail::keep_worst(worst, make_report(name, lhs, std::exp(E) * (w0 + b_int) * gap, tolerance,
                                              r1.trajectory.times[m]),
                           m == 0);
    }
    return worst;
}

inline BoundReport check_transport_datum_stability(const TransportRun& r1, const TransportRun& r2,
                                                   double tolerance = kPairedRunTolerance) {
    return check_datum_stability("transport_datum_stability", r1.trajectory, r2.trajectory, detail::transport_dts(r1),
                                 detail::transport_rates(r1), tolerance);
}

/// Two transport runs sharing u0 and c but with different (A, a):
///   |u1 - u2|_1 <= exp(max(int |A1|, int |A2|)) (|u0|_1 + int |a1|_inf) int |A1 - A2|_inf
///                  + exp(int |A2|_inf) int |a1 - a2|_1
/// The first term needs |Omega| <= 1 (|a|_1 <= |a|_inf) and holds exactly
/// for time-independent rates.
inline BoundReport check_transport_source_stability(const TransportRun& r1, const TransportRun& r2,
                                                    double tolerance = kPairedRunTolerance) {
    detail::require_same_nodes(r1.trajectory, r2.trajectory);
    detail::require_coefficients(r1.coefficients.size(), r1.history.size());
    detail::require_coefficients(r2.coefficients.size(), r1.history.size());
    const std::string name = "transport_source_stability";
    BoundReport worst{name};
    const double u0 = l1_norm(r1.trajectory.front());
    double E1 = 0.0, E2 = 0.0, a1_int = 0.0, A_gap = 0.0, a_gap = 0.0;
    for (std::size_t m = 0; m < r1.trajectory.size(); ++m) {
        if (m > 0) {
            const auto& k1 = r1.coefficients[m - 1];
            const auto& k2 = r2.coefficients[m - 1];
            const double dt = r1.history[m - 1].dt;
            E1 += dt * linf_norm(k1.A);
            E2 += dt * linf_norm(k2.A);
            a1_int += dt * linf_norm(k1.a);
            A_gap += dt * linf_norm(k1.A - k2.A);
            a_gap += dt * l1_distance(k1.a, k2.a);
        }
        const double rhs = std::exp(std::max(E1, E2)) * (u0 + a1_int) * A_gap + std::exp(E2) * a_gap;
        const double lhs = l1_distance(r1.trajectory.fields[m], r2.trajectory.fields[m]);
        detail::keep_worst(worst, make_report(name, lhs, rhs, tolerance, r1.trajectory.times[m]), m == 0);
    }
    return worst;
}

/// Nonnegativity monitor: passes when no cell of any stored state is below -floor.
inline BoundReport check_positivity(std::string name, const Trajectory& z, double floor = 1e-12) {
    double worst = 0.0, when = z.empty() ? 0.0 : z.start_time();
    for (std::size_t m = 0; m < z.size(); ++m) {
        const double dip = std::max(0.0, -z.fields[m].min());
        if (dip > worst) {
            worst = dip;
            when = z.times[m];
        }
    }
    return make_report(std::move(name), worst, floor, 0.0, when);
}

} // namespace hypar
