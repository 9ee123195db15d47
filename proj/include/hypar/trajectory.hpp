// Time series of fields with piecewise-linear interpolation in time.
#pragma once

#include "hypar/error.hpp"
#include "hypar/geometry.hpp"

#include <algorithm>
#include <vector>

namespace hypar {

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> fields;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }

    void push(double t, Field f) {
        times.push_back(t);
        fields.push_back(std::move(f));
    }

    const Field& front() const { return fields.front(); }
    const Field& back() const { return fields.back(); }
    double start_time() const { return times.front(); }
    double end_time() const { return times.back(); }

    /// Linear interpolation between stored times; clamps outside the stored range.
    /// Returns the stored field exactly at a node.
    Field at(double t) const {
        if (empty()) throw Error("interpolating an empty trajectory");
        if (t <= times.front()) return fields.front();
        if (t >= times.back()) return fields.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto k = static_cast<std::size_t>(it - times.begin());
        const double t0 = times[k - 1];
        const double t1 = times[k];
        if (t == t0) return fields[k - 1];
        const double theta = (t - t0) / (t1 - t0);
        Field out = fields[k - 1];
        const Field& next = fields[k];
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += theta * (next[c] - out[c]);
        return out;
    }
};

/// max over shared time indices of the L1 distance; both trajectories must
/// use the same time nodes.
inline double sup_l1_distance(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw Error("trajectories have different lengths");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, l1_distance(a.fields[k], b.fields[k]));
    return worst;
}

} // namespace hypar
