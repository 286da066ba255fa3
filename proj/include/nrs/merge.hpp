// Copyright 2026 The nrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NRS_MERGE_HPP
#define NRS_MERGE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "motion.hpp"
#include "sampling.hpp"

namespace nrs {

enum class WeightScheme { equal, linear_decreasing };

/// Per-distance weights w_1..w_K for projected pixels.
struct WeightSchedule {
    WeightScheme scheme = WeightScheme::equal;
    std::vector<double> weights; ///< weights[k-1] = w_k

    int support() const noexcept { return static_cast<int>(weights.size()); }
    double weight(int k) const
    {
        if (k < 1 || k > support())
            throw ParameterError("no weight for temporal distance " + std::to_string(k));
        return weights[static_cast<std::size_t>(k - 1)];
    }
};

inline WeightSchedule make_schedule(int support, WeightScheme scheme)
{
    if (support < 1)
        throw ParameterError("weight schedule needs K >= 1");
    WeightSchedule s{scheme, std::vector<double>(static_cast<std::size_t>(support), 1.0)};
    if (scheme == WeightScheme::linear_decreasing)
        for (int k = 1; k <= support; ++k)
            s.weights[static_cast<std::size_t>(k - 1)] = static_cast<double>(support - k + 1) / support;
    return s;
}

inline WeightScheme parse_weight_scheme(const std::string& s)
{
    if (s == "equal")
        return WeightScheme::equal;
    if (s == "linear" || s == "linear_decreasing")
        return WeightScheme::linear_decreasing;
    throw ParameterError("unknown weighting scheme '" + s + "' (expected equal|linear)");
}

enum class MergeClass : std::uint8_t { missing = 0, projected = 1, acquired = 2 };

/// Current frame densified with projected pixels.
struct MergedFrame {
    Frame values;
    Grid<MergeClass> classes;
    Grid<std::uint8_t> contributor_count;

    /// Class grid for the final reconstruction: projected pixels enter as reconstructed samples.
    ClassGrid fsr_classes() const
    {
        ClassGrid c(values.width(), values.height(), PixelClass::missing);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (classes[i] == MergeClass::acquired)
                c[i] = PixelClass::acquired;
            else if (classes[i] == MergeClass::projected)
                c[i] = PixelClass::reconstructed;
        }
        return c;
    }

    std::size_t count(MergeClass which) const
    {
        return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), which));
    }
};

namespace detail {

inline MergedFrame start_merge(const SampledFrame& current, const std::vector<ProjectedFrame>& projections)
{
    if (!current.mask || !current.mask->same_shape(current.frame))
        throw DimensionError("merge: frame and mask dimensions differ");
    for (const auto& p : projections) {
        require_same_shape(current.frame, p.values, "merge");
        require_same_shape(current.frame, p.valid, "merge");
    }
    const int w = current.frame.width();
    const int h = current.frame.height();
    MergedFrame out{Frame(w, h, 0.0), Grid<MergeClass>(w, h, MergeClass::missing), Grid<std::uint8_t>(w, h, 0)};
    for (int m = 0; m < h; ++m)
        for (int n = 0; n < w; ++n)
            if (current.mask->acquired(m, n)) {
                out.values(m, n) = current.frame(m, n);
                out.classes(m, n) = MergeClass::acquired;
            }
    return out;
}

} // namespace detail

/// Weighted merge of projected pixels into the missing positions of `current`.
///
/// Acquired positions keep the current value. A missing position receives
/// sum(w_k * f~_k) / sum(w_k) over the projections valid there; the denominator runs
/// over those contributors only, or over the full schedule when `literal_denominator`
/// is set. Contributions are summed in ascending k, so the list order does not matter.
inline MergedFrame merge_frames(const SampledFrame& current, const std::vector<ProjectedFrame>& projections,
                                const WeightSchedule& schedule, bool literal_denominator = false)
{
    MergedFrame out = detail::start_merge(current, projections);
    if (projections.size() > static_cast<std::size_t>(schedule.support()))
        throw ParameterError("merge_frames: more projections than support frames in the schedule");

    std::vector<std::size_t> order(projections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return projections[a].k < projections[b].k; });
    std::vector<double> weight(projections.size());
    for (std::size_t i = 0; i < projections.size(); ++i)
        weight[i] = schedule.weight(projections[i].k);
    const double full_sum = std::accumulate(schedule.weights.begin(), schedule.weights.end(), 0.0);

    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.classes[i] == MergeClass::acquired)
            continue;
        double num = 0.0;
        double den = 0.0;
        int contributors = 0;
        for (std::size_t j : order) {
            const auto& p = projections[j];
            if (!p.valid[i])
                continue;
            num += weight[j] * p.values[i];
            den += weight[j];
            ++contributors;
        }
        if (contributors == 0)
            continue;
        out.values[i] = num / (literal_denominator ? full_sum : den);
        out.classes[i] = MergeClass::projected;
        out.contributor_count[i] = static_cast<std::uint8_t>(std::min(contributors, 255));
    }
    return out;
}

/// Nearest-frame merge: at each missing position the valid projection with the smallest
/// k wins; on equal k a preceding frame (direction < 0) beats a succeeding one.
inline MergedFrame merge_nearest(const SampledFrame& current, const std::vector<ProjectedFrame>& projections)
{
    MergedFrame out = detail::start_merge(current, projections);
    std::vector<std::size_t> order(projections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (projections[a].k != projections[b].k)
            return projections[a].k < projections[b].k;
        return projections[a].direction < projections[b].direction;
    });
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (out.classes[i] == MergeClass::acquired)
            continue;
        int contributors = 0;
        for (std::size_t j : order) {
            if (!projections[j].valid[i])
                continue;
            if (contributors == 0)
                out.values[i] = projections[j].values[i];
            ++contributors;
        }
        if (contributors == 0)
            continue;
        out.classes[i] = MergeClass::projected;
        out.contributor_count[i] = static_cast<std::uint8_t>(std::min(contributors, 255));
    }
    return out;
}

/// Binary PGM of the class grid: 0 = missing, 128 = projected, 255 = acquired.
inline void write_class_pgm(std::ostream& os, const MergedFrame& merged)
{
    os << "P5\n" << merged.classes.width() << ' ' << merged.classes.height() << "\n255\n";
    for (auto c : merged.classes) {
        const unsigned char v = c == MergeClass::acquired ? 255 : (c == MergeClass::projected ? 128 : 0);
        os.put(static_cast<char>(v));
    }
}

} // namespace nrs

#endif
