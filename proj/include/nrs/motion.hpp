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

#ifndef NRS_MOTION_HPP
#define NRS_MOTION_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace nrs {

struct MeParams {
    int window = 17;       ///< odd side length of the matching window
    int search_range = 16; ///< max |dm| and |dn|
    int min_overlap = 16;  ///< jointly valid pixels needed to accept a candidate

    void validate() const
    {
        if (window < 3 || window % 2 == 0)
            throw ParameterError("ME window must be odd and >= 3");
        if (search_range < 0)
            throw ParameterError("ME search range must be >= 0");
        if (min_overlap < 1)
            throw ParameterError("ME min_overlap must be >= 1");
    }
};

/// Per-pixel displacement from the current frame into the reference:
/// current(m, n) is matched with reference(m + dm, n + dn).
struct MotionField {
    Grid<std::int16_t> dm;
    Grid<std::int16_t> dn;
    Grid<std::uint8_t> valid;
    Grid<float> cost; ///< mean absolute difference of the winner; +inf where invalid

    MotionField() = default;
    MotionField(int width, int height)
        : dm(width, height, 0), dn(width, height, 0), valid(width, height, 0),
          cost(width, height, std::numeric_limits<float>::infinity())
    {
    }
    int width() const noexcept { return valid.width(); }
    int height() const noexcept { return valid.height(); }
};

/// Values plus a per-pixel validity flag.
struct MaskedPatch {
    Grid<double> values;
    Grid<std::uint8_t> valid;
};

/// Mean absolute difference over positions valid in both patches, or +inf when fewer
/// than `min_overlap` positions are jointly valid.
inline double matching_cost(const MaskedPatch& cur, const MaskedPatch& ref, int min_overlap = 1)
{
    require_same_shape(cur.values, ref.values, "matching_cost");
    require_same_shape(cur.values, cur.valid, "matching_cost");
    require_same_shape(ref.values, ref.valid, "matching_cost");
    double sum = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < cur.values.size(); ++i) {
        if (cur.valid[i] && ref.valid[i]) {
            sum += std::abs(cur.values[i] - ref.values[i]);
            ++count;
        }
    }
    if (count < std::max(min_overlap, 1))
        return std::numeric_limits<double>::infinity();
    return sum / static_cast<double>(count);
}

/// Frame with optional validity; a null mask means every pixel is valid.
struct MaskedFrameRef {
    const Frame& values;
    const Mask* mask = nullptr;
    bool valid(int m, int n) const noexcept { return !mask || mask->acquired(m, n); }
};

namespace detail {

/// Absolute differences are accumulated in 16.16 fixed point, so window sums are exact
/// integers and cost comparisons (cross-multiplied in 128 bits) are exact.
inline constexpr double cost_scale = 65536.0;

struct MotionCandidate {
    std::int64_t sum = 0;
    std::int32_t count = 0; ///< 0 marks "no candidate yet"
    std::int16_t dm = 0;
    std::int16_t dn = 0;
    bool inside = false; ///< displaced centre lies inside the reference
};

/// Strict total order: lower mean cost, then smaller |dm|+|dn|, then smaller dn, then smaller dm.
inline bool better(const MotionCandidate& a, const MotionCandidate& b) noexcept
{
    if (b.count == 0)
        return a.count != 0;
    if (a.count == 0)
        return false;
    __extension__ using wide = __int128;
    const wide lhs = static_cast<wide>(a.sum) * b.count;
    const wide rhs = static_cast<wide>(b.sum) * a.count;
    if (lhs != rhs)
        return lhs < rhs;
    const int la = std::abs(a.dm) + std::abs(a.dn);
    const int lb = std::abs(b.dm) + std::abs(b.dn);
    if (la != lb)
        return la < lb;
    if (a.dn != b.dn)
        return a.dn < b.dn;
    return a.dm < b.dm;
}

/// Sliding box sum of half-width r along each row (positions outside the row contribute 0).
template <class T>
void box_rows(const std::vector<T>& in, std::vector<T>& out, int width, int height, int r)
{
    for (int m = 0; m < height; ++m) {
        const T* src = in.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(width);
        T* dst = out.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(width);
        T acc = 0;
        for (int j = 0; j <= std::min(r, width - 1); ++j)
            acc += src[j];
        for (int n = 0; n < width; ++n) {
            dst[n] = acc;
            if (n + r + 1 < width)
                acc += src[n + r + 1];
            if (n - r >= 0)
                acc -= src[n - r];
        }
    }
}

template <class T>
void box_cols(const std::vector<T>& in, std::vector<T>& out, int width, int height, int r)
{
    const auto w = static_cast<std::size_t>(width);
    std::vector<T> acc(w, 0);
    for (int i = 0; i <= std::min(r, height - 1); ++i)
        for (std::size_t n = 0; n < w; ++n)
            acc[n] += in[static_cast<std::size_t>(i) * w + n];
    for (int m = 0; m < height; ++m) {
        T* dst = out.data() + static_cast<std::size_t>(m) * w;
        for (std::size_t n = 0; n < w; ++n)
            dst[n] = acc[n];
        if (m + r + 1 < height) {
            const T* add = in.data() + static_cast<std::size_t>(m + r + 1) * w;
            for (std::size_t n = 0; n < w; ++n)
                acc[n] += add[n];
        }
        if (m - r >= 0) {
            const T* sub = in.data() + static_cast<std::size_t>(m - r) * w;
            for (std::size_t n = 0; n < w; ++n)
                acc[n] -= sub[n];
        }
    }
}

} // namespace detail

/// Exhaustive dense block matching. For every current-frame pixel, the window centred
/// there is compared with the reference window displaced by each of the
/// (2*search_range+1)^2 integer candidates. Positions invalid on either side (masked
/// out or outside the frame) are ignored and candidates with fewer than min_overlap
/// jointly valid pixels are rejected. Candidates whose displaced centre leaves the
/// reference still compete; when one of them wins, the content has no counterpart in
/// the reference and the pixel is marked invalid. The result is independent of `threads`.
inline MotionField estimate_dense_motion(MaskedFrameRef current, MaskedFrameRef reference, const MeParams& params,
                                         int threads = 1)
{
    params.validate();
    require_same_shape(current.values, reference.values, "estimate_dense_motion");
    if (current.mask && !current.mask->same_shape(current.values))
        throw DimensionError("estimate_dense_motion: current mask dimensions differ");
    if (reference.mask && !reference.mask->same_shape(reference.values))
        throw DimensionError("estimate_dense_motion: reference mask dimensions differ");

    const int width = current.values.width();
    const int height = current.values.height();
    const auto pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const int r = params.window / 2;
    const int sr = params.search_range;
    const int side = 2 * sr + 1;
    const std::size_t candidates = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);

    std::vector<std::uint8_t> cur_valid(pixels), ref_valid(pixels);
    for (int m = 0; m < height; ++m)
        for (int n = 0; n < width; ++n) {
            const auto i = static_cast<std::size_t>(m) * static_cast<std::size_t>(width) + static_cast<std::size_t>(n);
            cur_valid[i] = current.valid(m, n) ? 1 : 0;
            ref_valid[i] = reference.valid(m, n) ? 1 : 0;
        }

    const std::size_t workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(candidates))));
    std::vector<std::vector<detail::MotionCandidate>> best(workers, std::vector<detail::MotionCandidate>(pixels));

    parallel_for(workers, static_cast<int>(workers), [&](std::size_t worker) {
        std::vector<std::int64_t> diff(pixels), tmp64(pixels), sum(pixels);
        std::vector<std::int32_t> cnt(pixels), tmp32(pixels), overlap(pixels);
        auto& mine = best[worker];
        for (std::size_t cand = worker; cand < candidates; cand += workers) {
            const int dm = static_cast<int>(cand / static_cast<std::size_t>(side)) - sr;
            const int dn = static_cast<int>(cand % static_cast<std::size_t>(side)) - sr;
            for (int m = 0; m < height; ++m) {
                const auto row = static_cast<std::size_t>(m) * static_cast<std::size_t>(width);
                const int rm = m + dm;
                for (int n = 0; n < width; ++n) {
                    const int rn = n + dn;
                    std::int64_t d = 0;
                    std::int32_t c = 0;
                    if (rm >= 0 && rm < height && rn >= 0 && rn < width && cur_valid[row + static_cast<std::size_t>(n)]) {
                        const auto ri = static_cast<std::size_t>(rm) * static_cast<std::size_t>(width) +
                                        static_cast<std::size_t>(rn);
                        if (ref_valid[ri]) {
                            d = std::llround(std::abs(current.values[row + static_cast<std::size_t>(n)] -
                                                      reference.values[ri]) *
                                             detail::cost_scale);
                            c = 1;
                        }
                    }
                    diff[row + static_cast<std::size_t>(n)] = d;
                    cnt[row + static_cast<std::size_t>(n)] = c;
                }
            }
            detail::box_rows(diff, tmp64, width, height, r);
            detail::box_cols(tmp64, sum, width, height, r);
            detail::box_rows(cnt, tmp32, width, height, r);
            detail::box_cols(tmp32, overlap, width, height, r);

            for (int m = 0; m < height; ++m) {
                const auto row = static_cast<std::size_t>(m) * static_cast<std::size_t>(width);
                const bool row_inside = m + dm >= 0 && m + dm < height;
                for (int n = 0; n < width; ++n) {
                    const std::size_t i = row + static_cast<std::size_t>(n);
                    if (overlap[i] < params.min_overlap)
                        continue;
                    const bool inside = row_inside && n + dn >= 0 && n + dn < width;
                    const detail::MotionCandidate c{sum[i], overlap[i], static_cast<std::int16_t>(dm),
                                                    static_cast<std::int16_t>(dn), inside};
                    if (detail::better(c, mine[i]))
                        mine[i] = c;
                }
            }
        }
    });

    MotionField field(width, height);
    for (std::size_t i = 0; i < pixels; ++i) {
        detail::MotionCandidate winner = best[0][i];
        for (std::size_t w = 1; w < workers; ++w)
            if (detail::better(best[w][i], winner))
                winner = best[w][i];
        if (winner.count == 0 || !winner.inside)
            continue;
        field.dm[i] = winner.dm;
        field.dn[i] = winner.dn;
        field.valid[i] = 1;
        field.cost[i] = static_cast<float>(static_cast<double>(winner.sum) / detail::cost_scale / winner.count);
    }
    return field;
}

inline MotionField estimate_dense_motion(const SampledFrame& current, const Frame& reference, const MeParams& params,
                                         int threads = 1)
{
    return estimate_dense_motion(MaskedFrameRef{current.frame, current.mask.get()}, MaskedFrameRef{reference},
                                 params, threads);
}

inline MotionField estimate_dense_motion(const Frame& current, const Frame& reference, const MeParams& params,
                                         int threads = 1)
{
    return estimate_dense_motion(MaskedFrameRef{current}, MaskedFrameRef{reference}, params, threads);
}

/// Motion-compensated reference f~_{t-k}: reference pixels gathered into the current
/// frame's coordinate system, with the temporal distance k to the current frame.
struct ProjectedFrame {
    Frame values;
    Grid<std::uint8_t> valid;
    int k = 1;
    int direction = -1; ///< -1: preceding reference, +1: succeeding reference
};

/// Gathers reference(m + dm, n + dn) into (m, n) wherever the field is valid and the
/// referenced pixel is valid in `reference`. Other positions are invalid and hold 0.
inline ProjectedFrame compensate(MaskedFrameRef reference, const MotionField& field, int k = 1, int direction = -1)
{
    require_same_shape(reference.values, field.valid, "compensate");
    if (k < 1)
        throw ParameterError("compensate: temporal distance k must be >= 1");
    const int width = field.width();
    const int height = field.height();
    ProjectedFrame out{Frame(width, height, 0.0), Grid<std::uint8_t>(width, height, 0), k, direction};
    for (int m = 0; m < height; ++m) {
        for (int n = 0; n < width; ++n) {
            if (!field.valid(m, n))
                continue;
            const int rm = m + field.dm(m, n);
            const int rn = n + field.dn(m, n);
            if (!reference.values.contains(rm, rn) || !reference.valid(rm, rn))
                continue;
            assert(reference.valid(rm, rn));
            out.values(m, n) = reference.values(rm, rn);
            out.valid(m, n) = 1;
        }
    }
    return out;
}

// Binary motion field dump, little-endian:
//   "NRSMVF1", uint32 width, uint32 height, then per pixel in raster order
//   int16 dm, int16 dn, uint8 valid, float32 cost.

namespace detail {

template <class T>
void put_le(std::ostream& os, T v)
{
    std::array<unsigned char, sizeof(T)> raw{};
    std::memcpy(raw.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(raw.begin(), raw.end());
    os.write(reinterpret_cast<const char*>(raw.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    std::array<unsigned char, sizeof(T)> raw{};
    if (!is.read(reinterpret_cast<char*>(raw.data()), sizeof(T)))
        throw FormatError("motion field: truncated record");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(raw.begin(), raw.end());
    T v;
    std::memcpy(&v, raw.data(), sizeof(T));
    return v;
}

} // namespace detail

inline void write_motion_field(std::ostream& os, const MotionField& field)
{
    os.write("NRSMVF1", 7);
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.width()));
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.height()));
    for (std::size_t i = 0; i < field.valid.size(); ++i) {
        detail::put_le<std::int16_t>(os, field.dm[i]);
        detail::put_le<std::int16_t>(os, field.dn[i]);
        detail::put_le<std::uint8_t>(os, field.valid[i]);
        detail::put_le<float>(os, field.cost[i]);
    }
    if (!os)
        throw IoError("write_motion_field: stream failure");
}

inline MotionField read_motion_field(std::istream& is)
{
    char magic[7] = {};
    if (!is.read(magic, 7) || std::string(magic, 7) != "NRSMVF1")
        throw FormatError("motion field: missing NRSMVF1 magic");
    const auto width = detail::get_le<std::uint32_t>(is);
    const auto height = detail::get_le<std::uint32_t>(is);
    MotionField field(static_cast<int>(width), static_cast<int>(height));
    for (std::size_t i = 0; i < field.valid.size(); ++i) {
        field.dm[i] = detail::get_le<std::int16_t>(is);
        field.dn[i] = detail::get_le<std::int16_t>(is);
        field.valid[i] = detail::get_le<std::uint8_t>(is);
        field.cost[i] = detail::get_le<float>(is);
    }
    return field;
}

} // namespace nrs

#endif
