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

#ifndef NRS_PIPELINE_HPP
#define NRS_PIPELINE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "fsr.hpp"
#include "grid.hpp"
#include "merge.hpp"
#include "motion.hpp"
#include "parallel.hpp"
#include "sampling.hpp"
#include "video_io.hpp"

namespace nrs {

enum class Mode { sf, mf, rmf };

inline std::string to_string(Mode m)
{
    switch (m) {
    case Mode::sf:
        return "sf";
    case Mode::mf:
        return "mf";
    case Mode::rmf:
        return "rmf";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s)
{
    if (s == "sf")
        return Mode::sf;
    if (s == "mf")
        return Mode::mf;
    if (s == "rmf")
        return Mode::rmf;
    throw ParameterError("unknown mode '" + s + "' (expected sf|mf|rmf)");
}

/// Reference set of the bidirectional baseline.
enum class MfWindow {
    symmetric, ///< K preceding and K succeeding frames (up to 2K references)
    total,     ///< K references in total, nearest first, preceding before succeeding
};

inline MfWindow parse_mf_window(const std::string& s)
{
    if (s == "symmetric")
        return MfWindow::symmetric;
    if (s == "total")
        return MfWindow::total;
    throw ParameterError("unknown MF window '" + s + "' (expected symmetric|total)");
}

struct PipelineConfig {
    Mode mode = Mode::rmf;
    int support = 5; ///< K; ignored for sf
    FsrParams fsr;
    MeParams me;
    WeightScheme schedule = WeightScheme::equal;
    bool eq2_literal = false;
    MfWindow mf_window = MfWindow::total;
    int threads = 1;

    /// sf, or multi-frame with K = 0, reconstructs frame by frame.
    Mode effective_mode() const noexcept { return support <= 0 ? Mode::sf : mode; }
};

/// Non-regularly sampled video: every frame shares one fixed mask.
struct SampledVideo {
    std::vector<SampledFrame> frames;

    std::size_t size() const noexcept { return frames.size(); }
    bool empty() const noexcept { return frames.empty(); }
    const Mask& mask() const { return *frames.front().mask; }

    void check() const
    {
        if (frames.empty())
            throw Error("empty video");
        for (const auto& f : frames) {
            if (!f.mask || !f.mask->same_shape(f.frame) || !f.frame.same_shape(frames.front().frame))
                throw DimensionError("sampled video: inconsistent frame or mask dimensions");
            if (f.mask != frames.front().mask && *f.mask != *frames.front().mask)
                throw DimensionError("sampled video: sampling mask changes between frames");
        }
    }
};

inline SampledVideo sample_video(const VideoBuffer& video, std::shared_ptr<const Mask> mask)
{
    SampledVideo out;
    for (const auto& f : video.frames)
        out.frames.push_back(apply_mask(f, mask));
    return out;
}

/// Per-frame bookkeeping of a run.
struct FrameDiagnostics {
    int references = 0;
    std::size_t projected = 0;      ///< missing pixels filled by projection
    std::size_t still_missing = 0;  ///< pixels left to the final FSR
};

struct PipelineResult {
    VideoBuffer video;
    std::vector<FrameDiagnostics> diagnostics;
};

/// Lazily computed motion fields between pre-reconstructed frames, keyed by
/// (current, reference). The fields do not depend on K, so one cache can serve
/// every K of a sweep.
class MotionCache {
public:
    std::shared_ptr<const MotionField> get(int current, int reference, const VideoBuffer& pre, const MeParams& me,
                                           int threads)
    {
        const auto key = std::make_pair(current, reference);
        {
            std::lock_guard lock(mutex_);
            if (auto it = fields_.find(key); it != fields_.end())
                return it->second;
        }
        auto field = std::make_shared<const MotionField>(estimate_dense_motion(
            pre.frames[static_cast<std::size_t>(current)], pre.frames[static_cast<std::size_t>(reference)], me,
            threads));
        std::lock_guard lock(mutex_);
        return fields_.emplace(key, std::move(field)).first->second;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, std::shared_ptr<const MotionField>> fields_;
};

/// Reference frame indices of the bidirectional baseline for frame t, nearest first.
inline std::vector<int> mf_references(int t, int frames, int support, MfWindow window)
{
    std::vector<int> refs;
    const int reach = window == MfWindow::symmetric ? support : frames;
    for (int k = 1; k <= reach; ++k) {
        for (int r : {t - k, t + k}) {
            if (r < 0 || r >= frames)
                continue;
            if (window == MfWindow::total && static_cast<int>(refs.size()) >= support)
                return refs;
            refs.push_back(r);
        }
    }
    return refs;
}

/// Every frame reconstructed on its own.
inline PipelineResult reconstruct_sf(const SampledVideo& video, const PipelineConfig& config)
{
    video.check();
    config.fsr.validate();
    PipelineResult out;
    out.video.frames.resize(video.size());
    out.diagnostics.resize(video.size());
    parallel_for(video.size(), config.threads, [&](std::size_t t) {
        out.video.frames[t] = reconstruct_frame(video.frames[t], config.fsr);
        out.diagnostics[t].still_missing = video.frames[t].frame.size() - video.mask().count_acquired();
    });
    return out;
}

/// Bidirectional baseline: single-frame pre-reconstruction of all frames, motion
/// estimation between pre-reconstructed frames, nearest-frame projection of the
/// references' acquired pixels, final FSR of the merged frame.
///
/// `pre` may supply an existing single-frame reconstruction of `video`; `cache` may
/// supply motion fields shared with other runs over the same pre-reconstruction.
inline PipelineResult reconstruct_mf(const SampledVideo& video, const PipelineConfig& config,
                                     const VideoBuffer* pre = nullptr, MotionCache* cache = nullptr)
{
    if (config.effective_mode() == Mode::sf)
        return reconstruct_sf(video, config);
    video.check();
    config.fsr.validate();
    config.me.validate();

    VideoBuffer own_pre;
    if (!pre) {
        own_pre = reconstruct_sf(video, config).video;
        pre = &own_pre;
    } else if (pre->size() != video.size()) {
        throw DimensionError("reconstruct_mf: pre-reconstruction has a different frame count");
    }
    MotionCache own_cache;
    if (!cache)
        cache = &own_cache;

    const int frames = static_cast<int>(video.size());
    PipelineResult out;
    out.video.frames.resize(video.size());
    out.diagnostics.resize(video.size());
    parallel_for(video.size(), config.threads, [&](std::size_t ti) {
        const int t = static_cast<int>(ti);
        std::vector<ProjectedFrame> projections;
        for (int r : mf_references(t, frames, config.support, config.mf_window)) {
            const auto field = cache->get(t, r, *pre, config.me, 1);
            const auto& ref = video.frames[static_cast<std::size_t>(r)];
            projections.push_back(compensate(MaskedFrameRef{ref.frame, ref.mask.get()}, *field, std::abs(r - t),
                                             r < t ? -1 : +1));
        }
        const MergedFrame merged = merge_nearest(video.frames[ti], projections);
        out.video.frames[ti] = reconstruct_frame(merged.values, merged.fsr_classes(), config.fsr);
        out.diagnostics[ti] = {static_cast<int>(projections.size()), merged.count(MergeClass::projected),
                               merged.count(MergeClass::missing)};
    });
    return out;
}

/// Recursive multi-frame reconstruction. Frame 0 is reconstructed directly; frame t
/// matches its incomplete samples against the already reconstructed frames
/// t-1 .. t-min(K, t), projects their acquired pixels, merges them with the
/// configured weighting and runs the final FSR. Output t depends only on inputs 0..t.
inline PipelineResult reconstruct_rmf(const SampledVideo& video, const PipelineConfig& config)
{
    if (config.effective_mode() == Mode::sf)
        return reconstruct_sf(video, config);
    video.check();
    config.fsr.validate();
    config.me.validate();

    const WeightSchedule schedule = make_schedule(config.support, config.schedule);
    PipelineResult out;
    out.video.frames.reserve(video.size());
    out.diagnostics.resize(video.size());
    for (std::size_t t = 0; t < video.size(); ++t) {
        const SampledFrame& current = video.frames[t];
        if (t == 0) {
            out.video.frames.push_back(reconstruct_frame(current, config.fsr));
            out.diagnostics[t].still_missing = current.frame.size() - current.mask->count_acquired();
            continue;
        }
        const int refs = std::min<int>(config.support, static_cast<int>(t));
        std::vector<ProjectedFrame> projections(static_cast<std::size_t>(refs));
        const int inner = std::max(1, config.threads / std::max(refs, 1));
        parallel_for(static_cast<std::size_t>(refs), config.threads, [&](std::size_t j) {
            const int k = static_cast<int>(j) + 1;
            const Frame& reference = out.video.frames[t - static_cast<std::size_t>(k)];
            const MotionField field = estimate_dense_motion(MaskedFrameRef{current.frame, current.mask.get()},
                                                            MaskedFrameRef{reference}, config.me, inner);
            projections[j] = compensate(MaskedFrameRef{reference, video.frames[t - static_cast<std::size_t>(k)].mask.get()},
                                        field, k, -1);
        });
        const MergedFrame merged = merge_frames(current, projections, schedule, config.eq2_literal);
        out.video.frames.push_back(reconstruct_frame(merged.values, merged.fsr_classes(), config.fsr));
        out.diagnostics[t] = {refs, merged.count(MergeClass::projected), merged.count(MergeClass::missing)};
    }
    return out;
}

inline PipelineResult reconstruct(const SampledVideo& video, const PipelineConfig& config)
{
    switch (config.effective_mode()) {
    case Mode::sf:
        return reconstruct_sf(video, config);
    case Mode::mf:
        return reconstruct_mf(video, config);
    case Mode::rmf:
        return reconstruct_rmf(video, config);
    }
    throw ParameterError("unknown mode");
}

} // namespace nrs

#endif
