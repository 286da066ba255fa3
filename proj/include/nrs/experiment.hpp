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

#ifndef NRS_EXPERIMENT_HPP
#define NRS_EXPERIMENT_HPP

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "pipeline.hpp"
#include "sampling.hpp"
#include "video_io.hpp"

namespace nrs {

struct NamedSequence {
    std::string name;
    VideoBuffer original;
};

/// One gain sweep: SF once, then every requested multi-frame mode for each K.
struct ExperimentSpec {
    std::vector<NamedSequence> sequences;
    std::uint64_t mask_seed = 1;
    std::optional<Mask> mask; ///< overrides mask_seed when set
    std::vector<Mode> modes{Mode::sf, Mode::mf, Mode::rmf};
    int k_min = 1;
    int k_max = 5;
    PipelineConfig pipeline; ///< mode and support are set per run
    int margin = evaluation_margin;
    SsimWindow ssim_window = SsimWindow::gaussian;
    int threads = 1;
};

struct ExperimentResult {
    std::vector<MetricReport> runs; ///< sf first, then (mode, K) in request order
    std::vector<GainRow> gains;     ///< every run against sf
};

using ProgressFn = std::function<void(const std::string&)>;

inline MetricReport evaluate_run(const std::string& sequence, const VideoBuffer& original, const VideoBuffer& recon,
                                 Mode mode, int support, int margin, SsimWindow window)
{
    if (original.size() != recon.size())
        throw DimensionError("evaluate: frame counts differ");
    MetricReport r{to_string(mode), support, {}};
    for (std::size_t t = 0; t < original.size(); ++t)
        r.frames.push_back({sequence, static_cast<int>(t), r.mode, support,
                            psnr(original.frames[t], recon.frames[t], margin),
                            ssim(original.frames[t], recon.frames[t], margin, window)});
    return r;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {})
{
    if (spec.sequences.empty())
        throw ParameterError("experiment: no input sequences");
    if (spec.k_min < 1 || spec.k_max < spec.k_min)
        throw ParameterError("experiment: invalid K range");

    struct Task {
        Mode mode;
        int support;
    };
    std::vector<Task> tasks;
    for (Mode m : spec.modes)
        if (m != Mode::sf)
            for (int k = spec.k_min; k <= spec.k_max; ++k)
                tasks.push_back({m, k});

    ExperimentResult result;
    result.runs.push_back({"sf", 0, {}});
    for (const auto& t : tasks)
        result.runs.push_back({to_string(t.mode), t.support, {}});

    for (const auto& seq : spec.sequences) {
        if (seq.original.empty())
            throw Error("experiment: sequence '" + seq.name + "' is empty");
        auto mask = std::make_shared<const Mask>(
            spec.mask ? *spec.mask
                      : generate_quadrant_mask(seq.original.width(), seq.original.height(), spec.mask_seed));
        if (!mask->same_shape(seq.original.frames.front()))
            throw DimensionError("experiment: mask does not match sequence '" + seq.name + "'");
        const SampledVideo sampled = sample_video(seq.original, mask);

        PipelineConfig base = spec.pipeline;
        base.threads = spec.threads;
        base.mode = Mode::sf;
        base.support = 0;
        if (progress)
            progress(seq.name + ": sf");
        const VideoBuffer sf = reconstruct_sf(sampled, base).video;
        auto append = [&](std::size_t run, const VideoBuffer& recon, Mode mode, int support) {
            auto rep = evaluate_run(seq.name, seq.original, recon, mode, support, spec.margin, spec.ssim_window);
            auto& dst = result.runs[run].frames;
            dst.insert(dst.end(), rep.frames.begin(), rep.frames.end());
        };
        append(0, sf, Mode::sf, 0);

        MotionCache cache;
        std::vector<VideoBuffer> outputs(tasks.size());
        // Runs are independent: each one gets a single worker when the sweep itself is parallel.
        const int inner = spec.threads > 1 && tasks.size() > 1 ? 1 : spec.threads;
        parallel_for(tasks.size(), spec.threads, [&](std::size_t i) {
            PipelineConfig cfg = spec.pipeline;
            cfg.mode = tasks[i].mode;
            cfg.support = tasks[i].support;
            cfg.threads = inner;
            if (progress)
                progress(seq.name + ": " + to_string(cfg.mode) + " K=" + std::to_string(cfg.support));
            outputs[i] = cfg.mode == Mode::mf ? reconstruct_mf(sampled, cfg, &sf, &cache).video
                                              : reconstruct_rmf(sampled, cfg).video;
        });
        for (std::size_t i = 0; i < tasks.size(); ++i)
            append(i + 1, outputs[i], tasks[i].mode, tasks[i].support);
    }
    result.gains = gain_table(result.runs, result.runs.front());
    return result;
}

/// Reference average gains over the three 720p test sequences (K = 1..5), used only to
/// annotate full-scale reproductions.
struct PublishedGains {
    static constexpr double mf_psnr[5] = {0.30, 0.48, 0.62, 0.73, 0.82};
    static constexpr double rmf_psnr[5] = {0.34, 0.63, 0.84, 1.00, 1.13};
    static constexpr double mf_ssim[5] = {0.94e-3, 1.60e-3, 2.33e-3, 2.91e-3, 3.42e-3};
    static constexpr double rmf_ssim[5] = {1.08e-3, 2.24e-3, 3.19e-3, 3.98e-3, 4.63e-3};
};

/// Writes metrics.csv, sweep.csv, gain_<mode>.csv and gain_curve.dat into `dir`;
/// with `annotate_published` also published_deviation.csv.
inline void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result,
                             bool annotate_published = false)
{
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os)
            throw IoError("cannot write " + (dir / name).string());
        return os;
    };
    {
        auto os = open("metrics.csv");
        write_metrics_csv(os, result.runs);
    }
    {
        auto os = open("sweep.csv");
        os << "mode,K,mean_psnr_db,mean_ssim,psnr_gain_db,ssim_gain\n";
        for (std::size_t i = 0; i < result.runs.size(); ++i) {
            const auto& r = result.runs[i];
            const auto& g = result.gains[i];
            os << r.mode << ',' << r.support << ',' << format_number(r.mean_psnr()) << ','
               << format_number(r.mean_ssim(), 8) << ',' << format_number(g.psnr_gain_db) << ','
               << format_number(g.ssim_gain, 8) << '\n';
        }
    }
    for (const char* mode : {"mf", "rmf"}) {
        std::vector<GainRow> rows;
        for (const auto& g : result.gains)
            if (g.mode == mode)
                rows.push_back(g);
        if (rows.empty())
            continue;
        auto os = open(mode == std::string("mf") ? "gain_mf.csv" : "gain_rmf.csv");
        write_gain_csv(os, rows);
    }
    {
        // gnuplot: plot 'gain_curve.dat' using 1:2 with linespoints, '' using 1:3 with linespoints
        auto os = open("gain_curve.dat");
        os << "# K mf_psnr_gain_db rmf_psnr_gain_db\n";
        std::map<int, std::pair<std::string, std::string>> curve;
        for (const auto& g : result.gains) {
            if (g.mode == "mf")
                curve[g.support].first = format_number(g.psnr_gain_db);
            else if (g.mode == "rmf")
                curve[g.support].second = format_number(g.psnr_gain_db);
        }
        for (const auto& [k, v] : curve)
            os << k << ' ' << (v.first.empty() ? "NaN" : v.first) << ' ' << (v.second.empty() ? "NaN" : v.second)
               << '\n';
    }
    if (annotate_published) {
        auto os = open("published_deviation.csv");
        os << "mode,K,psnr_gain_db,published_psnr_gain_db,psnr_deviation_db,ssim_gain,published_ssim_gain,"
              "ssim_deviation\n";
        for (const auto& g : result.gains) {
            if ((g.mode != "mf" && g.mode != "rmf") || g.support < 1 || g.support > 5)
                continue;
            const auto k = static_cast<std::size_t>(g.support - 1);
            const double pp = g.mode == "mf" ? PublishedGains::mf_psnr[k] : PublishedGains::rmf_psnr[k];
            const double ps = g.mode == "mf" ? PublishedGains::mf_ssim[k] : PublishedGains::rmf_ssim[k];
            os << g.mode << ',' << g.support << ',' << format_number(g.psnr_gain_db) << ',' << format_number(pp, 2)
               << ',' << format_number(g.psnr_gain_db - pp) << ',' << format_number(g.ssim_gain, 8) << ','
               << format_number(ps, 5) << ',' << format_number(g.ssim_gain - ps, 8) << '\n';
        }
    }
}

} // namespace nrs

#endif
