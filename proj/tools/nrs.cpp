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

// nrs: command line front end for mask generation, reconstruction runs, metric
// evaluation, gain sweeps and synthetic fixtures.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "nrs/nrs.hpp"

namespace fs = std::filesystem;

namespace {

/// Output written under a temporary name and moved into place on commit, so a
/// failing command leaves nothing behind.
class StagedPath {
public:
    explicit StagedPath(fs::path target) : target_(std::move(target))
    {
        std::random_device rd;
        staging_ = target_;
        staging_ += ".partial-" + std::to_string(rd());
    }
    StagedPath(const StagedPath&) = delete;
    StagedPath& operator=(const StagedPath&) = delete;
    ~StagedPath()
    {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }
    const fs::path& path() const noexcept { return staging_; }
    void commit()
    {
        if (fs::is_directory(target_))
            fs::remove_all(target_);
        fs::rename(staging_, target_);
        committed_ = true;
    }

private:
    fs::path target_;
    fs::path staging_;
    bool committed_ = false;
};

struct FsrFlags {
    std::string config;
    std::optional<int> block_size, border_width, fft_size, iterations;
    std::optional<double> rho, gamma, delta;

    void add(CLI::App& app)
    {
        app.add_option("--config", config, "FSR parameter file (key = value lines)");
        app.add_option("--block_size", block_size, "FSR block size");
        app.add_option("--border_width", border_width, "FSR border width");
        app.add_option("--fft_size", fft_size, "FSR FFT size");
        app.add_option("--iterations", iterations, "FSR iterations");
        app.add_option("--rho", rho, "FSR spatial weight decay");
        app.add_option("--gamma", gamma, "FSR orthogonality deficiency compensation");
        app.add_option("--delta", delta, "FSR weight of reconstructed samples");
    }

    nrs::FsrParams resolve() const
    {
        nrs::FsrParams p;
        if (!config.empty())
            p = nrs::load_fsr_params(config);
        if (block_size)
            p.block_size = *block_size;
        if (border_width)
            p.border_width = *border_width;
        if (fft_size)
            p.fft_size = *fft_size;
        if (iterations)
            p.iterations = *iterations;
        if (rho)
            p.rho = *rho;
        if (gamma)
            p.gamma = *gamma;
        if (delta)
            p.delta = *delta;
        p.validate();
        return p;
    }
};

struct PipelineFlags {
    FsrFlags fsr;
    nrs::MeParams me;
    std::string schedule = "equal";
    std::string mf_window = "total";
    bool eq2_literal = false;

    void add(CLI::App& app)
    {
        fsr.add(app);
        app.add_option("--me-window", me.window, "motion estimation window side (odd)");
        app.add_option("--search-range", me.search_range, "motion search range in pixels");
        app.add_option("--min-overlap", me.min_overlap, "jointly valid pixels required per match");
        app.add_option("--schedule", schedule, "projection weighting: equal|linear");
        app.add_option("--mf-window", mf_window, "MF reference window: total (K frames) or symmetric (K each side)");
        app.add_flag("--eq2-literal", eq2_literal, "divide merged sums by the full weight sum of all K frames");
    }

    nrs::PipelineConfig resolve() const
    {
        nrs::PipelineConfig c;
        c.fsr = fsr.resolve();
        c.me = me;
        c.me.validate();
        c.schedule = nrs::parse_weight_scheme(schedule);
        c.mf_window = nrs::parse_mf_window(mf_window);
        c.eq2_literal = eq2_literal;
        return c;
    }
};

struct InputFlags {
    std::string raw_size;
    std::string raw_chroma = "420";

    void add(CLI::App& app)
    {
        app.add_option("--raw-size", raw_size, "WxH of headerless .yuv input");
        app.add_option("--raw-chroma", raw_chroma, "chroma layout of .yuv input: 420|444|mono");
    }

    nrs::RawGeometry geometry() const
    {
        nrs::RawGeometry g;
        if (!raw_size.empty()) {
            const auto x = raw_size.find('x');
            if (x == std::string::npos)
                throw nrs::ParameterError("--raw-size expects WxH");
            g.width = std::stoi(raw_size.substr(0, x));
            g.height = std::stoi(raw_size.substr(x + 1));
        }
        if (raw_chroma == "420")
            g.chroma = nrs::ChromaLayout::yuv420;
        else if (raw_chroma == "444")
            g.chroma = nrs::ChromaLayout::yuv444;
        else if (raw_chroma == "mono")
            g.chroma = nrs::ChromaLayout::mono;
        else
            throw nrs::ParameterError("unknown --raw-chroma '" + raw_chroma + "'");
        return g;
    }

    nrs::VideoBuffer read(const std::string& path) const
    {
        nrs::VideoBuffer v = nrs::read_video(path, geometry());
        if (v.empty())
            throw nrs::FormatError(path + " holds no frames");
        v.check_uniform();
        return v;
    }
};

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        if (!item.empty())
            out.push_back(item);
    return out;
}

/// "3" or "1..5".
std::pair<int, int> parse_range(const std::string& s)
{
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const int k = std::stoi(s);
            return {k, k};
        }
        return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::logic_error&) {
        throw nrs::ParameterError("bad support range '" + s + "' (expected K or A..B)");
    }
}

std::shared_ptr<const nrs::Mask> mask_for(const std::string& mask_path, std::uint64_t seed, int width, int height)
{
    auto mask = std::make_shared<const nrs::Mask>(mask_path.empty() ? nrs::generate_quadrant_mask(width, height, seed)
                                                                    : nrs::load_mask(mask_path));
    if (mask->width() != width || mask->height() != height)
        throw nrs::DimensionError("mask is " + std::to_string(mask->width()) + "x" + std::to_string(mask->height()) +
                                  " but the video is " + std::to_string(width) + "x" + std::to_string(height));
    return mask;
}

void write_text(const fs::path& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    os << content;
    if (!os)
        throw nrs::IoError("cannot write " + path.string());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reconstruction of non-regularly sampled video"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    int threads = nrs::threads_from_env();
    app.add_option("--threads", threads, "worker threads (default: NRS_THREADS or 1)")->check(CLI::PositiveNumber);

    // mask
    auto* mask_cmd = app.add_subcommand("mask", "generate a quadrant sampling mask");
    int mask_w = 0, mask_h = 0;
    std::uint64_t mask_seed = 1;
    std::string mask_out;
    mask_cmd->add_option("--width", mask_w, "frame width (even)")->required();
    mask_cmd->add_option("--height", mask_h, "frame height (even)")->required();
    mask_cmd->add_option("--seed", mask_seed, "mask seed");
    mask_cmd->add_option("--out", mask_out, "output mask (.nrsm binary or .pbm)")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "reconstruct one sampled video");
    PipelineFlags run_pipe;
    InputFlags run_in;
    std::string run_mode = "rmf", run_mask, run_input, run_output, run_report;
    int run_support = 5;
    std::uint64_t run_seed = 1;
    std::string run_ssim = "gaussian";
    int run_margin = nrs::evaluation_margin;
    run_cmd->add_option("--mode", run_mode, "sf|mf|rmf");
    run_cmd->add_option("--support", run_support, "support frames K");
    run_cmd->add_option("--mask", run_mask, "mask file; default: quadrant mask from --mask-seed");
    run_cmd->add_option("--mask-seed", run_seed, "seed of the generated mask");
    run_cmd->add_option("--in", run_input, "original full-resolution video")->required();
    run_cmd->add_option("--out", run_output, "reconstructed video")->required();
    run_cmd->add_option("--report", run_report, "per-frame metrics CSV against the input");
    run_cmd->add_option("--ssim-window", run_ssim, "gaussian|uniform");
    run_cmd->add_option("--margin", run_margin, "excluded border for metrics");
    run_pipe.add(*run_cmd);
    run_in.add(*run_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "compare a reconstruction with the original");
    InputFlags eval_in;
    std::string eval_ref, eval_test, eval_out, eval_label = "test", eval_ssim = "gaussian";
    int eval_support = 0, eval_margin = nrs::evaluation_margin;
    eval_cmd->add_option("--ref", eval_ref, "original video")->required();
    eval_cmd->add_option("--test", eval_test, "reconstructed video")->required();
    eval_cmd->add_option("--out", eval_out, "per-frame metrics CSV");
    eval_cmd->add_option("--label", eval_label, "mode column of the CSV");
    eval_cmd->add_option("--support", eval_support, "K column of the CSV");
    eval_cmd->add_option("--ssim-window", eval_ssim, "gaussian|uniform");
    eval_cmd->add_option("--margin", eval_margin, "excluded border");
    eval_in.add(*eval_cmd);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "gain sweep of mf/rmf against sf over K");
    PipelineFlags sweep_pipe;
    InputFlags sweep_in;
    std::vector<std::string> sweep_inputs;
    std::string sweep_modes = "sf,mf,rmf", sweep_support = "1..5", sweep_mask, sweep_out, sweep_ssim = "gaussian";
    std::uint64_t sweep_seed = 1;
    int sweep_margin = nrs::evaluation_margin;
    bool sweep_annotate = false;
    sweep_cmd->add_option("--in", sweep_inputs, "original videos (repeatable)")->required();
    sweep_cmd->add_option("--modes", sweep_modes, "comma separated subset of sf,mf,rmf");
    sweep_cmd->add_option("--support", sweep_support, "K or range A..B");
    sweep_cmd->add_option("--mask", sweep_mask, "mask file; default: quadrant mask from --mask-seed");
    sweep_cmd->add_option("--mask-seed", sweep_seed, "seed of the generated mask");
    sweep_cmd->add_option("--out-dir", sweep_out, "result directory")->required();
    sweep_cmd->add_option("--ssim-window", sweep_ssim, "gaussian|uniform");
    sweep_cmd->add_option("--margin", sweep_margin, "excluded border");
    sweep_cmd->add_flag("--annotate-published", sweep_annotate,
                        "also write deviations from the reference 720p gains");
    sweep_pipe.add(*sweep_cmd);
    sweep_in.add(*sweep_cmd);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic test sequence");
    nrs::SynthesisParams synth;
    std::string synth_kind = "translate", synth_base, synth_out;
    std::uint64_t synth_seed = 11;
    synth_cmd->add_option("--kind", synth_kind, "translate|zoom|rotate");
    synth_cmd->add_option("--frames", synth.frames, "frame count");
    synth_cmd->add_option("--rate", synth.rate, "pixels, scale factor or degrees per frame");
    synth_cmd->add_option("--width", synth.width, "frame width");
    synth_cmd->add_option("--height", synth.height, "frame height");
    synth_cmd->add_option("--dir-m", synth.dir_m, "translate row direction (-1, 0, 1)");
    synth_cmd->add_option("--dir-n", synth.dir_n, "translate column direction (-1, 0, 1)");
    synth_cmd->add_option("--base", synth_base, "base image (.pgm); default: generated texture");
    synth_cmd->add_option("--seed", synth_seed, "texture seed");
    synth_cmd->add_option("--out", synth_out, "output video")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*mask_cmd) {
            const nrs::Mask mask = nrs::generate_quadrant_mask(mask_w, mask_h, mask_seed);
            StagedPath out(mask_out);
            {
                std::ofstream os(out.path(), std::ios::binary);
                if (fs::path(mask_out).extension() == ".pbm")
                    nrs::write_mask_pbm(os, mask);
                else
                    nrs::write_mask(os, mask);
                if (!os)
                    throw nrs::IoError("cannot write " + mask_out);
            }
            out.commit();
            std::cout << mask_out << ": " << mask_w << "x" << mask_h << ", " << mask.count_acquired()
                      << " acquired pixels\n";
        } else if (*run_cmd) {
            nrs::PipelineConfig cfg = run_pipe.resolve();
            cfg.mode = nrs::parse_mode(run_mode);
            cfg.support = run_support;
            cfg.threads = threads;
            const auto window = nrs::parse_ssim_window(run_ssim);
            const auto format = nrs::guess_format(run_output);
            const nrs::VideoBuffer original = run_in.read(run_input);
            const auto mask = mask_for(run_mask, run_seed, original.width(), original.height());
            const nrs::SampledVideo sampled = nrs::sample_video(original, mask);

            std::cerr << "reconstructing " << original.size() << " frames (" << nrs::to_string(cfg.effective_mode())
                      << ", K=" << cfg.support << ")\n";
            const auto t0 = std::chrono::steady_clock::now();
            nrs::PipelineResult result = nrs::reconstruct(sampled, cfg);
            result.video.fps_num = original.fps_num;
            result.video.fps_den = original.fps_den;
            std::cerr << "done in "
                      << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";

            const nrs::MetricReport report =
                nrs::evaluate_run(fs::path(run_input).stem().string(), original, result.video,
                                  cfg.effective_mode(), cfg.effective_mode() == nrs::Mode::sf ? 0 : cfg.support,
                                  run_margin, window);
            StagedPath video_out(run_output);
            nrs::write_video(result.video, video_out.path().string(), format);
            std::optional<StagedPath> report_out;
            if (!run_report.empty()) {
                report_out.emplace(run_report);
                std::ostringstream csv;
                nrs::write_metrics_csv(csv, {report});
                write_text(report_out->path(), csv.str());
            }
            video_out.commit();
            if (report_out)
                report_out->commit();
            std::cout << "mean_psnr_db " << nrs::format_number(report.mean_psnr()) << "\nmean_ssim "
                      << nrs::format_number(report.mean_ssim(), 8) << '\n';
        } else if (*eval_cmd) {
            const auto window = nrs::parse_ssim_window(eval_ssim);
            const nrs::VideoBuffer ref = eval_in.read(eval_ref);
            const nrs::VideoBuffer test = eval_in.read(eval_test);
            if (ref.size() != test.size())
                throw nrs::DimensionError("frame counts differ: " + std::to_string(ref.size()) + " vs " +
                                          std::to_string(test.size()));
            nrs::MetricReport report{eval_label, eval_support, {}};
            for (std::size_t t = 0; t < ref.size(); ++t)
                report.frames.push_back({fs::path(eval_ref).stem().string(), static_cast<int>(t), eval_label,
                                         eval_support, nrs::psnr(ref.frames[t], test.frames[t], eval_margin),
                                         nrs::ssim(ref.frames[t], test.frames[t], eval_margin, window)});
            if (!eval_out.empty()) {
                StagedPath out(eval_out);
                std::ostringstream csv;
                nrs::write_metrics_csv(csv, {report});
                write_text(out.path(), csv.str());
                out.commit();
            }
            std::cout << "mean_psnr_db " << nrs::format_number(report.mean_psnr()) << "\nmean_ssim "
                      << nrs::format_number(report.mean_ssim(), 8) << '\n';
        } else if (*sweep_cmd) {
            nrs::ExperimentSpec spec;
            spec.pipeline = sweep_pipe.resolve();
            spec.ssim_window = nrs::parse_ssim_window(sweep_ssim);
            spec.margin = sweep_margin;
            spec.threads = threads;
            spec.mask_seed = sweep_seed;
            std::tie(spec.k_min, spec.k_max) = parse_range(sweep_support);
            spec.modes.clear();
            for (const auto& m : split(sweep_modes, ','))
                spec.modes.push_back(nrs::parse_mode(m));
            if (spec.modes.empty())
                throw nrs::ParameterError("--modes is empty");
            for (const auto& path : sweep_inputs)
                spec.sequences.push_back({fs::path(path).stem().string(), sweep_in.read(path)});
            if (!sweep_mask.empty())
                spec.mask = nrs::load_mask(sweep_mask);

            const auto t0 = std::chrono::steady_clock::now();
            const nrs::ExperimentResult result =
                nrs::run_experiment(spec, [](const std::string& s) { std::cerr << s << '\n'; });
            StagedPath out(sweep_out);
            nrs::write_experiment(out.path(), result, sweep_annotate);
            out.commit();
            std::cerr << "sweep finished in "
                      << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
            std::cout << "mode,K,psnr_gain_db,ssim_gain\n";
            for (const auto& g : result.gains)
                std::cout << g.mode << ',' << g.support << ',' << nrs::format_number(g.psnr_gain_db) << ','
                          << nrs::format_number(g.ssim_gain, 8) << '\n';
        } else if (*synth_cmd) {
            synth.kind = nrs::parse_motion_kind(synth_kind);
            const auto format = nrs::guess_format(synth_out);
            nrs::Frame base;
            if (!synth_base.empty()) {
                base = nrs::read_image(synth_base);
            } else {
                // Large enough for the requested translation; zoom and rotate use a 2x canvas.
                const int span = synth.kind == nrs::MotionKind::translate
                                     ? static_cast<int>(std::lround(synth.rate)) * (synth.frames - 1)
                                     : 0;
                const int grow = synth.kind == nrs::MotionKind::translate ? 1 : 2;
                base = nrs::make_texture(grow * synth.width + span * std::abs(synth.dir_n),
                                         grow * synth.height + span * std::abs(synth.dir_m), synth_seed);
            }
            const nrs::VideoBuffer video = nrs::synthesize_sequence(base, synth);
            StagedPath out(synth_out);
            nrs::write_video(video, out.path().string(), format);
            out.commit();
            std::cout << synth_out << ": " << video.size() << " frames " << video.width() << "x" << video.height()
                      << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "nrs: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
