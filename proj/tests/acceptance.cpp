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

// Acceptance check: one line per criterion, each with its pinned tolerance and
// runtime budget. Exit status is non-zero when a criterion fails, except for the
// ones listed in `known_red`, which still print FAIL. Pass --strict to count those too.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nrs/nrs.hpp"
#include "support/motion_oracle.hpp"
#include "support/ssim_fixtures.hpp"
#include "support/wls_oracle.hpp"

namespace {

using namespace nrs;
namespace fs = std::filesystem;

// 8x8 areas give 16 samples for 64 unknowns; see README, "Acceptance status".
constexpr int known_red[] = {3};

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s; ///< 0 means no runtime limit
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

VideoBuffer pan_sequence(int size, int frames, std::uint64_t seed)
{
    SynthesisParams sp;
    sp.frames = frames;
    sp.rate = 2;
    sp.width = size;
    sp.height = size;
    const Frame base = make_texture(size + 2 * frames + 8, size + 8, seed);
    return synthesize_sequence(base, sp);
}

Outcome mask_law()
{
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Mask mask = generate_quadrant_mask(64, 64, seed);
        long total = 0;
        for (int m = 0; m < 64; m += 2)
            for (int n = 0; n < 64; n += 2) {
                const int c = mask.acquired(m, n) + mask.acquired(m, n + 1) + mask.acquired(m + 1, n) +
                              mask.acquired(m + 1, n + 1);
                if (c != 1)
                    return {false, "seed " + std::to_string(seed) + ": cell has " + std::to_string(c)};
                total += c;
            }
        if (total * 4 != 64 * 64)
            return {false, "seed " + std::to_string(seed) + ": density off"};
    }
    return {true, "100 seeds, 1024 cells each"};
}

Outcome preservation()
{
    const VideoBuffer video = pan_sequence(64, 10, 3);
    const SampledVideo sampled = sample_video(video, std::make_shared<const Mask>(generate_quadrant_mask(64, 64, 5)));
    long checked = 0;
    for (Mode mode : {Mode::sf, Mode::mf, Mode::rmf}) {
        PipelineConfig cfg;
        cfg.mode = mode;
        cfg.support = 3;
        const VideoBuffer out = reconstruct(sampled, cfg).video;
        for (std::size_t t = 0; t < out.size(); ++t) {
            const auto& in = sampled.frames[t];
            for (int m = 0; m < 64; ++m)
                for (int n = 0; n < 64; ++n)
                    if (in.mask->acquired(m, n)) {
                        if (out.frames[t](m, n) != in.frame(m, n))
                            return {false, to_string(mode) + " frame " + std::to_string(t) + " differs"};
                        ++checked;
                    }
        }
    }
    return {true, std::to_string(checked) + " acquired samples, sf/mf/rmf"};
}

Outcome fsr_oracle()
{
    constexpr int n = 8;
    constexpr int trials = 24;
    constexpr double tolerance = 1e-4;
    FsrParams p;
    p.fft_size = n;
    p.block_size = 4;
    p.border_width = 2;
    std::mt19937_64 rng(2026);
    std::uniform_int_distribution<int> pick_k(0, n - 1), pick_l(0, n / 2);
    std::normal_distribution<double> amp(0.0, 40.0);
    int matched = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int pairs = 1 + t % 2;
        std::vector<FrequencyIndex> f;
        std::vector<double> a, b;
        while (static_cast<int>(f.size()) < pairs) {
            const FrequencyIndex q{pick_k(rng), pick_l(rng)};
            if (q.k == 0 && q.l == 0)
                continue;
            const bool dup = std::any_of(f.begin(), f.end(), [&](const FrequencyIndex& e) {
                return e == q || (e.k == (n - q.k) % n && e.l == (n - q.l) % n);
            });
            if (dup)
                continue;
            f.push_back(q);
            a.push_back(amp(rng));
            b.push_back(oracle::self_conjugate(q, n) ? 0.0 : amp(rng));
        }
        const Mask mask = generate_quadrant_mask(n, n, rng());
        const auto area = oracle::make_pair_area(n, f, a, b, mask);
        const WeightWindow w = weight_window(area.classes, p);
        const FsrModel model = generate_block_model(area.sampled, w, p);
        const double err =
            oracle::relative_error(model.coefficients, oracle::weighted_least_squares(area.sampled, w.w, f));
        worst = std::max(worst, err);
        matched += err < tolerance;
    }
    return {matched == trials,
            fmt("%.0f/%.0f areas within 1e-4, worst relative error %.3g", matched, trials, worst)};
}

Outcome sinusoid()
{
    constexpr int size = 128;
    constexpr double tau = 6.283185307179586;
    Frame f(size, size);
    for (int m = 0; m < size; ++m)
        for (int n = 0; n < size; ++n)
            f(m, n) = 128.0 + 60.0 * std::cos(tau * (3.0 * m + 5.0 * n) / 32.0);
    const auto mask = std::make_shared<const Mask>(generate_quadrant_mask(size, size, 7));
    const Frame out = reconstruct_frame(apply_mask(f, mask), FsrParams{});
    const double db = psnr(f, out, evaluation_margin);
    return {db > 50.0, fmt("PSNR %.2f dB (> 50)", db)};
}

Outcome motion_recovery()
{
    constexpr int size = 128, margin = 19, samples = 400;
    const Frame base = make_texture(size + 8, size + 8, 21);
    auto crop = [&](int m0, int n0) {
        Frame f(size, size);
        for (int m = 0; m < size; ++m)
            for (int n = 0; n < size; ++n)
                f(m, n) = base(m0 + m, n0 + n);
        return f;
    };
    MeParams p; // search range 16
    const Mask mask = generate_quadrant_mask(size, size, 9);
    struct Case {
        const char* label;
        Frame cur, ref;
        const Mask* mask;
        int dm, dn;
        double need;
    };
    const Case cases[] = {{"full (+2,0)", crop(4, 4), crop(2, 4), nullptr, 2, 0, 0.99},
                          {"masked (0,+3)", crop(4, 4), crop(4, 1), &mask, 0, 3, 0.95}};
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(margin, size - margin - 1);
    std::string detail;
    bool ok = true;
    for (const Case& c : cases) {
        const MotionField field = estimate_dense_motion(MaskedFrameRef{c.cur, c.mask}, MaskedFrameRef{c.ref}, p);
        long hit = 0, total = 0;
        for (int m = margin; m < size - margin; ++m)
            for (int n = margin; n < size - margin; ++n) {
                ++total;
                hit += field.valid(m, n) && field.dm(m, n) == c.dm && field.dn(m, n) == c.dn;
            }
        int disagree = 0;
        for (int s = 0; s < samples; ++s) {
            const int m = pick(rng), n = pick(rng);
            const auto b = oracle::brute_force_pixel(c.cur, c.mask, c.ref, p, m, n);
            disagree += b.valid != static_cast<bool>(field.valid(m, n)) ||
                        (b.valid && (b.dm != field.dm(m, n) || b.dn != field.dn(m, n)));
        }
        const double frac = static_cast<double>(hit) / static_cast<double>(total);
        ok = ok && frac >= c.need && disagree == 0;
        detail += std::string(detail.empty() ? "" : "; ") + c.label + fmt(" %.2f%% exact", 100.0 * frac) +
                  fmt(", %.0f/%.0f oracle disagreements", disagree, samples);
    }
    return {ok, detail};
}

Outcome causality()
{
    const VideoBuffer video = pan_sequence(64, 10, 4);
    const auto mask = std::make_shared<const Mask>(generate_quadrant_mask(64, 64, 6));
    PipelineConfig cfg;
    cfg.mode = Mode::rmf;
    cfg.support = 3;
    const VideoBuffer full = reconstruct_rmf(sample_video(video, mask), cfg).video;
    for (int t : {1, 3, 7}) {
        VideoBuffer prefix = video;
        prefix.frames.resize(static_cast<std::size_t>(t));
        const VideoBuffer out = reconstruct_rmf(sample_video(prefix, mask), cfg).video;
        for (int i = 0; i < t; ++i)
            if (out.frames[i] != full.frames[i])
                return {false, "T=" + std::to_string(t) + " frame " + std::to_string(i) + " differs"};
    }
    return {true, "T = 1, 3, 7 match the 10-frame run"};
}

ExperimentSpec gain_fixture(int threads)
{
    SynthesisParams sp;
    sp.frames = 20;
    sp.rate = 2;
    sp.width = 128;
    sp.height = 128;
    const Frame base = make_texture(128 + 2 * 19 + 8, 136, 11);
    ExperimentSpec spec;
    spec.sequences.push_back({"translate", synthesize_sequence(base, sp)});
    spec.threads = threads;
    return spec;
}

ExperimentResult gain_result;

Outcome gain_ordering()
{
    gain_result = run_experiment(gain_fixture(1));
    double mf[6] = {}, rmf[6] = {};
    for (const auto& g : gain_result.gains)
        (g.mode == "mf" ? mf : g.mode == "rmf" ? rmf : mf)[g.mode == "sf" ? 0 : g.support] = g.psnr_gain_db;
    bool ok = rmf[5] > rmf[1] && rmf[5] > 0.3;
    std::string detail = "K: rmf/mf gain dB";
    for (int k = 1; k <= 5; ++k) {
        ok = ok && rmf[k] >= mf[k] - 0.05;
        detail += fmt(" %.0f:%.3f/%.3f", k, rmf[k], mf[k]);
    }
    return {ok, detail};
}

Outcome metric_correctness()
{
    Frame a(64, 64), b(64, 64);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = static_cast<double>(i * 7 % 200);
        b[i] = a[i] + 1.0;
    }
    const double shifted = psnr(a, b, evaluation_margin);
    bool ok = std::abs(shifted - 48.13) <= 0.01;
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const auto [ref, test] = fixtures::make_fixture(i);
        worst = std::max(worst, std::abs(ssim(ref, test, evaluation_margin, SsimWindow::gaussian) -
                                         fixtures::skimage_gaussian[i]));
        worst = std::max(worst, std::abs(ssim(ref, test, evaluation_margin, SsimWindow::uniform) -
                                         fixtures::skimage_uniform[i]));
    }
    ok = ok && worst <= 1e-6;
    const bool exact = std::isinf(psnr(a, a, evaluation_margin)) && ssim(a, a, evaluation_margin) == 1.0;
    ok = ok && exact;
    return {ok, fmt("PSNR +1 shift %.4f dB, SSIM max deviation %.2g, identical inf/1.0 ", shifted, worst) +
                    (exact ? "yes" : "no")};
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

Outcome determinism()
{
    const int threads = std::max(2u, std::thread::hardware_concurrency());
    if (gain_result.runs.empty())
        gain_result = run_experiment(gain_fixture(1));
    const ExperimentResult parallel = run_experiment(gain_fixture(threads));
    const fs::path root = fs::temp_directory_path() / ("nrs_acceptance_" + std::to_string(std::random_device{}()));
    write_experiment(root / "serial", gain_result);
    write_experiment(root / "parallel", parallel);
    int files = 0;
    std::string diff;
    for (const auto& e : fs::directory_iterator(root / "serial")) {
        ++files;
        if (slurp(e.path()) != slurp(root / "parallel" / e.path().filename()))
            diff += " " + e.path().filename().string();
    }
    fs::remove_all(root);
    if (!diff.empty())
        return {false, "differs:" + diff};
    return {true, std::to_string(files) + " files identical, 1 vs " + std::to_string(threads) + " threads"};
}

} // namespace

int main(int argc, char** argv)
{
    bool strict = false;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0)
            strict = true;
        else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);
    }
    const Criterion criteria[] = {
        {1, "mask law", 1.0, mask_law},
        {2, "acquired-pixel preservation", 120.0, preservation},
        {3, "FSR oracle equivalence", 10.0, fsr_oracle},
        {4, "sinusoid recovery", 30.0, sinusoid},
        {5, "motion recovery", 60.0, motion_recovery},
        {6, "recursive causality", 120.0, causality},
        {7, "gain ordering", 600.0, gain_ordering},
        {8, "metric correctness", 5.0, metric_correctness},
        {9, "determinism under parallelism", 0.0, determinism},
    };
    int blocking = 0, failed = 0, ran = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only)
            continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
        const bool pass = o.pass && in_time;
        const bool known = std::find(std::begin(known_red), std::end(known_red), c.id) != std::end(known_red);
        std::printf("criterion %d %-30s %s  %s  [%.2f s%s]%s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs,
                    c.budget_s == 0.0 ? "" : fmt(" / %.0f s", c.budget_s).c_str(),
                    !pass && known ? " (known)" : "");
        std::fflush(stdout);
        if (!pass) {
            ++failed;
            blocking += strict || !known;
        }
    }
    std::printf("%d of %d criteria pass\n", ran - failed, ran);
    return blocking == 0 ? 0 : 1;
}
