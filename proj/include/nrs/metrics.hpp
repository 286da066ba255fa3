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

#ifndef NRS_METRICS_HPP
#define NRS_METRICS_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace nrs {

inline constexpr int evaluation_margin = 4;
inline constexpr double peak_value = 255.0;

namespace detail {

inline void check_region(const Frame& a, const Frame& b, int margin, int min_side, const char* what)
{
    require_same_shape(a, b, what);
    if (margin < 0)
        throw ParameterError(std::string(what) + ": negative margin");
    if (a.width() - 2 * margin < min_side || a.height() - 2 * margin < min_side)
        throw DimensionError(std::string(what) + ": region inside the margin is too small");
}

} // namespace detail

/// 10 log10(255^2 / MSE) over the frame minus a `margin`-pixel border; +inf for identical regions.
inline double psnr(const Frame& reference, const Frame& test, int margin = evaluation_margin)
{
    detail::check_region(reference, test, margin, 1, "psnr");
    double sse = 0.0;
    for (int m = margin; m < reference.height() - margin; ++m)
        for (int n = margin; n < reference.width() - margin; ++n) {
            const double d = reference(m, n) - test(m, n);
            sse += d * d;
        }
    if (sse == 0.0)
        return std::numeric_limits<double>::infinity();
    const double count = static_cast<double>(reference.width() - 2 * margin) * (reference.height() - 2 * margin);
    return 10.0 * std::log10(peak_value * peak_value / (sse / count));
}

enum class SsimWindow { gaussian, uniform };

inline SsimWindow parse_ssim_window(const std::string& s)
{
    if (s == "gaussian")
        return SsimWindow::gaussian;
    if (s == "uniform")
        return SsimWindow::uniform;
    throw ParameterError("unknown SSIM window '" + s + "' (expected gaussian|uniform)");
}

/// Mean luminance, contrast and structure terms, and their product (the SSIM index).
struct SsimComponents {
    double luminance = 0.0;
    double contrast = 0.0;
    double structure = 0.0;
    double ssim = 0.0;
};

/// SSIM with 11x11 windows (Gaussian sigma = 1.5, or uniform), K1 = 0.01, K2 = 0.03,
/// L = 255. Windows are placed only where they fit entirely inside the cropped region.
inline SsimComponents ssim_components(const Frame& reference, const Frame& test, int margin = evaluation_margin,
                                      SsimWindow kind = SsimWindow::gaussian)
{
    constexpr int side = 11;
    constexpr int radius = side / 2;
    detail::check_region(reference, test, margin, side, "ssim");

    std::array<double, side> taps{};
    double total = 0.0;
    for (int i = 0; i < side; ++i) {
        const double x = i - radius;
        taps[static_cast<std::size_t>(i)] = kind == SsimWindow::gaussian ? std::exp(-x * x / (2.0 * 1.5 * 1.5)) : 1.0;
        total += taps[static_cast<std::size_t>(i)];
    }
    for (auto& t : taps)
        t /= total;

    const double c1 = (0.01 * peak_value) * (0.01 * peak_value);
    const double c2 = (0.03 * peak_value) * (0.03 * peak_value);
    const double c3 = c2 / 2.0;

    const int w = reference.width() - 2 * margin;
    const int h = reference.height() - 2 * margin;
    const int ow = w - side + 1;
    const int oh = h - side + 1;

    // Separable filtering of x, y, x^2, y^2, xy ("valid" placement).
    std::array<Grid<double>, 5> rows;
    for (auto& g : rows)
        g = Grid<double>(ow, h, 0.0);
    for (int m = 0; m < h; ++m) {
        for (int n = 0; n < ow; ++n) {
            std::array<double, 5> acc{};
            for (int t = 0; t < side; ++t) {
                const double x = reference(m + margin, n + t + margin);
                const double y = test(m + margin, n + t + margin);
                const double k = taps[static_cast<std::size_t>(t)];
                acc[0] += k * x;
                acc[1] += k * y;
                acc[2] += k * (x * x);
                acc[3] += k * (y * y);
                acc[4] += k * (x * y);
            }
            for (std::size_t c = 0; c < 5; ++c)
                rows[c](m, n) = acc[c];
        }
    }

    SsimComponents sum;
    for (int m = 0; m < oh; ++m) {
        for (int n = 0; n < ow; ++n) {
            std::array<double, 5> acc{};
            for (int t = 0; t < side; ++t) {
                const double k = taps[static_cast<std::size_t>(t)];
                for (std::size_t c = 0; c < 5; ++c)
                    acc[c] += k * rows[c](m + t, n);
            }
            const double mx = acc[0];
            const double my = acc[1];
            const double vx = acc[2] - mx * mx;
            const double vy = acc[3] - my * my;
            const double cxy = acc[4] - mx * my;
            const double sx = std::sqrt(std::max(vx, 0.0));
            const double sy = std::sqrt(std::max(vy, 0.0));
            sum.luminance += (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
            sum.contrast += (2.0 * sx * sy + c2) / (vx + vy + c2);
            sum.structure += (cxy + c3) / (sx * sy + c3);
            sum.ssim += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
    }
    const double count = static_cast<double>(ow) * oh;
    return {sum.luminance / count, sum.contrast / count, sum.structure / count, sum.ssim / count};
}

inline double ssim(const Frame& reference, const Frame& test, int margin = evaluation_margin,
                   SsimWindow kind = SsimWindow::gaussian)
{
    return ssim_components(reference, test, margin, kind).ssim;
}

/// One evaluated frame of one run.
struct FrameMetric {
    std::string sequence;
    int frame = 0;
    std::string mode;
    int support = 0;
    double psnr_db = 0.0;
    double ssim = 0.0;
};

/// Per-frame metrics of one (mode, K) run over one or more sequences.
struct MetricReport {
    std::string mode;
    int support = 0;
    std::vector<FrameMetric> frames;

    double mean_psnr() const
    {
        double s = 0.0;
        for (const auto& f : frames)
            s += f.psnr_db;
        return frames.empty() ? 0.0 : s / static_cast<double>(frames.size());
    }
    double mean_ssim() const
    {
        double s = 0.0;
        for (const auto& f : frames)
            s += f.ssim;
        return frames.empty() ? 0.0 : s / static_cast<double>(frames.size());
    }
    /// Mean over the frames of one sequence.
    std::map<std::string, std::pair<double, double>> sequence_means() const
    {
        std::map<std::string, std::pair<double, double>> sums;
        std::map<std::string, int> counts;
        for (const auto& f : frames) {
            sums[f.sequence].first += f.psnr_db;
            sums[f.sequence].second += f.ssim;
            ++counts[f.sequence];
        }
        for (auto& [name, s] : sums) {
            s.first /= counts[name];
            s.second /= counts[name];
        }
        return sums;
    }
};

struct GainRow {
    std::string mode;
    int support = 0;
    double psnr_gain_db = 0.0;
    double ssim_gain = 0.0;
};

/// Mean PSNR / SSIM difference of every report against `baseline`, averaged over all
/// frames of all sequences. Frame lists must be aligned (same sequence/frame keys in order).
inline std::vector<GainRow> gain_table(const std::vector<MetricReport>& reports, const MetricReport& baseline)
{
    std::vector<GainRow> out;
    for (const auto& r : reports) {
        if (r.frames.size() != baseline.frames.size())
            throw DimensionError("gain_table: run '" + r.mode + "' has a different frame count than the baseline");
        GainRow row{r.mode, r.support, 0.0, 0.0};
        for (std::size_t i = 0; i < r.frames.size(); ++i) {
            const auto& a = r.frames[i];
            const auto& b = baseline.frames[i];
            if (a.sequence != b.sequence || a.frame != b.frame)
                throw DimensionError("gain_table: mismatched sequence sets");
            row.psnr_gain_db += a.psnr_db - b.psnr_db;
            row.ssim_gain += a.ssim - b.ssim;
        }
        if (!r.frames.empty()) {
            row.psnr_gain_db /= static_cast<double>(r.frames.size());
            row.ssim_gain /= static_cast<double>(r.frames.size());
        }
        out.push_back(row);
    }
    return out;
}

/// Looks up the baseline run by mode name.
inline std::vector<GainRow> gain_table(const std::vector<MetricReport>& reports, const std::string& baseline_mode)
{
    for (const auto& r : reports)
        if (r.mode == baseline_mode)
            return gain_table(reports, r);
    throw ParameterError("gain_table: no run with mode '" + baseline_mode + "'");
}

/// Fixed-point text for CSV output; infinities become the literal "inf".
inline std::string format_number(double v, int decimals = 6)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s == "-0." + std::string(static_cast<std::size_t>(decimals), '0'))
        s.erase(0, 1);
    return s;
}

inline void write_metrics_csv(std::ostream& os, const std::vector<MetricReport>& reports)
{
    os << "sequence,frame,mode,K,psnr_db,ssim\n";
    for (const auto& r : reports)
        for (const auto& f : r.frames)
            os << f.sequence << ',' << f.frame << ',' << f.mode << ',' << f.support << ','
               << format_number(f.psnr_db) << ',' << format_number(f.ssim, 8) << '\n';
}

/// Gain CSV for one mode, one row per K.
inline void write_gain_csv(std::ostream& os, const std::vector<GainRow>& rows)
{
    os << "K,psnr_gain_db,ssim_gain\n";
    for (const auto& r : rows)
        os << r.support << ',' << format_number(r.psnr_gain_db) << ',' << format_number(r.ssim_gain, 8) << '\n';
}

} // namespace nrs

#endif
