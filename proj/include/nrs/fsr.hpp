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

#ifndef NRS_FSR_HPP
#define NRS_FSR_HPP

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "sampling.hpp"

namespace nrs {

/// Frequency selective reconstruction settings. Defaults are the standard
/// single-frame configuration (4x4 blocks, 14 px border, 32x32 FFT, 100 iterations).
struct FsrParams {
    int block_size = 4;
    int border_width = 14;
    int fft_size = 32;
    int iterations = 100;
    double rho = 0.7;   ///< spatial decay of sample weights
    double gamma = 0.5; ///< orthogonality deficiency compensation
    double delta = 0.5; ///< weight of already reconstructed samples

    void validate() const
    {
        if (block_size < 1 || border_width < 0)
            throw ParameterError("block_size must be >= 1 and border_width >= 0");
        if (!fft::is_power_of_two(fft_size))
            throw ParameterError("fft_size must be a power of two");
        if (block_size + 2 * border_width != fft_size)
            throw ParameterError("block_size + 2*border_width must equal fft_size (" + std::to_string(block_size) +
                                 " + 2*" + std::to_string(border_width) + " != " + std::to_string(fft_size) + ")");
        if (iterations < 1)
            throw ParameterError("iterations must be >= 1");
        if (!(rho > 0.0 && rho < 1.0))
            throw ParameterError("rho must lie in (0, 1)");
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw ParameterError("gamma must lie in (0, 1]");
        if (!(delta >= 0.0 && delta <= 1.0))
            throw ParameterError("delta must lie in [0, 1]");
    }

    /// Assigns one named field from its textual value.
    void set(const std::string& key, const std::string& value)
    {
        std::size_t used = 0;
        auto as_int = [&] {
            int v = std::stoi(value, &used);
            if (used != value.size())
                throw ParameterError("trailing characters in value for " + key);
            return v;
        };
        auto as_double = [&] {
            double v = std::stod(value, &used);
            if (used != value.size())
                throw ParameterError("trailing characters in value for " + key);
            return v;
        };
        try {
            if (key == "block_size")
                block_size = as_int();
            else if (key == "border_width")
                border_width = as_int();
            else if (key == "fft_size")
                fft_size = as_int();
            else if (key == "iterations")
                iterations = as_int();
            else if (key == "rho")
                rho = as_double();
            else if (key == "gamma")
                gamma = as_double();
            else if (key == "delta")
                delta = as_double();
            else
                throw ParameterError("unknown FSR parameter '" + key + "'");
        } catch (const std::logic_error&) {
            throw ParameterError("bad value '" + value + "' for " + key);
        }
    }

    friend bool operator==(const FsrParams&, const FsrParams&) = default;
};

/// Reads flat "key = value" (or "key value") lines; '#' starts a comment.
/// Keys not present keep the value from `base`.
inline FsrParams parse_fsr_params(std::istream& is, FsrParams base = {})
{
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        for (char& c : line)
            if (c == '=' || c == ':')
                c = ' ';
        std::istringstream ls(line);
        std::string key, value, extra;
        if (!(ls >> key))
            continue;
        if (!(ls >> value) || (ls >> extra))
            throw ParameterError("parameter file line " + std::to_string(lineno) + ": expected 'key = value'");
        base.set(key, value);
    }
    base.validate();
    return base;
}

inline FsrParams load_fsr_params(const std::string& path, FsrParams base = {})
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open parameter file " + path);
    return parse_fsr_params(is, base);
}

inline void write_fsr_params(std::ostream& os, const FsrParams& p)
{
    os << "block_size = " << p.block_size << '\n'
       << "border_width = " << p.border_width << '\n'
       << "fft_size = " << p.fft_size << '\n'
       << "iterations = " << p.iterations << '\n'
       << "rho = " << p.rho << '\n'
       << "gamma = " << p.gamma << '\n'
       << "delta = " << p.delta << '\n';
}

/// Per-sample weights of one fft_size x fft_size extrapolation area.
struct WeightWindow {
    Grid<double> w;
};

/// Isotropic decay rho^d with d the Euclidean distance to the geometric centre of the
/// block, which sits at offset border_width inside the area and spans
/// block_height x block_width pixels. Acquired samples get rho^d, reconstructed samples
/// delta*rho^d, missing samples 0.
inline WeightWindow weight_window(const ClassGrid& area, const FsrParams& params, int block_height, int block_width)
{
    const int n = params.fft_size;
    if (area.width() != n || area.height() != n)
        throw DimensionError("weight_window: area must be " + std::to_string(n) + "x" + std::to_string(n));
    const double cm = params.border_width + (block_height - 1) / 2.0;
    const double cn = params.border_width + (block_width - 1) / 2.0;
    WeightWindow out{Grid<double>(n, n, 0.0)};
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const PixelClass c = area(m, k);
            if (c == PixelClass::missing)
                continue;
            const double d = std::hypot(m - cm, k - cn);
            const double decay = std::pow(params.rho, d);
            out.w(m, k) = c == PixelClass::acquired ? decay : params.delta * decay;
        }
    }
    return out;
}

inline WeightWindow weight_window(const ClassGrid& area, const FsrParams& params)
{
    return weight_window(area, params, params.block_size, params.block_size);
}

/// Frequency index (k, l): row frequency k, column frequency l, both modulo fft_size.
struct FrequencyIndex {
    int k = 0;
    int l = 0;
    friend bool operator==(const FrequencyIndex&, const FrequencyIndex&) = default;
};

/// Sparse Fourier model of one area: g[m,n] = sum over selected (k,l) of
/// c(k,l) * exp(2 pi i (k m + l n) / N).
struct FsrModel {
    Grid<std::complex<double>> coefficients; ///< N x N, zero outside `selected`
    std::vector<FrequencyIndex> selected;    ///< both members of every conjugate pair, first-selection order
    Grid<double> model;                      ///< real part of the superposition
    double max_imag = 0.0;                   ///< largest |imag| discarded by the real cast
};

/// Pixel-domain weighted residual energy sum w * (area - g)^2 after each iteration.
using ResidualTrace = std::vector<double>;

namespace detail {

inline int conj_index(int k, int n) noexcept { return (n - k) & (n - 1); }

inline bool contains(const std::vector<FrequencyIndex>& v, FrequencyIndex f)
{
    for (const auto& e : v)
        if (e == f)
            return true;
    return false;
}

} // namespace detail

/// Greedy generation of the sparse model.
///
/// Works on the spectrum Rw of the weighted residual r*w. Each iteration picks the
/// index maximizing |Rw(k,l)|^2 / W(0,0) (the energy the basis function removes),
/// adds gamma * Rw(k,l) / W(0,0) to its coefficient and the conjugate to its mirror,
/// and updates Rw through the convolution identity DFT(w * phi_(k,l))(u,v) = W(u-k, v-l),
/// so only the two initial forward transforms are needed per area.
inline FsrModel generate_block_model(const Grid<double>& area, const WeightWindow& window, const FsrParams& params,
                                     ResidualTrace* trace = nullptr)
{
    using fft::complex;
    const int n = params.fft_size;
    if (area.width() != n || area.height() != n || window.w.width() != n || window.w.height() != n)
        throw DimensionError("generate_block_model: area and window must be " + std::to_string(n) + "x" +
                             std::to_string(n));

    FsrModel out{Grid<complex>(n, n), {}, Grid<double>(n, n, 0.0), 0.0};

    const fft::Plan plan(n);
    Grid<complex> wspec(n, n);
    Grid<complex> rspec(n, n);
    for (std::size_t i = 0; i < area.size(); ++i) {
        const double w = window.w[i];
        wspec[i] = w;
        rspec[i] = w == 0.0 ? 0.0 : area[i] * w;
    }
    plan.transform2d(wspec, false);
    const double w0 = wspec(0, 0).real();
    if (!(w0 > 0.0))
        return out;
    plan.transform2d(rspec, false);

    // Hermitian symmetry of real-signal spectra: columns 0..n/2 carry everything.
    const int half = n / 2 + 1;
    const int wrap = n - 1;

    Grid<double> g(n, n, 0.0);
    auto energy = [&] {
        double e = 0.0;
        for (std::size_t i = 0; i < area.size(); ++i) {
            const double r = area[i] - g[i];
            if (window.w[i] != 0.0)
                e += window.w[i] * r * r;
        }
        return e;
    };
    auto add_to_pixels = [&](FrequencyIndex f, complex c, bool pair) {
        for (int m = 0; m < n; ++m)
            for (int q = 0; q < n; ++q) {
                const double a = 2.0 * std::numbers::pi * (f.k * m + f.l * q) / n;
                const complex v = c * complex(std::cos(a), std::sin(a));
                g(m, q) += pair ? 2.0 * v.real() : v.real();
            }
    };
    if (trace)
        trace->push_back(energy());

    for (int it = 0; it < params.iterations; ++it) {
        int bu = 0;
        int bv = 0;
        double best = -1.0;
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v < half; ++v) {
                const double e = std::norm(rspec(u, v));
                if (e > best) {
                    best = e;
                    bu = u;
                    bv = v;
                }
            }
        }
        if (!(best > 0.0))
            break;

        const FrequencyIndex f{bu, bv};
        const FrequencyIndex fc{detail::conj_index(bu, n), detail::conj_index(bv, n)};
        const bool self_conjugate = f == fc;

        if (self_conjugate) {
            const double c = params.gamma * rspec(bu, bv).real() / w0;
            out.coefficients(bu, bv) += c;
            for (int u = 0; u < n; ++u) {
                const auto wrow = wspec.row((u - bu) & wrap);
                auto rrow = rspec.row(u);
                for (int v = 0; v < half; ++v)
                    rrow[static_cast<std::size_t>(v)] -= c * wrow[static_cast<std::size_t>((v - bv) & wrap)];
            }
            if (trace)
                add_to_pixels(f, c, false);
        } else {
            const complex c = params.gamma * rspec(bu, bv) / w0;
            const complex cc = std::conj(c);
            out.coefficients(f.k, f.l) += c;
            out.coefficients(fc.k, fc.l) += cc;
            for (int u = 0; u < n; ++u) {
                const auto wrow = wspec.row((u - f.k) & wrap);
                const auto wrow_c = wspec.row((u - fc.k) & wrap);
                auto rrow = rspec.row(u);
                // Written out: std::complex operator* carries NaN recovery that blocks vectorization.
                for (int v = 0; v < half; ++v) {
                    const complex a = wrow[static_cast<std::size_t>((v - f.l) & wrap)];
                    const complex b = wrow_c[static_cast<std::size_t>((v - fc.l) & wrap)];
                    const double re = c.real() * (a.real() + b.real()) - c.imag() * (a.imag() - b.imag());
                    const double im = c.real() * (a.imag() + b.imag()) + c.imag() * (a.real() - b.real());
                    rrow[static_cast<std::size_t>(v)] -= complex(re, im);
                }
            }
            if (trace)
                add_to_pixels(f, c, true);
        }

        if (!detail::contains(out.selected, f)) {
            out.selected.push_back(f);
            if (!self_conjugate)
                out.selected.push_back(fc);
        }
        if (trace)
            trace->push_back(energy());
    }

    Grid<complex> spatial = out.coefficients;
    plan.transform2d(spatial, true);
    for (std::size_t i = 0; i < spatial.size(); ++i) {
        out.model[i] = spatial[i].real();
        out.max_imag = std::max(out.max_imag, std::abs(spatial[i].imag()));
    }
    return out;
}

/// Summary of one frame reconstruction.
struct FsrReport {
    int blocks_total = 0;
    int blocks_processed = 0;        ///< blocks that contained missing pixels
    int blocks_without_support = 0;  ///< processed blocks whose area held no usable sample
    bool no_acquired_pixels = false; ///< the input carried no information at all
    double max_imag = 0.0;
};

/// Block-wise reconstruction in raster order.
///
/// `classes` marks each pixel as acquired, reconstructed (an estimate that is kept
/// in the output but weighted by delta) or missing. Missing pixels are replaced by
/// the model of the block that owns them, clipped to [0, 255], and then serve as
/// reconstructed samples for later blocks. Acquired and reconstructed inputs are
/// returned unchanged.
inline Frame reconstruct_frame(const Frame& values, const ClassGrid& classes, const FsrParams& params,
                               FsrReport* report = nullptr)
{
    params.validate();
    require_same_shape(values, classes, "reconstruct_frame");
    if (values.empty())
        throw DimensionError("reconstruct_frame: empty frame");
    if (values.width() < params.block_size || values.height() < params.block_size)
        throw DimensionError("reconstruct_frame: frame smaller than one block");

    const int n = params.fft_size;
    const int bs = params.block_size;
    const int border = params.border_width;

    Frame out(values.width(), values.height(), 0.0);
    ClassGrid cls = classes;
    bool any_information = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (cls[i] != PixelClass::missing) {
            out[i] = values[i];
            any_information = true;
        }
    }

    FsrReport local;
    local.no_acquired_pixels = !any_information;

    const WeightWindow full_window_decay = [&] {
        ClassGrid all(n, n, PixelClass::acquired);
        return weight_window(all, params, bs, bs);
    }();

    Grid<double> area(n, n, 0.0);
    ClassGrid area_cls(n, n, PixelClass::missing);
    WeightWindow window{Grid<double>(n, n, 0.0)};

    for (int bm = 0; bm < values.height(); bm += bs) {
        for (int bn = 0; bn < values.width(); bn += bs) {
            ++local.blocks_total;
            const int bh = std::min(bs, values.height() - bm);
            const int bw = std::min(bs, values.width() - bn);

            bool has_missing = false;
            for (int i = 0; i < bh && !has_missing; ++i)
                for (int j = 0; j < bw; ++j)
                    if (cls(bm + i, bn + j) == PixelClass::missing) {
                        has_missing = true;
                        break;
                    }
            if (!has_missing)
                continue;
            ++local.blocks_processed;

            const int m0 = bm - border;
            const int n0 = bn - border;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const int m = m0 + i;
                    const int q = n0 + j;
                    const PixelClass c = out.contains(m, q) ? cls(m, q) : PixelClass::missing;
                    area_cls(i, j) = c;
                    area(i, j) = c == PixelClass::missing ? 0.0 : out(m, q);
                }
            }
            if (bh == bs && bw == bs) {
                for (std::size_t i = 0; i < area.size(); ++i) {
                    const PixelClass c = area_cls[i];
                    window.w[i] = c == PixelClass::missing
                                      ? 0.0
                                      : (c == PixelClass::acquired ? full_window_decay.w[i]
                                                                   : params.delta * full_window_decay.w[i]);
                }
            } else {
                window = weight_window(area_cls, params, bh, bw);
            }

            const FsrModel model = generate_block_model(area, window, params);
            if (model.selected.empty())
                ++local.blocks_without_support;
            local.max_imag = std::max(local.max_imag, model.max_imag);

            for (int i = 0; i < bh; ++i) {
                for (int j = 0; j < bw; ++j) {
                    const int m = bm + i;
                    const int q = bn + j;
                    if (cls(m, q) != PixelClass::missing)
                        continue;
                    out(m, q) = clip8(model.model(border + i, border + j));
                    cls(m, q) = PixelClass::reconstructed;
                }
            }
        }
    }
    if (report)
        *report = local;
    return out;
}

inline Frame reconstruct_frame(const SampledFrame& sampled, const FsrParams& params, FsrReport* report = nullptr)
{
    if (!sampled.mask || !sampled.mask->same_shape(sampled.frame))
        throw DimensionError("reconstruct_frame: frame and mask dimensions differ");
    return reconstruct_frame(sampled.frame, sampled.classes(), params, report);
}

} // namespace nrs

#endif
