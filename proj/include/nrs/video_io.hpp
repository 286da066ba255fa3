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

#ifndef NRS_VIDEO_IO_HPP
#define NRS_VIDEO_IO_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "sampling.hpp"

namespace nrs {

/// Ordered luma frames of one video. All frames share the same dimensions.
struct VideoBuffer {
    std::vector<Frame> frames;
    int fps_num = 30;
    int fps_den = 1;

    int width() const noexcept { return frames.empty() ? 0 : frames.front().width(); }
    int height() const noexcept { return frames.empty() ? 0 : frames.front().height(); }
    std::size_t size() const noexcept { return frames.size(); }
    bool empty() const noexcept { return frames.empty(); }

    void check_uniform() const
    {
        for (const auto& f : frames)
            if (!f.same_shape(frames.front()))
                throw DimensionError("video frames differ in size");
    }
};

enum class ChromaLayout { yuv420, yuv444, mono };

namespace detail {

inline std::size_t chroma_bytes(ChromaLayout c, int w, int h)
{
    switch (c) {
    case ChromaLayout::yuv420:
        return 2 * static_cast<std::size_t>((w + 1) / 2) * static_cast<std::size_t>((h + 1) / 2);
    case ChromaLayout::yuv444:
        return 2 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    case ChromaLayout::mono:
        return 0;
    }
    return 0;
}

inline std::uint8_t quantize8(double v) noexcept
{
    return static_cast<std::uint8_t>(std::lround(clip8(v)));
}

inline bool read_luma(std::istream& is, Frame& f)
{
    std::vector<unsigned char> raw(f.size());
    if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        return false;
    for (std::size_t i = 0; i < raw.size(); ++i)
        f[i] = raw[i];
    return true;
}

inline void write_luma(std::ostream& os, const Frame& f)
{
    std::vector<char> raw(f.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<char>(quantize8(f[i]));
    os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

inline void write_flat_chroma(std::ostream& os, ChromaLayout c, int w, int h)
{
    const std::string chroma(chroma_bytes(c, w, h), static_cast<char>(128));
    os.write(chroma.data(), static_cast<std::streamsize>(chroma.size()));
}

} // namespace detail

/// YUV4MPEG2 stream, 8-bit 4:2:0 / 4:4:4 / mono. Only the luma plane is kept.
inline VideoBuffer read_y4m(std::istream& is)
{
    std::string header;
    if (!std::getline(is, header))
        throw FormatError("y4m: empty stream");
    std::istringstream hs(header);
    std::string token;
    if (!(hs >> token) || token != "YUV4MPEG2")
        throw FormatError("y4m: missing YUV4MPEG2 signature");
    int width = 0, height = 0;
    ChromaLayout chroma = ChromaLayout::yuv420;
    VideoBuffer video;
    while (hs >> token) {
        const char tag = token[0];
        const std::string value = token.substr(1);
        switch (tag) {
        case 'W':
            width = std::stoi(value);
            break;
        case 'H':
            height = std::stoi(value);
            break;
        case 'F': {
            const auto colon = value.find(':');
            if (colon == std::string::npos)
                throw FormatError("y4m: bad frame rate token " + token);
            video.fps_num = std::stoi(value.substr(0, colon));
            video.fps_den = std::stoi(value.substr(colon + 1));
            break;
        }
        case 'I':
        case 'A':
        case 'X':
            break;
        case 'C':
            if (value == "420" || value == "420jpeg" || value == "420paldv" || value == "420mpeg2")
                chroma = ChromaLayout::yuv420;
            else if (value == "444")
                chroma = ChromaLayout::yuv444;
            else if (value == "mono")
                chroma = ChromaLayout::mono;
            else
                throw FormatError("y4m: unsupported colour space " + token);
            break;
        default:
            throw FormatError("y4m: unsupported header token " + token);
        }
    }
    if (width <= 0 || height <= 0)
        throw FormatError("y4m: missing or invalid W/H");

    const std::size_t skip = detail::chroma_bytes(chroma, width, height);
    for (int index = 0;; ++index) {
        std::string frame_header;
        if (!std::getline(is, frame_header)) {
            if (is.eof() && frame_header.empty())
                break;
            throw FormatError("y4m: frame " + std::to_string(index) + " header truncated");
        }
        if (frame_header.rfind("FRAME", 0) != 0)
            throw FormatError("y4m: frame " + std::to_string(index) + " lacks FRAME marker");
        Frame f(width, height, 0.0);
        if (!detail::read_luma(is, f))
            throw FormatError("y4m: frame " + std::to_string(index) + " truncated");
        if (skip > 0) {
            is.ignore(static_cast<std::streamsize>(skip));
            if (static_cast<std::size_t>(is.gcount()) != skip)
                throw FormatError("y4m: frame " + std::to_string(index) + " truncated");
        }
        video.frames.push_back(std::move(f));
    }
    return video;
}

/// Samples are clipped to [0, 255] and rounded; chroma planes are written as 128.
inline void write_y4m(std::ostream& os, const VideoBuffer& video, ChromaLayout chroma = ChromaLayout::yuv420)
{
    if (video.empty())
        throw Error("write_y4m: empty video");
    video.check_uniform();
    os << "YUV4MPEG2 W" << video.width() << " H" << video.height() << " F" << video.fps_num << ':' << video.fps_den
       << " Ip A1:1 C" << (chroma == ChromaLayout::yuv420 ? "420jpeg" : chroma == ChromaLayout::yuv444 ? "444" : "mono")
       << '\n';
    for (const auto& f : video.frames) {
        os << "FRAME\n";
        detail::write_luma(os, f);
        detail::write_flat_chroma(os, chroma, f.width(), f.height());
    }
    if (!os)
        throw IoError("write_y4m: stream failure");
}

/// Headerless planar 8-bit video with explicit dimensions.
inline VideoBuffer read_yuv(std::istream& is, int width, int height, ChromaLayout chroma = ChromaLayout::yuv420)
{
    if (width <= 0 || height <= 0)
        throw DimensionError("raw yuv: dimensions must be positive");
    VideoBuffer video;
    const std::size_t skip = detail::chroma_bytes(chroma, width, height);
    for (int index = 0; is.peek() != std::char_traits<char>::eof(); ++index) {
        Frame f(width, height, 0.0);
        if (!detail::read_luma(is, f))
            throw FormatError("raw yuv: frame " + std::to_string(index) + " truncated");
        if (skip > 0) {
            is.ignore(static_cast<std::streamsize>(skip));
            if (static_cast<std::size_t>(is.gcount()) != skip)
                throw FormatError("raw yuv: frame " + std::to_string(index) + " truncated");
        }
        video.frames.push_back(std::move(f));
    }
    return video;
}

inline void write_yuv(std::ostream& os, const VideoBuffer& video, ChromaLayout chroma = ChromaLayout::yuv420)
{
    if (video.empty())
        throw Error("write_yuv: empty video");
    video.check_uniform();
    for (const auto& f : video.frames) {
        detail::write_luma(os, f);
        detail::write_flat_chroma(os, chroma, f.width(), f.height());
    }
    if (!os)
        throw IoError("write_yuv: stream failure");
}

/// Binary PGM (P5), maxval 255.
inline Frame read_pgm(std::istream& is)
{
    auto token = [&is]() {
        std::string t;
        while (is >> t) {
            if (t[0] == '#') {
                std::string rest;
                std::getline(is, rest);
                continue;
            }
            return t;
        }
        throw FormatError("pgm: truncated header");
    };
    if (token() != "P5")
        throw FormatError("pgm: only binary P5 is supported");
    const int width = std::stoi(token());
    const int height = std::stoi(token());
    const int maxval = std::stoi(token());
    if (maxval != 255)
        throw FormatError("pgm: maxval must be 255");
    is.get();
    Frame f(width, height, 0.0);
    if (!detail::read_luma(is, f))
        throw FormatError("pgm: truncated raster");
    return f;
}

inline void write_pgm(std::ostream& os, const Frame& f)
{
    os << "P5\n" << f.width() << ' ' << f.height() << "\n255\n";
    detail::write_luma(os, f);
}

enum class VideoFormat { y4m, yuv, pgm };

inline VideoFormat guess_format(const std::string& path)
{
    auto ends_with = [&](const std::string& s) {
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".y4m"))
        return VideoFormat::y4m;
    if (ends_with(".yuv"))
        return VideoFormat::yuv;
    if (ends_with(".pgm"))
        return VideoFormat::pgm;
    throw FormatError("cannot infer video format of " + path + " (expected .y4m, .yuv or .pgm)");
}

/// Raw-yuv geometry; ignored for self-describing formats.
struct RawGeometry {
    int width = 0;
    int height = 0;
    ChromaLayout chroma = ChromaLayout::yuv420;
};

inline VideoBuffer read_video(const std::string& path, VideoFormat format, RawGeometry raw = {})
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path);
    switch (format) {
    case VideoFormat::y4m:
        return read_y4m(is);
    case VideoFormat::yuv:
        return read_yuv(is, raw.width, raw.height, raw.chroma);
    case VideoFormat::pgm: {
        VideoBuffer v;
        v.frames.push_back(read_pgm(is));
        return v;
    }
    }
    throw FormatError("unknown video format");
}

inline VideoBuffer read_video(const std::string& path, RawGeometry raw = {})
{
    return read_video(path, guess_format(path), raw);
}

inline Frame read_image(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path);
    return read_pgm(is);
}

inline void write_video(const VideoBuffer& video, const std::string& path, VideoFormat format,
                        ChromaLayout chroma = ChromaLayout::yuv420)
{
    if (video.empty())
        throw Error("write_video: empty video");
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open " + path + " for writing");
    switch (format) {
    case VideoFormat::y4m:
        write_y4m(os, video, chroma);
        break;
    case VideoFormat::yuv:
        write_yuv(os, video, chroma);
        break;
    case VideoFormat::pgm:
        if (video.size() != 1)
            throw FormatError("pgm holds exactly one frame");
        write_pgm(os, video.frames.front());
        break;
    }
    if (!os)
        throw IoError("write failure on " + path);
}

inline void write_video(const VideoBuffer& video, const std::string& path)
{
    write_video(video, path, guess_format(path));
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

enum class MotionKind { translate, zoom, rotate };

inline MotionKind parse_motion_kind(const std::string& s)
{
    if (s == "translate")
        return MotionKind::translate;
    if (s == "zoom")
        return MotionKind::zoom;
    if (s == "rotate")
        return MotionKind::rotate;
    throw ParameterError("unknown motion kind '" + s + "' (expected translate|zoom|rotate)");
}

struct SynthesisParams {
    MotionKind kind = MotionKind::translate;
    int frames = 10;
    /// translate: integer pixels per frame; zoom: scale factor per frame; rotate: degrees per frame.
    double rate = 2.0;
    int width = 64;  ///< output frame size
    int height = 64;
    /// translate direction, each component in {-1, 0, 1}; (0, 1) pans along columns.
    int dir_m = 0;
    int dir_n = 1;
};

namespace detail {

inline double bilinear(const Frame& f, double y, double x)
{
    const int y0 = static_cast<int>(std::floor(y));
    const int x0 = static_cast<int>(std::floor(x));
    const double fy = y - y0;
    const double fx = x - x0;
    auto at = [&](int m, int n) { return f(std::min(m, f.height() - 1), std::min(n, f.width() - 1)); };
    return (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) + fy * ((1 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1));
}

} // namespace detail

/// Deterministic synthetic sequence cut from `base`.
///
/// translate: frame i is the crop at offset i * rate * (dir_m, dir_n) (exact integer shift,
/// so frame i+1 at (m, n) equals frame i at (m + rate*dir_m, n + rate*dir_n));
/// zoom: frame i magnifies the base by rate^i about the centre; rotate: frame i is the base
/// rotated by i * rate degrees about the centre. zoom and rotate sample bilinearly.
inline VideoBuffer synthesize_sequence(const Frame& base, const SynthesisParams& p)
{
    if (p.frames < 1 || p.width < 1 || p.height < 1)
        throw ParameterError("synthesize_sequence: frames and size must be positive");
    VideoBuffer video;
    const double bc_m = (base.height() - 1) / 2.0;
    const double bc_n = (base.width() - 1) / 2.0;
    const double oc_m = (p.height - 1) / 2.0;
    const double oc_n = (p.width - 1) / 2.0;

    for (int i = 0; i < p.frames; ++i) {
        Frame f(p.width, p.height, 0.0);
        if (p.kind == MotionKind::translate) {
            const int step = static_cast<int>(std::lround(p.rate));
            if (static_cast<double>(step) != p.rate || step < 0)
                throw ParameterError("translate rate must be a non-negative integer");
            if (std::abs(p.dir_m) > 1 || std::abs(p.dir_n) > 1)
                throw ParameterError("translate direction components must be -1, 0 or 1");
            const int span = step * (p.frames - 1);
            const int om = (p.dir_m < 0 ? span : 0) + i * step * p.dir_m;
            const int on = (p.dir_n < 0 ? span : 0) + i * step * p.dir_n;
            if (p.height + span * std::abs(p.dir_m) > base.height() || p.width + span * std::abs(p.dir_n) > base.width())
                throw DimensionError("translate motion exceeds the base image extent");
            for (int m = 0; m < p.height; ++m)
                for (int n = 0; n < p.width; ++n)
                    f(m, n) = base(om + m, on + n);
        } else {
            double scale = 1.0;
            double angle = 0.0;
            if (p.kind == MotionKind::zoom) {
                if (!(p.rate > 0.0))
                    throw ParameterError("zoom rate must be positive");
                scale = std::pow(p.rate, i);
            } else {
                angle = i * p.rate * std::numbers::pi / 180.0;
            }
            const double cs = std::cos(angle) / scale;
            const double sn = std::sin(angle) / scale;
            for (int m = 0; m < p.height; ++m) {
                for (int n = 0; n < p.width; ++n) {
                    const double dy = m - oc_m;
                    const double dx = n - oc_n;
                    const double y = bc_m + cs * dy - sn * dx;
                    const double x = bc_n + sn * dy + cs * dx;
                    if (y < 0 || x < 0 || y > base.height() - 1 || x > base.width() - 1)
                        throw DimensionError("motion exceeds the base image extent at frame " + std::to_string(i));
                    f(m, n) = detail::bilinear(base, y, x);
                }
            }
        }
        video.frames.push_back(std::move(f));
    }
    return video;
}

/// Deterministic natural-looking texture in [16, 240]: multi-octave value noise with a
/// 1/f-like amplitude falloff plus a few hard-edged discs and bars.
inline Frame make_texture(int width, int height, std::uint64_t seed)
{
    auto uniform = [seed](std::uint64_t a, std::uint64_t b, std::uint64_t c) {
        const std::uint64_t h =
            detail::splitmix64(seed ^ detail::splitmix64(a * 0x9E3779B97F4A7C15ull ^ detail::splitmix64(b + 0x632BE59BD9B4E019ull * (c + 1))));
        return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
    };
    auto smooth = [](double t) { return t * t * t * (t * (t * 6 - 15) + 10); };

    Frame f(width, height, 0.0);
    double amplitude = 1.0;
    for (int octave = 0, cell = 32; cell >= 2; ++octave, cell /= 2, amplitude *= 0.6) {
        for (int m = 0; m < height; ++m) {
            for (int n = 0; n < width; ++n) {
                const int gm = m / cell, gn = n / cell;
                const double tm = smooth(static_cast<double>(m % cell) / cell);
                const double tn = smooth(static_cast<double>(n % cell) / cell);
                auto lattice = [&](int a, int b) {
                    return uniform(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b),
                                   static_cast<std::uint64_t>(octave));
                };
                const double v = (1 - tm) * ((1 - tn) * lattice(gm, gn) + tn * lattice(gm, gn + 1)) +
                                 tm * ((1 - tn) * lattice(gm + 1, gn) + tn * lattice(gm + 1, gn + 1));
                f(m, n) += amplitude * (v - 0.5);
            }
        }
    }
    const int shapes = std::max(4, width * height / 2048);
    for (int s = 0; s < shapes; ++s) {
        const double cm = uniform(1000 + s, 1, 99) * height;
        const double cn = uniform(1000 + s, 2, 99) * width;
        const double radius = 3.0 + uniform(1000 + s, 3, 99) * 12.0;
        const double level = uniform(1000 + s, 4, 99) - 0.5;
        const bool bar = uniform(1000 + s, 5, 99) < 0.4;
        for (int m = 0; m < height; ++m)
            for (int n = 0; n < width; ++n) {
                const bool inside = bar ? (std::abs(m - cm) < radius * 0.35 && std::abs(n - cn) < radius * 2.0)
                                        : std::hypot(m - cm, n - cn) < radius;
                if (inside)
                    f(m, n) = 0.5 * f(m, n) + level;
            }
    }
    double lo = f[0], hi = f[0];
    for (double v : f) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : f)
        v = std::round(16.0 + 224.0 * (v - lo) / span);
    return f;
}

} // namespace nrs

#endif
