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

#ifndef NRS_SAMPLING_HPP
#define NRS_SAMPLING_HPP

#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace nrs {

/// Boolean grid of sensor positions: true = acquired (set A), false = missing (set B).
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, bool fill = false) : bits_(width, height, fill ? 1 : 0) {}

    int width() const noexcept { return bits_.width(); }
    int height() const noexcept { return bits_.height(); }
    bool acquired(int m, int n) const noexcept { return bits_(m, n) != 0; }
    void set(int m, int n, bool v) noexcept { bits_(m, n) = v ? 1 : 0; }
    const Grid<std::uint8_t>& bits() const noexcept { return bits_; }

    std::size_t count_acquired() const noexcept
    {
        std::size_t c = 0;
        for (auto b : bits_)
            c += b;
        return c;
    }

    /// True when dimensions are even and every aligned 2x2 cell holds exactly one acquired pixel.
    bool is_quadrant_pattern() const noexcept
    {
        if (width() % 2 != 0 || height() % 2 != 0)
            return false;
        for (int m = 0; m < height(); m += 2)
            for (int n = 0; n < width(); n += 2)
                if (bits_(m, n) + bits_(m, n + 1) + bits_(m + 1, n) + bits_(m + 1, n + 1) != 1)
                    return false;
        return true;
    }

    template <class T>
    bool same_shape(const Grid<T>& g) const noexcept
    {
        return bits_.same_shape(g);
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    Grid<std::uint8_t> bits_;
};

/// Sensor output: frame values (0 wherever the mask is false) and the fixed sampling mask.
struct SampledFrame {
    Frame frame;
    std::shared_ptr<const Mask> mask;

    ClassGrid classes() const
    {
        ClassGrid c(frame.width(), frame.height(), PixelClass::missing);
        for (int m = 0; m < frame.height(); ++m)
            for (int n = 0; n < frame.width(); ++n)
                if (mask->acquired(m, n))
                    c(m, n) = PixelClass::acquired;
        return c;
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Quadrant index (0 = top-left, 1 = top-right, 2 = bottom-left, 3 = bottom-right)
/// of cell `cell` in raster order.
///
/// Counter-based: the top two bits of SplitMix64(seed + (cell + 1) * 0x9E3779B97F4A7C15).
/// Integer-only, so masks are bit-identical on every platform.
inline int quadrant_for_cell(std::uint64_t seed, std::uint64_t cell) noexcept
{
    return static_cast<int>(detail::splitmix64(seed + (cell + 1) * 0x9E3779B97F4A7C15ull) >> 62);
}

/// Fixed non-regular pattern: one uniformly chosen quadrant of every 2x2 cell is acquired.
inline Mask generate_quadrant_mask(int width, int height, std::uint64_t seed)
{
    if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0)
        throw DimensionError("quadrant mask needs positive even dimensions, got " + std::to_string(width) + "x" +
                             std::to_string(height));
    Mask mask(width, height, false);
    const int cells_per_row = width / 2;
    for (int cm = 0; cm < height / 2; ++cm) {
        for (int cn = 0; cn < cells_per_row; ++cn) {
            const auto cell = static_cast<std::uint64_t>(cm) * static_cast<std::uint64_t>(cells_per_row) +
                              static_cast<std::uint64_t>(cn);
            const int q = quadrant_for_cell(seed, cell);
            mask.set(2 * cm + q / 2, 2 * cn + q % 2, true);
        }
    }
    return mask;
}

inline SampledFrame apply_mask(const Frame& full, std::shared_ptr<const Mask> mask)
{
    if (!mask || !mask->same_shape(full))
        throw DimensionError("apply_mask: frame and mask dimensions differ");
    SampledFrame out{Frame(full.width(), full.height(), 0.0), std::move(mask)};
    for (int m = 0; m < full.height(); ++m)
        for (int n = 0; n < full.width(); ++n)
            if (out.mask->acquired(m, n))
                out.frame(m, n) = full(m, n);
    return out;
}

inline SampledFrame apply_mask(const Frame& full, const Mask& mask)
{
    return apply_mask(full, std::make_shared<const Mask>(mask));
}

// Packed binary mask file:
//   "NRSMASK1\n" "<width> <height>\n" then width*height bits, row-major,
//   8 per byte, MSB first; the final byte is zero-padded.

inline void write_mask(std::ostream& os, const Mask& mask)
{
    os << "NRSMASK1\n" << mask.width() << ' ' << mask.height() << '\n';
    std::uint8_t byte = 0;
    int filled = 0;
    for (auto b : mask.bits()) {
        byte = static_cast<std::uint8_t>((byte << 1) | (b ? 1 : 0));
        if (++filled == 8) {
            os.put(static_cast<char>(byte));
            byte = 0;
            filled = 0;
        }
    }
    if (filled > 0)
        os.put(static_cast<char>(byte << (8 - filled)));
    if (!os)
        throw IoError("write_mask: stream failure");
}

inline Mask read_mask(std::istream& is)
{
    std::string magic;
    if (!std::getline(is, magic) || magic != "NRSMASK1")
        throw FormatError("read_mask: missing NRSMASK1 magic");
    int width = 0, height = 0;
    if (!(is >> width >> height) || width <= 0 || height <= 0)
        throw FormatError("read_mask: bad dimensions");
    if (is.get() != '\n')
        throw FormatError("read_mask: expected newline after dimensions");
    Mask mask(width, height, false);
    const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<char> packed((total + 7) / 8);
    if (!is.read(packed.data(), static_cast<std::streamsize>(packed.size())))
        throw FormatError("read_mask: truncated bit payload");
    for (std::size_t i = 0; i < total; ++i) {
        const bool bit = (static_cast<unsigned char>(packed[i / 8]) >> (7 - i % 8)) & 1u;
        mask.set(static_cast<int>(i / static_cast<std::size_t>(width)),
                 static_cast<int>(i % static_cast<std::size_t>(width)), bit);
    }
    return mask;
}

/// Plain PBM (P1). PBM uses 1 for black; acquired positions are written as 1.
inline void write_mask_pbm(std::ostream& os, const Mask& mask)
{
    os << "P1\n" << mask.width() << ' ' << mask.height() << '\n';
    for (int m = 0; m < mask.height(); ++m) {
        for (int n = 0; n < mask.width(); ++n)
            os << (n ? " " : "") << (mask.acquired(m, n) ? '1' : '0');
        os << '\n';
    }
}

inline Mask read_mask_pbm(std::istream& is)
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
        throw FormatError("read_mask_pbm: unexpected end of file");
    };
    if (token() != "P1")
        throw FormatError("read_mask_pbm: not a plain PBM");
    const int width = std::stoi(token());
    const int height = std::stoi(token());
    Mask mask(width, height, false);
    for (int m = 0; m < height; ++m) {
        for (int n = 0; n < width; ++n) {
            char c = 0;
            do {
                if (!is.get(c))
                    throw FormatError("read_mask_pbm: truncated raster");
            } while (c != '0' && c != '1');
            mask.set(m, n, c == '1');
        }
    }
    return mask;
}

inline void save_mask(const std::string& path, const Mask& mask)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open " + path + " for writing");
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".pbm")
        write_mask_pbm(os, mask);
    else
        write_mask(os, mask);
}

inline Mask load_mask(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path);
    if (is.peek() == 'P')
        return read_mask_pbm(is);
    return read_mask(is);
}

} // namespace nrs

#endif
