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

#ifndef NRS_GRID_HPP
#define NRS_GRID_HPP

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace nrs {

/// Dense row-major 2-D array. Coordinates are (m, n) = (row, column).
template <class T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height)
    {
        if (width < 0 || height < 0)
            throw DimensionError("negative grid dimension");
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int m, int n) const noexcept
    {
        return m >= 0 && n >= 0 && m < height_ && n < width_;
    }

    T& operator()(int m, int n) noexcept
    {
        assert(contains(m, n));
        return data_[index(m, n)];
    }
    const T& operator()(int m, int n) const noexcept
    {
        assert(contains(m, n));
        return data_[index(m, n)];
    }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> row(int m) noexcept
    {
        return {data_.data() + index(m, 0), static_cast<std::size_t>(width_)};
    }
    std::span<const T> row(int m) const noexcept
    {
        return {data_.data() + index(m, 0), static_cast<std::size_t>(width_)};
    }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }

    template <class U>
    bool same_shape(const Grid<U>& other) const noexcept
    {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid& a, const Grid& b)
    {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    std::size_t index(int m, int n) const noexcept
    {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(n);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Real-valued full-resolution luma frame; 8-bit sources are stored unscaled in [0, 255].
using Frame = Grid<double>;

/// Role of a pixel inside a reconstruction area.
enum class PixelClass : std::uint8_t {
    missing = 0,
    reconstructed = 1, ///< estimate: filled by an earlier block or projected from another frame
    acquired = 2,      ///< originally sampled by the sensor
};

using ClassGrid = Grid<PixelClass>;

template <class A, class B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what)
{
    if (!a.same_shape(b))
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()) + ")");
}

inline double clip8(double v) noexcept
{
    return v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
}

} // namespace nrs

#endif
