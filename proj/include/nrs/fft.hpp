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

#ifndef NRS_FFT_HPP
#define NRS_FFT_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace nrs::fft {

using complex = std::complex<double>;

constexpr bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

/// Precomputed radix-2 plan for one transform length.
class Plan {
public:
    explicit Plan(int n) : n_(n)
    {
        if (!is_power_of_two(n))
            throw ParameterError("FFT length must be a power of two, got " + std::to_string(n));
        twiddle_.resize(static_cast<std::size_t>(n / 2));
        for (int k = 0; k < n / 2; ++k) {
            const double a = -2.0 * std::numbers::pi * k / n;
            twiddle_[static_cast<std::size_t>(k)] = {std::cos(a), std::sin(a)};
        }
        reversed_.resize(static_cast<std::size_t>(n));
        int bits = 0;
        while ((1 << bits) < n)
            ++bits;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < bits; ++b)
                r |= ((i >> b) & 1) << (bits - 1 - b);
            reversed_[static_cast<std::size_t>(i)] = r;
        }
    }

    int size() const noexcept { return n_; }

    /// In-place unnormalized transform. forward: X[k] = sum x[j] e^{-2 pi i jk/n};
    /// inverse uses e^{+2 pi i jk/n} without the 1/n factor.
    void transform(std::span<complex> x, bool inverse) const
    {
        const auto n = static_cast<std::size_t>(n_);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<std::size_t>(reversed_[i]);
            if (i < r)
                std::swap(x[i], x[r]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = n / len;
            for (std::size_t start = 0; start < n; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    complex t = twiddle_[j * step];
                    if (inverse)
                        t = std::conj(t);
                    const complex u = x[start + j];
                    const complex v = x[start + j + half] * t;
                    x[start + j] = u + v;
                    x[start + j + half] = u - v;
                }
            }
        }
    }

    /// Separable 2-D transform of a square n x n grid, in place.
    void transform2d(Grid<complex>& g, bool inverse) const
    {
        if (g.width() != n_ || g.height() != n_)
            throw DimensionError("transform2d: grid must be " + std::to_string(n_) + "x" + std::to_string(n_));
        for (int m = 0; m < n_; ++m)
            transform(g.row(m), inverse);
        std::vector<complex> column(static_cast<std::size_t>(n_));
        for (int c = 0; c < n_; ++c) {
            for (int m = 0; m < n_; ++m)
                column[static_cast<std::size_t>(m)] = g(m, c);
            transform(column, inverse);
            for (int m = 0; m < n_; ++m)
                g(m, c) = column[static_cast<std::size_t>(m)];
        }
    }

private:
    int n_;
    std::vector<complex> twiddle_;
    std::vector<int> reversed_;
};

} // namespace nrs::fft

#endif
