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

// SSIM fixtures shared by the metric tests and the acceptance check.

#ifndef NRS_TESTS_SSIM_FIXTURES_HPP
#define NRS_TESTS_SSIM_FIXTURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "nrs/grid.hpp"

namespace nrs::fixtures {

inline constexpr int fixture_width = 40;
inline constexpr int fixture_height = 36;

inline Frame lcg_frame(std::uint32_t seed)
{
    Frame f(fixture_width, fixture_height);
    std::uint64_t s = seed;
    for (double& v : f) {
        s = (s * 1103515245u + 12345u) % (1u << 31);
        v = static_cast<double>((s >> 16) & 255u);
    }
    return f;
}

inline Frame checker()
{
    Frame f(fixture_width, fixture_height);
    for (int m = 0; m < fixture_height; ++m)
        for (int n = 0; n < fixture_width; ++n)
            f(m, n) = ((m / 6) + (n / 6)) % 2 == 1 ? 200.0 : 40.0;
    return f;
}

// Same formulas as tests/oracles/ssim_fixtures.py.
inline std::pair<Frame, Frame> make_fixture(int i)
{
    const int w = fixture_width, h = fixture_height;
    Frame ref(w, h), test(w, h);
    switch (i) {
    case 0: {
        ref = lcg_frame(1);
        const Frame noise = lcg_frame(2);
        for (std::size_t j = 0; j < ref.size(); ++j)
            test[j] = clip8(ref[j] + std::fmod(noise[j], 21.0) - 10.0);
        break;
    }
    case 1:
        for (int m = 0; m < h; ++m)
            for (int n = 0; n < w; ++n) {
                ref(m, n) = (4 * m + 3 * n) % 256;
                test(m, n) = (4 * m + 3 * n + (m * n) % 7) % 256;
            }
        break;
    case 2:
        ref = checker();
        for (int m = 0; m < h; ++m)
            for (int n = 0; n < w; ++n) {
                double acc = 0.0;
                for (int dm = -1; dm <= 1; ++dm)
                    for (int dn = -1; dn <= 1; ++dn)
                        acc += ref(std::clamp(m + dm, 0, h - 1), std::clamp(n + dn, 0, w - 1));
                test(m, n) = std::floor(acc / 9.0);
            }
        break;
    case 3:
        ref = lcg_frame(3);
        break;
    default:
        ref = checker();
        for (std::size_t j = 0; j < ref.size(); ++j)
            test[j] = clip8(ref[j] + 10.0);
    }
    return {ref, test};
}

// Values produced by scikit-image structural_similarity (data_range=255,
// use_sample_covariance=False) on the margin-cropped fixtures.
inline constexpr double skimage_gaussian[5] = {0.996758879008, 0.974798944582, 0.756199453913, 0.000004406315,
                                        0.995752384976};
inline constexpr double skimage_uniform[5] = {0.996876671877, 0.991745669258, 0.809198707345, 0.000004099699,
                                       0.996805508442};

} // namespace nrs::fixtures

#endif
