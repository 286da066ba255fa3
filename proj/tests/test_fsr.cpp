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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nrs/fsr.hpp"
#include "nrs/metrics.hpp"
#include "support/wls_oracle.hpp"

namespace nrs {
namespace {

ClassGrid classes_from(const Mask& mask)
{
    ClassGrid c(mask.width(), mask.height(), PixelClass::missing);
    for (int m = 0; m < mask.height(); ++m)
        for (int n = 0; n < mask.width(); ++n)
            if (mask.acquired(m, n))
                c(m, n) = PixelClass::acquired;
    return c;
}

TEST(FsrParams, DefaultsAreStandardConfiguration)
{
    const FsrParams p;
    EXPECT_EQ(p.block_size, 4);
    EXPECT_EQ(p.border_width, 14);
    EXPECT_EQ(p.fft_size, 32);
    EXPECT_EQ(p.iterations, 100);
    EXPECT_DOUBLE_EQ(p.rho, 0.7);
    EXPECT_DOUBLE_EQ(p.gamma, 0.5);
    EXPECT_DOUBLE_EQ(p.delta, 0.5);
    EXPECT_NO_THROW(p.validate());
}

TEST(FsrParams, ValidateRejectsInconsistentGeometry)
{
    FsrParams p;
    p.border_width = 13;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.fft_size = 24;
    p.border_width = 10;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.rho = 1.0;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.gamma = 0.0;
    EXPECT_THROW(p.validate(), ParameterError);
    p = {};
    p.iterations = 0;
    EXPECT_THROW(p.validate(), ParameterError);
}

TEST(FsrParams, ParseFileFormat)
{
    std::istringstream in("# tuned\nblock_size = 8\nborder_width: 12\n\niterations 50 # fewer\nrho=0.8\n");
    const FsrParams p = parse_fsr_params(in);
    EXPECT_EQ(p.block_size, 8);
    EXPECT_EQ(p.border_width, 12);
    EXPECT_EQ(p.iterations, 50);
    EXPECT_DOUBLE_EQ(p.rho, 0.8);
    EXPECT_DOUBLE_EQ(p.gamma, 0.5);

    std::stringstream round;
    write_fsr_params(round, p);
    EXPECT_EQ(parse_fsr_params(round), p);
}

TEST(FsrParams, ParseErrors)
{
    std::istringstream unknown("sigma = 2\n");
    EXPECT_THROW(parse_fsr_params(unknown), ParameterError);
    std::istringstream bad_value("rho = 0.7x\n");
    EXPECT_THROW(parse_fsr_params(bad_value), ParameterError);
    std::istringstream missing_value("rho\n");
    EXPECT_THROW(parse_fsr_params(missing_value), ParameterError);
    std::istringstream inconsistent("block_size = 6\n");
    EXPECT_THROW(parse_fsr_params(inconsistent), ParameterError);
}

TEST(WeightWindow, AllMissingIsZero)
{
    const FsrParams p;
    const WeightWindow w = weight_window(ClassGrid(32, 32, PixelClass::missing), p);
    for (double v : w.w)
        EXPECT_EQ(v, 0.0);
}

TEST(WeightWindow, CentreWeights)
{
    const FsrParams p;
    ClassGrid area(32, 32, PixelClass::missing);
    area(14, 14) = PixelClass::acquired;
    area(14, 15) = PixelClass::reconstructed;
    // Single-pixel block: its centre is the pixel at (border, border).
    const WeightWindow one = weight_window(area, p, 1, 1);
    EXPECT_DOUBLE_EQ(one.w(14, 14), 1.0);
    EXPECT_DOUBLE_EQ(one.w(14, 15), 0.5 * 0.7);

    area(14, 14) = PixelClass::reconstructed;
    EXPECT_DOUBLE_EQ(weight_window(area, p, 1, 1).w(14, 14), 0.5);
}

TEST(WeightWindow, FourByFourBlockDecay)
{
    const FsrParams p;
    const WeightWindow w = weight_window(ClassGrid(32, 32, PixelClass::acquired), p);
    // The centre of a 4x4 block at offset 14 sits at (15.5, 15.5).
    EXPECT_NEAR(w.w(15, 15), std::pow(0.7, std::sqrt(0.5)), 1e-15);
    EXPECT_NEAR(w.w(0, 0), std::pow(0.7, std::hypot(15.5, 15.5)), 1e-18);
    EXPECT_EQ(w.w(15, 15), w.w(16, 16));
    EXPECT_EQ(w.w(3, 20), w.w(20, 3));
}

TEST(WeightWindow, AcquiredExceedsReconstructedAtEqualDistance)
{
    const FsrParams p;
    ClassGrid area(32, 32, PixelClass::acquired);
    for (int n = 0; n < 32; ++n)
        area(0, n) = PixelClass::reconstructed;
    const WeightWindow w = weight_window(area, p);
    for (int n = 0; n < 32; ++n)
        EXPECT_GT(w.w(31, n), w.w(0, n));
}

TEST(WeightWindow, WrongSizeThrows)
{
    EXPECT_THROW(weight_window(ClassGrid(16, 32), FsrParams{}), DimensionError);
}

TEST(BlockModel, ConstantAreaConvergesToDc)
{
    const FsrParams p;
    const Mask mask = generate_quadrant_mask(32, 32, 3);
    const ClassGrid cls = classes_from(mask);
    const double c = 173.0;
    Grid<double> area(32, 32, 0.0);
    for (std::size_t i = 0; i < area.size(); ++i)
        if (cls[i] == PixelClass::acquired)
            area[i] = c;
    const FsrModel model = generate_block_model(area, weight_window(cls, p), p);
    // DC is chosen first; once the residual reaches rounding level any later picks are noise.
    ASSERT_FALSE(model.selected.empty());
    EXPECT_EQ(model.selected[0], (FrequencyIndex{0, 0}));
    for (std::size_t i = 1; i < model.coefficients.size(); ++i)
        EXPECT_LT(std::abs(model.coefficients[i]), 1e-9 * c);
    for (double v : model.model)
        EXPECT_LT(std::abs(v - c), 1e-6 * c);
}

TEST(BlockModel, SinusoidFromQuadrantSamples)
{
    const FsrParams p;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Mask mask = generate_quadrant_mask(32, 32, seed);
        const auto a = oracle::make_pair_area(32, {{3, 5}}, {80.0}, {30.0}, mask);
        const FsrModel model = generate_block_model(a.sampled, weight_window(a.classes, p), p);
        double se = 0.0;
        for (std::size_t i = 0; i < a.full.size(); ++i)
            se += (model.model[i] - a.full[i]) * (model.model[i] - a.full[i]);
        const double mse = se / static_cast<double>(a.full.size());
        EXPECT_GT(10.0 * std::log10(255.0 * 255.0 / mse), 60.0) << "seed " << seed;
    }
}

TEST(BlockModel, ResidualIsMonotoneAndModelReal)
{
    const FsrParams p;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0, 255);
    for (int trial = 0; trial < 10; ++trial) {
        const Mask mask = generate_quadrant_mask(32, 32, 40 + trial);
        ClassGrid cls = classes_from(mask);
        // Some reconstructed context as it appears in later raster blocks.
        for (int m = 0; m < 14; ++m)
            for (int n = 0; n < 32; ++n)
                if (cls(m, n) == PixelClass::missing)
                    cls(m, n) = PixelClass::reconstructed;
        Grid<double> area(32, 32, 0.0);
        for (std::size_t i = 0; i < area.size(); ++i)
            if (cls[i] != PixelClass::missing)
                area[i] = u(rng);
        ResidualTrace trace;
        const FsrModel model = generate_block_model(area, weight_window(cls, p), p, &trace);
        ASSERT_EQ(trace.size(), static_cast<std::size_t>(p.iterations + 1));
        for (std::size_t i = 1; i < trace.size(); ++i)
            EXPECT_LE(trace[i], trace[i - 1] * (1.0 + 1e-12)) << "iteration " << i;
        EXPECT_LT(model.max_imag, 1e-9);
    }
}

TEST(BlockModel, SelectionsComeInConjugatePairs)
{
    const FsrParams p;
    const Mask mask = generate_quadrant_mask(32, 32, 5);
    const auto a = oracle::make_pair_area(32, {{3, 5}, {7, 0}}, {50.0, 20.0}, {-10.0, 5.0}, mask);
    const FsrModel model = generate_block_model(a.sampled, weight_window(a.classes, p), p);
    for (const auto& f : model.selected) {
        const FrequencyIndex c{(32 - f.k) % 32, (32 - f.l) % 32};
        EXPECT_EQ(model.coefficients(c.k, c.l), std::conj(model.coefficients(f.k, f.l)));
        EXPECT_TRUE(std::find(model.selected.begin(), model.selected.end(), c) != model.selected.end());
    }
}

TEST(BlockModel, ZeroWindowGivesZeroModel)
{
    const FsrParams p;
    const FsrModel model = generate_block_model(Grid<double>(32, 32, 5.0), WeightWindow{Grid<double>(32, 32, 0.0)}, p);
    EXPECT_TRUE(model.selected.empty());
    for (double v : model.model)
        EXPECT_EQ(v, 0.0);
}

TEST(BlockModel, MatchesWeightedLeastSquaresOracle)
{
    // 16x16 areas keep the two-pair support identifiable from 64 samples.
    FsrParams p;
    p.fft_size = 16;
    p.block_size = 4;
    p.border_width = 6;
    const int n = 16;
    std::mt19937_64 rng(2026);
    std::uniform_int_distribution<int> fk(0, n - 1);
    std::uniform_int_distribution<int> fl(0, n / 2);
    std::normal_distribution<double> amp(0, 40);
    for (int trial = 0; trial < 24; ++trial) {
        std::vector<FrequencyIndex> pairs;
        std::vector<double> ca, sa;
        while (static_cast<int>(pairs.size()) < 1 + trial % 2) {
            const FrequencyIndex f{fk(rng), fl(rng)};
            if (f == FrequencyIndex{0, 0})
                continue;
            bool duplicate = false;
            for (auto q : pairs)
                duplicate |= q == f || (q.k == (n - f.k) % n && q.l == (n - f.l) % n);
            if (duplicate)
                continue;
            pairs.push_back(f);
            ca.push_back(amp(rng));
            sa.push_back(oracle::self_conjugate(f, n) ? 0.0 : amp(rng));
        }
        const Mask mask = generate_quadrant_mask(n, n, rng());
        const auto a = oracle::make_pair_area(n, pairs, ca, sa, mask);
        const WeightWindow w = weight_window(a.classes, p);
        const FsrModel model = generate_block_model(a.sampled, w, p);
        const auto expected = oracle::weighted_least_squares(a.sampled, w.w, pairs);
        EXPECT_LT(oracle::relative_error(model.coefficients, expected), 1e-4) << "trial " << trial;
    }
}

TEST(BlockModel, Deterministic)
{
    const FsrParams p;
    const Mask mask = generate_quadrant_mask(32, 32, 12);
    const auto a = oracle::make_pair_area(32, {{1, 2}}, {40.0}, {9.0}, mask);
    const WeightWindow w = weight_window(a.classes, p);
    const FsrModel x = generate_block_model(a.sampled, w, p);
    const FsrModel y = generate_block_model(a.sampled, w, p);
    EXPECT_EQ(x.model, y.model);
    EXPECT_EQ(x.coefficients, y.coefficients);
}

TEST(ReconstructFrame, FullyAcquiredIsIdentity)
{
    Frame f(20, 12);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = static_cast<double>(i % 251);
    FsrReport report;
    EXPECT_EQ(reconstruct_frame(apply_mask(f, Mask(20, 12, true)), FsrParams{}, &report), f);
    EXPECT_EQ(report.blocks_processed, 0);
    EXPECT_EQ(report.blocks_total, 15);
}

TEST(ReconstructFrame, PreservesAcquiredAndFillsMissing)
{
    const Frame base = [] {
        Frame f(38, 30);
        for (int m = 0; m < 30; ++m)
            for (int n = 0; n < 38; ++n)
                f(m, n) = 120 + 60 * std::sin(0.21 * m) * std::cos(0.17 * n);
        return f;
    }();
    const Mask mask = generate_quadrant_mask(38, 30, 21);
    const SampledFrame s = apply_mask(base, mask);
    FsrReport report;
    const Frame out = reconstruct_frame(s, FsrParams{}, &report);
    // 38x30 is not a multiple of 4: the last block row and column are shrunk.
    EXPECT_EQ(report.blocks_total, 10 * 8);
    EXPECT_EQ(report.blocks_processed, 80);
    for (int m = 0; m < 30; ++m)
        for (int n = 0; n < 38; ++n) {
            if (mask.acquired(m, n)) {
                EXPECT_EQ(out(m, n), s.frame(m, n));
            }
            EXPECT_GE(out(m, n), 0.0);
            EXPECT_LE(out(m, n), 255.0);
        }
    EXPECT_GT(psnr(base, out, 4), 35.0);
    EXPECT_LT(report.max_imag, 1e-9);
}

TEST(ReconstructFrame, SinusoidFrameAbove50Db)
{
    Frame f(128, 128);
    for (int m = 0; m < 128; ++m)
        for (int n = 0; n < 128; ++n)
            f(m, n) = 128 + 100 * std::cos(2 * std::numbers::pi * (3 * m + 5 * n) / 32.0);
    const Frame out = reconstruct_frame(apply_mask(f, generate_quadrant_mask(128, 128, 1)), FsrParams{});
    EXPECT_GT(psnr(f, out, 4), 50.0);
}

TEST(ReconstructFrame, ClipsToPixelRange)
{
    // Saturated checkerboard pushes the model outside [0, 255].
    Frame f(16, 16);
    for (int m = 0; m < 16; ++m)
        for (int n = 0; n < 16; ++n)
            f(m, n) = ((m / 2 + n / 2) % 2) ? 255.0 : 0.0;
    const Frame out = reconstruct_frame(apply_mask(f, generate_quadrant_mask(16, 16, 2)), FsrParams{});
    for (double v : out) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 255.0);
    }
}

TEST(ReconstructFrame, ReconstructedInputsAreKept)
{
    Frame f(8, 8, 0.0);
    ClassGrid cls(8, 8, PixelClass::missing);
    cls(0, 0) = PixelClass::acquired;
    f(0, 0) = 100;
    cls(5, 5) = PixelClass::reconstructed;
    f(5, 5) = 33;
    const Frame out = reconstruct_frame(f, cls, FsrParams{});
    EXPECT_EQ(out(0, 0), 100.0);
    EXPECT_EQ(out(5, 5), 33.0);
}

TEST(ReconstructFrame, NoInformationIsFlagged)
{
    FsrReport report;
    const Frame out = reconstruct_frame(apply_mask(Frame(8, 8, 50.0), Mask(8, 8, false)), FsrParams{}, &report);
    EXPECT_TRUE(report.no_acquired_pixels);
    EXPECT_EQ(report.blocks_without_support, 4);
    for (double v : out)
        EXPECT_EQ(v, 0.0);
}

TEST(ReconstructFrame, Errors)
{
    EXPECT_THROW(reconstruct_frame(Frame(), ClassGrid(), FsrParams{}), DimensionError);
    EXPECT_THROW(reconstruct_frame(Frame(3, 8), ClassGrid(3, 8), FsrParams{}), DimensionError);
    EXPECT_THROW(reconstruct_frame(Frame(8, 8), ClassGrid(8, 4), FsrParams{}), DimensionError);
    FsrParams bad;
    bad.border_width = 3;
    EXPECT_THROW(reconstruct_frame(Frame(8, 8), ClassGrid(8, 8), bad), ParameterError);
}

} // namespace
} // namespace nrs
