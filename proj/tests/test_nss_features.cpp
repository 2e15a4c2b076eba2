// Copyright 2026 The GameVQP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "gamevqp/nss_features.hpp"
#include "gtest/gtest.h"
#include "support/oracles.hpp"
#include "support/synth.hpp"

namespace gamevqp {
namespace {

PixelPlane noise_plane(int w, int h, std::uint64_t seed, double mean = 128.0, double sd = 20.0) {
  Rng rng = make_rng(seed);
  PixelPlane p(w, h);
  for (double& v : p.samples()) v = mean + sd * standard_normal(rng);
  return p;
}

TEST(Sobel, ConstantRampAndSize) {
  const PixelPlane flat = sobel_magnitude(PixelPlane(5, 5, 42.0));
  EXPECT_EQ(flat.width(), 3);
  for (double v : flat.samples()) EXPECT_EQ(v, 0.0);
  PixelPlane ramp(6, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 6; ++x) ramp.at(x, y) = x;
  }
  const PixelPlane m = sobel_magnitude(ramp);
  for (double v : m.samples()) EXPECT_EQ(v, 8.0);
  EXPECT_THROW(sobel_magnitude(PixelPlane(2, 2)), DimensionError);
}

TEST(SiTi, ConstantAndRampClipsAreExactlyZero) {
  const int w = 16, h = 16;
  std::vector<std::vector<double>> constant(5, std::vector<double>(w * h, 77.0));
  EXPECT_EQ(spatial_info(synth::clip_from(constant, w, h)), 0.0);
  EXPECT_EQ(temporal_info(synth::clip_from(constant, w, h)), 0.0);
  std::vector<std::vector<double>> ramp;
  for (int t = 0; t < 5; ++t) {
    std::vector<double> f(w * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) f[y * w + x] = 3 * x + 7 * t;
    }
    ramp.push_back(f);
  }
  EXPECT_EQ(spatial_info(synth::clip_from(ramp, w, h)), 0.0);
  EXPECT_EQ(temporal_info(synth::clip_from(ramp, w, h)), 0.0);
  // Oblique ramp: constant but irrational gradient magnitude.
  std::vector<std::vector<double>> oblique(3, std::vector<double>(w * h));
  for (auto& f : oblique) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) f[y * w + x] = 10 * x + 3 * y;
    }
  }
  EXPECT_EQ(spatial_info(synth::clip_from(oblique, w, h)), 0.0);
}

TEST(SiTi, SinglePixelChange) {
  const VideoClip clip = synth::clip_from({{0, 0, 0, 0}, {10, 0, 0, 0}}, 2, 2);
  EXPECT_NEAR(temporal_info(clip), 4.330127018922193, 1e-12);
  EXPECT_THROW(temporal_info(synth::clip_from({{0, 0, 0, 0}}, 2, 2)), InsufficientFrames);
}

TEST(SiTi, BrightBlockMatchesReference) {
  std::vector<double> flat(64, 50.0), block(64, 50.0);
  for (int y = 3; y < 5; ++y) {
    for (int x = 3; x < 5; ++x) block[y * 8 + x] = 200.0;
  }
  const VideoClip clip = synth::clip_from({flat, block}, 8, 8);
  EXPECT_NEAR(spatial_info(clip), oracle::spatial_info({flat, block}, 8, 8), 1e-9);
  EXPECT_GT(spatial_info(clip), 0.0);
}

TEST(SiTi, RandomClipsMatchReference) {
  Rng rng = make_rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> frames(8, std::vector<double>(256));
    for (auto& f : frames) {
      for (double& v : f) v = static_cast<double>(uniform_index(rng, 256));
    }
    const VideoClip clip = synth::clip_from(frames, 16, 16);
    EXPECT_NEAR(spatial_info(clip), oracle::spatial_info(frames, 16, 16), 1e-9);
    EXPECT_NEAR(temporal_info(clip), oracle::temporal_info(frames), 1e-9);
    SiTiAccumulator acc;
    for (const Frame& f : clip.frames()) acc.push(luma(f));
    EXPECT_EQ(acc.si(), spatial_info(clip));
    EXPECT_EQ(acc.ti(), temporal_info(clip));
  }
}

TEST(Mscn, ConstantPlaneAndSize) {
  const PixelPlane m = mscn(PixelPlane(9, 9, 100.0));
  for (double v : m.samples()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(mscn(PixelPlane(6, 9)), DimensionError);
}

TEST(Mscn, WhiteNoiseMeanNearZero) {
  const PixelPlane m = mscn(noise_plane(256, 256, 4));
  EXPECT_LT(std::abs(mean(m.samples())), 0.05);
}

TEST(Mscn, NearContrastInvariance) {
  Rng rng = make_rng(8);
  PixelPlane p(64, 64), q(64, 64);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p.samples()[i] = static_cast<double>(uniform_index(rng, 128));
    q.samples()[i] = 2.0 * p.samples()[i];
  }
  const PixelPlane a = mscn(p), b = mscn(q);
  std::size_t close = 0;
  for (std::size_t i = 0; i < a.size(); ++i) close += std::abs(a.samples()[i] - b.samples()[i]) <= 0.02;
  EXPECT_GE(close, a.size() * 95 / 100);
}

TEST(ShapeGrid, BoundsAndMonotoneRatio) {
  const auto& g = detail::shape_grid();
  ASSERT_EQ(g.shape.size(), 9801u);
  EXPECT_DOUBLE_EQ(g.shape.front(), 0.2);
  EXPECT_NEAR(g.shape.back(), 10.0, 1e-12);
  for (std::size_t k = 1; k < g.ratio.size(); ++k) ASSERT_GT(g.ratio[k], g.ratio[k - 1]);
  EXPECT_NEAR(detail::ggd_ratio(2.0), 2.0 / std::numbers::pi, 1e-12);
  EXPECT_NEAR(detail::ggd_ratio(1.0), 0.5, 1e-12);
}

TEST(FitGgd, NormalAndLaplace) {
  Rng rng = make_rng(1);
  std::vector<double> normal(100000), laplace(100000);
  for (double& x : normal) x = standard_normal(rng);
  for (double& x : laplace) {
    const double u = uniform01(rng) - 0.5;
    x = -std::copysign(std::log(1.0 - 2.0 * std::abs(u)), u);
  }
  const GgdFit n = fit_ggd(normal);
  EXPECT_GE(n.alpha, 1.9);
  EXPECT_LE(n.alpha, 2.1);
  EXPECT_GE(n.sigma, 0.97);
  EXPECT_LE(n.sigma, 1.03);
  const GgdFit l = fit_ggd(laplace);
  EXPECT_GE(l.alpha, 0.9);
  EXPECT_LE(l.alpha, 1.1);
  EXPECT_THROW(fit_ggd(std::vector<double>(1000, 0.0)), DegenerateInput);
  EXPECT_THROW(fit_ggd(std::vector<double>(50, 1.0)), DegenerateInput);
}

TEST(FitGgd, RecoversPlantedShapes) {
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const GgdFit fit = fit_ggd(synth::ggd_samples(alpha, 1.5, 100000, seed));
      EXPECT_NEAR(fit.alpha, alpha, 0.1) << "alpha0=" << alpha << " seed=" << seed;
      EXPECT_NEAR(fit.sigma, 1.5, 0.05);
    }
  }
}

TEST(FitAggd, SymmetricAndAsymmetricSamples) {
  const AggdFit sym = fit_aggd(synth::ggd_samples(1.0, 1.0, 100000, 3));
  EXPECT_LE(std::abs(sym.sigma_l - sym.sigma_r), 0.05 * sym.sigma_l);
  EXPECT_LE(std::abs(sym.eta), 0.05);

  Rng rng = make_rng(2);
  std::vector<double> mix;
  for (int i = 0; i < 1000; ++i) mix.push_back(-std::abs(standard_normal(rng)));
  for (int i = 0; i < 2000; ++i) mix.push_back(2.0 * std::abs(standard_normal(rng)));
  const AggdFit asym = fit_aggd(mix);
  EXPECT_GT(asym.sigma_r, asym.sigma_l);
  EXPECT_GT(asym.eta, 0.0);
  EXPECT_THROW(fit_aggd(std::vector<double>(500, 1.0)), DegenerateInput);
}

TEST(FitAggd, RecoversPlantedShapeAndScales) {
  for (double nu : {0.5, 1.0, 2.0, 4.0}) {
    const AggdFit fit = fit_aggd(synth::aggd_samples(nu, 0.8, 1.6, 100000, 17));
    EXPECT_NEAR(fit.nu, nu, 0.1) << "nu0=" << nu;
    EXPECT_NEAR(fit.sigma_l, 0.8, 0.03);
    EXPECT_NEAR(fit.sigma_r, 1.6, 0.06);
    // Mean of the planted distribution.
    const double expected_eta = (1.6 - 0.8) * std::sqrt(std::tgamma(1 / nu) / std::tgamma(3 / nu)) *
                                std::tgamma(2 / nu) / std::tgamma(1 / nu);
    const auto xs = synth::aggd_samples(nu, 0.8, 1.6, 100000, 17);
    EXPECT_NEAR(expected_eta, mean(xs), 0.02);
    EXPECT_NEAR(fit.eta, expected_eta, 0.05);
  }
}

TEST(Brisque, NamesAndShapes) {
  const auto names = brisque_feature_names(2);
  ASSERT_EQ(names.size(), 36u);
  EXPECT_EQ(names[0], "s1_ggd_alpha");
  EXPECT_EQ(names[2], "s1_h_nu");
  EXPECT_EQ(names[17], "s1_d2_sigma_r");
  EXPECT_EQ(names[18], "s2_ggd_alpha");
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), 36u);
  EXPECT_EQ(brisque_feature_names(1).size(), 18u);
  EXPECT_THROW(brisque_frame_features(PixelPlane(13, 20, 1.0)), DimensionError);
}

TEST(Brisque, FlatPlaneGivesCanonicalVector) {
  const FeatureVector fv = brisque_frame_features(PixelPlane(16, 16, 90.0));
  for (std::size_t i = 0; i < fv.values.size(); ++i) {
    const bool shape = fv.names[i].ends_with("alpha") || fv.names[i].ends_with("nu");
    EXPECT_EQ(fv.values[i], shape ? 2.0 : 0.0) << fv.names[i];
  }
}

TEST(Brisque, WhiteNoiseIsFiniteAndNearGaussian) {
  const PixelPlane p = noise_plane(64, 64, 12);
  const FeatureVector a = brisque_frame_features(p), b = brisque_frame_features(p);
  ASSERT_EQ(a.values.size(), 36u);
  EXPECT_EQ(a, b);
  for (double v : a.values) EXPECT_TRUE(std::isfinite(v));
  // Local normalisation bounds each coefficient, so white noise maps to a
  // lighter-than-Gaussian MSCN distribution (shape near 3).
  const std::vector<double> raw(p.samples().begin(), p.samples().end());
  EXPECT_NEAR(a.values[0], oracle::ggd_shape(oracle::mscn(raw, 64, 64)), 0.0015);
  EXPECT_GT(a.values[0], 2.0);
  EXPECT_LT(a.values[0], 3.5);
  EXPECT_GT(a.values[18], 2.0);
  EXPECT_LT(a.values[18], 3.5);
}

TEST(Mscn, MatchesDirectConvolution) {
  const PixelPlane p = noise_plane(20, 17, 31, 100.0, 30.0);
  const std::vector<double> raw(p.samples().begin(), p.samples().end());
  const auto expected = oracle::mscn(raw, 20, 17);
  const PixelPlane got = mscn(p);
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(got.samples()[i], expected[i], 1e-9);
}

TEST(Brisque, OffsetInvariance) {
  const PixelPlane p = noise_plane(32, 32, 6, 128.0, 15.0);
  const FeatureVector base = brisque_frame_features(p);
  for (double c : {-10.0, -3.5, 4.0, 10.0}) {
    PixelPlane q = p;
    for (double& v : q.samples()) v += c;
    const FeatureVector shifted = brisque_frame_features(q);
    for (std::size_t i = 0; i < base.values.size(); ++i) {
      EXPECT_NEAR(shifted.values[i], base.values[i], 1e-6) << base.names[i];
    }
  }
}

TEST(FrameSampling, OnePerSecondWithMinimum) {
  EXPECT_EQ(sample_frame_indices(30, 30.0).size(), 8u);
  EXPECT_EQ(sample_frame_indices(5, 30.0), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  const auto long_clip = sample_frame_indices(600, 30.0);
  ASSERT_EQ(long_clip.size(), 20u);
  EXPECT_EQ(long_clip[1], 30u);
  EXPECT_EQ(long_clip.back(), 570u);
}

TEST(FrameSampling, RateScalesSampleCount) {
  EXPECT_EQ(sample_frame_indices(600, 30.0, 2.0).size(), 40u);
  EXPECT_EQ(sample_frame_indices(600, 30.0, 0.25).size(), 8u);
  EXPECT_EQ(sample_frame_indices(600, 30.0, 1000.0).size(), 600u);
  EXPECT_THROW(sample_frame_indices(600, 30.0, 0.0), InputError);
}

TEST(NssBag, ShapeNamesAndFiniteness) {
  const auto names = nss_bag_feature_names();
  ASSERT_EQ(names.size(), kNssBagSize);
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), kNssBagSize);
  EXPECT_EQ(names[0], "y_s1_ggd_alpha_mean");
  EXPECT_EQ(names[1], "y_s1_ggd_alpha_std");
  EXPECT_EQ(names[2 * 36 * 4], "dy_s1_ggd_alpha_mean");
  EXPECT_EQ(names[324], "si");
  EXPECT_EQ(names[325], "ti");
  synth::LadderSpec spec;
  spec.frames = 12;
  spec.width = spec.height = 32;
  const FeatureVector fv = nss_bag(synth::ladder_clip(3, 2, spec));
  ASSERT_EQ(fv.values.size(), kNssBagSize);
  EXPECT_EQ(fv.names, names);
  for (double v : fv.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(NssBag, ConstantClipHasZeroSpreadAndSiTi) {
  std::vector<std::vector<double>> frames(10, std::vector<double>(256, 120.0));
  const FeatureVector fv = nss_bag(synth::clip_from(frames, 16, 16));
  for (std::size_t i = 0; i < fv.names.size(); ++i) {
    if (fv.names[i].ends_with("_std") || fv.names[i] == "si" || fv.names[i] == "ti") {
      EXPECT_EQ(fv.values[i], 0.0) << fv.names[i];
    }
  }
  EXPECT_THROW(nss_bag(synth::clip_from({frames[0]}, 16, 16)), InsufficientFrames);
}

// The duplicated clip repeats every frame twice at double the rate: spatial
// features and SI/TI are unchanged, and the temporal features follow the
// brute-force pairing of each sampled frame with its successor.
TEST(NssBag, FrameDuplicatedClip) {
  synth::LadderSpec spec;
  spec.frames = 20;
  spec.width = spec.height = 32;
  const VideoClip clip = synth::ladder_clip(5, 1, spec);
  std::vector<Frame> doubled;
  for (const Frame& f : clip.frames()) {
    doubled.push_back(f);
    doubled.push_back(f);
  }
  const VideoClip dup(doubled, FrameRate{60, 1});
  const FeatureVector a = nss_bag(clip), b = nss_bag(dup);
  for (std::size_t i = 0; i < 2 * 144; ++i) EXPECT_EQ(a.values[i], b.values[i]) << a.names[i];
  EXPECT_EQ(a.values[324], b.values[324]);
  EXPECT_EQ(a.values[325], b.values[325]);

  const auto idx = sample_frame_indices(dup.size(), dup.fps());
  std::vector<std::vector<double>> rows;
  bool saw_zero = false;
  for (std::size_t n : idx) {
    const std::size_t m = n + 1 < dup.size() ? n + 1 : n - 1;
    const PixelPlane d = n + 1 < dup.size() ? frame_diff(luma(dup.frame(n)), luma(dup.frame(m)))
                                            : frame_diff(luma(dup.frame(m)), luma(dup.frame(n)));
    saw_zero |= std::all_of(d.samples().begin(), d.samples().end(), [](double v) { return v == 0.0; });
    rows.push_back(brisque_frame_features(d, 1).values);
  }
  EXPECT_TRUE(saw_zero);
  for (std::size_t f = 0; f < 18; ++f) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r[f]);
    EXPECT_NEAR(b.values[288 + 2 * f], mean(col), 1e-12);
    EXPECT_NEAR(b.values[288 + 2 * f + 1], oracle::pop_std(col), 1e-9);
  }
}

TEST(NssBag, StreamingBuilderMatchesClipVersion) {
  synth::LadderSpec spec;
  spec.frames = 9;
  spec.width = spec.height = 24;
  const VideoClip clip = synth::ladder_clip(1, 3, spec);
  NssBagBuilder builder(clip.size(), clip.fps());
  for (const Frame& f : clip.frames()) builder.push(f);
  EXPECT_EQ(builder.finish(), nss_bag(clip));
  NssBagBuilder short_builder(clip.size(), clip.fps());
  short_builder.push(clip.frame(0));
  EXPECT_THROW(short_builder.finish(), InsufficientFrames);
}

}  // namespace
}  // namespace gamevqp
