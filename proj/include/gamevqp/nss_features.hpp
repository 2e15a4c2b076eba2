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

// Spatial / temporal information and natural-scene-statistics features.
//
// Feature extraction follows the BRISQUE recipe: local mean-subtracted
// contrast-normalised (MSCN) coefficients are modelled with a generalised
// Gaussian, and products of neighbouring coefficients with an asymmetric
// generalised Gaussian, both fitted by moment matching over a shape grid.

#ifndef GAMEVQP_NSS_FEATURES_HPP_
#define GAMEVQP_NSS_FEATURES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gamevqp/error.hpp"
#include "gamevqp/numeric.hpp"
#include "gamevqp/video_io.hpp"

namespace gamevqp {

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }

  void push(std::string name, double value) {
    names.push_back(std::move(name));
    values.push_back(value);
  }

  void append(std::string_view prefix, const FeatureVector& other) {
    for (std::size_t i = 0; i < other.size(); ++i) {
      push(std::string(prefix) + other.names[i], other.values[i]);
    }
  }

  // Throws InputError unless names are unique, lengths agree and values are finite.
  void validate() const {
    if (names.size() != values.size()) throw InputError("feature name/value length mismatch");
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!seen.insert(names[i]).second) throw InputError("duplicate feature " + names[i]);
      if (!std::isfinite(values[i])) throw InputError("non-finite feature " + names[i]);
    }
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct GgdFit {
  double alpha = 2.0;
  double sigma = 0.0;
};

struct AggdFit {
  double nu = 2.0;
  double sigma_l = 0.0;
  double sigma_r = 0.0;
  double eta = 0.0;
};

struct SiTi {
  double si = 0.0;
  double ti = 0.0;
};

// ---------------------------------------------------------------------------
// SI / TI

inline PixelPlane sobel_magnitude(const PixelPlane& plane) {
  const int w = plane.width(), h = plane.height();
  if (w < 3 || h < 3) {
    throw DimensionError("sobel needs at least 3x3, got " + std::to_string(w) + "x" +
                         std::to_string(h));
  }
  PixelPlane out(w - 2, h - 2);
  for (int y = 1; y < h - 1; ++y) {
    const auto up = plane.row(y - 1), mid = plane.row(y), down = plane.row(y + 1);
    for (int x = 1; x < w - 1; ++x) {
      const double gx = (up[x + 1] + 2.0 * mid[x + 1] + down[x + 1]) -
                        (up[x - 1] + 2.0 * mid[x - 1] + down[x - 1]);
      const double gy = (down[x - 1] + 2.0 * down[x] + down[x + 1]) -
                        (up[x - 1] + 2.0 * up[x] + up[x + 1]);
      out.at(x - 1, y - 1) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

// Streams luma planes in display order and tracks max-over-time SI and TI.
class SiTiAccumulator {
 public:
  void push(const PixelPlane& luma_plane) {
    si_ = std::max(si_, population_std(sobel_magnitude(luma_plane).samples()));
    if (previous_) {
      ti_ = std::max(ti_, population_std(frame_diff(*previous_, luma_plane).samples()));
    }
    previous_ = luma_plane;
    ++frames_;
  }

  std::size_t frames() const noexcept { return frames_; }
  double si() const {
    if (frames_ == 0) throw InsufficientFrames("spatial information needs at least 1 frame");
    return si_;
  }
  double ti() const {
    if (frames_ < 2) throw InsufficientFrames("temporal information needs at least 2 frames");
    return ti_;
  }

 private:
  std::optional<PixelPlane> previous_;
  double si_ = 0.0;
  double ti_ = 0.0;
  std::size_t frames_ = 0;
};

inline double spatial_info(const VideoClip& clip) {
  if (clip.size() == 0) throw InsufficientFrames("spatial information needs at least 1 frame");
  double si = 0.0;
  for (const Frame& f : clip.frames()) {
    si = std::max(si, population_std(sobel_magnitude(luma(f)).samples()));
  }
  return si;
}

inline double temporal_info(const VideoClip& clip) {
  if (clip.size() < 2) throw InsufficientFrames("temporal information needs at least 2 frames");
  double ti = 0.0;
  PixelPlane previous = luma(clip.frame(0));
  for (std::size_t n = 1; n < clip.size(); ++n) {
    PixelPlane current = luma(clip.frame(n));
    ti = std::max(ti, population_std(frame_diff(previous, current).samples()));
    previous = std::move(current);
  }
  return ti;
}

inline SiTi si_ti(const VideoClip& clip) { return {spatial_info(clip), temporal_info(clip)}; }

// ---------------------------------------------------------------------------
// MSCN

namespace detail {

inline constexpr int kMscnWindow = 7;
inline constexpr double kMscnSigma = 7.0 / 6.0;
inline constexpr double kMscnC = 1.0;

inline const std::array<double, kMscnWindow>& gaussian_taps() {
  static const std::array<double, kMscnWindow> taps = [] {
    std::array<double, kMscnWindow> t{};
    double sum = 0.0;
    for (int i = 0; i < kMscnWindow; ++i) {
      const double d = i - kMscnWindow / 2;
      t[i] = std::exp(-d * d / (2.0 * kMscnSigma * kMscnSigma));
      sum += t[i];
    }
    for (double& v : t) v /= sum;
    return t;
  }();
  return taps;
}

// Symmetric extension: -1 -> 0, -2 -> 1, n -> n-1.
inline int reflect(int i, int n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - i - 1;
  return i;
}

// Separable 7x7 Gaussian blur with symmetric borders.
inline PixelPlane gaussian_blur(const PixelPlane& in) {
  const auto& taps = gaussian_taps();
  const int w = in.width(), h = in.height(), r = kMscnWindow / 2;
  PixelPlane tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto src = in.row(y);
    auto dst = tmp.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * src[reflect(x + k, w)];
      dst[x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * tmp.at(x, reflect(y + k, h));
      dst[x] = acc;
    }
  }
  return out;
}

}  // namespace detail

inline PixelPlane mscn(const PixelPlane& plane) {
  if (plane.width() < detail::kMscnWindow || plane.height() < detail::kMscnWindow) {
    throw DimensionError("mscn needs at least 7x7, got " + std::to_string(plane.width()) +
                         "x" + std::to_string(plane.height()));
  }
  // Work relative to one sample so that flat regions cancel exactly and the
  // local variance is not formed from two large, nearly equal terms.
  const double ref = plane.samples()[0];
  PixelPlane centered(plane.width(), plane.height()), squared(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) {
    centered.samples()[i] = plane.samples()[i] - ref;
    squared.samples()[i] = centered.samples()[i] * centered.samples()[i];
  }
  const PixelPlane mu = detail::gaussian_blur(centered);
  const PixelPlane mu2 = detail::gaussian_blur(squared);
  PixelPlane out(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const double m = mu.samples()[i];
    const double sigma = std::sqrt(std::abs(mu2.samples()[i] - m * m));
    out.samples()[i] = (centered.samples()[i] - m) / (sigma + detail::kMscnC);
  }
  return out;
}

// ---------------------------------------------------------------------------
// GGD / AGGD moment matching

namespace detail {

inline constexpr double kShapeMin = 0.2;
inline constexpr double kShapeStep = 0.001;
inline constexpr int kShapeCount = 9801;  // 0.2 .. 10.0 inclusive

// Gamma(2/v)^2 / (Gamma(1/v) Gamma(3/v)); strictly increasing in v.
inline double ggd_ratio(double v) {
  return std::exp(2.0 * std::lgamma(2.0 / v) - std::lgamma(1.0 / v) - std::lgamma(3.0 / v));
}

struct ShapeGrid {
  std::vector<double> shape;
  std::vector<double> ratio;
};

inline const ShapeGrid& shape_grid() {
  static const ShapeGrid grid = [] {
    ShapeGrid g;
    g.shape.resize(kShapeCount);
    g.ratio.resize(kShapeCount);
    for (int k = 0; k < kShapeCount; ++k) {
      g.shape[k] = kShapeMin + kShapeStep * k;
      g.ratio[k] = ggd_ratio(g.shape[k]);
    }
    return g;
  }();
  return grid;
}

// Grid shape whose ratio is nearest to `target`; ties resolve to the smaller shape.
inline double match_shape(double target) {
  const ShapeGrid& g = shape_grid();
  const auto it = std::lower_bound(g.ratio.begin(), g.ratio.end(), target);
  if (it == g.ratio.begin()) return g.shape.front();
  if (it == g.ratio.end()) return g.shape.back();
  const auto k = static_cast<std::size_t>(it - g.ratio.begin());
  return (target - g.ratio[k - 1] <= g.ratio[k] - target) ? g.shape[k - 1] : g.shape[k];
}

// Unchecked fits used inside feature extraction where small or degenerate
// sample sets are expected. All-zero input yields the canonical flat fit.
inline GgdFit ggd_moment_fit(std::span<const double> xs) {
  double abs_sum = 0.0, sq_sum = 0.0;
  for (double x : xs) {
    abs_sum += std::abs(x);
    sq_sum += x * x;
  }
  if (xs.empty() || sq_sum <= 0.0) return {};
  const double n = static_cast<double>(xs.size());
  const double mean_abs = abs_sum / n;
  const double mean_sq = sq_sum / n;
  return {match_shape(mean_abs * mean_abs / mean_sq), std::sqrt(mean_sq)};
}

inline AggdFit aggd_moment_fit(std::span<const double> xs) {
  double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0;
  std::size_t left_n = 0, right_n = 0;
  for (double x : xs) {
    if (x < 0.0) {
      left_sq += x * x;
      ++left_n;
    } else if (x > 0.0) {
      right_sq += x * x;
      ++right_n;
    }
    abs_sum += std::abs(x);
  }
  if (left_n + right_n == 0) return {};
  const double n = static_cast<double>(xs.size());
  AggdFit fit;
  fit.sigma_l = left_n ? std::sqrt(left_sq / static_cast<double>(left_n)) : 0.0;
  fit.sigma_r = right_n ? std::sqrt(right_sq / static_cast<double>(right_n)) : 0.0;
  const double mean_abs = abs_sum / n;
  const double mean_sq = (left_sq + right_sq) / n;
  const double rho = mean_abs * mean_abs / mean_sq;
  // The correction factor is symmetric in gamma <-> 1/gamma, so use the
  // ratio of the smaller scale to the larger one (one-sided input gives 0).
  const double g = std::min(fit.sigma_l, fit.sigma_r) / std::max(fit.sigma_l, fit.sigma_r);
  const double correction = (g * g * g + 1.0) * (g + 1.0) / ((g * g + 1.0) * (g * g + 1.0));
  fit.nu = match_shape(rho * correction);
  const double lg1 = std::lgamma(1.0 / fit.nu);
  const double lg2 = std::lgamma(2.0 / fit.nu);
  const double lg3 = std::lgamma(3.0 / fit.nu);
  const double scale = std::exp(0.5 * (lg1 - lg3));
  fit.eta = (fit.sigma_r - fit.sigma_l) * scale * std::exp(lg2 - lg1);
  return fit;
}

inline void require_samples(std::span<const double> xs, const char* what) {
  if (xs.size() < 100) {
    throw DegenerateInput(std::string(what) + " needs at least 100 samples, got " +
                          std::to_string(xs.size()));
  }
  for (double x : xs) {
    if (!std::isfinite(x)) throw DegenerateInput(std::string(what) + ": non-finite sample");
  }
}

}  // namespace detail

inline GgdFit fit_ggd(std::span<const double> samples) {
  detail::require_samples(samples, "fit_ggd");
  const double var = sum_squared_deviation(samples) / static_cast<double>(samples.size() - 1);
  if (!(var > 1e-8)) throw DegenerateInput("fit_ggd: sample variance below 1e-8");
  return detail::ggd_moment_fit(samples);
}

inline AggdFit fit_aggd(std::span<const double> samples) {
  detail::require_samples(samples, "fit_aggd");
  const bool has_neg = std::any_of(samples.begin(), samples.end(), [](double x) { return x < 0; });
  const bool has_pos = std::any_of(samples.begin(), samples.end(), [](double x) { return x > 0; });
  if (!has_neg || !has_pos) {
    throw DegenerateInput("fit_aggd: samples must contain both signs");
  }
  return detail::aggd_moment_fit(samples);
}

// ---------------------------------------------------------------------------
// BRISQUE frame features

namespace detail {

inline constexpr std::array<std::string_view, 4> kOrientations = {"h", "v", "d1", "d2"};

// 2x bilinear decimation: each output sample is the mean of a 2x2 block.
inline PixelPlane downsample2(const PixelPlane& in) {
  PixelPlane out(in.width() / 2, in.height() / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.at(x, y) = 0.25 * (in.at(2 * x, 2 * y) + in.at(2 * x + 1, 2 * y) +
                             in.at(2 * x, 2 * y + 1) + in.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

// Products of each MSCN coefficient with its right (h), lower (v),
// lower-right (d1) and upper-right (d2) neighbour, valid region only.
inline std::array<std::vector<double>, 4> paired_products(const PixelPlane& m) {
  const int w = m.width(), h = m.height();
  std::array<std::vector<double>, 4> out;
  for (auto& v : out) v.reserve(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = m.at(x, y);
      if (x + 1 < w) out[0].push_back(c * m.at(x + 1, y));
      if (y + 1 < h) out[1].push_back(c * m.at(x, y + 1));
      if (x + 1 < w && y + 1 < h) out[2].push_back(c * m.at(x + 1, y + 1));
      if (x + 1 < w && y >= 1) out[3].push_back(c * m.at(x + 1, y - 1));
    }
  }
  return out;
}

inline void scale_feature_names(std::vector<std::string>& names, int scale) {
  const std::string s = "s" + std::to_string(scale) + "_";
  names.push_back(s + "ggd_alpha");
  names.push_back(s + "ggd_sigma");
  for (std::string_view o : kOrientations) {
    for (std::string_view p : {"nu", "eta", "sigma_l", "sigma_r"}) {
      names.push_back(s + std::string(o) + "_" + std::string(p));
    }
  }
}

inline void scale_features(const PixelPlane& plane, std::vector<double>& out) {
  const PixelPlane m = mscn(plane);
  const GgdFit g = ggd_moment_fit(m.samples());
  out.push_back(g.alpha);
  out.push_back(g.sigma);
  for (const auto& products : paired_products(m)) {
    const AggdFit a = aggd_moment_fit(products);
    out.insert(out.end(), {a.nu, a.eta, a.sigma_l, a.sigma_r});
  }
}

inline FeatureVector canonical_flat_features(int scales) {
  FeatureVector fv;
  for (int s = 1; s <= scales; ++s) scale_feature_names(fv.names, s);
  fv.values.assign(fv.names.size(), 0.0);
  for (std::size_t i = 0; i < fv.names.size(); ++i) {
    const std::string& n = fv.names[i];
    if (n.ends_with("_alpha") || n.ends_with("_nu")) fv.values[i] = 2.0;
  }
  return fv;
}

}  // namespace detail

inline constexpr std::size_t kBrisqueFeaturesPerScale = 18;

// Names are s<scale>_ggd_{alpha,sigma} followed by
// s<scale>_<h|v|d1|d2>_{nu,eta,sigma_l,sigma_r}.
inline std::vector<std::string> brisque_feature_names(int scales = 2) {
  std::vector<std::string> names;
  for (int s = 1; s <= scales; ++s) detail::scale_feature_names(names, s);
  return names;
}

// BRISQUE features at `scales` dyadic scales (1 or 2). A plane with variance
// below 1e-8 yields the canonical flat vector (shapes 2, everything else 0).
inline FeatureVector brisque_frame_features(const PixelPlane& plane, int scales = 2) {
  if (scales != 1 && scales != 2) throw InputError("brisque scales must be 1 or 2");
  const int min_dim = scales == 2 ? 14 : 7;
  if (plane.width() < min_dim || plane.height() < min_dim) {
    throw DimensionError("brisque needs at least " + std::to_string(min_dim) + "x" +
                         std::to_string(min_dim) + ", got " + std::to_string(plane.width()) +
                         "x" + std::to_string(plane.height()));
  }
  const double var = sum_squared_deviation(plane.samples()) / static_cast<double>(plane.size());
  if (var < 1e-8) return detail::canonical_flat_features(scales);
  FeatureVector fv;
  fv.names = brisque_feature_names(scales);
  fv.values.reserve(fv.names.size());
  detail::scale_features(plane, fv.values);
  if (scales == 2) detail::scale_features(detail::downsample2(plane), fv.values);
  return fv;
}

// ---------------------------------------------------------------------------
// Clip-level bag of NSS features

inline constexpr std::size_t kNssBagSize = 326;
inline constexpr std::size_t kNssMinSampledFrames = 8;

// Frames sampled at `per_second` per second of video (default one), at least
// 8, evenly spaced; every frame when the clip is shorter than that.
inline std::vector<std::size_t> sample_frame_indices(std::size_t frame_count, double fps,
                                                     double per_second = 1.0) {
  if (!(per_second > 0.0) || !std::isfinite(per_second)) {
    throw InputError("frame sampling rate must be > 0");
  }
  const auto wanted = static_cast<std::size_t>(std::floor(frame_count / fps * per_second + 1e-9));
  const std::size_t k = std::min(frame_count, std::max(kNssMinSampledFrames, wanted));
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i * frame_count / k;
  return idx;
}

namespace detail {

inline constexpr std::array<std::string_view, 4> kSpatialChannels = {"y", "a", "b", "s"};

inline std::vector<std::string> per_frame_feature_names() {
  std::vector<std::string> names;
  const auto two_scale = brisque_feature_names(2);
  for (std::string_view ch : kSpatialChannels) {
    for (const auto& n : two_scale) names.push_back(std::string(ch) + "_" + n);
  }
  for (const auto& n : brisque_feature_names(1)) names.push_back("dy_" + n);
  return names;
}

// Channels on the [0, 255] scale: luma, a* + 128, b* + 128, 255 * S.
inline std::vector<double> spatial_frame_features(const Frame& frame, const PixelPlane& y) {
  const RgbPlanes rgb = to_rgb(frame);
  const int w = frame.width(), h = frame.height();
  PixelPlane a(w, h), b(w, h), s(w, h);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = rgb.r.samples()[i], g = rgb.g.samples()[i], bl = rgb.b.samples()[i];
    const Lab lab = srgb_to_lab(r, g, bl);
    a.samples()[i] = std::clamp(lab.a + 128.0, 0.0, 255.0);
    b.samples()[i] = std::clamp(lab.b + 128.0, 0.0, 255.0);
    s.samples()[i] = 255.0 * rgb_to_hsv(r, g, bl).s;
  }
  std::vector<double> out;
  out.reserve(4 * 2 * kBrisqueFeaturesPerScale + kBrisqueFeaturesPerScale);
  for (const PixelPlane* p : std::initializer_list<const PixelPlane*>{&y, &a, &b, &s}) {
    const FeatureVector fv = brisque_frame_features(*p, 2);
    out.insert(out.end(), fv.values.begin(), fv.values.end());
  }
  return out;
}

}  // namespace detail

inline std::vector<std::string> nss_bag_feature_names() {
  std::vector<std::string> names;
  for (const auto& n : detail::per_frame_feature_names()) {
    names.push_back(n + "_mean");
    names.push_back(n + "_std");
  }
  names.push_back("si");
  names.push_back("ti");
  return names;
}

// Incremental builder for nss_bag so that long clips can be streamed frame
// by frame. Every frame of the clip must be pushed in order.
class NssBagBuilder {
 public:
  NssBagBuilder(std::size_t frame_count, double fps, double per_second = 1.0)
      : frame_count_(frame_count), sampled_(sample_frame_indices(frame_count, fps, per_second)) {
    if (frame_count < 2) throw InsufficientFrames("nss_bag needs at least 2 frames");
    rows_.resize(sampled_.size());
  }

  void push(const Frame& frame) {
    if (next_ >= frame_count_) throw InputError("more frames pushed than declared");
    PixelPlane y = luma(frame);
    siti_.push(y);
    const std::size_t n = next_++;
    // A sampled frame pairs with its successor; the last frame pairs with its predecessor.
    if (n >= 1 && pending_temporal_ && *pending_temporal_ == n - 1) {
      add_temporal(slot_of(n - 1), frame_diff(*previous_, y));
      pending_temporal_.reset();
    }
    if (const auto slot = find_slot(n)) {
      auto spatial = detail::spatial_frame_features(frame, y);
      rows_[*slot].insert(rows_[*slot].begin(), spatial.begin(), spatial.end());
      if (n + 1 < frame_count_) {
        pending_temporal_ = n;
      } else {
        add_temporal(*slot, frame_diff(*previous_, y));
      }
    }
    previous_ = std::move(y);
  }

  FeatureVector finish() const {
    if (next_ != frame_count_) {
      throw InsufficientFrames("expected " + std::to_string(frame_count_) + " frames, got " +
                               std::to_string(next_));
    }
    const auto per_frame = detail::per_frame_feature_names();
    FeatureVector fv;
    fv.names = nss_bag_feature_names();
    fv.values.reserve(kNssBagSize);
    std::vector<double> column(rows_.size());
    for (std::size_t f = 0; f < per_frame.size(); ++f) {
      for (std::size_t r = 0; r < rows_.size(); ++r) column[r] = rows_[r][f];
      fv.values.push_back(mean(column));
      fv.values.push_back(population_std(column));
    }
    fv.values.push_back(siti_.si());
    fv.values.push_back(siti_.ti());
    return fv;
  }

  std::span<const std::size_t> sampled_frames() const noexcept { return sampled_; }

 private:
  std::optional<std::size_t> find_slot(std::size_t frame) const {
    const auto it = std::lower_bound(sampled_.begin(), sampled_.end(), frame);
    if (it == sampled_.end() || *it != frame) return std::nullopt;
    return static_cast<std::size_t>(it - sampled_.begin());
  }
  std::size_t slot_of(std::size_t frame) const { return *find_slot(frame); }

  void add_temporal(std::size_t slot, const PixelPlane& diff) {
    const FeatureVector fv = brisque_frame_features(diff, 1);
    rows_[slot].insert(rows_[slot].end(), fv.values.begin(), fv.values.end());
  }

  std::size_t frame_count_;
  std::vector<std::size_t> sampled_;
  std::vector<std::vector<double>> rows_;
  SiTiAccumulator siti_;
  std::optional<PixelPlane> previous_;
  std::optional<std::size_t> pending_temporal_;
  std::size_t next_ = 0;
};

inline FeatureVector nss_bag(const VideoClip& clip, double per_second = 1.0) {
  NssBagBuilder builder(clip.size(), clip.fps(), per_second);
  for (const Frame& f : clip.frames()) builder.push(f);
  return builder.finish();
}

}  // namespace gamevqp

#endif  // GAMEVQP_NSS_FEATURES_HPP_
