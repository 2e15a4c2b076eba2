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

// Planar frame containers and raw video ingestion (Y4M and headerless YUV),
// plus the colour conversions used by the feature extractors.

#ifndef GAMEVQP_VIDEO_IO_HPP_
#define GAMEVQP_VIDEO_IO_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamevqp/error.hpp"

namespace gamevqp {

template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, T fill = T{})
      : width_(checked_dim(width)), height_(checked_dim(height)),
        samples_(static_cast<std::size_t>(width) * height, fill) {}
  Plane(int width, int height, std::vector<T> samples)
      : width_(checked_dim(width)), height_(checked_dim(height)),
        samples_(std::move(samples)) {
    if (samples_.size() != static_cast<std::size_t>(width_) * height_) {
      throw DimensionError("plane sample count " + std::to_string(samples_.size()) +
                           " does not match " + std::to_string(width_) + "x" +
                           std::to_string(height_));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  T& at(int x, int y) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const {
    return samples_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<T> samples() noexcept { return samples_; }
  std::span<const T> samples() const noexcept { return samples_; }
  std::span<T> row(int y) {
    return std::span<T>(samples_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }
  std::span<const T> row(int y) const {
    return std::span<const T>(samples_).subspan(static_cast<std::size_t>(y) * width_,
                                                width_);
  }

  bool same_shape(const Plane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  static int checked_dim(int v) {
    if (v < 0) throw DimensionError("negative plane dimension");
    return v;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> samples_;
};

// Real-valued plane; luma/colour planes are on the [0, 255] scale, derived
// planes (differences, MSCN) may be signed.
using PixelPlane = Plane<double>;
// Coded 8-bit samples as stored in the container.
using SamplePlane = Plane<std::uint8_t>;

enum class Subsampling { k420, k422, k444 };
enum class ColorRange { kLimited, kFull };

struct FrameRate {
  std::uint32_t num = 30;
  std::uint32_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / den; }
  friend bool operator==(const FrameRate&, const FrameRate&) = default;
};

inline std::pair<int, int> chroma_dimensions(int width, int height, Subsampling sub) {
  switch (sub) {
    case Subsampling::k420: return {(width + 1) / 2, (height + 1) / 2};
    case Subsampling::k422: return {(width + 1) / 2, height};
    case Subsampling::k444: return {width, height};
  }
  return {width, height};
}

struct Frame {
  SamplePlane y;
  SamplePlane cb;
  SamplePlane cr;
  Subsampling subsampling = Subsampling::k420;
  ColorRange range = ColorRange::kLimited;

  int width() const noexcept { return y.width(); }
  int height() const noexcept { return y.height(); }

  void validate() const {
    const auto [cw, ch] = chroma_dimensions(y.width(), y.height(), subsampling);
    if (cb.width() != cw || cb.height() != ch || cr.width() != cw || cr.height() != ch) {
      throw DimensionError("chroma planes inconsistent with subsampling");
    }
  }
};

class VideoClip {
 public:
  VideoClip() = default;
  VideoClip(std::vector<Frame> frames, FrameRate fps, std::string id = {})
      : frames_(std::move(frames)), fps_(fps), id_(std::move(id)) {
    if (fps_.num == 0 || fps_.den == 0) throw InputError("frame rate must be positive");
    for (const Frame& f : frames_) {
      f.validate();
      const Frame& first = frames_.front();
      if (f.width() != first.width() || f.height() != first.height() ||
          f.subsampling != first.subsampling || f.range != first.range) {
        throw DimensionError("all frames of a clip must share format");
      }
    }
  }

  std::span<const Frame> frames() const noexcept { return frames_; }
  const Frame& frame(std::size_t n) const { return frames_.at(n); }
  std::size_t size() const noexcept { return frames_.size(); }
  FrameRate frame_rate() const noexcept { return fps_; }
  double fps() const noexcept { return fps_.value(); }
  const std::string& id() const noexcept { return id_; }

 private:
  std::vector<Frame> frames_;
  FrameRate fps_;
  std::string id_;
};

// ---------------------------------------------------------------------------
// Y4M

struct VideoFormat {
  int width = 0;
  int height = 0;
  FrameRate fps;
  Subsampling subsampling = Subsampling::k420;
  ColorRange range = ColorRange::kLimited;

  std::size_t frame_bytes() const {
    const auto [cw, ch] = chroma_dimensions(width, height, subsampling);
    return static_cast<std::size_t>(width) * height +
           2 * static_cast<std::size_t>(cw) * ch;
  }
};

namespace detail {

inline constexpr std::string_view kY4mMagic = "YUV4MPEG2";
inline constexpr int kMaxDimension = 16384;
inline constexpr std::size_t kMaxHeaderBytes = 4096;

inline bool parse_uint(std::string_view text, std::uint64_t& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Reads bytes up to (not including) '\n'. Returns false on EOF before newline.
inline bool read_line(std::istream& in, std::string& line, std::size_t max_bytes) {
  line.clear();
  char c;
  while (in.get(c)) {
    if (c == '\n') return true;
    if (line.size() >= max_bytes) return false;
    line.push_back(c);
  }
  return false;
}

inline void clamp_limited(SamplePlane& plane, std::uint8_t lo, std::uint8_t hi) {
  for (auto& v : plane.samples()) v = std::clamp(v, lo, hi);
}

}  // namespace detail

inline VideoFormat parse_y4m_header(std::string_view header) {
  if (!header.starts_with(detail::kY4mMagic)) {
    throw ParseError("missing YUV4MPEG2 magic");
  }
  std::string_view rest = header.substr(detail::kY4mMagic.size());
  VideoFormat fmt;
  bool have_w = false, have_h = false, have_f = false;
  std::optional<ColorRange> range_override;
  std::string_view colorspace;
  while (!rest.empty()) {
    if (rest.front() != ' ') throw ParseError("malformed header: expected space");
    rest.remove_prefix(1);
    const std::size_t end = std::min(rest.find(' '), rest.size());
    const std::string_view tag = rest.substr(0, end);
    rest.remove_prefix(end);
    if (tag.empty()) throw ParseError("malformed header: empty tag");
    const std::string_view value = tag.substr(1);
    std::uint64_t n = 0;
    switch (tag.front()) {
      case 'W':
      case 'H':
        if (!detail::parse_uint(value, n) || n == 0 || n > detail::kMaxDimension) {
          throw ParseError("malformed header: bad dimension '" + std::string(tag) + "'");
        }
        (tag.front() == 'W' ? fmt.width : fmt.height) = static_cast<int>(n);
        (tag.front() == 'W' ? have_w : have_h) = true;
        break;
      case 'F': {
        const std::size_t colon = value.find(':');
        std::uint64_t num = 0, den = 0;
        if (colon == std::string_view::npos || !detail::parse_uint(value.substr(0, colon), num) ||
            !detail::parse_uint(value.substr(colon + 1), den) || num == 0 || den == 0 ||
            num > 0xFFFFFFFFu || den > 0xFFFFFFFFu) {
          throw ParseError("malformed header: bad frame rate '" + std::string(tag) + "'");
        }
        fmt.fps = {static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den)};
        have_f = true;
        break;
      }
      case 'C':
        colorspace = value;
        break;
      case 'X':
        if (value == "COLORRANGE=FULL") range_override = ColorRange::kFull;
        if (value == "COLORRANGE=LIMITED") range_override = ColorRange::kLimited;
        break;
      default:
        // I (interlacing), A (aspect) and unknown tags do not affect decoding.
        break;
    }
  }
  if (!have_w || !have_h || !have_f) {
    throw ParseError("malformed header: W, H and F tags are required");
  }
  if (colorspace.empty() || colorspace == "420" || colorspace == "420mpeg2" ||
      colorspace == "420paldv") {
    fmt.subsampling = Subsampling::k420;
    fmt.range = ColorRange::kLimited;
  } else if (colorspace == "420jpeg") {
    fmt.subsampling = Subsampling::k420;
    fmt.range = ColorRange::kFull;
  } else if (colorspace == "422") {
    fmt.subsampling = Subsampling::k422;
    fmt.range = ColorRange::kLimited;
  } else if (colorspace == "444") {
    fmt.subsampling = Subsampling::k444;
    fmt.range = ColorRange::kFull;
  } else {
    throw UnsupportedFormat("colorspace C" + std::string(colorspace));
  }
  if (range_override) fmt.range = *range_override;
  return fmt;
}

namespace detail {

inline Frame read_planes(std::istream& in, const VideoFormat& fmt, std::size_t index) {
  const auto [cw, ch] = chroma_dimensions(fmt.width, fmt.height, fmt.subsampling);
  auto read_plane = [&](int w, int h, const char* name) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
      throw ParseError("truncated " + std::string(name) + " plane in frame " +
                       std::to_string(index));
    }
    return SamplePlane(w, h, std::move(bytes));
  };
  Frame frame;
  frame.subsampling = fmt.subsampling;
  frame.range = fmt.range;
  frame.y = read_plane(fmt.width, fmt.height, "Y");
  frame.cb = read_plane(cw, ch, "Cb");
  frame.cr = read_plane(cw, ch, "Cr");
  if (fmt.range == ColorRange::kLimited) {
    clamp_limited(frame.y, 16, 235);
    clamp_limited(frame.cb, 16, 240);
    clamp_limited(frame.cr, 16, 240);
  }
  return frame;
}

}  // namespace detail

// Sequential Y4M decoder. Frames are pulled one at a time so long clips can be
// processed without holding them in memory.
class Y4mReader {
 public:
  explicit Y4mReader(std::istream& in) : in_(in) {
    std::string header;
    if (!detail::read_line(in_, header, detail::kMaxHeaderBytes)) {
      throw ParseError("malformed header: no terminating newline");
    }
    format_ = parse_y4m_header(header);
  }

  const VideoFormat& format() const noexcept { return format_; }
  std::size_t frames_read() const noexcept { return index_; }

  std::optional<Frame> next() {
    if (!read_marker()) return std::nullopt;
    return detail::read_planes(in_, format_, index_++);
  }

  // Skips the payload of the next frame; returns false at end of stream.
  bool skip() {
    if (!read_marker()) return false;
    const auto bytes = static_cast<std::streamoff>(format_.frame_bytes());
    in_.ignore(bytes);
    if (in_.gcount() != bytes) {
      throw ParseError("truncated payload in frame " + std::to_string(index_));
    }
    ++index_;
    return true;
  }

 private:
  bool read_marker() {
    if (in_.peek() == std::char_traits<char>::eof()) return false;
    std::string line;
    const bool terminated = detail::read_line(in_, line, detail::kMaxHeaderBytes);
    if (!line.starts_with("FRAME") || (line.size() > 5 && line[5] != ' ')) {
      throw ParseError("missing FRAME marker at frame " + std::to_string(index_));
    }
    if (!terminated) {
      throw ParseError("truncated FRAME marker at frame " + std::to_string(index_));
    }
    return true;
  }

  std::istream& in_;
  VideoFormat format_;
  std::size_t index_ = 0;
};

inline VideoClip parse_y4m(std::istream& in, std::string id = {}) {
  Y4mReader reader(in);
  std::vector<Frame> frames;
  while (auto frame = reader.next()) frames.push_back(std::move(*frame));
  return VideoClip(std::move(frames), reader.format().fps, std::move(id));
}

inline VideoClip parse_y4m(std::string_view bytes, std::string id = {}) {
  std::istringstream in{std::string(bytes)};
  return parse_y4m(in, std::move(id));
}

inline std::string y4m_colorspace_tag(Subsampling sub, ColorRange range) {
  switch (sub) {
    case Subsampling::k420:
      return range == ColorRange::kFull ? "C420jpeg" : "C420";
    case Subsampling::k422:
      return range == ColorRange::kFull ? "C422 XCOLORRANGE=FULL" : "C422";
    case Subsampling::k444:
      return range == ColorRange::kFull ? "C444" : "C444 XCOLORRANGE=LIMITED";
  }
  return "C420";
}

inline void write_y4m(const VideoClip& clip, std::ostream& out) {
  if (clip.size() == 0) throw InputError("cannot serialise an empty clip");
  const Frame& first = clip.frame(0);
  out << detail::kY4mMagic << " W" << first.width() << " H" << first.height() << " F"
      << clip.frame_rate().num << ':' << clip.frame_rate().den << " Ip A1:1 "
      << y4m_colorspace_tag(first.subsampling, first.range) << '\n';
  for (const Frame& f : clip.frames()) {
    out << "FRAME\n";
    for (const SamplePlane* p : {&f.y, &f.cb, &f.cr}) {
      out.write(reinterpret_cast<const char*>(p->samples().data()),
                static_cast<std::streamsize>(p->size()));
    }
  }
}

inline std::string to_y4m_bytes(const VideoClip& clip) {
  std::ostringstream out;
  write_y4m(clip, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Headerless planar YUV: 8-bit, dimensions supplied by the caller.

class RawYuvReader {
 public:
  RawYuvReader(std::istream& in, VideoFormat format) : in_(in), format_(format) {
    if (format_.width <= 0 || format_.height <= 0 || format_.width > detail::kMaxDimension ||
        format_.height > detail::kMaxDimension) {
      throw InputError("raw YUV dimensions out of range");
    }
  }

  const VideoFormat& format() const noexcept { return format_; }

  std::optional<Frame> next() {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
    return detail::read_planes(in_, format_, index_++);
  }

  bool skip() {
    if (in_.peek() == std::char_traits<char>::eof()) return false;
    const auto bytes = static_cast<std::streamoff>(format_.frame_bytes());
    in_.ignore(bytes);
    if (in_.gcount() != bytes) {
      throw ParseError("truncated payload in frame " + std::to_string(index_));
    }
    ++index_;
    return true;
  }

 private:
  std::istream& in_;
  VideoFormat format_;
  std::size_t index_ = 0;
};

inline VideoClip parse_raw_yuv(std::istream& in, const VideoFormat& format,
                               std::string id = {}) {
  RawYuvReader reader(in, format);
  std::vector<Frame> frames;
  while (auto frame = reader.next()) frames.push_back(std::move(*frame));
  return VideoClip(std::move(frames), format.fps, std::move(id));
}

// ---------------------------------------------------------------------------
// Colour

struct Rgb {
  double r, g, b;
};
struct Lab {
  double l, a, b;
};
struct Hsv {
  double h, s, v;
};

inline double luma_to_full(std::uint8_t y, ColorRange range) {
  if (range == ColorRange::kFull) return y;
  return std::clamp((static_cast<double>(y) - 16.0) * 255.0 / 219.0, 0.0, 255.0);
}

inline PixelPlane luma(const Frame& frame) {
  PixelPlane out(frame.width(), frame.height());
  const auto src = frame.y.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = luma_to_full(src[i], frame.range);
  return out;
}

// BT.601 YCbCr -> R'G'B' on [0, 255].
inline Rgb ycbcr_to_rgb(double y, double cb, double cr, ColorRange range) {
  if (range == ColorRange::kLimited) {
    y = (y - 16.0) * 255.0 / 219.0;
    cb = (cb - 128.0) * 255.0 / 224.0;
    cr = (cr - 128.0) * 255.0 / 224.0;
  } else {
    cb -= 128.0;
    cr -= 128.0;
  }
  constexpr double kr = 0.299, kb = 0.114, kg = 1.0 - kr - kb;
  const double r = y + 2.0 * (1.0 - kr) * cr;
  const double b = y + 2.0 * (1.0 - kb) * cb;
  const double g = y - (2.0 * kb * (1.0 - kb) / kg) * cb - (2.0 * kr * (1.0 - kr) / kg) * cr;
  return {std::clamp(r, 0.0, 255.0), std::clamp(g, 0.0, 255.0), std::clamp(b, 0.0, 255.0)};
}

struct RgbPlanes {
  PixelPlane r, g, b;
};
struct LabPlanes {
  PixelPlane l, a, b;
};
struct HsvPlanes {
  PixelPlane h, s, v;
};

// Chroma is upsampled to luma resolution by nearest neighbour.
inline RgbPlanes to_rgb(const Frame& frame) {
  const int w = frame.width(), h = frame.height();
  const int sx = frame.subsampling == Subsampling::k444 ? 0 : 1;
  const int sy = frame.subsampling == Subsampling::k420 ? 1 : 0;
  RgbPlanes out{PixelPlane(w, h), PixelPlane(w, h), PixelPlane(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb rgb = ycbcr_to_rgb(frame.y.at(x, y), frame.cb.at(x >> sx, y >> sy),
                                   frame.cr.at(x >> sx, y >> sy), frame.range);
      out.r.at(x, y) = rgb.r;
      out.g.at(x, y) = rgb.g;
      out.b.at(x, y) = rgb.b;
    }
  }
  return out;
}

namespace detail {

inline double srgb_to_linear(double c) {
  c /= 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// sRGB (D65) linear RGB -> XYZ.
inline constexpr std::array<std::array<double, 3>, 3> kRgbToXyz{{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

}  // namespace detail

// CIELAB under D65. The white point is taken as the XYZ of linear (1,1,1) so
// achromatic inputs land exactly on the neutral axis.
inline Lab srgb_to_lab(double r, double g, double b) {
  const double lin[3] = {detail::srgb_to_linear(r), detail::srgb_to_linear(g),
                         detail::srgb_to_linear(b)};
  double f[3];
  for (int row = 0; row < 3; ++row) {
    const auto& m = detail::kRgbToXyz[row];
    const double white = m[0] + m[1] + m[2];
    f[row] = detail::lab_f((m[0] * lin[0] + m[1] * lin[1] + m[2] * lin[2]) / white);
  }
  return {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

// H in [0, 360), S and V in [0, 1].
inline Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  double h = 0.0;
  if (delta > 0.0) {
    if (mx == r) {
      h = 60.0 * std::fmod((g - b) / delta, 6.0);
    } else if (mx == g) {
      h = 60.0 * ((b - r) / delta + 2.0);
    } else {
      h = 60.0 * ((r - g) / delta + 4.0);
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
  }
  const double s = mx > 0.0 ? delta / mx : 0.0;
  return {h, s, mx / 255.0};
}

inline LabPlanes rgb_to_lab(const RgbPlanes& rgb) {
  const int w = rgb.r.width(), h = rgb.r.height();
  LabPlanes out{PixelPlane(w, h), PixelPlane(w, h), PixelPlane(w, h)};
  for (std::size_t i = 0; i < rgb.r.size(); ++i) {
    const Lab lab = srgb_to_lab(rgb.r.samples()[i], rgb.g.samples()[i], rgb.b.samples()[i]);
    out.l.samples()[i] = lab.l;
    out.a.samples()[i] = lab.a;
    out.b.samples()[i] = lab.b;
  }
  return out;
}

inline HsvPlanes rgb_to_hsv(const RgbPlanes& rgb) {
  const int w = rgb.r.width(), h = rgb.r.height();
  HsvPlanes out{PixelPlane(w, h), PixelPlane(w, h), PixelPlane(w, h)};
  for (std::size_t i = 0; i < rgb.r.size(); ++i) {
    const Hsv hsv = rgb_to_hsv(rgb.r.samples()[i], rgb.g.samples()[i], rgb.b.samples()[i]);
    out.h.samples()[i] = hsv.h;
    out.s.samples()[i] = hsv.s;
    out.v.samples()[i] = hsv.v;
  }
  return out;
}

// M_n = F_n - F_{n+1}
inline PixelPlane frame_diff(const PixelPlane& current, const PixelPlane& next) {
  if (!current.same_shape(next)) {
    throw DimensionError("frame_diff of " + std::to_string(current.width()) + "x" +
                         std::to_string(current.height()) + " and " +
                         std::to_string(next.width()) + "x" + std::to_string(next.height()));
  }
  PixelPlane out(current.width(), current.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples()[i] = current.samples()[i] - next.samples()[i];
  }
  return out;
}

}  // namespace gamevqp

#endif  // GAMEVQP_VIDEO_IO_HPP_
