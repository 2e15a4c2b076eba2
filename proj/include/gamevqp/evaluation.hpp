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

// Evaluation protocols: repeated random train/test splits, k-fold
// prediction aggregation, and the manifest-driven feature pipeline.

#ifndef GAMEVQP_EVALUATION_HPP_
#define GAMEVQP_EVALUATION_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamevqp/csv.hpp"
#include "gamevqp/error.hpp"
#include "gamevqp/evalstats.hpp"
#include "gamevqp/gamevqp.hpp"
#include "gamevqp/nss_features.hpp"
#include "gamevqp/numeric.hpp"
#include "gamevqp/parallel.hpp"
#include "gamevqp/random.hpp"
#include "gamevqp/video_io.hpp"
#include "json.hpp"

namespace gamevqp {

struct SplitConfig {
  std::size_t iterations = 100;
  double train_frac = 0.8;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // Keep the per-iteration train/test index lists in the report.
  bool record_partitions = false;
};

struct SplitPartition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct SplitReport {
  std::size_t videos = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  SplitConfig config;
  std::string mode;
  std::vector<MetricTriple> per_iteration;
  MetricTriple median;
  // Iterations whose test predictions were constant; those score
  // SROCC = LCC = 0 and RMSE against the test MOS mean.
  std::size_t degenerate_iterations = 0;
  std::vector<SplitPartition> partitions;
};

inline std::size_t train_count(std::size_t n, double train_frac) {
  return static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n) + 1e-9));
}

// Iteration t shuffles the row indices with the generator seeded seed + t and
// takes the first floor(train_frac * n) as training rows.
inline SplitPartition split_partition(std::size_t n, double train_frac, std::uint64_t seed,
                                      std::size_t t) {
  Rng rng = make_rng(seed, t);
  const auto perm = random_permutation(n, rng);
  const std::size_t k = train_count(n, train_frac);
  SplitPartition p;
  p.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
  p.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(k), perm.end());
  return p;
}

// SROCC on raw predictions; LCC and RMSE after a logistic map fitted on the
// same test set. Test sets smaller than five use a least-squares line instead.
inline MetricTriple score_test_set(std::span<const double> pred, std::span<const double> mos,
                                   bool* degenerate = nullptr) {
  const bool constant =
      std::all_of(pred.begin(), pred.end(), [&](double v) { return v == pred[0]; });
  if (degenerate) *degenerate = constant;
  if (constant) {
    const std::vector<double> flat(mos.size(), mean(mos));
    return {0.0, 0.0, rmse(flat, mos)};
  }
  if (std::all_of(mos.begin(), mos.end(), [&](double v) { return v == mos[0]; })) {
    throw DegenerateInput("test-set MOS values are all equal");
  }
  MetricTriple m;
  m.srocc = srocc(pred, mos);
  std::vector<double> mapped(pred.size());
  if (pred.size() >= 5) {
    const LogisticFit fit = fit_logistic(pred, mos);
    for (std::size_t i = 0; i < pred.size(); ++i) mapped[i] = fit(pred[i]);
  } else {
    const double px = mean(pred), py = mean(mos);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      sxy += (pred[i] - px) * (mos[i] - py);
      sxx += (pred[i] - px) * (pred[i] - px);
    }
    for (std::size_t i = 0; i < pred.size(); ++i) mapped[i] = py + sxy / sxx * (pred[i] - px);
  }
  const bool mapped_constant =
      std::all_of(mapped.begin(), mapped.end(), [&](double v) { return v == mapped[0]; });
  m.lcc = mapped_constant ? 0.0 : pearson_lcc(mapped, mos);
  m.rmse = rmse(mapped, mos);
  return m;
}

inline MetricTriple median_triple(std::span<const MetricTriple> xs) {
  std::vector<double> s, l, r;
  for (const auto& m : xs) {
    s.push_back(m.srocc);
    l.push_back(m.lcc);
    r.push_back(m.rmse);
  }
  return {median(s), median(l), median(r)};
}

inline SplitReport split_protocol(const Dataset& data, const ModelSpec& spec,
                                  const SplitConfig& config) {
  const std::size_t n = data.size();
  if (n < 10) throw InputError("split protocol needs at least 10 videos, got " + std::to_string(n));
  if (!(config.train_frac > 0.0 && config.train_frac < 1.0)) {
    throw InputError("train fraction must lie in (0, 1)");
  }
  if (config.iterations < 1) throw InputError("iterations must be >= 1");
  SplitReport report;
  report.videos = n;
  report.train_size = train_count(n, config.train_frac);
  report.test_size = n - report.train_size;
  if (report.train_size < 1 || report.test_size < 3) {
    throw InputError("train fraction leaves " + std::to_string(report.train_size) +
                     " training and " + std::to_string(report.test_size) +
                     " test videos; need >= 1 and >= 3");
  }
  report.config = config;
  report.mode = std::string(mode_name(data.has_deep() ? PredictorMode::kFull : PredictorMode::kNssOnly));
  report.per_iteration.resize(config.iterations);
  std::vector<char> degenerate(config.iterations, 0);
  if (config.record_partitions) report.partitions.resize(config.iterations);
  parallel_for(config.iterations, config.threads, [&](std::size_t t) {
    SplitPartition part = split_partition(n, config.train_frac, config.seed, t);
    const Dataset train = data.subset(part.train);
    const Dataset test = data.subset(part.test);
    const GameVqpModel model = train_gamevqp(train, spec, config.seed + t);
    const auto pred = predict_gamevqp(model, test);
    bool flat = false;
    report.per_iteration[t] = score_test_set(pred, test.mos, &flat);
    degenerate[t] = flat;
    if (config.record_partitions) report.partitions[t] = std::move(part);
  });
  report.degenerate_iterations =
      static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  report.median = median_triple(report.per_iteration);
  return report;
}

inline nlohmann::ordered_json split_report_to_json(const SplitReport& r, const ModelSpec& spec) {
  nlohmann::ordered_json j;
  auto& cfg = j["config"];
  cfg["iterations"] = r.config.iterations;
  cfg["train_frac"] = r.config.train_frac;
  cfg["seed"] = r.config.seed;
  cfg["videos"] = r.videos;
  cfg["train"] = r.train_size;
  cfg["test"] = r.test_size;
  cfg["mode"] = r.mode;
  cfg["grid_search"] = spec.grid_search;
  cfg["C"] = spec.params.C;
  cfg["epsilon"] = spec.params.epsilon;
  cfg["gamma"] = spec.params.gamma;
  cfg["tol"] = spec.params.tol;
  j["median"] = {{"srocc", r.median.srocc}, {"lcc", r.median.lcc}, {"rmse", r.median.rmse}};
  j["degenerate_iterations"] = r.degenerate_iterations;
  std::vector<double> s, l, e;
  for (const auto& m : r.per_iteration) {
    s.push_back(m.srocc);
    l.push_back(m.lcc);
    e.push_back(m.rmse);
  }
  j["srocc"] = s;
  j["lcc"] = l;
  j["rmse"] = e;
  return j;
}

struct SplitDistributions {
  std::vector<double> srocc;
  std::vector<double> lcc;
};

inline SplitDistributions read_split_distributions(std::string_view text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(source + ": invalid JSON: " + e.what());
  }
  SplitDistributions d;
  try {
    d.srocc = j.at("srocc").get<std::vector<double>>();
    d.lcc = j.at("lcc").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(source + ": not a split report: " + e.what());
  }
  if (d.srocc.empty() || d.srocc.size() != d.lcc.size()) {
    throw SchemaError(source + ": srocc and lcc lists must be non-empty and of equal length");
  }
  return d;
}

// ---------------------------------------------------------------------------
// k-fold prediction aggregation

struct ScatterRow {
  std::string video;
  double prediction = 0.0;
  double mos = 0.0;
  std::size_t fold = 0;
};

// Rows are shuffled once with the generator seeded `seed`; position i goes to
// fold i mod k. Fold f trains with seed + f. Output is sorted by video id.
inline std::vector<ScatterRow> kfold_predictions(const Dataset& data, const ModelSpec& spec,
                                                 std::size_t k, std::uint64_t seed,
                                                 unsigned threads = 1) {
  const std::size_t n = data.size();
  if (k < 2) throw InputError("k-fold needs k >= 2");
  if (n < k) throw InputError("k-fold needs at least k videos");
  Rng rng = make_rng(seed);
  const auto perm = random_permutation(n, rng);
  std::vector<ScatterRow> rows(n);
  parallel_for(k, threads, [&](std::size_t f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (i % k == f ? test : train).push_back(perm[i]);
    const GameVqpModel model = train_gamevqp(data.subset(train), spec, seed + f);
    const auto pred = predict_gamevqp(model, data.subset(test));
    for (std::size_t i = 0; i < test.size(); ++i) {
      rows[test[i]] = {data.ids[test[i]], pred[i], data.mos[test[i]], f};
    }
  });
  std::sort(rows.begin(), rows.end(),
            [](const ScatterRow& a, const ScatterRow& b) { return a.video < b.video; });
  return rows;
}

inline std::string write_scatter(std::span<const ScatterRow> rows, std::string_view comment = {}) {
  std::string out(comment);
  out += "video_id,prediction,mos\n";
  for (const auto& r : rows) {
    out += csv_field(r.video) + "," + format_real(r.prediction) + "," + format_real(r.mos) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest-driven clip access

struct ManifestRow {
  std::string video;
  std::filesystem::path path;  // resolved against the manifest directory
  int width = 0;
  int height = 0;
  double fps = 0.0;
};

inline std::vector<ManifestRow> read_manifest(const CsvDocument& doc,
                                              const std::filesystem::path& base_dir) {
  static constexpr std::string_view kHeader[] = {"video_id", "path", "width", "height", "fps"};
  require_header(doc, kHeader);
  std::vector<ManifestRow> rows;
  std::set<std::string> seen;
  for (const CsvRow& row : doc.rows) {
    ManifestRow m;
    m.video = parse_id(doc, row, 0);
    if (!seen.insert(m.video).second) {
      throw SchemaError(doc.where(row, 0) + ": duplicate video_id '" + m.video + "'");
    }
    const std::filesystem::path p(parse_id(doc, row, 1));
    m.path = p.is_absolute() ? p : base_dir / p;
    const long long w = parse_integer(doc, row, 2), h = parse_integer(doc, row, 3);
    if (w < 1 || w > 16384) throw SchemaError(doc.where(row, 2) + ": width out of range");
    if (h < 1 || h > 16384) throw SchemaError(doc.where(row, 3) + ": height out of range");
    m.width = static_cast<int>(w);
    m.height = static_cast<int>(h);
    m.fps = parse_real(doc, row, 4);
    if (!(m.fps > 0.0) || m.fps > 1000.0) throw SchemaError(doc.where(row, 4) + ": fps out of range");
    rows.push_back(std::move(m));
  }
  return rows;
}

inline FrameRate frame_rate_from_real(double fps) {
  if (std::abs(fps - std::round(fps)) < 1e-9) return {static_cast<std::uint32_t>(std::round(fps)), 1};
  return {static_cast<std::uint32_t>(std::llround(fps * 1000.0)), 1000};
}

// Opens a manifest entry, validates its declared format and streams every
// frame through `sink(const Frame&)`. Returns the frame count and rate used.
// Headerless .yuv files are read as 8-bit 4:2:0 limited range.
template <typename Sink>
std::pair<std::size_t, double> stream_clip(const ManifestRow& row, Sink&& sink) {
  std::ifstream in(row.path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + row.path.string() + "' for video " + row.video);
  const auto run = [&](auto& reader) -> std::pair<std::size_t, double> {
    std::size_t count = 0;
    while (auto frame = reader.next()) {
      sink(*frame);
      ++count;
    }
    return {count, reader.format().fps.value()};
  };
  std::string ext = row.path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".yuv") {
    VideoFormat fmt;
    fmt.width = row.width;
    fmt.height = row.height;
    fmt.fps = frame_rate_from_real(row.fps);
    RawYuvReader reader(in, fmt);
    return run(reader);
  }
  Y4mReader reader(in);
  const VideoFormat& fmt = reader.format();
  if (fmt.width != row.width || fmt.height != row.height) {
    throw DimensionError(row.video + ": file is " + std::to_string(fmt.width) + "x" +
                         std::to_string(fmt.height) + ", manifest declares " +
                         std::to_string(row.width) + "x" + std::to_string(row.height));
  }
  if (std::abs(fmt.fps.value() - row.fps) > 1e-3 * row.fps) {
    throw InputError(row.video + ": file frame rate " + std::to_string(fmt.fps.value()) +
                     " differs from manifest " + std::to_string(row.fps));
  }
  return run(reader);
}

inline std::size_t count_frames(const ManifestRow& row) {
  return stream_clip(row, [](const Frame&) {}).first;
}

inline FeatureVector clip_nss_bag(const ManifestRow& row, double per_second = 1.0) {
  const std::size_t frames = count_frames(row);
  NssBagBuilder builder(frames, row.fps, per_second);
  stream_clip(row, [&](const Frame& f) { builder.push(f); });
  return builder.finish();
}

inline SiTi clip_si_ti(const ManifestRow& row) {
  SiTiAccumulator acc;
  const std::size_t frames = stream_clip(row, [&](const Frame& f) { acc.push(luma(f)); }).first;
  if (frames < 2) throw InsufficientFrames(row.video + ": TI needs at least 2 frames");
  return {acc.si(), acc.ti()};
}

}  // namespace gamevqp

#endif  // GAMEVQP_EVALUATION_HPP_
