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

// Subjective rating processing: per-session z-scores, BT.500-style subject
// screening, global rescaling to [0, 100], MOS, and consistency analysis.

#ifndef GAMEVQP_SUBJECTIVE_HPP_
#define GAMEVQP_SUBJECTIVE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "gamevqp/csv.hpp"
#include "gamevqp/error.hpp"
#include "gamevqp/evalstats.hpp"
#include "gamevqp/numeric.hpp"
#include "gamevqp/parallel.hpp"
#include "gamevqp/random.hpp"

namespace gamevqp {

struct Rating {
  std::string subject;
  std::string video;
  int session = 1;
  double score = 0.0;
};

// Raw scores s_ijk. A (subject, video) pair appears at most once; its
// presence is the indicator delta(i, j).
class RatingMatrix {
 public:
  RatingMatrix() = default;
  explicit RatingMatrix(std::vector<Rating> entries) : entries_(std::move(entries)) {
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (const Rating& r : entries_) {
      if (r.subject.empty() || r.video.empty()) throw InputError("empty subject or video id");
      if (r.session < 1) throw InputError("session must be >= 1 for subject " + r.subject);
      if (!(r.score >= 0.0 && r.score <= 100.0)) {
        throw InputError("score out of [0, 100] for (" + r.subject + ", " + r.video + ")");
      }
      if (!seen.emplace(r.subject, r.video).second) {
        throw InputError("subject " + r.subject + " rated video " + r.video + " more than once");
      }
    }
  }

  std::span<const Rating> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::set<std::string> subjects() const {
    std::set<std::string> s;
    for (const auto& r : entries_) s.insert(r.subject);
    return s;
  }

 private:
  std::vector<Rating> entries_;
};

inline RatingMatrix read_ratings(const CsvDocument& doc) {
  static constexpr std::string_view kHeader[] = {"subject_id", "video_id", "session", "score"};
  require_header(doc, kHeader);
  std::vector<Rating> entries;
  entries.reserve(doc.rows.size());
  std::set<std::pair<std::string, std::string>> seen;
  for (const CsvRow& row : doc.rows) {
    Rating r;
    r.subject = parse_id(doc, row, 0);
    r.video = parse_id(doc, row, 1);
    const long long session = parse_integer(doc, row, 2);
    if (session < 1 || session > 1000000) {
      throw SchemaError(doc.where(row, 2) + ": session must be a positive integer");
    }
    r.session = static_cast<int>(session);
    r.score = parse_real(doc, row, 3);
    if (r.score < 0.0 || r.score > 100.0) {
      throw SchemaError(doc.where(row, 3) + ": score must lie in [0, 100]");
    }
    if (!seen.emplace(r.subject, r.video).second) {
      throw SchemaError(doc.where(row, 1) + ": duplicate rating of video '" + r.video +
                        "' by subject '" + r.subject + "'");
    }
    entries.push_back(std::move(r));
  }
  return RatingMatrix(std::move(entries));
}

// ---------------------------------------------------------------------------
// z-scores

struct SessionStats {
  std::string subject;
  int session = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample (N - 1) standard deviation
};

struct ZEntry {
  std::string subject;
  std::string video;
  double z = 0.0;
};

struct ZScoreMatrix {
  std::vector<ZEntry> entries;  // sorted by (subject, video)
  std::vector<SessionStats> sessions;

  std::size_t subject_count() const {
    std::set<std::string_view> s;
    for (const auto& e : entries) s.insert(e.subject);
    return s.size();
  }
};

inline ZScoreMatrix session_zscores(const RatingMatrix& ratings) {
  std::map<std::pair<std::string, int>, std::vector<const Rating*>> groups;
  for (const Rating& r : ratings.entries()) groups[{r.subject, r.session}].push_back(&r);
  ZScoreMatrix out;
  for (const auto& [key, members] : groups) {
    std::vector<double> scores;
    for (const Rating* r : members) scores.push_back(r->score);
    SessionStats st{key.first, key.second, scores.size(), mean(scores), sample_std(scores)};
    if (st.count < 2 || !(st.std > 0.0)) {
      throw DegenerateSession("subject '" + key.first + "' session " + std::to_string(key.second) +
                              (st.count < 2 ? " has fewer than 2 ratings"
                                            : " has zero score variance"));
    }
    for (const Rating* r : members) {
      out.entries.push_back({r->subject, r->video, (r->score - st.mean) / st.std});
    }
    out.sessions.push_back(std::move(st));
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const ZEntry& a, const ZEntry& b) {
    return std::tie(a.subject, a.video) < std::tie(b.subject, b.video);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Subject screening

struct SubjectScreening {
  std::string subject;
  std::size_t p = 0;  // ratings above mean + threshold
  std::size_t q = 0;  // ratings below mean - threshold
  std::size_t total = 0;
  bool rejected = false;
};

struct VideoScreening {
  std::string video;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double kurtosis = 0.0;
  double threshold = 0.0;
};

struct RejectionReport {
  std::vector<SubjectScreening> subjects;
  std::vector<VideoScreening> videos;

  std::set<std::string> rejected() const {
    std::set<std::string> out;
    for (const auto& s : subjects) {
      if (s.rejected) out.insert(s.subject);
    }
    return out;
  }
};

// Single-pass screening on z-scores. Per video: threshold 2 sigma when the
// kurtosis lies in [2, 4] (near-normal), sqrt(20) sigma otherwise. A subject
// is rejected when more than 5% of their ratings fall outside and the
// excursions are balanced: |P - Q| / (P + Q) < 0.3. Videos with a single
// rating carry no spread and do not contribute.
inline RejectionReport bt500_reject(const ZScoreMatrix& z) {
  if (z.subject_count() < 3) throw InputError("subject screening needs at least 3 subjects");
  std::map<std::string, std::vector<const ZEntry*>> by_video;
  std::map<std::string, SubjectScreening> by_subject;
  for (const ZEntry& e : z.entries) {
    by_video[e.video].push_back(&e);
    auto& s = by_subject[e.subject];
    s.subject = e.subject;
    ++s.total;
  }
  RejectionReport report;
  for (const auto& [video, members] : by_video) {
    std::vector<double> values;
    for (const ZEntry* e : members) values.push_back(e->z);
    VideoScreening vs;
    vs.video = video;
    vs.count = values.size();
    vs.mean = mean(values);
    vs.std = sample_std(values);
    vs.kurtosis = kurtosis(values);
    const bool normal = vs.kurtosis >= 2.0 && vs.kurtosis <= 4.0;
    vs.threshold = (normal ? 2.0 : std::sqrt(20.0)) * vs.std;
    if (values.size() >= 2) {
      for (const ZEntry* e : members) {
        if (e->z > vs.mean + vs.threshold) ++by_subject[e->subject].p;
        if (e->z < vs.mean - vs.threshold) ++by_subject[e->subject].q;
      }
    }
    report.videos.push_back(vs);
  }
  for (auto& [id, s] : by_subject) {
    const double pq = static_cast<double>(s.p + s.q);
    s.rejected = pq > 0.0 && pq / static_cast<double>(s.total) > 0.05 &&
                 std::abs(static_cast<double>(s.p) - static_cast<double>(s.q)) / pq < 0.3;
    report.subjects.push_back(s);
  }
  return report;
}

// ---------------------------------------------------------------------------
// MOS

struct MosRow {
  std::string video;
  double mos = 0.0;
  std::size_t n = 0;
  double std = 0.0;   // sample std of the rescaled scores (0 for a single rater)
  double ci95 = 0.0;  // 1.96 std / sqrt(n)
};

struct MosTable {
  std::vector<MosRow> rows;  // sorted by video id

  const MosRow* find(std::string_view video) const {
    const auto it = std::lower_bound(rows.begin(), rows.end(), video,
                                     [](const MosRow& r, std::string_view v) { return r.video < v; });
    return it != rows.end() && it->video == video ? &*it : nullptr;
  }
};

// One global affine map sends the minimum / maximum retained z-score to
// 0 / 100; MOS_j averages the rescaled scores of video j's retained raters.
inline MosTable rescale_and_mos(const ZScoreMatrix& z, const std::set<std::string>& rejected) {
  std::map<std::string, std::vector<double>> by_video;
  std::set<std::string> emptied;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const ZEntry& e : z.entries) {
    if (rejected.contains(e.subject)) {
      emptied.insert(e.video);
      continue;
    }
    by_video[e.video].push_back(e.z);
    lo = std::min(lo, e.z);
    hi = std::max(hi, e.z);
  }
  std::vector<std::string> lost;
  for (const auto& v : emptied) {
    if (!by_video.contains(v)) lost.push_back(v);
  }
  if (!lost.empty()) {
    std::string ids;
    for (const auto& v : lost) ids += (ids.empty() ? "" : ", ") + v;
    throw EmptyVideo("videos left without raters after rejection: " + ids);
  }
  if (by_video.empty()) throw EmptyVideo("no ratings retained");
  if (!(hi > lo)) throw DegenerateRange("all retained z-scores are equal");
  MosTable table;
  for (auto& [video, zs] : by_video) {
    for (double& v : zs) v = 100.0 * (v - lo) / (hi - lo);
    MosRow row{video, mean(zs), zs.size(), sample_std(zs), 0.0};
    row.ci95 = 1.96 * row.std / std::sqrt(static_cast<double>(row.n));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string write_mos_table(const MosTable& table, std::string_view comment = {}) {
  std::string out(comment);
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += "video_id,mos,n_ratings,std,ci95\n";
  for (const MosRow& r : table.rows) {
    out += csv_field(r.video) + "," + format_real(r.mos) + "," + std::to_string(r.n) + "," +
           format_real(r.std) + "," + format_real(r.ci95) + "\n";
  }
  return out;
}

inline MosTable read_mos_table(const CsvDocument& doc) {
  static constexpr std::string_view kHeader[] = {"video_id", "mos"};
  require_header(doc, kHeader, false);
  const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < doc.header.size(); ++i) {
      if (doc.header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto n_col = col("n_ratings"), std_col = col("std"), ci_col = col("ci95");
  MosTable table;
  std::set<std::string> seen;
  for (const CsvRow& row : doc.rows) {
    MosRow r;
    r.video = parse_id(doc, row, 0);
    if (!seen.insert(r.video).second) {
      throw SchemaError(doc.where(row, 0) + ": duplicate video_id '" + r.video + "'");
    }
    r.mos = parse_real(doc, row, 1);
    if (n_col) {
      const long long n = parse_integer(doc, row, *n_col);
      if (n < 1) throw SchemaError(doc.where(row, *n_col) + ": n_ratings must be >= 1");
      r.n = static_cast<std::size_t>(n);
    }
    if (std_col) r.std = parse_real(doc, row, *std_col);
    if (ci_col) r.ci95 = parse_real(doc, row, *ci_col);
    table.rows.push_back(std::move(r));
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const MosRow& a, const MosRow& b) { return a.video < b.video; });
  return table;
}

// ---------------------------------------------------------------------------
// Consistency

struct InterSubjectResult {
  std::vector<double> sroccs;  // one per split, in split order
  double median = 0.0;
};

// Each split partitions every video's raters into two equal halves (one
// rating dropped at random when the count is odd), computes per-half MOS
// from the raw scores, and records the SROCC between the two MOS vectors.
// Split t uses the generator seeded with seed + t.
inline InterSubjectResult inter_subject_consistency(const RatingMatrix& ratings,
                                                    std::size_t n_splits = 100,
                                                    std::uint64_t seed = 0,
                                                    unsigned threads = 1) {
  std::map<std::string, std::vector<std::pair<std::string, double>>> by_video;
  for (const Rating& r : ratings.entries()) by_video[r.video].emplace_back(r.subject, r.score);
  for (auto& [video, scores] : by_video) {
    if (scores.size() < 2) throw InputError("video '" + video + "' has fewer than 2 ratings");
    std::sort(scores.begin(), scores.end());
  }
  if (by_video.size() < 3) throw InputError("inter-subject consistency needs at least 3 videos");
  InterSubjectResult out;
  out.sroccs.resize(n_splits);
  parallel_for(n_splits, threads, [&](std::size_t t) {
    Rng rng = make_rng(seed, t);
    std::vector<double> group_a, group_b;
    group_a.reserve(by_video.size());
    group_b.reserve(by_video.size());
    for (const auto& [video, scores] : by_video) {
      std::vector<double> s;
      for (const auto& entry : scores) s.push_back(entry.second);
      shuffle(s, rng);
      const std::size_t half = s.size() / 2;
      group_a.push_back(mean(std::span<const double>(s).first(half)));
      group_b.push_back(mean(std::span<const double>(s).subspan(half, half)));
    }
    out.sroccs[t] = srocc(group_a, group_b);
  });
  out.median = median(out.sroccs);
  return out;
}

struct IntraSubjectResult {
  std::vector<std::pair<std::string, double>> per_subject;
  double median = 0.0;
  std::vector<std::string> warnings;
};

// Per subject: SROCC between their raw scores and the MOS of the videos they
// rated. Subjects with fewer than 3 usable ratings (or constant scores) are
// skipped with a warning.
inline IntraSubjectResult intra_subject_consistency(const RatingMatrix& ratings,
                                                    const MosTable& mos) {
  std::map<std::string, std::vector<std::pair<double, double>>> by_subject;
  std::set<std::string> missing;
  for (const Rating& r : ratings.entries()) {
    const MosRow* row = mos.find(r.video);
    if (!row) {
      missing.insert(r.video);
      continue;
    }
    by_subject[r.subject].emplace_back(r.score, row->mos);
  }
  IntraSubjectResult out;
  for (const auto& v : missing) out.warnings.push_back("video '" + v + "' has no MOS; ignored");
  std::vector<double> values;
  for (const auto& [subject, pairs] : by_subject) {
    if (pairs.size() < 3) {
      out.warnings.push_back("subject '" + subject + "' rated fewer than 3 videos; skipped");
      continue;
    }
    std::vector<double> scores, mos_values;
    for (const auto& [s, m] : pairs) {
      scores.push_back(s);
      mos_values.push_back(m);
    }
    try {
      const double rho = srocc(scores, mos_values);
      out.per_subject.emplace_back(subject, rho);
      values.push_back(rho);
    } catch (const DegenerateInput&) {
      out.warnings.push_back("subject '" + subject + "' has constant scores or MOS; skipped");
    }
  }
  if (values.empty()) throw InputError("no subject qualified for intra-subject consistency");
  out.median = median(values);
  return out;
}

}  // namespace gamevqp

#endif  // GAMEVQP_SUBJECTIVE_HPP_
