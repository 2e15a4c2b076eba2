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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gamevqp/csv.hpp"
#include "gamevqp/numeric.hpp"
#include "gamevqp/subjective.hpp"
#include "gtest/gtest.h"
#include "support/synth.hpp"

namespace gamevqp {
namespace {

std::vector<Rating> clone_panel(std::vector<Rating> r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    Rating c = r[i];
    c.subject += "_clone";
    r.push_back(c);
  }
  return r;
}

TEST(ZScores, TwoScoreSession) {
  const RatingMatrix m({{"s1", "a", 1, 40}, {"s1", "b", 1, 60}});
  const ZScoreMatrix z = session_zscores(m);
  ASSERT_EQ(z.entries.size(), 2u);
  EXPECT_NEAR(z.entries[0].z, -0.7071067811865476, 1e-12);
  EXPECT_NEAR(z.entries[1].z, 0.7071067811865476, 1e-12);
  ASSERT_EQ(z.sessions.size(), 1u);
  EXPECT_NEAR(z.sessions[0].std, 14.142135623730951, 1e-12);
  EXPECT_EQ(z.sessions[0].count, 2u);
}

TEST(ZScores, DegenerateSessionNamesSubjectAndSession) {
  const RatingMatrix flat({{"s7", "a", 2, 50}, {"s7", "b", 2, 50}, {"s7", "c", 2, 50}});
  try {
    session_zscores(flat);
    FAIL() << "expected DegenerateSession";
  } catch (const DegenerateSession& e) {
    EXPECT_NE(std::string(e.what()).find("s7"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
  EXPECT_THROW(session_zscores(RatingMatrix({{"s1", "a", 1, 10}, {"s1", "b", 2, 20}})), DegenerateSession);
}

TEST(ZScores, StandardizationIdentity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RatingMatrix m(synth::rating_panel({}, seed));
    const ZScoreMatrix z = session_zscores(m);
    std::map<std::pair<std::string, int>, std::vector<double>> groups;
    std::map<std::pair<std::string, std::string>, int> session_of;
    for (const Rating& r : m.entries()) session_of[{r.subject, r.video}] = r.session;
    for (const ZEntry& e : z.entries) groups[{e.subject, session_of.at({e.subject, e.video})}].push_back(e.z);
    ASSERT_EQ(z.entries.size(), m.size());
    for (const auto& [key, zs] : groups) {
      EXPECT_NEAR(mean(zs), 0.0, 1e-9);
      double ss = 0;
      for (double v : zs) ss += v * v;
      EXPECT_NEAR(std::sqrt(ss / (zs.size() - 1)), 1.0, 1e-9);
    }
  }
}

TEST(RatingInput, Validation) {
  EXPECT_THROW(RatingMatrix({{"s", "a", 1, 101}}), InputError);
  EXPECT_THROW(RatingMatrix({{"s", "a", 0, 50}}), InputError);
  EXPECT_THROW(RatingMatrix({{"s", "a", 1, 50}, {"s", "a", 2, 40}}), InputError);
  const auto doc = parse_csv("subject_id,video_id,session,score\ns1,a,1,50\ns1,b,1,abc\n", "r.csv");
  try {
    read_ratings(doc);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("r.csv"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
  }
  EXPECT_THROW(read_ratings(parse_csv("subject,video,session,score\n", "r.csv")), SchemaError);
}

TEST(Rejection, IdenticalRatersKeepEveryone) {
  std::vector<Rating> r;
  for (int s = 0; s < 5; ++s) {
    for (int v = 0; v < 10; ++v) r.push_back({synth::subject_id(s), synth::video_id(v), 1, 10.0 + 7 * v});
  }
  const RejectionReport rep = bt500_reject(session_zscores(RatingMatrix(r)));
  EXPECT_TRUE(rep.rejected().empty());
  for (const auto& s : rep.subjects) {
    EXPECT_EQ(s.p, 0u);
    EXPECT_EQ(s.q, 0u);
    EXPECT_EQ(s.total, 10u);
  }
}

TEST(Rejection, NeedsThreeSubjects) {
  std::vector<Rating> r;
  for (int s = 0; s < 2; ++s) {
    for (int v = 0; v < 4; ++v) r.push_back({synth::subject_id(s), synth::video_id(v), 1, 10.0 * v + s});
  }
  EXPECT_THROW(bt500_reject(session_zscores(RatingMatrix(r))), InputError);
}

TEST(Rejection, ReportInvariantsAndConsistentSubjectsKept) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RatingMatrix m(synth::rating_panel({}, seed));
    const RejectionReport rep = bt500_reject(session_zscores(m));
    const auto subjects = m.subjects();
    for (const auto& s : rep.rejected()) EXPECT_TRUE(subjects.count(s));
    for (const auto& s : rep.subjects) EXPECT_LE(s.p + s.q, s.total);
    for (int i = 0; i < 20; ++i) EXPECT_FALSE(rep.rejected().count(synth::subject_id(i)));
    for (const auto& v : rep.videos) {
      const double k = v.threshold / v.std;
      EXPECT_TRUE(std::abs(k - 2.0) < 1e-12 || std::abs(k - std::sqrt(20.0)) < 1e-12);
    }
  }
}

TEST(Rescale, EndpointsMapToZeroAndHundred) {
  ZScoreMatrix z;
  z.entries = {{"s1", "v", -1.0}, {"s2", "v", 1.0}};
  const MosTable t = rescale_and_mos(z, {});
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(t.rows[0].mos, 50.0);
  EXPECT_EQ(t.rows[0].n, 2u);
  EXPECT_NEAR(t.rows[0].std, std::sqrt(5000.0), 1e-9);
  EXPECT_NEAR(t.rows[0].ci95, 1.96 * std::sqrt(5000.0) / std::sqrt(2.0), 1e-9);
}

TEST(Rescale, GlobalRangeAndBounds) {
  const RatingMatrix m(synth::rating_panel({}, 3));
  const ZScoreMatrix z = session_zscores(m);
  const MosTable t = rescale_and_mos(z, {});
  EXPECT_EQ(t.rows.size(), 100u);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& row : t.rows) {
    EXPECT_GE(row.n, 1u);
    EXPECT_GE(row.mos, 0.0);
    EXPECT_LE(row.mos, 100.0);
  }
  double zlo = INFINITY, zhi = -INFINITY;
  for (const auto& e : z.entries) zlo = std::min(zlo, e.z), zhi = std::max(zhi, e.z);
  // Reconstruct per-entry rescaled values to confirm the endpoints.
  for (const auto& e : z.entries) {
    const double v = 100.0 * (e.z - zlo) / (zhi - zlo);
    lo = std::min(lo, v), hi = std::max(hi, v);
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 100.0);
}

TEST(Rescale, CloneRatersLeaveMosUnchanged) {
  const auto base = synth::rating_panel({.consistent = 6, .uniform = 0, .videos = 30}, 9);
  const MosTable a = rescale_and_mos(session_zscores(RatingMatrix(base)), {});
  const MosTable b = rescale_and_mos(session_zscores(RatingMatrix(clone_panel(base))), {});
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].video, b.rows[i].video);
    EXPECT_NEAR(a.rows[i].mos, b.rows[i].mos, 1e-9);
    EXPECT_EQ(2 * a.rows[i].n, b.rows[i].n);
  }
}

TEST(Rescale, Errors) {
  ZScoreMatrix z;
  z.entries = {{"s1", "v1", -1.0}, {"s2", "v1", 1.0}, {"s2", "v2", 0.5}};
  try {
    rescale_and_mos(z, {"s2"});
    FAIL();
  } catch (const EmptyVideo& e) {
    EXPECT_NE(std::string(e.what()).find("v2"), std::string::npos);
  }
  z.entries = {{"s1", "v1", 0.3}, {"s2", "v1", 0.3}};
  EXPECT_THROW(rescale_and_mos(z, {}), DegenerateRange);
}

TEST(MosCsv, RoundTrip) {
  const MosTable t = rescale_and_mos(session_zscores(RatingMatrix(synth::rating_panel({.videos = 12}, 1))), {});
  const MosTable back = read_mos_table(parse_csv(write_mos_table(t, "# note"), "m.csv"));
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].video, t.rows[i].video);
    EXPECT_EQ(back.rows[i].mos, t.rows[i].mos);
    EXPECT_EQ(back.rows[i].n, t.rows[i].n);
  }
  const MosTable minimal = read_mos_table(parse_csv("video_id,mos\nx,12.5\n", "m.csv"));
  ASSERT_NE(minimal.find("x"), nullptr);
  EXPECT_EQ(minimal.find("x")->mos, 12.5);
  EXPECT_EQ(minimal.find("y"), nullptr);
}

TEST(Consistency, IdenticalRatersGivePerfectSplits) {
  std::vector<Rating> r;
  for (int s = 0; s < 6; ++s) {
    for (int v = 0; v < 15; ++v) r.push_back({synth::subject_id(s), synth::video_id(v), 1, 3.0 * v});
  }
  const auto res = inter_subject_consistency(RatingMatrix(r), 25, 4);
  ASSERT_EQ(res.sroccs.size(), 25u);
  for (double v : res.sroccs) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_DOUBLE_EQ(res.median, 1.0);
}

TEST(Consistency, NoisyPanelStaysHigh) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RatingMatrix m(synth::rating_panel({.consistent = 30, .uniform = 0, .noise = 5.0}, seed));
    EXPECT_GE(inter_subject_consistency(m, 100, seed).median, 0.9);
  }
}

TEST(Consistency, DeterministicAcrossThreadCounts) {
  const RatingMatrix m(synth::rating_panel({.consistent = 9, .videos = 40}, 2));
  const auto a = inter_subject_consistency(m, 40, 11, 1);
  const auto b = inter_subject_consistency(m, 40, 11, 4);
  EXPECT_EQ(a.sroccs, b.sroccs);
}

TEST(Consistency, PreconditionsEnforced) {
  EXPECT_THROW(inter_subject_consistency(RatingMatrix({{"s", "a", 1, 1}, {"t", "a", 1, 2}, {"s", "b", 1, 3}})),
               InputError);
}

TEST(IntraConsistency, PerfectAndReversedSubjects) {
  MosTable mos;
  std::vector<Rating> r;
  for (int v = 0; v < 8; ++v) {
    mos.rows.push_back({synth::video_id(v), 10.0 * v, 1, 0, 0});
    r.push_back({"up", synth::video_id(v), 1, 5.0 + v});
    r.push_back({"down", synth::video_id(v), 1, 90.0 - 3 * v});
  }
  r.push_back({"few", synth::video_id(0), 1, 1});
  const auto res = intra_subject_consistency(RatingMatrix(r), mos);
  ASSERT_EQ(res.per_subject.size(), 2u);
  for (const auto& [s, rho] : res.per_subject) EXPECT_DOUBLE_EQ(rho, s == "up" ? 1.0 : -1.0);
  EXPECT_EQ(res.warnings.size(), 1u);
}

TEST(IntraConsistency, InvariantToRatingOrder) {
  auto panel = synth::rating_panel({.consistent = 8, .videos = 25}, 6);
  const MosTable mos = rescale_and_mos(session_zscores(RatingMatrix(panel)), {});
  const auto a = intra_subject_consistency(RatingMatrix(panel), mos);
  std::reverse(panel.begin(), panel.end());
  const auto b = intra_subject_consistency(RatingMatrix(panel), mos);
  EXPECT_EQ(a.per_subject, b.per_subject);
  EXPECT_EQ(a.median, b.median);
}

}  // namespace
}  // namespace gamevqp
