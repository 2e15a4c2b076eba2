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

// Acceptance runner: prints one PASS / FAIL / SKIP line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gamevqp_cli.hpp"
#include "support/oracles.hpp"
#include "support/svr_oracle.hpp"
#include "support/synth.hpp"

namespace {

using namespace gamevqp;
namespace fs = std::filesystem;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::kPass : Status::kFail, std::move(detail)}; }

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  if (code != 0) std::fprintf(stderr, "  cli %s failed: %s", args[0].c_str(), err.str().c_str());
  return code;
}

std::vector<double> random_list(Rng& rng, std::size_t n, bool ties) {
  std::vector<double> v(n);
  for (double& x : v) x = ties ? static_cast<double>(uniform_index(rng, 6)) : uniform_real(rng, -50, 50);
  return v;
}

bool is_constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  double worst = 0.0;
  bool closed = std::abs(srocc(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{1, 3, 2, 4, 5}) - 0.9) <= 1e-12 &&
                std::abs(pearson_lcc(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) -
                         0.9819805060619657) <= 1e-12 &&
                std::abs(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) - 3.5355339059327378) <= 1e-12;
  Rng rng = make_rng(2026);
  std::size_t checked = 0;
  while (checked < 1000) {
    const std::size_t n = 3 + uniform_index(rng, 48);
    const bool ties = checked % 2 == 0;
    const auto x = random_list(rng, n, ties), y = random_list(rng, n, ties);
    if (is_constant(x) || is_constant(y)) continue;
    worst = std::max({worst, std::abs(srocc(x, y) - oracle::spearman(x, y)),
                      std::abs(pearson_lcc(x, y) - oracle::pearson(x, y)),
                      std::abs(rmse(x, y) - oracle::rmse(x, y))});
    ++checked;
  }
  return verdict(closed && worst <= 1e-12,
                 "1000 lists, max deviation " + fmt("%.3g", worst) + (closed ? ", closed forms ok" : ", closed forms FAILED"));
}

// Every rank arrangement (no ties) for each size pair with na + nb <= 12,
// plus random tied samples, compared against brute-force enumeration.
Outcome wilcoxon_exactness() {
  double worst_exact = 0.0, worst_untied = 0.0, worst_tied = 0.0;
  std::size_t pairs = 0, pairs_over = 0, untied_pairs_over = 0;
  std::string worst_pair;
  Rng rng = make_rng(7);
  for (std::size_t na = 1; na <= 11; ++na) {
    for (std::size_t nb = 1; na + nb <= 12; ++nb) {
      ++pairs;
      const std::size_t n = na + nb;
      double pair_untied = 0.0, pair_tied = 0.0;
      auto compare = [&](const std::vector<double>& a, const std::vector<double>& b, double& pair_worst) {
        const auto e = oracle::rank_sum_enumeration(a, b);
        const auto ex = wilcoxon_rank_sum(a, b, WilcoxonMode::kExact);
        const auto ap = wilcoxon_rank_sum(a, b, WilcoxonMode::kApproximate);
        worst_exact = std::max({worst_exact, std::abs(ex.p_greater - e.p_greater), std::abs(ex.p_less - e.p_less)});
        pair_worst = std::max({pair_worst, std::abs(ap.p_greater - e.p_greater), std::abs(ap.p_less - e.p_less)});
      };
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? a : b).push_back(static_cast<double>(i));
        compare(a, b, pair_untied);
      }
      for (int t = 0; t < 30; ++t) compare(random_list(rng, na, true), random_list(rng, nb, true), pair_tied);
      if (std::max(pair_untied, pair_tied) > 0.02) ++pairs_over;
      if (pair_untied > 0.02) ++untied_pairs_over;
      if (pair_untied > worst_untied) {
        worst_untied = pair_untied;
        worst_pair = std::to_string(na) + "+" + std::to_string(nb);
      }
      worst_tied = std::max(worst_tied, pair_tied);
    }
  }
  const auto sep = wilcoxon_rank_sum(std::vector<double>{1, 2, 3, 4}, std::vector<double>{5, 6, 7, 8});
  const bool separated = std::abs(sep.p_less - 1.0 / 70.0) <= 1e-12;
  return verdict(worst_exact <= 1e-12 && separated && pairs_over == 0,
                 "exact max dev " + fmt("%.3g", worst_exact) + (separated ? ", 4+4 p=1/70" : ", 4+4 WRONG") +
                     "; approximation gap without ties max " + fmt("%.4f", worst_untied) + " at " + worst_pair +
                     " (" + std::to_string(untied_pairs_over) + "/" + std::to_string(pairs) +
                     " pairs > 0.02), with ties max " + fmt("%.4f", worst_tied) + " (" +
                     std::to_string(pairs_over) + "/" + std::to_string(pairs) + " pairs > 0.02 overall)");
}

Outcome shape_recovery() {
  double worst_ggd = 0.0, worst_aggd = 0.0;
  std::string where;
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const double g = std::abs(fit_ggd(synth::ggd_samples(alpha, 1.0, 100000, seed)).alpha - alpha);
      const double a = std::abs(fit_aggd(synth::aggd_samples(alpha, 0.6, 1.4, 100000, 100 + seed)).nu - alpha);
      if (std::max(g, a) > std::max(worst_ggd, worst_aggd)) {
        where = (g >= a ? "GGD" : "AGGD") + std::string(" alpha ") + fmt("%g", alpha) + " seed " + std::to_string(seed);
      }
      worst_ggd = std::max(worst_ggd, g);
      worst_aggd = std::max(worst_aggd, a);
    }
  }
  return verdict(std::max(worst_ggd, worst_aggd) <= 0.1,
                 "40 GGD fits max error " + fmt("%.4f", worst_ggd) + ", 40 AGGD fits max error " +
                     fmt("%.4f", worst_aggd) + " (worst: " + where + ")");
}

Outcome si_ti_correctness() {
  const int w = 16, h = 16;
  std::vector<std::vector<double>> constant(8, std::vector<double>(w * h, 77.0)), ramp(8);
  for (auto& f : ramp) {
    f.resize(w * h);
    for (int y = 0; y < h; ++y) for (int x = 0; x < w; ++x) f[y * w + x] = 10.0 * x + 3.0 * y;
  }
  bool zeros = true;
  for (const auto* frames : {&constant, &ramp}) {
    const SiTi s = si_ti(synth::clip_from(*frames, w, h));
    zeros &= s.si == 0.0 && s.ti == 0.0;
  }
  Rng rng = make_rng(44);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> frames(8, std::vector<double>(w * h));
    for (auto& f : frames) for (double& v : f) v = static_cast<double>(uniform_index(rng, 256));
    const SiTi s = si_ti(synth::clip_from(frames, w, h));
    worst = std::max({worst, std::abs(s.si - oracle::spatial_info(frames, w, h)),
                      std::abs(s.ti - oracle::temporal_info(frames))});
  }
  return verdict(zeros && worst <= 1e-9, std::string(zeros ? "constant/ramp exactly 0" : "constant/ramp NONZERO") +
                                             ", 50 random clips max deviation " + fmt("%.3g", worst));
}

Outcome svr_soundness() {
  std::size_t models = 0, kkt_fail = 0;
  auto audit = [&](const SvrModel& m, const Matrix& x, const std::vector<double>& y) {
    ++models;
    if (oracle::kkt_violation(m, x, y) > m.params.tol || !audit_kkt(m, x, y).passed(m.params.tol, m.params.C)) {
      ++kkt_fail;
    }
  };
  // Sine regression.
  Matrix xs(0, 1);
  std::vector<double> ys;
  for (int i = 0; i < 60; ++i) {
    const double t = i / 59.0;
    xs.append_row(std::vector<double>{t});
    ys.push_back(std::sin(2 * std::numbers::pi * t));
  }
  const SvrParams sp{.C = 100, .epsilon = 0.01, .gamma = 10, .tol = 1e-3};
  const SvrModel sine = svr_train(xs, ys, sp, 0);
  audit(sine, xs, ys);
  double mae = 0.0;
  for (std::size_t r = 0; r < xs.rows(); ++r) mae += std::abs(svr_predict(sine, xs.row(r)) - ys[r]);
  mae /= static_cast<double>(xs.rows());
  // Random problems across the C range.
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng = make_rng(300 + seed);
    Matrix x(0, 4);
    std::vector<double> y;
    for (int r = 0; r < 50; ++r) {
      std::vector<double> row(4);
      for (double& v : row) v = uniform_real(rng, -3, 3);
      y.push_back(row[0] * row[1] + std::sin(row[2]) + 0.3 * standard_normal(rng));
      x.append_row(row);
    }
    const SvrParams p{.C = std::ldexp(1.0, static_cast<int>(seed) - 3), .epsilon = 0.1};
    audit(svr_train(x, y, p, seed), x, y);
  }
  // Constant targets and a single point.
  Matrix xc(0, 2);
  for (int r = 0; r < 10; ++r) xc.append_row(std::vector<double>{1.0 * r, -2.0 * r});
  const std::vector<double> yc(10, 42.5);
  const SvrModel cm = svr_train(xc, yc, {}, 0);
  audit(cm, xc, yc);
  bool exact = true;
  const std::vector<double> probe{3.7, 1e3};
  exact &= svr_predict(cm, probe) == 42.5;
  Matrix x1(0, 3);
  x1.append_row(std::vector<double>{1, 2, 3});
  const std::vector<double> y1{17.25};
  const SvrModel one = svr_train(x1, y1, {}, 0);
  audit(one, x1, y1);
  exact &= svr_predict(one, x1.row(0)) == 17.25;
  return verdict(kkt_fail == 0 && mae <= sp.epsilon + 0.05 && exact,
                 std::to_string(models - kkt_fail) + "/" + std::to_string(models) + " models pass KKT, sine MAE " +
                     fmt("%.4f", mae) + (exact ? ", constant/single exact" : ", constant/single NOT exact"));
}

Outcome logistic_fit() {
  const LogisticFit truth{95, 5, 50, 10, true, 0};
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(100.0 * i / 49);
    y.push_back(truth(x.back()));
  }
  const LogisticFit f = fit_logistic(x, y);
  const double rel = std::max({std::abs(f.beta1 - 95) / 95, std::abs(f.beta2 - 5) / 5, std::abs(f.beta3 - 50) / 50,
                               std::abs(std::abs(f.beta4) - 10) / 10});
  bool monotone = true;
  double prev = -INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const double v = f(100.0 * k / 999);
    monotone &= v >= prev;
    prev = v;
  }
  return verdict(rel <= 0.01 && monotone,
                 "max relative parameter error " + fmt("%.2e", rel) + (monotone ? ", monotone" : ", NOT monotone"));
}

Outcome mos_pipeline() {
  double worst_identity = 0.0;
  bool endpoints = true;
  std::string rates;
  bool rejection_ok = true;
  std::size_t consistent_rejections = 0;
  for (double noise : {1.0, 2.0, 3.0}) {
    int hits = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      const RatingMatrix m(synth::rating_panel({.noise = noise}, 1000 * static_cast<std::uint64_t>(noise) + trial));
      const ZScoreMatrix z = session_zscores(m);
      std::map<std::string, int> session_of_video;
      for (const Rating& r : m.entries()) session_of_video[r.subject + "/" + r.video] = r.session;
      std::map<std::string, std::vector<double>> groups;
      for (const ZEntry& e : z.entries) {
        groups[e.subject + "#" + std::to_string(session_of_video[e.subject + "/" + e.video])].push_back(e.z);
      }
      for (const auto& [k, zs] : groups) {
        double ss = 0.0;
        for (double v : zs) ss += v * v;
        worst_identity = std::max({worst_identity, std::abs(mean(zs)),
                                   std::abs(std::sqrt(ss / static_cast<double>(zs.size() - 1)) - 1.0)});
      }
      const auto rejected = bt500_reject(z).rejected();
      hits += rejected.count(synth::subject_id(20)) ? 1 : 0;
      consistent_rejections += rejected.size() - (rejected.count(synth::subject_id(20)) ? 1 : 0);
      // Endpoints of the global affine map: a subject's lowest / highest z.
      if (trial == 0) {
        const MosTable t = rescale_and_mos(z, {});
        double zlo = INFINITY, zhi = -INFINITY;
        for (const auto& e : z.entries) zlo = std::min(zlo, e.z), zhi = std::max(zhi, e.z);
        ZScoreMatrix probe;
        probe.entries = {{"lo", "x", zlo}, {"hi", "x", zhi}, {"lo", "y", zlo}, {"hi", "z", zhi}};
        const MosTable pt = rescale_and_mos(probe, {});
        endpoints &= pt.find("y")->mos == 0.0 && pt.find("z")->mos == 100.0;
        for (const auto& row : t.rows) endpoints &= row.mos >= 0.0 && row.mos <= 100.0;
      }
    }
    rates += (rates.empty() ? "" : ", ") + std::string("sigma ") + fmt("%g", noise) + ": " + std::to_string(hits) + "/100";
    rejection_ok &= hits >= 95;
  }
  const bool ok = worst_identity <= 1e-9 && rejection_ok && consistent_rejections == 0 && endpoints;
  return verdict(ok, "identity dev " + fmt("%.2e", worst_identity) + "; outlier rejected " + rates + "; " +
                         std::to_string(consistent_rejections) + " consistent-subject rejections; endpoints " +
                         (endpoints ? "0/100" : "WRONG"));
}

Outcome synthetic_ladder(const fs::path& dir) {
  synth::write_ladder(dir);
  const std::string feats = (dir / "features.csv").string(), report = (dir / "eval.json").string();
  if (cli({"features", "--manifest", (dir / "manifest.csv").string(), "--out", feats}) != 0) {
    return {Status::kFail, "features subcommand failed"};
  }
  if (cli({"eval", "--features", feats, "--mos", (dir / "mos.csv").string(), "--grid-search", "--iterations", "20",
           "--seed", "0", "--out", report}) != 0) {
    return {Status::kFail, "eval subcommand failed"};
  }
  const auto j = nlohmann::json::parse(synth::read_text(report));
  const double med = j["median"]["srocc"].get<double>();
  return verdict(med >= 0.90, "60 clips, 20 iterations with grid search, median SROCC " + fmt("%.4f", med) +
                                  " (LCC " + fmt("%.4f", j["median"]["lcc"].get<double>()) + ")");
}

Outcome determinism(const fs::path& dir) {
  const synth::LadderSpec spec{.width = 32, .height = 32, .frames = 12, .bases = 4, .levels = 3};
  synth::write_ladder(dir, spec);
  std::string ratings = "subject_id,video_id,session,score\n";
  for (const Rating& r : synth::rating_panel({.videos = 40}, 5)) {
    ratings += r.subject + "," + r.video + "," + std::to_string(r.session) + "," + format_real(r.score) + "\n";
  }
  synth::write_text((dir / "ratings.csv").string(), ratings);
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  if (cli({"features", "--manifest", p("manifest.csv"), "--out", p("features.csv")}) != 0) return {Status::kFail, "setup"};
  if (cli({"mos", "--ratings", p("ratings.csv"), "--out", p("rmos.csv")}) != 0) return {Status::kFail, "setup"};
  if (cli({"train", "--features", p("features.csv"), "--mos", p("mos.csv"), "--out", p("model.json")}) != 0) {
    return {Status::kFail, "setup"};
  }
  for (const char* name : {"a.json", "b.json"}) {
    if (cli({"eval", "--features", p("features.csv"), "--mos", p("mos.csv"), "--iterations", "8", "--C",
             name[0] == 'a' ? "4" : "0.05", "--out", p(name)}) != 0) {
      return {Status::kFail, "setup"};
    }
  }
  const std::vector<std::vector<std::string>> commands{
      {"features", "--manifest", p("manifest.csv")},
      {"siti", "--manifest", p("manifest.csv")},
      {"mos", "--ratings", p("ratings.csv")},
      {"consistency", "--ratings", p("ratings.csv"), "--mos", p("rmos.csv"), "--splits", "30"},
      {"train", "--features", p("features.csv"), "--mos", p("mos.csv"), "--grid-search"},
      {"predict", "--model", p("model.json"), "--features", p("features.csv")},
      {"eval", "--features", p("features.csv"), "--mos", p("mos.csv"), "--iterations", "10"},
      {"kfold", "--features", p("features.csv"), "--mos", p("mos.csv")},
      {"significance", "--reports", p("a.json"), p("b.json")},
  };
  std::vector<std::string> unstable;
  for (const auto& base : commands) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      auto args = base;
      const std::string out = p("det_" + base[0] + "_" + std::to_string(run) + ".out");
      args.insert(args.end(), {"--seed", "7", "--threads", run == 0 ? "1" : "4", "--out", out});
      if (cli(args) != 0) return {Status::kFail, base[0] + " failed"};
      outputs[run] = synth::read_text(out);
      if (base[0] == "mos") outputs[run] += synth::read_text(p("det_mos_" + std::to_string(run) + ".rejection.txt"));
    }
    if (outputs[0] != outputs[1] || outputs[0].empty()) unstable.push_back(base[0]);
  }
  // Partition property over every iteration of a protocol run.
  Dataset data;
  data.nss = Matrix(0, 1);
  Rng rng = make_rng(3);
  for (int i = 0; i < 50; ++i) {
    data.ids.push_back(synth::video_id(i));
    const double x = uniform_real(rng, 0, 1);
    data.nss.append_row(std::vector<double>{x});
    data.mos.push_back(100 * x);
  }
  data.nss_names = {"x"};
  const SplitReport r = split_protocol(data, {}, {.iterations = 100, .seed = 7, .threads = 4, .record_partitions = true});
  std::size_t broken = 0;
  for (const auto& part : r.partitions) {
    std::vector<std::size_t> all(part.train);
    all.insert(all.end(), part.test.begin(), part.test.end());
    std::sort(all.begin(), all.end());
    bool ok = all.size() == data.size();
    for (std::size_t i = 0; ok && i < all.size(); ++i) ok = all[i] == i;
    broken += ok ? 0 : 1;
  }
  std::string detail = std::to_string(commands.size() - unstable.size()) + "/" + std::to_string(commands.size()) +
                       " subcommands byte-identical";
  for (const auto& u : unstable) detail += " [" + u + " differs]";
  detail += "; partition property held in " + std::to_string(r.partitions.size() - broken) + "/" +
            std::to_string(r.partitions.size()) + " iterations";
  return verdict(unstable.empty() && broken == 0 && r.partitions.size() == 100, detail);
}

// Expects GAMEVQP_LIVE_DIR with manifest.csv and ratings.csv, optional
// deep.csv; features.csv is reused when already present.
Outcome external_data(const fs::path& scratch) {
  const char* env = std::getenv("GAMEVQP_LIVE_DIR");
  if (!env || !*env) return {Status::kSkip, "GAMEVQP_LIVE_DIR not set; external media and ratings not supplied"};
  const fs::path live(env);
  auto in = [&](const char* name) { return (live / name).string(); };
  const std::string mos = (scratch / "mos.csv").string(), report = (scratch / "eval.json").string();
  std::string feats = in("features.csv");
  if (!fs::exists(feats)) {
    feats = (scratch / "features.csv").string();
    if (cli({"features", "--manifest", in("manifest.csv"), "--out", feats}) != 0) return {Status::kFail, "features failed"};
  }
  if (cli({"mos", "--ratings", in("ratings.csv"), "--out", mos}) != 0) return {Status::kFail, "mos failed"};
  std::vector<std::string> eval{"eval", "--features", feats, "--mos", mos, "--grid-search", "--out", report};
  if (fs::exists(in("deep.csv"))) eval.insert(eval.end(), {"--deep", in("deep.csv")});
  if (cli(eval) != 0) return {Status::kFail, "eval failed"};
  const auto j = nlohmann::json::parse(synth::read_text(report));
  const bool shape = j["config"]["iterations"] == 100 && j["config"]["train"] == 480 && j["config"]["test"] == 120;
  const double med = j["median"]["srocc"].get<double>();
  return verdict(shape && std::abs(med - 0.8451) <= 0.03,
                 std::string("protocol ") + (shape ? "100 x 480/120" : "shape MISMATCH") + ", mode " +
                     j["config"]["mode"].get<std::string>() + ", median SROCC " + fmt("%.4f", med) + " (target 0.8451 +- 0.03)");
}

}  // namespace

int main() {
  synth::ScratchDir ladder("accept_ladder"), det("accept_det"), live("accept_live");
  const std::vector<Criterion> criteria{
      {1, "metric oracles", 10, metric_oracles},
      {2, "Wilcoxon exactness", 30, wilcoxon_exactness},
      {3, "GGD/AGGD recovery", 60, shape_recovery},
      {4, "SI/TI correctness", 10, si_ti_correctness},
      {5, "SVR soundness", 30, svr_soundness},
      {6, "logistic fit", 5, logistic_fit},
      {7, "MOS pipeline", 60, mos_pipeline},
      {8, "synthetic ladder end to end", 300, [&] { return synthetic_ladder(ladder.path()); }},
      {9, "determinism", 600, [&] { return determinism(det.path()); }},
      {10, "external data (optional)", 1e9, [&] { return external_data(live.path()); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.status == Status::kPass && secs >= c.budget_seconds) {
      o.status = Status::kFail;
      o.detail += "; over the " + fmt("%g", c.budget_seconds) + " s budget";
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    failures += o.status == Status::kFail;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", tag, c.id, c.title.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
