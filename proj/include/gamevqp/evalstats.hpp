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

// Agreement metrics between objective predictions and MOS, the monotone
// logistic mapping applied before LCC/RMSE, and rank-sum significance tests.

#ifndef GAMEVQP_EVALSTATS_HPP_
#define GAMEVQP_EVALSTATS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gamevqp/error.hpp"
#include "gamevqp/numeric.hpp"

namespace gamevqp {

struct MetricTriple {
  double srocc = 0.0;
  double lcc = 0.0;
  double rmse = 0.0;

  friend bool operator==(const MetricTriple&, const MetricTriple&) = default;
};

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> midranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

namespace detail {

inline void check_paired(std::span<const double> x, std::span<const double> y, std::size_t min_n,
                         const char* what) {
  if (x.size() != y.size()) {
    throw InputError(std::string(what) + ": lengths differ (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < min_n) {
    throw InputError(std::string(what) + ": needs at least " + std::to_string(min_n) +
                     " pairs");
  }
}

inline double pearson_unchecked(std::span<const double> x, std::span<const double> y,
                                const char* what) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInput(std::string(what) + ": constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace detail

inline double pearson_lcc(std::span<const double> x, std::span<const double> y) {
  detail::check_paired(x, y, 3, "pearson_lcc");
  return detail::pearson_unchecked(x, y, "pearson_lcc");
}

inline double srocc(std::span<const double> x, std::span<const double> y) {
  detail::check_paired(x, y, 3, "srocc");
  const auto rx = midranks(x), ry = midranks(y);
  return detail::pearson_unchecked(rx, ry, "srocc");
}

inline double rmse(std::span<const double> x, std::span<const double> y) {
  detail::check_paired(x, y, 1, "rmse");
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

// ---------------------------------------------------------------------------
// Logistic mapping

// f(x) = beta2 + (beta1 - beta2) / (1 + exp(-(x - beta3) / |beta4|))
struct LogisticFit {
  double beta1 = 1.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double beta4 = 1.0;
  bool converged = false;
  double residual = 0.0;  // sum of squared errors at the returned parameters

  double operator()(double x) const {
    return beta2 + (beta1 - beta2) / (1.0 + std::exp(-(x - beta3) / std::abs(beta4)));
  }

  std::vector<double> apply(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
    return out;
  }
};

namespace detail {

using Params4 = std::array<double, 4>;

inline LogisticFit make_logistic(const Params4& p) { return {p[0], p[1], p[2], p[3], false, 0.0}; }

inline double logistic_sse(const Params4& p, std::span<const double> x, std::span<const double> y) {
  const LogisticFit f = make_logistic(p);
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sse += (y[i] - f(x[i])) * (y[i] - f(x[i]));
  return sse;
}

// Solves a 4x4 system by Gaussian elimination with partial pivoting.
inline bool solve4(std::array<std::array<double, 4>, 4> a, Params4 b, Params4& out) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (!(std::abs(a[pivot][col]) > 0.0)) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 3; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 4; ++c) s -= a[r][c] * out[c];
    out[r] = s / a[r][r];
  }
  return std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
}

inline constexpr int kLogisticMaxIterations = 200;
inline constexpr double kLogisticStepTol = 1e-8;

// Levenberg-Marquardt damped Gauss-Newton from `start`.
inline LogisticFit refine_logistic(Params4 p, std::span<const double> x, std::span<const double> y) {
  double sse = logistic_sse(p, x, y);
  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < kLogisticMaxIterations && !converged; ++iter) {
    std::array<std::array<double, 4>, 4> jtj{};
    Params4 jtr{};
    const double scale = std::abs(p[3]);
    const double sgn = p[3] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (x[i] - p[2]) / scale;
      const double s = 1.0 / (1.0 + std::exp(-u));
      const double ds = s * (1.0 - s);
      const double span_ = p[0] - p[1];
      const Params4 g = {s, 1.0 - s, -span_ * ds / scale, -span_ * ds * u * sgn / scale};
      const double r = y[i] - (p[1] + span_ * s);
      for (int a = 0; a < 4; ++a) {
        jtr[a] += g[a] * r;
        for (int b = 0; b < 4; ++b) jtj[a][b] += g[a] * g[b];
      }
    }
    bool accepted = false;
    while (lambda < 1e20) {
      auto damped = jtj;
      for (int a = 0; a < 4; ++a) damped[a][a] += lambda * std::max(jtj[a][a], 1e-300);
      Params4 step{};
      if (solve4(damped, jtr, step)) {
        Params4 trial = p;
        for (int a = 0; a < 4; ++a) trial[a] += step[a];
        const double trial_sse = trial[3] != 0.0 ? logistic_sse(trial, x, y)
                                                 : std::numeric_limits<double>::infinity();
        if (trial_sse <= sse) {
          double step_norm = 0.0, p_norm = 0.0;
          for (int a = 0; a < 4; ++a) {
            step_norm += step[a] * step[a];
            p_norm += p[a] * p[a];
          }
          converged = std::sqrt(step_norm) <= kLogisticStepTol * (std::sqrt(p_norm) + kLogisticStepTol) ||
                      sse - trial_sse <= 1e-15 * std::max(sse, 1e-300);
          p = trial;
          sse = trial_sse;
          lambda = std::max(lambda / 10.0, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at any damping: a stationary point.
      converged = true;
      break;
    }
  }
  LogisticFit fit = make_logistic(p);
  fit.converged = converged;
  fit.residual = sse;
  return fit;
}

}  // namespace detail

// Fits the 4-parameter logistic by least squares. Two starts are refined and
// the lower-residual fit is returned: the conventional start (asymptotes at
// the MOS extremes, centre at the prediction median, slope from the spread)
// and a nearly linear start whose output is the least-squares affine fit, so
// the mapping never does worse than a straight line.
inline LogisticFit fit_logistic(std::span<const double> pred, std::span<const double> mos) {
  detail::check_paired(pred, mos, 5, "fit_logistic");
  const auto [pmin, pmax] = std::minmax_element(pred.begin(), pred.end());
  if (!(*pmax > *pmin)) throw DegenerateInput("fit_logistic: constant predictions");
  const auto [mmin, mmax] = std::minmax_element(mos.begin(), mos.end());

  const detail::Params4 standard = {*mmax, *mmin, median(pred), population_std(pred) / 4.0};
  LogisticFit best = detail::refine_logistic(standard, pred, mos);

  const double centre = mean(pred);
  const double wide = 1e5 * (*pmax - *pmin);
  std::vector<double> s(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    s[i] = 1.0 / (1.0 + std::exp(-(pred[i] - centre) / wide));
  }
  const double ms = mean(s), my = mean(mos);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sxy += (s[i] - ms) * (mos[i] - my);
    sxx += (s[i] - ms) * (s[i] - ms);
  }
  if (sxx > 0.0) {
    const double slope = sxy / sxx;
    const double intercept = my - slope * ms;
    const detail::Params4 linear = {intercept + slope, intercept, centre, wide};
    const LogisticFit alt = detail::refine_logistic(linear, pred, mos);
    if (alt.residual < best.residual) best = alt;
  }
  return best;
}

// SROCC on raw predictions; LCC and RMSE after the fitted logistic mapping.
inline MetricTriple evaluate_predictions(std::span<const double> pred, std::span<const double> mos) {
  MetricTriple m;
  m.srocc = srocc(pred, mos);
  const LogisticFit fit = fit_logistic(pred, mos);
  const auto mapped = fit.apply(pred);
  m.lcc = pearson_lcc(mapped, mos);
  m.rmse = rmse(mapped, mos);
  return m;
}

// ---------------------------------------------------------------------------
// Wilcoxon rank-sum

enum class WilcoxonMode { kAuto, kExact, kApproximate };

struct WilcoxonResult {
  double rank_sum = 0.0;     // sum of midranks of `a` in the pooled sample
  double u_statistic = 0.0;  // rank_sum - n_a (n_a + 1) / 2
  double p_greater = 1.0;    // one-sided p for "a tends to exceed b"
  double p_less = 1.0;       // one-sided p for "a tends to fall below b"
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactLimit = 16;

namespace detail {

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Permutation distribution of the rank sum of n_a items drawn from `ranks2`
// (midranks doubled to integers). Returns P(W <= w) and P(W >= w).
inline std::pair<double, double> exact_rank_sum_tails(std::span<const long long> ranks2,
                                                      std::size_t n_a, long long w2) {
  const long long total = std::accumulate(ranks2.begin(), ranks2.end(), 0LL);
  // dp[k][s]: number of size-k subsets with doubled rank sum s.
  std::vector<std::vector<double>> dp(n_a + 1, std::vector<double>(total + 1, 0.0));
  dp[0][0] = 1.0;
  for (std::size_t item = 0; item < ranks2.size(); ++item) {
    const long long r = ranks2[item];
    for (std::size_t k = std::min(n_a, item + 1); k >= 1; --k) {
      auto& cur = dp[k];
      const auto& prev = dp[k - 1];
      for (long long s = total; s >= r; --s) cur[s] += prev[s - r];
    }
  }
  double count = 0.0, le = 0.0, ge = 0.0;
  for (long long s = 0; s <= total; ++s) {
    const double c = dp[n_a][s];
    count += c;
    if (s <= w2) le += c;
    if (s >= w2) ge += c;
  }
  return {le / count, ge / count};
}

}  // namespace detail

// Rank-sum test with midranks for ties. Exact mode enumerates the permutation
// distribution (conditional on the tie pattern); approximate mode uses the
// normal approximation with tie-corrected variance and a 0.5 continuity
// correction. kAuto is exact when n_a + n_b <= 16.
inline WilcoxonResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                        WilcoxonMode mode = WilcoxonMode::kAuto) {
  if (a.empty() || b.empty()) throw InputError("wilcoxon_rank_sum: both samples must be non-empty");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double v : pooled) {
    if (!std::isfinite(v)) throw InputError("wilcoxon_rank_sum: non-finite sample");
  }
  const auto ranks = midranks(pooled);
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  WilcoxonResult res;
  for (std::size_t i = 0; i < na; ++i) res.rank_sum += ranks[i];
  res.u_statistic = res.rank_sum - 0.5 * static_cast<double>(na * (na + 1));

  const bool exact = mode == WilcoxonMode::kExact ||
                     (mode == WilcoxonMode::kAuto && n <= kWilcoxonExactLimit);
  res.exact = exact;
  if (exact) {
    std::vector<long long> ranks2(n);
    for (std::size_t i = 0; i < n; ++i) ranks2[i] = std::llround(2.0 * ranks[i]);
    const auto [le, ge] = detail::exact_rank_sum_tails(ranks2, na, std::llround(2.0 * res.rank_sum));
    res.p_less = std::min(1.0, le);
    res.p_greater = std::min(1.0, ge);
    return res;
  }

  // Tie correction: sum over tie groups of t^3 - t.
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double dn = static_cast<double>(n);
  const double expected = 0.5 * static_cast<double>(na) * (dn + 1.0);
  const double variance = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                          ((dn + 1.0) - ties / (dn * (dn - 1.0)));
  if (!(variance > 0.0)) {
    res.p_less = res.p_greater = 1.0;
    return res;
  }
  const double sd = std::sqrt(variance);
  res.p_greater = 1.0 - detail::standard_normal_cdf((res.rank_sum - expected - 0.5) / sd);
  res.p_less = detail::standard_normal_cdf((res.rank_sum - expected + 0.5) / sd);
  res.p_greater = std::clamp(res.p_greater, 0.0, 1.0);
  res.p_less = std::clamp(res.p_less, 0.0, 1.0);
  return res;
}

// ---------------------------------------------------------------------------
// Significance matrices

struct SignificanceMatrix {
  std::string metric;  // e.g. "srocc" or "lcc"
  std::vector<std::string> names;
  std::vector<std::vector<int>> entries;  // entries[row][col] in {-1, 0, 1}
};

inline constexpr double kSignificanceAlpha = 0.05;

// entry(r, c) = 1 when the row model's distribution is significantly greater
// (one-sided p <= alpha), -1 when significantly smaller, 0 otherwise.
inline SignificanceMatrix significance_matrix(std::vector<std::string> names,
                                              std::span<const std::vector<double>> distributions,
                                              std::string metric = "srocc",
                                              double alpha = kSignificanceAlpha,
                                              WilcoxonMode mode = WilcoxonMode::kAuto) {
  if (names.size() != distributions.size()) {
    throw InputError("significance_matrix: one name per distribution required");
  }
  for (const auto& d : distributions) {
    if (d.size() != distributions.front().size() || d.empty()) {
      throw InputError("significance_matrix: all distributions must share a non-zero length");
    }
  }
  const std::size_t m = names.size();
  SignificanceMatrix out{std::move(metric), std::move(names),
                         std::vector<std::vector<int>>(m, std::vector<int>(m, 0))};
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = r + 1; c < m; ++c) {
      const auto w = wilcoxon_rank_sum(distributions[r], distributions[c], mode);
      int v = 0;
      if (w.p_greater <= alpha) v = 1;
      else if (w.p_less <= alpha) v = -1;
      out.entries[r][c] = v;
      out.entries[c][r] = -v;
    }
  }
  return out;
}

}  // namespace gamevqp

#endif  // GAMEVQP_EVALSTATS_HPP_
