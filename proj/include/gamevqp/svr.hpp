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

// Epsilon-insensitive support vector regression with an RBF kernel.
//
// The dual is solved by sequential minimal optimisation over the 2n
// variables (alpha, alpha*) with second-order working-pair selection. Inputs
// are min-max scaled to [-1, 1] per dimension before training.

#ifndef GAMEVQP_SVR_HPP_
#define GAMEVQP_SVR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gamevqp/error.hpp"
#include "gamevqp/numeric.hpp"
#include "gamevqp/parallel.hpp"
#include "gamevqp/random.hpp"

namespace gamevqp {

struct ScalerParams {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t dimension() const noexcept { return min.size(); }

  static ScalerParams fit(const Matrix& x) {
    ScalerParams s;
    s.min.assign(x.cols(), std::numeric_limits<double>::infinity());
    s.max.assign(x.cols(), -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        s.min[c] = std::min(s.min[c], x(r, c));
        s.max[c] = std::max(s.max[c], x(r, c));
      }
    }
    return s;
  }

  // Zero-width dimensions map to 0. Values outside the training range
  // extrapolate linearly.
  void apply(std::span<const double> raw, std::span<double> out) const {
    for (std::size_t c = 0; c < min.size(); ++c) {
      const double width = max[c] - min[c];
      out[c] = width > 0.0 ? 2.0 * (raw[c] - min[c]) / width - 1.0 : 0.0;
    }
  }

  std::vector<double> apply(std::span<const double> raw) const {
    std::vector<double> out(min.size());
    apply(raw, out);
    return out;
  }

  Matrix apply(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) apply(x.row(r), out.row(r));
    return out;
  }
};

struct SvrParams {
  double C = 1.0;
  double epsilon = 0.1;
  // 0 means 1 / feature count, resolved at training time.
  double gamma = 0.0;
  double tol = 1e-3;
  // Iteration budget in passes; one pass is n working-pair updates.
  // 0 means 10 * n, resolved at training time.
  std::uint64_t max_passes = 0;

  void validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw InputError("SVR C must be > 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("SVR epsilon must be >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("SVR gamma must be > 0");
    if (!(tol > 0.0) || !std::isfinite(tol)) throw InputError("SVR tol must be > 0");
  }

  SvrParams resolved(std::size_t n, std::size_t d) const {
    SvrParams p = *this;
    if (p.gamma == 0.0) p.gamma = d > 0 ? 1.0 / static_cast<double>(d) : 1.0;
    if (p.max_passes == 0) p.max_passes = 10 * std::max<std::uint64_t>(n, 1);
    return p;
  }

  friend bool operator==(const SvrParams&, const SvrParams&) = default;
};

struct SvrDiagnostics {
  std::uint64_t iterations = 0;
  bool converged = true;
  // All training rows identical after scaling while targets disagree; the
  // model falls back to predicting the target mean.
  bool degenerate = false;
  double max_kkt_violation = 0.0;

  friend bool operator==(const SvrDiagnostics&, const SvrDiagnostics&) = default;
};

struct SvrModel {
  std::vector<std::string> feature_names;
  ScalerParams scaler;
  SvrParams params;
  Matrix support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;
  SvrDiagnostics diagnostics;

  std::size_t dimension() const noexcept { return scaler.dimension(); }
};

inline double squared_distance(std::span<const double> x, std::span<const double> z) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - z[i]) * (x[i] - z[i]);
  return d;
}

inline double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  if (x.size() != z.size()) {
    throw DimensionError("rbf_kernel dimension mismatch: " + std::to_string(x.size()) +
                         " vs " + std::to_string(z.size()));
  }
  return std::exp(-gamma * squared_distance(x, z));
}

inline double predict_scaled(const SvrModel& model, std::span<const double> scaled) {
  double f = model.bias;
  for (std::size_t k = 0; k < model.dual_coefs.size(); ++k) {
    f += model.dual_coefs[k] *
         std::exp(-model.params.gamma * squared_distance(scaled, model.support_vectors.row(k)));
  }
  return f;
}

inline double svr_predict(const SvrModel& model, std::span<const double> raw) {
  if (raw.size() != model.dimension()) {
    throw SchemaError("feature vector has " + std::to_string(raw.size()) +
                      " values, model expects " + std::to_string(model.dimension()));
  }
  return predict_scaled(model, model.scaler.apply(raw));
}

// Named prediction: names must match the model's feature order exactly.
inline double svr_predict(const SvrModel& model, std::span<const std::string> names,
                          std::span<const double> raw) {
  if (names.size() != raw.size()) throw SchemaError("feature name/value length mismatch");
  if (!std::equal(names.begin(), names.end(), model.feature_names.begin(),
                  model.feature_names.end())) {
    for (std::size_t i = 0; i < model.feature_names.size(); ++i) {
      if (i >= names.size() || names[i] != model.feature_names[i]) {
        throw SchemaError("feature '" + model.feature_names[i] + "' missing or out of order");
      }
    }
    throw SchemaError("unexpected extra feature '" + names[model.feature_names.size()] + "'");
  }
  return svr_predict(model, raw);
}

// ---------------------------------------------------------------------------
// Solver

namespace detail {

// Pairwise squared distances between rows of a and rows of b.
inline Matrix squared_distances(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) d(i, j) = squared_distance(a.row(i), b.row(j));
  }
  return d;
}

inline Matrix rbf_from_distances(const Matrix& dist, double gamma) {
  Matrix k(dist.rows(), dist.cols());
  for (std::size_t i = 0; i < dist.rows(); ++i) {
    for (std::size_t j = 0; j < dist.cols(); ++j) k(i, j) = std::exp(-gamma * dist(i, j));
  }
  return k;
}

struct SmoResult {
  std::vector<double> beta;  // alpha - alpha*, one per training row
  double bias = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

// Dual in minimisation form over t in [0, 2n):
//   min 1/2 a^T Q a + p^T a,  sum_t s_t a_t = 0,  0 <= a_t <= C,
// with s_t = +1 (t < n) / -1 (t >= n), Q_ts = s_t s_s K, p_t = eps -/+ y.
class SmoSolver {
 public:
  SmoSolver(const Matrix& kernel, std::span<const double> targets, double c, double epsilon)
      : k_(kernel), n_(targets.size()), c_(c), alpha_(2 * n_, 0.0), grad_(2 * n_) {
    for (std::size_t t = 0; t < n_; ++t) {
      grad_[t] = epsilon - targets[t];
      grad_[t + n_] = epsilon + targets[t];
    }
    p_.assign(grad_.begin(), grad_.end());
  }

  SmoResult solve(double tol, std::uint64_t max_iterations, Rng& rng,
                  std::vector<double>* objective_trace = nullptr) {
    // Candidates are scanned in a seeded order so exact ties break randomly.
    order_ = random_permutation(2 * n_, rng);
    SmoResult result;
    if (objective_trace) objective_trace->push_back(dual_objective());
    while (result.iterations < max_iterations) {
      const auto pair = select_working_pair(tol);
      if (!pair) {
        result.converged = true;
        break;
      }
      update(pair->first, pair->second);
      ++result.iterations;
      if (objective_trace) objective_trace->push_back(dual_objective());
    }
    if (!result.converged) result.converged = !select_working_pair(tol).has_value();
    result.beta.resize(n_);
    for (std::size_t t = 0; t < n_; ++t) result.beta[t] = alpha_[t] - alpha_[t + n_];
    result.bias = -rho();
    return result;
  }

  // Dual objective in maximisation form: -(1/2 a^T Q a + p^T a).
  double dual_objective() const {
    double v = 0.0;
    for (std::size_t t = 0; t < 2 * n_; ++t) v += alpha_[t] * (grad_[t] + p_[t]);
    return -0.5 * v;
  }

 private:
  static constexpr double kTau = 1e-12;

  double sign(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }
  double kernel(std::size_t t, std::size_t s) const { return k_(t % n_, s % n_); }
  double q(std::size_t t, std::size_t s) const { return sign(t) * sign(s) * kernel(t, s); }
  bool at_upper(std::size_t t) const { return alpha_[t] >= c_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  // Maximal violator i from I_up, partner j from I_low by second-order gain.
  std::optional<std::pair<std::size_t, std::size_t>> select_working_pair(double tol) const {
    double gmax = -std::numeric_limits<double>::infinity();
    std::optional<std::size_t> i;
    for (std::size_t t : order_) {
      const bool up = sign(t) > 0 ? !at_upper(t) : !at_lower(t);
      if (up && -sign(t) * grad_[t] > gmax) {
        gmax = -sign(t) * grad_[t];
        i = t;
      }
    }
    if (!i) return std::nullopt;
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> j;
    for (std::size_t t : order_) {
      const bool low = sign(t) > 0 ? !at_lower(t) : !at_upper(t);
      if (!low) continue;
      const double yg = sign(t) * grad_[t];
      gmax2 = std::max(gmax2, yg);
      const double diff = gmax + yg;
      if (diff > 0.0) {
        double quad = kernel(*i, *i) + kernel(t, t) - 2.0 * kernel(*i, t);
        if (quad <= 0.0) quad = kTau;
        const double gain = -(diff * diff) / quad;
        if (gain < best) {
          best = gain;
          j = t;
        }
      }
    }
    if (gmax + gmax2 < tol || !j) return std::nullopt;
    return std::pair{*i, *j};
  }

  void update(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i], old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (sign(i) != sign(j)) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c_) {
          ai = c_;
          aj = c_ - diff;
        }
      } else if (aj > c_) {
        aj = c_;
        ai = c_ + diff;
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) {
          ai = c_;
          aj = sum - c_;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c_) {
        if (aj > c_) {
          aj = c_;
          ai = sum - c_;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    const double di = ai - old_i, dj = aj - old_j;
    for (std::size_t t = 0; t < 2 * n_; ++t) grad_[t] += q(t, i) * di + q(t, j) * dj;
  }

  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double yg = sign(t) * grad_[t];
      if (at_upper(t)) {
        if (sign(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (sign(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        free_sum += yg;
        ++free_count;
      }
    }
    return free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  }

  const Matrix& k_;
  std::size_t n_;
  double c_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<double> p_;
  std::vector<std::size_t> order_;
};

inline bool all_rows_identical(const Matrix& x) {
  for (std::size_t r = 1; r < x.rows(); ++r) {
    if (!std::equal(x.row(r).begin(), x.row(r).end(), x.row(0).begin())) return false;
  }
  return true;
}

inline void check_training_input(const Matrix& x, std::span<const double> y) {
  if (x.rows() < 1 || x.rows() != y.size()) {
    throw InputError("SVR training needs matching X rows and targets, got " +
                     std::to_string(x.rows()) + " rows and " + std::to_string(y.size()) +
                     " targets");
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row(r)) {
      if (!std::isfinite(v)) throw InputError("non-finite feature value in row " + std::to_string(r));
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw InputError("non-finite training target");
  }
}

// Fills support vectors/coefficients from a solved dual on scaled data.
inline void assign_solution(SvrModel& model, const Matrix& scaled, const SmoResult& sol) {
  model.support_vectors = Matrix(0, scaled.cols());
  model.dual_coefs.clear();
  for (std::size_t r = 0; r < scaled.rows(); ++r) {
    if (sol.beta[r] != 0.0) {
      model.support_vectors.append_row(scaled.row(r));
      model.dual_coefs.push_back(sol.beta[r]);
    }
  }
  model.bias = sol.bias;
  model.diagnostics.iterations = sol.iterations;
  model.diagnostics.converged = sol.converged;
}

}  // namespace detail

struct KktAudit {
  double max_violation = 0.0;
  double coef_sum = 0.0;
  bool box_ok = true;

  bool passed(double tol, double c) const {
    return box_ok && max_violation <= tol && std::abs(coef_sum) <= 1e-6 * c;
  }
};

// Checks box, equality and complementarity conditions of the epsilon-SVR dual
// against the training data the model was fitted on. Rows that are not
// support vectors have coefficient 0.
inline KktAudit audit_kkt(const SvrModel& model, const Matrix& x, std::span<const double> y) {
  const double c = model.params.C, eps = model.params.epsilon;
  const double bound_tol = 1e-12 * std::max(1.0, c);
  KktAudit audit;
  const Matrix scaled = model.scaler.apply(x);
  for (double b : model.dual_coefs) {
    audit.coef_sum += b;
    if (std::abs(b) > c + bound_tol) audit.box_ok = false;
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double beta = 0.0;
    for (std::size_t k = 0; k < model.support_vectors.rows(); ++k) {
      const auto sv = model.support_vectors.row(k);
      if (std::equal(sv.begin(), sv.end(), scaled.row(r).begin())) {
        beta = model.dual_coefs[k];
        break;
      }
    }
    const double residual = predict_scaled(model, scaled.row(r)) - y[r];
    double v = 0.0;
    if (beta == 0.0) {
      v = std::max(0.0, std::abs(residual) - eps);
    } else if (beta > 0.0) {
      v = beta >= c - bound_tol ? std::max(0.0, residual + eps) : std::abs(residual + eps);
    } else {
      v = -beta >= c - bound_tol ? std::max(0.0, eps - residual) : std::abs(residual - eps);
    }
    audit.max_violation = std::max(audit.max_violation, v);
  }
  return audit;
}

struct TrainOptions {
  // When set, receives the dual objective (maximisation form) before the first
  // and after every SMO update.
  std::vector<double>* objective_trace = nullptr;
};

inline SvrModel svr_train(const Matrix& x, std::span<const double> y, const SvrParams& params,
                          std::uint64_t seed, std::vector<std::string> feature_names = {},
                          const TrainOptions& options = {}) {
  detail::check_training_input(x, y);
  params.validate();
  if (feature_names.empty()) {
    for (std::size_t c = 0; c < x.cols(); ++c) feature_names.push_back("f" + std::to_string(c));
  }
  if (feature_names.size() != x.cols()) throw SchemaError("feature name count != feature columns");

  SvrModel model;
  model.feature_names = std::move(feature_names);
  model.params = params.resolved(x.rows(), x.cols());
  model.scaler = ScalerParams::fit(x);
  const Matrix scaled = model.scaler.apply(x);
  model.support_vectors = Matrix(0, x.cols());

  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
    model.bias = y[0];
    return model;
  }
  if (detail::all_rows_identical(scaled)) {
    model.bias = mean(y);
    model.diagnostics.degenerate = true;
    return model;
  }

  const Matrix kernel = detail::rbf_from_distances(detail::squared_distances(scaled, scaled),
                                                   model.params.gamma);
  detail::SmoSolver solver(kernel, y, model.params.C, model.params.epsilon);
  Rng rng = make_rng(seed);
  const auto sol = solver.solve(model.params.tol, model.params.max_passes * x.rows(), rng,
                                options.objective_trace);
  detail::assign_solution(model, scaled, sol);
  model.diagnostics.max_kkt_violation = audit_kkt(model, x, y).max_violation;
  return model;
}

// ---------------------------------------------------------------------------
// Hyperparameter grid search

struct GridSearchResult {
  SvrParams params;
  double cv_mse = 0.0;
};

inline std::vector<double> default_c_grid() {
  std::vector<double> g;
  for (int e = -3; e <= 9; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

inline std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int e = -9; e <= 3; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

// k-fold cross-validated search over (C, gamma), minimising mean squared
// error. Ties keep the earliest grid point (C ascending, then gamma).
inline GridSearchResult grid_search(const Matrix& x, std::span<const double> y,
                                    const SvrParams& base, std::uint64_t seed, int folds = 5,
                                    std::span<const double> c_grid = {},
                                    std::span<const double> gamma_grid = {}) {
  detail::check_training_input(x, y);
  const std::vector<double> cs = c_grid.empty() ? default_c_grid()
                                                : std::vector<double>(c_grid.begin(), c_grid.end());
  const std::vector<double> gs = gamma_grid.empty()
                                     ? default_gamma_grid()
                                     : std::vector<double>(gamma_grid.begin(), gamma_grid.end());
  const std::size_t n = x.rows();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(folds, 2)), n);
  if (n < 2) return {base.resolved(n, x.cols()), 0.0};

  Rng rng = make_rng(seed);
  const auto perm = random_permutation(n, rng);
  std::vector<double> sse(cs.size() * gs.size(), 0.0);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train, val;
    for (std::size_t i = 0; i < n; ++i) (i % k == f ? val : train).push_back(perm[i]);
    const Matrix xt = x.select_rows(train), xv = x.select_rows(val);
    std::vector<double> yt, yv;
    for (auto i : train) yt.push_back(y[i]);
    for (auto i : val) yv.push_back(y[i]);
    const ScalerParams scaler = ScalerParams::fit(xt);
    const Matrix st = scaler.apply(xt), sv = scaler.apply(xv);
    const Matrix d_tt = detail::squared_distances(st, st);
    const Matrix d_vt = detail::squared_distances(sv, st);
    const bool constant = std::all_of(yt.begin(), yt.end(), [&](double v) { return v == yt[0]; });
    const bool identical = detail::all_rows_identical(st);
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
      for (std::size_t gi = 0; gi < gs.size(); ++gi) {
        std::vector<double> pred(yv.size());
        if (constant || identical) {
          std::fill(pred.begin(), pred.end(), constant ? yt[0] : mean(yt));
        } else {
          SvrParams p = base;
          p.C = cs[ci];
          p.gamma = gs[gi];
          p = p.resolved(yt.size(), x.cols());
          const Matrix kernel = detail::rbf_from_distances(d_tt, p.gamma);
          detail::SmoSolver solver(kernel, yt, p.C, p.epsilon);
          Rng solver_rng = make_rng(seed, f + 1);
          const auto sol = solver.solve(p.tol, p.max_passes * yt.size(), solver_rng);
          for (std::size_t v = 0; v < yv.size(); ++v) {
            double s = sol.bias;
            for (std::size_t t = 0; t < yt.size(); ++t) {
              if (sol.beta[t] != 0.0) s += sol.beta[t] * std::exp(-p.gamma * d_vt(v, t));
            }
            pred[v] = s;
          }
        }
        double& acc = sse[ci * gs.size() + gi];
        for (std::size_t v = 0; v < yv.size(); ++v) acc += (pred[v] - yv[v]) * (pred[v] - yv[v]);
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < sse.size(); ++i) {
    if (sse[i] < sse[best]) best = i;
  }
  GridSearchResult result;
  result.params = base;
  result.params.C = cs[best / gs.size()];
  result.params.gamma = gs[best % gs.size()];
  result.params.max_passes = base.max_passes;
  result.cv_mse = sse[best] / static_cast<double>(n);
  return result;
}

// ---------------------------------------------------------------------------
// Serialisation

inline constexpr int kSvrModelVersion = 1;

inline nlohmann::ordered_json svr_to_json(const SvrModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "gamevqp-svr";
  j["version"] = kSvrModelVersion;
  j["feature_names"] = m.feature_names;
  j["scaler"] = {{"min", m.scaler.min}, {"max", m.scaler.max}};
  j["params"] = {{"C", m.params.C},
                 {"epsilon", m.params.epsilon},
                 {"gamma", m.params.gamma},
                 {"tol", m.params.tol},
                 {"max_passes", m.params.max_passes}};
  auto svs = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < m.support_vectors.rows(); ++r) {
    const auto row = m.support_vectors.row(r);
    svs.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["support_vectors"] = std::move(svs);
  j["dual_coefs"] = m.dual_coefs;
  j["bias"] = m.bias;
  j["diagnostics"] = {{"iterations", m.diagnostics.iterations},
                      {"converged", m.diagnostics.converged},
                      {"degenerate", m.diagnostics.degenerate},
                      {"max_kkt_violation", m.diagnostics.max_kkt_violation}};
  return j;
}

namespace detail {

template <typename T, typename Json>
T json_get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ModelFormatError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

template <typename Json>
SvrModel svr_from_json(const Json& j) {
  using detail::json_get;
  if (json_get<std::string>(j, "format") != "gamevqp-svr") {
    throw ModelFormatError("not an SVR model file");
  }
  const int version = json_get<int>(j, "version");
  if (version != kSvrModelVersion) {
    throw ModelFormatError("unsupported model version " + std::to_string(version));
  }
  SvrModel m;
  m.feature_names = json_get<std::vector<std::string>>(j, "feature_names");
  const auto& scaler = j.at("scaler");
  m.scaler.min = json_get<std::vector<double>>(scaler, "min");
  m.scaler.max = json_get<std::vector<double>>(scaler, "max");
  const auto& params = j.at("params");
  m.params.C = json_get<double>(params, "C");
  m.params.epsilon = json_get<double>(params, "epsilon");
  m.params.gamma = json_get<double>(params, "gamma");
  m.params.tol = json_get<double>(params, "tol");
  m.params.max_passes = json_get<std::uint64_t>(params, "max_passes");
  const auto svs = json_get<std::vector<std::vector<double>>>(j, "support_vectors");
  m.dual_coefs = json_get<std::vector<double>>(j, "dual_coefs");
  m.bias = json_get<double>(j, "bias");
  const auto& diag = j.at("diagnostics");
  m.diagnostics.iterations = json_get<std::uint64_t>(diag, "iterations");
  m.diagnostics.converged = json_get<bool>(diag, "converged");
  m.diagnostics.degenerate = json_get<bool>(diag, "degenerate");
  m.diagnostics.max_kkt_violation = json_get<double>(diag, "max_kkt_violation");

  const std::size_t d = m.feature_names.size();
  if (m.scaler.min.size() != d || m.scaler.max.size() != d) {
    throw ModelFormatError("scaler dimension does not match feature names");
  }
  if (svs.size() != m.dual_coefs.size()) {
    throw ModelFormatError("support vector and dual coefficient counts differ");
  }
  m.support_vectors = Matrix(0, d);
  for (const auto& sv : svs) {
    if (sv.size() != d) throw ModelFormatError("support vector dimension mismatch");
    m.support_vectors.append_row(sv);
  }
  try {
    m.params.validate();
  } catch (const Error& e) {
    throw ModelFormatError(e.what());
  }
  return m;
}

// Canonical JSON text; save(load(save(m))) == save(m) byte for byte.
inline std::string model_save(const SvrModel& model) { return svr_to_json(model).dump(1) + "\n"; }

inline SvrModel model_load(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("invalid JSON: ") + e.what());
  }
  return svr_from_json(j);
}

}  // namespace gamevqp

#endif  // GAMEVQP_SVR_HPP_
