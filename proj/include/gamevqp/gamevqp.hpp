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

// The two-branch predictor: an SVR on the NSS feature bag and an optional SVR
// on externally supplied deep features, averaged in full mode.

#ifndef GAMEVQP_GAMEVQP_HPP_
#define GAMEVQP_GAMEVQP_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamevqp/error.hpp"
#include "gamevqp/feature_table.hpp"
#include "gamevqp/numeric.hpp"
#include "gamevqp/subjective.hpp"
#include "gamevqp/svr.hpp"
#include "json.hpp"

namespace gamevqp {

enum class PredictorMode { kFull, kNssOnly };

inline std::string_view mode_name(PredictorMode m) {
  return m == PredictorMode::kFull ? "full" : "nss_only";
}

// Rows of the NSS table, optional deep table and MOS aligned on a common id
// order (sorted ascending).
struct Dataset {
  std::vector<std::string> ids;
  std::vector<std::string> nss_names;
  Matrix nss;
  std::vector<std::string> deep_names;
  std::optional<Matrix> deep;
  std::vector<double> mos;

  std::size_t size() const noexcept { return ids.size(); }
  bool has_deep() const noexcept { return deep.has_value(); }

  Dataset subset(std::span<const std::size_t> rows) const {
    Dataset d;
    d.nss_names = nss_names;
    d.deep_names = deep_names;
    d.nss = nss.select_rows(rows);
    if (deep) d.deep = deep->select_rows(rows);
    for (auto r : rows) {
      d.ids.push_back(ids[r]);
      d.mos.push_back(mos[r]);
    }
    return d;
  }
};

namespace detail {

inline std::string join_ids(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i == 20) {
      s += ", ... (" + std::to_string(ids.size()) + " total)";
      break;
    }
    s += (i ? ", " : "") + ids[i];
  }
  return s;
}

}  // namespace detail

// Every MOS id must have an NSS row (and a deep row when deep is supplied).
// Feature rows without a MOS are ignored.
inline Dataset join_dataset(const FeatureTable& nss, const FeatureTable* deep, const MosTable& mos) {
  std::vector<std::string> missing;
  Dataset d;
  d.nss_names = nss.names();
  d.nss = Matrix(0, nss.dimension());
  if (deep) {
    d.deep_names = deep->names();
    d.deep = Matrix(0, deep->dimension());
  }
  for (const MosRow& row : mos.rows) {
    const auto n = nss.find(row.video);
    const auto k = deep ? deep->find(row.video) : std::optional<std::size_t>{};
    if (!n) missing.push_back(row.video + " (features)");
    if (deep && !k) missing.push_back(row.video + " (deep)");
    if (!n || (deep && !k)) continue;
    d.ids.push_back(row.video);
    d.mos.push_back(row.mos);
    d.nss.append_row(nss.row(*n));
    if (deep) d.deep->append_row(deep->row(*k));
  }
  if (!missing.empty()) throw JoinError("ids without feature rows: " + detail::join_ids(missing));
  if (d.ids.empty()) throw JoinError("no video ids in common");
  return d;
}

struct ModelSpec {
  SvrParams params;
  bool grid_search = false;
  int grid_folds = 5;
};

struct GameVqpModel {
  SvrModel nss_branch;
  std::optional<SvrModel> deep_branch;

  PredictorMode mode() const noexcept {
    return deep_branch ? PredictorMode::kFull : PredictorMode::kNssOnly;
  }
};

namespace detail {

inline SvrModel train_branch(const Matrix& x, std::span<const double> y,
                             const std::vector<std::string>& names, const ModelSpec& spec,
                             std::uint64_t seed) {
  SvrParams params = spec.params;
  if (spec.grid_search) params = grid_search(x, y, params, seed, spec.grid_folds).params;
  return svr_train(x, y, params, seed, names);
}

}  // namespace detail

// The NSS branch trains with `seed`, the deep branch with `seed + 1`.
inline GameVqpModel train_gamevqp(const Dataset& data, const ModelSpec& spec, std::uint64_t seed) {
  if (data.size() == 0) throw InputError("no training videos");
  GameVqpModel model;
  model.nss_branch = detail::train_branch(data.nss, data.mos, data.nss_names, spec, seed);
  if (data.deep) {
    model.deep_branch = detail::train_branch(*data.deep, data.mos, data.deep_names, spec, seed + 1);
  }
  return model;
}

inline double predict_gamevqp(const GameVqpModel& model, std::span<const double> nss,
                              std::optional<std::span<const double>> deep = std::nullopt) {
  const double a = svr_predict(model.nss_branch, nss);
  if (!model.deep_branch) return a;
  if (!deep) throw SchemaError("model is in full mode; a deep feature vector is required");
  const double b = svr_predict(*model.deep_branch, *deep);
  return 0.5 * (a + b);
}

inline std::vector<double> predict_gamevqp(const GameVqpModel& model, const Dataset& data) {
  if (model.deep_branch && !data.deep) {
    throw SchemaError("model is in full mode; deep features are required");
  }
  std::vector<double> out(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    out[r] = data.deep && model.deep_branch
                 ? predict_gamevqp(model, data.nss.row(r), data.deep->row(r))
                 : predict_gamevqp(model, data.nss.row(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr int kGameVqpModelVersion = 1;

inline nlohmann::ordered_json gamevqp_to_json(const GameVqpModel& m) {
  nlohmann::ordered_json j;
  j["format"] = "gamevqp-model";
  j["version"] = kGameVqpModelVersion;
  j["mode"] = std::string(mode_name(m.mode()));
  j["nss_branch"] = svr_to_json(m.nss_branch);
  j["deep_branch"] = m.deep_branch ? svr_to_json(*m.deep_branch) : nlohmann::ordered_json(nullptr);
  return j;
}

template <typename Json>
GameVqpModel gamevqp_from_json(const Json& j) {
  using detail::json_get;
  if (json_get<std::string>(j, "format") != "gamevqp-model") {
    throw ModelFormatError("not a gamevqp model file");
  }
  if (json_get<int>(j, "version") != kGameVqpModelVersion) {
    throw ModelFormatError("unsupported gamevqp model version");
  }
  const std::string mode = json_get<std::string>(j, "mode");
  if (mode != "full" && mode != "nss_only") throw ModelFormatError("unknown mode '" + mode + "'");
  if (!j.contains("nss_branch") || !j.contains("deep_branch")) {
    throw ModelFormatError("missing branch field");
  }
  GameVqpModel m;
  m.nss_branch = svr_from_json(j.at("nss_branch"));
  if (!j.at("deep_branch").is_null()) m.deep_branch = svr_from_json(j.at("deep_branch"));
  if ((mode == "full") != m.deep_branch.has_value()) {
    throw ModelFormatError("mode '" + mode + "' does not match the branches present");
  }
  return m;
}

inline std::string gamevqp_save(const GameVqpModel& m) { return gamevqp_to_json(m).dump(1) + "\n"; }

inline GameVqpModel gamevqp_load(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("invalid JSON: ") + e.what());
  }
  return gamevqp_from_json(j);
}

}  // namespace gamevqp

#endif  // GAMEVQP_GAMEVQP_HPP_
