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

// Command-line front end. `run_cli` is kept separate from main() so tests can
// drive every subcommand in-process.

#ifndef GAMEVQP_TOOLS_GAMEVQP_CLI_HPP_
#define GAMEVQP_TOOLS_GAMEVQP_CLI_HPP_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gamevqp/csv.hpp"
#include "gamevqp/error.hpp"
#include "gamevqp/evalstats.hpp"
#include "gamevqp/evaluation.hpp"
#include "gamevqp/feature_table.hpp"
#include "gamevqp/gamevqp.hpp"
#include "gamevqp/nss_features.hpp"
#include "gamevqp/parallel.hpp"
#include "gamevqp/provenance.hpp"
#include "gamevqp/subjective.hpp"
#include "gamevqp/svr.hpp"
#include "json.hpp"

namespace gamevqp::cli {

namespace fs = std::filesystem;

struct Options {
  std::uint64_t seed = 0;
  std::size_t iterations = 100;
  double train_frac = 0.8;
  bool grid_search = false;
  std::string out;
  unsigned threads = 0;
  double c = 1.0;
  double epsilon = 0.1;
  double gamma = 0.0;
  double tol = 1e-3;
  double sample_rate = 1.0;

  std::string manifest, ratings, mos, features, deep, model, report;
  std::size_t splits = 100;
  std::size_t folds = 5;
  std::vector<std::string> reports;
  std::vector<std::string> names;
  std::string metric = "srocc";
};

class Session {
 public:
  Session(const Options& o, std::ostream& err) : opt_(o), err_(err) {}

  unsigned threads() const { return opt_.threads ? opt_.threads : default_thread_count(); }

  void config(const std::string& key, const std::string& value) { prov_.config[key] = value; }
  void config(const std::string& key, double value) { prov_.config[key] = format_real(value); }
  void config(const std::string& key, std::uint64_t value) { prov_.config[key] = std::to_string(value); }
  void config(const std::string& key, bool value) { prov_.config[key] = value ? "true" : "false"; }

  // Reads an input file and records its hash under its base name.
  std::string input(const std::string& path) {
    std::string text = read_file(path);
    prov_.add_input(fs::path(path).filename().string(), text);
    return text;
  }

  CsvDocument csv_input(const std::string& path) {
    return parse_csv(input(path), path);
  }

  std::string csv_preamble() const {
    std::string s = prov_.comment_line() + "# config";
    for (const auto& [k, v] : prov_.config) s += " " + k + "=" + v;
    return s + "\n";
  }

  nlohmann::ordered_json json_with_provenance(const nlohmann::ordered_json& body) const {
    nlohmann::ordered_json j;
    j["provenance"] = prov_.to_json();
    for (const auto& [k, v] : body.items()) j[k] = v;
    return j;
  }

  void write(const std::string& path, const std::string& content) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
  }

  void svr_config() {
    config("svr.C", opt_.c);
    config("svr.epsilon", opt_.epsilon);
    config("svr.gamma", opt_.gamma);
    config("svr.tol", opt_.tol);
    config("grid_search", opt_.grid_search);
  }

  ModelSpec model_spec() const {
    ModelSpec spec;
    spec.params.C = opt_.c;
    spec.params.epsilon = opt_.epsilon;
    spec.params.gamma = opt_.gamma;
    spec.params.tol = opt_.tol;
    spec.params.validate();
    spec.grid_search = opt_.grid_search;
    return spec;
  }

  std::ostream& err() const { return err_; }

 private:
  const Options& opt_;
  std::ostream& err_;
  Provenance prov_;
};

inline std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw InputError(std::string(flag) + " is required");
  return value;
}

inline Dataset load_dataset(Session& s, const Options& o) {
  const FeatureTable nss = read_feature_table(s.csv_input(require(o.features, "--features")));
  std::optional<FeatureTable> deep;
  if (!o.deep.empty()) deep = read_deep_table(s.csv_input(o.deep));
  const MosTable mos = read_mos_table(s.csv_input(require(o.mos, "--mos")));
  return join_dataset(nss, deep ? &*deep : nullptr, mos);
}

inline std::vector<ManifestRow> load_manifest(Session& s, const Options& o) {
  const std::string path = require(o.manifest, "--manifest");
  const auto rows = read_manifest(s.csv_input(path), fs::path(path).parent_path());
  for (const auto& r : rows) s.input(r.path.string());
  return rows;
}

inline void cmd_features(const Options& o, Session& s) {
  const auto rows = load_manifest(s, o);
  std::vector<FeatureVector> bags(rows.size());
  parallel_for(rows.size(), s.threads(), [&](std::size_t i) { bags[i] = clip_nss_bag(rows[i], o.sample_rate); });
  FeatureTable table(nss_bag_feature_names());
  for (std::size_t i = 0; i < rows.size(); ++i) table.add(rows[i].video, bags[i].values);
  s.write(o.out, write_feature_table(table, s.csv_preamble()));
}

inline void cmd_siti(const Options& o, Session& s) {
  const auto rows = load_manifest(s, o);
  std::vector<SiTi> values(rows.size());
  parallel_for(rows.size(), s.threads(), [&](std::size_t i) { values[i] = clip_si_ti(rows[i]); });
  std::string out = s.csv_preamble() + "video_id,si,ti\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += csv_field(rows[i].video) + "," + format_real(values[i].si) + "," +
           format_real(values[i].ti) + "\n";
  }
  s.write(o.out, out);
}

inline std::string rejection_report_text(const RejectionReport& r) {
  std::ostringstream t;
  t << "subjects " << r.subjects.size() << " rejected " << r.rejected().size() << "\n";
  for (const auto& s : r.subjects) {
    t << "subject " << s.subject << " ratings " << s.total << " p " << s.p << " q " << s.q
      << " rejected " << (s.rejected ? "yes" : "no") << "\n";
  }
  for (const auto& v : r.videos) {
    t << "video " << v.video << " n " << v.count << " mean " << format_real(v.mean) << " std "
      << format_real(v.std) << " kurtosis " << format_real(v.kurtosis) << " threshold "
      << format_real(v.threshold) << "\n";
  }
  return t.str();
}

inline std::string default_report_path(const std::string& out) {
  fs::path p(out);
  p.replace_extension(".rejection.txt");
  return p.string();
}

inline void cmd_mos(const Options& o, Session& s) {
  const RatingMatrix ratings = read_ratings(s.csv_input(require(o.ratings, "--ratings")));
  const ZScoreMatrix z = session_zscores(ratings);
  const RejectionReport report = bt500_reject(z);
  const MosTable table = rescale_and_mos(z, report.rejected());
  s.write(o.out, write_mos_table(table, s.csv_preamble()));
  s.write(o.report.empty() ? default_report_path(o.out) : o.report,
          s.csv_preamble() + rejection_report_text(report));
}

// Consistency is measured on the subjects retained by screening.
inline void cmd_consistency(const Options& o, Session& s) {
  const RatingMatrix all = read_ratings(s.csv_input(require(o.ratings, "--ratings")));
  const MosTable mos = read_mos_table(s.csv_input(require(o.mos, "--mos")));
  s.config("splits", static_cast<std::uint64_t>(o.splits));
  const auto rejected = bt500_reject(session_zscores(all)).rejected();
  std::vector<Rating> kept;
  for (const Rating& r : all.entries()) {
    if (!rejected.contains(r.subject)) kept.push_back(r);
  }
  const RatingMatrix ratings(std::move(kept));
  const auto inter = inter_subject_consistency(ratings, o.splits, o.seed, s.threads());
  const auto intra = intra_subject_consistency(ratings, mos);
  for (const auto& w : intra.warnings) s.err() << "warning: " << w << "\n";
  nlohmann::ordered_json body;
  body["rejected_subjects"] = std::vector<std::string>(rejected.begin(), rejected.end());
  body["inter_subject"] = {{"median_srocc", inter.median}, {"splits", inter.sroccs}};
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [subject, rho] : intra.per_subject) per[subject] = rho;
  body["intra_subject"] = {{"median_srocc", intra.median}, {"per_subject", per},
                           {"warnings", intra.warnings}};
  s.write(o.out, s.json_with_provenance(body).dump(1) + "\n");
}

inline void cmd_train(const Options& o, Session& s) {
  const Dataset data = load_dataset(s, o);
  const ModelSpec spec = s.model_spec();
  const GameVqpModel model = train_gamevqp(data, spec, o.seed);
  s.write(o.out, s.json_with_provenance(gamevqp_to_json(model)).dump(1) + "\n");
}

inline void cmd_predict(const Options& o, Session& s) {
  const GameVqpModel model = gamevqp_load(s.input(require(o.model, "--model")));
  const FeatureTable nss = read_feature_table(s.csv_input(require(o.features, "--features")));
  std::optional<FeatureTable> deep;
  if (!o.deep.empty()) deep = read_deep_table(s.csv_input(o.deep));
  if (model.deep_branch && !deep) throw SchemaError("model is in full mode; --deep is required");
  std::string out = s.csv_preamble() + "video_id,prediction\n";
  std::vector<std::string> missing;
  for (std::size_t r = 0; r < nss.size(); ++r) {
    const std::string& id = nss.ids()[r];
    double p = 0.0;
    if (model.deep_branch) {
      const auto k = deep->find(id);
      if (!k) {
        missing.push_back(id);
        continue;
      }
      p = 0.5 * (svr_predict(model.nss_branch, nss.names(), nss.row(r)) +
                 svr_predict(*model.deep_branch, deep->names(), deep->row(*k)));
    } else {
      p = svr_predict(model.nss_branch, nss.names(), nss.row(r));
    }
    out += csv_field(id) + "," + format_real(p) + "\n";
  }
  if (!missing.empty()) throw JoinError("ids without deep rows: " + detail::join_ids(missing));
  s.write(o.out, out);
}

inline void cmd_eval(const Options& o, Session& s) {
  const Dataset data = load_dataset(s, o);
  const ModelSpec spec = s.model_spec();
  SplitConfig cfg;
  cfg.iterations = o.iterations;
  cfg.train_frac = o.train_frac;
  cfg.seed = o.seed;
  cfg.threads = s.threads();
  const SplitReport report = split_protocol(data, spec, cfg);
  if (report.degenerate_iterations > 0) {
    s.err() << "warning: " << report.degenerate_iterations
            << " iterations produced constant predictions\n";
  }
  s.write(o.out, s.json_with_provenance(split_report_to_json(report, spec)).dump(1) + "\n");
}

inline void cmd_kfold(const Options& o, Session& s) {
  const Dataset data = load_dataset(s, o);
  s.config("folds", static_cast<std::uint64_t>(o.folds));
  const auto rows = kfold_predictions(data, s.model_spec(), o.folds, o.seed, s.threads());
  s.write(o.out, write_scatter(rows, s.csv_preamble()));
}

inline void cmd_significance(const Options& o, Session& s) {
  if (o.reports.size() < 2) throw InputError("significance needs at least 2 split reports");
  if (o.metric != "srocc" && o.metric != "lcc") throw InputError("--metric must be srocc or lcc");
  std::vector<std::string> names = o.names;
  if (names.empty()) {
    for (const auto& p : o.reports) names.push_back(fs::path(p).stem().string());
  }
  if (names.size() != o.reports.size()) throw InputError("--names count must match --reports");
  std::vector<std::vector<double>> dists;
  for (const auto& p : o.reports) {
    const auto d = read_split_distributions(s.input(p), p);
    dists.push_back(o.metric == "srocc" ? d.srocc : d.lcc);
  }
  const auto m = significance_matrix(names, dists, o.metric);
  std::string out = s.csv_preamble() + "model";
  for (const auto& n : m.names) out += "," + csv_field(n);
  out += "\n";
  for (std::size_t r = 0; r < m.names.size(); ++r) {
    out += csv_field(m.names[r]);
    for (std::size_t c = 0; c < m.names.size(); ++c) out += "," + std::to_string(m.entries[r][c]);
    out += "\n";
  }
  s.write(o.out, out);
}

// Exit codes: 0 success, 1 validation error (bad flags, schema, input
// contract), 2 runtime error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Game video quality prediction toolkit", "gamevqp"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "flat key = value configuration file; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "64-bit seed");
  app.add_option("--iterations", o.iterations, "split iterations")->check(CLI::PositiveNumber);
  app.add_option("--train-frac", o.train_frac, "training fraction")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--grid-search", o.grid_search, "cross-validated (C, gamma) search");
  app.add_option("--out", o.out, "output file");
  app.add_option("--threads", o.threads, "worker threads (0 = hardware)");
  app.add_option("--C", o.c, "SVR box constraint");
  app.add_option("--epsilon", o.epsilon, "SVR insensitivity width");
  app.add_option("--gamma", o.gamma, "RBF width (0 = 1/features)");
  app.add_option("--tol", o.tol, "SMO stopping tolerance");

  auto* features = app.add_subcommand("features", "manifest -> features.csv");
  features->add_option("--manifest", o.manifest)->required();
  features->add_option("--sample-rate", o.sample_rate, "sampled frames per second of video")
      ->check(CLI::PositiveNumber);
  auto* siti = app.add_subcommand("siti", "manifest -> siti.csv");
  siti->add_option("--manifest", o.manifest)->required();
  auto* mos = app.add_subcommand("mos", "ratings.csv -> mos.csv and rejection report");
  mos->add_option("--ratings", o.ratings)->required();
  mos->add_option("--report", o.report, "rejection report path");
  auto* consistency = app.add_subcommand("consistency", "ratings + mos -> consistency report");
  consistency->add_option("--ratings", o.ratings)->required();
  consistency->add_option("--mos", o.mos)->required();
  consistency->add_option("--splits", o.splits)->check(CLI::PositiveNumber);
  auto* train = app.add_subcommand("train", "features [+ deep] + mos -> model");
  auto* predict = app.add_subcommand("predict", "model + features [+ deep] -> predictions.csv");
  auto* eval = app.add_subcommand("eval", "features [+ deep] + mos -> splitreport.json");
  auto* kfold = app.add_subcommand("kfold", "features [+ deep] + mos -> scatter.csv");
  for (auto* sub : {train, predict, eval, kfold}) {
    sub->add_option("--features", o.features)->required();
    sub->add_option("--deep", o.deep);
  }
  for (auto* sub : {train, eval, kfold}) sub->add_option("--mos", o.mos)->required();
  predict->add_option("--model", o.model)->required();
  kfold->add_option("--folds", o.folds)->check(CLI::Range(2, 1000000));
  auto* significance = app.add_subcommand("significance", ">= 2 split reports -> significance.csv");
  significance->add_option("--reports", o.reports)->required()->expected(2, -1);
  significance->add_option("--names", o.names);
  significance->add_option("--metric", o.metric)->check(CLI::IsMember({"srocc", "lcc"}));

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << " " << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  if (o.out.empty()) {
    err << "error: --out is required\n";
    return 1;
  }

  try {
    Session s(o, err);
    s.config("seed", o.seed);
    const std::string cmd = app.get_subcommands().front()->get_name();
    s.config("command", cmd);
    if (cmd == "eval") {
      s.config("iterations", static_cast<std::uint64_t>(o.iterations));
      s.config("train_frac", o.train_frac);
    }
    if (cmd == "train" || cmd == "eval" || cmd == "kfold") s.svr_config();
    if (cmd == "features") s.config("sample_rate", o.sample_rate);
    if (cmd == "significance") s.config("metric", o.metric);
    if (cmd == "features") cmd_features(o, s);
    else if (cmd == "siti") cmd_siti(o, s);
    else if (cmd == "mos") cmd_mos(o, s);
    else if (cmd == "consistency") cmd_consistency(o, s);
    else if (cmd == "train") cmd_train(o, s);
    else if (cmd == "predict") cmd_predict(o, s);
    else if (cmd == "eval") cmd_eval(o, s);
    else if (cmd == "kfold") cmd_kfold(o, s);
    else if (cmd == "significance") cmd_significance(o, s);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace gamevqp::cli

#endif  // GAMEVQP_TOOLS_GAMEVQP_CLI_HPP_
