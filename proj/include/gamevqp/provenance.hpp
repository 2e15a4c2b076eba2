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

// Provenance stamps embedded in every output file: tool version, a hash of the
// fully resolved configuration, and hashes of the input files. Hashes are
// 64-bit FNV-1a rendered as 16 lowercase hex digits.

#ifndef GAMEVQP_PROVENANCE_HPP_
#define GAMEVQP_PROVENANCE_HPP_

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace gamevqp {

inline constexpr std::string_view kToolName = "gamevqp";
inline constexpr std::string_view kToolVersion = "1.0.0";

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Provenance {
  // Resolved configuration as sorted key/value pairs.
  std::map<std::string, std::string> config;
  // (file name, content hash) in the order the inputs were named.
  std::vector<std::pair<std::string, std::string>> inputs;

  std::string config_text() const {
    std::string s;
    for (const auto& [k, v] : config) s += k + "=" + v + "\n";
    return s;
  }

  std::string config_hash() const { return hex64(fnv1a64(config_text())); }

  void add_input(std::string name, std::string_view content) {
    inputs.emplace_back(std::move(name), hex64(fnv1a64(content)));
  }

  std::string comment_line() const {
    std::string s = "# " + std::string(kToolName) + " " + std::string(kToolVersion) +
                    " config=" + config_hash() + " inputs=";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (i) s += ',';
      s += inputs[i].first + ":" + inputs[i].second;
    }
    return s + "\n";
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
    j["config_hash"] = config_hash();
    auto in = nlohmann::ordered_json::object();
    for (const auto& [name, hash] : inputs) in[name] = hash;
    j["inputs"] = std::move(in);
    j["config"] = config;
    return j;
  }
};

}  // namespace gamevqp

#endif  // GAMEVQP_PROVENANCE_HPP_
