// Copyright 2026 The AASP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration: a JSON document whose shape is fixed by Defaults().
// Files and --set overrides may only touch keys that exist there.

#pragma once

#include <cstdint>
#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "aasp/corpus.hpp"
#include "aasp/gradcheck.hpp"
#include "aasp/model.hpp"
#include "aasp/synthetic.hpp"

namespace aasp {

inline constexpr const char *kToolVersion = "1.0.0";

inline Schema SchemaByName(const std::string &name) {
  if (name == "aae") return Schema::Aae();
  if (name == "aae-fg") return Schema::AaeFineGrained();
  if (name == "cdcp") return Schema::Cdcp();
  Fail(ErrorCode::kInvalidArgument, "unknown schema '", name, "' (expected aae, aae-fg or cdcp)");
}

class RunConfig {
 public:
  static Json Defaults() {
    Json model = ConfigToJson(ModelConfig{});
    model.erase("seed");
    const SyntheticOptions syn;
    return Json{
        {"seed", 1},
        {"paths", {{"input", ""}, {"gold", ""}, {"pred", ""}, {"model", ""}}},
        {"split", ""},
        {"model", model},
        {"decode", {{"max_open", 1}, {"max_steps", 0}, {"threads", 1}, {"trace", false}}},
        {"train",
         {{"train_split", "train"}, {"dev_split", "dev"}, {"eval_every", 1}, {"target", nullptr}}},
        {"synthetic",
         {{"n_paragraphs", syn.n_paragraphs},
          {"min_tokens", syn.min_tokens},
          {"max_tokens", syn.max_tokens},
          {"ac_density", syn.ac_density},
          {"mode", StructureModeName(syn.mode)},
          {"schema", syn.schema.name},
          {"relation_prob", syn.relation_prob},
          {"extra_link_prob", syn.extra_link_prob},
          {"dev_fraction", syn.dev_fraction},
          {"test_fraction", syn.test_fraction},
          {"content_words", syn.content_words},
          {"filler_words", syn.filler_words}}},
        {"convert", {{"format", "aae"}, {"dev_fraction", 0.1}, {"exclude_prompt", true}}},
        {"gradcheck",
         {{"examples", 5},
          {"samples", 200},
          {"epsilon", 1e-5},
          {"floor", GradCheckOptions{}.floor},
          {"threshold", 1e-4},
          {"max_tokens", 20}}},
        {"analyze", {{"kind", "errors"}, {"length_buckets", {1, 3, 5, 7}}, {"chain_typed", false}}},
    };
  }

  RunConfig() : j_(Defaults()) {}

  // Overlays a config document; unknown keys and type changes are rejected.
  void Merge(const Json &overlay, const std::string &where) { MergeInto(&j_, overlay, where); }

  void MergeFile(const std::string &path) { Merge(ParseJson(ReadFile(path), path), path); }

  // "a.b.c=value"; value parsed as JSON, else taken as a string.
  void Set(const std::string &assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
      Fail(ErrorCode::kInvalidArgument, "--set expects key=value, got '", assignment, "'");
    }
    const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    SetPath(key, value);
  }

  void SetPath(const std::string &dotted, const Json &value) {
    Json overlay = value;
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
      size_t dot = dotted.find('.', start);
      parts.push_back(dotted.substr(start, dot - start));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) overlay = Json{{*it, overlay}};
    Merge(overlay, "--set " + dotted);
  }

  const Json &json() const { return j_; }
  const Json &at(const std::string &section) const { return j_.at(section); }

  uint64_t seed() const { return j_["seed"].get<uint64_t>(); }
  std::string path(const std::string &name) const { return j_["paths"][name].get<std::string>(); }

  std::string RequirePath(const std::string &name, const std::string &flag) const {
    std::string p = path(name);
    if (p.empty()) Fail(ErrorCode::kInvalidArgument, "missing required ", flag);
    return p;
  }

  ModelConfig Model() const {
    ModelConfig c = ConfigFromJson(j_["model"]);
    c.seed = seed();
    return c;
  }

  SyntheticOptions Synthetic() const {
    const Json &s = j_["synthetic"];
    SyntheticOptions o;
    o.seed = seed();
    o.n_paragraphs = s["n_paragraphs"].get<int>();
    o.min_tokens = s["min_tokens"].get<int>();
    o.max_tokens = s["max_tokens"].get<int>();
    o.ac_density = s["ac_density"].get<double>();
    o.mode = ParseStructureMode(s["mode"].get<std::string>());
    o.schema = SchemaByName(s["schema"].get<std::string>());
    o.relation_prob = s["relation_prob"].get<double>();
    o.extra_link_prob = s["extra_link_prob"].get<double>();
    o.dev_fraction = s["dev_fraction"].get<double>();
    o.test_fraction = s["test_fraction"].get<double>();
    o.content_words = s["content_words"].get<int>();
    o.filler_words = s["filler_words"].get<int>();
    return o;
  }

  // Writes the resolved document; replaying it reproduces the run.
  void Write(const std::string &path) const { WriteFile(path, j_.dump(2) + "\n"); }

 private:
  static const char *KindName(const Json &v) {
    if (v.is_number()) return "number";
    return v.type_name();
  }

  static void MergeInto(Json *base, const Json &overlay, const std::string &where,
                        const std::string &prefix = "") {
    if (!overlay.is_object()) Fail(ErrorCode::kParse, where, ": expected an object");
    for (const auto &item : overlay.items()) {
      const std::string key = prefix.empty() ? item.key() : prefix + "." + item.key();
      if (!base->contains(item.key())) Fail(ErrorCode::kParse, where, ": unknown key '", key, "'");
      Json &slot = (*base)[item.key()];
      const Json &v = item.value();
      if (slot.is_object()) {
        MergeInto(&slot, v, where, key);
        continue;
      }
      if (!slot.is_null() && !v.is_null() && std::string(KindName(slot)) != KindName(v)) {
        Fail(ErrorCode::kParse, where, ": key '", key, "' expects a ", KindName(slot), ", got ",
             KindName(v));
      }
      if (slot.is_number_integer() && v.is_number_float()) {
        Fail(ErrorCode::kParse, where, ": key '", key, "' expects an integer");
      }
      slot = v;
    }
  }

  Json j_;
};

// 64-bit FNV-1a.
inline uint64_t Fnv1a64(const std::string &bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string HexDigest(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Records inputs and outputs of a run; files are hashed when written out.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void Input(const std::string &path) { inputs_.push_back(path); }
  void Output(const std::string &path) { outputs_.push_back(path); }

  Json ToJson() const {
    return Json{{"tool", "aasp"},          {"version", kToolVersion},  {"command", command_},
                {"config", "config.json"}, {"inputs", Hashes(inputs_)}, {"outputs", Hashes(outputs_)}};
  }

  void Write(const std::string &out_dir) const {
    WriteFile((std::filesystem::path(out_dir) / "manifest.json").string(), ToJson().dump(2) + "\n");
  }

 private:
  static Json Hashes(const std::vector<std::string> &paths) {
    Json list = Json::array();
    for (const std::string &path : paths) {
      std::vector<std::string> files;
      if (std::filesystem::is_directory(path)) {
        for (const auto &e : std::filesystem::recursive_directory_iterator(path)) {
          if (e.is_regular_file()) files.push_back(e.path().string());
        }
        std::sort(files.begin(), files.end());
      } else {
        files.push_back(path);
      }
      for (const std::string &f : files) {
        const std::string bytes = ReadFile(f);
        list.push_back({{"path", f}, {"bytes", bytes.size()}, {"fnv1a64", HexDigest(Fnv1a64(bytes))}});
      }
    }
    return list;
  }

  std::string command_;
  std::vector<std::string> inputs_, outputs_;
};

}  // namespace aasp
