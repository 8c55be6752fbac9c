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

// Corpus container, statistics and the canonical interchange format.
//
// Canonical data file: one JSON object per line,
//   {"id":..,"tokens":[..],"acs":[{"start":..,"end":..,"type":..}],
//    "ars":[{"head":..,"tail":..,"type":..}],"split":..}
// Schema sidecar (<data path>.schema.json):
//   {"name":..,"ac_types":[..],"ar_types":[..],"structure_mode":"tree"|"graph"}
// plus an optional "split_info" object describing how splits were assigned.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aasp/error.hpp"
#include "aasp/structure.hpp"
#include "json.hpp"

namespace aasp {

using Json = nlohmann::ordered_json;

struct CorpusEntry {
  ArgStructure structure;
  std::string split = "train";

  bool operator==(const CorpusEntry &) const = default;
};

struct Corpus {
  Schema schema;
  std::vector<CorpusEntry> entries;
  Json split_info = Json::object();

  std::vector<ArgStructure> Structures(const std::string &split = "") const {
    std::vector<ArgStructure> out;
    for (const auto &e : entries) {
      if (split.empty() || e.split == split) out.push_back(e.structure);
    }
    return out;
  }
  std::vector<Paragraph> Paragraphs(const std::string &split = "") const {
    std::vector<Paragraph> out;
    for (const auto &e : entries) {
      if (split.empty() || e.split == split) out.push_back(e.structure.paragraph);
    }
    return out;
  }
};

// Paragraph ids have the form "<document>/<k>" for multi-paragraph documents;
// an id without a slash is its own document.
inline std::string DocumentOf(const std::string &paragraph_id) {
  auto slash = paragraph_id.rfind('/');
  return slash == std::string::npos ? paragraph_id : paragraph_id.substr(0, slash);
}

struct CorpusStats {
  int documents = 0;
  int paragraphs = 0;
  int acs = 0;
  int ars = 0;
  std::map<std::string, int> ac_types;
  std::map<std::string, int> ar_types;

  bool operator==(const CorpusStats &) const = default;
};

inline CorpusStats ComputeStats(const std::vector<ArgStructure> &structures) {
  CorpusStats stats;
  std::set<std::string> docs;
  for (const ArgStructure &s : structures) {
    docs.insert(DocumentOf(s.paragraph.id));
    ++stats.paragraphs;
    stats.acs += static_cast<int>(s.acs.size());
    stats.ars += static_cast<int>(s.ars.size());
    for (const auto &ac : s.acs) ++stats.ac_types[ac.type];
    for (const auto &ar : s.ars) ++stats.ar_types[ar.type];
  }
  stats.documents = static_cast<int>(docs.size());
  return stats;
}

inline CorpusStats ComputeStats(const Corpus &corpus) {
  return ComputeStats(corpus.Structures());
}

inline Json StatsToJson(const CorpusStats &stats) {
  Json j;
  j["documents"] = stats.documents;
  j["paragraphs"] = stats.paragraphs;
  j["acs"] = stats.acs;
  j["ars"] = stats.ars;
  j["ac_types"] = Json::object();
  for (const auto &[k, v] : stats.ac_types) j["ac_types"][k] = v;
  j["ar_types"] = Json::object();
  for (const auto &[k, v] : stats.ar_types) j["ar_types"][k] = v;
  return j;
}

// JSON conversions.

inline Json SchemaToJson(const Schema &schema) {
  Json j;
  j["name"] = schema.name;
  j["ac_types"] = schema.ac_types;
  j["ar_types"] = schema.ar_types;
  j["structure_mode"] = StructureModeName(schema.mode);
  return j;
}

namespace internal {

inline void RequireKeys(const Json &j, std::initializer_list<const char *> required,
                        std::initializer_list<const char *> optional,
                        const std::string &what) {
  if (!j.is_object()) Fail(ErrorCode::kParse, what, ": expected a JSON object");
  for (const char *key : required) {
    if (!j.contains(key)) Fail(ErrorCode::kParse, what, ": missing key '", key, "'");
  }
  for (const auto &item : j.items()) {
    bool known = false;
    for (const char *key : required) known = known || item.key() == key;
    for (const char *key : optional) known = known || item.key() == key;
    if (!known) Fail(ErrorCode::kParse, what, ": unknown key '", item.key(), "'");
  }
}

}  // namespace internal

inline Schema SchemaFromJson(const Json &j) {
  internal::RequireKeys(j, {"name", "ac_types", "ar_types", "structure_mode"},
                        {"split_info"}, "schema");
  Schema schema;
  try {
    schema.name = j.at("name").get<std::string>();
    schema.ac_types = j.at("ac_types").get<std::vector<std::string>>();
    schema.ar_types = j.at("ar_types").get<std::vector<std::string>>();
    schema.mode = ParseStructureMode(j.at("structure_mode").get<std::string>());
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kParse, "schema: ", e.what());
  }
  CheckSchema(schema);
  return schema;
}

inline Json EntryToJson(const CorpusEntry &entry) {
  const ArgStructure &s = entry.structure;
  Json j;
  j["id"] = s.paragraph.id;
  j["tokens"] = s.paragraph.tokens;
  j["acs"] = Json::array();
  for (const auto &ac : s.acs) {
    j["acs"].push_back(Json{{"start", ac.start}, {"end", ac.end}, {"type", ac.type}});
  }
  j["ars"] = Json::array();
  for (const auto &ar : s.ars) {
    j["ars"].push_back(Json{{"head", ar.head}, {"tail", ar.tail}, {"type", ar.type}});
  }
  j["split"] = entry.split;
  return j;
}

inline CorpusEntry EntryFromJson(const Json &j) {
  internal::RequireKeys(j, {"id", "tokens", "acs", "ars"}, {"split"}, "record");
  CorpusEntry entry;
  try {
    ArgStructure &s = entry.structure;
    s.paragraph.id = j.at("id").get<std::string>();
    s.paragraph.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const Json &ac : j.at("acs")) {
      internal::RequireKeys(ac, {"start", "end", "type"}, {}, "ac");
      s.acs.push_back({ac.at("start").get<int>(), ac.at("end").get<int>(),
                       ac.at("type").get<std::string>()});
    }
    for (const Json &ar : j.at("ars")) {
      internal::RequireKeys(ar, {"head", "tail", "type"}, {}, "ar");
      s.ars.push_back({ar.at("head").get<int>(), ar.at("tail").get<int>(),
                       ar.at("type").get<std::string>()});
    }
    if (j.contains("split")) entry.split = j.at("split").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kParse, e.what());
  }
  return entry;
}

inline std::string SidecarPath(const std::string &data_path) {
  return data_path + ".schema.json";
}

inline std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '", path, "'");
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

inline void WriteFile(const std::string &path, const std::string &contents) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write '", path, "'");
  out << contents;
  if (!out) Fail(ErrorCode::kIo, "write to '", path, "' failed");
}

inline Json ParseJson(const std::string &text, const std::string &where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kParse, where, ": ", e.what());
  }
}

inline Schema ReadSchema(const std::string &data_path, Json *split_info = nullptr) {
  const std::string path = SidecarPath(data_path);
  Json j = ParseJson(ReadFile(path), path);
  Schema schema = SchemaFromJson(j);
  if (split_info != nullptr && j.contains("split_info")) *split_info = j["split_info"];
  return schema;
}

inline void WriteSchema(const std::string &data_path, const Schema &schema,
                        const Json &split_info = Json::object()) {
  Json j = SchemaToJson(schema);
  if (!split_info.empty()) j["split_info"] = split_info;
  WriteFile(SidecarPath(data_path), j.dump(2) + "\n");
}

// Streams records of a canonical data file one line at a time, validating
// each against the schema.
class CanonicalReader {
 public:
  CanonicalReader(const std::string &path, Schema schema)
      : path_(path), schema_(std::move(schema)), in_(path, std::ios::binary) {
    if (!in_) Fail(ErrorCode::kIo, "cannot open '", path, "'");
  }

  const Schema &schema() const { return schema_; }

  bool Next(CorpusEntry *entry) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      if (line.empty()) continue;
      Json j;
      try {
        j = Json::parse(line);
        *entry = EntryFromJson(j);
      } catch (const nlohmann::json::exception &e) {
        Fail(ErrorCode::kParse, path_, ":", line_number_, ": ", e.what());
      } catch (const Error &e) {
        Fail(ErrorCode::kParse, path_, ":", line_number_, ": ", e.what());
      }
      ValidationReport report = ValidateStructure(entry->structure, schema_);
      if (!report.empty()) {
        Fail(ErrorCode::kSchema, path_, ":", line_number_, ": paragraph '",
             entry->structure.paragraph.id, "': ", report.front().message);
      }
      if (!ids_.insert(entry->structure.paragraph.id).second) {
        Fail(ErrorCode::kParse, path_, ":", line_number_, ": duplicate paragraph id '",
             entry->structure.paragraph.id, "'");
      }
      return true;
    }
    return false;
  }

  int line_number() const { return line_number_; }

 private:
  std::string path_;
  Schema schema_;
  std::ifstream in_;
  int line_number_ = 0;
  std::set<std::string> ids_;
};

inline Corpus ReadCanonical(const std::string &path) {
  Corpus corpus;
  corpus.schema = ReadSchema(path, &corpus.split_info);
  CanonicalReader reader(path, corpus.schema);
  CorpusEntry entry;
  while (reader.Next(&entry)) corpus.entries.push_back(std::move(entry));
  return corpus;
}

inline std::string CanonicalLine(const CorpusEntry &entry) {
  CorpusEntry c{Canonicalize(entry.structure), entry.split};
  return EntryToJson(c).dump() + "\n";
}

// Writes the data file and its schema sidecar. Structures are canonicalized
// first, so reading and re-writing a file reproduces it byte for byte.
inline void WriteCanonical(const Corpus &corpus, const std::string &path) {
  CheckSchema(corpus.schema);
  std::string data;
  std::set<std::string> ids;
  for (const CorpusEntry &entry : corpus.entries) {
    ValidationReport report = ValidateStructure(Canonicalize(entry.structure), corpus.schema);
    if (!report.empty()) {
      Fail(ErrorCode::kSchema, "paragraph '", entry.structure.paragraph.id, "': ",
           report.front().message);
    }
    if (!ids.insert(entry.structure.paragraph.id).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate paragraph id '",
           entry.structure.paragraph.id, "'");
    }
    data += CanonicalLine(entry);
  }
  WriteFile(path, data);
  WriteSchema(path, corpus.schema, corpus.split_info);
}

}  // namespace aasp
