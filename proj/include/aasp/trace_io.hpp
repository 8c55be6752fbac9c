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

// Action-trace files: one JSON object per line,
//   {"id", "split", "tokens", "mode", "steps", "trace"}
// where steps are "copy", "open" or {"close", "type", "links"} objects and
// trace is the RenderTrace string (ignored on read).

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "aasp/actions.hpp"
#include "aasp/corpus.hpp"

namespace aasp {

struct TraceRecord {
  Paragraph paragraph;
  std::string split = "train";
  LinearizeMode mode = LinearizeMode::kMultiLink;
  ActionSequence sequence;
};

inline Json StepToJson(const ActionStep &step) {
  switch (step.kind) {
    case ActionKind::kCopy:
      return "copy";
    case ActionKind::kOpen:
      return "open";
    case ActionKind::kClose:
      break;
  }
  Json links = Json::array();
  for (const Link &l : step.links) {
    links.push_back({{"antecedent", l.antecedent},
                     {"type", l.ar_type},
                     {"direction", DirectionName(l.direction)}});
  }
  return Json{{"close", step.boundary}, {"type", step.ac_type}, {"links", links}};
}

inline ActionStep StepFromJson(const Json &j) {
  if (j.is_string()) {
    if (j == "copy") return ActionStep::Copy();
    if (j == "open") return ActionStep::Open();
    Fail(ErrorCode::kParse, "unknown action '", j.get<std::string>(), "'");
  }
  internal::RequireKeys(j, {"close", "type"}, {"links"}, "close action");
  std::vector<Link> links;
  if (j.contains("links")) {
    for (const Json &l : j["links"]) {
      internal::RequireKeys(l, {"antecedent", "type", "direction"}, {}, "link");
      links.push_back({l["antecedent"].get<int>(), l["type"].get<std::string>(),
                       ParseDirection(l["direction"].get<std::string>())});
    }
  }
  return ActionStep::Close(j["close"].get<int>(), j["type"].get<std::string>(), std::move(links));
}

inline Json TraceToJson(const TraceRecord &r) {
  Json steps = Json::array();
  for (const ActionStep &s : r.sequence.steps) steps.push_back(StepToJson(s));
  return Json{{"id", r.paragraph.id},
              {"split", r.split},
              {"tokens", r.paragraph.tokens},
              {"mode", LinearizeModeName(r.mode)},
              {"steps", steps},
              {"trace", RenderTrace(r.sequence, r.paragraph)}};
}

inline TraceRecord TraceFromJson(const Json &j) {
  internal::RequireKeys(j, {"id", "tokens", "mode", "steps"}, {"split", "trace"}, "trace record");
  TraceRecord r;
  r.paragraph.id = j["id"].get<std::string>();
  if (j.contains("split")) r.split = j["split"].get<std::string>();
  r.paragraph.tokens = j["tokens"].get<std::vector<std::string>>();
  r.mode = ParseLinearizeMode(j["mode"].get<std::string>());
  r.sequence.paragraph_id = r.paragraph.id;
  for (const Json &s : j["steps"]) r.sequence.steps.push_back(StepFromJson(s));
  return r;
}

inline std::vector<TraceRecord> ReadTraces(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '", path, "'");
  std::vector<TraceRecord> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      out.push_back(TraceFromJson(Json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorCode::kParse, path, ":", line_number, ": ", e.what());
    } catch (const Error &e) {
      Fail(ErrorCode::kParse, path, ":", line_number, ": ", e.what());
    }
  }
  return out;
}

}  // namespace aasp
