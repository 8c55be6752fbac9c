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

// Argumentative structures: a tokenized paragraph, typed argument component
// (AC) spans over it and typed directed argumentative relations (ARs) between
// those components.

#pragma once

#include <algorithm>
#include <compare>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aasp/error.hpp"

namespace aasp {

struct Paragraph {
  std::string id;
  std::vector<std::string> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Paragraph &) const = default;
};

// Inclusive token span [start, end] with its component type.
struct AcSpan {
  int start = 0;
  int end = 0;
  std::string type;

  int length() const { return end - start + 1; }
  bool Overlaps(const AcSpan &other) const {
    return start <= other.end && other.start <= end;
  }
  auto operator<=>(const AcSpan &) const = default;
};

// Directed relation from the head AC (source) to the tail AC (target). Both
// are indices into ArgStructure::acs.
struct ArgRelation {
  int head = 0;
  int tail = 0;
  std::string type;

  auto operator<=>(const ArgRelation &) const = default;
};

struct ArgStructure {
  Paragraph paragraph;
  std::vector<AcSpan> acs;
  std::vector<ArgRelation> ars;

  bool operator==(const ArgStructure &) const = default;
};

enum class StructureMode { kTree, kGraph };

inline const char *StructureModeName(StructureMode mode) {
  return mode == StructureMode::kTree ? "tree" : "graph";
}

inline StructureMode ParseStructureMode(const std::string &name) {
  if (name == "tree") return StructureMode::kTree;
  if (name == "graph") return StructureMode::kGraph;
  Fail(ErrorCode::kInvalidArgument, "unknown structure mode '", name,
       "' (expected tree or graph)");
}

// Label inventory of a corpus. In tree mode every AC heads at most one
// relation; graph mode allows several outgoing relations per AC.
struct Schema {
  std::string name;
  std::vector<std::string> ac_types;
  std::vector<std::string> ar_types;
  StructureMode mode = StructureMode::kTree;

  int num_ac_types() const { return static_cast<int>(ac_types.size()); }
  int num_ar_types() const { return static_cast<int>(ar_types.size()); }

  int AcIndex(const std::string &label) const { return IndexOf(ac_types, label); }
  int ArIndex(const std::string &label) const { return IndexOf(ar_types, label); }

  bool operator==(const Schema &) const = default;

  static Schema Aae() {
    return {"aae", {"Claim", "MajorClaim", "Premise"}, {"supports", "attacks"},
            StructureMode::kTree};
  }
  static Schema AaeFineGrained() {
    return {"aae-fg",
            {"Fact", "Value", "Policy", "CommonGround", "Testimony",
             "HypotheticalInstance", "Statistics", "RealExample", "Others"},
            {"supports", "attacks"},
            StructureMode::kTree};
  }
  static Schema Cdcp() {
    return {"cdcp", {"Fact", "Testimony", "Reference", "Policy", "Value"},
            {"reason", "evidence"}, StructureMode::kGraph};
  }

 private:
  static int IndexOf(const std::vector<std::string> &labels,
                     const std::string &label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
  }
};

inline void CheckSchema(const Schema &schema) {
  auto check = [&](const std::vector<std::string> &labels, const char *what) {
    if (labels.empty()) {
      Fail(ErrorCode::kSchema, "schema '", schema.name, "' has no ", what);
    }
    std::set<std::string> seen;
    for (const auto &label : labels) {
      if (label.empty()) Fail(ErrorCode::kSchema, "empty ", what, " label");
      if (!seen.insert(label).second) {
        Fail(ErrorCode::kSchema, "duplicate ", what, " label '", label, "'");
      }
    }
  };
  check(schema.ac_types, "AC types");
  check(schema.ar_types, "AR types");
}

struct Violation {
  enum class Kind {
    kEmptyParagraph,
    kBadToken,
    kSpanOutOfRange,
    kUnknownAcType,
    kOverlap,
    kUnsorted,
    kBadRelationIndex,
    kSelfRelation,
    kUnknownArType,
    kDuplicatePair,
    kMultipleOutgoing,
  };
  Kind kind;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

namespace internal {

inline bool HasWhitespace(const std::string &token) {
  return std::any_of(token.begin(), token.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}

// Checks everything that does not depend on a label inventory. When schema is
// null, type checks and the tree-mode rule are skipped.
inline ValidationReport CheckStructure(const ArgStructure &s,
                                       const Schema *schema) {
  ValidationReport out;
  auto add = [&](Violation::Kind kind, auto &&...parts) {
    out.push_back({kind, StrCat(parts...)});
  };
  const auto &tokens = s.paragraph.tokens;
  if (tokens.empty()) add(Violation::Kind::kEmptyParagraph, "paragraph has no tokens");
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty() || HasWhitespace(tokens[i])) {
      add(Violation::Kind::kBadToken, "token ", i, " is empty or contains whitespace");
    }
  }
  const int n = s.paragraph.size();
  const int num_acs = static_cast<int>(s.acs.size());
  for (int i = 0; i < num_acs; ++i) {
    const AcSpan &ac = s.acs[i];
    if (ac.start < 0 || ac.start > ac.end || ac.end >= n) {
      add(Violation::Kind::kSpanOutOfRange, "AC ", i, " span (", ac.start, ",",
          ac.end, ") out of range for ", n, " tokens");
    }
    if (schema != nullptr && schema->AcIndex(ac.type) < 0) {
      add(Violation::Kind::kUnknownAcType, "AC ", i, " has unknown type '",
          ac.type, "'");
    }
    if (i > 0 && s.acs[i - 1].start > ac.start) {
      add(Violation::Kind::kUnsorted, "AC ", i, " starts before AC ", i - 1);
    }
  }
  for (int i = 0; i < num_acs; ++i) {
    for (int j = i + 1; j < num_acs; ++j) {
      if (s.acs[i].Overlaps(s.acs[j])) {
        add(Violation::Kind::kOverlap, "overlapping spans at token ",
            std::max(s.acs[i].start, s.acs[j].start), " (ACs ", i, " and ", j,
            ")");
      }
    }
  }
  std::set<std::pair<int, int>> pairs;
  std::vector<int> outgoing(num_acs, 0);
  for (size_t r = 0; r < s.ars.size(); ++r) {
    const ArgRelation &ar = s.ars[r];
    if (ar.head < 0 || ar.head >= num_acs || ar.tail < 0 || ar.tail >= num_acs) {
      add(Violation::Kind::kBadRelationIndex, "AR ", r, " references AC (",
          ar.head, ",", ar.tail, ") outside ", num_acs, " ACs");
      continue;
    }
    if (ar.head == ar.tail) {
      add(Violation::Kind::kSelfRelation, "AR ", r, " relates AC ", ar.head,
          " to itself");
    }
    if (schema != nullptr && schema->ArIndex(ar.type) < 0) {
      add(Violation::Kind::kUnknownArType, "AR ", r, " has unknown type '",
          ar.type, "'");
    }
    if (!pairs.insert({ar.head, ar.tail}).second) {
      add(Violation::Kind::kDuplicatePair, "AR ", r, " duplicates pair (",
          ar.head, ",", ar.tail, ")");
    }
    if (++outgoing[ar.head] == 2 && schema != nullptr &&
        schema->mode == StructureMode::kTree) {
      add(Violation::Kind::kMultipleOutgoing, "multiple outgoing in tree mode at AC ",
          ar.head);
    }
  }
  return out;
}

}  // namespace internal

// Returns every violated invariant; an empty report means the structure is
// valid under the schema.
inline ValidationReport ValidateStructure(const ArgStructure &s,
                                          const Schema &schema) {
  return internal::CheckStructure(s, &schema);
}

inline bool HasViolation(const ValidationReport &report, Violation::Kind kind) {
  return std::any_of(report.begin(), report.end(),
                     [&](const Violation &v) { return v.kind == kind; });
}

// Sorts ACs by position, remaps relation endpoints accordingly and sorts the
// relations by (head, tail). Idempotent.
inline ArgStructure Canonicalize(const ArgStructure &s) {
  const int num_acs = static_cast<int>(s.acs.size());
  std::vector<int> order(num_acs);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::pair(s.acs[a].start, s.acs[a].end) <
           std::pair(s.acs[b].start, s.acs[b].end);
  });
  std::vector<int> new_index(num_acs);
  ArgStructure out;
  out.paragraph = s.paragraph;
  for (int i = 0; i < num_acs; ++i) {
    new_index[order[i]] = i;
    out.acs.push_back(s.acs[order[i]]);
  }
  for (int i = 1; i < num_acs; ++i) {
    if (out.acs[i - 1].Overlaps(out.acs[i])) {
      Fail(ErrorCode::kInvalidStructure, "cannot canonicalize '", s.paragraph.id,
           "': overlapping spans at token ", out.acs[i].start);
    }
  }
  for (const ArgRelation &ar : s.ars) {
    if (ar.head < 0 || ar.head >= num_acs || ar.tail < 0 || ar.tail >= num_acs) {
      Fail(ErrorCode::kInvalidStructure, "cannot canonicalize '", s.paragraph.id,
           "': relation references a missing AC");
    }
    out.ars.push_back({new_index[ar.head], new_index[ar.tail], ar.type});
  }
  std::stable_sort(out.ars.begin(), out.ars.end());
  return out;
}

}  // namespace aasp
