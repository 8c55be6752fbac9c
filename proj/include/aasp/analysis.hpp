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

// Structural analyses: relation chains and the span/relation error taxonomy.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aasp/eval.hpp"
#include "aasp/structure.hpp"

namespace aasp {

// A chain is a maximal simple directed path in the relation digraph, listed
// as the relations along the path from its first head to its last tail.
using Chain = std::vector<ArgRelation>;

// All maximal simple paths with at least `min_length` relations. A path is
// maximal when no AC outside it can be prepended (an edge into its first AC)
// or appended (an edge out of its last AC). Sorted by AC index sequence.
inline std::vector<Chain> ExtractChains(const ArgStructure &s, int min_length = 2) {
  const int k = static_cast<int>(s.acs.size());
  std::vector<std::vector<const ArgRelation *>> out_edges(k), in_edges(k);
  for (const ArgRelation &ar : s.ars) {
    out_edges[ar.head].push_back(&ar);
    in_edges[ar.tail].push_back(&ar);
  }
  std::vector<Chain> chains;
  std::vector<bool> on_path(k, false);
  std::vector<int> nodes;
  Chain path;
  auto extendable_at_front = [&] {
    for (const ArgRelation *e : in_edges[nodes.front()]) {
      if (!on_path[e->head]) return true;
    }
    return false;
  };
  auto dfs = [&](auto &&self, int v) -> void {
    bool extended = false;
    for (const ArgRelation *e : out_edges[v]) {
      if (on_path[e->tail]) continue;
      extended = true;
      on_path[e->tail] = true;
      nodes.push_back(e->tail);
      path.push_back(*e);
      self(self, e->tail);
      path.pop_back();
      nodes.pop_back();
      on_path[e->tail] = false;
    }
    if (!extended && static_cast<int>(path.size()) >= min_length && !extendable_at_front()) {
      chains.push_back(path);
    }
  };
  for (int v = 0; v < k; ++v) {
    on_path[v] = true;
    nodes = {v};
    dfs(dfs, v);
    on_path[v] = false;
  }
  std::sort(chains.begin(), chains.end(), [](const Chain &a, const Chain &b) {
    auto key = [](const Chain &c) {
      std::vector<int> ids = {c.front().head};
      for (const auto &ar : c) ids.push_back(ar.tail);
      return ids;
    };
    return key(a) < key(b);
  });
  return chains;
}

struct ChainLengthRow {
  int ground_truth = 0;
  int predicted = 0;
  int correct = 0;

  double accuracy() const { return ground_truth == 0 ? 0.0 : double(correct) / ground_truth; }
  bool operator==(const ChainLengthRow &) const = default;
};

using ChainReport = std::map<int, ChainLengthRow>;  // keyed by chain length

// A gold chain is correct when each of its relations is predicted with the
// same head and tail spans (and the same type when `require_type`).
inline ChainReport BuildChainReport(const std::vector<ArgStructure> &gold,
                                    const std::vector<ArgStructure> &pred,
                                    bool require_type = false) {
  ChainReport report;
  for (const auto &[g, p] : AlignById(gold, pred)) {
    std::set<RelationKey> untyped = RelationSet(*p);
    std::set<TypedRelationKey> typed = TypedRelationSet(*p);
    for (const Chain &chain : ExtractChains(*g)) {
      ChainLengthRow &row = report[static_cast<int>(chain.size())];
      ++row.ground_truth;
      bool ok = true;
      for (const ArgRelation &ar : chain) {
        SpanKey h = internal::KeyOf(g->acs[ar.head]), t = internal::KeyOf(g->acs[ar.tail]);
        ok = ok && (require_type ? typed.count({h, t, ar.type}) > 0 : untyped.count({h, t}) > 0);
      }
      if (ok) ++row.correct;
    }
    for (const Chain &chain : ExtractChains(*p)) ++report[static_cast<int>(chain.size())].predicted;
  }
  return report;
}

inline Json ChainReportToJson(const ChainReport &r) {
  Json j = Json::object();
  for (const auto &[len, row] : r) {
    j[std::to_string(len)] = Json{{"ground_truth", row.ground_truth},
                                  {"predicted", row.predicted},
                                  {"correct", row.correct},
                                  {"accuracy", row.accuracy()}};
  }
  return j;
}

inline std::string ChainReportTable(const ChainReport &r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &[len, row] : r) {
    rows.push_back({std::to_string(len), std::to_string(row.ground_truth),
                    std::to_string(row.predicted), std::to_string(row.correct),
                    internal::Fixed(100.0 * row.accuracy(), 2)});
  }
  return internal::RenderTable({"length", "ground truth", "predicted", "correct", "accuracy %"},
                               rows);
}

// Span-level outcome for each AC on either side.
enum class SpanOutcome {
  kMatched,            // exact span, same type
  kMisclassified,      // exact span, different type
  kMerged,
  kSplit,
  kBoundaryMismatch,
  kMissed,             // gold only
  kFalsePositive,      // predicted only
};

inline const char *SpanOutcomeName(SpanOutcome o) {
  switch (o) {
    case SpanOutcome::kMatched: return "matched";
    case SpanOutcome::kMisclassified: return "ac_misclassification";
    case SpanOutcome::kMerged: return "merged";
    case SpanOutcome::kSplit: return "split";
    case SpanOutcome::kBoundaryMismatch: return "boundary_mismatch";
    case SpanOutcome::kMissed: return "missed";
    case SpanOutcome::kFalsePositive: return "false_positive";
  }
  return "?";
}

struct ErrorCounts {
  long boundary_mismatch = 0;  // one per one-to-one overlapping pair
  long missed = 0;
  long false_positive = 0;
  long ac_misclassification = 0;
  long ar_misclassification = 0;
  long split = 0;   // one per event
  long merged = 0;  // one per event
  long gold_acs = 0;
  long gold_ars = 0;
  long pred_acs = 0;

  ErrorCounts &operator+=(const ErrorCounts &o) {
    boundary_mismatch += o.boundary_mismatch;
    missed += o.missed;
    false_positive += o.false_positive;
    ac_misclassification += o.ac_misclassification;
    ar_misclassification += o.ar_misclassification;
    split += o.split;
    merged += o.merged;
    gold_acs += o.gold_acs;
    gold_ars += o.gold_ars;
    pred_acs += o.pred_acs;
    return *this;
  }
  bool operator==(const ErrorCounts &) const = default;
};

struct ParagraphErrors {
  std::string id;
  std::vector<SpanOutcome> gold;  // one per gold AC
  std::vector<SpanOutcome> pred;  // one per predicted AC
  ErrorCounts counts;
};

// Assignment: (1) exact span matches leave both sides, typed mismatches count
// as AC misclassification; (2) a remaining prediction overlapping two or more
// remaining gold ACs is a merge, then a remaining gold AC overlapped by two or
// more remaining predictions is a split; (3) remaining overlaps, one-to-one by
// now, are boundary mismatches; (4) the rest are missed or false positives.
// Relations with matching endpoint spans but different types count as AR
// misclassification.
inline ParagraphErrors ClassifyErrors(const ArgStructure &gold, const ArgStructure &pred) {
  ParagraphErrors r;
  r.id = gold.paragraph.id;
  const int ng = static_cast<int>(gold.acs.size()), np = static_cast<int>(pred.acs.size());
  std::vector<int> g_state(ng, -1), p_state(np, -1);  // -1: unassigned
  auto set_g = [&](int i, SpanOutcome o) { g_state[i] = static_cast<int>(o); };
  auto set_p = [&](int i, SpanOutcome o) { p_state[i] = static_cast<int>(o); };
  r.counts.gold_acs = ng;
  r.counts.pred_acs = np;
  r.counts.gold_ars = static_cast<long>(gold.ars.size());

  for (int i = 0; i < ng; ++i) {
    for (int j = 0; j < np; ++j) {
      if (p_state[j] >= 0) continue;
      if (gold.acs[i].start == pred.acs[j].start && gold.acs[i].end == pred.acs[j].end) {
        const SpanOutcome o = gold.acs[i].type == pred.acs[j].type ? SpanOutcome::kMatched
                                                                   : SpanOutcome::kMisclassified;
        if (o == SpanOutcome::kMisclassified) ++r.counts.ac_misclassification;
        set_g(i, o);
        set_p(j, o);
        break;
      }
    }
  }
  auto overlapping_gold = [&](int j) {
    std::vector<int> out;
    for (int i = 0; i < ng; ++i) {
      if (g_state[i] < 0 && gold.acs[i].Overlaps(pred.acs[j])) out.push_back(i);
    }
    return out;
  };
  auto overlapping_pred = [&](int i) {
    std::vector<int> out;
    for (int j = 0; j < np; ++j) {
      if (p_state[j] < 0 && pred.acs[j].Overlaps(gold.acs[i])) out.push_back(j);
    }
    return out;
  };
  for (int j = 0; j < np; ++j) {
    if (p_state[j] >= 0) continue;
    std::vector<int> hit = overlapping_gold(j);
    if (hit.size() < 2) continue;
    ++r.counts.merged;
    set_p(j, SpanOutcome::kMerged);
    for (int i : hit) set_g(i, SpanOutcome::kMerged);
  }
  for (int i = 0; i < ng; ++i) {
    if (g_state[i] >= 0) continue;
    std::vector<int> hit = overlapping_pred(i);
    if (hit.size() < 2) continue;
    ++r.counts.split;
    set_g(i, SpanOutcome::kSplit);
    for (int j : hit) set_p(j, SpanOutcome::kSplit);
  }
  for (int i = 0; i < ng; ++i) {
    if (g_state[i] >= 0) continue;
    std::vector<int> hit = overlapping_pred(i);
    if (hit.empty()) continue;
    ++r.counts.boundary_mismatch;
    set_g(i, SpanOutcome::kBoundaryMismatch);
    set_p(hit.front(), SpanOutcome::kBoundaryMismatch);
  }
  for (int i = 0; i < ng; ++i) {
    if (g_state[i] < 0) {
      ++r.counts.missed;
      set_g(i, SpanOutcome::kMissed);
    }
  }
  for (int j = 0; j < np; ++j) {
    if (p_state[j] < 0) {
      ++r.counts.false_positive;
      set_p(j, SpanOutcome::kFalsePositive);
    }
  }
  for (int s : g_state) r.gold.push_back(static_cast<SpanOutcome>(s));
  for (int s : p_state) r.pred.push_back(static_cast<SpanOutcome>(s));

  std::map<RelationKey, std::string> pred_types;
  for (const ArgRelation &ar : pred.ars) {
    pred_types[{internal::KeyOf(pred.acs[ar.head]), internal::KeyOf(pred.acs[ar.tail])}] = ar.type;
  }
  for (const ArgRelation &ar : gold.ars) {
    auto it = pred_types.find({internal::KeyOf(gold.acs[ar.head]), internal::KeyOf(gold.acs[ar.tail])});
    if (it != pred_types.end() && it->second != ar.type) ++r.counts.ar_misclassification;
  }
  return r;
}

struct ErrorReport {
  ErrorCounts totals;
  std::vector<ParagraphErrors> paragraphs;
};

inline ErrorReport BuildErrorReport(const std::vector<ArgStructure> &gold,
                                    const std::vector<ArgStructure> &pred) {
  ErrorReport report;
  for (const auto &[g, p] : AlignById(gold, pred)) {
    report.paragraphs.push_back(ClassifyErrors(*g, *p));
    report.totals += report.paragraphs.back().counts;
  }
  return report;
}

namespace internal {

inline double Percent(long n, long d) { return d == 0 ? 0.0 : 100.0 * double(n) / double(d); }

inline std::vector<std::pair<std::string, long>> AcCategories(const ErrorCounts &c) {
  return {{"AC Boundary Mismatches", c.boundary_mismatch},
          {"Missed ACs", c.missed},
          {"False Positive ACs", c.false_positive},
          {"AC Misclassifications", c.ac_misclassification},
          {"Split ACs", c.split},
          {"Merged ACs", c.merged}};
}

}  // namespace internal

// Percentages: AC categories over gold ACs, AR misclassification over gold ARs.
inline Json ErrorReportToJson(const ErrorReport &r) {
  const ErrorCounts &c = r.totals;
  Json j;
  j["gold_acs"] = c.gold_acs;
  j["pred_acs"] = c.pred_acs;
  j["gold_ars"] = c.gold_ars;
  Json cats = Json::object();
  auto put = [&](const std::string &key, long n, long denom) {
    cats[key] = Json{{"count", n}, {"percent", internal::Percent(n, denom)}};
  };
  put("boundary_mismatch", c.boundary_mismatch, c.gold_acs);
  put("missed", c.missed, c.gold_acs);
  put("false_positive", c.false_positive, c.gold_acs);
  put("ac_misclassification", c.ac_misclassification, c.gold_acs);
  put("split", c.split, c.gold_acs);
  put("merged", c.merged, c.gold_acs);
  put("ar_misclassification", c.ar_misclassification, c.gold_ars);
  j["categories"] = cats;
  return j;
}

inline std::string ErrorReportTable(const ErrorReport &r) {
  const ErrorCounts &c = r.totals;
  std::vector<std::vector<std::string>> rows;
  for (const auto &[name, n] : internal::AcCategories(c)) {
    rows.push_back({name, std::to_string(n), internal::Fixed(internal::Percent(n, c.gold_acs), 2)});
  }
  rows.push_back({"AR Misclassifications", std::to_string(c.ar_misclassification),
                  internal::Fixed(internal::Percent(c.ar_misclassification, c.gold_ars), 2)});
  return internal::RenderTable({"category", "count", "%"}, rows) +
         "gold ACs: " + std::to_string(c.gold_acs) + ", predicted ACs: " +
         std::to_string(c.pred_acs) + ", gold ARs: " + std::to_string(c.gold_ars) + "\n";
}

}  // namespace aasp
