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

// Independent reference implementations used by property and acceptance
// tests. Deliberately naive: nested loops and exhaustive enumeration.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aasp/analysis.hpp"
#include "aasp/eval.hpp"
#include "testing.hpp"

namespace aasp::oracles {

// A prediction near `gold`: spans nudged or dropped, types flipped,
// relations dropped or added. Always a valid structure without overlaps.
inline ArgStructure Perturb(std::mt19937_64 &rng, const ArgStructure &gold, const Schema &schema) {
  using testing::Uniform;
  const int n = gold.paragraph.size();
  std::vector<AcSpan> acs;
  std::vector<int> new_index(gold.acs.size(), -1);
  for (size_t i = 0; i < gold.acs.size(); ++i) {
    AcSpan ac = gold.acs[i];
    if (Uniform(rng, 0, 9) < 2) continue;
    if (Uniform(rng, 0, 9) < 3) {
      ac.start = std::clamp(ac.start + Uniform(rng, -1, 1), 0, n - 1);
      ac.end = std::clamp(ac.end + Uniform(rng, -1, 1), ac.start, n - 1);
    }
    if (Uniform(rng, 0, 9) < 2) ac.type = schema.ac_types[Uniform(rng, 0, schema.num_ac_types() - 1)];
    if (!acs.empty() && acs.back().end >= ac.start) continue;
    new_index[i] = static_cast<int>(acs.size());
    acs.push_back(ac);
  }
  // Occasionally a spurious span in a gap.
  if (Uniform(rng, 0, 2) == 0) {
    int t = Uniform(rng, 0, n - 1);
    bool free = true;
    for (const auto &ac : acs) free = free && (t < ac.start || t > ac.end);
    if (free) acs.push_back({t, t, schema.ac_types[0]});
  }
  ArgStructure pred{gold.paragraph, acs, {}};
  std::set<std::pair<int, int>> used;
  for (const auto &ar : gold.ars) {
    int h = new_index[ar.head], t = new_index[ar.tail];
    if (h < 0 || t < 0 || Uniform(rng, 0, 9) < 2) continue;
    std::string type = Uniform(rng, 0, 9) < 2
                           ? schema.ar_types[Uniform(rng, 0, schema.num_ar_types() - 1)]
                           : ar.type;
    if (used.insert({h, t}).second) pred.ars.push_back({h, t, type});
  }
  const int k = static_cast<int>(pred.acs.size());
  if (k >= 2 && Uniform(rng, 0, 2) == 0) {
    int h = Uniform(rng, 0, k - 1), t = Uniform(rng, 0, k - 1);
    if (h != t && used.insert({h, t}).second) pred.ars.push_back({h, t, schema.ar_types[0]});
  }
  return Canonicalize(pred);
}

inline std::pair<std::vector<ArgStructure>, std::vector<ArgStructure>> RandomPairs(
    std::mt19937_64 &rng, const Schema &schema, int paragraphs) {
  std::vector<ArgStructure> gold, pred;
  for (int i = 0; i < paragraphs; ++i) {
    gold.push_back(testing::RandomStructure(rng, schema, "p" + std::to_string(i)));
    if (testing::Uniform(rng, 0, 4) == 0) {
      ArgStructure other = testing::RandomStructure(rng, schema, "p" + std::to_string(i));
      other.paragraph = gold.back().paragraph;
      other.acs.erase(std::remove_if(other.acs.begin(), other.acs.end(),
                                     [&](const AcSpan &a) { return a.end >= other.paragraph.size(); }),
                      other.acs.end());
      other.ars.clear();
      pred.push_back(other);
    } else {
      pred.push_back(Perturb(rng, gold.back(), schema));
    }
  }
  return {gold, pred};
}

// Exhaustive pairwise comparison per task.
inline TaskScores BruteForceEval(const std::vector<ArgStructure> &gold,
                                 const std::vector<ArgStructure> &pred) {
  TaskScores t;
  for (const ArgStructure &g : gold) {
    const ArgStructure *p = nullptr;
    for (const ArgStructure &q : pred) {
      if (q.paragraph.id == g.paragraph.id) p = &q;
    }
    if (p == nullptr) throw std::runtime_error("missing prediction");
    auto same_span = [](const AcSpan &a, const AcSpan &b) {
      return a.start == b.start && a.end == b.end;
    };
    long aci = 0, acc = 0, ari = 0, arc = 0;
    for (const AcSpan &a : g.acs) {
      for (const AcSpan &b : p->acs) {
        if (same_span(a, b)) {
          ++aci;
          if (a.type == b.type) ++acc;
        }
      }
    }
    for (const ArgRelation &a : g.ars) {
      for (const ArgRelation &b : p->ars) {
        if (same_span(g.acs[a.head], p->acs[b.head]) && same_span(g.acs[a.tail], p->acs[b.tail])) {
          ++ari;
          if (a.type == b.type) ++arc;
        }
      }
    }
    const long ng = static_cast<long>(g.acs.size()), np = static_cast<long>(p->acs.size());
    const long rg = static_cast<long>(g.ars.size()), rp = static_cast<long>(p->ars.size());
    t[Task::kAci] += Counts{aci, np - aci, ng - aci};
    t[Task::kAcc] += Counts{acc, np - acc, ng - acc};
    t[Task::kAri] += Counts{ari, rp - ari, rg - ari};
    t[Task::kArc] += Counts{arc, rp - arc, rg - arc};
  }
  return t;
}

// Random relation digraph over k single-token ACs; reciprocal edges allowed.
inline ArgStructure RandomDigraph(std::mt19937_64 &rng, int k) {
  ArgStructure s;
  s.paragraph = testing::MakeParagraph("g", 2 * k);
  for (int i = 0; i < k; ++i) s.acs.push_back({2 * i, 2 * i, "Fact"});
  const int density = testing::Uniform(rng, 1, 5);
  for (int h = 0; h < k; ++h) {
    for (int t = 0; t < k; ++t) {
      if (h != t && testing::Uniform(rng, 0, 9) < density) s.ars.push_back({h, t, "reason"});
    }
  }
  return s;
}

inline std::vector<std::vector<int>> ChainPaths(const std::vector<Chain> &chains) {
  std::vector<std::vector<int>> out;
  for (const Chain &c : chains) {
    std::vector<int> nodes = {c.front().head};
    for (const auto &ar : c) nodes.push_back(ar.tail);
    out.push_back(nodes);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Every ordering of every node subset of size >= 3, kept when consecutive
// nodes are joined by edges and no outside node extends either end.
inline std::vector<std::vector<int>> BruteForceChains(const ArgStructure &s) {
  const int k = static_cast<int>(s.acs.size());
  std::set<std::pair<int, int>> edges;
  for (const auto &ar : s.ars) edges.insert({ar.head, ar.tail});
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::vector<int> nodes;
    for (int v = 0; v < k; ++v) {
      if (mask >> v & 1) nodes.push_back(v);
    }
    if (nodes.size() < 3) continue;
    do {
      bool ok = true;
      for (size_t i = 0; i + 1 < nodes.size() && ok; ++i) ok = edges.count({nodes[i], nodes[i + 1]}) > 0;
      for (int u = 0; u < k && ok; ++u) {
        if (mask >> u & 1) continue;
        if (edges.count({u, nodes.front()}) || edges.count({nodes.back(), u})) ok = false;
      }
      if (ok) out.push_back(nodes);
    } while (std::next_permutation(nodes.begin(), nodes.end()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Number of ACs whose error assignment is missing, impossible for its side,
// or inconsistent with the reported totals.
inline int UnaccountedSpans(const std::vector<ArgStructure> &gold,
                            const std::vector<ArgStructure> &pred, const ErrorReport &report) {
  int bad = 0;
  long misclassified = 0, missed = 0, false_positive = 0;
  for (const ParagraphErrors &pe : report.paragraphs) {
    const ArgStructure *g = nullptr, *p = nullptr;
    for (const auto &s : gold) {
      if (s.paragraph.id == pe.id) g = &s;
    }
    for (const auto &s : pred) {
      if (s.paragraph.id == pe.id) p = &s;
    }
    if (g == nullptr || p == nullptr) return 1 << 20;
    bad += static_cast<int>(std::max(g->acs.size(), pe.gold.size()) - pe.gold.size());
    bad += static_cast<int>(std::max(p->acs.size(), pe.pred.size()) - pe.pred.size());
    for (size_t i = 0; i < pe.gold.size(); ++i) {
      const SpanOutcome o = pe.gold[i];
      if (o == SpanOutcome::kFalsePositive) ++bad;
      bool has_exact = false;
      for (const auto &b : p->acs) has_exact = has_exact || (b.start == g->acs[i].start && b.end == g->acs[i].end);
      if (has_exact != (o == SpanOutcome::kMatched || o == SpanOutcome::kMisclassified)) ++bad;
      misclassified += o == SpanOutcome::kMisclassified;
      missed += o == SpanOutcome::kMissed;
    }
    for (size_t j = 0; j < pe.pred.size(); ++j) {
      const SpanOutcome o = pe.pred[j];
      if (o == SpanOutcome::kMissed) ++bad;
      false_positive += o == SpanOutcome::kFalsePositive;
      if (o == SpanOutcome::kFalsePositive) {
        for (size_t i = 0; i < g->acs.size(); ++i) {
          // Only spans whose overlapping gold was consumed elsewhere may be
          // false positives while overlapping gold.
          if (g->acs[i].Overlaps(p->acs[j]) && pe.gold[i] == SpanOutcome::kMissed) ++bad;
        }
      }
    }
  }
  if (misclassified != report.totals.ac_misclassification) ++bad;
  if (missed != report.totals.missed) ++bad;
  if (false_positive != report.totals.false_positive) ++bad;
  return bad;
}

}  // namespace aasp::oracles
