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

// Exact-match micro scores for span identification (ACI), span typing (ACC),
// relation identification (ARI) and relation typing (ARC), and breakdowns of
// those scores by paragraph length, AC type and relation distance.

#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "aasp/corpus.hpp"
#include "aasp/error.hpp"
#include "aasp/structure.hpp"

namespace aasp {

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn); }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
  }
  Counts &operator+=(const Counts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts &) const = default;
};

enum class Task { kAci, kAcc, kAri, kArc };
inline constexpr std::array<Task, 4> kAllTasks = {Task::kAci, Task::kAcc, Task::kAri, Task::kArc};

inline const char *TaskName(Task t) {
  switch (t) {
    case Task::kAci: return "ACI";
    case Task::kAcc: return "ACC";
    case Task::kAri: return "ARI";
    case Task::kArc: return "ARC";
  }
  return "?";
}

struct TaskScores {
  std::array<Counts, 4> counts{};

  const Counts &operator[](Task t) const { return counts[static_cast<int>(t)]; }
  Counts &operator[](Task t) { return counts[static_cast<int>(t)]; }
  double avg() const {
    double s = 0;
    for (const Counts &c : counts) s += c.f1();
    return s / 4.0;
  }
  bool operator==(const TaskScores &) const = default;
};

using SpanKey = std::pair<int, int>;
using TypedSpanKey = std::tuple<int, int, std::string>;
using RelationKey = std::pair<SpanKey, SpanKey>;  // (head span, tail span)
using TypedRelationKey = std::tuple<SpanKey, SpanKey, std::string>;

namespace internal {

template <typename T>
Counts SetCounts(const std::set<T> &gold, const std::set<T> &pred) {
  Counts c;
  for (const T &g : gold) c.tp += pred.count(g);
  c.fn = static_cast<long>(gold.size()) - c.tp;
  c.fp = static_cast<long>(pred.size()) - c.tp;
  return c;
}

inline SpanKey KeyOf(const AcSpan &ac) { return {ac.start, ac.end}; }

}  // namespace internal

inline std::set<SpanKey> SpanSet(const ArgStructure &s) {
  std::set<SpanKey> out;
  for (const auto &ac : s.acs) out.insert(internal::KeyOf(ac));
  return out;
}

inline std::set<TypedSpanKey> TypedSpanSet(const ArgStructure &s) {
  std::set<TypedSpanKey> out;
  for (const auto &ac : s.acs) out.insert({ac.start, ac.end, ac.type});
  return out;
}

inline std::set<RelationKey> RelationSet(const ArgStructure &s) {
  std::set<RelationKey> out;
  for (const auto &ar : s.ars) {
    out.insert({internal::KeyOf(s.acs.at(ar.head)), internal::KeyOf(s.acs.at(ar.tail))});
  }
  return out;
}

inline std::set<TypedRelationKey> TypedRelationSet(const ArgStructure &s) {
  std::set<TypedRelationKey> out;
  for (const auto &ar : s.ars) {
    out.insert({internal::KeyOf(s.acs.at(ar.head)), internal::KeyOf(s.acs.at(ar.tail)), ar.type});
  }
  return out;
}

inline TaskScores EvalParagraph(const ArgStructure &gold, const ArgStructure &pred) {
  TaskScores t;
  t[Task::kAci] = internal::SetCounts(SpanSet(gold), SpanSet(pred));
  t[Task::kAcc] = internal::SetCounts(TypedSpanSet(gold), TypedSpanSet(pred));
  t[Task::kAri] = internal::SetCounts(RelationSet(gold), RelationSet(pred));
  t[Task::kArc] = internal::SetCounts(TypedRelationSet(gold), TypedRelationSet(pred));
  return t;
}

// Pairs each gold structure with the prediction of the same paragraph id.
// Both sides must cover the same ids.
inline std::vector<std::pair<const ArgStructure *, const ArgStructure *>> AlignById(
    const std::vector<ArgStructure> &gold, const std::vector<ArgStructure> &pred) {
  std::map<std::string, const ArgStructure *> by_id;
  for (const auto &p : pred) {
    if (!by_id.emplace(p.paragraph.id, &p).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate predicted paragraph id '", p.paragraph.id, "'");
    }
  }
  if (gold.size() != pred.size()) {
    Fail(ErrorCode::kInvalidArgument, "gold has ", gold.size(), " paragraphs, prediction has ",
         pred.size());
  }
  std::vector<std::pair<const ArgStructure *, const ArgStructure *>> out;
  std::set<std::string> seen;
  for (const auto &g : gold) {
    auto it = by_id.find(g.paragraph.id);
    if (it == by_id.end()) {
      Fail(ErrorCode::kInvalidArgument, "paragraph id '", g.paragraph.id,
           "' missing from prediction");
    }
    if (!seen.insert(g.paragraph.id).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate gold paragraph id '", g.paragraph.id, "'");
    }
    out.push_back({&g, it->second});
  }
  return out;
}

inline TaskScores EvalTasks(const std::vector<ArgStructure> &gold,
                            const std::vector<ArgStructure> &pred) {
  TaskScores total;
  for (const auto &[g, p] : AlignById(gold, pred)) {
    TaskScores t = EvalParagraph(*g, *p);
    for (Task task : kAllTasks) total[task] += t[task];
  }
  return total;
}

// Length buckets are given by ascending lower bounds b0 < b1 < ... and cover
// [b0,b1), [b1,b2), ..., [bk, inf) in gold AC count. Paragraphs below b0 go
// to an extra leading bucket [0, b0) when b0 > 0.
struct Bucket {
  int lower = 0;
  int upper = std::numeric_limits<int>::max();  // exclusive
  int paragraphs = 0;
  Counts counts;

  std::string Label() const {
    if (upper == std::numeric_limits<int>::max()) return std::to_string(lower) + "+";
    if (upper == lower + 1) return std::to_string(lower);
    return std::to_string(lower) + "-" + std::to_string(upper - 1);
  }
};

// Empty buckets are left out of the result.
inline std::vector<Bucket> LengthBreakdown(const std::vector<ArgStructure> &gold,
                                           const std::vector<ArgStructure> &pred,
                                           std::vector<int> lower_bounds) {
  if (lower_bounds.empty()) lower_bounds = {0};
  for (size_t i = 1; i < lower_bounds.size(); ++i) {
    if (lower_bounds[i] <= lower_bounds[i - 1]) {
      Fail(ErrorCode::kInvalidArgument, "bucket bounds must be strictly increasing");
    }
  }
  if (lower_bounds.front() < 0) Fail(ErrorCode::kInvalidArgument, "bucket bounds must be >= 0");
  if (lower_bounds.front() > 0) lower_bounds.insert(lower_bounds.begin(), 0);
  std::vector<Bucket> buckets;
  for (size_t i = 0; i < lower_bounds.size(); ++i) {
    Bucket b;
    b.lower = lower_bounds[i];
    if (i + 1 < lower_bounds.size()) b.upper = lower_bounds[i + 1];
    buckets.push_back(b);
  }
  for (const auto &[g, p] : AlignById(gold, pred)) {
    const int n = static_cast<int>(g->acs.size());
    for (Bucket &b : buckets) {
      if (n >= b.lower && n < b.upper) {
        ++b.paragraphs;
        b.counts += EvalParagraph(*g, *p)[Task::kAci];
        break;
      }
    }
  }
  std::vector<Bucket> out;
  for (const Bucket &b : buckets) {
    if (b.paragraphs > 0) out.push_back(b);
  }
  return out;
}

// Per AC type, exact (span, type) matching. Labels absent on both sides are
// omitted.
inline std::map<std::string, Counts> CategoryBreakdown(const std::vector<ArgStructure> &gold,
                                                       const std::vector<ArgStructure> &pred) {
  std::map<std::string, Counts> out;
  for (const auto &[g, p] : AlignById(gold, pred)) {
    std::set<TypedSpanKey> gs = TypedSpanSet(*g), ps = TypedSpanSet(*p);
    for (const auto &k : gs) {
      if (ps.count(k)) {
        ++out[std::get<2>(k)].tp;
      } else {
        ++out[std::get<2>(k)].fn;
      }
    }
    for (const auto &k : ps) {
      if (!gs.count(k)) ++out[std::get<2>(k)].fp;
    }
  }
  return out;
}

// Number of ACs strictly between the endpoints, in the structure's own AC
// order.
inline int RelationDistance(const ArgRelation &ar) {
  return std::abs(ar.head - ar.tail) - 1;
}

// ARI counts per distance. Gold relations (TP and FN) are bucketed by their
// gold distance; unmatched predicted relations (FP) by their predicted
// distance.
inline std::map<int, Counts> DistanceBreakdown(const std::vector<ArgStructure> &gold,
                                               const std::vector<ArgStructure> &pred) {
  std::map<int, Counts> out;
  for (const auto &[g, p] : AlignById(gold, pred)) {
    std::set<RelationKey> gs = RelationSet(*g), ps = RelationSet(*p);
    for (const auto &ar : g->ars) {
      RelationKey k{internal::KeyOf(g->acs[ar.head]), internal::KeyOf(g->acs[ar.tail])};
      if (ps.count(k)) {
        ++out[RelationDistance(ar)].tp;
      } else {
        ++out[RelationDistance(ar)].fn;
      }
    }
    for (const auto &ar : p->ars) {
      RelationKey k{internal::KeyOf(p->acs[ar.head]), internal::KeyOf(p->acs[ar.tail])};
      if (!gs.count(k)) ++out[RelationDistance(ar)].fp;
    }
  }
  return out;
}

inline Json CountsToJson(const Counts &c) {
  return Json{{"tp", c.tp},          {"fp", c.fp},       {"fn", c.fn},
              {"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()}};
}

inline Json TaskScoresToJson(const TaskScores &t) {
  Json j;
  for (Task task : kAllTasks) j[TaskName(task)] = CountsToJson(t[task]);
  j["AVG"] = t.avg();
  return j;
}

namespace internal {

inline std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Left-aligned first column, right-aligned rest.
inline std::string RenderTable(const std::vector<std::string> &header,
                               const std::vector<std::vector<std::string>> &rows) {
  std::vector<size_t> width(header.size());
  for (size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto &r : rows) {
    for (size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string> &cells) {
    std::string out;
    for (size_t c = 0; c < cells.size(); ++c) {
      const std::string pad(width[c] - cells[c].size(), ' ');
      if (c > 0) out += "  ";
      out += c == 0 ? cells[c] + pad : pad + cells[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  size_t total = 0;
  for (size_t w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto &r : rows) out += line(r);
  return out;
}

inline std::vector<std::string> CountsRow(const std::string &label, const Counts &c) {
  return {label,          std::to_string(c.tp),  std::to_string(c.fp), std::to_string(c.fn),
          Fixed(c.precision()), Fixed(c.recall()), Fixed(c.f1())};
}

inline const std::vector<std::string> kCountsHeader = {"", "TP", "FP", "FN", "P", "R", "F1"};

}  // namespace internal

inline std::string TaskScoresTable(const TaskScores &t) {
  std::vector<std::vector<std::string>> rows;
  for (Task task : kAllTasks) rows.push_back(internal::CountsRow(TaskName(task), t[task]));
  rows.push_back({"AVG", "", "", "", "", "", internal::Fixed(t.avg())});
  std::vector<std::string> header = internal::kCountsHeader;
  header[0] = "task";
  return internal::RenderTable(header, rows);
}

inline Json BucketsToJson(const std::vector<Bucket> &buckets) {
  Json j = Json::array();
  for (const Bucket &b : buckets) {
    Json item = CountsToJson(b.counts);
    item["bucket"] = b.Label();
    item["lower"] = b.lower;
    if (b.upper != std::numeric_limits<int>::max()) item["upper"] = b.upper;
    item["paragraphs"] = b.paragraphs;
    j.push_back(item);
  }
  return j;
}

template <typename Key>
Json CountsMapToJson(const std::map<Key, Counts> &m) {
  Json j = Json::object();
  for (const auto &[k, c] : m) {
    if constexpr (std::is_same_v<Key, std::string>) {
      j[k] = CountsToJson(c);
    } else {
      j[std::to_string(k)] = CountsToJson(c);
    }
  }
  return j;
}

template <typename Key>
std::string CountsMapTable(const std::map<Key, Counts> &m, const std::string &key_name) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &[k, c] : m) {
    if constexpr (std::is_same_v<Key, std::string>) {
      rows.push_back(internal::CountsRow(k, c));
    } else {
      rows.push_back(internal::CountsRow(std::to_string(k), c));
    }
  }
  std::vector<std::string> header = internal::kCountsHeader;
  header[0] = key_name;
  return internal::RenderTable(header, rows);
}

template <typename Key>
std::string CountsMapCsv(const std::map<Key, Counts> &m, const std::string &key_name) {
  std::string out = key_name + ",tp,fp,fn,precision,recall,f1\n";
  for (const auto &[k, c] : m) {
    std::string key;
    if constexpr (std::is_same_v<Key, std::string>) {
      key = k;
    } else {
      key = std::to_string(k);
    }
    out += key + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," +
           std::to_string(c.fn) + "," + internal::Fixed(c.precision(), 6) + "," +
           internal::Fixed(c.recall(), 6) + "," + internal::Fixed(c.f1(), 6) + "\n";
  }
  return out;
}

inline std::string BucketsTable(const std::vector<Bucket> &buckets) {
  std::vector<std::vector<std::string>> rows;
  for (const Bucket &b : buckets) {
    auto row = internal::CountsRow(b.Label(), b.counts);
    row.insert(row.begin() + 1, std::to_string(b.paragraphs));
    rows.push_back(row);
  }
  std::vector<std::string> header = internal::kCountsHeader;
  header[0] = "gold ACs";
  header.insert(header.begin() + 1, "paragraphs");
  return internal::RenderTable(header, rows);
}

inline std::string BucketsCsv(const std::vector<Bucket> &buckets) {
  std::string out = "bucket,paragraphs,tp,fp,fn,precision,recall,f1\n";
  for (const Bucket &b : buckets) {
    const Counts &c = b.counts;
    out += b.Label() + "," + std::to_string(b.paragraphs) + "," + std::to_string(c.tp) + "," +
           std::to_string(c.fp) + "," + std::to_string(c.fn) + "," +
           internal::Fixed(c.precision(), 6) + "," + internal::Fixed(c.recall(), 6) + "," +
           internal::Fixed(c.f1(), 6) + "\n";
  }
  return out;
}

}  // namespace aasp
