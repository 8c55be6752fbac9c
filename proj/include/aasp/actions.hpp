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

// Action sequences: the left-to-right encoding of an argumentative structure
// as span-identifying steps (copy a token, open a mention, close a mention),
// where each close names the open it pairs with and carries the AC type plus
// backward links to earlier closes that encode the relations.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aasp/error.hpp"
#include "aasp/structure.hpp"

namespace aasp {

enum class ActionKind { kCopy, kOpen, kClose };

// Which endpoint of a link is the relation head. Links always point from a
// close back to an earlier close (the antecedent).
enum class Direction { kHeadIsCurrent, kHeadIsAntecedent };

inline const char *DirectionName(Direction d) {
  return d == Direction::kHeadIsCurrent ? "cur" : "ante";
}

inline Direction ParseDirection(const std::string &name) {
  if (name == "cur") return Direction::kHeadIsCurrent;
  if (name == "ante") return Direction::kHeadIsAntecedent;
  Fail(ErrorCode::kParse, "unknown link direction '", name, "'");
}

struct Link {
  int antecedent = -1;  // step index of an earlier close
  std::string ar_type;
  Direction direction = Direction::kHeadIsCurrent;

  auto operator<=>(const Link &) const = default;
};

struct ActionStep {
  ActionKind kind = ActionKind::kCopy;
  int boundary = -1;  // close only: step index of the paired open
  std::string ac_type;
  std::vector<Link> links;

  static ActionStep Copy() { return {}; }
  static ActionStep Open() { return {ActionKind::kOpen, -1, {}, {}}; }
  static ActionStep Close(int boundary, std::string ac_type,
                          std::vector<Link> links = {}) {
    return {ActionKind::kClose, boundary, std::move(ac_type), std::move(links)};
  }

  bool is_copy() const { return kind == ActionKind::kCopy; }
  bool is_open() const { return kind == ActionKind::kOpen; }
  bool is_close() const { return kind == ActionKind::kClose; }

  bool operator==(const ActionStep &) const = default;
};

struct ActionSequence {
  std::string paragraph_id;
  std::vector<ActionStep> steps;

  int size() const { return static_cast<int>(steps.size()); }
  bool operator==(const ActionSequence &) const = default;
};

enum class LinearizeMode { kMultiLink, kSingleLink };

inline const char *LinearizeModeName(LinearizeMode mode) {
  return mode == LinearizeMode::kMultiLink ? "multi_link" : "single_link";
}

inline LinearizeMode ParseLinearizeMode(const std::string &name) {
  if (name == "multi_link") return LinearizeMode::kMultiLink;
  if (name == "single_link") return LinearizeMode::kSingleLink;
  Fail(ErrorCode::kInvalidArgument, "unknown linearize mode '", name,
       "' (expected multi_link or single_link)");
}

// Links on one close are kept ordered by antecedent, then direction.
inline void SortLinks(std::vector<Link> *links) {
  std::stable_sort(links->begin(), links->end(), [](const Link &a, const Link &b) {
    return std::pair(a.antecedent, a.direction) < std::pair(b.antecedent, b.direction);
  });
}

struct Linearization {
  ActionSequence sequence;
  // Relations that could not be encoded (single_link mode only).
  std::vector<ArgRelation> dropped;
};

// Encodes a canonical structure. Every relation becomes a link on the close of
// whichever endpoint closes later, pointing at the other endpoint's close.
inline Linearization Linearize(const ArgStructure &s, LinearizeMode mode) {
  ValidationReport problems = internal::CheckStructure(s, nullptr);
  for (const Violation &v : problems) {
    if (v.kind != Violation::Kind::kBadToken) {
      Fail(ErrorCode::kInvalidStructure, "cannot linearize non-canonical '",
           s.paragraph.id, "': ", v.message);
    }
  }
  const int num_acs = static_cast<int>(s.acs.size());
  std::vector<std::vector<int>> emitted_at(num_acs);  // relation ids per AC
  for (int r = 0; r < static_cast<int>(s.ars.size()); ++r) {
    emitted_at[std::max(s.ars[r].head, s.ars[r].tail)].push_back(r);
  }

  Linearization out;
  out.sequence.paragraph_id = s.paragraph.id;
  auto &steps = out.sequence.steps;
  std::vector<int> open_step(num_acs, -1), close_step(num_acs, -1);
  int next_ac = 0;
  for (int t = 0; t < s.paragraph.size(); ++t) {
    if (next_ac < num_acs && s.acs[next_ac].start == t) {
      open_step[next_ac] = static_cast<int>(steps.size());
      steps.push_back(ActionStep::Open());
    }
    steps.push_back(ActionStep::Copy());
    if (next_ac < num_acs && s.acs[next_ac].end == t) {
      const int ac = next_ac++;
      std::vector<std::pair<Link, int>> links;  // link, relation id
      for (int r : emitted_at[ac]) {
        const ArgRelation &ar = s.ars[r];
        const bool head_is_current = ar.head == ac;
        const int other = head_is_current ? ar.tail : ar.head;
        links.push_back({{close_step[other], ar.type,
                          head_is_current ? Direction::kHeadIsCurrent
                                          : Direction::kHeadIsAntecedent},
                         r});
      }
      std::stable_sort(links.begin(), links.end(), [](const auto &a, const auto &b) {
        return std::pair(a.first.antecedent, a.first.direction) <
               std::pair(b.first.antecedent, b.first.direction);
      });
      if (mode == LinearizeMode::kSingleLink && links.size() > 1) {
        // Keep the nearest antecedent; ties resolve to the first in link order.
        size_t keep = 0;
        for (size_t i = 1; i < links.size(); ++i) {
          if (links[i].first.antecedent > links[keep].first.antecedent) keep = i;
        }
        for (size_t i = 0; i < links.size(); ++i) {
          if (i != keep) out.dropped.push_back(s.ars[links[i].second]);
        }
        links = {links[keep]};
      }
      close_step[ac] = static_cast<int>(steps.size());
      std::vector<Link> step_links;
      for (auto &[link, r] : links) step_links.push_back(link);
      steps.push_back(ActionStep::Close(open_step[ac], s.acs[ac].type,
                                        std::move(step_links)));
    }
  }
  std::sort(out.dropped.begin(), out.dropped.end());
  return out;
}

enum class Symbol { kOpen, kClose, kToken };

struct BoundaryPairing {
  std::vector<std::pair<int, int>> pairs;  // (open position, close position)
  std::vector<int> removed;                // unpaired open/close positions
};

// Scans left to right and pairs each close with the leftmost open that is
// still unmatched. Closes without an available open and opens left over at the
// end are removed.
inline BoundaryPairing PairBoundaries(const std::vector<Symbol> &symbols) {
  BoundaryPairing out;
  std::vector<int> unmatched;  // ascending positions
  for (int i = 0; i < static_cast<int>(symbols.size()); ++i) {
    switch (symbols[i]) {
      case Symbol::kOpen:
        unmatched.push_back(i);
        break;
      case Symbol::kClose:
        if (unmatched.empty()) {
          out.removed.push_back(i);
        } else {
          out.pairs.push_back({unmatched.front(), i});
          unmatched.erase(unmatched.begin());
        }
        break;
      case Symbol::kToken:
        break;
    }
  }
  out.removed.insert(out.removed.end(), unmatched.begin(), unmatched.end());
  std::sort(out.removed.begin(), out.removed.end());
  return out;
}

struct Repair {
  enum class Kind {
    kUnmatchedOpen,
    kUnmatchedClose,
    kBoundaryReassigned,
    kEmptySpan,
    kOverlappingSpan,
    kUnknownAcType,
    kOrphanLink,
    kUnknownArType,
    kDuplicateRelation,
    kTreeViolation,
    kExtraCopy,
    kMissingTokens,
  };
  Kind kind;
  int step = -1;
  std::string detail;
};

inline const char *RepairKindName(Repair::Kind kind) {
  switch (kind) {
    case Repair::Kind::kUnmatchedOpen: return "unmatched_open";
    case Repair::Kind::kUnmatchedClose: return "unmatched_close";
    case Repair::Kind::kBoundaryReassigned: return "boundary_reassigned";
    case Repair::Kind::kEmptySpan: return "empty_span";
    case Repair::Kind::kOverlappingSpan: return "overlapping_span";
    case Repair::Kind::kUnknownAcType: return "unknown_ac_type";
    case Repair::Kind::kOrphanLink: return "orphan_link";
    case Repair::Kind::kUnknownArType: return "unknown_ar_type";
    case Repair::Kind::kDuplicateRelation: return "duplicate_relation";
    case Repair::Kind::kTreeViolation: return "tree_violation";
    case Repair::Kind::kExtraCopy: return "extra_copy";
    case Repair::Kind::kMissingTokens: return "missing_tokens";
  }
  return "unknown";
}

struct Delinearization {
  ArgStructure structure;
  std::vector<Repair> repairs;
};

// Decodes an action sequence against its paragraph. Malformed input never
// fails: boundaries are re-paired with PairBoundaries, then empty or
// overlapping spans are dropped, then links whose antecedent did not survive
// are dropped; each removal is logged. With a schema, unknown labels and
// tree-mode violations are repaired as well.
inline Delinearization Delinearize(const ActionSequence &seq, const Paragraph &p,
                                   const Schema *schema = nullptr) {
  Delinearization out;
  auto log = [&](Repair::Kind kind, int step, auto &&...parts) {
    out.repairs.push_back({kind, step, internal::StrCat(parts...)});
  };
  const int n = p.size();
  const int num_steps = seq.size();

  // Tokens copied before each step.
  std::vector<int> cursor_before(num_steps + 1, 0);
  std::vector<Symbol> symbols(num_steps);
  int cursor = 0;
  for (int i = 0; i < num_steps; ++i) {
    cursor_before[i] = cursor;
    const ActionStep &step = seq.steps[i];
    symbols[i] = step.is_open() ? Symbol::kOpen
                 : step.is_close() ? Symbol::kClose
                                   : Symbol::kToken;
    if (step.is_copy()) {
      if (cursor < n) {
        ++cursor;
      } else {
        log(Repair::Kind::kExtraCopy, i, "copy past end of paragraph ignored");
      }
    }
  }
  cursor_before[num_steps] = cursor;
  if (cursor < n) {
    log(Repair::Kind::kMissingTokens, num_steps, "sequence copied ", cursor,
        " of ", n, " tokens");
  }

  BoundaryPairing pairing = PairBoundaries(symbols);
  for (int pos : pairing.removed) {
    if (symbols[pos] == Symbol::kOpen) {
      log(Repair::Kind::kUnmatchedOpen, pos, "unmatched open removed");
    } else {
      log(Repair::Kind::kUnmatchedClose, pos, "unmatched close removed");
    }
  }
  std::sort(pairing.pairs.begin(), pairing.pairs.end(),
            [](const auto &a, const auto &b) { return a.second < b.second; });

  // Surviving mentions in close order.
  std::map<int, int> ac_of_close;  // close step -> index into acs
  std::vector<int> close_of_ac;
  for (const auto &[open, close] : pairing.pairs) {
    const ActionStep &step = seq.steps[close];
    if (step.boundary != open) {
      log(Repair::Kind::kBoundaryReassigned, close, "boundary ", step.boundary,
          " re-paired to open ", open);
    }
    const int start = cursor_before[open];
    const int end = cursor_before[close] - 1;
    if (end < start) {
      log(Repair::Kind::kEmptySpan, close, "span without tokens dropped");
      continue;
    }
    if (schema != nullptr && schema->AcIndex(step.ac_type) < 0) {
      log(Repair::Kind::kUnknownAcType, close, "unknown AC type '", step.ac_type,
          "' dropped");
      continue;
    }
    AcSpan span{start, end, step.ac_type};
    bool overlaps = std::any_of(out.structure.acs.begin(), out.structure.acs.end(),
                                [&](const AcSpan &kept) { return kept.Overlaps(span); });
    if (overlaps) {
      log(Repair::Kind::kOverlappingSpan, close, "span (", start, ",", end,
          ") overlaps an earlier span and was dropped");
      continue;
    }
    ac_of_close[close] = static_cast<int>(out.structure.acs.size());
    close_of_ac.push_back(close);
    out.structure.acs.push_back(std::move(span));
  }

  std::set<std::pair<int, int>> pairs;
  std::vector<int> outgoing(out.structure.acs.size(), 0);
  const bool tree = schema != nullptr && schema->mode == StructureMode::kTree;
  for (int ac = 0; ac < static_cast<int>(close_of_ac.size()); ++ac) {
    const int close = close_of_ac[ac];
    for (const Link &link : seq.steps[close].links) {
      auto it = ac_of_close.find(link.antecedent);
      if (link.antecedent >= close || it == ac_of_close.end()) {
        log(Repair::Kind::kOrphanLink, close, "link to step ", link.antecedent,
            " has no surviving antecedent");
        continue;
      }
      if (schema != nullptr && schema->ArIndex(link.ar_type) < 0) {
        log(Repair::Kind::kUnknownArType, close, "unknown AR type '",
            link.ar_type, "' dropped");
        continue;
      }
      const int other = it->second;
      ArgRelation ar = link.direction == Direction::kHeadIsCurrent
                           ? ArgRelation{ac, other, link.ar_type}
                           : ArgRelation{other, ac, link.ar_type};
      if (pairs.count({ar.head, ar.tail}) != 0) {
        log(Repair::Kind::kDuplicateRelation, close, "duplicate relation (",
            ar.head, ",", ar.tail, ") dropped");
        continue;
      }
      if (tree && outgoing[ar.head] > 0) {
        log(Repair::Kind::kTreeViolation, close, "AC ", ar.head,
            " already heads a relation");
        continue;
      }
      pairs.insert({ar.head, ar.tail});
      ++outgoing[ar.head];
      out.structure.ars.push_back(std::move(ar));
    }
  }
  out.structure.paragraph = p;
  out.structure = Canonicalize(out.structure);
  return out;
}

// Well-formedness problems of a gold sequence; empty when well formed.
inline std::vector<std::string> CheckWellFormed(const ActionSequence &seq,
                                                const Paragraph &p) {
  std::vector<std::string> problems;
  int copies = 0;
  std::vector<int> unmatched;
  std::map<int, int> copies_at_open;
  std::set<int> closes;
  for (int i = 0; i < seq.size(); ++i) {
    const ActionStep &step = seq.steps[i];
    switch (step.kind) {
      case ActionKind::kCopy:
        ++copies;
        break;
      case ActionKind::kOpen:
        unmatched.push_back(i);
        copies_at_open[i] = copies;
        break;
      case ActionKind::kClose:
        if (unmatched.empty()) {
          problems.push_back(internal::StrCat("close at ", i, " has no open"));
          break;
        }
        if (step.boundary != unmatched.front()) {
          problems.push_back(internal::StrCat("close at ", i, " names boundary ",
                                              step.boundary, ", leftmost open is ",
                                              unmatched.front()));
        }
        if (copies_at_open[unmatched.front()] == copies) {
          problems.push_back(internal::StrCat("empty span closed at ", i));
        }
        unmatched.erase(unmatched.begin());
        for (const Link &link : step.links) {
          if (closes.count(link.antecedent) == 0) {
            problems.push_back(internal::StrCat("link at ", i, " to ",
                                                link.antecedent,
                                                " is not an earlier close"));
          }
        }
        closes.insert(i);
        break;
    }
  }
  if (copies != p.size()) {
    problems.push_back(internal::StrCat(copies, " copies for ", p.size(), " tokens"));
  }
  if (!unmatched.empty()) problems.push_back("sequence ends with unmatched opens");
  return problems;
}

// Debug rendering: tokens verbatim, <m> and </m> inline, and each close
// annotated as [type|link→k:artype:dir] with one link group per link.
inline std::string RenderTrace(const ActionSequence &seq, const Paragraph &p) {
  std::string out;
  int cursor = 0;
  auto append = [&](const std::string &piece) {
    if (!out.empty()) out += ' ';
    out += piece;
  };
  for (const ActionStep &step : seq.steps) {
    switch (step.kind) {
      case ActionKind::kCopy:
        append(cursor < p.size() ? p.tokens[cursor] : std::string("<eos>"));
        ++cursor;
        break;
      case ActionKind::kOpen:
        append("<m>");
        break;
      case ActionKind::kClose: {
        std::string label = "</m>[" + step.ac_type;
        for (const Link &link : step.links) {
          label += internal::StrCat("|link→", link.antecedent, ":", link.ar_type,
                                    ":", DirectionName(link.direction));
        }
        append(label + "]");
        break;
      }
    }
  }
  return out;
}

}  // namespace aasp
