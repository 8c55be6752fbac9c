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

// Decoder state machine. The state is a pure fold over the executed steps and
// determines the dynamic set of legal next actions.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "aasp/actions.hpp"
#include "aasp/error.hpp"
#include "aasp/structure.hpp"

namespace aasp {

struct OpenRecord {
  int step = -1;
  int token_start = 0;  // cursor when the open was executed

  bool operator==(const OpenRecord &) const = default;
};

// A closed mention, registered when its close step executes.
struct MentionRecord {
  int step = -1;
  int boundary = -1;
  int start = 0;
  int end = 0;
  int ac_type = -1;
  int outgoing = 0;

  bool operator==(const MentionRecord &) const = default;
};

struct DecoderState {
  int token_count = 0;
  int max_open = 1;
  int cursor = 0;
  std::vector<OpenRecord> opens;        // unmatched, in step order
  std::vector<MentionRecord> mentions;  // in close order
  std::vector<ActionStep> history;

  int step_count() const { return static_cast<int>(history.size()); }
  bool tokens_remain() const { return cursor < token_count; }
  bool terminal() const { return !tokens_remain() && opens.empty(); }

  int MentionAtStep(int step) const {
    for (int m = 0; m < static_cast<int>(mentions.size()); ++m) {
      if (mentions[m].step == step) return m;
    }
    return -1;
  }

  bool operator==(const DecoderState &) const = default;
};

inline DecoderState InitialState(int token_count, int max_open = 1) {
  if (max_open < 1) Fail(ErrorCode::kInvalidArgument, "max_open must be >= 1");
  DecoderState state;
  state.token_count = token_count;
  state.max_open = max_open;
  return state;
}

struct LinkOption {
  int mention = -1;  // index into DecoderState::mentions
  int ar_type = -1;
  Direction direction = Direction::kHeadIsCurrent;

  bool operator==(const LinkOption &) const = default;
};

// One element of the dynamic vocabulary. Close candidates carry the boundary
// (open step) and AC type index; in single_link mode they also carry the link
// choice, with nullopt meaning no link.
struct Candidate {
  ActionKind kind = ActionKind::kCopy;
  int boundary = -1;
  int ac_type = -1;
  std::optional<LinkOption> link;

  bool operator==(const Candidate &) const = default;
};

namespace internal {

inline bool CanHead(const DecoderState &state, const Schema &schema, int mention) {
  return schema.mode == StructureMode::kGraph ||
         state.mentions[mention].outgoing == 0;
}

}  // namespace internal

// Link options for a mention about to be closed: every earlier mention, every
// AR type, both directions. In tree mode an antecedent that already heads a
// relation cannot head another.
inline std::vector<LinkOption> LinkCandidates(const DecoderState &state,
                                              const Schema &schema) {
  std::vector<LinkOption> out;
  for (int m = 0; m < static_cast<int>(state.mentions.size()); ++m) {
    for (int r = 0; r < schema.num_ar_types(); ++r) {
      out.push_back({m, r, Direction::kHeadIsCurrent});
      if (internal::CanHead(state, schema, m)) {
        out.push_back({m, r, Direction::kHeadIsAntecedent});
      }
    }
  }
  return out;
}

// Enumerates the legal next actions in tie-break order: copy, open, then
// closes by ascending boundary, AC type and link option (no-link first).
inline std::vector<Candidate> LegalActions(const DecoderState &state,
                                           const Schema &schema,
                                           LinearizeMode mode) {
  if (state.terminal()) {
    Fail(ErrorCode::kIllegalAction, "no actions are legal in a terminal state");
  }
  std::vector<Candidate> out;
  if (state.tokens_remain()) {
    out.push_back({ActionKind::kCopy});
    if (static_cast<int>(state.opens.size()) < state.max_open) {
      out.push_back({ActionKind::kOpen});
    }
  }
  std::vector<LinkOption> links;
  if (mode == LinearizeMode::kSingleLink) links = LinkCandidates(state, schema);
  for (const OpenRecord &open : state.opens) {
    if (open.token_start >= state.cursor) continue;
    for (int t = 0; t < schema.num_ac_types(); ++t) {
      out.push_back({ActionKind::kClose, open.step, t, std::nullopt});
      for (const LinkOption &link : links) {
        out.push_back({ActionKind::kClose, open.step, t, link});
      }
    }
  }
  return out;
}

// Converts a candidate (plus, for multi_link, the accepted link options) into
// the concrete step it executes.
inline ActionStep ToStep(const Candidate &c, const DecoderState &state,
                         const Schema &schema,
                         const std::vector<LinkOption> &extra_links = {}) {
  switch (c.kind) {
    case ActionKind::kCopy: return ActionStep::Copy();
    case ActionKind::kOpen: return ActionStep::Open();
    case ActionKind::kClose: break;
  }
  std::vector<Link> links;
  auto add = [&](const LinkOption &l) {
    links.push_back({state.mentions.at(l.mention).step,
                     schema.ar_types.at(l.ar_type), l.direction});
  };
  if (c.link) add(*c.link);
  for (const LinkOption &l : extra_links) add(l);
  SortLinks(&links);
  return ActionStep::Close(c.boundary, schema.ac_types.at(c.ac_type), std::move(links));
}

// Executes one step. Illegal steps are rejected with the violated rule.
inline DecoderState ApplyAction(DecoderState state, const ActionStep &step,
                                const Schema &schema) {
  const int index = state.step_count();
  switch (step.kind) {
    case ActionKind::kCopy:
      if (!state.tokens_remain()) {
        Fail(ErrorCode::kIllegalAction, "step ", index, ": copy with no tokens left");
      }
      ++state.cursor;
      break;
    case ActionKind::kOpen:
      if (!state.tokens_remain()) {
        Fail(ErrorCode::kIllegalAction, "step ", index, ": open with no tokens left");
      }
      if (static_cast<int>(state.opens.size()) >= state.max_open) {
        Fail(ErrorCode::kIllegalAction, "step ", index, ": open exceeds max_open ",
             state.max_open);
      }
      state.opens.push_back({index, state.cursor});
      break;
    case ActionKind::kClose: {
      auto open = std::find_if(state.opens.begin(), state.opens.end(),
                               [&](const OpenRecord &o) { return o.step == step.boundary; });
      if (open == state.opens.end()) {
        Fail(ErrorCode::kIllegalAction, "step ", index, ": close boundary ",
             step.boundary, " is not an unmatched open");
      }
      if (open->token_start >= state.cursor) {
        Fail(ErrorCode::kIllegalAction, "step ", index,
             ": close would produce an empty span");
      }
      const int ac_type = schema.AcIndex(step.ac_type);
      if (ac_type < 0) {
        Fail(ErrorCode::kIllegalAction, "step ", index, ": unknown AC type '",
             step.ac_type, "'");
      }
      MentionRecord mention{index, step.boundary, open->token_start, state.cursor - 1,
                            ac_type, 0};
      state.opens.erase(open);
      std::vector<std::pair<int, Direction>> seen;
      for (const Link &link : step.links) {
        const int m = state.MentionAtStep(link.antecedent);
        if (m < 0) {
          Fail(ErrorCode::kIllegalAction, "step ", index, ": link antecedent ",
               link.antecedent, " is not a registered close");
        }
        if (schema.ArIndex(link.ar_type) < 0) {
          Fail(ErrorCode::kIllegalAction, "step ", index, ": unknown AR type '",
               link.ar_type, "'");
        }
        if (std::find(seen.begin(), seen.end(), std::pair(m, link.direction)) !=
            seen.end()) {
          Fail(ErrorCode::kIllegalAction, "step ", index,
               ": duplicate relation to antecedent ", link.antecedent);
        }
        seen.push_back({m, link.direction});
        const bool tree = schema.mode == StructureMode::kTree;
        if (link.direction == Direction::kHeadIsCurrent) {
          if (tree && mention.outgoing > 0) {
            Fail(ErrorCode::kIllegalAction, "step ", index,
                 ": multiple outgoing in tree mode");
          }
          ++mention.outgoing;
        } else {
          if (tree && state.mentions[m].outgoing > 0) {
            Fail(ErrorCode::kIllegalAction, "step ", index,
                 ": multiple outgoing in tree mode");
          }
          ++state.mentions[m].outgoing;
        }
      }
      state.mentions.push_back(mention);
      break;
    }
  }
  state.history.push_back(step);
  return state;
}

inline DecoderState Replay(const std::vector<ActionStep> &steps, int token_count,
                           const Schema &schema, int max_open = 1) {
  DecoderState state = InitialState(token_count, max_open);
  for (const ActionStep &step : steps) state = ApplyAction(std::move(state), step, schema);
  return state;
}

}  // namespace aasp
