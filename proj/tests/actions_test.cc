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

#include "aasp/actions.hpp"

#include <random>

#include "aasp/transition.hpp"
#include "gtest/gtest.h"
#include "testing.hpp"

namespace aasp {
namespace {

using testing::MakeParagraph;

const ActionStep kCopy = ActionStep::Copy();
const ActionStep kOpen = ActionStep::Open();

TEST(Linearize, SingleSpan) {
  ArgStructure s{MakeParagraph("p", 5), {{1, 3, "Claim"}}, {}};
  Linearization lin = Linearize(s, LinearizeMode::kMultiLink);
  std::vector<ActionStep> expected = {kCopy, kOpen, kCopy, kCopy, kCopy,
                                      ActionStep::Close(1, "Claim"), kCopy};
  EXPECT_EQ(lin.sequence.steps, expected);
  EXPECT_EQ(lin.sequence.paragraph_id, "p");
  EXPECT_TRUE(lin.dropped.empty());
}

TEST(Linearize, RelationLinksFromLaterClose) {
  ArgStructure s{MakeParagraph("p", 6), {{0, 1, "Claim"}, {3, 5, "Premise"}},
                 {{1, 0, "supports"}}};
  Linearization lin = Linearize(s, LinearizeMode::kMultiLink);
  // <m> t0 t1 </m> t2 <m> t3 t4 t5 </m>
  ASSERT_EQ(lin.sequence.size(), 10);
  EXPECT_EQ(lin.sequence.steps[3], ActionStep::Close(0, "Claim"));
  EXPECT_EQ(lin.sequence.steps[9],
            ActionStep::Close(5, "Premise", {{3, "supports", Direction::kHeadIsCurrent}}));
}

TEST(Linearize, SingleLinkKeepsNearestAntecedent) {
  ArgStructure s{MakeParagraph("p", 9),
                 {{0, 1, "Fact"}, {3, 4, "Value"}, {6, 7, "Policy"}},
                 {{0, 2, "reason"}, {1, 2, "evidence"}}};
  Linearization multi = Linearize(s, LinearizeMode::kMultiLink);
  const ActionStep &last_multi = multi.sequence.steps[13];
  ASSERT_TRUE(last_multi.is_close());
  ASSERT_EQ(last_multi.links.size(), 2u);
  EXPECT_TRUE(multi.dropped.empty());

  Linearization single = Linearize(s, LinearizeMode::kSingleLink);
  const ActionStep &last = single.sequence.steps[13];
  ASSERT_EQ(last.links.size(), 1u);
  // AC1's close is at step 8 (<m> t0 t1 </m> t2 <m> t3 t4 </m>).
  EXPECT_EQ(last.links[0], (Link{8, "evidence", Direction::kHeadIsAntecedent}));
  ASSERT_EQ(single.dropped.size(), 1u);
  EXPECT_EQ(single.dropped[0], (ArgRelation{0, 2, "reason"}));
}

TEST(Linearize, RejectsNonCanonical) {
  ArgStructure s{MakeParagraph("p", 8), {{4, 6, "Claim"}, {0, 2, "Premise"}}, {}};
  EXPECT_THROW(Linearize(s, LinearizeMode::kMultiLink), Error);
}

TEST(Delinearize, RoundTripsSingleSpan) {
  ArgStructure s{MakeParagraph("p", 5), {{1, 3, "Claim"}}, {}};
  Delinearization d = Delinearize(Linearize(s, LinearizeMode::kMultiLink).sequence,
                                  s.paragraph);
  EXPECT_EQ(d.structure, s);
  EXPECT_TRUE(d.repairs.empty());
}

TEST(Delinearize, RemovesUnmatchedOpen) {
  Paragraph p = MakeParagraph("p", 2);
  ActionSequence seq{"p", {kOpen, kOpen, kCopy, ActionStep::Close(0, "Claim"), kCopy}};
  Delinearization d = Delinearize(seq, p);
  ASSERT_EQ(d.structure.acs.size(), 1u);
  EXPECT_EQ(d.structure.acs[0], (AcSpan{0, 0, "Claim"}));
  ASSERT_EQ(d.repairs.size(), 1u);
  EXPECT_EQ(d.repairs[0].kind, Repair::Kind::kUnmatchedOpen);
  EXPECT_EQ(d.repairs[0].step, 1);
}

TEST(Delinearize, DropsLinkWhoseAntecedentWasRemoved) {
  Paragraph p = MakeParagraph("p", 2);
  ActionSequence seq{"p",
                     {ActionStep::Close(-1, "Claim"), kOpen, kCopy,
                      ActionStep::Close(1, "Premise",
                                        {{0, "supports", Direction::kHeadIsCurrent}}),
                      kCopy}};
  Delinearization d = Delinearize(seq, p);
  ASSERT_EQ(d.structure.acs.size(), 1u);
  EXPECT_TRUE(d.structure.ars.empty());
  ASSERT_EQ(d.repairs.size(), 2u);
  EXPECT_EQ(d.repairs[0].kind, Repair::Kind::kUnmatchedClose);
  EXPECT_EQ(d.repairs[1].kind, Repair::Kind::kOrphanLink);
}

TEST(Delinearize, CascadeDropsEmptySpanThenItsLinks) {
  Paragraph p = MakeParagraph("p", 3);
  ActionSequence seq{"p",
                     {kOpen, ActionStep::Close(0, "Claim"), kOpen, kCopy,
                      ActionStep::Close(2, "Premise",
                                        {{1, "supports", Direction::kHeadIsCurrent}}),
                      kCopy, kCopy, kCopy}};
  Delinearization d = Delinearize(seq, p);
  ASSERT_EQ(d.structure.acs.size(), 1u);
  EXPECT_TRUE(d.structure.ars.empty());
  std::vector<Repair::Kind> kinds;
  for (const Repair &r : d.repairs) kinds.push_back(r.kind);
  EXPECT_EQ(kinds, (std::vector<Repair::Kind>{Repair::Kind::kExtraCopy,
                                               Repair::Kind::kEmptySpan,
                                               Repair::Kind::kOrphanLink}));
}

TEST(Delinearize, ToleratesTruncation) {
  Paragraph p = MakeParagraph("p", 4);
  ActionSequence seq{"p", {kOpen, kCopy, ActionStep::Close(0, "Claim")}};
  Delinearization d = Delinearize(seq, p);
  EXPECT_EQ(d.structure.acs.size(), 1u);
  ASSERT_EQ(d.repairs.size(), 1u);
  EXPECT_EQ(d.repairs[0].kind, Repair::Kind::kMissingTokens);
}

TEST(Delinearize, SchemaRepairsTreeViolationsAndLabels) {
  Paragraph p = MakeParagraph("p", 6);
  ActionSequence seq{
      "p",
      {kOpen, kCopy, ActionStep::Close(0, "Claim"), kOpen, kCopy,
       ActionStep::Close(3, "Premise"), kOpen, kCopy,
       ActionStep::Close(6, "Premise", {{2, "supports", Direction::kHeadIsAntecedent},
                                        {5, "supports", Direction::kHeadIsAntecedent}}),
       kOpen, kCopy, ActionStep::Close(9, "Bogus"), kCopy, kCopy}};
  // Pre-load a relation so AC0 already heads one when AC2 closes.
  seq.steps[5].links = {{2, "supports", Direction::kHeadIsAntecedent}};
  Schema schema = Schema::Aae();
  Delinearization d = Delinearize(seq, p, &schema);
  EXPECT_TRUE(ValidateStructure(d.structure, schema).empty());
  EXPECT_EQ(d.structure.acs.size(), 3u);
  EXPECT_EQ(d.structure.ars.size(), 2u);
  int tree = 0, label = 0;
  for (const Repair &r : d.repairs) {
    tree += r.kind == Repair::Kind::kTreeViolation;
    label += r.kind == Repair::Kind::kUnknownAcType;
  }
  EXPECT_EQ(tree, 1);
  EXPECT_EQ(label, 1);
}

TEST(Delinearize, LogsBoundaryReassignment) {
  Paragraph p = MakeParagraph("p", 1);
  ActionSequence seq{"p", {kOpen, kCopy, ActionStep::Close(7, "Claim")}};
  Delinearization d = Delinearize(seq, p);
  EXPECT_EQ(d.structure.acs.size(), 1u);
  ASSERT_EQ(d.repairs.size(), 1u);
  EXPECT_EQ(d.repairs[0].kind, Repair::Kind::kBoundaryReassigned);
}

TEST(PairBoundaries, Examples) {
  using S = Symbol;
  BoundaryPairing a = PairBoundaries({S::kOpen, S::kToken, S::kClose});
  EXPECT_EQ(a.pairs, (std::vector<std::pair<int, int>>{{0, 2}}));
  EXPECT_TRUE(a.removed.empty());

  BoundaryPairing b = PairBoundaries({S::kOpen, S::kOpen, S::kToken, S::kClose, S::kToken});
  EXPECT_EQ(b.pairs, (std::vector<std::pair<int, int>>{{0, 3}}));
  EXPECT_EQ(b.removed, std::vector<int>{1});

  BoundaryPairing c = PairBoundaries({S::kClose, S::kToken, S::kOpen});
  EXPECT_TRUE(c.pairs.empty());
  EXPECT_EQ(c.removed, (std::vector<int>{0, 2}));
}

TEST(PairBoundariesProperty, EveryBoundaryPairedOrRemovedOnce) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<Symbol> symbols(testing::Uniform(rng, 0, 20));
    for (auto &s : symbols) s = static_cast<Symbol>(testing::Uniform(rng, 0, 2));
    BoundaryPairing out = PairBoundaries(symbols);
    std::vector<int> seen(symbols.size(), 0);
    for (auto [open, close] : out.pairs) {
      ASSERT_LT(open, close);
      EXPECT_EQ(symbols[open], Symbol::kOpen);
      EXPECT_EQ(symbols[close], Symbol::kClose);
      ++seen[open];
      ++seen[close];
    }
    for (int r : out.removed) ++seen[r];
    for (size_t i = 0; i < symbols.size(); ++i) {
      EXPECT_EQ(seen[i], symbols[i] == Symbol::kToken ? 0 : 1) << i;
    }
  }
}

TEST(LegalActions, FreshState) {
  DecoderState state = InitialState(3);
  std::vector<Candidate> c = LegalActions(state, Schema::Aae(), LinearizeMode::kSingleLink);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].kind, ActionKind::kCopy);
  EXPECT_EQ(c[1].kind, ActionKind::kOpen);
}

TEST(LegalActions, OpenSpanNoPriorMentions) {
  Schema schema = Schema::Aae();
  DecoderState state = Replay({kOpen, kCopy}, 3, schema);
  std::vector<Candidate> c = LegalActions(state, schema, LinearizeMode::kSingleLink);
  // Copy, no Open (max_open = 1), then one no-link close per AC type.
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c[0].kind, ActionKind::kCopy);
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(c[1 + t], (Candidate{ActionKind::kClose, 0, t, std::nullopt}));
  }
}

TEST(LegalActions, SingleLinkProductWithOnePriorMention) {
  Schema schema = Schema::Aae();
  DecoderState state = Replay(
      {kOpen, kCopy, ActionStep::Close(0, "Claim"), kCopy, kOpen, kCopy}, 8, schema);
  std::vector<Candidate> c = LegalActions(state, schema, LinearizeMode::kSingleLink);
  int closes = 0;
  for (const Candidate &x : c) closes += x.kind == ActionKind::kClose;
  EXPECT_EQ(closes, 3 * (1 + 1 * 2 * 2));
  // Multi-link: links are a separate stage.
  std::vector<Candidate> m = LegalActions(state, schema, LinearizeMode::kMultiLink);
  EXPECT_EQ(m.size(), 1u + 3u);
}

TEST(LegalActions, TreeModeExcludesAntecedentThatAlreadyHeads) {
  Schema schema = Schema::Aae();
  DecoderState state = Replay(
      {kOpen, kCopy, ActionStep::Close(0, "Claim"), kOpen, kCopy,
       ActionStep::Close(3, "Premise", {{2, "supports", Direction::kHeadIsAntecedent}}),
       kOpen, kCopy},
      8, schema);
  std::vector<LinkOption> links = LinkCandidates(state, schema);
  // Mention 0 already heads: only current-heads options for it.
  EXPECT_EQ(links.size(), 2u + 4u);
  Schema graph = Schema::Aae();
  graph.mode = StructureMode::kGraph;
  EXPECT_EQ(LinkCandidates(state, graph).size(), 8u);
}

TEST(LegalActions, TerminalStateRejected) {
  Schema schema = Schema::Aae();
  DecoderState state = Replay({kCopy}, 1, schema);
  ASSERT_TRUE(state.terminal());
  EXPECT_THROW(LegalActions(state, schema, LinearizeMode::kMultiLink), Error);
}

TEST(ApplyAction, Examples) {
  Schema schema = Schema::Aae();
  DecoderState fresh = InitialState(4);
  EXPECT_EQ(ApplyAction(fresh, kCopy, schema).cursor, 1);

  DecoderState s = Replay({kCopy, kOpen, kCopy, kCopy}, 4, schema);
  ASSERT_EQ(s.cursor, 3);
  DecoderState closed = ApplyAction(s, ActionStep::Close(1, "Claim"), schema);
  EXPECT_TRUE(closed.opens.empty());
  ASSERT_EQ(closed.mentions.size(), 1u);
  EXPECT_EQ(closed.mentions[0].start, 1);
  EXPECT_EQ(closed.mentions[0].end, 2);
  EXPECT_EQ(closed.mentions[0].step, 4);

  DecoderState end = Replay({kCopy, kOpen, kCopy}, 2, schema);
  EXPECT_FALSE(end.terminal());
  EXPECT_TRUE(ApplyAction(end, ActionStep::Close(1, "Premise"), schema).terminal());
}

TEST(ApplyAction, RejectsIllegalSteps) {
  Schema schema = Schema::Aae();
  auto message = [&](const std::vector<ActionStep> &prefix, const ActionStep &step) {
    try {
      ApplyAction(Replay(prefix, 2, schema), step, schema);
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kIllegalAction);
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message({kCopy, kCopy}, kCopy).find("no tokens left"), std::string::npos);
  EXPECT_NE(message({kOpen}, kOpen).find("max_open"), std::string::npos);
  EXPECT_NE(message({kOpen}, ActionStep::Close(0, "Claim")).find("empty span"),
            std::string::npos);
  EXPECT_NE(message({kCopy}, ActionStep::Close(0, "Claim")).find("not an unmatched open"),
            std::string::npos);
  EXPECT_NE(message({kOpen, kCopy}, ActionStep::Close(0, "Nope")).find("unknown AC type"),
            std::string::npos);
  EXPECT_NE(message({kOpen, kCopy},
                    ActionStep::Close(0, "Claim", {{5, "supports", Direction::kHeadIsCurrent}}))
                .find("not a registered close"),
            std::string::npos);
}

// Property: linearize(multi_link) then delinearize is the identity.
TEST(LinearizeProperty, MultiLinkRoundTrip) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 1000; ++iter) {
    Schema schema = iter % 2 ? Schema::Cdcp() : Schema::Aae();
    ArgStructure s = testing::RandomStructure(rng, schema, "p" + std::to_string(iter));
    Linearization lin = Linearize(s, LinearizeMode::kMultiLink);
    EXPECT_TRUE(lin.dropped.empty());
    EXPECT_TRUE(CheckWellFormed(lin.sequence, s.paragraph).empty());
    // Gold sequences replay legally.
    EXPECT_NO_THROW(Replay(lin.sequence.steps, s.paragraph.size(), schema));
    Delinearization d = Delinearize(lin.sequence, s.paragraph, &schema);
    ASSERT_EQ(d.structure, s) << RenderTrace(lin.sequence, s.paragraph);
    EXPECT_TRUE(d.repairs.empty());
  }
}

// Property: single_link keeps every AC and a subset of relations, and the
// loss log accounts for the rest.
TEST(LinearizeProperty, SingleLinkProjection) {
  std::mt19937_64 rng(6);
  for (int iter = 0; iter < 1000; ++iter) {
    Schema schema = iter % 2 ? Schema::Cdcp() : Schema::Aae();
    ArgStructure s = testing::RandomStructure(rng, schema, "p");
    Linearization lin = Linearize(s, LinearizeMode::kSingleLink);
    for (const ActionStep &step : lin.sequence.steps) EXPECT_LE(step.links.size(), 1u);
    Delinearization d = Delinearize(lin.sequence, s.paragraph, &schema);
    EXPECT_EQ(d.structure.acs, s.acs);
    for (const ArgRelation &ar : d.structure.ars) {
      EXPECT_NE(std::find(s.ars.begin(), s.ars.end(), ar), s.ars.end());
      EXPECT_EQ(std::find(lin.dropped.begin(), lin.dropped.end(), ar), lin.dropped.end());
    }
    EXPECT_EQ(lin.dropped.size(), s.ars.size() - d.structure.ars.size());
    EXPECT_NO_THROW(Replay(lin.sequence.steps, s.paragraph.size(), schema));
  }
}

// Property: a state reached by random legal actions equals the replay of its
// own history.
TEST(TransitionProperty, StateIsAFoldOfItsHistory) {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 300; ++iter) {
    Schema schema = iter % 2 ? Schema::Cdcp() : Schema::Aae();
    LinearizeMode mode = iter % 3 ? LinearizeMode::kMultiLink : LinearizeMode::kSingleLink;
    DecoderState state = InitialState(testing::Uniform(rng, 1, 15),
                                      testing::Uniform(rng, 1, 3));
    while (!state.terminal()) {
      std::vector<Candidate> c = LegalActions(state, schema, mode);
      ASSERT_FALSE(c.empty());
      Candidate pick = c[testing::Uniform(rng, 0, static_cast<int>(c.size()) - 1)];
      state = ApplyAction(state, ToStep(pick, state, schema), schema);
    }
    EXPECT_EQ(Replay(state.history, state.token_count, schema, state.max_open), state);
  }
}

TEST(RenderTrace, Format) {
  ArgStructure s{Paragraph{"p", {"we", "should", "act", "because", "it", "helps"}},
                 {{1, 2, "Claim"}, {4, 5, "Premise"}},
                 {{1, 0, "supports"}}};
  std::string text = RenderTrace(Linearize(s, LinearizeMode::kMultiLink).sequence,
                                 s.paragraph);
  EXPECT_EQ(text,
            "we <m> should act </m>[Claim] because <m> it helps "
            "</m>[Premise|link→4:supports:cur]");
}

}  // namespace
}  // namespace aasp
