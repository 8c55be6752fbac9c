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

#include "aasp/decoder.hpp"

#include <random>
#include <stdexcept>

#include "gtest/gtest.h"
#include "testing.hpp"

namespace aasp {
namespace {

using testing::MakeParagraph;

DecodeOptions Options(const Schema &schema, LinearizeMode mode, int max_steps = 256) {
  return {schema, mode, max_steps, 1};
}

TEST(DecodeGreedy, OracleReproducesGold) {
  ArgStructure s{MakeParagraph("p", 5), {{1, 3, "Claim"}}, {}};
  ActionSequence gold = Linearize(s, LinearizeMode::kMultiLink).sequence;
  OracleScorer oracle(gold, Schema::Aae());
  DecodeResult r = DecodeGreedy(oracle, s.paragraph,
                                Options(Schema::Aae(), LinearizeMode::kMultiLink));
  EXPECT_EQ(r.sequence, gold);
  EXPECT_FALSE(r.truncated);
}

TEST(DecodeGreedy, OracleLinkStageAcceptsOnlyGoldLinks) {
  ArgStructure s{MakeParagraph("p", 9),
                 {{0, 1, "Claim"}, {3, 4, "Premise"}, {6, 7, "Premise"}},
                 {{2, 1, "attacks"}}};
  ActionSequence gold = Linearize(s, LinearizeMode::kMultiLink).sequence;
  OracleScorer oracle(gold, Schema::Aae());
  DecodeResult r = DecodeGreedy(oracle, s.paragraph,
                                Options(Schema::Aae(), LinearizeMode::kMultiLink));
  EXPECT_EQ(r.sequence, gold);
  Delinearization d = Delinearize(r.sequence, s.paragraph);
  EXPECT_EQ(d.structure, s);
}

TEST(DecodeGreedy, OracleWithoutAcsCopiesEverything) {
  ArgStructure s{MakeParagraph("p", 4), {}, {}};
  ActionSequence gold = Linearize(s, LinearizeMode::kMultiLink).sequence;
  OracleScorer oracle(gold, Schema::Aae());
  DecodeResult r = DecodeGreedy(oracle, s.paragraph,
                                Options(Schema::Aae(), LinearizeMode::kSingleLink));
  EXPECT_EQ(r.sequence, gold);
  for (const ActionStep &step : r.sequence.steps) EXPECT_TRUE(step.is_copy());
}

TEST(DecodeGreedy, ZeroScorerTiesBreakToCopy) {
  Paragraph p = MakeParagraph("p", 6);
  DecodeResult r = DecodeGreedy(ZeroScorer(), p,
                                Options(Schema::Cdcp(), LinearizeMode::kSingleLink));
  ASSERT_EQ(r.sequence.size(), 6);
  for (const ActionStep &step : r.sequence.steps) EXPECT_TRUE(step.is_copy());
}

TEST(DecodeGreedy, RejectsBudgetBelowLength) {
  EXPECT_THROW(DecodeGreedy(ZeroScorer(), MakeParagraph("p", 6),
                            Options(Schema::Aae(), LinearizeMode::kMultiLink, 5)),
               Error);
}

TEST(DecodeGreedy, TruncationForceCopiesWithinBudget) {
  // A scorer that always wants to open or close, never copy.
  class Greedy : public Scorer {
    class Session : public ScoringSession {
     public:
      std::vector<double> ScoreJoint(const DecoderState &,
                                     const std::vector<Candidate> &c) override {
        std::vector<double> s(c.size());
        for (size_t i = 0; i < c.size(); ++i) s[i] = c[i].kind == ActionKind::kCopy ? 0 : 1;
        return s;
      }
      LinkScores ScoreLinks(const DecoderState &, const Candidate &,
                            const std::vector<LinkOption> &o) override {
        return {std::vector<double>(o.size(), 1.0), 0.0};
      }
    };

   public:
    std::unique_ptr<ScoringSession> Begin(const Paragraph &) const override {
      return std::make_unique<Session>();
    }
  };
  Paragraph p = MakeParagraph("p", 10);
  DecodeResult r = DecodeGreedy(Greedy(), p,
                                Options(Schema::Cdcp(), LinearizeMode::kMultiLink, 12));
  EXPECT_TRUE(r.truncated);
  EXPECT_LE(r.sequence.size(), 12);
  EXPECT_GT(r.forced_copies, 0);
  Schema schema = Schema::Cdcp();
  Delinearization d = Delinearize(r.sequence, p, &schema);
  EXPECT_TRUE(ValidateStructure(d.structure, schema).empty());
}

TEST(DecodeGreedy, ScorerExceptionsPropagate) {
  class Throwing : public Scorer {
    class Session : public ScoringSession {
     public:
      std::vector<double> ScoreJoint(const DecoderState &,
                                     const std::vector<Candidate> &) override {
        throw std::runtime_error("boom");
      }
      LinkScores ScoreLinks(const DecoderState &, const Candidate &,
                            const std::vector<LinkOption> &) override {
        return {};
      }
    };

   public:
    std::unique_ptr<ScoringSession> Begin(const Paragraph &) const override {
      return std::make_unique<Session>();
    }
  };
  EXPECT_THROW(DecodeGreedy(Throwing(), MakeParagraph("p", 3),
                            Options(Schema::Aae(), LinearizeMode::kMultiLink)),
               std::runtime_error);
}

// Property: any scorer yields sequences that delinearize to valid structures
// within the step budget, deterministically.
TEST(DecodeGreedyProperty, RandomScorerLegality) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 400; ++iter) {
    Schema schema = iter % 2 ? Schema::Cdcp() : Schema::Aae();
    LinearizeMode mode = iter % 4 < 2 ? LinearizeMode::kMultiLink : LinearizeMode::kSingleLink;
    Paragraph p = MakeParagraph("p" + std::to_string(iter), testing::Uniform(rng, 1, 20));
    DecodeOptions options = Options(schema, mode, testing::Uniform(rng, p.size(), 3 * p.size()));
    options.max_open = testing::Uniform(rng, 1, 2);
    RandomScorer scorer(iter);
    DecodeResult r = DecodeGreedy(scorer, p, options);
    EXPECT_LE(r.sequence.size(), options.max_steps);
    Delinearization d = Delinearize(r.sequence, p, &schema);
    EXPECT_TRUE(ValidateStructure(d.structure, schema).empty());
    EXPECT_EQ(DecodeGreedy(scorer, p, options).sequence, r.sequence);
  }
}

TEST(DecodeGreedyProperty, OracleCompleteness) {
  std::mt19937_64 rng(9);
  for (int iter = 0; iter < 300; ++iter) {
    Schema schema = iter % 2 ? Schema::Cdcp() : Schema::Aae();
    LinearizeMode mode = iter % 3 ? LinearizeMode::kMultiLink : LinearizeMode::kSingleLink;
    ArgStructure s = testing::RandomStructure(rng, schema, "p");
    Linearization lin = Linearize(s, mode);
    OracleScorer oracle(lin.sequence, schema);
    DecodeResult r = DecodeGreedy(oracle, s.paragraph, Options(schema, mode));
    ASSERT_EQ(r.sequence, lin.sequence);
    if (mode == LinearizeMode::kMultiLink) {
      EXPECT_EQ(Delinearize(r.sequence, s.paragraph, &schema).structure, s);
    }
  }
}

TEST(BatchDecode, PreservesOrderAndIsolatesFailures) {
  std::vector<Paragraph> paragraphs = {MakeParagraph("a", 3), MakeParagraph("b", 300),
                                       MakeParagraph("c", 4)};
  DecodeOptions options = Options(Schema::Aae(), LinearizeMode::kMultiLink);
  std::vector<BatchItem> out = BatchDecode(RandomScorer(1), paragraphs, options);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_TRUE(out[0].ok());
  EXPECT_FALSE(out[1].ok());  // longer than max_steps
  EXPECT_TRUE(out[1].structure.acs.empty());
  EXPECT_EQ(out[1].structure.paragraph.id, "b");
  EXPECT_TRUE(out[2].ok());
  for (size_t i = 0; i < 3; ++i) EXPECT_EQ(out[i].structure.paragraph, paragraphs[i]);

  EXPECT_TRUE(BatchDecode(RandomScorer(1), {}, options).empty());
}

TEST(BatchDecode, TruncationStaysLocal) {
  std::vector<Paragraph> paragraphs = {MakeParagraph("a", 5), MakeParagraph("long", 60),
                                       MakeParagraph("c", 5)};
  DecodeOptions options = Options(Schema::Aae(), LinearizeMode::kMultiLink, 64);
  RandomScorer scorer(3);
  std::vector<BatchItem> out = BatchDecode(scorer, paragraphs, options);
  EXPECT_TRUE(out[1].truncated);
  for (size_t i : {0u, 2u}) {
    EXPECT_FALSE(out[i].truncated);
    EXPECT_EQ(out[i].actions, DecodeGreedy(scorer, paragraphs[i], options).sequence);
  }
}

TEST(BatchDecode, ThreadedMatchesSequential) {
  std::vector<Paragraph> paragraphs;
  for (int i = 0; i < 20; ++i) paragraphs.push_back(MakeParagraph("p" + std::to_string(i), 12));
  DecodeOptions options = Options(Schema::Cdcp(), LinearizeMode::kMultiLink);
  auto a = BatchDecode(RandomScorer(4), paragraphs, options, 1);
  auto b = BatchDecode(RandomScorer(4), paragraphs, options, 4);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].structure, b[i].structure);
}

}  // namespace
}  // namespace aasp
