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

#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "aasp/gradcheck.hpp"
#include "aasp/model.hpp"
#include "aasp/model_io.hpp"
#include "aasp/synthetic.hpp"
#include "aasp/train.hpp"
#include "testing.hpp"

namespace aasp {
namespace {

ModelConfig SmallConfig(LinearizeMode mode = LinearizeMode::kMultiLink) {
  ModelConfig c;
  c.embed_dim = 8;
  c.context_dim = 12;
  c.ffn1_hidden = 10;
  c.ffn_hidden = 16;
  c.mode = mode;
  return c;
}

std::vector<ArgStructure> Synthetic(int n, StructureMode mode, uint64_t seed = 3,
                                    int max_tokens = 16) {
  SyntheticOptions o;
  o.seed = seed;
  o.n_paragraphs = n;
  o.max_tokens = max_tokens;
  o.mode = mode;
  o.schema = mode == StructureMode::kGraph ? Schema::Cdcp() : Schema::Aae();
  return GenSynthetic(o).corpus.Structures();
}

template <typename S>
Model<S> ModelFor(const ModelConfig &c, const Schema &schema,
                  const std::vector<ArgStructure> &data) {
  return InitModel<S>(c, schema, Vocab::Build(data));
}

template <typename S>
Model<S> Zeroed(Model<S> m) {
  for (auto &t : m.params.t) t.setZero();
  return m;
}

TEST(VocabTest, UnknownIsZeroAndOrderIsSorted) {
  Vocab v = Vocab::FromTokens({"b", "a", "b"});
  EXPECT_EQ(v.size(), 3);
  EXPECT_EQ(v.Id("nope"), 0);
  EXPECT_EQ(v.tokens()[0], Vocab::kUnknown);
  Paragraph p{"x", {"b", "zz"}};
  EXPECT_EQ(v.Ids(p), (std::vector<int>{1, 0}));
  ArgStructure s{Paragraph{"x", {"q", "a", "q"}}, {}, {}};
  EXPECT_EQ(Vocab::Build({s}).tokens(), (std::vector<std::string>{Vocab::kUnknown, "a", "q"}));
}

TEST(EncoderTest, ShapeDeterminismAndOrder) {
  auto data = Synthetic(3, StructureMode::kTree);
  auto m = ModelFor<double>(SmallConfig(), Schema::Aae(), data);
  Paragraph p = data[0].paragraph;
  p.tokens.resize(5);
  Encoding<double> a = Encode(m, p), b = Encode(m, p);
  EXPECT_EQ(a.ctx.rows(), 12);
  EXPECT_EQ(a.ctx.cols(), 5);
  EXPECT_TRUE(a.ctx == b.ctx);
  Paragraph q = p;
  std::reverse(q.tokens.begin(), q.tokens.end());
  if (q.tokens != p.tokens) EXPECT_FALSE(Encode(m, q).ctx == a.ctx);
  Paragraph unknown{"u", {"never-seen"}};
  Paragraph unk2{"u", {Vocab::kUnknown}};
  EXPECT_TRUE(Encode(m, unknown).ctx == Encode(m, unk2).ctx);
}

TEST(DecoderStepTest, DeterministicAndSensitiveToLastAction) {
  auto data = Synthetic(3, StructureMode::kTree);
  auto m = ModelFor<double>(SmallConfig(), Schema::Aae(), data);
  const Paragraph &p = data[0].paragraph;
  Encoding<double> enc = Encode(m, p);
  Vec<double> h0 = DecoderStep<double>(m, BuildInput(m, enc, StartInput(p.size())), nullptr);
  EXPECT_EQ(h0.size(), 12);
  DecoderState st = InitialState(p.size());
  ActionStep copy{ActionKind::kCopy};
  ActionStep open{ActionKind::kOpen};
  auto after = [&](const ActionStep &s) {
    return DecoderStep<double>(m, BuildInput(m, enc, StepInput(st, s, m.schema)), &h0);
  };
  EXPECT_TRUE(after(copy) == after(copy));
  EXPECT_FALSE(after(copy) == after(open));
}

TEST(StepInputTest, CopyConsumesTokenAndCloseCarriesLabels) {
  const Schema schema = Schema::Aae();
  DecoderState st = InitialState(3);
  InputSpec in = StepInput(st, ActionStep{ActionKind::kCopy}, schema);
  EXPECT_EQ(in.symbol, kSymCopy);
  EXPECT_EQ(in.copied, 0);
  EXPECT_EQ(in.next, 1);
  in = StepInput(st, ActionStep{ActionKind::kOpen}, schema);
  EXPECT_EQ(in.copied, -1);
  EXPECT_EQ(in.next, 0);

  st.cursor = 3;
  ActionStep close{ActionKind::kClose, 0, "Premise", {{0, "Attack", Direction::kHeadIsAntecedent}}};
  in = StepInput(st, close, schema);
  EXPECT_EQ(in.symbol, kSymClose);
  EXPECT_EQ(in.ac_type, schema.AcIndex("Premise"));
  EXPECT_EQ(in.ar_rows, (std::vector<int>{schema.ArIndex("Attack") * 2 + 1}));
  EXPECT_EQ(in.next, -1);
}

TEST(ScorerTest, ZeroModelScoresZeroAndCopiesEverything) {
  auto data = Synthetic(4, StructureMode::kTree);
  for (LinearizeMode mode : {LinearizeMode::kMultiLink, LinearizeMode::kSingleLink}) {
    auto m = Zeroed(ModelFor<float>(SmallConfig(mode), Schema::Aae(), data));
    NeuralScorer<float> scorer(m);
    const Paragraph &p = data[0].paragraph;
    auto session = scorer.Begin(p);
    DecoderState st = InitialState(p.size());
    auto cands = LegalActions(st, m.schema, mode);
    for (double s : session->ScoreJoint(st, cands)) EXPECT_EQ(s, 0.0);
    auto pred = Predict(m, {p});
    EXPECT_TRUE(pred[0].acs.empty());
  }
}

TEST(ScorerTest, DeterministicAcrossSessions) {
  auto data = Synthetic(4, StructureMode::kGraph);
  auto m = ModelFor<float>(SmallConfig(LinearizeMode::kSingleLink), Schema::Cdcp(), data);
  NeuralScorer<float> scorer(m);
  const ArgStructure &s = data[0];
  auto gold = Linearize(s, LinearizeMode::kSingleLink).sequence;
  auto run = [&] {
    auto session = scorer.Begin(s.paragraph);
    DecoderState st = InitialState(s.paragraph.size());
    std::vector<double> all;
    for (const ActionStep &step : gold.steps) {
      auto sc = session->ScoreJoint(st, LegalActions(st, m.schema, m.config.mode));
      all.insert(all.end(), sc.begin(), sc.end());
      session->Advance(st, step);
      st = ApplyAction(std::move(st), step, m.schema);
    }
    return all;
  };
  std::vector<double> a = run();
  EXPECT_EQ(a, run());
  for (double x : a) EXPECT_TRUE(std::isfinite(x));
}

TEST(ScorerTest, UnregisteredMentionRejected) {
  auto data = Synthetic(2, StructureMode::kTree);
  auto m = ModelFor<float>(SmallConfig(LinearizeMode::kSingleLink), Schema::Aae(), data);
  NeuralScorer<float> scorer(m);
  Paragraph p = testing::MakeParagraph("p", 4);
  auto session = scorer.Begin(p);
  DecoderState st = InitialState(4);
  for (const ActionStep &s : {ActionStep{ActionKind::kOpen}, ActionStep{ActionKind::kCopy}}) {
    session->Advance(st, s);
    st = ApplyAction(std::move(st), s, m.schema);
  }
  Candidate bad{ActionKind::kClose, 0, 0, LinkOption{3, 0, Direction::kHeadIsCurrent}};
  try {
    session->ScoreJoint(st, {bad});
    FAIL() << "expected an error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

// Sum over steps of log |Y_n|, from an independent walk over the legal sets.
double LogCandidateCounts(const ArgStructure &s, LinearizeMode mode, const Schema &schema) {
  auto gold = Linearize(s, mode).sequence;
  DecoderState st = InitialState(s.paragraph.size());
  double total = 0;
  for (const ActionStep &step : gold.steps) {
    total += std::log(static_cast<double>(LegalActions(st, schema, mode).size()));
    if (mode == LinearizeMode::kMultiLink && step.is_close()) {
      total += std::log(2.0) * static_cast<double>(LinkCandidates(st, schema).size());
    }
    st = ApplyAction(std::move(st), step, schema);
  }
  return total;
}

TEST(NllTest, UniformScoresGiveLogCandidateCount) {
  for (StructureMode sm : {StructureMode::kTree, StructureMode::kGraph}) {
    const Schema schema = sm == StructureMode::kGraph ? Schema::Cdcp() : Schema::Aae();
    auto data = Synthetic(6, sm);
    for (LinearizeMode mode : {LinearizeMode::kMultiLink, LinearizeMode::kSingleLink}) {
      auto m = Zeroed(ModelFor<double>(SmallConfig(mode), schema, data));
      for (const ArgStructure &s : data) {
        auto gold = Linearize(s, mode).sequence;
        EXPECT_NEAR(NllLoss(m, s.paragraph, gold), LogCandidateCounts(s, mode, schema), 1e-10);
      }
    }
  }
}

TEST(NllTest, SingletonStepsContributeNothing) {
  auto data = Synthetic(5, StructureMode::kTree);
  auto m = ModelFor<double>(SmallConfig(), Schema::Aae(), data);
  // Empty paragraph: no steps at all.
  EXPECT_EQ(NllLoss(m, Paragraph{"e", {}}, ActionSequence{"e", {}}), 0.0);
  std::vector<std::vector<double>> probs;
  for (const auto &s : data) {
    NllLoss(m, s.paragraph, Linearize(s, m.config.mode).sequence, nullptr, {&probs});
  }
  int singletons = 0;
  for (const auto &p : probs) {
    if (p.size() == 1) {
      EXPECT_EQ(p[0], 1.0);
      ++singletons;
    }
  }
  EXPECT_GT(singletons, 0);
}

TEST(NllTest, ProbabilitiesNormalize) {
  for (LinearizeMode mode : {LinearizeMode::kMultiLink, LinearizeMode::kSingleLink}) {
    auto data = Synthetic(8, StructureMode::kGraph, 11);
    auto m = ModelFor<double>(SmallConfig(mode), Schema::Cdcp(), data);
    std::vector<std::vector<double>> probs;
    for (const auto &s : data) {
      NllLoss(m, s.paragraph, Linearize(s, mode).sequence, nullptr, {&probs});
    }
    ASSERT_FALSE(probs.empty());
    for (const auto &p : probs) {
      double sum = 0;
      for (double x : p) sum += x;
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

// Re-derives the loss from the inference scorer's raw scores with a separate
// softmax and log.
long double ReferenceLoss(const Model<double> &m, const ArgStructure &s) {
  const LinearizeMode mode = m.config.mode;
  auto gold = Linearize(s, mode).sequence;
  NeuralScorer<double> scorer(m);
  auto session = scorer.Begin(s.paragraph);
  DecoderState st = InitialState(s.paragraph.size());
  long double loss = 0;
  for (const ActionStep &step : gold.steps) {
    auto cands = LegalActions(st, m.schema, mode);
    auto scores = session->ScoreJoint(st, cands);
    int gi = GoldCandidateIndex(st, cands, step, m.schema, mode);
    long double z = 0;
    for (double x : scores) z += std::exp(static_cast<long double>(x));
    loss -= std::log(std::exp(static_cast<long double>(scores[gi])) / z);
    if (mode == LinearizeMode::kMultiLink && step.is_close()) {
      auto options = LinkCandidates(st, m.schema);
      LinkScores ls = session->ScoreLinks(st, cands[gi], options);
      for (size_t k = 0; k < options.size(); ++k) {
        bool positive = false;
        for (const Link &l : step.links) {
          positive = positive || (st.mentions[options[k].mention].step == l.antecedent &&
                                  m.schema.ar_types[options[k].ar_type] == l.ar_type &&
                                  options[k].direction == l.direction);
        }
        long double sig = 1.0L / (1.0L + std::exp(-static_cast<long double>(ls.scores[k] - ls.null_score)));
        loss -= std::log(positive ? sig : 1.0L - sig);
      }
    }
    session->Advance(st, step);
    st = ApplyAction(std::move(st), step, m.schema);
  }
  return loss;
}

TEST(NllTest, MatchesIndependentSoftmax) {
  for (LinearizeMode mode : {LinearizeMode::kMultiLink, LinearizeMode::kSingleLink}) {
    auto data = Synthetic(6, StructureMode::kGraph, 5);
    auto m = ModelFor<double>(SmallConfig(mode), Schema::Cdcp(), data);
    for (const auto &s : data) {
      const double ours = NllLoss(m, s.paragraph, Linearize(s, mode).sequence);
      EXPECT_GE(ours, 0.0);
      EXPECT_NEAR(ours, static_cast<double>(ReferenceLoss(m, s)), 1e-10);
    }
  }
}

TEST(NllTest, GoldOutsideLegalSetIsHardError) {
  auto data = Synthetic(2, StructureMode::kTree);
  auto m = ModelFor<double>(SmallConfig(), Schema::Aae(), data);
  Paragraph p = testing::MakeParagraph("p", 2);
  ActionSequence bad{"p", {ActionStep{ActionKind::kClose, 0, "Claim", {}}}};
  try {
    NllLoss(m, p, bad);
    FAIL() << "expected an error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIllegalAction);
  }
}

TEST(GradientTest, MatchesFiniteDifferences) {
  for (StructureMode sm : {StructureMode::kTree, StructureMode::kGraph}) {
    const Schema schema = sm == StructureMode::kGraph ? Schema::Cdcp() : Schema::Aae();
    auto data = Synthetic(3, sm, 21, 12);
    for (LinearizeMode mode : {LinearizeMode::kMultiLink, LinearizeMode::kSingleLink}) {
      auto m = ModelFor<double>(SmallConfig(mode), schema, data);
      GradCheckOptions opt;
      opt.samples_per_example = 150;
      GradCheckResult r = GradCheck(m, data, opt);
      EXPECT_EQ(r.checked, 450);
      EXPECT_LT(r.max_relative_error, 1e-4) << r.worst.tensor << " " << r.worst.analytic << " "
                                            << r.worst.numeric;
    }
  }
}

TEST(GradientTest, ZeroModelHasNoGradientBehindTheHeads) {
  auto data = Synthetic(3, StructureMode::kTree, 4, 12);
  auto m = Zeroed(ModelFor<double>(SmallConfig(), Schema::Aae(), data));
  Parameters<double> grad = Parameters<double>::Zeros(m.Specs());
  NllLoss(m, data[0].paragraph, Linearize(data[0], m.config.mode).sequence, &grad);
  // Only output biases see gradient; everything upstream multiplies a zero.
  const std::set<int> live = {kF1B2, kF2B2, kF3NullB, kF3TypeB, kF3LinkB};
  GradCheckOptions opt;
  opt.samples_per_example = 200;
  for (int t = 0; t < kNumTensors; ++t) {
    if (live.count(t)) continue;
    EXPECT_EQ(grad[t].cwiseAbs().maxCoeff(), 0.0) << m.Specs()[t].name;
    opt.tensors.push_back(t);
  }
  GradCheckResult r = GradCheck(m, {data[0]}, opt);
  EXPECT_EQ(r.checked, 200);
  EXPECT_EQ(r.max_relative_error, 0.0);
}

TEST(GradientTest, KinkCrossingUsesOneSidedDifference) {
  // FFN1 pre-activations pinned at +0.4 eps: w - eps crosses the kink, w + eps
  // does not.
  auto data = Synthetic(1, StructureMode::kTree, 5, 12);
  auto m = ModelFor<double>(SmallConfig(), Schema::Aae(), data);
  const double eps = 1e-5;
  m.params[kF1W1].setZero();
  m.params[kF1B1].setConstant(0.4 * eps);

  const std::vector<int> ids = m.vocab.Ids(data[0].paragraph);
  const ActionSequence gold = Linearize(data[0], m.config.mode).sequence;
  Parameters<double> grad = Parameters<double>::Zeros(m.Specs());
  ParagraphLoss(m, ids, gold, &grad);
  auto loss_at = [&](double delta) {
    Model<double> p = m;
    p.params[kF1B1](0, 0) += delta;
    return ParagraphLoss<double>(p, ids, gold, nullptr);
  };
  const double central = (loss_at(eps) - loss_at(-eps)) / (2 * eps);
  ASSERT_GT(std::abs(grad[kF1B1](0, 0)), 1e-3);
  EXPECT_GT(RelativeError(grad[kF1B1](0, 0), central, 1e-5), 0.1);

  GradCheckOptions opt;
  opt.samples_per_example = 40;
  opt.epsilon = eps;
  opt.tensors = {kF1B1};
  GradCheckResult r = GradCheck(m, data, opt);
  EXPECT_EQ(r.checked, 40);
  EXPECT_EQ(r.one_sided, 40);
  EXPECT_EQ(r.worst.stencil, "forward");
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(GradientTest, ClosedFormStructuralBias) {
  // dL/db[k] for the FFN1 output bias = sum_n (P_n(kind k) - [gold kind = k]).
  for (LinearizeMode mode : {LinearizeMode::kMultiLink, LinearizeMode::kSingleLink}) {
    auto data = Synthetic(4, StructureMode::kGraph, 9);
    auto m = ModelFor<double>(SmallConfig(mode), Schema::Cdcp(), data);
    for (const auto &s : data) {
      auto gold = Linearize(s, mode).sequence;
      Parameters<double> grad = Parameters<double>::Zeros(m.Specs());
      std::vector<std::vector<double>> probs;
      NllLoss(m, s.paragraph, gold, &grad, {&probs});
      double expected[3] = {0, 0, 0};
      DecoderState st = InitialState(s.paragraph.size());
      for (size_t n = 0; n < gold.steps.size(); ++n) {
        auto cands = LegalActions(st, m.schema, mode);
        for (size_t i = 0; i < cands.size(); ++i) expected[int(cands[i].kind)] += probs[n][i];
        expected[int(gold.steps[n].kind)] -= 1;
        st = ApplyAction(std::move(st), gold.steps[n], m.schema);
      }
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(grad[kF1B2](k, 0), expected[k], 1e-8);
    }
  }
}

TEST(ParameterCountTest, HeadsScaleWithHiddenSize) {
  ModelConfig big, small;
  small.ffn_hidden = 150;
  for (const Schema &schema : {Schema::Aae(), Schema::Cdcp()}) {
    const double ratio = double(HeadParameterCount(big, schema)) / HeadParameterCount(small, schema);
    EXPECT_NEAR(ratio, 10.0, 0.01);
    // Closed form agrees with the allocated tensors.
    auto m = InitModel<float>(small, schema, Vocab::FromTokens({"a", "b"}));
    long heads = 0;
    for (int t = kF2W1; t <= kF3LinkB; ++t) heads += m.params[t].size();
    EXPECT_EQ(heads, HeadParameterCount(small, schema));
    EXPECT_EQ(m.params.Count(), TotalParameterCount(small, schema, 3));
  }
}

TEST(ConfigTest, JsonRoundTripAndUnknownKey) {
  ModelConfig c;
  c.ffn_hidden = 150;
  c.mode = LinearizeMode::kSingleLink;
  EXPECT_EQ(ConfigFromJson(ConfigToJson(c)), c);
  EXPECT_EQ(ConfigFromJson(Json{{"epochs", 3}}).epochs, 3);
  EXPECT_THROW(ConfigFromJson(Json{{"hidden", 3}}), Error);
  EXPECT_THROW(ConfigFromJson(Json{{"batch_size", 0}}), Error);
}

class ModelIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("aasp_model_io_" + std::to_string(getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string Path(const std::string &name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST(Base64Test, RoundTripAllLengths) {
  for (int n = 0; n < 10; ++n) {
    std::vector<uint8_t> bytes;
    for (int i = 0; i < n; ++i) bytes.push_back(static_cast<uint8_t>(37 * i + 250));
    EXPECT_EQ(internal::Base64Decode(internal::Base64Encode(bytes), "t"), bytes);
  }
  EXPECT_EQ(internal::Base64Encode({'f', 'o', 'o', 'b'}), "Zm9vYg==");
}

TEST_F(ModelIoTest, RoundTripIsBitExact) {
  auto data = Synthetic(4, StructureMode::kGraph);
  auto m = ModelFor<float>(SmallConfig(LinearizeMode::kSingleLink), Schema::Cdcp(), data);
  m.params[kF1B2](0, 0) = -0.0f;
  m.params[kF1B2](1, 0) = 1e-42f;  // subnormal
  SaveModel(m, Path("m.json"));
  Model<float> back = LoadModel(Path("m.json"));
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.vocab, m.vocab);
  EXPECT_EQ(back.schema.ac_types, m.schema.ac_types);
  ASSERT_EQ(back.params.t.size(), m.params.t.size());
  for (size_t i = 0; i < m.params.t.size(); ++i) {
    ASSERT_EQ(back.params.t[i].size(), m.params.t[i].size());
    EXPECT_EQ(std::memcmp(back.params.t[i].data(), m.params.t[i].data(), 4 * m.params.t[i].size()), 0);
  }
  EXPECT_EQ(Predict(back, {data[0].paragraph})[0], Predict(m, {data[0].paragraph})[0]);
  NeuralScorer<float> a(m), b(back);
  DecoderState st = InitialState(data[1].paragraph.size());
  auto cands = LegalActions(st, m.schema, m.config.mode);
  EXPECT_EQ(a.Begin(data[1].paragraph)->ScoreJoint(st, cands),
            b.Begin(data[1].paragraph)->ScoreJoint(st, cands));
}

TEST_F(ModelIoTest, StructuredErrors) {
  auto data = Synthetic(2, StructureMode::kTree);
  auto m = ModelFor<float>(SmallConfig(), Schema::Aae(), data);
  Json j = ModelToJson(m);
  auto expect_code = [&](const std::string &text, ErrorCode code) {
    WriteFile(Path("bad.json"), text);
    try {
      LoadModel(Path("bad.json"));
      ADD_FAILURE() << "expected an error";
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  Json v = j;
  v["version"] = kModelVersion + 1;
  expect_code(v.dump(), ErrorCode::kVersion);
  const std::string full = j.dump();
  expect_code(full.substr(0, full.size() / 2), ErrorCode::kParse);
  Json t = j;
  std::string data0 = t["tensors"][0]["data"].get<std::string>();
  t["tensors"][0]["data"] = data0.substr(0, data0.size() - 4);
  expect_code(t.dump(), ErrorCode::kParse);
  Json c = j;
  c["tensors"][1]["data"] = "!!!!";
  expect_code(c.dump(), ErrorCode::kParse);
  expect_code("{\"format\":\"something-else\"}", ErrorCode::kParse);
  try {
    LoadModel(Path("missing.json"));
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(TrainTest, OneEpochOneRecord) {
  auto data = Synthetic(2, StructureMode::kTree);
  ModelConfig c = SmallConfig();
  c.epochs = 1;
  TrainResult r = Train(c, Schema::Aae(), data, data);
  ASSERT_EQ(r.history.size(), 1u);
  EXPECT_TRUE(r.history[0].dev.has_value());
  EXPECT_EQ(r.best_epoch, 1);
}

TEST(TrainTest, LossDecreasesOnSmallCorpus) {
  auto data = Synthetic(10, StructureMode::kTree);
  ModelConfig c = SmallConfig();
  c.epochs = 5;
  TrainResult r = Train(c, Schema::Aae(), data, {});
  ASSERT_EQ(r.history.size(), 5u);
  EXPECT_LT(r.history.back().loss, r.history.front().loss);
  EXPECT_FALSE(r.history[0].dev.has_value());
}

TEST(TrainTest, EmptyCorpusRejected) {
  try {
    Train(SmallConfig(), Schema::Aae(), {}, {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(TrainTest, DeterministicGivenSeed) {
  auto data = Synthetic(6, StructureMode::kGraph);
  ModelConfig c = SmallConfig(LinearizeMode::kSingleLink);
  c.epochs = 3;
  c.batch_size = 2;
  TrainResult a = Train(c, Schema::Cdcp(), data, data), b = Train(c, Schema::Cdcp(), data, data);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].loss, b.history[i].loss);
  for (size_t i = 0; i < a.model.params.t.size(); ++i) {
    EXPECT_TRUE(a.model.params.t[i] == b.model.params.t[i]);
  }
  c.seed = 2;
  TrainResult other = Train(c, Schema::Cdcp(), data, data);
  EXPECT_FALSE(other.model.params.t[kEmb] == a.model.params.t[kEmb]);
}

TEST(TrainTest, StopCallbackEndsEarly) {
  auto data = Synthetic(3, StructureMode::kTree);
  ModelConfig c = SmallConfig();
  c.epochs = 10;
  TrainOptions o;
  o.stop = [](const EpochRecord &r) { return r.epoch == 2; };
  EXPECT_EQ(Train(c, Schema::Aae(), data, data, o).history.size(), 2u);
  Json j = EpochRecordToJson(Train(c, Schema::Aae(), data, data, o).history[0]);
  EXPECT_TRUE(j.contains("dev_f1"));
  EXPECT_TRUE(j["dev_f1"].contains("ARC"));
}

}  // namespace
}  // namespace aasp
