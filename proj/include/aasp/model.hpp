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

// Small recurrent encoder-decoder scorer.
//
// Encoder: token embeddings through forward and backward Elman layers,
// summed into one context vector per token.
// Decoder: Elman layer over executed actions. The input of a step is
// [symbol embedding; context of the copied token (copy only); context of the
// next uncopied token]. A close's symbol embedding adds its AC type embedding
// and one embedding per (AR type, direction) link.
//
// H[0] is the state after a start symbol, H[j+1] the state after step j; the
// decision at step n reads h = H[n]. For a close with open step b the span
// representation is p = [h; H[b+1]].
//
// Heads:
//   FFN1: h -> relu(ffn1_hidden) -> {copy, open, close}
//   FFN2: p -> relu(H) -> boundary score
//   FFN3: z = Wp p + b; relu(z) -> null score and AC type scores;
//         relu(z + Wa a_m) -> 2|AR| link scores against mention m, where a_m
//         is the p vector stored when m was closed.
// close score = FFN1[close] + FFN2 + type[t] (+ link or null score when the
// candidate carries its single link).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aasp/actions.hpp"
#include "aasp/corpus.hpp"
#include "aasp/decoder.hpp"
#include "aasp/error.hpp"
#include "aasp/structure.hpp"
#include "aasp/transition.hpp"

namespace aasp {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct ModelConfig {
  int embed_dim = 64;
  int context_dim = 128;
  int ffn1_hidden = 256;
  int ffn_hidden = 1500;
  uint64_t seed = 1;
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables
  int epochs = 30;
  int batch_size = 1;
  LinearizeMode mode = LinearizeMode::kMultiLink;

  bool operator==(const ModelConfig &) const = default;
};

inline void CheckConfig(const ModelConfig &c) {
  if (c.embed_dim < 1 || c.context_dim < 1 || c.ffn1_hidden < 1 || c.ffn_hidden < 1) {
    Fail(ErrorCode::kInvalidArgument, "model dimensions must be >= 1");
  }
  if (c.epochs < 0 || c.batch_size < 1) {
    Fail(ErrorCode::kInvalidArgument, "epochs must be >= 0 and batch_size >= 1");
  }
  if (!(c.learning_rate > 0) || c.weight_decay < 0) {
    Fail(ErrorCode::kInvalidArgument, "learning_rate must be > 0, weight_decay >= 0");
  }
}

inline Json ConfigToJson(const ModelConfig &c) {
  return Json{{"embed_dim", c.embed_dim},       {"context_dim", c.context_dim},
              {"ffn1_hidden", c.ffn1_hidden},   {"ffn_hidden", c.ffn_hidden},
              {"seed", c.seed},                 {"learning_rate", c.learning_rate},
              {"weight_decay", c.weight_decay}, {"beta1", c.beta1},
              {"beta2", c.beta2},               {"adam_epsilon", c.adam_epsilon},
              {"clip_norm", c.clip_norm},       {"epochs", c.epochs},
              {"batch_size", c.batch_size},     {"mode", LinearizeModeName(c.mode)}};
}

// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
inline ModelConfig ConfigFromJson(const Json &j, ModelConfig base = {}) {
  if (!j.is_object()) Fail(ErrorCode::kParse, "model config: expected an object");
  try {
    for (const auto &item : j.items()) {
      const std::string &k = item.key();
      const Json &v = item.value();
      if (k == "embed_dim") base.embed_dim = v.get<int>();
      else if (k == "context_dim") base.context_dim = v.get<int>();
      else if (k == "ffn1_hidden") base.ffn1_hidden = v.get<int>();
      else if (k == "ffn_hidden") base.ffn_hidden = v.get<int>();
      else if (k == "seed") base.seed = v.get<uint64_t>();
      else if (k == "learning_rate") base.learning_rate = v.get<double>();
      else if (k == "weight_decay") base.weight_decay = v.get<double>();
      else if (k == "beta1") base.beta1 = v.get<double>();
      else if (k == "beta2") base.beta2 = v.get<double>();
      else if (k == "adam_epsilon") base.adam_epsilon = v.get<double>();
      else if (k == "clip_norm") base.clip_norm = v.get<double>();
      else if (k == "epochs") base.epochs = v.get<int>();
      else if (k == "batch_size") base.batch_size = v.get<int>();
      else if (k == "mode") base.mode = ParseLinearizeMode(v.get<std::string>());
      else Fail(ErrorCode::kParse, "model config: unknown key '", k, "'");
    }
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kParse, "model config: ", e.what());
  }
  CheckConfig(base);
  return base;
}

// Token vocabulary; id 0 is the unknown token.
class Vocab {
 public:
  static constexpr const char *kUnknown = "<unk>";

  Vocab() : tokens_{kUnknown} { index_[kUnknown] = 0; }

  static Vocab Build(const std::vector<ArgStructure> &structures) {
    std::vector<std::string> all;
    for (const auto &s : structures) {
      all.insert(all.end(), s.paragraph.tokens.begin(), s.paragraph.tokens.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return FromTokens(all);
  }

  static Vocab FromTokens(const std::vector<std::string> &tokens) {
    Vocab v;
    for (const auto &t : tokens) {
      if (t == kUnknown) continue;
      if (v.index_.emplace(t, static_cast<int>(v.tokens_.size())).second) v.tokens_.push_back(t);
    }
    return v;
  }

  int size() const { return static_cast<int>(tokens_.size()); }
  int Id(const std::string &token) const {
    auto it = index_.find(token);
    return it == index_.end() ? 0 : it->second;
  }
  std::vector<int> Ids(const Paragraph &p) const {
    std::vector<int> ids;
    for (const auto &t : p.tokens) ids.push_back(Id(t));
    return ids;
  }
  const std::vector<std::string> &tokens() const { return tokens_; }
  bool operator==(const Vocab &o) const { return tokens_ == o.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

enum TensorId : int {
  kEmb,
  kFwW, kFwU, kFwB,
  kBwW, kBwU, kBwB,
  kSym, kAcEmb, kArEmb,
  kDecW, kDecU, kDecB,
  kF1W1, kF1B1, kF1W2, kF1B2,
  kF2W1, kF2B1, kF2W2, kF2B2,
  kF3Wp, kF3B, kF3Wa, kF3NullW, kF3NullB, kF3TypeW, kF3TypeB, kF3LinkW, kF3LinkB,
  kNumTensors
};

// Symbol embedding rows.
enum SymbolRow : int { kSymStart = 0, kSymCopy, kSymOpen, kSymClose, kNumSymbols };

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  int fan_in = 1;
};

inline std::vector<TensorSpec> TensorSpecs(const ModelConfig &c, const Schema &schema,
                                           int vocab_size) {
  const int E = c.embed_dim, C = c.context_dim, F = c.ffn1_hidden, H = c.ffn_hidden;
  const int A = schema.num_ac_types(), R2 = 2 * schema.num_ar_types();
  const int X = E + 2 * C;
  return {
      {"embedding", vocab_size, E, E},
      {"encoder.forward.W", C, E, E},   {"encoder.forward.U", C, C, C},
      {"encoder.forward.b", C, 1, C},   {"encoder.backward.W", C, E, E},
      {"encoder.backward.U", C, C, C},  {"encoder.backward.b", C, 1, C},
      {"symbol_embedding", kNumSymbols, E, E},
      {"ac_embedding", A, E, E},        {"ar_embedding", R2, E, E},
      {"decoder.W", C, X, X},           {"decoder.U", C, C, C},
      {"decoder.b", C, 1, C},
      {"ffn1.W1", F, C, C},             {"ffn1.b1", F, 1, C},
      {"ffn1.W2", 3, F, F},             {"ffn1.b2", 3, 1, F},
      {"ffn2.W1", H, 2 * C, 2 * C},     {"ffn2.b1", H, 1, 2 * C},
      {"ffn2.W2", 1, H, H},             {"ffn2.b2", 1, 1, H},
      {"ffn3.Wp", H, 2 * C, 2 * C},     {"ffn3.b", H, 1, 2 * C},
      {"ffn3.Wa", H, 2 * C, 2 * C},
      {"ffn3.null.W", 1, H, H},         {"ffn3.null.b", 1, 1, H},
      {"ffn3.type.W", A, H, H},         {"ffn3.type.b", A, 1, H},
      {"ffn3.link.W", R2, H, H},        {"ffn3.link.b", R2, 1, H},
  };
}

template <typename S>
struct Parameters {
  std::vector<Mat<S>> t;

  Mat<S> &operator[](int i) { return t[i]; }
  const Mat<S> &operator[](int i) const { return t[i]; }

  static Parameters Zeros(const std::vector<TensorSpec> &specs) {
    Parameters p;
    for (const auto &s : specs) p.t.push_back(Mat<S>::Zero(s.rows, s.cols));
    return p;
  }
  void SetZero() {
    for (auto &m : t) m.setZero();
  }
  long Count() const {
    long n = 0;
    for (const auto &m : t) n += m.size();
    return n;
  }
  template <typename T>
  Parameters<T> Cast() const {
    Parameters<T> out;
    for (const auto &m : t) out.t.push_back(m.template cast<T>());
    return out;
  }
};

template <typename S>
struct Model {
  ModelConfig config;
  Schema schema;
  Vocab vocab;
  Parameters<S> params;

  std::vector<TensorSpec> Specs() const { return TensorSpecs(config, schema, vocab.size()); }

  template <typename T>
  Model<T> Cast() const {
    return {config, schema, vocab, params.template Cast<T>()};
  }
};

namespace internal {

inline double UniformDraw(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace internal

// Every tensor uniform in +-1/sqrt(fan_in), drawn in declaration order from
// one generator seeded by config.seed.
template <typename S>
Model<S> InitModel(const ModelConfig &config, const Schema &schema, const Vocab &vocab) {
  CheckConfig(config);
  CheckSchema(schema);
  Model<S> m{config, schema, vocab, {}};
  std::mt19937_64 rng(config.seed);
  for (const TensorSpec &spec : m.Specs()) {
    Mat<S> w(spec.rows, spec.cols);
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
    for (int c = 0; c < spec.cols; ++c) {
      for (int r = 0; r < spec.rows; ++r) {
        w(r, c) = static_cast<S>((2.0 * internal::UniformDraw(rng) - 1.0) * bound);
      }
    }
    m.params.t.push_back(std::move(w));
  }
  return m;
}

// Parameter counts of the FFN2 and FFN3 heads, the part that scales with
// ffn_hidden.
inline long HeadParameterCount(const ModelConfig &c, const Schema &schema) {
  const long C2 = 2L * c.context_dim, H = c.ffn_hidden;
  const long A = schema.num_ac_types(), R2 = 2L * schema.num_ar_types();
  const long ffn2 = C2 * H + H + H + 1;
  const long ffn3 = C2 * H + H + C2 * H + (H + 1) + (A * H + A) + (R2 * H + R2);
  return ffn2 + ffn3;
}

inline long TotalParameterCount(const ModelConfig &c, const Schema &schema, int vocab_size) {
  long n = 0;
  for (const TensorSpec &s : TensorSpecs(c, schema, vocab_size)) n += long(s.rows) * s.cols;
  return n;
}

// ---------------------------------------------------------------------------
// Forward pieces shared by training and inference.

template <typename S>
struct Encoding {
  std::vector<int> ids;
  Mat<S> f, g, ctx;  // C x n
};

template <typename S>
Encoding<S> Encode(const Model<S> &m, const std::vector<int> &ids) {
  const auto &P = m.params;
  const int n = static_cast<int>(ids.size()), C = m.config.context_dim;
  Encoding<S> e{ids, Mat<S>(C, n), Mat<S>(C, n), Mat<S>(C, n)};
  Vec<S> prev = Vec<S>::Zero(C);
  for (int i = 0; i < n; ++i) {
    Vec<S> a = P[kFwW] * P[kEmb].row(ids[i]).transpose() + P[kFwU] * prev + P[kFwB].col(0);
    e.f.col(i) = a.array().tanh().matrix();
    prev = e.f.col(i);
  }
  prev.setZero();
  for (int i = n - 1; i >= 0; --i) {
    Vec<S> a = P[kBwW] * P[kEmb].row(ids[i]).transpose() + P[kBwU] * prev + P[kBwB].col(0);
    e.g.col(i) = a.array().tanh().matrix();
    prev = e.g.col(i);
  }
  e.ctx = e.f + e.g;
  return e;
}

template <typename S>
Encoding<S> Encode(const Model<S> &m, const Paragraph &p) {
  return Encode(m, m.vocab.Ids(p));
}

// What a decoder input is made of.
struct InputSpec {
  int symbol = kSymStart;
  int ac_type = -1;
  std::vector<int> ar_rows;  // ar_type * 2 + direction
  int copied = -1;           // token whose context is consumed
  int next = -1;             // next uncopied token after the step

  bool operator==(const InputSpec &) const = default;
};

inline int DirectionIndex(Direction d) { return d == Direction::kHeadIsCurrent ? 0 : 1; }

inline InputSpec StartInput(int token_count) {
  InputSpec in;
  in.next = token_count > 0 ? 0 : -1;
  return in;
}

inline InputSpec StepInput(const DecoderState &before, const ActionStep &step,
                           const Schema &schema) {
  InputSpec in;
  int cursor = before.cursor;
  switch (step.kind) {
    case ActionKind::kCopy:
      in.symbol = kSymCopy;
      in.copied = cursor++;
      break;
    case ActionKind::kOpen:
      in.symbol = kSymOpen;
      break;
    case ActionKind::kClose:
      in.symbol = kSymClose;
      in.ac_type = schema.AcIndex(step.ac_type);
      for (const Link &l : step.links) {
        in.ar_rows.push_back(schema.ArIndex(l.ar_type) * 2 + DirectionIndex(l.direction));
      }
      break;
  }
  in.next = cursor < before.token_count ? cursor : -1;
  return in;
}

namespace internal {

// When set, every ReLU folds its sign pattern into this hash. Used by the
// gradient check to detect perturbations that cross a kink.
inline thread_local uint64_t *relu_signature = nullptr;

template <typename S>
Vec<S> Relu(const Vec<S> &u) {
  if (relu_signature != nullptr) {
    uint64_t h = *relu_signature;
    for (Eigen::Index i = 0; i < u.size(); ++i) h = (h ^ (u[i] > S(0) ? 0x9eU : 0x37U)) * 0x100000001b3ULL;
    *relu_signature = h;
  }
  return u.cwiseMax(S(0));
}

}  // namespace internal

template <typename S>
Vec<S> BuildInput(const Model<S> &m, const Encoding<S> &enc, const InputSpec &in) {
  const auto &P = m.params;
  const int E = m.config.embed_dim, C = m.config.context_dim;
  Vec<S> x = Vec<S>::Zero(E + 2 * C);
  x.head(E) = P[kSym].row(in.symbol).transpose();
  if (in.ac_type >= 0) x.head(E) += P[kAcEmb].row(in.ac_type).transpose();
  for (int r : in.ar_rows) x.head(E) += P[kArEmb].row(r).transpose();
  if (in.copied >= 0) x.segment(E, C) = enc.ctx.col(in.copied);
  if (in.next >= 0) x.tail(C) = enc.ctx.col(in.next);
  return x;
}

template <typename S>
Vec<S> DecoderStep(const Model<S> &m, const Vec<S> &x, const Vec<S> *prev) {
  const auto &P = m.params;
  Vec<S> a = P[kDecW] * x + P[kDecB].col(0);
  if (prev != nullptr) a += P[kDecU] * *prev;
  return a.array().tanh().matrix();
}

template <typename S>
struct Ffn1Eval {
  Vec<S> u, r, s;  // s: copy, open, close
};

template <typename S>
Ffn1Eval<S> EvalFfn1(const Model<S> &m, const Vec<S> &h) {
  const auto &P = m.params;
  Ffn1Eval<S> e;
  e.u = P[kF1W1] * h + P[kF1B1].col(0);
  e.r = internal::Relu(e.u);
  e.s = P[kF1W2] * e.r + P[kF1B2].col(0);
  return e;
}

// FFN2 and the shared part of FFN3 for one open boundary.
template <typename S>
struct BoundaryEval {
  int boundary = -1;
  Vec<S> p;
  Vec<S> u2, r2;
  S s2 = 0;
  Vec<S> z, g0;
  Vec<S> type;
  S null = 0;
};

template <typename S>
BoundaryEval<S> EvalBoundary(const Model<S> &m, int boundary, const Vec<S> &h, const Vec<S> &hb) {
  const auto &P = m.params;
  const int C = m.config.context_dim;
  BoundaryEval<S> e;
  e.boundary = boundary;
  e.p.resize(2 * C);
  e.p << h, hb;
  e.u2 = P[kF2W1] * e.p + P[kF2B1].col(0);
  e.r2 = internal::Relu(e.u2);
  e.s2 = P[kF2W2].row(0).dot(e.r2) + P[kF2B2](0, 0);
  e.z = P[kF3Wp] * e.p + P[kF3B].col(0);
  e.g0 = internal::Relu(e.z);
  e.type = P[kF3TypeW] * e.g0 + P[kF3TypeB].col(0);
  e.null = P[kF3NullW].row(0).dot(e.g0) + P[kF3NullB](0, 0);
  return e;
}

// Stored per closed mention: a = p at its close, A = Wa a.
template <typename S>
struct MentionEval {
  int close_step = -1;
  int boundary = -1;
  Vec<S> a, A;
};

template <typename S>
MentionEval<S> EvalMention(const Model<S> &m, int close_step, int boundary, const Vec<S> &h,
                           const Vec<S> &hb) {
  MentionEval<S> e{close_step, boundary, Vec<S>(2 * m.config.context_dim), {}};
  e.a << h, hb;
  e.A = m.params[kF3Wa] * e.a;
  return e;
}

// Link scores (2|AR|, index ar*2+direction) of a boundary against a mention.
template <typename S>
Vec<S> LinkScoresFor(const Model<S> &m, const BoundaryEval<S> &b, const MentionEval<S> &me,
                     Vec<S> *q_out = nullptr) {
  Vec<S> q = internal::Relu<S>(b.z + me.A);
  Vec<S> ls = m.params[kF3LinkW] * q + m.params[kF3LinkB].col(0);
  if (q_out != nullptr) *q_out = std::move(q);
  return ls;
}

inline int LinkIndex(const LinkOption &o) { return o.ar_type * 2 + DirectionIndex(o.direction); }

// Scores candidates given per-step evaluations. `boundaries` must hold an
// entry for every boundary appearing among the close candidates.
template <typename S>
std::vector<S> JointScores(const Model<S> &m, const std::vector<Candidate> &cands,
                           const Ffn1Eval<S> &f1,
                           const std::map<int, BoundaryEval<S>> &boundaries,
                           const std::vector<MentionEval<S>> &mentions,
                           std::map<std::pair<int, int>, Vec<S>> *link_cache) {
  std::vector<S> out(cands.size());
  for (size_t i = 0; i < cands.size(); ++i) {
    const Candidate &c = cands[i];
    if (c.kind == ActionKind::kCopy) {
      out[i] = f1.s(0);
    } else if (c.kind == ActionKind::kOpen) {
      out[i] = f1.s(1);
    } else {
      const BoundaryEval<S> &b = boundaries.at(c.boundary);
      S s = f1.s(2) + b.s2 + b.type(c.ac_type);
      if (c.link) {
        auto key = std::pair(c.boundary, c.link->mention);
        auto it = link_cache->find(key);
        if (it == link_cache->end()) {
          if (c.link->mention < 0 || c.link->mention >= static_cast<int>(mentions.size())) {
            Fail(ErrorCode::kInvalidArgument, "candidate references unregistered mention ",
                 c.link->mention);
          }
          it = link_cache->emplace(key, LinkScoresFor(m, b, mentions[c.link->mention])).first;
        }
        s += it->second(LinkIndex(*c.link));
      } else if (m.config.mode == LinearizeMode::kSingleLink) {
        s += b.null;
      }
      out[i] = s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Teacher-forced loss and its gradient.

template <typename S>
S LogSumExp(const std::vector<S> &v) {
  S mx = *std::max_element(v.begin(), v.end());
  S sum = 0;
  for (S x : v) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

// Index of the candidate that executes `step`; -1 if none does.
inline int GoldCandidateIndex(const DecoderState &state, const std::vector<Candidate> &cands,
                              const ActionStep &step, const Schema &schema, LinearizeMode mode) {
  for (size_t i = 0; i < cands.size(); ++i) {
    const Candidate &c = cands[i];
    if (c.kind != step.kind) continue;
    if (c.kind != ActionKind::kClose) return static_cast<int>(i);
    if (c.boundary != step.boundary || schema.ac_types[c.ac_type] != step.ac_type) continue;
    if (mode == LinearizeMode::kMultiLink) {
      if (!c.link) return static_cast<int>(i);
      continue;
    }
    if (step.links.empty() && !c.link) return static_cast<int>(i);
    if (step.links.size() == 1 && c.link) {
      const Link &l = step.links[0];
      if (state.mentions[c.link->mention].step == l.antecedent &&
          schema.ar_types[c.link->ar_type] == l.ar_type && c.link->direction == l.direction) {
        return static_cast<int>(i);
      }
    }
  }
  return -1;
}

struct LossOptions {
  // Records the softmax over the candidates at every step.
  std::vector<std::vector<double>> *step_probabilities = nullptr;
};

// -sum_n log p(y_n | y_<n, W) over the dynamic candidate sets, plus, in
// multi-link mode, binary cross-entropy of each link option against the null
// score at gold closes. Adds the gradient to `grad` when non-null.
template <typename S>
S ParagraphLoss(const Model<S> &m, const std::vector<int> &ids, const ActionSequence &gold,
                std::type_identity_t<Parameters<S>> *grad, const LossOptions &opt = {}) {
  const auto &P = m.params;
  const Schema &schema = m.schema;
  const LinearizeMode mode = m.config.mode;
  const int n = static_cast<int>(ids.size());
  const int N = static_cast<int>(gold.steps.size());
  const int C = m.config.context_dim, E = m.config.embed_dim;
  if (N == 0) return S(0);

  Encoding<S> enc = Encode(m, ids);
  std::vector<InputSpec> inputs = {StartInput(n)};
  Mat<S> X(E + 2 * C, N), H(C, N);
  X.col(0) = BuildInput(m, enc, inputs[0]);
  H.col(0) = DecoderStep<S>(m, X.col(0), nullptr);

  std::vector<MentionEval<S>> mentions;
  Mat<S> dH;
  std::vector<Vec<S>> dA;
  if (grad != nullptr) dH = Mat<S>::Zero(C, N);

  auto backprop_boundary = [&](const BoundaryEval<S> &b, int step, S ds2, const Vec<S> &dtype,
                               S dnull, const std::map<int, Vec<S>> &dlinks) {
    auto &G = *grad;
    Vec<S> dp = Vec<S>::Zero(2 * C);
    if (ds2 != S(0)) {
      G[kF2W2].row(0) += ds2 * b.r2.transpose();
      G[kF2B2](0, 0) += ds2;
      Vec<S> du = (P[kF2W2].row(0).transpose() * ds2).cwiseProduct(
          (b.u2.array() > S(0)).template cast<S>().matrix());
      G[kF2W1].noalias() += du * b.p.transpose();
      G[kF2B1].col(0) += du;
      dp.noalias() += P[kF2W1].transpose() * du;
    }
    Vec<S> dg0 = P[kF3TypeW].transpose() * dtype + P[kF3NullW].row(0).transpose() * dnull;
    G[kF3TypeW].noalias() += dtype * b.g0.transpose();
    G[kF3TypeB].col(0) += dtype;
    G[kF3NullW].row(0) += dnull * b.g0.transpose();
    G[kF3NullB](0, 0) += dnull;
    Vec<S> dz = dg0.cwiseProduct((b.z.array() > S(0)).template cast<S>().matrix());
    for (const auto &[mi, dls] : dlinks) {
      Vec<S> q;
      LinkScoresFor(m, b, mentions[mi], &q);
      G[kF3LinkW].noalias() += dls * q.transpose();
      G[kF3LinkB].col(0) += dls;
      Vec<S> dpre = (P[kF3LinkW].transpose() * dls)
                        .cwiseProduct((q.array() > S(0)).template cast<S>().matrix());
      dz += dpre;
      dA[mi] += dpre;
    }
    G[kF3Wp].noalias() += dz * b.p.transpose();
    G[kF3B].col(0) += dz;
    dp.noalias() += P[kF3Wp].transpose() * dz;
    dH.col(step) += dp.head(C);
    dH.col(b.boundary + 1) += dp.tail(C);
  };

  S loss = 0;
  DecoderState state = InitialState(n, 1);
  for (int s = 0; s < N; ++s) {
    const ActionStep &step = gold.steps[s];
    std::vector<Candidate> cands = LegalActions(state, schema, mode);
    const int gi = GoldCandidateIndex(state, cands, step, schema, mode);
    if (gi < 0) {
      Fail(ErrorCode::kIllegalAction, "paragraph '", gold.paragraph_id, "' step ", s,
           ": gold action is not in the legal candidate set");
    }
    const Vec<S> h = H.col(s);
    Ffn1Eval<S> f1 = EvalFfn1(m, h);
    std::map<int, BoundaryEval<S>> bounds;
    for (const Candidate &c : cands) {
      if (c.kind == ActionKind::kClose && !bounds.count(c.boundary)) {
        bounds.emplace(c.boundary, EvalBoundary<S>(m, c.boundary, h, H.col(c.boundary + 1)));
      }
    }
    std::map<std::pair<int, int>, Vec<S>> link_cache;
    std::vector<S> scores = JointScores(m, cands, f1, bounds, mentions, &link_cache);
    const S lse = LogSumExp(scores);
    loss += lse - scores[gi];
    if (opt.step_probabilities != nullptr) {
      std::vector<double> probs;
      for (S x : scores) probs.push_back(static_cast<double>(std::exp(x - lse)));
      opt.step_probabilities->push_back(std::move(probs));
    }

    if (grad != nullptr && cands.size() > 1) {
      auto &G = *grad;
      Vec<S> ds1 = Vec<S>::Zero(3);
      struct Acc {
        S ds2 = 0;
        Vec<S> dtype;
        S dnull = 0;
        std::map<int, Vec<S>> dlinks;
      };
      std::map<int, Acc> acc;
      for (size_t i = 0; i < cands.size(); ++i) {
        const S d = std::exp(scores[i] - lse) - (static_cast<int>(i) == gi ? S(1) : S(0));
        const Candidate &c = cands[i];
        if (c.kind == ActionKind::kCopy) {
          ds1(0) += d;
        } else if (c.kind == ActionKind::kOpen) {
          ds1(1) += d;
        } else {
          ds1(2) += d;
          Acc &a = acc[c.boundary];
          if (a.dtype.size() == 0) a.dtype = Vec<S>::Zero(schema.num_ac_types());
          a.ds2 += d;
          a.dtype(c.ac_type) += d;
          if (c.link) {
            Vec<S> &dl = a.dlinks[c.link->mention];
            if (dl.size() == 0) dl = Vec<S>::Zero(2 * schema.num_ar_types());
            dl(LinkIndex(*c.link)) += d;
          } else if (mode == LinearizeMode::kSingleLink) {
            a.dnull += d;
          }
        }
      }
      G[kF1W2].noalias() += ds1 * f1.r.transpose();
      G[kF1B2].col(0) += ds1;
      Vec<S> du1 = (P[kF1W2].transpose() * ds1)
                       .cwiseProduct((f1.u.array() > S(0)).template cast<S>().matrix());
      G[kF1W1].noalias() += du1 * h.transpose();
      G[kF1B1].col(0) += du1;
      dH.col(s) += P[kF1W1].transpose() * du1;
      for (const auto &[b, a] : acc) backprop_boundary(bounds.at(b), s, a.ds2, a.dtype, a.dnull, a.dlinks);
    }

    if (step.is_close() && mode == LinearizeMode::kMultiLink) {
      std::vector<LinkOption> options = LinkCandidates(state, schema);
      const BoundaryEval<S> &b = bounds.at(step.boundary);
      std::vector<bool> matched(step.links.size(), false);
      std::map<int, Vec<S>> dlinks;
      S dnull = 0;
      std::map<int, Vec<S>> per_mention;
      for (const LinkOption &o : options) {
        auto it = per_mention.find(o.mention);
        if (it == per_mention.end()) {
          it = per_mention.emplace(o.mention, LinkScoresFor(m, b, mentions[o.mention])).first;
        }
        const S logit = it->second(LinkIndex(o)) - b.null;
        S y = 0;
        for (size_t k = 0; k < step.links.size(); ++k) {
          const Link &l = step.links[k];
          if (state.mentions[o.mention].step == l.antecedent &&
              schema.ar_types[o.ar_type] == l.ar_type && o.direction == l.direction) {
            y = 1;
            matched[k] = true;
          }
        }
        // softplus(logit) - y * logit, computed stably.
        loss += std::max(logit, S(0)) + std::log1p(std::exp(-std::abs(logit))) - y * logit;
        if (grad != nullptr) {
          const S d = S(1) / (S(1) + std::exp(-logit)) - y;
          Vec<S> &dl = dlinks[o.mention];
          if (dl.size() == 0) dl = Vec<S>::Zero(2 * schema.num_ar_types());
          dl(LinkIndex(o)) += d;
          dnull -= d;
        }
      }
      for (size_t k = 0; k < matched.size(); ++k) {
        if (!matched[k]) {
          Fail(ErrorCode::kIllegalAction, "paragraph '", gold.paragraph_id, "' step ", s,
               ": gold link is not among the link options");
        }
      }
      if (grad != nullptr && !options.empty()) {
        backprop_boundary(b, s, S(0), Vec<S>::Zero(schema.num_ac_types()), dnull, dlinks);
      }
    }

    if (step.is_close()) {
      mentions.push_back(EvalMention<S>(m, s, step.boundary, h, H.col(step.boundary + 1)));
      if (grad != nullptr) dA.push_back(Vec<S>::Zero(m.config.ffn_hidden));
    }
    InputSpec in = StepInput(state, step, schema);
    state = ApplyAction(std::move(state), step, schema);
    if (s + 1 < N) {
      inputs.push_back(in);
      X.col(s + 1) = BuildInput(m, enc, in);
      Vec<S> prev = H.col(s);
      H.col(s + 1) = DecoderStep<S>(m, X.col(s + 1), &prev);
    }
  }
  if (grad == nullptr) return loss;

  auto &G = *grad;
  for (size_t k = 0; k < mentions.size(); ++k) {
    const MentionEval<S> &me = mentions[k];
    G[kF3Wa].noalias() += dA[k] * me.a.transpose();
    Vec<S> da = P[kF3Wa].transpose() * dA[k];
    dH.col(me.close_step) += da.head(C);
    dH.col(me.boundary + 1) += da.tail(C);
  }

  // Decoder BPTT.
  Mat<S> dctx = Mat<S>::Zero(C, n);
  Vec<S> carry = Vec<S>::Zero(C);
  for (int j = N - 1; j >= 0; --j) {
    Vec<S> dh = dH.col(j) + carry;
    Vec<S> da = dh.cwiseProduct((S(1) - H.col(j).array().square()).matrix());
    G[kDecB].col(0) += da;
    G[kDecW].noalias() += da * X.col(j).transpose();
    if (j > 0) {
      G[kDecU].noalias() += da * H.col(j - 1).transpose();
      carry.noalias() = P[kDecU].transpose() * da;
    }
    Vec<S> dx = P[kDecW].transpose() * da;
    const InputSpec &in = inputs[j];
    G[kSym].row(in.symbol) += dx.head(E).transpose();
    if (in.ac_type >= 0) G[kAcEmb].row(in.ac_type) += dx.head(E).transpose();
    for (int r : in.ar_rows) G[kArEmb].row(r) += dx.head(E).transpose();
    if (in.copied >= 0) dctx.col(in.copied) += dx.segment(E, C);
    if (in.next >= 0) dctx.col(in.next) += dx.tail(C);
  }

  // Encoder BPTT, both directions.
  carry.setZero();
  for (int i = n - 1; i >= 0; --i) {
    Vec<S> da = (dctx.col(i) + carry).cwiseProduct((S(1) - enc.f.col(i).array().square()).matrix());
    G[kFwB].col(0) += da;
    G[kFwW].noalias() += da * P[kEmb].row(ids[i]);
    G[kEmb].row(ids[i]) += (P[kFwW].transpose() * da).transpose();
    if (i > 0) G[kFwU].noalias() += da * enc.f.col(i - 1).transpose();
    carry.noalias() = P[kFwU].transpose() * da;
  }
  carry.setZero();
  for (int i = 0; i < n; ++i) {
    Vec<S> da = (dctx.col(i) + carry).cwiseProduct((S(1) - enc.g.col(i).array().square()).matrix());
    G[kBwB].col(0) += da;
    G[kBwW].noalias() += da * P[kEmb].row(ids[i]);
    G[kEmb].row(ids[i]) += (P[kBwW].transpose() * da).transpose();
    if (i + 1 < n) G[kBwU].noalias() += da * enc.g.col(i + 1).transpose();
    carry.noalias() = P[kBwU].transpose() * da;
  }
  return loss;
}

template <typename S>
S NllLoss(const Model<S> &m, const Paragraph &p, const ActionSequence &gold,
          std::type_identity_t<Parameters<S>> *grad = nullptr, const LossOptions &opt = {}) {
  return ParagraphLoss(m, m.vocab.Ids(p), gold, grad, opt);
}

// ---------------------------------------------------------------------------
// Inference.

template <typename S>
class NeuralScorer : public Scorer {
 public:
  explicit NeuralScorer(const Model<S> &model) : model_(model) {}

  std::unique_ptr<ScoringSession> Begin(const Paragraph &p) const override {
    return std::make_unique<Session>(model_, p);
  }

 private:
  class Session : public ScoringSession {
   public:
    Session(const Model<S> &m, const Paragraph &p) : m_(m), enc_(Encode(m, p)) {
      H_.push_back(DecoderStep<S>(m_, BuildInput(m_, enc_, StartInput(p.size())), nullptr));
    }

    std::vector<double> ScoreJoint(const DecoderState &state,
                                   const std::vector<Candidate> &cands) override {
      Prepare(state);
      for (const Candidate &c : cands) {
        if (c.kind == ActionKind::kClose) Boundary(c.boundary);
      }
      std::vector<S> s = JointScores(m_, cands, f1_, bounds_, mentions_, &links_);
      return std::vector<double>(s.begin(), s.end());
    }

    LinkScores ScoreLinks(const DecoderState &state, const Candidate &close,
                          const std::vector<LinkOption> &options) override {
      Prepare(state);
      const BoundaryEval<S> &b = Boundary(close.boundary);
      LinkScores out;
      out.null_score = static_cast<double>(b.null);
      for (const LinkOption &o : options) {
        if (o.mention < 0 || o.mention >= static_cast<int>(mentions_.size())) {
          Fail(ErrorCode::kInvalidArgument, "link option references unregistered mention ",
               o.mention);
        }
        auto key = std::pair(close.boundary, o.mention);
        auto it = links_.find(key);
        if (it == links_.end()) {
          it = links_.emplace(key, LinkScoresFor(m_, b, mentions_[o.mention])).first;
        }
        out.scores.push_back(static_cast<double>(it->second(LinkIndex(o))));
      }
      return out;
    }

    void Advance(const DecoderState &before, const ActionStep &step) override {
      const int s = before.step_count();
      if (step.is_close()) {
        mentions_.push_back(EvalMention<S>(m_, s, step.boundary, H_[s], H_[step.boundary + 1]));
      }
      Vec<S> x = BuildInput(m_, enc_, StepInput(before, step, m_.schema));
      H_.push_back(DecoderStep<S>(m_, x, &H_[s]));
      prepared_ = -1;
    }

   private:
    void Prepare(const DecoderState &state) {
      const int s = state.step_count();
      if (s >= static_cast<int>(H_.size())) {
        Fail(ErrorCode::kInternal, "scoring session is out of sync with the decoder");
      }
      if (prepared_ == s) return;
      prepared_ = s;
      f1_ = EvalFfn1(m_, H_[s]);
      bounds_.clear();
      links_.clear();
    }

    const BoundaryEval<S> &Boundary(int b) {
      auto it = bounds_.find(b);
      if (it == bounds_.end()) {
        it = bounds_.emplace(b, EvalBoundary<S>(m_, b, H_[prepared_], H_[b + 1])).first;
      }
      return it->second;
    }

    const Model<S> &m_;
    Encoding<S> enc_;
    std::vector<Vec<S>> H_;
    std::vector<MentionEval<S>> mentions_;
    int prepared_ = -1;
    Ffn1Eval<S> f1_;
    std::map<int, BoundaryEval<S>> bounds_;
    std::map<std::pair<int, int>, Vec<S>> links_;
  };

  const Model<S> &model_;
};

}  // namespace aasp
