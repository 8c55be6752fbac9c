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

// Greedy constrained decoding over the dynamic action vocabulary, generic
// over a scorer.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "aasp/actions.hpp"
#include "aasp/error.hpp"
#include "aasp/structure.hpp"
#include "aasp/transition.hpp"

namespace aasp {

struct LinkScores {
  std::vector<double> scores;
  double null_score = 0.0;
};

// Per-paragraph scoring context. Sessions may cache per-step state; the
// decoder calls Advance after every executed step.
class ScoringSession {
 public:
  virtual ~ScoringSession() = default;

  // One score per candidate, in candidate order.
  virtual std::vector<double> ScoreJoint(const DecoderState &state,
                                         const std::vector<Candidate> &candidates) = 0;

  // Multi-link stage: scores each link option for the close about to execute
  // against a null (no link) score.
  virtual LinkScores ScoreLinks(const DecoderState &state, const Candidate &close,
                                const std::vector<LinkOption> &options) = 0;

  virtual void Advance(const DecoderState &before, const ActionStep &step) {}
};

// A scorer is read-only during decoding; one session per paragraph.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::unique_ptr<ScoringSession> Begin(const Paragraph &p) const = 0;
};

struct DecodeOptions {
  Schema schema;
  LinearizeMode mode = LinearizeMode::kMultiLink;
  int max_steps = 256;
  int max_open = 1;
};

struct DecodeResult {
  ActionSequence sequence;
  bool truncated = false;
  int forced_copies = 0;
};

namespace internal {

inline void CheckScores(const std::vector<double> &scores, size_t expected) {
  if (scores.size() != expected) {
    Fail(ErrorCode::kInternal, "scorer returned ", scores.size(),
         " scores for ", expected, " candidates");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) Fail(ErrorCode::kInternal, "scorer returned a non-finite score");
  }
}

// First index of the maximum; ties resolve to enumeration order.
inline size_t ArgMax(const std::vector<double> &scores) {
  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

// Accepts every option scoring strictly above the null score, then resolves
// conflicts best-first: one relation per ordered pair, and in tree mode at
// most one relation headed by the new mention.
inline std::vector<LinkOption> SelectLinks(const DecoderState &state,
                                           const Schema &schema,
                                           const std::vector<LinkOption> &options,
                                           const LinkScores &scored) {
  std::vector<size_t> accepted;
  for (size_t i = 0; i < options.size(); ++i) {
    if (scored.scores[i] > scored.null_score) accepted.push_back(i);
  }
  std::stable_sort(accepted.begin(), accepted.end(), [&](size_t a, size_t b) {
    return scored.scores[a] > scored.scores[b];
  });
  std::vector<LinkOption> kept;
  bool current_heads = false;
  for (size_t i : accepted) {
    const LinkOption &o = options[i];
    bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const LinkOption &k) {
      return k.mention == o.mention && k.direction == o.direction;
    });
    if (duplicate) continue;
    if (o.direction == Direction::kHeadIsCurrent) {
      if (schema.mode == StructureMode::kTree && current_heads) continue;
      current_heads = true;
    }
    kept.push_back(o);
  }
  std::sort(kept.begin(), kept.end(), [](const LinkOption &a, const LinkOption &b) {
    return std::pair(a.mention, a.direction) < std::pair(b.mention, b.direction);
  });
  return kept;
}

}  // namespace internal

// Greedy argmax decoding (ties go to the earliest candidate). If the step
// budget only leaves room for the remaining copies, the rest of the paragraph
// is force-copied and the result is marked truncated, so the output never
// exceeds max_steps.
inline DecodeResult DecodeGreedy(const Scorer &scorer, const Paragraph &p,
                                 const DecodeOptions &options) {
  const int n = p.size();
  if (options.max_steps < n) {
    Fail(ErrorCode::kInvalidArgument, "max_steps ", options.max_steps,
         " is smaller than the paragraph length ", n);
  }
  DecodeResult result;
  result.sequence.paragraph_id = p.id;
  std::unique_ptr<ScoringSession> session = scorer.Begin(p);
  DecoderState state = InitialState(n, options.max_open);
  while (!state.terminal()) {
    const int budget = options.max_steps - state.step_count();
    if (budget <= state.token_count - state.cursor) {
      result.truncated = true;
      while (state.tokens_remain()) {
        ActionStep copy = ActionStep::Copy();
        session->Advance(state, copy);
        state = ApplyAction(std::move(state), copy, options.schema);
        ++result.forced_copies;
      }
      break;
    }
    std::vector<Candidate> candidates = LegalActions(state, options.schema, options.mode);
    std::vector<double> scores = session->ScoreJoint(state, candidates);
    internal::CheckScores(scores, candidates.size());
    const Candidate &best = candidates[internal::ArgMax(scores)];
    std::vector<LinkOption> links;
    if (best.kind == ActionKind::kClose && options.mode == LinearizeMode::kMultiLink) {
      std::vector<LinkOption> link_options = LinkCandidates(state, options.schema);
      if (!link_options.empty()) {
        LinkScores scored = session->ScoreLinks(state, best, link_options);
        internal::CheckScores(scored.scores, link_options.size());
        if (!std::isfinite(scored.null_score)) {
          Fail(ErrorCode::kInternal, "scorer returned a non-finite null score");
        }
        links = internal::SelectLinks(state, options.schema, link_options, scored);
      }
    }
    ActionStep step = ToStep(best, state, options.schema, links);
    session->Advance(state, step);
    state = ApplyAction(std::move(state), step, options.schema);
  }
  result.sequence.steps = std::move(state.history);
  return result;
}

// Test oracle replaying a known sequence: the gold step at each position
// scores 1 and everything else 0; gold links score 1 against a null of 0.5.
class OracleScorer : public Scorer {
 public:
  OracleScorer(ActionSequence gold, Schema schema)
      : gold_(std::move(gold)), schema_(std::move(schema)) {}

  std::unique_ptr<ScoringSession> Begin(const Paragraph &) const override {
    return std::make_unique<Session>(this);
  }

 private:
  class Session : public ScoringSession {
   public:
    explicit Session(const OracleScorer *owner) : owner_(owner) {}

    std::vector<double> ScoreJoint(const DecoderState &state,
                                   const std::vector<Candidate> &candidates) override {
      std::vector<double> scores(candidates.size(), 0.0);
      const ActionStep *gold = GoldAt(state);
      if (gold == nullptr) return scores;
      for (size_t i = 0; i < candidates.size(); ++i) {
        const Candidate &c = candidates[i];
        if (c.kind != gold->kind) continue;
        if (c.kind != ActionKind::kClose) {
          scores[i] = 1.0;
          continue;
        }
        if (c.boundary != gold->boundary ||
            owner_->schema_.ac_types[c.ac_type] != gold->ac_type) {
          continue;
        }
        if (c.link.has_value()) {
          if (gold->links.size() == 1 && IsGoldLink(state, *c.link, *gold)) scores[i] = 1.0;
        } else if (gold->links.empty() || !SingleLinkCandidates(candidates)) {
          scores[i] = 1.0;
        }
      }
      return scores;
    }

    LinkScores ScoreLinks(const DecoderState &state, const Candidate &,
                          const std::vector<LinkOption> &options) override {
      LinkScores out;
      out.scores.assign(options.size(), 0.0);
      out.null_score = 0.5;
      const ActionStep *gold = GoldAt(state);
      if (gold == nullptr || !gold->is_close()) return out;
      for (size_t i = 0; i < options.size(); ++i) {
        if (IsGoldLink(state, options[i], *gold)) out.scores[i] = 1.0;
      }
      return out;
    }

   private:
    const ActionStep *GoldAt(const DecoderState &state) const {
      const auto &steps = owner_->gold_.steps;
      if (state.step_count() >= static_cast<int>(steps.size())) return nullptr;
      return &steps[state.step_count()];
    }

    bool IsGoldLink(const DecoderState &state, const LinkOption &option,
                    const ActionStep &gold) const {
      Link link{state.mentions[option.mention].step,
                owner_->schema_.ar_types[option.ar_type], option.direction};
      return std::find(gold.links.begin(), gold.links.end(), link) != gold.links.end();
    }

    static bool SingleLinkCandidates(const std::vector<Candidate> &candidates) {
      return std::any_of(candidates.begin(), candidates.end(),
                         [](const Candidate &c) { return c.link.has_value(); });
    }

    const OracleScorer *owner_;
  };

  ActionSequence gold_;
  Schema schema_;
};

// Uniform random scores, seeded per (seed, paragraph id).
class RandomScorer : public Scorer {
 public:
  explicit RandomScorer(uint64_t seed) : seed_(seed) {}

  std::unique_ptr<ScoringSession> Begin(const Paragraph &p) const override {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : p.id) h = (h ^ c) * 1099511628211ULL;
    return std::make_unique<Session>(seed_ ^ h);
  }

 private:
  class Session : public ScoringSession {
   public:
    explicit Session(uint64_t seed) : rng_(seed) {}

    std::vector<double> ScoreJoint(const DecoderState &,
                                   const std::vector<Candidate> &candidates) override {
      std::vector<double> scores(candidates.size());
      for (double &s : scores) s = Draw();
      return scores;
    }

    LinkScores ScoreLinks(const DecoderState &, const Candidate &,
                          const std::vector<LinkOption> &options) override {
      LinkScores out;
      out.null_score = Draw();
      out.scores.resize(options.size());
      for (double &s : out.scores) s = Draw();
      return out;
    }

   private:
    double Draw() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
  };

  uint64_t seed_;
};

// Every candidate scores zero, so decoding copies the whole paragraph.
class ZeroScorer : public Scorer {
 public:
  std::unique_ptr<ScoringSession> Begin(const Paragraph &) const override {
    return std::make_unique<Session>();
  }

 private:
  class Session : public ScoringSession {
   public:
    std::vector<double> ScoreJoint(const DecoderState &,
                                   const std::vector<Candidate> &candidates) override {
      return std::vector<double>(candidates.size(), 0.0);
    }
    LinkScores ScoreLinks(const DecoderState &, const Candidate &,
                          const std::vector<LinkOption> &options) override {
      return {std::vector<double>(options.size(), 0.0), 0.0};
    }
  };
};

struct BatchItem {
  ArgStructure structure;
  ActionSequence actions;
  std::vector<Repair> repairs;
  bool truncated = false;
  std::string error;  // non-empty when decoding this paragraph failed

  bool ok() const { return error.empty(); }
};

// Decodes and delinearizes every paragraph. Failures stay local to their
// paragraph (reported in BatchItem::error with an AC-free structure). With
// threads > 1 paragraphs run concurrently; results keep input order.
inline std::vector<BatchItem> BatchDecode(const Scorer &scorer,
                                          const std::vector<Paragraph> &paragraphs,
                                          const DecodeOptions &options,
                                          int threads = 1) {
  std::vector<BatchItem> out(paragraphs.size());
  auto run = [&](size_t i) {
    BatchItem &item = out[i];
    item.structure.paragraph = paragraphs[i];
    try {
      DecodeResult decoded = DecodeGreedy(scorer, paragraphs[i], options);
      Delinearization d = Delinearize(decoded.sequence, paragraphs[i], &options.schema);
      item.structure = std::move(d.structure);
      item.repairs = std::move(d.repairs);
      item.truncated = decoded.truncated;
      item.actions = std::move(decoded.sequence);
    } catch (const std::exception &e) {
      item.error = e.what();
    }
  };
  if (threads <= 1 || paragraphs.size() < 2) {
    for (size_t i = 0; i < paragraphs.size(); ++i) run(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (size_t i = next++; i < paragraphs.size(); i = next++) run(i);
    });
  }
  for (auto &w : workers) w.join();
  return out;
}

}  // namespace aasp
