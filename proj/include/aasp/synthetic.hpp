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

// Seeded synthetic corpora with a small template vocabulary.
//
// Each AC is a run of type-specific content words ("claim-3"); an AC that
// heads a relation starts with a cue word for the relation type. Filler words
// separate ACs. Relations always point from later to earlier ACs in an order
// that puts one root AC first, so the relation digraph is acyclic.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aasp/corpus.hpp"
#include "aasp/error.hpp"
#include "aasp/structure.hpp"

namespace aasp {

struct SyntheticOptions {
  uint64_t seed = 1;
  int n_paragraphs = 10;
  int min_tokens = 8;
  int max_tokens = 30;
  double ac_density = 0.1;  // expected ACs per token
  StructureMode mode = StructureMode::kTree;
  Schema schema = Schema::Aae();
  double relation_prob = 0.8;    // a non-root AC heads a relation
  double extra_link_prob = 0.3;  // graph mode: additional outgoing relations
  double dev_fraction = 0.0;
  double test_fraction = 0.0;
  int content_words = 6;  // per AC type
  int filler_words = 40;
};

struct SyntheticCorpus {
  Corpus corpus;
  CorpusStats tally;  // counted while generating
  int vocabulary_size = 0;
};

namespace internal {

inline const std::vector<std::string> &FillerWords() {
  static const std::vector<std::string> words = {
      "the",   "a",      "of",    "and",   "to",     "in",    "is",   "that",
      "it",    "for",    "on",    "with",  "as",     "we",    "they", "this",
      "are",   "be",     "at",    "by",    "from",   "or",    "an",   "was",
      "which", "their",  "has",   "more",  "people", "can",   "also", "some",
      "one",   "other",  "about", "many",  "time",   "there", "when", "these",
      "most",  "such",   "only",  "them",  "would",  "into",  "what", "our",
  };
  return words;
}

inline std::string LowerAscii(std::string s) {
  for (char &c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

inline int Draw(std::mt19937_64 &rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

inline double Draw01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace internal

inline std::string SyntheticContentWord(const std::string &ac_type, int k) {
  return internal::LowerAscii(ac_type) + "-" + std::to_string(k);
}

// Cue words marking a relation head: two per AR type.
inline std::string SyntheticCueWord(const std::string &ar_type, int k) {
  return "cue-" + internal::LowerAscii(ar_type) + "-" + std::to_string(k);
}

inline SyntheticCorpus GenSynthetic(const SyntheticOptions &o) {
  CheckSchema(o.schema);
  if (o.n_paragraphs < 0) Fail(ErrorCode::kInvalidArgument, "n_paragraphs must be >= 0");
  if (o.min_tokens < 1 || o.max_tokens < o.min_tokens) {
    Fail(ErrorCode::kInvalidArgument, "token range must satisfy 1 <= min <= max, got [",
         o.min_tokens, ",", o.max_tokens, "]");
  }
  if (o.ac_density < 0) Fail(ErrorCode::kInvalidArgument, "ac_density must be >= 0");
  // ACs take at least two tokens plus one separator.
  if (o.ac_density * 3.0 > 1.0 + 1e-12) {
    Fail(ErrorCode::kInvalidArgument, "infeasible ac_density ", o.ac_density,
         ": at most 1/3 AC per token fits");
  }
  if (o.dev_fraction < 0 || o.test_fraction < 0 || o.dev_fraction + o.test_fraction > 1) {
    Fail(ErrorCode::kInvalidArgument, "split fractions must be non-negative and sum to <= 1");
  }
  if (o.content_words < 1 || o.filler_words < 1 ||
      o.filler_words > static_cast<int>(internal::FillerWords().size())) {
    Fail(ErrorCode::kInvalidArgument, "vocabulary sizes out of range");
  }

  SyntheticCorpus out;
  out.corpus.schema = o.schema;
  out.corpus.schema.mode = o.mode;
  const Schema &schema = out.corpus.schema;
  std::mt19937_64 rng(o.seed);
  std::set<std::string> vocab;

  for (int pi = 0; pi < o.n_paragraphs; ++pi) {
    const int n = internal::Draw(rng, o.min_tokens, o.max_tokens);
    int n_acs = static_cast<int>(o.ac_density * n + internal::Draw01(rng));
    n_acs = std::min(n_acs, (n + 1) / 3);

    // Span lengths, shrunk until everything fits with one-token separators.
    std::vector<int> len(n_acs);
    for (int &l : len) l = internal::Draw(rng, 2, 6);
    auto used = [&] {
      int u = n_acs > 0 ? n_acs - 1 : 0;
      for (int l : len) u += l;
      return u;
    };
    for (int i = 0; used() > n; i = (i + 1) % n_acs) {
      if (len[i] > 2) --len[i];
    }
    std::vector<int> gap(n_acs + 1, 0);
    for (int i = 1; i < n_acs; ++i) gap[i] = 1;
    for (int free = n - used(); free > 0; --free) ++gap[internal::Draw(rng, 0, n_acs)];

    ArgStructure s;
    s.paragraph.id = "syn" + std::to_string(o.seed) + "-" + std::to_string(pi);
    int pos = 0;
    for (int i = 0; i < n_acs; ++i) {
      pos += gap[i];
      const std::string &type = schema.ac_types[internal::Draw(rng, 0, schema.num_ac_types() - 1)];
      s.acs.push_back({pos, pos + len[i] - 1, type});
      pos += len[i];
    }

    // Relations: root first, the rest in document order; heads point back.
    if (n_acs >= 2) {
      const int root = internal::Draw(rng, 0, n_acs - 1);
      std::vector<int> order = {root};
      for (int i = 0; i < n_acs; ++i) {
        if (i != root) order.push_back(i);
      }
      for (size_t k = 1; k < order.size(); ++k) {
        const int head = order[k];
        if (internal::Draw01(rng) >= o.relation_prob) continue;
        // Prefer the nearest earlier candidate in the document.
        std::vector<int> earlier(order.begin(), order.begin() + k);
        std::sort(earlier.begin(), earlier.end(), [&](int a, int b) {
          return std::abs(a - head) != std::abs(b - head) ? std::abs(a - head) < std::abs(b - head)
                                                          : a < b;
        });
        std::set<int> tails;
        tails.insert(internal::Draw01(rng) < 0.7
                         ? earlier.front()
                         : earlier[internal::Draw(rng, 0, static_cast<int>(earlier.size()) - 1)]);
        if (o.mode == StructureMode::kGraph) {
          for (int t : earlier) {
            if (internal::Draw01(rng) < o.extra_link_prob) tails.insert(t);
          }
        }
        for (int t : tails) {
          s.ars.push_back({head, t, schema.ar_types[internal::Draw(rng, 0, schema.num_ar_types() - 1)]});
        }
      }
    }
    std::sort(s.ars.begin(), s.ars.end());

    // Surface tokens.
    s.paragraph.tokens.assign(n, "");
    for (int t = 0; t < n; ++t) {
      s.paragraph.tokens[t] = internal::FillerWords()[internal::Draw(rng, 0, o.filler_words - 1)];
    }
    for (int i = 0; i < n_acs; ++i) {
      const AcSpan &ac = s.acs[i];
      for (int t = ac.start; t <= ac.end; ++t) {
        s.paragraph.tokens[t] = SyntheticContentWord(ac.type, internal::Draw(rng, 0, o.content_words - 1));
      }
      for (const ArgRelation &ar : s.ars) {
        if (ar.head == i) {
          s.paragraph.tokens[ac.start] = SyntheticCueWord(ar.type, internal::Draw(rng, 0, 1));
          break;
        }
      }
    }
    for (const auto &tok : s.paragraph.tokens) vocab.insert(tok);

    ValidationReport report = ValidateStructure(s, schema);
    if (!report.empty()) {
      Fail(ErrorCode::kInternal, "generated invalid paragraph '", s.paragraph.id, "': ",
           report.front().message);
    }
    ++out.tally.documents;
    ++out.tally.paragraphs;
    out.tally.acs += n_acs;
    out.tally.ars += static_cast<int>(s.ars.size());
    for (const auto &ac : s.acs) ++out.tally.ac_types[ac.type];
    for (const auto &ar : s.ars) ++out.tally.ar_types[ar.type];
    out.corpus.entries.push_back({std::move(s), "train"});
  }

  // Splits: seeded shuffle of paragraph indices.
  std::vector<int> idx(o.n_paragraphs);
  for (int i = 0; i < o.n_paragraphs; ++i) idx[i] = i;
  for (int i = o.n_paragraphs; i > 1; --i) std::swap(idx[i - 1], idx[internal::Draw(rng, 0, i - 1)]);
  const int n_test = static_cast<int>(o.test_fraction * o.n_paragraphs + 0.5);
  const int n_dev = std::min(o.n_paragraphs - n_test,
                             static_cast<int>(o.dev_fraction * o.n_paragraphs + 0.5));
  for (int k = 0; k < n_test; ++k) out.corpus.entries[idx[k]].split = "test";
  for (int k = n_test; k < n_test + n_dev; ++k) out.corpus.entries[idx[k]].split = "dev";

  out.corpus.split_info["generator"] = "synthetic";
  out.corpus.split_info["seed"] = o.seed;
  out.corpus.split_info["dev_fraction"] = o.dev_fraction;
  out.corpus.split_info["test_fraction"] = o.test_fraction;
  out.vocabulary_size = static_cast<int>(vocab.size());
  return out;
}

}  // namespace aasp
