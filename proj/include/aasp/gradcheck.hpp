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

// Central-difference check of the analytic loss gradient, in double.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "aasp/actions.hpp"
#include "aasp/model.hpp"

namespace aasp {

struct GradCheckOptions {
  int samples_per_example = 200;
  double epsilon = 1e-5;
  // Denominator floor of the relative error.
  double floor = 1e-5;
  uint64_t seed = 1;
  // Tensor ids to sample from; empty means all.
  std::vector<int> tensors;
};

struct GradCheckEntry {
  std::string example;
  std::string tensor;
  int row = 0;
  int col = 0;
  double analytic = 0;
  double numeric = 0;
  double relative_error = 0;
  std::string stencil = "central";
};

struct GradCheckResult {
  int checked = 0;
  double max_relative_error = 0;
  GradCheckEntry worst;
  int one_sided = 0;  // a ReLU kink lay on one side of the parameter
  int redrawn = 0;    // kinks on both sides; another parameter was drawn
};

inline double RelativeError(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline Json GradCheckToJson(const GradCheckResult &r) {
  return Json{{"checked", r.checked},
              {"max_relative_error", r.max_relative_error},
              {"one_sided", r.one_sided},
              {"redrawn", r.redrawn},
              {"worst",
               {{"example", r.worst.example},
                {"tensor", r.worst.tensor},
                {"row", r.worst.row},
                {"col", r.worst.col},
                {"analytic", r.worst.analytic},
                {"numeric", r.worst.numeric},
                {"stencil", r.worst.stencil}}}};
}

namespace internal {

struct Probe {
  double loss = 0;
  uint64_t relu = 0;
};

inline Probe ProbeLoss(const Model<double> &model, const std::vector<int> &ids,
                       const ActionSequence &gold) {
  struct Scope {
    explicit Scope(uint64_t *h) { relu_signature = h; }
    ~Scope() { relu_signature = nullptr; }
  };
  Probe p;
  Scope scope(&p.relu);
  p.loss = ParagraphLoss<double>(model, ids, gold, nullptr);
  return p;
}

}  // namespace internal

// For every example, samples a tensor uniformly and then an element of it,
// and compares the analytic derivative with (L(w+e) - L(w-e)) / 2e. When the
// ReLU sign pattern changes on one side only, the three-point one-sided
// difference on the other side is used instead; when it changes on both, the
// draw is discarded.
inline GradCheckResult GradCheck(Model<double> model, const std::vector<ArgStructure> &examples,
                                 const GradCheckOptions &opt = {}) {
  GradCheckResult result;
  std::mt19937_64 rng(opt.seed);
  const std::vector<TensorSpec> specs = model.Specs();
  const double e = opt.epsilon;
  for (const ArgStructure &s : examples) {
    const std::vector<int> ids = model.vocab.Ids(s.paragraph);
    const ActionSequence gold = Linearize(s, model.config.mode).sequence;
    Parameters<double> grad = Parameters<double>::Zeros(specs);
    ParagraphLoss(model, ids, gold, &grad);
    const internal::Probe base = internal::ProbeLoss(model, ids, gold);
    int done = 0;
    for (int draws = 0; done < opt.samples_per_example && draws < 20 * opt.samples_per_example;
         ++draws) {
      const int pool = opt.tensors.empty() ? kNumTensors : static_cast<int>(opt.tensors.size());
      const int pick = std::uniform_int_distribution<int>(0, pool - 1)(rng);
      const int t = opt.tensors.empty() ? pick : opt.tensors[pick];
      Mat<double> &w = model.params[t];
      const int r = std::uniform_int_distribution<int>(0, static_cast<int>(w.rows()) - 1)(rng);
      const int c = std::uniform_int_distribution<int>(0, static_cast<int>(w.cols()) - 1)(rng);
      const double saved = w(r, c);
      auto at = [&](double delta) {
        w(r, c) = saved + delta;
        internal::Probe p = internal::ProbeLoss(model, ids, gold);
        w(r, c) = saved;
        return p;
      };
      const internal::Probe plus = at(e), minus = at(-e);
      double numeric;
      std::string stencil = "central";
      if (plus.relu == base.relu && minus.relu == base.relu) {
        numeric = (plus.loss - minus.loss) / (2 * e);
      } else if (minus.relu == base.relu && at(-2 * e).relu == base.relu) {
        numeric = (3 * (base.loss - minus.loss) - (minus.loss - at(-2 * e).loss)) / (2 * e);
        stencil = "backward";
      } else if (plus.relu == base.relu && at(2 * e).relu == base.relu) {
        numeric = (3 * (plus.loss - base.loss) - (at(2 * e).loss - plus.loss)) / (2 * e);
        stencil = "forward";
      } else {
        ++result.redrawn;
        continue;
      }
      if (stencil != "central") ++result.one_sided;
      const double analytic = grad[t](r, c);
      const double err = RelativeError(analytic, numeric, opt.floor);
      ++result.checked;
      ++done;
      if (err >= result.max_relative_error) {
        result.max_relative_error = err;
        result.worst = {s.paragraph.id, specs[t].name, r, c, analytic, numeric, err, stencil};
      }
    }
  }
  return result;
}

}  // namespace aasp
