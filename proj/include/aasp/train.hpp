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

// Teacher-forced training with AdamW, per-epoch dev evaluation and best-dev
// checkpointing.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "aasp/actions.hpp"
#include "aasp/decoder.hpp"
#include "aasp/eval.hpp"
#include "aasp/model.hpp"

namespace aasp {

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // mean per paragraph
  std::optional<TaskScores> dev;
  double seconds = 0.0;  // wall clock, not serialized
};

inline Json EpochRecordToJson(const EpochRecord &r) {
  Json j{{"epoch", r.epoch}, {"loss", r.loss}};
  if (r.dev) {
    Json f1 = Json::object();
    for (Task t : kAllTasks) f1[TaskName(t)] = (*r.dev)[t].f1();
    f1["AVG"] = r.dev->avg();
    j["dev_f1"] = f1;
  } else {
    j["dev_f1"] = nullptr;
  }
  return j;
}

// Decode budget large enough for any legal sequence over the paragraphs.
inline int StepBudget(const std::vector<Paragraph> &paragraphs) {
  int n = 0;
  for (const auto &p : paragraphs) n = std::max(n, p.size());
  return 3 * n + 1;
}

template <typename S>
std::vector<ArgStructure> Predict(const Model<S> &model, const std::vector<Paragraph> &paragraphs,
                                  int max_open = 1, int threads = 1) {
  NeuralScorer<S> scorer(model);
  DecodeOptions opt{model.schema, model.config.mode, StepBudget(paragraphs), max_open};
  std::vector<ArgStructure> out;
  for (BatchItem &item : BatchDecode(scorer, paragraphs, opt, threads)) {
    out.push_back(std::move(item.structure));
  }
  return out;
}

struct TrainOptions {
  // Dev evaluation cadence in epochs; the last epoch is always evaluated.
  int eval_every = 1;
  // Stops training after an epoch when it returns true.
  std::function<bool(const EpochRecord &)> stop;
  std::function<void(const EpochRecord &)> on_epoch;
};

struct TrainResult {
  Model<float> model;  // best dev AVG F1, or the final model without dev data
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  std::vector<std::string> log;
};

// Per-tensor AdamW state.
class AdamW {
 public:
  explicit AdamW(const ModelConfig &c, const Parameters<float> &like) : c_(c) {
    for (const auto &t : like.t) {
      m_.push_back(Mat<float>::Zero(t.rows(), t.cols()));
      v_.push_back(Mat<float>::Zero(t.rows(), t.cols()));
    }
  }

  void Step(Parameters<float> *params, const Parameters<float> &grad) {
    ++t_;
    const float lr = static_cast<float>(c_.learning_rate);
    const float b1 = static_cast<float>(c_.beta1), b2 = static_cast<float>(c_.beta2);
    const float c1 = static_cast<float>(1.0 - std::pow(c_.beta1, t_));
    const float c2 = static_cast<float>(1.0 - std::pow(c_.beta2, t_));
    const float eps = static_cast<float>(c_.adam_epsilon);
    const float decay = static_cast<float>(1.0 - c_.learning_rate * c_.weight_decay);
    for (size_t i = 0; i < m_.size(); ++i) {
      m_[i] = b1 * m_[i] + (1 - b1) * grad.t[i];
      v_[i] = b2 * v_[i] + (1 - b2) * grad.t[i].cwiseAbs2();
      Mat<float> &w = params->t[i];
      w *= decay;
      w.array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
    }
  }

 private:
  ModelConfig c_;
  std::vector<Mat<float>> m_, v_;
  long t_ = 0;
};

inline double GlobalNorm(const Parameters<float> &g) {
  double s = 0;
  for (const auto &t : g.t) s += t.cast<double>().squaredNorm();
  return std::sqrt(s);
}

inline TrainResult Train(const ModelConfig &config, const Schema &schema,
                         const std::vector<ArgStructure> &train,
                         const std::vector<ArgStructure> &dev, const TrainOptions &options = {}) {
  CheckConfig(config);
  if (train.empty()) Fail(ErrorCode::kInvalidArgument, "training corpus is empty");
  if (options.eval_every < 1) Fail(ErrorCode::kInvalidArgument, "eval_every must be >= 1");

  TrainResult result;
  struct Example {
    std::vector<int> ids;
    ActionSequence gold;
  };
  Vocab vocab = Vocab::Build(train);
  std::vector<Example> examples;
  for (const ArgStructure &s : train) {
    Linearization lin = Linearize(s, config.mode);
    for (const ArgRelation &ar : lin.dropped) {
      result.log.push_back(internal::StrCat("'", s.paragraph.id, "': relation ", ar.head, "->",
                                            ar.tail, " (", ar.type,
                                            ") not encodable in single_link mode"));
    }
    examples.push_back({vocab.Ids(s.paragraph), std::move(lin.sequence)});
  }
  std::vector<Paragraph> dev_paragraphs;
  for (const auto &s : dev) dev_paragraphs.push_back(s.paragraph);

  Model<float> model = InitModel<float>(config, schema, vocab);
  result.model = model;
  AdamW opt(config, model.params);
  Parameters<float> grad = Parameters<float>::Zeros(model.Specs());
  std::mt19937_64 rng(config.seed ^ 0x5eedf00dULL);
  std::vector<size_t> order(examples.size());
  double best = -1;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      grad.SetZero();
      for (size_t k = start; k < end; ++k) {
        const Example &ex = examples[order[k]];
        total += ParagraphLoss(model, ex.ids, ex.gold, &grad);
      }
      const float scale = 1.0f / static_cast<float>(end - start);
      for (auto &g : grad.t) g *= scale;
      if (config.clip_norm > 0) {
        const double norm = GlobalNorm(grad);
        if (norm > config.clip_norm) {
          for (auto &g : grad.t) g *= static_cast<float>(config.clip_norm / norm);
        }
      }
      opt.Step(&model.params, grad);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = total / static_cast<double>(examples.size());
    const bool evaluate = !dev.empty() && (epoch % options.eval_every == 0 || epoch == config.epochs);
    if (evaluate) rec.dev = EvalTasks(dev, Predict(model, dev_paragraphs));
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);

    if (dev.empty()) {
      result.model = model;
      result.best_epoch = epoch;
    } else if (rec.dev && rec.dev->avg() > best) {
      best = rec.dev->avg();
      result.model = model;
      result.best_epoch = epoch;
    }
    if (options.stop && options.stop(rec)) break;
  }
  if (config.epochs == 0) result.model = model;
  return result;
}

}  // namespace aasp
