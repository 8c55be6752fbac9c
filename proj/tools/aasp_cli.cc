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

// aasp: command-line entry point.
//
// Every command resolves a RunConfig (defaults < --config file < flags <
// --set), writes it to <out-dir>/config.json and records inputs and outputs
// with content hashes in <out-dir>/manifest.json.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aasp/analysis.hpp"
#include "aasp/corpus.hpp"
#include "aasp/datasets.hpp"
#include "aasp/decoder.hpp"
#include "aasp/eval.hpp"
#include "aasp/gradcheck.hpp"
#include "aasp/model.hpp"
#include "aasp/model_io.hpp"
#include "aasp/run_config.hpp"
#include "aasp/synthetic.hpp"
#include "aasp/trace_io.hpp"
#include "aasp/train.hpp"

namespace aasp {
namespace {

constexpr int kExitUsage = 64;
constexpr int kExitCheckFailed = 9;

// Thrown when a command ran correctly but its check did not pass.
struct CheckFailed {
  std::string message;
};

class Run {
 public:
  Run(std::string command, RunConfig config, std::string out_dir)
      : command_(std::move(command)),
        config_(std::move(config)),
        out_dir_(std::move(out_dir)),
        manifest_(command_) {}

  const RunConfig &config() const { return config_; }
  Manifest &manifest() { return manifest_; }

  std::string Out(const std::string &name) const {
    return (std::filesystem::path(out_dir_) / name).string();
  }

  void Finish() {
    config_.Write(Out("config.json"));
    manifest_.Write(out_dir_);
  }

 private:
  std::string command_;
  RunConfig config_;
  std::string out_dir_;
  Manifest manifest_;
};

// Streams canonical lines to a file.
class LineWriter {
 public:
  explicit LineWriter(const std::string &path) : path_(path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) Fail(ErrorCode::kIo, "cannot write '", path, "'");
  }
  void Write(const std::string &line) {
    out_ << line;
    if (!out_) Fail(ErrorCode::kIo, "write to '", path_, "' failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string Lines(const std::vector<std::string> &lines) {
  std::string out;
  for (const auto &l : lines) out += l + "\n";
  return out;
}

std::vector<ArgStructure> LoadSplit(const std::string &path, const std::string &split,
                                    Schema *schema = nullptr) {
  Corpus c = ReadCanonical(path);
  if (schema != nullptr) *schema = c.schema;
  return c.Structures(split == "all" ? "" : split);
}

// Predictions restricted to the ids of `gold`.
std::vector<ArgStructure> Restrict(std::vector<ArgStructure> pred,
                                   const std::vector<ArgStructure> &gold) {
  std::set<std::string> ids;
  for (const auto &g : gold) ids.insert(g.paragraph.id);
  pred.erase(std::remove_if(pred.begin(), pred.end(),
                            [&](const ArgStructure &p) { return !ids.count(p.paragraph.id); }),
             pred.end());
  return pred;
}

void CmdGenSynthetic(Run &run) {
  SyntheticCorpus syn = GenSynthetic(run.config().Synthetic());
  const std::string data = run.Out("synthetic.jsonl");
  WriteCanonical(syn.corpus, data);
  Json stats = StatsToJson(ComputeStats(syn.corpus));
  stats["vocabulary_size"] = syn.vocabulary_size;
  WriteFile(run.Out("stats.json"), stats.dump(2) + "\n");
  for (const auto &f : {data, SidecarPath(data), run.Out("stats.json")}) run.manifest().Output(f);
  std::cout << "wrote " << syn.corpus.entries.size() << " paragraphs to " << data << "\n";
}

void CmdConvert(Run &run) {
  const RunConfig &cfg = run.config();
  const std::string input = cfg.RequirePath("input", "--input");
  const Json &conv = cfg.at("convert");
  ParseOptions opt;
  opt.seed = cfg.seed();
  opt.dev_fraction = conv["dev_fraction"].get<double>();
  opt.exclude_prompt = conv["exclude_prompt"].get<bool>();
  const std::string format = conv["format"].get<std::string>();
  ParsedCorpus parsed;
  if (format == "aae") {
    parsed = ParseAae(input, opt);
  } else if (format == "cdcp") {
    parsed = ParseCdcp(input, opt);
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown --format '", format, "' (expected aae or cdcp)");
  }
  run.manifest().Input(input);
  const std::string data = run.Out("corpus.jsonl");
  WriteCanonical(parsed.corpus, data);
  Json stats = StatsToJson(ComputeStats(parsed.corpus));
  Json by_split = Json::object();
  std::set<std::string> splits;
  for (const auto &e : parsed.corpus.entries) splits.insert(e.split);
  for (const auto &s : splits) by_split[s] = StatsToJson(ComputeStats(parsed.corpus.Structures(s)));
  stats["splits"] = by_split;
  stats["forced_token_splits"] = parsed.forced_token_splits;
  stats["expanded_links"] = parsed.expanded_links;
  WriteFile(run.Out("stats.json"), stats.dump(2) + "\n");
  WriteFile(run.Out("convert.log"), Lines(parsed.log));
  for (const auto &f : {data, SidecarPath(data), run.Out("stats.json"), run.Out("convert.log")}) {
    run.manifest().Output(f);
  }
  std::cout << stats["documents"] << " documents, " << stats["paragraphs"] << " paragraphs, "
            << stats["acs"] << " ACs, " << stats["ars"] << " ARs\n";
}

void CmdLinearize(Run &run) {
  const RunConfig &cfg = run.config();
  const std::string input = cfg.RequirePath("input", "--input");
  const LinearizeMode mode = run.config().Model().mode;
  Schema schema = ReadSchema(input);
  CanonicalReader reader(input, schema);
  const std::string out = run.Out("actions.jsonl");
  LineWriter writer(out);
  std::vector<std::string> log;
  CorpusEntry entry;
  long paragraphs = 0, steps = 0;
  while (reader.Next(&entry)) {
    Linearization lin = Linearize(Canonicalize(entry.structure), mode);
    for (const ArgRelation &ar : lin.dropped) {
      log.push_back(internal::StrCat(entry.structure.paragraph.id, ": dropped relation ", ar.head,
                                     "->", ar.tail, " (", ar.type, ")"));
    }
    ++paragraphs;
    steps += lin.sequence.size();
    TraceRecord r{entry.structure.paragraph, entry.split, mode, std::move(lin.sequence)};
    writer.Write(TraceToJson(r).dump() + "\n");
  }
  WriteSchema(out, schema);
  WriteFile(run.Out("linearize.log"), Lines(log));
  run.manifest().Input(input);
  for (const auto &f : {out, SidecarPath(out), run.Out("linearize.log")}) run.manifest().Output(f);
  std::cout << paragraphs << " paragraphs, " << steps << " actions, " << log.size()
            << " relations dropped\n";
}

void CmdDelinearize(Run &run) {
  const std::string input = run.config().RequirePath("input", "--input");
  Schema schema = ReadSchema(input);
  const std::string out = run.Out("structures.jsonl");
  std::vector<std::string> log;
  LineWriter writer(out);
  long paragraphs = 0;
  for (const TraceRecord &r : ReadTraces(input)) {
    Delinearization d = Delinearize(r.sequence, r.paragraph, &schema);
    for (const Repair &rep : d.repairs) {
      log.push_back(internal::StrCat(r.paragraph.id, ": step ", rep.step, ": ",
                                     RepairKindName(rep.kind), ": ", rep.detail));
    }
    writer.Write(CanonicalLine({d.structure, r.split}));
    ++paragraphs;
  }
  WriteSchema(out, schema);
  WriteFile(run.Out("repairs.log"), Lines(log));
  run.manifest().Input(input);
  for (const auto &f : {out, SidecarPath(out), run.Out("repairs.log")}) run.manifest().Output(f);
  std::cout << paragraphs << " paragraphs, " << log.size() << " repairs\n";
}

void CmdTrain(Run &run) {
  const RunConfig &cfg = run.config();
  const std::string input = cfg.RequirePath("input", "--data");
  const Json &t = cfg.at("train");
  Schema schema;
  std::vector<ArgStructure> train = LoadSplit(input, t["train_split"].get<std::string>(), &schema);
  const std::string dev_split = t["dev_split"].get<std::string>();
  std::vector<ArgStructure> dev = dev_split == "none" ? std::vector<ArgStructure>{}
                                                      : LoadSplit(input, dev_split);
  if (train.empty()) {
    Fail(ErrorCode::kInvalidArgument, "training corpus is empty (split '",
         t["train_split"].get<std::string>(), "' of ", input, ")");
  }
  TrainOptions opt;
  opt.eval_every = t["eval_every"].get<int>();
  const std::string history_path = run.Out("history.jsonl");
  LineWriter history(history_path);
  opt.on_epoch = [&](const EpochRecord &r) {
    history.Write(EpochRecordToJson(r).dump() + "\n");
    std::cerr << "epoch " << r.epoch << " loss " << r.loss;
    if (r.dev) std::cerr << " dev AVG F1 " << r.dev->avg();
    std::cerr << " (" << r.seconds << " s)\n";
  };
  if (!t["target"].is_null()) {
    const Json target = t["target"];
    opt.stop = [target](const EpochRecord &r) {
      if (!r.dev) return false;
      for (Task task : kAllTasks) {
        if (target.contains(TaskName(task)) && (*r.dev)[task].f1() < target[TaskName(task)].get<double>()) {
          return false;
        }
      }
      return true;
    };
  }
  TrainResult result = Train(cfg.Model(), schema, train, dev, opt);
  const std::string model_path = run.Out("model.json");
  SaveModel(result.model, model_path);
  std::vector<std::string> log = result.log;
  log.push_back(internal::StrCat("best epoch ", result.best_epoch, " of ", result.history.size()));
  WriteFile(run.Out("train.log"), Lines(log));
  run.manifest().Input(input);
  for (const auto &f : {model_path, history_path, run.Out("train.log")}) run.manifest().Output(f);
  std::cout << "trained " << result.history.size() << " epochs on " << train.size()
            << " paragraphs; best epoch " << result.best_epoch << "\n";
}

void CmdPredict(Run &run) {
  const RunConfig &cfg = run.config();
  const std::string model_path = cfg.RequirePath("model", "--model");
  const std::string input = cfg.RequirePath("input", "--input");
  const std::string split = cfg.at("split").get<std::string>();
  const Json &d = cfg.at("decode");
  Model<float> model = LoadModel(model_path);
  Schema schema = ReadSchema(input);
  if (!(schema == model.schema)) {
    Fail(ErrorCode::kSchema, "schema mismatch: model was trained on '", model.schema.name,
         "', input uses '", schema.name, "'");
  }
  NeuralScorer<float> scorer(model);
  const std::string out = run.Out("predictions.jsonl");
  LineWriter writer(out);
  std::unique_ptr<LineWriter> traces;
  if (d["trace"].get<bool>()) traces = std::make_unique<LineWriter>(run.Out("traces.jsonl"));
  std::vector<std::string> log;
  CanonicalReader reader(input, schema);
  std::vector<CorpusEntry> chunk;
  long count = 0;
  auto flush = [&] {
    std::vector<Paragraph> paragraphs;
    for (const auto &e : chunk) paragraphs.push_back(e.structure.paragraph);
    const int max_steps = d["max_steps"].get<int>();
    DecodeOptions opt{model.schema, model.config.mode,
                      max_steps > 0 ? max_steps : StepBudget(paragraphs), d["max_open"].get<int>()};
    std::vector<BatchItem> items = BatchDecode(scorer, paragraphs, opt, d["threads"].get<int>());
    for (size_t i = 0; i < items.size(); ++i) {
      const BatchItem &item = items[i];
      const std::string &id = paragraphs[i].id;
      if (!item.ok()) log.push_back(id + ": decode failed: " + item.error);
      if (item.truncated) log.push_back(id + ": truncated at max_steps");
      for (const Repair &r : item.repairs) {
        log.push_back(internal::StrCat(id, ": step ", r.step, ": ", RepairKindName(r.kind), ": ",
                                       r.detail));
      }
      writer.Write(CanonicalLine({item.structure, chunk[i].split}));
      if (traces) {
        traces->Write(TraceToJson({paragraphs[i], chunk[i].split, model.config.mode, item.actions}).dump() + "\n");
      }
      ++count;
    }
    chunk.clear();
  };
  CorpusEntry entry;
  while (reader.Next(&entry)) {
    if (!split.empty() && split != "all" && entry.split != split) continue;
    chunk.push_back(entry);
    if (chunk.size() == 64) flush();
  }
  flush();
  WriteSchema(out, schema);
  WriteFile(run.Out("predict.log"), Lines(log));
  run.manifest().Input(model_path);
  run.manifest().Input(input);
  run.manifest().Output(out);
  run.manifest().Output(SidecarPath(out));
  run.manifest().Output(run.Out("predict.log"));
  if (traces) run.manifest().Output(run.Out("traces.jsonl"));
  std::cout << "predicted " << count << " paragraphs into " << out << "\n";
}

std::pair<std::vector<ArgStructure>, std::vector<ArgStructure>> GoldAndPred(Run &run) {
  const RunConfig &cfg = run.config();
  const std::string gold_path = cfg.RequirePath("gold", "--gold");
  const std::string pred_path = cfg.RequirePath("pred", "--pred");
  const std::string split = cfg.at("split").get<std::string>();
  Schema gs, ps;
  std::vector<ArgStructure> gold = LoadSplit(gold_path, split, &gs);
  std::vector<ArgStructure> pred = LoadSplit(pred_path, "", &ps);
  if (!(gs.ac_types == ps.ac_types) || !(gs.ar_types == ps.ar_types)) {
    Fail(ErrorCode::kSchema, "schema mismatch between '", gold_path, "' and '", pred_path, "'");
  }
  if (!split.empty() && split != "all") pred = Restrict(std::move(pred), gold);
  run.manifest().Input(gold_path);
  run.manifest().Input(pred_path);
  return {gold, pred};
}

void CmdEval(Run &run) {
  auto [gold, pred] = GoldAndPred(run);
  TaskScores scores = EvalTasks(gold, pred);
  Json j = TaskScoresToJson(scores);
  j["paragraphs"] = gold.size();
  WriteFile(run.Out("scores.json"), j.dump(2) + "\n");
  const std::string table = TaskScoresTable(scores);
  WriteFile(run.Out("scores.txt"), table);
  run.manifest().Output(run.Out("scores.json"));
  run.manifest().Output(run.Out("scores.txt"));
  std::cout << table;
}

void CmdAnalyze(Run &run) {
  const Json &a = run.config().at("analyze");
  const std::string kind = a["kind"].get<std::string>();
  static const std::set<std::string> kKinds = {"chains", "errors", "length", "distance", "category"};
  if (!kKinds.count(kind)) {
    Fail(ErrorCode::kInvalidArgument, "unknown --kind '", kind,
         "' (expected chains, errors, length, distance or category)");
  }
  auto [gold, pred] = GoldAndPred(run);
  Json j;
  std::string table, csv;
  if (kind == "chains") {
    ChainReport r = BuildChainReport(gold, pred, a["chain_typed"].get<bool>());
    j = ChainReportToJson(r);
    table = ChainReportTable(r);
  } else if (kind == "errors") {
    ErrorReport r = BuildErrorReport(gold, pred);
    j = ErrorReportToJson(r);
    table = ErrorReportTable(r);
  } else if (kind == "length") {
    std::vector<Bucket> b = LengthBreakdown(gold, pred, a["length_buckets"].get<std::vector<int>>());
    j = BucketsToJson(b);
    table = BucketsTable(b);
    csv = BucketsCsv(b);
  } else if (kind == "distance") {
    auto m = DistanceBreakdown(gold, pred);
    j = CountsMapToJson(m);
    table = CountsMapTable(m, "distance");
    csv = CountsMapCsv(m, "distance");
  } else {
    auto m = CategoryBreakdown(gold, pred);
    j = CountsMapToJson(m);
    table = CountsMapTable(m, "category");
    csv = CountsMapCsv(m, "category");
  }
  WriteFile(run.Out(kind + ".json"), j.dump(2) + "\n");
  WriteFile(run.Out(kind + ".txt"), table);
  run.manifest().Output(run.Out(kind + ".json"));
  run.manifest().Output(run.Out(kind + ".txt"));
  if (!csv.empty()) {
    WriteFile(run.Out(kind + ".csv"), csv);
    run.manifest().Output(run.Out(kind + ".csv"));
  }
  std::cout << table;
}

void CmdGradCheck(Run &run) {
  const RunConfig &cfg = run.config();
  const Json &g = cfg.at("gradcheck");
  const int n = g["examples"].get<int>();
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "gradcheck.examples must be >= 1");
  std::vector<ArgStructure> examples;
  Schema schema;
  const std::string input = cfg.path("input");
  if (!input.empty()) {
    examples = LoadSplit(input, "", &schema);
    if (static_cast<int>(examples.size()) > n) examples.resize(n);
    run.manifest().Input(input);
  } else {
    SyntheticOptions so = cfg.Synthetic();
    so.n_paragraphs = n;
    so.min_tokens = std::min(so.min_tokens, g["max_tokens"].get<int>());
    so.max_tokens = g["max_tokens"].get<int>();
    so.dev_fraction = so.test_fraction = 0;
    examples = GenSynthetic(so).corpus.Structures();
    schema = so.schema;
  }
  if (examples.empty()) Fail(ErrorCode::kInvalidArgument, "no gradcheck examples");
  Model<double> model = InitModel<double>(cfg.Model(), schema, Vocab::Build(examples));
  GradCheckOptions opt;
  opt.samples_per_example = g["samples"].get<int>();
  opt.epsilon = g["epsilon"].get<double>();
  opt.floor = g["floor"].get<double>();
  opt.seed = cfg.seed();
  GradCheckResult r = GradCheck(model, examples, opt);
  const double threshold = g["threshold"].get<double>();
  Json j = GradCheckToJson(r);
  j["threshold"] = threshold;
  j["passed"] = r.max_relative_error < threshold;
  WriteFile(run.Out("gradcheck.json"), j.dump(2) + "\n");
  run.manifest().Output(run.Out("gradcheck.json"));
  std::cout << (r.max_relative_error < threshold ? "PASS" : "FAIL") << " max relative error "
            << r.max_relative_error << " over " << r.checked << " parameters (threshold "
            << threshold << ")\n";
  if (!(r.max_relative_error < threshold)) {
    throw CheckFailed{internal::StrCat("max relative error ", r.max_relative_error,
                                       " >= threshold ", threshold, " at ", r.worst.tensor, "[",
                                       r.worst.row, ",", r.worst.col, "]")};
  }
}

enum class Kind { kInt, kNumber, kString, kBool, kNotBool, kTarget, kIntList };

Json ParseFlag(const std::string &flag, const std::string &raw, Kind kind) {
  try {
    switch (kind) {
      case Kind::kInt: {
        size_t used = 0;
        long long v = std::stoll(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::kNumber: {
        size_t used = 0;
        double v = std::stod(raw, &used);
        if (used != raw.size()) break;
        return v;
      }
      case Kind::kString:
        return raw;
      case Kind::kBool:
      case Kind::kNotBool:
        break;
      case Kind::kTarget:
      case Kind::kIntList: {
        std::vector<std::string> parts = internal::SplitString(raw, ',');
        if (kind == Kind::kIntList) {
          Json list = Json::array();
          for (const auto &p : parts) list.push_back(std::stoi(p));
          return list;
        }
        if (parts.size() != 4) break;
        Json t = Json::object();
        for (size_t i = 0; i < 4; ++i) t[TaskName(kAllTasks[i])] = std::stod(parts[i]);
        return t;
      }
    }
  } catch (const std::exception &) {
  }
  Fail(ErrorCode::kInvalidArgument, "bad value '", raw, "' for ", flag);
}

struct Binding {
  std::string key;
  Kind kind;
  CLI::Option *option = nullptr;
  std::string value;
  bool flag_value = false;
};

class Command {
 public:
  Command(CLI::App &app, const std::string &name, const std::string &help,
          std::function<void(Run &)> body)
      : name_(name), body_(std::move(body)) {
    sub_ = app.add_subcommand(name, help);
    sub_->add_option("--seed", seed_, "Random seed (default 1)");
    sub_->add_option("--config", config_path_, "JSON run configuration to start from");
    sub_->add_option("--out-dir", out_dir_, "Output directory")->capture_default_str();
    sub_->add_option("--set", sets_, "Override any config key: section.key=value");
  }

  Command &Opt(const std::string &flag, const std::string &key, Kind kind,
               const std::string &help) {
    bindings_.push_back(std::make_unique<Binding>(Binding{key, kind}));
    Binding &b = *bindings_.back();
    if (kind == Kind::kBool || kind == Kind::kNotBool) {
      b.option = sub_->add_flag(flag, b.flag_value, help);
    } else {
      b.option = sub_->add_option(flag, b.value, help);
      switch (kind) {
        case Kind::kInt: b.option->type_name("INT"); break;
        case Kind::kNumber: b.option->type_name("FLOAT"); break;
        case Kind::kTarget: b.option->type_name("F1,F1,F1,F1"); break;
        case Kind::kIntList: b.option->type_name("INT,..."); break;
        default: break;
      }
    }
    return *this;
  }

  CLI::App *sub() const { return sub_; }

  int Execute() {
    RunConfig cfg;
    if (!config_path_.empty()) cfg.MergeFile(config_path_);
    if (seed_) cfg.SetPath("seed", *seed_);
    for (const auto &b : bindings_) {
      if (b->option->count() == 0) continue;
      Json v;
      if (b->kind == Kind::kBool) v = b->flag_value;
      else if (b->kind == Kind::kNotBool) v = !b->flag_value;
      else v = ParseFlag(b->option->get_name(), b->value, b->kind);
      cfg.SetPath(b->key, v);
    }
    for (const auto &s : sets_) cfg.Set(s);
    if (out_dir_.empty()) out_dir_ = "aasp-out/" + name_;
    Run run(name_, cfg, out_dir_);
    std::filesystem::create_directories(out_dir_);
    std::optional<CheckFailed> failed;
    try {
      body_(run);
    } catch (const CheckFailed &f) {
      failed = f;
    }
    run.Finish();
    if (failed) throw *failed;
    return 0;
  }

 private:
  std::string name_;
  std::function<void(Run &)> body_;
  CLI::App *sub_ = nullptr;
  std::optional<uint64_t> seed_;
  std::string config_path_;
  std::string out_dir_;
  std::vector<std::string> sets_;
  std::vector<std::unique_ptr<Binding>> bindings_;
};

void PrintError(const std::string &code, const std::string &message) {
  std::cerr << Json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

int Main(int argc, char **argv) {
  CLI::App app{"aasp: argument structure parsing with a constrained action decoder"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const std::string &name, const std::string &help, std::function<void(Run &)> f) {
    commands.push_back(std::make_unique<Command>(app, name, help, std::move(f)));
    return commands.back().get();
  };

  add("gen-synthetic", "Generate a seeded synthetic corpus", CmdGenSynthetic)
      ->Opt("--n", "synthetic.n_paragraphs", Kind::kInt, "Number of paragraphs")
      .Opt("--mode", "synthetic.mode", Kind::kString, "tree or graph")
      .Opt("--schema", "synthetic.schema", Kind::kString, "aae, aae-fg or cdcp")
      .Opt("--min-tokens", "synthetic.min_tokens", Kind::kInt, "Minimum paragraph length")
      .Opt("--max-tokens", "synthetic.max_tokens", Kind::kInt, "Maximum paragraph length")
      .Opt("--density", "synthetic.ac_density", Kind::kNumber, "Expected ACs per token")
      .Opt("--dev-fraction", "synthetic.dev_fraction", Kind::kNumber, "Share of dev paragraphs")
      .Opt("--test-fraction", "synthetic.test_fraction", Kind::kNumber, "Share of test paragraphs");

  add("convert", "Convert an AAE or CDCP corpus directory to canonical form", CmdConvert)
      ->Opt("--format", "convert.format", Kind::kString, "aae or cdcp")
      .Opt("--input", "paths.input", Kind::kString, "Corpus directory")
      .Opt("--dev-fraction", "convert.dev_fraction", Kind::kNumber, "Share of train documents held out")
      .Opt("--keep-prompt", "convert.exclude_prompt", Kind::kNotBool, "AAE: keep the prompt block");

  add("linearize", "Canonical structures to action traces", CmdLinearize)
      ->Opt("--input", "paths.input", Kind::kString, "Canonical data file")
      .Opt("--mode", "model.mode", Kind::kString, "multi_link or single_link");

  add("delinearize", "Action traces to canonical structures", CmdDelinearize)
      ->Opt("--input", "paths.input", Kind::kString, "Action trace file");

  add("train", "Train a model", CmdTrain)
      ->Opt("--data", "paths.input", Kind::kString, "Canonical data file")
      .Opt("--train-split", "train.train_split", Kind::kString, "Training split, or all")
      .Opt("--dev-split", "train.dev_split", Kind::kString, "Dev split, all, or none")
      .Opt("--epochs", "model.epochs", Kind::kInt, "Maximum epochs")
      .Opt("--hidden", "model.ffn_hidden", Kind::kInt, "FFN2/FFN3 hidden size")
      .Opt("--lr", "model.learning_rate", Kind::kNumber, "Learning rate")
      .Opt("--batch-size", "model.batch_size", Kind::kInt, "Paragraphs per update")
      .Opt("--mode", "model.mode", Kind::kString, "multi_link or single_link")
      .Opt("--eval-every", "train.eval_every", Kind::kInt, "Dev evaluation cadence in epochs")
      .Opt("--target", "train.target", Kind::kTarget,
           "Stop once dev F1 reaches ACI,ACC,ARI,ARC (comma separated)");

  add("predict", "Decode paragraphs with a trained model", CmdPredict)
      ->Opt("--model", "paths.model", Kind::kString, "Model file")
      .Opt("--input", "paths.input", Kind::kString, "Canonical data file")
      .Opt("--split", "split", Kind::kString, "Only this split")
      .Opt("--max-open", "decode.max_open", Kind::kInt, "Maximum unmatched opens")
      .Opt("--max-steps", "decode.max_steps", Kind::kInt, "Step budget (0: automatic)")
      .Opt("--threads", "decode.threads", Kind::kInt, "Worker threads")
      .Opt("--trace", "decode.trace", Kind::kBool, "Also write action traces");

  add("eval", "Score predictions against gold", CmdEval)
      ->Opt("--gold", "paths.gold", Kind::kString, "Gold canonical file")
      .Opt("--pred", "paths.pred", Kind::kString, "Predicted canonical file")
      .Opt("--split", "split", Kind::kString, "Only this gold split");

  add("analyze", "Breakdowns, chains and error taxonomy", CmdAnalyze)
      ->Opt("--kind", "analyze.kind", Kind::kString, "chains, errors, length, distance or category")
      .Opt("--gold", "paths.gold", Kind::kString, "Gold canonical file")
      .Opt("--pred", "paths.pred", Kind::kString, "Predicted canonical file")
      .Opt("--split", "split", Kind::kString, "Only this gold split")
      .Opt("--buckets", "analyze.length_buckets", Kind::kIntList, "Length bucket lower bounds")
      .Opt("--chain-typed", "analyze.chain_typed", Kind::kBool, "Chains also require AR types");

  add("gradcheck", "Finite-difference gradient check", CmdGradCheck)
      ->Opt("--examples", "gradcheck.examples", Kind::kInt, "Number of examples")
      .Opt("--samples", "gradcheck.samples", Kind::kInt, "Parameters sampled per example")
      .Opt("--epsilon", "gradcheck.epsilon", Kind::kNumber, "Finite-difference step")
      .Opt("--threshold", "gradcheck.threshold", Kind::kNumber, "Maximum relative error")
      .Opt("--hidden", "model.ffn_hidden", Kind::kInt, "FFN2/FFN3 hidden size")
      .Opt("--mode", "model.mode", Kind::kString, "multi_link or single_link")
      .Opt("--input", "paths.input", Kind::kString, "Canonical file to take examples from");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    PrintError("usage", e.what());
    return kExitUsage;
  }

  try {
    for (auto &c : commands) {
      if (c->sub()->parsed()) return c->Execute();
    }
  } catch (const Error &e) {
    PrintError(ErrorCodeName(e.code()), e.what());
    return static_cast<int>(e.code());
  } catch (const CheckFailed &f) {
    PrintError("check_failed", f.message);
    return kExitCheckFailed;
  } catch (const std::exception &e) {
    PrintError(ErrorCodeName(ErrorCode::kInternal), e.what());
    return static_cast<int>(ErrorCode::kInternal);
  }
  return kExitUsage;
}

}  // namespace
}  // namespace aasp

int main(int argc, char **argv) { return aasp::Main(argc, argv); }
