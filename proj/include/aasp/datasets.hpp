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

// Readers for the Argument Annotated Essays (brat standoff) and CDCP
// (per-document JSON) releases.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aasp/corpus.hpp"
#include "aasp/error.hpp"
#include "aasp/structure.hpp"
#include "aasp/tokenize.hpp"

namespace aasp {

struct ParsedCorpus {
  Corpus corpus;
  std::vector<std::string> log;
  int forced_token_splits = 0;
  int expanded_links = 0;  // CDCP: extra relations created by range expansion
};

struct ParseOptions {
  uint64_t seed = 1;
  double dev_fraction = 0.1;
  // AAE: drop the prompt/title block before the first blank line.
  bool exclude_prompt = true;
};

namespace internal {

inline std::vector<std::string> SplitString(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

inline std::string Lower(std::string s) {
  for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n\"");
  size_t e = s.find_last_not_of(" \t\r\n\"");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Moves a seeded fraction of training documents to the dev split.
inline void CarveDev(Corpus *corpus, uint64_t seed, double fraction) {
  std::vector<std::string> docs;
  for (const auto &e : corpus->entries) {
    const std::string doc = DocumentOf(e.structure.paragraph.id);
    if (e.split == "train" && (docs.empty() || docs.back() != doc)) docs.push_back(doc);
  }
  std::sort(docs.begin(), docs.end());
  docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
  std::mt19937_64 rng(seed);
  for (size_t i = docs.size(); i > 1; --i) std::swap(docs[i - 1], docs[rng() % i]);
  const size_t take = static_cast<size_t>(fraction * static_cast<double>(docs.size()) + 0.5);
  std::set<std::string> dev(docs.begin(), docs.begin() + std::min(take, docs.size()));
  for (auto &e : corpus->entries) {
    if (e.split == "train" && dev.count(DocumentOf(e.structure.paragraph.id))) e.split = "dev";
  }
  corpus->split_info["dev_seed"] = seed;
  corpus->split_info["dev_fraction"] = fraction;
  corpus->split_info["dev_documents"] = dev.size();
}

struct CharSpan {
  int begin = 0;
  int end = 0;  // half-open, code points
  std::string type;
};

// Maps character spans inside [region_begin, region_end) to token spans,
// tokenizing so that every span edge is a token edge.
inline ArgStructure BuildStructure(const std::string &id, const CodePointText &text,
                                   int region_begin, int region_end,
                                   const std::vector<CharSpan> &spans,
                                   ParsedCorpus *parsed) {
  std::set<int> edges;
  for (const CharSpan &s : spans) {
    edges.insert(s.begin);
    edges.insert(s.end);
  }
  TokenizeResult tok = Tokenize(text, region_begin, region_end, edges);
  if (tok.forced_splits > 0) {
    parsed->forced_token_splits += tok.forced_splits;
    parsed->log.push_back(StrCat(id, ": ", tok.forced_splits,
                                 " token(s) split to align with annotation offsets"));
  }
  ArgStructure s;
  s.paragraph.id = id;
  for (const Token &t : tok.tokens) s.paragraph.tokens.push_back(t.text);
  for (const CharSpan &span : spans) {
    int first = -1, last = -1;
    for (int i = 0; i < static_cast<int>(tok.tokens.size()); ++i) {
      if (tok.tokens[i].begin >= span.begin && tok.tokens[i].end <= span.end) {
        if (first < 0) first = i;
        last = i;
      }
    }
    if (first < 0) {
      Fail(ErrorCode::kParse, id, ": span [", span.begin, ",", span.end,
           ") covers no token");
    }
    s.acs.push_back({first, last, span.type});
  }
  return s;
}

}  // namespace internal

// Reads a directory of essayNNN.txt / essayNNN.ann pairs. Paragraphs are the
// lines after the prompt block; ids are "<essay>/<k>" with k counting
// paragraphs from 1. Splits follow train-test-split.csv when present (in the
// directory or its parent), with a seeded dev carve-out from train.
inline ParsedCorpus ParseAae(const std::string &dir, const ParseOptions &options = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, "'", dir, "' is not a directory");
  ParsedCorpus parsed;
  parsed.corpus.schema = Schema::Aae();

  std::map<std::string, std::string> split_of;
  for (fs::path candidate : {fs::path(dir) / "train-test-split.csv",
                             fs::path(dir).parent_path() / "train-test-split.csv"}) {
    if (!fs::exists(candidate)) continue;
    std::istringstream in(ReadFile(candidate.string()));
    std::string line;
    while (std::getline(in, line)) {
      auto cols = internal::SplitString(line, ';');
      if (cols.size() < 2) continue;
      std::string essay = internal::Trim(cols[0]), set = internal::Lower(internal::Trim(cols[1]));
      if (set == "train" || set == "test") split_of[essay] = set;
    }
    parsed.corpus.split_info["split_file"] = candidate.filename().string();
    break;
  }
  if (split_of.empty()) parsed.log.push_back("no train-test-split.csv found; all essays train");

  std::vector<fs::path> anns;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".ann") anns.push_back(entry.path());
  }
  std::sort(anns.begin(), anns.end());

  for (const fs::path &ann_path : anns) {
    const std::string essay = ann_path.stem().string();
    fs::path txt_path = ann_path;
    txt_path.replace_extension(".txt");
    CodePointText text(ReadFile(txt_path.string()));

    // Paragraph regions (code points), skipping the prompt block.
    std::vector<std::pair<int, int>> regions;
    int line_start = 0;
    bool in_prompt = options.exclude_prompt;
    for (int i = 0; i <= text.size(); ++i) {
      if (i < text.size() && text.at(i) != '\n') continue;
      bool blank = true;
      for (int k = line_start; k < i; ++k) blank = blank && IsSpace(text.at(k));
      if (in_prompt) {
        if (blank && line_start > 0) in_prompt = false;
      } else if (!blank) {
        regions.push_back({line_start, i});
      }
      line_start = i + 1;
    }

    struct SpanAnn {
      internal::CharSpan span;
      int region = -1;
    };
    std::map<std::string, SpanAnn> spans;
    std::vector<std::tuple<std::string, std::string, std::string, std::string>> rels;
    std::istringstream in(ReadFile(ann_path.string()));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto cols = internal::SplitString(line, '\t');
      const std::string &id = cols[0];
      auto fields = cols.size() > 1 ? internal::SplitString(cols[1], ' ')
                                    : std::vector<std::string>{};
      if (id[0] == 'T') {
        if (fields.size() < 3) {
          Fail(ErrorCode::kParse, ann_path.string(), ":", line_no, ": malformed span line");
        }
        SpanAnn ann{{std::stoi(fields[1]), std::stoi(fields[2]), fields[0]}, -1};
        if (parsed.corpus.schema.AcIndex(ann.span.type) < 0) {
          Fail(ErrorCode::kParse, ann_path.string(), ":", line_no, ": unknown AC type '",
               ann.span.type, "'");
        }
        for (int r = 0; r < static_cast<int>(regions.size()); ++r) {
          if (ann.span.begin >= regions[r].first && ann.span.begin < regions[r].second) {
            ann.region = r;
            if (ann.span.end > regions[r].second) {
              Fail(ErrorCode::kParse, ann_path.string(), ":", line_no, ": span ", id,
                   " crosses a paragraph boundary");
            }
          }
        }
        if (ann.region < 0) {
          parsed.log.push_back(internal::StrCat(essay, ": span ", id,
                                                " outside body paragraphs dropped"));
        }
        spans[id] = ann;
      } else if (id[0] == 'R') {
        if (fields.size() < 3) {
          Fail(ErrorCode::kParse, ann_path.string(), ":", line_no, ": malformed relation line");
        }
        auto arg = [&](const std::string &f) {
          auto colon = f.find(':');
          return colon == std::string::npos ? f : f.substr(colon + 1);
        };
        rels.emplace_back(id, fields[0], arg(fields[1]), arg(fields[2]));
      } else if (id[0] == 'A') {
        parsed.log.push_back(internal::StrCat(essay, ": attribute ", id,
                                              " ignored (", cols.size() > 1 ? cols[1] : "", ")"));
      } else {
        parsed.log.push_back(internal::StrCat(essay, ": annotation line ", id, " ignored"));
      }
    }

    // Per paragraph: spans in document order.
    std::vector<std::vector<std::string>> ids_in(regions.size());
    for (const auto &[id, ann] : spans) {
      if (ann.region >= 0) ids_in[ann.region].push_back(id);
    }
    std::map<std::string, std::pair<int, int>> where;  // span id -> (paragraph, AC index)
    const size_t first_entry = parsed.corpus.entries.size();
    for (size_t r = 0; r < regions.size(); ++r) {
      auto &ids = ids_in[r];
      std::sort(ids.begin(), ids.end(), [&](const std::string &a, const std::string &b) {
        return spans[a].span.begin < spans[b].span.begin;
      });
      std::vector<internal::CharSpan> char_spans;
      for (size_t k = 0; k < ids.size(); ++k) {
        char_spans.push_back(spans[ids[k]].span);
        where[ids[k]] = {static_cast<int>(r), static_cast<int>(k)};
      }
      CorpusEntry entry;
      entry.structure = internal::BuildStructure(
          internal::StrCat(essay, "/", r + 1), text, regions[r].first, regions[r].second,
          char_spans, &parsed);
      auto it = split_of.find(essay);
      entry.split = it == split_of.end() ? "train" : it->second;
      parsed.corpus.entries.push_back(std::move(entry));
    }
    for (const auto &[rid, type, head, tail] : rels) {
      if (!spans.count(head) || !spans.count(tail)) {
        Fail(ErrorCode::kParse, ann_path.string(), ": relation ", rid,
             " references an unknown span id");
      }
      if (!where.count(head) || !where.count(tail) || where[head].first != where[tail].first) {
        parsed.log.push_back(internal::StrCat(essay, ": relation ", rid,
                                              " crosses paragraphs; dropped"));
        continue;
      }
      ArgStructure &s = parsed.corpus.entries[first_entry + where[head].first].structure;
      s.ars.push_back({where[head].second, where[tail].second, type});
    }
    for (size_t r = first_entry; r < parsed.corpus.entries.size(); ++r) {
      ArgStructure &s = parsed.corpus.entries[r].structure;
      s = Canonicalize(s);
      ValidationReport report = ValidateStructure(s, parsed.corpus.schema);
      if (!report.empty()) {
        Fail(ErrorCode::kSchema, "paragraph '", s.paragraph.id, "': ", report.front().message);
      }
    }
  }
  if (options.dev_fraction > 0) internal::CarveDev(&parsed.corpus, options.seed, options.dev_fraction);
  return parsed;
}

// Reads the CDCP release: NNNNN.txt with NNNNN.ann.json per comment, either
// directly in `dir` (all train) or under train/ and test/ subdirectories.
// Each comment is one paragraph; link sources given as proposition ranges are
// expanded to one relation per source proposition.
inline ParsedCorpus ParseCdcp(const std::string &dir, const ParseOptions &options = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, "'", dir, "' is not a directory");
  ParsedCorpus parsed;
  parsed.corpus.schema = Schema::Cdcp();
  const Schema &schema = parsed.corpus.schema;

  std::vector<std::pair<fs::path, std::string>> sources;
  if (fs::is_directory(fs::path(dir) / "train") || fs::is_directory(fs::path(dir) / "test")) {
    for (const char *split : {"train", "test"}) {
      if (fs::is_directory(fs::path(dir) / split)) sources.push_back({fs::path(dir) / split, split});
    }
    parsed.corpus.split_info["split_source"] = "train/test directories";
  } else {
    sources.push_back({fs::path(dir), "train"});
    parsed.log.push_back("no train/ or test/ directory; all documents train");
  }

  for (const auto &[root, split] : sources) {
    std::vector<fs::path> anns;
    for (const auto &entry : fs::directory_iterator(root)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 9 && name.substr(name.size() - 9) == ".ann.json") anns.push_back(entry.path());
    }
    std::sort(anns.begin(), anns.end());
    for (const fs::path &ann_path : anns) {
      std::string name = ann_path.filename().string();
      const std::string doc = name.substr(0, name.size() - 9);
      CodePointText text(ReadFile((root / (doc + ".txt")).string()));
      Json ann = ParseJson(ReadFile(ann_path.string()), ann_path.string());

      std::vector<internal::CharSpan> props;
      const Json &offsets = ann.at("prop_offsets");
      const Json &labels = ann.at("prop_labels");
      if (offsets.size() != labels.size()) {
        Fail(ErrorCode::kParse, ann_path.string(), ": offsets and labels differ in length");
      }
      for (size_t i = 0; i < offsets.size(); ++i) {
        std::string label = labels[i].get<std::string>();
        int type = -1;
        for (int t = 0; t < schema.num_ac_types(); ++t) {
          if (internal::Lower(schema.ac_types[t]) == internal::Lower(label)) type = t;
        }
        if (type < 0) Fail(ErrorCode::kParse, ann_path.string(), ": unknown label '", label, "'");
        props.push_back({offsets[i][0].get<int>(), offsets[i][1].get<int>(), schema.ac_types[type]});
      }
      ArgStructure s = internal::BuildStructure(doc, text, 0, text.size(), props, &parsed);

      std::set<std::pair<int, int>> seen;
      const int num_props = static_cast<int>(props.size());
      for (const auto &[key, ar_type] : {std::pair("reasons", "reason"),
                                         std::pair("evidences", "evidence")}) {
        if (!ann.contains(key) || ann[key].is_null()) continue;
        for (const Json &link : ann[key]) {
          const int from = link[0][0].get<int>(), to = link[0][1].get<int>();
          const int target = link[1].get<int>();
          if (from < 0 || to >= num_props || from > to || target < 0 || target >= num_props) {
            Fail(ErrorCode::kParse, ann_path.string(), ": dangling ", ar_type, " link [[",
                 from, ",", to, "],", target, "]");
          }
          if (to > from) {
            parsed.expanded_links += to - from;
            parsed.log.push_back(internal::StrCat(doc, ": ", ar_type, " link from range [",
                                                  from, ",", to, "] expanded to ",
                                                  to - from + 1, " relations"));
          }
          for (int source = from; source <= to; ++source) {
            if (source == target) {
              parsed.log.push_back(internal::StrCat(doc, ": self ", ar_type, " on ", source,
                                                    " dropped"));
              continue;
            }
            if (!seen.insert({source, target}).second) {
              parsed.log.push_back(internal::StrCat(doc, ": duplicate link ", source, "->",
                                                    target, " (", ar_type, ") dropped"));
              continue;
            }
            s.ars.push_back({source, target, ar_type});
          }
        }
      }
      CorpusEntry entry{Canonicalize(s), split};
      ValidationReport report = ValidateStructure(entry.structure, schema);
      if (!report.empty()) {
        Fail(ErrorCode::kSchema, "document '", doc, "': ", report.front().message);
      }
      parsed.corpus.entries.push_back(std::move(entry));
    }
  }
  if (options.dev_fraction > 0) internal::CarveDev(&parsed.corpus, options.seed, options.dev_fraction);
  return parsed;
}

}  // namespace aasp
