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

// Hand-rolled generators shared by the property tests. Unlike the synthetic
// corpus generator these allow abutting spans, single-token spans, cycles and
// reciprocal relation pairs.

#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aasp/structure.hpp"

namespace aasp::testing {

inline int Uniform(std::mt19937_64 &rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

inline Paragraph MakeParagraph(const std::string &id, int n) {
  Paragraph p{id, {}};
  for (int i = 0; i < n; ++i) p.tokens.push_back("t" + std::to_string(i));
  return p;
}

// Random valid canonical structure under the schema.
inline ArgStructure RandomStructure(std::mt19937_64 &rng, const Schema &schema,
                                    const std::string &id, int max_tokens = 24,
                                    int max_acs = 8) {
  ArgStructure s;
  s.paragraph = MakeParagraph(id, Uniform(rng, 1, max_tokens));
  const int n = s.paragraph.size();
  int t = 0;
  while (t < n && static_cast<int>(s.acs.size()) < max_acs) {
    t += Uniform(rng, 0, 3);  // gap, possibly zero (abutting)
    if (t >= n) break;
    int len = Uniform(rng, 1, 5);
    int end = std::min(n - 1, t + len - 1);
    s.acs.push_back({t, end, schema.ac_types[Uniform(rng, 0, schema.num_ac_types() - 1)]});
    t = end + 1;
  }
  const int k = static_cast<int>(s.acs.size());
  if (k < 2) return s;
  std::set<std::pair<int, int>> used;
  std::vector<int> outgoing(k, 0);
  const int attempts = Uniform(rng, 0, 2 * k);
  for (int a = 0; a < attempts; ++a) {
    int h = Uniform(rng, 0, k - 1), tl = Uniform(rng, 0, k - 1);
    if (h == tl || used.count({h, tl})) continue;
    if (schema.mode == StructureMode::kTree && outgoing[h] > 0) continue;
    used.insert({h, tl});
    ++outgoing[h];
    s.ars.push_back({h, tl, schema.ar_types[Uniform(rng, 0, schema.num_ar_types() - 1)]});
  }
  std::sort(s.ars.begin(), s.ars.end());
  return s;
}

}  // namespace aasp::testing
