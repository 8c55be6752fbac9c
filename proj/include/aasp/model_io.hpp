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

// Model files: one JSON document with config, schema, vocabulary and
// tensors as base64 little-endian float32.

#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "aasp/corpus.hpp"
#include "aasp/model.hpp"

namespace aasp {

inline constexpr const char *kModelFormat = "aasp-model";
inline constexpr int kModelVersion = 1;

namespace internal {

inline constexpr char kBase64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string Base64Encode(const std::vector<uint8_t> &in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  for (size_t i = 0; i < in.size(); i += 3) {
    uint32_t v = uint32_t(in[i]) << 16;
    if (i + 1 < in.size()) v |= uint32_t(in[i + 1]) << 8;
    if (i + 2 < in.size()) v |= in[i + 2];
    out += kBase64[v >> 18 & 63];
    out += kBase64[v >> 12 & 63];
    out += i + 1 < in.size() ? kBase64[v >> 6 & 63] : '=';
    out += i + 2 < in.size() ? kBase64[v & 63] : '=';
  }
  return out;
}

inline std::vector<uint8_t> Base64Decode(const std::string &in, const std::string &what) {
  auto value = [&](char c) -> uint32_t {
    const char *p = std::strchr(kBase64, c);
    if (c == '\0' || p == nullptr) Fail(ErrorCode::kParse, what, ": invalid base64 character");
    return static_cast<uint32_t>(p - kBase64);
  };
  if (in.size() % 4 != 0) Fail(ErrorCode::kParse, what, ": truncated base64 data");
  std::vector<uint8_t> out;
  out.reserve(in.size() / 4 * 3);
  for (size_t i = 0; i < in.size(); i += 4) {
    const int pad = (in[i + 3] == '=') + (in[i + 2] == '=');
    if (pad > 0 && i + 4 != in.size()) Fail(ErrorCode::kParse, what, ": misplaced base64 padding");
    uint32_t v = value(in[i]) << 18 | value(in[i + 1]) << 12;
    if (pad < 2) v |= value(in[i + 2]) << 6;
    if (pad < 1) v |= value(in[i + 3]);
    out.push_back(v >> 16 & 255);
    if (pad < 2) out.push_back(v >> 8 & 255);
    if (pad < 1) out.push_back(v & 255);
  }
  return out;
}

// Column-major float32, little-endian.
inline std::string EncodeTensor(const Mat<float> &m) {
  std::vector<uint8_t> bytes;
  bytes.reserve(m.size() * 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    uint32_t u;
    std::memcpy(&u, m.data() + i, 4);
    for (int b = 0; b < 4; ++b) bytes.push_back(u >> (8 * b) & 255);
  }
  return Base64Encode(bytes);
}

inline Mat<float> DecodeTensor(const std::string &data, int rows, int cols,
                               const std::string &what) {
  std::vector<uint8_t> bytes = Base64Decode(data, what);
  if (bytes.size() != size_t(rows) * cols * 4) {
    Fail(ErrorCode::kParse, what, ": expected ", size_t(rows) * cols * 4, " bytes, found ",
         bytes.size());
  }
  Mat<float> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= uint32_t(bytes[4 * i + b]) << (8 * b);
    std::memcpy(m.data() + i, &u, 4);
  }
  return m;
}

}  // namespace internal

inline Json ModelToJson(const Model<float> &m) {
  Json tensors = Json::array();
  const std::vector<TensorSpec> specs = m.Specs();
  for (size_t i = 0; i < specs.size(); ++i) {
    tensors.push_back({{"name", specs[i].name},
                       {"rows", specs[i].rows},
                       {"cols", specs[i].cols},
                       {"data", internal::EncodeTensor(m.params.t[i])}});
  }
  return Json{{"format", kModelFormat},
              {"version", kModelVersion},
              {"config", ConfigToJson(m.config)},
              {"schema", SchemaToJson(m.schema)},
              {"vocab", m.vocab.tokens()},
              {"tensors", tensors}};
}

inline Model<float> ModelFromJson(const Json &j, const std::string &where) {
  if (!j.is_object() || !j.contains("format") || j["format"] != kModelFormat) {
    Fail(ErrorCode::kParse, where, ": not an aasp model file");
  }
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    Fail(ErrorCode::kParse, where, ": missing model format version");
  }
  if (j["version"].get<int>() != kModelVersion) {
    Fail(ErrorCode::kVersion, where, ": model format version ", j["version"].get<int>(),
         " is not supported (expected ", kModelVersion, ")");
  }
  internal::RequireKeys(j, {"format", "version", "config", "schema", "vocab", "tensors"}, {},
                        where);
  Model<float> m;
  try {
    m.config = ConfigFromJson(j["config"]);
    m.schema = SchemaFromJson(j["schema"]);
    m.vocab = Vocab::FromTokens(j["vocab"].get<std::vector<std::string>>());
    const std::vector<TensorSpec> specs = m.Specs();
    const Json &tensors = j["tensors"];
    if (!tensors.is_array() || tensors.size() != specs.size()) {
      Fail(ErrorCode::kParse, where, ": expected ", specs.size(), " tensors");
    }
    for (size_t i = 0; i < specs.size(); ++i) {
      const Json &t = tensors[i];
      const std::string what = internal::StrCat(where, ": tensor '", specs[i].name, "'");
      if (t.at("name").get<std::string>() != specs[i].name || t.at("rows").get<int>() != specs[i].rows ||
          t.at("cols").get<int>() != specs[i].cols) {
        Fail(ErrorCode::kParse, what, ": name or shape mismatch");
      }
      m.params.t.push_back(
          internal::DecodeTensor(t.at("data").get<std::string>(), specs[i].rows, specs[i].cols, what));
    }
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kParse, where, ": ", e.what());
  }
  return m;
}

inline void SaveModel(const Model<float> &m, const std::string &path) {
  WriteFile(path, ModelToJson(m).dump() + "\n");
}

inline Model<float> LoadModel(const std::string &path) {
  return ModelFromJson(ParseJson(ReadFile(path), path), path);
}

}  // namespace aasp
