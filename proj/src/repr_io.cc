// Copyright 2026 The ProbeKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "probekit/repr_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "probekit/error.h"
#include "probekit/file_util.h"

namespace probekit {
namespace {

constexpr char kMagic[4] = {'R', 'P', 'R', 'B'};

template <typename T>
void PutLe(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T GetLe(const char* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return value;
}

ReprHeader DecodeHeader(std::string_view bytes) {
  if (bytes.size() < kReprHeaderBytes) {
    throw Error(ErrorCode::kLength,
                "RPRB header needs 24 bytes, got " +
                    std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kFormat, "bad RPRB magic");
  }
  ReprHeader h;
  h.version = GetLe<std::uint32_t>(bytes.data() + 4);
  h.n = GetLe<std::uint64_t>(bytes.data() + 8);
  h.d = GetLe<std::uint32_t>(bytes.data() + 16);
  h.k = GetLe<std::uint32_t>(bytes.data() + 20);
  if (h.version != kReprVersion) {
    throw Error(ErrorCode::kFormat,
                "unsupported RPRB version " + std::to_string(h.version));
  }
  return h;
}

std::string MissingIdsMessage(const std::vector<std::uint64_t>& missing,
                              std::string_view split) {
  std::string msg = std::to_string(missing.size()) + " " + std::string(split) +
                    " id(s) missing from representations:";
  for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
    msg += " " + std::to_string(missing[i]);
  }
  if (missing.size() > 10) msg += " ...";
  return msg;
}

}  // namespace

std::size_t ReprFileSize(std::uint64_t n, std::uint32_t d) {
  return kReprHeaderBytes + n * (8 + 4) + n * d * 4;
}

void ValidateRepr(const ReprMatrix& m) {
  if (m.ids.size() != m.n || m.labels.size() != m.n ||
      m.data.size() != m.n * m.d) {
    throw Error(ErrorCode::kCorruptData, "RPRB field sizes disagree with n/d");
  }
  if (m.k < 1) throw Error(ErrorCode::kCorruptData, "RPRB k must be positive");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m.n);
  for (std::uint64_t i = 0; i < m.n; ++i) {
    if (!seen.insert(m.ids[i]).second) {
      throw Error(ErrorCode::kCorruptData,
                  "duplicate id " + std::to_string(m.ids[i]));
    }
    if (m.labels[i] >= m.k) {
      throw Error(ErrorCode::kCorruptData,
                  "row " + std::to_string(i) + " label " +
                      std::to_string(m.labels[i]) + " >= k=" +
                      std::to_string(m.k));
    }
  }
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    if (!std::isfinite(m.data[i])) {
      throw Error(ErrorCode::kCorruptData,
                  "non-finite value at row " + std::to_string(i / m.d));
    }
  }
}

std::string EncodeRepr(const ReprMatrix& m) {
  ValidateRepr(m);
  std::string out;
  out.reserve(ReprFileSize(m.n, m.d));
  out.append(kMagic, 4);
  PutLe<std::uint32_t>(out, kReprVersion);
  PutLe<std::uint64_t>(out, m.n);
  PutLe<std::uint32_t>(out, m.d);
  PutLe<std::uint32_t>(out, m.k);
  for (auto id : m.ids) PutLe<std::uint64_t>(out, id);
  for (auto label : m.labels) PutLe<std::uint32_t>(out, label);
  for (float v : m.data) PutLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

ReprMatrix DecodeRepr(std::string_view bytes) {
  const ReprHeader h = DecodeHeader(bytes);
  // Guard the size arithmetic against absurd headers before multiplying.
  if (h.n > bytes.size() || (h.d > 0 && h.n * h.d > bytes.size())) {
    throw Error(ErrorCode::kLength, "RPRB payload shorter than header claims");
  }
  const std::size_t expected = ReprFileSize(h.n, h.d);
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kLength,
                "RPRB expects " + std::to_string(expected) + " bytes, got " +
                    std::to_string(bytes.size()));
  }
  ReprMatrix m;
  m.n = h.n;
  m.d = h.d;
  m.k = h.k;
  m.ids.resize(m.n);
  m.labels.resize(m.n);
  m.data.resize(m.n * m.d);
  const char* p = bytes.data() + kReprHeaderBytes;
  for (auto& id : m.ids) {
    id = GetLe<std::uint64_t>(p);
    p += 8;
  }
  for (auto& label : m.labels) {
    label = GetLe<std::uint32_t>(p);
    p += 4;
  }
  for (auto& v : m.data) {
    v = std::bit_cast<float>(GetLe<std::uint32_t>(p));
    p += 4;
  }
  ValidateRepr(m);
  return m;
}

void WriteRepr(const ReprMatrix& m, const std::filesystem::path& path) {
  WriteFileAtomic(path, EncodeRepr(m));
}

ReprMatrix ReadRepr(const std::filesystem::path& path) {
  return DecodeRepr(ReadFile(path));
}

ReprHeader ReadReprHeader(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string buf(kReprHeaderBytes, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  return DecodeHeader(buf);
}

ProbeInput Join(const SplitSource& train, const SplitSource& valid,
                const SplitSource& test) {
  if (train.examples.empty()) {
    throw Error(ErrorCode::kJoin, "train split is empty");
  }
  struct Part {
    const SplitSource* src;
    std::string_view name;
    RowSpan* span;
  };
  ProbeInput out;
  const Part parts[] = {{&train, "train", &out.train},
                        {&valid, "valid", &out.valid},
                        {&test, "test", &out.test}};

  std::size_t total = 0;
  std::uint32_t d = 0;
  bool have_d = false;
  for (const auto& part : parts) {
    if (part.src->examples.empty()) continue;
    if (part.src->reprs == nullptr) {
      throw Error(ErrorCode::kJoin,
                  std::string(part.name) + " split has no representations");
    }
    if (have_d && part.src->reprs->d != d) {
      throw Error(ErrorCode::kShape, "representation widths differ by split");
    }
    d = part.src->reprs->d;
    have_d = true;
    total += part.src->examples.size();
  }

  out.features.resize(static_cast<Eigen::Index>(total), d);
  out.ids.reserve(total);
  out.labels.reserve(total);
  std::size_t row = 0;
  for (const auto& part : parts) {
    part.span->begin = row;
    if (!part.src->examples.empty()) {
      const ReprMatrix& m = *part.src->reprs;
      std::unordered_map<std::uint64_t, std::size_t> index;
      index.reserve(m.n);
      for (std::size_t i = 0; i < m.n; ++i) index.emplace(m.ids[i], i);

      std::vector<ProbingExample> sorted = part.src->examples;
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.source_id < b.source_id;
      });
      std::vector<std::uint64_t> missing;
      for (const auto& e : sorted) {
        if (index.find(e.source_id) == index.end()) missing.push_back(e.source_id);
      }
      if (!missing.empty()) {
        throw Error(ErrorCode::kJoin, MissingIdsMessage(missing, part.name));
      }
      for (const auto& e : sorted) {
        const auto src = m.row(index[e.source_id]);
        for (std::uint32_t j = 0; j < d; ++j) {
          out.features(static_cast<Eigen::Index>(row), j) = src[j];
        }
        out.ids.push_back(e.source_id);
        out.labels.push_back(static_cast<std::uint32_t>(e.prop_label));
        ++row;
      }
    }
    part.span->end = row;
  }
  return out;
}

ProbeInput ProbeInputFromRepr(const ReprMatrix& reprs) {
  if (reprs.n == 0) throw Error(ErrorCode::kJoin, "representation file has no rows");
  ProbeInput in;
  in.features.resize(static_cast<Eigen::Index>(reprs.n), reprs.d);
  for (std::size_t i = 0; i < reprs.n; ++i) {
    for (std::uint32_t j = 0; j < reprs.d; ++j) {
      in.features(static_cast<Eigen::Index>(i), j) = reprs.data[i * reprs.d + j];
    }
  }
  in.ids = reprs.ids;
  in.labels = reprs.labels;
  in.k = reprs.k;
  in.train = {0, reprs.n};
  in.valid = in.test = {reprs.n, reprs.n};
  return in;
}

}  // namespace probekit
