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

#ifndef PROBEKIT_REPR_IO_H_
#define PROBEKIT_REPR_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "probekit/probing.h"

namespace probekit {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n x d float32 representations with one id and one class label per row.
//
// On disk (RPRB v1, little-endian, no padding):
//   "RPRB" | u32 version=1 | u64 n | u32 d | u32 k     (24 bytes)
//   n x u64 ids | n x u32 labels | n*d x f32 row-major data
struct ReprMatrix {
  std::uint64_t n = 0;
  std::uint32_t d = 0;
  std::uint32_t k = 2;
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> labels;
  std::vector<float> data;

  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * d, d};
  }

  bool operator==(const ReprMatrix&) const = default;
};

inline constexpr std::size_t kReprHeaderBytes = 24;
inline constexpr std::uint32_t kReprVersion = 1;

std::size_t ReprFileSize(std::uint64_t n, std::uint32_t d);

// Throws kCorruptData if sizes disagree, ids repeat, a label is >= k, or a
// value is not finite.
void ValidateRepr(const ReprMatrix& m);

std::string EncodeRepr(const ReprMatrix& m);
// kFormat for bad magic/version, kLength for a short or overlong buffer,
// kCorruptData for failed invariants.
ReprMatrix DecodeRepr(std::string_view bytes);

void WriteRepr(const ReprMatrix& m, const std::filesystem::path& path);
ReprMatrix ReadRepr(const std::filesystem::path& path);

struct ReprHeader {
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  std::uint32_t d = 0;
  std::uint32_t k = 0;
};
ReprHeader ReadReprHeader(const std::filesystem::path& path);

struct RowSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
};

// Probe-ready rows: train rows, then valid, then test, each in ascending
// source_id order. Ids may repeat across splits since every split numbers its
// pairs from zero.
struct ProbeInput {
  RowMatrix features;
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> labels;
  std::uint32_t k = 2;
  RowSpan train, valid, test;

  std::size_t rows() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

struct SplitSource {
  std::vector<ProbingExample> examples;
  const ReprMatrix* reprs = nullptr;
};

// Selects rows by id and relabels them with the probing labels (k = 2).
// Empty valid/test sources are allowed; an empty train split is not.
// Missing ids raise kJoin naming up to ten of them.
ProbeInput Join(const SplitSource& train, const SplitSource& valid,
                const SplitSource& test);

// Every row of `reprs` as training rows, in file order, with its own labels.
ProbeInput ProbeInputFromRepr(const ReprMatrix& reprs);

}  // namespace probekit

#endif  // PROBEKIT_REPR_IO_H_
