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

#ifndef PROBEKIT_PROBING_H_
#define PROBEKIT_PROBING_H_

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "probekit/dataset.h"

namespace probekit {

struct NegWordList {
  std::set<std::string> words;
  // Any token ending in "n't" also counts as negative.
  bool nt_suffix_rule = true;

  // {no, not, nobody, never, nothing, none, empty, neither, cannot} plus the
  // n't rule.
  static NegWordList Default();

  bool operator==(const NegWordList&) const = default;
};

struct NegWordsProperty {
  NegWordList list = NegWordList::Default();
  bool operator==(const NegWordsProperty&) const = default;
};
struct OverlapProperty {
  bool operator==(const OverlapProperty&) const = default;
};
struct SubsequenceProperty {
  bool operator==(const SubsequenceProperty&) const = default;
};

using ProbingProperty =
    std::variant<NegWordsProperty, OverlapProperty, SubsequenceProperty>;

// "negwords", "overlap", "subsequence" (also "sub").
ProbingProperty ParseProperty(std::string_view name);
std::string_view PropertyName(const ProbingProperty& prop);

// 1 iff the hypothesis holds a listed word (or an n't token). The premise is
// never inspected.
int EvalNegWords(const SentencePair& pair, const NegWordList& list);
// 1 iff the hypothesis token set is a non-empty subset of the premise set.
int EvalOverlap(const SentencePair& pair);
// 1 iff the hypothesis tokens occur as a contiguous run of the premise.
int EvalSubsequence(const SentencePair& pair);
int EvalProperty(const SentencePair& pair, const ProbingProperty& prop);

struct ProbingExample {
  std::uint64_t source_id = 0;
  int prop_label = 0;

  bool operator==(const ProbingExample&) const = default;
};

struct ProbingDataset {
  ProbingProperty property;
  std::string base_name;
  Split split = Split::kTrain;
  std::vector<ProbingExample> examples;  // ascending source_id
  std::uint64_t seed = 0;
  // Property counts over the whole base dataset, before balancing.
  std::size_t base_positive = 0;
  std::size_t base_negative = 0;

  std::size_t CountLabel(int label) const;
};

// Keeps every minority-class example and a seeded uniform sample of the
// same size from the majority class. Throws kEmptyDataset on empty input and
// kDegenerateProperty when either class is empty.
ProbingDataset BuildProbingDataset(const NluDataset& ds,
                                   const ProbingProperty& prop,
                                   std::uint64_t seed);

// JSONL, one {"source_id", "prop_label"} object per line.
void WriteProbingJsonl(const ProbingDataset& pd,
                       const std::filesystem::path& path);
// Sidecar manifest: property, base dataset, split, seed, counts.
void WriteProbingManifest(const ProbingDataset& pd,
                          const std::filesystem::path& path);
// Reads a JSONL file written by WriteProbingJsonl. Only source_id and
// prop_label are restored; the split must be supplied by the caller.
std::vector<ProbingExample> ReadProbingJsonl(const std::filesystem::path& path);

}  // namespace probekit

#endif  // PROBEKIT_PROBING_H_
