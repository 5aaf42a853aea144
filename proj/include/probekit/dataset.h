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

#ifndef PROBEKIT_DATASET_H_
#define PROBEKIT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace probekit {

class LabelSpace {
 public:
  // Throws Error(kConfig) unless there are at least two unique, non-empty
  // names.
  explicit LabelSpace(std::vector<std::string> names);

  static LabelSpace Nli();    // entailment, contradiction, neutral
  static LabelSpace Fever();  // SUPPORTS, REFUTES, NOT ENOUGH INFO

  const std::vector<std::string>& names() const { return names_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }

  bool operator==(const LabelSpace&) const = default;

 private:
  std::vector<std::string> names_;
};

enum class Split { kTrain, kValid, kTest };
enum class Schema { kSnli, kMnli, kFever };

std::string_view SplitName(Split split);
std::string_view SchemaName(Schema schema);
// Accepts "train", "valid" (also "dev", "validation"), "test".
Split ParseSplit(std::string_view text);
Schema ParseSchema(std::string_view text);

struct SentencePair {
  std::uint64_t id = 0;
  std::string premise;
  std::string hypothesis;
  std::uint32_t label = 0;
  // The corpus' own pair identifier, when the schema has one.
  std::optional<std::string> source_pair_id;

  bool operator==(const SentencePair&) const = default;
};

struct NluDataset {
  std::string name;
  Split split = Split::kTrain;
  LabelSpace label_space = LabelSpace::Nli();
  std::vector<SentencePair> pairs;
  // Lines dropped because the gold label was "-".
  std::size_t skipped = 0;

  bool operator==(const NluDataset&) const = default;
};

// Case-insensitive exact match; no whitespace trimming.
std::uint32_t MapLabel(std::string_view raw, const LabelSpace& space);

// Lowercase, split on Unicode whitespace, strip non-alphanumeric characters
// other than apostrophes from both ends of every token, drop empty tokens.
// U+2019 is folded to an ASCII apostrophe so "didn’t" and "didn't" agree.
std::vector<std::string> Tokenize(std::string_view text);

// Reads one JSON object per line. Blank lines are ignored. Ids count retained
// lines from zero in file order.
NluDataset LoadNluJsonl(const std::filesystem::path& path, Schema schema,
                        Split split);

}  // namespace probekit

#endif  // PROBEKIT_DATASET_H_
