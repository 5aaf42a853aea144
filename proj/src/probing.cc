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

#include "probekit/probing.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "probekit/error.h"
#include "probekit/file_util.h"

namespace probekit {
namespace {

bool EndsWithNt(const std::string& token) {
  return token.size() >= 3 && token.compare(token.size() - 3, 3, "n't") == 0;
}

}  // namespace

NegWordList NegWordList::Default() {
  return NegWordList{{"no", "not", "nobody", "never", "nothing", "none",
                      "empty", "neither", "cannot"},
                     true};
}

ProbingProperty ParseProperty(std::string_view name) {
  if (name == "negwords") return NegWordsProperty{};
  if (name == "overlap") return OverlapProperty{};
  if (name == "subsequence" || name == "sub") return SubsequenceProperty{};
  throw Error(ErrorCode::kConfig, "unknown probing task: " + std::string(name));
}

std::string_view PropertyName(const ProbingProperty& prop) {
  struct Visitor {
    std::string_view operator()(const NegWordsProperty&) const { return "negwords"; }
    std::string_view operator()(const OverlapProperty&) const { return "overlap"; }
    std::string_view operator()(const SubsequenceProperty&) const { return "subsequence"; }
  };
  return std::visit(Visitor{}, prop);
}

int EvalNegWords(const SentencePair& pair, const NegWordList& list) {
  for (const auto& token : Tokenize(pair.hypothesis)) {
    if (list.words.count(token) > 0) return 1;
    if (list.nt_suffix_rule && EndsWithNt(token)) return 1;
  }
  return 0;
}

int EvalOverlap(const SentencePair& pair) {
  const auto hyp = Tokenize(pair.hypothesis);
  if (hyp.empty()) return 0;
  const auto prem = Tokenize(pair.premise);
  const std::unordered_set<std::string> prem_set(prem.begin(), prem.end());
  for (const auto& token : hyp) {
    if (prem_set.count(token) == 0) return 0;
  }
  return 1;
}

int EvalSubsequence(const SentencePair& pair) {
  const auto hyp = Tokenize(pair.hypothesis);
  if (hyp.empty()) return 0;
  const auto prem = Tokenize(pair.premise);
  return std::search(prem.begin(), prem.end(), hyp.begin(), hyp.end()) !=
                 prem.end()
             ? 1
             : 0;
}

int EvalProperty(const SentencePair& pair, const ProbingProperty& prop) {
  struct Visitor {
    const SentencePair& pair;
    int operator()(const NegWordsProperty& p) const {
      return EvalNegWords(pair, p.list);
    }
    int operator()(const OverlapProperty&) const { return EvalOverlap(pair); }
    int operator()(const SubsequenceProperty&) const {
      return EvalSubsequence(pair);
    }
  };
  return std::visit(Visitor{pair}, prop);
}

std::size_t ProbingDataset::CountLabel(int label) const {
  return static_cast<std::size_t>(
      std::count_if(examples.begin(), examples.end(),
                    [label](const auto& e) { return e.prop_label == label; }));
}

ProbingDataset BuildProbingDataset(const NluDataset& ds,
                                   const ProbingProperty& prop,
                                   std::uint64_t seed) {
  if (ds.pairs.empty()) {
    throw Error(ErrorCode::kEmptyDataset,
                "dataset " + ds.name + " has no pairs");
  }
  std::vector<std::uint64_t> positives;
  std::vector<std::uint64_t> negatives;
  for (const auto& pair : ds.pairs) {
    (EvalProperty(pair, prop) ? positives : negatives).push_back(pair.id);
  }
  if (positives.empty() || negatives.empty()) {
    throw Error(ErrorCode::kDegenerateProperty,
                std::string(PropertyName(prop)) + " on " + ds.name + "/" +
                    std::string(SplitName(ds.split)) + ": " +
                    std::to_string(positives.size()) + " positive, " +
                    std::to_string(negatives.size()) +
                    " negative; cannot balance");
  }
  std::sort(positives.begin(), positives.end());
  std::sort(negatives.begin(), negatives.end());

  const bool pos_minority = positives.size() <= negatives.size();
  std::vector<std::uint64_t>& minority = pos_minority ? positives : negatives;
  std::vector<std::uint64_t>& majority = pos_minority ? negatives : positives;
  const std::size_t m = minority.size();
  if (majority.size() > m) {
    // Partial Fisher-Yates over the id-sorted candidates.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, majority.size() - 1);
      std::swap(majority[i], majority[pick(rng)]);
    }
    majority.resize(m);
  }

  ProbingDataset out;
  out.property = prop;
  out.base_name = ds.name;
  out.split = ds.split;
  out.seed = seed;
  out.base_positive = pos_minority ? m : ds.pairs.size() - m;
  out.base_negative = ds.pairs.size() - out.base_positive;
  out.examples.reserve(2 * m);
  for (auto id : positives) out.examples.push_back({id, 1});
  for (auto id : negatives) out.examples.push_back({id, 0});
  std::sort(out.examples.begin(), out.examples.end(),
            [](const auto& a, const auto& b) { return a.source_id < b.source_id; });
  return out;
}

void WriteProbingJsonl(const ProbingDataset& pd,
                       const std::filesystem::path& path) {
  std::string body;
  body.reserve(pd.examples.size() * 32);
  for (const auto& e : pd.examples) {
    body += "{\"source_id\":" + std::to_string(e.source_id) +
            ",\"prop_label\":" + std::to_string(e.prop_label) + "}\n";
  }
  WriteFileAtomic(path, body);
}

void WriteProbingManifest(const ProbingDataset& pd,
                          const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["property"] = PropertyName(pd.property);
  if (const auto* neg = std::get_if<NegWordsProperty>(&pd.property)) {
    j["neg_words"] = neg->list.words;
    j["nt_suffix_rule"] = neg->list.nt_suffix_rule;
  }
  j["base_dataset"] = pd.base_name;
  j["split"] = SplitName(pd.split);
  j["seed"] = pd.seed;
  j["counts"] = {{"total", pd.examples.size()},
                 {"positive", pd.CountLabel(1)},
                 {"negative", pd.CountLabel(0)},
                 {"base_positive", pd.base_positive},
                 {"base_negative", pd.base_negative}};
  WriteFileAtomic(path, j.dump(2) + "\n");
}

std::vector<ProbingExample> ReadProbingJsonl(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<ProbingExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ProbingExample e;
      e.source_id = j.at("source_id").get<std::uint64_t>();
      e.prop_label = j.at("prop_label").get<int>();
      if (e.prop_label != 0 && e.prop_label != 1) {
        throw Error(ErrorCode::kParse, "prop_label must be 0 or 1");
      }
      out.push_back(e);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + " line " +
                                         std::to_string(line_no) + ": " +
                                         e.what());
    }
  }
  return out;
}

}  // namespace probekit
