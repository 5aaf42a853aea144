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

#include "probekit/dataset.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "probekit/error.h"

namespace probekit {
namespace {

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Decodes one code point starting at s[i] and advances i. Malformed input
// decodes to U+FFFD one byte at a time.
char32_t NextCodePoint(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  int len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void AppendUtf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsSpace(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 ||
         cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

// Letters and digits. Outside ASCII this is a block-level approximation: the
// Latin-1 symbol range, general punctuation, arrows, math operators, CJK
// punctuation and fullwidth ASCII punctuation count as non-alphanumeric,
// everything else as a letter.
bool IsAlnum(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  }
  if (cp < 0xC0) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp == 0xFFFD) return false;
  return true;
}

char32_t ToLower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x131 &&
      cp != 0x138 && cp != 0x149 && cp != 0x17F) {
    // Latin Extended-A alternates upper/lower, with the parity flipping in
    // the 0x139..0x148 and 0x179..0x17E runs.
    const bool odd_upper =
        (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    if (odd_upper ? (cp % 2 == 1) : (cp % 2 == 0)) return cp + 1;
    return cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

struct SchemaFields {
  const char* premise;
  const char* hypothesis;
  const char* label;
  const char* pair_id;  // may be null
};

SchemaFields FieldsFor(Schema schema) {
  switch (schema) {
    case Schema::kSnli:
    case Schema::kMnli:
      return {"sentence1", "sentence2", "gold_label", "pairID"};
    case Schema::kFever:
      return {"evidence", "claim", "label", "id"};
  }
  return {"", "", "", nullptr};
}

std::string FieldString(const nlohmann::json& obj, const char* field,
                        std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                       ": missing string field '" + field +
                                       "'");
  }
  return it->get<std::string>();
}

}  // namespace

LabelSpace::LabelSpace(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.size() < 2) {
    throw Error(ErrorCode::kConfig, "label space needs at least two labels");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error(ErrorCode::kConfig, "empty label name");
    if (!seen.insert(AsciiLower(n)).second) {
      throw Error(ErrorCode::kConfig, "duplicate label name: " + n);
    }
  }
}

LabelSpace LabelSpace::Nli() {
  return LabelSpace({"entailment", "contradiction", "neutral"});
}

LabelSpace LabelSpace::Fever() {
  return LabelSpace({"SUPPORTS", "REFUTES", "NOT ENOUGH INFO"});
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

std::string_view SchemaName(Schema schema) {
  switch (schema) {
    case Schema::kSnli: return "snli";
    case Schema::kMnli: return "mnli";
    case Schema::kFever: return "fever";
  }
  return "?";
}

Split ParseSplit(std::string_view text) {
  const std::string t = AsciiLower(text);
  if (t == "train") return Split::kTrain;
  if (t == "valid" || t == "dev" || t == "validation") return Split::kValid;
  if (t == "test") return Split::kTest;
  throw Error(ErrorCode::kConfig, "unknown split: " + std::string(text));
}

Schema ParseSchema(std::string_view text) {
  const std::string t = AsciiLower(text);
  if (t == "snli") return Schema::kSnli;
  if (t == "mnli") return Schema::kMnli;
  if (t == "fever") return Schema::kFever;
  throw Error(ErrorCode::kConfig, "unknown schema: " + std::string(text));
}

std::uint32_t MapLabel(std::string_view raw, const LabelSpace& space) {
  const std::string needle = AsciiLower(raw);
  const auto& names = space.names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (AsciiLower(names[i]) == needle) return static_cast<std::uint32_t>(i);
  }
  throw Error(ErrorCode::kUnknownLabel,
              "unknown label '" + std::string(raw) + "'");
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<char32_t> current;
  auto flush = [&] {
    std::size_t begin = 0;
    std::size_t end = current.size();
    auto keep = [](char32_t cp) { return cp == '\'' || IsAlnum(cp); };
    while (begin < end && !keep(current[begin])) ++begin;
    while (end > begin && !keep(current[end - 1])) --end;
    if (begin < end) {
      std::string token;
      for (std::size_t i = begin; i < end; ++i) AppendUtf8(current[i], token);
      tokens.push_back(std::move(token));
    }
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = NextCodePoint(text, i);
    if (IsSpace(cp)) {
      flush();
      continue;
    }
    if (cp == 0x2019) cp = '\'';
    current.push_back(ToLower(cp));
  }
  flush();
  return tokens;
}

NluDataset LoadNluJsonl(const std::filesystem::path& path, Schema schema,
                        Split split) {
  if (schema == Schema::kFever && split == Split::kTest) {
    throw Error(ErrorCode::kConfig, "FEVER has no test split");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  NluDataset ds;
  ds.name = std::string(SchemaName(schema));
  ds.split = split;
  ds.label_space =
      schema == Schema::kFever ? LabelSpace::Fever() : LabelSpace::Nli();
  const SchemaFields fields = FieldsFor(schema);
  const bool skip_dash = schema != Schema::kFever;

  std::string line;
  std::size_t line_no = 0;
  std::size_t non_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++non_blank;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": malformed JSON (" + e.what() +
                                         ")");
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": not a JSON object");
    }
    const std::string raw_label = FieldString(obj, fields.label, line_no);
    if (skip_dash && raw_label == "-") {
      ++ds.skipped;
      continue;
    }
    SentencePair pair;
    try {
      pair.label = MapLabel(raw_label, ds.label_space);
    } catch (const Error& e) {
      throw Error(ErrorCode::kUnknownLabel,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    pair.premise = FieldString(obj, fields.premise, line_no);
    pair.hypothesis = FieldString(obj, fields.hypothesis, line_no);
    if (fields.pair_id != nullptr) {
      auto it = obj.find(fields.pair_id);
      if (it != obj.end()) {
        pair.source_pair_id =
            it->is_string() ? it->get<std::string>() : it->dump();
      }
    }
    pair.id = ds.pairs.size();
    ds.pairs.push_back(std::move(pair));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure on " + path.string());
  if (non_blank == 0) {
    throw Error(ErrorCode::kEmptyDataset, path.string() + " is empty");
  }
  return ds;
}

}  // namespace probekit
