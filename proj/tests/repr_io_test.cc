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

#include <gtest/gtest.h>

#include <cstring>
#include <limits>
#include <random>

#include "probekit/file_util.h"
#include "test_util.h"

namespace probekit {
namespace {

ReprMatrix RandomRepr(std::uint64_t n, std::uint32_t d, std::uint32_t k,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  ReprMatrix m;
  m.n = n;
  m.d = d;
  m.k = k;
  for (std::uint64_t i = 0; i < n; ++i) {
    m.ids.push_back(i * 3 + 1);
    m.labels.push_back(static_cast<std::uint32_t>(rng() % k));
  }
  for (std::uint64_t i = 0; i < n * d; ++i) m.data.push_back(g(rng));
  return m;
}

// Little-endian packing written out byte by byte.
void PutLe(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::string HandEncode(const ReprMatrix& m) {
  std::string out = "RPRB";
  PutLe(out, 1, 4);
  PutLe(out, m.n, 8);
  PutLe(out, m.d, 4);
  PutLe(out, m.k, 4);
  for (auto id : m.ids) PutLe(out, id, 8);
  for (auto l : m.labels) PutLe(out, l, 4);
  for (float f : m.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    PutLe(out, bits, 4);
  }
  return out;
}

TEST(ReprIoTest, FileSizes) {
  testing::TempDir dir;
  ReprMatrix empty;
  empty.d = 4;
  WriteRepr(empty, dir / "e.rprb");
  EXPECT_EQ(std::filesystem::file_size(dir / "e.rprb"), 24u);
  const ReprMatrix m = RandomRepr(2, 3, 2, 1);
  WriteRepr(m, dir / "m.rprb");
  EXPECT_EQ(std::filesystem::file_size(dir / "m.rprb"), 72u);
  EXPECT_EQ(ReprFileSize(2, 3), 72u);
}

TEST(ReprIoTest, EncodingMatchesHandPacking) {
  const ReprMatrix m = RandomRepr(5, 3, 3, 2);
  EXPECT_EQ(EncodeRepr(m), HandEncode(m));
}

TEST(ReprIoTest, RoundTripBitIdentical) {
  testing::TempDir dir;
  for (std::uint64_t n : {0u, 1u, 1000u}) {
    for (std::uint32_t d : {1u, 768u}) {
      const ReprMatrix m = RandomRepr(n, d, 3, n * 31 + d);
      const auto path = dir / "r.rprb";
      WriteRepr(m, path);
      const ReprMatrix back = ReadRepr(path);
      EXPECT_EQ(back, m);
      EXPECT_EQ(EncodeRepr(back), ReadFile(path));
    }
  }
}

TEST(ReprIoTest, HeaderOnlyRead) {
  testing::TempDir dir;
  WriteRepr(RandomRepr(7, 5, 4, 3), dir / "r.rprb");
  const ReprHeader h = ReadReprHeader(dir / "r.rprb");
  EXPECT_EQ(h.version, 1u);
  EXPECT_EQ(h.n, 7u);
  EXPECT_EQ(h.d, 5u);
  EXPECT_EQ(h.k, 4u);
}

TEST(ReprIoTest, CorruptionErrors) {
  const std::string good = EncodeRepr(RandomRepr(4, 2, 3, 4));

  std::string bad_magic = good;
  bad_magic.replace(0, 4, "XXXX");
  EXPECT_ERROR_CODE(DecodeRepr(bad_magic), ErrorCode::kFormat);

  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_ERROR_CODE(DecodeRepr(bad_version), ErrorCode::kFormat);

  EXPECT_ERROR_CODE(DecodeRepr(good.substr(0, good.size() - 1)),
                    ErrorCode::kLength);
  EXPECT_ERROR_CODE(DecodeRepr(good.substr(0, 10)), ErrorCode::kLength);
  EXPECT_ERROR_CODE(DecodeRepr(good + "x"), ErrorCode::kLength);

  // Label 3 with k = 3.
  std::string bad_label = good;
  const std::size_t label0 = 24 + 4 * 8;
  bad_label[label0] = 3;
  EXPECT_ERROR_CODE(DecodeRepr(bad_label), ErrorCode::kCorruptData);

  std::string bad_float = good;
  const std::size_t data0 = 24 + 4 * 12;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bad_float.data() + data0 + 4, &nan, 4);
  EXPECT_ERROR_CODE(DecodeRepr(bad_float), ErrorCode::kCorruptData);

  std::string inf_float = good;
  const float inf = std::numeric_limits<float>::infinity();
  std::memcpy(inf_float.data() + data0, &inf, 4);
  EXPECT_ERROR_CODE(DecodeRepr(inf_float), ErrorCode::kCorruptData);

  std::string dup_id = good;
  std::memcpy(dup_id.data() + 24 + 8, dup_id.data() + 24, 8);
  EXPECT_ERROR_CODE(DecodeRepr(dup_id), ErrorCode::kCorruptData);
}

TEST(ReprIoTest, MissingFileIsIoError) {
  EXPECT_ERROR_CODE(ReadRepr("/nonexistent/dir/x.rprb"), ErrorCode::kIo);
}

TEST(ReprIoTest, WriteRejectsInvalidMatrix) {
  testing::TempDir dir;
  ReprMatrix m = RandomRepr(3, 2, 2, 5);
  m.labels[1] = 2;
  EXPECT_ERROR_CODE(WriteRepr(m, dir / "x.rprb"), ErrorCode::kCorruptData);
  EXPECT_FALSE(std::filesystem::exists(dir / "x.rprb"));
}

ReprMatrix IdMatrix(std::vector<std::uint64_t> ids, std::uint32_t d = 2) {
  ReprMatrix m;
  m.n = ids.size();
  m.d = d;
  m.k = 3;
  m.ids = std::move(ids);
  m.labels.assign(m.n, 2);
  for (std::uint64_t i = 0; i < m.n * d; ++i) {
    m.data.push_back(static_cast<float>(m.ids[i / d]) + 0.5f * (i % d));
  }
  return m;
}

TEST(JoinTest, SelectsByIdInOrder) {
  const ReprMatrix m = IdMatrix({1, 2, 3});
  const ProbeInput in =
      Join({{{3, 1}, {1, 0}}, &m}, SplitSource{}, SplitSource{});
  ASSERT_EQ(in.rows(), 2u);
  EXPECT_EQ(in.k, 2u);
  EXPECT_EQ(in.ids, (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(in.labels, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_DOUBLE_EQ(in.features(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(in.features(1, 1), 3.5);
  EXPECT_EQ(in.train.begin, 0u);
  EXPECT_EQ(in.train.end, 2u);
  EXPECT_TRUE(in.valid.empty());
  EXPECT_TRUE(in.test.empty());
}

TEST(JoinTest, SplitsConcatenateTrainValidTest) {
  const ReprMatrix train = IdMatrix({0, 1, 2, 3});
  const ReprMatrix valid = IdMatrix({0, 1});
  const ReprMatrix test = IdMatrix({0, 1, 2});
  const ProbeInput in = Join({{{2, 1}, {0, 0}, {1, 1}}, &train},
                             {{{1, 0}}, &valid}, {{{0, 1}, {2, 0}}, &test});
  EXPECT_EQ(in.rows(), 6u);
  EXPECT_EQ(in.train.size(), 3u);
  EXPECT_EQ(in.valid.begin, 3u);
  EXPECT_EQ(in.valid.size(), 1u);
  EXPECT_EQ(in.test.begin, 4u);
  EXPECT_EQ(in.test.end, 6u);
  EXPECT_EQ(in.ids, (std::vector<std::uint64_t>{0, 1, 2, 1, 0, 2}));
}

TEST(JoinTest, MissingIdsListed) {
  const ReprMatrix m = IdMatrix({1, 2, 3});
  try {
    Join({{{9, 1}, {1, 0}}, &m}, SplitSource{}, SplitSource{});
    FAIL() << "expected a join error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kJoin);
    EXPECT_NE(std::string(e.what()).find('9'), std::string::npos);
  }
  std::vector<ProbingExample> many;
  for (std::uint64_t i = 100; i < 130; ++i) many.push_back({i, 0});
  try {
    Join({many, &m}, SplitSource{}, SplitSource{});
    FAIL() << "expected a join error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("109"), std::string::npos);
    EXPECT_EQ(msg.find("110"), std::string::npos);
  }
}

TEST(JoinTest, EmptyTrainAndWidthMismatch) {
  const ReprMatrix a = IdMatrix({0, 1}, 2);
  const ReprMatrix b = IdMatrix({0, 1}, 3);
  EXPECT_ERROR_CODE(Join({{}, &a}, SplitSource{}, SplitSource{}),
                    ErrorCode::kJoin);
  EXPECT_ERROR_CODE(Join({{{0, 1}}, &a}, {{{1, 0}}, &b}, SplitSource{}),
                    ErrorCode::kShape);
}

TEST(JoinTest, Deterministic) {
  const ReprMatrix m = RandomRepr(200, 4, 2, 9);
  std::vector<ProbingExample> ex;
  for (std::uint64_t i = 0; i < 200; i += 3) ex.push_back({m.ids[i], int(i % 2)});
  std::reverse(ex.begin(), ex.end());
  const ProbeInput a = Join({ex, &m}, SplitSource{}, SplitSource{});
  const ProbeInput b = Join({ex, &m}, SplitSource{}, SplitSource{});
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.rows(), ex.size());
}

}  // namespace
}  // namespace probekit
