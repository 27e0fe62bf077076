// Copyright 2026 The MLIC Codec Authors. All Rights Reserved.
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

#include "mlic/container.h"

#include <gtest/gtest.h>

#include "mlic/codec.h"
#include "mlic/error.h"

namespace mlic {
namespace {

// Byte offsets of a few header fields.
constexpr size_t kVersionAt = 4;
constexpr size_t kWidthAt = 5;
constexpr size_t kFlagsAt = 19;
constexpr size_t kSlicesAt = 24;
constexpr size_t kPrecisionAt = 26;
constexpr size_t kCountAt = 41;

Container Sample(bool plus) {
  const ModelConfig m = plus ? ModelConfig::MlicPlus() : ModelConfig::Mlic();
  Container c;
  c.header.width = 70;
  c.header.height = 33;
  c.header.transform = m.transform;
  c.header.mem = m.mem;
  c.header.archive_hash = 0x0123456789abcdefULL;
  for (int i = 0; i < c.header.num_sections(); ++i) {
    c.sections.emplace_back(static_cast<size_t>(i % 4), static_cast<uint8_t>(i));
  }
  return c;
}

ErrorKind KindOf(const std::vector<uint8_t>& bytes) {
  try {
    ParseContainer(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kIo;  // sentinel: parsed fine
}

TEST(Container, RoundTripsBothPresets) {
  for (bool plus : {false, true}) {
    const Container c = Sample(plus);
    EXPECT_EQ(c.header.num_sections(), plus ? 21 : 13);
    const std::vector<uint8_t> bytes = SerializeContainer(c);
    const Container back = ParseContainer(bytes);
    EXPECT_EQ(back.header.width, 70u);
    EXPECT_EQ(back.header.height, 33u);
    EXPECT_EQ(back.header.transform, c.header.transform);
    EXPECT_EQ(back.header.mem, c.header.mem);
    EXPECT_EQ(back.header.archive_hash, c.header.archive_hash);
    EXPECT_EQ(back.sections, c.sections);
    EXPECT_EQ(SerializeContainer(back), bytes);
    EXPECT_EQ(bytes.size(), 43 + 4 * c.sections.size() + c.payload_bytes());
  }
}

TEST(Container, LayoutIsLittleEndian) {
  const std::vector<uint8_t> b = SerializeContainer(Sample(false));
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "MLIC");
  EXPECT_EQ(b[kVersionAt], kContainerVersion);
  EXPECT_EQ(b[kWidthAt], 70);
  EXPECT_EQ(b[kWidthAt + 1], 0);
  EXPECT_EQ(b[kSlicesAt], 6);
  EXPECT_EQ(b[kPrecisionAt], 16);
  EXPECT_EQ(b[kCountAt], 13);
  EXPECT_EQ(b[33], 0xef);  // hash low byte first
}

TEST(Container, SectionNaming) {
  EXPECT_EQ(SectionIndex(0, Pass::kAnchor), 1);
  EXPECT_EQ(SectionIndex(0, Pass::kNonAnchor), 2);
  EXPECT_EQ(SectionIndex(9, Pass::kNonAnchor), 20);
  EXPECT_EQ(SectionName(0), "z");
  EXPECT_EQ(SectionName(1), "s0.anchor");
  EXPECT_EQ(SectionName(8), "s3.nonanchor");
}

TEST(Container, RejectsMalformedInput) {
  const std::vector<uint8_t> good = SerializeContainer(Sample(true));
  auto patched = [&](size_t at, uint8_t v) {
    std::vector<uint8_t> b = good;
    b[at] = v;
    return b;
  };
  EXPECT_EQ(KindOf(patched(0, 'X')), ErrorKind::kFormat);
  EXPECT_EQ(KindOf(patched(kVersionAt, 2)), ErrorKind::kFormat);
  EXPECT_EQ(KindOf(patched(kFlagsAt, good[kFlagsAt] | 0x20)), ErrorKind::kFormat);
  EXPECT_EQ(KindOf(patched(kFlagsAt, good[kFlagsAt] | 0x80)), ErrorKind::kFormat);
  EXPECT_EQ(KindOf(patched(kSlicesAt, 9)), ErrorKind::kFormat);
  EXPECT_EQ(KindOf(patched(kPrecisionAt, 15)), ErrorKind::kFormat);
  EXPECT_EQ(KindOf(patched(kCountAt, 13)), ErrorKind::kFormat);
  EXPECT_EQ(KindOf(patched(20, 4)), ErrorKind::kFormat);  // even J
  std::vector<uint8_t> zero_w = good;
  std::fill_n(zero_w.begin() + kWidthAt, 4, 0);
  EXPECT_EQ(KindOf(zero_w), ErrorKind::kFormat);

  for (size_t n : {size_t{0}, size_t{3}, size_t{20}, size_t{42}, good.size() - 1}) {
    EXPECT_EQ(KindOf({good.begin(), good.begin() + static_cast<long>(n)}), ErrorKind::kFormat)
        << n;
  }
  std::vector<uint8_t> longer = good;
  longer.push_back(0);
  EXPECT_EQ(KindOf(longer), ErrorKind::kFormat);
}

TEST(Container, SerializeChecksSectionCount) {
  Container c = Sample(false);
  c.sections.pop_back();
  try {
    SerializeContainer(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
}

}  // namespace
}  // namespace mlic
