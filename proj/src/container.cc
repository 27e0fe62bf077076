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

#include <limits>

#include "mlic/bytes.h"
#include "mlic/entropy.h"
#include "mlic/error.h"

namespace mlic {
namespace {

constexpr char kMagic[] = "MLIC";
constexpr uint8_t kFlagIntra = 1u << 2;
constexpr uint8_t kFlagInter = 1u << 3;
constexpr uint8_t kFlagShared = 1u << 4;
constexpr uint8_t kFlagOddAnchor = 1u << 7;
constexpr uint8_t kKnownFlags = 0x03 | kFlagIntra | kFlagInter | kFlagShared | kFlagOddAnchor;

uint8_t EncodeFlags(const MemConfig& m) {
  uint8_t f = static_cast<uint8_t>(m.local_mode) & 0x03;
  if (m.use_intra) f |= kFlagIntra;
  if (m.use_inter) f |= kFlagInter;
  if (m.shared_attention_map) f |= kFlagShared;
  return f;
}

template <typename T>
T Narrow(int v, const char* what) {
  if (v < 0 || v > std::numeric_limits<T>::max()) {
    Fail(ErrorKind::kUsage, std::string(what) + " does not fit the container field");
  }
  return static_cast<T>(v);
}

void Expect(bool ok, const std::string& what) {
  if (!ok) Fail(ErrorKind::kFormat, "container: " + what);
}

}  // namespace

size_t Container::payload_bytes() const {
  size_t n = 0;
  for (const auto& s : sections) n += s.size();
  return n;
}

int SectionIndex(int slice, Pass pass) {
  return 1 + 2 * slice + (pass == Pass::kNonAnchor ? 1 : 0);
}

std::string SectionName(int index) {
  if (index == 0) return "z";
  const int slice = (index - 1) / 2;
  return "s" + std::to_string(slice) + ((index - 1) % 2 == 0 ? ".anchor" : ".nonanchor");
}

std::vector<uint8_t> SerializeContainer(const Container& c) {
  const ContainerHeader& h = c.header;
  Check(static_cast<int>(c.sections.size()) == h.num_sections(), ErrorKind::kUsage,
        "container: expected " + std::to_string(h.num_sections()) + " sections, have " +
            std::to_string(c.sections.size()));
  ByteWriter w;
  w.Text(kMagic);
  w.U8(kContainerVersion);
  w.U32(h.width);
  w.U32(h.height);
  w.U16(Narrow<uint16_t>(h.transform.n_channels, "N"));
  w.U16(Narrow<uint16_t>(h.transform.m_channels, "M"));
  w.U8(Narrow<uint8_t>(h.transform.downsample_stages, "stage count"));
  w.U8(Narrow<uint8_t>(h.transform.residual_blocks_per_stage, "residual block count"));
  w.U8(EncodeFlags(h.mem));
  w.U8(Narrow<uint8_t>(h.mem.stack_layers, "J"));
  w.U8(Narrow<uint8_t>(h.mem.window, "K"));
  w.U16(Narrow<uint16_t>(h.mem.slice_channels, "S"));
  w.U16(Narrow<uint16_t>(h.num_slices(), "L"));
  w.U8(kCdfPrecisionBits);
  w.I16(kSupportMin);
  w.I16(kSupportMax);
  w.U8(kTailMassLog2);
  w.U8(kEscapeBits);
  w.U64(h.archive_hash);
  w.U16(Narrow<uint16_t>(h.num_sections(), "section count"));
  for (const auto& s : c.sections) {
    Check(s.size() <= std::numeric_limits<uint32_t>::max(), ErrorKind::kUsage,
          "container: section too large");
    w.U32(static_cast<uint32_t>(s.size()));
  }
  for (const auto& s : c.sections) w.Bytes(s);
  return w.Take();
}

Container ParseContainer(std::span<const uint8_t> bytes) {
  ByteReader r(bytes, "container");
  Expect(r.Text(4) == kMagic, "bad magic");
  const uint8_t version = r.U8();
  Expect(version == kContainerVersion, "unsupported version " + std::to_string(version));

  Container c;
  ContainerHeader& h = c.header;
  h.width = r.U32();
  h.height = r.U32();
  Expect(h.width > 0 && h.height > 0, "empty image");
  Expect(h.width <= (1u << 16) && h.height <= (1u << 16), "image dimensions too large");
  h.transform.n_channels = r.U16();
  h.transform.m_channels = r.U16();
  h.transform.downsample_stages = r.U8();
  h.transform.residual_blocks_per_stage = r.U8();

  const uint8_t flags = r.U8();
  Expect((flags & ~kKnownFlags) == 0, "reserved flag bits set");
  Expect((flags & kFlagOddAnchor) == 0, "unsupported anchor parity");
  h.mem.local_mode = static_cast<LocalMode>(flags & 0x03);
  h.mem.use_intra = (flags & kFlagIntra) != 0;
  h.mem.use_inter = (flags & kFlagInter) != 0;
  h.mem.shared_attention_map = (flags & kFlagShared) != 0;
  h.mem.stack_layers = r.U8();
  h.mem.window = r.U8();
  h.mem.slice_channels = r.U16();
  const int slices = r.U16();
  try {
    h.transform.Validate();
    h.mem.Validate();
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("container: invalid model fields: ") + e.what());
  }
  Expect(h.transform.m_channels % h.mem.slice_channels == 0 &&
             h.num_slices() == slices,
         "slice count inconsistent with M and S");

  Expect(r.U8() == kCdfPrecisionBits, "unsupported CDF precision");
  const int16_t smin = r.I16();
  const int16_t smax = r.I16();
  Expect(smin == kSupportMin && smax == kSupportMax, "unsupported symbol support");
  Expect(r.U8() == kTailMassLog2, "unsupported tail mass");
  Expect(r.U8() == kEscapeBits, "unsupported escape width");
  h.archive_hash = r.U64();

  const int count = r.U16();
  Expect(count == h.num_sections(), "section count " + std::to_string(count) +
                                        " != 1 + 2L = " +
                                        std::to_string(h.num_sections()));
  std::vector<uint32_t> lengths(count);
  uint64_t total = 0;
  for (auto& len : lengths) {
    len = r.U32();
    total += len;
  }
  Expect(total == r.remaining(), "section lengths cover " + std::to_string(total) +
                                     " bytes, payload has " +
                                     std::to_string(r.remaining()));
  c.sections.reserve(count);
  for (uint32_t len : lengths) {
    auto b = r.Bytes(len);
    c.sections.emplace_back(b.begin(), b.end());
  }
  return c;
}

}  // namespace mlic
