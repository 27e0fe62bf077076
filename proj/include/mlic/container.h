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

// Bitstream container. Integers are little-endian; section payloads are
// range coder streams (big-endian). See docs/FORMAT.md.
//
//   "MLIC" u8 version
//   u32 width  u32 height            original, before padding
//   u16 N  u16 M  u8 stages  u8 residual_blocks
//   u8 flags   bits 0-1 local mode, 2 intra, 3 inter, 4 shared map,
//              7 anchor parity (0: (r + c) even); others zero
//   u8 J  u8 K  u16 S  u16 L
//   u8 precision  i16 support_min  i16 support_max  u8 tail_log2
//   u8 escape_bits
//   u64 weight archive hash
//   u16 section_count (= 1 + 2L)  u32 length[section_count]
//   payloads: z, then per slice anchor, non-anchor

#ifndef MLIC_CONTAINER_H_
#define MLIC_CONTAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlic/mem_contexts.h"
#include "mlic/transforms.h"

namespace mlic {

constexpr uint8_t kContainerVersion = 1;

struct ContainerHeader {
  uint32_t width = 0;
  uint32_t height = 0;
  TransformSpec transform;
  MemConfig mem;
  uint64_t archive_hash = 0;

  int num_slices() const { return transform.m_channels / mem.slice_channels; }
  int num_sections() const { return 1 + 2 * num_slices(); }
};

struct Container {
  ContainerHeader header;
  std::vector<std::vector<uint8_t>> sections;

  size_t payload_bytes() const;
};

// Section index of a slice pass, and a readable name ("z", "s3.anchor").
int SectionIndex(int slice, Pass pass);
std::string SectionName(int index);

std::vector<uint8_t> SerializeContainer(const Container& container);
// Throws kFormat for anything malformed or unsupported.
Container ParseContainer(std::span<const uint8_t> bytes);

}  // namespace mlic

#endif  // MLIC_CONTAINER_H_
