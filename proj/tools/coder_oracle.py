# Copyright 2026 The MLIC Codec Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Big-integer reference for the range coder; writes testdata/coder_vectors.txt.

Carries are implicit here: `low` is an unbounded integer that gains 8 bits
per renormalization, so the byte stream is just its big-endian digits.
"""

import sys

PRECISION = 16
TOTAL = 1 << PRECISION
TOP = 1 << 24
BINS = 129
ESCAPE = 128


def encode(steps):
    low, rng, shifts, n = 0, 0xFFFFFFFF, 0, 0
    for step in steps:
        if step[0] == "sym":
            _, freqs, s = step
            r = rng >> PRECISION
            low += r * sum(freqs[:s])
            rng = r * freqs[s]
        else:
            _, bits, value = step
            r = rng >> bits
            low += r * value
            rng = r
        n += 1
        while rng < TOP:
            rng <<= 8
            low <<= 8
            shifts += 1
    if n == 0:
        return b""
    for b in range(32, -1, -1):
        v = -(-low // (1 << b)) * (1 << b)
        if v < low + rng:
            break
    out = v.to_bytes(4 + shifts, "big")
    trimmed = 0
    while out and out[-1] == 0 and trimmed < 4:
        out = out[:-1]
        trimmed += 1
    return out


def vectors():
    half = [32768, 32768]
    ramp = [512, 1024, 2048, 4096, 8192, 16384, 32768, 512]
    peaked = [1] * BINS
    peaked[64] = TOTAL - (BINS - 1)
    yield "empty", []
    yield "half", [("sym", half, 1)]
    yield "certain", [("sym", [TOTAL], 0)]
    yield "ramp", [("sym", ramp, (i * 5) % 8) for i in range(40)]
    steps = []
    for i in range(300):
        s = 0 if i % 97 == 13 else (ESCAPE if i % 131 == 7 else 64)
        steps.append(("sym", peaked, s))
    yield "peaked", steps
    values = [0x8001, 0x0000, 0xFFFF, 0x1234, 0x00FF]
    steps = []
    for i in range(16):
        bits = 1 + i
        steps.append(("sym", ramp, i % 8))
        steps.append(("raw", bits, values[i % 5] & ((1 << bits) - 1)))
    yield "bypass", steps


def main():
    lines = ["# name hex (range coder golden vectors)"]
    for name, steps in vectors():
        lines.append(f"{name} {encode(steps).hex() or '-'}")
    text = "\n".join(lines) + "\n"
    if len(sys.argv) > 1:
        with open(sys.argv[1], "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
