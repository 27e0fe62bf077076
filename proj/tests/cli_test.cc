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

#include "cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mlic/bytes.h"
#include "mlic/image_io.h"
#include "testing.h"

namespace mlic {
namespace {

using testing::TempPath;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string WriteImage(const std::string& name, const Image8& img) {
  const std::string path = TempPath(name);
  WritePpm(path, img);
  return path;
}

// Compares against testdata/cli/<name>; MLIC_UPDATE_GOLDEN=1 rewrites it.
void ExpectGolden(const std::string& name, const std::string& actual) {
  const std::filesystem::path path = std::filesystem::path(MLIC_TESTDATA_DIR) / "cli" / name;
  if (std::getenv("MLIC_UPDATE_GOLDEN") != nullptr) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  std::ifstream f(path, std::ios::binary);
  ASSERT_TRUE(f) << "missing golden " << path;
  std::stringstream want;
  want << f.rdbuf();
  EXPECT_EQ(actual, want.str()) << "golden " << name;
}

TEST(Cli, UsageErrors) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"encode"},
           {"encode", "a.ppm"},
           {"encode", "--model", "mlic++", "a.ppm", "b.mlic"},
           {"encode", "--seed", "x", "a.ppm", "b.mlic"},
       }) {
    const Result r = RunCli(args);
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_EQ(r.err.rfind("error[usage]: ", 0), 0u) << r.err;
  }
  const std::string img = WriteImage("u.ppm", GradientImage(8, 8));
  const Result both = RunCli({"encode", "--intra", "--no-intra", img, TempPath("u.mlic")});
  EXPECT_EQ(both.code, 2);
  EXPECT_EQ(both.err.rfind("error[usage]: ", 0), 0u) << both.err;
  const Result local = RunCli({"rate", "--local", "shifted", img});
  EXPECT_EQ(local.code, 2);
}

TEST(Cli, HelpExitsZero) {
  const Result r = RunCli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("encode"), std::string::npos);
  EXPECT_NE(r.out.find("ablate"), std::string::npos);
}

TEST(Cli, ErrorClassesAndExitCodes) {
  const Result missing = RunCli({"inspect", TempPath("does_not_exist.mlic")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.err.rfind("error[io]: ", 0), 0u) << missing.err;

  const std::string junk = TempPath("junk.mlic");
  WriteFileBytes(junk, std::vector<uint8_t>{'M', 'L', 'I', 'C', 9});
  const Result format = RunCli({"decode", junk, TempPath("junk.ppm")});
  EXPECT_EQ(format.code, 3);
  EXPECT_EQ(format.err.rfind("error[format]: ", 0), 0u) << format.err;

  const std::string notppm = TempPath("not.ppm");
  WriteFileBytes(notppm, std::vector<uint8_t>{'P', '3', '\n'});
  EXPECT_EQ(RunCli({"encode", notppm, TempPath("x.mlic")}).code, 3);

  const std::string img = WriteImage("e.ppm", GradientImage(64, 64));
  const std::string stream = TempPath("e.mlic");
  ASSERT_EQ(RunCli({"encode", "--n-channels", "16", img, stream}).code, 0);
  const Result manifest = RunCli({"decode", "--seed", "2", stream, TempPath("e.ppm")});
  EXPECT_EQ(manifest.code, 3);
  EXPECT_EQ(manifest.err.rfind("error[manifest]: ", 0), 0u) << manifest.err;

  std::vector<uint8_t> bytes = ReadFileBytes(stream);
  for (size_t i = bytes.size() - 40; i < bytes.size(); ++i) bytes[i] ^= 0x5a;
  const std::string damaged = TempPath("damaged.mlic");
  WriteFileBytes(damaged, bytes);
  const Result integrity = RunCli({"decode", damaged, TempPath("d.ppm")});
  // Damaged payloads either fail integrity checks or decode to something.
  if (integrity.code != 0) {
    EXPECT_EQ(integrity.code, 4) << integrity.err;
    EXPECT_EQ(integrity.err.rfind("error[decode-integrity]: ", 0), 0u) << integrity.err;
  }

  const std::string other = TempPath("other.weights");
  ASSERT_EQ(RunCli({"weights", "--model", "mlic+", "--n-channels", "16", other}).code, 0);
  const Result wrong = RunCli({"decode", "--weights", other, stream, TempPath("w.ppm")});
  EXPECT_EQ(wrong.code, 3);
  EXPECT_EQ(wrong.err.rfind("error[manifest]: ", 0), 0u) << wrong.err;
}

TEST(Cli, EncodeDecodeRoundTrip) {
  const Image8 original = GradientImage(50, 37);
  const std::string img = WriteImage("rt.ppm", original);
  const std::string stream = TempPath("rt.mlic");
  const std::string out = TempPath("rt_out.ppm");
  const Result enc = RunCli({"encode", "--model", "mlic+", "--n-channels", "16", img, stream});
  ASSERT_EQ(enc.code, 0) << enc.err;
  EXPECT_NE(enc.out.find("21 sections"), std::string::npos) << enc.out;
  const Result dec = RunCli({"decode", "--reference", img, stream, out});
  ASSERT_EQ(dec.code, 0) << dec.err;
  EXPECT_NE(dec.out.find("50x37"), std::string::npos);
  EXPECT_NE(dec.out.find("psnr_db "), std::string::npos);
  const Image8 decoded = ReadPpm(out);
  EXPECT_EQ(decoded.width, 50);
  EXPECT_EQ(decoded.height, 37);

  // An explicit archive file reproduces the seeded stream.
  const std::string wfile = TempPath("rt.weights");
  ASSERT_EQ(RunCli({"weights", "--model", "mlic+", "--n-channels", "16", wfile}).code, 0);
  const std::string stream2 = TempPath("rt2.mlic");
  ASSERT_EQ(RunCli({"encode", "--model", "mlic+", "--n-channels", "16", "--weights", wfile, img,
                   stream2}).code, 0);
  EXPECT_EQ(ReadFileBytes(stream2), ReadFileBytes(stream));
  ASSERT_EQ(RunCli({"decode", "--weights", wfile, stream2, out}).code, 0);
  EXPECT_EQ(ReadPpm(out), decoded);
}

TEST(Cli, RateOnBlackImage) {
  Image8 black;
  black.width = 64;
  black.height = 64;
  black.rgb.assign(64 * 64 * 3, 0);
  const Result r = RunCli({"rate", "--n-channels", "16", WriteImage("black.ppm", black)});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("section,symbols,est_bits,actual_bits\n", 0), 0u);
  const size_t at = r.out.find("bpp_actual ");
  ASSERT_NE(at, std::string::npos);
  EXPECT_GT(std::stod(r.out.substr(at + 11)), 0.0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 1 + 13 + 1 + 1);
}

TEST(Cli, AblateListsEightConfigurations) {
  const std::string img = WriteImage("ab.ppm", GradientImage(64, 64));
  const Result r = RunCli({"ablate", "--model", "mlic+", "--n-channels", "16", img});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "config,modules,bits_z,bits_anchor,bits_nonanchor,total_bits,bpp");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].rfind("base,g_ch,", 0), 0u) << rows[0];
  EXPECT_EQ(rows[7].rfind("base+g_lc_attn+g_gc_intra+g_gc_inter,", 0), 0u) << rows[7];
  // Every row codes the same z.
  auto field = [](const std::string& row, int i) {
    std::istringstream s(row);
    std::string f;
    for (int k = 0; k <= i; ++k) std::getline(s, f, ',');
    return f;
  };
  for (const auto& row : rows) EXPECT_EQ(field(row, 2), field(rows[0], 2));

  // An explicit archive must cover every row.
  const std::string wfile = TempPath("ab.weights");
  ASSERT_EQ(RunCli({"weights", "--model", "mlic+", "--n-channels", "16", "--local", "vanilla",
                 wfile}).code, 0);
  const Result partial = RunCli({"ablate", "--model", "mlic+", "--n-channels", "16", "--weights", wfile, img});
  EXPECT_EQ(partial.code, 3);  // no stacked or attention tensors
}

TEST(Cli, SelftestPasses) {
  const Result r = RunCli({"selftest", "--n-channels", "16"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("selftest ok"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, GoldenOutputs) {
  const std::string img = WriteImage("golden.ppm", GradientImage(64, 64));
  const std::string stream = TempPath("golden.mlic");
  const Result enc = RunCli({"encode", "--n-channels", "16", img, stream});
  ASSERT_EQ(enc.code, 0) << enc.err;
  const Result inspect = RunCli({"inspect", stream});
  ASSERT_EQ(inspect.code, 0);
  ExpectGolden("inspect_gradient64.txt", inspect.out);
  const Result rate = RunCli({"rate", "--n-channels", "16", img});
  ASSERT_EQ(rate.code, 0);
  ExpectGolden("rate_gradient64.csv", rate.out);
}

}  // namespace
}  // namespace mlic
