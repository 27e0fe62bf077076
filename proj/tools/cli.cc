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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mlic/bytes.h"
#include "mlic/codec.h"
#include "mlic/coder_vectors.h"
#include "mlic/error.h"
#include "mlic/image_io.h"

namespace mlic::cli {
namespace {

struct ModelFlags {
  std::string model = "mlic";
  uint64_t seed = 1;
  std::string weights;
  int n_channels = 0;
  bool intra = false;
  bool no_intra = false;
  bool inter = false;
  bool no_inter = false;
  std::string local;
  bool shared_map = false;
};

void AddModelFlags(CLI::App* app, ModelFlags* f, bool with_toggles = true) {
  app->add_option("--model", f->model, "mlic or mlic+")->check(CLI::IsMember({"mlic", "mlic+"}));
  app->add_option("--seed", f->seed, "seed for synthetic weights (default 1)");
  app->add_option("--weights", f->weights, "weight archive file (overrides --seed)");
  app->add_option("--n-channels", f->n_channels,
                  "hidden width N of the transforms (default from --model)");
  if (!with_toggles) return;
  app->add_flag("--intra", f->intra, "enable the intra-slice global context");
  app->add_flag("--no-intra", f->no_intra, "disable the intra-slice global context");
  app->add_flag("--inter", f->inter, "enable the inter-slice global context");
  app->add_flag("--no-inter", f->no_inter, "disable the inter-slice global context");
  app->add_option("--local", f->local, "local context: stacked|attention|vanilla|none");
  app->add_flag("--shared-map", f->shared_map, "reuse one intra attention map for all slices");
}

ModelConfig ConfigFrom(const ModelFlags& f) {
  ModelConfig c = ModelConfig::FromName(f.model);
  if (f.n_channels > 0) c.transform.n_channels = f.n_channels;
  Check(!(f.intra && f.no_intra), ErrorKind::kUsage, "--intra and --no-intra conflict");
  Check(!(f.inter && f.no_inter), ErrorKind::kUsage, "--inter and --no-inter conflict");
  if (f.intra) c.mem.use_intra = true;
  if (f.no_intra) c.mem.use_intra = false;
  if (f.inter) c.mem.use_inter = true;
  if (f.no_inter) c.mem.use_inter = false;
  if (!f.local.empty()) c.mem.local_mode = ParseLocalMode(f.local);
  c.mem.shared_attention_map = f.shared_map;
  c.Validate();
  return c;
}

WeightArchive WeightsFor(const ModelFlags& f, const ModelConfig& c) {
  if (!f.weights.empty()) return WeightArchive::Load(f.weights);
  return SeedModelArchive(f.seed, c);
}

std::string Fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string ModuleList(const MemConfig& m) {
  std::string s;
  for (ModuleKind k : InstantiatedModules(m)) {
    if (!s.empty()) s += "+";
    s += ModuleName(k);
  }
  return s;
}

int CmdEncode(std::ostream& out, const ModelFlags& f, const std::string& in,
              const std::string& path) {
  const ModelConfig c = ConfigFrom(f);
  const WeightArchive w = WeightsFor(f, c);
  const Codec codec(c, w);
  const Image8 img = ReadPpm(in);
  const EncodeResult r = codec.Encode(ImageToTensor(img));
  WriteFileBytes(path, r.bytes);
  const double payload = 8.0 * r.container.payload_bytes();
  out << "wrote " << path << ": " << r.bytes.size() << " bytes, "
      << r.container.sections.size() << " sections\n"
      << "payload_bits " << payload << "  bpp " << Fixed(payload / (img.width * img.height), 6)
      << "\nestimated_bits " << Fixed(r.trace.estimate.total_bits, 1) << "  est_bpp "
      << Fixed(r.trace.estimate.bpp, 6) << "\n";
  return 0;
}

int CmdDecode(std::ostream& out, const ModelFlags& f, const std::string& in,
              const std::string& path, const std::string& reference) {
  const std::vector<uint8_t> bytes = ReadFileBytes(in);
  const Container parsed = ParseContainer(bytes);
  const ModelConfig c = ConfigFromHeader(parsed.header);
  const WeightArchive w = f.weights.empty() ? SeedModelArchive(f.seed, c)
                                            : WeightArchive::Load(f.weights);
  const Codec codec(c, w);
  const DecodeResult r = codec.Decode(bytes);
  const Image8 img = TensorToImage(r.reconstruction);
  WritePpm(path, img);
  out << "wrote " << path << ": " << img.width << "x" << img.height << "\n";
  if (!reference.empty()) {
    const Image8 ref = ReadPpm(reference);
    const double psnr = Psnr(ref, img);
    out << "psnr_db " << (std::isinf(psnr) ? std::string("inf") : Fixed(psnr, 4)) << "\n";
  }
  return 0;
}

int CmdRate(std::ostream& out, const ModelFlags& f, const std::string& in) {
  const ModelConfig c = ConfigFrom(f);
  const WeightArchive w = WeightsFor(f, c);
  const Codec codec(c, w);
  const Image8 img = ReadPpm(in);
  const EncodeResult r = codec.Encode(ImageToTensor(img));
  out << "section,symbols,est_bits,actual_bits\n";
  size_t symbols = 0;
  double est = 0.0;
  for (size_t i = 0; i < r.trace.sections.size(); ++i) {
    const SectionStats& s = r.trace.sections[i];
    out << s.name << "," << s.symbols << "," << Fixed(s.est_bits, 3) << ","
        << 8 * r.container.sections[i].size() << "\n";
    symbols += s.symbols;
    est += s.est_bits;
  }
  const size_t actual = 8 * r.container.payload_bytes();
  out << "total," << symbols << "," << Fixed(est, 3) << "," << actual << "\n";
  out << "# bpp_est " << Fixed(r.trace.estimate.bpp, 6) << " bpp_actual "
      << Fixed(static_cast<double>(actual) / (img.width * img.height), 6) << "\n";
  return 0;
}

int CmdInspect(std::ostream& out, const std::string& in) {
  const std::vector<uint8_t> bytes = ReadFileBytes(in);
  const Container c = ParseContainer(bytes);
  const ContainerHeader& h = c.header;
  out << "image " << h.width << "x" << h.height << "\n"
      << "transform N=" << h.transform.n_channels << " M=" << h.transform.m_channels
      << " stages=" << h.transform.downsample_stages
      << " residual_blocks=" << h.transform.residual_blocks_per_stage << "\n"
      << "entropy local=" << LocalModeName(h.mem.local_mode)
      << " intra=" << h.mem.use_intra << " inter=" << h.mem.use_inter
      << " shared_map=" << h.mem.shared_attention_map << " J=" << h.mem.stack_layers
      << " K=" << h.mem.window << " S=" << h.mem.slice_channels
      << " L=" << h.num_slices() << "\n"
      << "modules " << ModuleList(h.mem) << "\n";
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(h.archive_hash));
  out << "archive_hash " << hash << "\n";
  out << "bytes " << bytes.size() << " payload " << c.payload_bytes() << "\n";
  for (size_t i = 0; i < c.sections.size(); ++i) {
    out << "section " << SectionName(static_cast<int>(i)) << " " << c.sections[i].size() << "\n";
  }
  return 0;
}

int CmdSelftest(std::ostream& out, const ModelFlags& f) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : " (" + detail + ")")
        << "\n";
    if (!ok) ++failures;
  };
  for (const CoderVector& v : GoldenCoderVectors()) {
    const std::vector<uint8_t> got = EncodeCoderVector(v);
    bool ok = got == v.expected;
    if (ok) ok = DecodeCoderVector(v, got);
    report("coder vector " + v.name, ok, std::to_string(got.size()) + " bytes");
  }
  ModelConfig c = ConfigFrom(f);
  if (f.n_channels == 0) c.transform.n_channels = 32;  // quick by default
  const WeightArchive w = WeightsFor(f, c);
  const Codec codec(c, w);
  const Image8 img = GradientImage(64, 64);
  const EncodeResult enc = codec.Encode(ImageToTensor(img), true);
  const DecodeResult dec = codec.Decode(enc.bytes);
  report("round trip latent", BitIdentical(enc.trace.y_hat, dec.trace.y_hat), "");
  report("round trip image",
         TensorToImage(enc.reconstruction) == TensorToImage(dec.reconstruction),
         "psnr " + Fixed(Psnr(img, TensorToImage(dec.reconstruction)), 2) + " dB");
  report("deterministic encode", codec.Encode(ImageToTensor(img)).bytes == enc.bytes, "");
  out << (failures == 0 ? "selftest ok\n" : "selftest FAILED\n");
  return failures == 0 ? 0 : 1;
}

struct AblationRow {
  const char* name;
  LocalMode local;
  bool intra;
  bool inter;
};

constexpr AblationRow kAblationRows[] = {
    {"base", LocalMode::kNone, false, false},
    {"base+g_lc_ckbd", LocalMode::kVanilla, false, false},
    {"base+g_lc_stk", LocalMode::kStacked, false, false},
    {"base+g_lc_attn", LocalMode::kAttention, false, false},
    {"base+g_gc_intra", LocalMode::kNone, true, false},
    {"base+g_lc_stk+g_gc_intra", LocalMode::kStacked, true, false},
    {"base+g_lc_attn+g_gc_intra", LocalMode::kAttention, true, false},
    {"base+g_lc_attn+g_gc_intra+g_gc_inter", LocalMode::kAttention, true, true},
};

int CmdAblate(std::ostream& out, const ModelFlags& f, const std::string& in) {
  const ModelConfig base = ConfigFrom(f);
  const Image8 img = ReadPpm(in);
  const Tensor x = ImageToTensor(img);
  // Seeded values depend only on (seed, name), so every row sees the same
  // weights for the modules it shares with another. An explicit archive
  // must hold the union of all rows' tensors.
  std::optional<WeightArchive> loaded;
  if (!f.weights.empty()) loaded = WeightArchive::Load(f.weights);
  out << "config,modules,bits_z,bits_anchor,bits_nonanchor,total_bits,bpp\n";
  for (const AblationRow& row : kAblationRows) {
    ModelConfig c = base;
    c.mem.local_mode = row.local;
    c.mem.use_intra = row.intra;
    c.mem.use_inter = row.inter;
    c.mem.shared_attention_map = false;
    const WeightArchive w = loaded ? *loaded : SeedModelArchive(f.seed, c);
    const Codec codec(c, w);
    const CodingTrace t = codec.Estimate(x);
    double a = 0.0;
    double n = 0.0;
    for (double b : t.estimate.bits_anchor) a += b;
    for (double b : t.estimate.bits_nonanchor) n += b;
    out << row.name << "," << ModuleList(c.mem) << "," << Fixed(t.estimate.bits_z, 3) << ","
        << Fixed(a, 3) << "," << Fixed(n, 3) << "," << Fixed(t.estimate.total_bits, 3) << ","
        << Fixed(t.estimate.bpp, 6) << "\n";
  }
  return 0;
}

int CmdWeights(std::ostream& out, const ModelFlags& f, const std::string& path) {
  const ModelConfig c = ConfigFrom(f);
  const WeightArchive w = SeedModelArchive(f.seed, c);
  w.Save(path);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(w.Hash()));
  out << "wrote " << path << ": " << w.size() << " tensors, hash " << hash << "\n";
  return 0;
}

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return 2;
    case ErrorKind::kShape:
    case ErrorKind::kFormat:
    case ErrorKind::kManifest: return 3;
    case ErrorKind::kDecodeIntegrity: return 4;
    case ErrorKind::kIo: return 1;
  }
  return 1;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned image codec with a multi-reference entropy model", "mlic"};
  app.require_subcommand(1);

  ModelFlags f;
  std::string in;
  std::string path;
  std::string reference;

  auto* encode = app.add_subcommand("encode", "encode a PPM image into a container");
  AddModelFlags(encode, &f);
  encode->add_option("input", in, "input PPM")->required();
  encode->add_option("output", path, "output container")->required();

  auto* decode = app.add_subcommand("decode", "decode a container into a PPM image");
  decode->add_option("--seed", f.seed, "seed for synthetic weights (default 1)");
  decode->add_option("--weights", f.weights, "weight archive file (overrides --seed)");
  decode->add_option("--reference", reference, "original PPM; prints PSNR");
  decode->add_option("input", in, "input container")->required();
  decode->add_option("output", path, "output PPM")->required();

  auto* rate = app.add_subcommand("rate", "per-section estimated and coded bits as CSV");
  AddModelFlags(rate, &f);
  rate->add_option("input", in, "input PPM")->required();

  auto* inspect = app.add_subcommand("inspect", "print a container header");
  inspect->add_option("input", in, "input container")->required();

  auto* selftest = app.add_subcommand("selftest", "coder vectors and a round trip");
  AddModelFlags(selftest, &f);

  auto* ablate = app.add_subcommand("ablate", "estimated rate across context module sets");
  AddModelFlags(ablate, &f, false);
  ablate->add_option("input", in, "input PPM")->required();

  auto* weights = app.add_subcommand("weights", "write a seeded weight archive");
  AddModelFlags(weights, &f);
  weights->add_option("output", path, "output archive")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*encode) return CmdEncode(out, f, in, path);
    if (*decode) return CmdDecode(out, f, in, path, reference);
    if (*rate) return CmdRate(out, f, in);
    if (*inspect) return CmdInspect(out, in);
    if (*selftest) return CmdSelftest(out, f);
    if (*ablate) return CmdAblate(out, f, in);
    if (*weights) return CmdWeights(out, f, path);
  } catch (const Error& e) {
    err << "error[" << ErrorKindName(e.kind()) << "]: " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int Run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Run(args, std::cout, std::cerr);
}

}  // namespace mlic::cli
