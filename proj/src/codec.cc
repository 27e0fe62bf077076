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

#include "mlic/codec.h"

#include <optional>

#include "mlic/error.h"
#include "mlic/image_io.h"
#include "mlic/range_coder.h"

namespace mlic {
namespace {

// Supplies the offsets of one slice pass, channel-major over `positions`.
class SymbolSource {
 public:
  virtual ~SymbolSource() = default;
  virtual std::vector<int32_t> CodePass(int slice, Pass pass, int channel_begin,
                                        const GaussianParams& params,
                                        const std::vector<Position>& positions) = 0;
};

// Quantizes y against the predicted means; optionally range codes.
class EncoderSource : public SymbolSource {
 public:
  EncoderSource(const Tensor& y, std::vector<std::vector<uint8_t>>* sections)
      : y_(y), sections_(sections) {}

  std::vector<int32_t> CodePass(int slice, Pass pass, int channel_begin,
                                const GaussianParams& params,
                                const std::vector<Position>& positions) override {
    const int s = params.mu.channels();
    std::vector<int32_t> k;
    k.reserve(static_cast<size_t>(s) * positions.size());
    RangeEncoder enc;
    for (int c = 0; c < s; ++c) {
      for (const Position& p : positions) {
        const float mu = params.mu.at(c, p.row, p.col);
        const int32_t v = QuantizeOffset(y_.at(channel_begin + c, p.row, p.col), mu);
        k.push_back(v);
        if (sections_) enc.EncodeOffset(BuildCdf(0.0, params.sigma.at(c, p.row, p.col)), v);
      }
    }
    if (sections_) (*sections_)[SectionIndex(slice, pass)] = enc.Finish();
    return k;
  }

 private:
  const Tensor& y_;
  std::vector<std::vector<uint8_t>>* sections_;
};

class DecoderSource : public SymbolSource {
 public:
  explicit DecoderSource(const Container& c) : c_(c) {}

  std::vector<int32_t> CodePass(int slice, Pass pass, int,
                                const GaussianParams& params,
                                const std::vector<Position>& positions) override {
    const int index = SectionIndex(slice, pass);
    const std::string name = SectionName(index);
    try {
      RangeDecoder dec(c_.sections[index], "section " + name);
      const int s = params.mu.channels();
      std::vector<int32_t> k;
      k.reserve(static_cast<size_t>(s) * positions.size());
      for (int c = 0; c < s; ++c) {
        for (const Position& p : positions) {
          k.push_back(dec.DecodeOffset(BuildCdf(0.0, params.sigma.at(c, p.row, p.col))));
        }
      }
      dec.ExpectEnd();
      return k;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDecodeIntegrity) throw;
      Fail(ErrorKind::kDecodeIntegrity,
           "slice " + std::to_string(slice) +
               (pass == Pass::kAnchor ? " anchor" : " non-anchor") + " pass: " + e.what());
    }
  }

 private:
  const Container& c_;
};

class ReplaySource : public SymbolSource {
 public:
  explicit ReplaySource(const LatentSymbols& s) : s_(s) {}

  std::vector<int32_t> CodePass(int, Pass, int channel_begin,
                                const GaussianParams& params,
                                const std::vector<Position>& positions) override {
    const int s = params.mu.channels();
    std::vector<int32_t> k;
    k.reserve(static_cast<size_t>(s) * positions.size());
    for (int c = 0; c < s; ++c) {
      for (const Position& p : positions) {
        k.push_back(s_.y[(static_cast<size_t>(channel_begin + c) * s_.height + p.row) *
                             s_.width +
                         p.col]);
      }
    }
    return k;
  }

 private:
  const LatentSymbols& s_;
};

// Places offsets + means of one pass into `slice` and the symbol grid, and
// returns the estimated bits.
double Commit(const std::vector<int32_t>& k, const GaussianParams& params,
              const std::vector<Position>& positions, int channel_begin,
              Tensor* slice, LatentSymbols* symbols) {
  double bits = 0.0;
  size_t j = 0;
  for (int c = 0; c < slice->channels(); ++c) {
    for (const Position& p : positions) {
      const int32_t v = k[j++];
      slice->at(c, p.row, p.col) = Dequantize(v, params.mu.at(c, p.row, p.col));
      symbols->y[(static_cast<size_t>(channel_begin + c) * symbols->height + p.row) *
                     symbols->width +
                 p.col] = v;
      bits += SymbolBits(v, 0.0, params.sigma.at(c, p.row, p.col));
    }
  }
  return bits;
}

void RunSchedule(const ModelConfig& config, const WeightArchive& w,
                 const Tensor& phi_h, SymbolSource& source, CodingTrace& trace) {
  const MemConfig& mem = config.mem;
  const SlicePlan plan = config.Slices();
  const int h = phi_h.height();
  const int wd = phi_h.width();
  const int s = plan.slice_channels;
  const CheckerboardPartition part = Partition(h, wd);

  trace.symbols.height = h;
  trace.symbols.width = wd;
  trace.symbols.y.assign(static_cast<size_t>(config.transform.m_channels) * h * wd, 0);
  trace.anchor_params.clear();
  trace.nonanchor_params.clear();
  trace.estimate.bits_anchor.assign(plan.num_slices, 0.0);
  trace.estimate.bits_nonanchor.assign(plan.num_slices, 0.0);
  trace.completed_slices = 0;

  std::vector<Tensor> decoded;  // unrefined slices
  std::vector<Tensor> refined;
  std::optional<IntraAttentionMap> shared_map;

  for (int i = 0; i < plan.num_slices; ++i) {
    const std::string prefix = SlicePrefix(i);
    const int c0 = plan.ranges[i].begin;
    ContextBundle bundle = ContextBundle::HyperOnly(phi_h, s);
    if (i >= 1) {
      bundle.phi_ch = ChannelContext(refined, w, prefix);
      bundle.has_ch = true;
    }

    Tensor slice({s, h, wd});
    const GaussianParams anchor_params = EntropyParams(bundle, w, prefix);
    const std::vector<int32_t> ka =
        source.CodePass(i, Pass::kAnchor, c0, anchor_params, part.anchors);
    const double bits_a = Commit(ka, anchor_params, part.anchors, c0, &slice, &trace.symbols);
    trace.estimate.bits_anchor[i] = bits_a;
    trace.sections.push_back({SectionName(SectionIndex(i, Pass::kAnchor)),
                              ka.size(), bits_a});

    // Only the anchors of this slice are set in `slice` at this point.
    switch (mem.local_mode) {
      case LocalMode::kVanilla:
        bundle.phi_lc = VanillaCheckerboard(slice, w, prefix, mem.window);
        break;
      case LocalMode::kStacked:
        bundle.phi_lc = StackedCheckerboard(slice, w, prefix, mem.stack_layers, mem.window);
        break;
      case LocalMode::kAttention:
        bundle.phi_lc = CheckerboardAttention(slice, w, prefix, mem.window);
        break;
      case LocalMode::kNone:
        break;
    }
    bundle.has_lc = mem.local_mode != LocalMode::kNone;
    if (i >= 1 && mem.use_intra) {
      if (mem.shared_attention_map) {
        if (!shared_map) {
          shared_map = ComputeIntraMap(refined[0], part, w, SlicePrefix(1), mem.window);
        }
        bundle.phi_gc_intra = IntraGlobal(*shared_map, slice, part, w, prefix, mem.window);
      } else {
        const IntraAttentionMap map =
            ComputeIntraMap(refined[i - 1], part, w, prefix, mem.window);
        bundle.phi_gc_intra = IntraGlobal(map, slice, part, w, prefix, mem.window);
      }
      bundle.has_intra = true;
    }
    if (i >= 1 && mem.use_inter) {
      bundle.phi_gc_inter = InterGlobal(refined[i - 1], slice, part, w, prefix, mem.window);
      bundle.has_inter = true;
    }

    const GaussianParams nonanchor_params = EntropyParams(bundle, w, prefix);
    const std::vector<int32_t> kn =
        source.CodePass(i, Pass::kNonAnchor, c0, nonanchor_params, part.nonanchors);
    const double bits_n =
        Commit(kn, nonanchor_params, part.nonanchors, c0, &slice, &trace.symbols);
    trace.estimate.bits_nonanchor[i] = bits_n;
    trace.sections.push_back({SectionName(SectionIndex(i, Pass::kNonAnchor)),
                              kn.size(), bits_n});

    decoded.push_back(slice);
    std::vector<Tensor> lrp_in = refined;
    lrp_in.push_back(slice);
    refined.push_back(RefineSlice(slice, LatentResidual(phi_h, lrp_in, w, prefix)));
    trace.anchor_params.push_back(anchor_params);
    trace.nonanchor_params.push_back(nonanchor_params);
    trace.completed_slices = i + 1;
  }

  std::vector<const Tensor*> parts;
  for (const Tensor& t : decoded) parts.push_back(&t);
  trace.y_hat = ConcatChannels(parts);
  parts.clear();
  for (const Tensor& t : refined) parts.push_back(&t);
  trace.y_refined = ConcatChannels(parts);
}

std::vector<uint8_t> EncodeZ(const ZModel& zm, const std::vector<int32_t>& k, int zh,
                             int zw) {
  RangeEncoder enc;
  const size_t plane = static_cast<size_t>(zh) * zw;
  for (int c = 0; c < zm.channels(); ++c) {
    for (size_t p = 0; p < plane; ++p) enc.EncodeOffset(zm.cdf(c), k[c * plane + p]);
  }
  return enc.Finish();
}

std::vector<int32_t> DecodeZ(const ZModel& zm, std::span<const uint8_t> bytes, int zh,
                             int zw) {
  try {
    RangeDecoder dec(bytes, "section z");
    const size_t plane = static_cast<size_t>(zh) * zw;
    std::vector<int32_t> k(plane * zm.channels());
    for (int c = 0; c < zm.channels(); ++c) {
      for (size_t p = 0; p < plane; ++p) k[c * plane + p] = dec.DecodeOffset(zm.cdf(c));
    }
    dec.ExpectEnd();
    return k;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDecodeIntegrity) throw;
    Fail(ErrorKind::kDecodeIntegrity, std::string("hyper latent: ") + e.what());
  }
}

}  // namespace

ModelConfig ModelConfig::Mlic() { return {TransformSpec::Mlic(), MemConfig::Mem()}; }

ModelConfig ModelConfig::MlicPlus() {
  return {TransformSpec::MlicPlus(), MemConfig::MemPlus()};
}

ModelConfig ModelConfig::FromName(const std::string& name) {
  if (name == "mlic") return Mlic();
  if (name == "mlic+") return MlicPlus();
  Fail(ErrorKind::kUsage, "unknown model '" + name + "' (expected mlic or mlic+)");
}

void ModelConfig::Validate() const {
  transform.Validate();
  mem.Validate();
  PlanSlices(transform.m_channels, mem.slice_channels);
}

SlicePlan ModelConfig::Slices() const {
  return PlanSlices(transform.m_channels, mem.slice_channels);
}

std::vector<TensorSpec> ModelConfig::Manifest() const {
  Validate();
  std::vector<TensorSpec> m;
  AppendTransformManifest(transform, &m);
  AppendZModelManifest(transform.n_channels, &m);
  AppendMemManifest(mem, transform.m_channels, &m);
  return m;
}

WeightArchive SeedModelArchive(uint64_t seed, const ModelConfig& config) {
  return SeedArchive(seed, config.Manifest());
}

ModelConfig ConfigFromHeader(const ContainerHeader& header) {
  return {header.transform, header.mem};
}

namespace {

const WeightArchive& Checked(const ModelConfig& config, const WeightArchive& w) {
  CheckManifest(w, config.Manifest());
  return w;
}

}  // namespace

Codec::Codec(ModelConfig config, const WeightArchive& weights)
    : config_(std::move(config)),
      weights_(Checked(config_, weights)),
      archive_hash_(weights.Hash()),
      z_model_(weights, config_.transform.n_channels) {}

struct Codec::Analysis {
  int pad_height = 0;
  int pad_width = 0;
  Tensor y;
  std::vector<int32_t> z;
  int z_height = 0;
  int z_width = 0;
  Tensor phi_h;
};

Codec::Analysis Codec::Analyze(const Tensor& image) const {
  if (image.rank() != 3 || image.channels() != 3 || image.height() < 1 ||
      image.width() < 1) {
    Fail(ErrorKind::kShape, "encode: expected a (3, H, W) image, got " +
                                ShapeString(image.shape()));
  }
  Analysis a;
  const Tensor padded = ReflectPad(image, config_.transform.PadMultiple());
  a.pad_height = padded.height();
  a.pad_width = padded.width();
  a.y = mlic::Analyze(padded, weights_, config_.transform);
  const Tensor z = HyperAnalyze(a.y, weights_, config_.transform);
  a.z = z_model_.Quantize(z);
  a.z_height = z.height();
  a.z_width = z.width();
  a.phi_h = HyperSynthesize(z_model_.Dequantize(a.z, a.z_height, a.z_width), weights_,
                            config_.transform);
  return a;
}

EncodeResult Codec::Encode(const Tensor& image, bool reconstruct) const {
  const Analysis a = Analyze(image);
  EncodeResult r;
  ContainerHeader& h = r.container.header;
  h.width = static_cast<uint32_t>(image.width());
  h.height = static_cast<uint32_t>(image.height());
  h.transform = config_.transform;
  h.mem = config_.mem;
  h.archive_hash = archive_hash_;
  r.container.sections.resize(h.num_sections());
  r.container.sections[0] = EncodeZ(z_model_, a.z, a.z_height, a.z_width);

  CodingTrace& t = r.trace;
  t.symbols.z = a.z;
  t.symbols.z_height = a.z_height;
  t.symbols.z_width = a.z_width;
  t.estimate.bits_z = z_model_.Bits(a.z, a.z_height, a.z_width);
  t.sections.push_back({"z", a.z.size(), t.estimate.bits_z});
  EncoderSource source(a.y, &r.container.sections);
  RunSchedule(config_, weights_, a.phi_h, source, t);
  t.estimate.Finalize(static_cast<int64_t>(image.width()) * image.height());

  r.bytes = SerializeContainer(r.container);
  if (reconstruct) r.reconstruction = Reconstruct(t, image.height(), image.width());
  return r;
}

CodingTrace Codec::Estimate(const Tensor& image) const {
  const Analysis a = Analyze(image);
  CodingTrace t;
  t.symbols.z = a.z;
  t.symbols.z_height = a.z_height;
  t.symbols.z_width = a.z_width;
  t.estimate.bits_z = z_model_.Bits(a.z, a.z_height, a.z_width);
  t.sections.push_back({"z", a.z.size(), t.estimate.bits_z});
  EncoderSource source(a.y, nullptr);
  RunSchedule(config_, weights_, a.phi_h, source, t);
  t.estimate.Finalize(static_cast<int64_t>(image.width()) * image.height());
  return t;
}

DecodeResult Codec::Decode(std::span<const uint8_t> bytes, CodingTrace* partial) const {
  const Container c = ParseContainer(bytes);
  const ContainerHeader& h = c.header;
  if (ConfigFromHeader(h) != config_) {
    Fail(ErrorKind::kFormat, "container was written for a different model configuration");
  }
  if (h.archive_hash != archive_hash_) {
    Fail(ErrorKind::kManifest, "container was written with a different weight archive");
  }
  const int multiple = config_.transform.PadMultiple();
  const int pad_h = static_cast<int>((h.height + multiple - 1) / multiple * multiple);
  const int pad_w = static_cast<int>((h.width + multiple - 1) / multiple * multiple);
  const int zh = pad_h / multiple;
  const int zw = pad_w / multiple;

  CodingTrace local;
  CodingTrace& t = partial ? *partial : local;
  t = CodingTrace();
  t.symbols.z = DecodeZ(z_model_, c.sections[0], zh, zw);
  t.symbols.z_height = zh;
  t.symbols.z_width = zw;
  t.estimate.bits_z = z_model_.Bits(t.symbols.z, zh, zw);
  t.sections.push_back({"z", t.symbols.z.size(), t.estimate.bits_z});
  const Tensor phi_h =
      HyperSynthesize(z_model_.Dequantize(t.symbols.z, zh, zw), weights_, config_.transform);
  DecoderSource source(c);
  RunSchedule(config_, weights_, phi_h, source, t);
  t.estimate.Finalize(static_cast<int64_t>(h.width) * h.height);

  DecodeResult r;
  r.header = h;
  r.reconstruction = Reconstruct(t, static_cast<int>(h.height), static_cast<int>(h.width));
  r.trace = partial ? *partial : std::move(local);
  return r;
}

CodingTrace Codec::Replay(const LatentSymbols& symbols) const {
  const size_t zn = static_cast<size_t>(config_.transform.n_channels) * symbols.z_height *
                    symbols.z_width;
  const size_t yn = static_cast<size_t>(config_.transform.m_channels) * symbols.height *
                    symbols.width;
  if (symbols.z.size() != zn || symbols.y.size() != yn || zn == 0 ||
      symbols.height != 4 * symbols.z_height || symbols.width != 4 * symbols.z_width) {
    Fail(ErrorKind::kShape, "Replay: symbol grids do not match the model");
  }
  CodingTrace t;
  t.symbols.z = symbols.z;
  t.symbols.z_height = symbols.z_height;
  t.symbols.z_width = symbols.z_width;
  t.estimate.bits_z = z_model_.Bits(symbols.z, symbols.z_height, symbols.z_width);
  t.sections.push_back({"z", symbols.z.size(), t.estimate.bits_z});
  const Tensor phi_h =
      HyperSynthesize(z_model_.Dequantize(symbols.z, symbols.z_height, symbols.z_width),
                      weights_, config_.transform);
  ReplaySource source(symbols);
  RunSchedule(config_, weights_, phi_h, source, t);
  const int f = config_.transform.LatentFactor();
  t.estimate.Finalize(static_cast<int64_t>(symbols.height) * f * symbols.width * f);
  return t;
}

Tensor Codec::Reconstruct(const CodingTrace& trace, int height, int width) const {
  return Crop(Synthesize(trace.y_refined, weights_, config_.transform), height, width);
}

}  // namespace mlic
