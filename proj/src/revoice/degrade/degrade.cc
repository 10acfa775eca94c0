// Copyright 2026  The revoice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "revoice/degrade/degrade.h"

#include <algorithm>
#include <cmath>

#include "revoice/audio/snr.h"
#include "revoice/audio/wav.h"
#include "revoice/common/error.h"
#include "revoice/common/rng.h"

namespace revoice {
namespace degrade {

namespace {
constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

float peak_abs(const AudioClip& a) {
  float p = 0.0f;
  for (float s : a.samples) p = std::max(p, std::abs(s));
  return p;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParamOutOfRange(msg);
}
}  // namespace

nlohmann::json DegradationSpec::to_json() const {
  nlohmann::json ops_json = nlohmann::json::array();
  for (const auto& op : ops) ops_json.push_back({{"kind", op.kind}, {"params", op.params}});
  return {{"seed", seed}, {"ops", ops_json}};
}

DegradationSpec DegradationSpec::from_json(const nlohmann::json& j) {
  DegradationSpec spec;
  spec.seed = j.at("seed").get<uint64_t>();
  for (const auto& op : j.at("ops")) {
    spec.ops.push_back({op.at("kind").get<std::string>(), op.at("params")});
  }
  return spec;
}

nlohmann::json DegradationReport::to_json() const {
  return {{"seed", seed}, {"ops", ops}};
}

DegradationReport DegradationReport::from_json(const nlohmann::json& j) {
  DegradationReport r;
  r.seed = j.at("seed").get<uint64_t>();
  for (const auto& op : j.at("ops")) r.ops.push_back(op);
  return r;
}

AudioClip white_noise(size_t len, uint64_t seed) {
  Rng rng(seed);
  AudioClip out;
  out.samples.resize(len);
  for (size_t i = 0; i < len; ++i) {
    out.samples[i] = static_cast<float>(rng.normal() * 0.25);
  }
  return out;
}

AudioClip fit_noise_length(const AudioClip& noise, size_t len, uint64_t seed,
                           int64_t* offset_out) {
  if (noise.samples.empty()) throw ZeroNoise("empty noise clip");
  Rng rng(seed);
  const size_t n = noise.samples.size();
  const int64_t offset = rng.uniform_int(0, static_cast<int64_t>(n) - 1);
  if (offset_out != nullptr) *offset_out = offset;
  AudioClip out;
  out.samples.resize(len);
  for (size_t i = 0; i < len; ++i) {
    out.samples[i] = noise.samples[(offset + i) % n];
  }
  return out;
}

AudioClip mix_at_snr(const AudioClip& clean, const AudioClip& noise,
                     double snr_db, uint64_t seed, nlohmann::json* realized) {
  validate_audio(clean);
  if (snr_db < kMinSnrDb || snr_db > kMaxSnrDb) {
    throw SnrOutOfRange("snr " + std::to_string(snr_db) + " outside [" +
                        std::to_string(kMinSnrDb) + ", " + std::to_string(kMaxSnrDb) + "]");
  }
  int64_t offset = 0;
  AudioClip fitted = fit_noise_length(noise, clean.samples.size(), seed, &offset);
  const double gain = scale_noise_to_snr(clean, fitted, snr_db);

  AudioClip scaled;
  scaled.samples.resize(fitted.samples.size());
  for (size_t i = 0; i < fitted.samples.size(); ++i) {
    scaled.samples[i] = static_cast<float>(gain * fitted.samples[i]);
  }
  const double realized_snr = measure_snr(clean, scaled);

  AudioClip out;
  out.samples.resize(clean.samples.size());
  for (size_t i = 0; i < clean.samples.size(); ++i) {
    out.samples[i] = clean.samples[i] + scaled.samples[i];
  }
  double norm_factor = 1.0;
  float peak = peak_abs(out);
  if (peak > 1.0f) {
    norm_factor = 0.99 / peak;
    for (float& s : out.samples) s = static_cast<float>(s * norm_factor);
  }
  if (realized != nullptr) {
    *realized = {{"snr_db", snr_db},
                 {"realized_snr_db", realized_snr},
                 {"gain", gain},
                 {"noise_offset", offset},
                 {"norm_factor", norm_factor}};
  }
  return out;
}

AudioClip packet_drop(const AudioClip& audio, int n_drops, double max_len_ms,
                      uint64_t seed, nlohmann::json* realized) {
  validate_audio(audio);
  require(max_len_ms >= 0.0 && max_len_ms <= kMaxDropMs,
          "packet drop length must be in [0, 100] ms");
  require(n_drops >= 0, "n_drops must be >= 0");
  Rng rng(seed);
  const int64_t t = audio.num_samples();
  AudioClip out = audio;
  nlohmann::json segments = nlohmann::json::array();
  for (int d = 0; d < n_drops; ++d) {
    const int64_t start = rng.uniform_int(0, t - 1);
    const double ms = rng.uniform(0.0, max_len_ms);
    const int64_t len =
        std::llround(ms * audio.sample_rate / 1000.0);
    const int64_t end = std::min(start + len, t);
    for (int64_t i = start; i < end; ++i) out.samples[i] = 0.0f;
    segments.push_back({{"start", start}, {"len", end - start}});
  }
  if (realized != nullptr) {
    *realized = {{"n_drops", n_drops}, {"max_len_ms", max_len_ms}, {"segments", segments}};
  }
  return out;
}

AudioClip clip_distort(const AudioClip& audio, double threshold,
                       nlohmann::json* realized) {
  validate_audio(audio);
  require(threshold > 0.0 && threshold <= 1.0, "clip threshold must be in (0, 1]");
  const float limit = static_cast<float>(threshold) * peak_abs(audio);
  AudioClip out = audio;
  for (float& s : out.samples) s = std::clamp(s, -limit, limit);
  if (realized != nullptr) {
    *realized = {{"threshold", threshold}, {"threshold_abs", limit}};
  }
  return out;
}

AudioClip band_limit(const AudioClip& audio, double cutoff_hz,
                     nlohmann::json* realized) {
  validate_audio(audio);
  require(cutoff_hz > 0.0 && cutoff_hz < audio.sample_rate / 2.0,
          "band_limit cutoff must be in (0, Nyquist)");
  // Transition band [cutoff, 1.2*cutoff]; Blackman stopband (~74 dB) covers
  // the required 60 dB above 1.2*cutoff.
  const double trans_norm = 0.2 * cutoff_hz / audio.sample_rate;
  int n = static_cast<int>(std::ceil(5.5 / trans_norm));
  n = std::clamp(n, 11, 8191);
  if (n % 2 == 0) ++n;
  const int mid = (n - 1) / 2;
  const double fc = 1.1 * cutoff_hz / audio.sample_rate;  // transition center
  std::vector<double> h(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = 0.42 - 0.5 * std::cos(2.0 * kPi * i / (n - 1)) +
                     0.08 * std::cos(4.0 * kPi * i / (n - 1));
    h[i] = 2.0 * fc * sinc(2.0 * fc * (i - mid)) * w;
    sum += h[i];
  }
  for (double& v : h) v /= sum;  // unit DC gain

  // reflected edge extension keeps convolution transients signal-like
  const int64_t t = audio.num_samples();
  auto sample_at = [&](int64_t j) -> double {
    if (t == 1) return audio.samples[0];
    const int64_t period = 2 * (t - 1);
    int64_t m = j % period;
    if (m < 0) m += period;
    if (m >= t) m = period - m;
    return audio.samples[m];
  };
  AudioClip out;
  out.samples.assign(t, 0.0f);
  for (int64_t i = 0; i < t; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += h[k] * sample_at(i + mid - k);
    }
    out.samples[i] = static_cast<float>(acc);
  }
  if (realized != nullptr) {
    *realized = {{"cutoff_hz", cutoff_hz}, {"taps", n}};
  }
  return out;
}

AudioClip reverberate(const AudioClip& audio, double rt60_s, uint64_t seed,
                      nlohmann::json* realized) {
  validate_audio(audio);
  require(rt60_s > 0.0 && rt60_s <= 10.0, "rt60 must be in (0, 10] s");
  const int64_t max_len = audio.sample_rate / 2;  // 0.5 s cap
  const int64_t rir_len =
      std::clamp<int64_t>(std::llround(rt60_s * audio.sample_rate), 64, max_len);
  Rng rng(seed);
  std::vector<double> rir(rir_len);
  double energy = 0.0;
  for (int64_t i = 0; i < rir_len; ++i) {
    const double env = std::exp(-6.9 * static_cast<double>(i) /
                                (rt60_s * audio.sample_rate));
    rir[i] = rng.normal() * env;
    energy += rir[i] * rir[i];
  }
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : rir) v *= scale;

  const int64_t t = audio.num_samples();
  AudioClip out;
  out.samples.assign(t, 0.0f);
  for (int64_t i = 0; i < t; ++i) {
    double acc = 0.0;
    const int64_t jmax = std::min<int64_t>(i, rir_len - 1);
    for (int64_t j = 0; j <= jmax; ++j) acc += rir[j] * audio.samples[i - j];
    out.samples[i] = static_cast<float>(acc);
  }
  if (realized != nullptr) {
    *realized = {{"rt60_s", rt60_s}, {"rir_len", rir_len}, {"rir_seed", seed}};
  }
  return out;
}

AudioClip codec_artifact(const AudioClip& audio, int bits,
                         nlohmann::json* realized) {
  validate_audio(audio);
  require(bits >= 4 && bits <= 16, "codec bits must be in [4, 16]");
  const double q = static_cast<double>((1 << (bits - 1)) - 1);
  const double log256 = std::log(256.0);
  AudioClip out = audio;
  for (float& s : out.samples) {
    const double x = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const double y = std::copysign(std::log1p(255.0 * std::abs(x)) / log256, x);
    const double yq = std::round(y * q) / q;
    const double e = (std::pow(256.0, std::abs(yq)) - 1.0) / 255.0;
    s = static_cast<float>(std::copysign(e, yq));
  }
  if (realized != nullptr) *realized = {{"bits", bits}};
  return out;
}

double codec_error_bound(int bits) {
  const double q = static_cast<double>((1 << (bits - 1)) - 1);
  const double half_step = 0.5 / q;
  // expander slope is largest at full scale
  const double slope = std::log(256.0) * 256.0 / 255.0;
  return slope * half_step + 1e-7;  // float32 headroom
}

namespace {

void validate_op(const OpSpec& op, size_t index) {
  const std::string where = "ops[" + std::to_string(index) + "] (" + op.kind + "): ";
  try {
    if (op.kind == "mix_noise") {
      const double snr = op.params.at("snr_db").get<double>();
      if (snr < kMinSnrDb || snr > kMaxSnrDb) {
        throw SnrOutOfRange(where + "snr_db outside [-15, 40]");
      }
      const std::string kind = op.params.value("noise", "white");
      if (kind != "white" && kind != "file") {
        throw ParamOutOfRange(where + "noise must be 'white' or 'file'");
      }
      if (kind == "file" && !op.params.contains("noise_path")) {
        throw ParamOutOfRange(where + "noise_path required for file noise");
      }
    } else if (op.kind == "packet_drop") {
      const double ms = op.params.at("max_len_ms").get<double>();
      const int n = op.params.at("n_drops").get<int>();
      if (ms < 0.0 || ms > kMaxDropMs) throw ParamOutOfRange(where + "max_len_ms outside [0, 100]");
      if (n < 0) throw ParamOutOfRange(where + "n_drops must be >= 0");
    } else if (op.kind == "clip") {
      const double th = op.params.at("threshold").get<double>();
      if (th <= 0.0 || th > 1.0) throw ParamOutOfRange(where + "threshold outside (0, 1]");
    } else if (op.kind == "band_limit") {
      const double c = op.params.at("cutoff_hz").get<double>();
      if (c <= 0.0 || c >= 8000.0) throw ParamOutOfRange(where + "cutoff_hz outside (0, 8000)");
    } else if (op.kind == "reverb") {
      const double r = op.params.at("rt60_s").get<double>();
      if (r <= 0.0 || r > 10.0) throw ParamOutOfRange(where + "rt60_s outside (0, 10]");
    } else if (op.kind == "codec") {
      const int b = op.params.at("bits").get<int>();
      if (b < 4 || b > 16) throw ParamOutOfRange(where + "bits outside [4, 16]");
    } else {
      throw ParamOutOfRange(where + "unknown operator kind");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParamOutOfRange(where + "bad params: " + e.what());
  }
}

AudioClip load_op_noise(const OpSpec& op, size_t clean_len, uint64_t seed) {
  const std::string kind = op.params.value("noise", "white");
  if (kind == "white") return white_noise(clean_len, seed);
  return read_wav(op.params.at("noise_path").get<std::string>());
}

AudioClip apply_op(const AudioClip& in, const OpSpec& op, uint64_t op_seed,
                   nlohmann::json* realized) {
  if (op.kind == "mix_noise") {
    const uint64_t noise_seed = Rng::derive(op_seed, 1);
    AudioClip noise = load_op_noise(op, in.samples.size(), noise_seed);
    AudioClip out = mix_at_snr(in, noise, op.params.at("snr_db").get<double>(),
                               Rng::derive(op_seed, 2), realized);
    if (realized != nullptr) {
      (*realized)["noise"] = op.params.value("noise", "white");
      (*realized)["noise_seed"] = noise_seed;
      if (op.params.contains("noise_path")) {
        (*realized)["noise_path"] = op.params.at("noise_path");
      }
      (*realized)["fit_seed"] = Rng::derive(op_seed, 2);
    }
    return out;
  }
  if (op.kind == "packet_drop") {
    AudioClip out = packet_drop(in, op.params.at("n_drops").get<int>(),
                                op.params.at("max_len_ms").get<double>(), op_seed, realized);
    if (realized != nullptr) (*realized)["seed"] = op_seed;
    return out;
  }
  if (op.kind == "clip") {
    return clip_distort(in, op.params.at("threshold").get<double>(), realized);
  }
  if (op.kind == "band_limit") {
    return band_limit(in, op.params.at("cutoff_hz").get<double>(), realized);
  }
  if (op.kind == "reverb") {
    return reverberate(in, op.params.at("rt60_s").get<double>(), op_seed, realized);
  }
  // codec
  return codec_artifact(in, op.params.at("bits").get<int>(), realized);
}

}  // namespace

std::pair<AudioClip, DegradationReport> apply_chain(const AudioClip& clean,
                                                    const DegradationSpec& spec) {
  validate_audio(clean);
  for (size_t i = 0; i < spec.ops.size(); ++i) validate_op(spec.ops[i], i);

  DegradationReport report;
  report.seed = spec.seed;
  AudioClip current = clean;
  for (size_t i = 0; i < spec.ops.size(); ++i) {
    const uint64_t op_seed = Rng::derive(spec.seed, i);
    nlohmann::json realized;
    current = apply_op(current, spec.ops[i], op_seed, &realized);
    report.ops.push_back({{"kind", spec.ops[i].kind},
                          {"params", spec.ops[i].params},
                          {"op_seed", op_seed},
                          {"realized", realized}});
  }
  return {current, report};
}

AudioClip replay_chain(const AudioClip& clean, const DegradationReport& report) {
  AudioClip current = clean;
  for (const auto& entry : report.ops) {
    OpSpec op{entry.at("kind").get<std::string>(), entry.at("params")};
    current = apply_op(current, op, entry.at("op_seed").get<uint64_t>(), nullptr);
  }
  return current;
}

}  // namespace degrade
}  // namespace revoice
