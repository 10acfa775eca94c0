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

#include "revoice/audio/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "revoice/common/error.h"
#include "revoice/common/io.h"

namespace revoice {

namespace {

uint32_t read_u32(const std::string& b, size_t off) {
  return static_cast<uint8_t>(b[off]) | (static_cast<uint8_t>(b[off + 1]) << 8) |
         (static_cast<uint8_t>(b[off + 2]) << 16) |
         (static_cast<uint32_t>(static_cast<uint8_t>(b[off + 3])) << 24);
}

uint16_t read_u16(const std::string& b, size_t off) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[off]) |
                               (static_cast<uint8_t>(b[off + 1]) << 8));
}

void put_u32(std::string& b, uint32_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
  b.push_back(static_cast<char>((v >> 16) & 0xff));
  b.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& b, uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

void validate_audio(const AudioClip& clip) {
  if (clip.samples.empty()) throw EmptyAudio("audio clip has no samples");
  if (clip.sample_rate != kSampleRate) {
    throw SampleRateMismatch("expected 16000 Hz, got " +
                             std::to_string(clip.sample_rate));
  }
  for (float s : clip.samples) {
    if (!std::isfinite(s)) throw NonFiniteAudio("non-finite sample in clip");
  }
}

AudioClip read_wav(const std::string& path) {
  std::string raw = read_file(path);
  if (raw.size() < 44 || raw.compare(0, 4, "RIFF") != 0 ||
      raw.compare(8, 4, "WAVE") != 0) {
    throw WavFormatError("not a RIFF/WAVE file: " + path);
  }
  size_t pos = 12;
  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const char* data_ptr = nullptr;
  uint32_t data_len = 0;
  while (pos + 8 <= raw.size()) {
    std::string id = raw.substr(pos, 4);
    uint32_t len = read_u32(raw, pos + 4);
    size_t body = pos + 8;
    if (body + len > raw.size()) throw WavFormatError("truncated chunk in " + path);
    if (id == "fmt ") {
      if (len < 16) throw WavFormatError("short fmt chunk in " + path);
      format = read_u16(raw, body);
      channels = read_u16(raw, body + 2);
      rate = read_u32(raw, body + 4);
      bits = read_u16(raw, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_ptr = raw.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_ptr == nullptr) {
    throw WavFormatError("missing fmt/data chunk: " + path);
  }
  if (format != 1 || bits != 16) {
    throw WavFormatError("only 16-bit PCM supported: " + path);
  }
  if (channels != 1) throw WavFormatError("only mono supported: " + path);
  if (rate != kSampleRate) {
    throw WavFormatError("only 16 kHz supported, got " + std::to_string(rate) +
                         ": " + path);
  }
  AudioClip clip;
  clip.sample_rate = kSampleRate;
  size_t n = data_len / 2;
  clip.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int16_t v;
    std::memcpy(&v, data_ptr + 2 * i, 2);
    clip.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  if (clip.samples.empty()) throw WavFormatError("empty data chunk: " + path);
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  validate_audio(clip);
  const uint32_t n = static_cast<uint32_t>(clip.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  put_u32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);   // PCM
  put_u16(out, 1);   // mono
  put_u32(out, kSampleRate);
  put_u32(out, kSampleRate * 2);  // byte rate
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits
  out += "data";
  put_u32(out, 2 * n);
  for (uint32_t i = 0; i < n; ++i) {
    float s = std::clamp(clip.samples[i], -1.0f, 1.0f);
    int v = static_cast<int>(std::lrint(s * 32767.0f));
    put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  write_file(path, out);
}

}  // namespace revoice
