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

#include "revoice/audio/stft.h"

#include <cmath>

#include "revoice/common/error.h"

namespace revoice {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Reflection without edge repetition (librosa-style 'reflect').
int64_t reflect_index(int64_t i, int64_t n) {
  if (n == 1) return 0;
  int64_t period = 2 * (n - 1);
  int64_t m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return m;
}
}  // namespace

FftPlan::FftPlan(int n) : n_(n) {
  if (!is_pow2(n)) throw ShapeMismatch("FFT size must be a power of two");
  bitrev_.resize(n);
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < log2n; ++b) r |= ((i >> b) & 1) << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (int k = 0; k < n / 2; ++k) {
    double a = -2.0 * kPi * k / n;
    twiddle_[k] = {std::cos(a), std::sin(a)};
  }
}

void FftPlan::transform(std::complex<double>* x, bool inv) const {
  for (int i = 0; i < n_; ++i) {
    int j = bitrev_[i];
    if (j > i) std::swap(x[i], x[j]);
  }
  for (int len = 2; len <= n_; len <<= 1) {
    int half = len >> 1;
    int step = n_ / len;
    for (int start = 0; start < n_; start += len) {
      for (int k = 0; k < half; ++k) {
        std::complex<double> w = twiddle_[static_cast<size_t>(k) * step];
        if (inv) w = std::conj(w);
        std::complex<double> u = x[start + k];
        std::complex<double> t = w * x[start + k + half];
        x[start + k] = u + t;
        x[start + k + half] = u - t;
      }
    }
  }
}

void FftPlan::forward(std::complex<double>* x) const { transform(x, false); }

void FftPlan::inverse(std::complex<double>* x) const {
  transform(x, true);
  double s = 1.0 / n_;
  for (int i = 0; i < n_; ++i) x[i] *= s;
}

std::vector<double> hann_periodic(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

Spectrogram stft(const std::vector<float>& x, int win_length, int hop_length,
                 int n_fft) {
  if (x.empty()) throw EmptyAudio("stft of empty signal");
  if (!(hop_length <= win_length && win_length <= n_fft)) {
    throw ShapeMismatch("need hop <= win <= n_fft");
  }
  const int64_t t = static_cast<int64_t>(x.size());
  const int pad = n_fft / 2;
  const int frames = static_cast<int>(1 + t / hop_length);
  const int bins = n_fft / 2 + 1;
  const int off = (n_fft - win_length) / 2;  // window centered in the fft frame

  FftPlan plan(n_fft);
  std::vector<double> win = hann_periodic(win_length);
  std::vector<std::complex<double>> buf(n_fft);

  Spectrogram spec;
  spec.frames = frames;
  spec.bins = bins;
  spec.v.resize(static_cast<size_t>(frames) * bins);

  for (int f = 0; f < frames; ++f) {
    const int64_t start = static_cast<int64_t>(f) * hop_length - pad;
    for (int i = 0; i < n_fft; ++i) buf[i] = 0.0;
    for (int i = 0; i < win_length; ++i) {
      int64_t src = reflect_index(start + off + i, t);
      buf[off + i] = static_cast<double>(x[src]) * win[i];
    }
    plan.forward(buf.data());
    for (int b = 0; b < bins; ++b) spec.at(f, b) = buf[b];
  }
  return spec;
}

std::vector<float> istft(const Spectrogram& spec, int win_length,
                         int hop_length, int n_fft, int64_t out_len) {
  const int pad = n_fft / 2;
  const int bins = n_fft / 2 + 1;
  if (spec.bins != bins) throw ShapeMismatch("spectrogram bins mismatch n_fft");
  const int off = (n_fft - win_length) / 2;

  FftPlan plan(n_fft);
  std::vector<double> win = hann_periodic(win_length);
  const int64_t total = static_cast<int64_t>(spec.frames - 1) * hop_length + n_fft;
  std::vector<double> acc(total, 0.0);
  std::vector<double> norm(total, 0.0);
  std::vector<std::complex<double>> buf(n_fft);

  for (int f = 0; f < spec.frames; ++f) {
    for (int b = 0; b < bins; ++b) buf[b] = spec.at(f, b);
    for (int b = bins; b < n_fft; ++b) buf[b] = std::conj(spec.at(f, n_fft - b));
    plan.inverse(buf.data());
    const int64_t start = static_cast<int64_t>(f) * hop_length;
    for (int i = 0; i < win_length; ++i) {
      acc[start + off + i] += buf[off + i].real() * win[i];
      norm[start + off + i] += win[i] * win[i];
    }
  }

  std::vector<float> out(out_len, 0.0f);
  for (int64_t i = 0; i < out_len; ++i) {
    int64_t j = i + pad;
    if (j < total && norm[j] > 1e-11) {
      out[i] = static_cast<float>(acc[j] / norm[j]);
    }
  }
  return out;
}

}  // namespace revoice
