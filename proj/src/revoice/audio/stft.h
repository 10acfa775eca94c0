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

#ifndef REVOICE_AUDIO_STFT_H_
#define REVOICE_AUDIO_STFT_H_

#include <complex>
#include <vector>

namespace revoice {

// Iterative radix-2 FFT. One plan per transform size; plans are immutable
// after construction and safe to share across threads.
class FftPlan {
 public:
  explicit FftPlan(int n);  // n must be a power of two
  int size() const { return n_; }
  void forward(std::complex<double>* x) const;
  void inverse(std::complex<double>* x) const;  // includes the 1/n scale

 private:
  void transform(std::complex<double>* x, bool inv) const;
  int n_;
  std::vector<int> bitrev_;
  std::vector<std::complex<double>> twiddle_;  // forward twiddles
};

/// Complex half spectrum, frames x (n_fft/2 + 1), row-major.
struct Spectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<std::complex<double>> v;

  std::complex<double>& at(int f, int b) { return v[static_cast<size_t>(f) * bins + b]; }
  const std::complex<double>& at(int f, int b) const {
    return v[static_cast<size_t>(f) * bins + b];
  }
};

std::vector<double> hann_periodic(int n);

// Center-padded analysis (reflection), periodic Hann window. Frame count is
// 1 + floor(T / hop).
Spectrogram stft(const std::vector<float>& x, int win_length, int hop_length,
                 int n_fft);

// Weighted overlap-add inverse with window-sum normalization; returns
// out_len samples aligned with the stft input.
std::vector<float> istft(const Spectrogram& spec, int win_length,
                         int hop_length, int n_fft, int64_t out_len);

}  // namespace revoice

#endif  // REVOICE_AUDIO_STFT_H_
