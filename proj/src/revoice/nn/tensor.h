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

#ifndef REVOICE_NN_TENSOR_H_
#define REVOICE_NN_TENSOR_H_

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "revoice/common/error.h"

namespace revoice {
namespace nn {

// Dense row-major float32 tensor.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(count(shape_)), 0.0f);
  }

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<int> shape, float v) {
    Tensor t(std::move(shape));
    for (float& x : t.data_) x = v;
    return t;
  }

  static Tensor from_vector(std::vector<int> shape, std::vector<float> data) {
    if (count(shape) != static_cast<int64_t>(data.size())) {
      throw ShapeMismatch("tensor data does not match shape");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
  }

  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  const std::vector<int>& shape() const { return shape_; }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  bool defined() const { return !shape_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }

  float& flat(int64_t i) { return data_[static_cast<size_t>(i)]; }
  float flat(int64_t i) const { return data_[static_cast<size_t>(i)]; }

  // 2-d [rows, cols]
  float& at2(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  float at2(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }

  // 3-d [c, h, w]
  float& at3(int c, int h, int w) {
    return data_[(static_cast<size_t>(c) * shape_[1] + h) * shape_[2] + w];
  }
  float at3(int c, int h, int w) const {
    return data_[(static_cast<size_t>(c) * shape_[1] + h) * shape_[2] + w];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(shape_[i]);
    }
    return s + "]";
  }

  static int64_t count(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
      if (d < 1) throw ShapeMismatch("tensor dims must be >= 1");
      n *= d;
    }
    return shape.empty() ? 0 : n;
  }

 private:
  std::vector<int> shape_;
  std::vector<float> data_;
};

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_TENSOR_H_
