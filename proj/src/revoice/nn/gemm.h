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

#ifndef REVOICE_NN_GEMM_H_
#define REVOICE_NN_GEMM_H_

namespace revoice {
namespace nn {

// Row-major float matrix products. When accumulate is false, C is overwritten.
// C[M,N] = A[M,K] * B[K,N]
void gemm(int m, int k, int n, const float* a, const float* b, float* c,
          bool accumulate);
// C[M,N] = A[M,K] * B[N,K]^T
void gemm_nt(int m, int k, int n, const float* a, const float* b, float* c,
             bool accumulate);
// C[M,N] = A[K,M]^T * B[K,N]
void gemm_tn(int m, int k, int n, const float* a, const float* b, float* c,
             bool accumulate);

}  // namespace nn
}  // namespace revoice

#endif  // REVOICE_NN_GEMM_H_
