// Copyright 2026 The spatialcl Authors.
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

#ifndef SPATIALCL_KERNELS_H_
#define SPATIALCL_KERNELS_H_

// Dense compute kernels shared by the network layers. Every kernel comes in
// two flavours: a plain nested-loop reference kept for testing, and a
// cache-blocked version whose outer loops are OpenMP-parallel. Parallelism
// is only ever over output elements, so every output is reduced in the same
// order regardless of the thread count.

#include <cstddef>

namespace spatialcl::kernels {

// C[m x n] = A[m x k] * B[k x n] (+ C when accumulate). Row-major with
// leading dimensions lda, ldb, ldc.
template <typename T>
void GemmReference(int m, int n, int k, const T* a, int lda, const T* b,
                   int ldb, T* c, int ldc, bool accumulate);

template <typename T>
void Gemm(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c,
          int ldc, bool accumulate);

// dst[cols x rows] = src[rows x cols]^T.
template <typename T>
void Transpose(int rows, int cols, const T* src, T* dst);

// 3x3, stride 1, zero padding 1. `col` is [channels*9 x height*width].
template <typename T>
void Im2Col3x3(int channels, int height, int width, const T* image, T* col);

// Adjoint of Im2Col3x3: image += scatter(col).
template <typename T>
void Col2Im3x3(int channels, int height, int width, const T* col, T* image);

// Direct 3x3 convolution, used as the test oracle for the im2col path.
// input [cin x h x w], weight [cout x cin x 3 x 3], output [cout x h x w].
template <typename T>
void Conv3x3Reference(int cin, int cout, int height, int width, const T* input,
                      const T* weight, const T* bias, T* output);

}  // namespace spatialcl::kernels

#endif  // SPATIALCL_KERNELS_H_
