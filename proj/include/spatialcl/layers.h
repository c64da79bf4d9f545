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

#ifndef SPATIALCL_LAYERS_H_
#define SPATIALCL_LAYERS_H_

// Stateless layer kernels. Activations are NCHW, row-major. Backward
// functions overwrite their gradient outputs; any of dw, db, dx may be null
// when that gradient is not needed.

#include <cstddef>

namespace spatialcl::layers {

// y[batch x out] = x[batch x in] * w[out x in]^T + b.
template <typename T>
void LinearForward(int batch, int in, int out, const T* x, const T* w,
                   const T* b, T* y);
template <typename T>
void LinearBackward(int batch, int in, int out, const T* x, const T* w,
                    const T* dy, T* dw, T* db, T* dx);

// 3x3 convolution, stride 1, zero padding 1. w is [cout x cin x 3 x 3].
template <typename T>
void Conv3x3Forward(int batch, int cin, int cout, int height, int width,
                    const T* x, const T* w, const T* b, T* y);
template <typename T>
void Conv3x3Backward(int batch, int cin, int cout, int height, int width,
                     const T* x, const T* w, const T* dy, T* dw, T* db, T* dx);

// The subgradient at zero is zero. Backward reads the forward output.
template <typename T>
void ReluForward(size_t n, const T* x, T* y);
template <typename T>
void ReluBackward(size_t n, const T* y, const T* dy, T* dx);

// 2x2 average pooling, stride 2, over `planes` planes of height x width.
// A trailing odd row or column is dropped.
template <typename T>
void AvgPool2x2Forward(int planes, int height, int width, const T* x, T* y);
template <typename T>
void AvgPool2x2Backward(int planes, int height, int width, const T* dy, T* dx);

// Mean over each plane of `size` elements.
template <typename T>
void GlobalAvgPoolForward(int planes, int size, const T* x, T* y);
template <typename T>
void GlobalAvgPoolBackward(int planes, int size, const T* dy, T* dx);

}  // namespace spatialcl::layers

#endif  // SPATIALCL_LAYERS_H_
