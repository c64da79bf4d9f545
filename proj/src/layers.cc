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

#include "spatialcl/layers.h"

#include <algorithm>
#include <vector>

#include "spatialcl/kernels.h"

namespace spatialcl::layers {

using kernels::Gemm;

template <typename T>
void LinearForward(int batch, int in, int out, const T* x, const T* w,
                   const T* b, T* y) {
  std::vector<T> wt(static_cast<size_t>(in) * out);
  kernels::Transpose(out, in, w, wt.data());
  Gemm(batch, out, in, x, in, wt.data(), out, y, out, false);
  for (int i = 0; i < batch; ++i) {
    T* row = y + static_cast<ptrdiff_t>(i) * out;
    for (int o = 0; o < out; ++o) row[o] += b[o];
  }
}

template <typename T>
void LinearBackward(int batch, int in, int out, const T* x, const T* w,
                    const T* dy, T* dw, T* db, T* dx) {
  if (dw != nullptr) {
    std::vector<T> dyt(static_cast<size_t>(batch) * out);
    kernels::Transpose(batch, out, dy, dyt.data());
    Gemm(out, in, batch, dyt.data(), batch, x, in, dw, in, false);
  }
  if (db != nullptr) {
    std::fill(db, db + out, T(0));
    for (int i = 0; i < batch; ++i) {
      const T* row = dy + static_cast<ptrdiff_t>(i) * out;
      for (int o = 0; o < out; ++o) db[o] += row[o];
    }
  }
  if (dx != nullptr) Gemm(batch, in, out, dy, out, w, in, dx, in, false);
}

template <typename T>
void Conv3x3Forward(int batch, int cin, int cout, int height, int width,
                    const T* x, const T* w, const T* b, T* y) {
  const int hw = height * width;
  const size_t in_size = static_cast<size_t>(cin) * hw;
  const size_t out_size = static_cast<size_t>(cout) * hw;
#pragma omp parallel
  {
    std::vector<T> col(static_cast<size_t>(cin) * 9 * hw);
#pragma omp for schedule(static)
    for (int s = 0; s < batch; ++s) {
      kernels::Im2Col3x3(cin, height, width, x + s * in_size, col.data());
      T* ys = y + s * out_size;
      for (int o = 0; o < cout; ++o) std::fill_n(ys + o * hw, hw, b[o]);
      Gemm(cout, hw, cin * 9, w, cin * 9, col.data(), hw, ys, hw, true);
    }
  }
}

template <typename T>
void Conv3x3Backward(int batch, int cin, int cout, int height, int width,
                     const T* x, const T* w, const T* dy, T* dw, T* db, T* dx) {
  const int hw = height * width;
  const int kdim = cin * 9;
  const size_t in_size = static_cast<size_t>(cin) * hw;
  const size_t out_size = static_cast<size_t>(cout) * hw;
  const size_t w_size = static_cast<size_t>(cout) * kdim;
  // Weight gradients are accumulated, transposed as [kdim x cout], over
  // fixed groups of samples; the group sums are then added in group order.
  // The summation order depends only on kGroup, never on the thread count.
  constexpr int kGroup = 8;
  const int groups = (batch + kGroup - 1) / kGroup;
  std::vector<T> dwt_parts(dw != nullptr ? w_size * groups : 0);
  std::vector<T> wt;
  if (dx != nullptr) {
    wt.resize(w_size);
    kernels::Transpose(cout, kdim, w, wt.data());
  }
#pragma omp parallel
  {
    std::vector<T> col(static_cast<size_t>(kdim) * hw);
    std::vector<T> dyt(dw != nullptr ? out_size : 0);
#pragma omp for schedule(static)
    for (int g = 0; g < groups; ++g) {
      for (int s = g * kGroup; s < std::min(batch, (g + 1) * kGroup); ++s) {
        const T* dys = dy + s * out_size;
        if (dw != nullptr) {
          kernels::Im2Col3x3(cin, height, width, x + s * in_size, col.data());
          kernels::Transpose(cout, hw, dys, dyt.data());
          Gemm(kdim, cout, hw, col.data(), hw, dyt.data(), cout,
               dwt_parts.data() + g * w_size, cout, s != g * kGroup);
        }
        if (dx != nullptr) {
          Gemm(kdim, hw, cout, wt.data(), cout, dys, hw, col.data(), hw, false);
          T* dxs = dx + s * in_size;
          std::fill_n(dxs, in_size, T(0));
          kernels::Col2Im3x3(cin, height, width, col.data(), dxs);
        }
      }
    }
  }
  if (dw != nullptr) {
    std::vector<T> dwt(dwt_parts.begin(), dwt_parts.begin() + w_size);
    for (int g = 1; g < groups; ++g) {
      const T* part = dwt_parts.data() + g * w_size;
      for (size_t i = 0; i < w_size; ++i) dwt[i] += part[i];
    }
    kernels::Transpose(kdim, cout, dwt.data(), dw);
  }
  if (db != nullptr) {
    std::fill_n(db, cout, T(0));
    for (int s = 0; s < batch; ++s) {
      for (int o = 0; o < cout; ++o) {
        const T* plane = dy + s * out_size + static_cast<size_t>(o) * hw;
        T acc = 0;
        for (int i = 0; i < hw; ++i) acc += plane[i];
        db[o] += acc;
      }
    }
  }
}

template <typename T>
void ReluForward(size_t n, const T* x, T* y) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void ReluBackward(size_t n, const T* y, const T* dy, T* dx) {
  for (size_t i = 0; i < n; ++i) dx[i] = y[i] > T(0) ? dy[i] : T(0);
}

template <typename T>
void AvgPool2x2Forward(int planes, int height, int width, const T* x, T* y) {
  const int oh = height / 2, ow = width / 2;
  for (int p = 0; p < planes; ++p) {
    const T* xp = x + static_cast<size_t>(p) * height * width;
    T* yp = y + static_cast<size_t>(p) * oh * ow;
    for (int i = 0; i < oh; ++i) {
      const T* r0 = xp + 2 * i * width;
      const T* r1 = r0 + width;
      for (int j = 0; j < ow; ++j) {
        yp[i * ow + j] =
            T(0.25) * (r0[2 * j] + r0[2 * j + 1] + r1[2 * j] + r1[2 * j + 1]);
      }
    }
  }
}

template <typename T>
void AvgPool2x2Backward(int planes, int height, int width, const T* dy, T* dx) {
  const int oh = height / 2, ow = width / 2;
  std::fill_n(dx, static_cast<size_t>(planes) * height * width, T(0));
  for (int p = 0; p < planes; ++p) {
    const T* dyp = dy + static_cast<size_t>(p) * oh * ow;
    T* dxp = dx + static_cast<size_t>(p) * height * width;
    for (int i = 0; i < oh; ++i) {
      T* r0 = dxp + 2 * i * width;
      T* r1 = r0 + width;
      for (int j = 0; j < ow; ++j) {
        const T g = T(0.25) * dyp[i * ow + j];
        r0[2 * j] = r0[2 * j + 1] = r1[2 * j] = r1[2 * j + 1] = g;
      }
    }
  }
}

template <typename T>
void GlobalAvgPoolForward(int planes, int size, const T* x, T* y) {
  for (int p = 0; p < planes; ++p) {
    const T* xp = x + static_cast<size_t>(p) * size;
    T acc = 0;
    for (int i = 0; i < size; ++i) acc += xp[i];
    y[p] = acc / T(size);
  }
}

template <typename T>
void GlobalAvgPoolBackward(int planes, int size, const T* dy, T* dx) {
  for (int p = 0; p < planes; ++p) {
    std::fill_n(dx + static_cast<size_t>(p) * size, size, dy[p] / T(size));
  }
}

#define SPATIALCL_INSTANTIATE(T)                                              \
  template void LinearForward<T>(int, int, int, const T*, const T*, const T*, \
                                 T*);                                         \
  template void LinearBackward<T>(int, int, int, const T*, const T*,          \
                                  const T*, T*, T*, T*);                      \
  template void Conv3x3Forward<T>(int, int, int, int, int, const T*,          \
                                  const T*, const T*, T*);                    \
  template void Conv3x3Backward<T>(int, int, int, int, int, const T*,         \
                                   const T*, const T*, T*, T*, T*);           \
  template void ReluForward<T>(size_t, const T*, T*);                         \
  template void ReluBackward<T>(size_t, const T*, const T*, T*);              \
  template void AvgPool2x2Forward<T>(int, int, int, const T*, T*);            \
  template void AvgPool2x2Backward<T>(int, int, int, const T*, T*);           \
  template void GlobalAvgPoolForward<T>(int, int, const T*, T*);              \
  template void GlobalAvgPoolBackward<T>(int, int, const T*, T*);

SPATIALCL_INSTANTIATE(float)
SPATIALCL_INSTANTIATE(double)
#undef SPATIALCL_INSTANTIATE

}  // namespace spatialcl::layers
