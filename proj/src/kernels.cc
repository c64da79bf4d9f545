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

#include "spatialcl/kernels.h"

#include <omp.h>

#include <algorithm>
#include <cstring>

namespace spatialcl::kernels {
namespace {

constexpr int kMr = 8;
constexpr int kKc = 256;
constexpr int kNc = 384;

template <typename T>
constexpr int Nr() {
  return 3 * 64 / static_cast<int>(sizeof(T));  // three 512-bit lanes
}

// Register tile: c[kMr x Nr] += a[kMr x kc] * b[kc x Nr].
template <typename T>
inline void MicroKernel(int kc, const T* __restrict a, int lda,
                        const T* __restrict b, int ldb, T* __restrict c,
                        int ldc) {
  constexpr int nr = Nr<T>();
  T acc[kMr][nr] = {};
  for (int p = 0; p < kc; ++p) {
    const T* brow = b + static_cast<ptrdiff_t>(p) * ldb;
    for (int r = 0; r < kMr; ++r) {
      const T av = a[static_cast<ptrdiff_t>(r) * lda + p];
#pragma omp simd
      for (int j = 0; j < nr; ++j) acc[r][j] += av * brow[j];
    }
  }
  for (int r = 0; r < kMr; ++r) {
    T* crow = c + static_cast<ptrdiff_t>(r) * ldc;
#pragma omp simd
    for (int j = 0; j < nr; ++j) crow[j] += acc[r][j];
  }
}

template <typename T>
void GemmColumnBlock(int m, int j0, int j1, int k, const T* a, int lda,
                     const T* b, int ldb, T* c, int ldc) {
  constexpr int nr = Nr<T>();
  // Ragged tiles are zero-padded into these buffers so that every tile runs
  // through the register kernel.
  alignas(64) T apack[kMr * kKc];
  alignas(64) T bpack[kKc * nr];
  alignas(64) T ctile[kMr * nr];
  for (int p0 = 0; p0 < k; p0 += kKc) {
    const int kc = std::min(kKc, k - p0);
    for (int j = j0; j < j1; j += nr) {
      const int ncols = std::min(nr, j1 - j);
      const T* bblk = b + static_cast<ptrdiff_t>(p0) * ldb + j;
      int bld = ldb;
      if (ncols < nr) {
        for (int p = 0; p < kc; ++p) {
          const T* src = bblk + static_cast<ptrdiff_t>(p) * ldb;
          std::copy_n(src, ncols, bpack + p * nr);
          std::fill(bpack + p * nr + ncols, bpack + (p + 1) * nr, T(0));
        }
        bblk = bpack;
        bld = nr;
      }
      for (int i = 0; i < m; i += kMr) {
        const int mr = std::min(kMr, m - i);
        const T* ablk = a + static_cast<ptrdiff_t>(i) * lda + p0;
        int ald = lda;
        if (mr < kMr) {
          for (int r = 0; r < kMr; ++r) {
            if (r < mr) {
              std::copy_n(ablk + static_cast<ptrdiff_t>(r) * lda, kc,
                          apack + r * kc);
            } else {
              std::fill_n(apack + r * kc, kc, T(0));
            }
          }
          ablk = apack;
          ald = kc;
        }
        T* cblk = c + static_cast<ptrdiff_t>(i) * ldc + j;
        if (mr == kMr && ncols == nr) {
          MicroKernel(kc, ablk, ald, bblk, bld, cblk, ldc);
        } else {
          std::fill_n(ctile, kMr * nr, T(0));
          MicroKernel(kc, ablk, ald, bblk, bld, ctile, nr);
          for (int r = 0; r < mr; ++r) {
            for (int jj = 0; jj < ncols; ++jj) {
              cblk[static_cast<ptrdiff_t>(r) * ldc + jj] += ctile[r * nr + jj];
            }
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
void GemmReference(int m, int n, int k, const T* a, int lda, const T* b,
                   int ldb, T* c, int ldc, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T sum = accumulate ? c[static_cast<ptrdiff_t>(i) * ldc + j] : T(0);
      for (int p = 0; p < k; ++p) {
        sum += a[static_cast<ptrdiff_t>(i) * lda + p] *
               b[static_cast<ptrdiff_t>(p) * ldb + j];
      }
      c[static_cast<ptrdiff_t>(i) * ldc + j] = sum;
    }
  }
}

template <typename T>
void Gemm(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c,
          int ldc, bool accumulate) {
  if (!accumulate) {
    for (int i = 0; i < m; ++i) {
      std::fill_n(c + static_cast<ptrdiff_t>(i) * ldc, n, T(0));
    }
  }
  if (m == 0 || n == 0 || k == 0) return;
  const int blocks = (n + kNc - 1) / kNc;
  const bool parallel = !omp_in_parallel() && blocks > 1 &&
                        static_cast<double>(m) * n * k > 1e6;
#pragma omp parallel for schedule(static) if (parallel)
  for (int blk = 0; blk < blocks; ++blk) {
    const int j0 = blk * kNc;
    const int j1 = std::min(n, j0 + kNc);
    GemmColumnBlock(m, j0, j1, k, a, lda, b, ldb, c, ldc);
  }
}

template <typename T>
void Transpose(int rows, int cols, const T* src, T* dst) {
  constexpr int kTile = 16;
  for (int i0 = 0; i0 < rows; i0 += kTile) {
    for (int j0 = 0; j0 < cols; j0 += kTile) {
      const int i1 = std::min(rows, i0 + kTile);
      const int j1 = std::min(cols, j0 + kTile);
      for (int j = j0; j < j1; ++j) {
        for (int i = i0; i < i1; ++i) {
          dst[static_cast<ptrdiff_t>(j) * rows + i] =
              src[static_cast<ptrdiff_t>(i) * cols + j];
        }
      }
    }
  }
}

template <typename T>
void Im2Col3x3(int channels, int height, int width, const T* image, T* col) {
  const ptrdiff_t plane = static_cast<ptrdiff_t>(height) * width;
  for (int ch = 0; ch < channels; ++ch) {
    const T* src = image + ch * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* dst = col + (static_cast<ptrdiff_t>(ch) * 9 + ky * 3 + kx) * plane;
        const int dx = kx - 1;
        for (int y = 0; y < height; ++y) {
          const int sy = y + ky - 1;
          T* drow = dst + static_cast<ptrdiff_t>(y) * width;
          if (sy < 0 || sy >= height) {
            std::fill_n(drow, width, T(0));
            continue;
          }
          const T* srow = src + static_cast<ptrdiff_t>(sy) * width;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(width, width - dx);
          for (int x = 0; x < x0; ++x) drow[x] = T(0);
          for (int x = x0; x < x1; ++x) drow[x] = srow[x + dx];
          for (int x = x1; x < width; ++x) drow[x] = T(0);
        }
      }
    }
  }
}

template <typename T>
void Col2Im3x3(int channels, int height, int width, const T* col, T* image) {
  const ptrdiff_t plane = static_cast<ptrdiff_t>(height) * width;
  for (int ch = 0; ch < channels; ++ch) {
    T* dst = image + ch * plane;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* src =
            col + (static_cast<ptrdiff_t>(ch) * 9 + ky * 3 + kx) * plane;
        const int dx = kx - 1;
        for (int y = 0; y < height; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= height) continue;
          const T* srow = src + static_cast<ptrdiff_t>(y) * width;
          T* drow = dst + static_cast<ptrdiff_t>(sy) * width;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(width, width - dx);
          for (int x = x0; x < x1; ++x) drow[x + dx] += srow[x];
        }
      }
    }
  }
}

template <typename T>
void Conv3x3Reference(int cin, int cout, int height, int width, const T* input,
                      const T* weight, const T* bias, T* output) {
  for (int co = 0; co < cout; ++co) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        T sum = bias ? bias[co] : T(0);
        for (int ci = 0; ci < cin; ++ci) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int sy = y + ky - 1;
              const int sx = x + kx - 1;
              if (sy < 0 || sy >= height || sx < 0 || sx >= width) continue;
              sum += weight[((co * cin + ci) * 3 + ky) * 3 + kx] *
                     input[(static_cast<ptrdiff_t>(ci) * height + sy) * width +
                           sx];
            }
          }
        }
        output[(static_cast<ptrdiff_t>(co) * height + y) * width + x] = sum;
      }
    }
  }
}

#define SPATIALCL_INSTANTIATE(T)                                              \
  template void GemmReference<T>(int, int, int, const T*, int, const T*, int, \
                                 T*, int, bool);                              \
  template void Gemm<T>(int, int, int, const T*, int, const T*, int, T*, int, \
                        bool);                                                \
  template void Transpose<T>(int, int, const T*, T*);                         \
  template void Im2Col3x3<T>(int, int, int, const T*, T*);                    \
  template void Col2Im3x3<T>(int, int, int, const T*, T*);                    \
  template void Conv3x3Reference<T>(int, int, int, int, const T*, const T*,   \
                                    const T*, T*);

SPATIALCL_INSTANTIATE(float)
SPATIALCL_INSTANTIATE(double)

#undef SPATIALCL_INSTANTIATE

}  // namespace spatialcl::kernels
