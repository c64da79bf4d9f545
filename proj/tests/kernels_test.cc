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


#include <omp.h>

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "spatialcl/kernels.h"
#include "spatialcl/rng.h"
#include "testing_util.h"

namespace spatialcl::kernels {
namespace {

template <typename T>
std::vector<T> Random(size_t n, uint64_t seed) {
  RngStream rng(seed);
  std::vector<T> v(n);
  for (T& x : v) x = static_cast<T>(rng.Normal());
  return v;
}

template <typename T>
class GemmTest : public ::testing::Test {};
using Scalars = ::testing::Types<float, double>;
TYPED_TEST_SUITE(GemmTest, Scalars);

TYPED_TEST(GemmTest, MatchesReferenceOnAwkwardShapes) {
  using T = TypeParam;
  const double tol = std::is_same_v<T, float> ? 1e-4 : 1e-11;
  const int shapes[][3] = {{1, 1, 1},    {7, 5, 3},     {8, 48, 256},
                           {9, 49, 257}, {33, 100, 70}, {128, 96, 600},
                           {3, 200, 1}};
  uint64_t seed = 1;
  for (const auto& s : shapes) {
    const int m = s[0], n = s[1], k = s[2];
    const int lda = k + 3, ldb = n + 1, ldc = n + 2;
    auto a = Random<T>(static_cast<size_t>(m) * lda, seed++);
    auto b = Random<T>(static_cast<size_t>(k) * ldb, seed++);
    for (bool accumulate : {false, true}) {
      auto c0 = Random<T>(static_cast<size_t>(m) * ldc, seed);
      auto c1 = c0;
      GemmReference<T>(m, n, k, a.data(), lda, b.data(), ldb, c0.data(), ldc, accumulate);
      Gemm<T>(m, n, k, a.data(), lda, b.data(), ldb, c1.data(), ldc, accumulate);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < ldc; ++j) {
          const size_t idx = static_cast<size_t>(i) * ldc + j;
          ASSERT_NEAR(c1[idx], c0[idx], tol * std::sqrt(static_cast<double>(k)))
              << m << "x" << n << "x" << k << " at " << i << "," << j;
        }
      }
    }
  }
}

TEST(GemmThreads, BitwiseIndependentOfThreadCount) {
  const int m = 70, n = 130, k = 300;
  auto a = Random<float>(m * k, 1);
  auto b = Random<float>(k * n, 2);
  std::vector<float> c1(m * n), c4(m * n);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  Gemm<float>(m, n, k, a.data(), k, b.data(), n, c1.data(), n, false);
  omp_set_num_threads(4);
  Gemm<float>(m, n, k, a.data(), k, b.data(), n, c4.data(), n, false);
  omp_set_num_threads(saved);
  EXPECT_EQ(c1, c4);
}

TEST(TransposeTest, MatchesDefinition) {
  for (auto [r, c] : {std::pair{1, 1}, {5, 17}, {33, 64}, {100, 3}}) {
    auto src = Random<double>(r * c, 3);
    std::vector<double> dst(r * c);
    Transpose<double>(r, c, src.data(), dst.data());
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) ASSERT_EQ(dst[j * r + i], src[i * c + j]);
    }
  }
}

TEST(Im2ColTest, Col2ImIsAdjoint) {
  const int ch = 3, h = 5, w = 7;
  auto x = Random<double>(ch * h * w, 4);
  auto y = Random<double>(ch * 9 * h * w, 5);
  std::vector<double> col(ch * 9 * h * w), img(ch * h * w, 0.0);
  Im2Col3x3<double>(ch, h, w, x.data(), col.data());
  Col2Im3x3<double>(ch, h, w, y.data(), img.data());
  double lhs = 0.0, rhs = 0.0;
  for (size_t i = 0; i < col.size(); ++i) lhs += col[i] * y[i];
  for (size_t i = 0; i < img.size(); ++i) rhs += x[i] * img[i];
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
}

TEST(Im2ColTest, ConvViaGemmMatchesDirectConvolution) {
  const int cin = 4, cout = 6, h = 9, w = 11;
  auto x = Random<double>(cin * h * w, 6);
  auto wt = Random<double>(cout * cin * 9, 7);
  auto bias = Random<double>(cout, 8);
  std::vector<double> ref(cout * h * w), col(cin * 9 * h * w), out(cout * h * w);
  Conv3x3Reference<double>(cin, cout, h, w, x.data(), wt.data(), bias.data(), ref.data());
  Im2Col3x3<double>(cin, h, w, x.data(), col.data());
  for (int o = 0; o < cout; ++o) {
    for (int p = 0; p < h * w; ++p) out[o * h * w + p] = bias[o];
  }
  Gemm<double>(cout, h * w, cin * 9, wt.data(), cin * 9, col.data(), h * w,
               out.data(), h * w, true);
  for (size_t i = 0; i < out.size(); ++i) ASSERT_NEAR(out[i], ref[i], 1e-12);
}

TEST(ConvReferenceTest, HandComputedCorner) {
  // Single channel, all-ones 3x3 kernel: the corner output sums the 2x2
  // corner block because of zero padding.
  std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> k(9, 1.0), b = {0.5}, out(9);
  Conv3x3Reference<double>(1, 1, 3, 3, x.data(), k.data(), b.data(), out.data());
  EXPECT_DOUBLE_EQ(out[0], 1 + 2 + 4 + 5 + 0.5);
  EXPECT_DOUBLE_EQ(out[4], 45 + 0.5);
  EXPECT_DOUBLE_EQ(out[8], 5 + 6 + 8 + 9 + 0.5);
}

}  // namespace
}  // namespace spatialcl::kernels
