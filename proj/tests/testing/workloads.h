/*
 * Licensed to the Apache Software Foundation (ASF) under one
 * or more contributor license agreements.  See the NOTICE file
 * distributed with this work for additional information
 * regarding copyright ownership.  The ASF licenses this file
 * to you under the Apache License, Version 2.0 (the
 * "License"); you may not use this file except in compliance
 * with the License.  You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing,
 * software distributed under the License is distributed on an
 * "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, either express or implied.  See the License for the
 * specific language governing permissions and limitations
 * under the License.
 */
#ifndef TESTS_TESTING_WORKLOADS_H_
#define TESTS_TESTING_WORKLOADS_H_

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tir/interp.h"
#include "tir/text.h"

namespace tir::testing {

/******** workload sources ********/

// Square matmul C = A x B with an init clause, one block.
inline std::string matmul_source(int n, const std::string& dtype = "f32",
                                 const std::string& name = "matmul") {
  std::string N = std::to_string(n);
  std::string zero = dtype == "i32" ? "0" : "0.0";
  return "func " + name + "(A: " + dtype + "[" + N + ", " + N + "], B: " + dtype + "[" + N +
         ", " + N + "], C: " + dtype + "[" + N + ", " + N + "]) {\n"
         "  block root() {\n"
         "    for i in 0.." + N + " {\n"
         "      for j in 0.." + N + " {\n"
         "        for k in 0.." + N + " {\n"
         "          block gemm(spatial vi: " + N + " = i, spatial vj: " + N +
         " = j, reduce vk: " + N + " = k) reads(A[vi +: 1, vk +: 1], B[vk +: 1, vj +: 1]) "
         "writes(C[vi +: 1, vj +: 1]) {\n"
         "            init {\n"
         "              C[vi, vj] = " + zero + "\n"
         "            }\n"
         "            C[vi, vj] = C[vi, vj] + A[vi, vk]*B[vk, vj]\n"
         "          }\n"
         "        }\n"
         "      }\n"
         "    }\n"
         "  }\n"
         "}\n";
}

// GEMM followed by a ReLU epilogue into D.
inline std::string gemm_relu_source(int n) {
  std::string N = std::to_string(n);
  return "func gemm_relu(A: f32[" + N + ", " + N + "], B: f32[" + N + ", " + N + "], D: f32[" + N +
         ", " + N + "]) {\n"
         "  block root() {\n"
         "    alloc C: f32[" + N + ", " + N + "]\n"
         "    for i in 0.." + N + " {\n"
         "      for j in 0.." + N + " {\n"
         "        for k in 0.." + N + " {\n"
         "          block gemm(spatial vi: " + N + " = i, spatial vj: " + N +
         " = j, reduce vk: " + N + " = k) reads(A[vi +: 1, vk +: 1], B[vk +: 1, vj +: 1]) "
         "writes(C[vi +: 1, vj +: 1]) {\n"
         "            init {\n"
         "              C[vi, vj] = 0.0\n"
         "            }\n"
         "            C[vi, vj] = C[vi, vj] + A[vi, vk]*B[vk, vj]\n"
         "          }\n"
         "        }\n"
         "      }\n"
         "    }\n"
         "    for i2 in 0.." + N + " {\n"
         "      for j2 in 0.." + N + " {\n"
         "        block relu(spatial vi: " + N + " = i2, spatial vj: " + N +
         " = j2) reads(C[vi +: 1, vj +: 1]) writes(D[vi +: 1, vj +: 1]) {\n"
         "          D[vi, vj] = max(C[vi, vj], 0.0)\n"
         "        }\n"
         "      }\n"
         "    }\n"
         "  }\n"
         "}\n";
}

// NHWC conv2d, stride 1, no padding, HWIO weights.
// A: [1, H, W, CI], B: [KH, KW, CI, CO], C: [1, H-KH+1, W-KW+1, CO]
inline std::string conv2d_source(int h, int w, int ci, int kh, int kw, int co) {
  int oh = h - kh + 1, ow = w - kw + 1;
  auto S = [](int v) { return std::to_string(v); };
  return "func conv2d(A: f32[1, " + S(h) + ", " + S(w) + ", " + S(ci) + "], B: f32[" + S(kh) +
         ", " + S(kw) + ", " + S(ci) + ", " + S(co) + "], C: f32[1, " + S(oh) + ", " + S(ow) +
         ", " + S(co) + "]) {\n"
         "  block root() {\n"
         "    for n in 0..1 {\n"
         "      for h in 0.." + S(oh) + " {\n"
         "        for w in 0.." + S(ow) + " {\n"
         "          for co in 0.." + S(co) + " {\n"
         "            for rh in 0.." + S(kh) + " {\n"
         "              for rw in 0.." + S(kw) + " {\n"
         "                for rc in 0.." + S(ci) + " {\n"
         "                  block conv(spatial vn: 1 = n, spatial vh: " + S(oh) +
         " = h, spatial vw: " + S(ow) + " = w, spatial vco: " + S(co) + " = co, reduce vrh: " +
         S(kh) + " = rh, reduce vrw: " + S(kw) + " = rw, reduce vrc: " + S(ci) + " = rc) "
         "reads(A[vn +: 1, vh + vrh +: 1, vw + vrw +: 1, vrc +: 1], "
         "B[vrh +: 1, vrw +: 1, vrc +: 1, vco +: 1]) "
         "writes(C[vn +: 1, vh +: 1, vw +: 1, vco +: 1]) {\n"
         "                    init {\n"
         "                      C[vn, vh, vw, vco] = 0.0\n"
         "                    }\n"
         "                    C[vn, vh, vw, vco] = C[vn, vh, vw, vco] + "
         "A[vn, vh + vrh, vw + vrw, vrc]*B[vrh, vrw, vrc, vco]\n"
         "                  }\n"
         "                }\n"
         "              }\n"
         "            }\n"
         "          }\n"
         "        }\n"
         "      }\n"
         "    }\n"
         "  }\n"
         "}\n";
}

// Depthwise conv: A [1,H,W,C], B [KH,KW,C], C [1,H-KH+1,W-KW+1,C]
inline std::string depthwise_source(int h, int w, int c, int kh, int kw) {
  int oh = h - kh + 1, ow = w - kw + 1;
  auto S = [](int v) { return std::to_string(v); };
  return "func depthwise(A: f32[1, " + S(h) + ", " + S(w) + ", " + S(c) + "], B: f32[" + S(kh) +
         ", " + S(kw) + ", " + S(c) + "], C: f32[1, " + S(oh) + ", " + S(ow) + ", " + S(c) +
         "]) {\n"
         "  block root() {\n"
         "    for n in 0..1 {\n"
         "      for h in 0.." + S(oh) + " {\n"
         "        for w in 0.." + S(ow) + " {\n"
         "          for c in 0.." + S(c) + " {\n"
         "            for rh in 0.." + S(kh) + " {\n"
         "              for rw in 0.." + S(kw) + " {\n"
         "                block dw(spatial vn: 1 = n, spatial vh: " + S(oh) +
         " = h, spatial vw: " + S(ow) + " = w, spatial vc: " + S(c) + " = c, reduce vrh: " +
         S(kh) + " = rh, reduce vrw: " + S(kw) + " = rw) "
         "reads(A[vn +: 1, vh + vrh +: 1, vw + vrw +: 1, vc +: 1], "
         "B[vrh +: 1, vrw +: 1, vc +: 1]) "
         "writes(C[vn +: 1, vh +: 1, vw +: 1, vc +: 1]) {\n"
         "                  init {\n"
         "                    C[vn, vh, vw, vc] = 0.0\n"
         "                  }\n"
         "                  C[vn, vh, vw, vc] = C[vn, vh, vw, vc] + "
         "A[vn, vh + vrh, vw + vrw, vc]*B[vrh, vrw, vc]\n"
         "                }\n"
         "              }\n"
         "            }\n"
         "          }\n"
         "        }\n"
         "      }\n"
         "    }\n"
         "  }\n"
         "}\n";
}

/******** deterministic inputs ********/

inline TensorValue random_tensor(DType dt, std::vector<int64_t> shape, uint64_t seed) {
  TensorValue t = TensorValue::zeros(dt, std::move(shape));
  std::mt19937_64 rng(seed);
  for (int64_t i = 0; i < t.num_elements(); ++i) {
    if (dtype_is_float(dt)) {
      // small exact-ish values keep f32 comparisons tight
      t.set_f(i, static_cast<double>(static_cast<int64_t>(rng() % 64)) / 8.0 - 4.0);
    } else if (dt == DType::I8) {
      t.set_i(i, static_cast<int64_t>(rng() % 16) - 8);
    } else {
      t.set_i(i, static_cast<int64_t>(rng() % 17) - 8);
    }
  }
  return t;
}

/******** independent oracles (naive loops over TensorValue) ********/

inline TensorValue oracle_matmul(const TensorValue& a, const TensorValue& b) {
  int64_t n = a.shape[0], m = b.shape[1], kk = a.shape[1];
  TensorValue c = TensorValue::zeros(a.dtype, {n, m});
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < m; ++j) {
      if (dtype_is_float(a.dtype)) {
        float acc = 0;
        for (int64_t k = 0; k < kk; ++k) {
          acc += static_cast<float>(a.get_f(i * kk + k)) * static_cast<float>(b.get_f(k * m + j));
        }
        c.set_f(i * m + j, acc);
      } else {
        int64_t acc = 0;
        for (int64_t k = 0; k < kk; ++k) acc += a.get_i(i * kk + k) * b.get_i(k * m + j);
        c.set_i(i * m + j, acc);
      }
    }
  }
  return c;
}

inline TensorValue oracle_gemm_relu(const TensorValue& a, const TensorValue& b) {
  TensorValue c = oracle_matmul(a, b);
  for (int64_t i = 0; i < c.num_elements(); ++i) c.set_f(i, std::max(0.0, c.get_f(i)));
  return c;
}

inline TensorValue oracle_conv2d(const TensorValue& a, const TensorValue& b) {
  int64_t h = a.shape[1], w = a.shape[2], ci = a.shape[3];
  int64_t kh = b.shape[0], kw = b.shape[1], co = b.shape[3];
  int64_t oh = h - kh + 1, ow = w - kw + 1;
  TensorValue c = TensorValue::zeros(DType::F32, {1, oh, ow, co});
  for (int64_t y = 0; y < oh; ++y) {
    for (int64_t x = 0; x < ow; ++x) {
      for (int64_t o = 0; o < co; ++o) {
        float acc = 0;
        for (int64_t ry = 0; ry < kh; ++ry) {
          for (int64_t rx = 0; rx < kw; ++rx) {
            for (int64_t rc = 0; rc < ci; ++rc) {
              float av = static_cast<float>(a.get_f(((y + ry) * w + (x + rx)) * ci + rc));
              float bv = static_cast<float>(b.get_f(((ry * kw + rx) * ci + rc) * co + o));
              acc += av * bv;
            }
          }
        }
        c.set_f((y * ow + x) * co + o, acc);
      }
    }
  }
  return c;
}

inline TensorValue oracle_depthwise(const TensorValue& a, const TensorValue& b) {
  int64_t h = a.shape[1], w = a.shape[2], ch = a.shape[3];
  int64_t kh = b.shape[0], kw = b.shape[1];
  int64_t oh = h - kh + 1, ow = w - kw + 1;
  TensorValue c = TensorValue::zeros(DType::F32, {1, oh, ow, ch});
  for (int64_t y = 0; y < oh; ++y) {
    for (int64_t x = 0; x < ow; ++x) {
      for (int64_t ci = 0; ci < ch; ++ci) {
        float acc = 0;
        for (int64_t ry = 0; ry < kh; ++ry) {
          for (int64_t rx = 0; rx < kw; ++rx) {
            acc += static_cast<float>(a.get_f(((y + ry) * w + (x + rx)) * ch + ci)) *
                   static_cast<float>(b.get_f((ry * kw + rx) * ch + ci));
          }
        }
        c.set_f((y * ow + x) * ch + ci, acc);
      }
    }
  }
  return c;
}

/******** comparisons ********/

inline bool tensors_close(const TensorValue& a, const TensorValue& b, double rel_tol = 1e-5) {
  if (a.dtype != b.dtype || a.shape != b.shape) return false;
  std::vector<int64_t> idx(a.shape.size(), 0);
  if (a.num_elements() == 0) return true;
  for (;;) {
    int64_t fa = a.flat_index(idx), fb = b.flat_index(idx);
    if (dtype_is_float(a.dtype)) {
      double x = a.get_f(fa), y = b.get_f(fb);
      double denom = std::max({std::abs(x), std::abs(y), 1.0});
      if (std::abs(x - y) > rel_tol * denom) return false;
    } else {
      if (a.get_i(fa) != b.get_i(fb)) return false;
    }
    int d = static_cast<int>(idx.size()) - 1;
    while (d >= 0 && ++idx[d] == a.shape[d]) idx[d--] = 0;
    if (d < 0) break;
  }
  return true;
}

inline bool tensors_bitwise_equal(const TensorValue& a, const TensorValue& b) {
  if (a.dtype != b.dtype || a.shape != b.shape) return false;
  std::vector<int64_t> idx(a.shape.size(), 0);
  for (;;) {
    if (dtype_is_float(a.dtype)) {
      if (a.get_f(a.flat_index(idx)) != b.get_f(b.flat_index(idx))) return false;
    } else {
      if (a.get_i(a.flat_index(idx)) != b.get_i(b.flat_index(idx))) return false;
    }
    int d = static_cast<int>(idx.size()) - 1;
    while (d >= 0 && ++idx[d] == a.shape[d]) idx[d--] = 0;
    if (d < 0) break;
  }
  return true;
}

}  // namespace tir::testing

#endif  // TESTS_TESTING_WORKLOADS_H_
