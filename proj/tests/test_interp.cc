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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "testing/workloads.h"

using namespace tir;
using namespace tir::testing;

TEST_CASE("matmul f32 matches the triple-loop oracle") {
  PrimFuncPtr f = parse_text(matmul_source(16));
  TensorValue a = random_tensor(DType::F32, {16, 16}, 1);
  TensorValue b = random_tensor(DType::F32, {16, 16}, 2);
  ExecContext ctx;
  auto out = run(*f, {a, b}, ctx);
  REQUIRE(out.size() == 1);
  CHECK(tensors_close(out[0], oracle_matmul(a, b)));
}

TEST_CASE("matmul i32 matches the oracle bitwise") {
  PrimFuncPtr f = parse_text(matmul_source(8, "i32"));
  TensorValue a = random_tensor(DType::I32, {8, 8}, 3);
  TensorValue b = random_tensor(DType::I32, {8, 8}, 4);
  ExecContext ctx;
  auto out = run(*f, {a, b}, ctx);
  CHECK(tensors_bitwise_equal(out[0], oracle_matmul(a, b)));
}

TEST_CASE("gemm+relu, conv2d, depthwise match their oracles") {
  {
    PrimFuncPtr f = parse_text(gemm_relu_source(16));
    TensorValue a = random_tensor(DType::F32, {16, 16}, 5);
    TensorValue b = random_tensor(DType::F32, {16, 16}, 6);
    ExecContext ctx;
    auto out = run(*f, {a, b}, ctx);
    CHECK(tensors_close(out[0], oracle_gemm_relu(a, b)));
  }
  {
    PrimFuncPtr f = parse_text(conv2d_source(8, 8, 4, 3, 3, 8));
    TensorValue a = random_tensor(DType::F32, {1, 8, 8, 4}, 7);
    TensorValue b = random_tensor(DType::F32, {3, 3, 4, 8}, 8);
    ExecContext ctx;
    auto out = run(*f, {a, b}, ctx);
    CHECK(tensors_close(out[0], oracle_conv2d(a, b)));
  }
  {
    PrimFuncPtr f = parse_text(depthwise_source(8, 8, 8, 3, 3));
    TensorValue a = random_tensor(DType::F32, {1, 8, 8, 8}, 9);
    TensorValue b = random_tensor(DType::F32, {3, 3, 8}, 10);
    ExecContext ctx;
    auto out = run(*f, {a, b}, ctx);
    CHECK(tensors_close(out[0], oracle_depthwise(a, b)));
  }
}

TEST_CASE("determinism: identical runs give identical outputs and counters") {
  PrimFuncPtr f = parse_text(gemm_relu_source(8));
  TensorValue a = random_tensor(DType::F32, {8, 8}, 11);
  TensorValue b = random_tensor(DType::F32, {8, 8}, 12);
  ExecContext c1, c2;
  auto o1 = run(*f, {a, b}, c1);
  auto o2 = run(*f, {a, b}, c2);
  CHECK(tensors_bitwise_equal(o1[0], o2[0]));
  CHECK(c1.counters.scalar_ops == c2.counters.scalar_ops);
  CHECK(c1.counters.bytes_moved == c2.counters.bytes_moved);
  CHECK(c1.counters.loop_trip_overhead == c2.counters.loop_trip_overhead);
}

TEST_CASE("scalar op count of a matmul is 2*n^3") {
  PrimFuncPtr f = parse_text(matmul_source(8));
  TensorValue a = random_tensor(DType::F32, {8, 8}, 13);
  TensorValue b = random_tensor(DType::F32, {8, 8}, 14);
  ExecContext ctx;
  run(*f, {a, b}, ctx);
  CHECK(ctx.counters.scalar_ops == 2 * 8 * 8 * 8);
  CHECK(ctx.counters.scalar_ops_by_block.at("gemm") == 2 * 8 * 8 * 8);
  CHECK(ctx.counters.intrinsic_calls == 0);
}

TEST_CASE("out-of-bounds access aborts the run") {
  const char* src = R"(func oob(A: i32[4]) {
  block root() {
    for i in 0..8 {
      A[i] = i
    }
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  ExecContext ctx;
  try {
    run(*f, {}, ctx);
    FAIL("expected OutOfBounds");
  } catch (const Error& e) {
    CHECK(e.kind() == "OutOfBounds");
  }
}

TEST_CASE("predicates skip block instances") {
  const char* src = R"(func pred(A: i32[6]) {
  block root() {
    for o in 0..2 {
      for i in 0..4 {
        block w(spatial v: 6 = o*4 + i) writes(A[v +: 1]) if o*4 + i < 6 {
          A[v] = v + 1
        }
      }
    }
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  ExecContext ctx;
  auto out = run(*f, {}, ctx);
  for (int64_t i = 0; i < 6; ++i) CHECK(out[0].get_i(i) == i + 1);
}

TEST_CASE("init fires exactly on the first reduction iteration") {
  // accumulate over k with the k loop outermost; init must run only at k==0
  const char* src = R"(func acc(A: i32[4], C: i32[4]) {
  block root() {
    for k in 0..3 {
      for i in 0..4 {
        block s(spatial vi: 4 = i, reduce vk: 3 = k) reads(A[vi +: 1]) writes(C[vi +: 1]) {
          init {
            C[vi] = 100
          }
          C[vi] = C[vi] + A[vi]
        }
      }
    }
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  TensorValue a = TensorValue::zeros(DType::I32, {4});
  for (int i = 0; i < 4; ++i) a.set_i(i, i);
  ExecContext ctx;
  auto out = run(*f, {a}, ctx);
  for (int64_t i = 0; i < 4; ++i) CHECK(out[0].get_i(i) == 100 + 3 * i);
}

TEST_CASE("registered host kernels execute intrinsic calls") {
  // a 4x4x4 dot-product style intrinsic over global operands
  const char* src = R"(func tiled(A: f32[8, 8], B: f32[8, 8], C: f32[8, 8]) {
  block root() {
    for io in 0..2 {
      for jo in 0..2 {
        for ko in 0..2 {
          block mm(spatial vio: 2 = io, spatial vjo: 2 = jo, reduce vko: 2 = ko) reads(A[vio*4 +: 4, vko*4 +: 4], B[vko*4 +: 4, vjo*4 +: 4]) writes(C[vio*4 +: 4, vjo*4 +: 4]) attrs("tensorized" = "accel.dot") {
            accel.dot()
          }
        }
      }
    }
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  ExecContext ctx;
  ctx.register_host_kernel("accel.dot", [](std::vector<TensorView>& views) {
    TensorView& c = views[0];
    TensorView& a = views[1];
    TensorView& b = views[2];
    for (int64_t i = 0; i < 4; ++i) {
      for (int64_t j = 0; j < 4; ++j) {
        float acc = static_cast<float>(c.get_f({i, j}));
        for (int64_t k = 0; k < 4; ++k) {
          acc += static_cast<float>(a.get_f({i, k})) * static_cast<float>(b.get_f({k, j}));
        }
        c.set_f({i, j}, acc);
      }
    }
  });
  TensorValue a = random_tensor(DType::F32, {8, 8}, 20);
  TensorValue b = random_tensor(DType::F32, {8, 8}, 21);
  auto out = run(*f, {a, b}, ctx);
  CHECK(tensors_close(out[0], oracle_matmul(a, b)));
  CHECK(ctx.counters.intrinsic_calls == 8);
  CHECK(ctx.counters.scalar_ops_by_block["mm"] == 0);

  // duplicate registration is rejected
  try {
    ctx.register_host_kernel("accel.dot", [](std::vector<TensorView>&) {});
    FAIL("expected DuplicateName");
  } catch (const Error& e) {
    CHECK(e.kind() == "DuplicateName");
  }
}

TEST_CASE("unregistered intrinsic raises") {
  const char* src = R"(func bad(C: f32[4, 4]) {
  block root() {
    block mm(spatial v: 1 = 0) writes(C[0 +: 4, 0 +: 4]) {
      nosuch.intrin()
    }
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  ExecContext ctx;
  try {
    run(*f, {}, ctx);
    FAIL("expected UnregisteredIntrinsic");
  } catch (const Error& e) {
    CHECK(e.kind() == "UnregisteredIntrinsic");
  }
}

TEST_CASE("cost_report requires a completed run and is stable") {
  PrimFuncPtr f = parse_text(matmul_source(4));
  ExecContext ctx;
  try {
    ctx.cost_report();
    FAIL("expected NoRun");
  } catch (const Error& e) {
    CHECK(e.kind() == "NoRun");
  }
  TensorValue a = random_tensor(DType::F32, {4, 4}, 30);
  TensorValue b = random_tensor(DType::F32, {4, 4}, 31);
  run(*f, {a, b}, ctx);
  auto m1 = ctx.cost_report();
  auto m2 = ctx.cost_report();
  CHECK(m1.simulated_cost == m2.simulated_cost);
  CHECK(m1.counters.scalar_ops == 2 * 4 * 4 * 4);
}

TEST_CASE("scalar kernel generated from a description computes the semantics") {
  const char* desc_src = R"(func dot.desc(A: f32[4, 4], B: f32[4, 4], C: f32[4, 4]) {
  block root() {
    for i in 0..4 {
      for j in 0..4 {
        for k in 0..4 {
          block d(spatial vi: 4 = i, spatial vj: 4 = j, reduce vk: 4 = k) reads(A[vi +: 1, vk +: 1], B[vk +: 1, vj +: 1]) writes(C[vi +: 1, vj +: 1]) {
            C[vi, vj] = C[vi, vj] + A[vi, vk]*B[vk, vj]
          }
        }
      }
    }
  }
}
)";
  PrimFuncPtr desc = parse_text(desc_src);
  HostKernel k = make_scalar_kernel(desc, {"C", "A", "B"});
  TensorValue a = random_tensor(DType::F32, {4, 4}, 40);
  TensorValue b = random_tensor(DType::F32, {4, 4}, 41);
  TensorValue c = TensorValue::zeros(DType::F32, {4, 4});
  std::vector<TensorView> views{TensorView(&c, {0, 0}, {4, 4}), TensorView(&a, {0, 0}, {4, 4}),
                                TensorView(&b, {0, 0}, {4, 4})};
  k(views);
  CHECK(tensors_close(c, oracle_matmul(a, b)));
}

TEST_CASE("tensor file round-trip") {
  TensorValue t = random_tensor(DType::F32, {3, 5}, 50);
  std::string path = "test_tensor_io.bin";
  write_tensor(path, t);
  TensorValue u = read_tensor(path);
  CHECK(tensors_bitwise_equal(t, u));
  std::remove(path.c_str());

  TensorValue ti = random_tensor(DType::I8, {7}, 51);
  write_tensor(path, ti);
  CHECK(tensors_bitwise_equal(ti, read_tensor(path)));
  std::remove(path.c_str());
}

TEST_CASE("empty function yields zero counters") {
  const char* src = R"(func nop(A: f32[4]) {
  block root() {
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  ExecContext ctx;
  auto out = run(*f, {}, ctx);
  CHECK(out.empty());
  CHECK(ctx.counters.scalar_ops == 0);
  CHECK(ctx.counters.intrinsic_calls == 0);
  CHECK(ctx.counters.total_bytes_moved() == 0);
  CHECK(ctx.counters.loop_trip_overhead == 0);
}
