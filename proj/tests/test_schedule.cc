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

#include "testing/sched_fuzz.h"
#include "testing/workloads.h"
#include "tir/structural.h"

using namespace tir;
using namespace tir::testing;

namespace {

// interpreter equality of two functions on shared random inputs
void check_interp_equal(const PrimFuncPtr& before, const PrimFuncPtr& after, uint64_t seed,
                        double tol = 1e-5) {
  auto ins = input_params(*before);
  std::vector<TensorValue> inputs;
  for (size_t i = 0; i < ins.size(); ++i) {
    inputs.push_back(random_tensor(ins[i]->dtype, ins[i]->shape, seed + i));
  }
  ExecContext c1, c2;
  auto o1 = run(*before, inputs, c1);
  auto o2 = run(*after, inputs, c2);
  REQUIRE(o1.size() == o2.size());
  for (size_t i = 0; i < o1.size(); ++i) {
    if (dtype_is_float(o1[i].dtype)) {
      CHECK(tensors_close(o1[i], o2[i], tol));
    } else {
      CHECK(tensors_bitwise_equal(o1[i], o2[i]));
    }
  }
}

std::string loop_binding_of(const Schedule& s, const std::string& block, size_t idx) {
  Stmt r = s.find_block_realize(block);
  REQUIRE(r);
  return print_expr(r->bindings[idx]);
}

}  // namespace

TEST_CASE("split rewrites bindings and extents") {
  Schedule s(parse_text(matmul_source(64)));
  auto names = s.split("k", {16, 4});
  REQUIRE(names.size() == 2);
  CHECK(s.loop_extent(names[0]) == 16);
  CHECK(s.loop_extent(names[1]) == 4);
  CHECK(loop_binding_of(s, "gemm", 2) == names[0] + "*4 + " + names[1]);
  check_interp_equal(parse_text(matmul_source(64)), s.func(), 100);
}

TEST_CASE("split by the full extent renames only") {
  Schedule s(parse_text(matmul_source(16)));
  auto names = s.split("i", {16});
  REQUIRE(names.size() == 1);
  CHECK(s.loop_extent(names[0]) == 16);
  CHECK(structural_equal(*parse_text(matmul_source(16)), *s.func(), /*remap_vars=*/true));
}

TEST_CASE("imperfect split inserts a predicate and preserves semantics") {
  PrimFuncPtr before = parse_text(matmul_source(62));
  Schedule s(before);
  s.split("i", {16, 4});
  Stmt r = s.find_block_realize("gemm");
  CHECK_FALSE(is_true(r->predicate));
  CHECK(print_expr(r->predicate).find("< 62") != std::string::npos);
  check_interp_equal(before, s.func(), 101);
}

TEST_CASE("split factor errors") {
  Schedule s(parse_text(matmul_source(16)));
  CHECK_THROWS_AS(s.split("i", {4, 2}), Error);  // product 8 < 16
  try {
    s.split("i", {-1, -1});
  } catch (const Error& e) {
    CHECK(e.kind() == "BadFactors");
  }
  try {
    s.split("nosuch", {4});
  } catch (const Error& e) {
    CHECK(e.kind() == "StaleHandle");
  }
}

TEST_CASE("fuse produces floordiv/mod bindings") {
  const char* src = R"(func f(A: f32[4, 8]) {
  block root() {
    for i in 0..4 {
      for j in 0..8 {
        block w(spatial vi: 4 = i, spatial vj: 8 = j) writes(A[vi +: 1, vj +: 1]) {
          A[vi, vj] = 1.0
        }
      }
    }
  }
}
)";
  Schedule s(parse_text(src));
  std::string fused = s.fuse("i", "j");
  CHECK(s.loop_extent(fused) == 32);
  CHECK(loop_binding_of(s, "w", 0) == fused + "/8");
  CHECK(loop_binding_of(s, "w", 1) == fused + "%8");
  check_interp_equal(parse_text(src), s.func(), 102);
}

TEST_CASE("fuse then split round-trips structurally") {
  PrimFuncPtr f = parse_text(matmul_source(64));
  Schedule s(f);
  std::string fused = s.fuse("i", "j");
  s.split(fused, {64, 64});
  CHECK(structural_equal(*f, *s.func(), /*remap_vars=*/true));
}

TEST_CASE("fuse rejects non-adjacent loops and kind mismatches") {
  Schedule s(parse_text(gemm_relu_source(8)));
  try {
    s.fuse("i", "k");  // j sits between
    FAIL("expected NotAdjacent");
  } catch (const Error& e) {
    CHECK(e.kind() == "NotAdjacent");
  }
  Schedule s2(parse_text(matmul_source(8)));
  s2.annotate("j", "unroll");
  try {
    s2.fuse("i", "j");
    FAIL("expected KindMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == "KindMismatch");
  }
}

TEST_CASE("reorder permutes a chain and preserves semantics") {
  PrimFuncPtr before = parse_text(matmul_source(16));
  Schedule s(before);
  s.reorder({"i", "k", "j"});
  auto chain = s.loops_of("gemm");
  CHECK(chain == std::vector<std::string>{"i", "k", "j"});
  check_interp_equal(before, s.func(), 103);

  // identity permutation is a structural no-op
  Schedule s2(before);
  s2.reorder({"i", "j", "k"});
  CHECK(structural_equal(*before, *s2.func()));
}

TEST_CASE("reorder rejects non-chains") {
  Schedule s(parse_text(gemm_relu_source(8)));
  try {
    s.reorder({"i2", "i"});  // separate nests
    FAIL("expected NotAChain");
  } catch (const Error& e) {
    CHECK(e.kind() == "NotAChain");
  }
}

TEST_CASE("reorder rejects moving a reduction outside a parallel loop across blocks") {
  // two dependent blocks under shared loops: an update under (i, k, j) and a
  // consumer of the row under the same i
  const char* src = R"(func m(A: f32[8, 8], D: f32[8]) {
  block root() {
    alloc C: f32[8]
    for i in 0..8 {
      for k in 0..8 {
        block acc(spatial vi: 8 = i, reduce vk: 8 = k) reads(A[vi +: 1, vk +: 1]) writes(C[vi +: 1]) {
          init {
            C[vi] = 0.0
          }
          C[vi] = C[vi] + A[vi, vk]
        }
      }
      block use(spatial vi2: 8 = i) reads(C[vi2 +: 1]) writes(D[vi2 +: 1]) {
        D[vi2] = C[vi2]*2.0
      }
    }
  }
}
)";
  // make i and k a chain by viewing the k loop under i: the chain (i, k)
  // contains two blocks under i, so moving the reduction k outside the
  // data-parallel i must be rejected
  Schedule s(parse_text(src));
  try {
    s.reorder({"k", "i"});
    FAIL("expected NotAChain or IllegalReorder");
  } catch (const Error& e) {
    // the chain breaks at the Seq containing both blocks
    bool ok = e.kind() == "IllegalReorder" || e.kind() == "NotAChain";
    CHECK(ok);
  }

  // a true chain variant: consumer nested under k as well
  const char* src2 = R"(func m2(A: f32[8, 8], D: f32[8, 8]) {
  block root() {
    alloc C: f32[8, 8]
    for i in 0..8 {
      for k in 0..8 {
        block acc(spatial vi: 8 = i, reduce vk: 8 = k) reads(A[vi +: 1, vk +: 1]) writes(C[vi +: 1, vk +: 1]) {
          C[vi, vk] = A[vi, vk]
        }
        block use(spatial vi2: 8 = i, reduce vk2: 8 = k) reads(C[vi2 +: 1, vk2 +: 1]) writes(D[vi2 +: 1, vk2 +: 1]) {
          D[vi2, vk2] = C[vi2, vk2]*2.0
        }
      }
    }
  }
}
)";
  Schedule s2(parse_text(src2));
  try {
    s2.reorder({"k", "i"});
    FAIL("expected IllegalReorder");
  } catch (const Error& e) {
    CHECK(e.kind() == "IllegalReorder");
  }
}

TEST_CASE("cache_read inserts a staging copy before the consumer") {
  PrimFuncPtr before = parse_text(matmul_source(8));
  Schedule s(before);
  std::string copy = s.cache_read("gemm", 0, "shared");
  Stmt r = s.find_block_realize(copy);
  REQUIRE(r);
  CHECK(r->block->writes[0].buffer->scope == "shared");
  CHECK(r->block->writes[0].buffer->name == "A_shared");
  // consumer reads the cache now
  Stmt g = s.find_block_realize("gemm");
  CHECK(g->block->reads[0].buffer->name == "A_shared");
  check_interp_equal(before, s.func(), 104);

  try {
    s.cache_read("gemm", 7, "shared");
    FAIL("expected BadOperand");
  } catch (const Error& e) {
    CHECK(e.kind() == "BadOperand");
  }
  try {
    s.cache_read("gemm", 0, "weird");
    FAIL("expected UnknownScope");
  } catch (const Error& e) {
    CHECK(e.kind() == "UnknownScope");
  }
}

TEST_CASE("cache_read then compute_inline restores the original") {
  PrimFuncPtr before = parse_text(matmul_source(8));
  Schedule s(before);
  std::string copy = s.cache_read("gemm", 0, "shared");
  s.compute_inline(copy);
  // inlining folds the cache load back; the function is structurally the
  // original up to buffer identity of the read
  check_interp_equal(before, s.func(), 105);
  CHECK(s.find_block_realize(copy) == nullptr);
  Stmt g = s.find_block_realize("gemm");
  CHECK(g->block->reads[0].buffer->name == "A");
}

TEST_CASE("cache_write stages the output and stays oracle-equal") {
  PrimFuncPtr before = parse_text(matmul_source(8));
  Schedule s(before);
  std::string copy = s.cache_write("gemm", "local");
  Stmt g = s.find_block_realize("gemm");
  CHECK(g->block->writes[0].buffer->name == "C_local");
  Stmt c = s.find_block_realize(copy);
  CHECK(c->block->writes[0].buffer->name == "C");
  check_interp_equal(before, s.func(), 106);

  // double cache_write chains two stages
  std::string copy2 = s.cache_write("gemm", "local");
  CHECK(s.find_block_realize(copy2));
  check_interp_equal(before, s.func(), 107);

  try {
    s.cache_write("gemm", "nope");
    FAIL("expected UnknownScope");
  } catch (const Error& e) {
    CHECK(e.kind() == "UnknownScope");
  }
}

TEST_CASE("compute_inline rejects reduction blocks") {
  Schedule s(parse_text(matmul_source(8)));
  try {
    s.compute_inline("gemm");
    FAIL("expected NotInlineable");
  } catch (const Error& e) {
    CHECK(e.kind() == "NotInlineable");
  }
}

TEST_CASE("compute_inline folds an elementwise epilogue") {
  // inline the relu into the writeback chain: cache_write the gemm so the
  // intermediate C becomes a copy, then inline the copy into relu
  PrimFuncPtr before = parse_text(gemm_relu_source(8));
  Schedule s(before);
  // C is an intermediate alloc; relu reads C; gemm writes it
  std::string copy = s.cache_write("gemm", "local");
  // now block `copy` writes C from C_local; inline it so relu reads C_local
  s.compute_inline(copy);
  Stmt relu = s.find_block_realize("relu");
  CHECK(relu->block->reads[0].buffer->name == "C_local");
  check_interp_equal(before, s.func(), 108);
}

TEST_CASE("compute_at shrinks a cache copy to the consumer tile") {
  PrimFuncPtr before = parse_text(matmul_source(16));
  Schedule s(before);
  auto io = s.split("i", {4, 4});
  std::string copy = s.cache_read("gemm", 0, "shared");
  s.compute_at(copy, io[0]);
  // the copy now produces only the rows of the current i-tile
  Stmt r = s.find_block_realize(copy);
  REQUIRE(r);
  std::string b0 = print_expr(r->bindings[0]);
  CHECK(b0.find(io[0]) != std::string::npos);
  check_interp_equal(before, s.func(), 109);

  // no-op: computing at the same loop again changes nothing
  PrimFuncPtr once = s.func();
  s.compute_at(copy, io[0]);
  CHECK(structural_equal(*once, *s.func(), /*remap_vars=*/true));
}

TEST_CASE("compute_at rejects blocks with no dataflow link") {
  const char* src = R"(func two(A: f32[8], B: f32[8], C: f32[8], D: f32[8]) {
  block root() {
    for i in 0..8 {
      block p(spatial vi: 8 = i) reads(A[vi +: 1]) writes(B[vi +: 1]) {
        B[vi] = A[vi]
      }
    }
    for j in 0..8 {
      block q(spatial vj: 8 = j) reads(C[vj +: 1]) writes(D[vj +: 1]) {
        D[vj] = C[vj]
      }
    }
  }
}
)";
  Schedule s(parse_text(src));
  try {
    s.compute_at("p", "j");
    FAIL("expected DependencyViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == "DependencyViolation");
  }
}

TEST_CASE("compute_at rejects a producer whose consumers stay outside the loop") {
  // C feeds both relu and a second epilogue outside the relu loops; the
  // producer cannot be pulled under either consumer
  const char* src = R"(func m(A: f32[8, 8], B: f32[8, 8], D: f32[8, 8], E: f32[8, 8]) {
  block root() {
    alloc C: f32[8, 8]
    for i in 0..8 {
      for j in 0..8 {
        for k in 0..8 {
          block gemm(spatial vi: 8 = i, spatial vj: 8 = j, reduce vk: 8 = k) reads(A[vi +: 1, vk +: 1], B[vk +: 1, vj +: 1]) writes(C[vi +: 1, vj +: 1]) {
            init {
              C[vi, vj] = 0.0
            }
            C[vi, vj] = C[vi, vj] + A[vi, vk]*B[vk, vj]
          }
        }
      }
    }
    for i2 in 0..8 {
      for j2 in 0..8 {
        block relu(spatial wi: 8 = i2, spatial wj: 8 = j2) reads(C[wi +: 1, wj +: 1]) writes(D[wi +: 1, wj +: 1]) {
          D[wi, wj] = max(C[wi, wj], 0.0)
        }
      }
    }
    for i3 in 0..8 {
      for j3 in 0..8 {
        block scale(spatial xi: 8 = i3, spatial xj: 8 = j3) reads(C[xi +: 1, xj +: 1]) writes(E[xi +: 1, xj +: 1]) {
          E[xi, xj] = C[xi, xj]*2.0
        }
      }
    }
  }
}
)";
  Schedule s(parse_text(src));
  try {
    s.compute_at("gemm", "i2");
    FAIL("expected DependencyViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == "DependencyViolation");
  }
}

TEST_CASE("blockize isolates an inner tile") {
  Schedule s(parse_text(matmul_source(8)));
  auto io = s.split("i", {2, 4});
  auto jo = s.split("j", {2, 4});
  auto ko = s.split("k", {2, 4});
  s.reorder({io[0], jo[0], ko[0], io[1], jo[1], ko[1]});
  std::string outer = s.blockize(io[1]);
  Stmt o = s.find_block_realize(outer);
  REQUIRE(o);
  CHECK(o->block->iter_vars.size() == 3);
  int64_t e0, e1, e2;
  as_const_int(o->block->iter_vars[0].domain.extent, &e0);
  as_const_int(o->block->iter_vars[1].domain.extent, &e1);
  as_const_int(o->block->iter_vars[2].domain.extent, &e2);
  CHECK(e0 == 2);
  CHECK(e1 == 2);
  CHECK(e2 == 2);
  // the inner block keeps the 4x4x4 computation
  Stmt inner = s.find_block_realize("gemm");
  REQUIRE(inner);
  int64_t i0;
  as_const_int(inner->block->iter_vars[0].domain.extent, &i0);
  CHECK(i0 == 4);
  // the outer block now carries the init
  CHECK(o->block->init != nullptr);
  CHECK(inner->block->init == nullptr);
  // signatures: outer block writes the 4x4 tile of C
  REQUIRE(o->block->writes.size() == 1);
  CHECK(print_region(o->block->writes[0]).find("+: 4") != std::string::npos);
  check_interp_equal(parse_text(matmul_source(8)), s.func(), 110);
}

TEST_CASE("blockize of the whole nest wraps the computation") {
  PrimFuncPtr before = parse_text(matmul_source(4));
  Schedule s(before);
  std::string outer = s.blockize("i");
  Stmt o = s.find_block_realize(outer);
  REQUIRE(o);
  // outer iters all extent 1
  for (const auto& iv : o->block->iter_vars) {
    int64_t e;
    as_const_int(iv.domain.extent, &e);
    CHECK(e == 1);
  }
  check_interp_equal(before, s.func(), 111);
}

TEST_CASE("blockize rejects non-separable bindings") {
  // binding i*2 + j with j in [0,4): the outer coefficient 2 does not align
  // with the inner range 4
  const char* src = R"(func f(A: f32[20]) {
  block root() {
    for i in 0..8 {
      for j in 0..4 {
        block w(spatial v: 20 = i*2 + j) writes(A[v +: 1]) {
          A[v] = 1.0
        }
      }
    }
  }
}
)";
  Schedule s(parse_text(src));
  try {
    s.blockize("j");
    FAIL("expected NotSeparable");
  } catch (const Error& e) {
    CHECK(e.kind() == "NotSeparable");
  }
}

TEST_CASE("decompose_reduction splits init out and recompose restores it") {
  PrimFuncPtr before = parse_text(matmul_source(8, "i32"));
  Schedule s(before);
  std::string init_block = s.decompose_reduction("gemm", "k");
  Stmt ib = s.find_block_realize(init_block);
  REQUIRE(ib);
  CHECK(ib->block->iter_vars.size() == 2);  // spatial only
  CHECK(s.find_block_realize("gemm")->block->init == nullptr);
  // bitwise equality on i32
  check_interp_equal(before, s.func(), 112);

  s.recompose_reduction("gemm");
  CHECK(structural_equal(*before, *s.func()));
}

TEST_CASE("decompose_reduction rejects positions under a reduction loop") {
  Schedule s(parse_text(matmul_source(8)));
  auto ko = s.split("k", {2, 4});
  try {
    s.decompose_reduction("gemm", ko[1]);
    FAIL("expected BadPosition");
  } catch (const Error& e) {
    CHECK(e.kind() == "BadPosition");
  }
  Schedule s2(parse_text(matmul_source(8)));
  try {
    s2.decompose_reduction("relu", "k");
  } catch (const Error& e) {
    CHECK(e.kind() == "StaleHandle");
  }
  Schedule s3(parse_text(gemm_relu_source(8)));
  try {
    s3.decompose_reduction("relu", "i2");
    FAIL("expected NoInit");
  } catch (const Error& e) {
    CHECK(e.kind() == "NoInit");
  }
}

TEST_CASE("bind and annotate") {
  Schedule s(parse_text(matmul_source(8)));
  s.bind("i", "blockIdx.x");
  CHECK(s.find_loop("i")->for_kind == ForKind::ThreadBound);
  CHECK(s.find_loop("i")->thread_tag == "blockIdx.x");

  try {
    s.bind("j", "warpIdx.q");
    FAIL("expected UnknownTag");
  } catch (const Error& e) {
    CHECK(e.kind() == "UnknownTag");
  }

  s.annotate("j", "parallel");
  CHECK(s.find_loop("j")->for_kind == ForKind::Parallel);
  try {
    s.annotate("k", "parallel");
    FAIL("expected ReductionParallelizationError");
  } catch (const Error& e) {
    CHECK(e.kind() == "ReductionParallelizationError");
  }
  // binding stays interpreter-equal
  check_interp_equal(parse_text(matmul_source(8)), s.func(), 113);
}

TEST_CASE("conflicting thread extents in one kernel scope are rejected at bind") {
  const char* src = R"(func f(A: f32[8, 4]) {
  block root() {
    for i in 0..8 {
      for j in 0..4 {
        block w(spatial vi: 8 = i, spatial vj: 4 = j) writes(A[vi +: 1, vj +: 1]) {
          A[vi, vj] = 1.0
        }
      }
    }
  }
}
)";
  Schedule s(parse_text(src));
  s.bind("i", "threadIdx.x");
  try {
    s.bind("j", "threadIdx.x");
    FAIL("expected ConflictingBind");
  } catch (const Error& e) {
    CHECK(e.kind() == "ConflictingBind");
  }
}

TEST_CASE("transform_layout rewrites an intermediate buffer") {
  const char* src = R"(func f(A: f32[4, 6], D: f32[4, 6]) {
  block root() {
    alloc T: f32[4, 6]
    for i in 0..4 {
      for j in 0..6 {
        block stage(spatial vi: 4 = i, spatial vj: 6 = j) reads(A[vi +: 1, vj +: 1]) writes(T[vi +: 1, vj +: 1]) {
          T[vi, vj] = A[vi, vj]
        }
      }
    }
    for i2 in 0..4 {
      for j2 in 0..6 {
        block use(spatial wi: 4 = i2, spatial wj: 6 = j2) reads(T[wi +: 1, wj +: 1]) writes(D[wi +: 1, wj +: 1]) {
          D[wi, wj] = T[wi, wj]
        }
      }
    }
  }
}
)";
  PrimFuncPtr before = parse_text(src);
  Schedule s(before);
  s.transform_layout("T", IndexMap::parse("(a, b) -> (a*6 + b)"));
  // the alloc is now one-dimensional
  bool found = false;
  pre_order_stmts(s.func()->body, [&](const Stmt& st) {
    if (st->kind == StmtKind::BlockRealize) {
      for (const auto& ab : st->block->alloc_buffers) {
        if (ab->name == "T") {
          found = true;
          CHECK(ab->shape == std::vector<int64_t>{24});
        }
      }
    }
    return true;
  });
  CHECK(found);
  check_interp_equal(before, s.func(), 114);

  // identity map is a structural no-op
  Schedule s2(before);
  s2.transform_layout("T", IndexMap::parse("(a, b) -> (a, b)"));
  CHECK(structural_equal(*before, *s2.func()));

  // dropping a dimension is not bijective
  Schedule s3(before);
  try {
    s3.transform_layout("T", IndexMap::parse("(a, b) -> (a)"));
    FAIL("expected NotBijective");
  } catch (const Error& e) {
    CHECK(e.kind() == "NotBijective");
  }
}

TEST_CASE("trace replay reproduces the schedule") {
  PrimFuncPtr base = parse_text(matmul_source(16));
  Schedule s(base);
  auto io = s.split("i", {4, 4});
  s.fuse(io[0], io[1]);
  s.split("k", {-1, 8});
  s.cache_read("gemm", 0, "shared");
  s.annotate("j", "unroll");

  Schedule r = replay(s.trace(), base);
  CHECK(structural_equal(*s.func(), *r.func()));
  CHECK(trace_to_jsonl(r.trace()) == trace_to_jsonl(s.trace()));

  // serialization round-trip
  auto parsed = trace_from_jsonl(trace_to_jsonl(s.trace()));
  Schedule r2 = replay(parsed, base);
  CHECK(structural_equal(*s.func(), *r2.func()));

  // empty trace wraps the function unchanged
  Schedule e = replay({}, base);
  CHECK(structural_equal(*base, *e.func()));

  // a stale handle in a trace is reported
  std::vector<TraceStep> broken = parsed;
  broken.push_back(TraceStep{"split", {{"loop", "i"}, {"factors", {4, 4}}}, {}});
  try {
    replay(broken, base);
    FAIL("expected StaleHandle");
  } catch (const Error& e2) {
    CHECK(e2.kind() == "StaleHandle");
  }
}

TEST_CASE("200 random traces preserve semantics and replay deterministically") {
  struct Workload {
    std::string name;
    std::string source;
  };
  std::vector<Workload> workloads = {
      {"matmul", matmul_source(16)},
      {"conv2d", conv2d_source(6, 6, 4, 3, 3, 4)},
      {"gemm_relu", gemm_relu_source(8)},
  };
  int traces_per_workload = 67;
  Rng rng(2718);
  for (const auto& w : workloads) {
    PrimFuncPtr base = parse_text(w.source);
    auto ins = input_params(*base);
    std::vector<TensorValue> inputs;
    for (size_t i = 0; i < ins.size(); ++i) {
      inputs.push_back(random_tensor(ins[i]->dtype, ins[i]->shape, 500 + i));
    }
    ExecContext c0;
    auto expected = run(*base, inputs, c0);

    for (int t = 0; t < traces_per_workload; ++t) {
      Schedule s = random_schedule(base, rng, 5, 24);
      INFO(w.name << " trace " << t << ":\n" << trace_to_jsonl(s.trace()));
      ExecContext c1;
      auto got = run(*s.func(), inputs, c1);
      REQUIRE(got.size() == expected.size());
      for (size_t i = 0; i < got.size(); ++i) {
        if (dtype_is_float(got[i].dtype)) {
          CHECK(tensors_close(got[i], expected[i]));
        } else {
          CHECK(tensors_bitwise_equal(got[i], expected[i]));
        }
      }
      // apply-then-replay structural equality
      Schedule r = replay(s.trace(), base);
      CHECK(structural_equal(*s.func(), *r.func()));
    }
  }
}

TEST_CASE("signatures stay consistent with recomputed regions after scheduling") {
  Rng rng(3100);
  PrimFuncPtr base = parse_text(matmul_source(16));
  for (int t = 0; t < 20; ++t) {
    Schedule s = random_schedule(base, rng, 4, 16);
    pre_order_stmts(s.func()->body, [&](const Stmt& st) {
      if (st->kind != StmtKind::BlockRealize || st->block->iter_vars.empty()) return true;
      AccessInfo info = compute_access_regions(*st->block);
      // every recomputed region must be covered by the stored signature
      BoundsMap bounds;
      for (const auto& iv : st->block->iter_vars) bounds[iv.var->name] = iv.domain;
      for (const auto& r : info.writes) {
        for (const auto& sig : st->block->writes) {
          if (sig.buffer->name != r.buffer->name) continue;
          INFO("block " << st->block->name << " buffer " << r.buffer->name);
          CHECK(region_cover(sig, r, bounds));
        }
      }
      return true;
    });
  }
}
