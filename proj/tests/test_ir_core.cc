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

#include "testing/rand_ir.h"
#include "tir/simplify.h"
#include "tir/structural.h"
#include "tir/subst.h"
#include "tir/text.h"

using namespace tir;

namespace {

const char* kMatmulSource = R"(func matmul(A: f32[64, 64], B: f32[64, 64], C: f32[64, 64]) {
  block root() {
    for i in 0..64 {
      for j in 0..64 {
        for k in 0..64 {
          block gemm(spatial vi: 64 = i, spatial vj: 64 = j, reduce vk: 64 = k) reads(A[vi +: 1, vk +: 1], B[vk +: 1, vj +: 1]) writes(C[vi +: 1, vj +: 1]) {
            init {
              C[vi, vj] = 0.0
            }
            C[vi, vj] = C[vi, vj] + A[vi, vk]*B[vk, vj]
          }
        }
      }
    }
  }
}
)";

}  // namespace

TEST_CASE("parse matmul and round-trip byte-identically") {
  PrimFuncPtr f = parse_text(kMatmulSource);
  CHECK(f->name == "matmul");
  CHECK(f->params.size() == 3);

  // one block besides the root, three iterators
  int blocks = 0;
  pre_order_stmts(f->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize && s->block->name == "gemm") {
      ++blocks;
      CHECK(s->block->iter_vars.size() == 3);
      CHECK(s->block->iter_vars[2].kind == IterKind::Reduction);
    }
    return true;
  });
  CHECK(blocks == 1);

  std::string text = print_text(f);
  PrimFuncPtr g = parse_text(text);
  CHECK(structural_equal(*f, *g));
  CHECK(print_text(g) == text);
}

TEST_CASE("degenerate loop extent is rejected") {
  const char* src = R"(func f(A: i32[4]) {
  block root() {
    for i in 0..0 {
      A[0] = 1
    }
  }
}
)";
  CHECK_THROWS_WITH_AS(parse_text(src), doctest::Contains("extent must be positive"), Error);
}

TEST_CASE("binding arity mismatch raises ArityError") {
  auto blk = std::make_shared<Block>();
  blk->name = "b";
  blk->iter_vars = {IterVar{make_var("v0"), const_range(0, 4), IterKind::DataParallel},
                    IterVar{make_var("v1"), const_range(0, 4), IterKind::DataParallel}};
  blk->body = make_seq({});
  std::vector<Expr> three = {make_int(0), make_int(1), make_int(2)};
  try {
    make_block_realize(three, nullptr, blk);
    FAIL("expected ArityError");
  } catch (const Error& e) {
    CHECK(e.kind() == "ArityError");
  }
}

TEST_CASE("init clause prints before the body") {
  PrimFuncPtr f = parse_text(kMatmulSource);
  std::string text = print_text(f);
  auto init_pos = text.find("init {");
  auto body_pos = text.find("C[vi, vj] = C[vi, vj] + A[vi, vk]*B[vk, vj]");
  REQUIRE(init_pos != std::string::npos);
  REQUIRE(body_pos != std::string::npos);
  CHECK(init_pos < body_pos);
}

TEST_CASE("empty root block prints params and empty braces") {
  const char* src = R"(func empty(A: f32[4]) {
  block root() {
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  CHECK(print_text(f) == src);
}

TEST_CASE("structural equality distinguishes reordered loops") {
  PrimFuncPtr f = parse_text(kMatmulSource);
  std::string swapped = kMatmulSource;
  // exchange the j and k loops textually
  size_t pj = swapped.find("for j in");
  size_t pk = swapped.find("for k in");
  REQUIRE(pj != std::string::npos);
  REQUIRE(pk != std::string::npos);
  swapped[pj + 4] = 'k';
  swapped[pk + 4] = 'j';
  PrimFuncPtr g = parse_text(swapped);
  CHECK_FALSE(structural_equal(*f, *g));
  CHECK_FALSE(structural_equal(*f, *g, /*remap_vars=*/true));
}

TEST_CASE("alpha equivalence under remap_vars") {
  std::string renamed = kMatmulSource;
  auto replace_all = [&](const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = renamed.find(from, pos)) != std::string::npos) {
      renamed.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("vi", "x");
  replace_all("vj", "y");
  replace_all("vk", "z");
  PrimFuncPtr f = parse_text(kMatmulSource);
  PrimFuncPtr g = parse_text(renamed);
  CHECK_FALSE(structural_equal(*f, *g));
  CHECK(structural_equal(*f, *g, /*remap_vars=*/true));
}

TEST_CASE("simplify: divide out a split binding") {
  // (i*4 + j) / 4 with j in [0,4)  ->  i
  Expr e = floordiv(add(mul(make_var("i"), make_int(4)), make_var("j")), make_int(4));
  BoundsMap bounds{{"j", const_range(0, 4)}, {"i", const_range(0, 16)}};
  Expr s = simplify(e, bounds);
  CHECK(print_expr(s) == "i");
}

TEST_CASE("simplify: constants and idempotent min") {
  CHECK(print_expr(simplify(add(make_int(3), make_int(5)))) == "8");
  Expr i = make_var("i");
  CHECK(print_expr(simplify(make_binary(ExprKind::Min, i, i))) == "i");
}

TEST_CASE("simplify: affine normalization is canonical") {
  Expr i = make_var("i"), j = make_var("j");
  Expr a = add(add(mul(i, make_int(3)), j), mul(i, make_int(1)));
  CHECK(print_expr(simplify(a)) == "i*4 + j");
  Expr b = sub(j, j);
  CHECK(print_expr(simplify(b)) == "0");
}

TEST_CASE("substitute basics") {
  Expr e = add(mul(make_var("vy"), make_int(4)), make_int(1));
  Expr r = simplify(substitute(e, {{"vy", make_int(2)}}));
  CHECK(print_expr(r) == "9");

  CHECK(structural_equal(substitute(e, VarMap{}), e));
}

TEST_CASE("substitute does not rewrite shadowed block iterators") {
  // the block redefines iterator 'i'; substitution for outer 'i' must not
  // touch the inner uses
  BufferPtr a = make_buffer("A", DType::I32, {16});
  auto blk = std::make_shared<Block>();
  blk->name = "b";
  blk->iter_vars = {IterVar{make_var("i"), const_range(0, 4), IterKind::DataParallel}};
  blk->writes = {BufferRegion{a, {Range{make_var("i"), make_int(1)}}}};
  blk->body = make_store(a, {make_var("i")}, make_int(7));
  // binding references the *outer* i
  Stmt realize = make_block_realize({make_var("i")}, nullptr, blk);

  Stmt subbed = substitute(realize, {{"i", make_int(3)}});
  CHECK(print_expr(subbed->bindings[0]) == "3");
  CHECK(print_expr(subbed->block->body->indices[0]) == "i");
}

TEST_CASE("parse/print round-trip on 500 fuzzed programs") {
  testing::Rng rng(2024);
  for (int t = 0; t < 500; ++t) {
    PrimFuncPtr f = testing::rand_program(rng, t);
    std::string text = print_text(f);
    PrimFuncPtr g;
    try {
      g = parse_text(text);
    } catch (const Error& e) {
      INFO("program:\n" << text);
      FAIL("parse failure: " << e.what());
    }
    INFO("program:\n" << text);
    CHECK(structural_equal(*f, *g));
    CHECK(print_text(g) == text);
  }
}

TEST_CASE("simplify is idempotent and value-preserving on random expressions") {
  testing::Rng rng(7);
  std::vector<std::string> vars = {"a", "b", "c"};
  BoundsMap bounds{{"a", const_range(0, 8)}, {"b", const_range(0, 5)}, {"c", const_range(2, 3)}};
  int checked_envs = 0;
  for (int t = 0; t < 1000; ++t) {
    Expr e = testing::rand_int_expr(rng, vars, 4);
    Expr s1 = simplify(e, bounds);
    Expr s2 = simplify(s1, bounds);
    INFO("expr: " << print_expr(e) << "\n s1: " << print_expr(s1) << "\n s2: " << print_expr(s2));
    CHECK(structural_equal(s1, s2));
    for (int k = 0; k < 100; ++k) {
      std::map<std::string, int64_t> env{{"a", testing::rand_in(rng, 0, 7)},
                                         {"b", testing::rand_in(rng, 0, 4)},
                                         {"c", testing::rand_in(rng, 2, 4)}};
      int64_t v0 = testing::eval_int(e, env);
      int64_t v1 = testing::eval_int(s1, env);
      INFO("env a=" << env["a"] << " b=" << env["b"] << " c=" << env["c"]);
      CHECK(v0 == v1);
      ++checked_envs;
    }
  }
  CHECK(checked_envs == 100000);
}

TEST_CASE("well-formedness rejects free variables and duplicate names") {
  const char* free_var = R"(func f(A: i32[4]) {
  block root() {
    A[q] = 0
  }
}
)";
  CHECK_THROWS_AS(parse_text(free_var), Error);

  const char* dup_loop = R"(func f(A: i32[4]) {
  block root() {
    for i in 0..4 {
      for i in 0..4 {
        A[i] = 0
      }
    }
  }
}
)";
  CHECK_THROWS_AS(parse_text(dup_loop), Error);
}

TEST_CASE("loop min is normalized to zero at parse time") {
  const char* src = R"(func f(A: i32[8]) {
  block root() {
    for i in 2..8 {
      A[i] = i
    }
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  std::string text = print_text(f);
  CHECK(text.find("for i in 0..6") != std::string::npos);
  CHECK(text.find("A[i + 2] = i + 2") != std::string::npos);
}

TEST_CASE("predicates and annotations round-trip") {
  const char* src = R"(func f(A: i32[8]) {
  block root() {
    for i in 0..8 {
      block b(spatial v: 7 = i) writes(A[v +: 1]) attrs("note" = "x") if i < 7 {
        A[v] = v
      }
    }
  }
}
)";
  PrimFuncPtr f = parse_text(src);
  std::string text = print_text(f);
  CHECK(parse_text(text));
  CHECK(text.find("attrs(\"note\" = \"x\")") != std::string::npos);
  CHECK(text.find("if i < 7") != std::string::npos);
}
