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
#ifndef TESTS_TESTING_SCHED_FUZZ_H_
#define TESTS_TESTING_SCHED_FUZZ_H_

#include <string>
#include <vector>

#include "testing/rand_ir.h"
#include "tir/schedule.h"

namespace tir::testing {

inline std::vector<std::string> all_loops(const PrimFuncPtr& f) {
  std::vector<std::string> out;
  pre_order_stmts(f->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::For) out.push_back(s->loop_var->name);
    return true;
  });
  return out;
}

inline std::vector<std::string> all_blocks(const PrimFuncPtr& f, bool with_iters_only = true) {
  std::vector<std::string> out;
  pre_order_stmts(f->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize &&
        (!with_iters_only || !s->block->iter_vars.empty())) {
      out.push_back(s->block->name);
    }
    return true;
  });
  return out;
}

inline std::vector<int64_t> divisors(int64_t n) {
  std::vector<int64_t> out;
  for (int64_t d = 2; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

// Applies one randomly chosen primitive with randomly chosen (plausible)
// arguments. Returns true if a primitive was applied; illegal picks are
// rejected by the primitives themselves and count as no-ops.
inline bool apply_random_primitive(Schedule& s, Rng& rng) {
  auto loops = all_loops(s.func());
  auto blocks = all_blocks(s.func());
  if (loops.empty()) return false;
  auto pick = [&](const std::vector<std::string>& v) { return v[rand_in(rng, 0, v.size() - 1)]; };
  try {
    switch (rand_in(rng, 0, 9)) {
      case 0: {  // split by a divisor (or an inferred pair)
        std::string l = pick(loops);
        int64_t ext = s.loop_extent(l);
        if (ext < 4) return false;
        auto divs = divisors(ext);
        if (divs.empty()) return false;
        int64_t d = divs[rand_in(rng, 0, divs.size() - 1)];
        if (rand_in(rng, 0, 3) == 0) {
          s.split(l, {-1, d});
        } else {
          s.split(l, {ext / d, d});
        }
        return true;
      }
      case 1: {  // imperfect split (inserts a predicate)
        std::string l = pick(loops);
        int64_t ext = s.loop_extent(l);
        if (ext < 5) return false;
        int64_t d = rand_in(rng, 2, 4);
        if (ext % d == 0) return false;
        s.split(l, {-1, d});
        return true;
      }
      case 2: {  // fuse adjacent loops
        std::string outer = pick(loops);
        Stmt o = s.find_loop(outer);
        if (!o || !o->body || o->body->kind != StmtKind::For) return false;
        s.fuse(outer, o->body->loop_var->name);
        return true;
      }
      case 3: {  // reorder a chain segment
        std::string outer = pick(loops);
        Stmt o = s.find_loop(outer);
        if (!o || !o->body || o->body->kind != StmtKind::For) return false;
        s.reorder({o->body->loop_var->name, outer});
        return true;
      }
      case 4: {  // cache a read operand
        if (blocks.empty()) return false;
        std::string b = pick(blocks);
        Stmt r = s.find_block_realize(b);
        if (!r || r->block->reads.empty() || r->block->annotations.count("tensorized")) {
          return false;
        }
        int idx = static_cast<int>(rand_in(rng, 0, r->block->reads.size() - 1));
        s.cache_read(b, idx, rand_in(rng, 0, 1) ? "shared" : "local");
        return true;
      }
      case 5: {  // cache the write operand
        if (blocks.empty()) return false;
        std::string b = pick(blocks);
        Stmt r = s.find_block_realize(b);
        if (!r || r->block->writes.size() != 1 || r->block->annotations.count("tensorized")) {
          return false;
        }
        s.cache_write(b, "local");
        return true;
      }
      case 6: {  // decompose a reduction at one of its loops
        for (const auto& b : blocks) {
          Stmt r = s.find_block_realize(b);
          if (r && r->block->init) {
            auto chain = s.loops_of(b);
            if (chain.empty()) return false;
            s.decompose_reduction(b, chain[rand_in(rng, 0, chain.size() - 1)]);
            return true;
          }
        }
        return false;
      }
      case 7: {  // recompose a previously decomposed reduction
        for (const auto& b : all_blocks(s.func())) {
          Stmt r = s.find_block_realize(b);
          if (r && r->block->annotations.count("decomposed_init_of")) {
            s.recompose_reduction(r->block->annotations.at("decomposed_init_of"));
            return true;
          }
        }
        return false;
      }
      case 8: {  // annotate a loop
        std::string l = pick(loops);
        const char* kinds[] = {"vectorize", "unroll", "parallel"};
        s.annotate(l, kinds[rand_in(rng, 0, 2)]);
        return true;
      }
      default: {  // compute_inline a copy-like block
        for (const auto& b : blocks) {
          if (rand_in(rng, 0, 1)) continue;
          Stmt r = s.find_block_realize(b);
          if (!r || r->block->init) continue;
          s.compute_inline(b);
          return true;
        }
        return false;
      }
    }
  } catch (const Error&) {
    return false;  // the primitive rejected the pick
  }
}

// Builds a random trace of `target` applied primitives (with a bounded number
// of attempts) on top of f.
inline Schedule random_schedule(PrimFuncPtr f, Rng& rng, int target, int max_attempts = 64) {
  Schedule s(std::move(f));
  int applied = 0;
  for (int i = 0; i < max_attempts && applied < target; ++i) {
    if (apply_random_primitive(s, rng)) ++applied;
  }
  return s;
}

}  // namespace tir::testing

#endif  // TESTS_TESTING_SCHED_FUZZ_H_
