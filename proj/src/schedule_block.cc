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
#include <algorithm>

#include "schedule_internal.h"
#include "tir/structural.h"
#include "tir/subst.h"
#include "tir/text.h"

namespace tir {

using namespace sched;

namespace {

bool valid_scope(const std::string& scope) {
  return scope == "global" || scope == "shared" || scope == "local" || scope == "wmma-like" ||
         scope.rfind("custom:", 0) == 0;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ':' || c == '-' || c == '.') c = '_';
  }
  return s;
}

Stmt single_store_body(const BlockPtr& b) {
  Stmt body = b->body;
  if (body->kind == StmtKind::Seq && body->stmts.size() == 1) body = body->stmts[0];
  if (body->kind != StmtKind::BufferStore) return nullptr;
  return body;
}

// splits an And tree into conjuncts
void split_conjuncts(const Expr& e, std::vector<Expr>* out) {
  if (e->kind == ExprKind::And) {
    split_conjuncts(e->args[0], out);
    split_conjuncts(e->args[1], out);
  } else if (!is_true(e)) {
    out->push_back(e);
  }
}

Expr join_conjuncts(const std::vector<Expr>& cs) {
  Expr r;
  for (const auto& c : cs) r = r ? land(r, c) : c;
  return r ? r : make_bool(true);
}

}  // namespace

/******** compute_inline ********/

void Schedule::compute_inline(const std::string& block) {
  Located loc = locate_block(func_, block);
  BlockPtr B = loc.node->block;
  if (B->init) throw_error("NotInlineable", "cannot inline a reduction block");
  for (const auto& iv : B->iter_vars) {
    if (iv.kind == IterKind::Reduction) {
      throw_error("NotInlineable", "cannot inline a block with reduction iterators");
    }
  }
  Stmt store = single_store_body(B);
  if (!store) throw_error("NotInlineable", "block body is not a single store");
  BufferPtr target = store->buffer;

  // the buffer must be an intermediate allocation, not a function output
  bool is_alloc = false;
  for (const auto& a : loc.ancestors) {
    if (a->kind != StmtKind::BlockRealize) continue;
    for (const auto& ab : a->block->alloc_buffers) is_alloc |= ab->name == target->name;
  }
  if (!is_alloc) {
    throw_error("NotInlineable", "buffer '" + target->name + "' is not an intermediate");
  }

  // store indices must be the block iterators, each exactly once
  std::vector<std::string> idx_iters;
  std::set<std::string> seen;
  for (const auto& i : store->indices) {
    if (i->kind != ExprKind::Var || !seen.insert(i->name).second) {
      throw_error("NotInlineable", "store indices must be distinct block iterators");
    }
    bool is_iter = false;
    for (const auto& iv : B->iter_vars) is_iter |= iv.var->name == i->name;
    if (!is_iter) throw_error("NotInlineable", "store index is not a block iterator");
    idx_iters.push_back(i->name);
  }
  Expr value = store->value;
  bool self_ref = false;
  post_order_exprs(value, [&](const Expr& e) {
    if (e->kind == ExprKind::BufferLoad && e->buffer->name == target->name) self_ref = true;
  });
  if (self_ref) throw_error("NotInlineable", "block reads its own output");

  // opaque consumers cannot absorb the expression
  pre_order_stmts(func_->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize && is_tensorized(*s->block)) {
      for (const auto& r : s->block->reads) {
        if (r.buffer->name == target->name) {
          throw_error("NotInlineable",
                      "buffer '" + target->name + "' feeds the opaque block '" + s->block->name +
                          "'");
        }
      }
    }
    return true;
  });

  // remove the block (and its private loop nest)
  auto priv = private_loops(loc);
  Stmt removal_root = priv.empty() ? loc.node : priv.front();
  PrimFuncPtr nf = replace_node(func_, removal_root, nullptr);

  // substitute loads and drop the allocation
  std::function<Expr(const Expr&)> rewrite_expr = [&](const Expr& e) -> Expr {
    if (!e) return e;
    std::vector<Expr> args;
    args.reserve(e->args.size());
    bool changed = false;
    for (const auto& a : e->args) {
      Expr na = rewrite_expr(a);
      changed |= na != a;
      args.push_back(na);
    }
    if (e->kind == ExprKind::BufferLoad && e->buffer->name == target->name) {
      VarMap m;
      for (size_t i = 0; i < idx_iters.size(); ++i) m[idx_iters[i]] = args[i];
      return substitute(value, m);
    }
    if (!changed) return e;
    auto n = std::make_shared<ExprNode>(*e);
    n->args = std::move(args);
    return n;
  };

  std::function<Stmt(const Stmt&, BoundsMap&)> rewrite_stmt = [&](const Stmt& s,
                                                                  BoundsMap& bounds) -> Stmt {
    if (!s) return s;
    switch (s->kind) {
      case StmtKind::For: {
        auto n = std::make_shared<StmtNode>(*s);
        bounds[s->loop_var->name] = Range{make_int(0), s->extent};
        n->body = rewrite_stmt(s->body, bounds);
        bounds.erase(s->loop_var->name);
        return n;
      }
      case StmtKind::BlockRealize: {
        auto blk = std::make_shared<Block>(*s->block);
        for (const auto& iv : blk->iter_vars) bounds[iv.var->name] = iv.domain;
        bool touched = false;
        for (const auto& r : blk->reads) touched |= r.buffer->name == target->name;
        blk->alloc_buffers.erase(
            std::remove_if(blk->alloc_buffers.begin(), blk->alloc_buffers.end(),
                           [&](const BufferPtr& b) { return b->name == target->name; }),
            blk->alloc_buffers.end());
        blk->init = rewrite_stmt(s->block->init, bounds);
        blk->body = rewrite_stmt(s->block->body, bounds);
        for (const auto& iv : blk->iter_vars) bounds.erase(iv.var->name);
        auto n = std::make_shared<StmtNode>(*s);
        if (touched) {
          n->block = with_recomputed_regions(blk, bounds);
        } else {
          n->block = blk;
        }
        return n;
      }
      case StmtKind::BufferStore: {
        auto n = std::make_shared<StmtNode>(*s);
        for (auto& i : n->indices) i = rewrite_expr(i);
        n->value = rewrite_expr(s->value);
        return n;
      }
      case StmtKind::Seq: {
        auto n = std::make_shared<StmtNode>(*s);
        for (auto& c : n->stmts) c = rewrite_stmt(c, bounds);
        return n;
      }
      case StmtKind::Evaluate: {
        auto n = std::make_shared<StmtNode>(*s);
        n->expr = rewrite_expr(s->expr);
        return n;
      }
    }
    return s;
  };

  BoundsMap bounds;
  auto body = rewrite_stmt(nf->body, bounds);
  auto out = std::make_shared<PrimFunc>(*nf);
  out->body = body;
  commit_rewrite(out, TraceStep{"compute_inline", {{"block", block}}, {}});
}

/******** cache_read / cache_write ********/

namespace {

struct CopyBlockParts {
  Stmt nest;          // loop nest realizing the copy block
  std::string block_name;
};

// builds: for ax0.. { block name(v0..) reads(src[...]) writes(dst[...]) { dst[v..] = src[v..] } }
CopyBlockParts make_copy_block(std::set<std::string>& used, const BufferPtr& src,
                               const BufferPtr& dst, const std::string& block_base) {
  CopyBlockParts parts;
  parts.block_name = fresh_name(used, block_base);
  used.insert(parts.block_name);
  auto blk = std::make_shared<Block>();
  blk->name = parts.block_name;
  std::vector<Expr> loop_vars, iter_vars, bindings;
  for (size_t d = 0; d < src->shape.size(); ++d) {
    std::string lv = fresh_name(used, "ax" + std::to_string(d));
    used.insert(lv);
    std::string iv = fresh_name(used, "v" + std::to_string(d));
    used.insert(iv);
    loop_vars.push_back(make_var(lv));
    iter_vars.push_back(make_var(iv));
    bindings.push_back(loop_vars.back());
    blk->iter_vars.push_back(
        IterVar{iter_vars.back(), const_range(0, src->shape[d]), IterKind::DataParallel});
  }
  std::vector<Range> unit;
  for (const auto& iv : iter_vars) unit.push_back(Range{iv, make_int(1)});
  blk->reads = {BufferRegion{src, unit}};
  blk->writes = {BufferRegion{dst, unit}};
  blk->body = make_store(dst, iter_vars, make_load(src, iter_vars));
  Stmt nest = make_block_realize(bindings, nullptr, blk);
  for (int d = static_cast<int>(loop_vars.size()) - 1; d >= 0; --d) {
    nest = make_for(loop_vars[d], make_int(src->shape[d]), nest);
  }
  parts.nest = nest;
  return parts;
}

// inserts `stmt` into the scope block's body at top-level position `index`
PrimFuncPtr insert_in_scope(const PrimFuncPtr& f, const Stmt& scope_realize, const Stmt& stmt,
                            int index, const BufferPtr& new_alloc) {
  auto blk = std::make_shared<Block>(*scope_realize->block);
  if (new_alloc) blk->alloc_buffers.push_back(new_alloc);
  std::vector<Stmt> stmts;
  if (blk->body->kind == StmtKind::Seq) {
    stmts = blk->body->stmts;
  } else {
    stmts = {blk->body};
  }
  if (index < 0) index = 0;
  if (index > static_cast<int>(stmts.size())) index = static_cast<int>(stmts.size());
  stmts.insert(stmts.begin() + index, stmt);
  auto seq = std::make_shared<StmtNode>();
  seq->kind = StmtKind::Seq;
  seq->stmts = std::move(stmts);
  blk->body = seq;
  auto n = std::make_shared<StmtNode>(*scope_realize);
  n->block = blk;
  return replace_node(f, scope_realize, n);
}

std::vector<Stmt> scope_stmts(const Stmt& scope_realize) {
  if (scope_realize->block->body->kind == StmtKind::Seq) return scope_realize->block->body->stmts;
  return {scope_realize->block->body};
}

}  // namespace

std::string Schedule::cache_read(const std::string& block, int operand_index,
                                 const std::string& scope) {
  if (!valid_scope(scope)) throw_error("UnknownScope", "unknown memory scope '" + scope + "'");
  Located loc = locate_block(func_, block);
  BlockPtr B = loc.node->block;
  if (operand_index < 0 || operand_index >= static_cast<int>(B->reads.size())) {
    throw_error("BadOperand", "block '" + block + "' has no read operand " +
                                  std::to_string(operand_index));
  }
  BufferPtr X = B->reads[operand_index].buffer;
  for (const auto& w : B->writes) {
    if (w.buffer->name == X->name) {
      throw_error("BadOperand", "operand '" + X->name + "' is also written by the block");
    }
  }
  Stmt scope_realize = loc.scope_realize();
  if (!scope_realize) throw_error("NotSchedulable", "block has no enclosing scope");

  // a writer of the operand interleaved in the consumer's own nest would make
  // a stage copied in front of the nest stale
  {
    auto stmts = scope_stmts(scope_realize);
    int own = seq_index_containing(stmts, loc.node);
    if (own >= 0) {
      for (const auto& r : collect_realizes(stmts[own])) {
        if (r == loc.node) continue;
        for (const auto& wr : r->block->writes) {
          if (wr.buffer->name == X->name) {
            throw_error("BadOperand", "operand '" + X->name +
                                          "' is produced inside the consumer's loop nest");
          }
        }
      }
    }
  }

  std::set<std::string> used = used_names(*func_);
  std::string buf_name = fresh_name(used, X->name + "_" + sanitize(scope));
  used.insert(buf_name);
  BufferPtr X_s = make_buffer(buf_name, X->dtype, X->shape, scope);
  CopyBlockParts copy = make_copy_block(used, X, X_s, buf_name + "_copy");

  // rewire the consumer block to read the cache
  Stmt rewired = replace_buffer(loc.node, X->name, X_s);
  PrimFuncPtr nf = replace_node(func_, loc.node, rewired);

  // insert the copy right before the consumer's top-level statement
  Located scope_loc = locate_block(nf, scope_realize->block->name);
  Located new_b = locate_block(nf, block);
  auto stmts = scope_stmts(scope_loc.node);
  int idx = seq_index_containing(stmts, new_b.node);
  if (idx < 0) throw_error("InternalError", "consumer not found in scope");
  nf = insert_in_scope(nf, scope_loc.node, copy.nest, idx, X_s);

  commit_rewrite(nf, TraceStep{"cache_read",
                               {{"block", block}, {"operand_index", operand_index},
                                {"scope", scope}},
                               {}});
  return copy.block_name;
}

std::string Schedule::cache_write(const std::string& block, const std::string& scope) {
  if (!valid_scope(scope)) throw_error("UnknownScope", "unknown memory scope '" + scope + "'");
  Located loc = locate_block(func_, block);
  BlockPtr B = loc.node->block;
  if (B->writes.size() != 1) {
    throw_error("BadOperand", "cache_write requires a single write operand");
  }
  BufferPtr X = B->writes[0].buffer;
  Stmt scope_realize = loc.scope_realize();
  if (!scope_realize) throw_error("NotSchedulable", "block has no enclosing scope");

  // the block must be the only writer, and nothing in its own nest may read
  // the buffer: the copy-back happens once after the whole nest
  pre_order_stmts(func_->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize && s != loc.node) {
      for (const auto& wr : s->block->writes) {
        if (wr.buffer->name == X->name) {
          throw_error("BadOperand", "buffer '" + X->name + "' has another writer ('" +
                                        s->block->name + "'); cache_write needs a sole producer");
        }
      }
    }
    return true;
  });
  {
    auto stmts = scope_stmts(scope_realize);
    int own = seq_index_containing(stmts, loc.node);
    if (own >= 0) {
      for (const auto& r : collect_realizes(stmts[own])) {
        if (r == loc.node) continue;
        for (const auto& rr : r->block->reads) {
          if (rr.buffer->name == X->name) {
            throw_error("BadOperand", "buffer '" + X->name +
                                          "' is consumed inside the producer's loop nest");
          }
        }
      }
    }
  }

  std::set<std::string> used = used_names(*func_);
  std::string buf_name = fresh_name(used, X->name + "_" + sanitize(scope));
  used.insert(buf_name);
  BufferPtr X_s = make_buffer(buf_name, X->dtype, X->shape, scope);
  CopyBlockParts copy = make_copy_block(used, X_s, X, buf_name + "_copy");

  Stmt rewired = replace_buffer(loc.node, X->name, X_s);
  PrimFuncPtr nf = replace_node(func_, loc.node, rewired);

  Located scope_loc = locate_block(nf, scope_realize->block->name);
  Located new_b = locate_block(nf, block);
  auto stmts = scope_stmts(scope_loc.node);
  int idx = seq_index_containing(stmts, new_b.node);
  if (idx < 0) throw_error("InternalError", "producer not found in scope");
  nf = insert_in_scope(nf, scope_loc.node, copy.nest, idx + 1, X_s);

  commit_rewrite(nf, TraceStep{"cache_write", {{"block", block}, {"scope", scope}}, {}});
  return copy.block_name;
}

/******** blockize ********/

std::string Schedule::blockize(const std::string& loop) {
  Located loc = locate_loop(func_, loop);

  // the subtree must be a single-child loop chain over exactly one block
  std::vector<Stmt> inner_loops;
  Stmt cur = loc.node;
  while (cur && cur->kind == StmtKind::For) {
    inner_loops.push_back(cur);
    cur = cur->body;
  }
  if (!cur || cur->kind != StmtKind::BlockRealize) {
    throw_error("NotSeparable", "blockize expects a loop nest over exactly one block");
  }
  Stmt realize = cur;
  if (collect_realizes(loc.node).size() != 1) {
    throw_error("NotSeparable", "blockize expects exactly one block under the loop");
  }
  BlockPtr B = realize->block;

  BoundsMap inner_domains;
  std::set<std::string> inner_vars;
  for (const auto& l : inner_loops) {
    inner_domains[l->loop_var->name] = Range{make_int(0), l->extent};
    inner_vars.insert(l->loop_var->name);
  }
  BoundsMap outer_bounds = loc.outer_bounds();
  BoundsMap all_bounds = outer_bounds;
  for (const auto& [k, v] : inner_domains) all_bounds[k] = v;

  // split every binding into inner + outer parts
  size_t n = B->iter_vars.size();
  std::vector<Expr> inner_exprs(n), outer_exprs(n);
  for (size_t k = 0; k < n; ++k) {
    Expr b = simplify(realize->bindings[k], all_bounds);
    int64_t constant;
    auto terms = linear_terms(b, &constant);
    std::vector<LinearTerm> inner_t, outer_t;
    for (const auto& t : terms) {
      std::set<std::string> fv;
      collect_free_vars(t.atom, &fv);
      bool in = false, out = false;
      for (const auto& v : fv) (inner_vars.count(v) ? in : out) = true;
      if (in && out) {
        throw_error("NotSeparable", "binding '" + print_expr(realize->bindings[k]) +
                                        "' mixes loops inside and outside the blockized nest");
      }
      (in ? inner_t : outer_t).push_back(t);
    }
    inner_exprs[k] = linear_combination(inner_t, 0);
    outer_exprs[k] = linear_combination(outer_t, constant);
  }

  // inner parts must form a bijective composition; their ranges become the
  // inner block's domains
  IterMapResult im = detect_iter_map(inner_exprs, inner_domains, {});
  if (!im.decomposed || im.status != IterMapStatus::Bijective) {
    throw_error("NotSeparable", "inner bindings are not a bijective map of the inner loops: " +
                                    im.reason);
  }

  std::set<std::string> used = used_names(*func_);
  std::vector<int64_t> inner_ranges(n), outer_extents(n);
  std::vector<Expr> outer_bindings(n);
  for (size_t k = 0; k < n; ++k) {
    inner_ranges[k] = im.decomps[k].range;
    int64_t ext;
    if (!as_const_int(B->iter_vars[k].domain.extent, &ext)) {
      throw_error("NotSeparable", "blockize requires constant iterator domains");
    }
    if (ext % inner_ranges[k] != 0) {
      throw_error("NotSeparable", "iterator domain " + std::to_string(ext) +
                                      " is not divisible by the inner range " +
                                      std::to_string(inner_ranges[k]));
    }
    outer_extents[k] = ext / inner_ranges[k];
    // outer binding = outer_expr / range (every coefficient must divide)
    int64_t constant;
    auto terms = linear_terms(outer_exprs[k], &constant);
    if (constant % inner_ranges[k] != 0) {
      throw_error("NotSeparable", "outer binding offset is not aligned to the inner range");
    }
    for (auto& t : terms) {
      if (t.coeff % inner_ranges[k] != 0) {
        throw_error("NotSeparable", "outer binding of iterator '" +
                                        B->iter_vars[k].var->name +
                                        "' is not aligned to the inner range");
      }
      t.coeff /= inner_ranges[k];
    }
    outer_bindings[k] = linear_combination(terms, constant / inner_ranges[k]);
  }

  // predicate separation by conjunct
  std::vector<Expr> conj;
  split_conjuncts(realize->predicate, &conj);
  std::vector<Expr> inner_conj, outer_conj;
  for (const auto& c : conj) {
    std::set<std::string> fv;
    collect_free_vars(c, &fv);
    bool in = false, out = false;
    for (const auto& v : fv) (inner_vars.count(v) ? in : out) = true;
    if (in && out) throw_error("NotSeparable", "predicate mixes inner and outer loops");
    (in ? inner_conj : outer_conj).push_back(c);
  }

  // fresh iterator names
  std::vector<Expr> outer_iters(n), inner_iters(n);
  for (size_t k = 0; k < n; ++k) {
    std::string base = B->iter_vars[k].var->name;
    std::string on = fresh_name(used, base + "_o");
    used.insert(on);
    std::string in_name = fresh_name(used, base + "_i");
    used.insert(in_name);
    outer_iters[k] = make_var(on);
    inner_iters[k] = make_var(in_name);
  }

  // original iterator -> outer*range + inner
  VarMap remap;
  for (size_t k = 0; k < n; ++k) {
    Expr composed = inner_ranges[k] == 1
                        ? outer_iters[k]
                        : add(mul(outer_iters[k], make_int(inner_ranges[k])), inner_iters[k]);
    remap[B->iter_vars[k].var->name] = composed;
  }

  // inner block keeps the computation
  auto inner_blk = std::make_shared<Block>(*B);
  inner_blk->iter_vars.clear();
  for (size_t k = 0; k < n; ++k) {
    inner_blk->iter_vars.push_back(
        IterVar{inner_iters[k], const_range(0, inner_ranges[k]), B->iter_vars[k].kind});
  }
  inner_blk->init = nullptr;
  inner_blk->body = substitute(B->body, remap);
  inner_blk->reads.clear();
  inner_blk->writes.clear();
  for (const auto& r : B->reads) inner_blk->reads.push_back(substitute(r, remap));
  for (const auto& r : B->writes) inner_blk->writes.push_back(substitute(r, remap));
  std::vector<Expr> inner_bindings;
  for (size_t k = 0; k < n; ++k) {
    inner_bindings.push_back(inner_ranges[k] == 1 ? make_int(0) : inner_exprs[k]);
  }
  Stmt inner_realize = make_block_realize(inner_bindings, join_conjuncts(inner_conj), inner_blk);

  // rebuild the inner loop nest around the new realize
  Stmt nest = inner_realize;
  for (auto it = inner_loops.rbegin(); it != inner_loops.rend(); ++it) {
    auto l = std::make_shared<StmtNode>(**it);
    l->body = nest;
    nest = l;
  }

  // outer block
  auto outer_blk = std::make_shared<Block>();
  outer_blk->name = fresh_name(used, B->name + "_o");
  used.insert(outer_blk->name);
  for (size_t k = 0; k < n; ++k) {
    outer_blk->iter_vars.push_back(
        IterVar{outer_iters[k], const_range(0, outer_extents[k]), B->iter_vars[k].kind});
  }
  outer_blk->body = nest;

  if (B->init) {
    std::set<std::string> init_fv;
    pre_order_stmts(B->init, [&](const Stmt& s) {
      if (s->kind == StmtKind::BufferStore) {
        for (const auto& i : s->indices) collect_free_vars(i, &init_fv);
        collect_free_vars(s->value, &init_fv);
      }
      return true;
    });
    VarMap init_map;
    Stmt init = B->init;
    std::vector<std::pair<Expr, int64_t>> init_loops;
    for (size_t k = 0; k < n; ++k) {
      const std::string& vn = B->iter_vars[k].var->name;
      if (!init_fv.count(vn)) continue;
      if (B->iter_vars[k].kind != IterKind::DataParallel) {
        throw_error("NotSeparable", "init references a non-spatial iterator");
      }
      if (inner_ranges[k] == 1) {
        init_map[vn] = simplify(mul(outer_iters[k], make_int(1)));
      } else {
        std::string lv = fresh_name(used, vn + "_init");
        used.insert(lv);
        Expr v = make_var(lv);
        init_loops.emplace_back(v, inner_ranges[k]);
        init_map[vn] = add(mul(outer_iters[k], make_int(inner_ranges[k])), v);
      }
    }
    init = substitute(init, init_map);
    for (auto it = init_loops.rbegin(); it != init_loops.rend(); ++it) {
      init = make_for(it->first, make_int(it->second), init);
    }
    outer_blk->init = init;
  }

  BlockPtr finished = with_recomputed_regions(outer_blk, outer_bounds);
  Stmt outer_realize = make_block_realize(outer_bindings, join_conjuncts(outer_conj), finished);
  PrimFuncPtr nf = replace_node(func_, loc.node, outer_realize);
  commit_rewrite(nf, TraceStep{"blockize", {{"loop", loop}}, {}});
  return finished->name;
}

/******** decompose / recompose reduction ********/

std::string Schedule::decompose_reduction(const std::string& block, const std::string& loop) {
  Located bloc = locate_block(func_, block);
  BlockPtr B = bloc.node->block;
  if (!B->init) throw_error("NoInit", "block '" + block + "' has no init statement");
  Located lloc = locate_loop(func_, loop);
  if (!subtree_contains(lloc.node, bloc.node)) {
    throw_error("BadPosition", "loop '" + loop + "' is not an ancestor of block '" + block + "'");
  }

  // no reduction-binding loop may remain above the insertion point
  std::set<std::string> reduction_loop_vars;
  for (size_t i = 0; i < B->iter_vars.size(); ++i) {
    if (B->iter_vars[i].kind != IterKind::Reduction) continue;
    collect_free_vars(bloc.node->bindings[i], &reduction_loop_vars);
  }
  for (const auto& a : lloc.ancestors) {
    if (a->kind == StmtKind::For && reduction_loop_vars.count(a->loop_var->name)) {
      throw_error("BadPosition", "reduction loop '" + a->loop_var->name +
                                     "' is above the decomposition point");
    }
  }

  // loops available at the insertion point
  std::set<std::string> above;
  for (const auto& a : lloc.ancestors) {
    if (a->kind == StmtKind::For) above.insert(a->loop_var->name);
    if (a->kind == StmtKind::BlockRealize) {
      for (const auto& iv : a->block->iter_vars) above.insert(iv.var->name);
    }
  }
  if (!is_true(bloc.node->predicate)) {
    std::set<std::string> pfv;
    collect_free_vars(bloc.node->predicate, &pfv);
    for (const auto& v : pfv) {
      if (!above.count(v)) {
        throw_error("BadPosition", "block predicate depends on loops below the decomposition point");
      }
    }
  }

  std::set<std::string> init_fv;
  pre_order_stmts(B->init, [&](const Stmt& s) {
    if (s->kind == StmtKind::BufferStore) {
      for (const auto& i : s->indices) collect_free_vars(i, &init_fv);
      collect_free_vars(s->value, &init_fv);
    }
    return true;
  });

  std::set<std::string> used = used_names(*func_);
  auto init_blk = std::make_shared<Block>();
  init_blk->name = fresh_name(used, B->name + "_init");
  used.insert(init_blk->name);
  init_blk->annotations["decomposed_init_of"] = block;

  VarMap rename;
  std::vector<Expr> init_bindings;
  std::vector<std::pair<Expr, int64_t>> fresh_loops;
  for (size_t k = 0; k < B->iter_vars.size(); ++k) {
    const IterVar& iv = B->iter_vars[k];
    if (iv.kind != IterKind::DataParallel) {
      if (init_fv.count(iv.var->name)) {
        throw_error("BadPosition", "init references reduction iterator '" + iv.var->name + "'");
      }
      continue;
    }
    std::string nn = fresh_name(used, iv.var->name + "_init");
    used.insert(nn);
    Expr niv = make_var(nn);
    init_blk->iter_vars.push_back(IterVar{niv, iv.domain, IterKind::DataParallel});
    rename[iv.var->name] = niv;

    const Expr& b = bloc.node->bindings[k];
    std::set<std::string> bfv;
    collect_free_vars(b, &bfv);
    bool shared = true, below = true;
    for (const auto& v : bfv) {
      shared &= above.count(v) > 0;
      below &= above.count(v) == 0;
    }
    if (!shared && !below) {
      // a binding mixing loops above and below the insertion point would
      // replay the init across outer iterations
      throw_error("BadPosition", "spatial binding '" + print_expr(b) +
                                     "' mixes loops above and below the decomposition point");
    }
    if (shared) {
      init_bindings.push_back(b);
    } else {
      int64_t ext;
      if (!as_const_int(iv.domain.extent, &ext)) {
        throw_error("BadPosition", "cannot rebuild loops for a non-constant domain");
      }
      std::string lv = fresh_name(used, iv.var->name + "_l");
      used.insert(lv);
      Expr lvar = make_var(lv);
      fresh_loops.emplace_back(lvar, ext);
      init_bindings.push_back(lvar);
    }
  }
  init_blk->body = substitute(B->init, rename);
  BlockPtr finished_init = with_recomputed_regions(init_blk, lloc.outer_bounds());
  Stmt init_nest = make_block_realize(init_bindings, bloc.node->predicate, finished_init);
  for (auto it = fresh_loops.rbegin(); it != fresh_loops.rend(); ++it) {
    init_nest = make_for(it->first, make_int(it->second), init_nest);
  }

  // strip the init from the update block
  auto updated = std::make_shared<Block>(*B);
  updated->init = nullptr;
  auto new_realize = std::make_shared<StmtNode>(*bloc.node);
  new_realize->block = updated;
  PrimFuncPtr nf = replace_node(func_, bloc.node, new_realize);

  Located lloc2 = locate_loop(nf, loop);
  nf = replace_node(nf, lloc2.node, make_seq({init_nest, lloc2.node}));
  commit_rewrite(nf, TraceStep{"decompose_reduction", {{"block", block}, {"loop", loop}}, {}});
  return finished_init->name;
}

void Schedule::recompose_reduction(const std::string& block) {
  Located bloc = locate_block(func_, block);
  BlockPtr B = bloc.node->block;
  if (B->init) throw_error("NoInit", "block '" + block + "' already has an init statement");

  Stmt init_realize;
  pre_order_stmts(func_->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize) {
      auto it = s->block->annotations.find("decomposed_init_of");
      if (it != s->block->annotations.end() && it->second == block) init_realize = s;
    }
    return true;
  });
  if (!init_realize) {
    throw_error("NoInit", "no decomposed init block for '" + block + "' found");
  }

  // map init iterators back onto the update block's spatial iterators
  VarMap back;
  size_t pos = 0;
  for (const auto& iv : B->iter_vars) {
    if (iv.kind != IterKind::DataParallel) continue;
    if (pos >= init_realize->block->iter_vars.size()) break;
    back[init_realize->block->iter_vars[pos].var->name] = iv.var;
    ++pos;
  }
  Stmt init_body = substitute(init_realize->block->body, back);

  Located iloc = locate_block(func_, init_realize->block->name);
  auto priv = private_loops(iloc);
  Stmt removal_root = priv.empty() ? init_realize : priv.front();
  PrimFuncPtr nf = replace_node(func_, removal_root, nullptr);

  Located bloc2 = locate_block(nf, block);
  auto merged = std::make_shared<Block>(*bloc2.node->block);
  merged->init = init_body;
  auto realize = std::make_shared<StmtNode>(*bloc2.node);
  realize->block = merged;
  nf = replace_node(nf, bloc2.node, realize);
  commit_rewrite(nf, TraceStep{"recompose_reduction", {{"block", block}}, {}});
}

/******** compute_at ********/

void Schedule::compute_at(const std::string& block, const std::string& loop) {
  Located bloc = locate_block(func_, block);
  Located lloc = locate_loop(func_, loop);
  if (subtree_contains(bloc.node, lloc.node)) {
    throw_error("DependencyViolation", "loop '" + loop + "' is inside block '" + block + "'");
  }
  Stmt scope = bloc.scope_realize();
  if (!scope || scope != lloc.scope_realize()) {
    throw_error("DependencyViolation", "block and loop are not in the same scope");
  }
  BlockPtr B = bloc.node->block;
  if (B->writes.size() != 1) {
    throw_error("RegionNotComputable", "compute_at requires a single write operand");
  }
  if (!is_true(bloc.node->predicate)) {
    throw_error("RegionNotComputable", "cannot relocate a predicated block");
  }

  auto under_loop = collect_realizes(lloc.node->body);
  under_loop.erase(std::remove(under_loop.begin(), under_loop.end(), bloc.node),
                   under_loop.end());

  // anchor: the buffer linking the block to the loop subtree
  const BufferPtr& w = B->writes[0].buffer;
  std::vector<Stmt> deps;
  bool producer_mode = false;
  BufferRegion anchor_access;
  for (const auto& r : under_loop) {
    for (const auto& rr : r->block->reads) {
      if (rr.buffer->name == w->name) {
        deps.push_back(r);
        break;
      }
    }
  }
  if (!deps.empty()) {
    producer_mode = true;
    anchor_access = B->writes[0];
  } else {
    for (const auto& br : B->reads) {
      deps.clear();
      for (const auto& r : under_loop) {
        for (const auto& wr : r->block->writes) {
          if (wr.buffer->name == br.buffer->name) {
            deps.push_back(r);
            break;
          }
        }
      }
      if (!deps.empty()) {
        anchor_access = br;
        break;
      }
    }
    if (deps.empty()) {
      throw_error("DependencyViolation",
                  "no producer-consumer relation between '" + block + "' and loop '" + loop + "'");
    }
  }
  const BufferPtr anchor = anchor_access.buffer;

  if (producer_mode) {
    // every consumer of the written buffer must live under the loop
    for (const auto& r : collect_realizes(scope->block->body)) {
      if (r == bloc.node) continue;
      bool reads_w = false;
      for (const auto& rr : r->block->reads) reads_w |= rr.buffer->name == w->name;
      if (reads_w && !subtree_contains(lloc.node, r)) {
        throw_error("DependencyViolation", "consumer block '" + r->block->name +
                                               "' of '" + w->name + "' is outside loop '" + loop +
                                               "'");
      }
    }
  }

  // data-dependent accesses make the required region unanalyzable
  for (const auto& d : deps) {
    AccessInfo info = compute_access_regions(*d->block);
    if (info.conservative.count(anchor->name)) {
      throw_error("DependencyViolation", "block '" + d->block->name +
                                             "' accesses '" + anchor->name +
                                             "' through data-dependent indices");
    }
  }

  // required region of the anchor per iteration of `loop`
  BoundsMap context = lloc.outer_bounds();
  context[loop] = Range{make_int(0), lloc.node->extent};
  std::vector<Range> required(anchor->shape.size(),
                              Range{make_int(0), make_int(0)});
  bool first = true;
  for (const auto& d : deps) {
    Located dloc = locate_block(func_, d->block->name);
    BoundsMap widen;
    bool below = false;
    for (const auto& a : dloc.ancestors) {
      if (a == lloc.node) {
        below = true;
        continue;
      }
      if (below && a->kind == StmtKind::For) {
        widen[a->loop_var->name] = Range{make_int(0), a->extent};
      }
    }
    VarMap binding;
    for (size_t i = 0; i < d->bindings.size(); ++i) {
      binding[d->block->iter_vars[i].var->name] = d->bindings[i];
    }
    const std::vector<BufferRegion>& regions =
        producer_mode ? d->block->reads : d->block->writes;
    for (const auto& r : regions) {
      if (r.buffer->name != anchor->name) continue;
      auto hull = widen_region(r, binding, widen, context);
      if (!hull) throw_error("RegionNotComputable", "cannot bound the consumed region");
      for (size_t dim = 0; dim < required.size(); ++dim) {
        if (first) {
          required[dim] = hull->ranges[dim];
        } else {
          Expr lo = simplify(make_binary(ExprKind::Min, required[dim].min, hull->ranges[dim].min),
                             context);
          Expr hi_a = add(required[dim].min, required[dim].extent);
          Expr hi_b = add(hull->ranges[dim].min, hull->ranges[dim].extent);
          Expr hi = simplify(make_binary(ExprKind::Max, hi_a, hi_b), context);
          required[dim] = Range{lo, simplify(sub(hi, lo), context)};
        }
      }
      first = false;
    }
  }

  // map required dims back onto the block's iterators
  BoundsMap b_bounds;
  for (const auto& iv : B->iter_vars) b_bounds[iv.var->name] = iv.domain;
  std::map<std::string, std::pair<Expr, int64_t>> iter_plan;  // iter -> (offset expr, new extent)
  for (size_t dim = 0; dim < anchor->shape.size(); ++dim) {
    const Range& acc = anchor_access.ranges[dim];
    int64_t acc_ext;
    if (!as_const_int(simplify(acc.extent, b_bounds), &acc_ext)) {
      throw_error("RegionNotComputable", "anchor access extent is not constant");
    }
    int64_t constant;
    auto terms = linear_terms(simplify(acc.min, b_bounds), &constant);
    if (terms.empty()) {
      continue;  // dimension not driven by an iterator; keep as-is
    }
    if (terms.size() != 1 || terms[0].atom->kind != ExprKind::Var || constant != 0) {
      throw_error("RegionNotComputable", "anchor access is not a tiled single-iterator map");
    }
    int64_t c = terms[0].coeff;
    if (c != acc_ext) {
      throw_error("RegionNotComputable", "anchor tiles are not contiguous");
    }
    int64_t req_ext;
    if (!as_const_int(required[dim].extent, &req_ext) || req_ext % c != 0) {
      throw_error("RegionNotComputable", "required region is not tile-aligned");
    }
    Expr offset = required[dim].min;
    if (!prove(make_binary(ExprKind::Eq, floormod(offset, make_int(c)), make_int(0)), context)) {
      throw_error("RegionNotComputable", "required region offset is not tile-aligned");
    }
    iter_plan[terms[0].atom->name] = {simplify(floordiv(offset, make_int(c)), context),
                                      req_ext / c};
  }

  // build the relocated nest
  std::set<std::string> used = used_names(*func_);
  std::vector<Expr> new_bindings;
  std::vector<std::pair<Expr, int64_t>> new_loops;
  for (const auto& iv : B->iter_vars) {
    int64_t full;
    if (!as_const_int(iv.domain.extent, &full)) {
      throw_error("RegionNotComputable", "block iterator domain is not constant");
    }
    std::string lv = fresh_name(used, iv.var->name + "_c");
    used.insert(lv);
    Expr lvar = make_var(lv);
    auto it = iter_plan.find(iv.var->name);
    if (it != iter_plan.end()) {
      int64_t ext = it->second.second;
      Expr offset = it->second.first;
      new_loops.emplace_back(lvar, ext);
      Expr bind = is_const_int(offset, 0) ? lvar : simplify(add(offset, lvar), context);
      new_bindings.push_back(bind);
    } else {
      new_loops.emplace_back(lvar, full);
      new_bindings.push_back(lvar);
    }
  }
  Stmt nest = make_block_realize(new_bindings, nullptr, B);
  for (auto it = new_loops.rbegin(); it != new_loops.rend(); ++it) {
    nest = make_for(it->first, make_int(it->second), nest);
  }

  // choose the insertion point among the loop body's top-level statements
  std::vector<Stmt> body_stmts;
  if (lloc.node->body->kind == StmtKind::Seq) {
    body_stmts = lloc.node->body->stmts;
  } else {
    body_stmts = {lloc.node->body};
  }
  int first_dep = static_cast<int>(body_stmts.size());
  int last_dep = -1;
  for (size_t i = 0; i < body_stmts.size(); ++i) {
    for (const auto& d : deps) {
      if (subtree_contains(body_stmts[i], d)) {
        first_dep = std::min(first_dep, static_cast<int>(i));
        last_dep = std::max(last_dep, static_cast<int>(i));
      }
    }
  }
  int insert_idx = producer_mode ? first_dep : last_dep + 1;
  if (producer_mode) {
    // stay after producers of the block's inputs inside this loop
    for (size_t i = 0; i < body_stmts.size(); ++i) {
      for (const auto& r : collect_realizes(body_stmts[i])) {
        if (r == bloc.node) continue;
        for (const auto& wr : r->block->writes) {
          for (const auto& br : B->reads) {
            if (wr.buffer->name == br.buffer->name && static_cast<int>(i) >= insert_idx) {
              throw_error("DependencyViolation",
                          "producer of '" + br.buffer->name + "' follows the insertion point");
            }
          }
        }
      }
    }
  }

  // remove the old nest, then insert
  auto priv = private_loops(bloc);
  Stmt removal_root = priv.empty() ? bloc.node : priv.front();
  bool removal_inside_loop = subtree_contains(lloc.node, removal_root);
  PrimFuncPtr nf = replace_node(func_, removal_root, nullptr);

  Located lloc2 = locate_loop(nf, loop);
  std::vector<Stmt> stmts;
  if (lloc2.node->body->kind == StmtKind::Seq) {
    stmts = lloc2.node->body->stmts;
  } else if (lloc2.node->body) {
    stmts = {lloc2.node->body};
  }
  if (removal_inside_loop) {
    // indices may have shifted after removal; recompute against survivors
    int idx = 0;
    for (const auto& s : stmts) {
      bool has_dep = false;
      for (const auto& d : deps) {
        // relocate by block name since nodes were rebuilt
        for (const auto& r : collect_realizes(s)) {
          if (r->block->name == d->block->name) has_dep = true;
        }
      }
      if (has_dep) break;
      ++idx;
    }
    if (producer_mode) {
      insert_idx = idx;
    } else {
      int last = -1;
      for (size_t i = 0; i < stmts.size(); ++i) {
        for (const auto& d : deps) {
          for (const auto& r : collect_realizes(stmts[i])) {
            if (r->block->name == d->block->name) last = static_cast<int>(i);
          }
        }
      }
      insert_idx = last + 1;
    }
  }
  stmts.insert(stmts.begin() + std::min<size_t>(insert_idx, stmts.size()), nest);
  auto nl = std::make_shared<StmtNode>(*lloc2.node);
  nl->body = make_seq(std::move(stmts));
  nf = replace_node(nf, lloc2.node, nl);

  commit_rewrite(nf, TraceStep{"compute_at", {{"block", block}, {"loop", loop}}, {}});
}

/******** transform_layout ********/

void Schedule::transform_layout(const std::string& buffer, const IndexMap& map) {
  for (const auto& p : func_->params) {
    if (p->name == buffer) {
      throw_error("BadOperand", "cannot transform the layout of parameter '" + buffer + "'");
    }
  }
  BufferPtr old_buf;
  pre_order_stmts(func_->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize) {
      for (const auto& ab : s->block->alloc_buffers) {
        if (ab->name == buffer) old_buf = ab;
      }
    }
    return !old_buf;
  });
  if (!old_buf) throw_error("BadOperand", "no allocated buffer named '" + buffer + "'");
  if (map.params.size() != old_buf->shape.size()) {
    throw_error("ArityError", "index map arity does not match the buffer rank");
  }

  BoundsMap dims;
  for (size_t d = 0; d < map.params.size(); ++d) {
    dims[map.params[d]] = const_range(0, old_buf->shape[d]);
  }
  IterMapResult im = detect_iter_map(map.exprs, dims, {});
  if (!im.decomposed || im.status != IterMapStatus::Bijective) {
    throw_error("NotBijective",
                "index map " + map.to_string() + " is not a bijection: " + im.reason);
  }
  std::vector<int64_t> new_shape;
  for (const auto& d : im.decomps) new_shape.push_back(d.range);
  BufferPtr new_buf = make_buffer(old_buf->name, old_buf->dtype, new_shape, old_buf->scope);

  auto remap_indices = [&](const std::vector<Expr>& idx) {
    VarMap m;
    for (size_t d = 0; d < map.params.size(); ++d) m[map.params[d]] = idx[d];
    std::vector<Expr> out;
    for (const auto& e : map.exprs) out.push_back(simplify(substitute(e, m)));
    return out;
  };

  std::function<Expr(const Expr&)> rw_expr = [&](const Expr& e) -> Expr {
    if (!e) return e;
    std::vector<Expr> args;
    bool changed = false;
    for (const auto& a : e->args) {
      Expr na = rw_expr(a);
      changed |= na != a;
      args.push_back(na);
    }
    if (e->kind == ExprKind::BufferLoad && e->buffer->name == buffer) {
      auto n = std::make_shared<ExprNode>(*e);
      n->buffer = new_buf;
      n->args = remap_indices(args);
      return n;
    }
    if (!changed) return e;
    auto n = std::make_shared<ExprNode>(*e);
    n->args = std::move(args);
    return n;
  };

  std::function<Stmt(const Stmt&, BoundsMap&)> rw_stmt = [&](const Stmt& s,
                                                             BoundsMap& bounds) -> Stmt {
    if (!s) return s;
    switch (s->kind) {
      case StmtKind::For: {
        auto n = std::make_shared<StmtNode>(*s);
        bounds[s->loop_var->name] = Range{make_int(0), s->extent};
        n->body = rw_stmt(s->body, bounds);
        bounds.erase(s->loop_var->name);
        return n;
      }
      case StmtKind::BlockRealize: {
        bool touches = false;
        for (const auto& r : s->block->reads) touches |= r.buffer->name == buffer;
        for (const auto& r : s->block->writes) touches |= r.buffer->name == buffer;
        auto blk = std::make_shared<Block>(*s->block);
        for (const auto& iv : blk->iter_vars) bounds[iv.var->name] = iv.domain;
        blk->init = rw_stmt(s->block->init, bounds);
        blk->body = rw_stmt(s->block->body, bounds);
        BlockPtr nb = blk;
        if (touches) {
          if (is_tensorized(*s->block)) {
            throw_error("BadOperand",
                        "cannot transform a buffer referenced by the opaque block '" +
                            s->block->name + "'");
          }
          nb = with_recomputed_regions(blk, bounds);
        }
        for (const auto& iv : blk->iter_vars) bounds.erase(iv.var->name);
        auto n = std::make_shared<StmtNode>(*s);
        n->block = nb;
        return n;
      }
      case StmtKind::BufferStore: {
        auto n = std::make_shared<StmtNode>(*s);
        for (auto& i : n->indices) i = rw_expr(i);
        n->value = rw_expr(s->value);
        if (s->buffer->name == buffer) {
          n->buffer = new_buf;
          n->indices = remap_indices(n->indices);
        }
        return n;
      }
      case StmtKind::Seq: {
        auto n = std::make_shared<StmtNode>(*s);
        for (auto& c : n->stmts) c = rw_stmt(c, bounds);
        return n;
      }
      case StmtKind::Evaluate: {
        auto n = std::make_shared<StmtNode>(*s);
        n->expr = rw_expr(s->expr);
        return n;
      }
    }
    return s;
  };

  BoundsMap bounds;
  Stmt body = rw_stmt(func_->body, bounds);
  body = replace_buffer(body, buffer, new_buf);  // alloc entries and regions
  auto nf = std::make_shared<PrimFunc>(*func_);
  nf->body = body;
  commit_rewrite(nf, TraceStep{"transform_layout",
                               {{"buffer", buffer}, {"index_map", map.to_string()}},
                               {}});
}

/******** pad_block ********/

void Schedule::pad_block(const std::string& block, const std::vector<int64_t>& padded_extents) {
  Located bloc = locate_block(func_, block);
  BlockPtr B = bloc.node->block;
  size_t n = B->iter_vars.size();
  if (padded_extents.size() != n) {
    throw_error("ArityError", "padded extents must match the iterator count");
  }
  std::vector<int64_t> extents(n);
  bool any_pad = false;
  for (size_t k = 0; k < n; ++k) {
    if (!as_const_int(B->iter_vars[k].domain.extent, &extents[k])) {
      throw_error("NotSchedulable", "pad requires constant iterator domains");
    }
    if (padded_extents[k] < extents[k]) {
      throw_error("ValueError", "padded extent is smaller than the current extent");
    }
    any_pad |= padded_extents[k] > extents[k];
  }
  TraceStep step{"pad_block", {{"block", block}, {"padded_extents", padded_extents}}, {}};
  if (!any_pad) {
    commit_rewrite(func_, std::move(step));
    return;
  }

  // canonical bindings: each iterator bound to its own loop
  std::map<std::string, std::string> iter_loop;  // iter -> loop var
  for (size_t k = 0; k < n; ++k) {
    const Expr& b = bloc.node->bindings[k];
    if (b->kind != ExprKind::Var) {
      throw_error("NotSchedulable", "pad requires trivial loop bindings");
    }
    iter_loop[B->iter_vars[k].var->name] = b->name;
  }

  // operand dimension maps (post-reindex direct indexing)
  struct DimInfo {
    BufferPtr buf;
    std::vector<int64_t> new_shape;
    bool is_read;
  };
  std::map<std::string, DimInfo> enlarged;
  std::set<std::string> padded_reduction;
  std::map<std::string, int64_t> padded_iters;  // iter name -> padded extent
  for (size_t k = 0; k < n; ++k) {
    if (padded_extents[k] > extents[k]) {
      padded_iters[B->iter_vars[k].var->name] = padded_extents[k];
      if (B->iter_vars[k].kind == IterKind::Reduction) {
        padded_reduction.insert(B->iter_vars[k].var->name);
      }
    }
  }
  auto scan_regions = [&](const std::vector<BufferRegion>& regions, bool is_read) {
    for (const auto& r : regions) {
      std::vector<int64_t> shape = r.buffer->shape;
      bool change = false;
      for (size_t d = 0; d < r.ranges.size(); ++d) {
        const Range& rg = r.ranges[d];
        if (rg.min->kind == ExprKind::Var && padded_iters.count(rg.min->name) &&
            is_const_int(rg.extent, 1)) {
          shape[d] = std::max(shape[d], padded_iters[rg.min->name]);
          change |= shape[d] != r.buffer->shape[d];
        } else {
          std::set<std::string> fv;
          collect_free_vars(rg.min, &fv);
          collect_free_vars(rg.extent, &fv);
          for (const auto& v : fv) {
            if (padded_iters.count(v)) {
              throw_error("NotSchedulable",
                          "pad requires directly indexed operands (buffer '" + r.buffer->name +
                              "')");
            }
          }
        }
      }
      if (change) {
        auto& info = enlarged[r.buffer->name];
        if (info.buf) {
          for (size_t d = 0; d < shape.size(); ++d) {
            info.new_shape[d] = std::max(info.new_shape[d], shape[d]);
          }
          info.is_read |= is_read;
        } else {
          info = DimInfo{r.buffer, shape, is_read};
        }
      }
    }
  };
  scan_regions(B->reads, true);
  scan_regions(B->writes, false);

  // enlarged buffers must be intermediates
  for (const auto& [name, info] : enlarged) {
    (void)info;
    for (const auto& p : func_->params) {
      if (p->name == name) {
        throw_error("NotSchedulable",
                    "cannot pad parameter '" + name + "'; stage the operand first");
      }
    }
  }

  // a padded reduction needs a neutral input value
  Expr pad_value_f, pad_value_i;
  if (!padded_reduction.empty()) {
    Stmt store = single_store_body(B);
    bool is_add = store && store->value->kind == ExprKind::Add;
    if (!is_add) {
      auto ann = B->annotations.find("pad_value");
      if (ann == B->annotations.end()) {
        throw_error("NoNeutralElement",
                    "padding a non-add reduction requires an explicit neutral element");
      }
      double v = std::stod(ann->second);
      pad_value_f = make_float(v);
      pad_value_i = make_int(static_cast<int64_t>(v));
    } else {
      pad_value_f = make_float(0.0);
      pad_value_i = make_int(0);
    }
  } else {
    pad_value_f = make_float(0.0);
    pad_value_i = make_int(0);
  }

  // collect edits: loop extents, block domain changes, producer guards
  std::map<std::string, int64_t> loop_new_extent;
  for (const auto& [iter, ext] : padded_iters) loop_new_extent[iter_loop[iter]] = ext;

  struct ProducerEdit {
    std::vector<int64_t> new_iter_extents;
    std::vector<std::string> loops_to_grow;  // loop var per grown iter
  };
  std::map<std::string, ProducerEdit> producer_edits;

  // find producers of each enlarged read buffer
  for (const auto& [bname, info] : enlarged) {
    if (!info.is_read) continue;
    pre_order_stmts(func_->body, [&](const Stmt& s) {
      if (s->kind != StmtKind::BlockRealize || s->block == B) return true;
      for (const auto& wr : s->block->writes) {
        if (wr.buffer->name != bname) continue;
        // grow the producer's iterators that drive enlarged dims
        ProducerEdit edit;
        for (size_t k = 0; k < s->block->iter_vars.size(); ++k) {
          int64_t cur;
          as_const_int(s->block->iter_vars[k].domain.extent, &cur);
          edit.new_iter_extents.push_back(cur);
        }
        for (size_t d = 0; d < wr.ranges.size(); ++d) {
          if (info.new_shape[d] == info.buf->shape[d]) continue;
          const Range& rg = wr.ranges[d];
          if (rg.min->kind != ExprKind::Var || !is_const_int(rg.extent, 1)) {
            throw_error("NotSchedulable", "producer of '" + bname +
                                              "' does not index the padded dimension directly");
          }
          for (size_t k = 0; k < s->block->iter_vars.size(); ++k) {
            if (s->block->iter_vars[k].var->name == rg.min->name) {
              edit.new_iter_extents[k] = info.new_shape[d];
              if (s->bindings[k]->kind != ExprKind::Var) {
                throw_error("NotSchedulable", "producer of '" + bname +
                                                  "' has non-trivial loop bindings");
              }
              edit.loops_to_grow.push_back(s->bindings[k]->name);
            }
          }
        }
        producer_edits[s->block->name] = edit;
      }
      return true;
    });
  }
  for (const auto& [pname, edit] : producer_edits) {
    Located ploc = locate_block(func_, pname);
    for (size_t k = 0; k < edit.new_iter_extents.size(); ++k) {
      int64_t cur;
      as_const_int(ploc.node->block->iter_vars[k].domain.extent, &cur);
      if (edit.new_iter_extents[k] != cur) {
        loop_new_extent[ploc.node->bindings[k]->name] = edit.new_iter_extents[k];
      }
    }
  }

  // apply the rewrites
  std::function<Stmt(const Stmt&)> rw = [&](const Stmt& s) -> Stmt {
    if (!s) return s;
    switch (s->kind) {
      case StmtKind::For: {
        auto n = std::make_shared<StmtNode>(*s);
        auto it = loop_new_extent.find(s->loop_var->name);
        if (it != loop_new_extent.end()) n->extent = make_int(it->second);
        n->body = rw(s->body);
        return n;
      }
      case StmtKind::Seq: {
        auto n = std::make_shared<StmtNode>(*s);
        for (auto& c : n->stmts) c = rw(c);
        return n;
      }
      case StmtKind::BlockRealize: {
        auto blk = std::make_shared<Block>(*s->block);
        blk->init = rw(s->block->init);
        blk->body = rw(s->block->body);
        if (s->block == B) {
          for (size_t k = 0; k < n; ++k) {
            blk->iter_vars[k].domain = const_range(0, padded_extents[k]);
          }
        }
        auto pit = producer_edits.find(s->block->name);
        if (pit != producer_edits.end() && s->block != B) {
          for (size_t k = 0; k < blk->iter_vars.size(); ++k) {
            blk->iter_vars[k].domain = const_range(0, pit->second.new_iter_extents[k]);
          }
          // guard loads against the original source extents
          Stmt store = single_store_body(blk);
          if (store) {
            std::vector<Expr> guards;
            post_order_exprs(store->value, [&](const Expr& e) {
              if (e->kind != ExprKind::BufferLoad) return;
              for (size_t d = 0; d < e->args.size(); ++d) {
                guards.push_back(lt(e->args[d], make_int(e->buffer->shape[d])));
              }
            });
            BoundsMap pb;
            for (const auto& iv : blk->iter_vars) pb[iv.var->name] = iv.domain;
            std::vector<Expr> needed;
            for (const auto& g : guards) {
              Expr sg = simplify(g, pb);
              if (!is_true(sg)) needed.push_back(sg);
            }
            if (!needed.empty()) {
              Expr guard = join_conjuncts(needed);
              Expr neutral = dtype_is_float(store->buffer->dtype)
                                 ? make_float(pad_value_f->float_value, store->buffer->dtype)
                                 : make_int(pad_value_i->int_value, store->buffer->dtype);
              auto ns = std::make_shared<StmtNode>(*store);
              ns->value = make_select(guard, store->value, neutral);
              blk->body = ns;
            }
          }
        }
        auto nr = std::make_shared<StmtNode>(*s);
        nr->block = blk;
        return nr;
      }
      default:
        return s;
    }
  };
  Stmt body = rw(func_->body);
  for (const auto& [bname, info] : enlarged) {
    BufferPtr nb = make_buffer(bname, info.buf->dtype, info.new_shape, info.buf->scope);
    body = replace_buffer(body, bname, nb);
  }
  auto nf = std::make_shared<PrimFunc>(*func_);
  nf->body = body;
  commit_rewrite(nf, std::move(step));
}

/******** pad_buffer_strides ********/

void Schedule::pad_buffer_strides(const std::string& buffer) {
  BufferPtr old_buf;
  pre_order_stmts(func_->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize) {
      for (const auto& ab : s->block->alloc_buffers) {
        if (ab->name == buffer) old_buf = ab;
      }
    }
    return !old_buf;
  });
  if (!old_buf) throw_error("BadOperand", "no allocated buffer named '" + buffer + "'");
  TraceStep step{"pad_buffer_strides", {{"buffer", buffer}}, {}};
  if (old_buf->shape.size() < 2) {
    commit_rewrite(func_, std::move(step));
    return;
  }
  size_t rank = old_buf->shape.size();
  std::vector<int64_t> strides(rank, 1);
  for (int d = static_cast<int>(rank) - 2; d >= 0; --d) {
    int64_t row = old_buf->shape[d + 1];
    if (d == static_cast<int>(rank) - 2) row += 1;  // padded innermost rows
    strides[d] = strides[d + 1] * row;
  }
  BufferPtr nb =
      make_buffer(old_buf->name, old_buf->dtype, old_buf->shape, old_buf->scope, strides);
  auto nf = std::make_shared<PrimFunc>(*func_);
  nf->body = replace_buffer(func_->body, buffer, nb);
  commit_rewrite(nf, std::move(step));
}

}  // namespace tir
