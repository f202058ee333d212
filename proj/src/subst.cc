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
#include "tir/subst.h"

namespace tir {

namespace {

class Substituter {
 public:
  explicit Substituter(VarMap m) : map_(std::move(m)) {
    for (const auto& [k, v] : map_) {
      (void)k;
      collect_free_vars(v, &replacement_free_);
    }
  }

  Expr visit(const Expr& e) {
    if (!e) return e;
    if (e->kind == ExprKind::Var) {
      auto it = map_.find(e->name);
      return it != map_.end() ? it->second : e;
    }
    bool changed = false;
    std::vector<Expr> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) {
      Expr na = visit(a);
      changed |= na != a;
      args.push_back(std::move(na));
    }
    if (!changed) return e;
    auto n = std::make_shared<ExprNode>(*e);
    n->args = std::move(args);
    return n;
  }

  Range visit_range(const Range& r) { return Range{visit(r.min), visit(r.extent)}; }

  BufferRegion visit_region(const BufferRegion& r) {
    BufferRegion out;
    out.buffer = r.buffer;
    out.ranges.reserve(r.ranges.size());
    for (const auto& rg : r.ranges) out.ranges.push_back(visit_range(rg));
    return out;
  }

  Stmt visit(const Stmt& s) {
    if (!s) return s;
    switch (s->kind) {
      case StmtKind::For: {
        Expr extent = visit(s->extent);
        auto [binder, body_pre] = enter_binder(s->loop_var, s->body);
        Stmt body;
        {
          Shadow sh(this, binder->name);
          body = visit(body_pre);
        }
        if (extent == s->extent && body == s->body && binder == s->loop_var) return s;
        auto n = std::make_shared<StmtNode>(*s);
        n->loop_var = binder;
        n->extent = std::move(extent);
        n->body = std::move(body);
        return n;
      }
      case StmtKind::BlockRealize: {
        std::vector<Expr> bindings;
        bindings.reserve(s->bindings.size());
        bool changed = false;
        for (const auto& b : s->bindings) {
          Expr nb = visit(b);
          changed |= nb != b;
          bindings.push_back(std::move(nb));
        }
        Expr pred = visit(s->predicate);
        changed |= pred != s->predicate;

        // Block iterators shadow outer names inside the block.
        std::vector<std::string> shadowed;
        for (const auto& iv : s->block->iter_vars) shadowed.push_back(iv.var->name);
        BlockPtr blk;
        {
          std::vector<Shadow> guards;
          guards.reserve(shadowed.size());
          for (const auto& name : shadowed) guards.emplace_back(this, name);
          blk = visit_block(s->block);
        }
        changed |= blk != s->block;
        if (!changed) return s;
        auto n = std::make_shared<StmtNode>(*s);
        n->bindings = std::move(bindings);
        n->predicate = std::move(pred);
        n->block = std::move(blk);
        return n;
      }
      case StmtKind::BufferStore: {
        bool changed = false;
        std::vector<Expr> idx;
        idx.reserve(s->indices.size());
        for (const auto& i : s->indices) {
          Expr ni = visit(i);
          changed |= ni != i;
          idx.push_back(std::move(ni));
        }
        Expr v = visit(s->value);
        changed |= v != s->value;
        if (!changed) return s;
        auto n = std::make_shared<StmtNode>(*s);
        n->indices = std::move(idx);
        n->value = std::move(v);
        return n;
      }
      case StmtKind::Seq: {
        bool changed = false;
        std::vector<Stmt> stmts;
        stmts.reserve(s->stmts.size());
        for (const auto& c : s->stmts) {
          Stmt nc = visit(c);
          changed |= nc != c;
          stmts.push_back(std::move(nc));
        }
        if (!changed) return s;
        auto n = std::make_shared<StmtNode>(*s);
        n->stmts = std::move(stmts);
        return n;
      }
      case StmtKind::Evaluate: {
        Expr v = visit(s->expr);
        if (v == s->expr) return s;
        auto n = std::make_shared<StmtNode>(*s);
        n->expr = std::move(v);
        return n;
      }
    }
    return s;
  }

 private:
  // Temporarily removes a shadowed name from the map.
  struct Shadow {
    Shadow(Substituter* self, const std::string& name) : self_(self), name_(name) {
      auto it = self->map_.find(name);
      if (it != self->map_.end()) {
        saved_ = it->second;
        had_ = true;
        self->map_.erase(it);
      }
    }
    ~Shadow() {
      if (had_) self_->map_.emplace(name_, saved_);
    }
    Substituter* self_;
    std::string name_;
    Expr saved_;
    bool had_ = false;
  };

  // Renames a binder when it would capture a free variable of a replacement.
  std::pair<Expr, Stmt> enter_binder(const Expr& binder, const Stmt& body) {
    if (!replacement_free_.count(binder->name) || !map_alive_under(binder->name)) {
      return {binder, body};
    }
    std::string fresh = binder->name;
    do {
      fresh += "_";
    } while (replacement_free_.count(fresh));
    Expr nv = make_var(fresh, binder->dtype);
    Stmt nb = substitute(body, VarMap{{binder->name, nv}});
    return {nv, nb};
  }

  // Capture is only possible if some mapped name other than the binder itself
  // can still fire in the body.
  bool map_alive_under(const std::string& binder) const {
    for (const auto& [k, v] : map_) {
      (void)v;
      if (k != binder) return true;
    }
    return false;
  }

  BlockPtr visit_block(const BlockPtr& b) {
    bool changed = false;
    auto nb = std::make_shared<Block>(*b);
    for (auto& iv : nb->iter_vars) {
      Range nd = visit_range(iv.domain);
      changed |= nd.min != iv.domain.min || nd.extent != iv.domain.extent;
      iv.domain = nd;
    }
    for (auto& r : nb->reads) {
      BufferRegion nr = visit_region(r);
      changed = true;  // regions are cheap; rebuild unconditionally
      r = std::move(nr);
    }
    for (auto& r : nb->writes) r = visit_region(r);
    Stmt init = visit(b->init);
    Stmt body = visit(b->body);
    changed |= init != b->init || body != b->body;
    if (!changed && nb->reads.empty() && nb->writes.empty()) return b;
    nb->init = std::move(init);
    nb->body = std::move(body);
    return nb;
  }

  VarMap map_;
  std::set<std::string> replacement_free_;
};

}  // namespace

Expr substitute(const Expr& e, const VarMap& m) {
  if (m.empty()) return e;
  return Substituter(m).visit(e);
}

Stmt substitute(const Stmt& s, const VarMap& m) {
  if (m.empty()) return s;
  return Substituter(m).visit(s);
}

Range substitute(const Range& r, const VarMap& m) {
  return Range{substitute(r.min, m), substitute(r.extent, m)};
}

BufferRegion substitute(const BufferRegion& r, const VarMap& m) {
  BufferRegion out;
  out.buffer = r.buffer;
  for (const auto& rg : r.ranges) out.ranges.push_back(substitute(rg, m));
  return out;
}

/******** Buffer replacement ********/

Expr replace_buffer(const Expr& e, const std::string& from, const BufferPtr& to) {
  if (!e) return e;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (const auto& a : e->args) {
    Expr na = replace_buffer(a, from, to);
    changed |= na != a;
    args.push_back(std::move(na));
  }
  bool swap = e->kind == ExprKind::BufferLoad && e->buffer->name == from;
  if (!changed && !swap) return e;
  auto n = std::make_shared<ExprNode>(*e);
  n->args = std::move(args);
  if (swap) {
    n->buffer = to;
    n->dtype = to->dtype;
  }
  return n;
}

Stmt replace_buffer(const Stmt& s, const std::string& from, const BufferPtr& to) {
  if (!s) return s;
  auto n = std::make_shared<StmtNode>(*s);
  switch (s->kind) {
    case StmtKind::For:
      n->body = replace_buffer(s->body, from, to);
      break;
    case StmtKind::BlockRealize: {
      auto blk = std::make_shared<Block>(*s->block);
      for (auto& r : blk->reads) {
        if (r.buffer->name == from) r.buffer = to;
      }
      for (auto& r : blk->writes) {
        if (r.buffer->name == from) r.buffer = to;
      }
      for (auto& a : blk->alloc_buffers) {
        if (a->name == from) a = to;
      }
      blk->init = replace_buffer(s->block->init, from, to);
      blk->body = replace_buffer(s->block->body, from, to);
      n->block = blk;
      break;
    }
    case StmtKind::BufferStore: {
      if (s->buffer->name == from) n->buffer = to;
      for (auto& i : n->indices) i = replace_buffer(i, from, to);
      n->value = replace_buffer(s->value, from, to);
      break;
    }
    case StmtKind::Seq:
      for (auto& c : n->stmts) c = replace_buffer(c, from, to);
      break;
    case StmtKind::Evaluate:
      n->expr = replace_buffer(s->expr, from, to);
      break;
  }
  return n;
}

}  // namespace tir
