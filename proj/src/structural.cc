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
#include <unordered_map>

#include "tir/structural.h"

namespace tir {

namespace {

class Comparator {
 public:
  explicit Comparator(bool remap_vars) : remap_(remap_vars) {}

  bool expr(const Expr& a, const Expr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->dtype != b->dtype) return false;
    switch (a->kind) {
      case ExprKind::Var:
        return var(a->name, b->name);
      case ExprKind::IntConst:
        return a->int_value == b->int_value;
      case ExprKind::FloatConst:
        // bit-compare so that -0.0 and NaN payloads stay distinguishable
        return a->float_value == b->float_value ||
               (a->float_value != a->float_value && b->float_value != b->float_value);
      case ExprKind::BufferLoad:
        if (!buffer(a->buffer, b->buffer)) return false;
        break;
      case ExprKind::Call:
        if (a->name != b->name) return false;
        break;
      default:
        break;
    }
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i) {
      if (!expr(a->args[i], b->args[i])) return false;
    }
    return true;
  }

  bool range(const Range& a, const Range& b) {
    return expr(a.min, b.min) && expr(a.extent, b.extent);
  }

  bool region(const BufferRegion& a, const BufferRegion& b) {
    if (!buffer(a.buffer, b.buffer) || a.ranges.size() != b.ranges.size()) return false;
    for (size_t i = 0; i < a.ranges.size(); ++i) {
      if (!range(a.ranges[i], b.ranges[i])) return false;
    }
    return true;
  }

  bool buffer(const BufferPtr& a, const BufferPtr& b) {
    if (a == b) return true;
    return a->name == b->name && a->dtype == b->dtype && a->shape == b->shape &&
           a->scope == b->scope && a->strides == b->strides;
  }

  bool stmt(const Stmt& a, const Stmt& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case StmtKind::For: {
        if (a->for_kind != b->for_kind || a->thread_tag != b->thread_tag) return false;
        if (!expr(a->extent, b->extent)) return false;
        if (!bind(a->loop_var->name, b->loop_var->name)) return false;
        return stmt(a->body, b->body);
      }
      case StmtKind::BlockRealize: {
        if (a->bindings.size() != b->bindings.size()) return false;
        for (size_t i = 0; i < a->bindings.size(); ++i) {
          if (!expr(a->bindings[i], b->bindings[i])) return false;
        }
        if (!expr(a->predicate, b->predicate)) return false;
        return block(*a->block, *b->block);
      }
      case StmtKind::BufferStore: {
        if (!buffer(a->buffer, b->buffer)) return false;
        if (a->indices.size() != b->indices.size()) return false;
        for (size_t i = 0; i < a->indices.size(); ++i) {
          if (!expr(a->indices[i], b->indices[i])) return false;
        }
        return expr(a->value, b->value);
      }
      case StmtKind::Seq: {
        if (a->stmts.size() != b->stmts.size()) return false;
        for (size_t i = 0; i < a->stmts.size(); ++i) {
          if (!stmt(a->stmts[i], b->stmts[i])) return false;
        }
        return true;
      }
      case StmtKind::Evaluate:
        return expr(a->expr, b->expr);
    }
    return false;
  }

  bool block(const Block& a, const Block& b) {
    if (!remap_ && a.name != b.name) return false;
    if (a.iter_vars.size() != b.iter_vars.size()) return false;
    for (size_t i = 0; i < a.iter_vars.size(); ++i) {
      const IterVar& x = a.iter_vars[i];
      const IterVar& y = b.iter_vars[i];
      if (x.kind != y.kind) return false;
      if (!range(x.domain, y.domain)) return false;
      if (!bind(x.var->name, y.var->name)) return false;
    }
    if (a.reads.size() != b.reads.size() || a.writes.size() != b.writes.size()) return false;
    for (size_t i = 0; i < a.reads.size(); ++i) {
      if (!region(a.reads[i], b.reads[i])) return false;
    }
    for (size_t i = 0; i < a.writes.size(); ++i) {
      if (!region(a.writes[i], b.writes[i])) return false;
    }
    if (a.alloc_buffers.size() != b.alloc_buffers.size()) return false;
    for (size_t i = 0; i < a.alloc_buffers.size(); ++i) {
      if (!buffer(a.alloc_buffers[i], b.alloc_buffers[i])) return false;
    }
    if (a.annotations != b.annotations) return false;
    if ((a.init == nullptr) != (b.init == nullptr)) return false;
    if (a.init && !stmt(a.init, b.init)) return false;
    return stmt(a.body, b.body);
  }

  bool func(const PrimFunc& a, const PrimFunc& b) {
    if (!remap_ && a.name != b.name) return false;
    if (a.params.size() != b.params.size()) return false;
    for (size_t i = 0; i < a.params.size(); ++i) {
      if (!buffer(a.params[i], b.params[i])) return false;
    }
    return stmt(a.body, b.body);
  }

 private:
  bool bind(const std::string& lhs, const std::string& rhs) {
    if (!remap_) return lhs == rhs;
    fwd_[lhs] = rhs;
    rev_[rhs] = lhs;
    return true;
  }

  bool var(const std::string& lhs, const std::string& rhs) {
    if (!remap_) return lhs == rhs;
    auto f = fwd_.find(lhs);
    auto r = rev_.find(rhs);
    if (f == fwd_.end() && r == rev_.end()) {
      // first encounter of a free variable pair establishes the mapping
      fwd_[lhs] = rhs;
      rev_[rhs] = lhs;
      return true;
    }
    return f != fwd_.end() && r != rev_.end() && f->second == rhs && r->second == lhs;
  }

  bool remap_;
  std::unordered_map<std::string, std::string> fwd_;
  std::unordered_map<std::string, std::string> rev_;
};

}  // namespace

bool structural_equal(const Expr& a, const Expr& b, bool remap_vars) {
  return Comparator(remap_vars).expr(a, b);
}

bool structural_equal(const Stmt& a, const Stmt& b, bool remap_vars) {
  return Comparator(remap_vars).stmt(a, b);
}

bool structural_equal(const PrimFunc& a, const PrimFunc& b, bool remap_vars) {
  return Comparator(remap_vars).func(a, b);
}

}  // namespace tir
