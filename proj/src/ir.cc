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
#include "tir/ir.h"

#include <algorithm>

namespace tir {

const char* dtype_name(DType t) {
  switch (t) {
    case DType::I8: return "i8";
    case DType::I32: return "i32";
    case DType::F16: return "f16";
    case DType::F32: return "f32";
    case DType::Bool: return "bool";
  }
  return "?";
}

bool dtype_is_float(DType t) { return t == DType::F32 || t == DType::F16; }

int dtype_size_bytes(DType t) {
  switch (t) {
    case DType::I8: return 1;
    case DType::I32: return 4;
    case DType::F16: return 4;  // stored as f32
    case DType::F32: return 4;
    case DType::Bool: return 1;
  }
  return 4;
}

/******** Expr factories ********/

static Expr finish(std::shared_ptr<ExprNode> n) { return n; }

Expr make_var(std::string name, DType dtype) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Var;
  n->dtype = dtype;
  n->name = std::move(name);
  return finish(n);
}

Expr make_int(int64_t value, DType dtype) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::IntConst;
  n->dtype = dtype;
  n->int_value = value;
  return finish(n);
}

Expr make_float(double value, DType dtype) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::FloatConst;
  n->dtype = dtype;
  n->float_value = value;
  return finish(n);
}

Expr make_bool(bool value) { return make_int(value ? 1 : 0, DType::Bool); }

static bool is_comparison(ExprKind k) {
  return k == ExprKind::Lt || k == ExprKind::Le || k == ExprKind::Gt || k == ExprKind::Ge ||
         k == ExprKind::Eq || k == ExprKind::Ne;
}

static bool is_logical(ExprKind k) { return k == ExprKind::And || k == ExprKind::Or; }

Expr make_binary(ExprKind kind, Expr a, Expr b) {
  if (!a || !b) throw_error("InternalError", "null operand in binary expression");
  if (a->dtype != b->dtype) {
    throw_error("TypeError", std::string("operand dtype mismatch: ") + dtype_name(a->dtype) +
                                 " vs " + dtype_name(b->dtype));
  }
  if (is_logical(kind) && a->dtype != DType::Bool) {
    throw_error("TypeError", "logical operator requires bool operands");
  }
  if ((kind == ExprKind::FloorDiv || kind == ExprKind::FloorMod) && dtype_is_float(a->dtype)) {
    throw_error("TypeError", "floor division requires integer operands");
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->dtype = is_comparison(kind) || is_logical(kind) ? DType::Bool : a->dtype;
  n->args = {std::move(a), std::move(b)};
  return finish(n);
}

Expr make_not(Expr a) {
  if (a->dtype != DType::Bool) throw_error("TypeError", "'not' requires a bool operand");
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Not;
  n->dtype = DType::Bool;
  n->args = {std::move(a)};
  return finish(n);
}

Expr make_select(Expr cond, Expr true_value, Expr false_value) {
  if (cond->dtype != DType::Bool) throw_error("TypeError", "select condition must be bool");
  if (true_value->dtype != false_value->dtype) {
    throw_error("TypeError", "select branches must have the same dtype");
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Select;
  n->dtype = true_value->dtype;
  n->args = {std::move(cond), std::move(true_value), std::move(false_value)};
  return finish(n);
}

Expr make_cast(DType dtype, Expr value) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Cast;
  n->dtype = dtype;
  n->args = {std::move(value)};
  return finish(n);
}

Expr make_load(BufferPtr buffer, std::vector<Expr> indices) {
  if (!buffer) throw_error("InternalError", "load from null buffer");
  if (indices.size() != buffer->shape.size()) {
    throw_error("ArityError", "load of '" + buffer->name + "' has " +
                                  std::to_string(indices.size()) + " indices, buffer has " +
                                  std::to_string(buffer->shape.size()) + " dimensions");
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::BufferLoad;
  n->dtype = buffer->dtype;
  n->buffer = std::move(buffer);
  n->args = std::move(indices);
  return finish(n);
}

Expr make_call(std::string name, std::vector<Expr> args) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Call;
  n->dtype = DType::I32;
  n->name = std::move(name);
  n->args = std::move(args);
  return finish(n);
}

bool as_const_int(const Expr& e, int64_t* out) {
  if (e && e->kind == ExprKind::IntConst) {
    *out = e->int_value;
    return true;
  }
  return false;
}

bool is_const_int(const Expr& e, int64_t value) {
  int64_t v;
  return as_const_int(e, &v) && v == value;
}

bool is_true(const Expr& e) {
  int64_t v;
  return as_const_int(e, &v) && v != 0;
}

/******** Buffers ********/

int64_t Buffer::num_elements() const {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::vector<int64_t> Buffer::effective_strides() const {
  if (!strides.empty()) return strides;
  std::vector<int64_t> s(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) {
    s[i] = s[i + 1] * shape[i + 1];
  }
  return s;
}

int64_t Buffer::alloc_size() const {
  if (shape.empty()) return 1;
  auto s = effective_strides();
  int64_t last = 1;
  for (size_t i = 0; i < shape.size(); ++i) {
    // max flat index + 1
    last += (shape[i] - 1) * s[i];
  }
  return last;
}

BufferPtr make_buffer(std::string name, DType dtype, std::vector<int64_t> shape, std::string scope,
                      std::vector<int64_t> strides) {
  for (int64_t d : shape) {
    if (d < 1) throw_error("ValueError", "buffer '" + name + "' has non-positive extent");
  }
  if (!strides.empty() && strides.size() != shape.size()) {
    throw_error("ValueError", "buffer '" + name + "' stride rank mismatch");
  }
  auto b = std::make_shared<Buffer>();
  b->name = std::move(name);
  b->dtype = dtype;
  b->shape = std::move(shape);
  b->scope = std::move(scope);
  b->strides = std::move(strides);
  return b;
}

Range make_range(Expr min, Expr extent) { return Range{std::move(min), std::move(extent)}; }

Range const_range(int64_t min, int64_t extent) {
  return Range{make_int(min), make_int(extent)};
}

const char* iter_kind_name(IterKind k) {
  switch (k) {
    case IterKind::DataParallel: return "spatial";
    case IterKind::Reduction: return "reduce";
    case IterKind::Opaque: return "opaque";
  }
  return "?";
}

/******** Stmt factories ********/

Stmt make_for(Expr loop_var, Expr extent, Stmt body, ForKind kind, std::string thread_tag) {
  if (loop_var->kind != ExprKind::Var) throw_error("InternalError", "loop variable must be a Var");
  int64_t v;
  if (as_const_int(extent, &v) && v <= 0) {
    throw_error("ValueError", "loop extent must be positive, got " + std::to_string(v));
  }
  auto n = std::make_shared<StmtNode>();
  n->kind = StmtKind::For;
  n->loop_var = std::move(loop_var);
  n->extent = std::move(extent);
  n->for_kind = kind;
  n->thread_tag = std::move(thread_tag);
  n->body = std::move(body);
  return n;
}

Stmt make_block_realize(std::vector<Expr> bindings, Expr predicate, BlockPtr block) {
  if (!block) throw_error("InternalError", "realize of null block");
  if (bindings.size() != block->iter_vars.size()) {
    throw_error("ArityError", "block '" + block->name + "' has " +
                                  std::to_string(block->iter_vars.size()) + " iterators but " +
                                  std::to_string(bindings.size()) + " bindings");
  }
  if (!predicate) predicate = make_bool(true);
  if (predicate->dtype != DType::Bool) {
    throw_error("TypeError", "block predicate must be boolean");
  }
  if (block->init) {
    bool has_reduction = std::any_of(block->iter_vars.begin(), block->iter_vars.end(),
                                     [](const IterVar& iv) { return iv.kind == IterKind::Reduction; });
    if (!has_reduction) {
      throw_error("ValueError", "block '" + block->name + "' has init but no reduction iterator");
    }
  }
  auto n = std::make_shared<StmtNode>();
  n->kind = StmtKind::BlockRealize;
  n->bindings = std::move(bindings);
  n->predicate = std::move(predicate);
  n->block = std::move(block);
  return n;
}

Stmt make_store(BufferPtr buffer, std::vector<Expr> indices, Expr value) {
  if (indices.size() != buffer->shape.size()) {
    throw_error("ArityError", "store to '" + buffer->name + "' index rank mismatch");
  }
  if (value->dtype != buffer->dtype) {
    throw_error("TypeError", "store to '" + buffer->name + "' of dtype " +
                                 dtype_name(buffer->dtype) + " from value of dtype " +
                                 dtype_name(value->dtype));
  }
  auto n = std::make_shared<StmtNode>();
  n->kind = StmtKind::BufferStore;
  n->buffer = std::move(buffer);
  n->indices = std::move(indices);
  n->value = std::move(value);
  return n;
}

Stmt make_seq(std::vector<Stmt> stmts) {
  std::vector<Stmt> flat;
  for (auto& s : stmts) {
    if (!s) continue;
    if (s->kind == StmtKind::Seq) {
      flat.insert(flat.end(), s->stmts.begin(), s->stmts.end());
    } else {
      flat.push_back(std::move(s));
    }
  }
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<StmtNode>();
  n->kind = StmtKind::Seq;
  n->stmts = std::move(flat);
  return n;
}

Stmt make_evaluate(Expr e) {
  auto n = std::make_shared<StmtNode>();
  n->kind = StmtKind::Evaluate;
  n->expr = std::move(e);
  return n;
}

PrimFuncPtr make_func(std::string name, std::vector<BufferPtr> params, Stmt body) {
  if (!body || body->kind != StmtKind::BlockRealize || !body->block->iter_vars.empty()) {
    throw_error("ValueError", "function body must be a root block with zero iterators");
  }
  auto f = std::make_shared<PrimFunc>();
  f->name = std::move(name);
  f->params = std::move(params);
  f->body = std::move(body);
  return f;
}

/******** Traversal utilities ********/

void post_order_exprs(const Expr& e, const std::function<void(const Expr&)>& fn) {
  if (!e) return;
  for (const auto& a : e->args) post_order_exprs(a, fn);
  fn(e);
}

void collect_free_vars(const Expr& e, std::set<std::string>* out) {
  post_order_exprs(e, [out](const Expr& n) {
    if (n->kind == ExprKind::Var) out->insert(n->name);
  });
}

bool uses_any_var(const Expr& e, const std::set<std::string>& names) {
  bool found = false;
  post_order_exprs(e, [&](const Expr& n) {
    if (n->kind == ExprKind::Var && names.count(n->name)) found = true;
  });
  return found;
}

void pre_order_stmts(const Stmt& s, const std::function<bool(const Stmt&)>& fn) {
  if (!s) return;
  if (!fn(s)) return;
  switch (s->kind) {
    case StmtKind::For:
      pre_order_stmts(s->body, fn);
      break;
    case StmtKind::BlockRealize:
      pre_order_stmts(s->block->init, fn);
      pre_order_stmts(s->block->body, fn);
      break;
    case StmtKind::Seq:
      for (const auto& c : s->stmts) pre_order_stmts(c, fn);
      break;
    default:
      break;
  }
}

/******** Well-formedness ********/

namespace {

class WellFormedChecker {
 public:
  explicit WellFormedChecker(const PrimFunc& f) : func_(f) {}

  void run() {
    for (const auto& p : func_.params) declare_buffer(p);
    const StmtNode* root = func_.body.get();
    if (!root->block->reads.empty() || !root->block->writes.empty()) {
      throw_error("ValueError", "root block must have empty reads/writes");
    }
    visit_stmt(func_.body);
  }

 private:
  void declare_buffer(const BufferPtr& b) {
    if (!buffer_names_.insert(b->name).second) {
      throw_error("ValueError", "duplicate buffer name '" + b->name + "'");
    }
  }

  void declare_var(const std::string& name) {
    if (!var_names_.insert(name).second) {
      throw_error("ValueError", "duplicate variable name '" + name + "' (names must be unique)");
    }
    scope_.push_back(name);
  }

  void check_expr(const Expr& e) {
    post_order_exprs(e, [this](const Expr& n) {
      if (n->kind == ExprKind::Var) {
        if (std::find(scope_.begin(), scope_.end(), n->name) == scope_.end()) {
          throw_error("ValueError", "free variable '" + n->name + "' is not in scope");
        }
      } else if (n->kind == ExprKind::BufferLoad) {
        if (!buffer_names_.count(n->buffer->name)) {
          throw_error("ValueError", "load from undeclared buffer '" + n->buffer->name + "'");
        }
      }
    });
  }

  void check_region(const BufferRegion& r) {
    if (r.ranges.size() != r.buffer->shape.size()) {
      throw_error("ArityError", "region rank mismatch on buffer '" + r.buffer->name + "'");
    }
    for (const auto& rg : r.ranges) {
      check_expr(rg.min);
      check_expr(rg.extent);
    }
  }

  void visit_stmt(const Stmt& s) {
    switch (s->kind) {
      case StmtKind::For: {
        check_expr(s->extent);
        size_t mark = scope_.size();
        declare_var(s->loop_var->name);
        visit_stmt(s->body);
        pop_to(mark);
        break;
      }
      case StmtKind::BlockRealize: {
        for (const auto& b : s->bindings) check_expr(b);
        check_expr(s->predicate);
        const Block& blk = *s->block;
        if (!block_names_.insert(blk.name).second) {
          throw_error("ValueError", "duplicate block name '" + blk.name + "'");
        }
        size_t mark = scope_.size();
        for (const auto& iv : blk.iter_vars) {
          check_expr(iv.domain.min);
          check_expr(iv.domain.extent);
          declare_var(iv.var->name);
        }
        for (const auto& b : blk.alloc_buffers) declare_buffer(b);
        for (const auto& r : blk.reads) check_region(r);
        for (const auto& r : blk.writes) check_region(r);
        if (blk.init) visit_stmt(blk.init);
        visit_stmt(blk.body);
        pop_to(mark);
        break;
      }
      case StmtKind::BufferStore: {
        if (!buffer_names_.count(s->buffer->name)) {
          throw_error("ValueError", "store to undeclared buffer '" + s->buffer->name + "'");
        }
        for (const auto& i : s->indices) check_expr(i);
        check_expr(s->value);
        break;
      }
      case StmtKind::Seq:
        for (const auto& c : s->stmts) visit_stmt(c);
        break;
      case StmtKind::Evaluate:
        check_expr(s->expr);
        break;
    }
  }

  void pop_to(size_t mark) {
    while (scope_.size() > mark) {
      var_names_.erase(scope_.back());
      scope_.pop_back();
    }
  }

  const PrimFunc& func_;
  std::vector<std::string> scope_;
  std::set<std::string> var_names_;
  std::set<std::string> buffer_names_;
  std::set<std::string> block_names_;
};

}  // namespace

void check_well_formed(const PrimFunc& f) { WellFormedChecker(f).run(); }

}  // namespace tir
