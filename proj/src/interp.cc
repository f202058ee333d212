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
#include "tir/interp.h"

#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "tir/simplify.h"
#include "tir/text.h"

namespace tir {

/******** TensorValue ********/

static std::vector<int64_t> dense_strides(const std::vector<int64_t>& shape) {
  std::vector<int64_t> s(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * shape[i + 1];
  return s;
}

TensorValue TensorValue::zeros(DType dtype, std::vector<int64_t> shape,
                               std::vector<int64_t> strides) {
  TensorValue t;
  t.dtype = dtype;
  t.shape = std::move(shape);
  t.strides = strides.empty() ? dense_strides(t.shape) : std::move(strides);
  t.data.assign(t.storage_elements() * t.elem_bytes(), 0);
  return t;
}

TensorValue TensorValue::zeros_like(const Buffer& b) {
  return zeros(b.dtype, b.shape, b.effective_strides());
}

int64_t TensorValue::num_elements() const {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

int64_t TensorValue::storage_elements() const {
  if (shape.empty()) return 1;
  int64_t last = 1;
  for (size_t i = 0; i < shape.size(); ++i) last += (shape[i] - 1) * strides[i];
  return last;
}

int64_t TensorValue::elem_bytes() const { return dtype == DType::I8 ? 1 : 4; }

double TensorValue::get_f(int64_t flat) const {
  float v;
  std::memcpy(&v, data.data() + flat * 4, 4);
  return v;
}

void TensorValue::set_f(int64_t flat, double v) {
  float f = static_cast<float>(v);
  std::memcpy(data.data() + flat * 4, &f, 4);
}

int64_t TensorValue::get_i(int64_t flat) const {
  if (dtype == DType::I8) return static_cast<int8_t>(data[flat]);
  int32_t v;
  std::memcpy(&v, data.data() + flat * 4, 4);
  return v;
}

void TensorValue::set_i(int64_t flat, int64_t v) {
  if (dtype == DType::I8) {
    data[flat] = static_cast<uint8_t>(static_cast<int8_t>(v));
    return;
  }
  int32_t x = static_cast<int32_t>(v);
  std::memcpy(data.data() + flat * 4, &x, 4);
}

int64_t TensorValue::flat_index(const std::vector<int64_t>& idx) const {
  int64_t flat = 0;
  for (size_t i = 0; i < idx.size(); ++i) flat += idx[i] * strides[i];
  return flat;
}

int64_t TensorView::flat(const std::vector<int64_t>& idx) const {
  std::vector<int64_t> full(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= extents_[i]) {
      throw_error("OutOfBounds", "view index " + std::to_string(idx[i]) + " outside extent " +
                                     std::to_string(extents_[i]));
    }
    full[i] = offsets_[i] + idx[i];
  }
  return tensor_->flat_index(full);
}

/******** cost ********/

int64_t CostCounters::total_bytes_moved() const {
  int64_t n = 0;
  for (const auto& [k, v] : bytes_moved) {
    (void)k;
    n += v;
  }
  return n;
}

double CostWeights::rank(const std::string& scope) const {
  auto it = scope_rank.find(scope);
  if (it != scope_rank.end()) return it->second;
  return 2.0;  // custom scopes
}

CostMetric compute_cost(const CostCounters& counters, const CostWeights& weights) {
  CostMetric m;
  m.counters = counters;
  double byte_cost = 0;
  for (const auto& [pair, bytes] : counters.bytes_moved) {
    byte_cost += static_cast<double>(bytes) * (weights.rank(pair.first) + weights.rank(pair.second));
  }
  m.simulated_cost = weights.scalar_op * static_cast<double>(counters.scalar_ops) +
                     weights.intrinsic_call * static_cast<double>(counters.intrinsic_calls) +
                     weights.byte_moved * byte_cost +
                     weights.loop_trip * static_cast<double>(counters.loop_trip_overhead);
  return m;
}

/******** ExecContext ********/

void ExecContext::register_host_kernel(const std::string& name, HostKernel kernel) {
  if (kernels_.count(name)) {
    throw_error("DuplicateName", "intrinsic '" + name + "' is already registered");
  }
  kernels_[name] = std::move(kernel);
}

bool ExecContext::has_kernel(const std::string& name) const { return kernels_.count(name) > 0; }

const HostKernel& ExecContext::kernel(const std::string& name) const {
  auto it = kernels_.find(name);
  if (it == kernels_.end()) {
    throw_error("UnregisteredIntrinsic", "no host kernel registered for '" + name + "'");
  }
  return it->second;
}

CostMetric ExecContext::cost_report(const CostWeights& weights) const {
  if (!completed_run) throw_error("NoRun", "cost_report before any completed run");
  CostMetric m = compute_cost(counters, weights);
  m.wall_time_seconds = last_wall_time;
  return m;
}

/******** param classification ********/

namespace {

void classify_params(const PrimFunc& f, std::set<std::string>* read, std::set<std::string>* written) {
  pre_order_stmts(f.body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize) {
      for (const auto& r : s->block->reads) read->insert(r.buffer->name);
      for (const auto& r : s->block->writes) written->insert(r.buffer->name);
    } else if (s->kind == StmtKind::BufferStore) {
      written->insert(s->buffer->name);
    }
    return true;
  });
}

}  // namespace

std::vector<BufferPtr> input_params(const PrimFunc& f) {
  std::set<std::string> read, written;
  classify_params(f, &read, &written);
  std::vector<BufferPtr> out;
  for (const auto& p : f.params) {
    if (read.count(p->name)) out.push_back(p);
  }
  return out;
}

std::vector<BufferPtr> output_params(const PrimFunc& f) {
  std::set<std::string> read, written;
  classify_params(f, &read, &written);
  std::vector<BufferPtr> out;
  for (const auto& p : f.params) {
    if (written.count(p->name)) out.push_back(p);
  }
  return out;
}

/******** interpreter ********/

namespace {

struct SVal {
  DType dt = DType::I32;
  int64_t i = 0;
  double f = 0;
};

class Interp {
 public:
  Interp(const PrimFunc& f, ExecContext& ctx) : func_(f), ctx_(ctx) {}

  std::vector<TensorValue> run(const std::vector<TensorValue>& inputs) {
    auto in = input_params(func_);
    auto out = output_params(func_);
    if (inputs.size() != in.size()) {
      throw_error("ValueError", func_.name + " expects " + std::to_string(in.size()) +
                                    " input tensors, got " + std::to_string(inputs.size()));
    }
    std::unordered_map<std::string, TensorValue> storage;
    for (size_t i = 0; i < in.size(); ++i) {
      const Buffer& b = *in[i];
      if (inputs[i].dtype != b.dtype || inputs[i].shape != b.shape) {
        throw_error("ValueError", "input tensor " + std::to_string(i) + " does not match param '" +
                                      b.name + "'");
      }
      storage[b.name] = inputs[i];
      storage[b.name].strides = b.effective_strides();
      if (!inputs[i].strides.empty() && inputs[i].strides != storage[b.name].strides) {
        storage[b.name] = repack(inputs[i], b);
      }
    }
    for (const auto& p : func_.params) {
      if (!storage.count(p->name)) storage[p->name] = TensorValue::zeros_like(*p);
    }
    for (auto& [name, t] : storage) buffers_[name] = &t;

    exec(func_.body);

    std::vector<TensorValue> results;
    for (const auto& p : out) results.push_back(storage.at(p->name));
    return results;
  }

 private:
  static TensorValue repack(const TensorValue& src, const Buffer& b) {
    TensorValue dst = TensorValue::zeros_like(b);
    std::vector<int64_t> idx(b.shape.size(), 0);
    for (;;) {
      int64_t sflat = src.flat_index(idx);
      int64_t dflat = dst.flat_index(idx);
      if (dtype_is_float(b.dtype)) {
        dst.set_f(dflat, src.get_f(sflat));
      } else {
        dst.set_i(dflat, src.get_i(sflat));
      }
      int d = static_cast<int>(idx.size()) - 1;
      while (d >= 0 && ++idx[d] == b.shape[d]) idx[d--] = 0;
      if (d < 0) break;
    }
    return dst;
  }

  void exec(const Stmt& s) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::For: {
        int64_t extent = eval_index(s->extent);
        ctx_.counters.loop_trip_overhead += extent;
        for (int64_t v = 0; v < extent; ++v) {
          vars_[s->loop_var->name] = v;
          exec(s->body);
        }
        vars_.erase(s->loop_var->name);
        return;
      }
      case StmtKind::Seq:
        for (const auto& c : s->stmts) exec(c);
        return;
      case StmtKind::BufferStore: {
        TensorValue* t = buffer(s->buffer->name);
        store_scope_ = s->buffer->scope;
        std::vector<int64_t> idx(s->indices.size());
        for (size_t i = 0; i < s->indices.size(); ++i) idx[i] = eval_index(s->indices[i]);
        check_bounds(*s->buffer, idx);
        SVal v = eval(s->value, /*count=*/true);
        if (dtype_is_float(s->buffer->dtype)) {
          t->set_f(t->flat_index(idx), as_f(v));
        } else {
          t->set_i(t->flat_index(idx), as_i(v));
        }
        ctx_.counters.bytes_moved[{s->buffer->scope, s->buffer->scope}] +=
            dtype_size_bytes(s->buffer->dtype);
        store_scope_.clear();
        return;
      }
      case StmtKind::Evaluate: {
        if (s->expr->kind == ExprKind::Call) {
          dispatch_call(s->expr);
        } else {
          eval(s->expr, /*count=*/true);
        }
        return;
      }
      case StmtKind::BlockRealize: {
        // bindings, then predicate
        std::vector<int64_t> iter_values(s->bindings.size());
        for (size_t i = 0; i < s->bindings.size(); ++i) {
          iter_values[i] = eval_index(s->bindings[i]);
        }
        for (size_t i = 0; i < s->bindings.size(); ++i) {
          vars_[s->block->iter_vars[i].var->name] = iter_values[i];
        }
        SVal pred = eval(s->predicate, /*count=*/false);
        if (pred.i != 0) {
          const Block& blk = *s->block;
          std::vector<std::pair<std::string, TensorValue>> allocs;
          for (const auto& ab : blk.alloc_buffers) {
            allocs.emplace_back(ab->name, TensorValue::zeros_like(*ab));
          }
          for (auto& [name, t] : allocs) buffers_[name] = &t;
          realize_stack_.push_back(s);
          std::string prev_block = block_name_;
          block_name_ = blk.name;

          if (blk.init) {
            bool first = true;
            for (size_t i = 0; i < blk.iter_vars.size(); ++i) {
              if (blk.iter_vars[i].kind == IterKind::Reduction && iter_values[i] != 0) {
                first = false;
              }
            }
            if (first) exec(blk.init);
          }
          exec(blk.body);

          block_name_ = prev_block;
          realize_stack_.pop_back();
          for (const auto& [name, t] : allocs) {
            (void)t;
            buffers_.erase(name);
          }
        }
        for (const auto& iv : s->block->iter_vars) vars_.erase(iv.var->name);
        return;
      }
    }
  }

  void dispatch_call(const Expr& call) {
    const HostKernel& kernel = ctx_.kernel(call->name);
    if (realize_stack_.empty()) {
      throw_error("UnregisteredIntrinsic",
                  "intrinsic call '" + call->name + "' outside any block");
    }
    const Stmt& realize = realize_stack_.back();
    const Block& blk = *realize->block;
    if (blk.writes.size() != 1) {
      throw_error("InternalError", "tensorized block '" + blk.name + "' must write one region");
    }
    std::vector<TensorView> views;
    views.push_back(view_of(blk.writes[0]));
    for (const auto& r : blk.reads) views.push_back(view_of(r));
    ctx_.counters.intrinsic_calls += 1;
    const std::string& out_scope = blk.writes[0].buffer->scope;
    for (const auto& r : blk.reads) {
      int64_t cells = 1;
      for (const auto& rg : r.ranges) cells *= eval_index(rg.extent);
      ctx_.counters.bytes_moved[{r.buffer->scope, out_scope}] +=
          cells * dtype_size_bytes(r.buffer->dtype);
    }
    kernel(views);
  }

  TensorView view_of(const BufferRegion& r) {
    std::vector<int64_t> offsets, extents;
    for (const auto& rg : r.ranges) {
      offsets.push_back(eval_index(rg.min));
      extents.push_back(eval_index(rg.extent));
    }
    for (size_t d = 0; d < offsets.size(); ++d) {
      if (offsets[d] < 0 || offsets[d] + extents[d] > r.buffer->shape[d]) {
        throw_error("OutOfBounds", "operand region of '" + r.buffer->name +
                                       "' escapes the buffer in dimension " + std::to_string(d));
      }
    }
    return TensorView(buffer(r.buffer->name), std::move(offsets), std::move(extents));
  }

  TensorValue* buffer(const std::string& name) {
    auto it = buffers_.find(name);
    if (it == buffers_.end()) throw_error("InternalError", "unbound buffer '" + name + "'");
    return it->second;
  }

  void check_bounds(const Buffer& b, const std::vector<int64_t>& idx) {
    for (size_t d = 0; d < idx.size(); ++d) {
      if (idx[d] < 0 || idx[d] >= b.shape[d]) {
        throw_error("OutOfBounds", "index " + std::to_string(idx[d]) + " outside [0, " +
                                       std::to_string(b.shape[d]) + ") in dimension " +
                                       std::to_string(d) + " of buffer '" + b.name + "'");
      }
    }
  }

  int64_t eval_index(const Expr& e) { return eval(e, /*count=*/false).i; }

  static double as_f(const SVal& v) { return dtype_is_float(v.dt) ? v.f : static_cast<double>(v.i); }
  static int64_t as_i(const SVal& v) {
    return dtype_is_float(v.dt) ? static_cast<int64_t>(v.f) : v.i;
  }

  SVal eval(const Expr& e, bool count) {
    switch (e->kind) {
      case ExprKind::Var: {
        auto it = vars_.find(e->name);
        if (it == vars_.end()) throw_error("InternalError", "unbound variable '" + e->name + "'");
        return SVal{DType::I32, it->second, 0};
      }
      case ExprKind::IntConst:
        return SVal{e->dtype, e->int_value, 0};
      case ExprKind::FloatConst:
        return SVal{e->dtype, 0, static_cast<float>(e->float_value)};
      case ExprKind::BufferLoad: {
        TensorValue* t = buffer(e->buffer->name);
        std::vector<int64_t> idx(e->args.size());
        for (size_t i = 0; i < e->args.size(); ++i) idx[i] = eval(e->args[i], false).i;
        check_bounds(*e->buffer, idx);
        const std::string& dst = store_scope_.empty() ? e->buffer->scope : store_scope_;
        ctx_.counters.bytes_moved[{e->buffer->scope, dst}] += dtype_size_bytes(e->buffer->dtype);
        SVal v;
        v.dt = e->buffer->dtype;
        if (dtype_is_float(v.dt)) {
          v.f = t->get_f(t->flat_index(idx));
        } else {
          v.i = t->get_i(t->flat_index(idx));
        }
        return v;
      }
      case ExprKind::Cast: {
        SVal v = eval(e->args[0], count);
        SVal r;
        r.dt = e->dtype;
        if (dtype_is_float(e->dtype)) {
          r.f = static_cast<float>(as_f(v));
        } else if (e->dtype == DType::I8) {
          r.i = static_cast<int8_t>(as_i(v));
        } else {
          r.i = static_cast<int32_t>(as_i(v));
        }
        return r;
      }
      case ExprKind::Select: {
        SVal c = eval(e->args[0], count);
        return eval(c.i ? e->args[1] : e->args[2], count);
      }
      case ExprKind::Not: {
        SVal v = eval(e->args[0], count);
        return SVal{DType::Bool, v.i == 0 ? 1 : 0, 0};
      }
      case ExprKind::Call:
        throw_error("UnregisteredIntrinsic",
                    "intrinsic call '" + e->name + "' cannot be evaluated as a value");
      default:
        break;
    }

    SVal a = eval(e->args[0], count);
    SVal b = eval(e->args[1], count);
    bool arith_op = false;
    SVal r;
    r.dt = e->dtype;
    switch (e->kind) {
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul:
      case ExprKind::Min:
      case ExprKind::Max: {
        arith_op = true;
        if (dtype_is_float(e->dtype)) {
          float x = static_cast<float>(as_f(a));
          float y = static_cast<float>(as_f(b));
          float out;
          switch (e->kind) {
            case ExprKind::Add: out = x + y; break;
            case ExprKind::Sub: out = x - y; break;
            case ExprKind::Mul: out = x * y; break;
            case ExprKind::Min: out = std::min(x, y); break;
            default: out = std::max(x, y); break;
          }
          r.f = out;
        } else {
          int64_t x = a.i, y = b.i;
          switch (e->kind) {
            case ExprKind::Add: r.i = x + y; break;
            case ExprKind::Sub: r.i = x - y; break;
            case ExprKind::Mul: r.i = x * y; break;
            case ExprKind::Min: r.i = std::min(x, y); break;
            default: r.i = std::max(x, y); break;
          }
        }
        break;
      }
      case ExprKind::FloorDiv:
      case ExprKind::FloorMod: {
        arith_op = true;
        if (b.i == 0) throw_error("ValueError", "division by zero");
        r.i = e->kind == ExprKind::FloorDiv ? floordiv_i64(a.i, b.i) : floormod_i64(a.i, b.i);
        break;
      }
      case ExprKind::Lt:
      case ExprKind::Le:
      case ExprKind::Gt:
      case ExprKind::Ge:
      case ExprKind::Eq:
      case ExprKind::Ne: {
        bool res;
        if (dtype_is_float(a.dt)) {
          double x = as_f(a), y = as_f(b);
          switch (e->kind) {
            case ExprKind::Lt: res = x < y; break;
            case ExprKind::Le: res = x <= y; break;
            case ExprKind::Gt: res = x > y; break;
            case ExprKind::Ge: res = x >= y; break;
            case ExprKind::Eq: res = x == y; break;
            default: res = x != y; break;
          }
        } else {
          int64_t x = a.i, y = b.i;
          switch (e->kind) {
            case ExprKind::Lt: res = x < y; break;
            case ExprKind::Le: res = x <= y; break;
            case ExprKind::Gt: res = x > y; break;
            case ExprKind::Ge: res = x >= y; break;
            case ExprKind::Eq: res = x == y; break;
            default: res = x != y; break;
          }
        }
        r.i = res ? 1 : 0;
        break;
      }
      case ExprKind::And:
        r.i = (a.i != 0 && b.i != 0) ? 1 : 0;
        break;
      case ExprKind::Or:
        r.i = (a.i != 0 || b.i != 0) ? 1 : 0;
        break;
      default:
        throw_error("InternalError", "unhandled expression kind in interpreter");
    }
    if (arith_op && count) {
      ctx_.counters.scalar_ops += 1;
      ctx_.counters.scalar_ops_by_block[block_name_] += 1;
    }
    return r;
  }

  const PrimFunc& func_;
  ExecContext& ctx_;
  std::unordered_map<std::string, int64_t> vars_;
  std::unordered_map<std::string, TensorValue*> buffers_;
  std::vector<Stmt> realize_stack_;
  std::string store_scope_;
  std::string block_name_;
};

}  // namespace

std::vector<TensorValue> run(const PrimFunc& f, const std::vector<TensorValue>& inputs,
                             ExecContext& ctx) {
  auto start = std::chrono::steady_clock::now();
  Interp interp(f, ctx);
  auto out = interp.run(inputs);
  ctx.completed_run = true;
  if (ctx.record_wall_time) {
    ctx.last_wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

/******** scalar kernels from descriptions ********/

HostKernel make_scalar_kernel(const PrimFuncPtr& desc,
                              const std::vector<std::string>& operand_params) {
  // find the compute block (the unique one with iterators)
  Stmt compute;
  pre_order_stmts(desc->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize && !s->block->iter_vars.empty()) compute = s;
    return true;
  });
  if (!compute) throw_error("InternalError", "description has no compute block");
  BlockPtr blk = compute->block;

  return [blk, operand_params](std::vector<TensorView>& views) {
    if (views.size() != operand_params.size()) {
      throw_error("InternalError", "operand count mismatch in scalar kernel");
    }
    std::map<std::string, TensorView*> by_name;
    for (size_t i = 0; i < operand_params.size(); ++i) by_name[operand_params[i]] = &views[i];

    std::map<std::string, int64_t> env;
    std::function<SVal(const Expr&)> ev = [&](const Expr& e) -> SVal {
      switch (e->kind) {
        case ExprKind::Var: return SVal{DType::I32, env.at(e->name), 0};
        case ExprKind::IntConst: return SVal{e->dtype, e->int_value, 0};
        case ExprKind::FloatConst: return SVal{e->dtype, 0, static_cast<float>(e->float_value)};
        case ExprKind::BufferLoad: {
          TensorView* v = by_name.at(e->buffer->name);
          std::vector<int64_t> idx;
          for (const auto& a : e->args) idx.push_back(ev(a).i);
          SVal r;
          r.dt = e->buffer->dtype;
          if (dtype_is_float(r.dt)) {
            r.f = static_cast<float>(v->get_f(idx));
          } else {
            r.i = v->get_i(idx);
          }
          return r;
        }
        case ExprKind::Cast: {
          SVal v = ev(e->args[0]);
          SVal r;
          r.dt = e->dtype;
          if (dtype_is_float(e->dtype)) {
            r.f = static_cast<float>(dtype_is_float(v.dt) ? v.f : static_cast<double>(v.i));
          } else {
            int64_t raw = dtype_is_float(v.dt) ? static_cast<int64_t>(v.f) : v.i;
            r.i = e->dtype == DType::I8 ? static_cast<int8_t>(raw) : static_cast<int32_t>(raw);
          }
          return r;
        }
        default: {
          SVal a = ev(e->args[0]);
          SVal b = ev(e->args[1]);
          SVal r;
          r.dt = e->dtype;
          if (dtype_is_float(e->dtype)) {
            float x = static_cast<float>(a.f), y = static_cast<float>(b.f);
            switch (e->kind) {
              case ExprKind::Add: r.f = x + y; break;
              case ExprKind::Sub: r.f = x - y; break;
              case ExprKind::Mul: r.f = x * y; break;
              case ExprKind::Min: r.f = std::min(x, y); break;
              case ExprKind::Max: r.f = std::max(x, y); break;
              default: throw_error("InternalError", "unsupported op in description body");
            }
          } else {
            int64_t x = a.i, y = b.i;
            switch (e->kind) {
              case ExprKind::Add: r.i = x + y; break;
              case ExprKind::Sub: r.i = x - y; break;
              case ExprKind::Mul: r.i = x * y; break;
              case ExprKind::Min: r.i = std::min(x, y); break;
              case ExprKind::Max: r.i = std::max(x, y); break;
              case ExprKind::FloorDiv: r.i = floordiv_i64(x, y); break;
              case ExprKind::FloorMod: r.i = floormod_i64(x, y); break;
              default: throw_error("InternalError", "unsupported op in description body");
            }
          }
          return r;
        }
      }
    };

    std::function<void(const Stmt&)> run_stmt = [&](const Stmt& s) {
      if (!s) return;
      switch (s->kind) {
        case StmtKind::For: {
          int64_t extent = ev(s->extent).i;
          for (int64_t v = 0; v < extent; ++v) {
            env[s->loop_var->name] = v;
            run_stmt(s->body);
          }
          env.erase(s->loop_var->name);
          return;
        }
        case StmtKind::Seq:
          for (const auto& c : s->stmts) run_stmt(c);
          return;
        case StmtKind::BufferStore: {
          TensorView* v = by_name.at(s->buffer->name);
          std::vector<int64_t> idx;
          for (const auto& i : s->indices) idx.push_back(ev(i).i);
          SVal val = ev(s->value);
          if (dtype_is_float(s->buffer->dtype)) {
            v->set_f(idx, val.f);
          } else {
            v->set_i(idx, val.i);
          }
          return;
        }
        default:
          throw_error("InternalError", "unsupported statement in description body");
      }
    };

    // iterate the block's own domain; the body indexes views directly
    std::vector<int64_t> extents;
    for (const auto& iv : blk->iter_vars) {
      int64_t ext;
      if (!as_const_int(iv.domain.extent, &ext)) {
        throw_error("InternalError", "description iterator domain must be constant");
      }
      extents.push_back(ext);
    }
    std::vector<int64_t> iter(extents.size(), 0);
    for (;;) {
      for (size_t i = 0; i < iter.size(); ++i) env[blk->iter_vars[i].var->name] = iter[i];
      run_stmt(blk->body);
      int d = static_cast<int>(iter.size()) - 1;
      while (d >= 0 && ++iter[d] == extents[d]) iter[d--] = 0;
      if (d < 0) break;
    }
  };
}

/******** tensor file I/O ********/

TensorValue read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error("ValueError", "cannot open tensor file '" + path + "'");
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string dt_name;
  hs >> dt_name;
  DType dt;
  if (dt_name == "f32") {
    dt = DType::F32;
  } else if (dt_name == "i32") {
    dt = DType::I32;
  } else if (dt_name == "i8") {
    dt = DType::I8;
  } else if (dt_name == "f16") {
    dt = DType::F16;
  } else {
    throw_error("ValueError", "bad tensor header in '" + path + "'");
  }
  std::vector<int64_t> shape;
  int64_t d;
  while (hs >> d) shape.push_back(d);
  TensorValue t = TensorValue::zeros(dt, shape);
  in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(t.data.size())) {
    throw_error("ValueError", "tensor file '" + path + "' is truncated");
  }
  return t;
}

void write_tensor(const std::string& path, const TensorValue& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error("ValueError", "cannot write tensor file '" + path + "'");
  out << dtype_name(t.dtype);
  for (int64_t d : t.shape) out << " " << d;
  out << "\n";
  out.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size()));
}

}  // namespace tir
