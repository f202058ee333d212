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
#include "tir/simplify.h"

#include <algorithm>

#include "tir/text.h"

namespace tir {

int64_t floordiv_i64(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t floormod_i64(int64_t a, int64_t b) { return a - floordiv_i64(a, b) * b; }

namespace {

bool is_int_dtype(DType t) { return t == DType::I8 || t == DType::I32; }

/******** Linear forms over integer atoms ********/

struct LinTerm {
  Expr atom;
  std::string key;  // canonical print of atom, for deterministic ordering
  int64_t coeff;
};

struct LinForm {
  std::vector<LinTerm> terms;
  int64_t constant = 0;
  DType dtype = DType::I32;

  void add_term(const Expr& atom, int64_t coeff) {
    if (coeff == 0) return;
    std::string key = print_expr(atom);
    for (auto& t : terms) {
      if (t.key == key) {
        t.coeff += coeff;
        return;
      }
    }
    terms.push_back(LinTerm{atom, std::move(key), coeff});
  }

  void combine(const LinForm& other, int64_t scale) {
    constant += other.constant * scale;
    for (const auto& t : other.terms) add_term(t.atom, t.coeff * scale);
  }

  void prune() {
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const LinTerm& t) { return t.coeff == 0; }),
                terms.end());
    std::sort(terms.begin(), terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.key < b.key; });
  }
};

class Simplifier {
 public:
  explicit Simplifier(const BoundsMap& bounds) : bounds_(bounds) {}

  Expr run(const Expr& e) {
    if (!e) return e;
    switch (e->kind) {
      case ExprKind::Var:
      case ExprKind::IntConst:
      case ExprKind::FloatConst:
        return e;
      default:
        break;
    }
    std::vector<Expr> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) args.push_back(run(a));
    return rebuild(e, std::move(args));
  }

  std::optional<std::pair<int64_t, int64_t>> bounds_of(const Expr& e) {
    switch (e->kind) {
      case ExprKind::IntConst:
        return std::make_pair(e->int_value, e->int_value);
      case ExprKind::Var: {
        auto it = bounds_.find(e->name);
        if (it == bounds_.end()) return std::nullopt;
        int64_t mn, ext;
        if (!as_const_int(it->second.min, &mn) || !as_const_int(it->second.extent, &ext)) {
          return std::nullopt;
        }
        return std::make_pair(mn, mn + ext - 1);
      }
      case ExprKind::Add: {
        auto a = bounds_of(e->args[0]), b = bounds_of(e->args[1]);
        if (!a || !b) return std::nullopt;
        return std::make_pair(a->first + b->first, a->second + b->second);
      }
      case ExprKind::Sub: {
        auto a = bounds_of(e->args[0]), b = bounds_of(e->args[1]);
        if (!a || !b) return std::nullopt;
        return std::make_pair(a->first - b->second, a->second - b->first);
      }
      case ExprKind::Mul: {
        auto a = bounds_of(e->args[0]), b = bounds_of(e->args[1]);
        if (!a || !b) return std::nullopt;
        int64_t c[4] = {a->first * b->first, a->first * b->second, a->second * b->first,
                        a->second * b->second};
        return std::make_pair(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
      }
      case ExprKind::FloorDiv: {
        int64_t c;
        auto a = bounds_of(e->args[0]);
        if (!a || !as_const_int(e->args[1], &c) || c <= 0) return std::nullopt;
        return std::make_pair(floordiv_i64(a->first, c), floordiv_i64(a->second, c));
      }
      case ExprKind::FloorMod: {
        int64_t c;
        auto a = bounds_of(e->args[0]);
        if (!as_const_int(e->args[1], &c) || c <= 0) return std::nullopt;
        if (a && floordiv_i64(a->first, c) == floordiv_i64(a->second, c)) {
          return std::make_pair(floormod_i64(a->first, c), floormod_i64(a->second, c));
        }
        return std::make_pair<int64_t, int64_t>(0, c - 1);
      }
      case ExprKind::Min: {
        auto a = bounds_of(e->args[0]), b = bounds_of(e->args[1]);
        if (!a || !b) return std::nullopt;
        return std::make_pair(std::min(a->first, b->first), std::min(a->second, b->second));
      }
      case ExprKind::Max: {
        auto a = bounds_of(e->args[0]), b = bounds_of(e->args[1]);
        if (!a || !b) return std::nullopt;
        return std::make_pair(std::max(a->first, b->first), std::max(a->second, b->second));
      }
      case ExprKind::Select: {
        auto a = bounds_of(e->args[1]), b = bounds_of(e->args[2]);
        if (!a || !b) return std::nullopt;
        return std::make_pair(std::min(a->first, b->first), std::max(a->second, b->second));
      }
      case ExprKind::Cast: {
        if (!is_int_dtype(e->dtype) || !is_int_dtype(e->args[0]->dtype)) return std::nullopt;
        auto a = bounds_of(e->args[0]);
        if (!a) return std::nullopt;
        if (e->dtype == DType::I8 && (a->first < -128 || a->second > 127)) {
          return std::make_pair<int64_t, int64_t>(-128, 127);
        }
        return a;
      }
      default:
        return std::nullopt;
    }
  }

 private:
  /******** linear decomposition (integer dtypes only) ********/

  LinForm to_linear(const Expr& e) {
    LinForm f;
    f.dtype = e->dtype;
    switch (e->kind) {
      case ExprKind::IntConst:
        f.constant = e->int_value;
        return f;
      case ExprKind::Add: {
        f = to_linear(e->args[0]);
        f.combine(to_linear(e->args[1]), 1);
        return f;
      }
      case ExprKind::Sub: {
        f = to_linear(e->args[0]);
        f.combine(to_linear(e->args[1]), -1);
        return f;
      }
      case ExprKind::Mul: {
        int64_t c;
        if (as_const_int(e->args[1], &c)) {
          f = to_linear(e->args[0]);
          for (auto& t : f.terms) t.coeff *= c;
          f.constant *= c;
          return f;
        }
        if (as_const_int(e->args[0], &c)) {
          f = to_linear(e->args[1]);
          for (auto& t : f.terms) t.coeff *= c;
          f.constant *= c;
          return f;
        }
        f.add_term(e, 1);
        return f;
      }
      default:
        f.add_term(e, 1);
        return f;
    }
  }

  Expr from_linear(LinForm f) {
    f.prune();
    DType dt = f.dtype;
    Expr result;
    auto emit = [&](const Expr& atom, int64_t coeff, bool negative) {
      Expr piece = coeff == 1 ? atom : mul(atom, make_int(coeff, dt));
      if (!result) {
        result = negative ? sub(make_int(0, dt), piece) : piece;
      } else {
        result = negative ? sub(result, piece) : add(result, piece);
      }
    };
    for (const auto& t : f.terms) {
      if (t.coeff > 0) emit(t.atom, t.coeff, false);
    }
    for (const auto& t : f.terms) {
      if (t.coeff < 0) emit(t.atom, -t.coeff, true);
    }
    if (!result) return make_int(f.constant, dt);
    if (f.constant > 0) result = add(result, make_int(f.constant, dt));
    if (f.constant < 0) result = sub(result, make_int(-f.constant, dt));
    return result;
  }

  Expr linear_normalize(const Expr& e) { return from_linear(to_linear(e)); }

  /******** node rebuilding with rules ********/

  Expr rebuild(const Expr& e, std::vector<Expr> args) {
    switch (e->kind) {
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul:
        return arith(e->kind, args[0], args[1]);
      case ExprKind::FloorDiv:
        return floor_div(args[0], args[1]);
      case ExprKind::FloorMod:
        return floor_mod(args[0], args[1]);
      case ExprKind::Min:
      case ExprKind::Max:
        return min_max(e->kind, args[0], args[1]);
      case ExprKind::Lt:
      case ExprKind::Le:
      case ExprKind::Gt:
      case ExprKind::Ge:
      case ExprKind::Eq:
      case ExprKind::Ne:
        return compare(e->kind, args[0], args[1]);
      case ExprKind::And: {
        if (is_true(args[0])) return args[1];
        if (is_true(args[1])) return args[0];
        if (is_const_int(args[0], 0) || is_const_int(args[1], 0)) return make_bool(false);
        return make_binary(ExprKind::And, args[0], args[1]);
      }
      case ExprKind::Or: {
        if (is_const_int(args[0], 0)) return args[1];
        if (is_const_int(args[1], 0)) return args[0];
        if (is_true(args[0]) || is_true(args[1])) return make_bool(true);
        return make_binary(ExprKind::Or, args[0], args[1]);
      }
      case ExprKind::Not: {
        int64_t v;
        if (as_const_int(args[0], &v)) return make_bool(v == 0);
        if (args[0]->kind == ExprKind::Not) return args[0]->args[0];
        return make_not(args[0]);
      }
      case ExprKind::Select: {
        int64_t v;
        if (as_const_int(args[0], &v)) return v ? args[1] : args[2];
        if (print_expr(args[1]) == print_expr(args[2])) return args[1];
        return make_select(args[0], args[1], args[2]);
      }
      case ExprKind::Cast:
        return cast(e->dtype, args[0]);
      case ExprKind::BufferLoad: {
        auto n = std::make_shared<ExprNode>(*e);
        n->args = std::move(args);
        return n;
      }
      case ExprKind::Call: {
        auto n = std::make_shared<ExprNode>(*e);
        n->args = std::move(args);
        return n;
      }
      default:
        return e;
    }
  }

  Expr arith(ExprKind kind, const Expr& a, const Expr& b) {
    if (dtype_is_float(a->dtype)) {
      if (a->kind == ExprKind::FloatConst && b->kind == ExprKind::FloatConst) {
        float x = static_cast<float>(a->float_value);
        float y = static_cast<float>(b->float_value);
        float r = kind == ExprKind::Add ? x + y : kind == ExprKind::Sub ? x - y : x * y;
        return make_float(r, a->dtype);
      }
      return make_binary(kind, a, b);
    }
    return linear_normalize(make_binary(kind, a, b));
  }

  Expr floor_div(const Expr& a, const Expr& b) {
    int64_t c;
    if (!as_const_int(b, &c) || c <= 0) return make_binary(ExprKind::FloorDiv, a, b);
    if (c == 1) return a;
    LinForm f = to_linear(a);
    // (c*q + r) / c == q + r / c; pull out the part of each coefficient
    // divisible by c and fold the remainder with bound information.
    LinForm quotient, remainder;
    quotient.dtype = remainder.dtype = f.dtype;
    for (const auto& t : f.terms) {
      int64_t q = floordiv_i64(t.coeff, c);
      int64_t r = t.coeff - q * c;
      if (q != 0) quotient.add_term(t.atom, q);
      if (r != 0) remainder.add_term(t.atom, r);
    }
    quotient.constant = floordiv_i64(f.constant, c);
    remainder.constant = f.constant - quotient.constant * c;
    Expr rem = from_linear(remainder);
    auto rb = bounds_of(rem);
    if (rb && floordiv_i64(rb->first, c) == floordiv_i64(rb->second, c)) {
      quotient.constant += floordiv_i64(rb->first, c);
      return from_linear(quotient);
    }
    Expr div = make_binary(ExprKind::FloorDiv, rem, make_int(c, f.dtype));
    if (quotient.terms.empty() && quotient.constant == 0) return div;
    quotient.add_term(div, 1);
    return from_linear(quotient);
  }

  Expr floor_mod(const Expr& a, const Expr& b) {
    int64_t c;
    if (!as_const_int(b, &c) || c <= 0) return make_binary(ExprKind::FloorMod, a, b);
    if (c == 1) return make_int(0, a->dtype);
    LinForm f = to_linear(a);
    LinForm remainder;
    remainder.dtype = f.dtype;
    for (const auto& t : f.terms) {
      int64_t r = floormod_i64(t.coeff, c);
      if (r != 0) remainder.add_term(t.atom, r);
    }
    remainder.constant = floormod_i64(f.constant, c);
    Expr rem = from_linear(remainder);
    auto rb = bounds_of(rem);
    if (rb && floordiv_i64(rb->first, c) == floordiv_i64(rb->second, c)) {
      // all values share one quotient: x mod c == x - c*(x/c)
      int64_t q = floordiv_i64(rb->first, c);
      if (q == 0) return rem;
      remainder.constant -= q * c;
      return from_linear(remainder);
    }
    return make_binary(ExprKind::FloorMod, rem, make_int(c, f.dtype));
  }

  Expr min_max(ExprKind kind, const Expr& a, const Expr& b) {
    std::string ka = print_expr(a), kb = print_expr(b);
    if (ka == kb) return a;
    if (a->kind == ExprKind::IntConst && b->kind == ExprKind::IntConst) {
      int64_t r = kind == ExprKind::Min ? std::min(a->int_value, b->int_value)
                                        : std::max(a->int_value, b->int_value);
      return make_int(r, a->dtype);
    }
    if (a->kind == ExprKind::FloatConst && b->kind == ExprKind::FloatConst) {
      double r = kind == ExprKind::Min ? std::min(a->float_value, b->float_value)
                                       : std::max(a->float_value, b->float_value);
      return make_float(r, a->dtype);
    }
    if (is_int_dtype(a->dtype)) {
      auto d = bounds_of(arith(ExprKind::Sub, a, b));  // a - b, normalized
      if (d) {
        if (d->second <= 0) return kind == ExprKind::Min ? a : b;
        if (d->first >= 0) return kind == ExprKind::Min ? b : a;
      }
    }
    // canonical operand order
    if (kb < ka) return make_binary(kind, b, a);
    return make_binary(kind, a, b);
  }

  Expr compare(ExprKind kind, const Expr& a, const Expr& b) {
    if (a->kind == ExprKind::IntConst && b->kind == ExprKind::IntConst) {
      return make_bool(eval_cmp(kind, a->int_value, b->int_value));
    }
    if (a->kind == ExprKind::FloatConst && b->kind == ExprKind::FloatConst) {
      return make_bool(eval_cmp_f(kind, a->float_value, b->float_value));
    }
    if (is_int_dtype(a->dtype)) {
      auto d = bounds_of(arith(ExprKind::Sub, a, b));  // a - b, normalized
      if (d) {
        auto [lo, hi] = *d;
        switch (kind) {
          case ExprKind::Lt:
            if (hi < 0) return make_bool(true);
            if (lo >= 0) return make_bool(false);
            break;
          case ExprKind::Le:
            if (hi <= 0) return make_bool(true);
            if (lo > 0) return make_bool(false);
            break;
          case ExprKind::Gt:
            if (lo > 0) return make_bool(true);
            if (hi <= 0) return make_bool(false);
            break;
          case ExprKind::Ge:
            if (lo >= 0) return make_bool(true);
            if (hi < 0) return make_bool(false);
            break;
          case ExprKind::Eq:
            if (lo == 0 && hi == 0) return make_bool(true);
            if (lo > 0 || hi < 0) return make_bool(false);
            break;
          case ExprKind::Ne:
            if (lo > 0 || hi < 0) return make_bool(true);
            if (lo == 0 && hi == 0) return make_bool(false);
            break;
          default:
            break;
        }
      }
    }
    return make_binary(kind, a, b);
  }

  static bool eval_cmp(ExprKind k, int64_t a, int64_t b) {
    switch (k) {
      case ExprKind::Lt: return a < b;
      case ExprKind::Le: return a <= b;
      case ExprKind::Gt: return a > b;
      case ExprKind::Ge: return a >= b;
      case ExprKind::Eq: return a == b;
      default: return a != b;
    }
  }

  static bool eval_cmp_f(ExprKind k, double a, double b) {
    switch (k) {
      case ExprKind::Lt: return a < b;
      case ExprKind::Le: return a <= b;
      case ExprKind::Gt: return a > b;
      case ExprKind::Ge: return a >= b;
      case ExprKind::Eq: return a == b;
      default: return a != b;
    }
  }

  Expr cast(DType target, const Expr& v) {
    if (v->dtype == target) return v;
    if (v->kind == ExprKind::IntConst) {
      if (is_int_dtype(target) || target == DType::Bool) {
        int64_t x = v->int_value;
        if (target == DType::I8) x = static_cast<int8_t>(x);
        return make_int(x, target);
      }
      return make_float(static_cast<double>(v->int_value), target);
    }
    if (v->kind == ExprKind::FloatConst) {
      if (is_int_dtype(target)) {
        return make_int(static_cast<int64_t>(v->float_value), target);
      }
      if (dtype_is_float(target)) {
        return make_float(static_cast<float>(v->float_value), target);
      }
    }
    return make_cast(target, v);
  }

  const BoundsMap& bounds_;
};

}  // namespace

Expr simplify(const Expr& e, const BoundsMap& bounds) { return Simplifier(bounds).run(e); }

std::optional<std::pair<int64_t, int64_t>> const_int_bounds(const Expr& e,
                                                            const BoundsMap& bounds) {
  Simplifier s(bounds);
  return s.bounds_of(simplify(e, bounds));
}

bool prove(const Expr& cond, const BoundsMap& bounds) { return is_true(simplify(cond, bounds)); }

namespace {

Stmt simplify_stmt_impl(const Stmt& s, BoundsMap& bounds) {
  if (!s) return s;
  auto n = std::make_shared<StmtNode>(*s);
  switch (s->kind) {
    case StmtKind::For: {
      n->extent = simplify(s->extent, bounds);
      bounds[s->loop_var->name] = Range{make_int(0), n->extent};
      n->body = simplify_stmt_impl(s->body, bounds);
      bounds.erase(s->loop_var->name);
      break;
    }
    case StmtKind::BlockRealize: {
      for (auto& b : n->bindings) b = simplify(b, bounds);
      n->predicate = simplify(s->predicate, bounds);
      auto blk = std::make_shared<Block>(*s->block);
      for (auto& iv : blk->iter_vars) {
        iv.domain.min = simplify(iv.domain.min, bounds);
        iv.domain.extent = simplify(iv.domain.extent, bounds);
        bounds[iv.var->name] = iv.domain;
      }
      for (auto& r : blk->reads) {
        for (auto& rg : r.ranges) {
          rg.min = simplify(rg.min, bounds);
          rg.extent = simplify(rg.extent, bounds);
        }
      }
      for (auto& r : blk->writes) {
        for (auto& rg : r.ranges) {
          rg.min = simplify(rg.min, bounds);
          rg.extent = simplify(rg.extent, bounds);
        }
      }
      blk->init = simplify_stmt_impl(s->block->init, bounds);
      blk->body = simplify_stmt_impl(s->block->body, bounds);
      for (const auto& iv : blk->iter_vars) bounds.erase(iv.var->name);
      n->block = blk;
      break;
    }
    case StmtKind::BufferStore: {
      for (auto& i : n->indices) i = simplify(i, bounds);
      n->value = simplify(s->value, bounds);
      break;
    }
    case StmtKind::Seq: {
      for (auto& c : n->stmts) c = simplify_stmt_impl(c, bounds);
      break;
    }
    case StmtKind::Evaluate:
      n->expr = simplify(s->expr, bounds);
      break;
  }
  return n;
}

}  // namespace

Stmt simplify_stmt(const Stmt& s, const BoundsMap& bounds) {
  BoundsMap b = bounds;
  return simplify_stmt_impl(s, b);
}

std::optional<int64_t> eval_int_expr(const Expr& e, const std::map<std::string, int64_t>& env) {
  switch (e->kind) {
    case ExprKind::Var: {
      auto it = env.find(e->name);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case ExprKind::IntConst:
      return e->int_value;
    case ExprKind::Not: {
      auto a = eval_int_expr(e->args[0], env);
      if (!a) return std::nullopt;
      return *a == 0 ? 1 : 0;
    }
    case ExprKind::Select: {
      auto c = eval_int_expr(e->args[0], env);
      if (!c) return std::nullopt;
      return eval_int_expr(e->args[*c ? 1 : 2], env);
    }
    case ExprKind::Cast: {
      auto a = eval_int_expr(e->args[0], env);
      if (!a || !is_int_dtype(e->dtype)) return std::nullopt;
      if (e->dtype == DType::I8) return static_cast<int8_t>(*a);
      return a;
    }
    default:
      break;
  }
  if (e->args.size() != 2) return std::nullopt;
  auto a = eval_int_expr(e->args[0], env);
  auto b = eval_int_expr(e->args[1], env);
  if (!a || !b) return std::nullopt;
  switch (e->kind) {
    case ExprKind::Add: return *a + *b;
    case ExprKind::Sub: return *a - *b;
    case ExprKind::Mul: return *a * *b;
    case ExprKind::FloorDiv:
      if (*b == 0) return std::nullopt;
      return floordiv_i64(*a, *b);
    case ExprKind::FloorMod:
      if (*b == 0) return std::nullopt;
      return floormod_i64(*a, *b);
    case ExprKind::Min: return std::min(*a, *b);
    case ExprKind::Max: return std::max(*a, *b);
    case ExprKind::Lt: return *a < *b;
    case ExprKind::Le: return *a <= *b;
    case ExprKind::Gt: return *a > *b;
    case ExprKind::Ge: return *a >= *b;
    case ExprKind::Eq: return *a == *b;
    case ExprKind::Ne: return *a != *b;
    case ExprKind::And: return (*a != 0) && (*b != 0);
    case ExprKind::Or: return (*a != 0) || (*b != 0);
    default:
      return std::nullopt;
  }
}

}  // namespace tir
