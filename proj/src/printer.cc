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
#include <charconv>
#include <sstream>

#include "tir/text.h"

namespace tir {

namespace {

// Higher binds tighter.
int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Or: return 1;
    case ExprKind::And: return 2;
    case ExprKind::Not: return 3;
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Gt:
    case ExprKind::Ge:
    case ExprKind::Eq:
    case ExprKind::Ne: return 4;
    case ExprKind::Add:
    case ExprKind::Sub: return 5;
    case ExprKind::Mul:
    case ExprKind::FloorDiv:
    case ExprKind::FloorMod: return 6;
    default: return 7;  // atoms
  }
}

const char* op_token(ExprKind k) {
  switch (k) {
    case ExprKind::Add: return " + ";
    case ExprKind::Sub: return " - ";
    case ExprKind::Mul: return "*";
    case ExprKind::FloorDiv: return "/";
    case ExprKind::FloorMod: return "%";
    case ExprKind::Lt: return " < ";
    case ExprKind::Le: return " <= ";
    case ExprKind::Gt: return " > ";
    case ExprKind::Ge: return " >= ";
    case ExprKind::Eq: return " == ";
    case ExprKind::Ne: return " != ";
    case ExprKind::And: return " and ";
    case ExprKind::Or: return " or ";
    default: return "?";
  }
}

std::string float_literal(double v, DType dtype) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  if (dtype == DType::F16) s += "f16";
  return s;
}

class Printer {
 public:
  std::string expr(const Expr& e) {
    std::ostringstream os;
    print_expr(os, e, 0);
    return os.str();
  }

  void print_expr(std::ostringstream& os, const Expr& e, int parent_prec) {
    int prec = precedence(e->kind);
    switch (e->kind) {
      case ExprKind::Var:
        os << e->name;
        return;
      case ExprKind::IntConst:
        if (e->dtype == DType::Bool) {
          os << (e->int_value ? "true" : "false");
        } else {
          os << e->int_value;
          if (e->dtype == DType::I8) os << "i8";
        }
        return;
      case ExprKind::FloatConst:
        os << float_literal(e->float_value, e->dtype);
        return;
      case ExprKind::Not:
        if (prec < parent_prec) os << "(";
        os << "not ";
        print_expr(os, e->args[0], prec);
        if (prec < parent_prec) os << ")";
        return;
      case ExprKind::Select:
        os << "select(";
        print_expr(os, e->args[0], 0);
        os << ", ";
        print_expr(os, e->args[1], 0);
        os << ", ";
        print_expr(os, e->args[2], 0);
        os << ")";
        return;
      case ExprKind::Min:
      case ExprKind::Max:
        os << (e->kind == ExprKind::Min ? "min(" : "max(");
        print_expr(os, e->args[0], 0);
        os << ", ";
        print_expr(os, e->args[1], 0);
        os << ")";
        return;
      case ExprKind::Cast:
        os << dtype_name(e->dtype) << "(";
        print_expr(os, e->args[0], 0);
        os << ")";
        return;
      case ExprKind::BufferLoad:
        os << e->buffer->name << "[";
        for (size_t i = 0; i < e->args.size(); ++i) {
          if (i) os << ", ";
          print_expr(os, e->args[i], 0);
        }
        os << "]";
        return;
      case ExprKind::Call:
        os << e->name << "(";
        for (size_t i = 0; i < e->args.size(); ++i) {
          if (i) os << ", ";
          print_expr(os, e->args[i], 0);
        }
        os << ")";
        return;
      default: {
        // binary operators
        if (prec < parent_prec) os << "(";
        print_expr(os, e->args[0], prec);
        os << op_token(e->kind);
        // right operand needs a strictly-higher context to keep left associativity
        print_expr(os, e->args[1], prec + 1);
        if (prec < parent_prec) os << ")";
        return;
      }
    }
  }

  void buffer_decl(std::ostringstream& os, const Buffer& b) {
    os << b.name << ": " << dtype_name(b.dtype) << "[";
    for (size_t i = 0; i < b.shape.size(); ++i) {
      if (i) os << ", ";
      os << b.shape[i];
    }
    os << "]";
    if (b.scope != "global") os << " scope(\"" << b.scope << "\")";
    if (!b.strides.empty()) {
      os << " strides(";
      for (size_t i = 0; i < b.strides.size(); ++i) {
        if (i) os << ", ";
        os << b.strides[i];
      }
      os << ")";
    }
  }

  void region(std::ostringstream& os, const BufferRegion& r) {
    os << r.buffer->name << "[";
    for (size_t i = 0; i < r.ranges.size(); ++i) {
      if (i) os << ", ";
      print_expr(os, r.ranges[i].min, 0);
      os << " +: ";
      print_expr(os, r.ranges[i].extent, 0);
    }
    os << "]";
  }

  void stmt(std::ostringstream& os, const Stmt& s, int indent) {
    std::string pad(2 * indent, ' ');
    switch (s->kind) {
      case StmtKind::For: {
        os << pad << "for " << s->loop_var->name << " in 0..";
        print_expr(os, s->extent, 7);
        switch (s->for_kind) {
          case ForKind::Serial: break;
          case ForKind::Parallel: os << " parallel"; break;
          case ForKind::Vectorized: os << " vectorized"; break;
          case ForKind::Unrolled: os << " unrolled"; break;
          case ForKind::ThreadBound: os << " thread(" << s->thread_tag << ")"; break;
        }
        os << " {\n";
        stmt(os, s->body, indent + 1);
        os << pad << "}\n";
        return;
      }
      case StmtKind::BlockRealize: {
        const Block& b = *s->block;
        os << pad << "block " << b.name << "(";
        for (size_t i = 0; i < b.iter_vars.size(); ++i) {
          if (i) os << ", ";
          const IterVar& iv = b.iter_vars[i];
          os << iter_kind_name(iv.kind) << " " << iv.var->name << ": ";
          print_expr(os, iv.domain.extent, 7);
          os << " = ";
          print_expr(os, s->bindings[i], 0);
        }
        os << ")";
        if (!b.reads.empty()) {
          os << " reads(";
          for (size_t i = 0; i < b.reads.size(); ++i) {
            if (i) os << ", ";
            region(os, b.reads[i]);
          }
          os << ")";
        }
        if (!b.writes.empty()) {
          os << " writes(";
          for (size_t i = 0; i < b.writes.size(); ++i) {
            if (i) os << ", ";
            region(os, b.writes[i]);
          }
          os << ")";
        }
        if (!b.annotations.empty()) {
          os << " attrs(";
          bool first = true;
          for (const auto& [k, v] : b.annotations) {
            if (!first) os << ", ";
            first = false;
            os << "\"" << k << "\" = \"" << v << "\"";
          }
          os << ")";
        }
        if (!is_true(s->predicate)) {
          os << " if ";
          print_expr(os, s->predicate, 0);
        }
        os << " {\n";
        std::string inner_pad(2 * (indent + 1), ' ');
        for (const auto& ab : b.alloc_buffers) {
          os << inner_pad << "alloc ";
          buffer_decl(os, *ab);
          os << "\n";
        }
        if (b.init) {
          os << inner_pad << "init {\n";
          stmt(os, b.init, indent + 2);
          os << inner_pad << "}\n";
        }
        stmt(os, b.body, indent + 1);
        os << pad << "}\n";
        return;
      }
      case StmtKind::BufferStore: {
        os << pad << s->buffer->name << "[";
        for (size_t i = 0; i < s->indices.size(); ++i) {
          if (i) os << ", ";
          print_expr(os, s->indices[i], 0);
        }
        os << "] = ";
        print_expr(os, s->value, 0);
        os << "\n";
        return;
      }
      case StmtKind::Seq:
        for (const auto& c : s->stmts) stmt(os, c, indent);
        return;
      case StmtKind::Evaluate:
        if (s->expr->kind == ExprKind::Call) {
          os << pad;
          print_expr(os, s->expr, 0);
          os << "\n";
        } else {
          os << pad << "eval ";
          print_expr(os, s->expr, 0);
          os << "\n";
        }
        return;
    }
  }
};

}  // namespace

std::string print_expr(const Expr& e) { return Printer().expr(e); }

std::string print_stmt(const Stmt& s, int indent) {
  std::ostringstream os;
  Printer().stmt(os, s, indent);
  return os.str();
}

std::string print_region(const BufferRegion& r) {
  std::ostringstream os;
  Printer().region(os, r);
  return os.str();
}

std::string print_text(const PrimFunc& f) {
  std::ostringstream os;
  Printer p;
  os << "func " << f.name << "(";
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (i) os << ", ";
    p.buffer_decl(os, *f.params[i]);
  }
  os << ") {\n";
  p.stmt(os, f.body, 1);
  os << "}\n";
  return os.str();
}

std::string print_text(const PrimFuncPtr& f) { return print_text(*f); }

}  // namespace tir
