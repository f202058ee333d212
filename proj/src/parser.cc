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
#include <cctype>
#include <cstdlib>
#include <optional>
#include <unordered_map>

#include "tir/subst.h"
#include "tir/text.h"

namespace tir {

namespace {

enum class Tok {
  Ident, Int, Float, Str,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Colon, Assign, EqEq, NotEq, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash, Percent, DotDot, PlusColon, Dot,
  End,
};

struct Token {
  Tok type;
  std::string text;
  int64_t int_value = 0;
  double float_value = 0;
  DType literal_dtype = DType::I32;
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw_error("SyntaxError", msg + " at line " + std::to_string(at.line) + ", column " +
                                   std::to_string(at.col));
  }

 private:
  void advance() {
    skip_space();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.type = Tok::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        take();
      }
      tok_.type = Tok::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number();
      return;
    }
    switch (c) {
      case '"': {
        take();
        size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '"') take();
        if (pos_ >= src_.size()) fail("unterminated string", tok_);
        tok_.type = Tok::Str;
        tok_.text = src_.substr(start, pos_ - start);
        take();
        return;
      }
      case '(': take(); tok_.type = Tok::LParen; return;
      case ')': take(); tok_.type = Tok::RParen; return;
      case '{': take(); tok_.type = Tok::LBrace; return;
      case '}': take(); tok_.type = Tok::RBrace; return;
      case '[': take(); tok_.type = Tok::LBracket; return;
      case ']': take(); tok_.type = Tok::RBracket; return;
      case ',': take(); tok_.type = Tok::Comma; return;
      case ':': take(); tok_.type = Tok::Colon; return;
      case '*': take(); tok_.type = Tok::Star; return;
      case '/': take(); tok_.type = Tok::Slash; return;
      case '%': take(); tok_.type = Tok::Percent; return;
      case '-': take(); tok_.type = Tok::Minus; return;
      case '+':
        take();
        if (pos_ < src_.size() && src_[pos_] == ':') {
          take();
          tok_.type = Tok::PlusColon;
        } else {
          tok_.type = Tok::Plus;
        }
        return;
      case '.':
        take();
        if (pos_ < src_.size() && src_[pos_] == '.') {
          take();
          tok_.type = Tok::DotDot;
        } else {
          tok_.type = Tok::Dot;
        }
        return;
      case '=':
        take();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          take();
          tok_.type = Tok::EqEq;
        } else {
          tok_.type = Tok::Assign;
        }
        return;
      case '!':
        take();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          take();
          tok_.type = Tok::NotEq;
          return;
        }
        fail("unexpected '!'", tok_);
      case '<':
        take();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          take();
          tok_.type = Tok::Le;
        } else {
          tok_.type = Tok::Lt;
        }
        return;
      case '>':
        take();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          take();
          tok_.type = Tok::Ge;
        } else {
          tok_.type = Tok::Gt;
        }
        return;
      default:
        fail(std::string("unexpected character '") + c + "'", tok_);
    }
  }

  void lex_number() {
    size_t start = pos_;
    bool is_float = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
    // '.' starts a fraction only when not the '..' range token
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && src_[pos_ + 1] != '.') {
      is_float = true;
      take();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      is_float = true;
      take();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) take();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
    }
    std::string body = src_.substr(start, pos_ - start);
    // optional dtype suffix: 5i8, 1.5f16
    std::string suffix;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])))) {
      suffix += src_[pos_];
      take();
    }
    if (is_float) {
      tok_.type = Tok::Float;
      tok_.float_value = std::strtod(body.c_str(), nullptr);
      tok_.literal_dtype = DType::F32;
      if (suffix == "f16") {
        tok_.literal_dtype = DType::F16;
      } else if (!suffix.empty()) {
        fail("bad float literal suffix '" + suffix + "'", tok_);
      }
    } else {
      tok_.type = Tok::Int;
      tok_.int_value = std::strtoll(body.c_str(), nullptr, 10);
      tok_.literal_dtype = DType::I32;
      if (suffix == "i8") {
        tok_.literal_dtype = DType::I8;
      } else if (suffix == "f16") {
        tok_.type = Tok::Float;
        tok_.float_value = static_cast<double>(tok_.int_value);
        tok_.literal_dtype = DType::F16;
      } else if (!suffix.empty()) {
        fail("bad integer literal suffix '" + suffix + "'", tok_);
      }
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  void take() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

std::optional<DType> dtype_from_name(const std::string& s) {
  if (s == "f32") return DType::F32;
  if (s == "i32") return DType::I32;
  if (s == "i8") return DType::I8;
  if (s == "f16") return DType::F16;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ParsedProgram program() {
    ParsedProgram out;
    while (lex_.peek().type != Tok::End) {
      Token t = lex_.peek();
      if (t.type == Tok::Ident && t.text == "func") {
        out.funcs.push_back(func());
      } else if (t.type == Tok::Ident && t.text == "intrin") {
        out.intrins.push_back(intrin());
      } else {
        lex_.fail("expected 'func' or 'intrin'", t);
      }
    }
    return out;
  }

  PrimFuncPtr single_func() {
    expect_keyword("func");
    PrimFuncPtr f = func_after_keyword();
    Token t = lex_.peek();
    if (t.type != Tok::End) lex_.fail("trailing input after function", t);
    return f;
  }

  Expr expr_entry() {
    Expr e = expr();
    if (lex_.peek().type != Tok::End) lex_.fail("trailing input after expression", lex_.peek());
    return e;
  }

 private:
  /******** helpers ********/

  Token expect(Tok type, const char* what) {
    Token t = lex_.next();
    if (t.type != type) lex_.fail(std::string("expected ") + what, t);
    return t;
  }

  void expect_keyword(const std::string& kw) {
    Token t = lex_.next();
    if (t.type != Tok::Ident || t.text != kw) lex_.fail("expected '" + kw + "'", t);
  }

  bool accept_keyword(const std::string& kw) {
    if (lex_.peek().type == Tok::Ident && lex_.peek().text == kw) {
      lex_.next();
      return true;
    }
    return false;
  }

  bool accept(Tok type) {
    if (lex_.peek().type == type) {
      lex_.next();
      return true;
    }
    return false;
  }

  std::string dotted_name(Token first) {
    std::string name = first.text;
    while (lex_.peek().type == Tok::Dot) {
      lex_.next();
      Token part = expect(Tok::Ident, "identifier after '.'");
      name += "." + part.text;
    }
    return name;
  }

  /******** functions ********/

  PrimFuncPtr func() {
    expect_keyword("func");
    return func_after_keyword();
  }

  PrimFuncPtr func_after_keyword() {
    Token name_tok = expect(Tok::Ident, "function name");
    std::string name = dotted_name(name_tok);
    expect(Tok::LParen, "'('");
    std::vector<BufferPtr> params;
    if (lex_.peek().type != Tok::RParen) {
      do {
        params.push_back(buffer_decl());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    for (const auto& p : params) buffers_[p->name] = p;
    expect(Tok::LBrace, "'{'");
    Token body_tok = lex_.peek();
    Stmt body = stmt();
    if (body->kind != StmtKind::BlockRealize) {
      lex_.fail("function body must be a single root block", body_tok);
    }
    expect(Tok::RBrace, "'}'");
    buffers_.clear();
    PrimFuncPtr f = make_func(name, std::move(params), std::move(body));
    check_well_formed(*f);
    return f;
  }

  BufferPtr buffer_decl() {
    Token name = expect(Tok::Ident, "buffer name");
    expect(Tok::Colon, "':'");
    Token dt_tok = expect(Tok::Ident, "dtype");
    auto dt = dtype_from_name(dt_tok.text);
    if (!dt) lex_.fail("unknown dtype '" + dt_tok.text + "'", dt_tok);
    expect(Tok::LBracket, "'['");
    std::vector<int64_t> shape;
    do {
      Token d = expect(Tok::Int, "integer extent");
      shape.push_back(d.int_value);
    } while (accept(Tok::Comma));
    expect(Tok::RBracket, "']'");
    std::string scope = "global";
    std::vector<int64_t> strides;
    while (true) {
      if (accept_keyword("scope")) {
        expect(Tok::LParen, "'('");
        scope = expect(Tok::Str, "scope string").text;
        expect(Tok::RParen, "')'");
      } else if (accept_keyword("strides")) {
        expect(Tok::LParen, "'('");
        do {
          strides.push_back(expect(Tok::Int, "stride").int_value);
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
      } else {
        break;
      }
    }
    return make_buffer(name.text, *dt, std::move(shape), std::move(scope), std::move(strides));
  }

  /******** statements ********/

  Stmt stmt() {
    Token t = lex_.peek();
    if (t.type != Tok::Ident) lex_.fail("expected a statement", t);
    if (t.text == "for") return for_stmt();
    if (t.text == "block") return block_stmt();
    if (t.text == "eval") {
      lex_.next();
      return make_evaluate(expr());
    }
    // store or call statement
    Token name = lex_.next();
    if (lex_.peek().type == Tok::LBracket) {
      auto it = buffers_.find(name.text);
      if (it == buffers_.end()) lex_.fail("unknown buffer '" + name.text + "'", name);
      lex_.next();
      std::vector<Expr> indices;
      do {
        indices.push_back(expr());
      } while (accept(Tok::Comma));
      expect(Tok::RBracket, "']'");
      expect(Tok::Assign, "'='");
      Expr value = expr();
      return wrap_factory_errors(name, [&] { return make_store(it->second, indices, value); });
    }
    if (lex_.peek().type == Tok::LParen || lex_.peek().type == Tok::Dot) {
      std::string call_name = dotted_name(name);
      expect(Tok::LParen, "'('");
      std::vector<Expr> args;
      if (lex_.peek().type != Tok::RParen) {
        do {
          args.push_back(expr());
        } while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "')'");
      return make_evaluate(make_call(call_name, std::move(args)));
    }
    lex_.fail("expected a statement", name);
  }

  Stmt for_stmt() {
    Token kw = lex_.next();  // 'for'
    Token var_tok = expect(Tok::Ident, "loop variable");
    expect_keyword("in");
    bool negative_min = accept(Tok::Minus);
    Token min_tok = expect(Tok::Int, "loop start");
    int64_t min_val = negative_min ? -min_tok.int_value : min_tok.int_value;
    expect(Tok::DotDot, "'..'");
    Expr hi = expr();
    ForKind kind = ForKind::Serial;
    std::string thread_tag;
    Token kt = lex_.peek();
    if (kt.type == Tok::Ident) {
      if (kt.text == "parallel") {
        lex_.next();
        kind = ForKind::Parallel;
      } else if (kt.text == "vectorized") {
        lex_.next();
        kind = ForKind::Vectorized;
      } else if (kt.text == "unrolled") {
        lex_.next();
        kind = ForKind::Unrolled;
      } else if (kt.text == "thread") {
        lex_.next();
        expect(Tok::LParen, "'('");
        Token tag = expect(Tok::Ident, "thread tag");
        thread_tag = dotted_name(tag);
        expect(Tok::RParen, "')'");
        kind = ForKind::ThreadBound;
      }
    }
    expect(Tok::LBrace, "'{'");
    std::vector<Stmt> body;
    while (lex_.peek().type != Tok::RBrace) body.push_back(stmt());
    expect(Tok::RBrace, "'}'");

    Expr loop_var = make_var(var_tok.text);
    Stmt body_stmt = make_seq(std::move(body));
    Expr extent = hi;
    if (min_val != 0) {
      // normalize to a zero-based loop
      int64_t hi_val;
      if (as_const_int(hi, &hi_val)) {
        extent = make_int(hi_val - min_val);
      } else {
        extent = sub(hi, make_int(min_val));
      }
      body_stmt = substitute(body_stmt, {{var_tok.text, add(loop_var, make_int(min_val))}});
    }
    return wrap_factory_errors(
        kw, [&] { return make_for(loop_var, extent, body_stmt, kind, thread_tag); });
  }

  Stmt block_stmt() {
    Token kw = lex_.next();  // 'block'
    Token name = expect(Tok::Ident, "block name");
    expect(Tok::LParen, "'('");
    auto blk = std::make_shared<Block>();
    blk->name = name.text;
    std::vector<Expr> bindings;
    if (lex_.peek().type != Tok::RParen) {
      do {
        Token kind_tok = expect(Tok::Ident, "iterator kind");
        IterKind kind;
        if (kind_tok.text == "spatial") {
          kind = IterKind::DataParallel;
        } else if (kind_tok.text == "reduce") {
          kind = IterKind::Reduction;
        } else if (kind_tok.text == "opaque") {
          kind = IterKind::Opaque;
        } else {
          lex_.fail("unknown iterator kind '" + kind_tok.text + "'", kind_tok);
        }
        Token iv_name = expect(Tok::Ident, "iterator name");
        expect(Tok::Colon, "':'");
        Expr extent = expr();
        expect(Tok::Assign, "'='");
        Expr binding = expr();
        blk->iter_vars.push_back(
            IterVar{make_var(iv_name.text), Range{make_int(0), extent}, kind});
        bindings.push_back(binding);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");

    if (accept_keyword("reads")) {
      expect(Tok::LParen, "'('");
      do {
        blk->reads.push_back(region());
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    if (accept_keyword("writes")) {
      expect(Tok::LParen, "'('");
      do {
        blk->writes.push_back(region());
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    if (accept_keyword("attrs")) {
      expect(Tok::LParen, "'('");
      do {
        Token k = expect(Tok::Str, "annotation key");
        expect(Tok::Assign, "'='");
        Token v = expect(Tok::Str, "annotation value");
        blk->annotations[k.text] = v.text;
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    Expr predicate = make_bool(true);
    if (accept_keyword("if")) predicate = expr();

    expect(Tok::LBrace, "'{'");
    std::vector<std::string> local_buffers;
    while (accept_keyword("alloc")) {
      BufferPtr b = buffer_decl();
      blk->alloc_buffers.push_back(b);
      buffers_[b->name] = b;
      local_buffers.push_back(b->name);
    }
    if (accept_keyword("init")) {
      expect(Tok::LBrace, "'{'");
      std::vector<Stmt> init_body;
      while (lex_.peek().type != Tok::RBrace) init_body.push_back(stmt());
      expect(Tok::RBrace, "'}'");
      blk->init = make_seq(std::move(init_body));
    }
    std::vector<Stmt> body;
    while (lex_.peek().type != Tok::RBrace) body.push_back(stmt());
    expect(Tok::RBrace, "'}'");
    blk->body = make_seq(std::move(body));
    for (const auto& n : local_buffers) buffers_.erase(n);
    return wrap_factory_errors(
        kw, [&] { return make_block_realize(std::move(bindings), predicate, blk); });
  }

  BufferRegion region() {
    Token name = expect(Tok::Ident, "buffer name");
    auto it = buffers_.find(name.text);
    if (it == buffers_.end()) lex_.fail("unknown buffer '" + name.text + "'", name);
    expect(Tok::LBracket, "'['");
    BufferRegion r;
    r.buffer = it->second;
    do {
      Expr min = expr();
      expect(Tok::PlusColon, "'+:'");
      Expr extent = expr();
      r.ranges.push_back(Range{std::move(min), std::move(extent)});
    } while (accept(Tok::Comma));
    expect(Tok::RBracket, "']'");
    if (r.ranges.size() != r.buffer->shape.size()) {
      lex_.fail("region rank mismatch on buffer '" + name.text + "'", name);
    }
    return r;
  }

  /******** expressions ********/

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    Expr e = and_expr();
    while (accept_keyword("or")) e = make_binary(ExprKind::Or, e, and_expr());
    return e;
  }

  Expr and_expr() {
    Expr e = not_expr();
    while (accept_keyword("and")) e = make_binary(ExprKind::And, e, not_expr());
    return e;
  }

  Expr not_expr() {
    if (accept_keyword("not")) return make_not(not_expr());
    return cmp_expr();
  }

  Expr cmp_expr() {
    Expr e = add_expr();
    Token t = lex_.peek();
    ExprKind k;
    switch (t.type) {
      case Tok::Lt: k = ExprKind::Lt; break;
      case Tok::Le: k = ExprKind::Le; break;
      case Tok::Gt: k = ExprKind::Gt; break;
      case Tok::Ge: k = ExprKind::Ge; break;
      case Tok::EqEq: k = ExprKind::Eq; break;
      case Tok::NotEq: k = ExprKind::Ne; break;
      default: return e;
    }
    lex_.next();
    return wrap_factory_errors(t, [&] { return make_binary(k, e, add_expr()); });
  }

  Expr add_expr() {
    Expr e = mul_expr();
    while (true) {
      Token t = lex_.peek();
      if (t.type == Tok::Plus) {
        lex_.next();
        e = wrap_factory_errors(t, [&] { return add(e, mul_expr()); });
      } else if (t.type == Tok::Minus) {
        lex_.next();
        e = wrap_factory_errors(t, [&] { return sub(e, mul_expr()); });
      } else {
        return e;
      }
    }
  }

  Expr mul_expr() {
    Expr e = unary();
    while (true) {
      Token t = lex_.peek();
      ExprKind k;
      if (t.type == Tok::Star) {
        k = ExprKind::Mul;
      } else if (t.type == Tok::Slash) {
        k = ExprKind::FloorDiv;
      } else if (t.type == Tok::Percent) {
        k = ExprKind::FloorMod;
      } else {
        return e;
      }
      lex_.next();
      e = wrap_factory_errors(t, [&] { return make_binary(k, e, unary()); });
    }
  }

  Expr unary() {
    Token t = lex_.peek();
    if (t.type == Tok::Minus) {
      lex_.next();
      Expr e = unary();
      if (e->kind == ExprKind::IntConst) return make_int(-e->int_value, e->dtype);
      if (e->kind == ExprKind::FloatConst) return make_float(-e->float_value, e->dtype);
      return sub(make_int(0, e->dtype), e);
    }
    return primary();
  }

  Expr primary() {
    Token t = lex_.next();
    switch (t.type) {
      case Tok::Int: return make_int(t.int_value, t.literal_dtype);
      case Tok::Float: return make_float(t.float_value, t.literal_dtype);
      case Tok::LParen: {
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: break;
      default: lex_.fail("expected an expression", t);
    }
    if (t.text == "true") return make_bool(true);
    if (t.text == "false") return make_bool(false);
    if (t.text == "min" || t.text == "max") {
      ExprKind k = t.text == "min" ? ExprKind::Min : ExprKind::Max;
      expect(Tok::LParen, "'('");
      Expr a = expr();
      expect(Tok::Comma, "','");
      Expr b = expr();
      expect(Tok::RParen, "')'");
      return wrap_factory_errors(t, [&] { return make_binary(k, a, b); });
    }
    if (t.text == "select") {
      expect(Tok::LParen, "'('");
      Expr c = expr();
      expect(Tok::Comma, "','");
      Expr a = expr();
      expect(Tok::Comma, "','");
      Expr b = expr();
      expect(Tok::RParen, "')'");
      return wrap_factory_errors(t, [&] { return make_select(c, a, b); });
    }
    if (auto dt = dtype_from_name(t.text)) {
      expect(Tok::LParen, "'('");
      Expr e = expr();
      expect(Tok::RParen, "')'");
      return make_cast(*dt, e);
    }
    // buffer load
    if (lex_.peek().type == Tok::LBracket) {
      auto it = buffers_.find(t.text);
      if (it == buffers_.end()) lex_.fail("unknown buffer '" + t.text + "'", t);
      lex_.next();
      std::vector<Expr> indices;
      do {
        indices.push_back(expr());
      } while (accept(Tok::Comma));
      expect(Tok::RBracket, "']'");
      return wrap_factory_errors(t, [&] { return make_load(it->second, indices); });
    }
    // opaque call
    if (lex_.peek().type == Tok::LParen || lex_.peek().type == Tok::Dot) {
      std::string call_name = dotted_name(t);
      expect(Tok::LParen, "'('");
      std::vector<Expr> args;
      if (lex_.peek().type != Tok::RParen) {
        do {
          args.push_back(expr());
        } while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "')'");
      return make_call(call_name, std::move(args));
    }
    return make_var(t.text);
  }

  /******** intrinsic declarations ********/

  IntrinDecl intrin() {
    expect_keyword("intrin");
    Token name = expect(Tok::Ident, "intrinsic name");
    IntrinDecl decl;
    decl.name = dotted_name(name);
    expect(Tok::LBrace, "'{'");
    while (lex_.peek().type != Tok::RBrace) {
      if (accept_keyword("exec_scope")) {
        expect(Tok::LParen, "'('");
        decl.exec_scope = expect(Tok::Str, "thread tag string").text;
        expect(Tok::RParen, "')'");
      } else if (accept_keyword("require")) {
        Token param = expect(Tok::Ident, "operand name");
        OperandConstraint c;
        while (true) {
          if (accept_keyword("scope")) {
            expect(Tok::LParen, "'('");
            c.scope = expect(Tok::Str, "scope string").text;
            expect(Tok::RParen, "')'");
          } else if (accept_keyword("contiguous")) {
            c.contiguous = true;
          } else {
            break;
          }
        }
        decl.constraints.emplace_back(param.text, c);
      } else {
        lex_.fail("expected 'exec_scope' or 'require'", lex_.peek());
      }
    }
    expect(Tok::RBrace, "'}'");
    return decl;
  }

  // Converts factory exceptions into positioned syntax errors where sensible,
  // keeping the original kind for ArityError/TypeError/ValueError.
  template <typename F>
  auto wrap_factory_errors(const Token& at, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      throw Error(e.kind(), e.message() + " (line " + std::to_string(at.line) + ", column " +
                                std::to_string(at.col) + ")");
    }
  }

  Lexer lex_;
  std::unordered_map<std::string, BufferPtr> buffers_;
};

}  // namespace

PrimFuncPtr parse_text(const std::string& source) { return Parser(source).single_func(); }

ParsedProgram parse_program(const std::string& source) { return Parser(source).program(); }

Expr parse_expr_text(const std::string& source, const std::vector<std::string>& vars) {
  (void)vars;  // all identifiers parse as i32 vars
  return Parser(source).expr_entry();
}

}  // namespace tir
