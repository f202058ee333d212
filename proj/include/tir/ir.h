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
#ifndef TIR_IR_H_
#define TIR_IR_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tir {

/*! \brief Error with a machine-checkable kind tag, e.g. "NotSchedulable". */
class Error : public std::runtime_error {
 public:
  Error(std::string kind, std::string msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)), message_(std::move(msg)) {}
  const std::string& kind() const { return kind_; }
  const std::string& message() const { return message_; }

 private:
  std::string kind_;
  std::string message_;
};

[[noreturn]] inline void throw_error(const std::string& kind, const std::string& msg) {
  throw Error(kind, msg);
}

/******** Scalar types ********/

// F16 is stored and computed as f32; the tag is kept for constraint checks.
enum class DType : uint8_t { I8, I32, F16, F32, Bool };

const char* dtype_name(DType t);
bool dtype_is_float(DType t);
int dtype_size_bytes(DType t);

/******** Expressions ********/

class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct Buffer;
using BufferPtr = std::shared_ptr<const Buffer>;

enum class ExprKind : uint8_t {
  Var,
  IntConst,
  FloatConst,
  Add,
  Sub,
  Mul,
  FloorDiv,
  FloorMod,
  Min,
  Max,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  And,
  Or,
  Not,
  Select,   // args: cond, true_value, false_value
  Cast,     // args: value; dtype is the target type
  BufferLoad,
  Call,     // opaque intrinsic invocation by name
};

class ExprNode {
 public:
  ExprKind kind;
  DType dtype;
  std::string name;        // Var name or Call name
  int64_t int_value = 0;   // IntConst
  double float_value = 0;  // FloatConst
  BufferPtr buffer;        // BufferLoad
  std::vector<Expr> args;  // operands / load indices / call args
};

Expr make_var(std::string name, DType dtype = DType::I32);
Expr make_int(int64_t value, DType dtype = DType::I32);
Expr make_float(double value, DType dtype = DType::F32);
Expr make_bool(bool value);
Expr make_binary(ExprKind kind, Expr a, Expr b);
Expr make_not(Expr a);
Expr make_select(Expr cond, Expr true_value, Expr false_value);
Expr make_cast(DType dtype, Expr value);
Expr make_load(BufferPtr buffer, std::vector<Expr> indices);
Expr make_call(std::string name, std::vector<Expr> args = {});

inline Expr add(Expr a, Expr b) { return make_binary(ExprKind::Add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return make_binary(ExprKind::Sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return make_binary(ExprKind::Mul, std::move(a), std::move(b)); }
inline Expr floordiv(Expr a, Expr b) {
  return make_binary(ExprKind::FloorDiv, std::move(a), std::move(b));
}
inline Expr floormod(Expr a, Expr b) {
  return make_binary(ExprKind::FloorMod, std::move(a), std::move(b));
}
inline Expr lt(Expr a, Expr b) { return make_binary(ExprKind::Lt, std::move(a), std::move(b)); }
inline Expr land(Expr a, Expr b) { return make_binary(ExprKind::And, std::move(a), std::move(b)); }

bool is_const_int(const Expr& e, int64_t value);
bool is_true(const Expr& e);
// Returns the value if e is an IntConst, nullopt behavior via bool out.
bool as_const_int(const Expr& e, int64_t* out);

/******** Buffers and regions ********/

struct Buffer {
  std::string name;
  DType dtype = DType::F32;
  std::vector<int64_t> shape;
  std::string scope = "global";
  // Empty means dense row-major. When present, size matches shape.
  std::vector<int64_t> strides;

  int64_t num_elements() const;
  // Flat size of the backing allocation (honors stride padding).
  int64_t alloc_size() const;
  std::vector<int64_t> effective_strides() const;
};

BufferPtr make_buffer(std::string name, DType dtype, std::vector<int64_t> shape,
                      std::string scope = "global", std::vector<int64_t> strides = {});

struct Range {
  Expr min;
  Expr extent;
};

Range make_range(Expr min, Expr extent);
Range const_range(int64_t min, int64_t extent);

struct BufferRegion {
  BufferPtr buffer;
  std::vector<Range> ranges;  // one per buffer dimension
};

/******** Blocks and statements ********/

enum class IterKind : uint8_t { DataParallel, Reduction, Opaque };

const char* iter_kind_name(IterKind k);

struct IterVar {
  Expr var;     // always an ExprKind::Var
  Range domain; // canonical form has min == 0
  IterKind kind;
};

enum class ForKind : uint8_t { Serial, Parallel, Vectorized, Unrolled, ThreadBound };

class StmtNode;
using Stmt = std::shared_ptr<const StmtNode>;

struct Block;
using BlockPtr = std::shared_ptr<const Block>;

enum class StmtKind : uint8_t { For, BlockRealize, BufferStore, Seq, Evaluate };

class StmtNode {
 public:
  StmtKind kind;

  // For
  Expr loop_var;
  Expr extent;  // loop runs over [0, extent)
  ForKind for_kind = ForKind::Serial;
  std::string thread_tag;  // only for ThreadBound
  Stmt body;

  // BlockRealize
  std::vector<Expr> bindings;
  Expr predicate;
  BlockPtr block;

  // BufferStore
  BufferPtr buffer;
  std::vector<Expr> indices;
  Expr value;

  // Seq
  std::vector<Stmt> stmts;

  // Evaluate
  Expr expr;
};

struct Block {
  std::string name;
  std::vector<IterVar> iter_vars;
  std::vector<BufferRegion> reads;
  std::vector<BufferRegion> writes;
  Stmt init;  // may be null; implies a reduction block when present
  Stmt body;
  std::vector<BufferPtr> alloc_buffers;
  std::map<std::string, std::string> annotations;
};

Stmt make_for(Expr loop_var, Expr extent, Stmt body, ForKind kind = ForKind::Serial,
              std::string thread_tag = "");
Stmt make_block_realize(std::vector<Expr> bindings, Expr predicate, BlockPtr block);
Stmt make_store(BufferPtr buffer, std::vector<Expr> indices, Expr value);
Stmt make_seq(std::vector<Stmt> stmts);  // flattens nested Seq, collapses singletons
Stmt make_evaluate(Expr e);

/******** Functions ********/

struct PrimFunc {
  std::string name;
  std::vector<BufferPtr> params;
  Stmt body;  // a root BlockRealize with zero iter_vars
};

using PrimFuncPtr = std::shared_ptr<const PrimFunc>;

PrimFuncPtr make_func(std::string name, std::vector<BufferPtr> params, Stmt body);

/******** Well-formedness ********/

// Checks binding arity, free-variable closure (lexical scoping over loop vars,
// block iterators, params and allocations), unique block/loop/buffer names,
// positive extents, and the init-implies-reduction rule. Throws on violation.
void check_well_formed(const PrimFunc& f);

/******** Tree utilities ********/

void collect_free_vars(const Expr& e, std::set<std::string>* out);
void post_order_exprs(const Expr& e, const std::function<void(const Expr&)>& fn);

// Walks every statement in the tree, descending into blocks (init and body).
void pre_order_stmts(const Stmt& s, const std::function<bool(const Stmt&)>& fn);

// True if the expression contains any of the given variable names.
bool uses_any_var(const Expr& e, const std::set<std::string>& names);

}  // namespace tir

#endif  // TIR_IR_H_
