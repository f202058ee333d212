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
#ifndef TIR_SIMPLIFY_H_
#define TIR_SIMPLIFY_H_

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "tir/ir.h"

namespace tir {

// Known variable domains: var name -> [min, min + extent).
using BoundsMap = std::map<std::string, Range>;

// Constant folding, affine normalization of integer expressions, and
// floordiv/floormod reduction using bound information. Idempotent and
// value-preserving; float expressions are only const-folded, never
// reassociated.
Expr simplify(const Expr& e, const BoundsMap& bounds = {});

// Simplifies every expression in a statement tree (loop extents, bindings,
// predicates, indices, regions). Loop domains encountered on the way down are
// added to the bound context.
Stmt simplify_stmt(const Stmt& s, const BoundsMap& bounds = {});

// Conservative integer interval of e. nullopt when unknown.
std::optional<std::pair<int64_t, int64_t>> const_int_bounds(const Expr& e,
                                                            const BoundsMap& bounds);

// True only if `cond` can be proven true under the bounds.
bool prove(const Expr& cond, const BoundsMap& bounds = {});

// Floor division / modulo on int64 (the semantics of FloorDiv/FloorMod).
int64_t floordiv_i64(int64_t a, int64_t b);
int64_t floormod_i64(int64_t a, int64_t b);

// Evaluates a pure integer expression under a concrete environment.
// nullopt when the expression contains loads, calls, or unbound variables.
std::optional<int64_t> eval_int_expr(const Expr& e, const std::map<std::string, int64_t>& env);

}  // namespace tir

#endif  // TIR_SIMPLIFY_H_
