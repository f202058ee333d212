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
#ifndef TIR_SUBST_H_
#define TIR_SUBST_H_

#include <map>
#include <string>

#include "tir/ir.h"

namespace tir {

using VarMap = std::map<std::string, Expr>;

// Capture-avoiding substitution. Binders (loop variables, block iterators)
// shadow map entries of the same name; binders that would capture a free
// variable of a replacement are renamed.
Expr substitute(const Expr& e, const VarMap& m);
Stmt substitute(const Stmt& s, const VarMap& m);
BufferRegion substitute(const BufferRegion& r, const VarMap& m);
Range substitute(const Range& r, const VarMap& m);

// Rewrites every reference to buffer `from` (loads, stores, regions, allocs)
// to the replacement buffer. Index expressions are kept as-is.
Stmt replace_buffer(const Stmt& s, const std::string& from, const BufferPtr& to);
Expr replace_buffer(const Expr& e, const std::string& from, const BufferPtr& to);

}  // namespace tir

#endif  // TIR_SUBST_H_
