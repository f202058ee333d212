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
#ifndef TIR_STRUCTURAL_H_
#define TIR_STRUCTURAL_H_

#include "tir/ir.h"

namespace tir {

// Tree isomorphism. With remap_vars, variable names (and block names) may
// differ as long as the renaming is a consistent bijection; buffer identity
// is never remapped.
bool structural_equal(const Expr& a, const Expr& b, bool remap_vars = false);
bool structural_equal(const Stmt& a, const Stmt& b, bool remap_vars = false);
bool structural_equal(const PrimFunc& a, const PrimFunc& b, bool remap_vars = false);

}  // namespace tir

#endif  // TIR_STRUCTURAL_H_
