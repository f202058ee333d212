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
#ifndef TIR_VALIDATE_H_
#define TIR_VALIDATE_H_

#include <string>
#include <vector>

#include "tir/ir.h"

namespace tir {

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string rule;     // LN-BIND | LN-COVER | TH-BIND | TH-COOP | TH-SCOPE
  std::string path;     // "block:<name>" or "loop:<var>", resolvable in f
  std::string message;
};

// Iterator binding validation: every block's data-parallel and reduction
// bindings must form an independent quasi-affine bijection onto the iterator
// domains, with predicates accounted for padded splits.
std::vector<Diagnostic> validate_loop_nests(const PrimFunc& f);

// Producer write regions must cover downstream read regions at the
// consumer's location.
std::vector<Diagnostic> validate_coverage(const PrimFunc& f);

// Thread binding consistency, cooperative access of shared-scope buffers,
// and intrinsic execution scopes.
std::vector<Diagnostic> validate_threading(const PrimFunc& f);

// Union of all three validators; an empty error set admits the program into
// evolutionary search.
std::vector<Diagnostic> validate_all(const PrimFunc& f);

bool has_errors(const std::vector<Diagnostic>& diags);
std::string format_diagnostic(const Diagnostic& d);

}  // namespace tir

#endif  // TIR_VALIDATE_H_
