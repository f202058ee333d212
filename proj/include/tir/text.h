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
#ifndef TIR_TEXT_H_
#define TIR_TEXT_H_

#include <string>
#include <vector>

#include "tir/ir.h"

namespace tir {

/******** Printer ********/

// Canonical text: 2-space indentation, one statement per line. The printer is
// deterministic, and parse_text(print_text(f)) is structurally equal to f.
std::string print_text(const PrimFunc& f);
std::string print_text(const PrimFuncPtr& f);

std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);
std::string print_region(const BufferRegion& r);

/******** Parser ********/

PrimFuncPtr parse_text(const std::string& source);

// Per-operand requirements attached to an intrinsic declaration.
struct OperandConstraint {
  std::string scope;        // empty = no requirement
  bool contiguous = false;  // require innermost stride 1
};

struct IntrinDecl {
  std::string name;
  std::string exec_scope;  // thread tag the intrinsic must run under, or empty
  std::vector<std::pair<std::string, OperandConstraint>> constraints;  // by desc param name
};

struct ParsedProgram {
  std::vector<PrimFuncPtr> funcs;
  std::vector<IntrinDecl> intrins;
};

// Parses a file that may contain several functions and intrinsic declarations.
ParsedProgram parse_program(const std::string& source);

// Parses a single expression over the given variables (all i32).
Expr parse_expr_text(const std::string& source, const std::vector<std::string>& vars);

}  // namespace tir

#endif  // TIR_TEXT_H_
