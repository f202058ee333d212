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
#ifndef TIR_ANALYSIS_H_
#define TIR_ANALYSIS_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tir/simplify.h"
#include "tir/subst.h"

namespace tir {

/******** Quasi-affine binding detection ********/

// One contiguous digit range of a source loop iterator:
// value = (source / lower_factor) % extent.
struct IterPiece {
  std::string source;
  int64_t lower_factor;
  int64_t extent;
};

// A binding expressed as a fuse of pieces, outermost first.
struct BindingDecomp {
  std::vector<IterPiece> pieces;
  int64_t range = 1;  // binding values cover [0, range)
};

enum class IterMapStatus { Bijective, Surjective, Fail };

struct IterMapResult {
  IterMapStatus status = IterMapStatus::Fail;
  std::string reason;
  // Present when every binding decomposed, even if domains mismatched.
  std::vector<BindingDecomp> decomps;
  bool decomposed = false;

  bool bijective() const { return status == IterMapStatus::Bijective; }
};

// Pattern-matches the bindings as split/fuse compositions of the loop
// iterators. Bijective requires pairwise-independent pieces, exact match of
// every binding range with its iterator domain, and full use of every loop
// iterator's digits. Loop domains must be constant and zero-based. An empty
// `iter_domains` skips the domain-match step (the decomposition ranges are
// still reported), which callers use to infer the induced domains.
IterMapResult detect_iter_map(const std::vector<Expr>& bindings, const BoundsMap& loop_domains,
                              const std::vector<Range>& iter_domains);

/******** linear decomposition ********/

struct LinearTerm {
  Expr atom;
  int64_t coeff;
};

// Splits an integer expression into coeff*atom terms plus a constant. Atoms
// are maximal non-linear subexpressions; identical atoms are merged.
std::vector<LinearTerm> linear_terms(const Expr& e, int64_t* constant);

// Rebuilds sum(coeff*atom) + constant.
Expr linear_combination(const std::vector<LinearTerm>& terms, int64_t constant,
                        DType dtype = DType::I32);

/******** Access regions ********/

struct AccessInfo {
  std::vector<BufferRegion> reads;
  std::vector<BufferRegion> writes;
  // Buffers whose region was widened to the full dimension because an index
  // was not affine (e.g. data-dependent gather).
  std::set<std::string> conservative;
};

// Smallest per-dimension interval hulls of the block body's accesses,
// expressed in the block's own iterators. Loops inside the block body are
// eliminated; `outer_bounds` supplies domains for any other free variables.
// Reduction-update self-reads (a load at exactly the store indices of the
// same buffer) are not counted as reads.
AccessInfo compute_access_regions(const Block& b, const BoundsMap& outer_bounds = {});

// Interval hull of `e` where every variable in `widen` is eliminated by its
// domain and all other variables stay symbolic. nullopt when the expression
// is not affine in the widened variables and has no constant bounds.
std::optional<Range> bound_range(const Expr& e, const BoundsMap& widen, const BoundsMap& context);

// Region hull after substituting iterator bindings and widening loop vars.
// Returns nullopt if any dimension could not be bounded.
std::optional<BufferRegion> widen_region(const BufferRegion& r, const VarMap& bindings,
                                         const BoundsMap& widen, const BoundsMap& context);

/******** Dependencies ********/

enum class DepKind { RAW, WAW, WAR };

struct DepEdge {
  BlockPtr src;
  BlockPtr dst;
  DepKind kind;
  BufferPtr buffer;
};

// Buffer-mediated dependencies between the direct sub-blocks of a schedulable
// scope, in program order. Throws NotSchedulable when the scope contains raw
// stores outside sub-blocks.
std::vector<DepEdge> build_dependency_graph(const Block& scope);

/******** Coverage ********/

// True iff the producer interval hull contains the consumer interval hull in
// every dimension. Symbolic containment falls back to enumeration when all
// free variables have concrete domains with at most 2^16 combined points;
// otherwise unknown means false.
bool region_cover(const BufferRegion& producer_writes, const BufferRegion& consumer_reads,
                  const BoundsMap& bounds = {});

}  // namespace tir

#endif  // TIR_ANALYSIS_H_
