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
#ifndef SRC_SCHEDULE_INTERNAL_H_
#define SRC_SCHEDULE_INTERNAL_H_

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "tir/schedule.h"

namespace tir {
namespace sched {

// A located node with the ancestor chain from the function body down to (and
// excluding) the node itself.
struct Located {
  Stmt node;
  std::vector<Stmt> ancestors;

  // Nearest enclosing block realize, i.e. the scope the node belongs to.
  Stmt scope_realize() const;
  // Bounds of every loop var and block iterator on the ancestor chain.
  BoundsMap outer_bounds() const;
};

Located locate_loop(const PrimFuncPtr& f, const std::string& var);
Located locate_block(const PrimFuncPtr& f, const std::string& name);

// Structural replacement by node identity. `replacement` may be null to
// delete the node (sequences collapse, loops left with an empty body are
// themselves deleted).
PrimFuncPtr replace_node(const PrimFuncPtr& f, const Stmt& target, const Stmt& replacement);

// All variable, block, and buffer names used anywhere in the function.
std::set<std::string> used_names(const PrimFunc& f);
std::string fresh_name(const std::set<std::string>& used, const std::string& base);

// Collects every BlockRealize in the subtree (not descending into nested
// block bodies when `direct_only`).
std::vector<Stmt> collect_realizes(const Stmt& s, bool direct_only = false);

// The chain of loops from the scope down to the realize that bind only this
// block (each loop's subtree contains exactly this one realize).
std::vector<Stmt> private_loops(const Located& block_loc);

// Recomputes reads/writes of a block from its body.
BlockPtr with_recomputed_regions(const BlockPtr& blk, const BoundsMap& outer);

bool is_tensorized(const Block& b);

// index of the top-level statement in `seq` whose subtree contains `node`
int seq_index_containing(const std::vector<Stmt>& seq, const Stmt& node);

bool subtree_contains(const Stmt& root, const Stmt& node);

Expr const_true();

}  // namespace sched
}  // namespace tir

#endif  // SRC_SCHEDULE_INTERNAL_H_
