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
#ifndef TIR_SCHEDULE_H_
#define TIR_SCHEDULE_H_

#include <json.hpp>
#include <string>
#include <vector>

#include "tir/analysis.h"

namespace tir {

/******** Index maps ********/

// An affine remapping of buffer coordinates, e.g. "(i, j) -> (i*6 + j)".
struct IndexMap {
  std::vector<std::string> params;
  std::vector<Expr> exprs;

  static IndexMap parse(const std::string& text);
  static IndexMap identity(size_t rank);
  std::string to_string() const;
};

/******** Traces ********/

// One applied primitive. `args` holds input handles and attributes; tunable
// steps keep their sampled values in `decisions`.
struct TraceStep {
  std::string prim;
  nlohmann::json args = nlohmann::json::object();
  nlohmann::json decisions = nlohmann::json::object();
};

std::string trace_to_jsonl(const std::vector<TraceStep>& trace);
std::vector<TraceStep> trace_from_jsonl(const std::string& text);

/******** Schedule state ********/

// Owns the current function and the trace of primitives that produced it.
// Handles are stable names: a loop is addressed by its loop-variable name,
// a block by its name. A primitive that removes the named loop or block
// invalidates the handle; resolving a dead handle raises StaleHandle.
class Schedule {
 public:
  explicit Schedule(PrimFuncPtr f);

  const PrimFuncPtr& func() const { return func_; }
  const std::vector<TraceStep>& trace() const { return trace_; }

  /******** loop transformations ********/

  // Splits `loop` into nested loops with the given extents, innermost last.
  // At most one factor may be -1 (inferred as the cover quotient). Inserts a
  // block predicate when the split overapproximates the extent.
  std::vector<std::string> split(const std::string& loop, std::vector<int64_t> factors);

  // Fuses `inner` (the only child of `outer`) into a single loop.
  std::string fuse(const std::string& outer, const std::string& inner);

  // Permutes loops that form an ancestor chain into the given order.
  void reorder(const std::vector<std::string>& loops);

  void bind(const std::string& loop, const std::string& thread_tag);
  void annotate(const std::string& loop, const std::string& kind);

  /******** block transformations ********/

  void compute_at(const std::string& block, const std::string& loop);
  void compute_inline(const std::string& block);
  std::string cache_read(const std::string& block, int operand_index, const std::string& scope);
  std::string cache_write(const std::string& block, const std::string& scope);
  std::string blockize(const std::string& loop);
  std::string decompose_reduction(const std::string& block, const std::string& loop);
  void recompose_reduction(const std::string& block);

  /******** layout and padding ********/

  void transform_layout(const std::string& buffer, const IndexMap& map);
  void pad_block(const std::string& block, const std::vector<int64_t>& padded_extents);
  // Pads the second-innermost stride of a staging buffer by one element,
  // changing layout only.
  void pad_buffer_strides(const std::string& buffer);

  void annotate_block(const std::string& block, const std::string& key, const std::string& value);

  /******** queries ********/

  Stmt find_loop(const std::string& var) const;
  Stmt find_block_realize(const std::string& name) const;
  // Loop chain binding the block, outermost first.
  std::vector<std::string> loops_of(const std::string& block) const;
  int64_t loop_extent(const std::string& loop) const;

  // Applies a step parsed from a trace (used by replay and the CLI).
  void apply_step(const TraceStep& step);

  // Extension point for composite primitives layered on top of the schedule
  // (e.g. tensorization): swaps in the rewritten function and records the
  // step. The new function is well-formedness checked.
  void commit_rewrite(PrimFuncPtr f, TraceStep step);

 private:
  void commit(PrimFuncPtr f, TraceStep step) { commit_rewrite(std::move(f), std::move(step)); }

  PrimFuncPtr func_;
  std::vector<TraceStep> trace_;
};

// Registers a replay handler for a composite primitive recorded in traces by
// a higher layer. The handler must re-apply the step on the schedule.
using StepHandler = std::function<void(Schedule&, const TraceStep&)>;
void register_step_handler(const std::string& prim, StepHandler handler);

// Replays a trace on a fresh copy of f. Deterministic: the same trace on a
// structurally equal function produces a structurally equal result.
Schedule replay(const std::vector<TraceStep>& trace, PrimFuncPtr f);

}  // namespace tir

#endif  // TIR_SCHEDULE_H_
