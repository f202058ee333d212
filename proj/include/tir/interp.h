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
#ifndef TIR_INTERP_H_
#define TIR_INTERP_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tir/ir.h"

namespace tir {

/******** Tensor values ********/

struct TensorValue {
  DType dtype = DType::F32;
  std::vector<int64_t> shape;
  std::vector<int64_t> strides;  // element strides, dense row-major by default
  std::vector<uint8_t> data;     // alloc_size() elements of dtype storage

  static TensorValue zeros(DType dtype, std::vector<int64_t> shape,
                           std::vector<int64_t> strides = {});
  static TensorValue zeros_like(const Buffer& b);

  int64_t num_elements() const;
  int64_t storage_elements() const;
  int64_t elem_bytes() const;  // f16 stored as f32

  // Flat storage accessors (no bounds checks beyond the vector's).
  double get_f(int64_t flat) const;
  void set_f(int64_t flat, double v);
  int64_t get_i(int64_t flat) const;
  void set_i(int64_t flat, int64_t v);

  int64_t flat_index(const std::vector<int64_t>& idx) const;
};

// A rectangular window into a tensor, handed to intrinsic host kernels.
// Operand order: index 0 is the output, then inputs in declaration order.
class TensorView {
 public:
  TensorView(TensorValue* t, std::vector<int64_t> offsets, std::vector<int64_t> extents)
      : tensor_(t), offsets_(std::move(offsets)), extents_(std::move(extents)) {}

  const std::vector<int64_t>& extents() const { return extents_; }
  DType dtype() const { return tensor_->dtype; }

  double get_f(const std::vector<int64_t>& idx) const { return tensor_->get_f(flat(idx)); }
  void set_f(const std::vector<int64_t>& idx, double v) { tensor_->set_f(flat(idx), v); }
  int64_t get_i(const std::vector<int64_t>& idx) const { return tensor_->get_i(flat(idx)); }
  void set_i(const std::vector<int64_t>& idx, int64_t v) { tensor_->set_i(flat(idx), v); }

  int64_t cells() const {
    int64_t n = 1;
    for (int64_t e : extents_) n *= e;
    return n;
  }

 private:
  int64_t flat(const std::vector<int64_t>& idx) const;
  TensorValue* tensor_;
  std::vector<int64_t> offsets_;
  std::vector<int64_t> extents_;
};

/******** Cost accounting ********/

struct CostCounters {
  int64_t scalar_ops = 0;
  int64_t intrinsic_calls = 0;
  int64_t loop_trip_overhead = 0;
  // bytes moved keyed by (source scope, destination scope)
  std::map<std::pair<std::string, std::string>, int64_t> bytes_moved;
  std::map<std::string, int64_t> scalar_ops_by_block;

  int64_t total_bytes_moved() const;
};

struct CostWeights {
  double scalar_op = 1.0;
  double intrinsic_call = 4.0;
  double byte_moved = 0.01;
  double loop_trip = 0.05;
  // per-scope distance rank; a byte moving src->dst costs rank(src)+rank(dst)
  std::map<std::string, double> scope_rank = {
      {"global", 4.0}, {"shared", 2.0}, {"local", 1.0}, {"wmma-like", 1.0}};

  double rank(const std::string& scope) const;
};

struct CostMetric {
  double simulated_cost = 0;
  CostCounters counters;
  std::optional<double> wall_time_seconds;
};

CostMetric compute_cost(const CostCounters& counters, const CostWeights& weights);

/******** Execution ********/

using HostKernel = std::function<void(std::vector<TensorView>&)>;

class ExecContext {
 public:
  // Binds an intrinsic call name to a host kernel. DuplicateName if taken.
  void register_host_kernel(const std::string& name, HostKernel kernel);
  bool has_kernel(const std::string& name) const;
  const HostKernel& kernel(const std::string& name) const;

  // Counters frozen after the last run. NoRun before any run completed.
  CostMetric cost_report(const CostWeights& weights = {}) const;

  CostCounters counters;
  bool completed_run = false;
  bool record_wall_time = false;
  std::optional<double> last_wall_time;

 private:
  std::map<std::string, HostKernel> kernels_;
};

// Executes f sequentially in program order. `inputs` supplies one value per
// input param (a param named in any block's read set), in param order.
// Returns the final value of every written param, in param order.
std::vector<TensorValue> run(const PrimFunc& f, const std::vector<TensorValue>& inputs,
                             ExecContext& ctx);

// Param classification used by run() and the CLI.
std::vector<BufferPtr> input_params(const PrimFunc& f);
std::vector<BufferPtr> output_params(const PrimFunc& f);

// Builds a host kernel that interprets a scalar description block over the
// operand views. `operand_params` maps view index -> desc param name.
HostKernel make_scalar_kernel(const PrimFuncPtr& desc, const std::vector<std::string>& operand_params);

/******** Tensor file I/O ********/

// One text header line "<dtype> <dim0> <dim1> ...\n" followed by flat
// little-endian element data.
TensorValue read_tensor(const std::string& path);
void write_tensor(const std::string& path, const TensorValue& t);

}  // namespace tir

#endif  // TIR_INTERP_H_
