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
#include "tir/validate.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "tir/analysis.h"
#include "tir/text.h"

namespace tir {

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::Error;
  });
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string sev = d.severity == Diagnostic::Severity::Error ? "error" : "warning";
  return sev + " " + d.rule + " " + d.path + ": " + d.message;
}

namespace {

void emit(std::vector<Diagnostic>* out, const std::string& rule, const std::string& path,
          const std::string& message,
          Diagnostic::Severity sev = Diagnostic::Severity::Error) {
  out->push_back(Diagnostic{sev, rule, path, message});
}

/******** loop nest validation ********/

class LoopNestValidator {
 public:
  explicit LoopNestValidator(const PrimFunc& f) : func_(f) {}

  std::vector<Diagnostic> run() {
    walk(func_.body);
    return std::move(diags_);
  }

 private:
  void walk(const Stmt& s) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::For:
        loops_[s->loop_var->name] = Range{make_int(0), s->extent};
        loop_kinds_[s->loop_var->name] = s->for_kind;
        walk(s->body);
        loop_kinds_.erase(s->loop_var->name);
        loops_.erase(s->loop_var->name);
        return;
      case StmtKind::Seq:
        for (const auto& c : s->stmts) walk(c);
        return;
      case StmtKind::BlockRealize: {
        check_realize(s);
        // loops inside this block form a fresh nest
        BoundsMap saved_loops;
        std::swap(saved_loops, loops_);
        std::map<std::string, ForKind> saved_kinds;
        std::swap(saved_kinds, loop_kinds_);
        walk(s->block->init);
        walk(s->block->body);
        std::swap(loops_, saved_loops);
        std::swap(loop_kinds_, saved_kinds);
        return;
      }
      default:
        return;
    }
  }

  void check_realize(const Stmt& s) {
    const Block& b = *s->block;
    if (b.iter_vars.empty()) return;
    std::string path = "block:" + b.name;

    // only data-parallel and reduction iterators participate
    std::vector<Expr> bindings;
    std::vector<Range> domains;
    std::vector<size_t> which;
    for (size_t i = 0; i < b.iter_vars.size(); ++i) {
      if (b.iter_vars[i].kind == IterKind::Opaque) continue;
      bindings.push_back(s->bindings[i]);
      domains.push_back(b.iter_vars[i].domain);
      which.push_back(i);
    }
    if (bindings.empty()) return;

    IterMapResult r = detect_iter_map(bindings, loops_, domains);
    if (r.status != IterMapStatus::Bijective) {
      if (r.decomposed) {
        // ranges may legitimately exceed the domains when a predicate guards
        // the padded instances
        if (check_predicated(s, bindings, domains, r, path)) {
          check_kind_mixing(s, path);
          return;
        }
      }
      if (r.status == IterMapStatus::Surjective) {
        emit(&diags_, "LN-BIND", path,
             "bindings map the loop space onto the iterator domains more than once");
      } else {
        emit(&diags_, "LN-BIND", path, r.reason);
      }
      return;
    }
    if (!is_true(s->predicate)) {
      // a predicate on an exactly-covering binding restricts the domain
      if (!check_predicated(s, bindings, domains, r, path)) return;
    }
    check_kind_mixing(s, path);
  }

  // Accepts predicates of the form  binding_i < true_extent_i  covering every
  // overapproximated binding.
  bool check_predicated(const Stmt& s, const std::vector<Expr>& bindings,
                        const std::vector<Range>& domains, const IterMapResult& base,
                        const std::string& path) {
    IterMapResult free_map = detect_iter_map(bindings, loops_, {});
    if (!free_map.decomposed || free_map.status != IterMapStatus::Bijective) {
      emit(&diags_, "LN-BIND", path,
           free_map.reason.empty() ? "bindings do not form an independent bijection"
                                   : free_map.reason);
      return false;
    }
    (void)base;
    std::vector<Expr> conjuncts;
    std::function<void(const Expr&)> split = [&](const Expr& e) {
      if (e->kind == ExprKind::And) {
        split(e->args[0]);
        split(e->args[1]);
      } else if (!is_true(e)) {
        conjuncts.push_back(e);
      }
    };
    split(s->predicate);

    std::vector<bool> guarded(bindings.size(), false);
    for (const auto& c : conjuncts) {
      int64_t bound;
      if (c->kind != ExprKind::Lt || !as_const_int(c->args[1], &bound)) {
        emit(&diags_, "LN-BIND", path,
             "unsupported predicate form '" + print_expr(c) + "'");
        return false;
      }
      std::string lhs = print_expr(simplify(c->args[0], loops_));
      bool matched = false;
      for (size_t i = 0; i < bindings.size(); ++i) {
        if (print_expr(simplify(bindings[i], loops_)) != lhs) continue;
        matched = true;
        int64_t ext;
        as_const_int(domains[i].extent, &ext);
        if (bound != ext) {
          emit(&diags_, "LN-BIND", path,
               "predicate bound " + std::to_string(bound) + " does not match the domain [0, " +
                   std::to_string(ext) + ") of binding '" + print_expr(bindings[i]) + "'");
          return false;
        }
        guarded[i] = true;
      }
      if (!matched) {
        emit(&diags_, "LN-BIND", path,
             "predicate '" + print_expr(c) + "' does not guard any block binding");
        return false;
      }
    }
    for (size_t i = 0; i < bindings.size(); ++i) {
      int64_t ext;
      as_const_int(domains[i].extent, &ext);
      if (free_map.decomps[i].range == ext) continue;
      if (free_map.decomps[i].range < ext) {
        emit(&diags_, "LN-BIND", path,
             "binding '" + print_expr(bindings[i]) + "' covers only [0, " +
                 std::to_string(free_map.decomps[i].range) + ") of the domain [0, " +
                 std::to_string(ext) + ")");
        return false;
      }
      if (!guarded[i]) {
        emit(&diags_, "LN-BIND", path,
             "binding '" + print_expr(bindings[i]) + "' exceeds its domain [0, " +
                 std::to_string(ext) + ") without a guarding predicate");
        return false;
      }
    }
    return true;
  }

  // Loops that execute in parallel must drive only data-parallel iterators
  // (reductions on parallel loops are rejected, never made atomic).
  void check_kind_mixing(const Stmt& s, const std::string& path) {
    const Block& b = *s->block;
    for (size_t i = 0; i < b.iter_vars.size(); ++i) {
      if (b.iter_vars[i].kind == IterKind::DataParallel) continue;
      std::set<std::string> fv;
      collect_free_vars(s->bindings[i], &fv);
      for (const auto& v : fv) {
        auto it = loop_kinds_.find(v);
        if (it == loop_kinds_.end()) continue;
        if (it->second == ForKind::Parallel || it->second == ForKind::Vectorized ||
            it->second == ForKind::ThreadBound) {
          emit(&diags_, "LN-BIND", path,
               "parallel-executing loop '" + v + "' drives the non-data-parallel iterator '" +
                   b.iter_vars[i].var->name + "'");
        }
      }
    }
  }

  const PrimFunc& func_;
  BoundsMap loops_;
  std::map<std::string, ForKind> loop_kinds_;
  std::vector<Diagnostic> diags_;
};

/******** coverage validation ********/

struct SubBlock {
  Stmt realize;
  std::vector<Stmt> loops;  // loops between the scope and the realize
};

void collect_scope_blocks(const Stmt& s, std::vector<Stmt>* loop_stack,
                          std::vector<SubBlock>* out, bool* opaque_scope) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::For:
      loop_stack->push_back(s);
      collect_scope_blocks(s->body, loop_stack, out, opaque_scope);
      loop_stack->pop_back();
      return;
    case StmtKind::Seq:
      for (const auto& c : s->stmts) collect_scope_blocks(c, loop_stack, out, opaque_scope);
      return;
    case StmtKind::BlockRealize:
      out->push_back(SubBlock{s, *loop_stack});
      return;
    case StmtKind::BufferStore:
    case StmtKind::Evaluate:
      *opaque_scope = true;  // raw statements: not a schedulable scope
      return;
  }
}

// Hull of a signature region at the consumer's location: loops shared with
// `other` stay symbolic, private loops (and optionally thread-bound loops)
// are widened.
std::optional<BufferRegion> location_hull(const SubBlock& sb, const BufferRegion& region,
                                          const SubBlock& other, const BoundsMap& scope_bounds,
                                          bool widen_threads) {
  VarMap binding;
  for (size_t i = 0; i < sb.realize->bindings.size(); ++i) {
    binding[sb.realize->block->iter_vars[i].var->name] = sb.realize->bindings[i];
  }
  std::set<const StmtNode*> shared;
  for (const auto& l : sb.loops) {
    for (const auto& m : other.loops) {
      if (l == m) shared.insert(l.get());
    }
  }
  BoundsMap widen, context = scope_bounds;
  for (const auto& l : sb.loops) {
    Range dom{make_int(0), l->extent};
    bool is_shared = shared.count(l.get()) > 0;
    bool is_thread = l->for_kind == ForKind::ThreadBound;
    if (is_shared && !(widen_threads && is_thread)) {
      context[l->loop_var->name] = dom;
    } else {
      widen[l->loop_var->name] = dom;
    }
  }
  return widen_region(region, binding, widen, context);
}

void coverage_of_scope(const Block& scope, std::vector<Diagnostic>* diags, bool threads,
                       const std::string& required_scope = "") {
  std::vector<Stmt> loop_stack;
  std::vector<SubBlock> blocks;
  bool opaque = false;
  collect_scope_blocks(scope.body, &loop_stack, &blocks, &opaque);
  if (opaque || blocks.empty()) return;

  BoundsMap scope_bounds;
  for (const auto& iv : scope.iter_vars) scope_bounds[iv.var->name] = iv.domain;

  for (size_t i = 0; i < blocks.size(); ++i) {
    for (size_t j = i + 1; j < blocks.size(); ++j) {
      const SubBlock& p = blocks[i];
      const SubBlock& c = blocks[j];
      for (const auto& wr : p.realize->block->writes) {
        if (!required_scope.empty() && wr.buffer->scope != required_scope) continue;
        for (const auto& rd : c.realize->block->reads) {
          if (rd.buffer->name != wr.buffer->name) continue;
          auto wh = location_hull(p, wr, c, scope_bounds, threads);
          auto rh = location_hull(c, rd, p, scope_bounds, threads);
          std::string rule = threads ? "TH-COOP" : "LN-COVER";
          std::string path = "block:" + c.realize->block->name;
          if (!wh || !rh) {
            emit(diags, rule, path,
                 "cannot bound the producer/consumer regions of '" + wr.buffer->name + "'");
            continue;
          }
          BoundsMap cover_bounds = scope_bounds;
          for (const auto& l : p.loops) {
            cover_bounds[l->loop_var->name] = Range{make_int(0), l->extent};
          }
          for (const auto& l : c.loops) {
            cover_bounds[l->loop_var->name] = Range{make_int(0), l->extent};
          }
          if (!region_cover(*wh, *rh, cover_bounds)) {
            emit(diags, rule, path,
                 std::string(threads ? "cooperative " : "") + "writes " + print_region(*wh) +
                     " of block '" + p.realize->block->name + "' do not cover reads " +
                     print_region(*rh));
          }
        }
      }
    }
  }
}

/******** threading validation ********/

class ThreadingValidator {
 public:
  explicit ThreadingValidator(const PrimFunc& f) : func_(f) {}

  std::vector<Diagnostic> run() {
    find_kernels(func_.body);
    // TH-SCOPE applies everywhere (a scoped intrinsic outside any kernel is
    // an error too)
    check_exec_scopes(func_.body, {});
    return std::move(diags_);
  }

 private:
  void find_kernels(const Stmt& s) {
    if (!s) return;
    if (s->kind == StmtKind::For && s->for_kind == ForKind::ThreadBound) {
      check_kernel(s);
      return;  // nested thread loops belong to this kernel
    }
    switch (s->kind) {
      case StmtKind::For:
        find_kernels(s->body);
        return;
      case StmtKind::Seq:
        for (const auto& c : s->stmts) find_kernels(c);
        return;
      case StmtKind::BlockRealize:
        find_kernels(s->block->init);
        find_kernels(s->block->body);
        return;
      default:
        return;
    }
  }

  void check_kernel(const Stmt& root) {
    // TH-BIND: equal extents per tag, no same-tag nesting, block index loops
    // outside thread index loops
    std::map<std::string, int64_t> tag_extent;
    std::function<void(const Stmt&, std::vector<std::string>)> walk =
        [&](const Stmt& s, std::vector<std::string> tags) {
          if (!s) return;
          if (s->kind == StmtKind::For && s->for_kind == ForKind::ThreadBound) {
            std::string path = "loop:" + s->loop_var->name;
            int64_t ext = -1;
            if (!as_const_int(s->extent, &ext)) {
              emit(&diags_, "TH-BIND", path, "thread-bound loop extent must be constant");
            }
            for (const auto& t : tags) {
              if (t == s->thread_tag) {
                emit(&diags_, "TH-BIND", path,
                     "loop rebinds '" + s->thread_tag + "' inside a loop already bound to it");
              }
              if (t.rfind("threadIdx", 0) == 0 && s->thread_tag.rfind("blockIdx", 0) == 0) {
                emit(&diags_, "TH-BIND", path,
                     "'" + s->thread_tag + "' may not nest inside '" + t + "'");
              }
            }
            auto it = tag_extent.find(s->thread_tag);
            if (it == tag_extent.end()) {
              tag_extent[s->thread_tag] = ext;
            } else if (it->second != ext) {
              emit(&diags_, "TH-BIND", path,
                   "loops bound to '" + s->thread_tag + "' have extents " +
                       std::to_string(it->second) + " and " + std::to_string(ext) +
                       " in one kernel scope");
            }
            tags.push_back(s->thread_tag);
          }
          switch (s->kind) {
            case StmtKind::For:
              walk(s->body, tags);
              return;
            case StmtKind::Seq:
              for (const auto& c : s->stmts) walk(c, tags);
              return;
            case StmtKind::BlockRealize:
              walk(s->block->init, tags);
              walk(s->block->body, tags);
              return;
            default:
              return;
          }
        };
    walk(root, {});
    // TH-COOP is checked per scope by the caller (cooperative_in_scopes)
  }

  void check_exec_scopes(const Stmt& s, std::vector<std::string> tags) {
    if (!s) return;
    if (s->kind == StmtKind::For) {
      if (s->for_kind == ForKind::ThreadBound) tags.push_back(s->thread_tag);
      check_exec_scopes(s->body, tags);
      return;
    }
    if (s->kind == StmtKind::Seq) {
      for (const auto& c : s->stmts) check_exec_scopes(c, tags);
      return;
    }
    if (s->kind == StmtKind::BlockRealize) {
      auto it = s->block->annotations.find("exec_scope");
      if (it != s->block->annotations.end() && !it->second.empty()) {
        bool found = std::find(tags.begin(), tags.end(), it->second) != tags.end();
        if (!found) {
          emit(&diags_, "TH-SCOPE", "block:" + s->block->name,
               "intrinsic requires execution under a loop bound to '" + it->second + "'");
        }
      }
      check_exec_scopes(s->block->init, tags);
      check_exec_scopes(s->block->body, tags);
    }
  }

  const PrimFunc& func_;
  std::vector<Diagnostic> diags_;
};

// TH-COOP needs the scope *containing* the kernel loops as well: cooperative
// copies usually live under thread loops inside an ordinary scope block.
std::vector<Diagnostic> cooperative_in_scopes(const PrimFunc& f) {
  std::vector<Diagnostic> diags;
  // find scopes that contain thread-bound loops
  std::function<void(const Stmt&, bool)> walk = [&](const Stmt& s, bool in_kernel) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::For:
        walk(s->body, in_kernel || s->for_kind == ForKind::ThreadBound);
        return;
      case StmtKind::Seq:
        for (const auto& c : s->stmts) walk(c, in_kernel);
        return;
      case StmtKind::BlockRealize: {
        bool has_threads = false;
        pre_order_stmts(s->block->body, [&](const Stmt& n) {
          if (n->kind == StmtKind::For && n->for_kind == ForKind::ThreadBound) has_threads = true;
          return true;
        });
        if (has_threads) {
          coverage_of_scope(*s->block, &diags, /*threads=*/true, "shared");
        }
        walk(s->block->init, in_kernel);
        walk(s->block->body, in_kernel);
        return;
      }
      default:
        return;
    }
  };
  walk(f.body, false);
  return diags;
}

}  // namespace

std::vector<Diagnostic> validate_loop_nests(const PrimFunc& f) {
  return LoopNestValidator(f).run();
}

std::vector<Diagnostic> validate_coverage(const PrimFunc& f) {
  std::vector<Diagnostic> diags;
  pre_order_stmts(f.body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize) {
      coverage_of_scope(*s->block, &diags, /*threads=*/false);
    }
    return true;
  });
  return diags;
}

std::vector<Diagnostic> validate_threading(const PrimFunc& f) {
  std::vector<Diagnostic> diags = ThreadingValidator(f).run();
  for (auto& d : cooperative_in_scopes(f)) diags.push_back(d);
  // deduplicate repeated cooperative findings from nested walks
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (const auto& d : diags) {
    std::string key = format_diagnostic(d);
    if (seen.insert(key).second) out.push_back(d);
  }
  return out;
}

std::vector<Diagnostic> validate_all(const PrimFunc& f) {
  std::vector<Diagnostic> out = validate_loop_nests(f);
  for (auto& d : validate_coverage(f)) out.push_back(d);
  for (auto& d : validate_threading(f)) out.push_back(d);
  return out;
}

}  // namespace tir
