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
#include "schedule_internal.h"

#include <algorithm>
#include <sstream>

#include "tir/structural.h"
#include "tir/subst.h"
#include "tir/text.h"

namespace tir {

namespace sched {

Expr const_true() { return make_bool(true); }

Stmt Located::scope_realize() const {
  for (auto it = ancestors.rbegin(); it != ancestors.rend(); ++it) {
    if ((*it)->kind == StmtKind::BlockRealize) return *it;
  }
  return nullptr;
}

BoundsMap Located::outer_bounds() const {
  BoundsMap b;
  for (const auto& a : ancestors) {
    if (a->kind == StmtKind::For) {
      b[a->loop_var->name] = Range{make_int(0), a->extent};
    } else if (a->kind == StmtKind::BlockRealize) {
      for (const auto& iv : a->block->iter_vars) b[iv.var->name] = iv.domain;
    }
  }
  return b;
}

namespace {

bool locate_impl(const Stmt& s, const std::function<bool(const Stmt&)>& pred, Located* out) {
  if (!s) return false;
  if (pred(s)) {
    out->node = s;
    return true;
  }
  out->ancestors.push_back(s);
  switch (s->kind) {
    case StmtKind::For:
      if (locate_impl(s->body, pred, out)) return true;
      break;
    case StmtKind::BlockRealize:
      if (locate_impl(s->block->init, pred, out)) return true;
      if (locate_impl(s->block->body, pred, out)) return true;
      break;
    case StmtKind::Seq:
      for (const auto& c : s->stmts) {
        if (locate_impl(c, pred, out)) return true;
      }
      break;
    default:
      break;
  }
  out->ancestors.pop_back();
  return false;
}

}  // namespace

Located locate_loop(const PrimFuncPtr& f, const std::string& var) {
  Located loc;
  if (!locate_impl(f->body,
                   [&](const Stmt& s) {
                     return s->kind == StmtKind::For && s->loop_var->name == var;
                   },
                   &loc)) {
    throw_error("StaleHandle", "no loop named '" + var + "' in function '" + f->name + "'");
  }
  return loc;
}

Located locate_block(const PrimFuncPtr& f, const std::string& name) {
  Located loc;
  if (!locate_impl(f->body,
                   [&](const Stmt& s) {
                     return s->kind == StmtKind::BlockRealize && s->block->name == name;
                   },
                   &loc)) {
    throw_error("StaleHandle", "no block named '" + name + "' in function '" + f->name + "'");
  }
  return loc;
}

namespace {

// returns nullptr when the subtree should be deleted
Stmt replace_rec(const Stmt& s, const Stmt& target, const Stmt& replacement, bool* found) {
  if (!s) return s;
  if (s == target) {
    *found = true;
    return replacement;
  }
  switch (s->kind) {
    case StmtKind::For: {
      Stmt body = replace_rec(s->body, target, replacement, found);
      if (body == s->body) return s;
      if (!body) return nullptr;  // empty loop disappears
      auto n = std::make_shared<StmtNode>(*s);
      n->body = body;
      return n;
    }
    case StmtKind::BlockRealize: {
      Stmt init = replace_rec(s->block->init, target, replacement, found);
      Stmt body = replace_rec(s->block->body, target, replacement, found);
      if (init == s->block->init && body == s->block->body) return s;
      auto blk = std::make_shared<Block>(*s->block);
      blk->init = init;
      blk->body = body ? body : make_seq({});
      auto n = std::make_shared<StmtNode>(*s);
      n->block = blk;
      return n;
    }
    case StmtKind::Seq: {
      std::vector<Stmt> stmts;
      bool changed = false;
      for (const auto& c : s->stmts) {
        Stmt nc = replace_rec(c, target, replacement, found);
        changed |= nc != c;
        if (nc) stmts.push_back(nc);
      }
      if (!changed) return s;
      return make_seq(std::move(stmts));
    }
    default:
      return s;
  }
}

}  // namespace

PrimFuncPtr replace_node(const PrimFuncPtr& f, const Stmt& target, const Stmt& replacement) {
  bool found = false;
  Stmt body = replace_rec(f->body, target, replacement, &found);
  if (!found) throw_error("InternalError", "replace_node: target not found");
  auto nf = std::make_shared<PrimFunc>(*f);
  nf->body = body;
  return nf;
}

std::set<std::string> used_names(const PrimFunc& f) {
  std::set<std::string> names;
  for (const auto& p : f.params) names.insert(p->name);
  pre_order_stmts(f.body, [&](const Stmt& s) {
    if (s->kind == StmtKind::For) {
      names.insert(s->loop_var->name);
    } else if (s->kind == StmtKind::BlockRealize) {
      names.insert(s->block->name);
      for (const auto& iv : s->block->iter_vars) names.insert(iv.var->name);
      for (const auto& ab : s->block->alloc_buffers) names.insert(ab->name);
    }
    return true;
  });
  return names;
}

std::string fresh_name(const std::set<std::string>& used, const std::string& base) {
  if (!used.count(base)) return base;
  for (int i = 0;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

std::vector<Stmt> collect_realizes(const Stmt& s, bool direct_only) {
  std::vector<Stmt> out;
  pre_order_stmts(s, [&](const Stmt& n) {
    if (n->kind == StmtKind::BlockRealize && n != s) {
      out.push_back(n);
      return !direct_only;
    }
    return true;
  });
  if (s && s->kind == StmtKind::BlockRealize) out.insert(out.begin(), s);
  return out;
}

bool subtree_contains(const Stmt& root, const Stmt& node) {
  bool found = false;
  pre_order_stmts(root, [&](const Stmt& s) {
    if (s == node) found = true;
    return !found;
  });
  return found;
}

std::vector<Stmt> private_loops(const Located& block_loc) {
  std::vector<Stmt> chain;
  for (auto it = block_loc.ancestors.rbegin(); it != block_loc.ancestors.rend(); ++it) {
    const Stmt& a = *it;
    if (a->kind != StmtKind::For) break;
    // the loop is private when its whole subtree realizes only this block
    auto realizes = collect_realizes(a->body);
    if (realizes.size() != 1 || realizes[0] != block_loc.node) break;
    chain.push_back(a);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

BlockPtr with_recomputed_regions(const BlockPtr& blk, const BoundsMap& outer) {
  AccessInfo info = compute_access_regions(*blk, outer);
  auto nb = std::make_shared<Block>(*blk);
  nb->reads = info.reads;
  nb->writes = info.writes;
  return nb;
}

bool is_tensorized(const Block& b) { return b.annotations.count("tensorized") > 0; }

int seq_index_containing(const std::vector<Stmt>& seq, const Stmt& node) {
  for (size_t i = 0; i < seq.size(); ++i) {
    if (subtree_contains(seq[i], node)) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace sched

using namespace sched;

/******** IndexMap ********/

IndexMap IndexMap::identity(size_t rank) {
  IndexMap m;
  for (size_t i = 0; i < rank; ++i) {
    m.params.push_back("d" + std::to_string(i));
    m.exprs.push_back(make_var(m.params.back()));
  }
  return m;
}

IndexMap IndexMap::parse(const std::string& text) {
  auto arrow = text.find("->");
  if (arrow == std::string::npos) {
    throw_error("SyntaxError", "index map must have the form '(vars) -> (exprs)'");
  }
  auto strip = [](std::string s) {
    size_t b = s.find_first_not_of(" \t\n");
    size_t e = s.find_last_not_of(" \t\n");
    if (b == std::string::npos) return std::string();
    return s.substr(b, e - b + 1);
  };
  auto unparen = [&](std::string s) {
    s = strip(s);
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    return s;
  };
  auto split_commas = [](const std::string& s) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : s) {
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') --depth;
      if (c == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
  };
  IndexMap m;
  for (auto& p : split_commas(unparen(text.substr(0, arrow)))) {
    m.params.push_back(strip(p));
  }
  for (auto& p : split_commas(unparen(text.substr(arrow + 2)))) {
    m.exprs.push_back(parse_expr_text(strip(p), m.params));
  }
  return m;
}

std::string IndexMap::to_string() const {
  std::string s = "(";
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) s += ", ";
    s += params[i];
  }
  s += ") -> (";
  for (size_t i = 0; i < exprs.size(); ++i) {
    if (i) s += ", ";
    s += print_expr(exprs[i]);
  }
  s += ")";
  return s;
}

/******** trace serialization ********/

std::string trace_to_jsonl(const std::vector<TraceStep>& trace) {
  std::string out;
  for (const auto& step : trace) {
    nlohmann::json j;
    j["prim"] = step.prim;
    j["args"] = step.args;
    j["decisions"] = step.decisions;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<TraceStep> trace_from_jsonl(const std::string& text) {
  std::vector<TraceStep> trace;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    TraceStep step;
    step.prim = j.at("prim").get<std::string>();
    if (j.contains("args")) step.args = j["args"];
    if (j.contains("decisions")) step.decisions = j["decisions"];
    trace.push_back(std::move(step));
  }
  return trace;
}

/******** Schedule ********/

Schedule::Schedule(PrimFuncPtr f) : func_(std::move(f)) { check_well_formed(*func_); }

void Schedule::commit_rewrite(PrimFuncPtr f, TraceStep step) {
  check_well_formed(*f);
  func_ = std::move(f);
  trace_.push_back(std::move(step));
}

namespace {
std::map<std::string, StepHandler>& step_handlers() {
  static std::map<std::string, StepHandler> handlers;
  return handlers;
}
}  // namespace

void register_step_handler(const std::string& prim, StepHandler handler) {
  step_handlers()[prim] = std::move(handler);
}

Stmt Schedule::find_loop(const std::string& var) const {
  Stmt found;
  pre_order_stmts(func_->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::For && s->loop_var->name == var) found = s;
    return !found;
  });
  return found;
}

Stmt Schedule::find_block_realize(const std::string& name) const {
  Stmt found;
  pre_order_stmts(func_->body, [&](const Stmt& s) {
    if (s->kind == StmtKind::BlockRealize && s->block->name == name) found = s;
    return !found;
  });
  return found;
}

std::vector<std::string> Schedule::loops_of(const std::string& block) const {
  Located loc = locate_block(func_, block);
  std::vector<std::string> out;
  for (const auto& a : loc.ancestors) {
    if (a->kind == StmtKind::For) out.push_back(a->loop_var->name);
    if (a->kind == StmtKind::BlockRealize && a != loc.ancestors.front()) out.clear();
  }
  // only loops below the nearest enclosing block
  std::vector<std::string> chain;
  for (auto it = loc.ancestors.rbegin(); it != loc.ancestors.rend(); ++it) {
    if ((*it)->kind == StmtKind::BlockRealize) break;
    if ((*it)->kind == StmtKind::For) chain.push_back((*it)->loop_var->name);
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

int64_t Schedule::loop_extent(const std::string& loop) const {
  Located loc = locate_loop(func_, loop);
  int64_t ext;
  if (!as_const_int(loc.node->extent, &ext)) {
    throw_error("ValueError", "loop '" + loop + "' has a non-constant extent");
  }
  return ext;
}

/******** split ********/

std::vector<std::string> Schedule::split(const std::string& loop, std::vector<int64_t> factors) {
  Located loc = locate_loop(func_, loop);
  int64_t extent;
  if (!as_const_int(loc.node->extent, &extent)) {
    throw_error("NotSchedulable", "cannot split loop '" + loop + "' with non-constant extent");
  }
  if (factors.empty()) throw_error("BadFactors", "no factors given");
  int infer_at = -1;
  int64_t known = 1;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (factors[i] == -1) {
      if (infer_at >= 0) throw_error("BadFactors", "at most one factor may be -1");
      infer_at = static_cast<int>(i);
    } else if (factors[i] < 1) {
      throw_error("BadFactors", "factors must be positive");
    } else {
      known *= factors[i];
    }
  }
  if (infer_at >= 0) {
    factors[infer_at] = (extent + known - 1) / known;  // cover quotient
  }
  int64_t product = 1;
  for (int64_t f : factors) product *= f;
  if (product < extent) {
    throw_error("BadFactors", "product of factors " + std::to_string(product) +
                                  " is smaller than the loop extent " + std::to_string(extent));
  }

  std::set<std::string> used = used_names(*func_);
  std::vector<Expr> new_vars;
  std::vector<std::string> new_names;
  for (size_t i = 0; i < factors.size(); ++i) {
    std::string name = fresh_name(used, loop + "_" + std::to_string(i));
    used.insert(name);
    new_names.push_back(name);
    new_vars.push_back(make_var(name));
  }
  // loop var = sum of new vars weighted by inner strides
  Expr combined;
  for (size_t i = 0; i < factors.size(); ++i) {
    int64_t stride = 1;
    for (size_t j = i + 1; j < factors.size(); ++j) stride *= factors[j];
    Expr piece = stride == 1 ? new_vars[i] : mul(new_vars[i], make_int(stride));
    combined = combined ? add(combined, piece) : piece;
  }

  Stmt body = substitute(loc.node->body, {{loop, combined}});
  if (product > extent) {
    // guard every directly-contained block instance
    Expr guard = lt(combined, make_int(extent));
    bool has_realize = false;
    std::function<Stmt(const Stmt&)> add_guard = [&](const Stmt& s) -> Stmt {
      if (!s) return s;
      switch (s->kind) {
        case StmtKind::For: {
          auto n = std::make_shared<StmtNode>(*s);
          n->body = add_guard(s->body);
          return n;
        }
        case StmtKind::Seq: {
          auto n = std::make_shared<StmtNode>(*s);
          for (auto& c : n->stmts) c = add_guard(c);
          return n;
        }
        case StmtKind::BlockRealize: {
          has_realize = true;
          auto n = std::make_shared<StmtNode>(*s);
          n->predicate = is_true(s->predicate) ? guard : land(s->predicate, guard);
          return n;
        }
        default:
          return s;
      }
    };
    body = add_guard(body);
    if (!has_realize) {
      throw_error("NotSchedulable",
                  "imperfect split of loop '" + loop + "' requires block leaves for predicates");
    }
  }

  for (int i = static_cast<int>(factors.size()) - 1; i >= 0; --i) {
    body = make_for(new_vars[i], make_int(factors[i]), body);
  }
  body = simplify_stmt(body, loc.outer_bounds());
  PrimFuncPtr nf = replace_node(func_, loc.node, body);

  TraceStep step{"split",
                 {{"loop", loop}, {"factors", factors}},
                 nlohmann::json::object()};
  commit(std::move(nf), std::move(step));
  return new_names;
}

/******** fuse ********/

std::string Schedule::fuse(const std::string& outer, const std::string& inner) {
  Located loc = locate_loop(func_, outer);
  const Stmt& o = loc.node;
  if (!o->body || o->body->kind != StmtKind::For || o->body->loop_var->name != inner) {
    throw_error("NotAdjacent", "loop '" + inner + "' is not the only child of '" + outer + "'");
  }
  const Stmt& in = o->body;
  if (o->for_kind != in->for_kind || o->thread_tag != in->thread_tag) {
    throw_error("KindMismatch", "cannot fuse loops with different kinds");
  }
  int64_t eo, ei;
  if (!as_const_int(o->extent, &eo) || !as_const_int(in->extent, &ei)) {
    throw_error("NotSchedulable", "fuse requires constant extents");
  }
  std::set<std::string> used = used_names(*func_);
  std::string fused = fresh_name(used, outer + "_" + inner + "_fused");
  Expr fvar = make_var(fused);
  Stmt body = substitute(in->body, {{outer, floordiv(fvar, make_int(ei))},
                                    {inner, floormod(fvar, make_int(ei))}});
  body = simplify_stmt(body, {{fused, const_range(0, eo * ei)}});
  Stmt nl = make_for(fvar, make_int(eo * ei), body, o->for_kind, o->thread_tag);
  PrimFuncPtr nf = replace_node(func_, o, nl);
  commit(std::move(nf), TraceStep{"fuse", {{"outer", outer}, {"inner", inner}}, {}});
  return fused;
}

/******** reorder ********/

void Schedule::reorder(const std::vector<std::string>& order) {
  if (order.empty()) return;
  std::set<std::string> wanted(order.begin(), order.end());
  if (wanted.size() != order.size()) throw_error("NotAChain", "duplicate loops in reorder");

  // find the outermost listed loop
  Located top_loc;
  bool found = false;
  for (const auto& name : order) {
    Located loc = locate_loop(func_, name);
    size_t depth = loc.ancestors.size();
    if (!found || depth < top_loc.ancestors.size()) {
      bool is_outermost = true;
      for (const auto& a : loc.ancestors) {
        if (a->kind == StmtKind::For && wanted.count(a->loop_var->name)) is_outermost = false;
      }
      if (is_outermost) {
        top_loc = loc;
        found = true;
      }
    }
  }
  if (!found) throw_error("NotAChain", "loops do not form a chain");

  // walk down the single-child chain from the top loop, collecting the chain
  std::vector<Stmt> chain;
  size_t seen = 0;
  Stmt cur = top_loc.node;
  while (true) {
    if (cur->kind != StmtKind::For) break;
    chain.push_back(cur);
    if (wanted.count(cur->loop_var->name)) ++seen;
    if (seen == order.size()) break;
    cur = cur->body;
    if (!cur) break;
  }
  if (seen != order.size()) {
    throw_error("NotAChain", "reordered loops must form an ancestor chain of single-child loops");
  }

  // positions of the listed loops within the chain
  std::vector<size_t> positions;
  for (size_t i = 0; i < chain.size(); ++i) {
    if (wanted.count(chain[i]->loop_var->name)) positions.push_back(i);
  }

  // reduction-vs-parallel legality with multiple blocks in the subtree
  auto realizes = collect_realizes(chain.back()->body);
  if (realizes.size() > 1) {
    auto loop_binds_kind = [&](const std::string& var, IterKind kind) {
      for (const auto& r : realizes) {
        for (size_t i = 0; i < r->bindings.size(); ++i) {
          if (r->block->iter_vars[i].kind != kind) continue;
          if (uses_any_var(r->bindings[i], {var})) return true;
        }
      }
      return false;
    };
    for (size_t a = 0; a < order.size(); ++a) {
      for (size_t b = a + 1; b < order.size(); ++b) {
        // after reorder, order[a] is outside order[b]
        const std::string& outer_new = order[a];
        const std::string& inner_new = order[b];
        // originally inner_new outside outer_new?
        size_t pos_outer = SIZE_MAX, pos_inner = SIZE_MAX;
        for (size_t i = 0; i < chain.size(); ++i) {
          if (chain[i]->loop_var->name == outer_new) pos_outer = i;
          if (chain[i]->loop_var->name == inner_new) pos_inner = i;
        }
        bool originally_swapped = pos_inner < pos_outer;
        if (originally_swapped && loop_binds_kind(outer_new, IterKind::Reduction) &&
            loop_binds_kind(inner_new, IterKind::DataParallel)) {
          throw_error("IllegalReorder",
                      "moving reduction loop '" + outer_new + "' outside data-parallel loop '" +
                          inner_new + "' would reorder dependent blocks");
        }
      }
    }
  }

  // rebuild the chain with listed loops permuted
  std::vector<Stmt> new_chain = chain;
  for (size_t i = 0; i < positions.size(); ++i) {
    new_chain[positions[i]] = *std::find_if(chain.begin(), chain.end(), [&](const Stmt& l) {
      return l->loop_var->name == order[i];
    });
  }
  Stmt rebuilt = chain.back()->body;
  for (auto it = new_chain.rbegin(); it != new_chain.rend(); ++it) {
    auto n = std::make_shared<StmtNode>(**it);
    n->body = rebuilt;
    rebuilt = n;
  }
  PrimFuncPtr nf = replace_node(func_, top_loc.node, rebuilt);
  commit(std::move(nf), TraceStep{"reorder", {{"loops", order}}, {}});
}

/******** bind and annotate ********/

void Schedule::bind(const std::string& loop, const std::string& thread_tag) {
  static const std::set<std::string> kTags = {"blockIdx.x",  "blockIdx.y",  "blockIdx.z",
                                              "threadIdx.x", "threadIdx.y", "threadIdx.z"};
  if (!kTags.count(thread_tag)) {
    throw_error("UnknownTag", "unknown thread tag '" + thread_tag + "'");
  }
  Located loc = locate_loop(func_, loop);
  auto n = std::make_shared<StmtNode>(*loc.node);
  n->for_kind = ForKind::ThreadBound;
  n->thread_tag = thread_tag;
  PrimFuncPtr nf = replace_node(func_, loc.node, n);

  // same tag within one kernel scope must have one extent
  Located self = locate_loop(nf, loop);
  Stmt kernel_root = self.node;
  for (const auto& a : self.ancestors) {
    if (a->kind == StmtKind::For && a->for_kind == ForKind::ThreadBound) {
      kernel_root = a;
      break;
    }
  }
  std::set<int64_t> extents;
  pre_order_stmts(kernel_root, [&](const Stmt& s) {
    if (s->kind == StmtKind::For && s->for_kind == ForKind::ThreadBound &&
        s->thread_tag == thread_tag) {
      int64_t e;
      if (as_const_int(s->extent, &e)) extents.insert(e);
    }
    return true;
  });
  if (extents.size() > 1) {
    throw_error("ConflictingBind",
                "loops of different extents bound to '" + thread_tag + "' in one kernel scope");
  }
  commit(std::move(nf), TraceStep{"bind", {{"loop", loop}, {"thread_tag", thread_tag}}, {}});
}

void Schedule::annotate(const std::string& loop, const std::string& kind) {
  ForKind fk;
  if (kind == "vectorize") {
    fk = ForKind::Vectorized;
  } else if (kind == "unroll") {
    fk = ForKind::Unrolled;
  } else if (kind == "parallel") {
    fk = ForKind::Parallel;
  } else {
    throw_error("ValueError", "unknown annotation '" + kind + "'");
  }
  Located loc = locate_loop(func_, loop);
  if (fk == ForKind::Vectorized || fk == ForKind::Parallel) {
    for (const auto& r : collect_realizes(loc.node->body)) {
      for (size_t i = 0; i < r->bindings.size(); ++i) {
        if (uses_any_var(r->bindings[i], {loop}) &&
            r->block->iter_vars[i].kind != IterKind::DataParallel) {
          throw_error("ReductionParallelizationError",
                      "loop '" + loop + "' binds non-data-parallel iterator '" +
                          r->block->iter_vars[i].var->name + "' of block '" + r->block->name +
                          "'");
        }
      }
    }
  }
  auto n = std::make_shared<StmtNode>(*loc.node);
  n->for_kind = fk;
  n->thread_tag.clear();
  PrimFuncPtr nf = replace_node(func_, loc.node, n);
  commit(std::move(nf), TraceStep{"annotate", {{"loop", loop}, {"kind", kind}}, {}});
}

void Schedule::annotate_block(const std::string& block, const std::string& key,
                              const std::string& value) {
  Located loc = locate_block(func_, block);
  auto blk = std::make_shared<Block>(*loc.node->block);
  blk->annotations[key] = value;
  auto n = std::make_shared<StmtNode>(*loc.node);
  n->block = blk;
  PrimFuncPtr nf = replace_node(func_, loc.node, n);
  commit(std::move(nf),
         TraceStep{"annotate_block", {{"block", block}, {"key", key}, {"value", value}}, {}});
}

/******** replay ********/

void Schedule::apply_step(const TraceStep& step) {
  const auto& a = step.args;
  auto arg_or_decision = [&](const char* key) -> nlohmann::json {
    if (step.decisions.contains(key)) return step.decisions[key];
    return a.at(key);
  };
  if (step.prim == "split") {
    split(a.at("loop").get<std::string>(), arg_or_decision("factors").get<std::vector<int64_t>>());
  } else if (step.prim == "fuse") {
    fuse(a.at("outer").get<std::string>(), a.at("inner").get<std::string>());
  } else if (step.prim == "reorder") {
    reorder(a.at("loops").get<std::vector<std::string>>());
  } else if (step.prim == "bind") {
    bind(a.at("loop").get<std::string>(), a.at("thread_tag").get<std::string>());
  } else if (step.prim == "annotate") {
    annotate(a.at("loop").get<std::string>(), arg_or_decision("kind").get<std::string>());
  } else if (step.prim == "annotate_block") {
    annotate_block(a.at("block").get<std::string>(), a.at("key").get<std::string>(),
                   a.at("value").get<std::string>());
  } else if (step.prim == "compute_at") {
    compute_at(a.at("block").get<std::string>(), a.at("loop").get<std::string>());
  } else if (step.prim == "compute_inline") {
    compute_inline(a.at("block").get<std::string>());
  } else if (step.prim == "cache_read") {
    cache_read(a.at("block").get<std::string>(), a.at("operand_index").get<int>(),
               arg_or_decision("scope").get<std::string>());
  } else if (step.prim == "cache_write") {
    cache_write(a.at("block").get<std::string>(), arg_or_decision("scope").get<std::string>());
  } else if (step.prim == "blockize") {
    blockize(a.at("loop").get<std::string>());
  } else if (step.prim == "decompose_reduction") {
    decompose_reduction(a.at("block").get<std::string>(), a.at("loop").get<std::string>());
  } else if (step.prim == "recompose_reduction") {
    recompose_reduction(a.at("block").get<std::string>());
  } else if (step.prim == "transform_layout") {
    transform_layout(a.at("buffer").get<std::string>(),
                     IndexMap::parse(a.at("index_map").get<std::string>()));
  } else if (step.prim == "pad_block") {
    pad_block(a.at("block").get<std::string>(),
              a.at("padded_extents").get<std::vector<int64_t>>());
  } else if (step.prim == "pad_buffer_strides") {
    pad_buffer_strides(a.at("buffer").get<std::string>());
  } else {
    auto it = step_handlers().find(step.prim);
    if (it == step_handlers().end()) {
      throw_error("ValueError", "unknown primitive '" + step.prim + "' in trace");
    }
    it->second(*this, step);
  }
}

Schedule replay(const std::vector<TraceStep>& trace, PrimFuncPtr f) {
  Schedule s(std::move(f));
  for (const auto& step : trace) s.apply_step(step);
  return s;
}

}  // namespace tir
