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
#include "tir/analysis.h"

#include <algorithm>
#include <map>

#include "tir/text.h"

namespace tir {

namespace {

/******** shared linear decomposition ********/

struct Term {
  Expr atom;
  int64_t coeff;
};

struct Linear {
  std::vector<Term> terms;
  int64_t constant = 0;
};

void collect_linear(const Expr& e, int64_t scale, Linear* out) {
  int64_t c;
  if (as_const_int(e, &c)) {
    out->constant += c * scale;
    return;
  }
  switch (e->kind) {
    case ExprKind::Add:
      collect_linear(e->args[0], scale, out);
      collect_linear(e->args[1], scale, out);
      return;
    case ExprKind::Sub:
      collect_linear(e->args[0], scale, out);
      collect_linear(e->args[1], -scale, out);
      return;
    case ExprKind::Mul:
      if (as_const_int(e->args[1], &c)) {
        collect_linear(e->args[0], scale * c, out);
        return;
      }
      if (as_const_int(e->args[0], &c)) {
        collect_linear(e->args[1], scale * c, out);
        return;
      }
      break;
    default:
      break;
  }
  // merge identical atoms
  std::string key = print_expr(e);
  for (auto& t : out->terms) {
    if (print_expr(t.atom) == key) {
      t.coeff += scale;
      return;
    }
  }
  out->terms.push_back(Term{e, scale});
}

Linear to_linear(const Expr& e) {
  Linear l;
  collect_linear(e, 1, &l);
  l.terms.erase(
      std::remove_if(l.terms.begin(), l.terms.end(), [](const Term& t) { return t.coeff == 0; }),
      l.terms.end());
  return l;
}

/******** iter-map detection ********/

std::optional<IterPiece> piece_of(const Expr& atom, const BoundsMap& domains) {
  switch (atom->kind) {
    case ExprKind::Var: {
      auto it = domains.find(atom->name);
      if (it == domains.end()) return std::nullopt;
      int64_t mn, ext;
      if (!as_const_int(it->second.min, &mn) || mn != 0) return std::nullopt;
      if (!as_const_int(it->second.extent, &ext)) return std::nullopt;
      return IterPiece{atom->name, 1, ext};
    }
    case ExprKind::FloorDiv: {
      int64_t c;
      if (!as_const_int(atom->args[1], &c) || c <= 0) return std::nullopt;
      auto p = piece_of(atom->args[0], domains);
      if (!p || p->extent % c != 0) return std::nullopt;
      return IterPiece{p->source, p->lower_factor * c, p->extent / c};
    }
    case ExprKind::FloorMod: {
      int64_t c;
      if (!as_const_int(atom->args[1], &c) || c <= 0) return std::nullopt;
      auto p = piece_of(atom->args[0], domains);
      if (!p || c > p->extent || p->extent % c != 0) return std::nullopt;
      return IterPiece{p->source, p->lower_factor, c};
    }
    default:
      return std::nullopt;
  }
}

bool pieces_overlap(const IterPiece& a, const IterPiece& b) {
  if (a.source != b.source) return false;
  int64_t a_hi = a.lower_factor * a.extent;
  int64_t b_hi = b.lower_factor * b.extent;
  return std::max(a.lower_factor, b.lower_factor) < std::min(a_hi, b_hi);
}

}  // namespace

std::vector<LinearTerm> linear_terms(const Expr& e, int64_t* constant) {
  Linear l = to_linear(e);
  *constant = l.constant;
  std::vector<LinearTerm> out;
  for (const auto& t : l.terms) out.push_back(LinearTerm{t.atom, t.coeff});
  return out;
}

Expr linear_combination(const std::vector<LinearTerm>& terms, int64_t constant, DType dtype) {
  Expr result;
  for (const auto& t : terms) {
    if (t.coeff == 0) continue;
    Expr piece = t.coeff == 1 ? t.atom : mul(t.atom, make_int(t.coeff, dtype));
    result = result ? add(result, piece) : piece;
  }
  if (!result) return make_int(constant, dtype);
  if (constant != 0) result = add(result, make_int(constant, dtype));
  return result;
}

IterMapResult detect_iter_map(const std::vector<Expr>& bindings, const BoundsMap& loop_domains,
                              const std::vector<Range>& iter_domains) {
  IterMapResult res;
  if (!iter_domains.empty() && bindings.size() != iter_domains.size()) {
    res.reason = "binding count does not match iterator count";
    return res;
  }
  // loop domains must be constant and zero-based
  VarMap unit_subst;
  for (const auto& [name, dom] : loop_domains) {
    int64_t mn, ext;
    if (!as_const_int(dom.min, &mn) || mn != 0 || !as_const_int(dom.extent, &ext)) {
      res.reason = "loop domain of '" + name + "' is not constant and zero-based";
      return res;
    }
    if (ext == 1) unit_subst[name] = make_int(0);
  }

  std::vector<BindingDecomp> decomps;
  for (const auto& raw : bindings) {
    Expr b = simplify(substitute(raw, unit_subst), loop_domains);
    Linear lin = to_linear(b);
    if (lin.constant != 0) {
      res.reason = "binding '" + print_expr(raw) + "' has a nonzero offset";
      return res;
    }
    // decompose each atom into a digit range of a source iterator
    struct Piece {
      IterPiece piece;
      int64_t coeff;
    };
    std::vector<Piece> pieces;
    for (const auto& t : lin.terms) {
      auto p = piece_of(t.atom, loop_domains);
      if (!p) {
        res.reason = "binding '" + print_expr(raw) + "' is not a quasi-affine map of the loops";
        return res;
      }
      if (t.coeff <= 0) {
        res.reason = "binding '" + print_expr(raw) + "' uses a non-positive scale";
        return res;
      }
      pieces.push_back(Piece{*p, t.coeff});
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) { return a.coeff > b.coeff; });
    // the scales must form a mixed-radix fuse: innermost scale 1, each outer
    // scale equal to the accumulated extent of everything inner
    BindingDecomp d;
    int64_t expected = 1;
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
      if (it->coeff != expected) {
        res.reason = "binding '" + print_expr(raw) +
                     "' is not an independent fuse of loop iterators (scale " +
                     std::to_string(it->coeff) + " where " + std::to_string(expected) +
                     " is required)";
        return res;
      }
      expected *= it->piece.extent;
    }
    for (const auto& p : pieces) d.pieces.push_back(p.piece);
    d.range = expected;
    // pieces within one binding must not overlap
    for (size_t i = 0; i < d.pieces.size(); ++i) {
      for (size_t j = i + 1; j < d.pieces.size(); ++j) {
        if (pieces_overlap(d.pieces[i], d.pieces[j])) {
          res.reason = "binding '" + print_expr(raw) + "' reuses iterator digits";
          return res;
        }
      }
    }
    decomps.push_back(std::move(d));
  }

  res.decomposed = true;
  res.decomps = decomps;

  // independence across bindings
  for (size_t i = 0; i < decomps.size(); ++i) {
    for (size_t j = i + 1; j < decomps.size(); ++j) {
      for (const auto& a : decomps[i].pieces) {
        for (const auto& b : decomps[j].pieces) {
          if (pieces_overlap(a, b)) {
            res.reason = "bindings are not independent: '" + print_expr(bindings[i]) + "' and '" +
                         print_expr(bindings[j]) + "' share digits of '" + a.source + "'";
            return res;
          }
        }
      }
    }
  }

  // per-binding domain match
  for (size_t i = 0; i < decomps.size() && !iter_domains.empty(); ++i) {
    int64_t mn, ext;
    if (!as_const_int(iter_domains[i].min, &mn) || mn != 0 ||
        !as_const_int(iter_domains[i].extent, &ext)) {
      res.reason = "iterator domain " + std::to_string(i) + " is not constant and zero-based";
      return res;
    }
    if (decomps[i].range != ext) {
      res.reason = "binding '" + print_expr(bindings[i]) + "' covers [0, " +
                   std::to_string(decomps[i].range) + ") but the iterator domain is [0, " +
                   std::to_string(ext) + ")";
      return res;
    }
  }

  // full use of every loop iterator decides bijective vs surjective
  std::map<std::string, std::vector<IterPiece>> by_var;
  for (const auto& d : decomps) {
    for (const auto& p : d.pieces) by_var[p.source].push_back(p);
  }
  bool full = true;
  for (const auto& [name, dom] : loop_domains) {
    int64_t ext;
    as_const_int(dom.extent, &ext);
    if (ext == 1) continue;
    auto it = by_var.find(name);
    if (it == by_var.end()) {
      full = false;
      continue;
    }
    auto pieces = it->second;
    std::sort(pieces.begin(), pieces.end(),
              [](const IterPiece& a, const IterPiece& b) { return a.lower_factor < b.lower_factor; });
    int64_t expect = 1;
    for (const auto& p : pieces) {
      if (p.lower_factor != expect) {
        full = false;
        break;
      }
      expect = p.lower_factor * p.extent;
    }
    if (expect != ext) full = false;
  }
  res.status = full ? IterMapStatus::Bijective : IterMapStatus::Surjective;
  return res;
}

/******** interval hulls ********/

std::optional<Range> bound_range(const Expr& e, const BoundsMap& widen, const BoundsMap& context) {
  BoundsMap all = context;
  for (const auto& [k, v] : widen) all[k] = v;

  Linear lin = to_linear(simplify(e, all));
  VarMap lo_map, hi_map;
  bool fallback = false;
  for (const auto& t : lin.terms) {
    std::set<std::string> fv;
    collect_free_vars(t.atom, &fv);
    bool touches_widen = false;
    for (const auto& v : fv) {
      if (widen.count(v)) touches_widen = true;
    }
    if (!touches_widen) continue;  // stays symbolic in the hull
    if (t.atom->kind == ExprKind::Var) {
      const Range& dom = widen.at(t.atom->name);
      int64_t mn, ext;
      if (!as_const_int(dom.min, &mn) || !as_const_int(dom.extent, &ext)) return std::nullopt;
      Expr lo = make_int(mn), hi = make_int(mn + ext - 1);
      if (t.coeff >= 0) {
        lo_map[t.atom->name] = lo;
        hi_map[t.atom->name] = hi;
      } else {
        lo_map[t.atom->name] = hi;
        hi_map[t.atom->name] = lo;
      }
    } else {
      fallback = true;
    }
  }
  if (fallback) {
    // not affine in the widened vars: fall back to constant interval bounds
    auto b = const_int_bounds(e, all);
    if (!b) return std::nullopt;
    return Range{make_int(b->first), make_int(b->second - b->first + 1)};
  }
  Expr lo = simplify(substitute(e, lo_map), context);
  Expr hi = simplify(substitute(e, hi_map), context);
  Expr extent = simplify(add(sub(hi, lo), make_int(1, lo->dtype)), context);
  return Range{lo, extent};
}

std::optional<BufferRegion> widen_region(const BufferRegion& r, const VarMap& bindings,
                                         const BoundsMap& widen, const BoundsMap& context) {
  BufferRegion out;
  out.buffer = r.buffer;
  for (size_t d = 0; d < r.ranges.size(); ++d) {
    Expr mn = substitute(r.ranges[d].min, bindings);
    Expr ext = substitute(r.ranges[d].extent, bindings);
    // hull of [mn, mn + ext) over the widened vars
    auto lo = bound_range(mn, widen, context);
    std::set<std::string> ext_fv;
    collect_free_vars(ext, &ext_fv);
    bool ext_widens = false;
    for (const auto& v : ext_fv) ext_widens |= widen.count(v) > 0;
    int64_t ext_c;
    if (lo && !ext_widens && as_const_int(simplify(ext, context), &ext_c)) {
      out.ranges.push_back(
          Range{lo->min, simplify(add(sub(lo->extent, make_int(1)), make_int(ext_c)), context)});
      continue;
    }
    auto hi = bound_range(simplify(sub(add(mn, ext), make_int(1)), context), widen, context);
    if (!lo || !hi) return std::nullopt;
    Expr extent = simplify(
        sub(add(hi->min, hi->extent), lo->min), context);
    out.ranges.push_back(Range{lo->min, extent});
  }
  return out;
}

/******** access regions ********/

namespace {

class RegionCollector {
 public:
  RegionCollector(const Block& block, const BoundsMap& outer) : block_(block) {
    context_ = outer;
    for (const auto& iv : block.iter_vars) context_[iv.var->name] = iv.domain;
    collect_stores(block.init);
    collect_stores(block.body);
  }

  AccessInfo run() {
    walk(block_.init);
    walk(block_.body);
    AccessInfo info;
    for (const auto& name : read_order_) info.reads.push_back(finalize(reads_.at(name)));
    for (const auto& name : write_order_) info.writes.push_back(finalize(writes_.at(name)));
    info.conservative = conservative_;
    return info;
  }

 private:
  struct Hull {
    BufferPtr buffer;
    // per dimension: list of [lo, hi] expr pairs; merged at the end
    std::vector<std::vector<std::pair<Expr, Expr>>> dims;
    std::vector<bool> full;  // dimension widened to the whole extent
  };

  void collect_stores(const Stmt& s) {
    pre_order_stmts(s, [&](const Stmt& n) {
      if (n->kind == StmtKind::BufferStore) {
        std::string sig = n->buffer->name;
        for (const auto& i : n->indices) sig += "|" + print_expr(i);
        self_stores_.insert(sig);
      }
      return n->kind != StmtKind::BlockRealize;  // do not descend into sub-blocks
    });
  }

  void walk(const Stmt& s) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::For:
        widen_[s->loop_var->name] = Range{make_int(0), s->extent};
        walk(s->body);
        widen_.erase(s->loop_var->name);
        return;
      case StmtKind::BlockRealize: {
        // use the inner block's signature, substituting its bindings
        VarMap binding;
        for (size_t i = 0; i < s->bindings.size(); ++i) {
          binding[s->block->iter_vars[i].var->name] = s->bindings[i];
        }
        for (const auto& r : s->block->reads) record_region(r, binding, /*is_write=*/false);
        for (const auto& r : s->block->writes) record_region(r, binding, /*is_write=*/true);
        for (const auto& b : s->bindings) walk_expr(b, false);
        return;
      }
      case StmtKind::BufferStore: {
        record_access(s->buffer, s->indices, /*is_write=*/true);
        for (const auto& i : s->indices) walk_expr(i, true);
        walk_expr(s->value, true);
        return;
      }
      case StmtKind::Seq:
        for (const auto& c : s->stmts) walk(c);
        return;
      case StmtKind::Evaluate:
        walk_expr(s->expr, true);
        return;
    }
  }

  void walk_expr(const Expr& e, bool count_loads) {
    post_order_exprs(e, [&](const Expr& n) {
      if (n->kind == ExprKind::BufferLoad && count_loads) {
        std::string sig = n->buffer->name;
        for (const auto& i : n->args) sig += "|" + print_expr(i);
        if (self_stores_.count(sig)) return;  // reduction self-access
        record_access(n->buffer, n->args, /*is_write=*/false);
      }
    });
  }

  static bool data_dependent(const Expr& e) {
    bool found = false;
    post_order_exprs(e, [&](const Expr& n) {
      if (n->kind == ExprKind::BufferLoad || n->kind == ExprKind::Call) found = true;
    });
    return found;
  }

  void record_access(const BufferPtr& buf, const std::vector<Expr>& indices, bool is_write) {
    Hull& h = hull_for(buf, is_write);
    for (size_t d = 0; d < indices.size(); ++d) {
      if (h.full[d]) continue;
      if (data_dependent(indices[d])) {
        mark_full(h, d, buf);
        continue;
      }
      auto r = bound_range(indices[d], widen_, context_);
      if (!r) {
        mark_full(h, d, buf);
        continue;
      }
      Expr hi = simplify(sub(add(r->min, r->extent), make_int(1)), context_);
      h.dims[d].emplace_back(r->min, hi);
    }
  }

  void record_region(const BufferRegion& r, const VarMap& binding, bool is_write) {
    Hull& h = hull_for(r.buffer, is_write);
    for (size_t d = 0; d < r.ranges.size(); ++d) {
      if (h.full[d]) continue;
      Expr mn = substitute(r.ranges[d].min, binding);
      Expr ext = substitute(r.ranges[d].extent, binding);
      auto lo = bound_range(mn, widen_, context_);
      auto hi = bound_range(simplify(sub(add(mn, ext), make_int(1)), context_), widen_, context_);
      if (!lo || !hi) {
        mark_full(h, d, r.buffer);
        continue;
      }
      h.dims[d].emplace_back(lo->min,
                             simplify(sub(add(hi->min, hi->extent), make_int(1)), context_));
    }
  }

  void mark_full(Hull& h, size_t d, const BufferPtr& buf) {
    h.full[d] = true;
    h.dims[d].clear();
    h.dims[d].emplace_back(make_int(0), make_int(buf->shape[d] - 1));
    conservative_.insert(buf->name);
  }

  Hull& hull_for(const BufferPtr& buf, bool is_write) {
    auto& table = is_write ? writes_ : reads_;
    auto& order = is_write ? write_order_ : read_order_;
    auto it = table.find(buf->name);
    if (it == table.end()) {
      Hull h;
      h.buffer = buf;
      h.dims.resize(buf->shape.size());
      h.full.resize(buf->shape.size(), false);
      order.push_back(buf->name);
      it = table.emplace(buf->name, std::move(h)).first;
    }
    return it->second;
  }

  BufferRegion finalize(const Hull& h) {
    BufferRegion r;
    r.buffer = h.buffer;
    for (size_t d = 0; d < h.dims.size(); ++d) {
      Expr lo = h.dims[d][0].first;
      Expr hi = h.dims[d][0].second;
      for (size_t i = 1; i < h.dims[d].size(); ++i) {
        lo = make_binary(ExprKind::Min, lo, h.dims[d][i].first);
        hi = make_binary(ExprKind::Max, hi, h.dims[d][i].second);
      }
      lo = simplify(lo, context_);
      hi = simplify(hi, context_);
      r.ranges.push_back(Range{lo, simplify(add(sub(hi, lo), make_int(1)), context_)});
    }
    return r;
  }

  const Block& block_;
  BoundsMap context_;  // block iters + outer bindings
  BoundsMap widen_;    // loop vars inside the block body
  std::map<std::string, Hull> reads_, writes_;
  std::vector<std::string> read_order_, write_order_;
  std::set<std::string> self_stores_;
  std::set<std::string> conservative_;
};

}  // namespace

AccessInfo compute_access_regions(const Block& b, const BoundsMap& outer_bounds) {
  return RegionCollector(b, outer_bounds).run();
}

/******** dependency graph ********/

namespace {

struct SubBlockInfo {
  Stmt realize;
  std::vector<BufferRegion> reads, writes;
};

void collect_sub_blocks(const Stmt& s, BoundsMap* loops, const BoundsMap& scope_bounds,
                        std::vector<SubBlockInfo>* out) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::For: {
      (*loops)[s->loop_var->name] = Range{make_int(0), s->extent};
      collect_sub_blocks(s->body, loops, scope_bounds, out);
      loops->erase(s->loop_var->name);
      return;
    }
    case StmtKind::BlockRealize: {
      SubBlockInfo info;
      info.realize = s;
      VarMap binding;
      for (size_t i = 0; i < s->bindings.size(); ++i) {
        binding[s->block->iter_vars[i].var->name] = s->bindings[i];
      }
      auto widen_all = [&](const BufferRegion& r) -> BufferRegion {
        auto w = widen_region(r, binding, *loops, scope_bounds);
        if (w) return *w;
        // unknown: cover the whole buffer
        BufferRegion full;
        full.buffer = r.buffer;
        for (int64_t d : r.buffer->shape) full.ranges.push_back(const_range(0, d));
        return full;
      };
      for (const auto& r : s->block->reads) info.reads.push_back(widen_all(r));
      for (const auto& r : s->block->writes) info.writes.push_back(widen_all(r));
      out->push_back(std::move(info));
      return;
    }
    case StmtKind::Seq:
      for (const auto& c : s->stmts) collect_sub_blocks(c, loops, scope_bounds, out);
      return;
    case StmtKind::BufferStore:
      throw_error("NotSchedulable", "scope contains a raw store to '" + s->buffer->name +
                                        "' outside any sub-block");
    case StmtKind::Evaluate:
      throw_error("NotSchedulable", "scope contains a raw evaluate outside any sub-block");
  }
}

bool ranges_may_intersect(const Range& a, const Range& b, const BoundsMap& bounds) {
  // disjoint if a ends before b starts or vice versa
  Expr a_hi = add(a.min, a.extent);  // exclusive
  Expr b_hi = add(b.min, b.extent);
  if (prove(make_binary(ExprKind::Le, a_hi, b.min), bounds)) return false;
  if (prove(make_binary(ExprKind::Le, b_hi, a.min), bounds)) return false;
  return true;
}

bool regions_may_intersect(const BufferRegion& a, const BufferRegion& b, const BoundsMap& bounds) {
  for (size_t d = 0; d < a.ranges.size(); ++d) {
    if (!ranges_may_intersect(a.ranges[d], b.ranges[d], bounds)) return false;
  }
  return true;
}

}  // namespace

std::vector<DepEdge> build_dependency_graph(const Block& scope) {
  BoundsMap scope_bounds;
  for (const auto& iv : scope.iter_vars) scope_bounds[iv.var->name] = iv.domain;
  std::vector<SubBlockInfo> blocks;
  BoundsMap loops;
  collect_sub_blocks(scope.body, &loops, scope_bounds, &blocks);

  std::vector<DepEdge> edges;
  auto add_edges = [&](const SubBlockInfo& src, const SubBlockInfo& dst,
                       const std::vector<BufferRegion>& sregs,
                       const std::vector<BufferRegion>& dregs, DepKind kind) {
    for (const auto& sr : sregs) {
      for (const auto& dr : dregs) {
        if (sr.buffer->name != dr.buffer->name) continue;
        if (!regions_may_intersect(sr, dr, scope_bounds)) continue;
        bool dup = false;
        for (const auto& e : edges) {
          if (e.src == src.realize->block && e.dst == dst.realize->block && e.kind == kind &&
              e.buffer->name == sr.buffer->name) {
            dup = true;
          }
        }
        if (!dup) {
          edges.push_back(DepEdge{src.realize->block, dst.realize->block, kind, sr.buffer});
        }
      }
    }
  };

  for (size_t i = 0; i < blocks.size(); ++i) {
    for (size_t j = i + 1; j < blocks.size(); ++j) {
      add_edges(blocks[i], blocks[j], blocks[i].writes, blocks[j].reads, DepKind::RAW);
      add_edges(blocks[i], blocks[j], blocks[i].writes, blocks[j].writes, DepKind::WAW);
      add_edges(blocks[i], blocks[j], blocks[i].reads, blocks[j].writes, DepKind::WAR);
    }
  }
  return edges;
}

/******** coverage ********/

namespace {

bool prove_or_enumerate(const Expr& cond, const BoundsMap& bounds) {
  if (prove(cond, bounds)) return true;
  Expr c = simplify(cond, bounds);
  int64_t v;
  if (as_const_int(c, &v)) return v != 0;
  // enumerate when the free-variable space is small and concrete
  std::set<std::string> fv;
  collect_free_vars(c, &fv);
  int64_t total = 1;
  std::vector<std::pair<std::string, std::pair<int64_t, int64_t>>> dims;
  for (const auto& name : fv) {
    auto it = bounds.find(name);
    if (it == bounds.end()) return false;
    int64_t mn, ext;
    if (!as_const_int(it->second.min, &mn) || !as_const_int(it->second.extent, &ext)) return false;
    total *= ext;
    if (total > (1 << 16)) return false;
    dims.emplace_back(name, std::make_pair(mn, ext));
  }
  std::map<std::string, int64_t> env;
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == dims.size()) {
      auto r = eval_int_expr(c, env);
      return r && *r != 0;
    }
    for (int64_t v2 = dims[i].second.first; v2 < dims[i].second.first + dims[i].second.second;
         ++v2) {
      env[dims[i].first] = v2;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  return rec(0);
}

}  // namespace

bool region_cover(const BufferRegion& producer_writes, const BufferRegion& consumer_reads,
                  const BoundsMap& bounds) {
  if (producer_writes.buffer->name != consumer_reads.buffer->name) return false;
  for (size_t d = 0; d < producer_writes.ranges.size(); ++d) {
    const Range& w = producer_writes.ranges[d];
    const Range& r = consumer_reads.ranges[d];
    Expr lo_ok = make_binary(ExprKind::Le, w.min, r.min);
    Expr hi_ok = make_binary(ExprKind::Le, add(r.min, r.extent), add(w.min, w.extent));
    if (!prove_or_enumerate(lo_ok, bounds)) return false;
    if (!prove_or_enumerate(hi_ok, bounds)) return false;
  }
  return true;
}

}  // namespace tir
