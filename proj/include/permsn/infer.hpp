// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// Type inference for β-strongly-normalizing terms, by well-founded recursion
// on ⟨η_β(t), size(t)⟩. The result is an explicit derivation that passes
// check().
//
//   x                 Ax with a fresh atom.
//   λx.u              infer u; x gets its type from u's context, or a fresh
//                     atom if u does not use it.
//   x v1 ... vn       infer every vj; x : (⋀ Aj) ∧ (B1 → ... → Bn → C) where
//                     Aj are the types the vj assumed for x and C is fresh.
//   (λx.a) b c...     x free in a: infer t' = a[x:=b] c... and read the types
//                     at which the copies of b were used; x and b both get
//                     their intersection. Otherwise infer (a c...) and b
//                     apart and give x the type of b.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "permsn/reduction.hpp"
#include "permsn/sn.hpp"
#include "permsn/term.hpp"
#include "permsn/typesys.hpp"

namespace permsn {

class InferencePrecondition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InferenceInternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One recursive call, with the measures of caller and callee.
struct MeasureRecord {
  std::size_t parent_eta = 0;
  std::size_t parent_size = 0;
  std::size_t child_eta = 0;
  std::size_t child_size = 0;
};

struct InferenceStats {
  std::size_t calls = 0;
  std::size_t max_depth = 0;
  std::vector<MeasureRecord> trace;
};

struct InferenceResult {
  Context ctx;
  Type type;
  Derivation derivation;
  InferenceStats stats;
  std::size_t atoms_issued = 0;
};

// Positions in a term holding copies of a substituted argument.
class OccurrenceLedger {
 public:
  OccurrenceLedger() = default;
  explicit OccurrenceLedger(std::vector<Path> paths) : paths_(paths.begin(), paths.end()) {}

  bool marks(const Path& p) const { return paths_.count(p) != 0; }
  std::size_t size() const { return paths_.size(); }
  bool empty() const { return paths_.empty(); }
  const std::set<Path>& paths() const { return paths_; }

  // Re-roots every mark under `prefix`.
  OccurrenceLedger under(const Path& prefix) const {
    OccurrenceLedger out;
    for (const auto& p : paths_) {
      Path q = prefix;
      q.insert(q.end(), p.begin(), p.end());
      out.paths_.insert(std::move(q));
    }
    return out;
  }

 private:
  std::set<Path> paths_;
};

struct InferOptions {
  std::size_t budget = 50'000;
  SnCache* cache = nullptr;
};

namespace detail {

class Inferencer {
 public:
  explicit Inferencer(const InferOptions& opt) : opt_(opt) {}

  Derivation run(const Term& t, std::size_t eta_t, std::size_t depth) {
    ++stats_.calls;
    stats_.max_depth = std::max(stats_.max_depth, depth);
    if (t.is_var()) {
      Type a = atoms_.fresh();
      return ax(Context{{t.index(), a}}, t, a);
    }
    if (t.is_lam()) return abstraction(t, eta_t, depth);
    Spine s = spine(t);
    if (s.head.is_var()) return variable_head(t, s, eta_t, depth);
    return redex_head(t, s, eta_t, depth);
  }

  InferenceStats& stats() { return stats_; }
  std::size_t atoms_issued() const { return atoms_.issued(); }

  std::size_t eta_beta(const Term& t) {
    SnVerdict v = sn_verdict(t, RuleSet::beta(), opt_.budget, opt_.cache);
    if (!v.sn()) throw InferencePrecondition("infer: term not proven beta-SN (" + to_string(v) + ")");
    return v.eta;
  }

 private:
  Derivation call(const Term& parent, std::size_t parent_eta, const Term& child, std::size_t depth) {
    std::size_t e = eta_beta(child);
    stats_.trace.push_back({parent_eta, parent.size(), e, child.size()});
    return run(child, e, depth + 1);
  }

  Derivation abstraction(const Term& t, std::size_t eta_t, std::size_t depth) {
    Derivation body = call(t, eta_t, t.body(), depth);
    auto it = body.ctx.find(0);
    if (it != body.ctx.end()) {
      Type a = it->second;
      return arrow_i(std::move(body), a);
    }
    Type a = atoms_.fresh();
    Context target = body.ctx;
    target.emplace(0, a);
    return arrow_i(strengthen(body, target), a);
  }

  Derivation variable_head(const Term& t, const Spine& s, std::size_t eta_t, std::size_t depth) {
    std::uint32_t x = s.head.index();
    std::vector<Derivation> args;
    std::vector<Context> ctxs;
    std::vector<Type> arg_types;
    for (const auto& v : s.args) {
      args.push_back(call(t, eta_t, v, depth));
      ctxs.push_back(args.back().ctx);
      arg_types.push_back(args.back().type);
    }
    MergeAllResult m = merge_all(ctxs);
    Type result = atoms_.fresh();
    Type fn = arrows(arg_types, result);
    auto prior = m.merged.find(x);
    bool has_prior = prior != m.merged.end();
    Type tx = has_prior ? Type::inter(prior->second, fn) : fn;
    Context gamma = m.merged;
    gamma[x] = tx;

    Derivation head = ax(gamma, s.head, tx);
    if (has_prior) head = and_e(std::move(head), Proj::Right);
    for (std::size_t j = 0; j < args.size(); ++j) {
      StrengthenPlan plan = m.plans[j];
      if (has_prior && ctxs[j].count(x)) {
        auto& steps = plan[x];
        steps.insert(steps.begin(), Proj::Left);
      }
      head = arrow_e(std::move(head), strengthen(args[j], gamma, plan));
    }
    return head;
  }

  // Rebuilds the derivation nodes on the spine positions f^j, j < n, with
  // each node found at f^n replaced by `inner(node)`. The spine arguments'
  // sub-derivations are kept as they are.
  template <typename F>
  static Derivation rebuild_spine(const Derivation& d, std::size_t j, std::size_t n, F& inner) {
    if (j == n) return inner(d);
    switch (d.rule) {
      case RuleTag::ArrowE: {
        Derivation f = rebuild_spine(d.children[0], j + 1, n, inner);
        return arrow_e(std::move(f), d.children[1]);
      }
      case RuleTag::AndE1:
      case RuleTag::AndE2:
        return and_e(rebuild_spine(d.children[0], j, n, inner), d.rule == RuleTag::AndE1 ? Proj::Left : Proj::Right);
      case RuleTag::AndI:
        return and_i(rebuild_spine(d.children[0], j, n, inner), rebuild_spine(d.children[1], j, n, inner));
      default:
        throw InferenceInternalError("infer: unexpected rule on an application spine");
    }
  }

  template <typename F>
  static void visit_spine(const Derivation& d, std::size_t j, std::size_t n, F& inner) {
    if (j == n) return inner(d);
    switch (d.rule) {
      case RuleTag::ArrowE:
        return visit_spine(d.children[0], j + 1, n, inner);
      case RuleTag::AndE1:
      case RuleTag::AndE2:
        return visit_spine(d.children[0], j, n, inner);
      case RuleTag::AndI:
        visit_spine(d.children[0], j, n, inner);
        return visit_spine(d.children[1], j, n, inner);
      default:
        throw InferenceInternalError("infer: unexpected rule on an application spine");
    }
  }

  struct Occurrence {
    const Derivation* node;
    std::uint32_t depth;  // binders between the substituted body and the copy
  };

  // Topmost derivation nodes sitting at marked positions, in preorder.
  static void collect_occurrences(const Derivation& d, Path& pos, std::uint32_t depth, const OccurrenceLedger& marks,
                                  std::vector<Occurrence>& out) {
    if (marks.marks(pos)) {
      out.push_back({&d, depth});
      return;
    }
    switch (d.rule) {
      case RuleTag::Ax:
        return;
      case RuleTag::ArrowE:
        pos.push_back(Step::Fun);
        collect_occurrences(d.children[0], pos, depth, marks, out);
        pos.back() = Step::Arg;
        collect_occurrences(d.children[1], pos, depth, marks, out);
        pos.pop_back();
        return;
      case RuleTag::ArrowI:
        pos.push_back(Step::Body);
        collect_occurrences(d.children[0], pos, depth + 1, marks, out);
        pos.pop_back();
        return;
      default:
        for (const auto& c : d.children) collect_occurrences(c, pos, depth, marks, out);
        return;
    }
  }

  // Re-types the body a (with x free as its index 0) from a derivation of
  // a[x:=b]: every occurrence node becomes x:A followed by ∧-eliminations.
  struct Abstractor {
    const Term& body;
    const Context& outer;  // Γ, x:A
    const OccurrenceLedger& marks;
    const std::unordered_map<const Derivation*, std::vector<Proj>>& extract;

    Derivation run(const Derivation& d, Path& pos, std::vector<Type>& binders) const {
      Context ctx = under_binders(outer, binders);
      std::uint32_t depth = static_cast<std::uint32_t>(binders.size());
      if (marks.marks(pos)) {
        auto it = extract.find(&d);
        if (it == extract.end()) throw InferenceInternalError("infer: occurrence without a collected type");
        Derivation out = ax(ctx, Term::var(depth), ctx.at(depth));
        for (Proj p : it->second) out = and_e(std::move(out), p);
        if (out.type != d.type) throw InferenceInternalError("infer: occurrence extraction reached the wrong type");
        return out;
      }
      Derivation out{d.rule, ctx, subterm_at(body, pos), d.type, {}};
      switch (d.rule) {
        case RuleTag::Ax:
          break;
        case RuleTag::ArrowE:
          pos.push_back(Step::Fun);
          out.children.push_back(run(d.children[0], pos, binders));
          pos.back() = Step::Arg;
          out.children.push_back(run(d.children[1], pos, binders));
          pos.pop_back();
          break;
        case RuleTag::ArrowI:
          pos.push_back(Step::Body);
          binders.push_back(d.type.dom());
          out.children.push_back(run(d.children[0], pos, binders));
          binders.pop_back();
          pos.pop_back();
          break;
        default:
          for (const auto& c : d.children) out.children.push_back(run(c, pos, binders));
          break;
      }
      return out;
    }
  };

  Derivation redex_head(const Term& t, const Spine& s, std::size_t eta_t, std::size_t depth) {
    const Term a = s.head.body();
    const Term& b = s.args[0];
    std::vector<Term> rest(s.args.begin() + 1, s.args.end());
    const std::size_t n = rest.size();

    if (!occurs_free(a, 0)) {
      Term reduced = reassemble(shift(a, -1), rest);
      Derivation d1 = call(t, eta_t, reduced, depth);
      Derivation d2 = call(t, eta_t, b, depth);
      MergeResult m = merge_contexts(d1.ctx, d2.ctx);
      Derivation left = strengthen(d1, m.merged, m.left);
      Derivation arg = strengthen(d2, m.merged, m.right);
      Type bt = arg.type;
      auto inner = [&](const Derivation& root) { return arrow_e(arrow_i(lift(root, bt), bt), arg); };
      return rebuild_spine(left, 0, n, inner);
    }

    std::vector<Path> residuals;
    Term body_sub = instantiate_tracked(a, b, residuals);
    OccurrenceLedger marks(std::move(residuals));
    Derivation dr = call(t, eta_t, reassemble(body_sub, rest), depth);

    std::vector<Occurrence> occ;
    auto collect = [&](const Derivation& root) {
      Path pos;
      collect_occurrences(root, pos, 0, marks, occ);
    };
    visit_spine(dr, 0, n, collect);
    if (occ.empty()) throw InferenceInternalError("infer: substituted argument has no typed occurrence");

    // A = ((T1 ∧ T2) ∧ ...) ∧ Tm; projection path for each Ti.
    Type ax_type = occ[0].node->type;
    for (std::size_t i = 1; i < occ.size(); ++i) ax_type = Type::inter(ax_type, occ[i].node->type);
    std::unordered_map<const Derivation*, std::vector<Proj>> extract;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      std::vector<Proj> path;
      for (std::size_t k = occ.size(); k-- > i + 1;) path.push_back(Proj::Left);
      if (i > 0) path.push_back(Proj::Right);
      extract[occ[i].node] = std::move(path);
    }

    const Context& gamma = dr.ctx;
    Derivation arg = lower(*occ[0].node, occ[0].depth);
    for (std::size_t i = 1; i < occ.size(); ++i) arg = and_i(std::move(arg), lower(*occ[i].node, occ[i].depth));
    if (arg.ctx != gamma || arg.term != b) throw InferenceInternalError("infer: argument typing escaped its scope");

    Context outer = push(gamma, ax_type);
    Abstractor abs{a, outer, marks, extract};
    auto inner = [&](const Derivation& root) {
      Path pos;
      std::vector<Type> binders;
      Derivation body = abs.run(root, pos, binders);
      return arrow_e(arrow_i(std::move(body), ax_type), arg);
    };
    return rebuild_spine(dr, 0, n, inner);
  }

  InferOptions opt_;
  AtomSupply atoms_;
  InferenceStats stats_;
};

}  // namespace detail

// Requires t to be proven β-SN within the budget.
inline InferenceResult infer(const Term& t, const InferOptions& opt = {}) {
  detail::Inferencer inf(opt);
  std::size_t e = inf.eta_beta(t);
  InferenceResult r;
  r.derivation = inf.run(t, e, 0);
  r.ctx = r.derivation.ctx;
  r.type = r.derivation.type;
  r.stats = std::move(inf.stats());
  r.atoms_issued = inf.atoms_issued();
  if (CheckResult c = check(r.derivation); !c)
    throw InferenceInternalError("infer: produced derivation fails the checker: " + c.reason);
  if (r.derivation.term != t) throw InferenceInternalError("infer: derivation concludes a different term");
  return r;
}

struct MeasureViolation {
  bool valid = true;
  std::size_t record = 0;

  explicit operator bool() const { return valid; }
};

// Every recorded recursive call strictly decreases ⟨η_β, size⟩.
inline MeasureViolation measure_trace_check(const InferenceResult& r) {
  for (std::size_t i = 0; i < r.stats.trace.size(); ++i) {
    const auto& m = r.stats.trace[i];
    bool smaller = m.child_eta < m.parent_eta || (m.child_eta == m.parent_eta && m.child_size < m.parent_size);
    if (!smaller) return {false, i};
  }
  return {};
}

struct TypableConsequence {
  SnVerdict verdict_all;
  std::size_t eta_beta = 0;
  bool holds() const { return verdict_all.sn(); }
};

// A typable term must be SN for all four rules.
inline TypableConsequence typable_consequence(const Term& t, std::size_t budget = 50'000, SnCache* cache = nullptr) {
  TypableConsequence r;
  r.eta_beta = eta(t, RuleSet::beta(), budget, cache);
  r.verdict_all = sn_verdict(t, RuleSet::all(), budget, cache);
  return r;
}

}  // namespace permsn
