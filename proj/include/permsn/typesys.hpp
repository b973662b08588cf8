// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// Intersection types (→, ∧) and explicit typing derivations.
//
// Rules, each checked locally at its node:
//
//   Ax     Γ, x:A ⊢ x : A
//   ArrowE Γ ⊢ M : A→B   Γ ⊢ N : A        ⟹  Γ ⊢ (M N) : B
//   ArrowI Γ, x:A ⊢ M : B                   ⟹  Γ ⊢ λx.M : A→B
//   AndE1  Γ ⊢ M : A∧B                      ⟹  Γ ⊢ M : A
//   AndE2  Γ ⊢ M : A∧B                      ⟹  Γ ⊢ M : B
//   AndI   Γ ⊢ M : A   Γ ⊢ M : B            ⟹  Γ ⊢ M : A∧B
//
// Contexts map de Bruijn indices (relative to the node's term) to types, so
// the ArrowI premise context is the conclusion context pushed by one binder.
// There is no subtyping and ∧ is neither commutative nor idempotent.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permsn/term.hpp"

namespace permsn {

enum class TypeKind : std::uint8_t { Atom, Arrow, Inter };

class Type {
  struct Node {
    TypeKind kind;
    std::string name;
    std::shared_ptr<const Node> left, right;
    std::size_t size = 1;
  };
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 public:
  Type() = default;

  static Type atom(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = TypeKind::Atom;
    n->name = std::move(name);
    return Type(std::move(n));
  }
  static Type arrow(const Type& dom, const Type& cod) { return binary(TypeKind::Arrow, dom, cod); }
  static Type inter(const Type& l, const Type& r) { return binary(TypeKind::Inter, l, r); }

  bool valid() const { return node_ != nullptr; }
  TypeKind kind() const { return node_->kind; }
  bool is_atom() const { return kind() == TypeKind::Atom; }
  bool is_arrow() const { return kind() == TypeKind::Arrow; }
  bool is_inter() const { return kind() == TypeKind::Inter; }

  const std::string& name() const { return node_->name; }
  Type left() const { return Type(node_->left); }
  Type right() const { return Type(node_->right); }
  Type dom() const { return left(); }
  Type cod() const { return right(); }

  // Atoms, arrows and intersections each count 1.
  std::size_t size() const { return node_->size; }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.kind() != b.kind() || a.size() != b.size()) return false;
    if (a.is_atom()) return a.name() == b.name();
    return a.left() == b.left() && a.right() == b.right();
  }
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  static Type binary(TypeKind k, const Type& l, const Type& r) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->left = l.node_;
    n->right = r.node_;
    n->size = 1 + l.size() + r.size();
    return Type(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

inline std::size_t type_size(const Type& t) { return t.size(); }

// Right-nested arrow B1 → ... → Bn → C.
inline Type arrows(const std::vector<Type>& doms, const Type& cod) {
  Type t = cod;
  for (std::size_t i = doms.size(); i-- > 0;) t = Type::arrow(doms[i], t);
  return t;
}

// ---------------------------------------------------------------------------
// Type syntax: "->" is right associative, "/\" (or "∧") is left associative
// and binds tighter.

namespace detail {

inline void print_type_arrow(const Type& t, std::string& out);

inline void print_type_atomic(const Type& t, std::string& out) {
  if (t.is_atom()) {
    out += t.name();
    return;
  }
  out += '(';
  print_type_arrow(t, out);
  out += ')';
}

inline void print_type_inter(const Type& t, std::string& out) {
  if (!t.is_inter()) {
    print_type_atomic(t, out);
    return;
  }
  print_type_inter(t.left(), out);
  out += " /\\ ";
  print_type_atomic(t.right(), out);
}

inline void print_type_arrow(const Type& t, std::string& out) {
  if (t.is_arrow()) {
    print_type_inter(t.dom(), out);
    out += " -> ";
    print_type_arrow(t.cod(), out);
    return;
  }
  print_type_inter(t, out);
}

class TypeParser {
 public:
  explicit TypeParser(std::string_view text) : text_(text) {}

  Type parse_all() {
    Type t = arrow();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input in type");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(what + " at offset " + std::to_string(pos_));
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  Type arrow() {
    Type l = inter();
    if (eat("->") || eat("\xE2\x86\x92")) return Type::arrow(l, arrow());
    return l;
  }
  Type inter() {
    Type l = atomic();
    while (eat("/\\") || eat("\xE2\x88\xA7")) l = Type::inter(l, atomic());
    return l;
  }
  Type atomic() {
    skip_ws();
    if (eat("(")) {
      Type t = arrow();
      if (!eat(")")) fail("expected ')' in type");
      return t;
    }
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected type atom");
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '\''))
      ++pos_;
    return Type::atom(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string print(const Type& t) {
  std::string out;
  detail::print_type_arrow(t, out);
  return out;
}

inline Type parse_type(std::string_view text) { return detail::TypeParser(text).parse_all(); }

// Monotone supply of atoms a0, a1, ... local to one run.
class AtomSupply {
 public:
  explicit AtomSupply(std::string prefix = "a") : prefix_(std::move(prefix)) {}
  Type fresh() { return Type::atom(prefix_ + std::to_string(next_++)); }
  std::size_t issued() const { return next_; }

 private:
  std::string prefix_;
  std::size_t next_ = 0;
};

// ---------------------------------------------------------------------------
// Contexts

using Context = std::map<std::uint32_t, Type>;

// Γ, x:A where x becomes index 0 and every other index moves up by one.
inline Context push(const Context& ctx, const Type& a) {
  Context out;
  out.emplace(0, a);
  for (const auto& [k, t] : ctx) out.emplace(k + 1, t);
  return out;
}

// Inverse of push; index 0 is dropped.
inline Context pop(const Context& ctx) {
  Context out;
  for (const auto& [k, t] : ctx)
    if (k > 0) out.emplace(k - 1, t);
  return out;
}

enum class Proj : std::uint8_t { Left, Right };  // AndE1, AndE2

// For each variable, the ∧-projections that lead from the merged type back to
// the type a source context assigned.
using StrengthenPlan = std::map<std::uint32_t, std::vector<Proj>>;

inline std::optional<Type> follow(Type t, const std::vector<Proj>& steps) {
  for (Proj p : steps) {
    if (!t.is_inter()) return std::nullopt;
    t = p == Proj::Left ? t.left() : t.right();
  }
  return t;
}

struct MergeResult {
  Context merged;
  StrengthenPlan left;
  StrengthenPlan right;
};

// Pointwise merge; a variable bound in both gets Γ1(x) ∧ Γ2(x).
inline MergeResult merge_contexts(const Context& g1, const Context& g2) {
  MergeResult r;
  r.merged = g1;
  for (const auto& [x, t] : g2) {
    auto it = r.merged.find(x);
    if (it == r.merged.end()) {
      r.merged.emplace(x, t);
      continue;
    }
    it->second = Type::inter(it->second, t);
    r.left[x] = {Proj::Left};
    r.right[x] = {Proj::Right};
  }
  return r;
}

struct MergeAllResult {
  Context merged;
  std::vector<StrengthenPlan> plans;  // one per input, in order
};

// Left fold of merge_contexts; earlier plans are extended as shared
// variables get wrapped in further intersections.
inline MergeAllResult merge_all(const std::vector<Context>& ctxs) {
  MergeAllResult r;
  for (std::size_t i = 0; i < ctxs.size(); ++i) {
    MergeResult m = merge_contexts(r.merged, ctxs[i]);
    for (const auto& [x, steps] : m.left)
      for (std::size_t j = 0; j < i; ++j)
        if (ctxs[j].count(x)) {
          auto& path = r.plans[j][x];
          path.insert(path.begin(), Proj::Left);
        }
    r.merged = std::move(m.merged);
    r.plans.push_back(std::move(m.right));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Derivations

enum class RuleTag : std::uint8_t { Ax, ArrowE, ArrowI, AndE1, AndE2, AndI };

inline const char* rule_tag_name(RuleTag r) {
  switch (r) {
    case RuleTag::Ax: return "Ax";
    case RuleTag::ArrowE: return "ArrowE";
    case RuleTag::ArrowI: return "ArrowI";
    case RuleTag::AndE1: return "AndE1";
    case RuleTag::AndE2: return "AndE2";
    case RuleTag::AndI: return "AndI";
  }
  return "?";
}

inline std::optional<RuleTag> rule_tag_from_name(std::string_view s) {
  for (RuleTag r : {RuleTag::Ax, RuleTag::ArrowE, RuleTag::ArrowI, RuleTag::AndE1, RuleTag::AndE2, RuleTag::AndI})
    if (s == rule_tag_name(r)) return r;
  return std::nullopt;
}

inline std::size_t rule_arity(RuleTag r) {
  switch (r) {
    case RuleTag::Ax: return 0;
    case RuleTag::ArrowE: case RuleTag::AndI: return 2;
    default: return 1;
  }
}

// A derivation node stores its full conclusion Γ ⊢ term : type.
struct Derivation {
  RuleTag rule = RuleTag::Ax;
  Context ctx;
  Term term;
  Type type;
  std::vector<Derivation> children;

  std::size_t node_count() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.node_count();
    return n;
  }
};

inline Derivation ax(Context ctx, const Term& var, const Type& t) { return {RuleTag::Ax, std::move(ctx), var, t, {}}; }

inline Derivation arrow_e(Derivation fun, Derivation arg) {
  if (!fun.type.is_arrow()) throw std::invalid_argument("arrow_e: function premise does not have an arrow type");
  Derivation d{RuleTag::ArrowE, fun.ctx, Term::app(fun.term, arg.term), fun.type.cod(), {}};
  d.children.push_back(std::move(fun));
  d.children.push_back(std::move(arg));
  return d;
}

inline Derivation arrow_i(Derivation body, const Type& binder) {
  Derivation d{RuleTag::ArrowI, pop(body.ctx), Term::lam(body.term), Type::arrow(binder, body.type), {}};
  d.children.push_back(std::move(body));
  return d;
}

inline Derivation and_e(Derivation d, Proj p) {
  if (!d.type.is_inter()) throw std::invalid_argument("and_e: premise does not have an intersection type");
  Type t = p == Proj::Left ? d.type.left() : d.type.right();
  Derivation out{p == Proj::Left ? RuleTag::AndE1 : RuleTag::AndE2, d.ctx, d.term, t, {}};
  out.children.push_back(std::move(d));
  return out;
}

inline Derivation and_i(Derivation l, Derivation r) {
  Derivation d{RuleTag::AndI, l.ctx, l.term, Type::inter(l.type, r.type), {}};
  d.children.push_back(std::move(l));
  d.children.push_back(std::move(r));
  return d;
}

// Child-index path into a derivation tree.
using DerivationPath = std::vector<std::size_t>;

struct CheckResult {
  bool valid = true;
  DerivationPath at;
  std::string reason;

  explicit operator bool() const { return valid; }
};

namespace detail {

inline std::string local_violation(const Derivation& d) {
  if (d.children.size() != rule_arity(d.rule))
    return std::string(rule_tag_name(d.rule)) + " expects " + std::to_string(rule_arity(d.rule)) + " premise(s)";
  if (!d.term.valid() || !d.type.valid()) return "missing conclusion";
  auto same_ctx = [&](const Derivation& c) { return c.ctx == d.ctx; };
  switch (d.rule) {
    case RuleTag::Ax: {
      if (!d.term.is_var()) return "Ax concludes a non-variable";
      auto it = d.ctx.find(d.term.index());
      if (it == d.ctx.end()) return "Ax variable not bound in context";
      if (it->second != d.type) return "Ax type differs from the context binding";
      return {};
    }
    case RuleTag::ArrowE: {
      const auto& f = d.children[0];
      const auto& a = d.children[1];
      if (!d.term.is_app()) return "ArrowE concludes a non-application";
      if (!same_ctx(f) || !same_ctx(a)) return "ArrowE premise context differs";
      if (f.term != d.term.fun() || a.term != d.term.arg()) return "ArrowE premise terms do not match";
      if (!f.type.valid() || !f.type.is_arrow()) return "ArrowE function premise is not an arrow";
      if (f.type.dom() != a.type) return "ArrowE argument type does not match the domain";
      if (f.type.cod() != d.type) return "ArrowE conclusion type does not match the codomain";
      return {};
    }
    case RuleTag::ArrowI: {
      const auto& b = d.children[0];
      if (!d.term.is_lam()) return "ArrowI concludes a non-abstraction";
      if (!d.type.is_arrow()) return "ArrowI conclusion is not an arrow";
      if (b.term != d.term.body()) return "ArrowI premise term is not the body";
      if (b.type != d.type.cod()) return "ArrowI premise type is not the codomain";
      if (b.ctx != push(d.ctx, d.type.dom())) return "ArrowI premise context is not Γ, x:A";
      return {};
    }
    case RuleTag::AndE1:
    case RuleTag::AndE2: {
      const auto& c = d.children[0];
      if (!same_ctx(c)) return "AndE premise context differs";
      if (c.term != d.term) return "AndE premise term differs";
      if (!c.type.valid() || !c.type.is_inter()) return "AndE premise is not an intersection";
      const Type& part = d.rule == RuleTag::AndE1 ? c.type.left() : c.type.right();
      if (part != d.type) return "AndE conclusion is not the selected component";
      return {};
    }
    case RuleTag::AndI: {
      const auto& l = d.children[0];
      const auto& r = d.children[1];
      if (!same_ctx(l) || !same_ctx(r)) return "AndI premise context differs";
      if (l.term != d.term || r.term != d.term) return "AndI premise term differs";
      if (d.type != Type::inter(l.type, r.type)) return "AndI conclusion is not the premises' intersection";
      return {};
    }
  }
  return "unknown rule";
}

inline bool check_at(const Derivation& d, DerivationPath& here, CheckResult& out) {
  if (auto why = local_violation(d); !why.empty()) {
    out = {false, here, std::move(why)};
    return false;
  }
  for (std::size_t i = 0; i < d.children.size(); ++i) {
    here.push_back(i);
    if (!check_at(d.children[i], here, out)) return false;
    here.pop_back();
  }
  return true;
}

}  // namespace detail

// Validates every node; reports the first violation in preorder.
inline CheckResult check(const Derivation& d) {
  CheckResult out;
  DerivationPath here;
  detail::check_at(d, here, out);
  return out;
}

// ---------------------------------------------------------------------------
// Derivation surgery

class StrengthenError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

// The context at local binder depth `binders.size()` over an outer context.
inline Context under_binders(const Context& outer, const std::vector<Type>& binders) {
  Context out;
  std::uint32_t depth = static_cast<std::uint32_t>(binders.size());
  for (std::uint32_t i = 0; i < depth; ++i) out.emplace(i, binders[depth - 1 - i]);
  for (const auto& [k, t] : outer) out.emplace(k + depth, t);
  return out;
}

inline Derivation strengthen_at(const Derivation& d, const Context& target, const StrengthenPlan& plan,
                                std::vector<Type>& binders) {
  Context ctx = under_binders(target, binders);
  std::uint32_t depth = static_cast<std::uint32_t>(binders.size());
  switch (d.rule) {
    case RuleTag::Ax: {
      std::uint32_t k = d.term.index();
      if (k < depth) return ax(std::move(ctx), d.term, d.type);
      std::uint32_t y = k - depth;
      auto bound = target.find(y);
      if (bound == target.end()) throw StrengthenError("strengthen: variable missing from target context");
      Derivation out = ax(ctx, d.term, bound->second);
      auto steps = plan.find(y);
      if (steps != plan.end())
        for (Proj p : steps->second) {
          if (!out.type.is_inter()) throw StrengthenError("strengthen: plan projects out of a non-intersection");
          out = and_e(std::move(out), p);
        }
      if (out.type != d.type) throw StrengthenError("strengthen: plan does not reach the assumed type");
      return out;
    }
    case RuleTag::ArrowI: {
      binders.push_back(d.type.dom());
      Derivation body = strengthen_at(d.children[0], target, plan, binders);
      binders.pop_back();
      Derivation out{d.rule, std::move(ctx), d.term, d.type, {}};
      out.children.push_back(std::move(body));
      return out;
    }
    default: {
      Derivation out{d.rule, std::move(ctx), d.term, d.type, {}};
      for (const auto& c : d.children) out.children.push_back(strengthen_at(c, target, plan, binders));
      return out;
    }
  }
}

}  // namespace detail

// Moves d to the larger context `target`: every Ax leaf on a free variable
// becomes Ax under `target` followed by the plan's ∧-eliminations.
inline Derivation strengthen(const Derivation& d, const Context& target, const StrengthenPlan& plan = {}) {
  std::vector<Type> binders;
  return detail::strengthen_at(d, target, plan, binders);
}

namespace detail {

inline Derivation lift_at(const Derivation& d, const Type& inserted, std::uint32_t depth) {
  Derivation out;
  out.rule = d.rule;
  out.type = d.type;
  out.term = shift(d.term, 1, depth);
  for (const auto& [k, t] : d.ctx) out.ctx.emplace(k < depth ? k : k + 1, t);
  out.ctx.emplace(depth, inserted);
  std::uint32_t child_depth = d.rule == RuleTag::ArrowI ? depth + 1 : depth;
  for (const auto& c : d.children) out.children.push_back(lift_at(c, inserted, child_depth));
  return out;
}

inline Derivation lower_at(const Derivation& d, std::uint32_t count, std::uint32_t depth) {
  Derivation out;
  out.rule = d.rule;
  out.type = d.type;
  out.term = shift(d.term, -static_cast<int>(count), depth);
  for (const auto& [k, t] : d.ctx) {
    if (k < depth)
      out.ctx.emplace(k, t);
    else if (k >= depth + count)
      out.ctx.emplace(k - count, t);
  }
  std::uint32_t child_depth = d.rule == RuleTag::ArrowI ? depth + 1 : depth;
  for (const auto& c : d.children) out.children.push_back(lower_at(c, count, child_depth));
  return out;
}

}  // namespace detail

// Γ ⊢ t : T  ⟹  x:A, Γ ⊢ t↑ : T with x the new index 0 (unused by t↑).
inline Derivation lift(const Derivation& d, const Type& inserted) { return detail::lift_at(d, inserted, 0); }

// Drops the `count` innermost outer bindings, which the term must not use.
inline Derivation lower(const Derivation& d, std::uint32_t count) {
  if (count == 0) return d;
  return detail::lower_at(d, count, 0);
}

// ---------------------------------------------------------------------------
// Fair substitutions

// All images of σ carry the same type under one context.
struct Fairness {
  Substitution sigma;
  Type common;

  std::size_t type_of_sigma() const { return type_size(common); }
};

// Valid iff each σ(x) has a checked derivation ctx ⊢ σ(x) : common.
inline CheckResult check_fair(const Fairness& f, const Context& ctx, const std::map<std::uint32_t, Derivation>& proofs) {
  for (const auto& [x, u] : f.sigma.bindings) {
    auto it = proofs.find(x);
    if (it == proofs.end()) return {false, {}, "no derivation for variable " + std::to_string(x)};
    const Derivation& d = it->second;
    if (CheckResult r = check(d); !r) return r;
    if (d.ctx != ctx || d.term != u || d.type != f.common)
      return {false, {}, "derivation for variable " + std::to_string(x) + " has a different conclusion"};
  }
  return {};
}

}  // namespace permsn
