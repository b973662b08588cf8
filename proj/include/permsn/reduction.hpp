// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// The four rewrite rules with congruence closure:
//
//   beta  : ((λx.M) N)          -> M[x:=N]
//   delta : ((λy.λx.M) N)       -> λx.((λy.M) N)
//   gamma : ((λx.M) N P)        -> ((λx.(M P)) N)
//   assoc : (M ((λx.N) P))      -> ((λx.(M N)) P)
//
// In index form the freshness side conditions hold by construction: delta
// swaps the two innermost binders of M and lifts N under the new binder,
// gamma lifts P and assoc lifts M under x's binder.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "permsn/term.hpp"

namespace permsn {

enum class Rule : std::uint8_t { Beta = 0, Delta = 1, Gamma = 2, Assoc = 3 };

inline constexpr Rule kAllRuleValues[] = {Rule::Beta, Rule::Delta, Rule::Gamma, Rule::Assoc};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Beta: return "beta";
    case Rule::Delta: return "delta";
    case Rule::Gamma: return "gamma";
    case Rule::Assoc: return "assoc";
  }
  return "?";
}

inline std::optional<Rule> rule_from_name(std::string_view s) {
  for (Rule r : kAllRuleValues)
    if (s == rule_name(r)) return r;
  return std::nullopt;
}

class RuleSet {
 public:
  constexpr RuleSet() = default;
  constexpr RuleSet(std::initializer_list<Rule> rules) {
    for (Rule r : rules) bits_ |= bit(r);
  }

  static constexpr RuleSet all() { return RuleSet{Rule::Beta, Rule::Delta, Rule::Gamma, Rule::Assoc}; }
  static constexpr RuleSet beta() { return RuleSet{Rule::Beta}; }

  constexpr bool contains(Rule r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool subset_of(RuleSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr RuleSet with(Rule r) const {
    RuleSet s = *this;
    s.bits_ |= bit(r);
    return s;
  }

  friend constexpr bool operator==(RuleSet a, RuleSet b) { return a.bits_ == b.bits_; }

  // Comma list in rule order, e.g. "beta,gamma".
  std::string to_string() const {
    std::string s;
    for (Rule r : kAllRuleValues) {
      if (!contains(r)) continue;
      if (!s.empty()) s += ',';
      s += rule_name(r);
    }
    return s;
  }

  // Accepts a comma list of rule names, or "all".
  static RuleSet parse(std::string_view text) {
    if (text == "all") return all();
    RuleSet s;
    while (!text.empty()) {
      auto comma = text.find(',');
      auto item = text.substr(0, comma);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      if (!item.empty()) {
        auto r = rule_from_name(item);
        if (!r) throw std::invalid_argument("unknown rule '" + std::string(item) + "'");
        s = s.with(*r);
      }
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    return s;
  }

 private:
  static constexpr std::uint8_t bit(Rule r) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r)); }
  std::uint8_t bits_ = 0;
};

struct RedexOccurrence {
  Path path;
  Rule rule;

  friend bool operator==(const RedexOccurrence&, const RedexOccurrence&) = default;
};

inline std::string to_string(const RedexOccurrence& r) {
  return std::string(rule_name(r.rule)) + "@" + path_to_string(r.path);
}

class PatternMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Whether the rule's left-hand pattern matches at the root of t.
inline bool matches(Rule r, const Term& t) {
  if (!t.is_app()) return false;
  switch (r) {
    case Rule::Beta: return t.fun().is_lam();
    case Rule::Delta: return t.fun().is_lam() && t.fun().body().is_lam();
    case Rule::Gamma: return t.fun().is_app() && t.fun().fun().is_lam();
    case Rule::Assoc: return t.arg().is_app() && t.arg().fun().is_lam();
  }
  return false;
}

// Root contraction.
inline Term contract(Rule r, const Term& t) {
  if (!matches(r, t))
    throw PatternMismatch(std::string("permsn::contract: ") + rule_name(r) + " pattern does not match");
  switch (r) {
    case Rule::Beta:
      return instantiate(t.fun().body(), t.arg());
    case Rule::Delta: {
      // (λy.λx.M) N  ->  λx.((λy.M') N↑)
      Term m = t.fun().body().body();
      return Term::lam(Term::app(Term::lam(swap_binders(m)), shift(t.arg(), 1)));
    }
    case Rule::Gamma: {
      // (λx.M) N P  ->  (λx.(M P↑)) N
      Term lam = t.fun().fun();
      Term n = t.fun().arg();
      Term p = t.arg();
      return Term::app(Term::lam(Term::app(lam.body(), shift(p, 1))), n);
    }
    case Rule::Assoc: {
      // M ((λx.N) P)  ->  (λx.(M↑ N)) P
      Term m = t.fun();
      Term n = t.arg().fun().body();
      Term p = t.arg().arg();
      return Term::app(Term::lam(Term::app(shift(m, 1), n)), p);
    }
  }
  return t;
}

namespace detail {
inline void collect_redexes(const Term& t, RuleSet rules, Path& here, std::vector<RedexOccurrence>& out) {
  for (Rule r : kAllRuleValues)
    if (rules.contains(r) && matches(r, t)) out.push_back({here, r});
  switch (t.kind()) {
    case Kind::Var:
      return;
    case Kind::Lam:
      here.push_back(Step::Body);
      collect_redexes(t.body(), rules, here, out);
      here.pop_back();
      return;
    case Kind::App:
      here.push_back(Step::Fun);
      collect_redexes(t.fun(), rules, here, out);
      here.back() = Step::Arg;
      collect_redexes(t.arg(), rules, here, out);
      here.pop_back();
      return;
  }
}
}  // namespace detail

// All matching (position, rule) pairs in preorder, rule order within a node.
inline std::vector<RedexOccurrence> redexes(const Term& t, RuleSet rules) {
  std::vector<RedexOccurrence> out;
  Path here;
  detail::collect_redexes(t, rules, here, out);
  return out;
}

inline Term apply(const Term& t, const RedexOccurrence& r) {
  Term sub;
  try {
    sub = subterm_at(t, r.path);
  } catch (const std::out_of_range&) {
    throw PatternMismatch("permsn::apply: path " + path_to_string(r.path) + " leaves the term");
  }
  return replace_at(t, r.path, contract(r.rule, sub));
}

struct Reduct {
  RedexOccurrence redex;
  Term term;
};

// Every redex with its contractum, in redex order (not deduplicated).
inline std::vector<Reduct> labeled_reducts(const Term& t, RuleSet rules) {
  std::vector<Reduct> out;
  for (auto& r : redexes(t, rules)) {
    Term u = apply(t, r);
    out.push_back({std::move(r), std::move(u)});
  }
  return out;
}

// The one-step reduct set, structurally deduplicated, in first-occurrence order.
inline std::vector<Term> one_step(const Term& t, RuleSet rules) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  for (const auto& r : redexes(t, rules)) {
    Term u = apply(t, r);
    if (seen.insert(u).second) out.push_back(std::move(u));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Head-position constructors on t = (H M(1) ... M(n))

struct HeadClass {
  bool beta = false;
  bool gamma = false;
  bool delta = false;

  bool none() const { return !beta && !gamma && !delta; }
  friend bool operator==(const HeadClass&, const HeadClass&) = default;
};

inline HeadClass head_class(const Term& t) {
  Spine s = spine(t);
  HeadClass c;
  if (s.head.is_lam() && !s.args.empty()) {
    c.beta = true;
    c.gamma = s.args.size() >= 2;
    c.delta = s.head.body().is_lam();
  }
  return c;
}

class HeadClassError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
// Path from the root to the node (H M(1) ... M(k)).
inline Path head_prefix(std::size_t n, std::size_t k) { return Path(n - k, Step::Fun); }
}  // namespace detail

// Arg[t] = M(1).
inline Term arg_of(const Term& t) {
  if (!head_class(t).beta) throw HeadClassError("arg_of: term is not beta-head reducible");
  return spine(t).args.front();
}

// B[t] = (R' M(2) ... M(n)) with R' the contractum of (H M(1)).
inline Term b_of(const Term& t) {
  if (!head_class(t).beta) throw HeadClassError("b_of: term is not beta-head reducible");
  std::size_t n = spine(t).args.size();
  return apply(t, {detail::head_prefix(n, 1), Rule::Beta});
}

// C[t] = ((λx.(N M(2))) M(1) M(3) ... M(n)).
inline Term c_of(const Term& t) {
  if (!head_class(t).gamma) throw HeadClassError("c_of: term is not gamma-head reducible");
  std::size_t n = spine(t).args.size();
  return apply(t, {detail::head_prefix(n, 2), Rule::Gamma});
}

// D[t] = ((λy.((λx.N) M(1))) M(2) ... M(n)) for H = λx.λy.N.
inline Term d_of(const Term& t) {
  if (!head_class(t).delta) throw HeadClassError("d_of: term is not delta-head reducible");
  std::size_t n = spine(t).args.size();
  return apply(t, {detail::head_prefix(n, 1), Rule::Delta});
}

// A[t, i] for M(i) = ((λx.N) P), i counted from 1:
// ((λx.(H M(1) ... M(i-1) N)) P M(i+1) ... M(n)).
inline Term a_of(const Term& t, std::size_t i) {
  Spine s = spine(t);
  if (i < 1 || i > s.args.size()) throw HeadClassError("a_of: argument index out of range");
  const Term& mi = s.args[i - 1];
  if (!(mi.is_app() && mi.fun().is_lam())) throw HeadClassError("a_of: argument is not a beta-redex");
  Term inner = shift(s.head, 1);
  for (std::size_t k = 0; k + 1 < i; ++k) inner = Term::app(inner, shift(s.args[k], 1));
  inner = Term::app(inner, mi.fun().body());
  Term out = Term::app(Term::lam(inner), mi.arg());
  for (std::size_t k = i; k < s.args.size(); ++k) out = Term::app(out, s.args[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Fuel-bounded normalization

enum class Strategy { LeftmostOutermost, RightmostInnermost };

struct TraceStep {
  RedexOccurrence redex;
  Term result;
};

struct NormalizeResult {
  bool normal_form = false;  // false: fuel exhausted
  Term term;
  std::size_t steps = 0;
  std::vector<TraceStep> trace;
};

inline std::optional<RedexOccurrence> select_redex(const Term& t, RuleSet rules, Strategy strategy) {
  auto all = redexes(t, rules);
  if (all.empty()) return std::nullopt;
  if (strategy == Strategy::LeftmostOutermost) return all.front();
  // Last position in preorder is innermost; first rule at that position.
  const Path& last = all.back().path;
  for (const auto& r : all)
    if (r.path == last) return r;
  return all.back();
}

inline NormalizeResult normalize(const Term& t, RuleSet rules, Strategy strategy, std::size_t fuel,
                                 bool record_trace = false) {
  if (fuel == 0) throw std::invalid_argument("normalize: fuel must be positive");
  NormalizeResult res;
  res.term = t;
  while (true) {
    auto r = select_redex(res.term, rules, strategy);
    if (!r) {
      res.normal_form = true;
      return res;
    }
    if (res.steps == fuel) return res;
    res.term = apply(res.term, *r);
    ++res.steps;
    if (record_trace) res.trace.push_back({*r, res.term});
  }
}

}  // namespace permsn
