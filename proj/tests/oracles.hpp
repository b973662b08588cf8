// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// Independent reference implementations used only by the tests. None of them
// share code paths with the library beyond the Term constructors.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "permsn/reduction.hpp"
#include "permsn/term.hpp"

namespace oracle {

using permsn::Term;

// Number of terms of size n with free indices < m:
//   c(1, m) = m
//   c(n, m) = c(n-1, m+1) + sum_{i=1}^{n-2} c(i, m) * c(n-1-i, m)
inline std::uint64_t count_terms(std::size_t n, std::size_t m) {
  static std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> memo;
  if (n == 0) return 0;
  if (n == 1) return m;
  auto key = std::make_pair(n, m);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint64_t c = count_terms(n - 1, m + 1);
  for (std::size_t i = 1; i + 2 <= n; ++i) c += count_terms(i, m) * count_terms(n - 1 - i, m);
  memo[key] = c;
  return c;
}

inline std::string structure_key(const Term& t) {
  switch (t.kind()) {
    case permsn::Kind::Var: return std::to_string(t.index());
    case permsn::Kind::Lam: return "L(" + structure_key(t.body()) + ")";
    case permsn::Kind::App: return "A(" + structure_key(t.fun()) + "," + structure_key(t.arg()) + ")";
  }
  return "";
}

// Brute force: grow every term over an over-wide index alphabet, then keep
// those whose free indices are below `free_bound`.
inline std::set<std::string> brute_force_terms(std::size_t max_size, std::uint32_t free_bound) {
  std::uint32_t alphabet = static_cast<std::uint32_t>(max_size) + free_bound;
  std::vector<std::vector<Term>> by_size(max_size + 1);
  for (std::uint32_t k = 0; k < alphabet; ++k) by_size[1].push_back(Term::var(k));
  for (std::size_t n = 2; n <= max_size; ++n) {
    for (const auto& b : by_size[n - 1]) by_size[n].push_back(Term::lam(b));
    for (std::size_t l = 1; l + 2 <= n; ++l)
      for (const auto& f : by_size[l])
        for (const auto& a : by_size[n - 1 - l]) by_size[n].push_back(Term::app(f, a));
  }
  std::set<std::string> out;
  for (std::size_t n = 1; n <= max_size; ++n)
    for (const auto& t : by_size[n])
      if (t.loose() <= free_bound) out.insert(structure_key(t));
  return out;
}

// ---------------------------------------------------------------------------
// Named terms with textbook capture-avoiding substitution, and the four rules
// written directly from their named schemas.

struct Named;
using NamedPtr = std::shared_ptr<const Named>;

struct Named {
  enum Kind { Var, Lam, App } kind;
  std::string name;  // Var, Lam binder
  NamedPtr a, b;     // Lam: body in a; App: fun a, arg b
};

inline NamedPtr nvar(std::string n) { return std::make_shared<Named>(Named{Named::Var, std::move(n), {}, {}}); }
inline NamedPtr nlam(std::string n, NamedPtr body) {
  return std::make_shared<Named>(Named{Named::Lam, std::move(n), std::move(body), {}});
}
inline NamedPtr napp(NamedPtr f, NamedPtr x) { return std::make_shared<Named>(Named{Named::App, "", std::move(f), std::move(x)}); }

inline void named_free(const NamedPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case Named::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case Named::Lam: {
      bool fresh = bound.insert(t->name).second;
      named_free(t->a, bound, out);
      if (fresh) bound.erase(t->name);
      return;
    }
    case Named::App:
      named_free(t->a, bound, out);
      named_free(t->b, bound, out);
      return;
  }
}

inline std::set<std::string> named_free(const NamedPtr& t) {
  std::set<std::string> bound, out;
  named_free(t, bound, out);
  return out;
}

class Renamer {
 public:
  std::string fresh() { return "_v" + std::to_string(next_++); }

 private:
  std::size_t next_ = 0;
};

// t[x := u], renaming binders that would capture free names of u.
inline NamedPtr named_subst(const NamedPtr& t, const std::string& x, const NamedPtr& u, Renamer& r) {
  switch (t->kind) {
    case Named::Var: return t->name == x ? u : t;
    case Named::App: return napp(named_subst(t->a, x, u, r), named_subst(t->b, x, u, r));
    case Named::Lam: {
      if (t->name == x) return t;
      if (named_free(u).count(t->name)) {
        std::string y = r.fresh();
        NamedPtr body = named_subst(t->a, t->name, nvar(y), r);
        return nlam(y, named_subst(body, x, u, r));
      }
      return nlam(t->name, named_subst(t->a, x, u, r));
    }
  }
  return t;
}

// Index term -> named term. Free index j is "f<j>"; binders get unique names.
inline NamedPtr to_named(const Term& t, std::vector<std::string>& scope, std::size_t& counter) {
  switch (t.kind()) {
    case permsn::Kind::Var: {
      std::uint32_t k = t.index();
      if (k < scope.size()) return nvar(scope[scope.size() - 1 - k]);
      return nvar("f" + std::to_string(k - scope.size()));
    }
    case permsn::Kind::Lam: {
      std::string n = "b" + std::to_string(counter++);
      scope.push_back(n);
      NamedPtr body = to_named(t.body(), scope, counter);
      scope.pop_back();
      return nlam(n, body);
    }
    case permsn::Kind::App: {
      NamedPtr f = to_named(t.fun(), scope, counter);
      return napp(f, to_named(t.arg(), scope, counter));
    }
  }
  return nullptr;
}

inline NamedPtr to_named(const Term& t) {
  std::vector<std::string> scope;
  std::size_t counter = 0;
  return to_named(t, scope, counter);
}

inline Term from_named(const NamedPtr& t, std::vector<std::string>& scope) {
  switch (t->kind) {
    case Named::Var: {
      for (std::size_t k = 0; k < scope.size(); ++k)
        if (scope[scope.size() - 1 - k] == t->name) return Term::var(static_cast<std::uint32_t>(k));
      if (t->name.size() < 2 || t->name[0] != 'f') throw std::logic_error("from_named: stray free name " + t->name);
      return Term::var(static_cast<std::uint32_t>(scope.size() + std::stoul(t->name.substr(1))));
    }
    case Named::Lam: {
      scope.push_back(t->name);
      Term body = from_named(t->a, scope);
      scope.pop_back();
      return Term::lam(body);
    }
    case Named::App: {
      Term f = from_named(t->a, scope);
      return Term::app(f, from_named(t->b, scope));
    }
  }
  return Term();
}

inline Term from_named(const NamedPtr& t) {
  std::vector<std::string> scope;
  return from_named(t, scope);
}

// Contractum of rule r at the root of t, or nullptr if t is not a redex.
//   beta  (\x. M) N          -> M[x:=N]
//   delta (\y. \x. M) N      -> \x. ((\y. M) N)          x fresh for N
//   gamma (\x. M) N P        -> (\x. M P) N              x fresh for P
//   assoc M ((\x. N) P)      -> (\x. M N) P              x fresh for M
inline NamedPtr named_contract(permsn::Rule r, const NamedPtr& t, Renamer& ren) {
  using permsn::Rule;
  if (t->kind != Named::App) return nullptr;
  const NamedPtr& f = t->a;
  const NamedPtr& x = t->b;
  // Renames the binder of a λ to a fresh name.
  auto refresh = [&](const NamedPtr& lam) {
    std::string y = ren.fresh();
    return nlam(y, named_subst(lam->a, lam->name, nvar(y), ren));
  };
  switch (r) {
    case Rule::Beta:
      if (f->kind != Named::Lam) return nullptr;
      return named_subst(f->a, f->name, x, ren);
    case Rule::Delta: {
      if (f->kind != Named::Lam || f->a->kind != Named::Lam) return nullptr;
      NamedPtr inner = refresh(f->a);  // \x'. M'
      return nlam(inner->name, napp(nlam(f->name, inner->a), x));
    }
    case Rule::Gamma: {
      if (f->kind != Named::App || f->a->kind != Named::Lam) return nullptr;
      NamedPtr lam = refresh(f->a);
      return napp(nlam(lam->name, napp(lam->a, x)), f->b);
    }
    case Rule::Assoc: {
      if (x->kind != Named::App || x->a->kind != Named::Lam) return nullptr;
      NamedPtr lam = refresh(x->a);
      return napp(nlam(lam->name, napp(f, lam->a)), x->b);
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// η by plain memoized recursion over one_step. Only for terms known to be SN.

inline std::size_t naive_eta(const Term& t, permsn::RuleSet rules, std::unordered_map<Term, std::size_t, permsn::TermHash>& memo,
                             std::size_t depth = 0) {
  if (depth > 10'000) throw std::runtime_error("naive_eta: reduction too deep");
  if (auto it = memo.find(t); it != memo.end()) return it->second;
  std::size_t best = 0;
  for (const auto& u : permsn::one_step(t, rules)) best = std::max(best, 1 + naive_eta(u, rules, memo, depth + 1));
  memo.emplace(t, best);
  return best;
}

inline std::size_t naive_eta(const Term& t, permsn::RuleSet rules) {
  std::unordered_map<Term, std::size_t, permsn::TermHash> memo;
  return naive_eta(t, rules, memo);
}

// Reachable set and distinct (from, to) edges of the one-step relation.
struct Closure {
  std::unordered_set<Term, permsn::TermHash> nodes;
  std::set<std::pair<std::string, std::string>> edges;
};

inline Closure closure(const Term& t, permsn::RuleSet rules) {
  Closure c;
  std::vector<Term> todo{t};
  c.nodes.insert(t);
  while (!todo.empty()) {
    Term u = todo.back();
    todo.pop_back();
    for (const auto& v : permsn::one_step(u, rules)) {
      c.edges.emplace(structure_key(u), structure_key(v));
      if (c.nodes.insert(v).second) todo.push_back(v);
    }
  }
  return c;
}

}  // namespace oracle
