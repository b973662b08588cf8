// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace permsn {

enum class Kind : std::uint8_t { Var, Lam, App };

// Child selector used to address subterms.
enum class Step : std::uint8_t { Fun, Arg, Body };

using Path = std::vector<Step>;

// Immutable, structurally shared λ-term in de Bruijn form. Var(k) refers to
// the k-th enclosing binder; indices at or beyond the binder depth are free
// variables (free variable j at depth d is written Var(d + j)).
class Term {
  struct Node {
    Kind kind;
    std::uint32_t index = 0;  // Var only
    std::uint32_t size = 1;
    std::uint32_t loose = 0;  // 1 + largest free index, 0 when closed
    std::size_t hash = 0;
    std::shared_ptr<const Node> left;   // Lam body or App fun
    std::shared_ptr<const Node> right;  // App arg
  };

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 public:
  Term() = default;

  static Term var(std::uint32_t index) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->index = index;
    n->size = 1;
    n->loose = index + 1;
    n->hash = mix(0x9e3779b97f4a7c15ULL, index);
    return Term(std::move(n));
  }

  static Term lam(const Term& body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Lam;
    n->size = 1 + body.size();
    n->loose = body.loose() == 0 ? 0 : body.loose() - 1;
    n->hash = mix(0x51ed27a3c2f1b6d5ULL, body.hash());
    n->left = body.node_;
    return Term(std::move(n));
  }

  static Term app(const Term& fun, const Term& arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::App;
    n->size = 1 + fun.size() + arg.size();
    n->loose = std::max(fun.loose(), arg.loose());
    n->hash = mix(mix(0x2545f4914f6cdd1dULL, fun.hash()), arg.hash());
    n->left = fun.node_;
    n->right = arg.node_;
    return Term(std::move(n));
  }

  bool valid() const { return node_ != nullptr; }
  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_lam() const { return kind() == Kind::Lam; }
  bool is_app() const { return kind() == Kind::App; }

  std::uint32_t index() const {
    require(Kind::Var);
    return node_->index;
  }
  Term body() const {
    require(Kind::Lam);
    return Term(node_->left);
  }
  Term fun() const {
    require(Kind::App);
    return Term(node_->left);
  }
  Term arg() const {
    require(Kind::App);
    return Term(node_->right);
  }

  // Node count: Var = 1, Lam = 1 + body, App = 1 + fun + arg.
  std::uint32_t size() const { return node_->size; }
  std::uint32_t loose() const { return node_->loose; }
  bool closed() const { return loose() == 0; }
  std::size_t hash() const { return node_->hash; }

  friend bool operator==(const Term& a, const Term& b) { return equal(a.node_.get(), b.node_.get()); }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  static std::size_t mix(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h * 0xff51afd7ed558ccdULL;
  }

  static bool equal(const Node* a, const Node* b) {
    while (true) {
      if (a == b) return true;
      if (a->hash != b->hash || a->kind != b->kind || a->size != b->size) return false;
      switch (a->kind) {
        case Kind::Var:
          return a->index == b->index;
        case Kind::Lam:
          a = a->left.get();
          b = b->left.get();
          continue;
        case Kind::App:
          if (!equal(a->left.get(), b->left.get())) return false;
          a = a->right.get();
          b = b->right.get();
          continue;
      }
    }
  }

  void require(Kind k) const {
    if (kind() != k) throw std::logic_error("permsn::Term: wrong constructor accessed");
  }

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

// ---------------------------------------------------------------------------
// Index arithmetic

// Adds delta to every index >= cutoff. Negative deltas must not push a free
// index below cutoff.
inline Term shift(const Term& t, int delta, std::uint32_t cutoff = 0) {
  if (delta == 0 || t.loose() <= cutoff) return t;
  switch (t.kind()) {
    case Kind::Var: {
      std::int64_t k = t.index();
      if (k < cutoff) return t;
      if (k + delta < static_cast<std::int64_t>(cutoff))
        throw std::logic_error("permsn::shift: index would be captured");
      return Term::var(static_cast<std::uint32_t>(k + delta));
    }
    case Kind::Lam:
      return Term::lam(shift(t.body(), delta, cutoff + 1));
    case Kind::App:
      return Term::app(shift(t.fun(), delta, cutoff), shift(t.arg(), delta, cutoff));
  }
  return t;
}

namespace detail {

inline Term subst_at(const Term& t, std::uint32_t x, const Term& u, std::uint32_t depth,
                     Path* here, std::vector<Path>* residuals) {
  if (t.loose() <= x + depth) return t;
  switch (t.kind()) {
    case Kind::Var:
      if (t.index() == x + depth) {
        if (residuals) residuals->push_back(*here);
        return shift(u, static_cast<int>(depth));
      }
      return t;
    case Kind::Lam: {
      if (here) here->push_back(Step::Body);
      Term b = subst_at(t.body(), x, u, depth + 1, here, residuals);
      if (here) here->pop_back();
      return Term::lam(b);
    }
    case Kind::App: {
      if (here) here->push_back(Step::Fun);
      Term f = subst_at(t.fun(), x, u, depth, here, residuals);
      if (here) here->back() = Step::Arg;
      Term a = subst_at(t.arg(), x, u, depth, here, residuals);
      if (here) here->pop_back();
      return Term::app(f, a);
    }
  }
  return t;
}

}  // namespace detail

// t[x := u] for the free variable x of t; u lives in the same scope as t.
inline Term subst(const Term& t, std::uint32_t x, const Term& u) {
  return detail::subst_at(t, x, u, 0, nullptr, nullptr);
}

// As subst, additionally reporting the paths at which copies of u were placed.
inline Term subst_tracked(const Term& t, std::uint32_t x, const Term& u, std::vector<Path>& residuals) {
  Path here;
  return detail::subst_at(t, x, u, 0, &here, &residuals);
}

// Contractum of ((λ. body) arg): body[0 := arg] with the binder removed.
inline Term instantiate(const Term& body, const Term& arg) {
  return shift(subst(body, 0, shift(arg, 1)), -1);
}

inline Term instantiate_tracked(const Term& body, const Term& arg, std::vector<Path>& residuals) {
  return shift(subst_tracked(body, 0, shift(arg, 1), residuals), -1);
}

// Exchanges the two innermost binder references 0 and 1 (relative to depth).
inline Term swap_binders(const Term& t, std::uint32_t depth = 0) {
  if (t.loose() <= depth) return t;
  switch (t.kind()) {
    case Kind::Var:
      if (t.index() == depth) return Term::var(depth + 1);
      if (t.index() == depth + 1) return Term::var(depth);
      return t;
    case Kind::Lam:
      return Term::lam(swap_binders(t.body(), depth + 1));
    case Kind::App:
      return Term::app(swap_binders(t.fun(), depth), swap_binders(t.arg(), depth));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Free variables and counts

namespace detail {
inline void collect_free(const Term& t, std::uint32_t depth, std::set<std::uint32_t>& out) {
  if (t.loose() <= depth) return;
  switch (t.kind()) {
    case Kind::Var:
      out.insert(t.index() - depth);
      return;
    case Kind::Lam:
      collect_free(t.body(), depth + 1, out);
      return;
    case Kind::App:
      collect_free(t.fun(), depth, out);
      collect_free(t.arg(), depth, out);
      return;
  }
}

inline std::size_t count_free(const Term& t, std::uint32_t x, std::uint32_t depth) {
  if (t.loose() <= x + depth) return 0;
  switch (t.kind()) {
    case Kind::Var:
      return t.index() == x + depth ? 1 : 0;
    case Kind::Lam:
      return count_free(t.body(), x, depth + 1);
    case Kind::App:
      return count_free(t.fun(), x, depth) + count_free(t.arg(), x, depth);
  }
  return 0;
}
}  // namespace detail

inline std::set<std::uint32_t> free_vars(const Term& t) {
  std::set<std::uint32_t> out;
  detail::collect_free(t, 0, out);
  return out;
}

inline bool occurs_free(const Term& t, std::uint32_t x) { return detail::count_free(t, x, 0) > 0; }

// Number of free occurrences of x in t.
inline std::size_t nb(const Term& t, std::uint32_t x) { return detail::count_free(t, x, 0); }

inline std::size_t size(const Term& t) { return t.size(); }

// ---------------------------------------------------------------------------
// Spines

struct Spine {
  Term head;  // a Var or a Lam
  std::vector<Term> args;
};

inline Spine spine(const Term& t) {
  Spine s;
  Term cur = t;
  while (cur.is_app()) {
    s.args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = cur;
  return s;
}

template <typename It>
Term apply_all(Term head, It first, It last) {
  for (; first != last; ++first) head = Term::app(head, *first);
  return head;
}

inline Term reassemble(const Term& head, const std::vector<Term>& args) {
  return apply_all(head, args.begin(), args.end());
}

inline Term reassemble(const Spine& s) { return reassemble(s.head, s.args); }

// ---------------------------------------------------------------------------
// Positions

inline Term subterm_at(const Term& t, const Path& p) {
  Term cur = t;
  for (Step s : p) {
    switch (s) {
      case Step::Fun:
        if (!cur.is_app()) throw std::out_of_range("permsn::subterm_at: path leaves the term");
        cur = cur.fun();
        break;
      case Step::Arg:
        if (!cur.is_app()) throw std::out_of_range("permsn::subterm_at: path leaves the term");
        cur = cur.arg();
        break;
      case Step::Body:
        if (!cur.is_lam()) throw std::out_of_range("permsn::subterm_at: path leaves the term");
        cur = cur.body();
        break;
    }
  }
  return cur;
}

namespace detail {
inline Term replace_from(const Term& t, const Path& p, std::size_t i, const Term& repl) {
  if (i == p.size()) return repl;
  switch (p[i]) {
    case Step::Fun:
      if (!t.is_app()) break;
      return Term::app(replace_from(t.fun(), p, i + 1, repl), t.arg());
    case Step::Arg:
      if (!t.is_app()) break;
      return Term::app(t.fun(), replace_from(t.arg(), p, i + 1, repl));
    case Step::Body:
      if (!t.is_lam()) break;
      return Term::lam(replace_from(t.body(), p, i + 1, repl));
  }
  throw std::out_of_range("permsn::replace_at: path leaves the term");
}
}  // namespace detail

// Replaces the subterm at p. The replacement is taken verbatim, i.e. it must
// already be expressed relative to the binder depth at p.
inline Term replace_at(const Term& t, const Path& p, const Term& repl) {
  return detail::replace_from(t, p, 0, repl);
}

inline std::string path_to_string(const Path& p) {
  if (p.empty()) return "e";
  std::string s;
  for (Step st : p) s += st == Step::Fun ? 'f' : st == Step::Arg ? 'a' : 'b';
  return s;
}

inline Path path_from_string(std::string_view s) {
  Path p;
  if (s == "e" || s == "\xCE\xB5" || s.empty()) return p;
  for (char c : s) {
    switch (c) {
      case 'f': p.push_back(Step::Fun); break;
      case 'a': p.push_back(Step::Arg); break;
      case 'b': p.push_back(Step::Body); break;
      case '.': case '/': case ',': break;
      default: throw std::invalid_argument(std::string("permsn: bad path character '") + c + "'");
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Substitutions

// Finite map from free variables to terms in the same scope.
struct Substitution {
  std::map<std::uint32_t, Term> bindings;

  bool contains(std::uint32_t x) const { return bindings.count(x) != 0; }
  const Term& at(std::uint32_t x) const { return bindings.at(x); }
};

namespace detail {
inline Term apply_subst_at(const Substitution& s, const Term& t, std::uint32_t depth) {
  if (t.loose() <= depth) return t;
  switch (t.kind()) {
    case Kind::Var: {
      auto it = s.bindings.find(t.index() - depth);
      if (it == s.bindings.end()) return t;
      return shift(it->second, static_cast<int>(depth));
    }
    case Kind::Lam:
      return Term::lam(apply_subst_at(s, t.body(), depth + 1));
    case Kind::App:
      return Term::app(apply_subst_at(s, t.fun(), depth), apply_subst_at(s, t.arg(), depth));
  }
  return t;
}
}  // namespace detail

// Simultaneous, capture-avoiding application.
inline Term apply(const Substitution& s, const Term& t) { return detail::apply_subst_at(s, t, 0); }

// Sum over x in dom(s) of nb(t, x) * size(s(x)).
inline std::size_t size_sigma(const Substitution& s, const Term& t) {
  std::size_t total = 0;
  for (const auto& [x, u] : s.bindings) total += nb(t, x) * u.size();
  return total;
}

}  // namespace permsn

template <>
struct std::hash<permsn::Term> {
  std::size_t operator()(const permsn::Term& t) const noexcept { return t.hash(); }
};
