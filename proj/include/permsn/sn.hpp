// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// Strong normalization by exhaustive exploration of the reduct graph.
//
// A depth-first search over one_step proves SN when the whole reachable graph
// is finite and acyclic; η (the length of the longest reduction) falls out as
// the longest path in that DAG. A back edge to a node on the DFS stack is a
// cycle and certifies non-SN with a replayable witness. A DFS path that
// reaches a term containing an earlier term of the same path (shifted to its
// binder depth) also certifies non-SN: reduction is closed under contexts and
// shifts, so the segment repeats forever. Other divergence ends as Unknown
// once the node budget is spent.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "permsn/reduction.hpp"
#include "permsn/term.hpp"

namespace permsn {

enum class SnTag : std::uint8_t { Sn, NotSn, Unknown };

inline const char* sn_tag_name(SnTag t) {
  switch (t) {
    case SnTag::Sn: return "SN";
    case SnTag::NotSn: return "NOTSN";
    case SnTag::Unknown: return "UNKNOWN";
  }
  return "?";
}

struct SnVerdict {
  SnTag tag = SnTag::Unknown;
  std::size_t eta = 0;          // Sn: longest reduction length
  std::size_t graph_nodes = 0;  // Sn: nodes expanded by this exploration
  // NotSn: steps from the start term; steps[cycle_start..] lead from a term
  // back to itself.
  std::vector<RedexOccurrence> witness;
  std::size_t cycle_start = 0;
  // NotSn by embedding: every step from cycle_start lies below `anchor`, and
  // the last witness term holds at `embedding` (an extension of anchor) the
  // anchored subterm of the cycle_start term, shifted by the binder depth
  // between the two paths.
  std::optional<Path> embedding;
  Path anchor;
  std::size_t budget_spent = 0;  // Unknown: nodes expanded
  bool size_limit_hit = false;   // Unknown: a reduct outgrew max_term_size

  bool sn() const { return tag == SnTag::Sn; }
  bool not_sn() const { return tag == SnTag::NotSn; }
  bool unknown() const { return tag == SnTag::Unknown; }
  std::size_t cycle_length() const { return witness.size() - cycle_start; }

  static SnVerdict proven(std::size_t eta, std::size_t nodes) {
    SnVerdict v;
    v.tag = SnTag::Sn;
    v.eta = eta;
    v.graph_nodes = nodes;
    return v;
  }
  static SnVerdict cycle(std::vector<RedexOccurrence> steps, std::size_t start) {
    SnVerdict v;
    v.tag = SnTag::NotSn;
    v.witness = std::move(steps);
    v.cycle_start = start;
    return v;
  }
  static SnVerdict exhausted(std::size_t spent, bool size_limit = false) {
    SnVerdict v;
    v.tag = SnTag::Unknown;
    v.budget_spent = spent;
    v.size_limit_hit = size_limit;
    return v;
  }
};

// Outcome comparison used for cache agreement: tag, plus η for Sn.
inline bool same_outcome(const SnVerdict& a, const SnVerdict& b) {
  if (a.tag != b.tag) return false;
  return a.tag != SnTag::Sn || a.eta == b.eta;
}

inline std::string to_string(const SnVerdict& v) {
  switch (v.tag) {
    case SnTag::Sn:
      return "SN eta=" + std::to_string(v.eta) + " nodes=" + std::to_string(v.graph_nodes);
    case SnTag::NotSn: {
      std::string s = "NOTSN " + std::string(v.embedding ? "embedding=" : "cycle=") + std::to_string(v.cycle_length());
      if (v.embedding) s += " at=" + path_to_string(v.anchor) + "->" + path_to_string(*v.embedding);
      s += " witness=[";
      for (std::size_t i = 0; i < v.witness.size(); ++i) {
        if (i) s += ' ';
        if (i == v.cycle_start) s += "| ";
        s += to_string(v.witness[i]);
      }
      return s + "]";
    }
    case SnTag::Unknown:
      return "UNKNOWN budget=" + std::to_string(v.budget_spent) + (v.size_limit_hit ? " (term size limit)" : "");
  }
  return "?";
}

// Replays a NotSn witness from t and reports whether it revisits the term
// reached at cycle_start, or, for an embedding witness, whether the final
// term holds a shifted copy of the anchored subterm.
inline bool replay_witness(const Term& t, const SnVerdict& v) {
  if (!v.not_sn() || v.witness.empty() || v.cycle_start >= v.witness.size()) return false;
  Term cur = t;
  Term anchor;
  try {
    for (std::size_t i = 0; i < v.witness.size(); ++i) {
      if (i == v.cycle_start) anchor = cur;
      cur = apply(cur, v.witness[i]);
    }
  } catch (const PatternMismatch&) {
    return false;
  }
  if (!v.embedding) return cur == anchor;
  const Path& q = v.anchor;
  const Path& e = *v.embedding;
  auto has_prefix = [&](const Path& p) { return p.size() >= q.size() && std::equal(q.begin(), q.end(), p.begin()); };
  if (e.size() <= q.size() || !has_prefix(e)) return false;
  for (std::size_t i = v.cycle_start; i < v.witness.size(); ++i)
    if (!has_prefix(v.witness[i].path)) return false;
  std::int64_t depth = 0;
  for (std::size_t k = q.size(); k < e.size(); ++k) depth += e[k] == Step::Body;
  try {
    return subterm_at(cur, e) == shift(subterm_at(anchor, q), depth);
  } catch (const std::exception&) {
    return false;
  }
}

namespace detail {

// A DFS path t(0) -> ... -> t(j) diverges if, for some i < j, every step from
// t(i) happens below a position q and t(j)|q contains shift(t(i)|q, d) as a
// proper subterm at relative binder depth d: the segment s ->+ C[s] can be
// replayed inside its own copy forever.
struct Embedding {
  std::size_t start;  // i
  Path anchor;        // q
  Path at;            // q followed by the path of the copy inside t(j)|q
};

inline Path common_prefix(const Path& a, const Path& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return Path(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
}

// terms.size() == steps.size() + 1. Work is bounded by `cap` subterm visits;
// nearer ancestors and deeper anchors are tried first.
inline std::optional<Embedding> find_embedding(const std::vector<Term>& terms,
                                               const std::vector<RedexOccurrence>& steps, std::size_t cap) {
  if (steps.empty()) return std::nullopt;
  std::size_t j = terms.size() - 1;
  std::size_t visits = 0;
  Path cp = steps[j - 1].path;
  for (std::size_t i = j; i-- > 0;) {
    cp = common_prefix(cp, steps[i].path);
    for (std::size_t len = cp.size() + 1; len-- > 0;) {
      Path q(cp.begin(), cp.begin() + static_cast<std::ptrdiff_t>(len));
      Term s = subterm_at(terms[i], q);
      Term target = subterm_at(terms[j], q);
      if (target.size() <= s.size()) continue;
      std::optional<Path> hit;
      Path here;
      std::function<void(const Term&, std::int64_t)> walk = [&](const Term& u, std::int64_t d) {
        if (hit || visits >= cap || u.size() < s.size()) return;
        ++visits;
        if (!here.empty() && u.size() == s.size() && u == shift(s, d)) {
          hit = here;
          return;
        }
        switch (u.kind()) {
          case Kind::Var: return;
          case Kind::Lam:
            here.push_back(Step::Body);
            walk(u.body(), d + 1);
            here.pop_back();
            return;
          case Kind::App:
            here.push_back(Step::Fun);
            walk(u.fun(), d);
            here.back() = Step::Arg;
            walk(u.arg(), d);
            here.pop_back();
            return;
        }
      };
      walk(target, 0);
      if (hit) {
        Path at = q;
        at.insert(at.end(), hit->begin(), hit->end());
        return Embedding{i, q, at};
      }
      if (visits >= cap) return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Memoized SN facts keyed by (term, rule set). Only proven outcomes are kept.
class SnCache {
 public:
  struct Entry {
    SnTag tag;
    std::size_t value;  // η for Sn, cycle length for NotSn
  };

  std::optional<Entry> find(const Term& t, RuleSet rules) const {
    auto it = map_.find(Key{t, rules.bits()});
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  // Unknown verdicts are ignored. Returns false on disagreement with an
  // existing entry.
  bool store(const Term& t, RuleSet rules, const SnVerdict& v) {
    if (v.unknown()) return true;
    Entry e{v.tag, v.sn() ? v.eta : v.cycle_length()};
    return store(t, rules, e);
  }

  bool store(const Term& t, RuleSet rules, Entry e) {
    auto [it, inserted] = map_.emplace(Key{t, rules.bits()}, e);
    if (inserted) return true;
    if (it->second.tag != e.tag) return false;
    if (e.tag == SnTag::Sn && it->second.value != e.value) return false;
    return true;
  }

  // Merges another cache; returns the number of disagreeing entries.
  std::size_t merge(const SnCache& other) {
    std::size_t conflicts = 0;
    for (const auto& [k, e] : other.map_) {
      auto [it, inserted] = map_.emplace(k, e);
      if (!inserted && (it->second.tag != e.tag || (e.tag == SnTag::Sn && it->second.value != e.value)))
        ++conflicts;
    }
    return conflicts;
  }

  std::size_t size() const { return map_.size(); }
  void clear() { map_.clear(); }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [k, e] : map_) f(k.term, RuleSet(from_bits(k.rules)), e);
  }

 private:
  struct Key {
    Term term;
    std::uint8_t rules;
    friend bool operator==(const Key& a, const Key& b) { return a.rules == b.rules && a.term == b.term; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return k.term.hash() * 31u + k.rules; }
  };

  static RuleSet from_bits(std::uint8_t bits) {
    RuleSet s;
    for (Rule r : kAllRuleValues)
      if (bits & (1u << static_cast<unsigned>(r))) s = s.with(r);
    return s;
  }

  std::unordered_map<Key, Entry, KeyHash> map_;
};

struct SnOptions {
  std::size_t budget = 50'000;
  // Reducts larger than this end the search as Unknown. Path copying makes
  // memory grow with depth times term size on non-cyclic divergence.
  std::size_t max_term_size = 2'000;
  // Record every fully explored node in the cache, not just the start term.
  bool cache_interior = true;
};

namespace detail {

inline SnVerdict sn_search(const Term& t, RuleSet rules, const SnOptions& opt, SnCache* cache) {
  if (opt.budget == 0) throw std::invalid_argument("sn_verdict: budget must be positive");
  if (cache) {
    if (auto e = cache->find(t, rules); e && e->tag == SnTag::Sn) return SnVerdict::proven(e->value, 0);
  }

  struct Frame {
    Term term;
    std::vector<RedexOccurrence> succ;
    std::size_t next = 0;
    std::size_t best = 0;
    bool has_succ = false;
  };
  // Stack position for nodes on the DFS path, or η for finished nodes.
  struct State {
    bool on_stack;
    std::size_t value;
  };

  std::unordered_map<Term, State, TermHash> state;
  std::vector<Frame> stack;
  std::size_t expanded = 0;

  auto open = [&](const Term& u) -> bool {
    if (expanded == opt.budget) return false;
    ++expanded;
    Frame f;
    f.term = u;
    f.succ = redexes(u, rules);
    state[u] = State{true, stack.size()};
    stack.push_back(std::move(f));
    return true;
  };

  // Embedding test of the stack top against its ancestors; run at doubling
  // depths and before giving up.
  auto embedded = [&]() -> std::optional<SnVerdict> {
    std::vector<Term> terms;
    std::vector<RedexOccurrence> steps;
    terms.reserve(stack.size());
    for (std::size_t i = 0; i < stack.size(); ++i) {
      terms.push_back(stack[i].term);
      if (i + 1 < stack.size()) steps.push_back(stack[i].succ[stack[i].next - 1]);
    }
    auto e = detail::find_embedding(terms, steps, 200'000);
    if (!e) return std::nullopt;
    SnVerdict v = SnVerdict::cycle(std::move(steps), e->start);
    v.anchor = std::move(e->anchor);
    v.embedding = std::move(e->at);
    return v;
  };
  std::size_t next_probe = 16;

  if (!open(t)) return SnVerdict::exhausted(expanded);

  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next < top.succ.size()) {
      const RedexOccurrence& r = top.succ[top.next++];
      Term reduct = apply(top.term, r);
      auto it = state.find(reduct);
      if (it != state.end()) {
        if (it->second.on_stack) {
          std::vector<RedexOccurrence> steps;
          for (std::size_t i = 0; i + 1 < stack.size(); ++i) steps.push_back(stack[i].succ[stack[i].next - 1]);
          steps.push_back(r);
          return SnVerdict::cycle(std::move(steps), it->second.value);
        }
        top.best = std::max(top.best, it->second.value + 1);
        top.has_succ = true;
        continue;
      }
      if (cache) {
        if (auto e = cache->find(reduct, rules); e && e->tag == SnTag::Sn) {
          state[reduct] = State{false, e->value};
          top.best = std::max(top.best, e->value + 1);
          top.has_succ = true;
          continue;
        }
      }
      if (reduct.size() > opt.max_term_size) {
        if (auto v = embedded()) return *v;
        return SnVerdict::exhausted(expanded, true);
      }
      if (!open(reduct)) {
        if (auto v = embedded()) return *v;
        return SnVerdict::exhausted(expanded);
      }
      if (stack.size() == next_probe) {
        next_probe *= 2;
        if (auto v = embedded()) return *v;
      }
      continue;
    }
    std::size_t eta = top.has_succ ? top.best : 0;
    Term done = top.term;
    stack.pop_back();
    state[done] = State{false, eta};
    if (cache && (opt.cache_interior || stack.empty())) cache->store(done, rules, SnCache::Entry{SnTag::Sn, eta});
    if (!stack.empty()) {
      stack.back().best = std::max(stack.back().best, eta + 1);
      stack.back().has_succ = true;
    } else {
      return SnVerdict::proven(eta, expanded);
    }
  }
  return SnVerdict::proven(0, expanded);  // unreachable
}

}  // namespace detail

// Decides SN of t under `rules` by exhaustive DFS. Cached Sn facts prune the
// search; cached NotSn facts are not trusted for witnesses and are re-derived.
// A NotSn outcome is recorded for the start term only.
inline SnVerdict sn_verdict(const Term& t, RuleSet rules, const SnOptions& opt, SnCache* cache = nullptr) {
  SnVerdict v = detail::sn_search(t, rules, opt, cache);
  if (cache && v.not_sn()) cache->store(t, rules, v);
  return v;
}

inline SnVerdict sn_verdict(const Term& t, RuleSet rules, std::size_t budget = 50'000, SnCache* cache = nullptr) {
  SnOptions opt;
  opt.budget = budget;
  return sn_verdict(t, rules, opt, cache);
}

// Verdict for the full rule set that first settles β: a β-cycle is already a
// cycle for the full set, so the (possibly infinite) full exploration only
// runs on β-SN terms.
inline SnVerdict sn_verdict_staged(const Term& t, std::size_t budget, SnCache* cache = nullptr) {
  SnVerdict b = sn_verdict(t, RuleSet::beta(), budget, cache);
  if (!b.sn()) return b;
  return sn_verdict(t, RuleSet::all(), budget, cache);
}

class NotProvenSn : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t eta(const Term& t, RuleSet rules, std::size_t budget = 50'000, SnCache* cache = nullptr) {
  SnVerdict v = sn_verdict(t, rules, budget, cache);
  if (!v.sn()) throw NotProvenSn("eta: term not proven SN (" + to_string(v) + ")");
  return v.eta;
}

// Sum over x in dom(s) of nb(t, x) * η(s(x)).
inline std::size_t eta_sigma(const Substitution& s, const Term& t, RuleSet rules, std::size_t budget = 50'000,
                             SnCache* cache = nullptr) {
  std::size_t total = 0;
  for (const auto& [x, u] : s.bindings) total += nb(t, x) * eta(u, rules, budget, cache);
  return total;
}

using Measure = std::array<std::size_t, 5>;

// ⟨type(σ), η(t), size(t), η(σ,t), size(σ,t)⟩ under the full rule set;
// std::array compares lexicographically.
inline Measure measure_main(const Substitution& s, std::size_t type_size_of_sigma, const Term& t,
                            std::size_t budget = 50'000, SnCache* cache = nullptr) {
  return Measure{type_size_of_sigma, eta(t, RuleSet::all(), budget, cache), t.size(),
                 eta_sigma(s, t, RuleSet::all(), budget, cache), size_sigma(s, t)};
}

// Hypotheses of the head-reduct SN criterion for t = (H M(1) ... M(n)).
struct SnCriterionReport {
  HeadClass head;
  std::optional<SnVerdict> d_verdict;    // D[t], if delta-head reducible
  std::optional<SnVerdict> c_verdict;    // C[t], if gamma-head reducible
  std::optional<SnVerdict> arg_verdict;  // Arg[t], if beta-head reducible
  std::optional<SnVerdict> b_verdict;    // B[t], if beta-head reducible
  std::vector<std::pair<std::size_t, SnVerdict>> a_verdicts;  // A[t,i] for redex arguments
  // The induction runs on η(H) + Σ η(M(i)), so H and every M(i) must be SN.
  std::vector<SnVerdict> component_verdicts;

  bool head_hypothesis = false;
  bool redex_hypothesis = false;
  bool components_sn = false;
  bool all_hold() const { return head_hypothesis && redex_hypothesis && components_sn; }
  bool any_unknown() const {
    auto u = [](const std::optional<SnVerdict>& v) { return v && v->unknown(); };
    if (u(d_verdict) || u(c_verdict) || u(arg_verdict) || u(b_verdict)) return true;
    for (const auto& [i, v] : a_verdicts)
      if (v.unknown()) return true;
    for (const auto& v : component_verdicts)
      if (v.unknown()) return true;
    return false;
  }
};

inline SnCriterionReport cs_sn_hypotheses(const Term& t, std::size_t budget = 50'000, SnCache* cache = nullptr) {
  Spine s = spine(t);
  if (s.args.empty()) throw std::invalid_argument("cs_sn_hypotheses: term has no spine arguments");
  SnCriterionReport rep;
  rep.head = head_class(t);
  auto verdict = [&](const Term& u) { return sn_verdict_staged(u, budget, cache); };

  bool h1 = true;
  if (rep.head.delta) {
    rep.d_verdict = verdict(d_of(t));
    h1 = h1 && rep.d_verdict->sn();
  }
  if (rep.head.gamma) {
    rep.c_verdict = verdict(c_of(t));
    h1 = h1 && rep.c_verdict->sn();
  }
  if (rep.head.beta) {
    rep.arg_verdict = verdict(arg_of(t));
    rep.b_verdict = verdict(b_of(t));
    h1 = h1 && rep.arg_verdict->sn() && rep.b_verdict->sn();
  }
  rep.head_hypothesis = h1;

  bool h2 = true;
  for (std::size_t i = 1; i <= s.args.size(); ++i) {
    const Term& m = s.args[i - 1];
    if (m.is_app() && m.fun().is_lam()) {
      SnVerdict v = verdict(a_of(t, i));
      h2 = h2 && v.sn();
      rep.a_verdicts.emplace_back(i, std::move(v));
    }
  }
  rep.redex_hypothesis = h2;

  bool comp = true;
  rep.component_verdicts.push_back(verdict(s.head));
  comp = comp && rep.component_verdicts.back().sn();
  for (const auto& m : s.args) {
    rep.component_verdicts.push_back(verdict(m));
    comp = comp && rep.component_verdicts.back().sn();
  }
  rep.components_sn = comp;
  return rep;
}

class LeftBranchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Replaces the subterm u at a left-branch node (reached through Fun edges
// only) by (λx. u x).
inline Term left_branch_eta_expand(const Term& t, const Path& path) {
  Term cur = t;
  for (Step s : path) {
    if (s != Step::Fun || !cur.is_app()) throw LeftBranchError("left_branch_eta_expand: path leaves the left branch");
    cur = cur.fun();
  }
  return replace_at(t, path, Term::lam(Term::app(shift(cur, 1), Term::var(0))));
}

// Left-branch nodes of t: ε, f, ff, ... down to the spine head.
inline std::vector<Path> left_branch_paths(const Term& t) {
  std::vector<Path> out;
  Path p;
  Term cur = t;
  out.push_back(p);
  while (cur.is_app()) {
    p.push_back(Step::Fun);
    cur = cur.fun();
    out.push_back(p);
  }
  return out;
}

}  // namespace permsn
