// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// Exhaustive verification suites over an enumerated corpus. Each suite runs a
// per-term body; the corpus is split into contiguous chunks handled by
// share-nothing workers, and the partial reports are merged in chunk order so
// results do not depend on the worker count.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "permsn/harness/corpus.hpp"
#include "permsn/infer.hpp"
#include "permsn/reduction.hpp"
#include "permsn/sn.hpp"
#include "permsn/syntax.hpp"
#include "permsn/term.hpp"
#include "permsn/typesys.hpp"

namespace permsn::harness {

struct Counterexample {
  std::string check;
  std::string term;
  std::string detail;
  std::vector<std::string> trace;  // one line per reduction step, replayable
};

struct CheckTally {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t unknown = 0;
};

struct SuiteReport {
  std::string suite;
  std::size_t terms = 0;
  std::vector<CheckTally> checks;                // in first-use order
  std::vector<std::pair<std::string, std::size_t>> counters;  // informational
  std::vector<Counterexample> counterexamples;
  double wall_seconds = 0;

  CheckTally& tally(const std::string& name) {
    for (auto& c : checks)
      if (c.name == name) return c;
    checks.push_back(CheckTally{name});
    return checks.back();
  }
  const CheckTally* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  void count(const std::string& name, std::size_t n = 1) {
    for (auto& [k, v] : counters)
      if (k == name) {
        v += n;
        return;
      }
    counters.emplace_back(name, n);
  }
  std::size_t counter(const std::string& name) const {
    for (const auto& [k, v] : counters)
      if (k == name) return v;
    return 0;
  }

  void pass(const std::string& check) { ++tally(check).passed; }
  void fail(const std::string& check, Counterexample cx) {
    ++tally(check).failed;
    cx.check = check;
    counterexamples.push_back(std::move(cx));
  }
  void unknown(const std::string& check, Counterexample cx) {
    ++tally(check).unknown;
    cx.check = check;
    counterexamples.push_back(std::move(cx));
  }
  // Records the outcome of a boolean assertion.
  void expect(const std::string& check, bool ok, const std::function<Counterexample()>& describe) {
    if (ok)
      pass(check);
    else
      fail(check, describe());
  }

  std::size_t passed() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.passed;
    return n;
  }
  std::size_t failed() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.failed;
    return n;
  }
  std::size_t unknowns() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.unknown;
    return n;
  }
  bool ok() const { return failed() == 0 && unknowns() == 0; }

  void merge(const SuiteReport& other) {
    terms += other.terms;
    for (const auto& c : other.checks) {
      auto& mine = tally(c.name);
      mine.passed += c.passed;
      mine.failed += c.failed;
      mine.unknown += c.unknown;
    }
    for (const auto& [k, v] : other.counters) count(k, v);
    counterexamples.insert(counterexamples.end(), other.counterexamples.begin(), other.counterexamples.end());
  }

  // Machine-readable, one line.
  std::string summary_line() const {
    std::ostringstream out;
    out << "SUMMARY suite=" << suite << " status=" << (ok() ? "PASS" : "FAIL") << " terms=" << terms
        << " passed=" << passed() << " failed=" << failed() << " unknown=" << unknowns();
    out.setf(std::ios::fixed);
    out.precision(2);
    out << " wall_s=" << wall_seconds;
    return out.str();
  }

  // Full plain-text report; `max_examples` bounds the counterexamples shown.
  std::string text(std::size_t max_examples = 20) const {
    std::ostringstream out;
    out << "== " << suite << " ==\n";
    out << "terms examined: " << terms << "\n";
    for (const auto& [k, v] : counters) out << "  " << k << ": " << v << "\n";
    for (const auto& c : checks)
      out << "  [" << (c.failed == 0 && c.unknown == 0 ? "ok" : "!!") << "] " << c.name << ": " << c.passed
          << " passed, " << c.failed << " failed, " << c.unknown << " unknown\n";
    std::size_t shown = 0;
    for (const auto& cx : counterexamples) {
      if (shown++ == max_examples) {
        out << "  ... " << counterexamples.size() - max_examples << " more\n";
        break;
      }
      out << "  counterexample (" << cx.check << "): " << cx.term << "\n";
      if (!cx.detail.empty()) out << "    " << cx.detail << "\n";
      for (const auto& l : cx.trace) out << "    " << l << "\n";
    }
    out << summary_line() << "\n";
    return out.str();
  }
};

struct SuiteOptions {
  std::vector<CorpusSpec> corpus = default_corpus_specs();
  std::size_t budget = 50'000;
  unsigned jobs = 1;
  SnCache* cache = nullptr;   // shared cache, read before and merged after the run
  std::uint64_t seed = 0;     // drives the corruption fuzzer's node choice
  std::size_t pool_max_size = 5;
  // Lemma suite only: substitution images whose verdict ran out of budget are
  // retried once with this budget (0 disables the retry).
  std::size_t escalation_budget = 2'000'000;
};

// "i rule@path term" lines for the reduction sequence `steps` from t.
inline std::vector<std::string> trace_lines(const Term& t, const std::vector<RedexOccurrence>& steps,
                                            std::size_t cycle_start = static_cast<std::size_t>(-1)) {
  std::vector<std::string> out;
  out.push_back("0 " + print(t));
  Term cur = t;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    cur = apply(cur, steps[i]);
    out.push_back(std::to_string(i + 1) + " " + to_string(steps[i]) + " " + print(cur));
  }
  if (cycle_start < out.size()) out[cycle_start] += "   <- repeats from here";
  return out;
}

inline Counterexample verdict_example(const Term& t, const SnVerdict& v, const std::string& what) {
  Counterexample cx;
  cx.term = print(t);
  cx.detail = what + ": " + to_string(v);
  if (v.not_sn()) cx.trace = trace_lines(t, v.witness, v.cycle_start);
  return cx;
}

inline Counterexample term_example(const Term& t, std::string detail) {
  Counterexample cx;
  cx.term = print(t);
  cx.detail = std::move(detail);
  return cx;
}

// Verdict under `rules` (settling β first for the full set); a budget-exhausted
// result is retried once at opt.escalation_budget without caching interior
// nodes, so the cache does not balloon with the larger graph.
inline SnVerdict escalated_verdict(const Term& t, RuleSet rules, const SuiteOptions& opt, SnCache& cache,
                                   SuiteReport& rep) {
  auto at = [&](std::size_t budget, bool interior) {
    SnOptions so;
    so.budget = budget;
    so.cache_interior = interior;
    if (!(rules == RuleSet::beta())) {
      SnVerdict b = sn_verdict(t, RuleSet::beta(), so, &cache);
      if (!b.sn()) return b;
    }
    return sn_verdict(t, rules, so, &cache);
  };
  SnVerdict v = at(opt.budget, true);
  if (v.unknown() && !v.size_limit_hit && opt.escalation_budget > opt.budget) {
    rep.count("escalated verdicts");
    v = at(opt.escalation_budget, false);
  }
  return v;
}

// Closed terms of size <= max_size proven β-SN, in enumeration order.
inline std::vector<Term> beta_sn_pool(std::size_t max_size, std::size_t budget, SnCache* cache = nullptr) {
  std::vector<Term> out;
  for (auto& t : enumerate(CorpusSpec{max_size, 0, true}))
    if (sn_verdict(t, RuleSet::beta(), budget, cache).sn()) out.push_back(std::move(t));
  return out;
}

using TermCheck = std::function<void(const Term& t, std::size_t index, SnCache& cache, SuiteReport& rep)>;

// Runs `body` over the corpus on opt.jobs workers, each owning a copy of the
// shared cache. Cache disagreements on merge are reported as failures.
inline SuiteReport run_suite(const std::string& name, const std::vector<Term>& corpus, const SuiteOptions& opt,
                             const TermCheck& body) {
  auto start = std::chrono::steady_clock::now();
  unsigned jobs = std::max(1u, opt.jobs);
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, corpus.size())));
  std::vector<SuiteReport> parts(jobs);
  std::vector<SnCache> caches(jobs, opt.cache ? *opt.cache : SnCache{});
  std::size_t chunk = (corpus.size() + jobs - 1) / jobs;
  auto work = [&](unsigned w) {
    std::size_t lo = std::min(corpus.size(), w * chunk), hi = std::min(corpus.size(), lo + chunk);
    for (std::size_t i = lo; i < hi; ++i) {
      ++parts[w].terms;
      body(corpus[i], i, caches[w], parts[w]);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (auto& th : threads) th.join();
  }
  SuiteReport rep;
  rep.suite = name;
  for (auto& p : parts) rep.merge(p);
  if (opt.cache) {
    for (const auto& c : caches) {
      std::size_t conflicts = opt.cache->merge(c);
      if (conflicts) {
        Counterexample cx;
        cx.term = "(cache)";
        cx.detail = std::to_string(conflicts) + " disagreeing cache entries between workers";
        rep.fail("cache-agreement", std::move(cx));
      }
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// β-SN implies SN for all four rules

inline SuiteReport verify_theorem1(const std::vector<Term>& corpus, const SuiteOptions& opt = {}) {
  return run_suite("theorem1", corpus, opt, [&](const Term& t, std::size_t, SnCache& cache, SuiteReport& rep) {
    SnVerdict vb = sn_verdict(t, RuleSet::beta(), opt.budget, &cache);
    if (vb.unknown()) return rep.unknown("beta-verdict", verdict_example(t, vb, "beta"));
    if (vb.not_sn()) return rep.count("skipped (not beta-SN)");
    rep.count("beta-SN");
    SnVerdict va = sn_verdict(t, RuleSet::all(), opt.budget, &cache);
    if (va.unknown()) return rep.unknown("sn-all-rules", verdict_example(t, va, "all rules"));
    rep.expect("sn-all-rules", va.sn(), [&] { return verdict_example(t, va, "all rules"); });
    if (va.sn()) {
      rep.expect("eta-monotone", vb.eta <= va.eta, [&] {
        return term_example(t, "eta_beta=" + std::to_string(vb.eta) + " > eta_all=" + std::to_string(va.eta));
      });
      if (va.eta > vb.eta) rep.count("eta_all > eta_beta");
    }
  });
}

inline SuiteReport verify_theorem1(const SuiteOptions& opt = {}) {
  return verify_theorem1(enumerate_union(opt.corpus), opt);
}

// ---------------------------------------------------------------------------
// Derivation corruption

enum class Corruption { Type, Term, Context, Rule };

inline const char* corruption_name(Corruption c) {
  switch (c) {
    case Corruption::Type: return "type";
    case Corruption::Term: return "term";
    case Corruption::Context: return "context";
    case Corruption::Rule: return "rule";
  }
  return "?";
}

namespace detail {

inline void collect_nodes(Derivation& d, std::vector<Derivation*>& out) {
  out.push_back(&d);
  for (auto& c : d.children) collect_nodes(c, out);
}

inline RuleTag other_arity(RuleTag r) {
  switch (r) {
    case RuleTag::Ax: return RuleTag::ArrowI;
    case RuleTag::ArrowE: return RuleTag::AndE1;
    case RuleTag::ArrowI: return RuleTag::AndI;
    case RuleTag::AndE1:
    case RuleTag::AndE2: return RuleTag::ArrowE;
    case RuleTag::AndI: return RuleTag::Ax;
  }
  return RuleTag::Ax;
}

}  // namespace detail

// Damages one node of a copy of d. Atoms and variables introduced are fresh
// with respect to the whole derivation, so every kind is locally detectable.
inline Derivation corrupt(const Derivation& d, Corruption kind, std::mt19937_64& rng) {
  Derivation out = d;
  std::vector<Derivation*> nodes;
  detail::collect_nodes(out, nodes);
  Derivation& n = *nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)];
  Type bogus = Type::atom("corrupt");
  std::uint32_t far = d.term.loose() + 1000;
  switch (kind) {
    case Corruption::Type: n.type = bogus; break;
    case Corruption::Term: n.term = Term::var(far); break;
    case Corruption::Context:
      if (n.ctx.empty())
        n.ctx.emplace(far, bogus);
      else
        n.ctx.begin()->second = bogus;
      break;
    case Corruption::Rule: n.rule = detail::other_arity(n.rule); break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// β-SN terms are typable; emitted derivations check; typable terms are SN and
// their reducts stay typable.

inline SuiteReport verify_theoremD(const std::vector<Term>& corpus, const SuiteOptions& opt = {}) {
  return run_suite("theoremD", corpus, opt, [&](const Term& t, std::size_t index, SnCache& cache, SuiteReport& rep) {
    SnVerdict vb = sn_verdict(t, RuleSet::beta(), opt.budget, &cache);
    if (vb.unknown()) return rep.unknown("beta-verdict", verdict_example(t, vb, "beta"));
    if (vb.not_sn()) return rep.count("skipped (not beta-SN)");
    InferOptions io{opt.budget, &cache};
    InferenceResult r;
    try {
      r = infer(t, io);
    } catch (const std::exception& e) {
      return rep.fail("infer", term_example(t, e.what()));
    }
    rep.pass("infer");
    rep.count("derivation nodes", r.derivation.node_count());

    CheckResult c = check(r.derivation);
    rep.expect("checker", bool(c), [&] { return term_example(t, c.reason); });
    rep.expect("conclusion-term", r.derivation.term == t, [&] { return term_example(t, "conclusion differs"); });

    auto fv = free_vars(t);
    bool dom_ok = r.ctx.size() == fv.size();
    for (const auto& [k, ty] : r.ctx) dom_ok = dom_ok && fv.count(k);
    rep.expect("context-domain", dom_ok, [&] { return term_example(t, "dom(ctx) differs from the free variables"); });

    MeasureViolation mv = measure_trace_check(r);
    rep.expect("measure-decreases", bool(mv), [&] {
      const auto& m = r.stats.trace[mv.record];
      return term_example(t, "call " + std::to_string(mv.record) + ": <" + std::to_string(m.parent_eta) + "," +
                                 std::to_string(m.parent_size) + "> -> <" + std::to_string(m.child_eta) + "," +
                                 std::to_string(m.child_size) + ">");
    });

    auto kind = static_cast<Corruption>(index % 4);
    std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ull + index);
    Derivation bad = corrupt(r.derivation, kind, rng);
    rep.expect("corruption-rejected", !check(bad), [&] {
      return term_example(t, std::string("checker accepted a corrupted derivation (") + corruption_name(kind) + ")");
    });

    TypableConsequence tc = typable_consequence(t, opt.budget, &cache);
    if (tc.verdict_all.unknown())
      rep.unknown("typable-implies-sn", verdict_example(t, tc.verdict_all, "all rules"));
    else
      rep.expect("typable-implies-sn", tc.holds(), [&] { return verdict_example(t, tc.verdict_all, "all rules"); });

    for (const auto& red : labeled_reducts(t, RuleSet::all())) {
      try {
        InferenceResult rr = infer(red.term, io);
        rep.pass("reduct-typable");
      } catch (const InferencePrecondition& e) {
        rep.unknown("reduct-typable", term_example(t, "reduct " + print(red.term) + " via " +
                                                          to_string(red.redex) + ": " + e.what()));
      } catch (const std::exception& e) {
        rep.fail("reduct-typable",
                 term_example(t, "reduct " + print(red.term) + " via " + to_string(red.redex) + ": " + e.what()));
      }
    }
  });
}

inline SuiteReport verify_theoremD(const SuiteOptions& opt = {}) {
  return verify_theoremD(enumerate_union(opt.corpus), opt);
}

// ---------------------------------------------------------------------------
// Lemma suites: reduction commutes with substitution; η does not grow under
// anti-substitution; the head-reduct SN criterion; left-branch η-expansion.

inline SuiteReport verify_lemmas(const std::vector<Term>& corpus, const std::vector<Term>& pool,
                                 const SuiteOptions& opt = {}) {
  SuiteReport rep = run_suite("lemmas", corpus, opt, [&](const Term& t, std::size_t, SnCache& cache, SuiteReport& rep) {
    auto fv = free_vars(t);

    for (std::uint32_t x : fv) {
      for (const Term& u : pool) {
        Term tu = subst(t, x, u);
        for (Rule r : kAllRuleValues) {
          RuleSet rs = RuleSet{}.with(r);
          auto targets = one_step(tu, rs);
          std::unordered_set<Term, TermHash> target_set(targets.begin(), targets.end());
          for (const auto& red : labeled_reducts(t, rs)) {
            Term image = subst(red.term, x, u);
            rep.expect("subst-commutation", target_set.count(image) != 0, [&] {
              return term_example(t, "x=" + std::to_string(x) + " u=" + print(u) + " step " + to_string(red.redex) +
                                         ": " + print(image) + " is not a one-step reduct of " + print(tu));
            });
          }
        }

        // η(t) <= η(t[x:=u]) whenever the right-hand side is SN.
        for (RuleSet rs : {RuleSet::beta(), RuleSet::all()}) {
          std::string name = std::string("anti-substitution[") + (rs == RuleSet::beta() ? "beta" : "all") + "]";
          SnVerdict vu = escalated_verdict(tu, rs, opt, cache, rep);
          if (vu.unknown()) {
            rep.unknown(name, verdict_example(tu, vu, "t[x:=u]"));
            continue;
          }
          if (vu.not_sn()) {
            rep.count(name + " vacuous");
            continue;
          }
          SnVerdict vt = sn_verdict(t, rs, opt.budget, &cache);
          if (vt.unknown()) {
            rep.unknown(name, verdict_example(t, vt, "t"));
            continue;
          }
          rep.expect(name, vt.sn() && vt.eta <= vu.eta, [&] {
            return term_example(t, "u=" + print(u) + " x=" + std::to_string(x) + ": " + to_string(vt) + " vs " +
                                       to_string(vu));
          });
        }
      }
    }

    if (t.is_app()) {
      SnCriterionReport cs = cs_sn_hypotheses(t, opt.budget, &cache);
      if (cs.any_unknown()) {
        rep.unknown("head-reduct-criterion", term_example(t, "a hypothesis verdict is Unknown"));
      } else if (cs.all_hold()) {
        SnVerdict v = sn_verdict_staged(t, opt.budget, &cache);
        if (v.unknown())
          rep.unknown("head-reduct-criterion", verdict_example(t, v, "all rules"));
        else
          rep.expect("head-reduct-criterion", v.sn(), [&] { return verdict_example(t, v, "all rules"); });
      } else {
        rep.count("head-reduct hypotheses fail");
      }
    }

    SnVerdict va = sn_verdict_staged(t, opt.budget, &cache);
    if (va.unknown()) return rep.unknown("left-branch-eta-expansion", verdict_example(t, va, "all rules"));
    if (!va.sn()) return;
    for (const Path& p : left_branch_paths(t)) {
      Term e = left_branch_eta_expand(t, p);
      SnVerdict ve = sn_verdict(e, RuleSet::all(), opt.budget, &cache);
      if (ve.unknown())
        rep.unknown("left-branch-eta-expansion", verdict_example(e, ve, "expanded at " + path_to_string(p)));
      else
        rep.expect("left-branch-eta-expansion", ve.sn(), [&] { return verdict_example(e, ve, "expanded at " + path_to_string(p)); });
    }
  });
  rep.count("substitution pool size", pool.size());
  return rep;
}

inline SuiteReport verify_lemmas(const SuiteOptions& opt = {}) {
  auto pool = beta_sn_pool(opt.pool_max_size, opt.budget, opt.cache);
  return verify_lemmas(enumerate_union(opt.corpus), pool, opt);
}

}  // namespace permsn::harness
