// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

// permsn: command-line front end for the reduction engine, the SN checker,
// type inference and the verification suites.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "permsn/derivation_io.hpp"
#include "permsn/harness/cache_io.hpp"
#include "permsn/harness/corpus.hpp"
#include "permsn/harness/graph_export.hpp"
#include "permsn/harness/suites.hpp"
#include "permsn/infer.hpp"
#include "permsn/reduction.hpp"
#include "permsn/sn.hpp"
#include "permsn/syntax.hpp"

using namespace permsn;

namespace {

struct Globals {
  std::string rules = "all";
  std::size_t budget = 50'000;
  std::optional<std::size_t> max_size;
  std::optional<std::size_t> free_vars;
  std::string cache;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

// Loaded lazily and written back on exit by the commands that use it.
class CacheSession {
 public:
  explicit CacheSession(const std::string& flag) : path_(harness::resolve_cache_path(flag)) {
    if (!path_.empty()) harness::load_cache(cache_, path_);
  }
  SnCache* get() { return &cache_; }
  void save() {
    if (!path_.empty()) harness::save_cache(cache_, path_);
  }

 private:
  std::string path_;
  SnCache cache_;
};

std::string index_form(const Term& t) {
  switch (t.kind()) {
    case Kind::Var: return std::to_string(t.index());
    case Kind::Lam: return "λ." + index_form(t.body());
    case Kind::App: {
      std::string f = t.fun().is_lam() ? "(" + index_form(t.fun()) + ")" : index_form(t.fun());
      std::string a = t.arg().is_var() ? index_form(t.arg()) : "(" + index_form(t.arg()) + ")";
      return f + " " + a;
    }
  }
  return "?";
}

std::string context_text(const Context& ctx, const FreeNames& names) {
  std::string s;
  for (const auto& [k, ty] : ctx) {
    if (!s.empty()) s += ", ";
    s += (k < names.size() ? names[k] : default_free_name(k)) + " : " + print(ty);
  }
  return s;
}

void print_trace(std::ostream& out, const Term& t, const std::vector<RedexOccurrence>& steps, const FreeNames& names) {
  Term cur = t;
  out << "0\t-\t-\t" << print(cur, names) << "\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    cur = apply(cur, steps[i]);
    out << i + 1 << "\t" << rule_name(steps[i].rule) << "\t" << path_to_string(steps[i].path) << "\t"
        << print(cur, names) << "\n";
  }
}

harness::SuiteOptions suite_options(const Globals& g, SnCache* cache) {
  harness::SuiteOptions o;
  if (g.max_size || g.free_vars) {
    std::size_t fv = g.free_vars.value_or(0);
    o.corpus = {harness::CorpusSpec{g.max_size.value_or(7), fv, fv == 0}};
  }
  o.budget = g.budget;
  o.jobs = g.jobs;
  o.cache = cache;
  o.seed = g.seed;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permsn: permutative reductions, strong normalization and intersection types"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--rules", g.rules, "Rule set: comma list of beta,delta,gamma,assoc or 'all'")->capture_default_str();
  app.add_option("--budget", g.budget, "Node budget per SN exploration")->capture_default_str();
  app.add_option("--max-size", g.max_size, "Largest term size to enumerate");
  app.add_option("--free-vars", g.free_vars, "Number of free variables allowed in enumerated terms");
  app.add_option("--cache", g.cache, "SN cache file (default: $PERMSN_CACHE_DIR/sn-cache.tsv when set)");
  app.add_option("--jobs", g.jobs, "Worker threads for the verification suites")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for sampled choices (derivation corruption)")->capture_default_str();

  std::string term_text;
  auto add_term = [&](CLI::App* sub) { sub->add_option("term", term_text, "Term, e.g. '\\x. x y'")->required(); };

  auto* cmd_parse = app.add_subcommand("parse", "Parse a term and show its index form");
  add_term(cmd_parse);

  std::string at_text, rule_text;
  auto* cmd_reduce = app.add_subcommand("reduce", "List one-step reducts, or contract the redex at --at");
  add_term(cmd_reduce);
  cmd_reduce->add_option("--at", at_text, "Redex position: letters f (function), a (argument), b (body); e = root");
  cmd_reduce->add_option("--rule", rule_text, "Rule to contract at --at (default: first matching rule in --rules)");

  std::string strategy = "lo";
  std::size_t fuel = 10'000;
  auto* cmd_normalize = app.add_subcommand("normalize", "Reduce to normal form with a fixed strategy");
  auto* cmd_trace = app.add_subcommand("trace", "Like normalize, printing every step");
  for (auto* sub : {cmd_normalize, cmd_trace}) {
    add_term(sub);
    sub->add_option("--strategy", strategy, "lo (leftmost-outermost) or ri (rightmost-innermost)")
        ->check(CLI::IsMember({"lo", "ri"}))
        ->capture_default_str();
    sub->add_option("--fuel", fuel, "Maximum number of steps")->capture_default_str();
  }

  auto* cmd_sn = app.add_subcommand("sn", "Decide strong normalization by exhaustive search");
  add_term(cmd_sn);
  auto* cmd_eta = app.add_subcommand("eta", "Length of the longest reduction");
  add_term(cmd_eta);

  std::string emit_file;
  auto* cmd_infer = app.add_subcommand("infer", "Infer a system D typing for a beta-SN term");
  add_term(cmd_infer);
  cmd_infer->add_option("--emit-derivation", emit_file, "Write the derivation as JSON");

  std::string check_file;
  auto* cmd_check = app.add_subcommand("check", "Validate a JSON derivation");
  cmd_check->add_option("file", check_file, "Derivation file")->required()->check(CLI::ExistingFile);

  std::string format = "dot", out_file;
  auto* cmd_graph = app.add_subcommand("graph", "Export the reduct graph");
  add_term(cmd_graph);
  cmd_graph->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}))->capture_default_str();
  cmd_graph->add_option("-o,--output", out_file, "Output file (default: stdout)");

  bool count_only = false, show_index = false;
  auto* cmd_enum = app.add_subcommand("enumerate", "Enumerate all terms within --max-size and --free-vars");
  cmd_enum->add_flag("--count", count_only, "Print only per-size counts");
  cmd_enum->add_flag("--index", show_index, "Print index form next to each term");

  std::string suite;
  std::size_t max_examples = 20;
  auto* cmd_verify = app.add_subcommand("verify", "Run verification suites over the corpus");
  cmd_verify->add_option("suite", suite, "theorem1, theoremD, lemmas or all")
      ->required()
      ->check(CLI::IsMember({"theorem1", "theoremD", "lemmas", "all"}));
  cmd_verify->add_option("--examples", max_examples, "Counterexamples to print per suite")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RuleSet rules = RuleSet::parse(g.rules);

    if (cmd_check->parsed()) {
      std::ifstream in(check_file);
      Derivation d = derivation_from_json(nlohmann::json::parse(in));
      CheckResult r = check(d);
      if (r) {
        std::cout << "valid: " << d.node_count() << " nodes\n";
        return 0;
      }
      std::string where;
      for (auto k : r.at) where += (where.empty() ? "" : ".") + std::to_string(k);
      std::cout << "invalid at node [" << where << "]: " << r.reason << "\n";
      return 1;
    }

    if (cmd_enum->parsed()) {
      std::size_t fv = g.free_vars.value_or(0);
      harness::CorpusSpec spec{g.max_size.value_or(4), fv, fv == 0};
      auto terms = harness::enumerate(spec);
      if (count_only) {
        std::vector<std::size_t> per(spec.max_size + 1, 0);
        for (const auto& t : terms) ++per[t.size()];
        std::size_t total = 0;
        for (std::size_t n = 1; n <= spec.max_size; ++n) {
          total += per[n];
          std::cout << "size " << n << ": " << per[n] << " (cumulative " << total << ")\n";
        }
      } else {
        for (const auto& t : terms) std::cout << print(t) << (show_index ? "\t" + index_form(t) : "") << "\n";
      }
      return 0;
    }

    if (cmd_verify->parsed()) {
      CacheSession cache(g.cache);
      auto opt = suite_options(g, cache.get());
      std::vector<Term> corpus = harness::enumerate_union(opt.corpus);
      bool ok = true;
      auto run = [&](const std::string& name) {
        harness::SuiteReport r;
        if (name == "theorem1")
          r = harness::verify_theorem1(corpus, opt);
        else if (name == "theoremD")
          r = harness::verify_theoremD(corpus, opt);
        else
          r = harness::verify_lemmas(corpus, harness::beta_sn_pool(opt.pool_max_size, opt.budget, opt.cache), opt);
        std::cout << r.text(max_examples) << std::flush;
        ok = ok && r.ok();
      };
      if (suite == "all")
        for (const char* s : {"theorem1", "theoremD", "lemmas"}) run(s);
      else
        run(suite);
      cache.save();
      return ok ? 0 : 1;
    }

    ParsedTerm pt = parse(term_text);
    const Term& t = pt.term;
    const FreeNames& names = pt.free_names;

    if (cmd_parse->parsed()) {
      std::cout << "term:  " << print(t, names) << "\n";
      std::cout << "index: " << index_form(t) << "\n";
      std::cout << "size:  " << t.size() << "\n";
      std::cout << "free:  ";
      for (std::size_t k = 0; k < names.size(); ++k) std::cout << (k ? " " : "") << names[k] << "=" << k;
      std::cout << "\n";
      return 0;
    }

    if (cmd_reduce->parsed()) {
      if (at_text.empty()) {
        for (const auto& r : labeled_reducts(t, rules))
          std::cout << to_string(r.redex) << "\t" << print(r.term, names) << "\n";
        return 0;
      }
      Path p = path_from_string(at_text);
      std::optional<Rule> chosen;
      if (!rule_text.empty()) {
        chosen = rule_from_name(rule_text);
        if (!chosen) throw std::invalid_argument("unknown rule '" + rule_text + "'");
      } else {
        Term sub = subterm_at(t, p);
        for (Rule r : kAllRuleValues)
          if (rules.contains(r) && matches(r, sub)) {
            chosen = r;
            break;
          }
        if (!chosen) throw std::invalid_argument("no redex of the selected rules at " + path_to_string(p));
      }
      RedexOccurrence occ{p, *chosen};
      std::cout << to_string(occ) << "\t" << print(apply(t, occ), names) << "\n";
      return 0;
    }

    if (cmd_normalize->parsed() || cmd_trace->parsed()) {
      Strategy s = strategy == "lo" ? Strategy::LeftmostOutermost : Strategy::RightmostInnermost;
      NormalizeResult r = normalize(t, rules, s, fuel, cmd_trace->parsed());
      if (cmd_trace->parsed()) {
        std::vector<RedexOccurrence> steps;
        for (const auto& st : r.trace) steps.push_back(st.redex);
        print_trace(std::cout, t, steps, names);
      } else {
        std::cout << print(r.term, names) << "\n";
      }
      std::cerr << (r.normal_form ? "normal form" : "fuel exhausted") << " after " << r.steps << " step(s)\n";
      return r.normal_form ? 0 : 1;
    }

    if (cmd_sn->parsed() || cmd_eta->parsed()) {
      CacheSession cache(g.cache);
      SnVerdict v = sn_verdict(t, rules, g.budget, cache.get());
      cache.save();
      if (cmd_eta->parsed()) {
        if (!v.sn()) {
          std::cerr << "not proven SN: " << to_string(v) << "\n";
          return 1;
        }
        std::cout << v.eta << "\n";
        return 0;
      }
      std::cout << to_string(v) << "\n";
      if (v.not_sn()) print_trace(std::cout, t, v.witness, names);
      return v.unknown() ? 1 : 0;
    }

    if (cmd_infer->parsed()) {
      CacheSession cache(g.cache);
      InferenceResult r = infer(t, InferOptions{g.budget, cache.get()});
      cache.save();
      std::cout << context_text(r.ctx, names) << " ⊢ " << print(t, names) << " : " << print(r.type) << "\n";
      if (!emit_file.empty()) {
        std::ofstream out(emit_file);
        if (!out) throw std::runtime_error("cannot write " + emit_file);
        out << derivation_to_json(r.derivation, names).dump(2) << "\n";
      }
      return 0;
    }

    if (cmd_graph->parsed()) {
      std::string doc = harness::export_graph(t, rules, g.budget,
                                              format == "dot" ? harness::GraphFormat::Dot : harness::GraphFormat::Json,
                                              names);
      if (out_file.empty()) {
        std::cout << doc;
      } else {
        std::ofstream out(out_file);
        if (!out) throw std::runtime_error("cannot write " + out_file);
        out << doc;
      }
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
