// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "permsn/harness/cache_io.hpp"
#include "permsn/harness/corpus.hpp"
#include "permsn/sn.hpp"
#include "permsn/syntax.hpp"

using namespace permsn;

namespace {

Term T(const char* s) { return parse(s).term; }
struct Scope {
  FreeNames names;
  Term operator()(const char* s) { return parse(s, names); }
};

const Term kOmega = T("(\\x. x x) (\\x. x x)");

}  // namespace

TEST(SnVerdict, NormalForm) {
  auto v = sn_verdict(T("\\x. x"), RuleSet::beta());
  EXPECT_TRUE(v.sn());
  EXPECT_EQ(v.eta, 0u);
  EXPECT_EQ(v.graph_nodes, 1u);
}

TEST(SnVerdict, OmegaCyclesInOneStep) {
  auto v = sn_verdict(kOmega, RuleSet::beta());
  ASSERT_TRUE(v.not_sn());
  EXPECT_EQ(v.cycle_length(), 1u);
  ASSERT_EQ(v.witness.size(), 1u);
  EXPECT_EQ(to_string(v.witness[0]), "beta@e");
  EXPECT_FALSE(v.embedding);
  EXPECT_TRUE(replay_witness(kOmega, v));
}

TEST(SnVerdict, NestedIdentities) {
  auto v = sn_verdict(T("(\\x. x) ((\\y. y) z)"), RuleSet::beta());
  ASSERT_TRUE(v.sn());
  EXPECT_EQ(v.eta, 2u);
  EXPECT_EQ(v.graph_nodes, 3u);
}

TEST(SnVerdict, BudgetExhaustionIsUnknown) {
  auto v = sn_verdict(T("(\\x. x) ((\\y. y) z)"), RuleSet::beta(), 1);
  EXPECT_TRUE(v.unknown());
  EXPECT_EQ(v.budget_spent, 1u);
  EXPECT_THROW(sn_verdict(T("x"), RuleSet::beta(), 0), std::invalid_argument);
}

TEST(SnVerdict, GrowingDivergenceIsCertifiedByEmbedding) {
  // (\x.\y. x x)(\x.\y. x x) reduces to \y. (same term): no cycle, but the
  // start term reappears under a binder.
  Term t = T("(\\x. \\y. x x) (\\x. \\y. x x)");
  auto v = sn_verdict(t, RuleSet::beta());
  ASSERT_TRUE(v.not_sn()) << to_string(v);
  ASSERT_TRUE(v.embedding);
  EXPECT_TRUE(replay_witness(t, v));

  // Divergence inside an argument of a free variable.
  Term u = T("a ((\\x. \\y. x x) (\\x. \\y. x x))");
  auto w = sn_verdict(u, RuleSet::beta());
  ASSERT_TRUE(w.not_sn()) << to_string(w);
  EXPECT_TRUE(replay_witness(u, w));
  EXPECT_FALSE(w.anchor.empty());
}

TEST(SnVerdict, YCombinatorIsNotSn) {
  Term y = T("\\f. (\\x. f (x x)) (\\x. f (x x))");
  auto v = sn_verdict(y, RuleSet::beta());
  ASSERT_TRUE(v.not_sn()) << to_string(v);
  EXPECT_TRUE(replay_witness(y, v));
}

TEST(SnVerdict, ReplayRejectsTamperedWitness) {
  Term t = T("(\\x. \\y. x x) (\\x. \\y. x x)");
  auto v = sn_verdict(t, RuleSet::beta());
  ASSERT_TRUE(v.not_sn());
  auto bad = v;
  bad.embedding->push_back(Step::Fun);
  EXPECT_FALSE(replay_witness(t, bad));
  auto bad2 = sn_verdict(kOmega, RuleSet::beta());
  bad2.witness[0].rule = Rule::Delta;
  EXPECT_FALSE(replay_witness(kOmega, bad2));
  EXPECT_FALSE(replay_witness(T("x"), sn_verdict(T("x"), RuleSet::beta())));
}

TEST(Eta, Examples) {
  EXPECT_EQ(eta(T("y"), RuleSet::beta()), 0u);
  EXPECT_EQ(eta(T("y"), RuleSet::all()), 0u);
  EXPECT_EQ(eta(T("(\\x. x) y"), RuleSet::beta()), 1u);
  EXPECT_EQ(eta(T("(\\x. x x) (\\y. y)"), RuleSet::beta()), 2u);
  EXPECT_THROW(eta(kOmega, RuleSet::beta()), NotProvenSn);
}

TEST(Eta, MatchesNaiveRecursionOnCorpus) {
  SnCache cache;
  for (const auto& t : harness::enumerate({7, 2, false})) {
    for (RuleSet rs : {RuleSet::beta(), RuleSet::all()}) {
      auto v = sn_verdict(t, rs, 50'000, &cache);
      if (!v.sn()) continue;
      ASSERT_EQ(v.eta, oracle::naive_eta(t, rs)) << print(t) << " " << rs.to_string();
    }
  }
}

TEST(Eta, CacheDoesNotChangeResults) {
  SnCache cache;
  for (const auto& t : harness::enumerate({8, 0, true})) {
    auto cold = sn_verdict(t, RuleSet::all());
    auto warm = sn_verdict(t, RuleSet::all(), 50'000, &cache);
    auto hot = sn_verdict(t, RuleSet::all(), 50'000, &cache);
    ASSERT_TRUE(same_outcome(cold, warm)) << print(t);
    ASSERT_TRUE(same_outcome(cold, hot)) << print(t);
  }
}

TEST(EtaSigma, Examples) {
  Scope s;
  Term xx = s("x x");
  Term xy = s("x y");
  Substitution a{{{0, s("(\\z. z) w")}}};
  EXPECT_EQ(eta_sigma(a, xx, RuleSet::beta()), 2u);
  Substitution b{{{0, s("w")}, {1, s("\\z. z")}}};
  EXPECT_EQ(eta_sigma(b, xy, RuleSet::beta()), 0u);
  Substitution c{{{0, s("(\\z. z) w")}, {1, s("w")}}};
  EXPECT_EQ(eta_sigma(c, xy, RuleSet::beta()), 1u);
}

TEST(Measure, Components) {
  Scope s;
  Measure m = measure_main(Substitution{}, 7, s("y"));
  EXPECT_EQ(m, (Measure{7, 0, 1, 0, 0}));
  Scope s2;
  Term xx = s2("x x");
  Substitution sig{{{0, s2("\\z. z")}}};
  Measure m2 = measure_main(sig, 3, xx);
  EXPECT_EQ(m2, (Measure{3, eta(xx, RuleSet::all()), 3, 0, 4}));
  EXPECT_LT((Measure{2, 9, 9, 9, 9}), (Measure{3, 0, 0, 0, 0}));
}

TEST(SnCriterion, VacuousForVariableHead) {
  Term t = T("x y");
  auto r = cs_sn_hypotheses(t);
  EXPECT_TRUE(r.all_hold());
  EXPECT_FALSE(r.any_unknown());
  EXPECT_TRUE(sn_verdict(t, RuleSet::all()).sn());
}

TEST(SnCriterion, BetaHead) {
  Term t = T("(\\x. x) y");
  auto r = cs_sn_hypotheses(t);
  ASSERT_TRUE(r.arg_verdict && r.b_verdict);
  EXPECT_TRUE(r.arg_verdict->sn());
  EXPECT_TRUE(r.b_verdict->sn());
  EXPECT_TRUE(r.all_hold());
  EXPECT_TRUE(sn_verdict(t, RuleSet::all()).sn());
}

TEST(SnCriterion, DivergentRedexArgumentBreaksConjunction) {
  Scope s;
  Term t = s("h ((\\x. x x) (\\x. x x))");
  auto r = cs_sn_hypotheses(t);
  ASSERT_EQ(r.a_verdicts.size(), 1u);
  EXPECT_TRUE(r.a_verdicts[0].second.not_sn());
  EXPECT_FALSE(r.all_hold());
}

TEST(SnCriterion, ComponentsMustBeSn) {
  // Without the component hypothesis the criterion would hold vacuously on
  // x (\y. Omega), which is not SN.
  Term t = T("x (\\y. (\\z. z z) (\\z. z z))");
  auto r = cs_sn_hypotheses(t);
  EXPECT_TRUE(r.head_hypothesis);
  EXPECT_TRUE(r.redex_hypothesis);
  EXPECT_FALSE(r.components_sn);
  EXPECT_FALSE(r.all_hold());
  EXPECT_TRUE(sn_verdict(t, RuleSet::all()).not_sn());
}

TEST(SnCriterion, RequiresApplication) { EXPECT_THROW(cs_sn_hypotheses(T("\\x. x")), std::invalid_argument); }

TEST(LeftBranch, EtaExpansionAtRootAndBelow) {
  Scope s;
  EXPECT_EQ(left_branch_eta_expand(s("y"), {}), s("\\x. y x"));
  EXPECT_EQ(left_branch_eta_expand(s("f a b"), {Step::Fun}), s("(\\x. f a x) b"));
  EXPECT_EQ(left_branch_eta_expand(s("f a b"), {Step::Fun, Step::Fun}), s("(\\x. f x) a b"));
  EXPECT_THROW(left_branch_eta_expand(s("f a b"), {Step::Arg}), LeftBranchError);
  EXPECT_THROW(left_branch_eta_expand(s("f a b"), {Step::Fun, Step::Fun, Step::Fun}), LeftBranchError);
  EXPECT_EQ(left_branch_paths(s("f a b")).size(), 3u);
}

TEST(LeftBranch, ExpansionPreservesSn) {
  for (const auto& t : harness::enumerate({6, 1, false})) {
    auto v = sn_verdict(t, RuleSet::all());
    if (!v.sn()) continue;
    for (const auto& p : left_branch_paths(t))
      EXPECT_TRUE(sn_verdict(left_branch_eta_expand(t, p), RuleSet::all()).sn()) << print(t) << " at " << path_to_string(p);
  }
}

TEST(Property, AntiSubstitutionDoesNotIncreaseEta) {
  Scope s;
  Term t = s("x x");
  Term u = T("\\z. z");
  EXPECT_EQ(eta(t, RuleSet::beta()), 0u);
  EXPECT_EQ(eta(subst(t, 0, u), RuleSet::beta()), 1u);
  for (const auto& t2 : harness::enumerate({6, 1, false})) {
    if (!occurs_free(t2, 0)) continue;
    for (const char* us : {"\\z. z", "\\z. z z", "\\z. \\w. w"}) {
      Term img = subst(t2, 0, T(us));
      auto vi = sn_verdict(img, RuleSet::beta());
      if (!vi.sn()) continue;
      auto vt = sn_verdict(t2, RuleSet::beta());
      ASSERT_TRUE(vt.sn());
      EXPECT_LE(vt.eta, vi.eta) << print(t2) << " [" << us << "]";
    }
  }
}

TEST(Property, EtaMonotoneInRuleSet) {
  for (const auto& t : harness::enumerate({8, 0, true})) {
    auto b = sn_verdict(t, RuleSet::beta());
    auto a = sn_verdict(t, RuleSet::all());
    if (b.sn() && a.sn()) EXPECT_LE(b.eta, a.eta) << print(t);
  }
}

TEST(Cache, AgreementAndMerge) {
  SnCache a, b;
  Term t = T("(\\x. x) y");
  EXPECT_TRUE(a.store(t, RuleSet::beta(), SnCache::Entry{SnTag::Sn, 1}));
  EXPECT_TRUE(a.store(t, RuleSet::beta(), SnCache::Entry{SnTag::Sn, 1}));
  EXPECT_FALSE(a.store(t, RuleSet::beta(), SnCache::Entry{SnTag::Sn, 2}));
  EXPECT_TRUE(a.store(t, RuleSet::beta(), SnVerdict::exhausted(10)));  // ignored
  EXPECT_EQ(a.size(), 1u);
  b.store(t, RuleSet::beta(), SnCache::Entry{SnTag::Sn, 3});
  b.store(t, RuleSet::all(), SnCache::Entry{SnTag::Sn, 2});
  EXPECT_EQ(a.merge(b), 1u);
  EXPECT_EQ(a.size(), 2u);
}

TEST(Cache, FileRoundTrip) {
  SnCache cache;
  for (const auto& t : harness::enumerate({6, 1, false})) {
    sn_verdict(t, RuleSet::beta(), 50'000, &cache);
    sn_verdict(t, RuleSet::all(), 50'000, &cache);
  }
  std::stringstream buf;
  harness::write_cache(cache, buf);
  SnCache back;
  EXPECT_EQ(harness::read_cache(back, buf), cache.size());
  EXPECT_EQ(back.size(), cache.size());
  EXPECT_EQ(back.merge(cache), 0u);

  std::stringstream line;
  line << "(\\x. x) a\tbeta\tSN\t1\n";
  SnCache one;
  harness::read_cache(one, line);
  auto e = one.find(parse_canonical("(\\x. x) a"), RuleSet::beta());
  ASSERT_TRUE(e);
  EXPECT_EQ(e->value, 1u);
}

TEST(Cache, FileFormat) {
  SnCache cache;
  sn_verdict(T("(\\x. x) b"), RuleSet::all(), 50'000, &cache);
  sn_verdict(kOmega, RuleSet::beta(), 50'000, &cache);
  std::stringstream buf;
  harness::write_cache(cache, buf);
  std::string text = buf.str();
  EXPECT_NE(text.find("(\\x. x) a\tassoc,beta,delta,gamma\tSN\t1\n"), std::string::npos) << text;
  EXPECT_EQ(text.find("UNKNOWN"), std::string::npos);
}

TEST(Cache, MalformedFilesAreRejected) {
  for (const char* bad : {"x\tbeta\tSN\n", "x\tbeta\tMAYBE\t0\n", "x\tzeta\tSN\t0\n", "(x\tbeta\tSN\t0\n"}) {
    std::stringstream in(bad);
    SnCache c;
    EXPECT_ANY_THROW(harness::read_cache(c, in)) << bad;
  }
  std::stringstream conflict("a\tbeta\tSN\t0\na\tbeta\tSN\t1\n");
  SnCache c;
  EXPECT_THROW(harness::read_cache(c, conflict), std::runtime_error);
}
