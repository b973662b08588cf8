// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "permsn/term.hpp"

namespace permsn::harness {

struct CorpusSpec {
  std::size_t max_size = 7;
  std::size_t max_free_vars = 2;
  bool closed_only = false;

  std::size_t free_bound() const { return closed_only ? 0 : max_free_vars; }
};

// Exhaustive generator of index-form terms by exact size; results for each
// (size, free-index bound) are shared between requests.
class TermEnumerator {
 public:
  // All terms of exactly `size` nodes whose free indices are < free_bound.
  const std::vector<Term>& of_size(std::size_t size, std::uint32_t free_bound) {
    auto key = std::make_pair(size, free_bound);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Term> out;
    if (size == 1) {
      for (std::uint32_t k = 0; k < free_bound; ++k) out.push_back(Term::var(k));
    } else if (size >= 2) {
      for (const auto& b : of_size(size - 1, free_bound + 1)) out.push_back(Term::lam(b));
      for (std::size_t left = 1; left + 2 <= size; ++left) {
        std::size_t right = size - 1 - left;
        // Copy: the recursive calls may rehash memo_.
        std::vector<Term> funs = of_size(left, free_bound);
        const std::vector<Term>& args = of_size(right, free_bound);
        std::vector<Term> args_copy = args;
        for (const auto& f : funs)
          for (const auto& a : args_copy) out.push_back(Term::app(f, a));
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  std::map<std::pair<std::size_t, std::uint32_t>, std::vector<Term>> memo_;
};

// Every term with size <= max_size, by increasing size; within a size,
// variables, then abstractions, then applications.
inline std::vector<Term> enumerate(const CorpusSpec& spec) {
  if (spec.max_size < 1) throw std::invalid_argument("enumerate: max_size must be at least 1");
  TermEnumerator gen;
  std::vector<Term> out;
  auto bound = static_cast<std::uint32_t>(spec.free_bound());
  for (std::size_t n = 1; n <= spec.max_size; ++n) {
    const auto& level = gen.of_size(n, bound);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// Union of several enumerations, first occurrence wins.
inline std::vector<Term> enumerate_union(const std::vector<CorpusSpec>& specs) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  for (const auto& s : specs)
    for (auto& t : enumerate(s))
      if (seen.insert(t).second) out.push_back(std::move(t));
  return out;
}

// Closed terms of size <= 9 and terms with at most two free variables of
// size <= 7.
inline std::vector<CorpusSpec> default_corpus_specs() {
  return {CorpusSpec{9, 0, true}, CorpusSpec{7, 2, false}};
}

inline std::vector<Term> default_corpus() { return enumerate_union(default_corpus_specs()); }

}  // namespace permsn::harness
