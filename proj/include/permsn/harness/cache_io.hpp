// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// SN cache file: one record per line, tab separated
//
//   <canonical term text> \t <rules, sorted comma list> \t SN|NOTSN \t <eta or cycle length>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "permsn/reduction.hpp"
#include "permsn/sn.hpp"
#include "permsn/syntax.hpp"

namespace permsn::harness {

inline constexpr const char* kCacheDirEnv = "PERMSN_CACHE_DIR";

inline std::string sorted_rule_list(RuleSet rules) {
  std::vector<std::string> names;
  for (Rule r : kAllRuleValues)
    if (rules.contains(r)) names.emplace_back(rule_name(r));
  std::sort(names.begin(), names.end());
  std::string s;
  for (const auto& n : names) {
    if (!s.empty()) s += ',';
    s += n;
  }
  return s;
}

// --cache wins; otherwise $PERMSN_CACHE_DIR/sn-cache.tsv when the variable is set.
inline std::string resolve_cache_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* dir = std::getenv(kCacheDirEnv); dir && *dir)
    return (std::filesystem::path(dir) / "sn-cache.tsv").string();
  return {};
}

inline void write_cache(const SnCache& cache, std::ostream& out) {
  std::vector<std::string> lines;
  cache.for_each([&](const Term& t, RuleSet rules, const SnCache::Entry& e) {
    lines.push_back(canonical_text(t) + '\t' + sorted_rule_list(rules) + '\t' + sn_tag_name(e.tag) + '\t' +
                    std::to_string(e.value));
  });
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out << l << '\n';
}

inline void save_cache(const SnCache& cache, const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file " + path);
  write_cache(cache, out);
}

// Returns the number of records read; throws on malformed lines or on
// records that disagree with entries already present.
inline std::size_t read_cache(SnCache& cache, std::istream& in) {
  std::string line;
  std::size_t n = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (fields.size() != 4) throw std::runtime_error("cache line " + std::to_string(lineno) + ": expected 4 fields");
    Term t = parse_canonical(fields[0]);
    RuleSet rules = RuleSet::parse(fields[1]);
    SnTag tag;
    if (fields[2] == "SN")
      tag = SnTag::Sn;
    else if (fields[2] == "NOTSN")
      tag = SnTag::NotSn;
    else
      throw std::runtime_error("cache line " + std::to_string(lineno) + ": bad verdict tag '" + fields[2] + "'");
    std::size_t value = std::stoul(fields[3]);
    if (!cache.store(t, rules, SnCache::Entry{tag, value}))
      throw std::runtime_error("cache line " + std::to_string(lineno) + ": conflicts with an existing entry");
    ++n;
  }
  return n;
}

inline std::size_t load_cache(SnCache& cache, const std::string& path) {
  std::ifstream in(path);
  if (!in) return 0;
  return read_cache(cache, in);
}

}  // namespace permsn::harness
