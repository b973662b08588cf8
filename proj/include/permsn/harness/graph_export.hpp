// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

#include <cstddef>
#include <deque>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "permsn/reduction.hpp"
#include "permsn/syntax.hpp"

namespace permsn::harness {

struct ReductGraph {
  struct Edge {
    std::size_t from;
    std::size_t to;
    RedexOccurrence redex;
  };
  std::vector<Term> nodes;  // nodes[0] is the start term
  std::vector<Edge> edges;
  bool complete = true;     // false when the budget cut the exploration short
  std::size_t budget = 0;
  RuleSet rules;
};

// Breadth-first closure of the one-step relation; one edge per redex.
inline ReductGraph reduct_graph(const Term& t, RuleSet rules, std::size_t budget) {
  ReductGraph g;
  g.budget = budget;
  g.rules = rules;
  std::unordered_map<Term, std::size_t, TermHash> ids;
  std::deque<std::size_t> queue;
  ids.emplace(t, 0);
  g.nodes.push_back(t);
  queue.push_back(0);
  std::size_t expanded = 0;
  while (!queue.empty()) {
    if (expanded == budget) {
      g.complete = false;
      break;
    }
    std::size_t id = queue.front();
    queue.pop_front();
    ++expanded;
    for (auto& r : labeled_reducts(g.nodes[id], rules)) {
      auto [it, inserted] = ids.emplace(r.term, g.nodes.size());
      if (inserted) {
        g.nodes.push_back(r.term);
        queue.push_back(it->second);
      }
      g.edges.push_back({id, it->second, std::move(r.redex)});
    }
  }
  return g;
}

namespace detail {
inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}
}  // namespace detail

inline std::string to_dot(const ReductGraph& g, const FreeNames& names = {}) {
  std::ostringstream out;
  out << "digraph reducts {\n";
  out << "  label=\"rules=" << g.rules.to_string() << " budget=" << g.budget
      << (g.complete ? " complete" : " truncated") << "\";\n";
  out << "  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    out << "  n" << i << " [label=\"" << detail::dot_escape(print(g.nodes[i], names)) << "\""
        << (i == 0 ? ", style=bold" : "") << "];\n";
  for (const auto& e : g.edges)
    out << "  n" << e.from << " -> n" << e.to << " [label=\"" << to_string(e.redex) << "\"];\n";
  out << "}\n";
  return out.str();
}

inline nlohmann::json to_json(const ReductGraph& g, const FreeNames& names = {}) {
  nlohmann::json j;
  j["rules"] = g.rules.to_string();
  j["budget"] = g.budget;
  j["complete"] = g.complete;
  j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    j["nodes"].push_back({{"id", i}, {"term", print(g.nodes[i], names)}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"from", e.from},
                          {"to", e.to},
                          {"rule", rule_name(e.redex.rule)},
                          {"path", path_to_string(e.redex.path)}});
  return j;
}

enum class GraphFormat { Dot, Json };

inline std::string export_graph(const Term& t, RuleSet rules, std::size_t budget, GraphFormat format,
                                const FreeNames& names = {}) {
  ReductGraph g = reduct_graph(t, rules, budget);
  return format == GraphFormat::Dot ? to_dot(g, names) : to_json(g, names).dump(2) + "\n";
}

}  // namespace permsn::harness
