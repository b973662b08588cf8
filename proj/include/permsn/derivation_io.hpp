// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// JSON encoding of derivations. A document is
//
//   { "free": ["a", "b"], "derivation": <node> }
//
// and every node is
//
//   { "rule": "ArrowI", "binder": "x",            // binder: ArrowI only
//     "context": { "a": "a0 -> a1" },
//     "term": "\\x. a x", "type": "...", "children": [ <node>, ... ] }
//
// Names are resolved against a scope: the document's free names at the root,
// with each ArrowI binder pushed for its premise.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "permsn/syntax.hpp"
#include "permsn/typesys.hpp"

namespace permsn {

namespace detail {

// scope[k] names index k.
using Scope = std::vector<std::string>;

inline std::string fresh_scope_name(const Scope& scope, std::size_t depth) {
  for (std::size_t k = depth;; ++k) {
    std::string cand = default_binder_name(k);
    bool taken = false;
    for (const auto& s : scope) taken = taken || s == cand;
    if (!taken) return cand;
  }
}

inline nlohmann::json encode_node(const Derivation& d, Scope& scope, std::size_t depth) {
  nlohmann::json j;
  j["rule"] = rule_tag_name(d.rule);
  nlohmann::json ctx = nlohmann::json::object();
  for (const auto& [k, t] : d.ctx) {
    if (k >= scope.size()) throw std::invalid_argument("encode: context index outside the naming scope");
    ctx[scope[k]] = print(t);
  }
  j["context"] = std::move(ctx);
  j["term"] = print(d.term, scope);
  j["type"] = print(d.type);
  nlohmann::json kids = nlohmann::json::array();
  if (d.rule == RuleTag::ArrowI) {
    std::string binder = fresh_scope_name(scope, depth);
    j["binder"] = binder;
    scope.insert(scope.begin(), binder);
    for (const auto& c : d.children) kids.push_back(encode_node(c, scope, depth + 1));
    scope.erase(scope.begin());
  } else {
    for (const auto& c : d.children) kids.push_back(encode_node(c, scope, depth));
  }
  j["children"] = std::move(kids);
  return j;
}

inline Derivation decode_node(const nlohmann::json& j, Scope& scope) {
  Derivation d;
  auto tag = rule_tag_from_name(j.at("rule").get<std::string>());
  if (!tag) throw std::invalid_argument("decode: unknown rule '" + j.at("rule").get<std::string>() + "'");
  d.rule = *tag;
  for (const auto& [name, type] : j.at("context").items()) {
    std::size_t k = 0;
    while (k < scope.size() && scope[k] != name) ++k;
    if (k == scope.size()) throw std::invalid_argument("decode: context names unknown variable '" + name + "'");
    d.ctx.emplace(static_cast<std::uint32_t>(k), parse_type(type.get<std::string>()));
  }
  Scope term_scope = scope;
  d.term = parse(j.at("term").get<std::string>(), term_scope);
  d.type = parse_type(j.at("type").get<std::string>());
  bool binds = d.rule == RuleTag::ArrowI;
  if (binds) scope.insert(scope.begin(), j.at("binder").get<std::string>());
  for (const auto& c : j.at("children")) d.children.push_back(decode_node(c, scope));
  if (binds) scope.erase(scope.begin());
  return d;
}

}  // namespace detail

inline nlohmann::json derivation_to_json(const Derivation& d, const FreeNames& free = {}) {
  detail::Scope scope = free;
  std::uint32_t needed = d.term.loose();
  for (const auto& [k, t] : d.ctx) needed = std::max(needed, k + 1);
  for (std::size_t k = scope.size(); k < needed; ++k) scope.push_back(default_free_name(k));
  nlohmann::json doc;
  doc["free"] = scope;
  doc["derivation"] = detail::encode_node(d, scope, 0);
  return doc;
}

inline Derivation derivation_from_json(const nlohmann::json& doc) {
  detail::Scope scope = doc.at("free").get<std::vector<std::string>>();
  return detail::decode_node(doc.at("derivation"), scope);
}

}  // namespace permsn
