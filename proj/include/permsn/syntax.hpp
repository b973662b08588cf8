// Copyright (c) 2026, permsn authors
// Licensed under the Apache License Version 2.0.

#pragma once

// Concrete syntax for terms:
//
//   term  ::= lam | app
//   lam   ::= ("\" | "λ") ident "." term
//   app   ::= atom atom*                 (left associative)
//   atom  ::= ident | "(" term ")"
//   ident ::= [a-zA-Z][a-zA-Z0-9_']*

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "permsn/term.hpp"

namespace permsn {

// Names of the free variables of a term: names[j] is free variable j.
using FreeNames = std::vector<std::string>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at offset " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct ParsedTerm {
  Term term;
  FreeNames free_names;
};

// Free variable j prints as a, b, ..., t, then a1, b1, ...; binders use x, y,
// z, w, u, v, x1, ... The two pools never overlap.
inline std::string default_free_name(std::size_t j) {
  constexpr std::string_view letters = "abcdefghijklmnopqrst";
  std::string s(1, letters[j % letters.size()]);
  if (j >= letters.size()) s += std::to_string(j / letters.size());
  return s;
}

inline std::string default_binder_name(std::size_t j) {
  constexpr std::string_view letters = "xyzwuv";
  std::string s(1, letters[j % letters.size()]);
  if (j >= letters.size()) s += std::to_string(j / letters.size());
  return s;
}

inline FreeNames default_free_names(std::size_t n) {
  FreeNames names;
  for (std::size_t j = 0; j < n; ++j) names.push_back(default_free_name(j));
  return names;
}

namespace detail {

class TermParser {
 public:
  TermParser(std::string_view text, FreeNames& free) : text_(text), free_(free) {}

  Term parse_all() {
    Term t = term();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_lambda() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '\\') return true;
    return text_.substr(pos_, 2) == "\xCE\xBB";
  }

  bool at_atom_start() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return c == '(' || std::isalpha(static_cast<unsigned char>(c));
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected identifier");
    ++pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')
        ++pos_;
      else
        break;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Term term() {
    if (at_lambda()) {
      pos_ += text_[pos_] == '\\' ? 1 : 2;
      std::string name = ident();
      expect('.');
      bound_.push_back(name);
      Term body = term();
      bound_.pop_back();
      return Term::lam(body);
    }
    if (!at_atom_start()) fail("expected term");
    Term t = atom();
    while (at_atom_start()) t = Term::app(t, atom());
    return t;
  }

  Term atom() {
    skip_ws();
    if (text_[pos_] == '(') {
      ++pos_;
      Term t = term();
      expect(')');
      return t;
    }
    return variable(ident());
  }

  Term variable(const std::string& name) {
    for (std::size_t i = bound_.size(); i-- > 0;)
      if (bound_[i] == name) return Term::var(static_cast<std::uint32_t>(bound_.size() - 1 - i));
    std::size_t j = 0;
    while (j < free_.size() && free_[j] != name) ++j;
    if (j == free_.size()) free_.push_back(name);
    return Term::var(static_cast<std::uint32_t>(bound_.size() + j));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  FreeNames& free_;
  std::vector<std::string> bound_;
};

class TermPrinter {
 public:
  explicit TermPrinter(const FreeNames& free) : free_(free) {
    for (const auto& n : free_) taken_.insert(n);
  }

  std::string run(const Term& t) {
    out_.clear();
    term(t);
    return out_;
  }

 private:
  std::string free_name(std::size_t j) const {
    return j < free_.size() ? free_[j] : default_free_name(j);
  }

  std::string fresh_binder() {
    for (std::size_t k = bound_.size();; ++k) {
      std::string cand = default_binder_name(k);
      if (taken_.count(cand)) continue;
      bool shadow = false;
      for (const auto& b : bound_) shadow = shadow || b == cand;
      if (!shadow) return cand;
    }
  }

  void term(const Term& t) {
    if (t.is_lam()) {
      std::string name = fresh_binder();
      out_ += "\\" + name + ". ";
      bound_.push_back(name);
      term(t.body());
      bound_.pop_back();
      return;
    }
    app(t);
  }

  void app(const Term& t) {
    if (t.is_app()) {
      app(t.fun());
      out_ += ' ';
      atom(t.arg());
      return;
    }
    atom(t);
  }

  void atom(const Term& t) {
    if (t.is_var()) {
      std::uint32_t k = t.index();
      if (k < bound_.size())
        out_ += bound_[bound_.size() - 1 - k];
      else
        out_ += free_name(k - bound_.size());
      return;
    }
    out_ += '(';
    term(t);
    out_ += ')';
  }

  const FreeNames& free_;
  std::unordered_set<std::string> taken_;
  std::vector<std::string> bound_;
  std::string out_;
};

}  // namespace detail

// Free identifiers already in `free` keep their index; new ones are appended
// in order of first occurrence.
inline Term parse(std::string_view text, FreeNames& free) { return detail::TermParser(text, free).parse_all(); }

inline ParsedTerm parse(std::string_view text) {
  ParsedTerm r;
  r.term = parse(text, r.free_names);
  return r;
}

// parse(print(t, names), names) == t when names covers every free variable of
// t; with the default names, parse_canonical(print(t)) == t.
inline std::string print(const Term& t, const FreeNames& free = {}) { return detail::TermPrinter(free).run(t); }

// Text form used in caches and reports: default names for free variables.
inline std::string canonical_text(const Term& t) { return print(t); }

// Inverse of default_free_name; -1 when the name is not in the free pool.
inline long default_free_index(std::string_view name) {
  constexpr std::string_view letters = "abcdefghijklmnopqrst";
  if (name.empty()) return -1;
  auto pos = letters.find(name[0]);
  if (pos == std::string_view::npos) return -1;
  if (name.size() == 1) return static_cast<long>(pos);
  long k = 0;
  for (char c : name.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
    k = k * 10 + (c - '0');
  }
  if (k == 0 || name[1] == '0') return -1;
  return k * static_cast<long>(letters.size()) + static_cast<long>(pos);
}

// Parses canonical_text output: default-named free variables keep the index
// their name encodes.
inline Term parse_canonical(std::string_view text) {
  long needed = 0;
  for (std::size_t i = 0; i < text.size();) {
    if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '\''))
      ++j;
    needed = std::max(needed, default_free_index(text.substr(i, j - i)) + 1);
    i = j;
  }
  FreeNames names = default_free_names(static_cast<std::size_t>(needed));
  return parse(text, names);
}

}  // namespace permsn
