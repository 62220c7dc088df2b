#pragma once

// Text <-> Expr. Input is UTF-8 Unicode mathematical notation with optional
// LaTeX-like escapes; output is the canonical printed form, which is also
// the persistence format for formulas.
//
// Precedence, loosest to tightest:
//   ⇔ (non-assoc)  ⇒ (right)  ∨ (left)  ∧ (left)  ¬  = ∈ ⊆ (non-assoc)
//   ∪ (left)  ∩ (left)  ⋃ 𝒫  atoms
// Quantifier bodies extend as far right as possible.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deduce/expr.hpp"

namespace deduce {

class ShorthandTable {
 public:
  static const ShorthandTable& standard();

  // Throws std::invalid_argument if the escape is already present.
  void add(std::string escape, std::string symbol);
  const std::map<std::string, std::string, std::less<>>& entries() const {
    return entries_;
  }
  // Escape for a symbol, preferring the first registered one.
  std::optional<std::string> escape_for(std::string_view symbol) const;

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  std::vector<std::pair<std::string, std::string>> order_;
};

// Replaces every maximal escape (backslash plus its run of ASCII letters, or
// a literal table key such as \mathcal{P}) that appears in the table.
// Unknown escapes are left untouched.
std::string expand_shorthands(std::string_view input,
                              const ShorthandTable& table = ShorthandTable::standard());

// Canonical composition (NFC) of a UTF-8 string.
std::string nfc_normalize(std::string_view input);

enum class TokenKind { Symbol, Identifier, Punct, HoleMark };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t begin = 0;  // byte offsets into the normalized input
  std::size_t end = 0;
};

// Tokenizes NFC-normalized text. Throws ParseError on unknown characters.
std::vector<Token> tokenize(std::string_view normalized, const Signature& sig);

struct ParseOptions {
  // Sort expected at the top level; when absent it is inferred.
  std::optional<Sort> expected;
  // Sorts of variables already in scope (e.g. names in a proof branch).
  std::map<std::string, Sort> context;
};

// Parses shorthand-expanded text. The input is NFC-normalized first.
// Throws ParseError (code ParseError or SortError) with a byte offset.
Expr parse(std::string_view input, const Signature& sig,
           const ParseOptions& options = {});

// Minimal-parenthesis rendering; holes print as ▢.
std::string print(const Expr& e);

inline constexpr std::string_view kHoleGlyph = "▢";

}  // namespace deduce
