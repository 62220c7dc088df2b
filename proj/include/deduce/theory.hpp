#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "deduce/expr.hpp"

namespace deduce {

enum class LemmaKind { Schema, Axiom, Definition, Lemma };

std::string_view lemma_kind_name(LemmaKind k);

struct Lemma {
  std::string id;          // local key, e.g. "subseteq-def"
  std::string theory;      // e.g. "zf"
  Expr statement;          // closed
  LemmaKind kind = LemmaKind::Lemma;
  std::string display_key; // message-catalog key for the display name

  std::string qualified_id() const { return theory + "/" + id; }
};

struct Theory {
  std::string id;
  Signature signature;
  std::vector<Lemma> lemmas;
};

// Built-in theories: "logic" (propositional schemas) and "zf" (set theory).
const std::vector<Theory>& builtin_theories();

// Throws Error(NotFound).
const Theory& get_theory(std::string_view id);
const Lemma& get_lemma(const Theory& theory, std::string_view id);
// Accepts "theory/id".
const Lemma& get_lemma(std::string_view qualified_id);

// Resolves selectors such as "zf/subseteq-def" or "logic/*" into lemmas,
// in selector order without duplicates. Throws Error(UnknownLemma).
std::vector<Lemma> resolve_lemmas(const std::vector<std::string>& selectors);

// Reads "<id>\t<kind>\t<formula text>" lines; blank lines and lines starting
// with '#' are skipped. Throws ParseError/Error on malformed input.
Theory load_theory(std::string_view theory_id, std::string_view text,
                   const Signature& sig = Signature::builtin());

}  // namespace deduce
