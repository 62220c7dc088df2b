#pragma once

// Lemma patterns and the prefix tree used to find the lemmas applicable to a
// selected subterm.
//
// A lemma ∀A∀B(A ⊆ B ⇔ …) contributes the pattern A ⊆ B with pattern
// variables A and B. Patterns are keyed by their pre-order token sequence in
// which pattern variables become per-sort wildcards ("⊆,?ind,?ind") and
// variables bound inside the pattern become de Bruijn references, so a key
// never depends on the names the lemma happens to use.

#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <string>
#include <vector>

#include "deduce/expr.hpp"

namespace deduce {

enum class Orientation { Left, Right, Whole };

std::string_view orientation_name(Orientation o);
std::optional<Orientation> orientation_from_name(std::string_view s);

struct PatternVar {
  std::string name;
  Sort sort;
  friend bool operator==(const PatternVar&, const PatternVar&) = default;
};

struct Pattern {
  Expr skeleton;
  std::vector<PatternVar> vars;  // outermost ∀-block, in binding order
  std::string lemma_id;
  Orientation orientation = Orientation::Whole;
  // The lemma matrix after stripping the ∀-block.
  Expr matrix;
};

struct MatchResult {
  Pattern pattern;
  Substitution bindings;
};

// Strips the outer ∀-block; ⇔ and = matrices yield a left and a right
// pattern, anything else a single whole pattern.
// Throws Error(NotClosed) if the lemma has free variables, HolePresent on holes.
std::vector<Pattern> compile_lemma(const Expr& lemma, const std::string& id);

// Direct structural matcher: root-anchored, modulo renaming of bound
// variables, repeated pattern variables must bind alpha-equal terms, and no
// binding may mention a variable bound inside the matched subterm.
std::optional<Substitution> match_pattern(const Expr& skeleton,
                                          const std::vector<PatternVar>& vars,
                                          const Expr& query);

struct KeyToken {
  std::string text;
  std::size_t arity = 0;
  friend auto operator<=>(const KeyToken&, const KeyToken&) = default;
};

inline constexpr std::string_view kWildcardIndividual = "?ind";
inline constexpr std::string_view kWildcardProposition = "?prop";

// Trie key of a pattern.
std::vector<KeyToken> pattern_key(const Pattern& p);

class LemmaIndex {
 public:
  // Inserting a pattern with the same (lemma id, orientation) twice keeps
  // one entry.
  void insert(Pattern pat);

  // All patterns matching query at its root, ordered by lemma id then
  // orientation.
  std::vector<MatchResult> lookup(const Expr& query) const;

  std::vector<Pattern> patterns() const;
  std::size_t size() const { return count_; }
  // Labels on the edges leaving the root.
  std::vector<KeyToken> root_edges() const;

  struct Edge;
  struct Entry {
    Pattern pattern;
    std::vector<std::string> slots;  // pattern variable per wildcard, in key order
  };
  struct Node {
    std::vector<Edge> edges;  // sorted by key
    std::vector<Entry> entries;
  };
  struct Edge {
    KeyToken key;
    Node child;
  };

 private:
  Node root_;
  std::size_t count_ = 0;
  std::set<std::pair<std::string, Orientation>> ids_;
};

LemmaIndex insert(LemmaIndex index, Pattern pat);
std::vector<MatchResult> lookup(const LemmaIndex& index, const Expr& query);

}  // namespace deduce
