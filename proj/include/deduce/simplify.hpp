#pragma once

#include "deduce/expr.hpp"

namespace deduce {

struct SimplifierConfig {
  bool propagate_constants = true;
  bool reassociate_left = true;
  bool push_negations = true;
  bool eliminate_double_negation = true;
};

// One bottom-up pass of ⊤/⊥ propagation.
Expr propagate_constants(const Expr& e);

// Left-nests every ∧-chain and ∨-chain, keeping operand order.
Expr reassociate_left(const Expr& e);

// Pushes ¬ inward through ∧ ∨ ⇒ ∀ ∃ and removes ¬¬. Negation stays on atoms,
// on constants and on ⇔.
Expr push_negations(const Expr& e, bool eliminate_double_negation = true);

// Runs the enabled passes (negations, constants, reassociation) until a full
// round changes nothing. The result is classically equivalent to e.
Expr simplify(const Expr& e, const SimplifierConfig& cfg = {});

}  // namespace deduce
