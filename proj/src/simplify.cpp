#include "deduce/simplify.hpp"

#include <utility>
#include <vector>

namespace deduce {

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  bool changed = false;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    changed = changed || !kids[i].same_node(e.child(i));
  }
  if (!changed) return e;
  if (e.is_quant()) return Expr::quant(e.name(), e.bound(), e.bound_sort(), std::move(kids[0]));
  return Expr::app(e.name(), e.sort(), std::move(kids));
}

bool is_connective(const Expr& e) {
  return e.sort() == Sort::Proposition &&
         (e.is(sym::Not) || e.is(sym::And) || e.is(sym::Or) || e.is(sym::Implies) ||
          e.is(sym::Iff) || e.is_quant());
}

Expr constants_node(const Expr& e) {
  const bool app = e.kind() == ExprKind::App;
  if (app && e.is(sym::Not)) {
    const Expr& a = e.child(0);
    if (a.is(sym::Top)) return mk_bot();
    if (a.is(sym::Bot)) return mk_top();
    return e;
  }
  if (e.is_quant()) {
    const Expr& b = e.body();
    if (e.name() == sym::Forall && b.is(sym::Top)) return mk_top();
    if (e.name() == sym::Exists && b.is(sym::Bot)) return mk_bot();
    return e;
  }
  if (!app || e.child_count() != 2) return e;
  const Expr& a = e.child(0);
  const Expr& b = e.child(1);
  if (e.is(sym::Or)) {
    if (a.is(sym::Top) || b.is(sym::Top)) return mk_top();
    if (b.is(sym::Bot)) return a;
    if (a.is(sym::Bot)) return b;
  } else if (e.is(sym::And)) {
    if (b.is(sym::Top)) return a;
    if (a.is(sym::Top)) return b;
    if (a.is(sym::Bot) || b.is(sym::Bot)) return mk_bot();
  } else if (e.is(sym::Implies)) {
    if (a.is(sym::Top)) return b;
    if (b.is(sym::Top) || a.is(sym::Bot)) return mk_top();
    if (b.is(sym::Bot)) return mk_not(a);
  } else if (e.is(sym::Iff)) {
    if (b.is(sym::Top)) return a;
    if (a.is(sym::Top)) return b;
    if (b.is(sym::Bot)) return mk_not(a);
    if (a.is(sym::Bot)) return mk_not(b);
  }
  return e;
}

Expr constants_rec(const Expr& e) {
  if (e.sort() != Sort::Proposition || e.kind() == ExprKind::Var ||
      e.kind() == ExprKind::Const || e.is_hole() || !is_connective(e)) {
    return e;
  }
  std::vector<Expr> kids;
  kids.reserve(e.child_count());
  for (const Expr& c : e.children()) kids.push_back(constants_rec(c));
  return constants_node(rebuild(e, std::move(kids)));
}

void flatten(const Expr& e, std::string_view op, std::vector<Expr>& out) {
  if (e.kind() == ExprKind::App && e.is(op)) {
    flatten(e.child(0), op, out);
    flatten(e.child(1), op, out);
  } else {
    out.push_back(reassociate_left(e));
  }
}

Expr push_rec(const Expr& e, bool dne);

// Negation of e, pushed inward.
Expr negate(const Expr& e, bool dne) {
  if (e.kind() == ExprKind::App) {
    if (e.is(sym::Not)) {
      if (dne) return push_rec(e.child(0), dne);
      return mk_not(push_rec(e, dne));
    }
    if (e.is(sym::And)) return mk_or(negate(e.child(0), dne), negate(e.child(1), dne));
    if (e.is(sym::Or)) return mk_and(negate(e.child(0), dne), negate(e.child(1), dne));
    if (e.is(sym::Implies)) return mk_and(push_rec(e.child(0), dne), negate(e.child(1), dne));
  }
  if (e.is_quant()) {
    std::string dual(e.name() == sym::Forall ? sym::Exists : sym::Forall);
    return Expr::quant(dual, e.bound(), e.bound_sort(), negate(e.body(), dne));
  }
  // Atoms, constants, ⇔ and holes keep their negation.
  return mk_not(push_rec(e, dne));
}

Expr push_rec(const Expr& e, bool dne) {
  if (!is_connective(e)) return e;
  if (e.is(sym::Not)) return negate(e.child(0), dne);
  std::vector<Expr> kids;
  kids.reserve(e.child_count());
  for (const Expr& c : e.children()) kids.push_back(push_rec(c, dne));
  return rebuild(e, std::move(kids));
}

}  // namespace

Expr propagate_constants(const Expr& e) { return constants_rec(e); }

Expr reassociate_left(const Expr& e) {
  if (!is_connective(e)) return e;
  if (e.is(sym::And) || e.is(sym::Or)) {
    std::vector<Expr> operands;
    flatten(e, e.name(), operands);
    Expr acc = operands[0];
    for (std::size_t i = 1; i < operands.size(); ++i) {
      acc = mk_binary(e.name(), std::move(acc), operands[i]);
    }
    return acc == e ? e : acc;
  }
  std::vector<Expr> kids;
  for (const Expr& c : e.children()) kids.push_back(reassociate_left(c));
  return rebuild(e, std::move(kids));
}

Expr push_negations(const Expr& e, bool eliminate_double_negation) {
  Expr out = push_rec(e, eliminate_double_negation);
  return out == e ? e : out;
}

Expr simplify(const Expr& e, const SimplifierConfig& cfg) {
  Expr cur = e;
  while (true) {
    Expr next = cur;
    if (cfg.push_negations) next = push_negations(next, cfg.eliminate_double_negation);
    if (cfg.propagate_constants) next = propagate_constants(next);
    if (cfg.reassociate_left) next = reassociate_left(next);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

}  // namespace deduce
