#include "deduce/expr.hpp"

#include <functional>

#include "deduce/error.hpp"
#include "deduce/syntax.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace deduce;

namespace {

const Signature& barber_sig() {
  static const Signature sig = [] {
    Signature s = Signature::builtin();
    s.add_function("shaves", 2, Sort::Proposition);
    return s;
  }();
  return sig;
}

Expr P(std::string_view text, const Signature& sig = Signature::builtin()) {
  return parse(expand_shorthands(text), sig);
}

Expr barber_body() { return P("shaves(A,B) ⇔ ¬shaves(B,B)", barber_sig()); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::BadRequest;
}

}  // namespace

TEST_CASE("subterm_at follows child indices") {
  Expr e = barber_body();
  CHECK(subterm_at(e, {}) == e);
  CHECK(print(subterm_at(e, {1, 0})) == "shaves(B,B)");
  Expr q = P("∀B(shaves(A,B) ⇔ ¬shaves(B,B))", barber_sig());
  CHECK(code_of([&] { subterm_at(q, {7}); }) == ErrorCode::InvalidPath);
  CHECK_FALSE(valid_path(q, {0, 2}));
}

TEST_CASE("replace_at builds a new tree") {
  Expr e = P("p ∧ q", oracle::prop_signature());
  Expr r = replace_at(e, {0}, mk_top());
  CHECK(print(r) == "⊤ ∧ q");
  CHECK(print(e) == "p ∧ q");
  CHECK(replace_at(e, {}, e) == e);

  Expr goal = P("⋃(𝒫(A)) ⊆ A");
  Expr unfolded = P("∀x(x ∈ ⋃(𝒫(A)) ⇒ x ∈ A)");
  CHECK(replace_at(goal, {}, unfolded) == unfolded);
  CHECK(code_of([&] { replace_at(goal, {0}, mk_top()); }) == ErrorCode::SortMismatch);
  CHECK(code_of([&] { replace_at(goal, {5}, mk_top()); }) == ErrorCode::InvalidPath);
}

TEST_CASE("free variables") {
  CHECK(free_vars(P("∀B(shaves(A,B) ⇔ ¬shaves(B,B))", barber_sig())) == std::set<std::string>{"A"});
  CHECK(free_vars(P("shaves(A,A)", barber_sig())) == std::set<std::string>{"A"});
  CHECK(free_vars(mk_bot()).empty());
  CHECK(free_vars(P("x ∈ A ∧ ∀x(x ∈ B)")) == std::set<std::string>{"A", "B", "x"});
}

TEST_CASE("substitution") {
  Expr inst = substitute(barber_body(), {{"B", Expr::var("A", Sort::Individual)}});
  CHECK(print(inst) == "shaves(A,A) ⇔ ¬shaves(A,A)");
  CHECK(substitute(barber_body(), {}) == barber_body());

  // Capture avoidance: the bound x is renamed.
  Expr e = P("∀x(x ∈ A)");
  Expr s = substitute(e, {{"A", Expr::var("x", Sort::Individual)}});
  CHECK(free_vars(s) == std::set<std::string>{"x"});
  CHECK(print(s) == "∀x′(x′ ∈ x)");
  CHECK(alpha_eq(s, P("∀y(y ∈ x)")));

  // Simultaneous, not sequential.
  Expr sw = substitute(P("x ∈ y"), {{"x", Expr::var("y", Sort::Individual)},
                                    {"y", Expr::var("x", Sort::Individual)}});
  CHECK(print(sw) == "y ∈ x");
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(P("∀x(x ∈ A)"), P("∀y(y ∈ A)")));
  CHECK_FALSE(alpha_eq(P("shaves(A,B)", barber_sig()), P("shaves(B,A)", barber_sig())));
  CHECK(alpha_eq(P("∀x∃y(x ∈ y)"), P("∀y∃x(y ∈ x)")));
  CHECK_FALSE(alpha_eq(P("∀x∃y(x ∈ y)"), P("∀x∃y(y ∈ x)")));
  CHECK_FALSE(alpha_eq(P("∀x(x ∈ A)"), P("∀A(A ∈ A)")));
}

TEST_CASE("fresh names") {
  CHECK(fresh_name("A", {}) == "A");
  CHECK(fresh_name("A", {"A"}) == "A′");
  CHECK(fresh_name("A", {"A", "A′"}) == "A″");
  CHECK(fresh_name("A", {"A", "A′", "A″"}) == "A‴");
  CHECK(fresh_name("A", {"A", "A′", "A″", "A‴"}) == "A₁");
  CHECK(fresh_name("A", {"A", "A′", "A″", "A‴", "A₁"}) == "A₂");
}

TEST_CASE("pre-order tokens") {
  CHECK(join_tokens(preorder_tokens(P("A ⊆ B"))) == "⊆,A,B");
  CHECK(join_tokens(preorder_tokens(mk_bot())) == "⊥");
  CHECK(join_tokens(preorder_tokens(P("x ∈ 𝒫(A)"))) == "∈,x,𝒫,A");
  CHECK(join_tokens(preorder_tokens(P("∀x(x ∈ A)"))) == "∀,x,∈,x,A");
  CHECK(code_of([] { preorder_tokens(Expr::hole(0, Sort::Proposition)); }) == ErrorCode::HolePresent);
}

TEST_CASE("paths as text") {
  CHECK(path_to_string({0, 1, 0}) == "0.1.0");
  CHECK(path_to_string({}) == "");
  CHECK(path_from_string("0.1.0") == Path{0, 1, 0});
  CHECK(path_from_string("").empty());
  CHECK(code_of([] { path_from_string("0..1"); }) == ErrorCode::InvalidPath);
  CHECK(code_of([] { path_from_string("x"); }) == ErrorCode::InvalidPath);
}

TEST_CASE("property: replace then read back") {
  oracle::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    Expr e = oracle::random_formula(rng, 4);
    auto paths = all_paths(e);
    const Path& p = paths[oracle::pick(rng, paths.size())];
    Expr r = subterm_at(e, p).sort() == Sort::Proposition ? oracle::random_prop(rng, 2, 2)
                                                          : oracle::random_term(rng, 2);
    CHECK(subterm_at(replace_at(e, p, r), p) == r);
  }
}

TEST_CASE("property: alpha_eq agrees with de Bruijn renaming") {
  oracle::Rng rng(12);
  std::vector<Expr> pool;
  for (int i = 0; i < 200; ++i) pool.push_back(oracle::random_formula(rng, 3));
  // Bound-variable renamings of the pool must be recognised.
  for (int i = 0; i < 200; ++i) {
    const Expr& e = pool[i];
    std::set<std::string> taken = all_names(e);
    std::function<Expr(const Expr&)> rename = [&](const Expr& x) -> Expr {
      if (x.is_quant()) {
        std::string fresh = fresh_name(x.bound() + "r", taken);
        taken.insert(fresh);
        Expr body = substitute(x.body(), {{x.bound(), Expr::var(fresh, x.bound_sort())}});
        return Expr::quant(x.name(), fresh, x.bound_sort(), rename(body));
      }
      if (x.kind() != ExprKind::App) return x;
      std::vector<Expr> kids;
      for (const Expr& c : x.children()) kids.push_back(rename(c));
      return Expr::app(x.name(), x.sort(), kids);
    };
    pool.push_back(rename(e));
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(alpha_eq(pool[i], pool[i]));
    for (std::size_t j = i + 1; j < pool.size(); j += 7) {
      bool expected = oracle::debruijn(pool[i]) == oracle::debruijn(pool[j]);
      CHECK(alpha_eq(pool[i], pool[j]) == expected);
      CHECK(alpha_eq(pool[j], pool[i]) == expected);
    }
  }
  for (int i = 0; i < 200; ++i) {
    CHECK(alpha_eq(pool[i], pool[i + 200]));
    CHECK(oracle::debruijn(pool[i]) == oracle::debruijn(pool[i + 200]));
  }
}

TEST_CASE("property: substitution composes on disjoint domains") {
  oracle::Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    Expr e = oracle::random_formula(rng, 4);
    Expr t = oracle::random_term(rng, 2);
    Expr u = oracle::random_term(rng, 2);
    if (free_vars(t).count("b")) continue;
    Expr seq = substitute(substitute(e, {{"a", t}}), {{"b", u}});
    Expr sim = substitute(e, {{"a", t}, {"b", u}});
    // {a↦t} then {b↦u} equals {a↦t, b↦u} when b ∉ fv(t).
    CHECK(alpha_eq(seq, sim));
  }
}

TEST_CASE("property: fresh_name avoids the taken set") {
  oracle::Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    std::set<std::string> taken;
    std::string base = std::string(1, static_cast<char>('a' + oracle::pick(rng, 3)));
    std::string cur = base;
    int n = oracle::pick(rng, 12);
    for (int k = 0; k < n; ++k) {
      cur = fresh_name(base, taken);
      taken.insert(cur);
    }
    CHECK(taken.count(fresh_name(base, taken)) == 0);
  }
}
