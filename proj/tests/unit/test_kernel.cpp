#include "deduce/kernel.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "deduce/error.hpp"
#include "deduce/script.hpp"
#include "deduce/syntax.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace deduce;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(DEDUCE_DEMOS) + "/" + name);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const TaskDef& barber() {
  static const TaskDef t = parse_task(slurp("barber.task.json"));
  return t;
}
const TaskDef& union_powerset() {
  static const TaskDef t = parse_task(slurp("union-powerset.task.json"));
  return t;
}

StepRecord rec(StepKind k, FormulaNo target, Path path = {}) {
  StepRecord r;
  r.kind = k;
  r.target = target;
  r.path = std::move(path);
  return r;
}

std::string text(const ProofState& s, FormulaNo n) { return print(s.formula(n).formula); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  } catch (const std::exception& e) {
    FAIL("unexpected exception: " << e.what());
  }
  FAIL("no error");
  return ErrorCode::BadRequest;
}

// State after ByContradiction, TakeThis and Specialize with A.
ProofState barber_three() {
  ProofState s = start_proof(barber());
  s = apply_step(s, rec(StepKind::ByContradiction, 1));
  s = apply_step(s, rec(StepKind::TakeThis, 2));
  StepRecord sp = rec(StepKind::Specialize, 4);
  sp.term = "A";
  return apply_step(s, sp);
}

bool has_kind(const std::vector<StepDescriptor>& ds, StepKind k) {
  return std::any_of(ds.begin(), ds.end(), [&](const auto& d) { return d.record.kind == k; });
}

}  // namespace

TEST_CASE("init_proof") {
  ProofState s = start_proof(barber());
  REQUIRE(s.formulas().size() == 1);
  CHECK(text(s, 1) == "¬∃A∀B(shaves(A,B) ⇔ ¬shaves(B,B))");
  CHECK(s.formula(1).role == Role::Goal);
  CHECK(s.formula(1).status == GoalStatus::Active);
  CHECK(s.active_goal() == 1);
  CHECK_FALSE(is_complete(s));
  CHECK_FALSE(s.can_undo());

  ProofState top = init_proof(parse("⊤", Signature::builtin()), Signature::builtin(), {});
  CHECK(text(top, 1) == "⊤");
  auto offers = applicable_steps(top, 1, {});
  CHECK(has_kind(offers, StepKind::CloseByAssumption));
  top = apply_step(top, rec(StepKind::CloseByAssumption, 1));
  CHECK(is_complete(top));

  Signature sig = Signature::builtin();
  CHECK(code_of([&] { init_proof(Expr::app(std::string(sym::And), Sort::Proposition, {Expr::constant(std::string(sym::Top), Sort::Proposition), Expr::hole(0, Sort::Proposition)}), sig, {}); }) ==
        ErrorCode::IllFormedGoal);
  CHECK(code_of([&] { init_proof(parse("a ∪ b", sig), sig, {}); }) == ErrorCode::IllFormedGoal);
}

TEST_CASE("applicable_steps: menus from the walkthrough") {
  ProofState s = start_proof(barber());
  auto menu = applicable_steps(s, 1, {});
  REQUIRE(menu.size() >= 2);
  CHECK(menu[0].record.kind == StepKind::ProveLemma);
  CHECK(menu[1].record.kind == StepKind::ByContradiction);
  CHECK(menu[0].needs_term == Sort::Proposition);
  CHECK(menu[1].complete());
  CHECK(menu[1].label_key == "step.ByContradiction");
  CHECK(menu[1].effect_key == "effect.ByContradiction");
  REQUIRE(menu[1].adds.size() == 2);
  // Previews carry the exact formulas the step introduces.
  std::set<std::string> previews{menu[1].adds[0].text, menu[1].adds[1].text};
  CHECK(previews == std::set<std::string>{"∃A∀B(shaves(A,B) ⇔ ¬shaves(B,B))", "⊥"});

  s = apply_step(s, rec(StepKind::ByContradiction, 1));
  auto on_assumption = applicable_steps(s, 2, {});
  CHECK(has_kind(on_assumption, StepKind::TakeThis));
  CHECK_FALSE(has_kind(on_assumption, StepKind::ByContradiction));
  // Excluded middle is offered on closed proposition-valued subterms only.
  CHECK_FALSE(has_kind(applicable_steps(s, 2, {0, 0}), StepKind::ExcludedMiddleSplit));
  auto deep = applicable_steps(s, 2, {});
  CHECK(has_kind(deep, StepKind::ExcludedMiddleSplit));

  ProofState u = start_proof(union_powerset());
  u = apply_step(u, [] {
    StepRecord r = rec(StepKind::RewriteGoal, 1);
    r.lemma = "zf/eq-two-inclusions";
    r.orientation = Orientation::Left;
    return r;
  }());
  u = apply_step(u, rec(StepKind::ProveConjuncts, 2));
  CHECK(text(u, 3) == "⋃(𝒫(A)) ⊆ A");
  CHECK(text(u, 4) == "A ⊆ ⋃(𝒫(A))");
  CHECK(u.active_goal() == 3);
  auto rw = applicable_steps(u, 3, {});
  auto it = std::find_if(rw.begin(), rw.end(), [](const StepDescriptor& d) {
    return d.record.kind == StepKind::RewriteGoal && d.record.lemma == "zf/subseteq-def";
  });
  REQUIRE(it != rw.end());
  CHECK(it->record.orientation == Orientation::Left);
  CHECK(it->bindings == std::vector<std::pair<std::string, std::string>>{{"A", "⋃(𝒫(A))"},
                                                                          {"B", "A"}});
}

TEST_CASE("apply_step: barber walkthrough") {
  ProofState s = start_proof(barber());
  s = apply_step(s, rec(StepKind::ByContradiction, 1));
  CHECK(text(s, 2) == "∃A∀B(shaves(A,B) ⇔ ¬shaves(B,B))");
  CHECK(s.formula(2).role == Role::Assumption);
  CHECK(text(s, 3) == "⊥");
  CHECK(s.active_goal() == 3);
  CHECK(s.formula(1).status == GoalStatus::Open);

  s = apply_step(s, rec(StepKind::TakeThis, 2));
  CHECK(text(s, 4) == "∀B(shaves(A,B) ⇔ ¬shaves(B,B))");
  StepRecord sp = rec(StepKind::Specialize, 4);
  sp.term = "A";
  s = apply_step(s, sp);
  CHECK(text(s, 5) == "shaves(A,A) ⇔ ¬shaves(A,A)");
  CHECK(s.assumptions_in_scope(3) == std::vector<FormulaNo>{2, 4, 5});
  CHECK(s.active_goal() == 3);

  StepRecord close = rec(StepKind::ContradictionFromPair, 5);
  close.lemma = "logic/equiv-contradiction";
  ProofState done = apply_step(s, close);
  CHECK(is_complete(done));
  CHECK(done.active_goal() == 0);
  CHECK(done.formula(1).status == GoalStatus::Proved);
  CHECK(marker(done, 1) == "green-happy");
}

TEST_CASE("apply_step: rejections") {
  ProofState s = start_proof(barber());
  s = apply_step(s, rec(StepKind::ByContradiction, 1));
  // Goal ⊥ is not an existential.
  CHECK(code_of([&] { apply_step(s, rec(StepKind::TakeThis, 3)); }) == ErrorCode::NotApplicable);
  CHECK(code_of([&] { apply_step(s, rec(StepKind::ElimConjunction, 2)); }) ==
        ErrorCode::NotApplicable);
  CHECK(code_of([&] { apply_step(s, rec(StepKind::TakeThis, 42)); }) == ErrorCode::StaleState);
  CHECK(code_of([&] { apply_step(s, rec(StepKind::TakeThis, 2, {7})); }) ==
        ErrorCode::InvalidPath);
  StepRecord sp = rec(StepKind::Specialize, 2);
  sp.term = "A";
  CHECK(code_of([&] { apply_step(s, sp); }) == ErrorCode::NotApplicable);
  s = apply_step(s, rec(StepKind::TakeThis, 2));
  StepRecord bad = rec(StepKind::Specialize, 4);
  CHECK(code_of([&] { apply_step(s, bad); }) == ErrorCode::NotApplicable);
  bad.term = "shaves(A,A)";  // a proposition where an individual is needed
  CHECK(code_of([&] { apply_step(s, bad); }) == ErrorCode::SortError);
  // The closing lemma does not fit an assumption without the p ⇔ ¬p shape.
  StepRecord close = rec(StepKind::ContradictionFromPair, 4);
  close.lemma = "logic/equiv-contradiction";
  CHECK(code_of([&] { apply_step(s, close); }) == ErrorCode::NotApplicable);
}

TEST_CASE("both barber routes replay to completion") {
  for (const char* name : {"barber.script.json", "barber-cases.script.json"}) {
    INFO(name);
    ProofScript sc = parse_script(slurp(name));
    ProofState s = replay(sc, barber());
    CHECK(is_complete(s));
  }
  ProofScript u = parse_script(slurp("union-powerset.script.json"));
  CHECK(u.steps.size() <= 30);
  CHECK(is_complete(replay(u, union_powerset())));
}

TEST_CASE("branching, focus and markers") {
  ProofScript sc = parse_script(slurp("barber-cases.script.json"));
  sc.steps.resize(4);  // ... ExcludedMiddleSplit on shaves(A,A)
  ProofState s = replay(sc, barber());
  // Two goals ⊥ under assumptions shaves(A,A) and ¬shaves(A,A).
  CHECK(text(s, 6) == "shaves(A,A)");
  CHECK(text(s, 8) == "¬shaves(A,A)");
  CHECK(s.open_goals() == std::vector<FormulaNo>{7, 9});
  CHECK(s.active_goal() == 7);
  CHECK(marker(s, 7) == "red-sad");
  CHECK(marker(s, 9) == "yellow-sad");
  CHECK(marker(s, 6) == "blue-star");
  CHECK(marker(s, 8) == "gray-star");
  CHECK(marker(s, 5) == "blue-star");
  CHECK_FALSE(s.in_scope(8));
  CHECK(code_of([&] { applicable_steps(s, 8, {}); }) == ErrorCode::OutOfScope);
  StepRecord use_other = rec(StepKind::ModusPonens, 5);
  use_other.other = 8;
  CHECK(code_of([&] { apply_step(s, use_other); }) == ErrorCode::OutOfScope);

  s = set_active_goal(s, 9);
  CHECK(marker(s, 8) == "blue-star");
  CHECK(marker(s, 6) == "gray-star");
  CHECK(marker(s, 7) == "yellow-sad");
  CHECK(code_of([&] { set_active_goal(s, 1); }) == ErrorCode::NotApplicable);

  // Proving one of two branches leaves the proof incomplete.
  ProofState half = replay(
      [&] {
        ProofScript p = parse_script(slurp("barber-cases.script.json"));
        p.steps.resize(6);
        return p;
      }(),
      barber());
  CHECK_FALSE(is_complete(half));
  CHECK(half.formula(7).status == GoalStatus::Proved);
  CHECK(half.active_goal() == 9);
}

TEST_CASE("undo and redo") {
  ProofState init = start_proof(barber());
  CHECK(code_of([&] { undo(init); }) == ErrorCode::NothingToUndo);
  CHECK(code_of([&] { redo(init); }) == ErrorCode::NothingToRedo);

  ProofState s = barber_three();
  ProofState back = undo(undo(undo(s)));
  CHECK(canonical_serialization(back) == canonical_serialization(init));
  CHECK(back.redo_stack().size() == 3);
  ProofState again = redo(redo(redo(back)));
  CHECK(canonical_serialization(again) == canonical_serialization(s));
  CHECK(again.history() == s.history());

  ProofState u = undo(s);
  CHECK(u.find(5) == nullptr);
  CHECK(canonical_serialization(redo(u)) == canonical_serialization(s));
  // A fresh step clears the redo stack and reuses the number.
  StepRecord sp = rec(StepKind::Specialize, 4);
  sp.term = "B";
  ProofState other = apply_step(u, sp);
  CHECK_FALSE(other.can_redo());
  CHECK(text(other, 5) == "shaves(A,B) ⇔ ¬shaves(B,B)");
}

TEST_CASE("delete last step in a branch") {
  ProofState s = barber_three();
  ProofState d = delete_last_in_branch(s, 3);
  CHECK(d.find(5) == nullptr);
  CHECK(d.assumptions_in_scope(3) == std::vector<FormulaNo>{2, 4});
  CHECK(text(d, 4) == "∀B(shaves(A,B) ⇔ ¬shaves(B,B))");
  CHECK(d.history().back().kind == StepKind::DeleteLast);
  CHECK(canonical_serialization(undo(d)) == canonical_serialization(s));
  // Replaying the history, delete included, reproduces the state.
  ProofScript sc{barber().id, 1, d.history()};
  CHECK(canonical_serialization(replay(sc, barber())) == canonical_serialization(d));

  CHECK(code_of([&] { delete_last_in_branch(start_proof(barber()), 1); }) ==
        ErrorCode::EmptyBranch);

  ProofScript cases = parse_script(slurp("barber-cases.script.json"));
  cases.steps.resize(5);  // split, then ModusPonens in the first branch
  ProofState split = replay(cases, barber());
  std::size_t before = split.nodes().size();
  // From the untouched second branch the latest step above it is the split.
  CHECK(delete_last_in_branch(split, 9).find(9) == nullptr);
  ProofState first = delete_last_in_branch(split, 7);
  CHECK(first.nodes().size() == before - 1);
  // Deleting on the parent goal removes the split with both children.
  ProofState gone = delete_last_in_branch(first, 3);
  CHECK(gone.nodes().size() == before - 2);
  CHECK(gone.find(6) == nullptr);
  CHECK(gone.find(9) == nullptr);
  CHECK(gone.open_goals() == std::vector<FormulaNo>{3});
  CHECK(gone.active_goal() == 3);
}

TEST_CASE("descriptor order on the root goal is stable") {
  ProofState s = start_proof(union_powerset());
  auto a = applicable_steps(s, 1, {});
  auto b = applicable_steps(s, 1, {});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].record == b[i].record);
  CHECK(a[0].record.kind == StepKind::ProveLemma);
  CHECK(a[1].record.kind == StepKind::ByContradiction);
}

// --- properties -------------------------------------------------------------

namespace {

Expr random_goal(oracle::Rng& rng) {
  return oracle::coin(rng) ? oracle::random_tautology(rng, 3, 3) : oracle::random_prop(rng, 3, 3);
}

// Assumption formulas visible from every goal, by goal number.
std::map<FormulaNo, std::set<std::pair<FormulaNo, std::string>>> visible(const ProofState& s) {
  std::map<FormulaNo, std::set<std::pair<FormulaNo, std::string>>> out;
  for (const auto& [n, f] : s.formulas()) {
    if (f.role != Role::Goal) continue;
    for (FormulaNo a : s.assumptions_in_scope(n)) out[n].insert({a, text(s, a)});
  }
  return out;
}

// Applies one random offered step, reporting it through `applied`.
ProofState walk_one(const ProofState& s, oracle::Rng& rng, bool& applied) {
  applied = false;
  if (s.active_goal() == 0) return s;
  std::vector<FormulaNo> cands{s.active_goal()};
  for (FormulaNo a : s.assumptions_in_scope(s.active_goal())) cands.push_back(a);
  FormulaNo n = cands[oracle::pick(rng, cands.size())];
  auto paths = all_paths(s.formula(n).formula);
  Path p = oracle::coin(rng) ? Path{} : paths[oracle::pick(rng, paths.size())];
  auto offers = applicable_steps(s, n, p);
  if (offers.empty()) return s;
  StepDescriptor d = offers[oracle::pick(rng, offers.size())];
  if (d.needs_term) {
    d.record.term = *d.needs_term == Sort::Proposition ? print(oracle::random_prop(rng, 3, 2))
                                                       : std::string("a");
  }
  applied = true;
  return apply_step(s, d.record);
}

}  // namespace

TEST_CASE("property: assumptions only grow along a branch") {
  oracle::Rng rng(51);
  for (int i = 0; i < 200; ++i) {
    ProofState s = start_proof(oracle::prop_task(random_goal(rng)));
    for (int k = 0; k < 15; ++k) {
      bool applied = false;
      ProofState next = walk_one(s, rng, applied);
      if (!applied) continue;
      auto before = visible(s);
      auto after = visible(next);
      for (const auto& [g, as] : before) {
        if (!after.count(g)) continue;
        for (const auto& a : as) CHECK(after[g].count(a) == 1);
      }
      for (const auto& [n, f] : s.formulas()) {
        REQUIRE(next.find(n) != nullptr);
        CHECK(next.formula(n).formula == f.formula);
      }
      s = next;
    }
  }
}

TEST_CASE("property: inserted formulas are simplifier fixpoints") {
  oracle::Rng rng(52);
  for (int i = 0; i < 200; ++i) {
    ProofState s = oracle::random_walk(start_proof(oracle::prop_task(random_goal(rng))), rng, 15);
    for (const auto& [n, f] : s.formulas()) {
      if (n == 1) continue;  // the statement is kept as entered
      INFO(print(f.formula));
      CHECK(simplify(f.formula) == f.formula);
    }
  }
}

TEST_CASE("property: replay determinism and undo/redo identity") {
  oracle::Rng rng(53);
  for (int i = 0; i < 200; ++i) {
    TaskDef task = oracle::prop_task(random_goal(rng));
    ProofState s = oracle::random_walk(start_proof(task), rng, 15);
    ProofScript sc{task.id, 1, s.history()};
    CHECK(canonical_serialization(replay(sc, task)) == canonical_serialization(s));
    if (s.can_undo()) {
      CHECK(canonical_serialization(redo(undo(s))) == canonical_serialization(s));
      ProofState u = s;
      while (u.can_undo()) u = undo(u);
      CHECK(canonical_serialization(u) == canonical_serialization(start_proof(task)));
      for (std::size_t k = 0; k < s.history().size(); ++k) u = redo(u);
      CHECK(canonical_serialization(u) == canonical_serialization(s));
    }
  }
}

TEST_CASE("property: descriptor honesty") {
  oracle::Rng rng(54);
  const std::vector<StepKind> bare{StepKind::TakeThis,         StepKind::ElimConjunction,
                                   StepKind::ElimEquivalence,  StepKind::ProveConjuncts,
                                   StepKind::IntroImplication, StepKind::IntroEquivalence,
                                   StepKind::IntroForall,      StepKind::CaseAnalysis};
  for (int i = 0; i < 150; ++i) {
    ProofState s = oracle::random_walk(start_proof(oracle::prop_task(random_goal(rng))), rng, 8);
    if (s.active_goal() == 0) continue;
    std::vector<FormulaNo> cands{s.active_goal()};
    for (FormulaNo a : s.assumptions_in_scope(s.active_goal())) cands.push_back(a);
    for (FormulaNo n : cands) {
      for (const Path& p : all_paths(s.formula(n).formula)) {
        auto offers = applicable_steps(s, n, p);
        std::set<StepKind> kinds;
        for (const StepDescriptor& d : offers) {
          kinds.insert(d.record.kind);
          if (!d.complete()) continue;
          INFO(step_kind_name(d.record.kind), " on ", n);
          CHECK_NOTHROW(apply_step(s, d.record));
        }
        for (StepKind k : bare) {
          if (kinds.count(k)) continue;
          INFO(step_kind_name(k), " not offered on ", n, " at ", path_to_string(p), ": ",
               print(s.formula(n).formula));
          CHECK_THROWS_AS(apply_step(s, rec(k, n, p)), Error);
        }
      }
    }
  }
}

TEST_CASE("property: completed propositional proofs prove tautologies") {
  oracle::Rng rng(55);
  int completed = 0;
  for (int i = 0; i < 400; ++i) {
    Expr goal = random_goal(rng);
    ProofState s = oracle::random_walk(start_proof(oracle::prop_task(goal)), rng, 25);
    if (is_complete(s)) {
      ++completed;
      CHECK(oracle::is_tautology(goal));
    }
  }
  // Scripted proofs of tautologies complete, and only of tautologies.
  for (int i = 0; i < 60; ++i) {
    Expr goal = oracle::random_tautology(rng, 3, 3);
    ProofScript sc = oracle::prove_tautology(oracle::prop_task(goal));
    CHECK(is_complete(replay(sc, oracle::prop_task(goal))));
    ++completed;
  }
  CHECK(completed > 60);
}

TEST_CASE("property: first-order walks stay sound on small models") {
  // Completed proofs of first-order goals must be valid in every small model.
  oracle::Rng rng(56);
  TaskDef base;
  base.id = "fo";
  base.name = "fo";
  base.symbols = {{"P", 1, Sort::Proposition}, {"R", 2, Sort::Proposition}};
  for (const auto& a : oracle::atom_names()) base.symbols.push_back({a, 0, Sort::Proposition});
  base.lemmas = {"logic/*"};
  const std::vector<std::string> valid{
      "∀x(P(x)) ⇒ ∃x(P(x))",           "∀x(P(x) ∨ ¬P(x))",
      "∃x∀y(R(x,y)) ⇒ ∀y∃x(R(x,y))",  "¬∃x(P(x)) ⇔ ∀x(¬P(x))",
      "∀x(P(x) ∧ P(x) ⇒ P(x))",       "∃x(P(x)) ∨ ∀x(¬P(x))"};
  for (int i = 0; i < 300; ++i) {
    TaskDef t = base;
    Expr goal = oracle::coin(rng) ? parse(valid[oracle::pick(rng, valid.size())], task_signature(t))
                                  : oracle::random_fo(rng, 3);
    if (!free_vars(goal).empty()) continue;
    t.goal = print(goal);
    ProofState s = oracle::random_walk(start_proof(t), rng, 20);
    if (!is_complete(s)) continue;
    INFO(t.goal);
    CHECK(oracle::fo_equivalent(goal, parse("⊤", Signature::builtin()), 3, rng, 40));
  }
}
