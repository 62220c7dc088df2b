#include "deduce/kernel.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <utility>

#include "deduce/error.hpp"
#include "deduce/script.hpp"
#include "deduce/syntax.hpp"
#include "json.hpp"

namespace deduce {

namespace {

constexpr std::array<std::pair<StepKind, std::string_view>, 25> kKindNames{{
    {StepKind::ProveLemma, "ProveLemma"},
    {StepKind::ByContradiction, "ByContradiction"},
    {StepKind::ProveConjuncts, "ProveConjuncts"},
    {StepKind::IntroImplication, "IntroImplication"},
    {StepKind::IntroEquivalence, "IntroEquivalence"},
    {StepKind::IntroForall, "IntroForall"},
    {StepKind::IntroExistsWitness, "IntroExistsWitness"},
    {StepKind::ProveDisjunctionClassical, "ProveDisjunctionClassical"},
    {StepKind::CloseByAssumption, "CloseByAssumption"},
    {StepKind::RewriteGoal, "RewriteGoal"},
    {StepKind::CloseByLemma, "CloseByLemma"},
    {StepKind::ApplyLemmaBackward, "ApplyLemmaBackward"},
    {StepKind::TakeThis, "TakeThis"},
    {StepKind::Specialize, "Specialize"},
    {StepKind::ElimConjunction, "ElimConjunction"},
    {StepKind::ElimEquivalence, "ElimEquivalence"},
    {StepKind::ModusPonens, "ModusPonens"},
    {StepKind::CaseAnalysis, "CaseAnalysis"},
    {StepKind::ExcludedMiddleSplit, "ExcludedMiddleSplit"},
    {StepKind::ContradictionFromPair, "ContradictionFromPair"},
    {StepKind::RewriteAssumption, "RewriteAssumption"},
    {StepKind::EqualityRewrite, "EqualityRewrite"},
    {StepKind::ApplyLemmaForward, "ApplyLemmaForward"},
    {StepKind::SetActiveGoal, "SetActiveGoal"},
    {StepKind::DeleteLast, "DeleteLast"},
}};

}  // namespace

std::string_view step_kind_name(StepKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<StepKind> step_kind_from_name(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

std::string_view role_name(Role r) { return r == Role::Goal ? "goal" : "assumption"; }

std::string_view goal_status_name(GoalStatus s) {
  switch (s) {
    case GoalStatus::Active: return "active";
    case GoalStatus::Open: return "open";
    case GoalStatus::Proved: return "proved";
  }
  return "open";
}

const Lemma* ProofContext::find_lemma(std::string_view qualified_id) const {
  for (const Lemma& l : lemmas) {
    if (l.qualified_id() == qualified_id) return &l;
  }
  return nullptr;
}

// --- the step engine ---------------------------------------------------------------

namespace {

[[noreturn]] void not_applicable(const std::string& reason, std::vector<std::string> args = {}) {
  throw Error(ErrorCode::NotApplicable, "reason." + reason, std::move(args),
              "step not applicable: " + reason);
}

[[noreturn]] void stale(FormulaNo n) {
  throw Error(ErrorCode::StaleState, "error.staleState", {std::to_string(n)},
              "formula " + std::to_string(n) + " does not exist");
}

struct LemmaBlock {
  std::vector<PatternVar> vars;
  Expr matrix;
};

LemmaBlock strip_block(const Expr& statement) {
  LemmaBlock b;
  b.matrix = statement;
  while (b.matrix.is_quant() && b.matrix.name() == sym::Forall) {
    std::erase_if(b.vars, [&](const PatternVar& v) { return v.name == b.matrix.bound(); });
    b.vars.push_back({b.matrix.bound(), b.matrix.bound_sort()});
    b.matrix = b.matrix.body();
  }
  return b;
}

// Pattern variables of the block that occur free in e but are not bound.
bool all_bound(const Expr& e, const std::vector<PatternVar>& vars, const Substitution& s) {
  const auto fv = free_vars(e);
  return std::all_of(vars.begin(), vars.end(), [&](const PatternVar& v) {
    return !fv.count(v.name) || s.count(v.name);
  });
}

bool contradictory(const Expr& a, const Expr& b, const SimplifierConfig& cfg) {
  auto neg_of = [&](const Expr& x, const Expr& y) {
    if (x.is(sym::Not) && alpha_eq(x.child(0), y)) return true;
    return alpha_eq(x, simplify(mk_not(y), cfg));
  };
  return neg_of(a, b) || neg_of(b, a);
}

class Engine {
 public:
  Engine(const ProofContext& ctx, ProofData data) : ctx_(ctx), d_(std::move(data)) {}

  ProofData take() { return std::move(d_); }
  const ProofData& data() const { return d_; }

  void run(const StepRecord& r) {
    switch (r.kind) {
      case StepKind::SetActiveGoal: return set_active(r);
      case StepKind::DeleteLast: return delete_last(r);
      default: break;
    }
    if (d_.active == 0) not_applicable("noActiveGoal");
    goal_ = d_.active;
    rec_ = &r;
    if (r.target) {
      auto it = d_.formulas.find(*r.target);
      if (it != d_.formulas.end() && !valid_path(it->second.formula, r.path)) {
        throw Error(ErrorCode::InvalidPath, "error.invalidPath", {path_to_string(r.path)},
                    "path does not exist in formula " + std::to_string(*r.target));
      }
    }
    // Only rewriting and the excluded-middle split act below the root.
    const bool uses_path = r.kind == StepKind::RewriteGoal || r.kind == StepKind::RewriteAssumption ||
                           r.kind == StepKind::ExcludedMiddleSplit ||
                           r.kind == StepKind::EqualityRewrite;
    if (!uses_path && !r.path.empty()) not_applicable("rootOnly");
    switch (r.kind) {
      case StepKind::ProveLemma: prove_lemma(); break;
      case StepKind::ByContradiction: by_contradiction(); break;
      case StepKind::ProveConjuncts: split_goal(sym::And); break;
      case StepKind::IntroImplication: intro_implication(); break;
      case StepKind::IntroEquivalence: split_goal(sym::Iff); break;
      case StepKind::IntroForall: intro_forall(); break;
      case StepKind::IntroExistsWitness: intro_exists(); break;
      case StepKind::ProveDisjunctionClassical: prove_disjunction(); break;
      case StepKind::CloseByAssumption: close_by_assumption(); break;
      case StepKind::RewriteGoal: rewrite(true); break;
      case StepKind::CloseByLemma: close_by_lemma(); break;
      case StepKind::ApplyLemmaBackward: apply_lemma_backward(); break;
      case StepKind::TakeThis: take_this(); break;
      case StepKind::Specialize: specialize(); break;
      case StepKind::ElimConjunction: elim_pair(sym::And); break;
      case StepKind::ElimEquivalence: elim_pair(sym::Iff); break;
      case StepKind::ModusPonens: modus_ponens(); break;
      case StepKind::CaseAnalysis: case_analysis(); break;
      case StepKind::ExcludedMiddleSplit: excluded_middle(); break;
      case StepKind::ContradictionFromPair: contradiction(); break;
      case StepKind::RewriteAssumption: rewrite(false); break;
      case StepKind::EqualityRewrite: equality_rewrite(); break;
      case StepKind::ApplyLemmaForward: apply_lemma_forward(); break;
      default: not_applicable("unknownStep");
    }
    commit();
  }

  // --- queries shared with ProofState ---

  static std::vector<FormulaNo> chain(const ProofData& d, FormulaNo g) {
    std::vector<FormulaNo> out;
    for (FormulaNo cur = g; cur != 0;) {
      auto it = d.formulas.find(cur);
      if (it == d.formulas.end()) break;
      out.push_back(cur);
      cur = it->second.owner;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  static std::vector<FormulaNo> scope(const ProofData& d, FormulaNo g) {
    const auto ch = chain(d, g);
    std::vector<FormulaNo> out;
    for (const auto& [n, e] : d.formulas) {
      if (e.role == Role::Assumption && std::find(ch.begin(), ch.end(), e.owner) != ch.end()) {
        out.push_back(n);
      }
    }
    return out;
  }

  static bool proved(const ProofData& d, FormulaNo g) {
    const FormulaEntry& e = d.formulas.at(g);
    if (e.closed) return true;
    if (e.subgoals.empty()) return false;
    return std::all_of(e.subgoals.begin(), e.subgoals.end(),
                       [&](FormulaNo c) { return proved(d, c); });
  }

  static bool open_leaf(const ProofData& d, FormulaNo g) {
    const FormulaEntry& e = d.formulas.at(g);
    return e.role == Role::Goal && e.subgoals.empty() && !e.closed;
  }

  static void refresh_status(ProofData& d) {
    for (auto& [n, e] : d.formulas) {
      if (e.role != Role::Goal) continue;
      e.status = proved(d, n) ? GoalStatus::Proved
                              : (n == d.active ? GoalStatus::Active : GoalStatus::Open);
    }
  }

 private:
  // --- references ---

  const FormulaEntry& entry(FormulaNo n) const {
    auto it = d_.formulas.find(n);
    if (it == d_.formulas.end()) stale(n);
    return it->second;
  }

  FormulaNo need(const std::optional<FormulaNo>& n) const {
    if (!n) not_applicable("missingTarget");
    entry(*n);
    return *n;
  }

  const Expr& active_goal_target() const {
    FormulaNo t = need(rec_->target);
    if (t != goal_) not_applicable("notActiveGoal", {std::to_string(t)});
    return entry(t).formula;
  }

  const Expr& assumption_ref(const std::optional<FormulaNo>& ref) const {
    FormulaNo n = need(ref);
    const FormulaEntry& e = entry(n);
    if (e.role != Role::Assumption) not_applicable("notAssumption", {std::to_string(n)});
    const auto sc = scope(d_, goal_);
    if (std::find(sc.begin(), sc.end(), n) == sc.end()) {
      throw Error(ErrorCode::OutOfScope, "error.outOfScope", {std::to_string(n)},
                  "formula " + std::to_string(n) + " is not in scope");
    }
    return e.formula;
  }

  // Target of a step that may act on the active goal or on an in-scope assumption.
  const Expr& goal_or_assumption_target(bool& is_goal) const {
    FormulaNo t = need(rec_->target);
    is_goal = entry(t).role == Role::Goal;
    if (is_goal) return active_goal_target();
    return assumption_ref(rec_->target);
  }

  const Lemma& lemma() const {
    if (!rec_->lemma) not_applicable("missingLemma");
    const Lemma* l = ctx_.find_lemma(*rec_->lemma);
    if (!l) not_applicable("lemmaNotEnabled", {*rec_->lemma});
    return *l;
  }

  std::vector<const Expr*> branch_formulas() const {
    std::vector<const Expr*> out;
    for (FormulaNo g : chain(d_, goal_)) out.push_back(&d_.formulas.at(g).formula);
    for (FormulaNo a : scope(d_, goal_)) out.push_back(&d_.formulas.at(a).formula);
    return out;
  }

  std::set<std::string> taken_names() const {
    std::set<std::string> taken;
    for (const Expr* f : branch_formulas()) {
      for (const std::string& v : free_vars(*f)) taken.insert(v);
    }
    for (const SymbolInfo& s : ctx_.signature.user_symbols()) taken.insert(s.name);
    return taken;
  }

  Expr term(Sort expected) const {
    if (!rec_->term) not_applicable("missingTerm");
    ParseOptions opts;
    opts.expected = expected;
    for (const Expr* f : branch_formulas()) {
      for (const auto& [v, s] : free_var_sorts(*f)) opts.context.emplace(v, s);
    }
    return parse(expand_shorthands(*rec_->term), ctx_.signature, opts);
  }

  Expr simp(const Expr& e) const { return simplify(e, ctx_.simplifier); }

  // --- construction ---

  ProofNode& node(NodeKind kind) {
    ProofNode n;
    n.id = d_.next_node++;
    n.kind = kind;
    n.record = *rec_;
    n.goal = goal_;
    n.parent = entry(goal_).origin;
    for (const ProofNode& p : d_.nodes) {
      if (p.goal == goal_) n.parent = p.id;
    }
    d_.nodes.push_back(std::move(n));
    node_ = static_cast<int>(d_.nodes.size()) - 1;
    return d_.nodes.back();
  }

  FormulaNo reserve() { return d_.next_number++; }

  void put(FormulaNo n, Role role, FormulaNo owner, Expr f) {
    FormulaEntry e;
    e.number = n;
    e.formula = std::move(f);
    e.role = role;
    e.owner = owner;
    e.origin = d_.nodes[node_].id;
    d_.formulas.emplace(n, std::move(e));
    d_.nodes[node_].created.push_back(n);
    if (role == Role::Goal) {
      d_.formulas.at(owner).subgoals.push_back(n);
      new_goals_.push_back(n);
    }
  }

  FormulaNo add_goal(Expr f) {
    FormulaNo n = reserve();
    put(n, Role::Goal, goal_, simp(f));
    return n;
  }

  // Assumption φ for a new child goal γ, numbered φ then γ.
  FormulaNo add_assumed_goal(Expr assumption, Expr goal) {
    FormulaNo a = reserve();
    FormulaNo g = reserve();
    put(g, Role::Goal, goal_, simp(goal));
    put(a, Role::Assumption, g, simp(assumption));
    return g;
  }

  void add_assumption(Expr f) { put(reserve(), Role::Assumption, goal_, simp(f)); }

  void close() { d_.formulas.at(goal_).closed = true; }

  void commit() {
    refresh_status(d_);
    if (!new_goals_.empty()) {
      d_.active = new_goals_.front();
    } else if (proved(d_, goal_)) {
      d_.active = next_open(goal_);
    }
    refresh_status(d_);
  }

  FormulaNo first_open_leaf(FormulaNo g) const {
    if (open_leaf(d_, g)) return g;
    for (FormulaNo c : d_.formulas.at(g).subgoals) {
      if (FormulaNo f = first_open_leaf(c)) return f;
    }
    return 0;
  }

  // Nearest open leaf: the first one below the closest ancestor that has one.
  FormulaNo next_open(FormulaNo g) const {
    for (FormulaNo cur = g; cur != 0; cur = d_.formulas.at(cur).owner) {
      if (FormulaNo f = first_open_leaf(cur)) return f;
    }
    return 0;
  }

  // --- goal-directed steps ---

  void prove_lemma() {
    const Expr& g = active_goal_target();
    Expr phi = term(Sort::Proposition);
    node(NodeKind::GoalChange);
    add_goal(phi);
    add_assumed_goal(phi, g);
  }

  void by_contradiction() {
    const Expr& g = active_goal_target();
    node(NodeKind::GoalChange);
    add_assumed_goal(mk_not(g), mk_bot());
  }

  void split_goal(std::string_view op) {
    const Expr g = active_goal_target();
    if (!g.is(op) || g.kind() != ExprKind::App) not_applicable("shape", {std::string(op)});
    node(NodeKind::GoalChange);
    if (op == sym::Iff) {
      add_goal(mk_implies(g.child(0), g.child(1)));
      add_goal(mk_implies(g.child(1), g.child(0)));
    } else {
      add_goal(g.child(0));
      add_goal(g.child(1));
    }
  }

  void intro_implication() {
    const Expr g = active_goal_target();
    if (!g.is(sym::Implies)) not_applicable("shape", {std::string(sym::Implies)});
    node(NodeKind::GoalChange);
    add_assumed_goal(g.child(0), g.child(1));
  }

  Expr instantiate(const Expr& q, const Expr& t) const {
    return substitute(q.body(), Substitution{{q.bound(), t}});
  }

  Expr fresh_instance(const Expr& q) const {
    std::string name = fresh_name(q.bound(), taken_names());
    return instantiate(q, Expr::var(name, q.bound_sort()));
  }

  void intro_forall() {
    const Expr g = active_goal_target();
    if (!g.is_quant() || g.name() != sym::Forall) not_applicable("shape", {std::string(sym::Forall)});
    Expr body = fresh_instance(g);
    node(NodeKind::GoalChange);
    add_goal(body);
  }

  void intro_exists() {
    const Expr g = active_goal_target();
    if (!g.is_quant() || g.name() != sym::Exists) not_applicable("shape", {std::string(sym::Exists)});
    Expr t = term(g.bound_sort());
    node(NodeKind::GoalChange);
    add_goal(instantiate(g, t));
  }

  void prove_disjunction() {
    const Expr g = active_goal_target();
    if (!g.is(sym::Or)) not_applicable("shape", {std::string(sym::Or)});
    if (!rec_->side || (*rec_->side != "left" && *rec_->side != "right")) {
      not_applicable("missingSide");
    }
    const bool left = *rec_->side == "left";
    node(NodeKind::GoalChange);
    add_assumed_goal(mk_not(g.child(left ? 1 : 0)), g.child(left ? 0 : 1));
  }

  void close_by_assumption() {
    const Expr g = active_goal_target();
    if (rec_->other) {
      if (!alpha_eq(assumption_ref(rec_->other), g)) not_applicable("notSameFormula");
    } else if (!g.is(sym::Top)) {
      not_applicable("missingOther");
    }
    node(NodeKind::GoalChange);
    close();
  }

  Expr rewritten(const Expr& sub) const {
    const Lemma& l = lemma();
    if (!rec_->orientation || *rec_->orientation == Orientation::Whole) {
      not_applicable("missingOrientation");
    }
    const LemmaBlock b = strip_block(l.statement);
    if (!(b.matrix.is(sym::Iff) || b.matrix.is(sym::Eq))) not_applicable("notRewriteLemma");
    const bool left = *rec_->orientation == Orientation::Left;
    const Expr& from = b.matrix.child(left ? 0 : 1);
    const Expr& to = b.matrix.child(left ? 1 : 0);
    auto m = match_pattern(from, b.vars, sub);
    if (!m) not_applicable("noMatch", {l.qualified_id()});
    if (!all_bound(to, b.vars, *m)) not_applicable("unboundVariable", {l.qualified_id()});
    return substitute(to, *m);
  }

  void rewrite(bool on_goal) {
    const Expr f = on_goal ? active_goal_target() : assumption_ref(rec_->target);
    if (!valid_path(f, rec_->path)) {
      throw Error(ErrorCode::InvalidPath, "error.invalidPath", {path_to_string(rec_->path)},
                  "invalid path " + path_to_string(rec_->path));
    }
    Expr result = simp(replace_at(f, rec_->path, rewritten(subterm_at(f, rec_->path))));
    if (alpha_eq(result, f)) not_applicable("noChange");
    node(on_goal ? NodeKind::GoalChange : NodeKind::Forward);
    if (on_goal) {
      add_goal(result);
    } else {
      add_assumption(result);
    }
  }

  void close_by_lemma() {
    const Expr g = active_goal_target();
    const Lemma& l = lemma();
    const LemmaBlock b = strip_block(l.statement);
    if (!match_pattern(b.matrix, b.vars, g)) not_applicable("noMatch", {l.qualified_id()});
    node(NodeKind::GoalChange);
    close();
  }

  // Instance of one side of a P ⇒ Q lemma after matching the other side.
  Expr lemma_implication(const Expr& f, bool forward) const {
    const Lemma& l = lemma();
    const LemmaBlock b = strip_block(l.statement);
    if (!b.matrix.is(sym::Implies)) not_applicable("notImplicationLemma", {l.qualified_id()});
    const Expr& from = b.matrix.child(forward ? 0 : 1);
    const Expr& to = b.matrix.child(forward ? 1 : 0);
    auto m = match_pattern(from, b.vars, f);
    if (!m) not_applicable("noMatch", {l.qualified_id()});
    if (!all_bound(to, b.vars, *m)) not_applicable("unboundVariable", {l.qualified_id()});
    return substitute(to, *m);
  }

  void apply_lemma_backward() {
    const Expr g = active_goal_target();
    Expr premise = lemma_implication(g, false);
    node(NodeKind::GoalChange);
    add_goal(premise);
  }

  // --- forward steps ---

  void take_this() {
    const Expr a = assumption_ref(rec_->target);
    if (!a.is_quant() || a.name() != sym::Exists) not_applicable("shape", {std::string(sym::Exists)});
    Expr body = fresh_instance(a);
    node(NodeKind::Forward);
    add_assumption(body);
  }

  void specialize() {
    const Expr a = assumption_ref(rec_->target);
    if (!a.is_quant() || a.name() != sym::Forall) not_applicable("shape", {std::string(sym::Forall)});
    Expr t = term(a.bound_sort());
    node(NodeKind::Forward);
    add_assumption(instantiate(a, t));
  }

  void elim_pair(std::string_view op) {
    const Expr a = assumption_ref(rec_->target);
    if (!a.is(op) || a.kind() != ExprKind::App) not_applicable("shape", {std::string(op)});
    node(NodeKind::Forward);
    if (op == sym::Iff) {
      add_assumption(mk_implies(a.child(0), a.child(1)));
      add_assumption(mk_implies(a.child(1), a.child(0)));
    } else {
      add_assumption(a.child(0));
      add_assumption(a.child(1));
    }
  }

  void modus_ponens() {
    const Expr a = assumption_ref(rec_->target);
    const Expr b = assumption_ref(rec_->other);
    Expr result;
    if (a.is(sym::Implies) && alpha_eq(a.child(0), b)) {
      result = a.child(1);
    } else if (a.is(sym::Iff) && alpha_eq(a.child(0), b)) {
      result = a.child(1);
    } else if (a.is(sym::Iff) && alpha_eq(a.child(1), b)) {
      result = a.child(0);
    } else {
      not_applicable("antecedentMismatch");
    }
    node(NodeKind::Forward);
    add_assumption(result);
  }

  void case_analysis() {
    const Expr a = assumption_ref(rec_->target);
    if (!a.is(sym::Or)) not_applicable("shape", {std::string(sym::Or)});
    const Expr g = entry(goal_).formula;
    node(NodeKind::GoalChange);
    add_assumed_goal(a.child(0), g);
    add_assumed_goal(a.child(1), g);
  }

  void excluded_middle() {
    Expr phi;
    if (rec_->term) {
      phi = term(Sort::Proposition);
    } else {
      bool is_goal = false;
      const Expr f = goal_or_assumption_target(is_goal);
      if (!valid_path(f, rec_->path)) {
        throw Error(ErrorCode::InvalidPath, "error.invalidPath", {path_to_string(rec_->path)},
                    "invalid path " + path_to_string(rec_->path));
      }
      phi = subterm_at(f, rec_->path);
      if (phi.sort() != Sort::Proposition) not_applicable("notProposition");
      const auto binders = binders_along(f, rec_->path);
      for (const std::string& v : free_vars(phi)) {
        if (std::find(binders.begin(), binders.end(), v) != binders.end()) {
          not_applicable("boundVariable", {v});
        }
      }
    }
    const Expr g = entry(goal_).formula;
    node(NodeKind::GoalChange);
    add_assumed_goal(phi, g);
    add_assumed_goal(mk_not(phi), g);
  }

  void contradiction() {
    const Expr a = assumption_ref(rec_->target);
    if (rec_->other) {
      const Expr b = assumption_ref(rec_->other);
      if (!contradictory(a, b, ctx_.simplifier)) not_applicable("notContradictory");
    } else if (rec_->lemma) {
      const Lemma& l = lemma();
      const LemmaBlock blk = strip_block(l.statement);
      if (!blk.matrix.is(sym::Not) || !match_pattern(blk.matrix.child(0), blk.vars, a)) {
        not_applicable("noMatch", {l.qualified_id()});
      }
    } else if (!a.is(sym::Bot)) {
      not_applicable("missingOther");
    }
    node(NodeKind::GoalChange);
    close();
  }

  void equality_rewrite() {
    const Expr eq = assumption_ref(rec_->other);
    if (!eq.is(sym::Eq)) not_applicable("shape", {std::string(sym::Eq)});
    if (!rec_->direction || (*rec_->direction != "ltr" && *rec_->direction != "rtl")) {
      not_applicable("missingDirection");
    }
    const bool ltr = *rec_->direction == "ltr";
    const Expr& from = eq.child(ltr ? 0 : 1);
    const Expr& to = eq.child(ltr ? 1 : 0);
    bool is_goal = false;
    const Expr f = goal_or_assumption_target(is_goal);
    if (!valid_path(f, rec_->path)) {
      throw Error(ErrorCode::InvalidPath, "error.invalidPath", {path_to_string(rec_->path)},
                  "invalid path " + path_to_string(rec_->path));
    }
    if (!alpha_eq(subterm_at(f, rec_->path), from)) not_applicable("noMatch");
    const auto binders = binders_along(f, rec_->path);
    for (const Expr* side : {&from, &to}) {
      for (const std::string& v : free_vars(*side)) {
        if (std::find(binders.begin(), binders.end(), v) != binders.end()) {
          not_applicable("boundVariable", {v});
        }
      }
    }
    Expr result = simp(replace_at(f, rec_->path, to));
    if (alpha_eq(result, f)) not_applicable("noChange");
    node(is_goal ? NodeKind::GoalChange : NodeKind::Forward);
    if (is_goal) {
      add_goal(result);
    } else {
      add_assumption(result);
    }
  }

  void apply_lemma_forward() {
    const Expr a = assumption_ref(rec_->target);
    Expr result = lemma_implication(a, true);
    node(NodeKind::Forward);
    add_assumption(result);
  }

  // --- state actions ---

  void set_active(const StepRecord& r) {
    if (!r.target) not_applicable("missingTarget");
    const FormulaEntry& e = entry(*r.target);
    if (e.role != Role::Goal || !open_leaf(d_, *r.target)) {
      not_applicable("goalNotOpen", {std::to_string(*r.target)});
    }
    d_.active = *r.target;
    refresh_status(d_);
  }

  void delete_last(const StepRecord& r) {
    if (!r.target) not_applicable("missingTarget");
    if (entry(*r.target).role != Role::Goal) not_applicable("notGoal", {std::to_string(*r.target)});
    const auto ch = chain(d_, *r.target);
    int last = -1;
    for (std::size_t i = 0; i < d_.nodes.size(); ++i) {
      if (std::find(ch.begin(), ch.end(), d_.nodes[i].goal) != ch.end()) last = static_cast<int>(i);
    }
    if (last < 0) {
      throw Error(ErrorCode::EmptyBranch, "error.emptyBranch", {std::to_string(*r.target)},
                  "no step to delete in this branch");
    }
    const ProofNode victim = d_.nodes[last];
    // Goals below the victim: those it created and everything under them.
    std::set<FormulaNo> dead_goals;
    std::function<void(FormulaNo)> mark = [&](FormulaNo g) {
      dead_goals.insert(g);
      for (FormulaNo c : d_.formulas.at(g).subgoals) mark(c);
    };
    for (FormulaNo n : victim.created) {
      if (d_.formulas.at(n).role == Role::Goal) mark(n);
    }
    std::set<int> dead_nodes{victim.id};
    for (const ProofNode& p : d_.nodes) {
      if (dead_goals.count(p.goal)) dead_nodes.insert(p.id);
    }
    std::set<FormulaNo> dead_formulas;
    for (const ProofNode& p : d_.nodes) {
      if (dead_nodes.count(p.id)) dead_formulas.insert(p.created.begin(), p.created.end());
    }
    std::erase_if(d_.nodes, [&](const ProofNode& p) { return dead_nodes.count(p.id) > 0; });
    for (FormulaNo n : dead_formulas) d_.formulas.erase(n);
    FormulaEntry& owner = d_.formulas.at(victim.goal);
    std::erase_if(owner.subgoals, [&](FormulaNo g) { return dead_formulas.count(g) > 0; });
    if (victim.kind == NodeKind::GoalChange) owner.closed = false;
    d_.next_number = d_.formulas.empty() ? 1 : d_.formulas.rbegin()->first + 1;
    d_.active = victim.goal;
    refresh_status(d_);
  }

  const ProofContext& ctx_;
  ProofData d_;
  FormulaNo goal_ = 0;
  const StepRecord* rec_ = nullptr;
  int node_ = -1;
  std::vector<FormulaNo> new_goals_;
};

ProofData execute(const ProofContext& ctx, const ProofData& d, const StepRecord& r) {
  Engine e(ctx, d);
  e.run(r);
  return e.take();
}

}  // namespace

// --- ProofState --------------------------------------------------------------------

const FormulaEntry* ProofState::find(FormulaNo n) const {
  auto it = data_.formulas.find(n);
  return it == data_.formulas.end() ? nullptr : &it->second;
}

const FormulaEntry& ProofState::formula(FormulaNo n) const {
  if (const FormulaEntry* e = find(n)) return *e;
  throw Error(ErrorCode::NotFound, "error.formulaNotFound", {std::to_string(n)},
              "formula " + std::to_string(n) + " does not exist");
}

std::vector<FormulaNo> ProofState::goal_chain(FormulaNo g) const { return Engine::chain(data_, g); }

std::vector<FormulaNo> ProofState::assumptions_in_scope(FormulaNo g) const {
  return Engine::scope(data_, g);
}

bool ProofState::in_scope(FormulaNo assumption) const {
  if (data_.active == 0) return false;
  const auto sc = Engine::scope(data_, data_.active);
  return std::find(sc.begin(), sc.end(), assumption) != sc.end();
}

std::vector<FormulaNo> ProofState::open_goals() const {
  std::vector<FormulaNo> out;
  for (const auto& [n, e] : data_.formulas) {
    if (e.role == Role::Goal && Engine::open_leaf(data_, n)) out.push_back(n);
  }
  return out;
}

ProofState init_proof(const Expr& goal, const Signature& sig, const std::vector<Lemma>& lemmas,
                      const SimplifierConfig& cfg) {
  if (goal.has_hole()) {
    throw Error(ErrorCode::IllFormedGoal, "error.illFormedGoal.hole", {}, "goal contains a hole");
  }
  if (goal.sort() != Sort::Proposition) {
    throw Error(ErrorCode::IllFormedGoal, "error.illFormedGoal.sort", {},
                "goal is not a proposition");
  }
  if (auto fv = free_vars(goal); !fv.empty()) {
    throw Error(ErrorCode::IllFormedGoal, "error.illFormedGoal.free", {*fv.begin()},
                "goal has free variable " + *fv.begin());
  }
  auto ctx = std::make_shared<ProofContext>();
  ctx->signature = sig;
  ctx->lemmas = lemmas;
  ctx->goal = goal;
  ctx->simplifier = cfg;
  for (const Lemma& l : lemmas) {
    for (Pattern& p : compile_lemma(l.statement, l.qualified_id())) ctx->index.insert(std::move(p));
  }
  ProofState s;
  s.ctx_ = std::move(ctx);
  FormulaEntry root;
  root.number = 1;
  root.formula = goal;
  root.role = Role::Goal;
  root.status = GoalStatus::Active;
  s.data_.formulas.emplace(1, std::move(root));
  s.data_.active = 1;
  s.data_.next_number = 2;
  return s;
}

ProofState apply_step(const ProofState& s, const StepRecord& step) {
  ProofState out = s;
  out.data_ = execute(*s.ctx_, s.data_, step);
  out.snapshots_.push_back(s.data_);
  out.done_.push_back(step);
  out.undone_.clear();
  return out;
}

ProofState undo(const ProofState& s) {
  if (s.done_.empty()) {
    throw Error(ErrorCode::NothingToUndo, "error.nothingToUndo", {}, "nothing to undo");
  }
  ProofState out = s;
  out.data_ = out.snapshots_.back();
  out.snapshots_.pop_back();
  out.undone_.push_back(out.done_.back());
  out.done_.pop_back();
  return out;
}

ProofState redo(const ProofState& s) {
  if (s.undone_.empty()) {
    throw Error(ErrorCode::NothingToRedo, "error.nothingToRedo", {}, "nothing to redo");
  }
  ProofState out = s;
  const StepRecord r = out.undone_.back();
  out.data_ = execute(*s.ctx_, s.data_, r);
  out.snapshots_.push_back(s.data_);
  out.done_.push_back(r);
  out.undone_.pop_back();
  return out;
}

ProofState delete_last_in_branch(const ProofState& s, FormulaNo goal) {
  StepRecord r;
  r.kind = StepKind::DeleteLast;
  r.target = goal;
  return apply_step(s, r);
}

ProofState set_active_goal(const ProofState& s, FormulaNo goal) {
  StepRecord r;
  r.kind = StepKind::SetActiveGoal;
  r.target = goal;
  return apply_step(s, r);
}

bool is_complete(const ProofState& s) { return Engine::proved(s.data(), 1); }

std::string_view marker(const ProofState& s, FormulaNo n) {
  const FormulaEntry& e = s.formula(n);
  if (e.role == Role::Assumption) return s.in_scope(n) ? "blue-star" : "gray-star";
  switch (e.status) {
    case GoalStatus::Proved: return "green-happy";
    case GoalStatus::Active: return "red-sad";
    case GoalStatus::Open: return "yellow-sad";
  }
  return "yellow-sad";
}

std::string canonical_serialization(const ProofState& s) {
  using nlohmann::json;
  json formulas = json::array();
  for (const auto& [n, e] : s.formulas()) {
    json f = {{"n", n},
              {"role", role_name(e.role)},
              {"text", print(e.formula)},
              {"owner", e.owner},
              {"origin", e.origin}};
    if (e.role == Role::Goal) {
      f["status"] = goal_status_name(e.status);
      f["subgoals"] = e.subgoals;
      f["closed"] = e.closed;
    }
    formulas.push_back(std::move(f));
  }
  json nodes = json::array();
  for (const ProofNode& p : s.nodes()) {
    nodes.push_back({{"id", p.id},
                     {"kind", p.kind == NodeKind::Forward ? "forward" : "goalChange"},
                     {"goal", p.goal},
                     {"parent", p.parent},
                     {"created", p.created},
                     {"record", to_json(p.record)}});
  }
  json doc = {{"active", s.data().active},
              {"next", s.data().next_number},
              {"nextNode", s.data().next_node},
              {"formulas", std::move(formulas)},
              {"nodes", std::move(nodes)}};
  return doc.dump();
}

// --- step enumeration --------------------------------------------------------------

namespace {

struct Enumerator {
  const ProofState& s;
  FormulaNo target;
  Path path;
  std::vector<StepDescriptor> out;

  StepRecord base(StepKind k) const {
    StepRecord r;
    r.kind = k;
    r.target = target;
    return r;
  }

  // Trial-applies a complete record; offers it only if it succeeds.
  void offer(StepRecord r, std::vector<std::pair<std::string, std::string>> bindings = {}) {
    ProofData after;
    try {
      after = execute(s.context(), s.data(), r);
    } catch (const Error&) {
      return;
    }
    for (const StepDescriptor& d : out) {
      if (d.record == r) return;
    }
    StepDescriptor d;
    d.record = std::move(r);
    d.label_key = "step." + std::string(step_kind_name(d.record.kind));
    d.effect_key = "effect." + std::string(step_kind_name(d.record.kind));
    for (const auto& [n, e] : after.formulas) {
      if (s.data().formulas.count(n)) continue;
      d.adds.push_back({n, e.role, print(e.formula)});
      d.effect_args.push_back(print(e.formula));
    }
    for (const auto& [n, e] : after.formulas) {
      if (e.role == Role::Goal && e.closed && !s.data().formulas.at(n).closed) {
        d.closes.push_back(n);
        d.effect_args.push_back(print(e.formula));
      }
    }
    d.bindings = std::move(bindings);
    out.push_back(std::move(d));
  }

  // A record still waiting for a term; previews use a hole in its place.
  void offer_incomplete(StepRecord r, Sort sort, std::vector<FormulaPreview> adds) {
    StepDescriptor d;
    d.record = std::move(r);
    d.needs_term = sort;
    d.label_key = "step." + std::string(step_kind_name(d.record.kind));
    d.effect_key = "effect." + std::string(step_kind_name(d.record.kind));
    for (const FormulaPreview& p : adds) d.effect_args.push_back(p.text);
    d.adds = std::move(adds);
    out.push_back(std::move(d));
  }

  void run() {
    const ProofData& d = s.data();
    const FormulaEntry& e = s.formula(target);
    if (!valid_path(e.formula, path)) {
      throw Error(ErrorCode::InvalidPath, "error.invalidPath", {path_to_string(path)},
                  "invalid path " + path_to_string(path));
    }
    const FormulaNo active = d.active;
    const bool is_goal = e.role == Role::Goal;
    if (is_goal ? target != active : !s.in_scope(target)) {
      throw Error(ErrorCode::OutOfScope, "error.outOfScope", {std::to_string(target)},
                  "formula " + std::to_string(target) + " is not in the active branch");
    }
    const Expr& f = e.formula;
    const Expr& sub = subterm_at(f, path);
    const auto scope = s.assumptions_in_scope(active);
    const Expr hole_p = Expr::hole(0, Sort::Proposition);

    // (1) always available
    if (is_goal && path.empty()) {
      offer_incomplete(base(StepKind::ProveLemma), Sort::Proposition,
                       {{0, Role::Goal, print(hole_p)},
                        {0, Role::Assumption, print(hole_p)},
                        {0, Role::Goal, print(f)}});
      offer(base(StepKind::ByContradiction));
    }

    // (2) connective-directed
    if (is_goal && path.empty()) {
      if (f.is(sym::And)) offer(base(StepKind::ProveConjuncts));
      if (f.is(sym::Implies)) offer(base(StepKind::IntroImplication));
      if (f.is(sym::Iff)) offer(base(StepKind::IntroEquivalence));
      if (f.is_quant() && f.name() == sym::Forall) offer(base(StepKind::IntroForall));
      if (f.is_quant() && f.name() == sym::Exists) {
        const Expr h = Expr::hole(0, f.bound_sort());
        offer_incomplete(base(StepKind::IntroExistsWitness), f.bound_sort(),
                         {{0, Role::Goal, print(substitute(f.body(), {{f.bound(), h}}))}});
      }
      if (f.is(sym::Or)) {
        for (const char* side : {"left", "right"}) {
          StepRecord r = base(StepKind::ProveDisjunctionClassical);
          r.side = side;
          offer(r);
        }
      }
      if (f.is(sym::Top)) offer(base(StepKind::CloseByAssumption));
      for (FormulaNo a : scope) {
        StepRecord r = base(StepKind::CloseByAssumption);
        r.other = a;
        offer(r);
      }
      for (const Lemma& l : s.context().lemmas) {
        StepRecord r = base(StepKind::CloseByLemma);
        r.lemma = l.qualified_id();
        offer(r);
      }
      for (const Lemma& l : s.context().lemmas) {
        StepRecord r = base(StepKind::ApplyLemmaBackward);
        r.lemma = l.qualified_id();
        offer(r);
      }
    }
    if (!is_goal && path.empty()) {
      if (f.is_quant() && f.name() == sym::Exists) offer(base(StepKind::TakeThis));
      if (f.is_quant() && f.name() == sym::Forall) {
        const Expr h = Expr::hole(0, f.bound_sort());
        offer_incomplete(base(StepKind::Specialize), f.bound_sort(),
                         {{0, Role::Assumption, print(substitute(f.body(), {{f.bound(), h}}))}});
      }
      if (f.is(sym::And)) offer(base(StepKind::ElimConjunction));
      if (f.is(sym::Iff)) offer(base(StepKind::ElimEquivalence));
      if (f.is(sym::Implies) || f.is(sym::Iff)) {
        for (FormulaNo a : scope) {
          StepRecord r = base(StepKind::ModusPonens);
          r.other = a;
          offer(r);
        }
      }
      if (f.is(sym::Or)) offer(base(StepKind::CaseAnalysis));
      if (f.is(sym::Bot)) offer(base(StepKind::ContradictionFromPair));
      for (FormulaNo a : scope) {
        StepRecord r = base(StepKind::ContradictionFromPair);
        r.other = a;
        offer(r);
      }
      for (const Lemma& l : s.context().lemmas) {
        StepRecord r = base(StepKind::ApplyLemmaForward);
        r.lemma = l.qualified_id();
        offer(r);
      }
    }
    if (sub.sort() == Sort::Individual) {
      for (FormulaNo a : scope) {
        for (const char* dir : {"ltr", "rtl"}) {
          StepRecord r = base(StepKind::EqualityRewrite);
          r.path = path;
          r.other = a;
          r.direction = dir;
          offer(r);
        }
      }
    }

    // (3) lemma matches on the selected subterm
    for (const MatchResult& m : s.context().index.lookup(sub)) {
      if (m.pattern.orientation == Orientation::Whole) continue;
      StepRecord r = base(is_goal ? StepKind::RewriteGoal : StepKind::RewriteAssumption);
      r.path = path;
      r.lemma = m.pattern.lemma_id;
      r.orientation = m.pattern.orientation;
      std::vector<std::pair<std::string, std::string>> bindings;
      for (const PatternVar& v : m.pattern.vars) {
        auto it = m.bindings.find(v.name);
        if (it != m.bindings.end()) bindings.emplace_back(v.name, print(it->second));
      }
      offer(r, std::move(bindings));
    }
    if (!is_goal && path.empty()) {
      for (const MatchResult& m : s.context().index.lookup(mk_not(f))) {
        if (m.pattern.orientation != Orientation::Whole) continue;
        StepRecord r = base(StepKind::ContradictionFromPair);
        r.lemma = m.pattern.lemma_id;
        offer(r);
      }
    }

    // (4) excluded middle on any proposition
    if (sub.sort() == Sort::Proposition) {
      StepRecord r = base(StepKind::ExcludedMiddleSplit);
      r.path = path;
      offer(r);
    }
  }
};

}  // namespace

std::vector<StepDescriptor> applicable_steps(const ProofState& s, FormulaNo formula,
                                             const Path& path) {
  Enumerator en{s, formula, path, {}};
  en.run();
  return std::move(en.out);
}

}  // namespace deduce
