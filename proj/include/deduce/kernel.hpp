#pragma once

// Proof kernel: proof state, step repertoire, proof-by-pointing step
// enumeration, undo/redo and branch deletion.
//
// Formulas are numbered globally in creation order. Every goal owns a proof
// branch; an assumption belongs to the goal it was introduced for and is
// visible from that goal and every goal below it. Nothing ever removes an
// assumption from a live branch.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deduce/expr.hpp"
#include "deduce/pattern_index.hpp"
#include "deduce/simplify.hpp"
#include "deduce/theory.hpp"

namespace deduce {

using FormulaNo = int;

enum class StepKind {
  // Goal-directed.
  ProveLemma,
  ByContradiction,
  ProveConjuncts,
  IntroImplication,
  IntroEquivalence,
  IntroForall,
  IntroExistsWitness,
  ProveDisjunctionClassical,
  CloseByAssumption,
  RewriteGoal,
  CloseByLemma,
  ApplyLemmaBackward,
  // Forward.
  TakeThis,
  Specialize,
  ElimConjunction,
  ElimEquivalence,
  ModusPonens,
  CaseAnalysis,
  ExcludedMiddleSplit,
  ContradictionFromPair,
  RewriteAssumption,
  EqualityRewrite,
  ApplyLemmaForward,
  // State actions; recorded in scripts so that replay is exact.
  SetActiveGoal,
  DeleteLast,
};

std::string_view step_kind_name(StepKind k);
std::optional<StepKind> step_kind_from_name(std::string_view s);

// One entry of a proof script. Which fields are used depends on the kind:
//   target     clicked formula (goal steps: the active goal)
//   other      second formula: assumption closing a goal, antecedent for
//              ModusPonens, partner for ContradictionFromPair, equation for
//              EqualityRewrite
//   term       canonical text of a user-supplied term or formula
//   lemma      qualified lemma id, e.g. "zf/subseteq-def"
//   side       "left"|"right" for ProveDisjunctionClassical
//   direction  "ltr"|"rtl" for EqualityRewrite
struct StepRecord {
  StepKind kind = StepKind::ByContradiction;
  std::optional<FormulaNo> target;
  Path path;
  std::optional<std::string> term;
  std::optional<std::string> lemma;
  std::optional<Orientation> orientation;
  std::optional<std::string> side;
  std::optional<std::string> direction;
  std::optional<FormulaNo> other;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

enum class Role { Goal, Assumption };
enum class GoalStatus { Active, Open, Proved };
enum class NodeKind { Forward, GoalChange };

std::string_view role_name(Role r);
std::string_view goal_status_name(GoalStatus s);

struct FormulaEntry {
  FormulaNo number = 0;
  Expr formula;
  Role role = Role::Goal;
  // Assumptions: the goal whose branch they belong to. Goals: parent goal (0 for the root).
  FormulaNo owner = 0;
  GoalStatus status = GoalStatus::Open;  // goals only
  int origin = -1;                       // creating node id; -1 for the root goal
  // Goals only.
  std::vector<FormulaNo> subgoals;
  bool closed = false;  // proved directly by a closing step
};

struct ProofNode {
  int id = 0;
  NodeKind kind = NodeKind::Forward;
  StepRecord record;
  FormulaNo goal = 0;  // the goal that was active when the step was applied
  int parent = -1;     // previous node on the same branch
  std::vector<FormulaNo> created;
};

// Immutable per-task data shared by all states of one proof.
struct ProofContext {
  Signature signature;
  std::vector<Lemma> lemmas;
  LemmaIndex index;
  Expr goal;
  SimplifierConfig simplifier;

  const Lemma* find_lemma(std::string_view qualified_id) const;
};

struct ProofData {
  std::map<FormulaNo, FormulaEntry> formulas;
  std::vector<ProofNode> nodes;  // live nodes in application order
  FormulaNo active = 0;          // 0 when no goal is open
  FormulaNo next_number = 1;
  int next_node = 0;
};

class ProofState {
 public:
  const ProofContext& context() const { return *ctx_; }
  std::shared_ptr<const ProofContext> shared_context() const { return ctx_; }
  const ProofData& data() const { return data_; }
  const std::map<FormulaNo, FormulaEntry>& formulas() const { return data_.formulas; }
  const FormulaEntry& formula(FormulaNo n) const;  // throws NotFound
  const FormulaEntry* find(FormulaNo n) const;
  FormulaNo active_goal() const { return data_.active; }
  const std::vector<ProofNode>& nodes() const { return data_.nodes; }

  // Records applied since init, in order; replaying them reproduces this state.
  const std::vector<StepRecord>& history() const { return done_; }
  const std::vector<StepRecord>& redo_stack() const { return undone_; }
  bool can_undo() const { return !done_.empty(); }
  bool can_redo() const { return !undone_.empty(); }

  // Goals from the root down to g.
  std::vector<FormulaNo> goal_chain(FormulaNo g) const;
  // Assumptions usable while proving g, ascending.
  std::vector<FormulaNo> assumptions_in_scope(FormulaNo g) const;
  bool in_scope(FormulaNo assumption) const;
  std::vector<FormulaNo> open_goals() const;  // unproved leaf goals

 private:
  friend ProofState init_proof(const Expr&, const Signature&, const std::vector<Lemma>&,
                               const SimplifierConfig&);
  friend ProofState apply_step(const ProofState&, const StepRecord&);
  friend ProofState undo(const ProofState&);
  friend ProofState redo(const ProofState&);

  std::shared_ptr<const ProofContext> ctx_;
  ProofData data_;
  std::vector<StepRecord> done_;
  std::vector<ProofData> snapshots_;  // data before each done_ record
  std::vector<StepRecord> undone_;
};

// A step offered for a clicked subterm.
struct FormulaPreview {
  FormulaNo number = 0;  // 0 while a payload is still missing
  Role role = Role::Assumption;
  std::string text;
};

struct StepDescriptor {
  StepRecord record;
  // Set when the record still needs a user-supplied term of this sort.
  std::optional<Sort> needs_term;
  std::string label_key;   // "step.<Kind>"
  std::string effect_key;  // "effect.<Kind>"
  std::vector<std::string> effect_args;
  std::vector<FormulaPreview> adds;
  std::vector<FormulaNo> closes;  // goals this step would prove directly
  // Lemma matches: pattern variable -> printed term.
  std::vector<std::pair<std::string, std::string>> bindings;

  bool complete() const { return !needs_term.has_value(); }
};

// Starts a proof. The statement itself is kept as entered; formulas
// introduced by later steps are simplified. Throws Error(IllFormedGoal).
ProofState init_proof(const Expr& goal, const Signature& sig, const std::vector<Lemma>& lemmas,
                      const SimplifierConfig& cfg = {});

std::vector<StepDescriptor> applicable_steps(const ProofState& s, FormulaNo formula,
                                             const Path& path);

// Throws Error(NotApplicable | StaleState | OutOfScope | InvalidPath | ...).
ProofState apply_step(const ProofState& s, const StepRecord& step);
ProofState undo(const ProofState& s);  // Error(NothingToUndo)
ProofState redo(const ProofState& s);  // Error(NothingToRedo)
ProofState delete_last_in_branch(const ProofState& s, FormulaNo goal);  // Error(EmptyBranch)
ProofState set_active_goal(const ProofState& s, FormulaNo goal);
bool is_complete(const ProofState& s);

// Display marker of a formula relative to the active goal:
// "blue-star", "gray-star", "red-sad", "yellow-sad" or "green-happy".
std::string_view marker(const ProofState& s, FormulaNo n);

// Byte-stable serialization of the proof content (formulas, nodes, active
// goal, numbering); history stacks are excluded.
std::string canonical_serialization(const ProofState& s);

}  // namespace deduce
