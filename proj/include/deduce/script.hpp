#pragma once

// Persistent formats: task definitions and proof scripts (JSON), plus replay.

#include <cstdint>
#include <string>
#include <vector>

#include "deduce/kernel.hpp"
#include "json.hpp"

namespace deduce {

struct SymbolDecl {
  std::string name;
  std::size_t arity = 0;
  Sort sort = Sort::Proposition;  // result sort; arguments are individuals
  friend bool operator==(const SymbolDecl&, const SymbolDecl&) = default;
};

struct TaskDef {
  std::string id;
  std::string name;
  std::string goal;                  // canonical text
  std::vector<SymbolDecl> symbols;
  std::vector<std::string> lemmas;   // selectors, e.g. "logic/*", "zf/subseteq-def"
  std::string author;
  std::int64_t created_at = 0;       // unix seconds
};

struct ProofScript {
  std::string task;
  int version = 1;
  std::vector<StepRecord> steps;
};

// Signature of a task: built-ins plus declared symbols. Throws Error(SortMismatch).
Signature task_signature(const TaskDef& task);
// Parses and checks the goal. Throws Error(InvalidGoal) with the parser's detail.
Expr task_goal(const TaskDef& task, const Signature& sig);
// Validates name, goal and lemma selectors; returns the draft with its goal
// rewritten to canonical text. Throws InvalidGoal / UnknownLemma / BadRequest.
TaskDef normalize_task(TaskDef draft);

ProofState start_proof(const TaskDef& task);

// init_proof then apply_step per record; on failure throws ReplayError with
// the 0-based index of the offending record.
ProofState replay(const ProofScript& script, const TaskDef& task);

nlohmann::json to_json(const StepRecord& r);
StepRecord step_from_json(const nlohmann::json& j);  // throws Error(BadRequest)
nlohmann::json to_json(const ProofScript& s);
ProofScript script_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaskDef& t);
TaskDef task_from_json(const nlohmann::json& j);

// Read/parse helpers that map JSON syntax errors to Error(BadRequest).
ProofScript parse_script(const std::string& text);
TaskDef parse_task(const std::string& text);

}  // namespace deduce
