#include "deduce/script.hpp"

#include "deduce/error.hpp"
#include "deduce/syntax.hpp"

namespace deduce {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::BadRequest, "error.badRequest", {what}, what);
}

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
json nullable(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const StepRecord& r) {
  json path = json::array();
  for (std::size_t i : r.path) path.push_back(i);
  json j = {{"kind", step_kind_name(r.kind)},
            {"target", nullable(r.target)},
            {"path", std::move(path)},
            {"term", nullable(r.term)},
            {"lemma", nullable(r.lemma)},
            {"orientation",
             r.orientation ? json(orientation_name(*r.orientation)) : json(nullptr)},
            {"side", nullable(r.side)},
            {"direction", nullable(r.direction)}};
  if (r.other) j["other"] = *r.other;
  return j;
}

StepRecord step_from_json(const json& j) {
  if (!j.is_object()) bad("step must be an object");
  StepRecord r;
  auto kind = opt<std::string>(j, "kind");
  if (!kind) bad("step has no kind");
  auto k = step_kind_from_name(*kind);
  if (!k) bad("unknown step kind '" + *kind + "'");
  r.kind = *k;
  r.target = opt<int>(j, "target");
  if (auto p = opt<std::vector<long long>>(j, "path")) {
    for (long long i : *p) {
      if (i < 0) bad("negative path index");
      r.path.push_back(static_cast<std::size_t>(i));
    }
  }
  r.term = opt<std::string>(j, "term");
  r.lemma = opt<std::string>(j, "lemma");
  if (auto o = opt<std::string>(j, "orientation")) {
    r.orientation = orientation_from_name(*o);
    if (!r.orientation) bad("unknown orientation '" + *o + "'");
  }
  r.side = opt<std::string>(j, "side");
  r.direction = opt<std::string>(j, "direction");
  r.other = opt<int>(j, "other");
  return r;
}

json to_json(const ProofScript& s) {
  json steps = json::array();
  for (const StepRecord& r : s.steps) steps.push_back(to_json(r));
  return {{"task", s.task}, {"version", s.version}, {"steps", std::move(steps)}};
}

ProofScript script_from_json(const json& j) {
  if (!j.is_object()) bad("script must be an object");
  ProofScript s;
  s.task = opt<std::string>(j, "task").value_or("");
  s.version = opt<int>(j, "version").value_or(1);
  if (s.version != 1) bad("unsupported script version " + std::to_string(s.version));
  auto it = j.find("steps");
  if (it == j.end() || !it->is_array()) bad("script has no steps array");
  for (const json& step : *it) s.steps.push_back(step_from_json(step));
  return s;
}

json to_json(const TaskDef& t) {
  json symbols = json::array();
  for (const SymbolDecl& d : t.symbols) {
    symbols.push_back({{"name", d.name}, {"arity", d.arity}, {"sort", sort_name(d.sort)}});
  }
  return {{"id", t.id},           {"name", t.name},     {"goal", t.goal},
          {"symbols", symbols},   {"lemmas", t.lemmas}, {"author", t.author},
          {"createdAt", t.created_at}};
}

TaskDef task_from_json(const json& j) {
  if (!j.is_object()) bad("task must be an object");
  TaskDef t;
  t.id = opt<std::string>(j, "id").value_or("");
  t.name = opt<std::string>(j, "name").value_or("");
  t.goal = opt<std::string>(j, "goal").value_or("");
  if (auto it = j.find("symbols"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) bad("symbols must be an array");
    for (const json& s : *it) {
      SymbolDecl d;
      d.name = opt<std::string>(s, "name").value_or("");
      d.arity = opt<std::size_t>(s, "arity").value_or(0);
      std::string sort = opt<std::string>(s, "sort").value_or("Proposition");
      if (sort == "Individual" || sort == "individual") {
        d.sort = Sort::Individual;
      } else if (sort == "Proposition" || sort == "proposition") {
        d.sort = Sort::Proposition;
      } else {
        bad("unknown sort '" + sort + "'");
      }
      if (d.name.empty()) bad("symbol without name");
      t.symbols.push_back(std::move(d));
    }
  }
  t.lemmas = opt<std::vector<std::string>>(j, "lemmas").value_or(std::vector<std::string>{});
  t.author = opt<std::string>(j, "author").value_or("");
  t.created_at = opt<std::int64_t>(j, "createdAt").value_or(0);
  return t;
}

ProofScript parse_script(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) bad("script is not valid JSON");
  return script_from_json(j);
}

TaskDef parse_task(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) bad("task is not valid JSON");
  return task_from_json(j);
}

Signature task_signature(const TaskDef& task) {
  Signature sig = Signature::builtin();
  for (const SymbolDecl& d : task.symbols) sig.add_function(d.name, d.arity, d.sort);
  return sig;
}

Expr task_goal(const TaskDef& task, const Signature& sig) {
  try {
    ParseOptions opts;
    opts.expected = Sort::Proposition;
    Expr g = parse(expand_shorthands(task.goal), sig, opts);
    if (auto fv = free_vars(g); !fv.empty()) {
      throw Error(ErrorCode::InvalidGoal, "error.invalidGoal.free", {*fv.begin()},
                  "goal has free variable " + *fv.begin());
    }
    return g;
  } catch (const ParseError& e) {
    throw Error(ErrorCode::InvalidGoal, e.key(), e.args(), e.what());
  }
}

TaskDef normalize_task(TaskDef draft) {
  if (draft.name.empty()) {
    throw Error(ErrorCode::BadRequest, "error.taskNameEmpty", {}, "task name is empty");
  }
  Signature sig = task_signature(draft);
  draft.goal = print(task_goal(draft, sig));
  resolve_lemmas(draft.lemmas);
  return draft;
}

ProofState start_proof(const TaskDef& task) {
  Signature sig = task_signature(task);
  return init_proof(task_goal(task, sig), sig, resolve_lemmas(task.lemmas));
}

ProofState replay(const ProofScript& script, const TaskDef& task) {
  if (!script.task.empty() && !task.id.empty() && script.task != task.id) {
    throw ReplayError(0, Error(ErrorCode::BadRequest, "error.scriptTaskMismatch",
                               {script.task, task.id}, "script belongs to another task"));
  }
  ProofState s = start_proof(task);
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    try {
      s = apply_step(s, script.steps[i]);
    } catch (const ReplayError&) {
      throw;
    } catch (const Error& e) {
      throw ReplayError(i, e);
    }
  }
  return s;
}

}  // namespace deduce
