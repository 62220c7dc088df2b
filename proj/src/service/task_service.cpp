#include "deduce/service/task_service.hpp"

#include <chrono>
#include <utility>

#include "deduce/error.hpp"
#include "deduce/script.hpp"
#include "deduce/views.hpp"

namespace deduce::service {

using nlohmann::json;

namespace {

[[noreturn]] void unauthenticated() {
  throw Error(ErrorCode::Unauthorized, "error.unauthenticated", {}, "authentication required");
}

[[noreturn]] void forbidden() {
  throw Error(ErrorCode::Unauthorized, "error.forbidden", {}, "not allowed");
}

[[noreturn]] void bad_request(const std::string& what) {
  throw Error(ErrorCode::BadRequest, "error.badRequest", {what}, what);
}

json user_json(const UserAccount& u) {
  return {{"id", u.id}, {"login", u.login}, {"role", user_role_name(u.role)}, {"locale", u.locale}};
}

json task_summary(const TaskDef& t) {
  return {{"id", t.id},
          {"name", t.name},
          {"goal", t.goal},
          {"author", t.author},
          {"createdAt", t.created_at}};
}

std::string string_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) bad_request(std::string("missing field '") + key + "'");
  return it->get<std::string>();
}

ProofScript script_of(const ProofState& s, const std::string& task) {
  return ProofScript{task, 1, s.history()};
}

}  // namespace

std::vector<TaskDef> demo_tasks() {
  TaskDef barber;
  barber.id = "barber";
  barber.name = "Barber paradox";
  barber.goal = "¬∃A∀B(shaves(A,B) ⇔ ¬shaves(B,B))";
  barber.symbols = {{"shaves", 2, Sort::Proposition}};
  barber.lemmas = {"logic/*"};
  barber.author = "demo";
  barber.created_at = 0;

  TaskDef powerset;
  powerset.id = "union-powerset";
  powerset.name = "Union of powerset";
  powerset.goal = "⋃(𝒫(A)) = A";
  powerset.symbols = {{"A", 0, Sort::Individual}};
  powerset.lemmas = {"zf/*"};
  powerset.author = "demo";
  powerset.created_at = 1;
  return {barber, powerset};
}

TaskService::TaskService(Repository& repo, ServiceOptions options)
    : repo_(repo), options_(std::move(options)) {}

std::int64_t TaskService::now() const {
  if (options_.clock) return options_.clock();
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// --- accounts ---------------------------------------------------------------------

json TaskService::login(const std::string& login, const std::string& password,
                        const std::string& locale) {
  auto u = repo_.user_by_login(login);
  if (!u || !verify_password(u->password_hash, password)) {
    throw Error(ErrorCode::Unauthorized, "error.invalidCredentials", {}, "wrong login or password");
  }
  std::string token = random_hex(24);
  repo_.add_token(token, u->id, now());
  return {{"token", token},
          {"user", user_json(*u)},
          {"message", message_json(catalog(locale), "view.loggedIn", {u->login})}};
}

UserAccount TaskService::ensure_user(const std::string& login, const std::string& password,
                                     UserRole role, const std::string& locale) {
  if (auto u = repo_.user_by_login(login)) return *u;
  UserAccount u;
  u.id = "u-" + random_hex(8);
  u.login = login;
  u.role = role;
  u.password_hash = hash_password(password, options_.hash_cost);
  u.locale = locale == "pl" ? "pl" : "en";
  repo_.add_user(u);
  return u;
}

json TaskService::create_user(const Caller& c, const json& body) {
  require_teacher(c);
  if (!body.is_object()) bad_request("body must be an object");
  std::string login = string_field(body, "login");
  std::string password = string_field(body, "password");
  if (login.empty() || password.empty()) bad_request("login and password must not be empty");
  auto role = user_role_from_name(body.value("role", std::string("student")));
  if (!role) bad_request("role must be student or teacher");
  if (repo_.user_by_login(login)) {
    throw Error(ErrorCode::Conflict, "error.loginTaken", {login}, "login already taken");
  }
  return {{"user", user_json(ensure_user(login, password, *role, body.value("locale", "en")))}};
}

UserAccount TaskService::authenticate(const Caller& c) {
  if (c.token.empty()) unauthenticated();
  auto uid = repo_.token_user(c.token);
  if (!uid) unauthenticated();
  auto u = repo_.user_by_id(*uid);
  if (!u) unauthenticated();
  return *u;
}

UserAccount TaskService::require_teacher(const Caller& c) {
  UserAccount u = authenticate(c);
  if (u.role != UserRole::Teacher) forbidden();
  return u;
}

// --- tasks ------------------------------------------------------------------------

json TaskService::list_tasks(const Caller& c) {
  authenticate(c);
  json out = json::array();
  for (const TaskDef& t : repo_.tasks()) out.push_back(task_summary(t));
  return {{"tasks", std::move(out)}};
}

json TaskService::get_task(const Caller& c, const std::string& id) {
  authenticate(c);
  auto t = repo_.task(id);
  if (!t) throw Error(ErrorCode::NotFound, "error.taskNotFound", {id}, "no task " + id);
  return {{"task", to_json(*t)}};
}

TaskDef TaskService::import_task(TaskDef task) {
  if (task.id.empty()) task.id = "t-" + random_hex(6);
  task = normalize_task(std::move(task));
  start_proof(task);  // rejects ill-formed goals before anything is stored
  repo_.put_task(task);
  return task;
}

json TaskService::create_task(const Caller& c, const json& draft) {
  UserAccount u = require_teacher(c);
  TaskDef t = task_from_json(draft);
  t.id = "t-" + random_hex(6);
  t.author = u.login;
  t.created_at = now();
  try {
    t = import_task(std::move(t));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IllFormedGoal) {
      throw Error(ErrorCode::InvalidGoal, e.key(), e.args(), e.what());
    }
    throw;
  }
  return {{"task", to_json(t)}};
}

// --- sessions ---------------------------------------------------------------------

void TaskService::authorize(const UserAccount& u, const SessionRecord& s, bool write) const {
  if (u.id == s.user_id) return;
  if (!write && u.role == UserRole::Teacher) return;
  forbidden();
}

std::shared_ptr<TaskService::Live> TaskService::live(const std::string& id) {
  std::lock_guard lock(sessions_mu_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  auto rec = repo_.session(id);
  if (!rec) throw Error(ErrorCode::NotFound, "error.sessionNotFound", {id}, "no session " + id);
  auto task = repo_.task(rec->task_id);
  if (!task) {
    throw Error(ErrorCode::NotFound, "error.taskNotFound", {rec->task_id}, "no task " + rec->task_id);
  }
  auto l = std::make_shared<Live>();
  l->record = *rec;
  ProofScript script;
  try {
    script = parse_script(rec->script);
  } catch (const Error& e) {
    throw ReplayError(0, e);
  }
  l->state = replay(script, *task);
  sessions_.emplace(id, l);
  return l;
}

json TaskService::session_body(const Live& l, const Catalog& cat) const {
  return {{"session",
           {{"id", l.record.id},
            {"taskId", l.record.task_id},
            {"userId", l.record.user_id},
            {"updatedAt", l.record.updated_at}}},
          {"view", render_view(l.state, cat)}};
}

json TaskService::start_session(const Caller& c, const std::string& task_id) {
  UserAccount u = authenticate(c);
  auto task = repo_.task(task_id);
  if (!task) throw Error(ErrorCode::NotFound, "error.taskNotFound", {task_id}, "no task " + task_id);
  auto l = std::make_shared<Live>();
  l->state = start_proof(*task);
  l->record.id = "s-" + random_hex(8);
  l->record.user_id = u.id;
  l->record.task_id = task->id;
  l->record.script = to_json(script_of(l->state, task->id)).dump();
  l->record.updated_at = now();
  repo_.put_session(l->record);
  {
    std::lock_guard lock(sessions_mu_);
    sessions_.emplace(l->record.id, l);
  }
  return session_body(*l, catalog(c.locale));
}

json TaskService::get_session(const Caller& c, const std::string& id) {
  UserAccount u = authenticate(c);
  auto l = live(id);
  std::lock_guard lock(l->mu);
  authorize(u, l->record, false);
  return session_body(*l, catalog(c.locale));
}

template <typename F>
json TaskService::mutate(const Caller& c, const std::string& id, F&& f) {
  UserAccount u = authenticate(c);
  auto l = live(id);
  std::lock_guard lock(l->mu);
  authorize(u, l->record, true);
  ProofState next = f(l->state);
  SessionRecord rec = l->record;
  rec.script = to_json(script_of(next, rec.task_id)).dump();
  rec.updated_at = now();
  repo_.put_session(rec);
  l->record = std::move(rec);
  l->state = std::move(next);
  return session_body(*l, catalog(c.locale));
}

json TaskService::step(const Caller& c, const std::string& id, const json& record) {
  StepRecord r = step_from_json(record);
  return mutate(c, id, [&](const ProofState& s) { return apply_step(s, r); });
}

json TaskService::undo(const Caller& c, const std::string& id) {
  return mutate(c, id, [](const ProofState& s) { return deduce::undo(s); });
}

json TaskService::redo(const Caller& c, const std::string& id) {
  return mutate(c, id, [](const ProofState& s) { return deduce::redo(s); });
}

json TaskService::delete_last(const Caller& c, const std::string& id, FormulaNo goal) {
  return mutate(c, id, [&](const ProofState& s) { return delete_last_in_branch(s, goal); });
}

json TaskService::set_active_goal(const Caller& c, const std::string& id, FormulaNo goal) {
  return mutate(c, id, [&](const ProofState& s) { return deduce::set_active_goal(s, goal); });
}

json TaskService::applicable(const Caller& c, const std::string& id, FormulaNo formula,
                             const std::string& path) {
  UserAccount u = authenticate(c);
  Path p = path_from_string(path);
  auto l = live(id);
  ProofState snapshot = [&] {
    std::lock_guard lock(l->mu);
    authorize(u, l->record, false);
    return l->state;
  }();
  const Catalog& cat = catalog(c.locale);
  json steps = json::array();
  for (const StepDescriptor& d : applicable_steps(snapshot, formula, p)) {
    steps.push_back(render_descriptor(d, snapshot, cat));
  }
  return {{"formula", formula}, {"path", path}, {"steps", std::move(steps)}};
}

// --- solutions --------------------------------------------------------------------

json TaskService::save_solution(const Caller& c, const std::string& session_id) {
  UserAccount u = authenticate(c);
  auto l = live(session_id);
  std::lock_guard lock(l->mu);
  authorize(u, l->record, true);
  SolutionRecord sol;
  sol.id = "sol-" + random_hex(8);
  sol.user_id = u.id;
  sol.task_id = l->record.task_id;
  sol.session_id = session_id;
  sol.script = to_json(script_of(l->state, l->record.task_id)).dump();
  sol.created_at = now();
  repo_.add_solution(sol);
  return {{"solutionId", sol.id},
          {"complete", is_complete(l->state)},
          {"message", message_json(catalog(c.locale), "view.solutionSaved", {sol.id})}};
}

json TaskService::load_solution(const Caller& c, const std::string& solution_id) {
  UserAccount u = authenticate(c);
  auto sol = repo_.solution(solution_id);
  if (!sol) {
    throw Error(ErrorCode::NotFound, "error.solutionNotFound", {solution_id},
                "no solution " + solution_id);
  }
  if (u.id != sol->user_id && u.role != UserRole::Teacher) forbidden();
  auto task = repo_.task(sol->task_id);
  if (!task) {
    throw Error(ErrorCode::NotFound, "error.taskNotFound", {sol->task_id}, "no task " + sol->task_id);
  }
  ProofScript script;
  try {
    script = parse_script(sol->script);
  } catch (const Error& e) {
    throw ReplayError(0, e);
  }
  const Catalog& cat = catalog(c.locale);
  // The full replay validates the script before any views are produced.
  ProofState final_state = replay(script, *task);
  json views = json::array();
  ProofState s = start_proof(*task);
  views.push_back(render_view(s, cat));
  for (const StepRecord& r : script.steps) {
    s = apply_step(s, r);
    views.push_back(render_view(s, cat));
  }
  return {{"solution",
           {{"id", sol->id},
            {"userId", sol->user_id},
            {"taskId", sol->task_id},
            {"sessionId", sol->session_id},
            {"createdAt", sol->created_at}}},
          {"script", to_json(script)},
          {"complete", is_complete(final_state)},
          {"views", std::move(views)}};
}

void TaskService::seed_demos(const std::string& teacher_login,
                             const std::string& teacher_password) {
  ensure_user(teacher_login, teacher_password, UserRole::Teacher);
  for (const TaskDef& t : demo_tasks()) import_task(t);
}

}  // namespace deduce::service
