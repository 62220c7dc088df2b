#pragma once

// Multi-user façade over the proof kernel: accounts, task catalog, live proof
// sessions and stored solutions. Methods return JSON response bodies and
// throw deduce::Error; the HTTP layer only maps routes and status codes.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "deduce/i18n.hpp"
#include "deduce/kernel.hpp"
#include "deduce/service/auth.hpp"
#include "deduce/service/repository.hpp"
#include "json.hpp"

namespace deduce::service {

struct Caller {
  std::string token;  // empty when unauthenticated
  std::string locale = std::string(kDefaultLocale);
};

struct ServiceOptions {
  HashCost hash_cost = HashCost::Interactive;
  // Seconds since the epoch; replaceable for deterministic tests.
  std::function<std::int64_t()> clock;
};

class TaskService {
 public:
  explicit TaskService(Repository& repo, ServiceOptions options = {});

  // Accounts
  nlohmann::json login(const std::string& login, const std::string& password,
                       const std::string& locale);
  nlohmann::json create_user(const Caller& c, const nlohmann::json& body);  // teacher only
  // Creates the account unless the login exists; returns the account either way.
  UserAccount ensure_user(const std::string& login, const std::string& password, UserRole role,
                          const std::string& locale = "en");

  // Tasks
  nlohmann::json list_tasks(const Caller& c);
  nlohmann::json get_task(const Caller& c, const std::string& id);
  nlohmann::json create_task(const Caller& c, const nlohmann::json& draft);  // teacher only
  // Stores a task as given (id kept), used by import and seeding.
  TaskDef import_task(TaskDef task);

  // Sessions
  nlohmann::json start_session(const Caller& c, const std::string& task_id);
  nlohmann::json get_session(const Caller& c, const std::string& id);
  nlohmann::json step(const Caller& c, const std::string& id, const nlohmann::json& record);
  nlohmann::json undo(const Caller& c, const std::string& id);
  nlohmann::json redo(const Caller& c, const std::string& id);
  nlohmann::json delete_last(const Caller& c, const std::string& id, FormulaNo goal);
  nlohmann::json set_active_goal(const Caller& c, const std::string& id, FormulaNo goal);
  nlohmann::json applicable(const Caller& c, const std::string& id, FormulaNo formula,
                            const std::string& path);

  // Solutions
  nlohmann::json save_solution(const Caller& c, const std::string& session_id);
  nlohmann::json load_solution(const Caller& c, const std::string& solution_id);

  // Installs the demo tasks and a teacher account.
  void seed_demos(const std::string& teacher_login, const std::string& teacher_password);

  Repository& repository() { return repo_; }

 private:
  struct Live {
    std::mutex mu;
    SessionRecord record;
    ProofState state;
  };

  UserAccount authenticate(const Caller& c);
  UserAccount require_teacher(const Caller& c);
  std::shared_ptr<Live> live(const std::string& id);
  // Owner for writes; owner or teacher for reads.
  void authorize(const UserAccount& u, const SessionRecord& s, bool write) const;
  nlohmann::json session_body(const Live& l, const Catalog& cat) const;
  template <typename F>
  nlohmann::json mutate(const Caller& c, const std::string& id, F&& f);
  std::int64_t now() const;

  Repository& repo_;
  ServiceOptions options_;
  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
};

// Demo tasks shipped with the tool.
std::vector<TaskDef> demo_tasks();

}  // namespace deduce::service
