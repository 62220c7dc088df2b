#pragma once

// Persistence behind a narrow interface; SqliteRepository is the shipped
// implementation (a single database file, or ":memory:").

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deduce/script.hpp"

struct sqlite3;

namespace deduce::service {

enum class UserRole { Student, Teacher };

std::string_view user_role_name(UserRole r);
std::optional<UserRole> user_role_from_name(std::string_view s);

struct UserAccount {
  std::string id;
  std::string login;
  UserRole role = UserRole::Student;
  std::string password_hash;
  std::string locale = "en";
};

struct SessionRecord {
  std::string id;
  std::string user_id;
  std::string task_id;
  std::string script;  // autosaved ProofScript JSON
  std::int64_t updated_at = 0;
};

struct SolutionRecord {
  std::string id;
  std::string user_id;
  std::string task_id;
  std::string session_id;
  std::string script;  // ProofScript JSON, immutable once stored
  std::int64_t created_at = 0;
};

class Repository {
 public:
  virtual ~Repository() = default;

  // Throws Error(Conflict) if the login exists.
  virtual void add_user(const UserAccount& u) = 0;
  virtual std::optional<UserAccount> user_by_login(std::string_view login) = 0;
  virtual std::optional<UserAccount> user_by_id(std::string_view id) = 0;

  virtual void add_token(std::string_view token, std::string_view user_id, std::int64_t at) = 0;
  virtual std::optional<std::string> token_user(std::string_view token) = 0;

  // Insert or replace.
  virtual void put_task(const TaskDef& t) = 0;
  virtual std::optional<TaskDef> task(std::string_view id) = 0;
  // Ordered by (created_at, id).
  virtual std::vector<TaskDef> tasks() = 0;

  virtual void put_session(const SessionRecord& s) = 0;
  virtual std::optional<SessionRecord> session(std::string_view id) = 0;

  virtual void add_solution(const SolutionRecord& s) = 0;
  virtual std::optional<SolutionRecord> solution(std::string_view id) = 0;
};

class SqliteRepository : public Repository {
 public:
  // Throws Error(Storage).
  explicit SqliteRepository(const std::string& path);
  ~SqliteRepository() override;
  SqliteRepository(const SqliteRepository&) = delete;
  SqliteRepository& operator=(const SqliteRepository&) = delete;

  void add_user(const UserAccount& u) override;
  std::optional<UserAccount> user_by_login(std::string_view login) override;
  std::optional<UserAccount> user_by_id(std::string_view id) override;
  void add_token(std::string_view token, std::string_view user_id, std::int64_t at) override;
  std::optional<std::string> token_user(std::string_view token) override;
  void put_task(const TaskDef& t) override;
  std::optional<TaskDef> task(std::string_view id) override;
  std::vector<TaskDef> tasks() override;
  void put_session(const SessionRecord& s) override;
  std::optional<SessionRecord> session(std::string_view id) override;
  void add_solution(const SolutionRecord& s) override;
  std::optional<SolutionRecord> solution(std::string_view id) override;

 private:
  class Stmt;
  std::optional<UserAccount> user_where(const char* sql, std::string_view arg);

  sqlite3* db_ = nullptr;
  std::mutex mu_;
};

}  // namespace deduce::service
