#include "deduce/service/repository.hpp"

#include <sqlite3.h>

#include "deduce/error.hpp"

namespace deduce::service {

std::string_view user_role_name(UserRole r) {
  return r == UserRole::Teacher ? "teacher" : "student";
}

std::optional<UserRole> user_role_from_name(std::string_view s) {
  if (s == "teacher") return UserRole::Teacher;
  if (s == "student") return UserRole::Student;
  return std::nullopt;
}

namespace {

[[noreturn]] void storage_error(sqlite3* db, const std::string& what) {
  throw Error(ErrorCode::Storage, "error.storage", {},
              what + ": " + (db ? sqlite3_errmsg(db) : "no database"));
}

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS users (
  id TEXT PRIMARY KEY,
  login TEXT NOT NULL UNIQUE,
  role TEXT NOT NULL,
  password_hash TEXT NOT NULL,
  locale TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS tokens (
  token TEXT PRIMARY KEY,
  user_id TEXT NOT NULL REFERENCES users(id),
  created_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS tasks (
  id TEXT PRIMARY KEY,
  created_at INTEGER NOT NULL,
  body TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
  id TEXT PRIMARY KEY,
  user_id TEXT NOT NULL,
  task_id TEXT NOT NULL,
  script TEXT NOT NULL,
  updated_at INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS solutions (
  id TEXT PRIMARY KEY,
  user_id TEXT NOT NULL,
  task_id TEXT NOT NULL,
  session_id TEXT NOT NULL,
  script TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
)sql";

}  // namespace

class SqliteRepository::Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &st_, nullptr) != SQLITE_OK) storage_error(db, "prepare");
  }
  ~Stmt() { sqlite3_finalize(st_); }

  Stmt& bind(int i, std::string_view v) {
    sqlite3_bind_text(st_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Stmt& bind(int i, std::int64_t v) {
    sqlite3_bind_int64(st_, i, v);
    return *this;
  }
  // True while rows are available.
  bool step() {
    int rc = sqlite3_step(st_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (rc == SQLITE_CONSTRAINT) {
      throw Error(ErrorCode::Conflict, "error.conflict", {sqlite3_errmsg(db_)}, "constraint violated");
    }
    storage_error(db_, "step");
  }
  std::string text(int col) const {
    auto p = sqlite3_column_text(st_, col);
    return p ? std::string(reinterpret_cast<const char*>(p),
                           static_cast<std::size_t>(sqlite3_column_bytes(st_, col)))
             : std::string();
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(st_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* st_ = nullptr;
};

SqliteRepository::SqliteRepository(const std::string& path) {
  int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::Storage, "error.storage", {}, "cannot open " + path + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  char* err = nullptr;
  if (sqlite3_exec(db_, kSchema, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "schema";
    sqlite3_free(err);
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorCode::Storage, "error.storage", {}, "schema: " + msg);
  }
}

SqliteRepository::~SqliteRepository() { sqlite3_close(db_); }

void SqliteRepository::add_user(const UserAccount& u) {
  std::lock_guard lock(mu_);
  try {
    Stmt(db_, "INSERT INTO users(id, login, role, password_hash, locale) VALUES(?,?,?,?,?)")
        .bind(1, u.id)
        .bind(2, u.login)
        .bind(3, user_role_name(u.role))
        .bind(4, u.password_hash)
        .bind(5, u.locale)
        .step();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Conflict) throw;
    throw Error(ErrorCode::Conflict, "error.loginTaken", {u.login}, "login already taken");
  }
}

std::optional<UserAccount> SqliteRepository::user_where(const char* sql, std::string_view arg) {
  std::lock_guard lock(mu_);
  Stmt st(db_, sql);
  st.bind(1, arg);
  if (!st.step()) return std::nullopt;
  UserAccount u;
  u.id = st.text(0);
  u.login = st.text(1);
  u.role = user_role_from_name(st.text(2)).value_or(UserRole::Student);
  u.password_hash = st.text(3);
  u.locale = st.text(4);
  return u;
}

std::optional<UserAccount> SqliteRepository::user_by_login(std::string_view login) {
  return user_where("SELECT id, login, role, password_hash, locale FROM users WHERE login = ?",
                    login);
}

std::optional<UserAccount> SqliteRepository::user_by_id(std::string_view id) {
  return user_where("SELECT id, login, role, password_hash, locale FROM users WHERE id = ?", id);
}

void SqliteRepository::add_token(std::string_view token, std::string_view user_id,
                                 std::int64_t at) {
  std::lock_guard lock(mu_);
  Stmt(db_, "INSERT INTO tokens(token, user_id, created_at) VALUES(?,?,?)")
      .bind(1, token)
      .bind(2, user_id)
      .bind(3, at)
      .step();
}

std::optional<std::string> SqliteRepository::token_user(std::string_view token) {
  std::lock_guard lock(mu_);
  Stmt st(db_, "SELECT user_id FROM tokens WHERE token = ?");
  st.bind(1, token);
  if (!st.step()) return std::nullopt;
  return st.text(0);
}

void SqliteRepository::put_task(const TaskDef& t) {
  std::lock_guard lock(mu_);
  Stmt(db_, "INSERT OR REPLACE INTO tasks(id, created_at, body) VALUES(?,?,?)")
      .bind(1, t.id)
      .bind(2, t.created_at)
      .bind(3, to_json(t).dump())
      .step();
}

std::optional<TaskDef> SqliteRepository::task(std::string_view id) {
  std::lock_guard lock(mu_);
  Stmt st(db_, "SELECT body FROM tasks WHERE id = ?");
  st.bind(1, id);
  if (!st.step()) return std::nullopt;
  return parse_task(st.text(0));
}

std::vector<TaskDef> SqliteRepository::tasks() {
  std::lock_guard lock(mu_);
  Stmt st(db_, "SELECT body FROM tasks ORDER BY created_at, id");
  std::vector<TaskDef> out;
  while (st.step()) out.push_back(parse_task(st.text(0)));
  return out;
}

void SqliteRepository::put_session(const SessionRecord& s) {
  std::lock_guard lock(mu_);
  Stmt(db_,
       "INSERT OR REPLACE INTO sessions(id, user_id, task_id, script, updated_at) "
       "VALUES(?,?,?,?,?)")
      .bind(1, s.id)
      .bind(2, s.user_id)
      .bind(3, s.task_id)
      .bind(4, s.script)
      .bind(5, s.updated_at)
      .step();
}

std::optional<SessionRecord> SqliteRepository::session(std::string_view id) {
  std::lock_guard lock(mu_);
  Stmt st(db_, "SELECT id, user_id, task_id, script, updated_at FROM sessions WHERE id = ?");
  st.bind(1, id);
  if (!st.step()) return std::nullopt;
  return SessionRecord{st.text(0), st.text(1), st.text(2), st.text(3), st.integer(4)};
}

void SqliteRepository::add_solution(const SolutionRecord& s) {
  std::lock_guard lock(mu_);
  Stmt(db_,
       "INSERT INTO solutions(id, user_id, task_id, session_id, script, created_at) "
       "VALUES(?,?,?,?,?,?)")
      .bind(1, s.id)
      .bind(2, s.user_id)
      .bind(3, s.task_id)
      .bind(4, s.session_id)
      .bind(5, s.script)
      .bind(6, s.created_at)
      .step();
}

std::optional<SolutionRecord> SqliteRepository::solution(std::string_view id) {
  std::lock_guard lock(mu_);
  Stmt st(db_,
          "SELECT id, user_id, task_id, session_id, script, created_at FROM solutions "
          "WHERE id = ?");
  st.bind(1, id);
  if (!st.step()) return std::nullopt;
  return SolutionRecord{st.text(0), st.text(1), st.text(2), st.text(3), st.text(4), st.integer(5)};
}

}  // namespace deduce::service
