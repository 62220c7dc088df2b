// deduce: batch proof checking, task import/export, demo seeding and the
// HTTP service.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "deduce/error.hpp"
#include "deduce/i18n.hpp"
#include "deduce/script.hpp"
#include "deduce/service/http_server.hpp"
#include "deduce/service/repository.hpp"
#include "deduce/service/task_service.hpp"
#include "deduce/views.hpp"

namespace fs = std::filesystem;
using namespace deduce;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::unique_ptr<service::SqliteRepository> open_store(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create " + dir + ": " + ec.message());
  return std::make_unique<service::SqliteRepository>((fs::path(dir) / "deduce.db").string());
}

// check / replay: prints one line per step and the final status.
int run_check(const std::string& script_path, const std::string& task_path,
              const std::string& lang, bool verbose) {
  const Catalog& cat = catalog(lang);
  TaskDef task;
  ProofScript script;
  ProofState s;
  try {
    task = parse_task(read_file(task_path));
    script = parse_script(read_file(script_path));
    s = start_proof(task);
  } catch (const Error& e) {
    throw UsageError(cat.render(e.key(), e.args()));
  }
  if (!script.task.empty() && !task.id.empty() && script.task != task.id) {
    throw UsageError(cat.render("error.scriptTaskMismatch", {script.task, task.id}));
  }
  if (verbose) std::cout << view_text(s, cat);
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const std::string k = std::to_string(i + 1);
    const std::string kind(step_kind_name(script.steps[i].kind));
    try {
      s = apply_step(s, script.steps[i]);
    } catch (const Error& e) {
      const std::string reason = cat.render(e.key(), e.args());
      std::cout << cat.render("cli.stepFailed", {k, kind, reason}) << "\n";
      std::cout << cat.render("cli.invalid", {k, reason}) << "\n";
      return kFailed;
    }
    std::cout << cat.render("cli.step", {k, kind}) << "\n";
    if (verbose) std::cout << view_text(s, cat);
  }
  if (is_complete(s)) {
    std::cout << cat.render("cli.proved") << "\n";
    return kOk;
  }
  std::cout << cat.render("cli.incomplete") << "\n";
  return kFailed;
}

int run_import(const std::string& path, const std::string& data, const std::string& lang) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw UsageError(path + " is not valid JSON");
  if (j.is_object() && j.contains("tasks")) j = j["tasks"];
  if (j.is_object()) j = nlohmann::json::array({j});
  if (!j.is_array()) throw UsageError(path + ": expected a task or a list of tasks");
  auto store = open_store(data);
  service::TaskService svc(*store);
  std::size_t n = 0;
  for (const auto& t : j) {
    svc.import_task(task_from_json(t));
    ++n;
  }
  std::cout << catalog(lang).render("cli.imported", {std::to_string(n)}) << "\n";
  return kOk;
}

int run_export(const std::string& path, const std::string& data, const std::string& lang) {
  auto store = open_store(data);
  nlohmann::json out = nlohmann::json::array();
  for (const TaskDef& t : store->tasks()) out.push_back(to_json(t));
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << out.dump(2) << "\n";
  std::cout << catalog(lang).render("cli.exported", {std::to_string(out.size())}) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deduce - proof checking and the proof editor service"};
  app.require_subcommand(1);
  std::string lang = "en";
  std::string data = "deduce-data";
  app.add_option("--lang", lang, "Report language")->check(CLI::IsMember({"en", "pl"}));
  app.add_option("--data", data, "Storage directory");

  std::string script_path, task_path;
  bool verbose = false;
  auto* check = app.add_subcommand("check", "Replay a proof script against a task");
  check->add_option("script", script_path)->required();
  check->add_option("task", task_path)->required();

  auto* replay_cmd = app.add_subcommand("replay", "Replay a script, optionally showing each state");
  replay_cmd->add_option("script", script_path)->required();
  replay_cmd->add_option("task", task_path)->required();
  replay_cmd->add_flag("--verbose,-v", verbose, "Print the proof after every step");

  std::string io_path;
  auto* import_cmd = app.add_subcommand("tasks-import", "Import tasks from a JSON file");
  import_cmd->add_option("path", io_path)->required();
  auto* export_cmd = app.add_subcommand("tasks-export", "Export all tasks to a JSON file");
  export_cmd->add_option("path", io_path)->required();

  std::string teacher = "teacher", password = "teacher";
  auto* seed = app.add_subcommand("seed-demos", "Install demo tasks and a teacher account");
  seed->add_option("--teacher", teacher, "Teacher login");
  seed->add_option("--password", password, "Teacher password");

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host);

  for (CLI::App* sub : {check, replay_cmd, import_cmd, export_cmd, seed, serve_cmd}) {
    sub->add_option("--lang", lang, "Report language")->check(CLI::IsMember({"en", "pl"}));
    sub->add_option("--data", data, "Storage directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return run_check(script_path, task_path, lang, false);
    if (*replay_cmd) return run_check(script_path, task_path, lang, verbose);
    if (*import_cmd) return run_import(io_path, data, lang);
    if (*export_cmd) return run_export(io_path, data, lang);
    if (*seed) {
      auto store = open_store(data);
      service::TaskService svc(*store);
      svc.seed_demos(teacher, password);
      std::cout << catalog(lang).render("cli.seeded", {teacher}) << "\n";
      return kOk;
    }
    if (*serve_cmd) {
      auto store = open_store(data);
      service::TaskService svc(*store);
      std::cout << catalog(lang).render("cli.serving", {std::to_string(port)}) << std::endl;
      if (!service::serve(svc, host, port)) throw UsageError("cannot listen on port " + std::to_string(port));
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "deduce: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "deduce: " << catalog(lang).render(e.key(), e.args()) << "\n";
    return kUsage;
  }
  return kUsage;
}
