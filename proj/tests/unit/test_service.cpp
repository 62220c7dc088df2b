#include "deduce/service/task_service.hpp"

#include <fstream>
#include <sstream>

#include "deduce/error.hpp"
#include "deduce/script.hpp"
#include "doctest.h"
#include "http_fixture.hpp"
#include "oracles.hpp"

using namespace deduce;
using namespace deduce::service;
using nlohmann::json;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(DEDUCE_DEMOS) + "/" + name);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct World {
  fixture::Server srv;
  std::string teacher, alice, bob;

  World() {
    srv.service().seed_demos("teacher", "secret");
    srv.service().ensure_user("alice", "pw-a", UserRole::Student);
    srv.service().ensure_user("bob", "pw-b", UserRole::Student, "pl");
    teacher = srv.login("teacher", "secret");
    alice = srv.login("alice", "pw-a");
    bob = srv.login("bob", "pw-b");
  }

  std::string start(const std::string& token, const std::string& task = "barber") {
    auto r = srv.call("POST", "/api/sessions", token, {{"taskId", task}});
    REQUIRE(r.status == 200);
    return r.body["session"]["id"];
  }
};

}  // namespace

TEST_CASE("login") {
  World w;
  CHECK_FALSE(w.teacher.empty());
  CHECK_FALSE(w.alice.empty());
  auto ok = w.srv.call("POST", "/api/login", {}, {{"login", "alice"}, {"password", "pw-a"}});
  CHECK(ok.body["user"]["role"] == "student");
  CHECK(ok.body["message"]["key"] == "view.loggedIn");
  auto bad = w.srv.call("POST", "/api/login", {}, {{"login", "alice"}, {"password", "nope"}});
  CHECK(bad.status == 401);
  CHECK(bad.body["error"]["code"] == "Unauthorized");
  CHECK(w.srv.call("POST", "/api/login", {}, {{"login", "nobody"}, {"password", "x"}}).status ==
        401);
  CHECK(w.srv.call("GET", "/api/health").body["ok"] == true);
}

TEST_CASE("task catalog") {
  World w;
  auto list = w.srv.call("GET", "/api/tasks", w.alice);
  REQUIRE(list.status == 200);
  REQUIRE(list.body["tasks"].size() == 2);
  CHECK(list.body["tasks"][0]["name"] == "Barber paradox");
  CHECK(list.body["tasks"][1]["name"] == "Union of powerset");
  CHECK(w.srv.call("GET", "/api/tasks").status == 401);
  CHECK(w.srv.call("GET", "/api/tasks/nope", w.alice).status == 404);

  json draft = {{"name", "Barber"},
                {"goal", "¬∃A ∀B (shaves(A,B) ⇔ ¬shaves(B,B))"},
                {"symbols", {{{"name", "shaves"}, {"arity", 2}, {"sort", "Proposition"}}}},
                {"lemmas", {"logic/*"}}};
  auto made = w.srv.call("POST", "/api/tasks", w.teacher, draft);
  REQUIRE(made.status == 200);
  CHECK(made.body["task"]["goal"] == "¬∃A∀B(shaves(A,B) ⇔ ¬shaves(B,B))");
  CHECK(made.body["task"]["author"] == "teacher");
  std::string id = made.body["task"]["id"];
  CHECK(w.srv.call("GET", "/api/tasks/" + id, w.alice).body["task"]["name"] == "Barber");
  CHECK(w.srv.call("GET", "/api/tasks", w.alice).body["tasks"].size() == 3);

  json broken = draft;
  broken["goal"] = "∀x (";
  auto r = w.srv.call("POST", "/api/tasks", w.teacher, broken);
  CHECK(r.status == 400);
  CHECK(r.body["error"]["code"] == "InvalidGoal");
  json unknown = draft;
  unknown["lemmas"] = {"zf/nothing"};
  CHECK(w.srv.call("POST", "/api/tasks", w.teacher, unknown).body["error"]["code"] ==
        "UnknownLemma");
  auto student = w.srv.call("POST", "/api/tasks", w.alice, draft);
  CHECK(student.status == 403);
  CHECK(student.body["error"]["code"] == "Unauthorized");
}

TEST_CASE("empty catalog") {
  SqliteRepository repo(":memory:");
  TaskService svc(repo, {HashCost::Minimal, {}});
  svc.ensure_user("t", "t", UserRole::Teacher);
  std::string token = svc.login("t", "t", "en")["token"];
  CHECK(svc.list_tasks(Caller{token}).at("tasks").empty());
}

TEST_CASE("session steps, views and errors") {
  World w;
  std::string sid = w.start(w.alice);
  auto base = "/api/sessions/" + sid;
  auto r = w.srv.call("POST", base + "/steps", w.alice,
                      {{"kind", "ByContradiction"}, {"target", 1}, {"path", json::array()}});
  REQUIRE(r.status == 200);
  const json& view = r.body["view"];
  CHECK(view["activeGoal"] == 3);
  CHECK(view["formulas"][1]["text"] == "∃A∀B(shaves(A,B) ⇔ ¬shaves(B,B))");
  CHECK(view["formulas"][1]["marker"] == "blue-star");
  CHECK(view["formulas"][1]["inScope"] == true);
  CHECK(view["formulas"][2]["text"] == "⊥");
  CHECK(view["formulas"][2]["marker"] == "red-sad");

  auto menu = w.srv.call("GET", base + "/applicable?formula=2&path=", w.alice);
  REQUIRE(menu.status == 200);
  bool take = false;
  for (const json& d : menu.body["steps"]) take = take || d["record"]["kind"] == "TakeThis";
  CHECK(take);

  auto na = w.srv.call("POST", base + "/steps", w.alice, {{"kind", "TakeThis"}, {"target", 3}});
  CHECK(na.status == 422);
  CHECK(na.body["error"]["code"] == "NotApplicable");
  CHECK(w.srv.call("POST", base + "/steps", w.alice, {{"kind", "Nope"}}).status == 400);
  CHECK(w.srv.call("POST", base + "/steps", w.alice, json("not an object")).status == 400);

  CHECK(w.srv.call("POST", base + "/undo", w.alice).body["view"]["canRedo"] == true);
  CHECK(w.srv.call("POST", base + "/redo", w.alice).body["view"]["activeGoal"] == 3);
  // Goal 3 replaced goal 1, so the step that made it is the last one in its branch.
  auto del = w.srv.call("POST", base + "/delete-last", w.alice, {{"goal", 3}});
  CHECK(del.body["view"]["formulas"].size() == 1);
  auto empty = w.srv.call("POST", base + "/delete-last", w.alice, {{"goal", 1}});
  CHECK(empty.status == 422);
  CHECK(empty.body["error"]["code"] == "EmptyBranch");
  CHECK(w.srv.call("POST", base + "/delete-last", w.alice, json::object()).status == 400);
  CHECK(w.srv.call("POST", "/api/sessions/missing/undo", w.alice).status == 404);
  CHECK(w.srv.call("POST", "/api/sessions", w.alice, {{"taskId", "nope"}}).status == 404);

  // The autosaved script is kept up to date.
  auto rec = w.srv.repo().session(sid);
  REQUIRE(rec);
  CHECK(parse_script(rec->script).steps.size() == 2);  // ByContradiction, DeleteLast
}

TEST_CASE("out-of-branch assumptions are inert") {
  World w;
  std::string sid = w.start(w.alice);
  ProofScript sc = parse_script(slurp("barber-cases.script.json"));
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(w.srv.call("POST", "/api/sessions/" + sid + "/steps", w.alice, to_json(sc.steps[i]))
                .status == 200);
  }
  auto r = w.srv.call("GET", "/api/sessions/" + sid + "/applicable?formula=8&path=", w.alice);
  CHECK(r.status == 422);
  CHECK(r.body["error"]["code"] == "OutOfScope");
  auto focus = w.srv.call("POST", "/api/sessions/" + sid + "/active-goal", w.alice, {{"goal", 9}});
  CHECK(focus.body["view"]["activeGoal"] == 9);
  CHECK(w.srv.call("GET", "/api/sessions/" + sid + "/applicable?formula=8&path=", w.alice).status ==
        200);
  CHECK(w.srv.call("GET", "/api/sessions/" + sid + "/applicable?formula=8&path=x", w.alice)
            .body["error"]["code"] == "InvalidPath");
}

TEST_CASE("save, then review by teacher") {
  World w;
  std::string sid = w.start(w.alice);
  ProofScript sc = parse_script(slurp("barber.script.json"));
  std::vector<json> live{w.srv.call("GET", "/api/sessions/" + sid, w.alice).body["view"]};
  for (const StepRecord& r : sc.steps) {
    auto res = w.srv.call("POST", "/api/sessions/" + sid + "/steps", w.alice, to_json(r));
    REQUIRE(res.status == 200);
    live.push_back(res.body["view"]);
  }
  CHECK(live.back()["complete"] == true);
  auto saved = w.srv.call("POST", "/api/sessions/" + sid + "/save", w.alice);
  REQUIRE(saved.status == 200);
  CHECK(saved.body["complete"] == true);
  std::string sol = saved.body["solutionId"];

  auto review = w.srv.call("GET", "/api/solutions/" + sol, w.teacher);
  REQUIRE(review.status == 200);
  CHECK(review.body["complete"] == true);
  REQUIRE(review.body["views"].size() == 5);
  for (std::size_t i = 0; i < live.size(); ++i) CHECK(review.body["views"][i] == live[i]);
  CHECK(script_from_json(review.body["script"]).steps == sc.steps);

  CHECK(w.srv.call("GET", "/api/solutions/" + sol, w.alice).status == 200);
  auto other = w.srv.call("GET", "/api/solutions/" + sol, w.bob);
  CHECK(other.status == 403);
  CHECK(other.body["error"]["code"] == "Unauthorized");
  CHECK(w.srv.call("GET", "/api/solutions/none", w.teacher).status == 404);

  // Partial sessions are storable too.
  std::string partial = w.start(w.bob);
  auto p = w.srv.call("POST", "/api/sessions/" + partial + "/save", w.bob);
  CHECK(p.body["complete"] == false);
  CHECK(w.srv.call("GET", "/api/solutions/" + std::string(p.body["solutionId"]), w.bob)
            .body["views"]
            .size() == 1);
}

TEST_CASE("corrupt stored solutions fail replay") {
  World w;
  std::string full = to_json(parse_script(slurp("barber.script.json"))).dump();
  std::string uid = w.srv.repo().user_by_login("alice")->id;
  SolutionRecord truncated{"sol-cut", uid, "barber", "s-x", full.substr(0, full.size() / 2), 0};
  w.srv.repo().add_solution(truncated);
  auto r = w.srv.call("GET", "/api/solutions/sol-cut", w.teacher);
  CHECK(r.status == 422);
  CHECK(r.body["error"]["code"] == "ReplayError");

  ProofScript bad = parse_script(slurp("barber.script.json"));
  bad.steps[1].target = 40;
  w.srv.repo().add_solution({"sol-bad", uid, "barber", "s-x", to_json(bad).dump(), 0});
  auto b = w.srv.call("GET", "/api/solutions/sol-bad", w.teacher);
  CHECK(b.body["error"]["code"] == "ReplayError");
  CHECK(b.body["error"]["step"] == 2);
}

TEST_CASE("responses render in both languages") {
  World w;
  std::string sid = w.start(w.bob);
  auto en = w.srv.call("POST", "/api/sessions/" + sid + "/steps?lang=en", w.bob,
                       {{"kind", "ByContradiction"}, {"target", 1}});
  auto pl = w.srv.call("POST", "/api/sessions/" + sid + "/undo", w.bob, nullptr, "pl-PL,pl");
  CHECK(en.body["view"]["status"]["key"] == "view.inProgress");
  CHECK(pl.body["view"]["status"]["key"] == "view.inProgress");
  CHECK(en.body["view"]["status"]["text"] != pl.body["view"]["status"]["text"]);
  auto err_en = w.srv.call("POST", "/api/sessions/" + sid + "/undo?lang=en", w.bob);
  auto err_pl = w.srv.call("POST", "/api/sessions/" + sid + "/undo?lang=pl", w.bob);
  CHECK(err_en.body["error"]["key"] == "error.nothingToUndo");
  CHECK(err_en.body["error"]["message"] != err_pl.body["error"]["message"]);
  CHECK(err_pl.body["error"]["message"] != "error.nothingToUndo");
  auto msgs = w.srv.call("GET", "/api/messages?lang=pl");
  CHECK(msgs.body["locale"] == "pl");
  CHECK(msgs.body["messages"].size() == catalog("pl").entries().size());
}

TEST_CASE("property: authorization matrix") {
  World w;
  std::string alice_sid = w.start(w.alice);
  std::string sol = w.srv.call("POST", "/api/sessions/" + alice_sid + "/save", w.alice)
                        .body["solutionId"];
  enum Who { Anonymous, Owner, Other, Teacher };
  const std::vector<std::string> tokens{"", w.alice, w.bob, w.teacher};
  struct Op {
    std::string method, path;
    json body;
    bool write;      // owner only
    bool teacher;    // teacher only
    bool own;        // involves Alice's resources
  };
  const std::string s = "/api/sessions/" + alice_sid;
  const std::vector<Op> ops{
      {"GET", "/api/tasks", nullptr, false, false, false},
      {"GET", "/api/tasks/barber", nullptr, false, false, false},
      {"POST", "/api/tasks", {{"name", "x"}, {"goal", "⊤"}}, false, true, false},
      {"POST", "/api/users", {{"login", "zed"}, {"password", "p"}}, false, true, false},
      {"GET", s, nullptr, false, false, true},
      {"GET", s + "/applicable?formula=1&path=", nullptr, false, false, true},
      {"POST", s + "/active-goal", {{"goal", 1}}, true, false, true},
      {"POST", s + "/save", nullptr, true, false, true},
      {"GET", "/api/solutions/" + sol, nullptr, false, false, true},
  };
  auto expected = [](Who who, const Op& op) {
    if (who == Anonymous) return 401;
    if (op.teacher) return who == Teacher ? 200 : 403;
    if (!op.own) return 200;
    if (who == Owner) return 200;
    if (who == Teacher && !op.write) return 200;
    return 403;
  };
  oracle::Rng rng(71);
  int users = 0;
  for (int i = 0; i < 120; ++i) {
    Who who = static_cast<Who>(oracle::pick(rng, 4));
    const Op& op = ops[oracle::pick(rng, ops.size())];
    json body = op.body;
    if (op.path == "/api/users" && body.is_object()) body["login"] = "zed" + std::to_string(users++);
    auto r = w.srv.call(op.method, op.path, tokens[who], body);
    INFO(op.method, " ", op.path, " as ", static_cast<int>(who));
    CHECK(r.status == expected(who, op));
    if (r.status >= 400) CHECK(r.body["error"]["code"] == "Unauthorized");
  }
  // Bogus tokens are rejected like missing ones.
  CHECK(w.srv.call("GET", "/api/tasks", "deadbeef").status == 401);
}
