#include "deduce/service/http_server.hpp"

#include <exception>
#include <string>

#include "deduce/i18n.hpp"
#include "deduce/service/task_service.hpp"
#include "deduce/views.hpp"
#include "httplib.h"
#include "json.hpp"

namespace deduce::service {

using nlohmann::json;

int http_status(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Unauthorized:
      return e.key() == "error.forbidden" ? 403 : 401;
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::Conflict:
      return 409;
    case ErrorCode::Storage:
      return 500;
    case ErrorCode::NotApplicable:
    case ErrorCode::OutOfScope:
    case ErrorCode::StaleState:
    case ErrorCode::NothingToUndo:
    case ErrorCode::NothingToRedo:
    case ErrorCode::EmptyBranch:
    case ErrorCode::ReplayError:
    case ErrorCode::NotClosed:
      return 422;
    default:
      return 400;
  }
}

namespace {

Caller caller_of(const httplib::Request& req) {
  Caller c;
  const std::string auth = req.get_header_value("Authorization");
  constexpr std::string_view kBearer = "Bearer ";
  if (auth.starts_with(kBearer)) c.token = auth.substr(kBearer.size());
  c.locale = negotiate_locale(req.get_header_value("Accept-Language"),
                              req.has_param("lang") ? req.get_param_value("lang") : "");
  return c;
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::BadRequest, "error.badRequest", {"body is not valid JSON"},
                "body is not valid JSON");
  }
  return j;
}

FormulaNo int_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_number_integer()) {
    std::string what = std::string("missing integer field '") + key + "'";
    throw Error(ErrorCode::BadRequest, "error.badRequest", {what}, what);
  }
  return it->get<FormulaNo>();
}

template <typename F>
httplib::Server::Handler handler(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    const Caller c = caller_of(req);
    json out;
    int status = 200;
    try {
      out = f(req, c);
    } catch (const Error& e) {
      status = http_status(e);
      out = render_error(e, catalog(c.locale));
    } catch (const std::exception& e) {
      status = 500;
      out = render_error(Error(ErrorCode::Storage, "error.internal", {}, e.what()),
                         catalog(c.locale));
    }
    res.status = status;
    res.set_header("Content-Language", c.locale);
    res.set_content(out.dump(), "application/json; charset=utf-8");
  };
}

}  // namespace

void mount_routes(httplib::Server& srv, TaskService& svc) {
  srv.Get("/api/health", handler([](const auto&, const Caller&) { return json{{"ok", true}}; }));

  srv.Get("/api/messages", handler([](const auto&, const Caller& c) {
            json entries = json::object();
            for (const auto& [k, v] : catalog(c.locale).entries()) entries[k] = v;
            return json{{"locale", c.locale}, {"messages", std::move(entries)}};
          }));

  srv.Post("/api/login", handler([&svc](const httplib::Request& req, const Caller& c) {
             json b = body_of(req);
             return svc.login(b.value("login", ""), b.value("password", ""), c.locale);
           }));

  srv.Post("/api/users", handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.create_user(c, body_of(req));
           }));

  srv.Get("/api/tasks", handler([&svc](const auto&, const Caller& c) { return svc.list_tasks(c); }));

  srv.Post("/api/tasks", handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.create_task(c, body_of(req));
           }));

  srv.Get(R"(/api/tasks/([^/]+))", handler([&svc](const httplib::Request& req, const Caller& c) {
            return svc.get_task(c, req.matches[1]);
          }));

  srv.Post("/api/sessions", handler([&svc](const httplib::Request& req, const Caller& c) {
             json b = body_of(req);
             return svc.start_session(c, b.value("taskId", ""));
           }));

  srv.Get(R"(/api/sessions/([^/]+))", handler([&svc](const httplib::Request& req, const Caller& c) {
            return svc.get_session(c, req.matches[1]);
          }));

  srv.Post(R"(/api/sessions/([^/]+)/steps)",
           handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.step(c, req.matches[1], body_of(req));
           }));

  srv.Post(R"(/api/sessions/([^/]+)/undo)",
           handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.undo(c, req.matches[1]);
           }));

  srv.Post(R"(/api/sessions/([^/]+)/redo)",
           handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.redo(c, req.matches[1]);
           }));

  srv.Post(R"(/api/sessions/([^/]+)/delete-last)",
           handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.delete_last(c, req.matches[1], int_field(body_of(req), "goal"));
           }));

  srv.Post(R"(/api/sessions/([^/]+)/active-goal)",
           handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.set_active_goal(c, req.matches[1], int_field(body_of(req), "goal"));
           }));

  srv.Get(R"(/api/sessions/([^/]+)/applicable)",
          handler([&svc](const httplib::Request& req, const Caller& c) {
            FormulaNo n = 0;
            try {
              n = std::stoi(req.get_param_value("formula"));
            } catch (const std::exception&) {
              throw Error(ErrorCode::BadRequest, "error.badRequest", {"formula"},
                          "formula must be a number");
            }
            return svc.applicable(c, req.matches[1], n, req.get_param_value("path"));
          }));

  srv.Post(R"(/api/sessions/([^/]+)/save)",
           handler([&svc](const httplib::Request& req, const Caller& c) {
             return svc.save_solution(c, req.matches[1]);
           }));

  srv.Get(R"(/api/solutions/([^/]+))", handler([&svc](const httplib::Request& req, const Caller& c) {
            return svc.load_solution(c, req.matches[1]);
          }));
}

bool serve(TaskService& service, const std::string& host, int port) {
  httplib::Server srv;
  mount_routes(srv, service);
  return srv.listen(host, port);
}

}  // namespace deduce::service
