#pragma once

#include <string>

#include "deduce/error.hpp"

namespace httplib {
class Server;
}

namespace deduce::service {

class TaskService;

int http_status(const Error& e);

// Registers the /api routes. Bearer tokens come from the Authorization
// header; the locale from ?lang= or Accept-Language.
void mount_routes(httplib::Server& server, TaskService& service);

// Blocks until the server stops. Returns false if the port cannot be bound.
bool serve(TaskService& service, const std::string& host, int port);

}  // namespace deduce::service
