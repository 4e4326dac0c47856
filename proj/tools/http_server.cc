// Copyright 2026 The symgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "http_server.h"

#include <httplib.h>

namespace symgen::http {

struct HttpServer::Impl {
  explicit Impl(service::Service& s) : service(s) {}
  service::Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(service::Service& service)
    : impl_(std::make_unique<Impl>(service)) {
  httplib::Server& server = impl_->server;
  server.set_default_headers(
      {{"Access-Control-Allow-Origin", service.options().cors_origin},
       {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
       {"Access-Control-Allow-Headers", "Content-Type"}});
  // Every request goes through the service router, which owns the route
  // table and the error format. Catch-all handlers rather than a pre-routing
  // hook, since the latter runs before the body is read.
  const auto forward = [this](const httplib::Request& req,
                              httplib::Response& res) {
    const std::string& target = req.target.empty() ? req.path : req.target;
    const service::HttpResponse out =
        impl_->service.Handle(req.method, target, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Put(".*", forward);
  server.Delete(".*", forward);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::Serve() { return impl_->server.listen_after_bind(); }

void HttpServer::Stop() { impl_->server.stop(); }

}  // namespace symgen::http
