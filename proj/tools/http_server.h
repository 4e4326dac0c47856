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

// HTTP binding of service::Service.

#ifndef SYMGEN_TOOLS_HTTP_SERVER_H_
#define SYMGEN_TOOLS_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "symgen/service.h"

namespace symgen::http {

class HttpServer {
 public:
  explicit HttpServer(service::Service& service);
  ~HttpServer();

  // Binds to `port`, or to a free port when port is 0. Returns the bound
  // port, or -1 on failure.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Returns false if the listener failed.
  bool Serve();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace symgen::http

#endif  // SYMGEN_TOOLS_HTTP_SERVER_H_
