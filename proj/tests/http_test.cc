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

#include <filesystem>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace symgen::http {
namespace {

using Json = nlohmann::json;

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const GameSpec ttt = pipeline::LoadGameSpec(
        std::filesystem::path(SYMGEN_GAMES_DIR) / "tictactoe-3x3-rcd.json");
    service_ = std::make_unique<service::Service>(std::vector<GameSpec>{ttt},
                                                  pipeline::Catalog{});
    server_ = std::make_unique<HttpServer>(*service_);
    port_ = server_->Bind("127.0.0.1", 0);
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->Serve(); });
  }
  void TearDown() override {
    server_->Stop();
    if (thread_.joinable()) thread_.join();
  }

  std::unique_ptr<service::Service> service_;
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpTest, ServesTheApi) {
  httplib::Client client("127.0.0.1", port_);
  auto games = client.Get("/api/games");
  ASSERT_TRUE(games);
  EXPECT_EQ(games->status, 200);
  EXPECT_EQ(games->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(Json::parse(games->body)["games"][0]["name"], "tictactoe-3x3-rcd");

  const Json req = {{"game", "tictactoe-3x3-rcd"},
                    {"board", ".../.../... X"},
                    {"bot_depth", 1},
                    {"seed", 4}};
  auto created = client.Post("/api/sessions", req.dump(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = Json::parse(created->body)["id"];

  auto moved = client.Post("/api/sessions/" + id + "/moves",
                           Json{{"row", 1}, {"col", 1}}.dump(), "application/json");
  ASSERT_TRUE(moved);
  EXPECT_EQ(moved->status, 200);
  EXPECT_EQ(Json::parse(moved->body)["history"].size(), 2u);

  auto missing = client.Get("/api/sessions/unknown");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(Json::parse(missing->body)["code"], "session_not_found");

  auto preflight = client.Options("/api/sessions");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
}

}  // namespace
}  // namespace symgen::http
