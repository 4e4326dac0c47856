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

#include "symgen/service.h"

#include <filesystem>
#include <random>
#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace symgen::service {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

GameSpec Load(const std::string& name) {
  return pipeline::LoadGameSpec(fs::path(SYMGEN_GAMES_DIR) / (name + ".json"));
}

constexpr const char* kShowcaseBoard = "O.X./X.OX/..XO/O.XO X";

pipeline::Catalog MakeCatalog() {
  pipeline::Catalog c;
  const GameSpec ttt4 = Load("tictactoe-4x4-rc");
  c.games.push_back({ttt4, pipeline::ConfigHash(ttt4)});
  pipeline::CatalogEntry base;
  base.id = "showcase";
  base.game = ttt4.name;
  base.config_hash = pipeline::ConfigHash(ttt4);
  base.board = kShowcaseBoard;
  base.j = 2;
  for (int k1 = 1; k1 <= 3; ++k1) {
    pipeline::CatalogLabel l;
    l.k1 = k1;
    l.k2 = 3;
    l.label = k1 < 3 ? Label::kHard : Label::kEasy;
    l.n_games = 30;
    c.entries.push_back(base);
    c.entries.back().labels.push_back(l);
    c.entries.back().id = "showcase-" + std::to_string(k1);
  }
  // Filler entries for paging.
  for (int i = 0; i < 57; ++i) {
    pipeline::CatalogEntry e = base;
    e.id = "filler-" + std::to_string(i);
    e.j = 3;
    pipeline::CatalogLabel l;
    l.k1 = 1;
    l.k2 = 2;
    l.label = Label::kMedium;
    e.labels = {l};
    c.entries.push_back(e);
  }
  return c;
}

std::vector<GameSpec> Games() {
  return {Load("tictactoe-3x3-rcd"), Load("connect3-4x4-rcd"),
          Load("bottom2-4x4-rc")};
}

struct Reply {
  int status;
  Json body;
};

Reply Call(Service& s, std::string_view method, std::string_view target,
           const Json& body = nullptr) {
  const HttpResponse r = s.Handle(method, target, body.is_null() ? "" : body.dump());
  return {r.status, Json::parse(r.body)};
}

void ExpectError(const Reply& r, int status, const std::string& code) {
  EXPECT_EQ(r.status, status) << r.body.dump();
  EXPECT_EQ(r.body.value("code", ""), code) << r.body.dump();
  EXPECT_TRUE(r.body.contains("message"));
}

class ServiceTest : public ::testing::Test {
 protected:
  Service svc_{Games(), MakeCatalog()};
};

TEST_F(ServiceTest, ListsGamesIncludingCatalogGames) {
  const Reply r = Call(svc_, "GET", "/api/games");
  ASSERT_EQ(r.status, 200);
  std::set<std::string> names;
  for (const Json& g : r.body["games"]) {
    names.insert(g["name"].get<std::string>());
    EXPECT_EQ(g["config_hash"].get<std::string>().size(), 16u);
  }
  EXPECT_EQ(names, (std::set<std::string>{"tictactoe-3x3-rcd", "connect3-4x4-rcd",
                                          "bottom2-4x4-rc", "tictactoe-4x4-rc"}));
  ExpectError(Call(svc_, "POST", "/api/games"), 405, "method_not_allowed");
  ExpectError(Call(svc_, "GET", "/api/nothing"), 404, "not_found");
}

TEST_F(ServiceTest, CatalogFiltersAndPages) {
  Reply r = Call(svc_, "GET", "/api/catalog");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["total"], 60);
  EXPECT_EQ(r.body["entries"].size(), 50u);
  r = Call(svc_, "GET", "/api/catalog?offset=55&limit=10");
  EXPECT_EQ(r.body["entries"].size(), 5u);
  EXPECT_EQ(r.body["entries"][0]["id"], "filler-52");
  r = Call(svc_, "GET", "/api/catalog?limit=100000");
  EXPECT_EQ(r.body["limit"], 500);
  r = Call(svc_, "GET", "/api/catalog?j=2&label=H&k2=3");
  EXPECT_EQ(r.body["total"], 2);
  r = Call(svc_, "GET", "/api/catalog?game=tictactoe-4x4-rc&label=E&k1=3");
  ASSERT_EQ(r.body["total"], 1);
  EXPECT_EQ(r.body["entries"][0]["board"], kShowcaseBoard);
  r = Call(svc_, "GET", "/api/catalog?j=4");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["total"], 0);
  EXPECT_TRUE(r.body["entries"].empty());
  ExpectError(Call(svc_, "GET", "/api/catalog?game=chess"), 404, "unknown_game");
  ExpectError(Call(svc_, "GET", "/api/catalog?label=Q"), 400, "bad_request");
  ExpectError(Call(svc_, "GET", "/api/catalog?j=two"), 400, "bad_request");
  ExpectError(Call(svc_, "GET", "/api/catalog?offset=-1"), 400, "bad_request");
  ExpectError(Call(svc_, "GET", "/api/catalog?color=red"), 400, "bad_request");
}

TEST_F(ServiceTest, CatalogSessionWaitsForHuman) {
  const Reply r = Call(svc_, "POST", "/api/sessions",
                       {{"catalog_id", "showcase-3"}, {"human_side", "X"},
                        {"bot_depth", 3}, {"seed", 77}});
  ASSERT_EQ(r.status, 201) << r.body.dump();
  EXPECT_EQ(r.body["game"], "tictactoe-4x4-rc");
  EXPECT_EQ(r.body["board"], kShowcaseBoard);
  EXPECT_EQ(r.body["start"], kShowcaseBoard);
  EXPECT_EQ(r.body["turn"], "X");
  EXPECT_EQ(r.body["status"], "ongoing");
  EXPECT_EQ(r.body["seed"], 77);
  EXPECT_EQ(r.body["catalog_id"], "showcase-3");
  EXPECT_TRUE(r.body["history"].empty());
  EXPECT_EQ(r.body["legal_moves"].size(), 6u);
  const Reply again = Call(svc_, "GET", "/api/sessions/" + r.body["id"].get<std::string>());
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(again.body["board"], kShowcaseBoard);
}

TEST_F(ServiceTest, BotMovesFirstWhenHumanIsO) {
  const Reply r = Call(svc_, "POST", "/api/sessions",
                       {{"game", "tictactoe-3x3-rcd"},
                        {"board", ".../.../... X"},
                        {"human_side", "O"},
                        {"bot_depth", 2}});
  ASSERT_EQ(r.status, 201) << r.body.dump();
  ASSERT_EQ(r.body["history"].size(), 1u);
  EXPECT_EQ(r.body["history"][0]["player"], "X");
  // Depth 2 has a unique best opening.
  EXPECT_EQ(r.body["history"][0]["row"], 1);
  EXPECT_EQ(r.body["history"][0]["col"], 1);
  EXPECT_EQ(r.body["turn"], "O");
  EXPECT_TRUE(r.body["seed"].is_number_unsigned());
  EXPECT_LT(r.body["seed"].get<std::uint64_t>(), std::uint64_t{1} << 53);
}

TEST_F(ServiceTest, CreateErrors) {
  auto create = [&](Json body) { return Call(svc_, "POST", "/api/sessions", body); };
  ExpectError(create({{"game", "chess"}, {"board", ".../.../... X"}}), 404,
              "unknown_game");
  ExpectError(create({{"catalog_id", "nope"}}), 404, "unknown_catalog_id");
  ExpectError(create({{"game", "tictactoe-3x3-rcd"}, {"board", "..../... X"}}),
              400, "malformed_board");
  ExpectError(create({{"game", "tictactoe-3x3-rcd"}, {"board", "XXX/OO./... O"}}),
              400, "terminal_board");
  ExpectError(create({{"game", "tictactoe-3x3-rcd"}}), 400, "bad_request");
  ExpectError(create({{"catalog_id", "showcase-1"}, {"board", kShowcaseBoard}}), 400,
              "bad_request");
  ExpectError(create({{"game", "tictactoe-3x3-rcd"},
                      {"board", ".../.../... X"},
                      {"bot_depth", 4}}),
              400, "bad_request");
  ExpectError(create({{"game", "tictactoe-3x3-rcd"},
                      {"board", ".../.../... X"},
                      {"human_side", "Z"}}),
              400, "bad_request");
  const HttpResponse raw = svc_.Handle("POST", "/api/sessions", "{oops");
  EXPECT_EQ(raw.status, 400);
  EXPECT_EQ(Json::parse(raw.body)["code"], "bad_json");
  EXPECT_EQ(svc_.session_count(), 0u);
}

TEST_F(ServiceTest, MoveErrors) {
  const Reply c = Call(svc_, "POST", "/api/sessions",
                       {{"game", "bottom2-4x4-rc"},
                        {"board", "..../..../..../.... X"},
                        {"bot_depth", 1},
                        {"seed", 3}});
  ASSERT_EQ(c.status, 201);
  const std::string moves = "/api/sessions/" + c.body["id"].get<std::string>() + "/moves";
  Reply r = Call(svc_, "POST", moves, {{"row", 0}, {"col", 0}});
  ExpectError(r, 422, "illegal_move");
  EXPECT_EQ(r.body["detail"], "gravity");
  EXPECT_NE(r.body["message"].get<std::string>().find("bottom-2"), std::string::npos);
  r = Call(svc_, "POST", moves, {{"row", 9}, {"col", 0}});
  ExpectError(r, 422, "illegal_move");
  EXPECT_EQ(r.body["detail"], "out_of_range");
  ExpectError(Call(svc_, "POST", moves, {{"col", 0}}), 400, "bad_request");
  ExpectError(Call(svc_, "POST", moves, {{"row", 3}}), 400, "bad_request");
  ExpectError(Call(svc_, "GET", moves), 405, "method_not_allowed");
  ExpectError(Call(svc_, "POST", "/api/sessions/nope/moves", {{"row", 3}, {"col", 0}}),
              404, "session_not_found");
  ExpectError(Call(svc_, "GET", "/api/sessions/nope"), 404, "session_not_found");

  r = Call(svc_, "POST", moves, {{"row", 3}, {"col", 0}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  ASSERT_EQ(r.body["last_moves"].size(), 2u);
  const int bot_row = r.body["last_moves"][1]["row"];
  const int bot_col = r.body["last_moves"][1]["col"];
  r = Call(svc_, "POST", moves, {{"row", bot_row}, {"col", bot_col}});
  ExpectError(r, 422, "illegal_move");
  EXPECT_EQ(r.body["detail"], "occupied");
}

TEST_F(ServiceTest, ColumnOnlyMovesUseFullGravity) {
  const Reply c = Call(svc_, "POST", "/api/sessions",
                       {{"game", "connect3-4x4-rcd"},
                        {"board", "..../..../..../.... X"},
                        {"bot_depth", 1},
                        {"seed", 9}});
  const std::string moves = "/api/sessions/" + c.body["id"].get<std::string>() + "/moves";
  Reply r = Call(svc_, "POST", moves, {{"row", 0}, {"col", 2}});
  ExpectError(r, 422, "illegal_move");
  EXPECT_NE(r.body["message"].get<std::string>().find("lowest available position"),
            std::string::npos);
  r = Call(svc_, "POST", moves, {{"col", 2}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["history"][0]["row"], 3);
  EXPECT_EQ(r.body["history"][0]["col"], 2);
  ExpectError(Call(svc_, "POST", moves, {{"col", 7}}), 422, "illegal_move");
}

// Plays random legal human moves to the end and checks the history.
void PlayOut(Service& svc, const std::string& game, std::uint64_t seed) {
  const SessionRequest req{game, std::string(game == "connect3-4x4-rcd"
                                                 ? "..../..../..../.... X"
                                                 : ".../.../... X"),
                           "", Player::P1, 2, seed};
  SessionSnapshot s = svc.CreateSession(req);
  const Game g(Load(game));
  std::mt19937_64 rng(seed);
  while (s.status == GameStatus::kOngoing) {
    const std::vector<Move> legal = g.LegalMoves(s.current);
    const Move m = legal[rng() % legal.size()];
    s = svc.SubmitMove(s.id, m.row, m.col);
  }
  BoardState b = s.start;
  Player expect = Player::P1;
  for (const PlayedMove& m : s.history) {
    ASSERT_EQ(m.player, expect);
    b = g.ApplyMove(b, m.move);
    expect = Opponent(expect);
  }
  EXPECT_EQ(b, s.current);
  EXPECT_EQ(g.Status(b), s.status);
  EXPECT_THROW(svc.SubmitMove(s.id, 0, 0), ServiceError);
}

TEST_F(ServiceTest, HistoryReplaysToCurrentBoard) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlayOut(svc_, "tictactoe-3x3-rcd", seed);
    PlayOut(svc_, "connect3-4x4-rcd", seed);
  }
}

TEST_F(ServiceTest, FinishedSessionRejectsMoves) {
  SessionSnapshot s = svc_.CreateSession(
      {"tictactoe-3x3-rcd", "XX./OO./... X", "", Player::P1, 1, 1});
  s = svc_.SubmitMove(s.id, 0, 2);
  EXPECT_EQ(s.status, GameStatus::kP1Win);
  const Reply r = Call(svc_, "POST", "/api/sessions/" + s.id + "/moves",
                       {{"row", 2}, {"col", 2}});
  ExpectError(r, 409, "session_finished");
}

TEST_F(ServiceTest, SameSeedSameBot) {
  Service other(Games(), MakeCatalog());
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SessionRequest req{"tictactoe-3x3-rcd", ".../.../... X", "", Player::P2, 1, seed};
    EXPECT_EQ(svc_.CreateSession(req).history[0].move,
              other.CreateSession(req).history[0].move);
  }
}

TEST_F(ServiceTest, ConcurrentSessionsStayIsolated) {
  std::vector<std::thread> workers;
  for (int t = 0; t < 6; ++t) {
    workers.emplace_back([this, t] {
      PlayOut(svc_, t % 2 ? "connect3-4x4-rcd" : "tictactoe-3x3-rcd", 100 + t);
    });
  }
  for (std::thread& w : workers) w.join();
  EXPECT_EQ(svc_.session_count(), 6u);
}

TEST(ServiceOptions, BudgetExceededLeavesSessionUnchanged) {
  ServiceOptions o;
  o.move_budget = std::chrono::milliseconds(0);
  Service svc({Load("connect3-4x4-rcd")}, {}, o);
  ExpectError(Call(svc, "POST", "/api/sessions",
                   {{"game", "connect3-4x4-rcd"},
                    {"board", "..../..../..../.... X"},
                    {"human_side", "O"},
                    {"bot_depth", 3}}),
              503, "timeout");
  EXPECT_EQ(svc.session_count(), 0u);
}

TEST(ServiceOptions, IdleSessionsExpire) {
  auto now = std::chrono::steady_clock::now();
  ServiceOptions o;
  o.idle_expiry = std::chrono::seconds(60);
  o.clock = [&now] { return now; };
  Service svc({Load("tictactoe-3x3-rcd")}, {}, o);
  const SessionSnapshot a =
      svc.CreateSession({"tictactoe-3x3-rcd", ".../.../... X", "", Player::P1, 1, 1});
  now += std::chrono::seconds(40);
  const SessionSnapshot b =
      svc.CreateSession({"tictactoe-3x3-rcd", ".../.../... X", "", Player::P1, 1, 2});
  now += std::chrono::seconds(30);
  EXPECT_EQ(svc.ExpireIdle(), 1u);
  ExpectError(Call(svc, "GET", "/api/sessions/" + a.id), 404, "session_not_found");
  EXPECT_EQ(Call(svc, "GET", "/api/sessions/" + b.id).status, 200);
}

TEST(ServiceOptions, JournalRestoresSessions) {
  const fs::path journal =
      fs::temp_directory_path() / ("symgen_journal_" + std::to_string(::getpid()));
  fs::remove(journal);
  ServiceOptions o;
  o.journal = journal;
  SessionSnapshot before;
  {
    Service svc(Games(), MakeCatalog(), o);
    before = svc.CreateSession({"", "", "showcase-1", Player::P1, 2, 5});
    const Game g(Load("tictactoe-4x4-rc"));
    before = svc.SubmitMove(before.id, 0, 1);
    if (before.status == GameStatus::kOngoing) {
      const Move m = g.LegalMoves(before.current).front();
      before = svc.SubmitMove(before.id, m.row, m.col);
    }
  }
  Service restored(Games(), MakeCatalog(), o);
  const SessionSnapshot after = restored.GetSession(before.id);
  EXPECT_EQ(after.current, before.current);
  EXPECT_EQ(after.catalog_id, "showcase-1");
  EXPECT_EQ(after.seed, 5u);
  ASSERT_EQ(after.history.size(), before.history.size());
  for (std::size_t i = 0; i < after.history.size(); ++i) {
    EXPECT_EQ(after.history[i].move, before.history[i].move);
  }
  fs::remove(journal);
}

}  // namespace
}  // namespace symgen::service
