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

// Human-vs-bot play sessions and catalog browsing.
//
// Service holds the state; Handle() maps the JSON API onto it without
// depending on any HTTP library:
//
//   GET  /api/games                  available game specs
//   GET  /api/catalog?game=&j=&label=&k1=&k2=&offset=&limit=
//   POST /api/sessions               {game, board | catalog_id, human_side,
//                                     bot_depth, seed?}
//   GET  /api/sessions/{id}
//   POST /api/sessions/{id}/moves    {row, col} or {col} (full gravity)
//
// Errors are {code, message, detail} with an HTTP status.

#ifndef SYMGEN_SERVICE_H_
#define SYMGEN_SERVICE_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symgen/classify.h"
#include "symgen/error.h"
#include "symgen/pipeline.h"
#include "symgen/rules.h"
#include "symgen/strategy.h"

namespace symgen::service {

class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message,
               std::string detail = {})
      : Error(message),
        status_(status),
        code_(std::move(code)),
        detail_(std::move(detail)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  int status_;
  std::string code_;
  std::string detail_;
};

struct ServiceOptions {
  int max_bot_depth = 3;
  // Search budget for one bot reply; exceeding it is a timeout error and
  // leaves the session unchanged.
  std::chrono::milliseconds move_budget{10000};
  // Sessions untouched for this long are dropped.
  std::chrono::seconds idle_expiry{3600};
  // Append-only journal replayed at startup; empty disables it.
  std::filesystem::path journal;
  std::string cors_origin = "*";
  std::size_t default_page_size = 50;
  std::size_t max_page_size = 500;
  // Time source for expiry, replaceable in tests.
  std::function<std::chrono::steady_clock::time_point()> clock;
};

struct CatalogQuery {
  std::optional<std::string> game;
  std::optional<int> j;
  std::optional<Label> label;
  std::optional<int> k1;
  std::optional<int> k2;
  std::size_t offset = 0;
  std::optional<std::size_t> limit;
};

struct CatalogPage {
  std::size_t total = 0;
  std::size_t offset = 0;
  std::size_t limit = 0;
  std::vector<pipeline::CatalogEntry> entries;
};

struct SessionRequest {
  std::string game;
  // Exactly one of board and catalog_id.
  std::string board;
  std::string catalog_id;
  Player human_side = Player::P1;
  int bot_depth = 3;
  std::optional<std::uint64_t> seed;
};

struct PlayedMove {
  Move move;
  Player player = Player::P1;
};

struct SessionSnapshot {
  std::string id;
  std::string game;
  std::string catalog_id;
  BoardState start;
  BoardState current;
  Player human_side = Player::P1;
  int bot_depth = 1;
  std::uint64_t seed = 0;
  std::vector<PlayedMove> history;
  // Moves applied by the request that produced this snapshot.
  std::vector<PlayedMove> last_moves;
  GameStatus status = GameStatus::kOngoing;
  std::string created_at;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

class Service {
 public:
  // Games are addressed by spec name; catalog games are added to `games`.
  Service(std::vector<GameSpec> games, pipeline::Catalog catalog,
          ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceOptions& options() const { return options_; }
  std::vector<GameSpec> Games() const;

  CatalogPage ListCatalog(const CatalogQuery& query) const;
  SessionSnapshot CreateSession(const SessionRequest& request);
  // `row` may be omitted for full-gravity games.
  SessionSnapshot SubmitMove(const std::string& id, std::optional<int> row,
                             int col);
  SessionSnapshot GetSession(const std::string& id);
  std::size_t session_count() const;
  // Drops idle sessions; returns how many were removed.
  std::size_t ExpireIdle();

  // Routes one API request. `target` is the path with an optional query
  // string. Never throws.
  HttpResponse Handle(std::string_view method, std::string_view target,
                      std::string_view body);

  std::string SnapshotJson(const SessionSnapshot& snapshot) const;

 private:
  struct Session;
  struct GameEntry;

  const GameEntry& FindGame(const std::string& name) const;
  std::shared_ptr<Session> FindSession(const std::string& id);
  SessionSnapshot CreateLocked(const SessionRequest& request,
                               const std::string& id, std::uint64_t seed,
                               bool journal);
  SessionSnapshot MoveLocked(Session& session, std::optional<int> row,
                             int col, bool journal);
  SessionSnapshot Snapshot(const Session& session) const;
  void BotReply(Session& session, BoardState& board,
                std::vector<PlayedMove>& played);
  void Journal(const std::string& line);
  void ReplayJournal();
  std::chrono::steady_clock::time_point Now() const;
  std::string NewId();
  std::uint64_t NewSeed();

  ServiceOptions options_;
  std::vector<std::unique_ptr<GameEntry>> games_;
  pipeline::Catalog catalog_;
  std::map<std::string, std::size_t> catalog_index_;
  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex journal_mu_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

}  // namespace symgen::service

#endif  // SYMGEN_SERVICE_H_
