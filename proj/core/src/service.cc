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

#include <algorithm>
#include <charconv>
#include <ctime>
#include <fstream>
#include <random>
#include <utility>

#include <nlohmann/json.hpp>

namespace symgen::service {
namespace {

using Json = nlohmann::ordered_json;

std::string Iso8601Now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string SideName(Player p) { return p == Player::P1 ? "X" : "O"; }

Player ParseSide(const std::string& text) {
  if (text == "X" || text == "P1") return Player::P1;
  if (text == "O" || text == "P2") return Player::P2;
  throw ServiceError(400, "bad_request", "human_side must be X or O", text);
}

Json MoveJson(const PlayedMove& m) {
  return {{"row", m.move.row},
          {"col", m.move.col},
          {"player", SideName(m.player)}};
}

Json EntryJson(const pipeline::CatalogEntry& e) {
  Json labels = Json::array();
  for (const pipeline::CatalogLabel& l : e.labels) {
    labels.push_back({{"k1", l.k1},
                      {"k2", l.k2},
                      {"label", std::string(1, ToChar(l.label))},
                      {"n_games", l.n_games},
                      {"p1_wins", l.p1_wins},
                      {"draws", l.draws},
                      {"p2_wins", l.p2_wins},
                      {"seed", l.seed}});
  }
  return {{"id", e.id},          {"game", e.game},
          {"board", e.board},    {"j", e.j},
          {"labels", labels},    {"config_hash", e.config_hash}};
}

Json ErrorJson(const std::string& code, const std::string& message,
               const std::string& detail) {
  return {{"code", code}, {"message", message}, {"detail", detail}};
}

std::string UrlDecode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size()) {
      int v = 0;
      const auto [p, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3,
                                           v, 16);
      if (ec != std::errc() || p != s.data() + i + 3) {
        throw ServiceError(400, "bad_request", "malformed percent escape");
      }
      out += static_cast<char>(v);
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::map<std::string, std::string> ParseQuery(std::string_view q) {
  std::map<std::string, std::string> out;
  while (!q.empty()) {
    const std::size_t amp = q.find('&');
    const std::string_view part = q.substr(0, amp);
    if (!part.empty()) {
      const std::size_t eq = part.find('=');
      out[UrlDecode(part.substr(0, eq))] =
          eq == std::string_view::npos ? "" : UrlDecode(part.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    q.remove_prefix(amp + 1);
  }
  return out;
}

std::int64_t ParseInt(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ServiceError(400, "bad_request", key + " must be an integer", text);
  }
  return v;
}

template <typename T>
T Field(const Json& body, const char* key) {
  try {
    return body.at(key).get<T>();
  } catch (const std::exception&) {
    throw ServiceError(400, "bad_request",
                       std::string("field '") + key + "' missing or mistyped");
  }
}

}  // namespace

struct Service::GameEntry {
  explicit GameEntry(GameSpec s) : spec(s), game(std::move(s)) {}
  GameSpec spec;
  Game game;
};

struct Service::Session {
  std::mutex mu;
  bool alive = true;
  std::string id;
  const GameEntry* game = nullptr;
  std::string catalog_id;
  BoardState start;
  BoardState current;
  Player human_side = Player::P1;
  int bot_depth = 1;
  std::uint64_t seed = 0;
  std::vector<PlayedMove> history;
  GameStatus status = GameStatus::kOngoing;
  std::string created_at;
  std::unique_ptr<Strategy> bot;
  std::chrono::steady_clock::time_point last_used;
};

Service::Service(std::vector<GameSpec> games, pipeline::Catalog catalog,
                 ServiceOptions options)
    : options_(std::move(options)),
      catalog_(std::move(catalog)),
      rng_(std::random_device{}()) {
  if (options_.max_bot_depth < 1) {
    throw ConfigError("max_bot_depth", "must be at least 1");
  }
  for (const pipeline::CatalogGame& g : catalog_.games) games.push_back(g.spec);
  for (GameSpec& spec : games) {
    spec.Validate();
    if (spec.name.empty()) throw ConfigError("name", "served games need a name");
    const auto same = [&](const std::unique_ptr<GameEntry>& e) {
      return e->spec.name == spec.name;
    };
    const auto it = std::find_if(games_.begin(), games_.end(), same);
    if (it != games_.end()) {
      if ((*it)->spec != spec) {
        throw ConfigError("name", "two different games named " + spec.name);
      }
      continue;
    }
    games_.push_back(std::make_unique<GameEntry>(spec));
  }
  for (std::size_t i = 0; i < catalog_.entries.size(); ++i) {
    catalog_index_[catalog_.entries[i].id] = i;
  }
  if (!options_.journal.empty()) ReplayJournal();
}

Service::~Service() = default;

std::chrono::steady_clock::time_point Service::Now() const {
  return options_.clock ? options_.clock() : std::chrono::steady_clock::now();
}

std::string Service::NewId() {
  std::lock_guard<std::mutex> lock(rng_mu_);
  static const char kDigits[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 2; ++i) {
    std::uint64_t v = rng_();
    for (int d = 0; d < 16; ++d, v >>= 4) id += kDigits[v & 15];
  }
  return id;
}

// Kept below 2^53 so JSON clients can hold it exactly.
std::uint64_t Service::NewSeed() {
  std::lock_guard<std::mutex> lock(rng_mu_);
  return rng_() >> 11;
}

std::vector<GameSpec> Service::Games() const {
  std::vector<GameSpec> out;
  for (const auto& g : games_) out.push_back(g->spec);
  return out;
}

const Service::GameEntry& Service::FindGame(const std::string& name) const {
  for (const auto& g : games_) {
    if (g->spec.name == name) return *g;
  }
  throw ServiceError(404, "unknown_game", "no game named '" + name + "'");
}

CatalogPage Service::ListCatalog(const CatalogQuery& query) const {
  if (query.game) FindGame(*query.game);
  CatalogPage page;
  page.offset = query.offset;
  page.limit = std::min(query.limit.value_or(options_.default_page_size),
                        options_.max_page_size);
  const bool label_filter = query.label || query.k1 || query.k2;
  for (const pipeline::CatalogEntry& e : catalog_.entries) {
    if (query.game && e.game != *query.game) continue;
    if (query.j && e.j != *query.j) continue;
    if (label_filter) {
      const bool any = std::any_of(
          e.labels.begin(), e.labels.end(), [&](const pipeline::CatalogLabel& l) {
            return (!query.label || l.label == *query.label) &&
                   (!query.k1 || l.k1 == *query.k1) &&
                   (!query.k2 || l.k2 == *query.k2);
          });
      if (!any) continue;
    }
    if (page.total >= page.offset && page.entries.size() < page.limit) {
      page.entries.push_back(e);
    }
    ++page.total;
  }
  return page;
}

SessionSnapshot Service::Snapshot(const Session& s) const {
  SessionSnapshot out;
  out.id = s.id;
  out.game = s.game->spec.name;
  out.catalog_id = s.catalog_id;
  out.start = s.start;
  out.current = s.current;
  out.human_side = s.human_side;
  out.bot_depth = s.bot_depth;
  out.seed = s.seed;
  out.history = s.history;
  out.status = s.status;
  out.created_at = s.created_at;
  return out;
}

// Plays the bot's move on `board` if it is the bot's turn. Nothing is
// committed to the session here, so a timeout leaves it untouched.
void Service::BotReply(Session& s, BoardState& board,
                       std::vector<PlayedMove>& played) {
  if (s.game->game.Status(board) != GameStatus::kOngoing ||
      board.turn() == s.human_side) {
    return;
  }
  MoveEvaluation eval;
  try {
    SearchOptions search;
    search.deadline = std::chrono::steady_clock::now() + options_.move_budget;
    eval = EvaluateMoves(s.game->game, board, s.bot_depth, search);
  } catch (const TimeoutError&) {
    throw ServiceError(503, "timeout",
                       "bot search exceeded its time budget",
                       "depth " + std::to_string(s.bot_depth));
  }
  const Move m = s.bot->Choose(eval);
  played.push_back({m, board.turn()});
  board = s.game->game.Play(board, board.index(m.row, m.col));
}

SessionSnapshot Service::CreateLocked(const SessionRequest& request,
                                      const std::string& id,
                                      std::uint64_t seed, bool journal) {
  if (request.board.empty() == request.catalog_id.empty()) {
    throw ServiceError(400, "bad_request",
                       "give exactly one of board and catalog_id");
  }
  std::string game_name = request.game;
  std::string literal = request.board;
  if (!request.catalog_id.empty()) {
    const auto it = catalog_index_.find(request.catalog_id);
    if (it == catalog_index_.end()) {
      throw ServiceError(404, "unknown_catalog_id",
                         "no catalog entry '" + request.catalog_id + "'");
    }
    const pipeline::CatalogEntry& e = catalog_.entries[it->second];
    if (!game_name.empty() && game_name != e.game) {
      throw ServiceError(400, "bad_request",
                         "catalog entry belongs to game " + e.game);
    }
    game_name = e.game;
    literal = e.board;
  }
  const GameEntry& game = FindGame(game_name);
  if (request.bot_depth < 1 || request.bot_depth > options_.max_bot_depth) {
    throw ServiceError(400, "bad_request",
                       "bot_depth must lie in 1.." +
                           std::to_string(options_.max_bot_depth),
                       std::to_string(request.bot_depth));
  }
  BoardState start;
  try {
    start = ParseBoardLiteral(game.spec, literal);
    game.game.CheckBoard(start);
  } catch (const BoardError& e) {
    throw ServiceError(400, "malformed_board", e.what(), literal);
  }
  if (game.game.Status(start) != GameStatus::kOngoing) {
    throw ServiceError(400, "terminal_board", "the board is already decided",
                       std::string(ToString(game.game.Status(start))));
  }

  auto s = std::make_shared<Session>();
  s->id = id;
  s->game = &game;
  s->catalog_id = request.catalog_id;
  s->start = start;
  s->current = start;
  s->human_side = request.human_side;
  s->bot_depth = request.bot_depth;
  s->seed = seed;
  s->created_at = Iso8601Now();
  s->bot = std::make_unique<Strategy>(
      game.game,
      StrategyProfile{request.bot_depth, Opponent(request.human_side), seed});
  s->last_used = Now();

  std::vector<PlayedMove> played;
  BoardState board = start;
  BotReply(*s, board, played);
  s->current = board;
  s->history = played;
  s->status = game.game.Status(board);

  if (journal) {
    Json line = {{"op", "create"},
                 {"id", id},
                 {"game", game.spec.name},
                 {"board", ToBoardLiteral(start)},
                 {"catalog_id", request.catalog_id},
                 {"human_side", SideName(request.human_side)},
                 {"bot_depth", request.bot_depth},
                 {"seed", seed}};
    Journal(line.dump());
  }
  SessionSnapshot out = Snapshot(*s);
  out.last_moves = std::move(played);
  {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    sessions_[id] = std::move(s);
  }
  return out;
}

SessionSnapshot Service::CreateSession(const SessionRequest& request) {
  ExpireIdle();
  return CreateLocked(request, NewId(),
                      request.seed ? *request.seed : NewSeed(), true);
}

std::shared_ptr<Service::Session> Service::FindSession(const std::string& id) {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw ServiceError(404, "session_not_found", "no session '" + id + "'");
  }
  return it->second;
}

SessionSnapshot Service::MoveLocked(Session& s, std::optional<int> row,
                                    int col, bool journal) {
  const Game& game = s.game->game;
  if (s.status != GameStatus::kOngoing) {
    throw ServiceError(409, "session_finished", "the game is over",
                       std::string(ToString(s.status)));
  }
  if (s.current.turn() != s.human_side) {
    throw ServiceError(409, "not_your_turn", "it is the bot's turn");
  }
  if (!row) {
    if (s.game->spec.gravity.kind() != Gravity::Kind::kFull) {
      throw ServiceError(400, "bad_request",
                         "row is required unless the game has full gravity");
    }
    if (col < 0 || col >= game.cols()) {
      throw ServiceError(422, "illegal_move", "column out of range",
                         "out_of_range");
    }
    for (int r = game.rows() - 1; r >= 0 && !row; --r) {
      if (s.current.at(r, col) == Cell::Empty) row = r;
    }
    if (!row) {
      throw ServiceError(422, "illegal_move", "the column is full", "occupied");
    }
  }
  BoardState board;
  try {
    board = game.ApplyMove(s.current, {*row, col});
  } catch (const IllegalMoveError& e) {
    throw ServiceError(422, "illegal_move", e.what(), e.rule());
  }
  std::vector<PlayedMove> played{{{*row, col}, s.human_side}};
  BotReply(s, board, played);

  s.current = board;
  s.history.insert(s.history.end(), played.begin(), played.end());
  s.status = game.Status(board);
  s.last_used = Now();
  if (journal) {
    Journal(Json{{"op", "move"}, {"id", s.id}, {"row", *row}, {"col", col}}
                .dump());
  }
  SessionSnapshot out = Snapshot(s);
  out.last_moves = std::move(played);
  return out;
}

SessionSnapshot Service::SubmitMove(const std::string& id,
                                    std::optional<int> row, int col) {
  const std::shared_ptr<Session> s = FindSession(id);
  std::lock_guard<std::mutex> lock(s->mu);
  if (!s->alive) {
    throw ServiceError(404, "session_not_found", "no session '" + id + "'");
  }
  return MoveLocked(*s, row, col, true);
}

SessionSnapshot Service::GetSession(const std::string& id) {
  const std::shared_ptr<Session> s = FindSession(id);
  std::lock_guard<std::mutex> lock(s->mu);
  if (!s->alive) {
    throw ServiceError(404, "session_not_found", "no session '" + id + "'");
  }
  s->last_used = Now();
  return Snapshot(*s);
}

std::size_t Service::session_count() const {
  std::lock_guard<std::mutex> lock(sessions_mu_);
  return sessions_.size();
}

std::size_t Service::ExpireIdle() {
  const auto now = Now();
  std::vector<std::shared_ptr<Session>> candidates;
  {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    for (const auto& [id, s] : sessions_) candidates.push_back(s);
  }
  std::size_t removed = 0;
  for (const auto& s : candidates) {
    std::lock_guard<std::mutex> session_lock(s->mu);
    if (now - s->last_used < options_.idle_expiry) continue;
    s->alive = false;
    std::lock_guard<std::mutex> lock(sessions_mu_);
    removed += sessions_.erase(s->id);
  }
  return removed;
}

void Service::Journal(const std::string& line) {
  if (options_.journal.empty()) return;
  std::lock_guard<std::mutex> lock(journal_mu_);
  std::ofstream out(options_.journal, std::ios::app);
  out << line << "\n";
  out.flush();
  if (!out) throw ServiceError(500, "journal", "cannot append to the journal");
}

// Rebuilds sessions by re-running the journalled requests; bot replies are
// reproduced from the stored seeds.
void Service::ReplayJournal() {
  std::ifstream in(options_.journal);
  if (!in) return;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      const std::string op = j.at("op").get<std::string>();
      if (op == "create") {
        SessionRequest r;
        r.game = j.at("game").get<std::string>();
        r.board = j.at("board").get<std::string>();
        r.human_side = ParseSide(j.at("human_side").get<std::string>());
        r.bot_depth = j.at("bot_depth").get<int>();
        const std::string id = j.at("id").get<std::string>();
        CreateLocked(r, id, j.at("seed").get<std::uint64_t>(), false);
        FindSession(id)->catalog_id = j.value("catalog_id", "");
      } else if (op == "move") {
        const std::shared_ptr<Session> s =
            FindSession(j.at("id").get<std::string>());
        std::lock_guard<std::mutex> lock(s->mu);
        MoveLocked(*s, j.at("row").get<int>(), j.at("col").get<int>(), false);
      }
    } catch (const std::exception&) {
      // A line that no longer applies (unknown game, dropped session) is
      // skipped; the rest of the journal is still usable.
    }
  }
}

std::string Service::SnapshotJson(const SessionSnapshot& s) const {
  const GameEntry& g = FindGame(s.game);
  Json history = Json::array();
  for (const PlayedMove& m : s.history) history.push_back(MoveJson(m));
  Json last = Json::array();
  for (const PlayedMove& m : s.last_moves) last.push_back(MoveJson(m));
  Json legal = Json::array();
  if (s.status == GameStatus::kOngoing && s.current.turn() == s.human_side) {
    for (const Move& m : g.game.LegalMoves(s.current)) {
      legal.push_back({{"row", m.row}, {"col", m.col}});
    }
  }
  Json out = {{"id", s.id},
              {"game", s.game},
              {"catalog_id", s.catalog_id},
              {"start", ToBoardLiteral(s.start)},
              {"board", ToBoardLiteral(s.current)},
              {"turn", SideName(s.current.turn())},
              {"human_side", SideName(s.human_side)},
              {"bot_depth", s.bot_depth},
              {"seed", s.seed},
              {"status", std::string(ToString(s.status))},
              {"history", history},
              {"last_moves", last},
              {"legal_moves", legal},
              {"created_at", s.created_at}};
  return out.dump();
}

HttpResponse Service::Handle(std::string_view method, std::string_view target,
                             std::string_view body) {
  try {
    const std::size_t qpos = target.find('?');
    const std::string_view path = target.substr(0, qpos);
    const auto query = qpos == std::string_view::npos
                           ? std::map<std::string, std::string>{}
                           : ParseQuery(target.substr(qpos + 1));
    auto parse_body = [&] {
      try {
        const Json j = body.empty() ? Json::object() : Json::parse(body);
        if (!j.is_object()) throw std::runtime_error("not an object");
        return j;
      } catch (const std::exception& e) {
        throw ServiceError(400, "bad_json", "request body is not a JSON object",
                           e.what());
      }
    };
    auto not_allowed = [&] {
      return ServiceError(405, "method_not_allowed",
                          std::string(method) + " not allowed on " +
                              std::string(path));
    };

    if (path == "/api/games") {
      if (method != "GET") throw not_allowed();
      Json games = Json::array();
      for (const auto& g : games_) {
        Json spec = Json::parse(GameSpecToConfig(g->spec));
        spec["config_hash"] = pipeline::ConfigHash(g->spec);
        spec["move_rule"] = g->game.MoveRuleText();
        games.push_back(std::move(spec));
      }
      return {200, Json{{"games", games}}.dump()};
    }
    if (path == "/api/catalog") {
      if (method != "GET") throw not_allowed();
      CatalogQuery q;
      for (const auto& [key, value] : query) {
        if (key == "game") {
          q.game = value;
        } else if (key == "j") {
          q.j = static_cast<int>(ParseInt(key, value));
        } else if (key == "label") {
          try {
            q.label = ParseLabel(value);
          } catch (const ConfigError& e) {
            throw ServiceError(400, "bad_request", e.what(), value);
          }
        } else if (key == "k1") {
          q.k1 = static_cast<int>(ParseInt(key, value));
        } else if (key == "k2") {
          q.k2 = static_cast<int>(ParseInt(key, value));
        } else if (key == "offset" || key == "limit") {
          const std::int64_t v = ParseInt(key, value);
          if (v < 0) throw ServiceError(400, "bad_request", key + " is negative");
          (key == "offset" ? q.offset : q.limit.emplace()) =
              static_cast<std::size_t>(v);
        } else {
          throw ServiceError(400, "bad_request", "unknown filter '" + key + "'");
        }
      }
      const CatalogPage page = ListCatalog(q);
      Json entries = Json::array();
      for (const auto& e : page.entries) entries.push_back(EntryJson(e));
      return {200, Json{{"total", page.total},
                        {"offset", page.offset},
                        {"limit", page.limit},
                        {"entries", entries}}
                       .dump()};
    }
    if (path == "/api/sessions") {
      if (method != "POST") throw not_allowed();
      const Json j = parse_body();
      SessionRequest r;
      r.game = j.value("game", "");
      r.board = j.value("board", "");
      r.catalog_id = j.value("catalog_id", "");
      if (j.contains("human_side")) {
        r.human_side = ParseSide(Field<std::string>(j, "human_side"));
      }
      if (j.contains("bot_depth")) r.bot_depth = Field<int>(j, "bot_depth");
      if (j.contains("seed") && !j["seed"].is_null()) {
        r.seed = Field<std::uint64_t>(j, "seed");
      }
      return {201, SnapshotJson(CreateSession(r))};
    }
    constexpr std::string_view kSessions = "/api/sessions/";
    if (path.starts_with(kSessions)) {
      std::string_view rest = path.substr(kSessions.size());
      const std::size_t slash = rest.find('/');
      const std::string id(rest.substr(0, slash));
      const std::string_view tail =
          slash == std::string_view::npos ? "" : rest.substr(slash);
      if (tail.empty()) {
        if (method != "GET") throw not_allowed();
        ExpireIdle();
        return {200, SnapshotJson(GetSession(id))};
      }
      if (tail == "/moves") {
        if (method != "POST") throw not_allowed();
        const Json j = parse_body();
        std::optional<int> row;
        if (j.contains("row") && !j["row"].is_null()) row = Field<int>(j, "row");
        const int col = Field<int>(j, "col");
        ExpireIdle();
        return {200, SnapshotJson(SubmitMove(id, row, col))};
      }
    }
    throw ServiceError(404, "not_found", "no route for " + std::string(path));
  } catch (const ServiceError& e) {
    return {e.status(), ErrorJson(e.code(), e.what(), e.detail()).dump()};
  } catch (const std::exception& e) {
    return {500, ErrorJson("internal", e.what(), "").dump()};
  }
}

}  // namespace symgen::service
