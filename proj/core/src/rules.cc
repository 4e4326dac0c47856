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

#include "symgen/rules.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "symgen/error.h"

namespace symgen {

namespace {

std::uint64_t Bit(int i) { return std::uint64_t{1} << i; }

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string WinDirs::ToString() const {
  std::string s;
  if (row) s += 'R';
  if (col) s += 'C';
  if (diag) s += 'D';
  return s;
}

WinDirs WinDirs::Parse(std::string_view text) {
  WinDirs dirs{false, false, false};
  auto set = [&](bool& flag, char ch) {
    if (flag) {
      throw ConfigError("win_dirs",
                        "direction '" + std::string(1, ch) + "' repeated");
    }
    flag = true;
  };
  for (char ch : text) {
    switch (std::toupper(static_cast<unsigned char>(ch))) {
      case 'R': set(dirs.row, ch); break;
      case 'C': set(dirs.col, ch); break;
      case 'D': set(dirs.diag, ch); break;
      default:
        throw ConfigError("win_dirs", "unexpected character '" +
                                          std::string(1, ch) +
                                          "' (expected R, C or D)");
    }
  }
  if (dirs.empty()) throw ConfigError("win_dirs", "no winning direction");
  return dirs;
}

Gravity Gravity::Parse(std::string_view text) {
  const std::string t = Lower(Trim(text));
  if (t == "none") return None();
  if (t == "full") return Full();
  constexpr std::string_view kPrefix = "bottom:";
  if (t.rfind(kPrefix, 0) == 0) {
    const std::string digits = t.substr(kPrefix.size());
    int depth = 0;
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), depth);
    if (ec != std::errc() || ptr != digits.data() + digits.size() ||
        digits.empty()) {
      throw ConfigError("gravity", "bad bottom depth in '" + t + "'");
    }
    if (depth < 1) throw ConfigError("gravity", "bottom depth must be >= 1");
    return Bottom(depth);
  }
  throw ConfigError("gravity",
                    "expected none, full or bottom:<l>, got '" + t + "'");
}

int Gravity::EffectiveDepth(int rows) const {
  switch (kind_) {
    case Kind::kNone: return rows;
    case Kind::kFull: return 1;
    case Kind::kBottom: return std::min(depth_, rows);
  }
  return rows;
}

std::string Gravity::ToString() const {
  switch (kind_) {
    case Kind::kNone: return "none";
    case Kind::kFull: return "full";
    case Kind::kBottom: return "bottom:" + std::to_string(depth_);
  }
  return "none";
}

void GameSpec::Validate() const {
  if (rows < 1) throw ConfigError("rows", "must be positive");
  if (cols < 1) throw ConfigError("cols", "must be positive");
  if (rows * cols > kMaxCells) {
    throw ConfigError("rows", "board has " + std::to_string(rows * cols) +
                                  " cells, at most " +
                                  std::to_string(kMaxCells) + " supported");
  }
  if (match_len < 1) throw ConfigError("match_len", "must be positive");
  if (match_len > std::max(rows, cols)) {
    throw ConfigError("match_len", "exceeds the larger board dimension");
  }
  if (win_dirs.empty()) throw ConfigError("win_dirs", "no winning direction");
  if (gravity.kind() == Gravity::Kind::kBottom &&
      (gravity.depth() < 1 || gravity.depth() > rows)) {
    throw ConfigError("gravity", "bottom depth " +
                                     std::to_string(gravity.depth()) +
                                     " outside 1.." + std::to_string(rows));
  }
}

GameSpec ParseGameSpec(std::string_view config_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("syntax error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");

  static const std::set<std::string> kKeys = {"name",     "rows",     "cols",
                                              "match_len", "win_dirs", "gravity"};
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError(key, "unknown key");
  }
  auto require_int = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(key, "missing");
    if (!j[key].is_number_integer()) throw ConfigError(key, "must be an integer");
    return j[key].get<int>();
  };
  auto require_string = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(key, "missing");
    if (!j[key].is_string()) throw ConfigError(key, "must be a string");
    return j[key].get<std::string>();
  };

  GameSpec spec;
  spec.name = j.contains("name") ? require_string("name") : std::string();
  spec.rows = require_int("rows");
  spec.cols = require_int("cols");
  spec.match_len = require_int("match_len");
  spec.win_dirs = WinDirs::Parse(require_string("win_dirs"));
  spec.gravity = Gravity::Parse(require_string("gravity"));
  spec.Validate();
  return spec;
}

std::string GameSpecToConfig(const GameSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["rows"] = spec.rows;
  j["cols"] = spec.cols;
  j["match_len"] = spec.match_len;
  j["win_dirs"] = spec.win_dirs.ToString();
  j["gravity"] = spec.gravity.ToString();
  return j.dump(2) + "\n";
}

Cell BoardState::at(int row, int col) const {
  const std::uint64_t b = Bit(index(row, col));
  if (x_ & b) return Cell::X;
  if (o_ & b) return Cell::O;
  return Cell::Empty;
}

void BoardState::set(int row, int col, Cell cell) {
  const std::uint64_t b = Bit(index(row, col));
  x_ &= ~b;
  o_ &= ~b;
  if (cell == Cell::X) x_ |= b;
  if (cell == Cell::O) o_ |= b;
}

int BoardState::count(Cell mark) const {
  switch (mark) {
    case Cell::X: return std::popcount(x_);
    case Cell::O: return std::popcount(o_);
    case Cell::Empty: return rows_ * cols_ - std::popcount(x_ | o_);
  }
  return 0;
}

bool BoardState::HasConsistentTurn() const {
  const int diff = std::popcount(x_) - std::popcount(o_);
  if (diff == 0) return turn_ == Player::P1;
  if (diff == 1) return turn_ == Player::P2;
  return false;
}

BoardState BoardState::Mirrored() const {
  return BoardState(rows_, cols_, o_, x_, Opponent(turn_));
}

BoardState ParseBoardLiteral(std::string_view text) {
  const std::string t = Trim(text);
  const std::size_t space = t.find_first_of(" \t");
  if (space == std::string::npos) {
    throw BoardError("board literal lacks the side to move: '" + t + "'");
  }
  const std::string grid = t.substr(0, space);
  const std::string side = Trim(std::string_view(t).substr(space));

  std::vector<std::string> rows;
  std::stringstream ss(grid);
  for (std::string row; std::getline(ss, row, '/');) rows.push_back(row);
  if (!grid.empty() && grid.back() == '/') rows.emplace_back();
  if (rows.empty() || rows.front().empty()) {
    throw BoardError("board literal has no cells");
  }
  const int n_rows = static_cast<int>(rows.size());
  const int n_cols = static_cast<int>(rows.front().size());
  if (n_rows * n_cols > kMaxCells) throw BoardError("board too large");

  BoardState state(n_rows, n_cols);
  for (int r = 0; r < n_rows; ++r) {
    if (static_cast<int>(rows[r].size()) != n_cols) {
      throw BoardError("row " + std::to_string(r) + " has " +
                       std::to_string(rows[r].size()) + " cells, expected " +
                       std::to_string(n_cols));
    }
    for (int c = 0; c < n_cols; ++c) {
      switch (rows[r][c]) {
        case 'X': state.set(r, c, Cell::X); break;
        case 'O': state.set(r, c, Cell::O); break;
        case '.': break;
        default:
          throw BoardError(std::string("unexpected cell character '") +
                           rows[r][c] + "'");
      }
    }
  }
  if (side == "X") {
    state.set_turn(Player::P1);
  } else if (side == "O") {
    state.set_turn(Player::P2);
  } else {
    throw BoardError("side to move must be X or O, got '" + side + "'");
  }
  if (!state.HasConsistentTurn()) {
    throw BoardError("mark counts (X=" + std::to_string(state.count(Cell::X)) +
                     ", O=" + std::to_string(state.count(Cell::O)) +
                     ") do not match side to move " + side);
  }
  return state;
}

BoardState ParseBoardLiteral(const GameSpec& spec, std::string_view text) {
  BoardState state = ParseBoardLiteral(text);
  if (state.rows() != spec.rows || state.cols() != spec.cols) {
    throw BoardError("board is " + std::to_string(state.rows()) + "x" +
                     std::to_string(state.cols()) + ", game " + spec.name +
                     " is " + std::to_string(spec.rows) + "x" +
                     std::to_string(spec.cols));
  }
  return state;
}

std::string ToBoardLiteral(const BoardState& state) {
  std::string s;
  for (int r = 0; r < state.rows(); ++r) {
    if (r) s += '/';
    for (int c = 0; c < state.cols(); ++c) {
      switch (state.at(r, c)) {
        case Cell::X: s += 'X'; break;
        case Cell::O: s += 'O'; break;
        case Cell::Empty: s += '.'; break;
      }
    }
  }
  s += state.turn() == Player::P1 ? " X" : " O";
  return s;
}

std::string_view ToString(GameStatus status) {
  switch (status) {
    case GameStatus::kOngoing: return "ongoing";
    case GameStatus::kP1Win: return "p1_win";
    case GameStatus::kP2Win: return "p2_win";
    case GameStatus::kDraw: return "draw";
  }
  return "ongoing";
}

std::string Reward::ToString() const {
  if (is_plus_infinity()) return "+inf";
  if (is_minus_infinity()) return "-inf";
  return (value_ > 0 ? "+" : "") + std::to_string(value_);
}

Game::Game(GameSpec spec) : spec_(std::move(spec)) {
  spec_.Validate();
  gravity_depth_ = spec_.gravity.EffectiveDepth(spec_.rows);
  const int n = spec_.cells();
  full_mask_ = n == 64 ? ~std::uint64_t{0} : Bit(n) - 1;

  const int m = spec_.match_len;
  auto add_window = [&](int r0, int c0, int dr, int dc) {
    std::uint64_t w = 0;
    for (int i = 0; i < m; ++i) {
      const int r = r0 + i * dr;
      const int c = c0 + i * dc;
      if (r < 0 || r >= spec_.rows || c < 0 || c >= spec_.cols) return;
      w |= Bit(r * spec_.cols + c);
    }
    windows_.push_back(w);
  };
  for (int r = 0; r < spec_.rows; ++r) {
    for (int c = 0; c < spec_.cols; ++c) {
      if (spec_.win_dirs.row) add_window(r, c, 0, 1);
      if (spec_.win_dirs.col) add_window(r, c, 1, 0);
      if (spec_.win_dirs.diag) {
        add_window(r, c, 1, 1);
        add_window(r, c, 1, -1);
      }
    }
  }
  // A single-cell window is produced by every direction; keep one copy.
  std::sort(windows_.begin(), windows_.end());
  windows_.erase(std::unique(windows_.begin(), windows_.end()), windows_.end());
}

std::uint64_t Game::LegalMask(const BoardState& state) const {
  const std::uint64_t occ = state.occupied();
  std::uint64_t mask = 0;
  for (int c = 0; c < spec_.cols; ++c) {
    int empties_below = 0;
    for (int r = spec_.rows - 1; r >= 0 && empties_below < gravity_depth_; --r) {
      const int i = r * spec_.cols + c;
      if (!(occ & Bit(i))) {
        mask |= Bit(i);
        ++empties_below;
      }
    }
  }
  return mask;
}

std::vector<Move> Game::LegalMoves(const BoardState& state) const {
  const std::uint64_t mask = LegalMask(state);
  std::vector<Move> moves;
  for (int c = 0; c < spec_.cols; ++c) {
    for (int r = spec_.rows - 1; r >= 0; --r) {
      if (mask & Bit(r * spec_.cols + c)) moves.push_back({r, c});
    }
  }
  return moves;
}

std::string Game::MoveRuleText() const {
  switch (spec_.gravity.kind()) {
    case Gravity::Kind::kFull:
      return "the move must be the lowest available position in that column";
    case Gravity::Kind::kBottom:
      return "the move must be one of the bottom-" +
             std::to_string(gravity_depth_) +
             " available positions in the column";
    case Gravity::Kind::kNone:
      return "any available position may be chosen";
  }
  return {};
}

BoardState Game::ApplyMove(const BoardState& state, Move move) const {
  if (move.row < 0 || move.row >= spec_.rows || move.col < 0 ||
      move.col >= spec_.cols) {
    throw IllegalMoveError("out_of_range",
                           "cell (" + std::to_string(move.row) + "," +
                               std::to_string(move.col) + ") is off the board");
  }
  if (Status(state) != GameStatus::kOngoing) {
    throw IllegalMoveError("game_over", "the game is already decided");
  }
  const int i = move.row * spec_.cols + move.col;
  if (state.occupied() & Bit(i)) {
    throw IllegalMoveError("occupied",
                           "cell (" + std::to_string(move.row) + "," +
                               std::to_string(move.col) + ") is occupied");
  }
  if (!(LegalMask(state) & Bit(i))) {
    throw IllegalMoveError("gravity", "cell (" + std::to_string(move.row) +
                                          "," + std::to_string(move.col) +
                                          ") is not playable: " +
                                          MoveRuleText());
  }
  return Play(state, i);
}

BoardState Game::Play(const BoardState& state, int cell) const {
  std::uint64_t x = state.x_mask();
  std::uint64_t o = state.o_mask();
  if (state.turn() == Player::P1) {
    x |= Bit(cell);
  } else {
    o |= Bit(cell);
  }
  return BoardState(spec_.rows, spec_.cols, x, o, Opponent(state.turn()));
}

bool Game::HasLine(std::uint64_t marks) const {
  for (std::uint64_t w : windows_) {
    if ((marks & w) == w) return true;
  }
  return false;
}

GameStatus Game::Status(const BoardState& state) const {
  if (HasLine(state.x_mask())) return GameStatus::kP1Win;
  if (HasLine(state.o_mask())) return GameStatus::kP2Win;
  // Every non-full column offers a move, so no legal move means a full board.
  if (state.occupied() == full_mask_) return GameStatus::kDraw;
  return GameStatus::kOngoing;
}

Reward Game::Evaluate(const BoardState& state) const {
  const std::uint64_t x = state.x_mask();
  const std::uint64_t o = state.o_mask();
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  bool x_line = false;
  bool o_line = false;
  for (std::uint64_t w : windows_) {
    const std::uint64_t xw = x & w;
    const std::uint64_t ow = o & w;
    if (xw == w) x_line = true;
    if (ow == w) o_line = true;
    const int xs = std::popcount(xw);
    const int os = std::popcount(ow);
    if (os == 0 && xs >= 2) n1 += xs;
    if (xs == 0 && os >= 2) n2 += os;
  }
  if (x_line) return Reward::PlusInfinity();
  if (o_line) return Reward::MinusInfinity();
  return Reward(n1 - n2);
}

void Game::CheckBoard(const BoardState& state) const {
  if (state.rows() != spec_.rows || state.cols() != spec_.cols) {
    throw BoardError("board shape " + std::to_string(state.rows()) + "x" +
                     std::to_string(state.cols()) + " does not match game " +
                     spec_.name);
  }
  if (state.x_mask() & state.o_mask()) throw BoardError("cell holds X and O");
  if ((state.occupied() & ~full_mask_) != 0) throw BoardError("mark off board");
  if (!state.HasConsistentTurn()) {
    throw BoardError("mark counts do not match the side to move");
  }
}

Reward DefaultReward(const Game& game, const BoardState& state) {
  return game.Evaluate(state);
}

Reward NearLineReward(const Game& game, const BoardState& state) {
  const GameStatus status = game.Status(state);
  if (status == GameStatus::kP1Win) return Reward::PlusInfinity();
  if (status == GameStatus::kP2Win) return Reward::MinusInfinity();
  const int near = game.spec().match_len - 1;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  for (std::uint64_t w : game.windows()) {
    const std::uint64_t xw = state.x_mask() & w;
    const std::uint64_t ow = state.o_mask() & w;
    if (ow == 0 && std::popcount(xw) == near) ++n1;
    if (xw == 0 && std::popcount(ow) == near) ++n2;
  }
  return Reward(n1 - n2);
}

}  // namespace symgen
