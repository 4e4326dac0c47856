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

// Rules of grid board games in the Tic-Tac-Toe / CONNECT family: a board of
// rows x cols cells, two players alternately placing X and O, a player wins
// by completing match_len consecutive own marks along an enabled direction.
// Placement inside a column may be restricted by gravity.

#ifndef SYMGEN_RULES_H_
#define SYMGEN_RULES_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace symgen {

enum class Player : std::uint8_t { P1 = 0, P2 = 1 };

constexpr Player Opponent(Player p) {
  return p == Player::P1 ? Player::P2 : Player::P1;
}

enum class Cell : std::uint8_t { Empty = 0, X = 1, O = 2 };

// The mark placed by a player: P1 plays X, P2 plays O.
constexpr Cell MarkOf(Player p) { return p == Player::P1 ? Cell::X : Cell::O; }

// Subset of {Row, Col, Diag}. Diag enables both diagonal orientations.
struct WinDirs {
  bool row = true;
  bool col = true;
  bool diag = true;

  bool empty() const { return !row && !col && !diag; }
  // "RCD", "RD", ...
  std::string ToString() const;
  static WinDirs Parse(std::string_view text);
  friend bool operator==(const WinDirs&, const WinDirs&) = default;
};

// Placement rule inside a column. Bottom(l) offers the l lowest empty cells
// of every non-full column; Full behaves like Bottom(1) and None like
// Bottom(rows). The surface form is kept so configs round-trip.
class Gravity {
 public:
  enum class Kind : std::uint8_t { kNone, kFull, kBottom };

  static Gravity None() { return Gravity(Kind::kNone, 0); }
  static Gravity Full() { return Gravity(Kind::kFull, 1); }
  static Gravity Bottom(int depth) { return Gravity(Kind::kBottom, depth); }
  // "none" | "full" | "bottom:<l>"
  static Gravity Parse(std::string_view text);

  Kind kind() const { return kind_; }
  int depth() const { return depth_; }
  // Number of lowest empty cells of a column that are playable.
  int EffectiveDepth(int rows) const;
  std::string ToString() const;

  friend bool operator==(const Gravity&, const Gravity&) = default;

 private:
  Gravity(Kind kind, int depth) : kind_(kind), depth_(depth) {}
  Kind kind_ = Kind::kNone;
  int depth_ = 0;
};

// Boards are stored as 64-bit masks, which bounds the number of cells.
inline constexpr int kMaxCells = 64;

struct GameSpec {
  std::string name;
  int rows = 3;
  int cols = 3;
  int match_len = 3;
  WinDirs win_dirs;
  Gravity gravity = Gravity::None();

  int cells() const { return rows * cols; }
  // Throws ConfigError naming the offending key.
  void Validate() const;
  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

// Parses the JSON game config (keys: name, rows, cols, match_len, win_dirs,
// gravity). Throws ConfigError.
GameSpec ParseGameSpec(std::string_view config_text);
std::string GameSpecToConfig(const GameSpec& spec);

struct Move {
  int row = 0;
  int col = 0;
  friend bool operator==(const Move&, const Move&) = default;
};

// Explicit board plus side to move. Cell (r, c) has bit r * cols + c; row 0
// is the top row and gravity pulls towards row rows-1.
class BoardState {
 public:
  BoardState() = default;
  BoardState(int rows, int cols) : rows_(rows), cols_(cols) {}
  BoardState(int rows, int cols, std::uint64_t x, std::uint64_t o,
             Player turn)
      : rows_(rows), cols_(cols), x_(x), o_(o), turn_(turn) {}

  static BoardState Empty(const GameSpec& spec) {
    return BoardState(spec.rows, spec.cols);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int index(int row, int col) const { return row * cols_ + col; }
  Cell at(int row, int col) const;
  void set(int row, int col, Cell cell);

  std::uint64_t x_mask() const { return x_; }
  std::uint64_t o_mask() const { return o_; }
  std::uint64_t occupied() const { return x_ | o_; }
  Player turn() const { return turn_; }
  void set_turn(Player p) { turn_ = p; }
  int count(Cell mark) const;

  // count(X) - count(O) in {0, 1} and the turn agrees with the counts.
  bool HasConsistentTurn() const;
  // Mark-swapped board: X <-> O, turn flipped.
  BoardState Mirrored() const;

  friend bool operator==(const BoardState&, const BoardState&) = default;

 private:
  std::uint8_t rows_ = 0;
  std::uint8_t cols_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t o_ = 0;
  Player turn_ = Player::P1;
};

// "X.O/.X./..O O": rows top to bottom separated by '/', then the side to
// move. Throws BoardError.
BoardState ParseBoardLiteral(std::string_view text);
BoardState ParseBoardLiteral(const GameSpec& spec, std::string_view text);
std::string ToBoardLiteral(const BoardState& state);

enum class GameStatus : std::uint8_t { kOngoing, kP1Win, kP2Win, kDraw };
std::string_view ToString(GameStatus status);

// Extended integer: -inf, +inf, or a finite value.
class Reward {
 public:
  constexpr Reward() = default;
  constexpr explicit Reward(std::int64_t v) : value_(v) {}
  static constexpr Reward PlusInfinity() { return Reward(kInf); }
  static constexpr Reward MinusInfinity() { return Reward(-kInf); }

  constexpr bool is_plus_infinity() const { return value_ == kInf; }
  constexpr bool is_minus_infinity() const { return value_ == -kInf; }
  constexpr bool is_finite() const { return value_ != kInf && value_ != -kInf; }
  constexpr std::int64_t value() const { return value_; }
  constexpr Reward operator-() const { return Reward(-value_); }
  std::string ToString() const;

  friend constexpr auto operator<=>(Reward, Reward) = default;

 private:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  std::int64_t value_ = 0;
};

// Compiled rules for one GameSpec: winning windows and column layout are
// precomputed so the per-state queries are mask arithmetic. Immutable.
class Game {
 public:
  explicit Game(GameSpec spec);

  const GameSpec& spec() const { return spec_; }
  int rows() const { return spec_.rows; }
  int cols() const { return spec_.cols; }
  int cells() const { return spec_.cells(); }
  std::uint64_t full_mask() const { return full_mask_; }
  // Every run of match_len cells along an enabled direction.
  const std::vector<std::uint64_t>& windows() const { return windows_; }

  BoardState EmptyBoard() const { return BoardState::Empty(spec_); }

  // Legal moves in column-major ascending order, bottom to top inside a
  // column. Only meaningful for Ongoing states.
  std::vector<Move> LegalMoves(const BoardState& state) const;
  std::uint64_t LegalMask(const BoardState& state) const;

  // Throws IllegalMoveError naming the violated rule.
  BoardState ApplyMove(const BoardState& state, Move move) const;
  // Unchecked variant for search: `cell` must be in LegalMask(state).
  BoardState Play(const BoardState& state, int cell) const;

  bool HasLine(std::uint64_t marks) const;
  GameStatus Status(const BoardState& state) const;
  // +inf / -inf for decided boards, otherwise n1 - n2. n_i sums, over the
  // windows free of opponent marks that hold at least two marks of player
  // i, the number of those marks. For match_len 3 this is twice the number
  // of open two-mark windows.
  Reward Evaluate(const BoardState& state) const;

  // Throws BoardError if the board has the wrong shape or fails the
  // count/turn invariant.
  void CheckBoard(const BoardState& state) const;

  std::string MoveRuleText() const;

 private:
  GameSpec spec_;
  int gravity_depth_;
  std::uint64_t full_mask_ = 0;
  std::vector<std::uint64_t> windows_;
};

// Leaf scoring for depth-limited search. The default is Game::Evaluate.
using RewardFunction = std::function<Reward(const Game&, const BoardState&)>;
Reward DefaultReward(const Game& game, const BoardState& state);
// Alternative leaf score: n_i counts the windows holding exactly
// match_len-1 marks of player i and one empty cell.
Reward NearLineReward(const Game& game, const BoardState& state);

}  // namespace symgen

#endif  // SYMGEN_RULES_H_
