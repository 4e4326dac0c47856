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

// Depth-k randomized minimax players.
//
// A depth-k search explores k rounds (2k plies) starting with the root move.
// Leaves are boards at the horizon or decided boards and are scored by the
// reward function from the searching player's point of view. Inner nodes
// take the max at the searching player's turn and the min otherwise. The
// player picks uniformly among the root moves of maximal value.

#ifndef SYMGEN_STRATEGY_H_
#define SYMGEN_STRATEGY_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "symgen/rules.h"

namespace symgen {

struct StrategyProfile {
  int depth = 1;
  Player perspective = Player::P1;
  std::uint64_t seed = 0;
};

struct MoveValue {
  Move move;
  Reward value;
};

struct MoveEvaluation {
  // Legal moves in Game::LegalMoves order.
  std::vector<MoveValue> moves;
  // Indices into `moves` holding the maximal value, ascending.
  std::vector<std::size_t> argmax;
};

// Memo of backed-up values shared across searches on one game and one
// reward function. Values are pure functions of (board, plies, perspective),
// so sharing never changes a result. Not thread-safe.
class EvalCache {
 public:
  explicit EvalCache(std::size_t max_entries = std::size_t{1} << 22)
      : max_entries_(max_entries) {}

  std::optional<Reward> Find(const BoardState& s, int plies,
                             Player perspective) const;
  void Insert(const BoardState& s, int plies, Player perspective,
              Reward value);
  std::size_t size() const { return table_.size(); }
  void Clear() { table_.clear(); }

 private:
  struct Key {
    std::uint64_t x;
    std::uint64_t o;
    std::uint32_t tag;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  static Key MakeKey(const BoardState& s, int plies, Player perspective);

  std::size_t max_entries_;
  std::unordered_map<Key, Reward, KeyHash> table_;
};

struct SearchOptions {
  // Leaf scoring; empty means Game::Evaluate.
  RewardFunction reward;
  // Must only ever be used with one reward function.
  EvalCache* cache = nullptr;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Values every root move of `state` with a depth-`depth` search for the
// side to move. Throws Error on a decided board or depth < 1, and
// TimeoutError past the deadline.
MoveEvaluation EvaluateMoves(const Game& game, const BoardState& state,
                             int depth, const SearchOptions& options = {});

// Unbiased draw from [0, n) that only depends on the engine output, so
// choices are reproducible across standard libraries.
std::size_t UniformIndex(std::mt19937_64& rng, std::size_t n);

class Strategy {
 public:
  // Throws Error if profile.depth < 1.
  Strategy(const Game& game, StrategyProfile profile,
           SearchOptions options = {});

  const StrategyProfile& profile() const { return profile_; }

  // Throws Error if it is not the profile's turn or the game is over.
  MoveEvaluation Evaluate(const BoardState& state) const;
  Move ChooseMove(const BoardState& state);
  // Choice among an evaluation's argmax set; consumes one draw.
  Move Choose(const MoveEvaluation& evaluation);

 private:
  const Game* game_;
  StrategyProfile profile_;
  SearchOptions options_;
  std::mt19937_64 rng_;
};

}  // namespace symgen

#endif  // SYMGEN_STRATEGY_H_
