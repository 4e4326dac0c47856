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

// Brute-force reference implementation used as a test oracle. It shares
// nothing with the library beyond the GameSpec fields: boards are plain
// strings, lines are found by scanning, the game graph is built by BFS and
// solved by memoized backward induction.

#ifndef SYMGEN_TESTS_ORACLE_EXPLICIT_GAME_H_
#define SYMGEN_TESTS_ORACLE_EXPLICIT_GAME_H_

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "symgen/rules.h"

namespace symgen::oracle {

// rows*cols cell characters ('X', 'O', '.') followed by the side to move.
using Key = std::string;
using StateSet = std::set<Key>;

Key KeyOf(const BoardState& state);

inline constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

class ExplicitGame {
 public:
  ExplicitGame(int rows, int cols, int match_len, bool row, bool col,
               bool diag, int gravity_depth);
  explicit ExplicitGame(const GameSpec& spec);

  Key Start() const;
  bool HasLine(const Key& k, char mark) const;
  bool Full(const Key& k) const;
  bool Terminal(const Key& k) const;
  std::vector<int> LegalCells(const Key& k) const;
  std::vector<Key> Successors(const Key& k) const;

  const StateSet& Reach();
  StateSet P1Targets();
  StateSet EPre(const StateSet& x);
  StateSet APre(const StateSet& x);

  struct Layers {
    std::vector<StateSet> raw;
    std::vector<StateSet> layers;
    std::vector<StateSet> forced_layers;
  };
  Layers WinLayers(int jmax);

  // +1 P1 wins, -1 P2 wins, 0 draw under perfect play.
  int Value(const Key& k);

  // Leaf score from P1's view: +-kInf for won boards, otherwise the sum
  // over opponent-free windows with at least two own marks of the mark
  // count, P1 minus P2.
  std::int64_t Reward(const Key& k) const;
  // Depth-limited minimax value of the position for `me`, plies to go.
  std::int64_t Minimax(const Key& k, int plies, char me) const;

 private:
  int rows_, cols_, m_, gravity_depth_;
  std::vector<std::vector<int>> windows_;
  StateSet reach_;
  bool have_reach_ = false;
  std::unordered_map<Key, int> values_;
};

}  // namespace symgen::oracle

#endif  // SYMGEN_TESTS_ORACLE_EXPLICIT_GAME_H_
