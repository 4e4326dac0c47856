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

// Symbolic game graph of a GameSpec.
//
// Every cell is encoded by two bits (X-bit, O-bit): Empty = 00, X = 01,
// O = 10; pattern 11 is invalid. One further bit holds the side to move
// (0 = P1). Each bit has a primed "next" copy, and the global order
// interleaves them: cell 0 X, cell 0 X', cell 0 O, cell 0 O', cell 1 X, ...,
// turn, turn'. Cells are numbered row-major.

#ifndef SYMGEN_SYMBOLIC_H_
#define SYMGEN_SYMBOLIC_H_

#include <cstddef>
#include <memory>
#include <random>
#include <vector>

#include "symgen/bdd.h"
#include "symgen/rules.h"

namespace symgen::symbolic {

class Encoding {
 public:
  explicit Encoding(const GameSpec& spec);

  int cells() const { return cells_; }
  bdd::VarId var_count() const { return 4 * cells_ + 2; }
  bdd::VarId x_var(int cell, bool next = false) const { return 4 * cell + next; }
  bdd::VarId o_var(int cell, bool next = false) const {
    return 4 * cell + 2 + next;
  }
  bdd::VarId turn_var(bool next = false) const { return 4 * cells_ + next; }

  const bdd::VarSet& current() const { return current_; }
  const bdd::VarSet& next() const { return next_; }
  // Renaming maps for the order-preserving swaps between the two copies.
  const std::vector<bdd::VarId>& to_next() const { return to_next_; }
  const std::vector<bdd::VarId>& to_current() const { return to_current_; }

  // Assignment over the current variables (next variables left 0).
  bdd::Assignment Encode(const BoardState& state) const;
  // Throws BoardError on the invalid 11 cell pattern.
  BoardState Decode(const bdd::Assignment& assignment) const;

 private:
  int rows_;
  int cols_;
  int cells_;
  bdd::VarSet current_;
  bdd::VarSet next_;
  std::vector<bdd::VarId> to_next_;
  std::vector<bdd::VarId> to_current_;
};

struct SymbolicOptions {
  // Refuse specs whose encoding needs more BDD variables than this.
  bdd::VarId max_vars = 270;
  // solve_full refuses games whose reachable set exceeds this many states.
  double solve_full_ceiling = 1e7;
  bdd::ManagerOptions manager;
};

// Winning layers of P1 over reachable P1-to-move states.
//
// raw[i] follows W_0 = EPre(T1), W_{i+1} = EPre(APre(W_i)). attractor[i] is
// the running union W_0 | ... | W_i without the empty start board, and
// layers[i] = attractor[i] minus attractor[i-1]: the states first reached
// by the recursion at step i.
// forced[i] is the standard cumulative attractor F_0 = W_0,
// F_{i+1} = F_i | EPre(APre(F_i)) (P1 forces a win within i+1 own moves)
// and forced_layers[i] its increments; both are kept for diagnostics.
struct WinLayers {
  std::vector<bdd::Bdd> raw;
  std::vector<bdd::Bdd> attractor;
  std::vector<bdd::Bdd> layers;
  std::vector<bdd::Bdd> forced;
  std::vector<bdd::Bdd> forced_layers;
  // First index i with W_{i+1} = W_i, or -1 if not reached by jmax.
  int fixpoint = -1;
};

// Partition of the reachable states by game-theoretic value.
struct Partition {
  bdd::Bdd p1_wins;
  bdd::Bdd p2_wins;
  bdd::Bdd draws;
};

class SymbolicGame {
 public:
  // Builds the manager, the encoding and the transition relation. Throws
  // CeilingError when the encoding exceeds options.max_vars.
  explicit SymbolicGame(GameSpec spec, SymbolicOptions options = {});
  SymbolicGame(const SymbolicGame&) = delete;
  SymbolicGame& operator=(const SymbolicGame&) = delete;

  const Game& game() const { return game_; }
  const GameSpec& spec() const { return game_.spec(); }
  const Encoding& encoding() const { return enc_; }
  bdd::Manager& manager() { return *mgr_; }
  const SymbolicOptions& options() const { return options_; }

  const bdd::Bdd& trans() const { return trans_; }
  const bdd::Bdd& valid() const { return valid_; }
  // Boards with a completed X (resp. O) line, over current variables.
  const bdd::Bdd& x_line() const { return x_line_; }
  const bdd::Bdd& o_line() const { return o_line_; }
  const bdd::Bdd& terminal() const { return terminal_; }
  const bdd::Bdd& p1_to_move() const { return p1_turn_; }
  const bdd::Bdd& p2_to_move() const { return p2_turn_; }

  // Least fixpoint of the forward image from the empty board with P1 to
  // move. Also fixes the target sets.
  const bdd::Bdd& ComputeReachable();
  // Installs a previously computed reachable set.
  void SetReachable(const bdd::Bdd& reach);
  bool has_reach() const { return reach_.valid(); }
  const bdd::Bdd& reach() const;
  // Reachable states where `player` has a line and the opponent has none.
  const bdd::Bdd& TargetSet(Player player) const;

  // Reachable P1-to-move states with a move into x.
  bdd::Bdd EPre(const bdd::Bdd& x);
  // Reachable P2-to-move states with at least one move, all into x.
  bdd::Bdd APre(const bdd::Bdd& x);
  WinLayers ComputeWinLayers(int jmax);
  Partition SolveFull();

  // Image / preimage over all states, without turn or reach restriction.
  bdd::Bdd Image(const bdd::Bdd& states);
  bdd::Bdd ExistsPre(const bdd::Bdd& states);
  bdd::Bdd AllPre(const bdd::Bdd& states);

  bdd::Bdd StateSet(const BoardState& state);
  bool Contains(const bdd::Bdd& set, const BoardState& state);
  // Number of states in a set over the current variables.
  bdd::BigInt Count(const bdd::Bdd& set);
  std::uint64_t Count64(const bdd::Bdd& set);
  // Number of (state, successor) pairs leaving `from`.
  bdd::BigInt EdgeCount(const bdd::Bdd& from);
  // States of `set` in encoding order, at most `limit`.
  std::vector<BoardState> Enumerate(const bdd::Bdd& set,
                                    std::size_t limit = SIZE_MAX);
  std::vector<BoardState> Sample(const bdd::Bdd& set, std::mt19937_64& rng,
                                 std::size_t n);

 private:
  bdd::Bdd CellIs(int cell, Cell mark, bool next);
  bdd::Bdd Frame(int cell);
  bdd::Bdd PlayableGuard(int row, int col);

  Game game_;
  SymbolicOptions options_;
  Encoding enc_;
  std::unique_ptr<bdd::Manager> mgr_;
  bdd::Bdd valid_;
  bdd::Bdd x_line_;
  bdd::Bdd o_line_;
  bdd::Bdd terminal_;
  bdd::Bdd p1_turn_;
  bdd::Bdd p2_turn_;
  bdd::Bdd trans_;
  bdd::Bdd has_move_;
  bdd::Bdd reach_;
  bdd::Bdd t1_;
  bdd::Bdd t2_;
};

// Upper bound on the number of reachable states, from counting boards whose
// mark counts differ by at most one. Under full gravity only stacked column
// contents are counted; other gravity rules use all placements.
double EstimateStateSpace(const GameSpec& spec);

}  // namespace symgen::symbolic

#endif  // SYMGEN_SYMBOLIC_H_
