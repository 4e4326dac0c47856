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


// Monte-Carlo hardness classification of start states.
//
// A state is played n times between a depth-k1 P1 and a depth-k2 P2. The
// label is E when P1's win rate reaches easy_min, H when it is at most
// hard_max, and M otherwise. Draws count as non-wins.

#ifndef SYMGEN_CLASSIFY_H_
#define SYMGEN_CLASSIFY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "symgen/bdd.h"
#include "symgen/rules.h"
#include "symgen/strategy.h"

namespace symgen {

namespace symbolic {
class SymbolicGame;
}

enum class Label : std::uint8_t { kEasy, kMedium, kHard };
char ToChar(Label label);
// Accepts "E"/"M"/"H". Throws ConfigError.
Label ParseLabel(std::string_view text);

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

struct Thresholds {
  Fraction easy_min{2, 3};
  Fraction hard_max{1, 3};
  // Throws ConfigError unless 0 <= hard_max < easy_min <= 1.
  void Validate() const;
};

// Pure function of the counts; inclusive at both bounds.
Label LabelFor(int wins, int n_games, const Thresholds& thresholds);

struct PlayoutResult {
  GameStatus outcome = GameStatus::kOngoing;
  std::vector<Move> trace;
};

// Alternates the two strategies from `start` until the game ends.
PlayoutResult Playout(const Game& game, const BoardState& start, Strategy& p1,
                      Strategy& p2);

std::uint64_t StateHash(const BoardState& state);
// Seed of one player in one game, from a splitmix64 chain over
// (base, state hash, game index, player).
std::uint64_t GameSeed(std::uint64_t base, const BoardState& state,
                       int game_index, Player player);

struct HardnessRecord {
  BoardState state;
  int j = 0;
  int k1 = 1;
  int k2 = 1;
  int n_games = 0;
  int p1_wins = 0;
  int draws = 0;
  int p2_wins = 0;
  Label label = Label::kEasy;
  std::uint64_t seed = 0;
};

struct ClassifyOptions {
  int n_games = 30;
  Thresholds thresholds;
  std::uint64_t base_seed = 0;
  // Worker threads for playouts; 0 means hardware concurrency.
  int threads = 1;
  // Leaf scoring for both players; empty means Game::Evaluate.
  RewardFunction reward;
};

HardnessRecord ClassifyState(const Game& game, const BoardState& state, int j,
                             int k1, int k2, const ClassifyOptions& options);
// Classifies many states with playouts spread over options.threads workers.
// Output order follows `states`.
std::vector<HardnessRecord> ClassifyStates(const Game& game,
                                           const std::vector<BoardState>& states,
                                           int j, int k1, int k2,
                                           const ClassifyOptions& options);

struct ScoredState {
  BoardState state;
  double score = 0.0;
};

// P1 win fraction of each state against a shallow opponent, ascending by
// score; ties keep the input order. Throws Error on an empty list.
std::vector<ScoredState> ScoreSmallDepth(const Game& game,
                                         const std::vector<BoardState>& states,
                                         int k1, int probe_k2,
                                         int games_per_state,
                                         const ClassifyOptions& options);

enum class Escalation : std::uint8_t { kHard, kMediumHard, kNone };
std::string_view ToString(Escalation escalation);
Escalation ParseEscalation(std::string_view text);

// States of `records` eligible for classification at the next depth, in
// input order. kNone keeps every state.
std::vector<BoardState> EscalateK1(const std::vector<HardnessRecord>& records,
                                   Escalation escalation);

struct SamplingPolicy {
  enum class Kind : std::uint8_t { kAll, kRand, kBottom };
  Kind kind = Kind::kAll;
  std::size_t count = 0;      // kRand: sample size
  std::uint64_t seed = 0;     // kRand: sampling seed
  std::size_t pool = 0;       // kBottom: states scored, 0 = whole layer
  std::size_t keep = 100;     // kBottom: lowest-scored states kept
  int probe_depth = 1;        // kBottom: opponent depth while scoring
  int probe_games = 10;       // kBottom: games per scored state

  static SamplingPolicy All() { return {}; }
  static SamplingPolicy Rand(std::size_t n, std::uint64_t seed);
  static SamplingPolicy Bottom(std::size_t keep = 100);
  // "all" | "rand:N:SEED" | "b100" | "bottom:K". Throws ConfigError.
  static SamplingPolicy Parse(std::string_view text);
  std::string ToString() const;
  void Validate() const;
};

// Draws the states to classify from a layer. kRand returns distinct states
// (all of them when the layer is smaller than N) in encoding order.
std::vector<BoardState> SampleLayer(symbolic::SymbolicGame& game,
                                    const bdd::Bdd& layer, int k1,
                                    const SamplingPolicy& policy,
                                    const ClassifyOptions& options);

struct HardnessRow {
  int k1 = 1;
  std::size_t sampled = 0;
  std::size_t classified = 0;
  std::size_t easy = 0;
  std::size_t medium = 0;
  std::size_t hard = 0;
  std::vector<HardnessRecord> records;
};

struct HardnessTable {
  int j = 0;
  int k2 = 1;
  std::size_t layer_size = 0;
  SamplingPolicy policy;
  Escalation escalation = Escalation::kMediumHard;
  std::vector<BoardState> sampled;
  // One row per k1; empty when the layer is empty.
  std::vector<HardnessRow> rows;
};

struct TableOptions {
  ClassifyOptions classify;
  Escalation escalation = Escalation::kMediumHard;
};

// Samples the layer once, then classifies per k1 in `k1_range` (ascending).
// With escalation, depth k1+1 only replays the states escalated from k1 and
// every state not replayed counts as easy, so E = sampled - M - H.
HardnessTable BuildHardnessTable(symbolic::SymbolicGame& game,
                                 const bdd::Bdd& layer, int j, int k2,
                                 const SamplingPolicy& policy,
                                 const std::vector<int>& k1_range,
                                 const TableOptions& options);

}  // namespace symgen

#endif  // SYMGEN_CLASSIFY_H_
