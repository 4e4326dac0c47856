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


#include "symgen/classify.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <charconv>
#include <numeric>
#include <random>
#include <set>
#include <thread>
#include <utility>

#include "symgen/error.h"
#include "symgen/symbolic.h"

namespace symgen {
namespace {

std::uint64_t SplitMix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Distinct stream per (k1, k2) so depth sweeps do not replay the same
// coin flips.
std::uint64_t DepthBase(std::uint64_t base, int k1, int k2) {
  return SplitMix(base ^ SplitMix(static_cast<std::uint64_t>(k1) << 32 |
                                  static_cast<std::uint32_t>(k2)));
}

// Runs fn(i) for i in [0, n) on `threads` workers. Each worker gets its
// own EvalCache, passed as the second argument.
template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(
      n, threads <= 0 ? hw : static_cast<unsigned>(threads));
  if (workers <= 1) {
    EvalCache cache;
    for (std::size_t i = 0; i < n; ++i) fn(i, cache);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      EvalCache cache;
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i, cache);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

GameStatus PlayOne(const Game& game, const BoardState& start,
                   std::uint64_t base, int game_index, int k1, int k2,
                   const RewardFunction& reward, EvalCache& cache) {
  SearchOptions search;
  search.reward = reward;
  search.cache = &cache;
  Strategy p1(game, {k1, Player::P1, GameSeed(base, start, game_index, Player::P1)},
              search);
  Strategy p2(game, {k2, Player::P2, GameSeed(base, start, game_index, Player::P2)},
              search);
  return Playout(game, start, p1, p2).outcome;
}

bool ParseSize(std::string_view text, std::uint64_t* out) {
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), *out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

char ToChar(Label label) {
  switch (label) {
    case Label::kEasy: return 'E';
    case Label::kMedium: return 'M';
    case Label::kHard: return 'H';
  }
  return '?';
}

Label ParseLabel(std::string_view text) {
  if (text == "E") return Label::kEasy;
  if (text == "M") return Label::kMedium;
  if (text == "H") return Label::kHard;
  throw ConfigError("label", "expected E, M or H, got '" + std::string(text) + "'");
}

void Thresholds::Validate() const {
  auto ok = [](const Fraction& f) {
    return f.den > 0 && f.num >= 0 && f.num <= f.den;
  };
  if (!ok(easy_min)) throw ConfigError("easy_min", "must lie in [0, 1]");
  if (!ok(hard_max)) throw ConfigError("hard_max", "must lie in [0, 1]");
  // hard_max < easy_min, cross-multiplied.
  if (hard_max.num * easy_min.den >= easy_min.num * hard_max.den) {
    throw ConfigError("hard_max", "must be below easy_min");
  }
}

Label LabelFor(int wins, int n_games, const Thresholds& t) {
  if (n_games <= 0) throw Error("n_games must be positive");
  const std::int64_t w = wins;
  const std::int64_t n = n_games;
  if (w * t.easy_min.den >= t.easy_min.num * n) return Label::kEasy;
  if (w * t.hard_max.den <= t.hard_max.num * n) return Label::kHard;
  return Label::kMedium;
}

PlayoutResult Playout(const Game& game, const BoardState& start, Strategy& p1,
                      Strategy& p2) {
  game.CheckBoard(start);
  if (start.turn() != Player::P1) throw Error("playouts start with P1 to move");
  PlayoutResult result;
  BoardState s = start;
  result.outcome = game.Status(s);
  if (result.outcome != GameStatus::kOngoing) {
    throw Error("playout from a decided board");
  }
  while (result.outcome == GameStatus::kOngoing) {
    Strategy& mover = s.turn() == Player::P1 ? p1 : p2;
    const Move m = mover.ChooseMove(s);
    s = game.Play(s, s.index(m.row, m.col));
    result.trace.push_back(m);
    result.outcome = game.Status(s);
  }
  return result;
}

std::uint64_t StateHash(const BoardState& state) {
  std::uint64_t h = SplitMix(state.x_mask());
  h = SplitMix(h ^ state.o_mask());
  return SplitMix(h ^ (static_cast<std::uint64_t>(state.rows()) << 16 |
                       static_cast<std::uint64_t>(state.cols()) << 8 |
                       static_cast<std::uint64_t>(state.turn())));
}

std::uint64_t GameSeed(std::uint64_t base, const BoardState& state,
                       int game_index, Player player) {
  std::uint64_t z = SplitMix(base ^ StateHash(state));
  z = SplitMix(z ^ static_cast<std::uint64_t>(game_index));
  return SplitMix(z ^ static_cast<std::uint64_t>(player));
}

std::vector<HardnessRecord> ClassifyStates(const Game& game,
                                           const std::vector<BoardState>& states,
                                           int j, int k1, int k2,
                                           const ClassifyOptions& options) {
  options.thresholds.Validate();
  if (options.n_games < 1) throw ConfigError("n_games", "must be at least 1");
  if (k1 < 1 || k2 < 1) throw ConfigError("depth", "depths must be at least 1");
  for (const BoardState& s : states) {
    game.CheckBoard(s);
    if (s.turn() != Player::P1 || game.Status(s) != GameStatus::kOngoing) {
      throw Error("candidate " + ToBoardLiteral(s) +
                  " is not an ongoing P1-to-move state");
    }
  }
  const std::uint64_t base = DepthBase(options.base_seed, k1, k2);
  const std::size_t n = static_cast<std::size_t>(options.n_games);
  std::vector<GameStatus> outcomes(states.size() * n);
  ParallelFor(outcomes.size(), options.threads,
              [&](std::size_t job, EvalCache& cache) {
                outcomes[job] = PlayOne(game, states[job / n], base,
                                        static_cast<int>(job % n), k1, k2,
                                        options.reward, cache);
              });
  std::vector<HardnessRecord> records;
  records.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    HardnessRecord r;
    r.state = states[i];
    r.j = j;
    r.k1 = k1;
    r.k2 = k2;
    r.n_games = options.n_games;
    r.seed = options.base_seed;
    for (std::size_t g = 0; g < n; ++g) {
      switch (outcomes[i * n + g]) {
        case GameStatus::kP1Win: ++r.p1_wins; break;
        case GameStatus::kP2Win: ++r.p2_wins; break;
        default: ++r.draws; break;
      }
    }
    r.label = LabelFor(r.p1_wins, r.n_games, options.thresholds);
    records.push_back(std::move(r));
  }
  return records;
}

HardnessRecord ClassifyState(const Game& game, const BoardState& state, int j,
                             int k1, int k2, const ClassifyOptions& options) {
  return ClassifyStates(game, {state}, j, k1, k2, options).front();
}

std::vector<ScoredState> ScoreSmallDepth(const Game& game,
                                         const std::vector<BoardState>& states,
                                         int k1, int probe_k2,
                                         int games_per_state,
                                         const ClassifyOptions& options) {
  if (states.empty()) throw Error("no states to score");
  ClassifyOptions probe = options;
  probe.n_games = games_per_state;
  const std::vector<HardnessRecord> records =
      ClassifyStates(game, states, 0, k1, probe_k2, probe);
  std::vector<ScoredState> scored;
  scored.reserve(records.size());
  for (const HardnessRecord& r : records) {
    scored.push_back({r.state, static_cast<double>(r.p1_wins) / r.n_games});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredState& a, const ScoredState& b) {
                     return a.score < b.score;
                   });
  return scored;
}

std::string_view ToString(Escalation escalation) {
  switch (escalation) {
    case Escalation::kHard: return "h";
    case Escalation::kMediumHard: return "mh";
    case Escalation::kNone: return "none";
  }
  return "?";
}

Escalation ParseEscalation(std::string_view text) {
  if (text == "h") return Escalation::kHard;
  if (text == "mh") return Escalation::kMediumHard;
  if (text == "none") return Escalation::kNone;
  throw ConfigError("escalate", "expected h, mh or none, got '" +
                                    std::string(text) + "'");
}

std::vector<BoardState> EscalateK1(const std::vector<HardnessRecord>& records,
                                   Escalation escalation) {
  std::vector<BoardState> out;
  for (const HardnessRecord& r : records) {
    const bool keep = escalation == Escalation::kNone ||
                      r.label == Label::kHard ||
                      (escalation == Escalation::kMediumHard &&
                       r.label == Label::kMedium);
    if (keep) out.push_back(r.state);
  }
  return out;
}

SamplingPolicy SamplingPolicy::Rand(std::size_t n, std::uint64_t seed) {
  SamplingPolicy p;
  p.kind = Kind::kRand;
  p.count = n;
  p.seed = seed;
  return p;
}

SamplingPolicy SamplingPolicy::Bottom(std::size_t keep) {
  SamplingPolicy p;
  p.kind = Kind::kBottom;
  p.keep = keep;
  return p;
}

SamplingPolicy SamplingPolicy::Parse(std::string_view text) {
  if (text == "all") return All();
  if (text == "b100") return Bottom(100);
  auto fail = [&] {
    return ConfigError("sampling", "expected all, rand:N:SEED, b100 or "
                                    "bottom:K, got '" + std::string(text) + "'");
  };
  if (text.starts_with("bottom:")) {
    std::uint64_t keep = 0;
    if (!ParseSize(text.substr(7), &keep) || keep == 0) throw fail();
    return Bottom(keep);
  }
  if (text.starts_with("rand:")) {
    const std::string_view rest = text.substr(5);
    const std::size_t colon = rest.find(':');
    if (colon == std::string_view::npos) throw fail();
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    if (!ParseSize(rest.substr(0, colon), &n) || n == 0 ||
        !ParseSize(rest.substr(colon + 1), &seed)) {
      throw fail();
    }
    return Rand(n, seed);
  }
  throw fail();
}

std::string SamplingPolicy::ToString() const {
  switch (kind) {
    case Kind::kAll: return "all";
    case Kind::kRand:
      return "rand:" + std::to_string(count) + ":" + std::to_string(seed);
    case Kind::kBottom:
      return keep == 100 ? "b100" : "bottom:" + std::to_string(keep);
  }
  return "?";
}

void SamplingPolicy::Validate() const {
  if (kind == Kind::kRand && count == 0) {
    throw ConfigError("sampling", "rand needs a positive count");
  }
  if (kind == Kind::kBottom) {
    if (keep == 0) throw ConfigError("sampling", "keep must be positive");
    if (pool != 0 && keep > pool) {
      throw ConfigError("sampling", "keep must not exceed pool");
    }
    if (probe_depth < 1 || probe_games < 1) {
      throw ConfigError("sampling", "probe depth and games must be positive");
    }
  }
}

std::vector<BoardState> SampleLayer(symbolic::SymbolicGame& game,
                                    const bdd::Bdd& layer, int k1,
                                    const SamplingPolicy& policy,
                                    const ClassifyOptions& options) {
  policy.Validate();
  auto random_subset = [&](std::size_t n, std::uint64_t seed) {
    const std::uint64_t size = game.Count64(layer);
    if (size <= n) return game.Enumerate(layer);
    std::mt19937_64 rng(seed);
    std::vector<BoardState> picked;
    if (n * 2 >= size) {
      // Dense: partial Fisher-Yates over the enumeration.
      std::vector<BoardState> all = game.Enumerate(layer);
      for (std::size_t i = 0; i < n; ++i) {
        std::swap(all[i], all[i + UniformIndex(rng, all.size() - i)]);
      }
      all.resize(n);
      picked = std::move(all);
    } else {
      // Sparse: rejection of duplicates among uniform draws.
      auto key = [](const BoardState& s) {
        return std::pair(s.x_mask(), s.o_mask());
      };
      std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
      while (picked.size() < n) {
        for (BoardState& s : game.Sample(layer, rng, n - picked.size())) {
          if (seen.insert(key(s)).second) picked.push_back(std::move(s));
        }
      }
    }
    std::sort(picked.begin(), picked.end(),
              [](const BoardState& a, const BoardState& b) {
                return std::pair(a.x_mask(), a.o_mask()) <
                       std::pair(b.x_mask(), b.o_mask());
              });
    return picked;
  };

  switch (policy.kind) {
    case SamplingPolicy::Kind::kAll:
      return game.Enumerate(layer);
    case SamplingPolicy::Kind::kRand:
      return random_subset(policy.count, policy.seed);
    case SamplingPolicy::Kind::kBottom: {
      const std::vector<BoardState> pool =
          policy.pool == 0 ? game.Enumerate(layer)
                           : random_subset(policy.pool, options.base_seed);
      if (pool.empty()) return {};
      std::vector<ScoredState> scored =
          ScoreSmallDepth(game.game(), pool, k1, policy.probe_depth,
                          policy.probe_games, options);
      if (scored.size() > policy.keep) scored.resize(policy.keep);
      std::vector<BoardState> out;
      for (ScoredState& s : scored) out.push_back(std::move(s.state));
      return out;
    }
  }
  return {};
}

HardnessTable BuildHardnessTable(symbolic::SymbolicGame& game,
                                 const bdd::Bdd& layer, int j, int k2,
                                 const SamplingPolicy& policy,
                                 const std::vector<int>& k1_range,
                                 const TableOptions& options) {
  if (!std::is_sorted(k1_range.begin(), k1_range.end())) {
    throw ConfigError("k1", "depths must be ascending");
  }
  HardnessTable table;
  table.j = j;
  table.k2 = k2;
  table.policy = policy;
  table.escalation = options.escalation;
  table.layer_size = game.Count64(layer);
  if (table.layer_size == 0 || k1_range.empty()) return table;

  table.sampled =
      SampleLayer(game, layer, k1_range.front(), policy, options.classify);
  std::vector<BoardState> candidates = table.sampled;
  for (int k1 : k1_range) {
    HardnessRow row;
    row.k1 = k1;
    row.sampled = table.sampled.size();
    row.records =
        ClassifyStates(game.game(), candidates, j, k1, k2, options.classify);
    row.classified = row.records.size();
    for (const HardnessRecord& r : row.records) {
      if (r.label == Label::kMedium) ++row.medium;
      if (r.label == Label::kHard) ++row.hard;
    }
    row.easy = row.sampled - row.medium - row.hard;
    candidates = EscalateK1(row.records, options.escalation);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace symgen
