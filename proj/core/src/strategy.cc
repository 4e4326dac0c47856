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


#include "symgen/strategy.h"

#include <algorithm>
#include <bit>
#include <utility>

#include "symgen/error.h"

namespace symgen {
namespace {

std::uint64_t Mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Searcher {
 public:
  Searcher(const Game& game, Player perspective, const SearchOptions& options)
      : game_(game),
        perspective_(perspective),
        options_(options),
        cache_(options.cache) {}

  Reward Value(const BoardState& s, int plies) {
    if (options_.deadline && (++nodes_ & 1023) == 0 &&
        std::chrono::steady_clock::now() > *options_.deadline) {
      throw TimeoutError("search exceeded its time budget");
    }
    if (plies == 0 || game_.Status(s) != GameStatus::kOngoing) return Leaf(s);
    if (cache_ != nullptr) {
      if (auto hit = cache_->Find(s, plies, perspective_)) return *hit;
    } else if (auto it = local_.find(LocalKey(s, plies)); it != local_.end()) {
      return it->second;
    }
    const bool maximize = s.turn() == perspective_;
    const Reward stop = maximize ? Reward::PlusInfinity() : Reward::MinusInfinity();
    Reward best = maximize ? Reward::MinusInfinity() : Reward::PlusInfinity();
    for (std::uint64_t m = game_.LegalMask(s); m != 0; m &= m - 1) {
      const Reward v = Value(game_.Play(s, std::countr_zero(m)), plies - 1);
      best = maximize ? std::max(best, v) : std::min(best, v);
      // Nothing beats an infinite value; the backed-up value stays exact.
      if (best == stop) break;
    }
    if (cache_ != nullptr) {
      cache_->Insert(s, plies, perspective_, best);
    } else {
      local_.emplace(LocalKey(s, plies), best);
    }
    return best;
  }

 private:
  struct Key {
    std::uint64_t x;
    std::uint64_t o;
    int plies;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return Mix(k.x ^ Mix(k.o ^ Mix(static_cast<std::uint64_t>(k.plies))));
    }
  };
  static Key LocalKey(const BoardState& s, int plies) {
    return {s.x_mask(), s.o_mask(), plies};
  }

  Reward Leaf(const BoardState& s) const {
    const Reward r =
        options_.reward ? options_.reward(game_, s) : game_.Evaluate(s);
    return perspective_ == Player::P1 ? r : -r;
  }

  const Game& game_;
  Player perspective_;
  const SearchOptions& options_;
  EvalCache* cache_ = nullptr;
  std::unordered_map<Key, Reward, KeyHash> local_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

EvalCache::Key EvalCache::MakeKey(const BoardState& s, int plies,
                                  Player perspective) {
  return {s.x_mask(), s.o_mask(),
          static_cast<std::uint32_t>(plies) << 1 |
              static_cast<std::uint32_t>(perspective)};
}

std::size_t EvalCache::KeyHash::operator()(const Key& k) const {
  return Mix(k.x ^ Mix(k.o ^ Mix(k.tag)));
}

std::optional<Reward> EvalCache::Find(const BoardState& s, int plies,
                                      Player perspective) const {
  const auto it = table_.find(MakeKey(s, plies, perspective));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void EvalCache::Insert(const BoardState& s, int plies, Player perspective,
                       Reward value) {
  if (table_.size() >= max_entries_) table_.clear();
  table_.emplace(MakeKey(s, plies, perspective), value);
}

MoveEvaluation EvaluateMoves(const Game& game, const BoardState& state,
                             int depth, const SearchOptions& options) {
  if (depth < 1) throw Error("search depth must be at least 1");
  if (game.Status(state) != GameStatus::kOngoing) {
    throw Error("cannot search from a decided board");
  }
  Searcher searcher(game, state.turn(), options);
  MoveEvaluation out;
  for (const Move& move : game.LegalMoves(state)) {
    const BoardState child =
        game.Play(state, state.index(move.row, move.col));
    out.moves.push_back({move, searcher.Value(child, 2 * depth - 1)});
  }
  Reward best = Reward::MinusInfinity();
  for (const MoveValue& mv : out.moves) best = std::max(best, mv.value);
  for (std::size_t i = 0; i < out.moves.size(); ++i) {
    if (out.moves[i].value == best) out.argmax.push_back(i);
  }
  return out;
}

std::size_t UniformIndex(std::mt19937_64& rng, std::size_t n) {
  if (n == 0) throw Error("UniformIndex: empty range");
  const std::uint64_t range = n;
  // Reject the low values that would bias the modulus.
  const std::uint64_t threshold = (0 - range) % range;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return static_cast<std::size_t>(r % range);
  }
}

Strategy::Strategy(const Game& game, StrategyProfile profile,
                   SearchOptions options)
    : game_(&game),
      profile_(profile),
      options_(std::move(options)),
      rng_(profile.seed) {
  if (profile_.depth < 1) throw Error("strategy depth must be at least 1");
}

MoveEvaluation Strategy::Evaluate(const BoardState& state) const {
  if (state.turn() != profile_.perspective) {
    throw Error("it is not this strategy's turn");
  }
  return EvaluateMoves(*game_, state, profile_.depth, options_);
}

Move Strategy::Choose(const MoveEvaluation& evaluation) {
  if (evaluation.argmax.empty()) throw Error("no move to choose from");
  const std::size_t pick = UniformIndex(rng_, evaluation.argmax.size());
  return evaluation.moves[evaluation.argmax[pick]].move;
}

Move Strategy::ChooseMove(const BoardState& state) {
  return Choose(Evaluate(state));
}

}  // namespace symgen
