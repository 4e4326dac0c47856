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

#include "symgen/symbolic.h"

#include <cmath>
#include <string>
#include <utility>

#include "symgen/error.h"

namespace symgen::symbolic {

using bdd::Bdd;
using bdd::BigInt;

Encoding::Encoding(const GameSpec& spec)
    : rows_(spec.rows), cols_(spec.cols), cells_(spec.cells()) {
  std::vector<bdd::VarId> cur;
  std::vector<bdd::VarId> nxt;
  for (int c = 0; c < cells_; ++c) {
    cur.push_back(x_var(c));
    cur.push_back(o_var(c));
    nxt.push_back(x_var(c, true));
    nxt.push_back(o_var(c, true));
  }
  cur.push_back(turn_var());
  nxt.push_back(turn_var(true));
  current_ = bdd::VarSet(cur);
  next_ = bdd::VarSet(nxt);

  const bdd::VarId n = var_count();
  to_next_.resize(n);
  to_current_.resize(n);
  for (bdd::VarId v = 0; v < n; ++v) {
    // Current variables are even, their primed copy is the following odd.
    to_next_[v] = v % 2 == 0 ? v + 1 : v;
    to_current_[v] = v % 2 == 1 ? v - 1 : v;
  }
}

bdd::Assignment Encoding::Encode(const BoardState& state) const {
  bdd::Assignment a(var_count(), 0);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const int i = r * cols_ + c;
      const Cell cell = state.at(r, c);
      a[x_var(i)] = cell == Cell::X;
      a[o_var(i)] = cell == Cell::O;
    }
  }
  a[turn_var()] = state.turn() == Player::P2;
  return a;
}

BoardState Encoding::Decode(const bdd::Assignment& a) const {
  if (a.size() < var_count()) throw BoardError("assignment too short");
  BoardState state(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const int i = r * cols_ + c;
      const bool x = a[x_var(i)];
      const bool o = a[o_var(i)];
      if (x && o) {
        throw BoardError("cell " + std::to_string(i) +
                         " has the invalid bit pattern 11");
      }
      if (x) state.set(r, c, Cell::X);
      if (o) state.set(r, c, Cell::O);
    }
  }
  state.set_turn(a[turn_var()] ? Player::P2 : Player::P1);
  return state;
}

SymbolicGame::SymbolicGame(GameSpec spec, SymbolicOptions options)
    : game_(std::move(spec)), options_(options), enc_(game_.spec()) {
  if (enc_.var_count() > options_.max_vars) {
    throw CeilingError("encoding needs " + std::to_string(enc_.var_count()) +
                       " BDD variables, above the ceiling max_vars=" +
                       std::to_string(options_.max_vars));
  }
  mgr_ = std::make_unique<bdd::Manager>(enc_.var_count(), options_.manager);
  bdd::Manager& m = *mgr_;
  const int n = game_.cells();

  valid_ = m.True();
  Bdd full = m.True();
  for (int c = 0; c < n; ++c) {
    valid_ &= ~(m.Var(enc_.x_var(c)) & m.Var(enc_.o_var(c)));
    full &= ~CellIs(c, Cell::Empty, false);
  }
  x_line_ = m.False();
  o_line_ = m.False();
  for (std::uint64_t w : game_.windows()) {
    Bdd xs = m.True();
    Bdd os = m.True();
    for (int c = 0; c < n; ++c) {
      if (!(w >> c & 1)) continue;
      xs &= m.Var(enc_.x_var(c));
      os &= m.Var(enc_.o_var(c));
    }
    x_line_ |= xs;
    o_line_ |= os;
  }
  x_line_ &= valid_;
  o_line_ &= valid_;
  terminal_ = valid_ & (x_line_ | o_line_ | full);
  p1_turn_ = m.NotVar(enc_.turn_var());
  p2_turn_ = m.Var(enc_.turn_var());

  // Per-cell frame conditions, then for each mover the disjunction over
  // target cells of: cell empty and playable, cell' = mark, other cells
  // unchanged.
  std::vector<Bdd> frames;
  frames.reserve(n);
  for (int c = 0; c < n; ++c) frames.push_back(Frame(c));
  // suffix[c] = frames c..n-1, so "all but c" = prefix(c) & suffix[c+1].
  std::vector<Bdd> suffix(n + 1, m.True());
  for (int c = n - 1; c >= 0; --c) suffix[c] = frames[c] & suffix[c + 1];

  Bdd moves_x = m.False();
  Bdd moves_o = m.False();
  Bdd prefix = m.True();
  for (int c = 0; c < n; ++c) {
    const int row = c / game_.cols();
    const int col = c % game_.cols();
    const Bdd others = prefix & suffix[c + 1];
    const Bdd pre = CellIs(c, Cell::Empty, false) & PlayableGuard(row, col) & others;
    moves_x |= pre & CellIs(c, Cell::X, true);
    moves_o |= pre & CellIs(c, Cell::O, true);
    prefix &= frames[c];
  }
  const Bdd turn_next_p1 = m.NotVar(enc_.turn_var(true));
  const Bdd turn_next_p2 = m.Var(enc_.turn_var(true));
  const Bdd step = (p1_turn_ & turn_next_p2 & moves_x) |
                   (p2_turn_ & turn_next_p1 & moves_o);
  trans_ = valid_ & ~terminal_ & step;
  has_move_ = m.Exists(trans_, enc_.next());
}

Bdd SymbolicGame::CellIs(int cell, Cell mark, bool next) {
  bdd::Manager& m = *mgr_;
  const Bdd x = m.Var(enc_.x_var(cell, next));
  const Bdd o = m.Var(enc_.o_var(cell, next));
  switch (mark) {
    case Cell::Empty: return ~x & ~o;
    case Cell::X: return x & ~o;
    case Cell::O: return ~x & o;
  }
  return m.False();
}

Bdd SymbolicGame::Frame(int cell) {
  bdd::Manager& m = *mgr_;
  const Bdd x_same = ~(m.Var(enc_.x_var(cell)) ^ m.Var(enc_.x_var(cell, true)));
  const Bdd o_same = ~(m.Var(enc_.o_var(cell)) ^ m.Var(enc_.o_var(cell, true)));
  return x_same & o_same;
}

Bdd SymbolicGame::PlayableGuard(int row, int col) {
  // Fewer than `depth` empty cells strictly below (row, col).
  bdd::Manager& m = *mgr_;
  const int depth = game_.spec().gravity.EffectiveDepth(game_.rows());
  std::vector<Bdd> empties;
  for (int r = row + 1; r < game_.rows(); ++r) {
    empties.push_back(CellIs(r * game_.cols() + col, Cell::Empty, false));
  }
  const int budget = depth - 1;
  if (static_cast<int>(empties.size()) <= budget) return m.True();
  // at_most[k]: the cells from i on hold at most k empties.
  std::vector<Bdd> at_most(budget + 1, m.True());
  for (int i = static_cast<int>(empties.size()) - 1; i >= 0; --i) {
    std::vector<Bdd> next(budget + 1, m.True());
    for (int k = 0; k <= budget; ++k) {
      const Bdd if_empty = k == 0 ? m.False() : at_most[k - 1];
      next[k] = m.Ite(empties[i], if_empty, at_most[k]);
    }
    at_most = std::move(next);
  }
  return at_most[budget];
}

Bdd SymbolicGame::Image(const Bdd& states) {
  bdd::Manager& m = *mgr_;
  const Bdd succ_next = m.AndExists(trans_, states, enc_.current());
  return m.Rename(succ_next, enc_.to_current());
}

Bdd SymbolicGame::ExistsPre(const Bdd& states) {
  bdd::Manager& m = *mgr_;
  const Bdd primed = m.Rename(states, enc_.to_next());
  return m.AndExists(trans_, primed, enc_.next());
}

Bdd SymbolicGame::AllPre(const Bdd& states) {
  // Some move exists and no move leaves `states`.
  const Bdd escapes = ExistsPre(~states);
  return has_move_ - escapes;
}

const Bdd& SymbolicGame::ComputeReachable() {
  bdd::Manager& m = *mgr_;
  std::vector<bdd::VarId> vars;
  std::vector<std::uint8_t> values;
  for (bdd::VarId v : enc_.current().vars()) {
    vars.push_back(v);
    values.push_back(0);
  }
  const Bdd init = m.Cube(vars, values);
  Bdd reach = init;
  Bdd frontier = init;
  while (!frontier.is_false()) {
    frontier = Image(frontier) - reach;
    reach |= frontier;
  }
  SetReachable(reach);
  return reach_;
}

void SymbolicGame::SetReachable(const Bdd& reach) {
  if (reach.manager() != mgr_.get()) {
    throw bdd::BddError("reachable set belongs to another manager");
  }
  reach_ = reach;
  t1_ = reach_ & (x_line_ - o_line_);
  t2_ = reach_ & (o_line_ - x_line_);
}

const Bdd& SymbolicGame::reach() const {
  if (!reach_.valid()) throw Error("reachable set not computed");
  return reach_;
}

const Bdd& SymbolicGame::TargetSet(Player player) const {
  if (!reach_.valid()) throw Error("reachable set not computed");
  return player == Player::P1 ? t1_ : t2_;
}

Bdd SymbolicGame::EPre(const Bdd& x) {
  return ExistsPre(x) & p1_turn_ & reach();
}

Bdd SymbolicGame::APre(const Bdd& x) {
  return AllPre(x) & p2_turn_ & reach();
}

WinLayers SymbolicGame::ComputeWinLayers(int jmax) {
  if (jmax < 0) throw Error("jmax must be non-negative");
  WinLayers out;
  // The default start board is not a generated start state.
  const Bdd initial = StateSet(BoardState(game_.rows(), game_.cols()));
  Bdd raw = EPre(TargetSet(Player::P1));
  Bdd acc = raw - initial;
  Bdd forced = raw;
  out.raw.push_back(raw);
  out.attractor.push_back(acc);
  out.layers.push_back(acc);
  out.forced.push_back(forced);
  out.forced_layers.push_back(forced);
  for (int i = 1; i <= jmax; ++i) {
    Bdd next_raw = raw;
    if (out.fixpoint < 0) {
      next_raw = EPre(APre(raw));
      if (next_raw == raw) out.fixpoint = i - 1;
    }
    const Bdd next_acc = acc | (next_raw - initial);
    const Bdd next_forced = forced | EPre(APre(forced));
    out.raw.push_back(next_raw);
    out.attractor.push_back(next_acc);
    out.layers.push_back(next_acc - acc);
    out.forced.push_back(next_forced);
    out.forced_layers.push_back(next_forced - forced);
    raw = next_raw;
    acc = next_acc;
    forced = next_forced;
  }
  return out;
}

Partition SymbolicGame::SolveFull() {
  const Bdd& r = reach();
  const double states = Count(r).convert_to<double>();
  if (states > options_.solve_full_ceiling) {
    throw CeilingError("solve_full: " + std::to_string(states) +
                       " reachable states exceed the ceiling of " +
                       std::to_string(options_.solve_full_ceiling));
  }
  auto attractor = [&](const Bdd& target, const Bdd& own, const Bdd& other) {
    Bdd z = target;
    for (;;) {
      const Bdd next =
          z | (r & own & ExistsPre(z)) | (r & other & AllPre(z));
      if (next == z) return z;
      z = next;
    }
  };
  Partition p;
  p.p1_wins = attractor(t1_, p1_turn_, p2_turn_);
  p.p2_wins = attractor(t2_, p2_turn_, p1_turn_);
  p.draws = r - p.p1_wins - p.p2_wins;
  return p;
}

Bdd SymbolicGame::StateSet(const BoardState& state) {
  const bdd::Assignment a = enc_.Encode(state);
  std::vector<bdd::VarId> vars = enc_.current().vars();
  std::vector<std::uint8_t> values;
  for (bdd::VarId v : vars) values.push_back(a[v]);
  return mgr_->Cube(vars, values);
}

bool SymbolicGame::Contains(const Bdd& set, const BoardState& state) {
  return mgr_->Eval(set, enc_.Encode(state));
}

BigInt SymbolicGame::Count(const Bdd& set) {
  return mgr_->SatCount(set, enc_.current());
}

std::uint64_t SymbolicGame::Count64(const Bdd& set) {
  return Count(set).convert_to<std::uint64_t>();
}

BigInt SymbolicGame::EdgeCount(const Bdd& from) {
  std::vector<bdd::VarId> all = enc_.current().vars();
  all.insert(all.end(), enc_.next().vars().begin(), enc_.next().vars().end());
  return mgr_->SatCount(trans_ & from, bdd::VarSet(all));
}

std::vector<BoardState> SymbolicGame::Enumerate(const Bdd& set,
                                                std::size_t limit) {
  std::vector<BoardState> out;
  if (limit == 0) return out;
  mgr_->ForEachSat(set, enc_.current(), [&](const bdd::Assignment& a) {
    out.push_back(enc_.Decode(a));
    return out.size() < limit;
  });
  return out;
}

std::vector<BoardState> SymbolicGame::Sample(const Bdd& set,
                                             std::mt19937_64& rng,
                                             std::size_t n) {
  std::vector<BoardState> out;
  for (const bdd::Assignment& a : mgr_->SampleSat(set, enc_.current(), rng, n)) {
    out.push_back(enc_.Decode(a));
  }
  return out;
}

double EstimateStateSpace(const GameSpec& spec) {
  // counts[x][o]: boards with x X-marks and o O-marks over the columns seen.
  const int n = spec.cells();
  std::vector<std::vector<double>> counts(n + 1, std::vector<double>(n + 1, 0));
  counts[0][0] = 1;
  // Column contents by (x, o): stacks under full gravity, any placement
  // otherwise.
  std::vector<std::vector<double>> column(spec.rows + 1,
                                          std::vector<double>(spec.rows + 1, 0));
  auto choose = [](int a, int b) {
    double r = 1;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  for (int x = 0; x <= spec.rows; ++x) {
    for (int o = 0; x + o <= spec.rows; ++o) {
      column[x][o] = spec.gravity.kind() == Gravity::Kind::kFull
                         ? choose(x + o, x)
                         : choose(spec.rows, x) * choose(spec.rows - x, o);
    }
  }
  for (int c = 0; c < spec.cols; ++c) {
    std::vector<std::vector<double>> next(n + 1, std::vector<double>(n + 1, 0));
    for (int x = 0; x <= n; ++x) {
      for (int o = 0; x + o <= n; ++o) {
        if (counts[x][o] == 0) continue;
        for (int cx = 0; cx <= spec.rows && x + cx <= n; ++cx) {
          for (int co = 0; cx + co <= spec.rows && x + cx + o + co <= n; ++co) {
            next[x + cx][o + co] += counts[x][o] * column[cx][co];
          }
        }
      }
    }
    counts = std::move(next);
  }
  double total = 0;
  for (int x = 0; x <= n; ++x) {
    for (int o = 0; x + o <= n; ++o) {
      if (x - o == 0 || x - o == 1) total += counts[x][o];
    }
  }
  return total;
}

}  // namespace symgen::symbolic
