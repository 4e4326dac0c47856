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

// Truth tables over at most 16 variables and random formulas built in
// lockstep as a BDD and as a table. Header-only.

#ifndef SYMGEN_TESTS_ORACLE_TRUTH_TABLE_H_
#define SYMGEN_TESTS_ORACLE_TRUTH_TABLE_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "symgen/bdd.h"

namespace symgen::oracle {

struct TruthTable {
  int vars = 0;
  // bits[a] is the value at assignment a; bit i of a is variable i.
  std::vector<std::uint8_t> bits;

  static TruthTable Constant(int n, bool v) {
    return {n, std::vector<std::uint8_t>(std::size_t{1} << n, v)};
  }
  static TruthTable Var(int n, int i) {
    TruthTable t = Constant(n, false);
    for (std::size_t a = 0; a < t.bits.size(); ++a) t.bits[a] = (a >> i) & 1;
    return t;
  }
  template <typename Fn>
  TruthTable Map(const TruthTable& o, Fn fn) const {
    TruthTable t = *this;
    for (std::size_t a = 0; a < bits.size(); ++a) t.bits[a] = fn(bits[a], o.bits[a]);
    return t;
  }
  TruthTable Not() const {
    TruthTable t = *this;
    for (auto& b : t.bits) b = !b;
    return t;
  }
  // Existential (or universal) abstraction of the variables in `mask`.
  TruthTable Quantify(std::uint32_t mask, bool exists) const {
    TruthTable t = *this;
    for (int i = 0; i < vars; ++i) {
      if (!((mask >> i) & 1)) continue;
      for (std::size_t a = 0; a < t.bits.size(); ++a) {
        const std::size_t b = a ^ (std::size_t{1} << i);
        const bool v = exists ? (t.bits[a] || t.bits[b]) : (t.bits[a] && t.bits[b]);
        t.bits[a] = v;
      }
    }
    return t;
  }
  std::uint64_t Count() const {
    std::uint64_t c = 0;
    for (auto b : bits) c += b;
    return c;
  }
};

struct Formula {
  bdd::Bdd f;
  TruthTable t;
};

// Random formula of bounded depth over variables [0, n).
inline Formula RandomFormula(bdd::Manager& m, int n, int depth,
                             std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int op = depth == 0 ? 0 : pick(rng);
  if (op <= 1) {
    const int v = static_cast<int>(rng() % n);
    if (op == 0 || depth == 0) return {m.Var(v), TruthTable::Var(n, v)};
    return {m.NotVar(v), TruthTable::Var(n, v).Not()};
  }
  if (op == 2) {
    const bool v = rng() & 1;
    if (depth > 2) return RandomFormula(m, n, depth - 1, rng);
    return {m.Constant(v), TruthTable::Constant(n, v)};
  }
  Formula a = RandomFormula(m, n, depth - 1, rng);
  if (op == 3) return {~a.f, a.t.Not()};
  Formula b = RandomFormula(m, n, depth - 1, rng);
  switch (op) {
    case 4:
    case 5:
      return {a.f & b.f, a.t.Map(b.t, [](bool x, bool y) { return x && y; })};
    case 6:
    case 7:
      return {a.f | b.f, a.t.Map(b.t, [](bool x, bool y) { return x || y; })};
    case 8:
      return {a.f ^ b.f, a.t.Map(b.t, [](bool x, bool y) { return x != y; })};
    default: {
      Formula c = RandomFormula(m, n, depth - 1, rng);
      TruthTable t = a.t;
      for (std::size_t i = 0; i < t.bits.size(); ++i) {
        t.bits[i] = a.t.bits[i] ? b.t.bits[i] : c.t.bits[i];
      }
      return {m.Ite(a.f, b.f, c.f), t};
    }
  }
}

inline bdd::Assignment AssignmentOf(int n, std::size_t a) {
  bdd::Assignment out(n);
  for (int i = 0; i < n; ++i) out[i] = (a >> i) & 1;
  return out;
}

// True if f agrees with t on every assignment.
inline bool Agrees(bdd::Manager& m, const bdd::Bdd& f, const TruthTable& t) {
  for (std::size_t a = 0; a < t.bits.size(); ++a) {
    if (m.Eval(f, AssignmentOf(t.vars, a)) != static_cast<bool>(t.bits[a])) {
      return false;
    }
  }
  return true;
}

inline bdd::VarSet VarsOfMask(std::uint32_t mask, int n) {
  std::vector<bdd::VarId> v;
  for (int i = 0; i < n; ++i) {
    if ((mask >> i) & 1) v.push_back(i);
  }
  return bdd::VarSet(std::move(v));
}

}  // namespace symgen::oracle

#endif  // SYMGEN_TESTS_ORACLE_TRUTH_TABLE_H_
