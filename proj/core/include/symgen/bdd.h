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

// Reduced ordered binary decision diagrams with a fixed variable order.
//
// Nodes live in a Manager; a Bdd is a reference-counted handle to a node.
// Nodes are hash-consed, so two handles of the same manager denote the same
// boolean function iff their node ids are equal. Unreferenced nodes are
// reclaimed by a mark-and-sweep pass that only runs between top-level
// operations, never in the middle of one.
//
// A Manager is single-threaded and must outlive every Bdd it hands out.

#ifndef SYMGEN_BDD_H_
#define SYMGEN_BDD_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "symgen/error.h"

namespace symgen::bdd {

using NodeId = std::uint32_t;
using VarId = std::uint32_t;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr NodeId kFalseId = 0;
inline constexpr NodeId kTrueId = 1;

// Values indexed by variable index; entries are 0 or 1.
using Assignment = std::vector<std::uint8_t>;

class BddError : public Error {
 public:
  using Error::Error;
};

class Manager;

class Bdd {
 public:
  Bdd() = default;
  Bdd(const Bdd& other);
  Bdd(Bdd&& other) noexcept;
  Bdd& operator=(const Bdd& other);
  Bdd& operator=(Bdd&& other) noexcept;
  ~Bdd();

  Manager* manager() const { return mgr_; }
  NodeId id() const { return id_; }
  bool valid() const { return mgr_ != nullptr; }
  bool is_false() const { return id_ == kFalseId; }
  bool is_true() const { return id_ == kTrueId; }

  Bdd operator&(const Bdd& rhs) const;
  Bdd operator|(const Bdd& rhs) const;
  Bdd operator^(const Bdd& rhs) const;
  Bdd operator~() const;
  // Set difference: *this AND NOT rhs.
  Bdd operator-(const Bdd& rhs) const;
  Bdd& operator&=(const Bdd& rhs) { return *this = *this & rhs; }
  Bdd& operator|=(const Bdd& rhs) { return *this = *this | rhs; }

  friend bool operator==(const Bdd& a, const Bdd& b) {
    return a.mgr_ == b.mgr_ && a.id_ == b.id_;
  }

 private:
  friend class Manager;
  Bdd(Manager* mgr, NodeId id);

  Manager* mgr_ = nullptr;
  NodeId id_ = kFalseId;
};

// Sorted, duplicate-free set of variable indices.
class VarSet {
 public:
  VarSet() = default;
  VarSet(std::initializer_list<VarId> vars);
  explicit VarSet(std::vector<VarId> vars);

  const std::vector<VarId>& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  bool contains(VarId v) const;

  friend bool operator==(const VarSet&, const VarSet&) = default;

 private:
  std::vector<VarId> vars_;
};

enum class Op : std::uint8_t { kAnd, kOr, kXor };

struct ManagerOptions {
  // log2 of the initial operation-cache size.
  int cache_log2 = 18;
  int max_cache_log2 = 24;
  // Live-node count that triggers the first garbage collection.
  std::size_t gc_threshold = std::size_t{1} << 20;
};

class Manager {
 public:
  explicit Manager(VarId var_count, ManagerOptions options = {});
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  VarId var_count() const { return var_count_; }

  Bdd True() { return Bdd(this, kTrueId); }
  Bdd False() { return Bdd(this, kFalseId); }
  Bdd Constant(bool value) { return value ? True() : False(); }
  // The literal x_i. Throws BddError for i >= var_count().
  Bdd Var(bdd::VarId i);
  Bdd NotVar(bdd::VarId i);
  // Conjunction of literals: vars[i] takes values[i].
  Bdd Cube(std::span<const bdd::VarId> vars, std::span<const std::uint8_t> values);
  // Conjunction of all positive literals of vs.
  Bdd PositiveCube(const VarSet& vs);

  Bdd Apply(Op op, const Bdd& a, const Bdd& b);
  Bdd And(const Bdd& a, const Bdd& b) { return Apply(Op::kAnd, a, b); }
  Bdd Or(const Bdd& a, const Bdd& b) { return Apply(Op::kOr, a, b); }
  Bdd Xor(const Bdd& a, const Bdd& b) { return Apply(Op::kXor, a, b); }
  Bdd Not(const Bdd& a);
  Bdd Ite(const Bdd& f, const Bdd& g, const Bdd& h);

  Bdd Exists(const Bdd& f, const VarSet& vs);
  Bdd Forall(const Bdd& f, const VarSet& vs);
  // Exists(f AND g, vs) without building the conjunction.
  Bdd AndExists(const Bdd& f, const Bdd& g, const VarSet& vs);
  // Substitutes variable v by mapping[v] for every v in the support of f.
  // The mapping must preserve the relative order of the support variables;
  // throws BddError otherwise.
  Bdd Rename(const Bdd& f, std::span<const bdd::VarId> mapping);

  bool Eval(const Bdd& f, std::span<const std::uint8_t> assignment);
  VarSet Support(const Bdd& f);
  // Number of nodes reachable from f, terminals included.
  std::size_t DagSize(const Bdd& f);

  // Exact number of satisfying assignments over `over`. Throws BddError if
  // the support of f is not contained in `over`.
  BigInt SatCount(const Bdd& f, const VarSet& over);
  // `n` assignments drawn uniformly with replacement from the satisfying
  // set over `over`. Variables outside `over` are left 0. Throws on FALSE.
  std::vector<Assignment> SampleSat(const Bdd& f, const VarSet& over,
                                    std::mt19937_64& rng, std::size_t n);
  // Visits every satisfying assignment over `over` in lexicographic order
  // of the variable order, 0 before 1. Stops early when `visit` returns
  // false.
  void ForEachSat(const Bdd& f, const VarSet& over,
                  const std::function<bool(const Assignment&)>& visit);

  // Node-list format: "SGBD1", u32 var count, u32 node count, then per node
  // (u32 var, u32 low, u32 high) in topological order with 0 = FALSE,
  // 1 = TRUE and nodes numbered from 2, then the u32 root id. Little-endian.
  std::vector<std::uint8_t> Serialize(const Bdd& f);
  Bdd Deserialize(std::span<const std::uint8_t> bytes);

  std::size_t live_nodes() const { return node_count_ - free_count_; }
  std::size_t allocated_nodes() const { return node_count_; }
  void ClearCaches();
  // Reclaims every node not reachable from a live handle.
  void CollectGarbage();

  // Read-only node access for callers walking a diagram.
  bdd::VarId NodeVar(NodeId n) const { return nodes_[n].var; }
  NodeId NodeLow(NodeId n) const { return nodes_[n].low; }
  NodeId NodeHigh(NodeId n) const { return nodes_[n].high; }

 private:
  friend class Bdd;

  struct Node {
    bdd::VarId var;
    NodeId low;
    NodeId high;
    NodeId next;  // unique-table chain, or free-list link
  };
  struct CacheEntry {
    std::uint32_t op = 0;
    NodeId a = 0;
    NodeId b = 0;
    NodeId c = 0;
    NodeId result = 0;
  };

  void Ref(NodeId n) {
    if (n > kTrueId) ++refs_[n];
  }
  void Deref(NodeId n) {
    if (n > kTrueId) --refs_[n];
  }
  void Check(const Bdd& f) const;
  void BeginOp();

  NodeId MakeNode(bdd::VarId var, NodeId low, NodeId high);
  void GrowUniqueTable();
  void MaybeGrowCache();

  bool CacheLookup(std::uint32_t op, NodeId a, NodeId b, NodeId c,
                   NodeId* result) const;
  void CacheInsert(std::uint32_t op, NodeId a, NodeId b, NodeId c,
                   NodeId result);

  NodeId AndRec(NodeId a, NodeId b);
  NodeId OrRec(NodeId a, NodeId b);
  NodeId XorRec(NodeId a, NodeId b);
  NodeId NotRec(NodeId a);
  NodeId IteRec(NodeId f, NodeId g, NodeId h);
  NodeId ExistsRec(NodeId f, NodeId cube);
  NodeId AndExistsRec(NodeId f, NodeId g, NodeId cube);
  NodeId RenameRec(NodeId f, std::uint32_t map_id);
  NodeId CubeOf(const VarSet& vs);
  std::uint32_t RegisterMapping(std::span<const bdd::VarId> mapping);

  bdd::VarId var_count_;
  ManagerOptions options_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> refs_;
  std::vector<NodeId> buckets_;
  std::size_t node_count_ = 0;
  std::size_t free_count_ = 0;
  NodeId free_list_;
  std::size_t gc_threshold_;
  std::vector<CacheEntry> cache_;
  std::size_t cache_mask_ = 0;
  std::vector<std::vector<bdd::VarId>> mappings_;
};

}  // namespace symgen::bdd

#endif  // SYMGEN_BDD_H_
