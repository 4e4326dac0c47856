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

#include "symgen/bdd.h"

#include <algorithm>
#include <array>
#include <cstring>
#include <limits>
#include <string>
#include <utility>

namespace symgen::bdd {

namespace {

constexpr NodeId kNil = std::numeric_limits<NodeId>::max();
constexpr bdd::VarId kFreeVar = std::numeric_limits<bdd::VarId>::max();

enum OpCode : std::uint32_t {
  kOpAnd = 1,
  kOpOr,
  kOpXor,
  kOpNot,
  kOpIte,
  kOpExists,
  kOpAndExists,
  kOpRename,
};

inline std::uint64_t Mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

inline std::uint64_t HashTriple(std::uint64_t a, std::uint64_t b,
                                std::uint64_t c) {
  return Mix(a * 0x9e3779b97f4a7c15ULL ^ Mix(b + 0x632be59bd9b4e019ULL) ^
             (c << 21) ^ c);
}

constexpr std::array<std::uint8_t, 5> kMagic = {'S', 'G', 'B', 'D', '1'};

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetU32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[at + i]} << (8 * i);
  return v;
}

BigInt RandomBelow(const BigInt& bound, std::mt19937_64& rng) {
  const unsigned bits = boost::multiprecision::msb(bound) + 1;
  const BigInt mask = (BigInt(1) << bits) - 1;
  for (;;) {
    BigInt r = 0;
    for (unsigned k = 0; k < bits; k += 64) {
      r <<= 64;
      r |= BigInt(rng());
    }
    r &= mask;
    if (r < bound) return r;
  }
}

}  // namespace

// --- Bdd handle -----------------------------------------------------------

Bdd::Bdd(Manager* mgr, NodeId id) : mgr_(mgr), id_(id) { mgr_->Ref(id_); }

Bdd::Bdd(const Bdd& other) : mgr_(other.mgr_), id_(other.id_) {
  if (mgr_) mgr_->Ref(id_);
}

Bdd::Bdd(Bdd&& other) noexcept : mgr_(other.mgr_), id_(other.id_) {
  other.mgr_ = nullptr;
  other.id_ = kFalseId;
}

Bdd& Bdd::operator=(const Bdd& other) {
  if (this != &other) {
    if (other.mgr_) other.mgr_->Ref(other.id_);
    if (mgr_) mgr_->Deref(id_);
    mgr_ = other.mgr_;
    id_ = other.id_;
  }
  return *this;
}

Bdd& Bdd::operator=(Bdd&& other) noexcept {
  if (this != &other) {
    if (mgr_) mgr_->Deref(id_);
    mgr_ = other.mgr_;
    id_ = other.id_;
    other.mgr_ = nullptr;
    other.id_ = kFalseId;
  }
  return *this;
}

Bdd::~Bdd() {
  if (mgr_) mgr_->Deref(id_);
}

Bdd Bdd::operator&(const Bdd& rhs) const { return mgr_->And(*this, rhs); }
Bdd Bdd::operator|(const Bdd& rhs) const { return mgr_->Or(*this, rhs); }
Bdd Bdd::operator^(const Bdd& rhs) const { return mgr_->Xor(*this, rhs); }
Bdd Bdd::operator~() const { return mgr_->Not(*this); }
Bdd Bdd::operator-(const Bdd& rhs) const {
  return mgr_->And(*this, mgr_->Not(rhs));
}

// --- VarSet ---------------------------------------------------------------

VarSet::VarSet(std::initializer_list<VarId> vars)
    : VarSet(std::vector<VarId>(vars)) {}

VarSet::VarSet(std::vector<VarId> vars) : vars_(std::move(vars)) {
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

bool VarSet::contains(VarId v) const {
  return std::binary_search(vars_.begin(), vars_.end(), v);
}

// --- Manager: storage -----------------------------------------------------

Manager::Manager(bdd::VarId var_count, ManagerOptions options)
    : var_count_(var_count),
      options_(options),
      free_list_(kNil),
      gc_threshold_(options.gc_threshold) {
  if (var_count >= kFreeVar - 1) throw BddError("too many variables");
  nodes_.reserve(1024);
  nodes_.push_back({var_count_, kFalseId, kFalseId, kNil});
  nodes_.push_back({var_count_, kTrueId, kTrueId, kNil});
  refs_.assign(2, 0);
  node_count_ = 2;
  buckets_.assign(1024, kNil);
  const int log2 = std::clamp(options_.cache_log2, 4, 30);
  cache_.assign(std::size_t{1} << log2, CacheEntry{});
  cache_mask_ = cache_.size() - 1;
}

void Manager::Check(const Bdd& f) const {
  if (f.mgr_ == nullptr) throw BddError("null BDD handle");
  if (f.mgr_ != this) throw BddError("BDD operand belongs to another manager");
}

void Manager::BeginOp() {
  if (live_nodes() > gc_threshold_) {
    CollectGarbage();
    if (live_nodes() > gc_threshold_ / 2) gc_threshold_ *= 2;
  }
  MaybeGrowCache();
}

void Manager::MaybeGrowCache() {
  const std::size_t max_size = std::size_t{1}
                               << std::clamp(options_.max_cache_log2, 4, 30);
  std::size_t size = cache_.size();
  while (size < max_size && live_nodes() > 2 * size) size *= 2;
  if (size != cache_.size()) {
    cache_.assign(size, CacheEntry{});
    cache_mask_ = size - 1;
  }
}

NodeId Manager::MakeNode(bdd::VarId var, NodeId low, NodeId high) {
  if (low == high) return low;
  const std::size_t slot = HashTriple(var, low, high) & (buckets_.size() - 1);
  for (NodeId n = buckets_[slot]; n != kNil; n = nodes_[n].next) {
    const Node& node = nodes_[n];
    if (node.var == var && node.low == low && node.high == high) return n;
  }
  NodeId id;
  if (free_list_ != kNil) {
    id = free_list_;
    free_list_ = nodes_[id].next;
    --free_count_;
    nodes_[id] = {var, low, high, buckets_[slot]};
    refs_[id] = 0;
  } else {
    if (nodes_.size() >= kNil - 1) throw BddError("node store exhausted");
    id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({var, low, high, buckets_[slot]});
    refs_.push_back(0);
    ++node_count_;
  }
  buckets_[slot] = id;
  if (node_count_ > buckets_.size()) GrowUniqueTable();
  return id;
}

void Manager::GrowUniqueTable() {
  buckets_.assign(buckets_.size() * 2, kNil);
  const std::size_t mask = buckets_.size() - 1;
  for (NodeId n = 2; n < nodes_.size(); ++n) {
    Node& node = nodes_[n];
    if (node.var == kFreeVar) continue;
    const std::size_t slot = HashTriple(node.var, node.low, node.high) & mask;
    node.next = buckets_[slot];
    buckets_[slot] = n;
  }
}

void Manager::ClearCaches() {
  std::fill(cache_.begin(), cache_.end(), CacheEntry{});
}

void Manager::CollectGarbage() {
  std::vector<std::uint8_t> marked(nodes_.size(), 0);
  marked[kFalseId] = marked[kTrueId] = 1;
  std::vector<NodeId> stack;
  for (NodeId n = 2; n < nodes_.size(); ++n) {
    if (refs_[n] > 0 && nodes_[n].var != kFreeVar) stack.push_back(n);
  }
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (marked[n]) continue;
    marked[n] = 1;
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  std::fill(buckets_.begin(), buckets_.end(), kNil);
  const std::size_t mask = buckets_.size() - 1;
  free_list_ = kNil;
  free_count_ = 0;
  for (NodeId n = static_cast<NodeId>(nodes_.size()) - 1; n >= 2; --n) {
    Node& node = nodes_[n];
    if (!marked[n]) {
      node.var = kFreeVar;
      node.next = free_list_;
      free_list_ = n;
      ++free_count_;
      continue;
    }
    const std::size_t slot = HashTriple(node.var, node.low, node.high) & mask;
    node.next = buckets_[slot];
    buckets_[slot] = n;
  }
  ClearCaches();
}

bool Manager::CacheLookup(std::uint32_t op, NodeId a, NodeId b, NodeId c,
                          NodeId* result) const {
  const CacheEntry& e =
      cache_[HashTriple(a, b, (std::uint64_t{c} << 8) | op) & cache_mask_];
  if (e.op == op && e.a == a && e.b == b && e.c == c) {
    *result = e.result;
    return true;
  }
  return false;
}

void Manager::CacheInsert(std::uint32_t op, NodeId a, NodeId b, NodeId c,
                          NodeId result) {
  cache_[HashTriple(a, b, (std::uint64_t{c} << 8) | op) & cache_mask_] = {
      op, a, b, c, result};
}

// --- Manager: recursive kernels -------------------------------------------

NodeId Manager::AndRec(NodeId a, NodeId b) {
  if (a == kFalseId || b == kFalseId) return kFalseId;
  if (a == kTrueId) return b;
  if (b == kTrueId || a == b) return a;
  if (a > b) std::swap(a, b);
  NodeId r;
  if (CacheLookup(kOpAnd, a, b, 0, &r)) return r;
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  const bdd::VarId v = std::min(na.var, nb.var);
  const NodeId lo = AndRec(na.var == v ? na.low : a, nb.var == v ? nb.low : b);
  const NodeId hi = AndRec(na.var == v ? na.high : a, nb.var == v ? nb.high : b);
  r = MakeNode(v, lo, hi);
  CacheInsert(kOpAnd, a, b, 0, r);
  return r;
}

NodeId Manager::OrRec(NodeId a, NodeId b) {
  if (a == kTrueId || b == kTrueId) return kTrueId;
  if (a == kFalseId) return b;
  if (b == kFalseId || a == b) return a;
  if (a > b) std::swap(a, b);
  NodeId r;
  if (CacheLookup(kOpOr, a, b, 0, &r)) return r;
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  const bdd::VarId v = std::min(na.var, nb.var);
  const NodeId lo = OrRec(na.var == v ? na.low : a, nb.var == v ? nb.low : b);
  const NodeId hi = OrRec(na.var == v ? na.high : a, nb.var == v ? nb.high : b);
  r = MakeNode(v, lo, hi);
  CacheInsert(kOpOr, a, b, 0, r);
  return r;
}

NodeId Manager::XorRec(NodeId a, NodeId b) {
  if (a == kFalseId) return b;
  if (b == kFalseId) return a;
  if (a == b) return kFalseId;
  if (a == kTrueId) return NotRec(b);
  if (b == kTrueId) return NotRec(a);
  if (a > b) std::swap(a, b);
  NodeId r;
  if (CacheLookup(kOpXor, a, b, 0, &r)) return r;
  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  const bdd::VarId v = std::min(na.var, nb.var);
  const NodeId lo = XorRec(na.var == v ? na.low : a, nb.var == v ? nb.low : b);
  const NodeId hi = XorRec(na.var == v ? na.high : a, nb.var == v ? nb.high : b);
  r = MakeNode(v, lo, hi);
  CacheInsert(kOpXor, a, b, 0, r);
  return r;
}

NodeId Manager::NotRec(NodeId a) {
  if (a == kFalseId) return kTrueId;
  if (a == kTrueId) return kFalseId;
  NodeId r;
  if (CacheLookup(kOpNot, a, 0, 0, &r)) return r;
  const Node na = nodes_[a];
  const NodeId lo = NotRec(na.low);
  const NodeId hi = NotRec(na.high);
  r = MakeNode(na.var, lo, hi);
  CacheInsert(kOpNot, a, 0, 0, r);
  return r;
}

NodeId Manager::IteRec(NodeId f, NodeId g, NodeId h) {
  if (f == kTrueId) return g;
  if (f == kFalseId) return h;
  if (g == h) return g;
  if (g == kTrueId && h == kFalseId) return f;
  if (g == kFalseId && h == kTrueId) return NotRec(f);
  if (g == kTrueId) return OrRec(f, h);
  if (h == kFalseId) return AndRec(f, g);
  NodeId r;
  if (CacheLookup(kOpIte, f, g, h, &r)) return r;
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const Node nh = nodes_[h];
  const bdd::VarId v = std::min({nf.var, ng.var, nh.var});
  const NodeId lo = IteRec(nf.var == v ? nf.low : f, ng.var == v ? ng.low : g,
                           nh.var == v ? nh.low : h);
  const NodeId hi = IteRec(nf.var == v ? nf.high : f, ng.var == v ? ng.high : g,
                           nh.var == v ? nh.high : h);
  r = MakeNode(v, lo, hi);
  CacheInsert(kOpIte, f, g, h, r);
  return r;
}

NodeId Manager::ExistsRec(NodeId f, NodeId cube) {
  if (f <= kTrueId) return f;
  const bdd::VarId v = nodes_[f].var;
  while (cube != kTrueId && nodes_[cube].var < v) cube = nodes_[cube].high;
  if (cube == kTrueId) return f;
  NodeId r;
  if (CacheLookup(kOpExists, f, cube, 0, &r)) return r;
  const Node nf = nodes_[f];
  if (nodes_[cube].var == v) {
    const NodeId rest = nodes_[cube].high;
    const NodeId lo = ExistsRec(nf.low, rest);
    r = lo == kTrueId ? kTrueId : OrRec(lo, ExistsRec(nf.high, rest));
  } else {
    const NodeId lo = ExistsRec(nf.low, cube);
    const NodeId hi = ExistsRec(nf.high, cube);
    r = MakeNode(v, lo, hi);
  }
  CacheInsert(kOpExists, f, cube, 0, r);
  return r;
}

NodeId Manager::AndExistsRec(NodeId f, NodeId g, NodeId cube) {
  if (f == kFalseId || g == kFalseId) return kFalseId;
  if (f == kTrueId && g == kTrueId) return kTrueId;
  if (f == kTrueId) return ExistsRec(g, cube);
  if (g == kTrueId || f == g) return ExistsRec(f, cube);
  if (f > g) std::swap(f, g);
  const Node nf = nodes_[f];
  const Node ng = nodes_[g];
  const bdd::VarId v = std::min(nf.var, ng.var);
  while (cube != kTrueId && nodes_[cube].var < v) cube = nodes_[cube].high;
  if (cube == kTrueId) return AndRec(f, g);
  NodeId r;
  if (CacheLookup(kOpAndExists, f, g, cube, &r)) return r;
  const NodeId f0 = nf.var == v ? nf.low : f;
  const NodeId f1 = nf.var == v ? nf.high : f;
  const NodeId g0 = ng.var == v ? ng.low : g;
  const NodeId g1 = ng.var == v ? ng.high : g;
  if (nodes_[cube].var == v) {
    const NodeId rest = nodes_[cube].high;
    const NodeId lo = AndExistsRec(f0, g0, rest);
    r = lo == kTrueId ? kTrueId : OrRec(lo, AndExistsRec(f1, g1, rest));
  } else {
    const NodeId lo = AndExistsRec(f0, g0, cube);
    const NodeId hi = AndExistsRec(f1, g1, cube);
    r = MakeNode(v, lo, hi);
  }
  CacheInsert(kOpAndExists, f, g, cube, r);
  return r;
}

NodeId Manager::RenameRec(NodeId f, std::uint32_t map_id) {
  if (f <= kTrueId) return f;
  NodeId r;
  if (CacheLookup(kOpRename, f, map_id, 0, &r)) return r;
  const Node nf = nodes_[f];
  const NodeId lo = RenameRec(nf.low, map_id);
  const NodeId hi = RenameRec(nf.high, map_id);
  const bdd::VarId nv = mappings_[map_id][nf.var];
  if (nv >= nodes_[lo].var || nv >= nodes_[hi].var) {
    throw BddError("rename does not preserve the variable order");
  }
  r = MakeNode(nv, lo, hi);
  CacheInsert(kOpRename, f, map_id, 0, r);
  return r;
}

NodeId Manager::CubeOf(const VarSet& vs) {
  NodeId c = kTrueId;
  for (auto it = vs.vars().rbegin(); it != vs.vars().rend(); ++it) {
    if (*it >= var_count_) {
      throw BddError("variable " + std::to_string(*it) + " out of range");
    }
    c = MakeNode(*it, kFalseId, c);
  }
  return c;
}

std::uint32_t Manager::RegisterMapping(std::span<const bdd::VarId> mapping) {
  for (std::uint32_t i = 0; i < mappings_.size(); ++i) {
    if (std::equal(mappings_[i].begin(), mappings_[i].end(), mapping.begin(),
                   mapping.end())) {
      return i;
    }
  }
  mappings_.emplace_back(mapping.begin(), mapping.end());
  return static_cast<std::uint32_t>(mappings_.size() - 1);
}

// --- Manager: public operations -------------------------------------------

Bdd Manager::Var(bdd::VarId i) {
  if (i >= var_count_) {
    throw BddError("variable " + std::to_string(i) + " out of range (count " +
                   std::to_string(var_count_) + ")");
  }
  BeginOp();
  return Bdd(this, MakeNode(i, kFalseId, kTrueId));
}

Bdd Manager::NotVar(bdd::VarId i) {
  if (i >= var_count_) {
    throw BddError("variable " + std::to_string(i) + " out of range (count " +
                   std::to_string(var_count_) + ")");
  }
  BeginOp();
  return Bdd(this, MakeNode(i, kTrueId, kFalseId));
}

Bdd Manager::Cube(std::span<const bdd::VarId> vars,
                  std::span<const std::uint8_t> values) {
  if (vars.size() != values.size()) throw BddError("cube arity mismatch");
  std::vector<std::pair<bdd::VarId, std::uint8_t>> lits;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i] >= var_count_) throw BddError("cube variable out of range");
    lits.emplace_back(vars[i], values[i]);
  }
  std::sort(lits.begin(), lits.end());
  BeginOp();
  NodeId c = kTrueId;
  for (auto it = lits.rbegin(); it != lits.rend(); ++it) {
    if (std::next(it) != lits.rend() && std::next(it)->first == it->first) {
      if (std::next(it)->second != it->second) return False();
      continue;
    }
    c = it->second ? MakeNode(it->first, kFalseId, c)
                   : MakeNode(it->first, c, kFalseId);
  }
  return Bdd(this, c);
}

Bdd Manager::PositiveCube(const VarSet& vs) {
  BeginOp();
  return Bdd(this, CubeOf(vs));
}

Bdd Manager::Apply(Op op, const Bdd& a, const Bdd& b) {
  Check(a);
  Check(b);
  BeginOp();
  switch (op) {
    case Op::kAnd: return Bdd(this, AndRec(a.id_, b.id_));
    case Op::kOr: return Bdd(this, OrRec(a.id_, b.id_));
    case Op::kXor: return Bdd(this, XorRec(a.id_, b.id_));
  }
  throw BddError("unknown operator");
}

Bdd Manager::Not(const Bdd& a) {
  Check(a);
  BeginOp();
  return Bdd(this, NotRec(a.id_));
}

Bdd Manager::Ite(const Bdd& f, const Bdd& g, const Bdd& h) {
  Check(f);
  Check(g);
  Check(h);
  BeginOp();
  return Bdd(this, IteRec(f.id_, g.id_, h.id_));
}

Bdd Manager::Exists(const Bdd& f, const VarSet& vs) {
  Check(f);
  BeginOp();
  const NodeId cube = CubeOf(vs);
  return Bdd(this, ExistsRec(f.id_, cube));
}

Bdd Manager::Forall(const Bdd& f, const VarSet& vs) {
  Check(f);
  BeginOp();
  const NodeId cube = CubeOf(vs);
  return Bdd(this, NotRec(ExistsRec(NotRec(f.id_), cube)));
}

Bdd Manager::AndExists(const Bdd& f, const Bdd& g, const VarSet& vs) {
  Check(f);
  Check(g);
  BeginOp();
  const NodeId cube = CubeOf(vs);
  return Bdd(this, AndExistsRec(f.id_, g.id_, cube));
}

Bdd Manager::Rename(const Bdd& f, std::span<const bdd::VarId> mapping) {
  Check(f);
  if (mapping.size() != var_count_) throw BddError("rename mapping arity");
  for (bdd::VarId v : mapping) {
    if (v >= var_count_) throw BddError("rename target out of range");
  }
  BeginOp();
  const std::uint32_t map_id = RegisterMapping(mapping);
  return Bdd(this, RenameRec(f.id_, map_id));
}

bool Manager::Eval(const Bdd& f, std::span<const std::uint8_t> assignment) {
  Check(f);
  NodeId n = f.id_;
  while (n > kTrueId) {
    const Node& node = nodes_[n];
    if (node.var >= assignment.size()) {
      throw BddError("assignment does not cover variable " +
                     std::to_string(node.var));
    }
    n = assignment[node.var] ? node.high : node.low;
  }
  return n == kTrueId;
}

VarSet Manager::Support(const Bdd& f) {
  Check(f);
  std::vector<bdd::VarId> vars;
  std::vector<std::uint8_t> seen_var(var_count_, 0);
  std::unordered_map<NodeId, bool> seen;
  std::vector<NodeId> stack{f.id_};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (n <= kTrueId || !seen.emplace(n, true).second) continue;
    const Node& node = nodes_[n];
    if (!seen_var[node.var]) {
      seen_var[node.var] = 1;
      vars.push_back(node.var);
    }
    stack.push_back(node.low);
    stack.push_back(node.high);
  }
  return VarSet(std::move(vars));
}

std::size_t Manager::DagSize(const Bdd& f) {
  Check(f);
  std::unordered_map<NodeId, bool> seen;
  std::vector<NodeId> stack{f.id_};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (!seen.emplace(n, true).second || n <= kTrueId) continue;
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  return seen.size();
}

namespace {

// Satisfying-assignment counts per node, relative to the node's position in
// the counted variable set.
class Counter {
 public:
  Counter(const Manager& mgr, const VarSet& over)
      : mgr_(mgr), pos_(mgr.var_count() + 1, -1) {
    for (std::size_t i = 0; i < over.size(); ++i) {
      pos_[over.vars()[i]] = static_cast<int>(i);
    }
    pos_[mgr.var_count()] = static_cast<int>(over.size());
  }

  int Pos(NodeId n) const {
    const int p = pos_[mgr_.NodeVar(n)];
    if (p < 0) {
      throw BddError("support variable " + std::to_string(mgr_.NodeVar(n)) +
                     " is outside the counted variable set");
    }
    return p;
  }

  const BigInt& Count(NodeId n) {
    if (n == kFalseId) return zero_;
    if (n == kTrueId) return one_;
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
    const int p = Pos(n);
    const NodeId lo = mgr_.NodeLow(n);
    const NodeId hi = mgr_.NodeHigh(n);
    BigInt c = (Count(lo) << (Pos(lo) - p - 1)) +
               (Count(hi) << (Pos(hi) - p - 1));
    return memo_.emplace(n, std::move(c)).first->second;
  }

 private:
  const Manager& mgr_;
  std::vector<int> pos_;
  std::unordered_map<NodeId, BigInt> memo_;
  const BigInt zero_ = 0;
  const BigInt one_ = 1;
};

}  // namespace

BigInt Manager::SatCount(const Bdd& f, const VarSet& over) {
  Check(f);
  for (bdd::VarId v : over.vars()) {
    if (v >= var_count_) throw BddError("counted variable out of range");
  }
  Counter counter(*this, over);
  if (f.id_ == kFalseId) return 0;
  return counter.Count(f.id_) << counter.Pos(f.id_);
}

std::vector<Assignment> Manager::SampleSat(const Bdd& f, const VarSet& over,
                                           std::mt19937_64& rng,
                                           std::size_t n) {
  Check(f);
  if (f.id_ == kFalseId) throw BddError("cannot sample from FALSE");
  for (bdd::VarId v : over.vars()) {
    if (v >= var_count_) throw BddError("sampled variable out of range");
  }
  Counter counter(*this, over);
  const std::vector<bdd::VarId>& vars = over.vars();
  const int root_pos = counter.Pos(f.id_);
  const BigInt total = counter.Count(f.id_) << root_pos;

  std::vector<Assignment> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    Assignment a(var_count_, 0);
    BigInt r = RandomBelow(total, rng);
    // The low-order part of r picks the free variables above a node.
    auto take_free = [&](int from, int to) {
      for (int i = from; i < to; ++i) {
        a[vars[i]] = static_cast<std::uint8_t>(static_cast<unsigned>(r & 1));
        r >>= 1;
      }
    };
    take_free(0, root_pos);
    NodeId node = f.id_;
    while (node != kTrueId) {
      const int p = counter.Pos(node);
      const NodeId lo = nodes_[node].low;
      const NodeId hi = nodes_[node].high;
      const BigInt w_lo = counter.Count(lo) << (counter.Pos(lo) - p - 1);
      NodeId next;
      if (r < w_lo) {
        a[vars[p]] = 0;
        next = lo;
      } else {
        r -= w_lo;
        a[vars[p]] = 1;
        next = hi;
      }
      take_free(p + 1, counter.Pos(next));
      node = next;
    }
    out.push_back(std::move(a));
  }
  return out;
}

void Manager::ForEachSat(const Bdd& f, const VarSet& over,
                         const std::function<bool(const Assignment&)>& visit) {
  Check(f);
  const std::vector<bdd::VarId>& vars = over.vars();
  for (bdd::VarId v : vars) {
    if (v >= var_count_) throw BddError("enumerated variable out of range");
  }
  Assignment a(var_count_, 0);
  bool stop = false;
  std::function<void(NodeId, std::size_t)> rec = [&](NodeId n, std::size_t i) {
    if (stop || n == kFalseId) return;
    if (i == vars.size()) {
      if (n != kTrueId) {
        throw BddError("support variable " + std::to_string(nodes_[n].var) +
                       " is outside the enumerated variable set");
      }
      if (!visit(a)) stop = true;
      return;
    }
    const bdd::VarId v = vars[i];
    const bdd::VarId nv = nodes_[n].var;
    if (nv < v) {
      throw BddError("support variable " + std::to_string(nv) +
                     " is outside the enumerated variable set");
    }
    for (std::uint8_t val = 0; val <= 1 && !stop; ++val) {
      a[v] = val;
      if (nv == v) {
        rec(val ? nodes_[n].high : nodes_[n].low, i + 1);
      } else {
        rec(n, i + 1);
      }
    }
    a[v] = 0;
  };
  rec(f.id_, 0);
}

std::vector<std::uint8_t> Manager::Serialize(const Bdd& f) {
  Check(f);
  std::unordered_map<NodeId, std::uint32_t> ids{{kFalseId, 0}, {kTrueId, 1}};
  std::vector<NodeId> order;
  // Post-order, low child first.
  std::vector<std::pair<NodeId, bool>> stack{{f.id_, false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (ids.count(n)) continue;
    if (expanded) {
      ids.emplace(n, static_cast<std::uint32_t>(order.size() + 2));
      order.push_back(n);
      continue;
    }
    stack.emplace_back(n, true);
    stack.emplace_back(nodes_[n].high, false);
    stack.emplace_back(nodes_[n].low, false);
  }
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  PutU32(out, var_count_);
  PutU32(out, static_cast<std::uint32_t>(order.size()));
  for (NodeId n : order) {
    PutU32(out, nodes_[n].var);
    PutU32(out, ids.at(nodes_[n].low));
    PutU32(out, ids.at(nodes_[n].high));
  }
  PutU32(out, ids.at(f.id_));
  return out;
}

Bdd Manager::Deserialize(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = kMagic.size() + 8;
  if (bytes.size() < kHeader + 4) throw BddError("truncated BDD stream");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw BddError("bad BDD stream magic");
  }
  const std::uint32_t vars = GetU32(bytes, kMagic.size());
  const std::uint32_t count = GetU32(bytes, kMagic.size() + 4);
  if (vars != var_count_) {
    throw BddError("BDD stream has " + std::to_string(vars) +
                   " variables, manager has " + std::to_string(var_count_));
  }
  const std::uint64_t expected = kHeader + 12ULL * count + 4;
  if (bytes.size() != expected) {
    throw BddError(bytes.size() < expected ? "truncated BDD stream"
                                           : "trailing bytes in BDD stream");
  }
  BeginOp();
  std::vector<NodeId> map{kFalseId, kTrueId};
  map.reserve(count + 2);
  std::size_t at = kHeader;
  for (std::uint32_t k = 0; k < count; ++k, at += 12) {
    const std::uint32_t var = GetU32(bytes, at);
    const std::uint32_t lo = GetU32(bytes, at + 4);
    const std::uint32_t hi = GetU32(bytes, at + 8);
    if (var >= var_count_) throw BddError("node variable out of range");
    if (lo >= map.size() || hi >= map.size()) {
      throw BddError("node refers to a later node");
    }
    if (lo == hi) throw BddError("unreduced node");
    const NodeId l = map[lo];
    const NodeId h = map[hi];
    if (nodes_[l].var <= var || nodes_[h].var <= var) {
      throw BddError("node violates the variable order");
    }
    map.push_back(MakeNode(var, l, h));
  }
  const std::uint32_t root = GetU32(bytes, at);
  if (root >= map.size()) throw BddError("root id out of range");
  return Bdd(this, map[root]);
}

}  // namespace symgen::bdd
