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

#include "symgen/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include <nlohmann/json.hpp>

#include "symgen/error.h"

namespace symgen::pipeline {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::string_view kCacheFormat = "symgen-cache/1";
constexpr std::string_view kCatalogFormat = "symgen-catalog/1";

std::string Hex(std::uint64_t v, int digits) {
  static const char kDigits[] = "0123456789abcdef";
  std::string out(digits, '0');
  for (int i = digits - 1; i >= 0; --i, v >>= 4) out[i] = kDigits[v & 15];
  return out;
}

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Writes through a temporary file so readers never see a partial artifact.
void WriteFile(const fs::path& path, std::string_view data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

Json SpecJson(const GameSpec& spec) {
  return Json::parse(GameSpecToConfig(spec));
}

std::string LayerFile(int j) { return "layer_" + std::to_string(j) + ".bdd"; }

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string ConfigHash(const GameSpec& spec) {
  return Hex(Fnv1a(GameSpecToConfig(spec)), 16);
}

GameSpec LoadGameSpec(const fs::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw ConfigError("config", e.what());
  }
  return ParseGameSpec(text);
}

// ---------------------------------------------------------------------------
// Artifacts

Artifacts::Artifacts(GameSpec spec, ArtifactOptions options)
    : options_(std::move(options)) {
  spec.Validate();
  hash_ = ConfigHash(spec);
  estimate_ = symbolic::EstimateStateSpace(spec);
  // Estimates within a small factor of the ceiling are settled by the exact
  // count; anything beyond is refused before any symbolic work.
  if (!options_.long_run && estimate_ > 4 * options_.ceiling) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "estimated %.3g reachable states exceed the ceiling of "
                  "%.3g; rerun with --long",
                  estimate_, options_.ceiling);
    throw CeilingError(buf);
  }
  game_ = std::make_unique<symbolic::SymbolicGame>(std::move(spec),
                                                   options_.symbolic);
}

Artifacts::~Artifacts() = default;

const GameSpec& Artifacts::spec() const { return game_->spec(); }
const Game& Artifacts::game() const { return game_->game(); }

fs::path Artifacts::CacheDir() const { return options_.cache_dir / hash_; }

void Artifacts::CheckCeiling(std::uint64_t exact) const {
  if (!options_.long_run && static_cast<double>(exact) > options_.ceiling) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%llu reachable states exceed the ceiling of %.3g; rerun "
                  "with --long",
                  static_cast<unsigned long long>(exact), options_.ceiling);
    throw CeilingError(buf);
  }
}

const bdd::Bdd& Artifacts::reach() {
  if (game_->has_reach()) return game_->reach();
  if (!options_.cache_dir.empty() && TryLoad(-1)) return game_->reach();
  game_->ComputeReachable();
  reach_count_ = game_->Count64(game_->reach());
  CheckCeiling(reach_count_);
  Store();
  return game_->reach();
}

std::uint64_t Artifacts::reach_count() {
  reach();
  return reach_count_;
}

void Artifacts::EnsureLayers(int jmax) {
  if (jmax < 0) throw ConfigError("jmax", "must be non-negative");
  reach();
  if (computed_jmax() >= jmax) return;
  if (!options_.cache_dir.empty() && loaded_ && TryLoad(jmax)) return;
  const symbolic::WinLayers w = game_->ComputeWinLayers(jmax);
  layers_ = w.layers;
  layer_counts_.clear();
  forced_counts_.clear();
  for (int j = 0; j <= jmax; ++j) {
    layer_counts_.push_back(game_->Count64(w.layers[j]));
    forced_counts_.push_back(game_->Count64(w.forced_layers[j]));
  }
  fixpoint_ = w.fixpoint;
  Store();
}

const bdd::Bdd& Artifacts::layer(int j) {
  EnsureLayers(j);
  return layers_[j];
}

std::uint64_t Artifacts::layer_count(int j) {
  EnsureLayers(j);
  return layer_counts_[j];
}

std::uint64_t Artifacts::forced_layer_count(int j) {
  EnsureLayers(j);
  return forced_counts_[j];
}

// Loads the cache entry if it exists and covers layers 0..jmax (jmax = -1:
// reach only). Returns false when there is nothing usable to load; throws
// CacheError when the entry exists but disagrees with the config or itself.
bool Artifacts::TryLoad(int jmax) {
  const fs::path dir = CacheDir();
  const fs::path meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) return false;

  auto fail = [&](const std::string& what) {
    return CacheError("cache entry " + dir.string() + ": " + what);
  };
  Json meta;
  try {
    meta = Json::parse(ReadFile(meta_path));
  } catch (const std::exception& e) {
    throw fail(std::string("unreadable metadata: ") + e.what());
  }
  try {
    if (meta.at("format").get<std::string>() != kCacheFormat) {
      throw fail("unknown format");
    }
    const std::string stored_hash = meta.at("config_hash").get<std::string>();
    if (stored_hash != hash_) {
      throw fail("config hash " + stored_hash + " does not match " + hash_);
    }
    if (ParseGameSpec(meta.at("spec").dump()) != spec()) {
      throw fail("stored game spec differs from the config");
    }
    if (meta.at("var_count").get<bdd::VarId>() !=
        game_->encoding().var_count()) {
      throw fail("variable count differs");
    }
  } catch (const CacheError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(std::string("malformed metadata: ") + e.what());
  }

  const int stored_jmax = static_cast<int>(meta.value("layers", Json::array()).size()) - 1;
  if (jmax > stored_jmax) return false;

  auto load = [&](const std::string& file, std::uint64_t expected) {
    bdd::Bdd f;
    std::uint64_t count = 0;
    try {
      const std::string bytes = ReadFile(dir / file);
      f = game_->manager().Deserialize(std::span(
          reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
      count = game_->Count64(f);
    } catch (const std::exception& e) {
      throw fail(file + ": " + e.what());
    }
    if (count != expected) {
      throw fail(file + " holds " + std::to_string(count) +
                 " states, metadata says " + std::to_string(expected));
    }
    return f;
  };

  const std::uint64_t stored_reach = meta.at("reach_count").get<std::uint64_t>();
  const bdd::Bdd r = load("reach.bdd", stored_reach);
  CheckCeiling(stored_reach);
  game_->SetReachable(r);
  reach_count_ = stored_reach;
  layers_.clear();
  layer_counts_.clear();
  forced_counts_.clear();
  for (int j = 0; j <= stored_jmax; ++j) {
    const Json& l = meta["layers"][j];
    const std::uint64_t count = l.at("count").get<std::uint64_t>();
    layers_.push_back(load(LayerFile(j), count));
    layer_counts_.push_back(count);
    forced_counts_.push_back(l.at("forced_count").get<std::uint64_t>());
  }
  fixpoint_ = meta.value("fixpoint", -1);
  loaded_ = true;

  if (options_.verify_cache) {
    symbolic::SymbolicGame fresh(spec(), options_.symbolic);
    fresh.ComputeReachable();
    auto same = [&](const bdd::Bdd& a, const bdd::Bdd& b) {
      return game_->manager().Serialize(a) == fresh.manager().Serialize(b);
    };
    if (!same(r, fresh.reach())) throw fail("reach differs from recomputation");
    if (stored_jmax >= 0) {
      const symbolic::WinLayers w = fresh.ComputeWinLayers(stored_jmax);
      for (int j = 0; j <= stored_jmax; ++j) {
        if (!same(layers_[j], w.layers[j])) {
          throw fail(LayerFile(j) + " differs from recomputation");
        }
      }
    }
  }
  return true;
}

void Artifacts::Store() {
  if (options_.cache_dir.empty()) return;
  const fs::path dir = CacheDir();
  fs::create_directories(dir);
  auto write_bdd = [&](const std::string& file, const bdd::Bdd& f) {
    const std::vector<std::uint8_t> bytes = game_->manager().Serialize(f);
    WriteFile(dir / file,
              std::string_view(reinterpret_cast<const char*>(bytes.data()),
                               bytes.size()));
  };
  write_bdd("reach.bdd", game_->reach());
  Json meta;
  meta["format"] = kCacheFormat;
  meta["config_hash"] = hash_;
  meta["spec"] = SpecJson(spec());
  meta["var_count"] = game_->encoding().var_count();
  meta["reach_count"] = reach_count_;
  meta["fixpoint"] = fixpoint_;
  meta["layers"] = Json::array();
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    write_bdd(LayerFile(static_cast<int>(j)), layers_[j]);
    meta["layers"].push_back({{"j", j},
                              {"count", layer_counts_[j]},
                              {"forced_count", forced_counts_[j]}});
  }
  // Metadata last: an entry is only visible once its files are complete.
  WriteFile(dir / "meta.json", Dump(meta));
}

// ---------------------------------------------------------------------------
// Catalog

std::string CatalogToJson(const Catalog& catalog) {
  Json out;
  out["format"] = kCatalogFormat;
  out["games"] = Json::array();
  for (const CatalogGame& g : catalog.games) {
    out["games"].push_back(
        {{"config_hash", g.config_hash}, {"spec", SpecJson(g.spec)}});
  }
  out["entries"] = Json::array();
  for (const CatalogEntry& e : catalog.entries) {
    Json labels = Json::array();
    for (const CatalogLabel& l : e.labels) {
      labels.push_back({{"k1", l.k1},
                        {"k2", l.k2},
                        {"label", std::string(1, ToChar(l.label))},
                        {"n_games", l.n_games},
                        {"p1_wins", l.p1_wins},
                        {"draws", l.draws},
                        {"p2_wins", l.p2_wins},
                        {"seed", l.seed}});
    }
    out["entries"].push_back({{"id", e.id},
                              {"game", e.game},
                              {"config_hash", e.config_hash},
                              {"board", e.board},
                              {"j", e.j},
                              {"labels", std::move(labels)}});
  }
  return Dump(out);
}

Catalog CatalogFromJson(std::string_view text) {
  Catalog catalog;
  try {
    const Json in = Json::parse(text);
    if (in.at("format").get<std::string>() != kCatalogFormat) {
      throw ConfigError("format", "not a symgen catalog");
    }
    for (const Json& g : in.at("games")) {
      catalog.games.push_back({ParseGameSpec(g.at("spec").dump()),
                               g.at("config_hash").get<std::string>()});
    }
    for (const Json& e : in.at("entries")) {
      CatalogEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.game = e.at("game").get<std::string>();
      entry.config_hash = e.at("config_hash").get<std::string>();
      entry.board = e.at("board").get<std::string>();
      entry.j = e.at("j").get<int>();
      for (const Json& l : e.at("labels")) {
        CatalogLabel label;
        label.k1 = l.at("k1").get<int>();
        label.k2 = l.at("k2").get<int>();
        label.label = ParseLabel(l.at("label").get<std::string>());
        label.n_games = l.at("n_games").get<int>();
        label.p1_wins = l.at("p1_wins").get<int>();
        label.draws = l.at("draws").get<int>();
        label.p2_wins = l.at("p2_wins").get<int>();
        label.seed = l.at("seed").get<std::uint64_t>();
        entry.labels.push_back(label);
      }
      catalog.entries.push_back(std::move(entry));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("catalog", e.what());
  }
  return catalog;
}

Catalog LoadCatalog(const fs::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw ConfigError("catalog", e.what());
  }
  return CatalogFromJson(text);
}

Catalog MergeCatalogs(const std::vector<Catalog>& catalogs) {
  Catalog out;
  std::set<std::string> hashes;
  for (const Catalog& c : catalogs) {
    for (const CatalogGame& g : c.games) {
      if (hashes.insert(g.config_hash).second) out.games.push_back(g);
    }
    out.entries.insert(out.entries.end(), c.entries.begin(), c.entries.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs

void RunConfig::Validate() const {
  spec.Validate();
  if (js.empty()) throw ConfigError("j", "at least one layer index required");
  for (int j : js) {
    if (j < 0) throw ConfigError("j", "must be non-negative");
  }
  if (k1s.empty() || k2s.empty()) {
    throw ConfigError("k1", "depth lists must be non-empty");
  }
  for (int k : k1s) {
    if (k < 1) throw ConfigError("k1", "depths must be at least 1");
  }
  for (int k : k2s) {
    if (k < 1) throw ConfigError("k2", "depths must be at least 1");
  }
  if (!std::is_sorted(k1s.begin(), k1s.end()) ||
      std::adjacent_find(k1s.begin(), k1s.end()) != k1s.end()) {
    throw ConfigError("k1", "depths must be strictly ascending");
  }
  if (n_games < 1) throw ConfigError("n_games", "must be at least 1");
  if (!(ceiling > 0)) throw ConfigError("ceiling", "must be positive");
  sampling.Validate();
  thresholds.Validate();
}

std::string TablesToCsv(const GameSpec& spec,
                        const std::vector<HardnessTable>& tables) {
  std::ostringstream out;
  out << "game,win_cond,j,k1,k2,sampled,easy,medium,hard\n";
  const std::string prefix = spec.name + "," + spec.win_dirs.ToString() + ",";
  for (const HardnessTable& t : tables) {
    if (t.rows.empty()) {
      out << prefix << t.j << ",-," << t.k2 << ",0,-,-,-\n";
      continue;
    }
    for (const HardnessRow& r : t.rows) {
      out << prefix << t.j << "," << r.k1 << "," << t.k2 << "," << r.sampled
          << "," << r.easy << "," << r.medium << "," << r.hard << "\n";
    }
  }
  return out.str();
}

std::string TablesToJson(const GameSpec& spec, const std::string& config_hash,
                         std::uint64_t base_seed,
                         const std::vector<HardnessTable>& tables) {
  Json out;
  out["game"] = spec.name;
  out["win_cond"] = spec.win_dirs.ToString();
  out["config_hash"] = config_hash;
  out["spec"] = SpecJson(spec);
  out["base_seed"] = base_seed;
  out["tables"] = Json::array();
  for (const HardnessTable& t : tables) {
    Json table;
    table["j"] = t.j;
    table["k2"] = t.k2;
    table["layer_size"] = t.layer_size;
    table["sampling"] = t.policy.ToString();
    table["escalation"] = std::string(ToString(t.escalation));
    table["sampled"] = t.sampled.size();
    table["rows"] = Json::array();
    for (const HardnessRow& r : t.rows) {
      Json records = Json::array();
      for (const HardnessRecord& h : r.records) {
        records.push_back({{"board", ToBoardLiteral(h.state)},
                           {"j", h.j},
                           {"k1", h.k1},
                           {"k2", h.k2},
                           {"n_games", h.n_games},
                           {"p1_wins", h.p1_wins},
                           {"draws", h.draws},
                           {"p2_wins", h.p2_wins},
                           {"label", std::string(1, ToChar(h.label))},
                           {"seed", h.seed}});
      }
      table["rows"].push_back({{"k1", r.k1},
                               {"sampled", r.sampled},
                               {"classified", r.classified},
                               {"easy", r.easy},
                               {"medium", r.medium},
                               {"hard", r.hard},
                               {"records", std::move(records)}});
    }
    out["tables"].push_back(std::move(table));
  }
  return Dump(out);
}

Catalog BuildCatalog(const GameSpec& spec, const std::string& config_hash,
                     const std::vector<HardnessTable>& tables) {
  Catalog catalog;
  catalog.games.push_back({spec, config_hash});
  std::map<std::tuple<int, std::uint64_t, std::uint64_t>, std::size_t> index;
  auto entry_for = [&](int j, const BoardState& s) -> CatalogEntry& {
    const auto key = std::tuple(j, s.x_mask(), s.o_mask());
    auto it = index.find(key);
    if (it == index.end()) {
      CatalogEntry e;
      e.id = config_hash.substr(0, 8) + "-j" + std::to_string(j) + "-" +
             Hex(StateHash(s), 12);
      e.game = spec.name;
      e.config_hash = config_hash;
      e.board = ToBoardLiteral(s);
      e.j = j;
      it = index.emplace(key, catalog.entries.size()).first;
      catalog.entries.push_back(std::move(e));
    }
    return catalog.entries[it->second];
  };
  for (const HardnessTable& t : tables) {
    for (const BoardState& s : t.sampled) entry_for(t.j, s);
    for (const HardnessRow& r : t.rows) {
      for (const HardnessRecord& h : r.records) {
        entry_for(t.j, h.state)
            .labels.push_back({h.k1, h.k2, h.label, h.n_games, h.p1_wins,
                               h.draws, h.p2_wins, h.seed});
      }
    }
  }
  for (CatalogEntry& e : catalog.entries) {
    std::sort(e.labels.begin(), e.labels.end(),
              [](const CatalogLabel& a, const CatalogLabel& b) {
                return std::pair(a.k2, a.k1) < std::pair(b.k2, b.k1);
              });
  }
  return catalog;
}

RunResult Run(const RunConfig& config) {
  config.Validate();
  ArtifactOptions artifact_options;
  artifact_options.cache_dir = config.cache_dir;
  artifact_options.ceiling = config.ceiling;
  artifact_options.long_run = config.long_run;
  Artifacts artifacts(config.spec, artifact_options);
  artifacts.EnsureLayers(*std::max_element(config.js.begin(), config.js.end()));

  TableOptions options;
  options.classify.n_games = config.n_games;
  options.classify.thresholds = config.thresholds;
  options.classify.base_seed = config.base_seed;
  options.classify.threads = config.threads;
  options.escalation = config.escalation;

  RunResult result;
  for (int j : config.js) {
    for (int k2 : config.k2s) {
      result.tables.push_back(BuildHardnessTable(
          artifacts.symbolic(), artifacts.layer(j), j, k2, config.sampling,
          config.k1s, options));
    }
  }
  result.catalog =
      BuildCatalog(config.spec, artifacts.config_hash(), result.tables);

  fs::create_directories(config.out_dir);
  result.csv_path = config.out_dir / "hardness.csv";
  result.json_path = config.out_dir / "hardness.json";
  result.catalog_path = config.out_dir / "catalog.json";
  WriteFile(result.csv_path, TablesToCsv(config.spec, result.tables));
  WriteFile(result.json_path,
            TablesToJson(config.spec, artifacts.config_hash(),
                         config.base_seed, result.tables));
  WriteFile(result.catalog_path, CatalogToJson(result.catalog));
  return result;
}

std::vector<VerifyIssue> VerifyCatalog(const Catalog& catalog,
                                       Artifacts& artifacts, bool replay,
                                       const ClassifyOptions& options) {
  std::vector<VerifyIssue> issues;
  for (const CatalogEntry& e : catalog.entries) {
    if (e.config_hash != artifacts.config_hash()) continue;
    BoardState state;
    try {
      state = ParseBoardLiteral(artifacts.spec(), e.board);
      artifacts.game().CheckBoard(state);
    } catch (const Error& err) {
      issues.push_back({e.id, std::string("board: ") + err.what()});
      continue;
    }
    if (!artifacts.symbolic().Contains(artifacts.layer(e.j), state)) {
      issues.push_back({e.id, "not in layer L_" + std::to_string(e.j)});
      continue;
    }
    if (!replay) continue;
    for (const CatalogLabel& l : e.labels) {
      ClassifyOptions o = options;
      o.n_games = l.n_games;
      o.base_seed = l.seed;
      const HardnessRecord r =
          ClassifyState(artifacts.game(), state, e.j, l.k1, l.k2, o);
      if (r.p1_wins != l.p1_wins || r.draws != l.draws ||
          r.p2_wins != l.p2_wins) {
        issues.push_back(
            {e.id, "replay at k1=" + std::to_string(l.k1) +
                       " k2=" + std::to_string(l.k2) + " gives " +
                       std::to_string(r.p1_wins) + "/" +
                       std::to_string(r.draws) + "/" +
                       std::to_string(r.p2_wins) + ", stored " +
                       std::to_string(l.p1_wins) + "/" +
                       std::to_string(l.draws) + "/" +
                       std::to_string(l.p2_wins)});
      }
    }
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Rendering

std::string RenderBoard(const GameSpec& spec, const BoardState& state,
                        const RenderCaption& caption) {
  if (state.rows() != spec.rows || state.cols() != spec.cols) {
    throw BoardError("board shape does not match the game");
  }
  std::string rule = "+";
  for (int c = 0; c < spec.cols; ++c) rule += "---+";
  rule += "\n";
  std::string out = rule;
  for (int r = 0; r < spec.rows; ++r) {
    out += "|";
    for (int c = 0; c < spec.cols; ++c) {
      const Cell cell = state.at(r, c);
      out += cell == Cell::X ? " X |" : cell == Cell::O ? " O |" : "   |";
    }
    out += "\n" + rule;
  }
  std::string line;
  if (!spec.name.empty()) line = spec.name + " ";
  line += spec.win_dirs.ToString() + " gravity=" + spec.gravity.ToString();
  line += state.turn() == Player::P1 ? " | X to move" : " | O to move";
  if (caption.j) line += " | j=" + std::to_string(*caption.j);
  if (!caption.labels.empty()) line += " | " + caption.labels;
  return out + line + "\n";
}

BoardState ParseRenderedBoard(std::string_view text) {
  std::vector<std::string> rows;
  std::optional<Player> turn;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '+') continue;
    if (line[0] == '|') {
      std::string row;
      // Cells are "| c " groups; the mark sits two characters after a bar.
      for (std::size_t i = 0; i + 2 < line.size() && line[i] == '|'; i += 4) {
        const char c = line[i + 2];
        if (c != 'X' && c != 'O' && c != ' ') {
          throw BoardError(std::string("unexpected cell character '") + c +
                           "'");
        }
        row += c == ' ' ? '.' : c;
      }
      rows.push_back(std::move(row));
      continue;
    }
    if (line.find(" | X to move") != std::string::npos) turn = Player::P1;
    if (line.find(" | O to move") != std::string::npos) turn = Player::P2;
  }
  if (rows.empty()) throw BoardError("no board rows found");
  if (!turn) throw BoardError("caption line with the side to move missing");
  std::string literal;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r) literal += '/';
    literal += rows[r];
  }
  literal += *turn == Player::P1 ? " X" : " O";
  return ParseBoardLiteral(literal);
}

// ---------------------------------------------------------------------------
// Categories

Category CategoryOf(const std::vector<CatalogLabel>& labels, int k2) {
  std::map<int, Label> by_k1;
  for (const CatalogLabel& l : labels) {
    if (l.k2 == k2) by_k1[l.k1] = l.label;
  }
  Category c;
  if (by_k1.empty()) return c;
  const int kmax = by_k1.rbegin()->first;
  for (int i = 1; i <= kmax; ++i) {
    const auto it = by_k1.find(i);
    if (it == by_k1.end()) return c;
    if (it->second == Label::kEasy) {
      c.kind = Category::Kind::kDepth;
      c.depth = i;
      return c;
    }
  }
  c.kind = Category::Kind::kBeyond;
  c.depth = kmax;
  return c;
}

std::vector<CategoryRow> SummarizeCategories(const Catalog& catalog) {
  std::map<std::string, std::string> dirs_of;
  for (const CatalogGame& g : catalog.games) {
    dirs_of[g.config_hash] = g.spec.win_dirs.ToString();
  }
  // Rows keyed by (game, hash, j, k2) in first-seen order.
  std::map<std::tuple<std::string, std::string, int, int>, std::size_t> index;
  std::vector<CategoryRow> rows;
  std::vector<std::vector<Category>> cats;
  for (const CatalogEntry& e : catalog.entries) {
    std::set<int> k2s;
    for (const CatalogLabel& l : e.labels) k2s.insert(l.k2);
    for (int k2 : k2s) {
      const auto key = std::tuple(e.game, e.config_hash, e.j, k2);
      auto it = index.find(key);
      if (it == index.end()) {
        CategoryRow row;
        row.game = e.game;
        row.win_cond = dirs_of.count(e.config_hash) ? dirs_of[e.config_hash]
                                                    : std::string("?");
        row.j = e.j;
        row.k2 = k2;
        it = index.emplace(key, rows.size()).first;
        rows.push_back(std::move(row));
        cats.emplace_back();
      }
      CategoryRow& row = rows[it->second];
      for (const CatalogLabel& l : e.labels) {
        if (l.k2 == k2) row.kmax = std::max(row.kmax, l.k1);
      }
      cats[it->second].push_back(CategoryOf(e.labels, k2));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CategoryRow& row = rows[i];
    row.counts.assign(row.kmax + 1, 0);
    for (const Category& c : cats[i]) {
      switch (c.kind) {
        case Category::Kind::kDepth: ++row.counts[c.depth]; break;
        case Category::Kind::kBeyond:
          // A state hard at every depth it was measured at, but measured
          // less deeply than its group, is not known to be beyond kmax.
          if (c.depth == row.kmax) {
            ++row.beyond;
          } else {
            ++row.insufficient;
          }
          break;
        case Category::Kind::kInsufficient: ++row.insufficient; break;
      }
    }
  }
  return rows;
}

std::string FormatCategoryReport(const std::vector<CategoryRow>& rows) {
  std::ostringstream out;
  for (const CategoryRow& row : rows) {
    out << row.game << " " << row.win_cond << " j=" << row.j
        << " k2=" << row.k2 << ":";
    for (int i = 1; i <= row.kmax; ++i) {
      out << " category-" << i << " " << row.counts[i] << ",";
    }
    out << " category > " << row.kmax << " " << row.beyond
        << ", insufficient data " << row.insufficient << "\n";
  }
  return out.str();
}

}  // namespace symgen::pipeline
