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

// End-to-end generation: cached symbolic artifacts, hardness tables, the
// start-state catalog, board rendering and the category summary.
//
// Cache layout, one directory per config hash:
//   <cache>/<hash>/meta.json     spec, counts, computed depth
//   <cache>/<hash>/reach.bdd     reachable set
//   <cache>/<hash>/layer_<j>.bdd winning layer L_j

#ifndef SYMGEN_PIPELINE_H_
#define SYMGEN_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symgen/bdd.h"
#include "symgen/classify.h"
#include "symgen/rules.h"
#include "symgen/symbolic.h"

namespace symgen::pipeline {

// 16 hex digits of FNV-1a over the canonical config text.
std::string ConfigHash(const GameSpec& spec);

// Reads and parses a game config file. Throws ConfigError.
GameSpec LoadGameSpec(const std::filesystem::path& path);

struct ArtifactOptions {
  // Empty disables the on-disk cache.
  std::filesystem::path cache_dir;
  // Reachable-state ceiling enforced unless long_run is set.
  double ceiling = 1e7;
  bool long_run = false;
  // Recompute loaded artifacts and compare them set for set.
  bool verify_cache = false;
  symbolic::SymbolicOptions symbolic;
};

// Reachable set and winning layers of one game, computed on demand or
// loaded from the cache.
class Artifacts {
 public:
  // Throws CeilingError straight away when the state-space estimate is far
  // above the ceiling and long_run is off.
  Artifacts(GameSpec spec, ArtifactOptions options = {});
  ~Artifacts();
  Artifacts(const Artifacts&) = delete;
  Artifacts& operator=(const Artifacts&) = delete;

  const GameSpec& spec() const;
  const std::string& config_hash() const { return hash_; }
  symbolic::SymbolicGame& symbolic() { return *game_; }
  const Game& game() const;
  double estimate() const { return estimate_; }

  // Throws CeilingError when the exact count exceeds the ceiling, and
  // CacheError when a cached artifact is inconsistent.
  const bdd::Bdd& reach();
  std::uint64_t reach_count();
  // Computes (or loads) layers 0..jmax.
  void EnsureLayers(int jmax);
  int computed_jmax() const { return static_cast<int>(layers_.size()) - 1; }
  const bdd::Bdd& layer(int j);
  std::uint64_t layer_count(int j);
  // Size of the cumulative attractor increment, for diagnostics.
  std::uint64_t forced_layer_count(int j);
  // First index where the layer recursion stops changing, -1 if unknown.
  int fixpoint() const { return fixpoint_; }
  bool loaded_from_cache() const { return loaded_; }

 private:
  std::filesystem::path CacheDir() const;
  bool TryLoad(int jmax);
  void Store();
  void CheckCeiling(std::uint64_t exact) const;

  ArtifactOptions options_;
  std::string hash_;
  double estimate_ = 0;
  std::unique_ptr<symbolic::SymbolicGame> game_;
  std::uint64_t reach_count_ = 0;
  std::vector<bdd::Bdd> layers_;
  std::vector<std::uint64_t> layer_counts_;
  std::vector<std::uint64_t> forced_counts_;
  int fixpoint_ = -1;
  bool loaded_ = false;
};

struct CatalogLabel {
  int k1 = 1;
  int k2 = 1;
  Label label = Label::kEasy;
  int n_games = 0;
  int p1_wins = 0;
  int draws = 0;
  int p2_wins = 0;
  std::uint64_t seed = 0;
};

struct CatalogEntry {
  std::string id;
  std::string game;
  std::string config_hash;
  std::string board;
  int j = 0;
  // Measured labels, ascending by (k2, k1).
  std::vector<CatalogLabel> labels;
};

struct CatalogGame {
  GameSpec spec;
  std::string config_hash;
};

struct Catalog {
  std::vector<CatalogGame> games;
  std::vector<CatalogEntry> entries;
};

std::string CatalogToJson(const Catalog& catalog);
// Throws ConfigError on malformed input.
Catalog CatalogFromJson(std::string_view text);
Catalog LoadCatalog(const std::filesystem::path& path);
// Concatenates catalogs; games are deduplicated by config hash.
Catalog MergeCatalogs(const std::vector<Catalog>& catalogs);

struct RunConfig {
  GameSpec spec;
  std::vector<int> js{2, 3};
  std::vector<int> k1s{1, 2, 3};
  std::vector<int> k2s{2, 3};
  SamplingPolicy sampling;
  Thresholds thresholds;
  int n_games = 30;
  std::uint64_t base_seed = 0;
  Escalation escalation = Escalation::kMediumHard;
  int threads = 1;
  std::filesystem::path cache_dir;
  std::filesystem::path out_dir = ".";
  bool long_run = false;
  double ceiling = 1e7;
  // Throws ConfigError.
  void Validate() const;
};

struct RunResult {
  std::vector<HardnessTable> tables;
  Catalog catalog;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;
  std::filesystem::path catalog_path;
};

// Columns: game,win_cond,j,k1,k2,sampled,easy,medium,hard. Empty layers
// give one row per k1 with '-' counts.
std::string TablesToCsv(const GameSpec& spec,
                        const std::vector<HardnessTable>& tables);
std::string TablesToJson(const GameSpec& spec, const std::string& config_hash,
                         std::uint64_t base_seed,
                         const std::vector<HardnessTable>& tables);
// One entry per sampled state and layer, with every measured label.
Catalog BuildCatalog(const GameSpec& spec, const std::string& config_hash,
                     const std::vector<HardnessTable>& tables);

// Solves, samples and classifies every (j, k2) of the config, then writes
// hardness.csv, hardness.json and catalog.json into out_dir. The outputs
// are byte-identical for identical configs.
RunResult Run(const RunConfig& config);

struct VerifyIssue {
  std::string entry_id;
  std::string problem;
};

// Re-parses every entry of `game`, checks L_j membership and, when
// `replay` is set, reproduces each stored label from its seed.
std::vector<VerifyIssue> VerifyCatalog(const Catalog& catalog,
                                       Artifacts& artifacts, bool replay,
                                       const ClassifyOptions& options = {});

struct RenderCaption {
  std::optional<int> j;
  std::string labels;
};

// ASCII grid with '+', '-', '|' borders, followed by one caption line:
// "<name> <dirs> gravity=<g> | <side> to move[ | j=<j>][ | <labels>]".
std::string RenderBoard(const GameSpec& spec, const BoardState& state,
                        const RenderCaption& caption = {});
// Inverse of RenderBoard. Throws BoardError.
BoardState ParseRenderedBoard(std::string_view text);

// Category of one state from its labels at a fixed k2: i when the state is
// not easy below depth i and easy at depth i.
struct Category {
  enum class Kind : std::uint8_t { kDepth, kBeyond, kInsufficient };
  Kind kind = Kind::kInsufficient;
  int depth = 0;  // kDepth: i; kBeyond: the largest measured depth
};
Category CategoryOf(const std::vector<CatalogLabel>& labels, int k2);

struct CategoryRow {
  std::string game;
  std::string win_cond;
  int j = 0;
  int k2 = 0;
  int kmax = 0;
  // counts[i] = number of category-i states, index 0 unused.
  std::vector<std::size_t> counts;
  std::size_t beyond = 0;
  std::size_t insufficient = 0;
};

std::vector<CategoryRow> SummarizeCategories(const Catalog& catalog);
std::string FormatCategoryReport(const std::vector<CategoryRow>& rows);

}  // namespace symgen::pipeline

#endif  // SYMGEN_PIPELINE_H_
