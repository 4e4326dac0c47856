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

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "symgen/error.h"

namespace symgen::pipeline {
namespace {

namespace fs = std::filesystem;

fs::path GamesDir() { return SYMGEN_GAMES_DIR; }

GameSpec Load(const std::string& name) {
  return LoadGameSpec(GamesDir() / (name + ".json"));
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void Spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("symgen_pipeline_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(GameFiles, AllLoadWithDistinctHashes) {
  std::set<std::string> names;
  std::set<std::string> hashes;
  int n = 0;
  for (const auto& entry : fs::directory_iterator(GamesDir())) {
    const GameSpec spec = LoadGameSpec(entry.path());
    EXPECT_EQ(spec.name + ".json", entry.path().filename().string());
    names.insert(spec.name);
    const std::string h = ConfigHash(spec);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
    hashes.insert(h);
    ++n;
  }
  EXPECT_EQ(n, 24);
  EXPECT_EQ(names.size(), 24u);
  EXPECT_EQ(hashes.size(), 24u);
}

TEST(ConfigHash, StableAndSensitive) {
  const GameSpec a = Load("tictactoe-3x3-rcd");
  EXPECT_EQ(ConfigHash(a), ConfigHash(Load("tictactoe-3x3-rcd")));
  GameSpec b = a;
  b.match_len = 2;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  b = a;
  b.gravity = Gravity::Parse("full");
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
}

TEST(LoadGameSpec, RejectsBadFiles) {
  TempDir dir;
  EXPECT_THROW(LoadGameSpec(dir.path() / "missing.json"), ConfigError);
  Spit(dir.path() / "a.json", "{not json");
  EXPECT_THROW(LoadGameSpec(dir.path() / "a.json"), ConfigError);
  Spit(dir.path() / "b.json",
       R"({"name":"x","rows":3,"cols":3,"match_len":4,"win_dirs":"R","gravity":"none"})");
  EXPECT_THROW(LoadGameSpec(dir.path() / "b.json"), ConfigError);
}

TEST(Artifacts, TicTacToeCounts) {
  Artifacts a(Load("tictactoe-3x3-rcd"));
  EXPECT_EQ(a.reach_count(), 5478u);
  a.EnsureLayers(3);
  EXPECT_EQ(a.layer_count(0), 1498u);
  EXPECT_EQ(a.layer_count(1), 260u);
  EXPECT_EQ(a.layer_count(2), 36u);
  EXPECT_EQ(a.layer_count(3), 0u);
  EXPECT_EQ(a.forced_layer_count(2), 72u);
  EXPECT_FALSE(a.loaded_from_cache());
}

TEST(Artifacts, CeilingRefusals) {
  EXPECT_THROW(Artifacts(Load("connect4-5x5-rcd")), CeilingError);
  ArtifactOptions tight;
  tight.ceiling = 1000;
  EXPECT_THROW(Artifacts(Load("tictactoe-3x3-rcd"), tight), CeilingError);
  // Within the estimate margin, the exact count decides.
  tight.ceiling = 5000;
  Artifacts a(Load("tictactoe-3x3-rcd"), tight);
  EXPECT_THROW(a.reach(), CeilingError);
  tight.long_run = true;
  Artifacts b(Load("tictactoe-3x3-rcd"), tight);
  EXPECT_EQ(b.reach_count(), 5478u);
}

class CacheTest : public ::testing::Test {
 protected:
  void SetUp() override {
    opts_.cache_dir = dir_.path();
    Artifacts a(spec_, opts_);
    a.EnsureLayers(2);
    entry_ = dir_.path() / a.config_hash();
  }
  GameSpec spec_ = Load("bottom2-3x3-rcd");
  TempDir dir_;
  ArtifactOptions opts_;
  fs::path entry_;
};

TEST_F(CacheTest, RoundTripMatchesFreshComputation) {
  ASSERT_TRUE(fs::exists(entry_ / "meta.json"));
  Artifacts fresh(spec_);
  fresh.EnsureLayers(2);
  ArtifactOptions verify = opts_;
  verify.verify_cache = true;
  for (const ArtifactOptions& o : {opts_, verify}) {
    Artifacts cached(spec_, o);
    cached.EnsureLayers(2);
    EXPECT_TRUE(cached.loaded_from_cache());
    EXPECT_EQ(cached.reach_count(), fresh.reach_count());
    for (int j = 0; j <= 2; ++j) {
      EXPECT_EQ(cached.layer_count(j), fresh.layer_count(j));
      for (const BoardState& s : fresh.symbolic().Enumerate(fresh.layer(j))) {
        ASSERT_TRUE(cached.symbolic().Contains(cached.layer(j), s));
      }
    }
  }
}

TEST_F(CacheTest, DeeperRequestExtendsTheEntry) {
  Artifacts a(spec_, opts_);
  a.EnsureLayers(3);
  EXPECT_EQ(a.computed_jmax(), 3);
  Artifacts b(spec_, opts_);
  b.EnsureLayers(3);
  EXPECT_TRUE(b.loaded_from_cache());
}

TEST_F(CacheTest, TamperedMetadataIsRejected) {
  const std::string original = Slurp(entry_ / "meta.json");
  auto expect_mismatch = [&](const std::function<void(nlohmann::json&)>& edit) {
    nlohmann::json meta = nlohmann::json::parse(original);
    edit(meta);
    Spit(entry_ / "meta.json", meta.dump(2));
    Artifacts a(spec_, opts_);
    EXPECT_THROW(a.EnsureLayers(2), CacheError) << meta.dump();
  };
  expect_mismatch([](nlohmann::json& m) { m["config_hash"] = "0000000000000000"; });
  expect_mismatch([](nlohmann::json& m) { m["spec"]["match_len"] = 2; });
  expect_mismatch([](nlohmann::json& m) {
    m["reach_count"] = m["reach_count"].get<std::uint64_t>() + 1;
  });
  expect_mismatch([](nlohmann::json& m) {
    m["layers"][1]["count"] = m["layers"][1]["count"].get<std::uint64_t>() + 1;
  });
  Spit(entry_ / "meta.json", original);
  Spit(entry_ / "layer_0.bdd", "garbage");
  Artifacts a(spec_, opts_);
  EXPECT_THROW(a.EnsureLayers(2), CacheError);
}

TEST(Render, ShowcaseBoardGolden) {
  const GameSpec spec = Load("tictactoe-4x4-rc");
  const BoardState s = ParseBoardLiteral(spec, "O.X./X.OX/..XO/O.XO X");
  const std::string want =
      "+---+---+---+---+\n"
      "| O |   | X |   |\n"
      "+---+---+---+---+\n"
      "| X |   | O | X |\n"
      "+---+---+---+---+\n"
      "|   |   | X | O |\n"
      "+---+---+---+---+\n"
      "| O |   | X | O |\n"
      "+---+---+---+---+\n"
      "tictactoe-4x4-rc RC gravity=none | X to move | j=2 | k2=3: H H E\n";
  EXPECT_EQ(RenderBoard(spec, s, {2, "k2=3: H H E"}), want);
  EXPECT_EQ(ParseRenderedBoard(want), s);
}

TEST(Render, RoundTripOnRandomPlay) {
  std::mt19937_64 rng(12);
  for (const char* name : {"tictactoe-3x3-rcd", "bottom2-4x4-rc", "connect4-5x5-rd"}) {
    const GameSpec spec = Load(name);
    const Game g(spec);
    for (int i = 0; i < 100; ++i) {
      BoardState s = g.EmptyBoard();
      const int plies = static_cast<int>(rng() % (spec.rows * spec.cols));
      for (int p = 0; p < plies && g.Status(s) == GameStatus::kOngoing; ++p) {
        const std::vector<Move> moves = g.LegalMoves(s);
        const Move m = moves[rng() % moves.size()];
        s = g.Play(s, s.index(m.row, m.col));
      }
      ASSERT_EQ(ParseRenderedBoard(RenderBoard(spec, s)), s) << ToBoardLiteral(s);
    }
  }
  EXPECT_THROW(ParseRenderedBoard("| Q |\n"), BoardError);
}

// Local membership in the raw winning sets, by direct game-tree recursion:
// W_0 holds X-to-move boards with an immediately winning move, W_{i+1} those
// with a move after which every O reply lands in W_i.
bool InRaw(const Game& g, const BoardState& s, int i);

bool AllRepliesIn(const Game& g, const BoardState& s, int i) {
  if (g.Status(s) != GameStatus::kOngoing) return false;
  for (const Move& m : g.LegalMoves(s)) {
    if (!InRaw(g, g.Play(s, s.index(m.row, m.col)), i)) return false;
  }
  return true;
}

bool InRaw(const Game& g, const BoardState& s, int i) {
  if (s.turn() != Player::P1 || g.Status(s) != GameStatus::kOngoing) return false;
  for (const Move& m : g.LegalMoves(s)) {
    const BoardState t = g.Play(s, s.index(m.row, m.col));
    if (i == 0 ? g.Status(t) == GameStatus::kP1Win : AllRepliesIn(g, t, i - 1)) {
      return true;
    }
  }
  return false;
}

TEST(ShowcaseBoards, LieInTheirLayers) {
  struct Board {
    const char* game;
    const char* literal;
    int j;
  };
  const std::vector<Board> boards = {
      {"tictactoe-4x4-rc", "O.X./X.OX/..XO/O.XO X", 2},
      {"tictactoe-4x4-cd", "..X./X.../.O../OXO. X", 2},
      {"bottom2-4x4-rcd", "..../.X../.O.X/...O X", 2},
      {"bottom2-4x4-rc", "..X./X.O./..../OOX. X", 2},
      {"connect4-5x5-rcd", "O...O/X.X.X/X.O.X/XXOXO/OOOXO X", 2},
      {"connect4-5x5-rd", "O.O../X.XX./O.OX./O.OX./OXOXX X", 3},
  };
  for (const Board& b : boards) {
    const Game g(Load(b.game));
    const BoardState s = ParseBoardLiteral(g.spec(), b.literal);
    for (int i = 0; i <= b.j; ++i) {
      EXPECT_EQ(InRaw(g, s, i), i == b.j) << b.game << " W_" << i;
    }
  }
  // Cross-check one board against the symbolic layer.
  Artifacts a(Load("tictactoe-4x4-rc"));
  const BoardState board = ParseBoardLiteral(a.spec(), boards[0].literal);
  EXPECT_TRUE(a.symbolic().Contains(a.layer(2), board));
  EXPECT_FALSE(a.symbolic().Contains(a.layer(1), board));
}

CatalogLabel L(int k1, int k2, Label label) {
  CatalogLabel l;
  l.k1 = k1;
  l.k2 = k2;
  l.label = label;
  return l;
}

TEST(Categories, PerState) {
  using K = Category::Kind;
  const Label E = Label::kEasy, M = Label::kMedium, H = Label::kHard;
  auto cat = [](std::vector<CatalogLabel> ls) { return CategoryOf(ls, 3); };
  EXPECT_EQ(cat({L(1, 3, E)}).kind, K::kDepth);
  EXPECT_EQ(cat({L(1, 3, E)}).depth, 1);
  const Category two = cat({L(1, 3, H), L(2, 3, E)});
  EXPECT_EQ(two.kind, K::kDepth);
  EXPECT_EQ(two.depth, 2);
  EXPECT_EQ(cat({L(1, 3, M), L(2, 3, H), L(3, 3, E)}).depth, 3);
  const Category beyond = cat({L(1, 3, H), L(2, 3, M), L(3, 3, H)});
  EXPECT_EQ(beyond.kind, K::kBeyond);
  EXPECT_EQ(beyond.depth, 3);
  EXPECT_EQ(cat({L(1, 3, H), L(3, 3, E)}).kind, K::kInsufficient);
  EXPECT_EQ(cat({L(1, 2, E)}).kind, K::kInsufficient);
  EXPECT_EQ(cat({}).kind, K::kInsufficient);
}

TEST(Categories, Summary) {
  Catalog c;
  GameSpec spec = Load("tictactoe-3x3-rcd");
  c.games.push_back({spec, ConfigHash(spec)});
  auto entry = [&](std::vector<CatalogLabel> ls) {
    CatalogEntry e;
    e.game = spec.name;
    e.config_hash = ConfigHash(spec);
    e.j = 2;
    e.labels = std::move(ls);
    c.entries.push_back(e);
  };
  const Label E = Label::kEasy, H = Label::kHard;
  entry({L(1, 3, E)});
  entry({L(1, 3, E)});
  entry({L(1, 3, H), L(2, 3, E)});
  entry({L(1, 3, H), L(2, 3, H), L(3, 3, H)});
  entry({L(1, 3, H), L(2, 3, H)});  // stopped early: not enough depth
  const std::vector<CategoryRow> rows = SummarizeCategories(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].kmax, 3);
  EXPECT_EQ(rows[0].counts.at(1), 2u);
  EXPECT_EQ(rows[0].counts.at(2), 1u);
  EXPECT_EQ(rows[0].beyond, 1u);
  EXPECT_EQ(rows[0].insufficient, 1u);
  EXPECT_EQ(FormatCategoryReport(rows),
            "tictactoe-3x3-rcd RCD j=2 k2=3: category-1 2, category-2 1, "
            "category-3 0, category > 3 1, insufficient data 1\n");
}

class RunTest : public ::testing::Test {
 protected:
  RunConfig Config(const fs::path& out) {
    RunConfig c;
    c.spec = Load("tictactoe-3x3-rcd");
    c.js = {2, 3};
    c.k1s = {1, 2};
    c.k2s = {2};
    c.n_games = 10;
    c.base_seed = 5;
    c.out_dir = out;
    return c;
  }
  TempDir dir_;
};

TEST_F(RunTest, OutputsAgreeAndRerunsAreByteIdentical) {
  RunConfig one = Config(dir_.path() / "one");
  const RunResult a = pipeline::Run(one);
  RunConfig two = Config(dir_.path() / "two");
  two.threads = 2;
  pipeline::Run(two);
  for (const char* f : {"hardness.csv", "hardness.json", "catalog.json"}) {
    EXPECT_EQ(Slurp(dir_.path() / "one" / f), Slurp(dir_.path() / "two" / f)) << f;
  }

  // CSV rows agree with the JSON tables.
  const nlohmann::json json = nlohmann::json::parse(Slurp(a.json_path));
  std::vector<std::string> from_json;
  for (const auto& t : json["tables"]) {
    if (t["rows"].empty()) {
      from_json.push_back(std::to_string(t["j"].get<int>()) + ",-," +
                          std::to_string(t["k2"].get<int>()) + ",0,-,-,-");
    }
    for (const auto& r : t["rows"]) {
      std::ostringstream line;
      line << t["j"] << "," << r["k1"] << "," << t["k2"] << "," << r["sampled"]
           << "," << r["easy"] << "," << r["medium"] << "," << r["hard"];
      from_json.push_back(line.str());
      EXPECT_EQ(r["classified"].get<std::size_t>(), r["records"].size());
    }
  }
  std::istringstream csv(Slurp(a.csv_path));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "game,win_cond,j,k1,k2,sampled,easy,medium,hard");
  std::vector<std::string> from_csv;
  while (std::getline(csv, line)) {
    ASSERT_EQ(line.rfind("tictactoe-3x3-rcd,RCD,", 0), 0u) << line;
    from_csv.push_back(line.substr(std::string("tictactoe-3x3-rcd,RCD,").size()));
  }
  EXPECT_EQ(from_csv, from_json);
  EXPECT_EQ(from_csv.back(), "3,-,2,0,-,-,-");
  EXPECT_EQ(a.catalog.entries.size(), 36u);
}

TEST_F(RunTest, CatalogRoundTripsAndVerifies) {
  const RunResult r = pipeline::Run(Config(dir_.path()));
  const Catalog loaded = LoadCatalog(r.catalog_path);
  EXPECT_EQ(CatalogToJson(loaded), Slurp(r.catalog_path));
  std::set<std::string> ids;
  for (const CatalogEntry& e : loaded.entries) {
    EXPECT_TRUE(ids.insert(e.id).second);
    EXPECT_EQ(e.config_hash, ConfigHash(Load("tictactoe-3x3-rcd")));
    ASSERT_FALSE(e.labels.empty());
    EXPECT_EQ(e.labels.front().k1, 1);
  }
  Artifacts art(Load("tictactoe-3x3-rcd"));
  EXPECT_TRUE(VerifyCatalog(loaded, art, true).empty());

  Catalog bad = loaded;
  bad.entries[0].labels[0].p1_wins += 1;
  bad.entries[0].labels[0].draws -= 1;
  bad.entries[1].board = "X../.../... O";
  bad.entries[2].board = "XX./OO./... X";  // reachable but in L_0
  bad.entries[3].board = "nonsense";
  const auto issues = VerifyCatalog(bad, art, true);
  ASSERT_EQ(issues.size(), 4u);
  EXPECT_NE(issues[0].problem.find("replay"), std::string::npos);
  EXPECT_NE(issues[2].problem.find("not in layer"), std::string::npos);

  const Catalog merged = MergeCatalogs({loaded, loaded});
  EXPECT_EQ(merged.games.size(), 1u);
  EXPECT_EQ(merged.entries.size(), 2 * loaded.entries.size());
  EXPECT_THROW(CatalogFromJson("{\"format\":\"other\"}"), ConfigError);
}

TEST(RunConfig, Validation) {
  RunConfig c;
  c.spec = Load("tictactoe-3x3-rcd");
  EXPECT_NO_THROW(c.Validate());
  RunConfig bad = c;
  bad.js = {};
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = c;
  bad.k1s = {2, 1};
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = c;
  bad.k2s = {0};
  EXPECT_THROW(bad.Validate(), ConfigError);
  bad = c;
  bad.n_games = 0;
  EXPECT_THROW(bad.Validate(), ConfigError);
}

}  // namespace
}  // namespace symgen::pipeline
