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

// symgen command-line tool.
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 ceiling
// refusal, 4 cache mismatch.

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "http_server.h"
#include "symgen/classify.h"
#include "symgen/error.h"
#include "symgen/pipeline.h"
#include "symgen/rules.h"
#include "symgen/service.h"

namespace {

using namespace symgen;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCeiling = 3;
constexpr int kExitCache = 4;

// "2/3" or "1".
Fraction ParseFraction(const std::string& key, const std::string& text) {
  Fraction f;
  try {
    const std::size_t slash = text.find('/');
    std::size_t used = 0;
    f.num = std::stoll(text.substr(0, slash), &used);
    if (used != text.substr(0, slash).size()) throw std::invalid_argument(key);
    if (slash != std::string::npos) {
      const std::string den = text.substr(slash + 1);
      f.den = std::stoll(den, &used);
      if (used != den.size()) throw std::invalid_argument(key);
    }
  } catch (const std::logic_error&) {
    throw ConfigError(key, "expected a fraction like 2/3, got '" + text + "'");
  }
  return f;
}

struct SolveArgs {
  std::string config;
  int jmax = 3;
  bool long_run = false;
  std::string cache;
  bool verify_cache = false;
  bool partition = false;
};

pipeline::ArtifactOptions ArtifactOptionsOf(const SolveArgs& a) {
  pipeline::ArtifactOptions o;
  o.cache_dir = a.cache;
  o.long_run = a.long_run;
  o.verify_cache = a.verify_cache;
  return o;
}

int RunSolve(const SolveArgs& a) {
  pipeline::Artifacts art(pipeline::LoadGameSpec(a.config), ArtifactOptionsOf(a));
  const GameSpec& spec = art.spec();
  std::cout << "game " << spec.name << " " << spec.win_dirs.ToString()
            << " gravity=" << spec.gravity.ToString() << " hash "
            << art.config_hash() << "\n";
  std::cout << "reach " << art.reach_count() << "\n";
  art.EnsureLayers(a.jmax);
  for (int j = 0; j <= a.jmax; ++j) {
    std::cout << "L_" << j << " " << art.layer_count(j) << " (attractor step "
              << art.forced_layer_count(j) << ")\n";
  }
  if (art.fixpoint() >= 0) {
    std::cout << "layer recursion stationary from W_" << art.fixpoint() << "\n";
  }
  if (a.partition) {
    const symbolic::Partition p = art.symbolic().SolveFull();
    symbolic::SymbolicGame& g = art.symbolic();
    std::cout << "p1_wins " << g.Count64(p.p1_wins) << "\np2_wins "
              << g.Count64(p.p2_wins) << "\ndraws " << g.Count64(p.draws)
              << "\n";
    const BoardState empty = art.game().EmptyBoard();
    std::cout << "start "
              << (g.Contains(p.p1_wins, empty)   ? "p1_win"
                  : g.Contains(p.p2_wins, empty) ? "p2_win"
                                                 : "draw")
              << "\n";
  }
  std::cout << (art.loaded_from_cache() ? "cache hit\n" : "");
  return 0;
}

int RunLayers(const SolveArgs& a) {
  pipeline::Artifacts art(pipeline::LoadGameSpec(a.config), ArtifactOptionsOf(a));
  art.EnsureLayers(a.jmax);
  for (int j = 0; j <= a.jmax; ++j) {
    std::cout << j << " " << art.layer_count(j) << "\n";
  }
  return 0;
}

int RunReachCount(const SolveArgs& a) {
  pipeline::Artifacts art(pipeline::LoadGameSpec(a.config), ArtifactOptionsOf(a));
  std::cout << art.reach_count() << "\n";
  return 0;
}

struct GenerateArgs {
  std::string config;
  std::vector<int> js{2, 3};
  std::vector<int> k1s{1, 2, 3};
  std::vector<int> k2s{2, 3};
  std::string sampling = "all";
  std::uint64_t seed = 0;
  int n_games = 30;
  std::string escalate = "mh";
  std::string easy_min = "2/3";
  std::string hard_max = "1/3";
  int threads = 1;
  std::string out = ".";
  std::string cache;
  bool long_run = false;
};

int RunGenerate(const GenerateArgs& a) {
  pipeline::RunConfig c;
  c.spec = pipeline::LoadGameSpec(a.config);
  c.js = a.js;
  c.k1s = a.k1s;
  c.k2s = a.k2s;
  c.sampling = SamplingPolicy::Parse(a.sampling);
  c.base_seed = a.seed;
  c.n_games = a.n_games;
  c.escalation = ParseEscalation(a.escalate);
  c.thresholds.easy_min = ParseFraction("easy_min", a.easy_min);
  c.thresholds.hard_max = ParseFraction("hard_max", a.hard_max);
  c.threads = a.threads;
  c.out_dir = a.out;
  c.cache_dir = a.cache;
  c.long_run = a.long_run;
  const pipeline::RunResult r = pipeline::Run(c);
  std::cout << pipeline::TablesToCsv(c.spec, r.tables);
  std::cerr << "wrote " << r.csv_path.string() << ", " << r.json_path.string()
            << ", " << r.catalog_path.string() << "\n";
  return 0;
}

struct ClassifyArgs {
  std::string config;
  std::string board;
  int k1 = 1;
  int k2 = 1;
  int n_games = 30;
  int j = -1;
  std::uint64_t seed = 0;
  std::string easy_min = "2/3";
  std::string hard_max = "1/3";
};

int RunClassify(const ClassifyArgs& a) {
  const GameSpec spec = pipeline::LoadGameSpec(a.config);
  const Game game(spec);
  const BoardState state = ParseBoardLiteral(spec, a.board);
  game.CheckBoard(state);
  ClassifyOptions o;
  o.n_games = a.n_games;
  o.base_seed = a.seed;
  o.thresholds.easy_min = ParseFraction("easy_min", a.easy_min);
  o.thresholds.hard_max = ParseFraction("hard_max", a.hard_max);
  const HardnessRecord r = ClassifyState(game, state, a.j, a.k1, a.k2, o);
  std::cout << ToBoardLiteral(r.state) << " k1=" << r.k1 << " k2=" << r.k2
            << " p1_wins=" << r.p1_wins << " draws=" << r.draws
            << " p2_wins=" << r.p2_wins << " n=" << r.n_games
            << " label=" << ToChar(r.label) << " seed=" << r.seed << "\n";
  return 0;
}

int RunRender(const std::string& config, const std::string& board,
              std::optional<int> j, const std::string& labels) {
  const GameSpec spec = pipeline::LoadGameSpec(config);
  const BoardState state = ParseBoardLiteral(spec, board);
  Game(spec).CheckBoard(state);
  std::cout << pipeline::RenderBoard(spec, state, {j, labels});
  return 0;
}

int RunReport(const std::vector<std::string>& catalogs,
              const std::string& verify_config, bool replay) {
  std::vector<pipeline::Catalog> loaded;
  for (const std::string& path : catalogs) {
    loaded.push_back(pipeline::LoadCatalog(path));
  }
  const pipeline::Catalog catalog = pipeline::MergeCatalogs(loaded);
  std::cout << pipeline::FormatCategoryReport(
      pipeline::SummarizeCategories(catalog));
  if (verify_config.empty()) return 0;
  pipeline::Artifacts art(pipeline::LoadGameSpec(verify_config));
  const auto issues = pipeline::VerifyCatalog(catalog, art, replay);
  for (const auto& issue : issues) {
    std::cout << "verify " << issue.entry_id << ": " << issue.problem << "\n";
  }
  std::cout << "verified " << catalog.entries.size() << " entries, "
            << issues.size() << " issues\n";
  return issues.empty() ? 0 : kExitFailure;
}

struct ServeArgs {
  std::vector<std::string> catalogs;
  std::vector<std::string> games;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string journal;
  int max_depth = 3;
  int budget_ms = 10000;
  int idle_expiry_s = 3600;
  std::string cors_origin = "*";
};

symgen::http::HttpServer* g_server = nullptr;

int RunServe(const ServeArgs& a) {
  std::vector<pipeline::Catalog> loaded;
  for (const std::string& path : a.catalogs) {
    loaded.push_back(pipeline::LoadCatalog(path));
  }
  std::vector<GameSpec> games;
  for (const std::string& path : a.games) {
    games.push_back(pipeline::LoadGameSpec(path));
  }
  service::ServiceOptions o;
  o.max_bot_depth = a.max_depth;
  o.move_budget = std::chrono::milliseconds(a.budget_ms);
  o.idle_expiry = std::chrono::seconds(a.idle_expiry_s);
  o.journal = a.journal;
  o.cors_origin = a.cors_origin;
  service::Service svc(std::move(games), pipeline::MergeCatalogs(loaded), o);
  symgen::http::HttpServer server(svc);
  const int port = server.Bind(a.host, a.port);
  if (port < 0) {
    std::cerr << "symgen: cannot bind " << a.host << ":" << a.port << "\n";
    return kExitFailure;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->Stop(); });
  std::signal(SIGTERM, [](int) { g_server->Stop(); });
  std::cerr << "serving " << svc.Games().size() << " games on http://"
            << a.host << ":" << port << "\n";
  const bool ok = server.Serve();
  g_server = nullptr;
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic start-state generation for grid board games"};
  app.require_subcommand(1);

  auto add_solve_options = [](CLI::App* cmd, SolveArgs& a) {
    cmd->add_option("config", a.config, "Game config file")->required();
    cmd->add_option("--jmax", a.jmax, "Largest layer index")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--long", a.long_run, "Allow runs above the desk-scale ceiling");
    cmd->add_option("--cache", a.cache, "Artifact cache directory");
    cmd->add_flag("--verify-cache", a.verify_cache,
                  "Recompute cached artifacts and compare");
  };

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Reachable set and winning layers");
  add_solve_options(solve_cmd, solve);
  solve_cmd->add_flag("--partition", solve.partition,
                      "Also solve the whole game (win/loss/draw sets)");

  SolveArgs layers;
  CLI::App* layers_cmd = app.add_subcommand("layers", "Winning-layer sizes");
  add_solve_options(layers_cmd, layers);

  SolveArgs reach;
  CLI::App* reach_cmd = app.add_subcommand("reach-count", "Reachable-state count");
  add_solve_options(reach_cmd, reach);

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Sample and classify layer states");
  gen_cmd->add_option("config", gen.config, "Game config file")->required();
  gen_cmd->add_option("--j", gen.js, "Layer indices")->delimiter(',');
  gen_cmd->add_option("--k1", gen.k1s, "P1 depths, ascending")->delimiter(',');
  gen_cmd->add_option("--k2", gen.k2s, "Opponent depths")->delimiter(',');
  gen_cmd->add_option("--sampling", gen.sampling, "all | rand:N:SEED | b100 | bottom:K");
  gen_cmd->add_option("--seed", gen.seed, "Base seed");
  gen_cmd->add_option("--n", gen.n_games, "Games per state");
  gen_cmd->add_option("--escalate", gen.escalate,
                      "States replayed at the next depth: h | mh | none");
  gen_cmd->add_option("--easy-min", gen.easy_min, "Easy threshold");
  gen_cmd->add_option("--hard-max", gen.hard_max, "Hard threshold");
  gen_cmd->add_option("--threads", gen.threads, "Playout workers, 0 = all cores");
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->add_option("--cache", gen.cache, "Artifact cache directory");
  gen_cmd->add_flag("--long", gen.long_run, "Allow runs above the desk-scale ceiling");

  ClassifyArgs cls;
  CLI::App* cls_cmd = app.add_subcommand("classify", "Classify one board");
  cls_cmd->add_option("config", cls.config, "Game config file")->required();
  cls_cmd->add_option("--board", cls.board, "Board literal")->required();
  cls_cmd->add_option("--k1", cls.k1, "P1 depth")->required();
  cls_cmd->add_option("--k2", cls.k2, "Opponent depth")->required();
  cls_cmd->add_option("--n", cls.n_games, "Games");
  cls_cmd->add_option("--j", cls.j, "Layer index recorded with the result");
  cls_cmd->add_option("--seed", cls.seed, "Base seed");
  cls_cmd->add_option("--easy-min", cls.easy_min, "Easy threshold");
  cls_cmd->add_option("--hard-max", cls.hard_max, "Hard threshold");

  std::string render_config;
  std::string render_board;
  std::optional<int> render_j;
  std::string render_labels;
  CLI::App* render_cmd = app.add_subcommand("render", "Draw a board");
  render_cmd->add_option("config", render_config, "Game config file")->required();
  render_cmd->add_option("--board", render_board, "Board literal")->required();
  render_cmd->add_option("--j", render_j, "Layer index for the caption");
  render_cmd->add_option("--labels", render_labels, "Label text for the caption");

  std::vector<std::string> report_catalogs;
  std::string report_verify;
  bool report_replay = false;
  CLI::App* report_cmd = app.add_subcommand("report", "Category summary of catalogs");
  report_cmd->add_option("catalog", report_catalogs, "catalog.json files")
      ->required();
  report_cmd->add_option("--verify", report_verify,
                         "Game config whose entries are re-verified");
  report_cmd->add_flag("--replay", report_replay,
                       "Also reproduce every label from its seed");

  ServeArgs serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP session API");
  serve_cmd->add_option("--catalog", serve.catalogs, "catalog.json files");
  serve_cmd->add_option("--game", serve.games, "Extra game config files");
  serve_cmd->add_option("--host", serve.host, "Listen address");
  serve_cmd->add_option("--port", serve.port, "Port, 0 = any");
  serve_cmd->add_option("--journal", serve.journal, "Append-only session journal");
  serve_cmd->add_option("--max-depth", serve.max_depth, "Bot depth ceiling");
  serve_cmd->add_option("--budget-ms", serve.budget_ms, "Per-move search budget");
  serve_cmd->add_option("--idle-expiry", serve.idle_expiry_s,
                        "Seconds before an idle session is dropped");
  serve_cmd->add_option("--cors-origin", serve.cors_origin, "Allowed UI origin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*solve_cmd) return RunSolve(solve);
    if (*layers_cmd) return RunLayers(layers);
    if (*reach_cmd) return RunReachCount(reach);
    if (*gen_cmd) return RunGenerate(gen);
    if (*cls_cmd) return RunClassify(cls);
    if (*render_cmd) {
      return RunRender(render_config, render_board, render_j, render_labels);
    }
    if (*report_cmd) return RunReport(report_catalogs, report_verify, report_replay);
    if (*serve_cmd) return RunServe(serve);
  } catch (const ConfigError& e) {
    std::cerr << "symgen: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BoardError& e) {
    std::cerr << "symgen: bad board: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CeilingError& e) {
    std::cerr << "symgen: refused: " << e.what() << "\n";
    return kExitCeiling;
  } catch (const CacheError& e) {
    std::cerr << "symgen: cache mismatch: " << e.what() << "\n";
    return kExitCache;
  } catch (const std::exception& e) {
    std::cerr << "symgen: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
