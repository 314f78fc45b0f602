#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "critnode/app.hpp"
#include "critnode/baselines.hpp"

using namespace critnode;
namespace fs = std::filesystem;

namespace {

struct Cli {
  int status = 0;
  std::string out, err;
};

Cli cli(std::vector<std::string> args) {
  args.insert(args.begin(), "critnode");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Cli r;
  r.status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh scratch directory, removed on scope exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

}  // namespace

TEST_CASE("run config round trip") {
  RunConfig c;
  c.graph = "g.txt";
  c.evolution.epochs = 7;
  c.evolution.master_seed = 12345678901234ull;
  c.evolution.time_budget_seconds = 2.5;
  c.evolution.fitness_mode = FitnessMode::terminal;
  c.op = OperatorKind::llm;
  c.llm.model = "m";
  c.llm.transcripts_dir = "logs";
  c.baselines = {"wn"};
  const auto j = c.to_json();
  const RunConfig back = RunConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.evolution.master_seed == 12345678901234ull);
  CHECK(*back.evolution.time_budget_seconds == 2.5);

  // Defaults fill in for absent keys; a null budget means none.
  const RunConfig partial = RunConfig::from_json({{"epochs", 3}, {"time_budget_seconds", nullptr}});
  CHECK(partial.evolution.epochs == 3);
  CHECK_FALSE(partial.evolution.time_budget_seconds);
  CHECK(partial.evolution.mutation_rate == RunConfig{}.evolution.mutation_rate);
}

TEST_CASE("run config rejects unknown keys, bad types and bad values") {
  CHECK_THROWS_AS(RunConfig::from_json({{"epoch", 3}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json({{"llm", {{"modle", "x"}}}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json({{"epochs", "3"}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json({{"population_capacity", -1}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json({{"operator", "gpt"}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json({{"mutation_rate", 2.0}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json({{"baselines", {"dc", "pagerank"}}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::array()), UsageError);
}

TEST_CASE("ranks follow an independent sort of the anc column") {
  std::vector<CompareRow> rows{{"a", 0.5, 0}, {"b", 0.25, 0}, {"c", 0.5, 0}, {"d", 0.75, 0}, {"e", 0.25, 0}};
  assign_ranks(rows);
  std::vector<double> sorted;
  for (const auto& r : rows) sorted.push_back(r.anc);
  std::sort(sorted.begin(), sorted.end());
  for (const auto& r : rows) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), r.anc) - sorted.begin();
    CHECK(r.rank == static_cast<std::size_t>(first) + 1);
  }
  CHECK(rows[1].rank == 1);
  CHECK(rows[0].rank == 3);
  CHECK(rows[3].rank == 5);
}

TEST_CASE("compare on a synthetic graph") {
  const Graph g = generate_ba(150, 3, 4);
  const auto expr = dsl::parse("degree");
  const auto report = compare(g, {"dc", "corehd", "wn"}, expr, 0.2, 0);
  REQUIRE(report.rows.size() == 4);
  CHECK(report.rows.back().name == "evolved");
  CHECK(report.nodes == 150);
  CHECK(report.edges == g.edge_count());
  CHECK(report.rows[0].anc == run_baseline(BaselineStrategy(BaselineKind::dc), g, 0.2).curve.value());
  const auto j = report.to_json();
  CHECK(j["methods"].size() == 4);
  CHECK(report.table().find("evolved") != std::string::npos);
  CHECK_THROWS_AS(compare(g, {}, std::nullopt, 0.2, 0), UsageError);
}

TEST_CASE("synth is deterministic and validates n > m") {
  Scratch s("critnode_app_synth");
  REQUIRE(cli({"synth", "--n", "1000", "--m", "3", "--seed", "42", "--out", s / "a.txt"}).status == 0);
  REQUIRE(cli({"synth", "--n", "1000", "--m", "3", "--seed", "42", "--out", s / "b.txt"}).status == 0);
  REQUIRE(cli({"synth", "--n", "1000", "--m", "3", "--seed", "43", "--out", s / "c.txt"}).status == 0);
  CHECK(slurp(s / "a.txt") == slurp(s / "b.txt"));
  CHECK(slurp(s / "a.txt") != slurp(s / "c.txt"));
  CHECK(load_edge_list_file(s / "a.txt").node_count() == 1000);
  CHECK(nlohmann::json::parse(slurp(s / "a.txt.config.json"))["seed"] == 42);
  CHECK(cli({"synth", "--n", "2", "--m", "3", "--out", s / "d.txt"}).status == 2);
  CHECK_FALSE(fs::exists(s / "d.txt"));
}

TEST_CASE("dismantle writes the removal list, curve and config") {
  Scratch s("critnode_app_dismantle");
  REQUIRE(cli({"synth", "--n", "120", "--m", "2", "--seed", "1", "--out", s / "g.txt"}).status == 0);
  const Graph g = load_edge_list_file(s / "g.txt");

  auto r = cli({"dismantle", "--graph", s / "g.txt", "--method", "dc", "--out", s / "dc"});
  REQUIRE(r.status == 0);
  const double expected = run_baseline(BaselineStrategy(BaselineKind::dc), g, 0.2).curve.value();
  CHECK(r.out == "anc " + dsl::format_number(expected) + "\n");
  std::istringstream removal(slurp(s / "dc/removal.txt"));
  std::size_t lines = 0;
  for (std::string line; std::getline(removal, line);) ++lines;
  CHECK(lines == removal_count(120, 0.2));
  CHECK(slurp(s / "dc/anc.csv").rfind("k,sigma_ratio\n", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(s / "dc/config.json"))["method"] == "dc");

  std::ofstream(s / "f.dsl") << "degree\n";
  r = cli({"dismantle", "--graph", s / "g.txt", "--method", "expr", "--expr-file", s / "f.dsl", "--out", s / "e"});
  REQUIRE(r.status == 0);
  CHECK(r.out == "anc " + dsl::format_number(1.0 - fitness(g, dsl::parse("degree"), 0.2)) + "\n");

  CHECK(cli({"dismantle", "--graph", s / "g.txt", "--method", "dc", "--fraction", "1.5"}).status == 2);
  CHECK(cli({"dismantle", "--graph", s / "g.txt", "--method", "expr"}).status == 2);
  CHECK(cli({"dismantle", "--graph", s / "g.txt", "--method", "pagerank"}).status == 2);
  CHECK(cli({"dismantle", "--graph", s / "missing.txt", "--method", "dc"}).status == 2);
  std::ofstream(s / "bad.dsl") << "degree +\n";
  CHECK(cli({"dismantle", "--graph", s / "g.txt", "--method", "expr", "--expr-file", s / "bad.dsl"}).status == 2);
}

TEST_CASE("compare subcommand") {
  Scratch s("critnode_app_compare");
  REQUIRE(cli({"synth", "--n", "100", "--m", "3", "--seed", "2", "--out", s / "g.txt"}).status == 0);
  std::ofstream(s / "f.dsl") << "coreness\n";
  auto r = cli({"compare", "--graph", s / "g.txt", "--expr-file", s / "f.dsl", "--out", s / "c"});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(slurp(s / "c/compare.json"));
  REQUIRE(j["methods"].size() == 4);
  CHECK(j["methods"][3]["name"] == "evolved");
  CHECK(fs::exists(s / "c/config.json"));
  CHECK(cli({"compare", "--graph", s / "g.txt", "--methods", ""}).status == 2);
  CHECK(cli({"compare", "--graph", s / "g.txt", "--methods", "dc,nope"}).status == 2);
}

TEST_CASE("evolve writes a reproducible run directory") {
  Scratch s("critnode_app_evolve");
  REQUIRE(cli({"synth", "--n", "80", "--m", "3", "--seed", "3", "--out", s / "g.txt"}).status == 0);
  auto r = cli({"evolve", "--graph", s / "g.txt", "--operator", "mock", "--seed", "1", "--epochs", "4",
                "--out", s / "run"});
  REQUIRE(r.status == 0);
  const auto best = dsl::parse(slurp(s / "run/best.dsl"));
  CHECK(r.out.rfind(dsl::print_canonical(best) + "\n", 0) == 0);

  // The resolved config alone reproduces the run.
  const auto cfg = nlohmann::json::parse(slurp(s / "run/config.json"));
  CHECK(cfg["epochs"] == 4);
  CHECK(cfg["master_seed"] == 1);
  REQUIRE(cli({"evolve", "--config", s / "run/config.json", "--out", s / "again"}).status == 0);
  CHECK(slurp(s / "run/run.jsonl") == slurp(s / "again/run.jsonl"));

  CHECK(cli({"evolve", "--graph", s / "missing.txt"}).status == 2);
  CHECK(cli({"evolve", "--graph", s / "g.txt", "--epochs", "0"}).status == 2);
  CHECK(cli({"evolve", "--graph", s / "g.txt", "--operator", "oracle"}).status == 2);
  std::ofstream(s / "bad.json") << R"({"epochs": 2, "colour": 1})";
  CHECK(cli({"evolve", "--config", s / "bad.json", "--graph", s / "g.txt"}).status == 2);
}

TEST_CASE("llm operator without a key fails before any network call") {
  Scratch s("critnode_app_llm");
  REQUIRE(cli({"synth", "--n", "50", "--m", "2", "--out", s / "g.txt"}).status == 0);
  const char* var = "CRITNODE_TEST_UNSET_KEY";
  unsetenv(var);
  // An unroutable endpoint: reaching the network would fail with status 1.
  auto r = cli({"evolve", "--graph", s / "g.txt", "--operator", "llm", "--llm-key-env", var,
                "--llm-base-url", "http://127.0.0.1:9/v1", "--out", s / "run"});
  CHECK(r.status == 2);
  CHECK(r.err.find(var) != std::string::npos);
  CHECK_FALSE(fs::exists(s / "run"));
}

TEST_CASE("usage errors") {
  CHECK(cli({}).status == 2);
  CHECK(cli({"frobnicate"}).status == 2);
  CHECK(cli({"dismantle", "--method", "dc"}).status == 2);
  CHECK(cli({"--help"}).status == 0);
}
