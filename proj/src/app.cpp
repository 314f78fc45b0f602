#include "critnode/app.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "critnode/baselines.hpp"
#include "critnode/evaluate.hpp"

namespace critnode {

using nlohmann::json;
namespace fs = std::filesystem;

json CompareReport::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) rows_json.push_back({{"name", r.name}, {"anc", r.anc}, {"rank", r.rank}});
  return {{"graph", {{"nodes", nodes}, {"edges", edges}}}, {"fraction", fraction}, {"methods", rows_json}};
}

std::string CompareReport::table() const {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::ostringstream os;
  os << "graph: " << nodes << " nodes, " << edges << " edges, fraction "
     << dsl::format_number(fraction) << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %9s  %4s\n", static_cast<int>(width), "method", "anc", "rank");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-*s  %9.5f  %4zu\n", static_cast<int>(width), r.name.c_str(),
                  r.anc, r.rank);
    os << line;
  }
  return os.str();
}

void assign_ranks(std::vector<CompareRow>& rows) {
  for (auto& r : rows) {
    r.rank = 1;
    for (const auto& other : rows)
      if (other.anc < r.anc) ++r.rank;
  }
}

namespace {

AncCurve dismantle_with(const Graph& g, const std::string& method, const dsl::Expr* expr,
                        double fraction, std::uint64_t seed, RemovalList* removal_out = nullptr) {
  RemovalList removal;
  if (method == "expr") {
    if (!expr) throw UsageError("--method expr needs --expr-file");
    removal = top_l_by_score(evaluate(*expr, g), removal_count(g.node_count(), fraction));
  } else {
    const auto kind = parse_baseline_kind(method);
    if (!kind) throw UsageError("unknown method: " + method);
    removal = run_baseline(BaselineStrategy(*kind, seed), g, fraction).removal;
  }
  AncCurve curve = anc(g, removal);
  if (removal_out) *removal_out = std::move(removal);
  return curve;
}

}  // namespace

CompareReport compare(const Graph& g, const std::vector<std::string>& methods,
                      const std::optional<dsl::Expr>& expr, double fraction, std::uint64_t seed) {
  if (methods.empty() && !expr) throw UsageError("compare needs at least one method");
  CompareReport report;
  report.nodes = g.node_count();
  report.edges = g.edge_count();
  report.fraction = fraction;
  for (const auto& m : methods) {
    if (m == "expr") throw UsageError("use --expr-file to compare an expression");
    report.rows.push_back({m, dismantle_with(g, m, nullptr, fraction, seed).value(), 0});
  }
  if (expr) report.rows.push_back({"evolved", dismantle_with(g, "expr", &*expr, fraction, seed).value(), 0});
  assign_ranks(report.rows);
  return report;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Graph load_graph(const std::string& path) {
  if (path.empty()) throw UsageError("--graph is required");
  if (!fs::is_regular_file(path)) throw UsageError("graph file not found: " + path);
  return load_edge_list_file(path);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) throw UsageError("--fraction must lie in (0, 1)");
}

/// Flags for evolve; each is applied over the config file only when given.
struct EvolveFlags {
  std::string config, graph, out, op, fitness_mode, prompts_dir;
  std::uint64_t seed = 0;
  int epochs = 0;
  double mutation_rate = 0, threshold = 0, fraction = 0, time_budget = 0;
  std::size_t capacity = 0, max_populations = 0, threads = 0;
  bool no_manual_init = false, no_population_mgmt = false, single_epoch = false;
  std::string llm_model, llm_base_url, llm_key_env, transcripts;
  std::size_t llm_parallelism = 0;
  bool mock_fallback = false;
};

int do_evolve(CLI::App& cmd, const EvolveFlags& f, std::ostream& out) {
  RunConfig c = f.config.empty() ? RunConfig{} : RunConfig::load(f.config);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  auto& e = c.evolution;
  if (given("--graph")) c.graph = f.graph;
  if (given("--out")) c.output_dir = f.out;
  if (given("--operator")) c.op = f.op == "llm" ? OperatorKind::llm : OperatorKind::mock;
  if (given("--seed")) e.master_seed = f.seed;
  if (given("--epochs")) e.epochs = f.epochs;
  if (given("--mutation-rate")) e.mutation_rate = f.mutation_rate;
  if (given("--threshold")) e.similarity_threshold = f.threshold;
  if (given("--capacity")) e.population_capacity = f.capacity;
  if (given("--max-populations")) e.max_populations = f.max_populations;
  if (given("--fraction")) e.removal_fraction = f.fraction;
  if (given("--fitness-mode")) e.fitness_mode = f.fitness_mode == "terminal" ? FitnessMode::terminal : FitnessMode::anc;
  if (given("--no-manual-init")) e.no_manual_init = true;
  if (given("--no-population-mgmt")) e.no_population_mgmt = true;
  if (given("--single-epoch")) e.single_epoch = true;
  if (given("--time-budget")) e.time_budget_seconds = f.time_budget;
  if (given("--threads")) e.threads = f.threads;
  if (given("--prompts-dir")) c.prompts_dir = f.prompts_dir;
  if (given("--llm-model")) c.llm.model = f.llm_model;
  if (given("--llm-base-url")) c.llm.base_url = f.llm_base_url;
  if (given("--llm-key-env")) c.llm.api_key_env = f.llm_key_env;
  if (given("--llm-parallelism")) c.llm.parallelism = f.llm_parallelism;
  if (given("--llm-mock-fallback")) c.llm.mock_fallback = true;
  if (given("--transcripts")) c.llm.transcripts_dir = f.transcripts;
  c.validate();

  std::unique_ptr<VariationOperator> op;
  if (c.op == OperatorKind::llm) {
    const char* key = std::getenv(c.llm.api_key_env.c_str());
    if (!key || !*key) throw UsageError("environment variable " + c.llm.api_key_env + " is not set");
    auto templates = c.prompts_dir.empty() ? PromptTemplates::defaults() : PromptTemplates::load(c.prompts_dir);
    op = std::make_unique<LlmOperator>(std::make_shared<LlmClient>(c.llm, key), std::move(templates));
  } else {
    op = std::make_unique<MockOperator>();
  }

  const Graph g = load_graph(c.graph);
  RunDirectory dir(c.output_dir, c.to_json());
  const RunResult r = run(g, e, *op, [&](const EpochRecord& rec) { dir.append(rec); });
  dir.finish(r);
  out << dsl::print_canonical(r.best.expr) << '\n'
      << "fitness " << dsl::format_number(r.best.fitness) << '\n'
      << "wrote " << c.output_dir << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evolutionary search for node-scoring functions that dismantle networks."};
  app.require_subcommand(1);

  EvolveFlags ev;
  auto* evolve = app.add_subcommand("evolve", "evolve scoring functions on a graph");
  evolve->add_option("--config", ev.config, "JSON run configuration; flags override it");
  evolve->add_option("--graph", ev.graph, "edge list file");
  evolve->add_option("--out", ev.out, "run directory (default run)");
  evolve->add_option("--operator", ev.op, "mock or llm")->check(CLI::IsMember({"mock", "llm"}));
  evolve->add_option("--seed", ev.seed, "master seed");
  evolve->add_option("--epochs", ev.epochs, "number of epochs");
  evolve->add_option("--mutation-rate", ev.mutation_rate, "probability an offspring is mutated");
  evolve->add_option("--threshold", ev.threshold, "centroid similarity threshold");
  evolve->add_option("--capacity", ev.capacity, "population capacity");
  evolve->add_option("--max-populations", ev.max_populations, "population limit");
  evolve->add_option("--fraction", ev.fraction, "removal budget as a fraction of nodes");
  evolve->add_option("--fitness-mode", ev.fitness_mode, "anc or terminal")
      ->check(CLI::IsMember({"anc", "terminal"}));
  evolve->add_flag("--no-manual-init", ev.no_manual_init, "start from random functions");
  evolve->add_flag("--no-population-mgmt", ev.no_population_mgmt, "one unbounded pool");
  evolve->add_flag("--single-epoch", ev.single_epoch, "one round of variation only");
  evolve->add_option("--time-budget", ev.time_budget, "seconds before no new epoch starts");
  evolve->add_option("--threads", ev.threads, "evaluation threads (0 = all cores)");
  evolve->add_option("--prompts-dir", ev.prompts_dir, "directory with crossover.txt and mutation.txt");
  evolve->add_option("--llm-model", ev.llm_model, "chat model name");
  evolve->add_option("--llm-base-url", ev.llm_base_url, "chat-completion endpoint base");
  evolve->add_option("--llm-key-env", ev.llm_key_env, "environment variable holding the API key");
  evolve->add_option("--llm-parallelism", ev.llm_parallelism, "concurrent requests");
  evolve->add_flag("--llm-mock-fallback", ev.mock_fallback, "use the mock operator when a call fails");
  evolve->add_option("--transcripts", ev.transcripts, "directory for request/response logs");

  std::string d_graph, d_method, d_expr_file, d_out = "out";
  double d_fraction = 0.2;
  std::uint64_t d_seed = 0;
  auto* dismantle = app.add_subcommand("dismantle", "remove nodes with one method and report ANC");
  dismantle->add_option("--graph", d_graph, "edge list file")->required();
  dismantle->add_option("--method", d_method, "dc, corehd, wn or expr")
      ->required()
      ->check(CLI::IsMember({"dc", "corehd", "wn", "expr"}));
  dismantle->add_option("--expr-file", d_expr_file, "scoring function for --method expr");
  dismantle->add_option("--fraction", d_fraction, "removal budget (default 0.2)");
  dismantle->add_option("--seed", d_seed, "tie-break seed for corehd and wn");
  dismantle->add_option("--out", d_out, "output directory (default out)");

  std::string c_graph, c_methods = "dc,corehd,wn", c_expr_file, c_out = "compare";
  double c_fraction = 0.2;
  std::uint64_t c_seed = 0;
  auto* cmp = app.add_subcommand("compare", "rank several methods by ANC");
  cmp->add_option("--graph", c_graph, "edge list file")->required();
  cmp->add_option("--methods", c_methods, "comma-separated baselines (default dc,corehd,wn)");
  cmp->add_option("--expr-file", c_expr_file, "adds an \"evolved\" row");
  cmp->add_option("--fraction", c_fraction, "removal budget (default 0.2)");
  cmp->add_option("--seed", c_seed, "tie-break seed for corehd and wn");
  cmp->add_option("--out", c_out, "output directory (default compare)");

  std::size_t s_n = 0, s_m = 0;
  std::uint64_t s_seed = 0;
  std::string s_out = "ba.txt";
  auto* synth = app.add_subcommand("synth", "write a Barabási–Albert edge list");
  synth->add_option("--n", s_n, "node count")->required();
  synth->add_option("--m", s_m, "edges per new node")->required();
  synth->add_option("--seed", s_seed, "generator seed");
  synth->add_option("--out", s_out, "edge list path (default ba.txt)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*evolve) return do_evolve(*evolve, ev, out);

    if (*dismantle) {
      check_fraction(d_fraction);
      std::optional<dsl::Expr> expr;
      if (d_method == "expr") {
        if (d_expr_file.empty()) throw UsageError("--method expr needs --expr-file");
        expr = dsl::parse(read_file(d_expr_file));
      }
      const Graph g = load_graph(d_graph);
      RemovalList removal;
      const AncCurve curve = dismantle_with(g, d_method, expr ? &*expr : nullptr, d_fraction, d_seed, &removal);
      fs::create_directories(d_out);
      std::ofstream removal_file(fs::path(d_out) / "removal.txt");
      write_removal_list(removal_file, g, removal);
      std::ofstream csv(fs::path(d_out) / "anc.csv");
      write_anc_csv(csv, curve);
      json cfg{{"graph", d_graph}, {"method", d_method}, {"fraction", d_fraction},
               {"seed", d_seed},   {"out", d_out},       {"removals", removal.size()}};
      if (expr) cfg["expr"] = dsl::print_canonical(*expr);
      write_json(fs::path(d_out) / "config.json", cfg);
      out << "anc " << dsl::format_number(curve.value()) << '\n';
      return 0;
    }

    if (*cmp) {
      check_fraction(c_fraction);
      std::vector<std::string> methods;
      std::stringstream ss(c_methods);
      for (std::string m; std::getline(ss, m, ',');)
        if (!m.empty()) methods.push_back(m);
      if (methods.empty()) throw UsageError("--methods is empty");
      for (const auto& m : methods)
        if (!parse_baseline_kind(m)) throw UsageError("unknown method: " + m);
      std::optional<dsl::Expr> expr;
      if (!c_expr_file.empty()) expr = dsl::parse(read_file(c_expr_file));
      const Graph g = load_graph(c_graph);
      const CompareReport report = compare(g, methods, expr, c_fraction, c_seed);
      fs::create_directories(c_out);
      write_json(fs::path(c_out) / "compare.json", report.to_json());
      json cfg{{"graph", c_graph}, {"methods", methods}, {"fraction", c_fraction},
               {"seed", c_seed},   {"out", c_out}};
      if (expr) cfg["expr"] = dsl::print_canonical(*expr);
      write_json(fs::path(c_out) / "config.json", cfg);
      out << report.table();
      return 0;
    }

    if (*synth) {
      if (s_m < 1 || s_n <= s_m) throw UsageError("synth needs n > m >= 1");
      const Graph g = generate_ba(s_n, s_m, s_seed);
      if (const auto parent = fs::path(s_out).parent_path(); !parent.empty()) fs::create_directories(parent);
      std::ofstream file(s_out);
      if (!file) throw std::runtime_error("cannot write " + s_out);
      write_edge_list(file, g);
      write_json(s_out + ".config.json", {{"n", s_n}, {"m", s_m}, {"seed", s_seed}, {"out", s_out}});
      out << "wrote " << s_out << " (" << g.node_count() << " nodes, " << g.edge_count() << " edges)\n";
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const dsl::DslError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const GraphParseError& e) {
    err << "error: graph file: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace critnode
