#include <fstream>
#include <set>

#include "critnode/app.hpp"
#include "critnode/baselines.hpp"

namespace critnode {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw UsageError("unknown configuration key: " + where + key);
}

/// Reads j[key] into out when present.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {}

  void number(const char* key, double& out) const {
    if (auto* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void count(const char* key, std::size_t& out) const {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void integer(const char* key, int& out) const {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      out = v->get<int>();
    }
  }
  void seed(const char* key, std::uint64_t& out) const {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void flag(const char* key, bool& out) const {
    if (auto* v = find(key)) {
      if (!v->is_boolean()) fail(key, "true or false");
      out = v->get<bool>();
    }
  }
  void text(const char* key, std::string& out) const {
    if (auto* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  void optional_number(const char* key, std::optional<double>& out) const {
    if (auto* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        if (!v->is_number()) fail(key, "a number or null");
        out = v->get<double>();
      }
    }
  }
  void texts(const char* key, std::vector<std::string>& out) const {
    if (auto* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of strings");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_string()) fail(key, "an array of strings");
        out.push_back(x.get<std::string>());
      }
    }
  }

 private:
  const json* find(const char* key) const {
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw UsageError("configuration key " + where_ + key + " must be " + what);
  }

  const json& j_;
  std::string where_;
};

}  // namespace

json RunConfig::to_json() const {
  const auto& e = evolution;
  json budget = nullptr;
  if (e.time_budget_seconds) budget = *e.time_budget_seconds;
  return {
      {"graph", graph},
      {"output_dir", output_dir},
      {"epochs", e.epochs},
      {"mutation_rate", e.mutation_rate},
      {"similarity_threshold", e.similarity_threshold},
      {"population_capacity", e.population_capacity},
      {"max_populations", e.max_populations},
      {"inter_pairs", e.inter_pairs},
      {"pool_parents", e.pool_parents},
      {"removal_fraction", e.removal_fraction},
      {"fitness_mode", e.fitness_mode == FitnessMode::anc ? "anc" : "terminal"},
      {"operator", op == OperatorKind::mock ? "mock" : "llm"},
      {"master_seed", e.master_seed},
      {"no_manual_init", e.no_manual_init},
      {"no_population_mgmt", e.no_population_mgmt},
      {"single_epoch", e.single_epoch},
      {"time_budget_seconds", budget},
      {"threads", e.threads},
      {"prompts_dir", prompts_dir},
      {"baselines", baselines},
      {"llm",
       {{"base_url", llm.base_url},
        {"model", llm.model},
        {"temperature_crossover", llm.temperature_crossover},
        {"temperature_mutation", llm.temperature_mutation},
        {"api_key_env", llm.api_key_env},
        {"timeout_seconds", llm.timeout_seconds},
        {"max_retries", llm.max_retries},
        {"backoff_seconds", llm.backoff_seconds},
        {"parallelism", llm.parallelism},
        {"max_offspring", llm.max_offspring},
        {"mock_fallback", llm.mock_fallback},
        {"transcripts_dir", llm.transcripts_dir.string()}}},
  };
}

RunConfig RunConfig::from_json(const json& j) {
  static const std::set<std::string> top{
      "graph",          "output_dir",     "epochs",          "mutation_rate",
      "similarity_threshold", "population_capacity", "max_populations", "inter_pairs",
      "pool_parents",   "removal_fraction", "fitness_mode",  "operator",
      "master_seed",    "no_manual_init", "no_population_mgmt", "single_epoch",
      "time_budget_seconds", "threads",   "prompts_dir",     "baselines",
      "llm"};
  static const std::set<std::string> llm_keys{
      "base_url",    "model",         "temperature_crossover", "temperature_mutation",
      "api_key_env", "timeout_seconds", "max_retries",         "backoff_seconds",
      "parallelism", "max_offspring", "mock_fallback",         "transcripts_dir"};
  reject_unknown(j, top, "");

  RunConfig c;
  auto& e = c.evolution;
  Reader r(j, "");
  r.text("graph", c.graph);
  r.text("output_dir", c.output_dir);
  r.integer("epochs", e.epochs);
  r.number("mutation_rate", e.mutation_rate);
  r.number("similarity_threshold", e.similarity_threshold);
  r.count("population_capacity", e.population_capacity);
  r.count("max_populations", e.max_populations);
  r.count("inter_pairs", e.inter_pairs);
  r.count("pool_parents", e.pool_parents);
  r.number("removal_fraction", e.removal_fraction);
  std::string mode = "anc", op = "mock";
  r.text("fitness_mode", mode);
  r.text("operator", op);
  if (mode != "anc" && mode != "terminal") throw UsageError("fitness_mode must be anc or terminal");
  if (op != "mock" && op != "llm") throw UsageError("operator must be mock or llm");
  e.fitness_mode = mode == "anc" ? FitnessMode::anc : FitnessMode::terminal;
  c.op = op == "mock" ? OperatorKind::mock : OperatorKind::llm;
  r.seed("master_seed", e.master_seed);
  r.flag("no_manual_init", e.no_manual_init);
  r.flag("no_population_mgmt", e.no_population_mgmt);
  r.flag("single_epoch", e.single_epoch);
  r.optional_number("time_budget_seconds", e.time_budget_seconds);
  r.count("threads", e.threads);
  r.text("prompts_dir", c.prompts_dir);
  r.texts("baselines", c.baselines);

  if (auto it = j.find("llm"); it != j.end()) {
    reject_unknown(*it, llm_keys, "llm.");
    Reader l(*it, "llm.");
    l.text("base_url", c.llm.base_url);
    l.text("model", c.llm.model);
    l.number("temperature_crossover", c.llm.temperature_crossover);
    l.number("temperature_mutation", c.llm.temperature_mutation);
    l.text("api_key_env", c.llm.api_key_env);
    l.number("timeout_seconds", c.llm.timeout_seconds);
    l.integer("max_retries", c.llm.max_retries);
    l.number("backoff_seconds", c.llm.backoff_seconds);
    l.count("parallelism", c.llm.parallelism);
    l.count("max_offspring", c.llm.max_offspring);
    l.flag("mock_fallback", c.llm.mock_fallback);
    std::string transcripts;
    l.text("transcripts_dir", transcripts);
    c.llm.transcripts_dir = transcripts;
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  try {
    evolution.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (llm.temperature_crossover < 0 || llm.temperature_mutation < 0)
    throw UsageError("llm temperatures must be non-negative");
  if (llm.timeout_seconds <= 0) throw UsageError("llm.timeout_seconds must be positive");
  if (llm.max_retries < 0) throw UsageError("llm.max_retries must be non-negative");
  if (llm.backoff_seconds < 0) throw UsageError("llm.backoff_seconds must be non-negative");
  if (llm.parallelism < 1) throw UsageError("llm.parallelism must be at least 1");
  if (llm.max_offspring < 1) throw UsageError("llm.max_offspring must be at least 1");
  for (const auto& b : baselines)
    if (!parse_baseline_kind(b)) throw UsageError("unknown baseline: " + b);
}

}  // namespace critnode
