#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "critnode/dsl.hpp"
#include "critnode/graph.hpp"

namespace critnode {

struct PromptTemplates {
  /// Placeholders: {{parents}}, {{count}}.
  std::string crossover;
  /// Placeholder: {{function}}.
  std::string mutation;

  /// The templates shipped in prompts/, compiled in.
  static PromptTemplates defaults();
  /// Reads crossover.txt and mutation.txt from dir.
  static PromptTemplates load(const std::filesystem::path& dir);
};

/// Substitutes {{name}} placeholders. Throws std::invalid_argument on a
/// placeholder without a value.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Template text with the placeholders cut out.
std::string instruction_text(std::string_view tmpl);

/// Contents of every ``` fenced block, in order. A language tag on the
/// opening fence line is dropped.
std::vector<std::string> extract_code_blocks(std::string_view text);

struct Rejection {
  std::string raw;
  /// A DSL error kind name, or one of no_code_block, probe_failure,
  /// transport_error.
  std::string kind;
  std::string message;
};

/// Fixed 10-vertex irregular test graph used for dry runs.
const Graph& probe_graph();

/// Parse, bounds check, and a dry run on the probe graph.
std::variant<dsl::Expr, Rejection> validate_offspring(std::string_view raw);

struct VariationReport {
  std::size_t requested = 0;
  std::size_t parsed_ok = 0;
  std::vector<Rejection> discarded;
  std::vector<dsl::Expr> accepted;
  /// LLM calls that failed and were served by the fallback operator.
  std::size_t fallbacks = 0;

  void accept(dsl::Expr e) {
    accepted.push_back(std::move(e));
    parsed_ok = accepted.size();
  }
  void merge(VariationReport other);
};

struct Parent {
  dsl::Expr expr;
  double fitness = 0.0;
};

class VariationOperator {
 public:
  virtual ~VariationOperator() = default;
  /// Offspring from a parent group of at least two.
  virtual VariationReport crossover(std::span<const Parent> parents, std::uint64_t seed) = 0;
  /// At most one accepted variant.
  virtual VariationReport mutate(const dsl::Expr& e, std::uint64_t seed) = 0;
  /// How many calls the caller may run at once.
  virtual std::size_t max_concurrency() const = 0;
};

/// Seeded tree edits. Pure: results depend only on the arguments.
class MockOperator : public VariationOperator {
 public:
  static constexpr int kMaxAttempts = 5;

  explicit MockOperator(std::size_t max_offspring_per_pair = 2)
      : max_offspring_(max_offspring_per_pair) {}

  /// For each adjacent pair: a homologous subtree exchange and the blend
  /// normalize(p1) + normalize(p2).
  VariationReport crossover(std::span<const Parent> parents, std::uint64_t seed) override;
  /// One point edit: swap a metric, scale a constant by [0.5, 2], wrap a
  /// subtree in a unary op, unwrap a unary op, or swap a binary op.
  VariationReport mutate(const dsl::Expr& e, std::uint64_t seed) override;
  std::size_t max_concurrency() const override { return 0; }

 private:
  std::size_t max_offspring_;
};

struct LlmEndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo-0613";
  double temperature_crossover = 1.0;
  double temperature_mutation = 1.5;
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_seconds = 60.0;
  int max_retries = 3;
  double backoff_seconds = 1.0;
  std::size_t parallelism = 4;
  std::size_t max_offspring = 2;
  bool mock_fallback = false;
  std::filesystem::path transcripts_dir;
};

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimal chat-completion client.
class LlmClient {
 public:
  /// Throws LlmError if the API key variable is unset or the URL is malformed.
  explicit LlmClient(LlmEndpointConfig config);
  LlmClient(LlmEndpointConfig config, std::string api_key);

  /// One user message in, the first choice's text out. Retries transport
  /// failures, 429 and 5xx with exponential backoff; throws LlmError when
  /// retries run out or on any other HTTP error.
  std::string complete(const std::string& prompt, double temperature);

  const LlmEndpointConfig& config() const { return config_; }

 private:
  void log_transcript(const std::string& request, const std::string& response);

  LlmEndpointConfig config_;
  std::string api_key_;
  std::string origin_;
  std::string path_prefix_;
  std::atomic<std::uint64_t> calls_{0};
};

class LlmOperator : public VariationOperator {
 public:
  LlmOperator(std::shared_ptr<LlmClient> client, PromptTemplates templates);

  VariationReport crossover(std::span<const Parent> parents, std::uint64_t seed) override;
  VariationReport mutate(const dsl::Expr& e, std::uint64_t seed) override;
  std::size_t max_concurrency() const override { return client_->config().parallelism; }

  std::string crossover_prompt(std::span<const Parent> parents) const;
  std::string mutation_prompt(const dsl::Expr& e) const;

 private:
  std::shared_ptr<LlmClient> client_;
  PromptTemplates templates_;
  MockOperator fallback_;
};

}  // namespace critnode
