#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "critnode/engine.hpp"
#include "critnode/variation.hpp"

namespace critnode {

/// Bad arguments, configuration or input files. Maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OperatorKind { mock, llm };

struct RunConfig {
  std::string graph;
  std::string output_dir = "run";
  EvolutionConfig evolution;
  OperatorKind op = OperatorKind::mock;
  LlmEndpointConfig llm;
  /// Empty selects the built-in templates.
  std::string prompts_dir;
  std::vector<std::string> baselines{"dc", "corehd", "wn"};

  /// Every field, defaults included.
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys and wrong types throw
  /// UsageError. The result is validated.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  void validate() const;
};

struct CompareRow {
  std::string name;
  double anc = 0.0;
  std::size_t rank = 0;
};

struct CompareReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double fraction = 0.2;
  std::vector<CompareRow> rows;

  nlohmann::json to_json() const;
  std::string table() const;
};

/// Competition ranking by ascending ANC: equal values share the smaller rank.
void assign_ranks(std::vector<CompareRow>& rows);

/// ANC of each baseline, plus an "evolved" row when expr is given.
CompareReport compare(const Graph& g, const std::vector<std::string>& methods,
                      const std::optional<dsl::Expr>& expr, double fraction, std::uint64_t seed);

/// The command-line front end: subcommands evolve, dismantle, compare and
/// synth. Returns the process exit status (0 ok, 2 usage or configuration
/// error, 1 runtime failure).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace critnode
