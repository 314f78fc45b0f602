#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "critnode/dismantle.hpp"
#include "critnode/graph.hpp"
#include "critnode/population.hpp"
#include "critnode/variation.hpp"

namespace critnode {

struct EvolutionConfig {
  int epochs = 100;
  double mutation_rate = 0.3;
  double similarity_threshold = 0.93;
  std::size_t population_capacity = 10;
  std::size_t max_populations = 32;
  std::size_t inter_pairs = 1;
  /// Parents drawn per round when population management is off.
  std::size_t pool_parents = 12;
  double removal_fraction = 0.2;
  FitnessMode fitness_mode = FitnessMode::anc;
  std::uint64_t master_seed = 0;
  bool no_manual_init = false;
  bool no_population_mgmt = false;
  bool single_epoch = false;
  /// Stop starting new epochs once this many seconds have passed.
  std::optional<double> time_budget_seconds;
  /// Fitness evaluation threads; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct PopulationStats {
  std::size_t id = 0;
  std::size_t size = 0;
  double mean_fitness = 0.0;
  double max_fitness = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  std::vector<PopulationStats> populations;
  /// Candidates evaluated and classified this epoch.
  std::size_t generated = 0;
  /// Placed into a population (inserted, replaced or founded one).
  std::size_t accepted = 0;
  /// Turned away by a full population.
  std::size_t discarded = 0;
  std::size_t evicted = 0;
  /// Operator outputs that failed validation while producing this epoch's
  /// candidates.
  std::size_t invalid = 0;
  double best_fitness = 0.0;
  std::string best_expr;
};

nlohmann::json to_json(const EpochRecord& r);

struct RunResult {
  Individual best;
  std::vector<EpochRecord> records;
  PopulationSet populations;
  /// Best fitness among the epoch 0 functions.
  double best_initial_fitness = 0.0;
};

using RecordCallback = std::function<void(const EpochRecord&)>;

/// Evolves scoring functions on g. Epoch 0 evaluates the seed functions;
/// every later epoch evaluates and classifies the offspring produced at the
/// end of the previous one. Deterministic in cfg.master_seed whenever the
/// operator is. Throws std::invalid_argument if g has no edges.
RunResult run(const Graph& g, const EvolutionConfig& cfg, VariationOperator& op,
              const RecordCallback& on_record = {});

/// Long-format telemetry, one CSV per statistic with header
/// `epoch,population_id,value`. Populations that do not exist yet in an
/// epoch have no rows.
struct TelemetryTables {
  std::string size;
  std::string mean_fitness;
  std::string max_fitness;
};
TelemetryTables export_telemetry(const std::vector<EpochRecord>& records);

/// Writes config.json up front, appends one run.jsonl line per record, and
/// on finish() writes best.dsl, the telemetry CSVs and populations.json.
class RunDirectory {
 public:
  RunDirectory(const std::filesystem::path& dir, const nlohmann::json& resolved_config);

  void append(const EpochRecord& r);
  void finish(const RunResult& result);

  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::ofstream log_;
};

}  // namespace critnode
