#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "critnode/dsl.hpp"
#include "critnode/rng.hpp"

namespace critnode {

enum class Origin { initial, crossover, mutation };
std::string_view name(Origin origin);

inline constexpr std::size_t kEmbeddingDim = 24;
using Embedding = std::array<double, kEmbeddingDim>;

struct Individual {
  dsl::Expr expr;
  double fitness = 0.0;
  Embedding embedding{};
  std::uint64_t id = 0;
  std::vector<std::uint64_t> parent_ids;
  Origin origin = Origin::initial;
  int epoch_created = 0;
};

/// The ten hand-written seed functions, one per initial population.
std::vector<dsl::Expr> initial_functions();

/// Syntax feature vector, L2-normalized. Layout:
///   0-7   metric references (degree .. clustering, khop)
///   8-13  unary operators
///   14-16 neighbor aggregates
///   17-19 binary operators grouped as {add, sub}, {mul, div, pow}, {min, max}
///   20-23 tree size, depth, constant count, distinct metric count
Embedding embed(const dsl::Expr& e);

/// Throws std::invalid_argument on a size mismatch or a zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

class Population {
 public:
  Population(std::size_t id, std::size_t capacity) : id_(id), capacity_(capacity) {}

  std::size_t id() const { return id_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return members_.size(); }
  bool full() const { return members_.size() >= capacity_; }
  /// Sorted by fitness descending, then id ascending.
  const std::vector<Individual>& members() const { return members_; }
  const Embedding& centroid() const { return centroid_; }
  double mean_fitness() const;
  double max_fitness() const;

 private:
  friend class PopulationSet;
  void add(Individual ind);
  Individual remove_at(std::size_t index);
  void recompute_centroid();

  std::size_t id_;
  std::size_t capacity_;
  std::vector<Individual> members_;
  Embedding centroid_{};
};

struct PopulationConfig {
  double similarity_threshold = 0.93;
  std::size_t capacity = 10;
  std::size_t max_populations = 32;
  /// One unbounded pool; classification is bypassed.
  bool single_pool = false;
};

enum class Placement { inserted, replaced, discarded, new_population };
std::string_view name(Placement placement);

struct PlacementReport {
  Placement placement = Placement::new_population;
  /// Population the individual was placed in or rejected from.
  std::size_t population = 0;
  std::optional<std::uint64_t> evicted_id;
  /// Largest centroid similarity seen; empty when there was nothing to compare.
  std::optional<double> max_similarity;
};

class PopulationSet {
 public:
  explicit PopulationSet(PopulationConfig config = {});

  const PopulationConfig& config() const { return config_; }
  const std::vector<Population>& populations() const { return populations_; }
  std::size_t individual_count() const;
  bool empty() const { return populations_.empty(); }

  /// Hands out unique, increasing individual ids.
  std::uint64_t allocate_id() { return next_id_++; }

  /// Places an individual by nearest centroid: joins the most similar
  /// population when the similarity exceeds the threshold (strictly),
  /// otherwise founds a new one. A full population admits it only by
  /// evicting a strictly worse member.
  PlacementReport classify(Individual ind);

  /// Founds a new population with this individual regardless of similarity.
  PlacementReport found(Individual ind);

  /// Highest fitness, ties by lowest id. Throws std::logic_error when empty.
  const Individual& best() const;

 private:
  PlacementReport insert_into(std::size_t index, Individual ind, std::optional<double> sim);

  PopulationConfig config_;
  std::vector<Population> populations_;
  std::uint64_t next_id_ = 0;
};

struct ParentSets {
  std::vector<Individual> intra;
  std::vector<std::array<Individual, 2>> inter;
};

/// Fitness-weighted parent selection: one member from every population plus
/// the global elite (not repeated), and `inter_pairs` pairs of distinct
/// members drawn from one population each. Throws std::logic_error when the
/// set is empty.
ParentSets select_parents(const PopulationSet& ps, std::uint64_t seed,
                          std::size_t inter_pairs = 1);

/// Up to `count` distinct individuals drawn uniformly from all populations.
std::vector<Individual> select_uniform(const PopulationSet& ps, std::uint64_t seed,
                                       std::size_t count);

/// Index drawn with probability proportional to weight; uniform when all
/// weights are zero.
std::size_t weighted_index(Rng& rng, std::span<const double> weights);

nlohmann::json snapshot(const PopulationSet& ps);

}  // namespace critnode
