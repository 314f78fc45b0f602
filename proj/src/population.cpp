#include "critnode/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "critnode/exact_sum.hpp"

namespace critnode {

std::string_view name(Origin origin) {
  switch (origin) {
    case Origin::initial: return "initial";
    case Origin::crossover: return "crossover";
    case Origin::mutation: return "mutation";
  }
  return "?";
}

std::string_view name(Placement placement) {
  switch (placement) {
    case Placement::inserted: return "inserted";
    case Placement::replaced: return "replaced";
    case Placement::discarded: return "discarded";
    case Placement::new_population: return "new_population";
  }
  return "?";
}

std::vector<dsl::Expr> initial_functions() {
  static const char* const kTexts[] = {
      "degree",
      "khop(2)",
      "betweenness",
      "closeness",
      "eigenvector",
      "pagerank",
      "coreness + 0.001 * degree",
      "degree * (1 - clustering)",
      "(degree - 1) * nsum(degree - 1)",
      "normalize(degree) + normalize(pagerank)",
  };
  std::vector<dsl::Expr> out;
  for (const char* text : kTexts) out.push_back(dsl::parse(text));
  return out;
}

namespace {

constexpr std::size_t kUnarySlot = dsl::kMetricCount;
constexpr std::size_t kAggSlot = kUnarySlot + dsl::kUnaryCount;
constexpr std::size_t kBinarySlot = kAggSlot + dsl::kAggCount;
constexpr std::size_t kStructSlot = kBinarySlot + 3;
static_assert(kStructSlot + 4 == kEmbeddingDim);

std::size_t binary_group(dsl::BinaryOp op) {
  switch (op) {
    case dsl::BinaryOp::add:
    case dsl::BinaryOp::sub: return 0;
    case dsl::BinaryOp::mul:
    case dsl::BinaryOp::div:
    case dsl::BinaryOp::pow: return 1;
    case dsl::BinaryOp::min:
    case dsl::BinaryOp::max: return 2;
  }
  return 0;
}

struct FeatureCounter {
  Embedding& v;
  std::size_t constants = 0;

  void visit(const dsl::Node& n) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, dsl::Const>) {
            ++constants;
          } else if constexpr (std::is_same_v<T, dsl::MetricRef>) {
            v[static_cast<std::size_t>(x.metric)] += 1;
          } else if constexpr (std::is_same_v<T, dsl::Unary>) {
            v[kUnarySlot + static_cast<std::size_t>(x.op)] += 1;
            visit(*x.child);
          } else if constexpr (std::is_same_v<T, dsl::NeighborAgg>) {
            v[kAggSlot + static_cast<std::size_t>(x.op)] += 1;
            visit(*x.child);
          } else {
            v[kBinarySlot + binary_group(x.op)] += 1;
            visit(*x.lhs);
            visit(*x.rhs);
          }
        },
        n.data);
  }
};

}  // namespace

Embedding embed(const dsl::Expr& e) {
  Embedding v{};
  FeatureCounter counter{v};
  counter.visit(e.root());
  std::size_t distinct = 0;
  for (int m = 0; m < dsl::kMetricCount; ++m) distinct += v[m] > 0 ? 1 : 0;
  v[kStructSlot + 0] = static_cast<double>(e.size());
  v[kStructSlot + 1] = static_cast<double>(e.depth());
  v[kStructSlot + 2] = static_cast<double>(counter.constants);
  v[kStructSlot + 3] = static_cast<double>(distinct);

  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  for (double& x : v) x /= norm;
  return v;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// ---------------------------------------------------------------------------

namespace {

bool ranks_before(const Individual& a, const Individual& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.id < b.id;
}

}  // namespace

double Population::mean_fitness() const {
  ExactSum sum;
  for (const auto& m : members_) sum.add(m.fitness);
  return members_.empty() ? 0.0 : sum.value() / static_cast<double>(members_.size());
}

double Population::max_fitness() const {
  return members_.empty() ? 0.0 : members_.front().fitness;
}

void Population::add(Individual ind) {
  auto pos = std::upper_bound(members_.begin(), members_.end(), ind, ranks_before);
  members_.insert(pos, std::move(ind));
  recompute_centroid();
}

Individual Population::remove_at(std::size_t index) {
  Individual out = std::move(members_[index]);
  members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(index));
  recompute_centroid();
  return out;
}

void Population::recompute_centroid() {
  for (std::size_t d = 0; d < kEmbeddingDim; ++d) {
    ExactSum sum;
    for (const auto& m : members_) sum.add(m.embedding[d]);
    centroid_[d] = members_.empty() ? 0.0 : sum.value() / static_cast<double>(members_.size());
  }
}

PopulationSet::PopulationSet(PopulationConfig config) : config_(config) {
  if (!(config_.similarity_threshold > 0.0 && config_.similarity_threshold < 1.0))
    throw std::invalid_argument("similarity threshold must lie in (0, 1)");
  if (config_.capacity == 0) throw std::invalid_argument("population capacity must be positive");
  if (config_.max_populations == 0)
    throw std::invalid_argument("population limit must be positive");
  if (config_.single_pool) config_.capacity = std::numeric_limits<std::size_t>::max();
}

std::size_t PopulationSet::individual_count() const {
  std::size_t n = 0;
  for (const auto& p : populations_) n += p.size();
  return n;
}

PlacementReport PopulationSet::found(Individual ind) {
  populations_.emplace_back(populations_.size(), config_.capacity);
  populations_.back().add(std::move(ind));
  return {Placement::new_population, populations_.size() - 1, std::nullopt, std::nullopt};
}

PlacementReport PopulationSet::classify(Individual ind) {
  if (config_.single_pool) {
    if (populations_.empty()) return found(std::move(ind));
    return insert_into(0, std::move(ind), std::nullopt);
  }
  if (populations_.empty()) return found(std::move(ind));

  std::size_t best = 0;
  double best_sim = -2.0;
  for (std::size_t i = 0; i < populations_.size(); ++i) {
    const double s = cosine_similarity(ind.embedding, populations_[i].centroid());
    if (s > best_sim) {
      best_sim = s;
      best = i;
    }
  }
  if (best_sim > config_.similarity_threshold ||
      populations_.size() >= config_.max_populations) {
    return insert_into(best, std::move(ind), best_sim);
  }
  PlacementReport r = found(std::move(ind));
  r.max_similarity = best_sim;
  return r;
}

PlacementReport PopulationSet::insert_into(std::size_t index, Individual ind,
                                           std::optional<double> sim) {
  Population& pop = populations_[index];
  if (!pop.full()) {
    pop.add(std::move(ind));
    return {Placement::inserted, index, std::nullopt, sim};
  }
  // The weakest member is at the back; among equally weak ones evict the oldest.
  std::size_t victim = pop.members_.size() - 1;
  while (victim > 0 && pop.members_[victim - 1].fitness == pop.members_.back().fitness) --victim;
  if (!(ind.fitness > pop.members_[victim].fitness)) {
    return {Placement::discarded, index, std::nullopt, sim};
  }
  const std::uint64_t evicted = pop.remove_at(victim).id;
  pop.add(std::move(ind));
  return {Placement::replaced, index, evicted, sim};
}

const Individual& PopulationSet::best() const {
  const Individual* top = nullptr;
  for (const auto& p : populations_)
    for (const auto& m : p.members())
      if (top == nullptr || ranks_before(m, *top)) top = &m;
  if (top == nullptr) throw std::logic_error("best: population set is empty");
  return *top;
}

// ---------------------------------------------------------------------------

std::size_t weighted_index(Rng& rng, std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("weighted_index: no weights");
  ExactSum total;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weighted_index: negative weight");
    total.add(w);
  }
  if (total.value() == 0.0) return rng.uniform_index(weights.size());
  const double target = rng.uniform01() * total.value();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

ParentSets select_parents(const PopulationSet& ps, std::uint64_t seed, std::size_t inter_pairs) {
  if (ps.individual_count() == 0) throw std::logic_error("select_parents: population set is empty");
  Rng rng(seed);
  ParentSets out;

  std::set<std::uint64_t> chosen;
  for (const auto& pop : ps.populations()) {
    std::vector<double> w;
    for (const auto& m : pop.members()) w.push_back(m.fitness);
    const Individual& pick = pop.members()[weighted_index(rng, w)];
    out.intra.push_back(pick);
    chosen.insert(pick.id);
  }
  const Individual& elite = ps.best();
  if (!chosen.contains(elite.id)) out.intra.push_back(elite);

  std::vector<const Population*> eligible;
  std::vector<double> means;
  for (const auto& pop : ps.populations()) {
    if (pop.size() < 2) continue;
    eligible.push_back(&pop);
    means.push_back(pop.mean_fitness());
  }
  if (eligible.empty()) return out;
  for (std::size_t k = 0; k < inter_pairs; ++k) {
    const Population& pop = *eligible[weighted_index(rng, means)];
    std::vector<double> w;
    for (const auto& m : pop.members()) w.push_back(m.fitness);
    const std::size_t first = weighted_index(rng, w);
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(first));
    std::size_t second = weighted_index(rng, w);
    if (second >= first) ++second;
    out.inter.push_back({pop.members()[first], pop.members()[second]});
  }
  return out;
}

std::vector<Individual> select_uniform(const PopulationSet& ps, std::uint64_t seed,
                                       std::size_t count) {
  std::vector<const Individual*> all;
  for (const auto& pop : ps.populations())
    for (const auto& m : pop.members()) all.push_back(&m);
  if (all.empty()) throw std::logic_error("select_uniform: population set is empty");
  std::sort(all.begin(), all.end(), [](auto* a, auto* b) { return a->id < b->id; });
  Rng rng(seed);
  const std::size_t k = std::min(count, all.size());
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.uniform_index(all.size() - i)]);
  std::vector<Individual> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(*all[i]);
  return out;
}

nlohmann::json snapshot(const PopulationSet& ps) {
  nlohmann::json pops = nlohmann::json::array();
  for (const auto& pop : ps.populations()) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : pop.members()) {
      members.push_back({{"id", m.id},
                         {"fitness", m.fitness},
                         {"origin", name(m.origin)},
                         {"expr", dsl::print_canonical(m.expr)}});
    }
    nlohmann::json capacity = nullptr;
    if (!ps.config().single_pool) capacity = pop.capacity();
    pops.push_back({{"id", pop.id()}, {"capacity", capacity}, {"members", members}});
  }
  return {{"populations", pops}};
}

}  // namespace critnode
