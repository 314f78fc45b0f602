#pragma once

// Randomized classify driver that predicts every placement from scratch and
// reports the first disagreement. Shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "critnode/population.hpp"

namespace fuzz {

using namespace critnode;

inline Embedding member_mean(const Population& p) {
  Embedding m{};
  for (const auto& ind : p.members())
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) m[d] += ind.embedding[d];
  for (double& x : m) x /= static_cast<double>(p.size());
  return m;
}

inline double plain_cosine(const Embedding& a, const Embedding& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t d = 0; d < kEmbeddingDim; ++d) {
    dot += a[d] * b[d];
    na += a[d] * a[d];
    nb += b[d] * b[d];
  }
  return dot / std::sqrt(na * nb);
}

struct Result {
  std::string failure;  // empty on success
  int new_populations = 0;
  int inserted = 0;
  int replaced = 0;
  int discarded = 0;
};

/// Runs `calls` classify operations with random expressions and fitnesses on
/// a coarse grid (so ties occur) and checks each outcome.
inline Result classify_fuzz(std::uint64_t seed, int calls, PopulationConfig cfg) {
  Result res;
  PopulationSet ps(cfg);
  Rng rng(seed);
  auto fail = [&](int call, const std::string& what) {
    std::ostringstream os;
    os << "call " << call << ": " << what;
    res.failure = os.str();
    return res;
  };

  for (int call = 0; call < calls; ++call) {
    Individual ind;
    ind.expr = dsl::random_expr(rng.next(), 1 + rng.uniform_index(4));
    ind.embedding = embed(ind.expr);
    ind.fitness = static_cast<double>(rng.uniform_index(21)) / 20.0;
    ind.id = ps.allocate_id();

    // Predict from the pre-insertion state.
    const auto& pops = ps.populations();
    const std::size_t before_pops = pops.size();
    std::vector<double> sims;
    std::vector<std::size_t> sizes;
    std::vector<double> min_fit;
    std::vector<std::uint64_t> min_id;
    double best_sim = -2.0;
    for (const auto& p : pops) {
      sims.push_back(plain_cosine(ind.embedding, member_mean(p)));
      best_sim = std::max(best_sim, sims.back());
      sizes.push_back(p.size());
      double f = 2.0;
      std::uint64_t id = 0;
      for (const auto& m : p.members()) {
        if (m.fitness < f || (m.fitness == f && m.id < id)) {
          f = m.fitness;
          id = m.id;
        }
      }
      min_fit.push_back(f);
      min_id.push_back(id);
    }
    // Similarities within rounding of the threshold are ambiguous; the
    // boundary itself has dedicated tests.
    const bool ambiguous =
        before_pops > 0 && std::abs(best_sim - cfg.similarity_threshold) < 1e-9;

    const PlacementReport r = ps.classify(ind);

    if (!ambiguous) {
      const bool join = before_pops > 0 && (best_sim > cfg.similarity_threshold ||
                                            before_pops >= cfg.max_populations);
      if (!join) {
        if (r.placement != Placement::new_population) return fail(call, "expected new population");
      } else if (r.placement == Placement::new_population) {
        return fail(call, "unexpected new population");
      } else if (sims[r.population] < best_sim - 1e-9) {
        return fail(call, "placed outside the most similar population");
      } else if (sizes[r.population] < cfg.capacity) {
        if (r.placement != Placement::inserted) return fail(call, "expected insertion");
      } else if (ind.fitness > min_fit[r.population]) {
        if (r.placement != Placement::replaced) return fail(call, "expected replacement");
        if (r.evicted_id != min_id[r.population])
          return fail(call, "evicted a member that is not the weakest");
      } else if (r.placement != Placement::discarded) {
        return fail(call, "expected discard");
      }
    }

    switch (r.placement) {
      case Placement::new_population: ++res.new_populations; break;
      case Placement::inserted: ++res.inserted; break;
      case Placement::replaced: ++res.replaced; break;
      case Placement::discarded: ++res.discarded; break;
    }

    // Post-state.
    if (ps.populations().size() > cfg.max_populations) return fail(call, "population limit exceeded");
    for (const auto& p : ps.populations()) {
      if (p.size() > cfg.capacity) return fail(call, "capacity exceeded");
      if (p.size() == 0) return fail(call, "empty population");
      const Embedding mean = member_mean(p);
      for (std::size_t d = 0; d < kEmbeddingDim; ++d)
        if (std::abs(mean[d] - p.centroid()[d]) > 1e-12) return fail(call, "stale centroid");
      for (std::size_t i = 1; i < p.size(); ++i) {
        const auto& a = p.members()[i - 1];
        const auto& b = p.members()[i];
        if (a.fitness < b.fitness || (a.fitness == b.fitness && a.id > b.id))
          return fail(call, "members out of order");
      }
    }
  }
  return res;
}

}  // namespace fuzz
