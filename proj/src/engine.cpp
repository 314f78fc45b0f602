#include "critnode/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace critnode {

void EvolutionConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(epochs >= 1, "epochs must be at least 1");
  require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "mutation_rate must lie in [0, 1]");
  require(similarity_threshold > 0.0 && similarity_threshold < 1.0,
          "similarity_threshold must lie in (0, 1)");
  require(population_capacity >= 1, "population_capacity must be at least 1");
  require(max_populations >= 1, "max_populations must be at least 1");
  require(pool_parents >= 2, "pool_parents must be at least 2");
  require(removal_fraction > 0.0 && removal_fraction < 1.0, "removal_fraction must lie in (0, 1)");
  require(!time_budget_seconds || *time_budget_seconds > 0.0, "time budget must be positive");
}

nlohmann::json to_json(const EpochRecord& r) {
  nlohmann::json pops = nlohmann::json::array();
  for (const auto& p : r.populations) {
    pops.push_back({{"id", p.id},
                    {"size", p.size},
                    {"mean_fitness", p.mean_fitness},
                    {"max_fitness", p.max_fitness}});
  }
  return {{"epoch", r.epoch},
          {"populations", pops},
          {"counts",
           {{"generated", r.generated},
            {"accepted", r.accepted},
            {"discarded", r.discarded},
            {"evicted", r.evicted},
            {"invalid", r.invalid}}},
          {"best", {{"fitness", r.best_fitness}, {"expr", r.best_expr}}}};
}

namespace {

// Sub-seed purposes.
enum : std::uint64_t { kInit = 1, kSelect, kCross, kMutateCoin, kMutate };

template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(threads, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Offspring {
  std::vector<Individual> individuals;
  std::size_t invalid = 0;
};

class Engine {
 public:
  Engine(const Graph& g, const EvolutionConfig& cfg, VariationOperator& op, const RecordCallback& cb)
      : cfg_(cfg),
        op_(op),
        on_record_(cb),
        cache_(g),
        ps_(PopulationConfig{cfg.similarity_threshold, cfg.population_capacity,
                             cfg.max_populations, cfg.no_population_mgmt}),
        threads_(cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency())) {}

  RunResult run() {
    const auto start = std::chrono::steady_clock::now();
    RunResult result;

    std::vector<Individual> seeds;
    const auto exprs = cfg_.no_manual_init ? random_seeds() : initial_functions();
    for (const auto& e : exprs) {
      Individual ind;
      ind.expr = e;
      ind.id = ps_.allocate_id();
      seeds.push_back(std::move(ind));
    }
    evaluate_all(seeds);
    for (const auto& s : seeds) result.best_initial_fitness = std::max(result.best_initial_fitness, s.fitness);
    // Each seed founds its own population unless there is a single pool.
    place(0, std::move(seeds), 0, !cfg_.no_population_mgmt, result);

    const int last = cfg_.single_epoch ? 1 : cfg_.epochs;
    for (int t = 1; t <= last; ++t) {
      if (cfg_.time_budget_seconds) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        if (elapsed.count() >= *cfg_.time_budget_seconds) break;
      }
      Offspring next = produce(t);
      evaluate_all(next.individuals);
      place(t, std::move(next.individuals), next.invalid, false, result);
    }

    result.best = ps_.best();
    result.populations = std::move(ps_);
    return result;
  }

 private:
  std::uint64_t seed(std::initializer_list<std::uint64_t> path) const {
    return derive_seed(cfg_.master_seed, path);
  }

  std::vector<dsl::Expr> random_seeds() const {
    std::vector<dsl::Expr> out;
    for (std::uint64_t i = 0; i < 10; ++i) out.push_back(dsl::random_expr(seed({0, kInit, i}), 4));
    return out;
  }

  void evaluate_all(std::vector<Individual>& inds) {
    parallel_for(inds.size(), threads_, [&](std::size_t i) {
      inds[i].fitness = fitness(cache_, inds[i].expr, cfg_.removal_fraction, cfg_.fitness_mode);
      inds[i].embedding = embed(inds[i].expr);
    });
  }

  void place(int epoch, std::vector<Individual> inds, std::size_t invalid, bool found_each,
             RunResult& result) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.generated = inds.size();
    rec.invalid = invalid;
    for (auto& ind : inds) {
      const PlacementReport r = found_each ? ps_.found(std::move(ind)) : ps_.classify(std::move(ind));
      switch (r.placement) {
        case Placement::discarded: ++rec.discarded; break;
        case Placement::replaced: ++rec.evicted; [[fallthrough]];
        default: ++rec.accepted;
      }
    }
    for (const auto& p : ps_.populations())
      rec.populations.push_back({p.id(), p.size(), p.mean_fitness(), p.max_fitness()});
    const Individual& best = ps_.best();
    rec.best_fitness = best.fitness;
    rec.best_expr = dsl::print_canonical(best.expr);
    if (on_record_) on_record_(rec);
    result.records.push_back(std::move(rec));
  }

  std::vector<std::vector<Individual>> parent_groups(int t, std::uint64_t retry) const {
    std::vector<std::vector<Individual>> groups;
    const std::uint64_t s = seed({static_cast<std::uint64_t>(t), kSelect, retry});
    if (cfg_.single_epoch) {
      std::vector<Individual> all;
      for (const auto& p : ps_.populations())
        for (const auto& m : p.members()) all.push_back(m);
      std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      groups.push_back(std::move(all));
    } else if (cfg_.no_population_mgmt) {
      groups.push_back(select_uniform(ps_, s, cfg_.pool_parents));
    } else {
      ParentSets sets = select_parents(ps_, s, cfg_.inter_pairs);
      groups.push_back(std::move(sets.intra));
      for (auto& pair : sets.inter) groups.push_back({pair[0], pair[1]});
    }
    std::erase_if(groups, [](const auto& g) { return g.size() < 2; });
    return groups;
  }

  Offspring produce(int t) {
    constexpr std::uint64_t kMaxRetries = 3;
    const auto epoch = static_cast<std::uint64_t>(t);
    const std::size_t concurrency = std::max<std::size_t>(1, op_.max_concurrency());
    Offspring out;

    for (std::uint64_t retry = 0; retry <= kMaxRetries; ++retry) {
      const auto groups = parent_groups(t, retry);

      std::vector<VariationReport> crossed(groups.size());
      parallel_for(groups.size(), concurrency, [&](std::size_t g) {
        std::vector<Parent> parents;
        for (const auto& ind : groups[g]) parents.push_back({ind.expr, ind.fitness});
        crossed[g] = op_.crossover(parents, seed({epoch, kCross, retry, g}));
      });

      std::vector<Individual> kids;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        out.invalid += crossed[g].discarded.size();
        std::vector<std::uint64_t> parent_ids;
        for (const auto& p : groups[g]) parent_ids.push_back(p.id);
        for (auto& e : crossed[g].accepted) {
          Individual kid;
          kid.expr = std::move(e);
          kid.parent_ids = parent_ids;
          kid.origin = Origin::crossover;
          kid.epoch_created = t;
          kids.push_back(std::move(kid));
        }
      }

      std::vector<std::size_t> chosen;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        Rng coin(seed({epoch, kMutateCoin, retry, i}));
        if (coin.bernoulli(cfg_.mutation_rate)) chosen.push_back(i);
      }
      std::vector<VariationReport> mutated(chosen.size());
      parallel_for(chosen.size(), concurrency, [&](std::size_t j) {
        const std::size_t i = chosen[j];
        mutated[j] = op_.mutate(kids[i].expr, seed({epoch, kMutate, retry, i}));
      });
      for (std::size_t j = 0; j < chosen.size(); ++j) {
        out.invalid += mutated[j].discarded.size();
        if (mutated[j].accepted.empty()) continue;
        Individual& kid = kids[chosen[j]];
        kid.expr = std::move(mutated[j].accepted.front());
        kid.origin = Origin::mutation;
      }

      if (!kids.empty()) {
        for (auto& kid : kids) kid.id = ps_.allocate_id();
        out.individuals = std::move(kids);
        break;
      }
    }
    return out;
  }

  EvolutionConfig cfg_;
  VariationOperator& op_;
  const RecordCallback& on_record_;
  MetricCache cache_;
  PopulationSet ps_;
  std::size_t threads_;
};

}  // namespace

RunResult run(const Graph& g, const EvolutionConfig& cfg, VariationOperator& op,
              const RecordCallback& on_record) {
  cfg.validate();
  if (g.edge_count() == 0) throw std::invalid_argument("evolution needs a graph with edges");
  return Engine(g, cfg, op, on_record).run();
}

TelemetryTables export_telemetry(const std::vector<EpochRecord>& records) {
  std::ostringstream size, mean, max;
  for (auto* os : {&size, &mean, &max}) *os << "epoch,population_id,value\n";
  for (const auto& r : records) {
    for (const auto& p : r.populations) {
      size << r.epoch << ',' << p.id << ',' << p.size << '\n';
      mean << r.epoch << ',' << p.id << ',' << dsl::format_number(p.mean_fitness) << '\n';
      max << r.epoch << ',' << p.id << ',' << dsl::format_number(p.max_fitness) << '\n';
    }
  }
  return {size.str(), mean.str(), max.str()};
}

RunDirectory::RunDirectory(const std::filesystem::path& dir, const nlohmann::json& resolved_config)
    : dir_(dir) {
  std::filesystem::create_directories(dir_);
  std::ofstream(dir_ / "config.json") << resolved_config.dump(2) << '\n';
  log_.open(dir_ / "run.jsonl", std::ios::trunc);
  if (!log_) throw std::runtime_error("cannot write " + (dir_ / "run.jsonl").string());
}

void RunDirectory::append(const EpochRecord& r) {
  log_ << to_json(r).dump() << '\n';
  log_.flush();
}

void RunDirectory::finish(const RunResult& result) {
  log_.close();
  std::ofstream(dir_ / "best.dsl") << dsl::print_canonical(result.best.expr) << '\n';
  const TelemetryTables t = export_telemetry(result.records);
  std::ofstream(dir_ / "telemetry_size.csv") << t.size;
  std::ofstream(dir_ / "telemetry_mean_fitness.csv") << t.mean_fitness;
  std::ofstream(dir_ / "telemetry_max_fitness.csv") << t.max_fitness;
  std::ofstream(dir_ / "populations.json") << snapshot(result.populations).dump(2) << '\n';
}

}  // namespace critnode
