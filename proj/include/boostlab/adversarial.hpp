#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "boostlab/core.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

// Benchmark universe for the adversarial weak learner: points 1..domain_size,
// every point truly labeled +1. A fixed pool of random hypotheses plus one
// special hypothesis h0 that is correct everywhere except the last tail_size
// points. Queries return the pool hypothesis that is worst on the probe set
// of zero-mass points while still keeping advantage gamma on the query
// weighing, or h0 when no pool hypothesis qualifies.
struct AdversarialConfig {
  double gamma = 0.1;               // weak learner advantage, in (0, 1/2)
  std::size_t domain_size = 350;
  std::size_t tail_size = 20;       // h0 is wrong on the last tail_size points
  std::size_t probe_size = 20;      // zero-mass points deliberately sacrificed
  std::size_t pool_size = 100;
  double plus_probability = -1.0;   // < 0 means default 1/2 + 2*gamma

  double effective_plus_probability() const {
    return plus_probability < 0.0 ? 0.5 + 2.0 * gamma : plus_probability;
  }

  void validate() const {
    if (!(gamma > 0.0) || !(gamma < 0.5)) {
      throw std::invalid_argument("AdversarialConfig: gamma must lie in (0, 0.5)");
    }
    if (domain_size == 0) throw std::invalid_argument("AdversarialConfig: empty domain");
    if (tail_size >= domain_size) {
      throw std::invalid_argument("AdversarialConfig: tail must be smaller than the domain");
    }
    if (probe_size == 0 || probe_size > domain_size) {
      throw std::invalid_argument("AdversarialConfig: bad probe size");
    }
    double q = effective_plus_probability();
    if (!(q >= 0.0) || !(q <= 1.0)) {
      throw std::invalid_argument("AdversarialConfig: plus probability must lie in [0, 1]");
    }
  }
};

// Lookup-table hypothesis over universe points 1..n. pool_index is the
// position in the universe pool, or -1 for h0; models serialize it.
class TableHypothesis final : public Hypothesis {
 public:
  TableHypothesis(std::vector<std::int8_t> table, int pool_index)
      : table_(std::move(table)), pool_index_(pool_index) {}

  Label predict(std::span<const double> row) const override {
    const long long x = std::llround(row[0]);
    if (x < 1 || static_cast<std::size_t>(x) > table_.size()) {
      throw std::invalid_argument("TableHypothesis: point outside the universe");
    }
    return Label(table_[static_cast<std::size_t>(x - 1)]);
  }

  std::string describe() const override {
    return pool_index_ < 0 ? "adversarial h0"
                           : "adversarial pool #" + std::to_string(pool_index_);
  }

  int pool_index() const { return pool_index_; }
  Label at(std::size_t point) const { return Label(table_[point - 1]); }
  const std::vector<std::int8_t>& table() const { return table_; }

 private:
  std::vector<std::int8_t> table_;
  int pool_index_;
};

// 1024 (by default) uniform draws from {1, ..., domain_size}, every label +1,
// a pure function of the seed.
inline Dataset generate_adversarial_dataset(std::uint64_t seed,
                                            std::size_t rows = 1024,
                                            std::size_t domain_size = 350) {
  Rng rng(seed);
  std::vector<double> features;
  features.reserve(rows);
  std::vector<Label> labels(rows, Label::positive());
  for (std::size_t i = 0; i < rows; ++i) {
    features.push_back(static_cast<double>(1 + rng.below(domain_size)));
  }
  return Dataset(std::move(features), 1, std::move(labels));
}

class AdversarialUniverse {
 public:
  struct Stats {
    std::uint64_t queries = 0;
    std::uint64_t h0_fallbacks = 0;
    std::uint64_t short_probe_sets = 0;          // fewer zero-mass points than probe_size
    std::uint64_t fallback_contract_violations = 0;  // h0 returned with error > 1/2-gamma
  };

  AdversarialUniverse(std::uint64_t seed, AdversarialConfig cfg = {})
      : state_(std::make_shared<State>()) {
    cfg.validate();
    state_->cfg = cfg;
    state_->seed = seed;
    Rng rng(derive_seed(seed, "adversarial/pool"));
    const double q = cfg.effective_plus_probability();
    state_->pool.reserve(cfg.pool_size);
    for (std::size_t i = 0; i < cfg.pool_size; ++i) {
      std::vector<std::int8_t> table(cfg.domain_size);
      for (std::size_t x = 0; x < cfg.domain_size; ++x) {
        table[x] = rng.bernoulli(q) ? 1 : -1;
      }
      state_->pool.push_back(
          std::make_shared<TableHypothesis>(std::move(table), static_cast<int>(i)));
    }
    state_->h0 = make_h0(cfg);
  }

  // Test hook: universe with an explicitly given pool.
  static AdversarialUniverse with_pool(std::vector<std::vector<std::int8_t>> tables,
                                       AdversarialConfig cfg = {}) {
    cfg.validate();
    AdversarialUniverse u(PrivateTag{});
    u.state_->cfg = cfg;
    u.state_->seed = 0;
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (tables[i].size() != cfg.domain_size) {
        throw std::invalid_argument("AdversarialUniverse: pool table size mismatch");
      }
      u.state_->pool.push_back(
          std::make_shared<TableHypothesis>(std::move(tables[i]), static_cast<int>(i)));
    }
    u.state_->h0 = make_h0(cfg);
    return u;
  }

  const AdversarialConfig& config() const { return state_->cfg; }
  std::uint64_t seed() const { return state_->seed; }
  std::size_t pool_size() const { return state_->pool.size(); }
  HypothesisPtr pool_hypothesis(std::size_t i) const { return state_->pool.at(i); }
  HypothesisPtr h0() const { return state_->h0; }

  // The probe set: the smallest-indexed universe points carrying zero mass
  // under the query weighing, at most probe_size of them, ascending.
  std::vector<std::uint32_t> probe_set(const Dataset& data,
                                       const WeightDistribution& dist) const {
    std::vector<double> mass = point_mass(data, dist);
    std::vector<std::uint32_t> probe;
    probe.reserve(state_->cfg.probe_size);
    for (std::size_t x = 0; x < mass.size() && probe.size() < state_->cfg.probe_size; ++x) {
      if (mass[x] == 0.0) probe.push_back(static_cast<std::uint32_t>(x + 1));
    }
    return probe;
  }

  // The adversarial response to a weighing of the training data. Among pool
  // hypotheses with weighted error <= 1/2-gamma and probe accuracy
  // <= 1/2-gamma, returns the one with the lowest probe accuracy (ties to
  // the lowest pool index); otherwise h0.
  HypothesisPtr query(const Dataset& data, const WeightDistribution& dist) const {
    const AdversarialConfig& cfg = state_->cfg;
    std::vector<std::uint32_t> probe = probe_set(data, dist);
    state_->queries.fetch_add(1, std::memory_order_relaxed);
    if (probe.size() < cfg.probe_size) {
      if (state_->short_probe.fetch_add(1, std::memory_order_relaxed) == 0) {
        std::lock_guard<std::mutex> lock(warn_mutex());
        std::cerr << "boostlab: adversarial query saw only " << probe.size()
                  << " zero-mass points (probe size " << cfg.probe_size
                  << "); using all of them\n";
      }
    }

    const double bound = 0.5 - cfg.gamma;
    const TableHypothesis* best = nullptr;
    std::size_t best_index = 0;
    double best_probe_accuracy = 0.0;
    if (!probe.empty()) {
      for (std::size_t i = 0; i < state_->pool.size(); ++i) {
        const TableHypothesis& h = *state_->pool[i];
        double probe_accuracy = accuracy_on(h, probe);
        if (probe_accuracy > bound) continue;
        if (best && probe_accuracy >= best_probe_accuracy) continue;
        if (weighted_error(h, data, dist) > bound) continue;
        best = &h;
        best_index = i;
        best_probe_accuracy = probe_accuracy;
      }
    }
    if (best) return state_->pool[best_index];

    state_->h0_fallbacks.fetch_add(1, std::memory_order_relaxed);
    if (weighted_error(*state_->h0, data, dist) > bound) {
      if (state_->violations.fetch_add(1, std::memory_order_relaxed) == 0) {
        std::lock_guard<std::mutex> lock(warn_mutex());
        std::cerr << "boostlab: adversarial fallback h0 exceeded error 1/2-gamma "
                     "on a query weighing\n";
      }
    }
    return state_->h0;
  }

  WeakLearner learner() const {
    AdversarialUniverse self = *this;  // shares state, keeps it alive
    return [self](const Dataset& data, const WeightDistribution& dist) {
      return self.query(data, dist);
    };
  }

  Stats stats() const {
    return Stats{state_->queries.load(), state_->h0_fallbacks.load(),
                 state_->short_probe.load(), state_->violations.load()};
  }

 private:
  struct PrivateTag {};
  explicit AdversarialUniverse(PrivateTag) : state_(std::make_shared<State>()) {}

  struct State {
    AdversarialConfig cfg;
    std::uint64_t seed = 0;
    std::vector<std::shared_ptr<const TableHypothesis>> pool;
    HypothesisPtr h0;
    mutable std::atomic<std::uint64_t> queries{0};
    mutable std::atomic<std::uint64_t> h0_fallbacks{0};
    mutable std::atomic<std::uint64_t> short_probe{0};
    mutable std::atomic<std::uint64_t> violations{0};
  };

  static std::mutex& warn_mutex() {
    static std::mutex m;
    return m;
  }

  static HypothesisPtr make_h0(const AdversarialConfig& cfg) {
    std::vector<std::int8_t> table(cfg.domain_size, 1);
    for (std::size_t x = cfg.domain_size - cfg.tail_size; x < cfg.domain_size; ++x) {
      table[x] = -1;
    }
    return std::make_shared<TableHypothesis>(std::move(table), -1);
  }

  std::vector<double> point_mass(const Dataset& data,
                                 const WeightDistribution& dist) const {
    if (dist.size() != data.rows()) {
      throw std::invalid_argument("adversarial query: distribution length mismatch");
    }
    std::vector<double> mass(state_->cfg.domain_size, 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const long long x = std::llround(data.feature(i, 0));
      if (x < 1 || static_cast<std::size_t>(x) > mass.size() ||
          static_cast<double>(x) != data.feature(i, 0)) {
        throw std::invalid_argument(
            "adversarial query: dataset row is not a universe point");
      }
      mass[static_cast<std::size_t>(x - 1)] += dist[i];
    }
    return mass;
  }

  // Fraction of probe points (true label +1) the hypothesis gets right.
  static double accuracy_on(const TableHypothesis& h,
                            const std::vector<std::uint32_t>& probe) {
    std::size_t correct = 0;
    for (std::uint32_t x : probe) {
      if (h.at(x) == Label::positive()) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(probe.size());
  }

  std::shared_ptr<State> state_;
};

}  // namespace boostlab
