// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failed criteria. Run from anywhere; artifacts land in the
// working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "boostlab/boostlab.hpp"
#include "oracles.hpp"

using namespace boostlab;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

Dataset scaling_train(std::size_t rows, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.rows = rows;
  spec.features = 3;
  spec.vote_features = 3;
  spec.noise = 0.0;
  spec.seed = seed;
  return make_synthetic(spec);
}

// ---------------------------------------------------------------------------
// 1. Sub-sampling combinatorics: list lengths 3^(log4 m), set sizes (2m+1)/3,
//    and exact agreement with an independently written recursion.
Check criterion_subsample() {
  Check c;
  const std::vector<std::size_t> sizes{4, 16, 64, 256, 1024};
  const std::vector<std::size_t> lengths{3, 9, 27, 81, 243};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::size_t m = sizes[i];
    IndexSet s(m);
    for (std::size_t j = 0; j < m; ++j) s[j] = j;

    auto list = subsample(s, {});
    c.require(list.size() == lengths[i],
              "m=" + std::to_string(m) + ": list length " + std::to_string(list.size()) +
                  " != " + std::to_string(lengths[i]));
    const std::size_t want = (2 * m + 1) / 3;
    for (const auto& set : list) {
      c.require(set.size() == want,
                "m=" + std::to_string(m) + ": set size " + std::to_string(set.size()) +
                    " != " + std::to_string(want));
    }

    auto expected = oracles::subsample_recursive(s, {});
    c.require(list.size() == expected.size(), "oracle list length mismatch");
    for (std::size_t j = 0; j < list.size() && c.ok; ++j) {
      c.require(list[j] == expected[j],
                "m=" + std::to_string(m) + ": leaf " + std::to_string(j) +
                    " differs from the recursion oracle");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 2. Stump training equals brute-force enumeration on 200 random weighted
//    datasets (m <= 50, p <= 4), bit-exact over the identical candidate grid.
Check criterion_stump_oracle() {
  Check c;
  Rng rng(0xACCE5501);
  for (int trial = 0; trial < 200; ++trial) {
    auto [data, dist] = oracles::random_weighted_dataset(rng, 50, 4);
    double oracle_error = 0.0;
    Stump expected = oracles::brute_force_best_stump(data, dist, &oracle_error);
    Stump actual = train_stump(data, dist);
    double actual_error = weighted_error(actual, data, dist);
    c.require(actual_error == oracle_error,
              "trial " + std::to_string(trial) + ": error " +
                  std::to_string(actual_error) + " != oracle " +
                  std::to_string(oracle_error));
    c.require(actual == expected,
              "trial " + std::to_string(trial) + ": different stump than the oracle");
    if (!c.ok) break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// 3. AdaBoost identities: next-round distributions sum to 1 and give the
//    round's hypothesis weighted error exactly 1/2 (both within 1e-9);
//    stump-separable data reaches zero training error within 10 rounds; a
//    300-round run on voting-separable data ends with every margin positive.
Check criterion_adaboost_identities() {
  Check c;

  SyntheticSpec spec;
  spec.rows = 256;
  spec.features = 3;
  spec.vote_features = 3;
  spec.noise = 0.0;
  spec.seed = 0xB005;
  Dataset data = make_synthetic(spec);

  BoostConfig cfg;
  cfg.rounds = 300;
  std::size_t identity_rounds = 0;
  auto result = adaboost(
      data, stump_learner(), cfg,
      [&](std::size_t round, const Hypothesis& h, double epsilon, double,
          const WeightDistribution& next) {
        double sum = 0.0;
        double lo = 0.0;
        for (double w : next.weights()) {
          sum += w;
          lo = std::min(lo, w);
        }
        c.require(lo >= 0.0, "round " + std::to_string(round) + ": negative weight");
        c.require(std::abs(sum - 1.0) <= 1e-9,
                  "round " + std::to_string(round) + ": distribution sums to " +
                      std::to_string(sum));
        if (epsilon >= cfg.epsilon_floor) {
          double err = weighted_error(h, data, next);
          c.require(std::abs(err - 0.5) <= 1e-9,
                    "round " + std::to_string(round) + ": error under the next " +
                        "distribution is " + std::to_string(err));
          ++identity_rounds;
        }
      });
  c.require(result.trace.stop == BoostStop::completed,
            "300-round run stopped early");
  c.require(identity_rounds == 300, "orthogonality identity checked on " +
                                        std::to_string(identity_rounds) + " rounds");

  auto profile = training_margin_profile(result.voter, data);
  c.require(profile.min_margin > 0.0,
            "min training margin after 300 rounds is " +
                std::to_string(profile.min_margin));

  // stump-separable data: zero training error within 10 rounds
  Rng rng(0x5E9A);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> xs;
    std::vector<Label> ys;
    double cut = rng.next_unit();
    for (int i = 0; i < 64; ++i) {
      double x = rng.next_unit();
      xs.push_back(x);
      ys.push_back(x <= cut ? Label(-1) : Label(1));
    }
    Dataset separable(std::move(xs), 1, std::move(ys));
    BoostConfig short_cfg;
    short_cfg.rounds = 10;
    auto r = adaboost(separable, stump_learner(), short_cfg);
    c.require(test_error(r.voter, separable) == 0.0,
              "separable trial " + std::to_string(trial) +
                  " kept a positive training error after 10 rounds");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 4. Error scaling at desk scale: Majority-of-5 on a fixed voting-separable
//    distribution, m in {500, 1000, 2000, 4000} x 20 seeds. Mean test error
//    must be non-increasing in m with a log-log slope of at most -0.6.
Check criterion_scaling() {
  Check c;
  const std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
  const int seeds = 20;
  std::vector<double> mean_errors;

  for (std::size_t m : sizes) {
    double total = 0.0;
    for (int seed = 0; seed < seeds; ++seed) {
      Dataset train = scaling_train(
          m, derive_seed(0x5CA1E, "train", m * 100 + static_cast<std::size_t>(seed)));
      Dataset test = scaling_train(
          5000, derive_seed(0x5CA1E, "test", m * 100 + static_cast<std::size_t>(seed)));

      MetaConfig cfg;
      cfg.k = 5;
      cfg.boost.rounds = 150;
      cfg.master_seed = derive_seed(0x5CA1E, "run", m * 100 + static_cast<std::size_t>(seed));
      cfg.workers = 2;
      auto result = majority_of_k(train, stump_learner(), cfg);
      total += test_error(result.ensemble, test);
    }
    mean_errors.push_back(total / seeds);
  }

  std::string series;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    series += (i ? ", " : "") + std::to_string(sizes[i]) + ": " +
              std::to_string(mean_errors[i]);
  }

  for (std::size_t i = 1; i < mean_errors.size(); ++i) {
    c.require(mean_errors[i] <= mean_errors[i - 1],
              "mean error increased between m=" + std::to_string(sizes[i - 1]) +
                  " and m=" + std::to_string(sizes[i]) + " (" + series + ")");
  }

  // least-squares slope of ln(err) against ln(m)
  double mx = 0.0, my = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(sizes[i])));
    ly.push_back(std::log(std::max(mean_errors[i], 1e-6)));
    mx += lx.back();
    my += ly.back();
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    cov += (lx[i] - mx) * (ly[i] - my);
    var += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = cov / var;
  c.require(slope <= -0.6,
            "log-log slope " + std::to_string(slope) + " (errors " + series + ")");
  c.detail = c.ok ? "slope " + std::to_string(slope) + "; errors " + series : c.detail;
  return c;
}

// ---------------------------------------------------------------------------
// 5. Adversarial weak-learner contract over >= 1000 boosting-generated
//    queries at gamma = 0.1: every non-fallback response has weighted error
//    <= 0.4 exactly, and every probe set equals the smallest-indexed
//    zero-mass points (verified by independent recomputation).
Check criterion_adversarial_contract() {
  Check c;
  const double gamma = 0.1;
  AdversarialConfig acfg;
  acfg.gamma = gamma;

  std::size_t queries = 0;
  std::size_t non_fallback = 0;

  auto run_with = [&](const AdversarialUniverse& universe, const Dataset& parent,
                      auto&& train_fn) {
    WeakLearner verified = [&](const Dataset& data,
                               const WeightDistribution& dist) -> HypothesisPtr {
      // independent probe-set recomputation
      std::vector<double> mass(acfg.domain_size, 0.0);
      for (std::size_t i = 0; i < data.rows(); ++i) {
        mass[static_cast<std::size_t>(data.feature(i, 0)) - 1] += dist[i];
      }
      std::vector<std::uint32_t> expected;
      for (std::uint32_t x = 0; x < mass.size() && expected.size() < acfg.probe_size; ++x) {
        if (mass[x] == 0.0) expected.push_back(x + 1);
      }
      c.require(universe.probe_set(data, dist) == expected,
                "probe set differs from the zero-mass recomputation");

      HypothesisPtr h = universe.query(data, dist);
      ++queries;
      if (h != universe.h0()) {
        ++non_fallback;
        c.require(weighted_error(*h, data, dist) <= 0.4,
                  "non-fallback hypothesis exceeded weighted error 0.4");
      }
      return h;
    };
    (void)parent;
    train_fn(verified);
  };

  for (std::uint64_t seed = 0; seed < 200 && queries < 1000; ++seed) {
    AdversarialUniverse universe(derive_seed(0xADB0, "universe", seed), acfg);
    Dataset train = generate_adversarial_dataset(derive_seed(0xADB0, "data", seed));

    run_with(universe, train, [&](const WeakLearner& weak) {
      BoostConfig cfg;
      cfg.rounds = 300;
      try {
        adaboost(train, weak, cfg);
      } catch (const std::runtime_error&) {
        // a first-round contract failure still counts as queries issued
      }
    });

    if (queries < 1000) {
      run_with(universe, train, [&](const WeakLearner& weak) {
        MetaConfig cfg;
        cfg.k = 5;
        cfg.boost.rounds = 300;
        cfg.master_seed = seed;
        try {
          majority_of_k(train, weak, cfg);
        } catch (const std::runtime_error&) {
        }
      });
    }
  }

  c.require(queries >= 1000, "only " + std::to_string(queries) + " queries generated");
  if (c.ok) {
    c.detail = std::to_string(queries) + " queries, " + std::to_string(non_fallback) +
               " non-fallback";
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Bagging statistics: 50 bags of exactly round(0.95 * 10000) draws; the
//    mean distinct-row fraction sits within 0.05 of 1 - e^(-0.95).
Check criterion_bagging_statistics() {
  Check c;
  const std::size_t m = 10000;
  const int bags = 50;
  double mean_distinct = 0.0;
  for (int t = 0; t < bags; ++t) {
    IndexSet bag = bag_indices(m, 0.95, derive_seed(0xBA66, "bag", t));
    c.require(bag.size() == 9500,
              "bag " + std::to_string(t) + " has " + std::to_string(bag.size()) +
                  " draws instead of 9500");
    std::set<std::size_t> distinct(bag.begin(), bag.end());
    mean_distinct += static_cast<double>(distinct.size()) / static_cast<double>(m);
  }
  mean_distinct /= bags;
  const double analytic = 1.0 - std::exp(-0.95);
  c.require(std::abs(mean_distinct - analytic) <= 0.05,
            "mean distinct fraction " + std::to_string(mean_distinct) +
                " outside " + std::to_string(analytic) + " +/- 0.05");
  if (c.ok) c.detail = "mean distinct fraction " + std::to_string(mean_distinct);
  return c;
}

ExperimentPlan fixture_plan() {
  ExperimentPlan plan;
  DatasetSpec ds;
  ds.id = "synth-diabetes";
  ds.kind = DatasetSpec::Kind::synthetic;
  ds.synth.rows = 768;
  ds.synth.features = 8;
  ds.synth.vote_features = 3;
  ds.synth.noise = 0.05;
  ds.synth.seed = 0xD1AB;
  plan.datasets = {ds};
  return plan;
}

// ---------------------------------------------------------------------------
// 7. Determinism: the same sweep plan with 1 worker and with 8 workers
//    produces byte-identical results CSVs (timing zeroed).
Check criterion_parallel_determinism() {
  Check c;
  ExperimentPlan plan = fixture_plan();
  plan.k_values = {3, 5};
  plan.seeds = {0, 1};
  plan.rounds = 50;
  plan.record_timing = false;

  auto csv_for = [&](unsigned workers) {
    plan.workers = workers;
    auto rows = run_experiment(plan);
    std::ostringstream out;
    write_results_csv(out, rows);
    return out.str();
  };

  const std::string serial = csv_for(1);
  const std::string parallel = csv_for(8);
  c.require(!serial.empty() && serial == parallel,
            "results CSVs differ between 1 and 8 workers");
  for (const auto& row : run_experiment(plan)) {
    c.require(row.ok(), "cell failed: " + row.error);
  }
  if (c.ok) c.detail = std::to_string(serial.size()) + " identical bytes";
  return c;
}

// ---------------------------------------------------------------------------
// 8. Experiment shape at Diabetes scale: the bundled 768x8 synthetic run
//    emits the full dataset x algorithm x k x seed grid with 5-seed means.
//    (Commands for the real datasets are documented in the README.)
Check criterion_experiment_shape() {
  Check c;
  ExperimentPlan plan = fixture_plan();
  plan.k_values = {3, 5, 7};
  plan.seeds = {0, 1, 2, 3, 4};
  plan.rounds = 60;
  plan.workers = 2;
  plan.record_timing = true;

  auto rows = run_experiment(plan);
  const std::size_t expected_rows = 5 * 1 + 3 * 3 * 5;  // adaboost + 3 algos x 3 k x 5 seeds
  c.require(rows.size() == expected_rows,
            std::to_string(rows.size()) + " rows instead of " +
                std::to_string(expected_rows));

  std::set<std::string> seen_cells;
  for (const auto& r : rows) {
    c.require(r.ok(), r.algorithm + "/k=" + std::to_string(r.k) + " failed: " + r.error);
    c.require(r.test_accuracy >= 0.0 && r.test_accuracy <= 1.0, "accuracy out of range");
    seen_cells.insert(r.algorithm + "/" + std::to_string(r.k) + "/" +
                      std::to_string(r.seed));
  }
  c.require(seen_cells.size() == expected_rows, "duplicate cells in the grid");

  auto summary = summarize(rows);
  c.require(summary.size() == 1 + 3 * 3, "summary has " + std::to_string(summary.size()) +
                                             " groups instead of 10");
  for (const auto& s : summary) {
    c.require(s.runs == 5, s.algorithm + "/k=" + std::to_string(s.k) + " aggregated " +
                               std::to_string(s.runs) + " runs instead of 5");
  }

  std::ofstream results_out("acceptance_results.csv");
  write_results_csv(results_out, rows);
  std::ofstream summary_out("acceptance_summary.csv");
  write_summary_csv(summary_out, summary);
  if (c.ok) {
    double best = 0.0;
    std::string best_name;
    for (const auto& s : summary) {
      if (s.mean_accuracy > best) {
        best = s.mean_accuracy;
        best_name = s.algorithm + "/k=" + std::to_string(s.k);
      }
    }
    c.detail = "50 rows, 10 groups; best " + best_name + " at " + std::to_string(best);
  }
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "sub-sampling combinatorics", criterion_subsample},
      {2, "stump oracle equivalence", criterion_stump_oracle},
      {3, "adaboost identities and margins", criterion_adaboost_identities},
      {4, "majority-of-5 error scaling", criterion_scaling},
      {5, "adversarial weak-learner contract", criterion_adversarial_contract},
      {6, "bagging statistics", criterion_bagging_statistics},
      {7, "parallel determinism", criterion_parallel_determinism},
      {8, "experiment grid shape", criterion_experiment_shape},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check result = criterion.run();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %d: %s%s%s (%.1fs)\n", result.ok ? "PASS" : "FAIL",
                criterion.number, criterion.name,
                result.detail.empty() ? "" : " -- ", result.detail.c_str(), elapsed);
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  } else {
    std::printf("all %zu criteria passed\n", criteria.size());
  }
  return failures;
}
