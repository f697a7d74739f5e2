#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "boostlab/adversarial.hpp"
#include "boostlab/core.hpp"
#include "boostlab/csv.hpp"
#include "boostlab/meta.hpp"
#include "boostlab/parallel.hpp"
#include "boostlab/stump.hpp"
#include "boostlab/synthetic.hpp"

namespace boostlab {

inline constexpr const char* kAlgoAdaBoost = "adaboost";
inline constexpr const char* kAlgoMajorityOfK = "majority_of_k";
inline constexpr const char* kAlgoLarsenRitzert = "larsen_ritzert";
inline constexpr const char* kAlgoBaggedAdaBoost = "bagged_adaboost";

inline bool is_known_algorithm(const std::string& name) {
  return name == kAlgoAdaBoost || name == kAlgoMajorityOfK ||
         name == kAlgoLarsenRitzert || name == kAlgoBaggedAdaBoost;
}

// One data source of an experiment plan. CSV paths resolve against
// BOOSTLAB_DATA_DIR when relative and the variable is set.
struct DatasetSpec {
  enum class Kind { csv, synthetic, adversarial };

  std::string id;
  Kind kind = Kind::csv;
  double test_fraction = 0.2;

  // kind == csv
  std::string path;
  std::optional<std::size_t> label_column;  // empty: last column
  double positive_label = 1.0;

  // kind == synthetic
  SyntheticSpec synth{};

  // kind == adversarial
  AdversarialConfig adversarial{};
  std::size_t adversarial_rows = 1024;
};

struct ExperimentPlan {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> algorithms{kAlgoAdaBoost, kAlgoMajorityOfK,
                                      kAlgoLarsenRitzert, kAlgoBaggedAdaBoost};
  std::vector<int> k_values{3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t rounds = 300;
  double bag_fraction = 0.95;
  unsigned workers = 0;       // 0: hardware concurrency
  bool record_timing = true;  // false writes wall_time_seconds as 0.0

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentPlan from_json(const nlohmann::json& j);
};

struct ResultRow {
  std::string dataset;
  std::string algorithm;
  int k = 0;  // 0 for k-independent algorithms (plain adaboost)
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double wall_time_seconds = 0.0;
  double min_train_margin = std::numeric_limits<double>::quiet_NaN();
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct SummaryRow {
  std::string dataset;
  std::string algorithm;
  int k = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population standard deviation
  std::size_t runs = 0;
};

// Aggregate weak-learner behavior over a run (adversarial cells only).
struct RunStats {
  std::uint64_t adversarial_queries = 0;
  std::uint64_t h0_fallbacks = 0;
  std::uint64_t short_probe_sets = 0;
  std::uint64_t fallback_contract_violations = 0;
};

using RowCallback = std::function<void(const ResultRow&)>;

// Relative dataset paths resolve against BOOSTLAB_DATA_DIR when the variable
// is set and the file exists there; otherwise they are taken as given.
inline std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.is_absolute()) return path;
  if (const char* root = std::getenv("BOOSTLAB_DATA_DIR")) {
    fs::path candidate = fs::path(root) / p;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

namespace detail {

// Shortest round-trip decimal form; keeps result CSVs byte-stable.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline void require_csv_safe(const std::string& value, const char* what) {
  if (value.find(',') != std::string::npos ||
      value.find('\n') != std::string::npos) {
    throw std::invalid_argument(std::string(what) + " must not contain commas or newlines: '" +
                                value + "'");
  }
}

}  // namespace detail

inline void ExperimentPlan::validate() const {
  if (datasets.empty()) throw std::invalid_argument("plan: no datasets");
  if (algorithms.empty()) throw std::invalid_argument("plan: no algorithms");
  if (seeds.empty()) throw std::invalid_argument("plan: no seeds");
  if (rounds < 1) throw std::invalid_argument("plan: rounds must be >= 1");
  if (!(bag_fraction > 0.0) || bag_fraction > 1.0) {
    throw std::invalid_argument("plan: bag_fraction must lie in (0, 1]");
  }
  bool needs_k = false;
  for (const auto& a : algorithms) {
    if (!is_known_algorithm(a)) {
      throw std::invalid_argument("plan: unknown algorithm '" + a + "'");
    }
    if (a != kAlgoAdaBoost) needs_k = true;
  }
  if (needs_k && k_values.empty()) {
    throw std::invalid_argument("plan: k_values empty but a k-dependent algorithm is listed");
  }
  for (int k : k_values) {
    if (k < 1) throw std::invalid_argument("plan: k values must be >= 1");
  }
  for (const auto& d : datasets) {
    if (d.id.empty()) throw std::invalid_argument("plan: dataset with empty id");
    detail::require_csv_safe(d.id, "dataset id");
    if (!(d.test_fraction > 0.0) || !(d.test_fraction < 1.0)) {
      throw std::invalid_argument("plan: test_fraction must lie in (0, 1)");
    }
    if (d.kind == DatasetSpec::Kind::csv && d.path.empty()) {
      throw std::invalid_argument("plan: csv dataset '" + d.id + "' has no path");
    }
    if (d.kind == DatasetSpec::Kind::synthetic) d.synth.validate();
    if (d.kind == DatasetSpec::Kind::adversarial) d.adversarial.validate();
  }
}

inline nlohmann::json ExperimentPlan::to_json() const {
  nlohmann::json datasets_json = nlohmann::json::array();
  for (const auto& d : datasets) {
    nlohmann::json dj{{"id", d.id}, {"test_fraction", d.test_fraction}};
    switch (d.kind) {
      case DatasetSpec::Kind::csv:
        dj["kind"] = "csv";
        dj["path"] = d.path;
        dj["positive_label"] = d.positive_label;
        if (d.label_column) dj["label_column"] = *d.label_column;
        break;
      case DatasetSpec::Kind::synthetic:
        dj["kind"] = "synthetic";
        dj["rows"] = d.synth.rows;
        dj["features"] = d.synth.features;
        dj["vote_features"] = d.synth.vote_features;
        dj["noise"] = d.synth.noise;
        dj["seed"] = d.synth.seed;
        break;
      case DatasetSpec::Kind::adversarial:
        dj["kind"] = "adversarial";
        dj["gamma"] = d.adversarial.gamma;
        dj["pool_size"] = d.adversarial.pool_size;
        dj["domain_size"] = d.adversarial.domain_size;
        dj["rows"] = d.adversarial_rows;
        break;
    }
    datasets_json.push_back(dj);
  }
  return {{"datasets", datasets_json}, {"algorithms", algorithms},
          {"k_values", k_values},      {"seeds", seeds},
          {"rounds", rounds},          {"bag_fraction", bag_fraction},
          {"workers", workers},        {"record_timing", record_timing}};
}

inline ExperimentPlan ExperimentPlan::from_json(const nlohmann::json& j) {
  ExperimentPlan plan;
  plan.datasets.clear();
  for (const auto& dj : j.at("datasets")) {
    DatasetSpec d;
    d.id = dj.at("id").get<std::string>();
    d.test_fraction = dj.value("test_fraction", 0.2);
    const std::string kind = dj.value("kind", std::string("csv"));
    if (kind == "csv") {
      d.kind = DatasetSpec::Kind::csv;
      d.path = dj.at("path").get<std::string>();
      d.positive_label = dj.value("positive_label", 1.0);
      if (dj.contains("label_column")) d.label_column = dj["label_column"].get<std::size_t>();
    } else if (kind == "synthetic") {
      d.kind = DatasetSpec::Kind::synthetic;
      d.synth.rows = dj.value("rows", std::size_t{768});
      d.synth.features = dj.value("features", std::size_t{8});
      d.synth.vote_features = dj.value("vote_features", std::size_t{3});
      d.synth.noise = dj.value("noise", 0.05);
      d.synth.seed = dj.value("seed", std::uint64_t{0});
    } else if (kind == "adversarial") {
      d.kind = DatasetSpec::Kind::adversarial;
      d.adversarial.gamma = dj.value("gamma", 0.1);
      d.adversarial.pool_size = dj.value("pool_size", std::size_t{100});
      d.adversarial.domain_size = dj.value("domain_size", std::size_t{350});
      d.adversarial_rows = dj.value("rows", std::size_t{1024});
    } else {
      throw std::invalid_argument("plan: unknown dataset kind '" + kind + "'");
    }
    plan.datasets.push_back(std::move(d));
  }
  if (j.contains("algorithms")) plan.algorithms = j["algorithms"].get<std::vector<std::string>>();
  if (j.contains("k_values")) plan.k_values = j["k_values"].get<std::vector<int>>();
  if (j.contains("seeds")) plan.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  plan.rounds = j.value("rounds", std::size_t{300});
  plan.bag_fraction = j.value("bag_fraction", 0.95);
  plan.workers = j.value("workers", 0u);
  plan.record_timing = j.value("record_timing", true);
  return plan;
}

namespace detail {

struct Cell {
  std::size_t dataset_index;
  std::string algorithm;
  int k;  // 0 for adaboost
  std::uint64_t seed;
};

inline std::vector<Cell> enumerate_cells(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    for (const auto& algo : plan.algorithms) {
      if (algo == kAlgoAdaBoost) {
        for (auto seed : plan.seeds) cells.push_back({d, algo, 0, seed});
      } else {
        for (int k : plan.k_values) {
          for (auto seed : plan.seeds) cells.push_back({d, algo, k, seed});
        }
      }
    }
  }
  return cells;
}

// Minimum over members of each member's min margin on its own training rows.
inline double ensemble_min_train_margin(const MetaResult& result, const Dataset& train) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < result.ensemble.size(); ++j) {
    Dataset member_data = train.subset(result.member_train_sets[j]);
    lo = std::min(lo, margins(result.ensemble.voters()[j], member_data).min_margin);
  }
  return lo;
}

}  // namespace detail

// Executes every (dataset, algorithm, k, seed) cell of the plan. Rows come
// back in plan order regardless of the worker count, and the callback (when
// given) sees them in that order as soon as they are final. A failing cell
// produces a row with `error` set and NaN metrics; the run continues.
inline std::vector<ResultRow> run_experiment(const ExperimentPlan& plan,
                                             const RowCallback& on_row = {},
                                             RunStats* stats_out = nullptr) {
  plan.validate();

  struct PreparedDataset {
    std::optional<Dataset> data;  // empty for adversarial (generated per seed)
    std::string load_error;
  };

  // Load every referenced dataset once, upfront.
  std::vector<PreparedDataset> prepared(plan.datasets.size());
  for (std::size_t d = 0; d < plan.datasets.size(); ++d) {
    const DatasetSpec& spec = plan.datasets[d];
    try {
      switch (spec.kind) {
        case DatasetSpec::Kind::csv: {
          CsvOptions opts;
          opts.label_column = spec.label_column;
          prepared[d].data =
              load_csv(resolve_data_path(spec.path), spec.positive_label, opts);
          break;
        }
        case DatasetSpec::Kind::synthetic:
          prepared[d].data = make_synthetic(spec.synth);
          break;
        case DatasetSpec::Kind::adversarial:
          break;  // generated inside each cell
      }
    } catch (const std::exception& e) {
      prepared[d].load_error = e.what();
    }
  }

  const std::vector<detail::Cell> cells = detail::enumerate_cells(plan);
  std::vector<ResultRow> rows(cells.size());
  std::vector<char> done(cells.size(), 0);
  std::size_t flushed = 0;
  std::mutex emit_mutex;
  std::mutex stats_mutex;
  RunStats stats;

  auto run_cell = [&](std::size_t index) {
    const detail::Cell& cell = cells[index];
    const DatasetSpec& spec = plan.datasets[cell.dataset_index];
    ResultRow row;
    row.dataset = spec.id;
    row.algorithm = cell.algorithm;
    row.k = cell.k;
    row.seed = cell.seed;

    try {
      const PreparedDataset& source = prepared[cell.dataset_index];
      if (!source.load_error.empty()) throw std::runtime_error(source.load_error);

      MetaConfig cfg;
      cfg.k = cell.k > 0 ? static_cast<std::size_t>(cell.k) : 1;
      cfg.boost.rounds = plan.rounds;
      cfg.bag_fraction = plan.bag_fraction;
      if (cell.k > 0) {
        cfg.bag_count = static_cast<std::size_t>(cell.k);  // the sweep's K doubles as bag count
        cfg.lr_cap = static_cast<std::size_t>(cell.k);
      }
      cfg.master_seed =
          derive_seed(cell.seed, cell.algorithm + ":" + spec.id,
                      static_cast<std::uint64_t>(cell.k));
      cfg.workers = 1;  // parallelism lives at the cell level

      std::optional<AdversarialUniverse> universe;
      WeakLearner weak;
      std::optional<Dataset> train;
      std::optional<Dataset> test;

      if (spec.kind == DatasetSpec::Kind::adversarial) {
        universe.emplace(derive_seed(cell.seed, spec.id + "/universe"), spec.adversarial);
        weak = universe->learner();
        train = generate_adversarial_dataset(derive_seed(cell.seed, spec.id + "/train"),
                                             spec.adversarial_rows,
                                             spec.adversarial.domain_size);
        test = generate_adversarial_dataset(derive_seed(cell.seed, spec.id + "/test"),
                                            spec.adversarial_rows,
                                            spec.adversarial.domain_size);
      } else {
        weak = stump_learner();
        SplitSpec split_spec{spec.test_fraction,
                             derive_seed(cell.seed, spec.id + "/split")};
        auto [tr, te] = split(*source.data, split_spec);
        train = std::move(tr);
        test = std::move(te);
      }
      row.train_size = train->rows();

      const auto started = std::chrono::steady_clock::now();
      double accuracy = 0.0;
      double min_margin = 0.0;
      if (cell.algorithm == kAlgoAdaBoost) {
        BoostResult result = adaboost(*train, weak, cfg.boost);
        min_margin = training_margin_profile(result.voter, *train).min_margin;
        accuracy = 1.0 - test_error(result.voter, *test);
      } else {
        MetaResult result = [&] {
          if (cell.algorithm == kAlgoMajorityOfK) return majority_of_k(*train, weak, cfg);
          if (cell.algorithm == kAlgoLarsenRitzert) return larsen_ritzert(*train, weak, cfg);
          return bagged_adaboost(*train, weak, cfg);
        }();
        min_margin = detail::ensemble_min_train_margin(result, *train);
        accuracy = 1.0 - test_error(result.ensemble, *test);
      }
      const auto finished = std::chrono::steady_clock::now();

      row.test_accuracy = accuracy;
      row.min_train_margin = min_margin;
      row.wall_time_seconds =
          plan.record_timing ? std::chrono::duration<double>(finished - started).count()
                             : 0.0;

      if (universe) {
        auto u = universe->stats();
        std::lock_guard<std::mutex> lock(stats_mutex);
        stats.adversarial_queries += u.queries;
        stats.h0_fallbacks += u.h0_fallbacks;
        stats.short_probe_sets += u.short_probe_sets;
        stats.fallback_contract_violations += u.fallback_contract_violations;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      row.test_accuracy = std::numeric_limits<double>::quiet_NaN();
      row.min_train_margin = std::numeric_limits<double>::quiet_NaN();
      row.wall_time_seconds = 0.0;
    }

    std::lock_guard<std::mutex> lock(emit_mutex);
    rows[index] = std::move(row);
    done[index] = 1;
    while (flushed < rows.size() && done[flushed]) {
      if (on_row) on_row(rows[flushed]);
      ++flushed;
    }
  };

  parallel_for(cells.size(), plan.workers, run_cell);
  if (stats_out) *stats_out = stats;
  return rows;
}

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "dataset,algorithm,k,seed,train_size,test_accuracy,wall_time_seconds,"
         "min_train_margin\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.algorithm << ',' << r.k << ',' << r.seed << ','
        << r.train_size << ',' << detail::format_double(r.test_accuracy) << ','
        << detail::format_double(r.wall_time_seconds) << ','
        << detail::format_double(r.min_train_margin) << '\n';
  }
}

// Mean/stddev of test accuracy per dataset x algorithm x k over the
// successful rows, in first-appearance order. Stddev is the population form,
// zero for a single run.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  struct Accumulator {
    std::vector<double> values;
  };
  std::vector<SummaryRow> order;
  std::map<std::tuple<std::string, std::string, int>, Accumulator> groups;

  for (const auto& r : rows) {
    if (!r.ok()) continue;
    auto key = std::make_tuple(r.dataset, r.algorithm, r.k);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      SummaryRow s;
      s.dataset = r.dataset;
      s.algorithm = r.algorithm;
      s.k = r.k;
      order.push_back(s);
    }
    it->second.values.push_back(r.test_accuracy);
  }

  for (auto& s : order) {
    const auto& values =
        groups[std::make_tuple(s.dataset, s.algorithm, s.k)].values;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    s.mean_accuracy = mean;
    s.std_accuracy = std::sqrt(var);
    s.runs = values.size();
  }
  return order;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "dataset,algorithm,k,mean_accuracy,std_accuracy,runs\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.algorithm << ',' << r.k << ','
        << detail::format_double(r.mean_accuracy) << ','
        << detail::format_double(r.std_accuracy) << ',' << r.runs << '\n';
  }
}

}  // namespace boostlab
