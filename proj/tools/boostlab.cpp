// boostlab: weak-to-strong learning toolkit.
//
// Subcommands:
//   prep         dataset preparation (covertype, higgs, generic label mapping)
//   train        train a single model on a CSV file
//   sweep        run an experiment plan and write results + summary CSVs
//   adversarial  run the adversarial weak-learner benchmark
//   inspect      print ensemble structure and margin histograms
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "boostlab/boostlab.hpp"

namespace fs = std::filesystem;
using namespace boostlab;

namespace {

std::string resolve_algo(const std::string& name) {
  if (name == "adaboost") return kAlgoAdaBoost;
  if (name == "maj" || name == kAlgoMajorityOfK) return kAlgoMajorityOfK;
  if (name == "lr" || name == kAlgoLarsenRitzert) return kAlgoLarsenRitzert;
  if (name == "bag" || name == kAlgoBaggedAdaBoost) return kAlgoBaggedAdaBoost;
  throw CLI::ValidationError("--algo", "unknown algorithm '" + name + "'");
}

// "3:29:2" (from:to:step), "3,5,7", or a single value
std::vector<int> parse_k_values(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    int from = 0, to = 0, step = 1;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    in >> from >> c1 >> to;
    if (in >> c2 >> step) {
      // three-part range
    }
    if (!in.eof() || c1 != ':' || (c2 != 0 && c2 != ':') || step < 1 || to < from) {
      throw CLI::ValidationError("--k", "bad range '" + text + "' (expected from:to[:step])");
    }
    for (int k = from; k <= to; k += step) out.push_back(k);
    return out;
  }
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    out.push_back(std::stoi(token));
  }
  if (out.empty()) throw CLI::ValidationError("--k", "no k values given");
  return out;
}

// a single count N means seeds 0..N-1; a comma list is taken verbatim
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(',') != std::string::npos) {
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) out.push_back(std::stoull(token));
    return out;
  }
  std::uint64_t count = std::stoull(text);
  if (count == 0) throw CLI::ValidationError("--seeds", "need at least one seed");
  for (std::uint64_t s = 0; s < count; ++s) out.push_back(s);
  return out;
}

std::optional<std::size_t> parse_label_column(const std::string& text) {
  if (text.empty() || text == "last") return std::nullopt;
  return static_cast<std::size_t>(std::stoul(text));
}

void write_sweep_outputs(const ExperimentPlan& plan, const std::string& results_path,
                         const std::string& summary_path) {
  std::ofstream results_out(results_path);
  if (!results_out) throw std::runtime_error("cannot write " + results_path);

  // plan echo alongside the results, for provenance
  const std::string plan_echo = results_path + ".plan.json";
  {
    std::ofstream plan_out(plan_echo);
    if (!plan_out) throw std::runtime_error("cannot write " + plan_echo);
    plan_out << plan.to_json().dump(2) << '\n';
  }

  RunStats stats;
  std::vector<ResultRow> rows = run_experiment(plan, {}, &stats);
  write_results_csv(results_out, rows);

  std::ofstream summary_out(summary_path);
  if (!summary_out) throw std::runtime_error("cannot write " + summary_path);
  write_summary_csv(summary_out, summarize(rows));

  std::size_t failures = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++failures;
      std::cerr << "cell failed: " << r.dataset << "/" << r.algorithm << "/k=" << r.k
                << "/seed=" << r.seed << ": " << r.error << "\n";
    }
  }
  std::cerr << rows.size() << " cells (" << failures << " failed) -> " << results_path
            << ", " << summary_path << "\n";
  if (stats.adversarial_queries > 0) {
    std::cerr << "adversarial queries: " << stats.adversarial_queries
              << ", h0 fallbacks: " << stats.h0_fallbacks
              << ", short probe sets: " << stats.short_probe_sets
              << ", fallback contract violations: " << stats.fallback_contract_violations
              << "\n";
  }
}

struct TrainArgs {
  std::string data_path;
  std::string test_path;
  std::string algo = "adaboost";
  std::string label_column = "last";
  double positive_label = 1.0;
  int k = 5;
  std::size_t rounds = 300;
  std::uint64_t seed = 0;
  double bag_fraction = 0.95;
  std::optional<std::size_t> bag_count;
  std::optional<std::size_t> lr_cap;
  unsigned workers = 1;
  std::string model_out;
  std::string trace_out;
};

int run_train(const TrainArgs& args) {
  CsvOptions opts;
  opts.label_column = parse_label_column(args.label_column);
  Dataset train = load_csv(resolve_data_path(args.data_path), args.positive_label, opts);

  const std::string algo = resolve_algo(args.algo);
  MetaConfig cfg;
  cfg.k = static_cast<std::size_t>(args.k);
  cfg.boost.rounds = args.rounds;
  cfg.bag_fraction = args.bag_fraction;
  // single-model training follows the sweep convention: k bags, k sub-samples
  cfg.bag_count = args.bag_count ? args.bag_count : cfg.k;
  cfg.lr_cap = args.lr_cap ? args.lr_cap : cfg.k;
  cfg.master_seed = args.seed;
  cfg.workers = args.workers;

  std::optional<Ensemble> model;
  if (algo == kAlgoAdaBoost) {
    BoostResult result = adaboost(train, stump_learner(), cfg.boost);
    const auto& trace = result.trace;
    auto profile = training_margin_profile(result.voter, train);
    std::cerr << "adaboost: " << trace.rounds.size() << " rounds on " << train.rows()
              << " rows, final epsilon "
              << (trace.rounds.empty() ? 0.0 : trace.rounds.back().epsilon)
              << ", min train margin " << profile.min_margin << "\n";
    if (!args.trace_out.empty()) {
      std::ofstream out(args.trace_out);
      if (!out) throw std::runtime_error("cannot write " + args.trace_out);
      trace.write_csv(out);
    }
    model.emplace(std::vector<Voter>{result.voter});
  } else {
    if (!args.trace_out.empty()) {
      throw std::runtime_error("--trace is only available with --algo adaboost");
    }
    MetaResult result = [&] {
      if (algo == kAlgoMajorityOfK) return majority_of_k(train, stump_learner(), cfg);
      if (algo == kAlgoLarsenRitzert) return larsen_ritzert(train, stump_learner(), cfg);
      return bagged_adaboost(train, stump_learner(), cfg);
    }();
    std::cerr << algo << ": " << result.ensemble.size() << " voters, member sizes";
    for (const auto& s : result.member_train_sets) std::cerr << ' ' << s.size();
    std::cerr << "\n";
    model.emplace(result.ensemble);
  }

  if (!args.model_out.empty()) {
    save_model(args.model_out, *model, algo);
    std::cerr << "model written to " << args.model_out << "\n";
  }
  if (!args.test_path.empty()) {
    Dataset test = load_csv(resolve_data_path(args.test_path), args.positive_label, opts);
    double accuracy = 1.0 - test_error(*model, test);
    std::cout << "test_accuracy " << accuracy << "\n";
  }
  return 0;
}

int run_inspect(const std::string& model_path, const std::string& data_path,
                const std::string& label_column, double positive_label) {
  ModelFile model = load_model(resolve_data_path(model_path));
  const auto& voters = model.ensemble.voters();
  std::cout << "algorithm: " << (model.algorithm.empty() ? "unknown" : model.algorithm)
            << "\nvoters: " << voters.size() << "\n";
  for (std::size_t v = 0; v < voters.size(); ++v) {
    const auto& terms = voters[v].terms();
    std::cout << "  voter " << v << ": " << terms.size() << " terms, coefficient mass "
              << voters[v].coefficient_sum() << "\n";
    const std::size_t show = std::min<std::size_t>(terms.size(), 3);
    for (std::size_t t = 0; t < show; ++t) {
      std::cout << "    [" << terms[t].coefficient << "] "
                << terms[t].hypothesis->describe() << "\n";
    }
    if (terms.size() > show) {
      std::cout << "    ... " << (terms.size() - show) << " more\n";
    }
  }

  if (!data_path.empty()) {
    CsvOptions opts;
    opts.label_column = parse_label_column(label_column);
    Dataset data = load_csv(resolve_data_path(data_path), positive_label, opts);

    // margin histogram over all (voter, row) pairs, 10 bins across [-1, 1]
    std::array<std::size_t, 10> bins{};
    double global_min = 1.0;
    for (std::size_t v = 0; v < voters.size(); ++v) {
      auto report = margins(voters[v], data);
      global_min = std::min(global_min, report.min_margin);
      for (double m : report.margins) {
        auto bin = static_cast<std::size_t>((m + 1.0) / 0.2);
        bins[std::min<std::size_t>(bin, 9)]++;
      }
      std::cout << "  voter " << v << " min margin " << report.min_margin
                << ", fraction below 0.05: " << report.fraction_below(0.05) << "\n";
    }
    std::cout << "margin histogram on " << data.rows() << " rows:\n";
    for (std::size_t b = 0; b < bins.size(); ++b) {
      double lo = (static_cast<double>(b) - 5.0) / 5.0;
      double hi = (static_cast<double>(b) - 4.0) / 5.0;
      std::cout << "  [" << lo << ", " << hi << (b + 1 == bins.size() ? "]" : ")")
                << " " << bins[b] << "\n";
    }
    std::cout << "min margin " << global_min << "\n";
    std::cout << "ensemble accuracy " << 1.0 - test_error(model.ensemble, data) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boostlab: AdaBoost and sample-optimal weak-to-strong meta-boosters"};
  app.require_subcommand(1);

  // ---- prep ----
  auto* prep = app.add_subcommand("prep", "prepare a raw CSV for training");
  std::string prep_kind = "generic";
  std::string prep_in, prep_out;
  std::string prep_label_col = "last";
  double prep_positive = 1.0;
  std::size_t higgs_limit = 300000;
  prep->add_option("--dataset", prep_kind, "covertype | higgs | generic")
      ->check(CLI::IsMember({"covertype", "higgs", "generic"}));
  prep->add_option("--in", prep_in, "input CSV")->required();
  prep->add_option("--out", prep_out, "output CSV (features..., label +/-1)")->required();
  prep->add_option("--label-col", prep_label_col, "label column index or 'last'");
  prep->add_option("--positive", prep_positive, "raw label mapped to +1 (generic/higgs)");
  prep->add_option("--limit", higgs_limit, "row limit for higgs truncation");

  // ---- train ----
  auto* train = app.add_subcommand("train", "train one model on a CSV file");
  TrainArgs targs;
  train->add_option("--data", targs.data_path, "training CSV")->required();
  train->add_option("--test", targs.test_path, "held-out CSV; prints test accuracy");
  train->add_option("--algo", targs.algo, "adaboost | maj | lr | bag");
  train->add_option("--k", targs.k, "ensemble size for maj/lr/bag")->check(CLI::PositiveNumber);
  train->add_option("--rounds", targs.rounds, "boosting rounds per voter");
  train->add_option("--seed", targs.seed, "master seed");
  train->add_option("--bag-fraction", targs.bag_fraction, "bag size as a fraction of m");
  std::size_t bag_count_flag = 0, lr_cap_flag = 0;
  train->add_option("--bag-count", bag_count_flag, "bags to draw (default: k)");
  train->add_option("--lr-cap", lr_cap_flag, "cap on trained sub-samples (default: k)");
  train->add_option("--label-col", targs.label_column, "label column index or 'last'");
  train->add_option("--positive", targs.positive_label, "raw label mapped to +1");
  train->add_option("--workers", targs.workers, "threads for member training");
  train->add_option("--out", targs.model_out, "model JSON output path");
  train->add_option("--trace", targs.trace_out, "boosting trace CSV (adaboost only)");

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "run an experiment plan");
  std::string plan_path;
  std::vector<std::string> sweep_datasets;
  std::vector<std::string> sweep_algos;
  std::string sweep_k = "3:29:2";
  std::string sweep_seeds = "5";
  std::size_t sweep_rounds = 300;
  double sweep_bag_fraction = 0.95;
  double sweep_gamma = 0.1;
  std::size_t sweep_pool = 100;
  double sweep_test_fraction = 0.2;
  double sweep_noise = 0.05;
  std::string sweep_label_col = "last";
  double sweep_positive = 1.0;
  std::string results_path = "results.csv";
  std::string summary_path;
  unsigned sweep_workers = 0;
  bool no_timing = false;
  sweep->add_option("--plan", plan_path, "experiment plan JSON (overrides inline flags)");
  sweep->add_option("--datasets", sweep_datasets,
                    "dataset list: synth[:RxC] | adversarial | csv paths")
      ->delimiter(',');
  sweep->add_option("--algos", sweep_algos, "adaboost,maj,lr,bag")->delimiter(',');
  sweep->add_option("--k", sweep_k, "k values: from:to[:step] or comma list");
  sweep->add_option("--seeds", sweep_seeds, "seed count N (0..N-1) or comma list");
  sweep->add_option("--rounds", sweep_rounds, "boosting rounds");
  sweep->add_option("--bag-fraction", sweep_bag_fraction, "bagging fraction");
  sweep->add_option("--gamma", sweep_gamma, "adversarial gamma");
  sweep->add_option("--pool", sweep_pool, "adversarial pool size");
  sweep->add_option("--test-fraction", sweep_test_fraction, "held-out fraction");
  sweep->add_option("--noise", sweep_noise, "synthetic label noise");
  sweep->add_option("--label-col", sweep_label_col, "label column for csv datasets");
  sweep->add_option("--positive", sweep_positive, "positive label for csv datasets");
  sweep->add_option("--out", results_path, "results CSV path");
  sweep->add_option("--summary", summary_path, "summary CSV path (default: <out>.summary.csv)");
  sweep->add_option("--workers", sweep_workers, "parallel cells (0 = hardware)");
  sweep->add_flag("--no-timing", no_timing, "write 0.0 wall times (deterministic output)");

  // ---- adversarial ----
  auto* adv = app.add_subcommand("adversarial", "run the adversarial benchmark");
  double adv_gamma = 0.1;
  std::size_t adv_pool = 100;
  std::size_t adv_rows = 1024;
  std::vector<std::string> adv_algos;
  std::string adv_k = "3:29:2";
  std::string adv_seeds = "5";
  std::size_t adv_rounds = 300;
  std::string adv_out = "adversarial_results.csv";
  std::string adv_summary;
  unsigned adv_workers = 0;
  bool adv_no_timing = false;
  adv->add_option("--gamma", adv_gamma, "weak learner advantage, in (0, 0.5)");
  adv->add_option("--pool", adv_pool, "random hypothesis pool size");
  adv->add_option("--rows", adv_rows, "training rows to draw");
  adv->add_option("--algos", adv_algos, "adaboost,maj,lr,bag")->delimiter(',');
  adv->add_option("--k", adv_k, "k values: from:to[:step] or comma list");
  adv->add_option("--seeds", adv_seeds, "seed count N or comma list");
  adv->add_option("--rounds", adv_rounds, "boosting rounds");
  adv->add_option("--out", adv_out, "results CSV path");
  adv->add_option("--summary", adv_summary, "summary CSV path");
  adv->add_option("--workers", adv_workers, "parallel cells (0 = hardware)");
  adv->add_flag("--no-timing", adv_no_timing, "write 0.0 wall times");

  // ---- inspect ----
  auto* inspect = app.add_subcommand("inspect", "describe a model file");
  std::string inspect_model, inspect_data;
  std::string inspect_label_col = "last";
  double inspect_positive = 1.0;
  inspect->add_option("--model", inspect_model, "model JSON path")->required();
  inspect->add_option("--data", inspect_data, "CSV for margin histograms");
  inspect->add_option("--label-col", inspect_label_col, "label column index or 'last'");
  inspect->add_option("--positive", inspect_positive, "raw label mapped to +1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit cleanly, usage errors exit 2
  }

  try {
    if (prep->parsed()) {
      CsvOptions opts;
      opts.label_column = parse_label_column(prep_label_col);
      const std::string in_path = resolve_data_path(prep_in);
      if (prep_kind == "covertype") {
        write_csv(prepare_covertype(load_raw_csv(in_path, opts)), prep_out);
      } else if (prep_kind == "higgs") {
        opts.max_rows = higgs_limit;  // avoid loading the full 11M-row file
        write_csv(truncate_higgs(load_csv(in_path, prep_positive, opts), higgs_limit),
                  prep_out);
      } else {
        write_csv(load_csv(in_path, prep_positive, opts), prep_out);
      }
      std::cerr << "prepared dataset written to " << prep_out << "\n";
      return 0;
    }

    if (train->parsed()) {
      if (bag_count_flag > 0) targs.bag_count = bag_count_flag;
      if (lr_cap_flag > 0) targs.lr_cap = lr_cap_flag;
      return run_train(targs);
    }

    if (sweep->parsed()) {
      ExperimentPlan plan;
      if (!plan_path.empty()) {
        std::ifstream in(plan_path);
        if (!in) {
          std::cerr << "error: cannot open plan file " << plan_path << "\n";
          return 2;
        }
        nlohmann::json j;
        try {
          in >> j;
          plan = ExperimentPlan::from_json(j);
        } catch (const std::exception& e) {
          std::cerr << "error: unreadable plan: " << e.what() << "\n";
          return 2;
        }
      } else {
        if (sweep_datasets.empty()) {
          std::cerr << "error: either --plan or --datasets is required\n";
          return 2;
        }
        plan.datasets.clear();
        for (const auto& token : sweep_datasets) {
          DatasetSpec ds;
          ds.test_fraction = sweep_test_fraction;
          if (token == "synth" || token.rfind("synth:", 0) == 0) {
            ds.kind = DatasetSpec::Kind::synthetic;
            ds.id = "synth";
            ds.synth.noise = sweep_noise;
            if (auto pos = token.find(':'); pos != std::string::npos) {
              std::size_t rows = 0, cols = 0;
              char x = 0;
              std::istringstream dims(token.substr(pos + 1));
              dims >> rows >> x >> cols;
              if (!dims || x != 'x' || rows == 0 || cols == 0) {
                std::cerr << "error: bad synthetic spec '" << token << "'\n";
                return 2;
              }
              ds.synth.rows = rows;
              ds.synth.features = cols;
              ds.id = "synth-" + std::to_string(rows) + "x" + std::to_string(cols);
            }
          } else if (token == "adversarial") {
            ds.kind = DatasetSpec::Kind::adversarial;
            ds.id = "adversarial";
            ds.adversarial.gamma = sweep_gamma;
            ds.adversarial.pool_size = sweep_pool;
          } else {
            ds.kind = DatasetSpec::Kind::csv;
            ds.path = token;
            ds.id = fs::path(token).stem().string();
            ds.label_column = parse_label_column(sweep_label_col);
            ds.positive_label = sweep_positive;
          }
          plan.datasets.push_back(std::move(ds));
        }
        if (!sweep_algos.empty()) {
          plan.algorithms.clear();
          for (const auto& a : sweep_algos) plan.algorithms.push_back(resolve_algo(a));
        }
        plan.k_values = parse_k_values(sweep_k);
        plan.seeds = parse_seeds(sweep_seeds);
        plan.rounds = sweep_rounds;
        plan.bag_fraction = sweep_bag_fraction;
        plan.workers = sweep_workers;
      }
      // flags override a loaded plan only when given explicitly
      if (sweep->count("--workers")) plan.workers = sweep_workers;
      if (no_timing) plan.record_timing = false;
      if (summary_path.empty()) summary_path = results_path + ".summary.csv";
      write_sweep_outputs(plan, results_path, summary_path);
      return 0;
    }

    if (adv->parsed()) {
      if (!(adv_gamma > 0.0) || !(adv_gamma < 0.5)) {
        std::cerr << "error: --gamma must lie in (0, 0.5)\n";
        return 2;
      }
      ExperimentPlan plan;
      DatasetSpec ds;
      ds.id = "adversarial";
      ds.kind = DatasetSpec::Kind::adversarial;
      ds.adversarial.gamma = adv_gamma;
      ds.adversarial.pool_size = adv_pool;
      ds.adversarial_rows = adv_rows;
      plan.datasets = {ds};
      if (!adv_algos.empty()) {
        plan.algorithms.clear();
        for (const auto& a : adv_algos) plan.algorithms.push_back(resolve_algo(a));
      }
      plan.k_values = parse_k_values(adv_k);
      plan.seeds = parse_seeds(adv_seeds);
      plan.rounds = adv_rounds;
      plan.workers = adv_workers;
      if (adv_no_timing) plan.record_timing = false;
      if (adv_summary.empty()) adv_summary = adv_out + ".summary.csv";
      write_sweep_outputs(plan, adv_out, adv_summary);
      return 0;
    }

    if (inspect->parsed()) {
      return run_inspect(inspect_model, inspect_data, inspect_label_col,
                         inspect_positive);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
