#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "boostlab/core.hpp"

namespace boostlab {

struct BoostConfig {
  std::size_t rounds = 300;
  double epsilon_floor = 1e-10;  // clamp for the coefficient formula
  bool stop_on_perfect = true;

  void validate() const {
    if (rounds < 1) throw std::invalid_argument("BoostConfig: rounds must be >= 1");
    if (!(epsilon_floor > 0.0) || !(epsilon_floor < 0.5)) {
      throw std::invalid_argument("BoostConfig: epsilon_floor must lie in (0, 0.5)");
    }
  }
};

struct BoostRound {
  std::size_t round = 0;  // 1-based
  double epsilon = 0.0;   // weighted error of the round's hypothesis
  double alpha = 0.0;
  double min_margin = 0.0;  // min training margin of the voter built so far
};

enum class BoostStop {
  completed,     // ran the configured number of rounds
  no_advantage,  // a round produced epsilon >= 1/2; that hypothesis was dropped
  perfect_fit,   // a round produced epsilon == 0 and stop_on_perfect was set
};

struct BoostTrace {
  std::vector<BoostRound> rounds;
  BoostStop stop = BoostStop::completed;

  void write_csv(std::ostream& out) const {
    out.precision(17);
    out << "round,epsilon,alpha,min_margin\n";
    for (const auto& r : rounds) {
      out << r.round << ',' << r.epsilon << ',' << r.alpha << ',' << r.min_margin
          << '\n';
    }
  }
};

struct BoostResult {
  Voter voter;
  BoostTrace trace;
};

// Invoked after each completed round with the distribution that the *next*
// round will see. Used by diagnostics and tests.
using RoundObserver = std::function<void(
    std::size_t round, const Hypothesis& hypothesis, double epsilon, double alpha,
    const WeightDistribution& next_distribution)>;

// AdaBoost with exponential reweighting. Each round trains a hypothesis on
// the current weighing, weighs it by alpha = 0.5*ln((1-eps)/eps) with eps
// clamped to [epsilon_floor, 1-epsilon_floor], and renormalizes
// D(i) *= exp(-alpha * y_i * h(x_i)). Rounds with eps >= 1/2 violate weak
// learnability: the hypothesis is dropped and boosting stops (flipping it
// would mask adversarial weak learners). A perfect round (eps == 0) is kept
// with the clamped coefficient and, by default, ends the run.
inline BoostResult adaboost(const Dataset& data, const WeakLearner& weak,
                            const BoostConfig& cfg = {},
                            const RoundObserver& observer = {}) {
  cfg.validate();
  if (!weak) throw std::invalid_argument("adaboost: weak learner is empty");

  const std::size_t m = data.rows();
  std::vector<double> weights(m, 1.0 / static_cast<double>(m));
  std::vector<double> raw_score(m, 0.0);
  std::vector<int> predictions(m);
  double alpha_sum = 0.0;

  std::vector<VoterTerm> terms;
  BoostTrace trace;

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    WeightDistribution dist(weights);
    HypothesisPtr h = weak(data, dist);
    if (!h) throw std::runtime_error("adaboost: weak learner returned no hypothesis");

    double epsilon = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      predictions[i] = h->predict(data.row(i)).value();
      if (predictions[i] != data.label(i).value()) epsilon += dist[i];
    }

    if (epsilon >= 0.5) {
      trace.stop = BoostStop::no_advantage;
      break;
    }

    const double clamped =
        std::clamp(epsilon, cfg.epsilon_floor, 1.0 - cfg.epsilon_floor);
    const double alpha = 0.5 * std::log((1.0 - clamped) / clamped);

    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      weights[i] *= std::exp(-alpha * data.label(i).real() *
                             static_cast<double>(predictions[i]));
      sum += weights[i];
    }
    for (std::size_t i = 0; i < m; ++i) weights[i] /= sum;

    terms.push_back({alpha, h});
    alpha_sum += alpha;

    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      raw_score[i] += alpha * static_cast<double>(predictions[i]);
      min_margin = std::min(min_margin, data.label(i).real() * raw_score[i] / alpha_sum);
    }

    trace.rounds.push_back({t, epsilon, alpha, min_margin});
    if (observer) observer(t, *h, epsilon, alpha, WeightDistribution(weights));

    if (epsilon == 0.0 && cfg.stop_on_perfect) {
      trace.stop = BoostStop::perfect_fit;
      break;
    }
  }

  if (terms.empty()) {
    throw std::runtime_error("adaboost: no weak hypothesis with advantage");
  }
  return BoostResult{Voter(std::move(terms)), std::move(trace)};
}

// Margins of a trained voter on its own training set.
inline MarginReport training_margin_profile(const Voter& voter, const Dataset& data) {
  return margins(voter, data);
}

}  // namespace boostlab
