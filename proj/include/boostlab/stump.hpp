#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "boostlab/core.hpp"

namespace boostlab {

// Single-feature threshold rule: predicts `polarity` when
// row[feature] <= threshold and -polarity otherwise. A threshold of
// -infinity makes the stump a constant -polarity predictor.
struct Stump final : public Hypothesis {
  std::size_t feature = 0;
  double threshold = -std::numeric_limits<double>::infinity();
  int polarity = 1;

  Stump() = default;
  Stump(std::size_t f, double t, int p) : feature(f), threshold(t), polarity(p) {}

  Label predict(std::span<const double> row) const override {
    if (feature >= row.size()) {
      throw std::out_of_range("Stump: feature index outside the row");
    }
    return Label(row[feature] <= threshold ? polarity : -polarity);
  }

  std::string describe() const override {
    return "x[" + std::to_string(feature) + "] <= " + std::to_string(threshold) +
           " ? " + (polarity > 0 ? "+1" : "-1") + " : " + (polarity > 0 ? "-1" : "+1");
  }

  friend bool operator==(const Stump& a, const Stump& b) {
    return a.feature == b.feature && a.threshold == b.threshold &&
           a.polarity == b.polarity;
  }
};

namespace detail {

struct StumpCandidate {
  std::size_t feature;
  double threshold;
  int polarity;
  double sweep_error;
};

}  // namespace detail

// Exact minimizer of the weighted 0/1 error over all stumps. Candidate
// thresholds per feature are the midpoints between consecutive distinct
// sorted values plus a -infinity sentinel (the constant predictors); that
// grid realizes every dichotomy a threshold rule can produce on the data.
// Ties in error break toward the lowest feature, then the lowest threshold,
// then polarity +1.
//
// The sweep walks each sorted column once, maintaining the error of the
// polarity-+1 rule incrementally. Incremental sums can drift from the
// row-order summation weighted_error() performs, so near-minimal candidates
// are re-scored canonically before the winner is chosen; the returned
// stump's weighted_error() equals the exact grid minimum.
inline Stump train_stump(const Dataset& data, const WeightDistribution& dist) {
  if (dist.size() != data.rows()) {
    throw std::invalid_argument("train_stump: distribution length does not match dataset");
  }
  const std::size_t m = data.rows();
  const std::size_t p = data.columns();
  const auto& w = dist.weights();

  double total = 0.0;
  double positive_mass = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    total += w[i];
    if (data.label(i) == Label::positive()) positive_mass += w[i];
  }

  constexpr double kNearTie = 1e-12;
  constexpr std::size_t kShortlistCap = 512;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<detail::StumpCandidate> shortlist;
  shortlist.reserve(64);
  double min_sweep = std::numeric_limits<double>::infinity();

  auto offer = [&](std::size_t f, double t, int pol, double err) {
    if (err < min_sweep) min_sweep = err;
    if (err <= min_sweep + kNearTie) {
      if (shortlist.size() >= kShortlistCap) {
        std::erase_if(shortlist, [&](const detail::StumpCandidate& c) {
          return c.sweep_error > min_sweep + kNearTie;
        });
      }
      if (shortlist.size() < kShortlistCap) {
        shortlist.push_back({f, t, pol, err});
      }
    }
  };

  std::vector<std::size_t> order(m);
  for (std::size_t f = 0; f < p; ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return data.feature(a, f) < data.feature(b, f);
    });

    // threshold -inf: the +1 rule predicts -1 everywhere.
    double err_plus = positive_mass;
    offer(f, neg_inf, +1, err_plus);
    offer(f, neg_inf, -1, total - err_plus);

    std::size_t i = 0;
    while (i < m) {
      const double v = data.feature(order[i], f);
      std::size_t j = i;
      while (j < m && data.feature(order[j], f) == v) {
        const std::size_t row = order[j];
        if (data.label(row) == Label::positive()) {
          err_plus -= w[row];
        } else {
          err_plus += w[row];
        }
        ++j;
      }
      if (j < m) {
        const double t = std::midpoint(v, data.feature(order[j], f));
        offer(f, t, +1, err_plus);
        offer(f, t, -1, total - err_plus);
      }
      i = j;
    }
  }

  // Canonical re-score of the near-minimal candidates. The shortlist is in
  // tie-break priority order already, so a strict < keeps the right winner.
  Stump best;
  double best_error = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto& c : shortlist) {
    if (c.sweep_error > min_sweep + kNearTie) continue;
    Stump candidate(c.feature, c.threshold, c.polarity);
    double err = weighted_error(candidate, data, dist);
    if (!found || err < best_error) {
      best = candidate;
      best_error = err;
      found = true;
    }
  }
  return best;
}

// train_stump as a WeakLearner. Stateless and safe for concurrent calls.
inline WeakLearner stump_learner() {
  return [](const Dataset& data, const WeightDistribution& dist) -> HypothesisPtr {
    return std::make_shared<Stump>(train_stump(data, dist));
  };
}

}  // namespace boostlab
