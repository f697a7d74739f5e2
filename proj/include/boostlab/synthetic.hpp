#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "boostlab/core.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

// Synthetic binary classification data learnable by a vote of single-feature
// threshold rules. Features are uniform in [0,1); the clean label is the
// majority over the first vote_features coordinates of (x_j > 0.5), so a
// voting classifier with margin 1/vote_features realizes it. An odd
// vote_features avoids ties. `noise` flips each label independently.
struct SyntheticSpec {
  std::size_t rows = 768;
  std::size_t features = 8;
  std::size_t vote_features = 3;
  double noise = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    if (rows == 0 || features == 0) {
      throw std::invalid_argument("SyntheticSpec: rows and features must be positive");
    }
    if (vote_features == 0 || vote_features > features) {
      throw std::invalid_argument("SyntheticSpec: vote_features must lie in [1, features]");
    }
    if (vote_features % 2 == 0) {
      throw std::invalid_argument("SyntheticSpec: vote_features must be odd");
    }
    if (noise < 0.0 || noise >= 0.5) {
      throw std::invalid_argument("SyntheticSpec: noise must lie in [0, 0.5)");
    }
  }
};

inline Dataset make_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<double> features;
  features.reserve(spec.rows * spec.features);
  std::vector<Label> labels;
  labels.reserve(spec.rows);

  for (std::size_t i = 0; i < spec.rows; ++i) {
    int vote = 0;
    for (std::size_t j = 0; j < spec.features; ++j) {
      double v = rng.next_unit();
      features.push_back(v);
      if (j < spec.vote_features) vote += v > 0.5 ? 1 : -1;
    }
    Label y = vote > 0 ? Label::positive() : Label::negative();
    if (spec.noise > 0.0 && rng.bernoulli(spec.noise)) y = y.flipped();
    labels.push_back(y);
  }
  return Dataset(std::move(features), spec.features, std::move(labels));
}

}  // namespace boostlab
