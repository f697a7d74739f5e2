#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace boostlab {

// Binary class label, exactly -1 or +1. There is no zero label; ties are
// resolved by sign(), which maps 0 to +1.
class Label {
 public:
  explicit Label(int value) : v_(static_cast<std::int8_t>(value)) {
    if (value != 1 && value != -1) {
      throw std::invalid_argument("Label: value must be +1 or -1");
    }
  }

  static Label positive() { return Label(1); }
  static Label negative() { return Label(-1); }

  int value() const { return v_; }
  double real() const { return static_cast<double>(v_); }
  Label flipped() const { return Label(-v_, 0); }

  friend bool operator==(Label a, Label b) { return a.v_ == b.v_; }
  friend bool operator!=(Label a, Label b) { return a.v_ != b.v_; }

 private:
  Label(std::int8_t v, int) : v_(v) {}
  std::int8_t v_;
};

// sign(v): +1 when v >= 0, -1 when v < 0. Non-finite input is a contract
// violation. The zero-maps-to-plus convention is relied on by even-sized
// majority votes and must not be made configurable.
inline Label sign(double v) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument("sign: input must be finite");
  }
  return v >= 0.0 ? Label::positive() : Label::negative();
}

// Immutable matrix of finite real features with one +/-1 label per row.
class Dataset {
 public:
  Dataset(std::vector<double> features_row_major, std::size_t columns,
          std::vector<Label> labels)
      : rows_(labels.size()),
        cols_(columns),
        features_(std::move(features_row_major)),
        labels_(std::move(labels)) {
    if (rows_ == 0) throw std::invalid_argument("Dataset: needs at least one row");
    if (cols_ == 0) throw std::invalid_argument("Dataset: needs at least one column");
    if (features_.size() != rows_ * cols_) {
      throw std::invalid_argument("Dataset: feature buffer size does not match rows*columns");
    }
    for (std::size_t i = 0; i < features_.size(); ++i) {
      if (!std::isfinite(features_[i])) {
        throw std::invalid_argument(
            "Dataset: non-finite feature at row " + std::to_string(i / cols_) +
            ", column " + std::to_string(i % cols_));
      }
    }
  }

  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::vector<Label> labels) {
    if (rows.empty()) throw std::invalid_argument("Dataset: needs at least one row");
    std::size_t cols = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& r : rows) {
      if (r.size() != cols) {
        throw std::invalid_argument("Dataset: ragged feature rows");
      }
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return Dataset(std::move(flat), cols, std::move(labels));
  }

  std::size_t rows() const { return rows_; }
  std::size_t columns() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * cols_, cols_};
  }
  double feature(std::size_t i, std::size_t j) const {
    return features_[i * cols_ + j];
  }
  Label label(std::size_t i) const { return labels_[i]; }
  const std::vector<Label>& labels() const { return labels_; }

  // New dataset from the given row indices, in order. Duplicates allowed.
  Dataset subset(std::span<const std::size_t> indices) const {
    if (indices.empty()) throw std::invalid_argument("Dataset::subset: empty index set");
    std::vector<double> flat;
    flat.reserve(indices.size() * cols_);
    std::vector<Label> labs;
    labs.reserve(indices.size());
    for (std::size_t idx : indices) {
      if (idx >= rows_) throw std::out_of_range("Dataset::subset: index out of range");
      auto r = row(idx);
      flat.insert(flat.end(), r.begin(), r.end());
      labs.push_back(labels_[idx]);
    }
    return Dataset(std::move(flat), cols_, std::move(labs));
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> features_;
  std::vector<Label> labels_;
};

// Nonnegative per-sample weights summing to 1 within 1e-9.
class WeightDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit WeightDistribution(std::vector<double> weights)
      : weights_(std::move(weights)) {
    if (weights_.empty()) {
      throw std::invalid_argument("WeightDistribution: empty weight vector");
    }
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("WeightDistribution: weights must be finite and >= 0");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw std::invalid_argument("WeightDistribution: weights must sum to 1 (got " +
                                  std::to_string(sum) + ")");
    }
  }

  static WeightDistribution uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("WeightDistribution: n must be positive");
    return WeightDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  // Scales a raw nonnegative vector to total mass 1.
  static WeightDistribution normalized(std::vector<double> raw) {
    double sum = 0.0;
    for (double w : raw) sum += w;
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      throw std::invalid_argument("WeightDistribution: total mass must be positive");
    }
    for (double& w : raw) w /= sum;
    return WeightDistribution(std::move(raw));
  }

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

// Abstract deterministic predictor from a feature row to a label.
class Hypothesis {
 public:
  virtual ~Hypothesis() = default;
  virtual Label predict(std::span<const double> row) const = 0;
  virtual std::string describe() const { return "hypothesis"; }
};

using HypothesisPtr = std::shared_ptr<const Hypothesis>;

// Adapter for ad-hoc hypotheses (mostly tests).
class FunctionHypothesis final : public Hypothesis {
 public:
  using Fn = std::function<Label(std::span<const double>)>;
  explicit FunctionHypothesis(Fn fn) : fn_(std::move(fn)) {}
  Label predict(std::span<const double> row) const override { return fn_(row); }

 private:
  Fn fn_;
};

// The interface every weak learner implements: given data and a weighing of
// it, produce a hypothesis.
using WeakLearner =
    std::function<HypothesisPtr(const Dataset&, const WeightDistribution&)>;

struct VoterTerm {
  double coefficient = 0.0;
  HypothesisPtr hypothesis;
};

// Nonnegative-weighted combination of hypotheses. Scoring normalizes the
// coefficients to sum to 1, so any positive rescaling of the coefficients
// leaves scores, predictions and margins unchanged.
class Voter {
 public:
  explicit Voter(std::vector<VoterTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("Voter: needs at least one term");
    coefficient_sum_ = 0.0;
    for (const auto& t : terms_) {
      if (!t.hypothesis) throw std::invalid_argument("Voter: null hypothesis");
      if (!(t.coefficient >= 0.0) || !std::isfinite(t.coefficient)) {
        throw std::invalid_argument("Voter: coefficients must be finite and >= 0");
      }
      coefficient_sum_ += t.coefficient;
    }
    if (!(coefficient_sum_ > 0.0)) {
      throw std::invalid_argument("Voter: zero total coefficient mass");
    }
  }

  const std::vector<VoterTerm>& terms() const { return terms_; }
  double coefficient_sum() const { return coefficient_sum_; }

  // Normalized score sum_h (a_h / sum a) * h(x), clamped into [-1, 1].
  double score(std::span<const double> row) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      s += t.coefficient * t.hypothesis->predict(row).real();
    }
    return std::clamp(s / coefficient_sum_, -1.0, 1.0);
  }

  Label predict(std::span<const double> row) const { return sign(score(row)); }

 private:
  std::vector<VoterTerm> terms_;
  double coefficient_sum_;
};

// Unweighted majority over voters: sign of the sum of member prediction
// signs. Even splits resolve to +1 through sign(0).
class Ensemble {
 public:
  explicit Ensemble(std::vector<Voter> voters) : voters_(std::move(voters)) {
    if (voters_.empty()) throw std::invalid_argument("Ensemble: needs at least one voter");
  }

  const std::vector<Voter>& voters() const { return voters_; }
  std::size_t size() const { return voters_.size(); }

  Label predict(std::span<const double> row) const {
    long vote = 0;
    for (const auto& v : voters_) vote += v.predict(row).value();
    return vote >= 0 ? Label::positive() : Label::negative();
  }

 private:
  std::vector<Voter> voters_;
};

// Per-sample margins of a normalized voter: label * score, each in [-1, 1].
struct MarginReport {
  std::vector<double> margins;
  double min_margin = 0.0;

  // Fraction of samples with margin strictly below the threshold.
  double fraction_below(double threshold) const {
    if (margins.empty()) return 0.0;
    std::size_t count = 0;
    for (double m : margins) {
      if (m < threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(margins.size());
  }
};

inline MarginReport margins(const Voter& voter, const Dataset& data) {
  MarginReport report;
  report.margins.resize(data.rows());
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double m = data.label(i).real() * voter.score(data.row(i));
    report.margins[i] = m;
    lo = std::min(lo, m);
  }
  report.min_margin = lo;
  return report;
}

// Mass of misclassified samples under the given weighing. Summation is in
// row order; every error comparison in the project relies on that order
// being fixed.
inline double weighted_error(const Hypothesis& hypothesis, const Dataset& data,
                             const WeightDistribution& dist) {
  if (dist.size() != data.rows()) {
    throw std::invalid_argument("weighted_error: distribution length does not match dataset");
  }
  double err = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (hypothesis.predict(data.row(i)) != data.label(i)) err += dist[i];
  }
  return err;
}

// Fraction of misclassified rows.
template <class F>
  requires std::invocable<const F&, std::span<const double>>
double test_error(const F& predict, const Dataset& data) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (predict(data.row(i)) != data.label(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.rows());
}

inline double test_error(const Hypothesis& h, const Dataset& data) {
  return test_error([&](std::span<const double> r) { return h.predict(r); }, data);
}
inline double test_error(const Voter& v, const Dataset& data) {
  return test_error([&](std::span<const double> r) { return v.predict(r); }, data);
}
inline double test_error(const Ensemble& e, const Dataset& data) {
  return test_error([&](std::span<const double> r) { return e.predict(r); }, data);
}

}  // namespace boostlab
