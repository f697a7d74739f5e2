#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "boostlab/adaboost.hpp"
#include "boostlab/core.hpp"
#include "boostlab/parallel.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

// Ordered row indices into a parent dataset. Duplicates allowed (bags).
using IndexSet = std::vector<std::size_t>;

struct MetaConfig {
  std::size_t k = 5;                    // ensemble size for the partition learner
  BoostConfig boost{};
  double bag_fraction = 0.95;           // in (0, 1]
  std::optional<std::size_t> bag_count; // empty: ceil(ln(m / bag_delta))
  double bag_delta = 0.01;
  std::optional<std::size_t> lr_cap;    // max sub-samples trained by larsen_ritzert
  std::uint64_t master_seed = 0;
  unsigned workers = 1;                 // inner trainings; results are worker-count invariant

  void validate() const {
    if (k < 1) throw std::invalid_argument("MetaConfig: k must be >= 1");
    if (!(bag_fraction > 0.0) || bag_fraction > 1.0) {
      throw std::invalid_argument("MetaConfig: bag_fraction must lie in (0, 1]");
    }
    if (!(bag_delta > 0.0) || !(bag_delta < 1.0)) {
      throw std::invalid_argument("MetaConfig: bag_delta must lie in (0, 1)");
    }
    if (bag_count && *bag_count < 1) {
      throw std::invalid_argument("MetaConfig: bag_count must be >= 1");
    }
    if (lr_cap && *lr_cap < 1) {
      throw std::invalid_argument("MetaConfig: lr_cap must be >= 1");
    }
    boost.validate();
  }
};

// Seed for member `index` of algorithm `algo` under a master seed. The tag
// strings below ("majority_of_k/shuffle", "bagged_adaboost/bag", ...) are a
// stable contract: reproducibility of recorded results depends on them.
inline std::uint64_t member_seed(std::uint64_t master_seed, std::string_view algo,
                                 std::uint64_t index) {
  return derive_seed(master_seed, algo, index);
}

// Ensemble plus the training rows each member voter saw, by member index.
struct MetaResult {
  Ensemble ensemble;
  std::vector<IndexSet> member_train_sets;
};

namespace detail {

// Contiguous [begin, end) blocks covering 0..m-1 with sizes differing by at
// most one; the first m % k blocks take the extra row.
inline std::vector<std::pair<std::size_t, std::size_t>> block_bounds(std::size_t m,
                                                                     std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  bounds.reserve(k);
  const std::size_t base = m / k;
  const std::size_t extra = m % k;
  std::size_t begin = 0;
  for (std::size_t b = 0; b < k; ++b) {
    std::size_t size = base + (b < extra ? 1 : 0);
    bounds.emplace_back(begin, begin + size);
    begin += size;
  }
  return bounds;
}

inline std::vector<Voter> train_members(const Dataset& data,
                                        const std::vector<IndexSet>& member_sets,
                                        const WeakLearner& weak,
                                        const BoostConfig& boost_cfg,
                                        unsigned workers) {
  std::vector<std::optional<Voter>> slots(member_sets.size());
  parallel_for(member_sets.size(), workers, [&](std::size_t j) {
    Dataset sub = data.subset(member_sets[j]);
    slots[j] = adaboost(sub, weak, boost_cfg).voter;
  });
  std::vector<Voter> voters;
  voters.reserve(slots.size());
  for (auto& s : slots) voters.push_back(std::move(*s));
  return voters;
}

}  // namespace detail

// Majority-of-K: shuffle the rows with a seeded permutation, split them into
// k disjoint near-equal blocks, boost each block independently, and combine
// the k voters by unweighted majority.
inline MetaResult majority_of_k(const Dataset& data, const WeakLearner& weak,
                                const MetaConfig& cfg) {
  cfg.validate();
  const std::size_t m = data.rows();
  if (m < cfg.k) {
    throw std::invalid_argument("majority_of_k: insufficient samples for partition");
  }

  std::vector<std::size_t> perm = shuffled_indices(
      m, member_seed(cfg.master_seed, "majority_of_k/shuffle", 0));

  std::vector<IndexSet> member_sets;
  member_sets.reserve(cfg.k);
  for (auto [begin, end] : detail::block_bounds(m, cfg.k)) {
    member_sets.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                             perm.begin() + static_cast<std::ptrdiff_t>(end));
  }

  std::vector<Voter> voters =
      detail::train_members(data, member_sets, weak, cfg.boost, cfg.workers);
  return MetaResult{Ensemble(std::move(voters)), std::move(member_sets)};
}

namespace detail {

// Depth of the sub-sampling recursion for a set of n rows: the recursion
// always descends into the first quarter, so every leaf sits at the same
// depth and the list has exactly 3^depth entries.
inline std::size_t subsample_depth(std::size_t n) {
  std::size_t depth = 0;
  while (n >= 4) {
    n = (n + 3) / 4;  // size of the first quarter (extras go to early quarters)
    ++depth;
  }
  return depth;
}

inline std::size_t pow3(std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= 3;
  return r;
}

// Materializes one leaf of the recursion tree. Branch digits are read most
// significant first; digit d at a node with quarters S0..S3 stashes
// {S2,S3}, {S1,S3} or {S1,S2} and descends into S0. The leaf training set is
// the final S0 followed by the accumulated stash.
inline IndexSet subsample_leaf(const IndexSet& s, const IndexSet& t,
                               std::size_t leaf, std::size_t depth) {
  IndexSet cur = s;
  IndexSet stash = t;
  for (std::size_t level = 0; level < depth; ++level) {
    const std::size_t digit = (leaf / pow3(depth - 1 - level)) % 3;
    auto bounds = block_bounds(cur.size(), 4);
    auto quarter = [&](std::size_t q) {
      return std::pair(cur.begin() + static_cast<std::ptrdiff_t>(bounds[q].first),
                       cur.begin() + static_cast<std::ptrdiff_t>(bounds[q].second));
    };
    const std::size_t a = digit == 0 ? 2 : 1;
    const std::size_t b = digit == 2 ? 2 : 3;
    auto [a_begin, a_end] = quarter(a);
    stash.insert(stash.end(), a_begin, a_end);
    auto [b_begin, b_end] = quarter(b);
    stash.insert(stash.end(), b_begin, b_end);
    cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(bounds[0].second), cur.end());
  }
  cur.insert(cur.end(), stash.begin(), stash.end());
  return cur;
}

}  // namespace detail

// Number of training sets the sub-sampling recursion produces for n rows.
inline std::size_t subsample_count(std::size_t n) {
  return detail::pow3(detail::subsample_depth(n));
}

// Recursive sub-sampling: if |s| < 4 the result is the single set s
// followed by the stash t; otherwise s splits into four near-equal
// contiguous quarters S0..S3 and the result concatenates the recursions on
// (S0, t+S2+S3), (S0, t+S1+S3), (S0, t+S1+S2), in that order. Only the
// first quarter is ever recursed into.
inline std::vector<IndexSet> subsample(const IndexSet& s, const IndexSet& t) {
  const std::size_t depth = detail::subsample_depth(s.size());
  const std::size_t count = detail::pow3(depth);
  std::vector<IndexSet> out;
  out.reserve(count);
  for (std::size_t leaf = 0; leaf < count; ++leaf) {
    out.push_back(detail::subsample_leaf(s, t, leaf, depth));
  }
  return out;
}

// Larsen-Ritzert: boost one voter per sub-sampled training set and combine
// by majority. With lr_cap set and fewer than the full list requested, the
// trained sub-samples are drawn uniformly without replacement (seeded), the
// full list is never materialized.
inline MetaResult larsen_ritzert(const Dataset& data, const WeakLearner& weak,
                                 const MetaConfig& cfg) {
  cfg.validate();
  const std::size_t m = data.rows();

  IndexSet all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  const std::size_t depth = detail::subsample_depth(m);
  const std::size_t total = detail::pow3(depth);

  std::vector<std::size_t> leaves;
  if (cfg.lr_cap && *cfg.lr_cap < total) {
    // partial Fisher-Yates: first lr_cap entries of a seeded shuffle
    std::vector<std::size_t> pool(total);
    for (std::size_t i = 0; i < total; ++i) pool[i] = i;
    Rng rng(member_seed(cfg.master_seed, "larsen_ritzert/select", 0));
    leaves.reserve(*cfg.lr_cap);
    for (std::size_t i = 0; i < *cfg.lr_cap; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
      std::swap(pool[i], pool[j]);
      leaves.push_back(pool[i]);
    }
  } else {
    leaves.resize(total);
    for (std::size_t i = 0; i < total; ++i) leaves[i] = i;
  }

  std::vector<IndexSet> member_sets;
  member_sets.reserve(leaves.size());
  for (std::size_t leaf : leaves) {
    member_sets.push_back(detail::subsample_leaf(all, {}, leaf, depth));
  }

  std::vector<Voter> voters =
      detail::train_members(data, member_sets, weak, cfg.boost, cfg.workers);
  return MetaResult{Ensemble(std::move(voters)), std::move(member_sets)};
}

// round(fraction*m) uniform draws from 0..m-1 with replacement.
inline IndexSet bag_indices(std::size_t m, double fraction, std::uint64_t seed) {
  const auto draws = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(m)));
  if (draws == 0) {
    throw std::invalid_argument("bag_indices: bag_fraction too small, empty bag");
  }
  Rng rng(seed);
  IndexSet idx(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    idx[i] = static_cast<std::size_t>(rng.below(m));
  }
  return idx;
}

inline std::size_t default_bag_count(std::size_t m, double delta) {
  return static_cast<std::size_t>(
      std::ceil(std::log(static_cast<double>(m) / delta)));
}

// Bagged boosting: bag_count independent with-replacement resamples, one
// boosted voter per bag, combined by majority.
inline MetaResult bagged_adaboost(const Dataset& data, const WeakLearner& weak,
                                  const MetaConfig& cfg) {
  cfg.validate();
  const std::size_t m = data.rows();
  const std::size_t count =
      cfg.bag_count ? *cfg.bag_count : default_bag_count(m, cfg.bag_delta);

  std::vector<IndexSet> member_sets;
  member_sets.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    member_sets.push_back(bag_indices(
        m, cfg.bag_fraction, member_seed(cfg.master_seed, "bagged_adaboost/bag", t)));
  }

  std::vector<Voter> voters =
      detail::train_members(data, member_sets, weak, cfg.boost, cfg.workers);
  return MetaResult{Ensemble(std::move(voters)), std::move(member_sets)};
}

}  // namespace boostlab
