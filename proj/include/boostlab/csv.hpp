#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boostlab/core.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

// Numeric table with the label column split off but not yet mapped to +/-1.
// Used by preparation steps that need the raw (possibly multiclass) labels.
struct RawTable {
  std::size_t columns = 0;              // feature columns
  std::vector<double> features;         // row-major
  std::vector<double> raw_labels;

  std::size_t rows() const { return raw_labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * columns, columns};
  }
};

struct CsvOptions {
  // Label column index; empty means the last column.
  std::optional<std::size_t> label_column;
  // Stop reading after this many data rows; empty reads the whole file.
  std::optional<std::size_t> max_rows;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

inline void split_line(std::string_view line, std::vector<std::string_view>& cells) {
  cells.clear();
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
}

}  // namespace detail

// Comma-separated numeric table. A header row is auto-detected (first line
// with any non-numeric cell) and skipped. Errors carry 1-based file line and
// column numbers.
inline RawTable load_raw_csv(const std::string& path, const CsvOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path);

  RawTable table;
  std::size_t total_columns = 0;
  std::size_t label_index = 0;
  bool configured = false;
  bool first_content_line = true;

  std::string line;
  std::vector<std::string_view> cells;
  std::size_t line_number = 0;
  std::size_t data_rows = 0;

  while (std::getline(in, line)) {
    if (opts.max_rows && data_rows >= *opts.max_rows) break;
    ++line_number;
    std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    detail::split_line(view, cells);

    if (first_content_line) {
      first_content_line = false;
      bool numeric = true;
      double ignored;
      for (auto c : cells) {
        if (!detail::parse_double(c, ignored)) {
          numeric = false;
          break;
        }
      }
      if (!numeric) continue;  // header row
    }

    if (!configured) {
      total_columns = cells.size();
      if (total_columns < 2) {
        throw std::runtime_error(path + ":" + std::to_string(line_number) +
                                 ": need at least one feature and a label column");
      }
      label_index = opts.label_column.value_or(total_columns - 1);
      if (label_index >= total_columns) {
        throw std::runtime_error(path + ": label column " +
                                 std::to_string(label_index) + " out of range (row has " +
                                 std::to_string(total_columns) + " columns)");
      }
      table.columns = total_columns - 1;
      configured = true;
    } else if (cells.size() != total_columns) {
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": expected " + std::to_string(total_columns) +
                               " columns, got " + std::to_string(cells.size()));
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value;
      if (!detail::parse_double(cells[c], value)) {
        throw std::runtime_error(path + ":" + std::to_string(line_number) +
                                 ": column " + std::to_string(c + 1) +
                                 ": not a number: '" + std::string(cells[c]) + "'");
      }
      if (!std::isfinite(value)) {
        throw std::runtime_error(path + ":" + std::to_string(line_number) +
                                 ": column " + std::to_string(c + 1) +
                                 ": non-finite value '" + std::string(cells[c]) + "'");
      }
      if (c == label_index) {
        table.raw_labels.push_back(value);
      } else {
        table.features.push_back(value);
      }
    }
    ++data_rows;
  }
  if (data_rows == 0) throw std::runtime_error(path + ": no data rows");
  return table;
}

// Maps raw labels to +/-1: positive_label_value becomes +1, everything else -1.
inline Dataset to_dataset(RawTable table, double positive_label_value) {
  std::vector<Label> labels;
  labels.reserve(table.rows());
  for (double v : table.raw_labels) {
    labels.push_back(v == positive_label_value ? Label::positive() : Label::negative());
  }
  return Dataset(std::move(table.features), table.columns, std::move(labels));
}

inline Dataset load_csv(const std::string& path, double positive_label_value,
                        const CsvOptions& opts = {}) {
  return to_dataset(load_raw_csv(path, opts), positive_label_value);
}

// Features followed by the +/-1 label, one row per line, no header.
inline void write_csv(const Dataset& data, std::ostream& out) {
  out.precision(17);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto row = data.row(i);
    for (double v : row) out << v << ',';
    out << data.label(i).value() << '\n';
  }
}

inline void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV file: " + path);
  write_csv(data, out);
}

// Reduces a multiclass table to its two most frequent classes; the most
// frequent maps to +1, the runner-up to -1. Frequency ties break toward the
// smaller class id. Row order is preserved.
inline Dataset prepare_covertype(const RawTable& table) {
  std::map<double, std::size_t> counts;
  for (double v : table.raw_labels) ++counts[v];
  if (counts.size() < 2) {
    throw std::invalid_argument("prepare_covertype: need at least two label classes");
  }

  // counts iterates by ascending class id, so ties keep the smaller id first
  std::vector<std::pair<double, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const double top = ranked[0].first;
  const double second = ranked[1].first;

  std::vector<double> features;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (table.raw_labels[i] != top && table.raw_labels[i] != second) continue;
    auto row = table.row(i);
    features.insert(features.end(), row.begin(), row.end());
    labels.push_back(table.raw_labels[i] == top ? Label::positive() : Label::negative());
  }
  return Dataset(std::move(features), table.columns, std::move(labels));
}

// Keeps the first `limit` rows. Fewer rows than requested keeps everything
// and warns on stderr.
inline Dataset truncate_higgs(const Dataset& data, std::size_t limit = 300000) {
  if (data.rows() <= limit) {
    if (data.rows() < limit) {
      std::cerr << "boostlab: truncation requested " << limit << " rows but only "
                << data.rows() << " are available; keeping all\n";
    }
    return data;
  }
  std::vector<std::size_t> idx(limit);
  for (std::size_t i = 0; i < limit; ++i) idx[i] = i;
  return data.subset(idx);
}

struct SplitSpec {
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Seeded shuffle, then the last ceil(test_fraction*m) rows become the test
// set. Train and test partition the input rows.
inline std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0) || !(spec.test_fraction < 1.0)) {
    throw std::invalid_argument("split: test_fraction must lie in (0, 1)");
  }
  const std::size_t m = data.rows();
  if (m < 2) throw std::invalid_argument("split: need at least two rows");

  const auto n_test = static_cast<std::size_t>(
      std::ceil(spec.test_fraction * static_cast<double>(m)));
  if (n_test >= m) {
    throw std::invalid_argument("split: test fraction leaves no training rows");
  }

  std::vector<std::size_t> perm = shuffled_indices(m, spec.seed);
  std::vector<std::size_t> train_idx(perm.begin(),
                                     perm.begin() + static_cast<std::ptrdiff_t>(m - n_test));
  std::vector<std::size_t> test_idx(perm.begin() + static_cast<std::ptrdiff_t>(m - n_test),
                                    perm.end());
  return {data.subset(train_idx), data.subset(test_idx)};
}

}  // namespace boostlab
