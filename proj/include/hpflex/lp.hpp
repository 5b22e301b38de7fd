#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hpflex/error.hpp"

namespace hpflex {

enum class RowSense { le, eq, ge, ranged, free };

// min  cost . x + offset
// s.t. row_lower <= A x <= row_upper,  col_lower <= x <= col_upper
// A is stored column-major. Names are unique per kind and map back to their
// index through the catalog.
struct LinearProgram {
  std::string name = "hpflex";

  std::vector<std::string> col_names;
  std::vector<std::string> col_families;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<double> cost;

  std::vector<std::string> row_names;
  std::vector<std::string> row_families;
  std::vector<double> row_lower;
  std::vector<double> row_upper;

  std::vector<int> col_start{0};  // size num_cols + 1
  std::vector<int> row_index;
  std::vector<double> value;

  double objective_offset = 0.0;

  int num_cols() const { return static_cast<int>(col_names.size()); }
  int num_rows() const { return static_cast<int>(row_names.size()); }
  int num_nonzeros() const { return static_cast<int>(value.size()); }

  RowSense sense(int i) const {
    const bool lo = std::isfinite(row_lower[i]), up = std::isfinite(row_upper[i]);
    if (lo && up) return row_lower[i] == row_upper[i] ? RowSense::eq : RowSense::ranged;
    if (lo) return RowSense::ge;
    if (up) return RowSense::le;
    return RowSense::free;
  }

  std::optional<int> find_column(const std::string& n) const {
    build_catalog();
    auto it = col_lookup_.find(n);
    if (it == col_lookup_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<int> find_row(const std::string& n) const {
    build_catalog();
    auto it = row_lookup_.find(n);
    if (it == row_lookup_.end()) return std::nullopt;
    return it->second;
  }

  double objective(std::span<const double> x) const {
    double z = objective_offset;
    for (int j = 0; j < num_cols(); ++j) z += cost[j] * x[j];
    return z;
  }

  std::vector<double> row_activity(std::span<const double> x) const {
    std::vector<double> act(num_rows(), 0.0);
    for (int j = 0; j < num_cols(); ++j)
      for (int k = col_start[j]; k < col_start[j + 1]; ++k) act[row_index[k]] += value[k] * x[j];
    return act;
  }

  double coefficient(int row, int col) const {
    for (int k = col_start[col]; k < col_start[col + 1]; ++k)
      if (row_index[k] == row) return value[k];
    return 0.0;
  }

  // Structural consistency: sizes, indices in range, unique names.
  void check() const {
    const auto n = static_cast<std::size_t>(num_cols()), m = static_cast<std::size_t>(num_rows());
    if (col_lower.size() != n || col_upper.size() != n || cost.size() != n || col_families.size() != n ||
        col_start.size() != n + 1 || row_lower.size() != m || row_upper.size() != m || row_families.size() != m ||
        row_index.size() != value.size() || static_cast<std::size_t>(col_start.back()) != value.size())
      fail(ErrorKind::alignment, "linear program arrays are inconsistent");
    for (int r : row_index)
      if (r < 0 || r >= num_rows()) fail(ErrorKind::alignment, "matrix references a missing row");
    build_catalog();
    if (col_lookup_.size() != n || row_lookup_.size() != m)
      fail(ErrorKind::alignment, "duplicate row or column names");
  }

 private:
  void build_catalog() const {
    if (col_lookup_.size() == col_names.size() && row_lookup_.size() == row_names.size() && catalog_built_) return;
    col_lookup_.clear();
    row_lookup_.clear();
    for (int j = 0; j < num_cols(); ++j) col_lookup_.emplace(col_names[j], j);
    for (int i = 0; i < num_rows(); ++i) row_lookup_.emplace(row_names[i], i);
    catalog_built_ = true;
  }

  mutable std::unordered_map<std::string, int> col_lookup_;
  mutable std::unordered_map<std::string, int> row_lookup_;
  mutable bool catalog_built_ = false;
};

class LpBuilder {
 public:
  static constexpr double inf = std::numeric_limits<double>::infinity();

  int add_column(std::string name, double lower, double upper, double cost, std::string family) {
    if (!names_.emplace(name, static_cast<int>(lp_.col_names.size())).second)
      fail(ErrorKind::invalid_argument, "duplicate column " + name);
    lp_.col_names.push_back(std::move(name));
    lp_.col_families.push_back(std::move(family));
    lp_.col_lower.push_back(lower);
    lp_.col_upper.push_back(upper);
    lp_.cost.push_back(cost);
    return static_cast<int>(lp_.col_names.size()) - 1;
  }

  int add_row(std::string name, double lower, double upper, std::string family,
              const std::vector<std::pair<int, double>>& terms) {
    if (!row_names_.emplace(name, static_cast<int>(lp_.row_names.size())).second)
      fail(ErrorKind::invalid_argument, "duplicate row " + name);
    const int row = static_cast<int>(lp_.row_names.size());
    lp_.row_names.push_back(std::move(name));
    lp_.row_families.push_back(std::move(family));
    lp_.row_lower.push_back(lower);
    lp_.row_upper.push_back(upper);
    for (const auto& [col, coef] : terms) {
      if (col < 0 || col >= static_cast<int>(lp_.col_names.size()))
        fail(ErrorKind::invalid_argument, "row references a missing column");
      triplets_.push_back({col, row, coef});
    }
    return row;
  }

  void add_objective_offset(double v) { lp_.objective_offset += v; }
  double& cost(int col) { return lp_.cost[col]; }
  int num_cols() const { return static_cast<int>(lp_.col_names.size()); }
  void set_name(std::string n) { lp_.name = std::move(n); }

  // Sums duplicate entries and drops exact zeros.
  LinearProgram finish() && {
    std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    const int n = static_cast<int>(lp_.col_names.size());
    lp_.col_start.assign(n + 1, 0);
    lp_.row_index.clear();
    lp_.value.clear();
    std::size_t k = 0;
    for (int j = 0; j < n; ++j) {
      lp_.col_start[j] = static_cast<int>(lp_.value.size());
      while (k < triplets_.size() && triplets_[k].col == j) {
        const int row = triplets_[k].row;
        double v = 0.0;
        while (k < triplets_.size() && triplets_[k].col == j && triplets_[k].row == row) v += triplets_[k++].value;
        if (v != 0.0) {
          lp_.row_index.push_back(row);
          lp_.value.push_back(v);
        }
      }
    }
    lp_.col_start[n] = static_cast<int>(lp_.value.size());
    lp_.check();
    return std::move(lp_);
  }

 private:
  struct Triplet {
    int col;
    int row;
    double value;
  };
  LinearProgram lp_;
  std::vector<Triplet> triplets_;
  std::unordered_map<std::string, int> names_;
  std::unordered_map<std::string, int> row_names_;
};

}  // namespace hpflex
