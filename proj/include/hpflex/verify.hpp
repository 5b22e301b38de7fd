#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hpflex/lp.hpp"
#include "hpflex/simplex.hpp"

namespace hpflex {

// Absolute bound violations, recomputed from the column values alone.
struct FamilyResidual {
  std::string family;
  int count = 0;     // rows (or columns, for "bounds") checked
  int violated = 0;  // entries above the flag tolerance
  double max = 0.0;
  double mean = 0.0;
};

struct ResidualReport {
  std::vector<FamilyResidual> families;  // row families in first-seen order, then "bounds"
  double tolerance = 0.0;

  bool empty() const { return families.empty(); }
  double max() const {
    double m = 0.0;
    for (const auto& f : families) m = std::max(m, f.max);
    return m;
  }
  const FamilyResidual* family(const std::string& name) const {
    for (const auto& f : families)
      if (f.family == name) return &f;
    return nullptr;
  }
  std::vector<std::string> flagged() const {
    std::vector<std::string> out;
    for (const auto& f : families)
      if (f.violated > 0) out.push_back(f.family);
    return out;
  }
};

namespace detail {

inline double bound_excess(double v, double lo, double up) {
  if (v < lo) return lo - v;
  if (v > up) return v - up;
  return 0.0;
}

}  // namespace detail

// Model rows carry families such as balance, availability, storage, heat;
// column bounds are reported together as "bounds".
inline ResidualReport verify(const LinearProgram& lp, std::span<const double> x, double flag_tolerance = 1e-6) {
  if (x.size() != static_cast<std::size_t>(lp.num_cols()))
    fail(ErrorKind::alignment, "solution has " + std::to_string(x.size()) + " values for " +
                                   std::to_string(lp.num_cols()) + " columns");
  ResidualReport r;
  r.tolerance = flag_tolerance;
  auto slot = [&](const std::string& fam) -> FamilyResidual& {
    for (auto& f : r.families)
      if (f.family == fam) return f;
    r.families.push_back({fam});
    return r.families.back();
  };
  auto record = [&](FamilyResidual& f, double v) {
    ++f.count;
    f.max = std::max(f.max, v);
    f.mean += v;
    if (v > flag_tolerance) ++f.violated;
  };

  std::vector<double> act(lp.num_rows(), 0.0);
  for (int j = 0; j < lp.num_cols(); ++j)
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) act[lp.row_index[k]] += lp.value[k] * x[j];
  for (int i = 0; i < lp.num_rows(); ++i)
    record(slot(lp.row_families[i]), detail::bound_excess(act[i], lp.row_lower[i], lp.row_upper[i]));
  if (lp.num_cols() > 0) {
    auto& b = slot("bounds");
    for (int j = 0; j < lp.num_cols(); ++j) record(b, detail::bound_excess(x[j], lp.col_lower[j], lp.col_upper[j]));
  }
  for (auto& f : r.families)
    if (f.count > 0) f.mean /= f.count;
  return r;
}

inline ResidualReport verify(const LinearProgram& lp, const Solution& s, double flag_tolerance = 1e-6) {
  return verify(lp, std::span<const double>(s.x), flag_tolerance);
}

// Lagrangian lower bound for any row multipliers y (minimization):
//   L(y) = offset + sum_i y_i b_i(y_i) + sum_j min_{l_j<=x_j<=u_j} (c_j - a_j.y) x_j
// with b_i the row lower bound for y_i > 0 and the upper bound for y_i < 0.
// A multiplier or reduced cost facing an infinite bound makes the bound -inf;
// magnitudes below `zero_tol` are treated as zero.
inline double dual_bound(const LinearProgram& lp, std::span<const double> y, double zero_tol = 1e-9) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (y.size() != static_cast<std::size_t>(lp.num_rows())) fail(ErrorKind::alignment, "dual vector size mismatch");
  double z = lp.objective_offset;
  for (int i = 0; i < lp.num_rows(); ++i) {
    if (std::abs(y[i]) <= zero_tol) continue;
    const double b = y[i] > 0 ? lp.row_lower[i] : lp.row_upper[i];
    if (!std::isfinite(b)) return ninf;
    z += y[i] * b;
  }
  for (int j = 0; j < lp.num_cols(); ++j) {
    double d = lp.cost[j];
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) d -= lp.value[k] * y[lp.row_index[k]];
    if (std::abs(d) <= zero_tol) continue;
    const double b = d > 0 ? lp.col_lower[j] : lp.col_upper[j];
    if (!std::isfinite(b)) return ninf;
    z += d * b;
  }
  return z;
}

}  // namespace hpflex
