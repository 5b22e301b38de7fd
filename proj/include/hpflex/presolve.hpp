#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "hpflex/lp.hpp"

namespace hpflex::detail {

// Removes fixed columns, empty rows and singleton rows (turned into column
// bounds). Reductions cascade: fixing a column can empty or singleton a row,
// a singleton row can fix a column.
struct Presolved {
  LinearProgram lp;
  bool infeasible = false;
  std::vector<int> col_of;      // reduced column -> original column
  std::vector<int> row_of;      // reduced row -> original row
  std::vector<double> fixed;    // original column -> value, NaN when kept
  std::vector<double> col_lower, col_upper;  // tightened bounds, original indexing

  struct Singleton {
    int row, col;
    double a;
    double lower, upper;  // column bounds implied by the row
  };
  std::vector<Singleton> singletons;  // in removal order

  // Original-space primal values from reduced-space values.
  std::vector<double> expand_primal(const std::vector<double>& xr) const {
    std::vector<double> x(fixed);
    for (std::size_t k = 0; k < col_of.size(); ++k) x[col_of[k]] = xr[k];
    return x;
  }

  // Original-space row duals: kept rows copy over, removed singleton rows
  // take the reduced cost of their column when they hold it at a bound.
  std::vector<double> expand_dual(const LinearProgram& orig, const std::vector<double>& yr,
                                  const std::vector<double>& x) const {
    std::vector<double> y(orig.num_rows(), 0.0);
    for (std::size_t k = 0; k < row_of.size(); ++k) y[row_of[k]] = yr[k];
    for (auto it = singletons.rbegin(); it != singletons.rend(); ++it) {
      const int j = it->col;
      const double tol = 1e-9 * std::max(1.0, std::abs(x[j]));
      const bool at_row_bound = std::abs(x[j] - it->lower) <= tol || std::abs(x[j] - it->upper) <= tol;
      if (!at_row_bound) continue;
      double d = orig.cost[j];
      for (int k = orig.col_start[j]; k < orig.col_start[j + 1]; ++k) d -= orig.value[k] * y[orig.row_index[k]];
      y[it->row] += d / it->a;
    }
    return y;
  }
};

inline Presolved presolve(const LinearProgram& lp, double feasibility_tol) {
  const int n = lp.num_cols(), m = lp.num_rows();
  Presolved p;
  p.col_lower = lp.col_lower;
  p.col_upper = lp.col_upper;
  std::vector<double> rlo = lp.row_lower, rup = lp.row_upper;
  p.fixed.assign(n, std::numeric_limits<double>::quiet_NaN());

  // Row-wise copy of the matrix.
  std::vector<int> rstart(m + 1, 0), rcol(lp.num_nonzeros());
  std::vector<double> rval(lp.num_nonzeros());
  for (int r : lp.row_index) ++rstart[r + 1];
  for (int i = 0; i < m; ++i) rstart[i + 1] += rstart[i];
  {
    std::vector<int> fill(rstart.begin(), rstart.end() - 1);
    for (int j = 0; j < n; ++j)
      for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
        const int at = fill[lp.row_index[k]]++;
        rcol[at] = j;
        rval[at] = lp.value[k];
      }
  }

  std::vector<char> col_alive(n, 1), row_alive(m, 1);
  std::vector<int> count(m);
  for (int i = 0; i < m; ++i) count[i] = rstart[i + 1] - rstart[i];
  std::vector<int> col_queue, row_queue;
  for (int j = 0; j < n; ++j)
    if (p.col_lower[j] == p.col_upper[j]) col_queue.push_back(j);
  for (int i = 0; i < m; ++i)
    if (count[i] <= 1) row_queue.push_back(i);

  auto tol_of = [&](double a, double b) {
    const double s = std::max(std::isfinite(a) ? std::abs(a) : 0.0, std::isfinite(b) ? std::abs(b) : 0.0);
    return feasibility_tol * std::max(1.0, s);
  };

  double offset = lp.objective_offset;
  while (!col_queue.empty() || !row_queue.empty()) {
    while (!col_queue.empty()) {
      const int j = col_queue.back();
      col_queue.pop_back();
      if (!col_alive[j]) continue;
      const double v = p.col_lower[j];
      col_alive[j] = 0;
      p.fixed[j] = v;
      offset += lp.cost[j] * v;
      for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
        const int i = lp.row_index[k];
        if (!row_alive[i]) continue;
        rlo[i] -= lp.value[k] * v;
        rup[i] -= lp.value[k] * v;
        if (--count[i] <= 1) row_queue.push_back(i);
      }
    }
    while (!row_queue.empty()) {
      const int i = row_queue.back();
      row_queue.pop_back();
      if (!row_alive[i] || count[i] > 1) continue;
      if (count[i] == 0) {
        if (rlo[i] > tol_of(rlo[i], rup[i]) || rup[i] < -tol_of(rlo[i], rup[i])) {
          p.infeasible = true;
          return p;
        }
        row_alive[i] = 0;
        continue;
      }
      int j = -1;
      double a = 0.0;
      for (int k = rstart[i]; k < rstart[i + 1]; ++k)
        if (col_alive[rcol[k]]) {
          j = rcol[k];
          a = rval[k];
          break;
        }
      const double blo = a > 0 ? rlo[i] / a : rup[i] / a;
      const double bup = a > 0 ? rup[i] / a : rlo[i] / a;
      double& lo = p.col_lower[j];
      double& up = p.col_upper[j];
      if (blo > lo) lo = blo;
      if (bup < up) up = bup;
      if (lo > up) {
        if (lo - up > tol_of(lo, up)) {
          p.infeasible = true;
          return p;
        }
        lo = up = 0.5 * (lo + up);
      }
      row_alive[i] = 0;
      p.singletons.push_back({i, j, a, blo, bup});
      if (lo == up) col_queue.push_back(j);
    }
  }

  // Assemble the reduced program.
  LinearProgram& r = p.lp;
  r.name = lp.name;
  r.objective_offset = offset;
  std::vector<int> new_row(m, -1);
  for (int i = 0; i < m; ++i)
    if (row_alive[i]) {
      new_row[i] = static_cast<int>(p.row_of.size());
      p.row_of.push_back(i);
      r.row_names.push_back(lp.row_names[i]);
      r.row_families.push_back(lp.row_families[i]);
      r.row_lower.push_back(rlo[i]);
      r.row_upper.push_back(rup[i]);
    }
  r.col_start.assign(1, 0);
  for (int j = 0; j < n; ++j) {
    if (!col_alive[j]) continue;
    p.col_of.push_back(j);
    r.col_names.push_back(lp.col_names[j]);
    r.col_families.push_back(lp.col_families[j]);
    r.col_lower.push_back(p.col_lower[j]);
    r.col_upper.push_back(p.col_upper[j]);
    r.cost.push_back(lp.cost[j]);
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k)
      if (new_row[lp.row_index[k]] >= 0) {
        r.row_index.push_back(new_row[lp.row_index[k]]);
        r.value.push_back(lp.value[k]);
      }
    r.col_start.push_back(static_cast<int>(r.value.size()));
  }
  return p;
}

}  // namespace hpflex::detail
