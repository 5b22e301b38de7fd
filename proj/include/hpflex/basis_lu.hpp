#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace hpflex::detail {

// Left-looking sparse LU of a simplex basis, P B Q = L U, with threshold
// partial pivoting that prefers short rows. Triangular solves skip zero
// entries, so their cost follows the fill of the result rather than the size
// of the factors. Updates are kept as product-form etas.
class BasisLu {
 public:
  struct Entry {
    int index;
    double value;
  };

  // cols[p] holds the nonzeros (row, value) of basis column p. Returns the
  // basis positions that could not be pivoted, paired in order with rows()
  // left without a pivot; empty when B is nonsingular.
  std::vector<int> factor(int m, const std::vector<std::vector<Entry>>& cols) {
    m_ = m;
    etas_.clear();
    unpivoted_rows_.clear();
    std::vector<int> row_count(m, 0);
    for (const auto& c : cols)
      for (const auto& e : c) ++row_count[e.index];

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return cols[a].size() < cols[b].size(); });

    std::vector<int> rinv(m, -1);  // original row -> pivot step
    std::vector<std::vector<Entry>> lcol;  // per step, original row indices
    std::vector<std::vector<Entry>> ucol;  // per step, pivot-step indices (< step)
    std::vector<double> diag;
    std::vector<int> qcol, prow;
    lcol.reserve(m);
    ucol.reserve(m);

    std::vector<double> x(m, 0.0);
    std::vector<char> in_pattern(m, 0), visited(m, 0);
    std::vector<int> pattern, topo, stack, child;
    std::vector<int> singular;

    for (int p : order) {
      // Pattern of L^-1 b by depth-first search through pivoted rows.
      pattern.clear();
      topo.clear();
      for (const auto& e : cols[p]) {
        x[e.index] = e.value;
        if (!in_pattern[e.index]) {
          in_pattern[e.index] = 1;
          pattern.push_back(e.index);
        }
      }
      for (const auto& e : cols[p]) {
        const int start = e.index;
        if (visited[start] || rinv[start] < 0) continue;
        stack.assign(1, start);
        child.assign(1, 0);
        visited[start] = 1;
        while (!stack.empty()) {
          const int row = stack.back();
          const auto& l = lcol[rinv[row]];
          int& next = child.back();
          bool pushed = false;
          while (next < static_cast<int>(l.size())) {
            const int r = l[next++].index;
            if (!in_pattern[r]) {
              in_pattern[r] = 1;
              pattern.push_back(r);
            }
            if (!visited[r] && rinv[r] >= 0) {
              visited[r] = 1;
              stack.push_back(r);
              child.push_back(0);
              pushed = true;
              break;
            }
          }
          if (!pushed) {
            topo.push_back(row);
            stack.pop_back();
            child.pop_back();
          }
        }
      }
      // Numerical solve in topological order.
      for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const int row = *it;
        const double v = x[row];
        if (v == 0.0) continue;
        for (const auto& e : lcol[rinv[row]]) x[e.index] -= e.value * v;
      }

      // Pivot among rows not yet pivoted.
      double big = 0.0;
      for (int r : pattern)
        if (rinv[r] < 0) big = std::max(big, std::abs(x[r]));
      int piv = -1;
      if (big > 1e-11) {
        for (int r : pattern) {
          if (rinv[r] >= 0 || std::abs(x[r]) < 0.1 * big) continue;
          if (piv < 0 || row_count[r] < row_count[piv] ||
              (row_count[r] == row_count[piv] && std::abs(x[r]) > std::abs(x[piv])))
            piv = r;
        }
      }

      if (piv < 0) {
        singular.push_back(p);
      } else {
        const int step = static_cast<int>(diag.size());
        std::vector<Entry> u, l;
        for (int r : pattern) {
          const double v = x[r];
          if (v == 0.0 || r == piv) continue;
          if (rinv[r] >= 0) u.push_back({rinv[r], v});
          else if (std::abs(v) > 1e-14) l.push_back({r, v / x[piv]});
        }
        diag.push_back(x[piv]);
        rinv[piv] = step;
        prow.push_back(piv);
        qcol.push_back(p);
        ucol.push_back(std::move(u));
        lcol.push_back(std::move(l));
      }
      for (int r : pattern) {
        x[r] = 0.0;
        in_pattern[r] = 0;
        visited[r] = 0;
      }
    }

    if (!singular.empty()) {
      for (int r = 0; r < m; ++r)
        if (rinv[r] < 0) unpivoted_rows_.push_back(r);
      return singular;
    }

    // Store in pivot-step space, by column and by row.
    prow_ = std::move(prow);
    qcol_ = std::move(qcol);
    diag_ = std::move(diag);
    lcol_.assign(m, {});
    ucol_ = std::move(ucol);
    lrow_.assign(m, {});
    urow_.assign(m, {});
    for (int k = 0; k < m; ++k) {
      for (const auto& e : lcol[k]) {
        const int i = rinv[e.index];
        lcol_[k].push_back({i, e.value});
        lrow_[i].push_back({k, e.value});
      }
      for (const auto& e : ucol_[k]) urow_[e.index].push_back({k, e.value});
    }
    work_.assign(m, 0.0);
    return {};
  }

  const std::vector<int>& unpivoted_rows() const { return unpivoted_rows_; }

  // v <- B^-1 v, v indexed by row on entry and by basis position on exit.
  void ftran(Eigen::VectorXd& v) const {
    double* w = work_.data();
    for (int k = 0; k < m_; ++k) w[k] = v[prow_[k]];
    for (int k = 0; k < m_; ++k) {
      const double z = w[k];
      if (z == 0.0) continue;
      for (const auto& e : lcol_[k]) w[e.index] -= e.value * z;
    }
    for (int k = m_ - 1; k >= 0; --k) {
      if (w[k] == 0.0) continue;
      const double z = w[k] /= diag_[k];
      for (const auto& e : ucol_[k]) w[e.index] -= e.value * z;
    }
    for (int k = 0; k < m_; ++k) {
      v[qcol_[k]] = w[k];
      w[k] = 0.0;
    }
    for (const auto& e : etas_) {
      const double wr = v[e.row] / e.pivot;
      if (wr != 0.0)
        for (const auto& t : e.terms) v[t.index] -= t.value * wr;
      v[e.row] = wr;
    }
  }

  // u <- B^-T u, u indexed by basis position on entry and by row on exit.
  void btran(Eigen::VectorXd& u) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = u[it->row];
      for (const auto& t : it->terms) s -= t.value * u[t.index];
      u[it->row] = s / it->pivot;
    }
    double* w = work_.data();
    for (int k = 0; k < m_; ++k) w[k] = u[qcol_[k]];
    for (int k = 0; k < m_; ++k) {
      if (w[k] == 0.0) continue;
      const double z = w[k] /= diag_[k];
      for (const auto& e : urow_[k]) w[e.index] -= e.value * z;
    }
    for (int k = m_ - 1; k >= 0; --k) {
      const double z = w[k];
      if (z == 0.0) continue;
      for (const auto& e : lrow_[k]) w[e.index] -= e.value * z;
    }
    for (int k = 0; k < m_; ++k) {
      u[prow_[k]] = w[k];
      w[k] = 0.0;
    }
  }

  // Column `alpha` = B^-1 a_q replaces basis position `row`.
  void update(int row, const Eigen::VectorXd& alpha) {
    Eta e;
    e.row = row;
    e.pivot = alpha[row];
    for (int p = 0; p < alpha.size(); ++p)
      if (p != row && std::abs(alpha[p]) > 1e-14) e.terms.push_back({p, alpha[p]});
    etas_.push_back(std::move(e));
  }

  int updates() const { return static_cast<int>(etas_.size()); }

  std::size_t factor_nonzeros() const {
    std::size_t n = diag_.size();
    for (const auto& c : lcol_) n += c.size();
    for (const auto& c : ucol_) n += c.size();
    return n;
  }

 private:
  struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<Entry> terms;
  };

  int m_ = 0;
  std::vector<int> prow_, qcol_;
  std::vector<double> diag_;
  std::vector<std::vector<Entry>> lcol_, ucol_, lrow_, urow_;
  std::vector<Eta> etas_;
  std::vector<int> unpivoted_rows_;
  mutable std::vector<double> work_;
};

}  // namespace hpflex::detail
