#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hpflex/basis_lu.hpp"
#include "hpflex/lp.hpp"
#include "hpflex/presolve.hpp"

namespace hpflex {

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

struct SolveOptions {
  double feasibility_tol = 1e-7;  // relative to max(1, |bound|)
  double optimality_tol = 1e-9;   // on reduced costs
  long max_iterations = 0;        // 0: scaled with problem size
  int refactor_interval = 100;
  bool presolve = true;
  bool dual = true;  // dual simplex whenever the slack basis is dual feasible
};

struct SolveStats {
  long iterations = 0;
  long phase1_iterations = 0;
  long dual_iterations = 0;
  long bound_flips = 0;
  long refactorizations = 0;
  long bland_iterations = 0;
  int presolved_rows = 0;
  int presolved_cols = 0;
  double seconds = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> x;             // column values
  std::vector<double> row_activity;  // A x
  std::vector<double> row_dual;      // y with B^T y = c_B at termination
  std::vector<double> reduced_cost;  // c - A^T y per column
  double objective = 0.0;
  double max_violation = 0.0;  // worst row/column bound violation, absolute
  SolveStats stats;

  bool optimal() const { return status == SolveStatus::optimal; }
};

namespace detail {

// Bounded simplex on [A | -I] (x, r) = 0 with l <= (x, r) <= u, where r are
// the row activities ("logicals").
//
// Dual: starts from the all-logical basis when every structural column can
// sit at a bound matching its cost sign. Leaving row by dual steepest edge,
// entering column by a bound-flipping ratio test with Harris tolerances,
// costs perturbed against dual degeneracy and restored at the end.
//
// Primal: phase 1 minimizes the sum of basic bound violations, entering by
// normalized Dantzig pricing, leaving by a two-pass Harris ratio test, Bland's
// rule while the objective stalls. Used when the dual cannot start and to
// clean up after the perturbation is removed.
class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SolveOptions& opt)
      : lp_(lp), opt_(opt), n_(lp.num_cols()), m_(lp.num_rows()), total_(n_ + m_) {
    lower_.resize(total_);
    upper_.resize(total_);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lower_[j] = lp.col_lower[j];
      upper_[j] = lp.col_upper[j];
      cost_[j] = lp.cost[j];
    }
    for (int i = 0; i < m_; ++i) {
      lower_[n_ + i] = lp.row_lower[i];
      upper_[n_ + i] = lp.row_upper[i];
    }
    original_cost_ = cost_;
    tol_.resize(total_);
    for (int j = 0; j < total_; ++j) {
      const double b = std::max(std::isfinite(lower_[j]) ? std::abs(lower_[j]) : 0.0,
                                std::isfinite(upper_[j]) ? std::abs(upper_[j]) : 0.0);
      tol_[j] = opt_.feasibility_tol * std::max(1.0, b);
    }
    col_scale_.resize(total_);
    for (int j = 0; j < total_; ++j) {
      double s = 1.0;
      if (j < n_)
        for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) s += lp.value[k] * lp.value[k];
      else
        s += 1.0;
      col_scale_[j] = 1.0 / std::sqrt(s);
    }
    // Row-wise copy for pivot rows.
    row_start_.assign(m_ + 1, 0);
    for (int r : lp.row_index) ++row_start_[r + 1];
    for (int i = 0; i < m_; ++i) row_start_[i + 1] += row_start_[i];
    row_col_.resize(lp.num_nonzeros());
    row_val_.resize(lp.num_nonzeros());
    std::vector<int> fill(row_start_.begin(), row_start_.end() - 1);
    for (int j = 0; j < n_; ++j)
      for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
        const int at = fill[lp.row_index[k]]++;
        row_col_[at] = j;
        row_val_[at] = lp.value[k];
      }
    max_iter_ = opt.max_iterations > 0 ? opt.max_iterations : std::max<long>(200000, 50L * total_);
  }

  Solution run() {
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    for (int j = 0; j < total_; ++j)
      if (lower_[j] > upper_[j] + tol_[j]) {
        sol.status = SolveStatus::infeasible;
        finish(sol, t0, false);
        return sol;
      }

    init_basis();
    SolveStatus status;
    if (opt_.dual && dual_start()) {
      status = dual();
      restore_costs();
      if (status == SolveStatus::optimal || status == SolveStatus::iteration_limit) status = primal();
    } else {
      status = primal();
    }
    sol.status = status;
    finish(sol, t0, true);
    return sol;
  }

 private:
  enum : int { kNonbasicLower = -1, kNonbasicUpper = -2, kNonbasicFree = -3 };

  bool is_fixed(int j) const { return lower_[j] == upper_[j]; }
  bool is_boxed(int j) const { return std::isfinite(lower_[j]) && std::isfinite(upper_[j]); }

  void init_basis() {
    x_.assign(total_, 0.0);
    pos_.assign(total_, kNonbasicLower);
    basic_.resize(m_);
    for (int j = 0; j < n_; ++j) place_nonbasic(j);
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      pos_[n_ + i] = i;
    }
    refactor();
  }

  void place_nonbasic(int j) {
    if (std::isfinite(lower_[j])) {
      pos_[j] = kNonbasicLower;
      x_[j] = lower_[j];
    } else if (std::isfinite(upper_[j])) {
      pos_[j] = kNonbasicUpper;
      x_[j] = upper_[j];
    } else {
      pos_[j] = kNonbasicFree;
      x_[j] = 0.0;
    }
  }

  void set_nonbasic(int j, int where) {
    pos_[j] = where;
    x_[j] = where == kNonbasicUpper ? upper_[j] : (where == kNonbasicLower ? lower_[j] : 0.0);
  }

  // Adds column j (structural or logical) times `scale` into dense `v`.
  void add_column(int j, double scale, Eigen::VectorXd& v) const {
    if (j < n_) {
      for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) v[lp_.row_index[k]] += scale * lp_.value[k];
    } else {
      v[j - n_] -= scale;
    }
  }

  double dot_column(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) s += lp_.value[k] * y[lp_.row_index[k]];
    return s;
  }

  std::vector<std::vector<BasisLu::Entry>> basis_columns() const {
    std::vector<std::vector<BasisLu::Entry>> cols(m_);
    for (int p = 0; p < m_; ++p) {
      const int j = basic_[p];
      if (j < n_) {
        for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) cols[p].push_back({lp_.row_index[k], lp_.value[k]});
      } else {
        cols[p].push_back({j - n_, -1.0});
      }
    }
    return cols;
  }

  void refactor() {
    ++stats_.refactorizations;
    if (m_ == 0) return;
    auto singular = factor_.factor(m_, basis_columns());
    if (!singular.empty()) {
      // Swap each column that failed to pivot for the logical of a row left
      // without a pivot; the swapped-out column goes to its nearest bound.
      const auto rows = factor_.unpivoted_rows();
      for (std::size_t k = 0; k < singular.size(); ++k) {
        const int p = singular[k];
        const int out = basic_[p];
        const double v = x_[out];
        place_nonbasic(out);
        if (std::isfinite(upper_[out]) && std::abs(v - upper_[out]) < std::abs(v - x_[out]))
          set_nonbasic(out, kNonbasicUpper);
        basic_[p] = n_ + rows[k];
        pos_[n_ + rows[k]] = p;
        if (!dual_weights_.empty()) dual_weights_[p] = 1.0;
      }
      factor_.factor(m_, basis_columns());
    }
    recompute_basics();
  }

  void recompute_basics() {
    if (m_ == 0) return;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j)
      if (pos_[j] < 0 && x_[j] != 0.0) add_column(j, -x_[j], rhs);
    factor_.ftran(rhs);
    for (int p = 0; p < m_; ++p) x_[basic_[p]] = rhs[p];
  }

  // d = c - A^T y with B^T y = c_B; zero on basic columns.
  void recompute_duals() {
    d_.assign(total_, 0.0);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    for (int p = 0; p < m_; ++p) y[p] = cost_[basic_[p]];
    if (m_ > 0) factor_.btran(y);
    for (int j = 0; j < total_; ++j)
      if (pos_[j] < 0) d_[j] = cost_[j] - (m_ > 0 ? dot_column(j, y) : 0.0);
  }

  // ------------------------------------------------------------------ dual

  // Places every nonbasic column at the bound its reduced cost asks for.
  // False when some column would need an infinite bound.
  bool dual_start() {
    recompute_duals();
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || is_fixed(j)) continue;
      if (d_[j] > opt_.optimality_tol) {
        if (!std::isfinite(lower_[j])) return false;
        set_nonbasic(j, kNonbasicLower);
      } else if (d_[j] < -opt_.optimality_tol) {
        if (!std::isfinite(upper_[j])) return false;
        set_nonbasic(j, kNonbasicUpper);
      }
    }
    perturb_costs();
    recompute_basics();
    recompute_duals();
    dual_weights_.assign(m_, 1.0);
    return true;
  }

  // Small deterministic cost shifts in the direction that keeps the current
  // nonbasic placement dual feasible.
  void perturb_costs() {
    double max_cost = 0.0;
    for (int j = 0; j < n_; ++j) max_cost = std::max(max_cost, std::abs(cost_[j]));
    const double base = 5e-7 * std::min(1.0, std::max(1e-3, max_cost));
    std::uint64_t state = 0x2545F4914F6CDD1Dull;
    for (int j = 0; j < n_; ++j) {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      if (pos_[j] >= 0 || is_fixed(j)) continue;
      const double u = 1.0 + static_cast<double>(state % 1000003) / 1000003.0;
      const double xi = base * u * (1.0 + std::abs(cost_[j]));
      if (pos_[j] == kNonbasicLower) cost_[j] += xi;
      else if (pos_[j] == kNonbasicUpper) cost_[j] -= xi;
      perturbed_ = true;
    }
  }

  void restore_costs() {
    cost_ = original_cost_;
    perturbed_ = false;
  }

  // After refactorization: reduced costs of the wrong sign are repaired by a
  // bound flip (boxed columns) or by shifting the column's cost.
  void repair_dual_feasibility() {
    bool flipped = false;
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || is_fixed(j)) continue;
      const bool wrong_low = pos_[j] == kNonbasicLower && d_[j] < -opt_.optimality_tol;
      const bool wrong_up = pos_[j] == kNonbasicUpper && d_[j] > opt_.optimality_tol;
      const bool wrong_free = pos_[j] == kNonbasicFree && std::abs(d_[j]) > opt_.optimality_tol;
      if (!(wrong_low || wrong_up || wrong_free)) continue;
      if (is_boxed(j) && !wrong_free) {
        set_nonbasic(j, wrong_low ? kNonbasicUpper : kNonbasicLower);
        flipped = true;
      } else {
        cost_[j] -= d_[j];
        d_[j] = 0.0;
      }
    }
    if (flipped) recompute_basics();
  }

  double primal_infeasibility(int j) const {
    if (x_[j] < lower_[j] - tol_[j]) return lower_[j] - x_[j];
    if (x_[j] > upper_[j] + tol_[j]) return x_[j] - upper_[j];
    return 0.0;
  }

  SolveStatus dual() {
    if (m_ == 0) return SolveStatus::optimal;
    Eigen::VectorXd rho(m_), alpha(m_), tau(m_), shift(m_);
    std::vector<double> arow(total_, 0.0);
    std::vector<int> touched;
    std::vector<char> mark(total_, 0);
    struct Candidate {
      int j;
      double alpha;
      double ratio;
    };
    std::vector<Candidate> cands, pass;
    std::vector<int> flips;
    long degenerate = 0;
    bool bland = false;
    int retries = 0;
    bool fresh = true;

    while (stats_.iterations < max_iter_) {
      if (factor_.updates() >= opt_.refactor_interval) {
        refactor();
        recompute_duals();
        repair_dual_feasibility();
        fresh = true;
      }

      // Leaving row: largest infeasibility^2 / weight.
      int r = -1;
      double best = 0.0;
      for (int p = 0; p < m_; ++p) {
        const double inf = primal_infeasibility(basic_[p]);
        if (inf <= 0.0) continue;
        if (bland) {
          if (r < 0 || basic_[p] < basic_[r]) r = p;
          continue;
        }
        const double score = inf * inf / dual_weights_[p];
        if (score > best) {
          best = score;
          r = p;
        }
      }
      if (r < 0) {
        if (!fresh) {
          refactor();
          recompute_duals();
          repair_dual_feasibility();
          fresh = true;
          continue;
        }
        return SolveStatus::optimal;
      }

      const int leaving = basic_[r];
      const int s = x_[leaving] < lower_[leaving] ? 1 : -1;
      const double target = s > 0 ? lower_[leaving] : upper_[leaving];
      double slope = std::abs(x_[leaving] - target);

      rho.setZero();
      rho[r] = 1.0;
      factor_.btran(rho);

      // Pivot row over nonbasic columns.
      for (int j : touched) {
        arow[j] = 0.0;
        mark[j] = 0;
      }
      touched.clear();
      for (int i = 0; i < m_; ++i) {
        const double ri = rho[i];
        if (std::abs(ri) < 1e-12) continue;
        for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
          const int j = row_col_[k];
          if (!mark[j]) {
            mark[j] = 1;
            touched.push_back(j);
          }
          arow[j] += ri * row_val_[k];
        }
        const int lj = n_ + i;
        if (!mark[lj]) {
          mark[lj] = 1;
          touched.push_back(lj);
        }
        arow[lj] -= ri;
      }

      cands.clear();
      for (int j : touched) {
        if (pos_[j] >= 0 || is_fixed(j)) continue;
        const double a = arow[j];
        if (std::abs(a) <= 1e-9) continue;
        int dir = pos_[j] == kNonbasicLower ? 1 : (pos_[j] == kNonbasicUpper ? -1 : (s * a < 0 ? 1 : -1));
        if (dir * s * a >= 0) continue;
        double d = d_[j];
        if (dir > 0) d = std::max(d, 0.0);
        else d = std::min(d, 0.0);
        cands.push_back({j, a, std::abs(d) / std::abs(a)});
      }
      if (cands.empty()) {
        if (!fresh && ++retries <= 3) {
          refactor();
          recompute_duals();
          repair_dual_feasibility();
          fresh = true;
          continue;
        }
        return SolveStatus::infeasible;
      }

      // Bound-flipping ratio test with Harris tolerances.
      flips.clear();
      int q = -1;
      double alpha_rq = 0.0;
      while (true) {
        double theta_max = std::numeric_limits<double>::infinity();
        for (const auto& c : cands)
          theta_max = std::min(theta_max, c.ratio + opt_.optimality_tol / std::abs(c.alpha));
        pass.clear();
        double flip_slope = 0.0;
        bool all_boxed = true;
        for (const auto& c : cands)
          if (c.ratio <= theta_max) {
            pass.push_back(c);
            if (is_boxed(c.j)) flip_slope += std::abs(c.alpha) * (upper_[c.j] - lower_[c.j]);
            else all_boxed = false;
          }
        if (!bland && all_boxed && pass.size() < cands.size() && slope - flip_slope > 0.0) {
          slope -= flip_slope;
          for (const auto& c : pass) flips.push_back(c.j);
          std::erase_if(cands, [&](const Candidate& c) { return c.ratio <= theta_max; });
          continue;
        }
        double big = -1.0;
        for (const auto& c : pass) {
          const double a = std::abs(c.alpha);
          const bool better = bland ? (q < 0 || c.j < q) : (a > big || (a == big && c.j < q));
          if (better) {
            big = a;
            q = c.j;
            alpha_rq = c.alpha;
          }
        }
        break;
      }

      // Entering column.
      alpha.setZero();
      add_column(q, 1.0, alpha);
      factor_.ftran(alpha);
      if (std::abs(alpha[r] - alpha_rq) > 1e-6 * (1.0 + std::abs(alpha_rq)) || std::abs(alpha[r]) < 1e-11) {
        if (++retries > 5) return SolveStatus::iteration_limit;
        refactor();
        recompute_duals();
        repair_dual_feasibility();
        fresh = true;
        continue;
      }
      retries = 0;

      // A reduced cost within tolerance of the wrong sign is shifted to zero.
      if ((pos_[q] == kNonbasicLower && d_[q] < 0.0) || (pos_[q] == kNonbasicUpper && d_[q] > 0.0)) {
        cost_[q] -= d_[q];
        d_[q] = 0.0;
      }
      const double theta_d = d_[q] / alpha_rq;

      // Bound flips move the basics.
      if (!flips.empty()) {
        shift.setZero();
        for (int j : flips) {
          const double old = x_[j];
          set_nonbasic(j, pos_[j] == kNonbasicLower ? kNonbasicUpper : kNonbasicLower);
          add_column(j, x_[j] - old, shift);
        }
        factor_.ftran(shift);
        for (int p = 0; p < m_; ++p) x_[basic_[p]] -= shift[p];
        stats_.bound_flips += static_cast<long>(flips.size());
      }

      // Dual steepest-edge weights.
      tau = rho;
      factor_.ftran(tau);
      const double w_r = rho.squaredNorm();
      const double pivot = alpha[r];
      for (int p = 0; p < m_; ++p) {
        if (p == r || alpha[p] == 0.0) continue;
        const double ratio = alpha[p] / pivot;
        dual_weights_[p] = std::max(dual_weights_[p] + ratio * (ratio * w_r - 2.0 * tau[p]), 1e-8);
      }
      dual_weights_[r] = std::max(w_r / (pivot * pivot), 1e-8);

      // Primal step.
      const double theta_p = (x_[leaving] - target) / pivot;
      for (int p = 0; p < m_; ++p) x_[basic_[p]] -= theta_p * alpha[p];
      x_[q] += theta_p;

      // Reduced costs.
      for (int j : touched)
        if (pos_[j] < 0) d_[j] -= theta_d * arow[j];
      d_[q] = 0.0;
      d_[leaving] = -theta_d;

      basic_[r] = q;
      pos_[q] = r;
      set_nonbasic(leaving, s > 0 || is_fixed(leaving) ? kNonbasicLower : kNonbasicUpper);
      factor_.update(r, alpha);
      fresh = false;

      ++stats_.iterations;
      ++stats_.dual_iterations;
      if (bland) ++stats_.bland_iterations;
      if (theta_d == 0.0) {
        if (++degenerate > 200 + m_ / 20) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
    return SolveStatus::iteration_limit;
  }

  // ---------------------------------------------------------------- primal

  // Phase-1 cost of a basic variable: -1 below its lower bound, +1 above.
  double infeasibility_cost(int j) const {
    if (x_[j] < lower_[j] - tol_[j]) return -1.0;
    if (x_[j] > upper_[j] + tol_[j]) return 1.0;
    return 0.0;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int p = 0; p < m_; ++p) s += primal_infeasibility(basic_[p]);
    return s;
  }

  double phase2_objective() const {
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
    return z;
  }

  SolveStatus primal() {
    long stall = 0;
    bool bland = false;
    double best_merit = std::numeric_limits<double>::infinity();
    int numerical_retries = 0;
    bool last_phase1 = true;
    Eigen::VectorXd y(m_), alpha(m_);

    for (; stats_.iterations < max_iter_; ++stats_.iterations) {
      if (factor_.updates() >= opt_.refactor_interval) refactor();

      // Phase selection and basic costs.
      bool phase1 = false;
      for (int p = 0; p < m_; ++p) {
        y[p] = infeasibility_cost(basic_[p]);
        phase1 |= y[p] != 0.0;
      }
      if (!phase1)
        for (int p = 0; p < m_; ++p) y[p] = cost_[basic_[p]];
      if (phase1) ++stats_.phase1_iterations;
      if (m_ > 0) factor_.btran(y);

      // Pricing.
      int q = -1;
      double best = 0.0;
      int dir = 0;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0 || is_fixed(j)) continue;
        const double cj = phase1 ? 0.0 : cost_[j];
        const double d = cj - (m_ > 0 ? dot_column(j, y) : 0.0);
        int jdir = 0;
        if (d < -opt_.optimality_tol && x_[j] < upper_[j]) jdir = 1;
        else if (d > opt_.optimality_tol && x_[j] > lower_[j]) jdir = -1;
        if (jdir == 0) continue;
        if (bland) {
          q = j;
          dir = jdir;
          break;
        }
        const double score = std::abs(d) * col_scale_[j];
        if (score > best) {
          best = score;
          q = j;
          dir = jdir;
        }
      }

      if (q < 0) {
        // No improving direction: confirm on a fresh factorization.
        if (factor_.updates() > 0) {
          refactor();
          continue;
        }
        return phase1 ? SolveStatus::infeasible : SolveStatus::optimal;
      }

      alpha.setZero();
      if (m_ > 0) {
        add_column(q, 1.0, alpha);
        factor_.ftran(alpha);
      }

      // Ratio test, pass 1: largest step with relaxed bounds.
      const double pivot_tol = 1e-9;
      double theta_max = std::numeric_limits<double>::infinity();
      for (int p = 0; p < m_; ++p) {
        const double a = alpha[p];
        if (std::abs(a) <= pivot_tol) continue;
        const double delta = -dir * a;
        const int j = basic_[p];
        const double tol = bland ? 0.0 : tol_[j] * 1e-2;
        double limit = std::numeric_limits<double>::infinity();
        if (delta < 0) {
          if (x_[j] > upper_[j] + tol_[j]) limit = (x_[j] - upper_[j] + tol) / -delta;
          else if (std::isfinite(lower_[j]) && x_[j] >= lower_[j] - tol_[j])
            limit = (x_[j] - lower_[j] + tol) / -delta;
        } else {
          if (x_[j] < lower_[j] - tol_[j]) limit = (lower_[j] - x_[j] + tol) / delta;
          else if (std::isfinite(upper_[j]) && x_[j] <= upper_[j] + tol_[j])
            limit = (upper_[j] - x_[j] + tol) / delta;
        }
        theta_max = std::min(theta_max, limit);
      }

      // Pass 2: among rows blocking within that step, the largest pivot.
      int leave = -1;
      double leave_bound = 0.0;
      double theta = 0.0;
      double best_pivot = 0.0;
      for (int p = 0; p < m_; ++p) {
        const double a = alpha[p];
        if (std::abs(a) <= pivot_tol) continue;
        const double delta = -dir * a;
        const int j = basic_[p];
        double exact = std::numeric_limits<double>::infinity(), target = 0.0;
        if (delta < 0) {
          if (x_[j] > upper_[j] + tol_[j]) {
            exact = (x_[j] - upper_[j]) / -delta;
            target = upper_[j];
          } else if (std::isfinite(lower_[j]) && x_[j] >= lower_[j] - tol_[j]) {
            exact = (x_[j] - lower_[j]) / -delta;
            target = lower_[j];
          }
        } else {
          if (x_[j] < lower_[j] - tol_[j]) {
            exact = (lower_[j] - x_[j]) / delta;
            target = lower_[j];
          } else if (std::isfinite(upper_[j]) && x_[j] <= upper_[j] + tol_[j]) {
            exact = (upper_[j] - x_[j]) / delta;
            target = upper_[j];
          }
        }
        if (!std::isfinite(exact) || !(exact <= theta_max)) continue;
        const bool better = bland ? (leave < 0 || j < basic_[leave]) : std::abs(a) > best_pivot;
        if (better) {
          best_pivot = std::abs(a);
          leave = p;
          leave_bound = target;
          theta = std::max(exact, 0.0);
        }
      }

      const double own_range = upper_[q] - lower_[q];
      const bool flip = std::isfinite(own_range) && (leave < 0 || own_range <= theta);
      if (flip) theta = own_range;

      if (!flip && leave < 0) {
        if (!phase1) return SolveStatus::unbounded;
        if (++numerical_retries > 3) return SolveStatus::infeasible;
        refactor();
        continue;
      }

      x_[q] += dir * theta;
      for (int p = 0; p < m_; ++p) x_[basic_[p]] -= dir * theta * alpha[p];

      if (flip) {
        ++stats_.bound_flips;
        set_nonbasic(q, dir > 0 ? kNonbasicUpper : kNonbasicLower);
      } else {
        const int out = basic_[leave];
        const bool to_upper = std::isfinite(upper_[out]) && leave_bound == upper_[out] && leave_bound != lower_[out];
        basic_[leave] = q;
        pos_[q] = leave;
        if (!std::isfinite(lower_[out]) && !std::isfinite(upper_[out])) set_nonbasic(out, kNonbasicFree);
        else set_nonbasic(out, to_upper ? kNonbasicUpper : kNonbasicLower);
        x_[out] = leave_bound;
        factor_.update(leave, alpha);
        if (std::abs(alpha[leave]) < 1e-7) refactor();
      }

      // Stall detection: Bland's rule until the merit improves.
      if (bland) ++stats_.bland_iterations;
      const double merit = phase1 ? total_infeasibility() : phase2_objective();
      if (phase1 != last_phase1) {
        best_merit = std::numeric_limits<double>::infinity();
        last_phase1 = phase1;
      }
      if (merit < best_merit - 1e-12 * std::max(1.0, std::abs(best_merit))) {
        best_merit = merit;
        stall = 0;
        bland = false;
      } else if (++stall > 200 + m_ / 20) {
        bland = true;
      }
    }
    return SolveStatus::iteration_limit;
  }

  void finish(Solution& sol, std::chrono::steady_clock::time_point t0, bool have_basis) {
    sol.x.assign(n_, 0.0);
    if (have_basis) {
      for (int j = 0; j < n_; ++j) sol.x[j] = x_[j];
    } else {
      for (int j = 0; j < n_; ++j) sol.x[j] = std::isfinite(lower_[j]) ? lower_[j] : 0.0;
    }
    sol.row_dual.assign(m_, 0.0);
    if (have_basis && m_ > 0) {
      if (factor_.updates() > 0) refactor();
      Eigen::VectorXd y(m_);
      for (int p = 0; p < m_; ++p) y[p] = original_cost_[basic_[p]];
      factor_.btran(y);
      for (int i = 0; i < m_; ++i) sol.row_dual[i] = y[i];
      for (int j = 0; j < n_; ++j) sol.x[j] = x_[j];
    }
    sol.stats = stats_;
    sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  const LinearProgram& lp_;
  SolveOptions opt_;
  int n_, m_, total_;
  long max_iter_ = 0;
  std::vector<double> lower_, upper_, cost_, original_cost_, tol_, col_scale_;
  std::vector<double> x_, d_, dual_weights_;
  std::vector<int> pos_;    // basis position, or a kNonbasic* marker
  std::vector<int> basic_;  // variable at each basis position
  std::vector<int> row_start_, row_col_;
  std::vector<double> row_val_;
  BasisLu factor_;
  SolveStats stats_;
  bool perturbed_ = false;
};

// Fills activities, objective, reduced costs and violations from x and y.
inline void complete_solution(const LinearProgram& lp, Solution& sol) {
  sol.row_activity = lp.row_activity(sol.x);
  sol.objective = lp.objective(sol.x);
  sol.reduced_cost.assign(lp.cost.begin(), lp.cost.end());
  for (int j = 0; j < lp.num_cols(); ++j)
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k)
      sol.reduced_cost[j] -= lp.value[k] * sol.row_dual[lp.row_index[k]];
  double viol = 0.0;
  for (int j = 0; j < lp.num_cols(); ++j) viol = std::max({viol, lp.col_lower[j] - sol.x[j], sol.x[j] - lp.col_upper[j]});
  for (int i = 0; i < lp.num_rows(); ++i)
    viol = std::max({viol, lp.row_lower[i] - sol.row_activity[i], sol.row_activity[i] - lp.row_upper[i]});
  sol.max_violation = std::max(viol, 0.0);
}

}  // namespace detail

// Solves `lp` to an optimal basic solution. Never throws for infeasible or
// unbounded problems; the status says what happened.
inline Solution solve(const LinearProgram& lp, const SolveOptions& options = {}) {
  lp.check();
  const auto t0 = std::chrono::steady_clock::now();
  if (!options.presolve) {
    detail::RevisedSimplex simplex(lp, options);
    Solution sol = simplex.run();
    detail::complete_solution(lp, sol);
    return sol;
  }

  const detail::Presolved pre = detail::presolve(lp, options.feasibility_tol);
  Solution sol;
  if (pre.infeasible) {
    sol.status = SolveStatus::infeasible;
    sol.x.resize(lp.num_cols());
    for (int j = 0; j < lp.num_cols(); ++j) sol.x[j] = std::isfinite(lp.col_lower[j]) ? lp.col_lower[j] : 0.0;
    sol.row_dual.assign(lp.num_rows(), 0.0);
  } else {
    detail::RevisedSimplex simplex(pre.lp, options);
    Solution red = simplex.run();
    sol.status = red.status;
    sol.stats = red.stats;
    sol.x = pre.expand_primal(red.x);
    sol.row_dual = pre.expand_dual(lp, red.row_dual, sol.x);
  }
  sol.stats.presolved_rows = pre.infeasible ? lp.num_rows() : pre.lp.num_rows();
  sol.stats.presolved_cols = pre.infeasible ? lp.num_cols() : pre.lp.num_cols();
  detail::complete_solution(lp, sol);
  sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace hpflex
