#pragma once

// Bounded-variable revised simplex. Primal phase 1 uses auxiliary artificial
// variables; warm starts that lost primal feasibility (bound changes in
// branch-and-bound) are repaired by a dual simplex pass. The basis inverse is
// kept as a sparse LU factorization plus a product-form eta file, and is
// refactorized periodically.
//
// Pivoting: Dantzig pricing, switching to Bland's rule after a run of
// degenerate pivots; ratio-test ties broken by larger pivot magnitude, then
// by smaller variable index, so runs are deterministic.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ucpd/lp_model.hpp"

namespace ucpd {

struct SimplexOptions {
  double feas_tol = 1e-7;    // bound/row feasibility
  double opt_tol = 1e-7;     // reduced-cost optimality threshold
  double pivot_tol = 1e-9;   // smallest acceptable pivot element
  int refactor_every = 100;  // pivots between refactorizations
  int bland_after = 50;      // consecutive degenerate pivots before Bland
  int64_t max_iterations = -1;  // -1: scaled with the model size
};

namespace detail {

class SimplexEngine {
 public:
  SimplexEngine(const LpModel& model, const SimplexOptions& opt)
      : model_(model), opt_(opt), n_(model.num_cols()), m_(model.num_rows()) {
    // Structural columns in compressed form.
    col_ptr_.assign(static_cast<size_t>(n_) + 1, 0);
    for (const LpRow& row : model.rows)
      for (const auto& [j, coef] : row.terms) {
        if (j < 0 || j >= n_) throw InternalError("lp: column index out of range");
        if (coef != 0.0) ++col_ptr_[static_cast<size_t>(j) + 1];
      }
    for (int j = 0; j < n_; ++j) col_ptr_[j + 1] += col_ptr_[j];
    col_row_.resize(col_ptr_[n_]);
    col_val_.resize(col_ptr_[n_]);
    std::vector<int> fill(col_ptr_.begin(), col_ptr_.end() - 1);
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, coef] : model.rows[static_cast<size_t>(i)].terms)
        if (coef != 0.0) {
          col_row_[fill[j]] = i;
          col_val_[fill[j]] = coef;
          ++fill[j];
        }

    lo_ = model.lower;
    up_ = model.upper;
    cost_.assign(static_cast<size_t>(n_) + static_cast<size_t>(m_), 0.0);
    std::copy(model.objective.begin(), model.objective.end(), cost_.begin());
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const LpRow& row = model.rows[static_cast<size_t>(i)];
      b_[i] = row.rhs;
      switch (row.sense) {
        case RowSense::kLE: lo_.push_back(0.0); up_.push_back(kInf); break;
        case RowSense::kGE: lo_.push_back(-kInf); up_.push_back(0.0); break;
        case RowSense::kEQ: lo_.push_back(0.0); up_.push_back(0.0); break;
      }
      cost_[static_cast<size_t>(n_ + i)] = 0.0;
    }
    if (opt_.max_iterations > 0) {
      max_iter_ = opt_.max_iterations;
    } else {
      max_iter_ = 5000 + 60LL * (n_ + m_);
    }
  }

  LpSolution solve(const Basis* warm) {
    LpSolution sol;
    bool warmed = warm != nullptr && !warm->empty() && load_basis(*warm);
    if (!warmed) {
      if (!cold_start()) {  // phase 1
        sol.status = iterations_ >= max_iter_ ? LpStatus::kIterLimit
                                              : LpStatus::kInfeasible;
        sol.iterations = iterations_;
        return sol;
      }
    } else {
      double infeas = primal_infeasibility();
      if (infeas > opt_.feas_tol) {
        if (!dual_feasible() || !dual_simplex()) {
          // Repair failed or concluded infeasible; confirm from scratch.
          reset_to_cold();
          if (!cold_start()) {
            sol.status = iterations_ >= max_iter_ ? LpStatus::kIterLimit
                                                  : LpStatus::kInfeasible;
            sol.iterations = iterations_;
            return sol;
          }
        }
      }
    }

    PrimalResult res = primal();
    sol.iterations = iterations_;
    if (res == PrimalResult::kUnbounded) {
      sol.status = LpStatus::kUnbounded;
      return sol;
    }
    if (res == PrimalResult::kIterLimit) {
      sol.status = LpStatus::kIterLimit;
      return sol;
    }
    extract(sol);
    return sol;
  }

 private:
  enum class PrimalResult { kOptimal, kUnbounded, kIterLimit };

  int total() const { return n_ + m_ + static_cast<int>(art_row_.size()); }

  bool is_artificial(int j) const { return j >= n_ + m_; }

  double cost_of(int j) const {
    if (phase1_) return is_artificial(j) ? 1.0 : 0.0;
    return is_artificial(j) ? 0.0 : cost_[static_cast<size_t>(j)];
  }

  // Appends the column of variable j (dense) scaled by `scale` into v.
  void add_column(int j, double scale, Eigen::VectorXd& v) const {
    if (j < n_) {
      for (size_t k = col_ptr_[j]; k < col_ptr_[static_cast<size_t>(j) + 1]; ++k)
        v[col_row_[k]] += scale * col_val_[k];
    } else if (j < n_ + m_) {
      v[j - n_] += scale;
    } else {
      v[art_row_[static_cast<size_t>(j - n_ - m_)]] +=
          scale * art_sign_[static_cast<size_t>(j - n_ - m_)];
    }
  }

  double dot_column(int j, const Eigen::VectorXd& y) const {
    if (j < n_) {
      double d = 0.0;
      for (size_t k = col_ptr_[j]; k < col_ptr_[static_cast<size_t>(j) + 1]; ++k)
        d += y[col_row_[k]] * col_val_[k];
      return d;
    }
    if (j < n_ + m_) return y[j - n_];
    return y[art_row_[static_cast<size_t>(j - n_ - m_)]] *
           art_sign_[static_cast<size_t>(j - n_ - m_)];
  }

  double lower_of(int j) const {
    return j < n_ + m_ ? lo_[static_cast<size_t>(j)]
                       : art_lo_[static_cast<size_t>(j - n_ - m_)];
  }
  double upper_of(int j) const {
    return j < n_ + m_ ? up_[static_cast<size_t>(j)]
                       : art_up_[static_cast<size_t>(j - n_ - m_)];
  }
  bool fixed(int j) const { return upper_of(j) - lower_of(j) <= 0.0; }

  double nonbasic_value(int j) const {
    switch (vstat_[static_cast<size_t>(j)]) {
      case VarStatus::kAtLower: return lower_of(j);
      case VarStatus::kAtUpper: return upper_of(j);
      default: return 0.0;
    }
  }

  // ---- factorization -------------------------------------------------

  bool refactor() {
    std::vector<Eigen::Triplet<double>> tr;
    for (int r = 0; r < m_; ++r) {
      int j = basic_[static_cast<size_t>(r)];
      if (j < n_) {
        for (size_t k = col_ptr_[j]; k < col_ptr_[static_cast<size_t>(j) + 1];
             ++k)
          tr.emplace_back(col_row_[k], r, col_val_[k]);
      } else if (j < n_ + m_) {
        tr.emplace_back(j - n_, r, 1.0);
      } else {
        tr.emplace_back(art_row_[static_cast<size_t>(j - n_ - m_)], r,
                        art_sign_[static_cast<size_t>(j - n_ - m_)]);
      }
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(tr.begin(), tr.end());
    lu_.factorize(B);
    etas_.clear();
    if (!lu_.ok) return false;
    recompute_basics();
    return true;
  }

  struct Lu {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    bool ok = false;
    void factorize(Eigen::SparseMatrix<double>& B) {
      if (B.rows() == 0) {  // row-free model, basis is empty
        ok = true;
        return;
      }
      B.makeCompressed();
      solver.analyzePattern(B);
      solver.factorize(B);
      ok = solver.info() == Eigen::Success;
    }
  };

  struct Eta {  // B_new = B_old * E, E's column `row` replaced by d
    int row;
    std::vector<std::pair<int, double>> d;
    double pivot;
  };

  void ftran(Eigen::VectorXd& v) {
    if (v.size() == 0) return;
    Eigen::VectorXd base = lu_.solver.solve(v);
    v.swap(base);
    for (const Eta& e : etas_) {
      double pr = v[e.row] / e.pivot;
      if (pr != 0.0)
        for (const auto& [i, d] : e.d)
          if (i != e.row) v[i] -= d * pr;
      v[e.row] = pr;
    }
  }

  void btran(Eigen::VectorXd& v) {
    if (v.size() == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double dot = 0.0;
      for (const auto& [i, d] : it->d)
        if (i != it->row) dot += d * v[i];
      v[it->row] = (v[it->row] - dot) / it->pivot;
    }
    Eigen::VectorXd base = lu_.solver.transpose().solve(v);
    v.swap(base);
  }

  void recompute_basics() {
    Eigen::VectorXd rhs = b_;
    for (int j = 0; j < total(); ++j)
      if (vstat_[static_cast<size_t>(j)] != VarStatus::kBasic) {
        double v = nonbasic_value(j);
        if (v != 0.0) add_column(j, -v, rhs);
        x_[static_cast<size_t>(j)] = v;
      }
    ftran(rhs);
    for (int r = 0; r < m_; ++r)
      x_[static_cast<size_t>(basic_[static_cast<size_t>(r)])] = rhs[r];
  }

  double primal_infeasibility() const {
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) {
      int j = basic_[static_cast<size_t>(r)];
      double v = x_[static_cast<size_t>(j)];
      worst = std::max(worst, lower_of(j) - v);
      worst = std::max(worst, v - upper_of(j));
    }
    return worst;
  }

  // ---- start-up ------------------------------------------------------

  bool load_basis(const Basis& warm) {
    if (static_cast<int>(warm.logical.size()) != m_) return false;
    if (static_cast<int>(warm.structural.size()) > n_) return false;
    art_row_.clear();
    art_sign_.clear();
    art_lo_.clear();
    art_up_.clear();
    vstat_.assign(static_cast<size_t>(n_ + m_), VarStatus::kAtLower);
    basic_.clear();
    for (int j = 0; j < n_ + m_; ++j) {
      VarStatus st = VarStatus::kAtLower;
      if (j < n_) {
        st = j < static_cast<int>(warm.structural.size())
                 ? warm.structural[static_cast<size_t>(j)]
                 : default_status(j);
      } else {
        st = warm.logical[static_cast<size_t>(j - n_)];
      }
      if (st == VarStatus::kBasic) {
        basic_.push_back(j);
      } else {
        st = sanitize_status(j, st);
      }
      vstat_[static_cast<size_t>(j)] = st;
    }
    if (static_cast<int>(basic_.size()) != m_) return false;
    x_.assign(static_cast<size_t>(total()), 0.0);
    return refactor();
  }

  VarStatus default_status(int j) const {
    if (std::isfinite(lower_of(j))) return VarStatus::kAtLower;
    if (std::isfinite(upper_of(j))) return VarStatus::kAtUpper;
    return VarStatus::kFreeNonbasic;
  }

  // A nonbasic status naming an infinite bound is replaced by something valid.
  VarStatus sanitize_status(int j, VarStatus st) const {
    if (st == VarStatus::kAtLower && !std::isfinite(lower_of(j)))
      return default_status(j);
    if (st == VarStatus::kAtUpper && !std::isfinite(upper_of(j)))
      return default_status(j);
    if (st == VarStatus::kFreeNonbasic &&
        (std::isfinite(lower_of(j)) || std::isfinite(upper_of(j))))
      return default_status(j);
    return st;
  }

  void reset_to_cold() {
    art_row_.clear();
    art_sign_.clear();
    art_lo_.clear();
    art_up_.clear();
  }

  // Builds the all-logical basis, planting artificials on rows whose logical
  // range cannot absorb the residual, then runs phase 1. Returns feasibility.
  bool cold_start() {
    reset_to_cold();
    vstat_.assign(static_cast<size_t>(n_ + m_), VarStatus::kAtLower);
    basic_.clear();
    Eigen::VectorXd act = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < n_; ++j) {
      vstat_[static_cast<size_t>(j)] = default_status(j);
      double v = nonbasic_value(j);
      if (v != 0.0) add_column(j, v, act);
    }
    bool art_needed = false;
    for (int i = 0; i < m_; ++i) {
      double resid = b_[i] - act[i];
      double llo = lo_[static_cast<size_t>(n_ + i)];
      double lup = up_[static_cast<size_t>(n_ + i)];
      if (resid >= llo && resid <= lup) {
        basic_.push_back(n_ + i);
        vstat_[static_cast<size_t>(n_ + i)] = VarStatus::kBasic;
      } else {
        double pinned = resid < llo ? llo : lup;
        vstat_[static_cast<size_t>(n_ + i)] =
            resid < llo ? VarStatus::kAtLower : VarStatus::kAtUpper;
        double shortfall = resid - pinned;
        art_row_.push_back(i);
        art_sign_.push_back(shortfall > 0.0 ? 1.0 : -1.0);
        art_lo_.push_back(0.0);
        art_up_.push_back(kInf);
        vstat_.push_back(VarStatus::kBasic);
        basic_.push_back(n_ + m_ + static_cast<int>(art_row_.size()) - 1);
        art_needed = true;
      }
    }
    x_.assign(static_cast<size_t>(total()), 0.0);
    if (!refactor()) throw InternalError("lp: initial basis is singular");
    if (!art_needed) return true;

    phase1_ = true;
    PrimalResult res = primal();
    phase1_ = false;
    if (res != PrimalResult::kOptimal) return false;
    double infeas = 0.0;
    for (size_t k = 0; k < art_row_.size(); ++k)
      infeas += std::abs(x_[static_cast<size_t>(n_ + m_) + k]);
    double scale = 1.0;
    for (int i = 0; i < m_; ++i) scale += std::abs(b_[i]);
    if (infeas > opt_.feas_tol * scale) return false;
    // Freeze the artificials at zero for phase 2.
    for (size_t k = 0; k < art_row_.size(); ++k) {
      art_lo_[k] = art_up_[k] = 0.0;
      int j = n_ + m_ + static_cast<int>(k);
      if (vstat_[static_cast<size_t>(j)] != VarStatus::kBasic) {
        vstat_[static_cast<size_t>(j)] = VarStatus::kAtLower;
        x_[static_cast<size_t>(j)] = 0.0;
      }
    }
    return true;
  }

  // ---- primal simplex ------------------------------------------------

  PrimalResult primal() {
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= max_iter_) return PrimalResult::kIterLimit;
      ++iterations_;
      Eigen::VectorXd y(m_);
      for (int r = 0; r < m_; ++r)
        y[r] = cost_of(basic_[static_cast<size_t>(r)]);
      btran(y);

      bool bland = degenerate_run >= opt_.bland_after;
      int q = -1;
      double best = opt_.opt_tol;
      int dirq = 0;
      for (int j = 0; j < total(); ++j) {
        if (vstat_[static_cast<size_t>(j)] == VarStatus::kBasic || fixed(j))
          continue;
        double dj = cost_of(j) - dot_column(j, y);
        int dir = 0;
        switch (vstat_[static_cast<size_t>(j)]) {
          case VarStatus::kAtLower:
            if (dj < -opt_.opt_tol) dir = 1;
            break;
          case VarStatus::kAtUpper:
            if (dj > opt_.opt_tol) dir = -1;
            break;
          case VarStatus::kFreeNonbasic:
            if (std::abs(dj) > opt_.opt_tol) dir = dj < 0 ? 1 : -1;
            break;
          default: break;
        }
        if (dir == 0) continue;
        if (bland) {
          q = j;
          dirq = dir;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          q = j;
          dirq = dir;
        }
      }
      if (q < 0) return PrimalResult::kOptimal;

      Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
      add_column(q, 1.0, w);
      ftran(w);

      // Ratio test: entering moves by t in direction dirq; basic i changes
      // at rate -dirq * w_i.
      double t_limit = upper_of(q) - lower_of(q);  // bound flip
      int leave = -1;                              // basic position
      double leave_pivot = 0.0;
      for (int r = 0; r < m_; ++r) {
        double rate = -dirq * w[r];
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        int j = basic_[static_cast<size_t>(r)];
        double v = x_[static_cast<size_t>(j)];
        double t;
        if (rate < 0.0) {
          double l = lower_of(j);
          if (!std::isfinite(l)) continue;
          t = (v - l) / -rate;
        } else {
          double u = upper_of(j);
          if (!std::isfinite(u)) continue;
          t = (u - v) / rate;
        }
        if (t < 0.0) t = 0.0;
        bool better = false;
        if (t < t_limit - 1e-12) {
          better = true;
        } else if (t < t_limit + 1e-12 && leave >= 0) {
          // Tie: prefer the larger pivot for stability, then the smaller
          // variable index. Under Bland's rule only the index decides.
          if (bland) {
            better = j < basic_[static_cast<size_t>(leave)];
          } else {
            better =
                std::abs(w[r]) > std::abs(leave_pivot) + 1e-12 ||
                (std::abs(std::abs(w[r]) - std::abs(leave_pivot)) <= 1e-12 &&
                 j < basic_[static_cast<size_t>(leave)]);
          }
        }
        if (better) {
          t_limit = std::min(t, t_limit);
          leave = r;
          leave_pivot = w[r];
        }
      }

      if (!std::isfinite(t_limit)) return PrimalResult::kUnbounded;

      degenerate_run = t_limit <= 1e-10 ? degenerate_run + 1 : 0;

      // Apply the step.
      if (t_limit > 0.0) {
        for (int r = 0; r < m_; ++r) {
          double rate = -dirq * w[r];
          if (rate != 0.0)
            x_[static_cast<size_t>(basic_[static_cast<size_t>(r)])] +=
                rate * t_limit;
        }
      }
      double xq = (vstat_[static_cast<size_t>(q)] == VarStatus::kFreeNonbasic
                       ? 0.0
                       : nonbasic_value(q)) +
                  dirq * t_limit;

      if (leave < 0) {
        // Bound flip: q jumps to its opposite bound, basis unchanged.
        vstat_[static_cast<size_t>(q)] =
            dirq > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x_[static_cast<size_t>(q)] = nonbasic_value(q);
        continue;
      }

      int out = basic_[static_cast<size_t>(leave)];
      double rate_out = -dirq * leave_pivot;
      vstat_[static_cast<size_t>(out)] =
          rate_out < 0.0 ? VarStatus::kAtLower : VarStatus::kAtUpper;
      x_[static_cast<size_t>(out)] = nonbasic_value(out);
      basic_[static_cast<size_t>(leave)] = q;
      vstat_[static_cast<size_t>(q)] = VarStatus::kBasic;
      x_[static_cast<size_t>(q)] = xq;
      push_eta(leave, w);
      if (static_cast<int>(etas_.size()) >= opt_.refactor_every)
        if (!refactor()) throw InternalError("lp: basis became singular");
    }
  }

  void push_eta(int row, const Eigen::VectorXd& w) {
    Eta e;
    e.row = row;
    e.pivot = w[row];
    for (int i = 0; i < m_; ++i)
      if (w[i] != 0.0 && std::abs(w[i]) > 1e-13) e.d.emplace_back(i, w[i]);
    etas_.push_back(std::move(e));
  }

  // ---- dual simplex (warm-start repair after bound changes) -----------

  bool dual_feasible() {
    Eigen::VectorXd y(m_);
    for (int r = 0; r < m_; ++r)
      y[r] = cost_of(basic_[static_cast<size_t>(r)]);
    btran(y);
    for (int j = 0; j < total(); ++j) {
      if (vstat_[static_cast<size_t>(j)] == VarStatus::kBasic || fixed(j))
        continue;
      double dj = cost_of(j) - dot_column(j, y);
      switch (vstat_[static_cast<size_t>(j)]) {
        case VarStatus::kAtLower:
          if (dj < -1e-6) return false;
          break;
        case VarStatus::kAtUpper:
          if (dj > 1e-6) return false;
          break;
        case VarStatus::kFreeNonbasic:
          if (std::abs(dj) > 1e-6) return false;
          break;
        default: break;
      }
    }
    return true;
  }

  // Returns true when primal feasibility is restored; false means "could not
  // repair" (caller falls back to a cold solve, which also decides
  // infeasibility authoritatively).
  bool dual_simplex() {
    int64_t start = iterations_;
    while (true) {
      if (iterations_ >= max_iter_ || iterations_ - start > 4LL * (m_ + n_))
        return false;
      ++iterations_;
      int leave = -1;
      double worst = opt_.feas_tol;
      for (int r = 0; r < m_; ++r) {
        int j = basic_[static_cast<size_t>(r)];
        double v = x_[static_cast<size_t>(j)];
        double viol = std::max(lower_of(j) - v, v - upper_of(j));
        if (viol > worst) {
          worst = viol;
          leave = r;
        }
      }
      if (leave < 0) return true;  // primal feasible again

      int out = basic_[static_cast<size_t>(leave)];
      double v_out = x_[static_cast<size_t>(out)];
      bool below = v_out < lower_of(out);
      double target = below ? lower_of(out) : upper_of(out);
      double tau = below ? -1.0 : 1.0;

      Eigen::VectorXd rho = Eigen::VectorXd::Zero(m_);
      rho[leave] = 1.0;
      btran(rho);
      Eigen::VectorXd y(m_);
      for (int r = 0; r < m_; ++r)
        y[r] = cost_of(basic_[static_cast<size_t>(r)]);
      btran(y);

      int q = -1;
      double best_ratio = kInf;
      double best_alpha = 0.0;
      for (int j = 0; j < total(); ++j) {
        if (vstat_[static_cast<size_t>(j)] == VarStatus::kBasic || fixed(j))
          continue;
        double alpha = dot_column(j, rho);
        if (std::abs(alpha) <= opt_.pivot_tol) continue;
        double at = tau * alpha;
        VarStatus st = vstat_[static_cast<size_t>(j)];
        bool ok = (st == VarStatus::kAtLower && at > 0.0) ||
                  (st == VarStatus::kAtUpper && at < 0.0) ||
                  st == VarStatus::kFreeNonbasic;
        if (!ok) continue;
        double dj = cost_of(j) - dot_column(j, y);
        double ratio = std::abs(dj) / std::abs(alpha);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (std::abs(alpha) > std::abs(best_alpha) + 1e-12 ||
              (std::abs(std::abs(alpha) - std::abs(best_alpha)) <= 1e-12 &&
               (q < 0 || j < q))))) {
          best_ratio = ratio;
          best_alpha = alpha;
          q = j;
        }
      }
      if (q < 0) return false;  // no pivot: likely primal infeasible

      Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
      add_column(q, 1.0, w);
      ftran(w);
      double alpha_q = w[leave];
      if (std::abs(alpha_q) <= opt_.pivot_tol) return false;
      double step = (v_out - target) / alpha_q;  // change of x_q

      for (int r = 0; r < m_; ++r) {
        if (r == leave) continue;
        double wr = w[r];
        if (wr != 0.0)
          x_[static_cast<size_t>(basic_[static_cast<size_t>(r)])] -= wr * step;
      }
      x_[static_cast<size_t>(q)] =
          (vstat_[static_cast<size_t>(q)] == VarStatus::kFreeNonbasic
               ? 0.0
               : nonbasic_value(q)) +
          step;
      vstat_[static_cast<size_t>(out)] =
          below ? VarStatus::kAtLower : VarStatus::kAtUpper;
      x_[static_cast<size_t>(out)] = target;
      basic_[static_cast<size_t>(leave)] = q;
      vstat_[static_cast<size_t>(q)] = VarStatus::kBasic;
      push_eta(leave, w);
      if (static_cast<int>(etas_.size()) >= opt_.refactor_every)
        if (!refactor()) return false;
    }
  }

  // ---- extraction ----------------------------------------------------

  void extract(LpSolution& sol) {
    sol.status = LpStatus::kOptimal;
    sol.x.assign(static_cast<size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) sol.x[static_cast<size_t>(j)] = x_[static_cast<size_t>(j)];
    Eigen::VectorXd y(m_);
    for (int r = 0; r < m_; ++r)
      y[r] = cost_of(basic_[static_cast<size_t>(r)]);
    btran(y);
    sol.duals.assign(static_cast<size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) sol.duals[static_cast<size_t>(i)] = y[i];
    sol.reduced_costs.assign(static_cast<size_t>(n_), 0.0);
    double obj = model_.objective_offset;
    for (int j = 0; j < n_; ++j)
      obj += cost_[static_cast<size_t>(j)] * x_[static_cast<size_t>(j)];
    sol.objective = obj;
    // Dual objective: y'b plus the bound terms of the nonbasic variables.
    double dual = model_.objective_offset;
    for (int i = 0; i < m_; ++i) dual += y[i] * b_[i];
    for (int j = 0; j < n_ + m_; ++j) {
      double dj = cost_of(j) - dot_column(j, y);
      if (j < n_) sol.reduced_costs[static_cast<size_t>(j)] = dj;
      if (vstat_[static_cast<size_t>(j)] == VarStatus::kBasic) continue;
      if (dj > 0.0 && std::isfinite(lower_of(j)))
        dual += dj * lower_of(j);
      else if (dj < 0.0 && std::isfinite(upper_of(j)))
        dual += dj * upper_of(j);
    }
    sol.dual_objective = dual;
    sol.basis.structural.assign(static_cast<size_t>(n_), VarStatus::kAtLower);
    sol.basis.logical.assign(static_cast<size_t>(m_), VarStatus::kAtLower);
    for (int j = 0; j < n_ + m_; ++j) {
      VarStatus st = vstat_[static_cast<size_t>(j)];
      if (j < n_)
        sol.basis.structural[static_cast<size_t>(j)] = st;
      else
        sol.basis.logical[static_cast<size_t>(j - n_)] = st;
    }
    // A degenerate phase 1 can leave an artificial basic at zero; the
    // exported basis then has fewer than m basic entries and a warm start
    // from it will simply fall back to a cold solve.
  }

  const LpModel& model_;
  SimplexOptions opt_;
  int n_, m_;
  std::vector<size_t> col_ptr_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_, lo_, up_;
  Eigen::VectorXd b_;

  std::vector<int> art_row_;
  std::vector<double> art_sign_, art_lo_, art_up_;

  std::vector<VarStatus> vstat_;
  std::vector<int> basic_;
  std::vector<double> x_;
  Lu lu_;
  std::vector<Eta> etas_;
  bool phase1_ = false;
  int64_t iterations_ = 0;
  int64_t max_iter_ = 0;
};

}  // namespace detail

inline LpSolution solve_lp(const LpModel& model, const Basis* warm = nullptr,
                           const SimplexOptions& options = {}) {
  detail::SimplexEngine engine(model, options);
  return engine.solve(warm);
}

// Self-check of an optimal solution: primal feasibility, strong duality and
// complementary slackness. Returns an empty string when everything holds.
inline std::string check_lp_optimality(const LpModel& model,
                                       const LpSolution& sol,
                                       double tol = 1e-6) {
  if (sol.status != LpStatus::kOptimal) return "status is not optimal";
  for (int j = 0; j < model.num_cols(); ++j) {
    double v = sol.x[static_cast<size_t>(j)];
    if (v < model.lower[static_cast<size_t>(j)] - tol ||
        v > model.upper[static_cast<size_t>(j)] + tol)
      return "column bound violated: " + std::to_string(j);
  }
  double scale = 1.0 + std::abs(sol.objective);
  for (int i = 0; i < model.num_rows(); ++i) {
    const LpRow& row = model.rows[static_cast<size_t>(i)];
    double act = model.row_activity(row, sol.x);
    double slack = row.rhs - act;
    double rtol = tol * (1.0 + std::abs(row.rhs));
    if (row.sense == RowSense::kLE && slack < -rtol)
      return "row violated: " + row.name;
    if (row.sense == RowSense::kGE && slack > rtol)
      return "row violated: " + row.name;
    if (row.sense == RowSense::kEQ && std::abs(slack) > rtol)
      return "row violated: " + row.name;
    // Complementary slackness: a slack row carries a zero dual.
    if (std::abs(slack) * std::abs(sol.duals[static_cast<size_t>(i)]) >
        tol * scale * (1.0 + std::abs(act)))
      return "complementary slackness violated: " + row.name;
    // Dual sign conventions for a minimization problem.
    if (row.sense == RowSense::kGE && sol.duals[static_cast<size_t>(i)] < -tol)
      return "dual sign violated: " + row.name;
    if (row.sense == RowSense::kLE && sol.duals[static_cast<size_t>(i)] > tol)
      return "dual sign violated: " + row.name;
  }
  if (std::abs(sol.objective - sol.dual_objective) > tol * scale)
    return "strong duality gap: " + std::to_string(sol.objective) + " vs " +
           std::to_string(sol.dual_objective);
  return "";
}

}  // namespace ucpd
