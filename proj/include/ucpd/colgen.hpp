// Dantzig-Wolfe master over per-unit plan columns.
//
// The restricted master carries the three demand row families plus one
// convexity row per unit; pricing is the exact per-unit DP. Each round adds
// at most the single best column per unit, warm-starts the next master from
// the previous basis, and optionally retires columns that sat at zero for a
// window of consecutive masters (only nonbasic ones, so the basis survives
// the renumbering). Pricing calls are pure and independent; they run in unit
// order so results are reproducible.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ucpd/bnb.hpp"
#include "ucpd/lp_model.hpp"
#include "ucpd/model.hpp"
#include "ucpd/simplex.hpp"
#include "ucpd/subproblem.hpp"

namespace ucpd {

struct Column {
  int unit = 0;
  Plan plan;
  double cost = 0.0;
  std::vector<double> power, r1, r2;
};

inline Column make_column(const Instance& inst, int unit, const Plan& plan) {
  const Unit& u = inst.units[static_cast<size_t>(unit)];
  Column c;
  c.unit = unit;
  c.plan = plan;
  c.cost = plan_cost(u, plan);
  PlanVectors v = plan_vectors(u, plan);
  c.power = std::move(v.power);
  c.r1 = std::move(v.r1);
  c.r2 = std::move(v.r2);
  return c;
}

// RC = cost + sigma - dual revenue; the master's optimality certificate.
inline double reduced_cost(const Column& c, const DualPrices& d) {
  double revenue = 0.0;
  for (size_t t = 0; t < c.power.size(); ++t)
    revenue += d.pi_p[t] * c.power[t] + d.pi_r1[t] * c.r1[t] +
               d.pi_r2[t] * c.r2[t];
  return c.cost + d.sigma - revenue;
}

enum class InitStrategy { kMinMax, kHeuristic };

namespace detail {

// Greedy demand-chasing plan: each unit in turn walks toward the power level
// that covers what the previous units left over.
inline Plan greedy_cover_plan(const Unit& u, const Instance& inst,
                              const std::vector<double>& residual,
                              const GateConfig& gates) {
  Plan plan;
  UnitState s = UnitState::from_init(u.init);
  for (int t = 1; t <= inst.horizon; ++t) {
    double want = residual[static_cast<size_t>(t - 1)];
    int best = -1;
    double best_score = 0.0;
    for (int q = std::max(0, s.point - 1);
         q <= std::min(u.num_points(), s.point + 1); ++q) {
      if (move_violation(u, s, q, gates)[0] != '\0') continue;
      double p = q == 0 ? 0.0 : u.point(q).power;
      // Cover the residual if possible; never overshoot more than needed.
      double score = p >= want ? 1e6 - (p - want) : p;
      if (best < 0 || score > best_score) {
        best = q;
        best_score = score;
      }
    }
    plan.points.push_back(best);
    s.advance(best);
  }
  return plan;
}

}  // namespace detail

inline std::vector<Column> initialize_columns(
    const Instance& inst, InitStrategy strategy = InitStrategy::kMinMax,
    const GateConfig& gates = {}) {
  std::vector<Column> pool;
  int nu = static_cast<int>(inst.units.size());
  for (int u = 0; u < nu; ++u) {
    const Unit& un = inst.units[static_cast<size_t>(u)];
    pool.push_back(make_column(inst, u, greedy_min_plan(un, inst.horizon, gates)));
    pool.push_back(make_column(inst, u, greedy_max_plan(un, inst.horizon, gates)));
  }
  if (strategy == InitStrategy::kHeuristic) {
    std::vector<double> residual = inst.demand_power;
    for (int u = 0; u < nu; ++u) {
      const Unit& un = inst.units[static_cast<size_t>(u)];
      Plan p = detail::greedy_cover_plan(un, inst, residual, gates);
      PlanVectors v = plan_vectors(un, p);
      for (int t = 0; t < inst.horizon; ++t)
        residual[static_cast<size_t>(t)] = std::max(
            0.0, residual[static_cast<size_t>(t)] - v.power[static_cast<size_t>(t)]);
      bool fresh = p.points != pool[static_cast<size_t>(2 * u)].plan.points &&
                   p.points != pool[static_cast<size_t>(2 * u + 1)].plan.points;
      if (fresh) pool.push_back(make_column(inst, u, p));
    }
  }
  return pool;
}

// First (period, product, shortfall) the all-max columns cannot cover, if any.
struct CoverageGap {
  bool covered = true;
  int period = 0;
  std::string product;
  double shortfall = 0.0;
};

inline CoverageGap max_coverage_gap(const Instance& inst,
                                    const std::vector<Column>& pool) {
  int T = inst.horizon;
  std::vector<double> p(static_cast<size_t>(T), 0.0), r1 = p, r2 = p;
  // Use each unit's best available column per product bound: the max plan
  // dominates pointwise, so summing per-unit maxima is exact.
  for (size_t t = 0; t < static_cast<size_t>(T); ++t) {
    for (size_t u = 0; u < inst.units.size(); ++u) {
      double bp = 0.0, b1 = 0.0, b2 = 0.0;
      for (const Column& c : pool)
        if (c.unit == static_cast<int>(u)) {
          bp = std::max(bp, c.power[t]);
          b1 = std::max(b1, c.r1[t]);
          b2 = std::max(b2, c.r2[t]);
        }
      p[t] += bp;
      r1[t] += b1;
      r2[t] += b2;
    }
  }
  for (int t = 0; t < T; ++t) {
    size_t ti = static_cast<size_t>(t);
    if (p[ti] < inst.demand_power[ti] - 1e-9)
      return {false, t + 1, "power", inst.demand_power[ti] - p[ti]};
    if (r1[ti] < inst.demand_r1[ti] - 1e-9)
      return {false, t + 1, "r1", inst.demand_r1[ti] - r1[ti]};
    if (r2[ti] < inst.demand_r2[ti] - 1e-9)
      return {false, t + 1, "r2", inst.demand_r2[ti] - r2[ti]};
  }
  return {};
}

struct CgOptions {
  double rc_tol = 1e-6;
  long max_iterations = 2000;
  bool purge = true;
  int purge_window = 5;
  int min_columns_per_unit = 2;
  double dual_smoothing = 0.0;  // 0 = plain duals, alpha in [0,1)
  InitStrategy init = InitStrategy::kMinMax;
  GateConfig gates;
  SimplexOptions lp;
};

enum class CgStatus { kConverged, kIterationLimit, kInfeasible };

inline const char* to_string(CgStatus s) {
  switch (s) {
    case CgStatus::kConverged: return "converged";
    case CgStatus::kIterationLimit: return "iteration_limit";
    case CgStatus::kInfeasible: return "infeasible";
  }
  return "?";
}

struct CgIterationLog {
  long iteration = 0;
  double rmp_value = 0.0;
  double min_rc = 0.0;
  int columns_added = 0;
  int columns_purged = 0;
  double dual_zero_fraction = 0.0;
  double wall_ms = 0.0;
};

// Duals of one master solve; sigma per unit, shared period prices.
struct HarvestedDuals {
  std::vector<double> pi_p, pi_r1, pi_r2;
  std::vector<double> sigma;  // per unit

  DualPrices for_unit(int u) const {
    return {pi_p, pi_r1, pi_r2, sigma[static_cast<size_t>(u)]};
  }
};

struct CgResult {
  CgStatus status = CgStatus::kInfeasible;
  double lower_bound = -std::numeric_limits<double>::infinity();
  double rmp_value = std::numeric_limits<double>::infinity();
  double lagrangian_bound = -std::numeric_limits<double>::infinity();
  long iterations = 0;
  std::vector<Column> pool;
  std::vector<double> lambda;  // final master weights, one per pool column
  std::vector<CgIterationLog> log;
  std::vector<HarvestedDuals> duals_trace;
  CoverageGap coverage;  // populated when status == kInfeasible
};

namespace detail {

inline LpModel build_rmp(const Instance& inst,
                         const std::vector<Column>& pool) {
  LpModel lp;
  int T = inst.horizon;
  int nu = static_cast<int>(inst.units.size());
  for (size_t k = 0; k < pool.size(); ++k)
    lp.add_col(pool[k].cost, 0.0, kInf, false,
               "u" + std::to_string(pool[k].unit) + ".c" + std::to_string(k));
  for (int t = 1; t <= T; ++t) {
    lp.add_row(RowSense::kGE, inst.demand_power[static_cast<size_t>(t - 1)],
               "dem.P.t" + std::to_string(t));
    lp.add_row(RowSense::kGE, inst.demand_r1[static_cast<size_t>(t - 1)],
               "dem.R1.t" + std::to_string(t));
    lp.add_row(RowSense::kGE, inst.demand_r2[static_cast<size_t>(t - 1)],
               "dem.R2.t" + std::to_string(t));
  }
  for (int u = 0; u < nu; ++u)
    lp.add_row(RowSense::kEQ, 1.0, "conv.u" + std::to_string(u));
  for (size_t k = 0; k < pool.size(); ++k) {
    const Column& c = pool[k];
    int j = static_cast<int>(k);
    for (int t = 0; t < T; ++t) {
      size_t ti = static_cast<size_t>(t);
      if (c.power[ti] != 0.0)
        lp.rows[static_cast<size_t>(3 * t)].terms.push_back({j, c.power[ti]});
      if (c.r1[ti] != 0.0)
        lp.rows[static_cast<size_t>(3 * t + 1)].terms.push_back({j, c.r1[ti]});
      if (c.r2[ti] != 0.0)
        lp.rows[static_cast<size_t>(3 * t + 2)].terms.push_back({j, c.r2[ti]});
    }
    lp.rows[static_cast<size_t>(3 * T + c.unit)].terms.push_back({j, 1.0});
  }
  return lp;
}

inline HarvestedDuals extract_duals(const Instance& inst,
                                    const LpSolution& sol) {
  HarvestedDuals d;
  int T = inst.horizon;
  for (int t = 0; t < T; ++t) {
    d.pi_p.push_back(sol.duals[static_cast<size_t>(3 * t)]);
    d.pi_r1.push_back(sol.duals[static_cast<size_t>(3 * t + 1)]);
    d.pi_r2.push_back(sol.duals[static_cast<size_t>(3 * t + 2)]);
  }
  for (size_t u = 0; u < inst.units.size(); ++u)
    d.sigma.push_back(-sol.duals[static_cast<size_t>(3 * T) + u]);
  return d;
}

inline HarvestedDuals blend_duals(const HarvestedDuals& prev,
                                  const HarvestedDuals& cur, double alpha) {
  if (alpha <= 0.0 || prev.pi_p.empty()) return cur;
  HarvestedDuals out = cur;
  for (size_t t = 0; t < out.pi_p.size(); ++t) {
    out.pi_p[t] = alpha * prev.pi_p[t] + (1 - alpha) * cur.pi_p[t];
    out.pi_r1[t] = alpha * prev.pi_r1[t] + (1 - alpha) * cur.pi_r1[t];
    out.pi_r2[t] = alpha * prev.pi_r2[t] + (1 - alpha) * cur.pi_r2[t];
  }
  for (size_t u = 0; u < out.sigma.size(); ++u)
    out.sigma[u] = alpha * prev.sigma[u] + (1 - alpha) * cur.sigma[u];
  return out;
}

}  // namespace detail

inline CgResult cg_solve(const Instance& inst, const CgOptions& opts = {}) {
  CgResult res;
  res.pool = initialize_columns(inst, opts.init, opts.gates);
  res.coverage = max_coverage_gap(inst, res.pool);
  if (!res.coverage.covered) {
    res.status = CgStatus::kInfeasible;
    return res;
  }

  int nu = static_cast<int>(inst.units.size());
  std::vector<std::set<std::vector<int>>> known(
      static_cast<size_t>(nu));
  for (const Column& c : res.pool)
    known[static_cast<size_t>(c.unit)].insert(c.plan.points);

  std::vector<int> zero_streak(res.pool.size(), 0);
  Basis basis;
  HarvestedDuals prev_duals;
  using clock = std::chrono::steady_clock;

  for (long it = 1; it <= opts.max_iterations; ++it) {
    auto started = clock::now();
    LpModel rmp = detail::build_rmp(inst, res.pool);
    LpSolution sol =
        solve_lp(rmp, basis.empty() ? nullptr : &basis, opts.lp);
    if (sol.status != LpStatus::kOptimal)
      throw InternalError("master became " + std::string(to_string(sol.status)) +
                          " at iteration " + std::to_string(it));
    if (std::isfinite(res.rmp_value) &&
        sol.objective > res.rmp_value + 1e-7 * (1.0 + std::abs(res.rmp_value)))
      throw InternalError("master value increased at iteration " +
                          std::to_string(it));
    basis = sol.basis;
    res.rmp_value = sol.objective;
    res.lambda = sol.x;
    res.iterations = it;

    HarvestedDuals duals = detail::extract_duals(inst, sol);
    res.duals_trace.push_back(duals);
    HarvestedDuals priced;
    if (opts.dual_smoothing > 0.0)
      priced = detail::blend_duals(prev_duals, duals, opts.dual_smoothing);
    prev_duals = duals;

    double zero_pi = 0.0;
    for (double v : duals.pi_p)
      if (v == 0.0) zero_pi += 1.0;

    CgIterationLog row;
    row.iteration = it;
    row.rmp_value = sol.objective;
    row.dual_zero_fraction = zero_pi / static_cast<double>(inst.horizon);

    // Price every unit under the pure master duals; those certify both the
    // stopping rule and the Lagrangian bound.
    double min_rc = 0.0, lagrangian = sol.objective;
    std::vector<std::pair<int, Plan>> incoming;
    for (int u = 0; u < nu; ++u) {
      PricedPlan pp = price_unit_dp(inst.units[static_cast<size_t>(u)],
                                    inst.horizon, duals.for_unit(u),
                                    opts.gates);
      min_rc = std::min(min_rc, pp.reduced_cost);
      lagrangian += std::min(0.0, pp.reduced_cost);
      if (pp.reduced_cost < -opts.rc_tol)
        incoming.push_back({u, std::move(pp.plan)});
    }
    res.lagrangian_bound = std::max(res.lagrangian_bound, lagrangian);
    row.min_rc = min_rc;

    // Smoothed prices may propose different columns; fall back to the pure
    // proposals when they only re-derive pooled plans.
    if (opts.dual_smoothing > 0.0 && !incoming.empty()) {
      std::vector<std::pair<int, Plan>> alt;
      for (int u = 0; u < nu; ++u) {
        PricedPlan pp = price_unit_dp(inst.units[static_cast<size_t>(u)],
                                      inst.horizon, priced.for_unit(u),
                                      opts.gates);
        if (pp.reduced_cost < -opts.rc_tol &&
            !known[static_cast<size_t>(u)].count(pp.plan.points))
          alt.push_back({u, std::move(pp.plan)});
      }
      if (!alt.empty()) incoming = std::move(alt);
    }

    for (auto& [u, plan] : incoming) {
      if (!known[static_cast<size_t>(u)].insert(plan.points).second) {
        if (opts.dual_smoothing > 0.0) continue;
        throw InternalError("pricing re-derived a pooled column at iteration " +
                            std::to_string(it));
      }
      Column c = make_column(inst, u, plan);
      if (opts.dual_smoothing == 0.0 &&
          reduced_cost(c, duals.for_unit(u)) >= 0.0)
        throw InternalError("added column prices nonnegative at iteration " +
                            std::to_string(it));
      res.pool.push_back(std::move(c));
      zero_streak.push_back(0);
      ++row.columns_added;
    }

    // Retire long-idle nonbasic columns; the incumbent master solution is
    // untouched, so feasibility is preserved.
    if (opts.purge && row.columns_added > 0) {
      std::vector<int> per_unit(static_cast<size_t>(nu), 0);
      for (const Column& c : res.pool) ++per_unit[static_cast<size_t>(c.unit)];
      size_t old_cols = sol.x.size();
      std::vector<char> drop(res.pool.size(), 0);
      for (size_t k = 0; k < old_cols; ++k) {
        bool zero = std::abs(sol.x[k]) <= 1e-12;
        bool nonbasic = sol.basis.structural[k] != VarStatus::kBasic;
        zero_streak[k] = zero && nonbasic ? zero_streak[k] + 1 : 0;
        int u = res.pool[k].unit;
        if (zero_streak[k] >= opts.purge_window &&
            per_unit[static_cast<size_t>(u)] > opts.min_columns_per_unit) {
          drop[k] = 1;
          --per_unit[static_cast<size_t>(u)];
          ++row.columns_purged;
        }
      }
      if (row.columns_purged > 0) {
        std::vector<Column> kept;
        std::vector<int> streak_kept;
        std::vector<VarStatus> status_kept;
        for (size_t k = 0; k < res.pool.size(); ++k) {
          if (drop[k]) {
            known[static_cast<size_t>(res.pool[k].unit)].erase(
                res.pool[k].plan.points);
            continue;
          }
          kept.push_back(std::move(res.pool[k]));
          streak_kept.push_back(zero_streak[k]);
          if (k < old_cols)
            status_kept.push_back(sol.basis.structural[k]);
          else
            status_kept.push_back(VarStatus::kAtLower);
        }
        res.pool = std::move(kept);
        zero_streak = std::move(streak_kept);
        basis.structural = std::move(status_kept);
      }
    }

    row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() -
                                                            started)
                      .count();
    res.log.push_back(row);

    if (row.columns_added == 0) {
      res.status = CgStatus::kConverged;
      res.lower_bound = res.rmp_value;
      res.lagrangian_bound = std::max(res.lagrangian_bound, res.rmp_value);
      return res;
    }
  }
  res.status = CgStatus::kIterationLimit;
  res.lower_bound = res.lagrangian_bound;
  res.lambda.clear();  // pool was edited after the last master solve
  return res;
}

inline std::string cg_log_csv(const CgResult& res, bool with_wall = true) {
  std::ostringstream out;
  out << "iteration,rmp_value,min_rc,columns_added,columns_purged,"
         "dual_zero_fraction";
  if (with_wall) out << ",wall_ms";
  out << "\n";
  out.precision(12);
  for (const CgIterationLog& r : res.log) {
    out << r.iteration << ',' << r.rmp_value << ',' << r.min_rc << ','
        << r.columns_added << ',' << r.columns_purged << ','
        << r.dual_zero_fraction;
    if (with_wall) out << ',' << r.wall_ms;
    out << "\n";
  }
  return out.str();
}

struct IntegerRmpResult {
  bool feasible = false;
  double upper_bound = std::numeric_limits<double>::infinity();
  std::vector<Plan> plans;  // one per unit when feasible
};

// Primal heuristic: restrict each unit to its pooled plans and pick one each.
inline IntegerRmpResult integer_rmp_heuristic(const Instance& inst,
                                              const std::vector<Column>& pool,
                                              const BnbOptions& opts = {}) {
  IntegerRmpResult out;
  LpModel rmp = detail::build_rmp(inst, pool);
  for (size_t j = 0; j < rmp.integer.size(); ++j) {
    rmp.integer[j] = 1;
    rmp.upper[j] = 1.0;
  }
  BnbResult res = solve_ilp(rmp, opts);
  if (res.status != LpStatus::kOptimal) return out;
  out.feasible = true;
  out.upper_bound = res.objective;
  out.plans.assign(inst.units.size(), Plan{});
  for (size_t k = 0; k < pool.size(); ++k)
    if (res.x[k] > 0.5)
      out.plans[static_cast<size_t>(pool[k].unit)] = pool[k].plan;
  return out;
}

struct BoundsReport {
  double compact_lp = 0.0;
  double cg_bound = 0.0;
  double rel_diff = 0.0;
  bool has_ilp = false;
  double compact_ilp = 0.0;
  long cg_iterations = 0;
  long cg_columns = 0;
  bool feasible = true;
};

// Side-by-side relaxation values; the ilp is only attempted on models small
// enough for the tree search.
inline BoundsReport compare_bounds(const Instance& inst,
                                   const CgOptions& opts = {},
                                   int ilp_max_cols = 400) {
  BoundsReport rep;
  CompactModel cm = build_compact(inst, opts.gates);
  LpSolution lp = solve_lp(cm.lp, nullptr, opts.lp);
  CgResult cg = cg_solve(inst, opts);
  if (lp.status == LpStatus::kInfeasible ||
      cg.status == CgStatus::kInfeasible) {
    if (lp.status == LpStatus::kInfeasible &&
        cg.status != CgStatus::kInfeasible)
      throw InternalError("compact infeasible but master solved");
    rep.feasible = false;
    return rep;
  }
  if (lp.status != LpStatus::kOptimal)
    throw InternalError("compact relaxation did not solve");
  rep.compact_lp = lp.objective;
  rep.cg_bound = cg.lower_bound;
  rep.rel_diff = std::abs(rep.cg_bound - rep.compact_lp) /
                 (1.0 + std::abs(rep.compact_lp));
  rep.cg_iterations = cg.iterations;
  rep.cg_columns = static_cast<long>(cg.pool.size());
  if (cg.status == CgStatus::kConverged &&
      rep.cg_bound < rep.compact_lp - 1e-6 * (1.0 + std::abs(rep.compact_lp)))
    throw InternalError("master bound fell below the compact relaxation");
  if (cm.lp.num_cols() <= ilp_max_cols) {
    BnbResult ilp = solve_ilp(cm.lp);
    if (ilp.status == LpStatus::kOptimal) {
      rep.has_ilp = true;
      rep.compact_ilp = ilp.objective;
      if (rep.cg_bound > rep.compact_ilp + 1e-6 * (1.0 + std::abs(rep.compact_ilp)))
        throw InternalError("master bound exceeds the integer optimum");
    }
  }
  return rep;
}

}  // namespace ucpd
