#pragma once

// Compact ILP of the dispatch problem. Each unit carries binary state
// columns s[t][i] (point i active in period t; all zero means offline) plus
// move indicators: yup[t][i] for an up-move into point i and ydn[t][i] for a
// down-move into point i. Rows per unit: one-point-at-a-time, move/state
// coupling, neighbor-only transitions, dwell windows before ramping, minimum
// up-time and minimum down-time. Demand rows couple the units.
//
// Pre-horizon history enters through constants: window instances anchored
// before period 1 whose right-hand side is zero become variable fixings
// (upper bound zero), and the surviving anchored-at-zero window dominates the
// older ones, so a single boundary row per family is enough.
//
// Only the s columns are marked integral. The move indicators are implied by
// the states at integer points, and a minimizing solver never inflates them
// since they only appear with nonnegative cost and on tightening sides.

#include <string>
#include <vector>

#include "ucpd/lp_model.hpp"
#include "ucpd/model.hpp"

namespace ucpd {

struct CompactIndex {
  int horizon = 0;
  std::vector<int> base;     // first column of each unit's block
  std::vector<int> npoints;  // ladder size per unit
  int total_cols = 0;

  int s(int u, int t, int i) const {  // t in 1..T, i in 1..N
    return base[static_cast<size_t>(u)] +
           (t - 1) * 3 * npoints[static_cast<size_t>(u)] + (i - 1);
  }
  int yup(int u, int t, int i) const {  // arrives at i from i-1, i in 1..N
    return base[static_cast<size_t>(u)] +
           (t - 1) * 3 * npoints[static_cast<size_t>(u)] +
           npoints[static_cast<size_t>(u)] + (i - 1);
  }
  int ydn(int u, int t, int i) const {  // arrives at i from i+1, i in 0..N-1
    return base[static_cast<size_t>(u)] +
           (t - 1) * 3 * npoints[static_cast<size_t>(u)] +
           2 * npoints[static_cast<size_t>(u)] + i;
  }
};

namespace detail {

inline CompactIndex make_index(const std::vector<Unit>& units, int horizon) {
  CompactIndex idx;
  idx.horizon = horizon;
  int c = 0;
  for (const Unit& u : units) {
    idx.base.push_back(c);
    idx.npoints.push_back(u.num_points());
    c += 3 * u.num_points() * horizon;
  }
  idx.total_cols = c;
  return idx;
}

inline void append_unit_columns(LpModel& lp, const Unit& un, int u, int T) {
  const int N = un.num_points();
  const std::string p = "u" + std::to_string(u);
  for (int t = 1; t <= T; ++t) {
    const std::string tt = ".t" + std::to_string(t);
    for (int i = 1; i <= N; ++i)
      lp.add_col(un.cost_fixed + un.cost_prop * un.point(i).power, 0.0, 1.0,
                 true, p + ".s" + tt + ".p" + std::to_string(i));
    for (int i = 1; i <= N; ++i)
      lp.add_col(i == 1 ? un.cost_startup : 0.0, 0.0, 1.0, false,
                 p + ".yu" + tt + ".p" + std::to_string(i));
    for (int i = 0; i <= N - 1; ++i)
      lp.add_col(0.0, 0.0, 1.0, false,
                 p + ".yd" + tt + ".p" + std::to_string(i));
  }
}

inline void append_unit_rows(LpModel& lp, const CompactIndex& idx,
                             const Unit& un, int u, const GateConfig& gates) {
  const int T = idx.horizon;
  const int N = un.num_points();
  const int p0 = un.init.point;
  const int d0 = p0 >= 1 ? un.init.dwell : un.init.offline_elapsed;
  const std::string pre = "u" + std::to_string(u);
  auto tag = [&](const char* kind, int t) {
    return pre + "." + kind + ".t" + std::to_string(t);
  };
  auto fix0 = [&](int col) { lp.upper[static_cast<size_t>(col)] = 0.0; };
  auto live = [&](int col) { return lp.upper[static_cast<size_t>(col)] > 0.0; };

  // One active point per period.
  for (int t = 1; t <= T; ++t) {
    LpRow& r = lp.add_row(RowSense::kLE, 1.0, tag("one", t));
    for (int i = 1; i <= N; ++i) r.terms.emplace_back(idx.s(u, t, i), 1.0);
  }

  // Moves account for every crossing of the boundary between i-1 and i.
  for (int t = 1; t <= T; ++t)
    for (int i = 1; i <= N; ++i) {
      double rhs = (t == 1 && p0 >= i) ? -1.0 : 0.0;
      LpRow& r = lp.add_row(RowSense::kEQ, rhs,
                            tag("cpl", t) + ".p" + std::to_string(i));
      r.terms.emplace_back(idx.yup(u, t, i), 1.0);
      r.terms.emplace_back(idx.ydn(u, t, i - 1), -1.0);
      for (int j = i; j <= N; ++j) {
        r.terms.emplace_back(idx.s(u, t, j), -1.0);
        if (t >= 2) r.terms.emplace_back(idx.s(u, t - 1, j), 1.0);
      }
    }

  // Neighbor-only transitions.
  for (int t = 1; t <= T - 1; ++t) {
    for (int i = 2; i <= N; ++i) {  // drop at most one level
      LpRow& r = lp.add_row(RowSense::kLE, 0.0,
                            tag("down", t) + ".p" + std::to_string(i));
      for (int j = i; j <= N; ++j) r.terms.emplace_back(idx.s(u, t, j), 1.0);
      for (int j = i - 1; j <= N; ++j)
        r.terms.emplace_back(idx.s(u, t + 1, j), -1.0);
    }
    for (int i = 1; i <= N - 1; ++i) {  // rise at most one level
      LpRow& r = lp.add_row(RowSense::kLE, 0.0,
                            tag("up", t) + ".p" + std::to_string(i));
      for (int j = i + 1; j <= N; ++j)
        r.terms.emplace_back(idx.s(u, t + 1, j), 1.0);
      for (int j = i; j <= N; ++j) r.terms.emplace_back(idx.s(u, t, j), -1.0);
    }
  }
  // First move out of the initial state.
  if (p0 >= 2) {
    LpRow& r = lp.add_row(RowSense::kGE, 1.0, pre + ".down.t0");
    for (int j = p0 - 1; j <= N; ++j) r.terms.emplace_back(idx.s(u, 1, j), 1.0);
  }
  for (int j = p0 + 2; j <= N; ++j) fix0(idx.s(u, 1, j));

  // Dwell: exits from point i are impossible while the pre-horizon stay
  // still covers the window.
  for (int i = 1; i <= N; ++i) {
    const int up = un.point(i).dwell_up, dn = un.point(i).dwell_down;
    const int up_until = i == p0 ? up - d0 : up;
    const int dn_until = i == p0 ? dn - d0 : dn;
    if (i < N)
      for (int t = 1; t <= std::min(up_until, T); ++t)
        fix0(idx.yup(u, t, i + 1));
    if (i >= 2 || gates.shutdown_minstop)
      for (int t = 1; t <= std::min(dn_until, T); ++t)
        fix0(idx.ydn(u, t, i - 1));
  }

  // Dwell windows anchored in the horizon: at most one exit from i within
  // the window, and only when the unit sat at i at the anchor.
  for (int i = 1; i <= N; ++i) {
    const int up = un.point(i).dwell_up, dn = un.point(i).dwell_down;
    const bool down_part = i >= 2 || gates.shutdown_minstop;
    for (int t = 1; t <= T - 1; ++t) {
      std::vector<std::pair<int, double>> terms;
      if (i < N)
        for (int tp = t + 1; tp <= std::min(t + up, T); ++tp)
          terms.emplace_back(idx.yup(u, tp, i + 1), 1.0);
      if (down_part)
        for (int tp = t + 1; tp <= std::min(t + dn, T); ++tp)
          terms.emplace_back(idx.ydn(u, tp, i - 1), 1.0);
      if (terms.empty()) continue;
      LpRow& r = lp.add_row(RowSense::kLE, 0.0,
                            tag("dwell", t) + ".p" + std::to_string(i));
      r.terms = std::move(terms);
      r.terms.emplace_back(idx.s(u, t, i), -1.0);
    }
  }
  // Anchored at the boundary: only the strongest (t = 0) instance survives.
  if (p0 >= 1) {
    std::vector<int> cols;
    if (p0 < N)
      for (int tp = 1; tp <= std::min(un.point(p0).dwell_up, T); ++tp)
        if (live(idx.yup(u, tp, p0 + 1))) cols.push_back(idx.yup(u, tp, p0 + 1));
    if (p0 >= 2 || gates.shutdown_minstop)
      for (int tp = 1; tp <= std::min(un.point(p0).dwell_down, T); ++tp)
        if (live(idx.ydn(u, tp, p0 - 1))) cols.push_back(idx.ydn(u, tp, p0 - 1));
    if (cols.size() >= 2) {
      LpRow& r = lp.add_row(RowSense::kLE, 1.0, pre + ".dwell.t0");
      for (int c : cols) r.terms.emplace_back(c, 1.0);
    }
  }

  // Minimum up-time: a start-up within the window forces the unit online.
  // With a one-period minimum and gated shutdowns the rows are implied by
  // the dwell windows and the coupling, so they are dropped.
  if (!(un.min_up == 1 && gates.shutdown_minstop)) {
    for (int t = 1; t <= T; ++t) {
      const bool started_before =
          p0 >= 1 && t <= un.min_up - un.init.since_startup;
      LpRow& r = lp.add_row(RowSense::kLE, started_before ? -1.0 : 0.0,
                            tag("minup", t));
      for (int tp = std::max(1, t - un.min_up + 1); tp <= t; ++tp)
        r.terms.emplace_back(idx.yup(u, tp, 1), 1.0);
      for (int i = 1; i <= N; ++i) r.terms.emplace_back(idx.s(u, t, i), -1.0);
    }
  }

  // Minimum down-time: no start-up within the window after online time.
  const int restart_fixed_until =
      p0 >= 1 ? un.min_down : un.min_down - un.init.offline_elapsed;
  for (int t = 1; t <= std::min(restart_fixed_until, T); ++t)
    fix0(idx.yup(u, t, 1));
  for (int t = un.min_down + 1; t <= T + un.min_down - 1; ++t) {
    LpRow& r = lp.add_row(RowSense::kLE, 1.0, tag("mindn", t));
    for (int tp = t - un.min_down + 1; tp <= std::min(t, T); ++tp)
      r.terms.emplace_back(idx.yup(u, tp, 1), 1.0);
    for (int i = 1; i <= N; ++i)
      r.terms.emplace_back(idx.s(u, t - un.min_down, i), 1.0);
  }
  if (p0 == 0) {  // dominant boundary window over the pre-horizon offline run
    std::vector<int> cols;
    for (int tp = 1; tp <= std::min(un.min_down, T); ++tp)
      if (live(idx.yup(u, tp, 1))) cols.push_back(idx.yup(u, tp, 1));
    if (cols.size() >= 2) {
      LpRow& r = lp.add_row(RowSense::kLE, 1.0, pre + ".mindn.t0");
      for (int c : cols) r.terms.emplace_back(c, 1.0);
    }
  }
}

}  // namespace detail

inline CompactIndex make_compact_index(const Instance& inst) {
  return detail::make_index(inst.units, inst.horizon);
}

inline CompactIndex make_unit_index(const Unit& u, int horizon) {
  return detail::make_index({u}, horizon);
}

struct CompactModel {
  LpModel lp;
  CompactIndex idx;
  int demand_row_base = 0;  // rows [t][power, r1, r2], t in 1..T
  int demand_row(int t, int k) const { return demand_row_base + 3 * (t - 1) + k; }
};

inline CompactModel build_compact(const Instance& inst,
                                  const GateConfig& gates = {}) {
  if (inst.horizon < 1) throw InputError("horizon must be at least 1");
  if (inst.units.empty()) throw InputError("instance has no units");
  const size_t T = static_cast<size_t>(inst.horizon);
  if (inst.demand_power.size() != T || inst.demand_r1.size() != T ||
      inst.demand_r2.size() != T)
    throw InputError("demand series must cover the horizon");

  CompactModel cm;
  cm.idx = make_compact_index(inst);
  const int nu = static_cast<int>(inst.units.size());
  for (int u = 0; u < nu; ++u)
    detail::append_unit_columns(cm.lp, inst.units[static_cast<size_t>(u)], u,
                                inst.horizon);
  for (int u = 0; u < nu; ++u)
    detail::append_unit_rows(cm.lp, cm.idx, inst.units[static_cast<size_t>(u)],
                             u, gates);

  cm.demand_row_base = cm.lp.num_rows();
  for (int t = 1; t <= inst.horizon; ++t) {
    const size_t ti = static_cast<size_t>(t - 1);
    const char* names[3] = {"dem.P.t", "dem.R1.t", "dem.R2.t"};
    const double rhs[3] = {inst.demand_power[ti], inst.demand_r1[ti],
                           inst.demand_r2[ti]};
    for (int k = 0; k < 3; ++k) {
      LpRow& r =
          cm.lp.add_row(RowSense::kGE, rhs[k], names[k] + std::to_string(t));
      for (int u = 0; u < nu; ++u) {
        const Unit& un = inst.units[static_cast<size_t>(u)];
        for (int i = 1; i <= un.num_points(); ++i) {
          const OperatingPoint& pt = un.point(i);
          double coef = k == 0 ? pt.power : (k == 1 ? pt.r1 : pt.r2);
          if (coef != 0.0) r.terms.emplace_back(cm.idx.s(u, t, i), coef);
        }
      }
    }
  }
  return cm;
}

// Single-unit block without demand rows: the feasible 0/1 states are exactly
// the unit's legal plans. Used by the pricing checks and bound experiments.
inline LpModel build_unit_polytope(const Unit& u, int horizon,
                                   const GateConfig& gates = {}) {
  LpModel lp;
  CompactIndex idx = detail::make_index({u}, horizon);
  detail::append_unit_columns(lp, u, 0, horizon);
  detail::append_unit_rows(lp, idx, u, 0, gates);
  return lp;
}

inline Plan decode_plan(const CompactIndex& idx, int u,
                        const std::vector<double>& x) {
  Plan plan;
  for (int t = 1; t <= idx.horizon; ++t) {
    int point = 0;
    double best = 0.5;
    for (int i = 1; i <= idx.npoints[static_cast<size_t>(u)]; ++i) {
      double v = x[static_cast<size_t>(idx.s(u, t, i))];
      if (v > best) {
        best = v;
        point = i;
      }
    }
    plan.points.push_back(point);
  }
  return plan;
}

inline std::vector<Plan> decode_plans(const CompactIndex& idx,
                                      const std::vector<double>& x) {
  std::vector<Plan> plans;
  for (int u = 0; u < static_cast<int>(idx.base.size()); ++u)
    plans.push_back(decode_plan(idx, u, x));
  return plans;
}

// Largest distance of any state column from an integer.
inline double max_state_fractionality(const CompactIndex& idx,
                                      const std::vector<double>& x) {
  double worst = 0.0;
  for (int u = 0; u < static_cast<int>(idx.base.size()); ++u)
    for (int t = 1; t <= idx.horizon; ++t)
      for (int i = 1; i <= idx.npoints[static_cast<size_t>(u)]; ++i) {
        double v = x[static_cast<size_t>(idx.s(u, t, i))];
        worst = std::max(worst, std::abs(v - std::round(v)));
      }
  return worst;
}

}  // namespace ucpd
