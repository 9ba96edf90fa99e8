// Per-unit pricing: exact reduced-cost minimization over all feasible plans.
//
// The DP walks period by period over capped states (point, dwell, run age);
// dwell past the largest gate and run age past min-up behave identically, so
// capping keeps the state space polynomial without losing optimality. Costs
// fold left to right along each path. min(a,b)+c = min(a+c,b+c) holds under
// rounding, so the DP value equals the enumeration minimum bitwise, not just
// approximately; the tests insist on that.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ucpd/compact.hpp"
#include "ucpd/instance_io.hpp"
#include "ucpd/lp_model.hpp"
#include "ucpd/model.hpp"
#include "ucpd/simplex.hpp"

namespace ucpd {

struct DualPrices {
  std::vector<double> pi_p, pi_r1, pi_r2;  // one entry per period, all >= 0
  double sigma = 0.0;
};

struct PricedPlan {
  Plan plan;
  double reduced_cost = 0.0;
};

namespace detail {

// Shared by the DP, the enumerator, and the subproblem objective so every
// consumer sees the same floating-point value for a period's contribution.
inline double stage_cost(const Unit& u, const DualPrices& d, int t, int point) {
  if (point == 0) return 0.0;
  const OperatingPoint& p = u.point(point);
  size_t ti = static_cast<size_t>(t - 1);
  return (u.cost_fixed + u.cost_prop * p.power) - d.pi_p[ti] * p.power -
         d.pi_r1[ti] * p.r1 - d.pi_r2[ti] * p.r2;
}

inline double arc_cost(const Unit& u, const DualPrices& d, int t,
                       int prev_point, int point) {
  double c = stage_cost(u, d, t, point);
  if (prev_point == 0 && point >= 1) c += u.cost_startup;
  return c;
}

// Dwell beyond the largest gate that reads it is indistinguishable.
inline int dwell_cap(const Unit& u, int point) {
  if (point == 0) return std::max(u.min_down, 1);
  const OperatingPoint& p = u.point(point);
  return std::max({p.dwell_up, p.dwell_down, 1});
}

inline UnitState cap_state(const Unit& u, UnitState s) {
  s.dwell = std::min(s.dwell, dwell_cap(u, s.point));
  s.since_startup =
      s.point == 0 ? 0 : std::min(s.since_startup, std::max(u.min_up, 1));
  return s;
}

struct StateSpace {
  std::vector<UnitState> states;
  std::vector<int> lut;  // (point, dwell, since_startup) -> index or -1
  int dmax = 0, umax = 0;

  explicit StateSpace(const Unit& u) {
    int n = u.num_points();
    umax = std::max(u.min_up, 1);
    for (int p = 0; p <= n; ++p) dmax = std::max(dmax, dwell_cap(u, p));
    lut.assign(static_cast<size_t>((n + 1) * dmax * (umax + 1)), -1);
    for (int p = 0; p <= n; ++p)
      for (int d = 1; d <= dwell_cap(u, p); ++d) {
        if (p == 0) {
          lut[key(p, d, 0)] = static_cast<int>(states.size());
          states.push_back({0, d, 0});
        } else {
          for (int ss = 1; ss <= umax; ++ss) {
            lut[key(p, d, ss)] = static_cast<int>(states.size());
            states.push_back({p, d, ss});
          }
        }
      }
  }

  size_t key(int p, int d, int ss) const {
    return static_cast<size_t>((p * dmax + (d - 1)) * (umax + 1) + ss);
  }
  int index(const UnitState& s) const {
    return lut[key(s.point, s.dwell, s.since_startup)];
  }
};

}  // namespace detail

// Exact minimizer of plan_cost + sigma - dual revenue over feasible plans.
inline PricedPlan price_unit_dp(const Unit& u, int horizon,
                                const DualPrices& duals,
                                const GateConfig& gates = {}) {
  if (static_cast<int>(duals.pi_p.size()) != horizon ||
      static_cast<int>(duals.pi_r1.size()) != horizon ||
      static_cast<int>(duals.pi_r2.size()) != horizon)
    throw InputError("dual price vectors must match the horizon");

  detail::StateSpace sp(u);
  const double inf = std::numeric_limits<double>::infinity();
  size_t ns = sp.states.size();
  std::vector<double> value(ns, inf), next(ns);
  // choice[t][state] = point chosen for period t+1 that leads into `state`.
  std::vector<std::vector<int>> from(static_cast<size_t>(horizon),
                                     std::vector<int>(ns, -1));

  UnitState init = detail::cap_state(u, UnitState::from_init(u.init));
  value[static_cast<size_t>(sp.index(init))] = 0.0;

  int n = u.num_points();
  for (int t = 1; t <= horizon; ++t) {
    std::fill(next.begin(), next.end(), inf);
    std::vector<int>& back = from[static_cast<size_t>(t - 1)];
    for (size_t si = 0; si < ns; ++si) {
      if (value[si] == inf) continue;
      const UnitState& s = sp.states[si];
      for (int q = std::max(0, s.point - 1); q <= std::min(n, s.point + 1);
           ++q) {
        if (detail::move_violation(u, s, q, gates)[0] != '\0') continue;
        UnitState ns2 = s;
        ns2.advance(q);
        ns2 = detail::cap_state(u, ns2);
        int ni = sp.index(ns2);
        double v = value[si] + detail::arc_cost(u, duals, t, s.point, q);
        if (v < next[static_cast<size_t>(ni)]) {
          next[static_cast<size_t>(ni)] = v;
          back[static_cast<size_t>(ni)] = static_cast<int>(si);
        }
      }
    }
    value.swap(next);
  }

  size_t best = ns;
  for (size_t si = 0; si < ns; ++si)
    if (best == ns || value[si] < value[best]) {
      if (value[si] < inf) best = si;
    }
  if (best == ns) throw InternalError("pricing reached no terminal state");

  PricedPlan out;
  out.reduced_cost = value[best] + duals.sigma;
  out.plan.points.assign(static_cast<size_t>(horizon), 0);
  size_t cur = best;
  for (int t = horizon; t >= 1; --t) {
    out.plan.points[static_cast<size_t>(t - 1)] = sp.states[cur].point;
    cur = static_cast<size_t>(from[static_cast<size_t>(t - 1)][cur]);
  }
  return out;
}

// Every feasible plan, via depth-first extension of partial trajectories.
// The raw count guard keeps accidental large calls from running away.
template <typename Visitor>
inline void enumerate_plans(const Unit& u, int horizon, Visitor&& visit,
                            const GateConfig& gates = {}) {
  double raw = std::pow(static_cast<double>(u.num_points() + 1),
                        static_cast<double>(horizon));
  if (raw > 1e7)
    throw InputError("plan enumeration too large: (" +
                     std::to_string(u.num_points() + 1) + ")^" +
                     std::to_string(horizon) + " sequences");
  Plan plan;
  plan.points.assign(static_cast<size_t>(horizon), 0);
  int n = u.num_points();
  auto rec = [&](auto&& self, const UnitState& s, int t) -> void {
    if (t > horizon) {
      visit(std::as_const(plan));
      return;
    }
    for (int q = std::max(0, s.point - 1); q <= std::min(n, s.point + 1);
         ++q) {
      if (detail::move_violation(u, s, q, gates)[0] != '\0') continue;
      plan.points[static_cast<size_t>(t - 1)] = q;
      UnitState ns2 = s;
      ns2.advance(q);
      self(self, ns2, t + 1);
    }
  };
  rec(rec, UnitState::from_init(u.init), 1);
}

// Reduced cost of a concrete plan, folded in the same order as the DP.
inline double plan_reduced_cost(const Unit& u, int horizon, const Plan& plan,
                                const DualPrices& duals) {
  double acc = 0.0;
  int prev = u.init.point;
  for (int t = 1; t <= horizon; ++t) {
    int q = plan.points[static_cast<size_t>(t - 1)];
    acc += detail::arc_cost(u, duals, t, prev, q);
    prev = q;
  }
  return acc + duals.sigma;
}

// Single-unit block with the reduced-cost objective; its integer optimum
// matches price_unit_dp and its LP relaxation is the conjecture probe.
inline LpModel build_subproblem_ilp(const Unit& u, int horizon,
                                    const DualPrices& duals,
                                    const GateConfig& gates = {}) {
  if (static_cast<int>(duals.pi_p.size()) != horizon ||
      static_cast<int>(duals.pi_r1.size()) != horizon ||
      static_cast<int>(duals.pi_r2.size()) != horizon)
    throw InputError("dual price vectors must match the horizon");
  LpModel lp = build_unit_polytope(u, horizon, gates);
  CompactIndex idx = make_unit_index(u, horizon);
  std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
  for (int t = 1; t <= horizon; ++t) {
    for (int i = 1; i <= u.num_points(); ++i)
      lp.objective[static_cast<size_t>(idx.s(0, t, i))] =
          detail::stage_cost(u, duals, t, i);
    lp.objective[static_cast<size_t>(idx.yup(0, t, 1))] = u.cost_startup;
  }
  lp.objective_offset = duals.sigma;
  return lp;
}

struct ConjectureCounterExample {
  Unit unit;
  int horizon = 0;
  DualPrices duals;
  double lp_value = 0.0;
  double ilp_value = 0.0;
  double relative_gap = 0.0;
};

struct ConjectureReport {
  long trials = 0;
  double max_gap = 0.0;  // relative |LP - ILP| over all trials
  double integral_fraction = 0.0;
  std::vector<ConjectureCounterExample> counter_examples;
};

inline DualPrices random_duals(std::mt19937_64& rng, const Unit& u,
                               int horizon) {
  // Marginal-cost scale for pi, whole-plan scale for sigma.
  double marg = 0.0;
  for (int i = 1; i <= u.num_points(); ++i)
    marg = std::max(marg,
                    (u.cost_fixed + u.cost_prop * u.point(i).power) /
                        std::max(1.0, u.point(i).power));
  double k = u.cost_startup;
  for (int i = 1; i <= u.num_points(); ++i)
    k = std::max(k, horizon * (u.cost_fixed + u.cost_prop * u.point(i).power));
  std::uniform_real_distribution<double> pi(0.0, 2.0 * marg);
  std::uniform_real_distribution<double> sg(-k, k);
  DualPrices d;
  for (int t = 0; t < horizon; ++t) {
    d.pi_p.push_back(pi(rng));
    d.pi_r1.push_back(pi(rng));
    d.pi_r2.push_back(pi(rng));
  }
  d.sigma = sg(rng);
  return d;
}

// Probes whether the LP relaxation of the pricing block ever separates from
// its integer optimum. `harvested` carries duals observed in real column
// generation runs; they are checked after the random trials.
inline ConjectureReport check_conjecture(
    const Unit& u, int horizon, long n_trials, uint64_t seed,
    const std::vector<DualPrices>& harvested = {},
    const GateConfig& gates = {}) {
  std::mt19937_64 rng(seed);
  ConjectureReport rep;
  long integral = 0;
  CompactIndex idx = make_unit_index(u, horizon);
  auto run_trial = [&](const DualPrices& d) {
    LpModel ilp = build_subproblem_ilp(u, horizon, d, gates);
    LpSolution lp = solve_lp(ilp);
    if (lp.status != LpStatus::kOptimal)
      throw InternalError("pricing block LP did not solve");
    PricedPlan dp = price_unit_dp(u, horizon, d, gates);
    double gap = std::abs(lp.objective - dp.reduced_cost) /
                 (1.0 + std::abs(dp.reduced_cost));
    ++rep.trials;
    rep.max_gap = std::max(rep.max_gap, gap);
    if (max_state_fractionality(idx, lp.x) <= 1e-7) ++integral;
    if (gap > 1e-6) {
      ConjectureCounterExample ce;
      ce.unit = u;
      ce.horizon = horizon;
      ce.duals = d;
      ce.lp_value = lp.objective;
      ce.ilp_value = dp.reduced_cost;
      ce.relative_gap = gap;
      rep.counter_examples.push_back(std::move(ce));
    }
  };
  for (long k = 0; k < n_trials; ++k) run_trial(random_duals(rng, u, horizon));
  for (const DualPrices& d : harvested) run_trial(d);
  rep.integral_fraction =
      rep.trials == 0 ? 1.0
                      : static_cast<double>(integral) /
                            static_cast<double>(rep.trials);
  return rep;
}

// Self-contained reproduction file: the unit in the instance format plus the
// dual vector that exposed the gap.
inline std::string counter_example_to_json(const ConjectureCounterExample& ce) {
  detail::ordered_json j;
  j["unit"] = detail::unit_to_json(ce.unit);
  j["horizon"] = ce.horizon;
  detail::ordered_json d;
  d["pi_p"] = ce.duals.pi_p;
  d["pi_r1"] = ce.duals.pi_r1;
  d["pi_r2"] = ce.duals.pi_r2;
  d["sigma"] = ce.duals.sigma;
  j["duals"] = d;
  j["lp_value"] = ce.lp_value;
  j["ilp_value"] = ce.ilp_value;
  j["relative_gap"] = ce.relative_gap;
  return j.dump(2) + "\n";
}

inline void write_counter_example(const ConjectureCounterExample& ce,
                                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot open for writing");
  out << counter_example_to_json(ce);
}

}  // namespace ucpd
