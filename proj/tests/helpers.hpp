#pragma once

// Shared test utilities: an independent encode-and-check oracle for the
// per-unit constraint families, plus random generators for units and plans.
// The oracle deliberately re-derives everything from the constraint
// definitions with explicit pre-horizon constants; it shares no code with the
// row builders it is used to cross-check.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ucpd/model.hpp"

namespace testutil {

using ucpd::GateConfig;
using ucpd::InitialCondition;
using ucpd::OperatingPoint;
using ucpd::Plan;
using ucpd::Unit;

inline double urand(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
inline int irand(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

struct Encoding {
  int T = 0, N = 0;
  // s[t][i] for t in 0..T (t = 0 from the initial point), i in 1..N.
  // yup[t][i] = 1 iff the unit moves up into point i at period t, and
  // ydn[t][i] = 1 iff it moves down into point i at period t.
  std::vector<std::vector<int>> s, yup, ydn;
};

inline Encoding encode_plan(const Unit& u, int T, const Plan& plan) {
  Encoding e;
  e.T = T;
  e.N = u.num_points();
  e.s.assign(T + 1, std::vector<int>(e.N + 1, 0));
  e.yup.assign(T + 1, std::vector<int>(e.N + 1, 0));
  e.ydn.assign(T + 1, std::vector<int>(e.N + 1, 0));
  auto pt = [&](int t) { return t == 0 ? u.init.point : plan.points[t - 1]; };
  for (int t = 0; t <= T; ++t)
    if (pt(t) >= 1) e.s[t][pt(t)] = 1;
  for (int t = 1; t <= T; ++t) {
    if (pt(t) == pt(t - 1) + 1) e.yup[t][pt(t)] = 1;
    if (pt(t) == pt(t - 1) - 1) e.ydn[t][pt(t)] = 1;
  }
  return e;
}

// Evaluates every inequality family against the encoded plan and returns the
// names of the violated families. Pre-horizon values are constants resolved
// from the initial condition: the unit sat on its initial point for exactly
// `dwell` periods, came online (if online) exactly `since_startup` periods
// ago, and went offline (if offline) exactly `offline_elapsed` periods ago.
inline std::set<std::string> oracle_violations(const Unit& u, int T,
                                               const Plan& plan,
                                               const GateConfig& gates = {}) {
  Encoding e = encode_plan(u, T, plan);
  const int N = u.num_points();
  const int p0 = u.init.point;
  const int dwell0 = p0 >= 1 ? u.init.dwell : u.init.offline_elapsed;
  std::set<std::string> bad;

  auto s_at = [&](int t, int i) -> int {
    if (t >= 1) return e.s[t][i];
    return (i == p0 && t >= 1 - dwell0) ? 1 : 0;
  };
  auto online_at = [&](int t) -> int {
    if (t >= 1) {
      int sum = 0;
      for (int i = 1; i <= N; ++i) sum += e.s[t][i];
      return sum;
    }
    if (p0 >= 1) return t >= 1 - u.init.since_startup ? 1 : 0;
    return t >= 1 - u.init.offline_elapsed ? 0 : 1;
  };
  auto y1_at = [&](int t) -> int {  // start-ups, including the pre-horizon one
    if (t >= 1) return e.yup[t][1];
    return (p0 >= 1 && t == 1 - u.init.since_startup) ? 1 : 0;
  };

  // One active point at a time.
  for (int t = 1; t <= T; ++t) {
    int sum = 0;
    for (int i = 1; i <= N; ++i) sum += e.s[t][i];
    if (sum > 1) bad.insert("gub");
  }

  // Move/state coupling.
  for (int t = 1; t <= T; ++t)
    for (int i = 1; i <= N; ++i) {
      int lhs = (i - 1 >= 0) ? e.ydn[t][i - 1] : 0;
      for (int j = i; j <= N; ++j) lhs += e.s[t][j] - s_at(t - 1, j);
      if (lhs != e.yup[t][i]) bad.insert("coupling");
    }

  // Neighbor-only transitions, including the move out of the initial state.
  for (int t = 0; t <= T - 1; ++t) {
    for (int i = 2; i <= N; ++i) {  // may drop at most one level
      int lhs = 0, rhs = 0;
      for (int j = i; j <= N; ++j) lhs += s_at(t, j);
      for (int j = i - 1; j <= N; ++j) rhs += s_at(t + 1, j);
      if (lhs > rhs) bad.insert("transition");
    }
    for (int i = 1; i <= N - 1; ++i) {  // may rise at most one level
      int lhs = 0, rhs = 0;
      for (int j = i + 1; j <= N; ++j) lhs += s_at(t + 1, j);
      for (int j = i; j <= N; ++j) rhs += s_at(t, j);
      if (lhs > rhs) bad.insert("transition");
    }
  }

  // Dwell before ramping: moves out of point i within the dwell window after
  // any period spent away from i are forbidden.
  for (int i = 1; i <= N; ++i) {
    int up = u.point(i).dwell_up, dn = u.point(i).dwell_down;
    for (int t = 1 - std::max(up, dn); t <= T - 1; ++t) {
      int lhs = 0;
      if (i + 1 <= N)
        for (int tp = std::max(t + 1, 1); tp <= std::min(t + up, T); ++tp)
          lhs += e.yup[tp][i + 1];
      bool count_down = i >= 2 || gates.shutdown_minstop;
      if (count_down)
        for (int tp = std::max(t + 1, 1); tp <= std::min(t + dn, T); ++tp)
          lhs += e.ydn[tp][i - 1];
      if (lhs > s_at(t, i)) bad.insert("min_stop");
    }
  }

  // Minimum up-time: a recent start-up forces the unit online.
  for (int t = 1; t <= T; ++t) {
    int lhs = 0;
    for (int tp = t - u.min_up + 1; tp <= t; ++tp) lhs += y1_at(tp);
    if (lhs > online_at(t)) bad.insert("min_up");
  }

  // Minimum down-time: no start-up within min_down periods of online time.
  for (int t = 1; t <= T + u.min_down - 1; ++t) {
    int lhs = 0;
    for (int tp = t - u.min_down + 1; tp <= std::min(t, T); ++tp)
      lhs += y1_at(tp);
    if (lhs > 1 - online_at(t - u.min_down)) bad.insert("min_down");
  }
  return bad;
}

// Small random unit with integer-friendly costs. With settled_init the unit
// starts with every gate already satisfied; otherwise mid-dwell starts are
// possible.
inline Unit random_unit(std::mt19937_64& rng, int n_points, bool settled_init,
                        int max_duration = 3) {
  Unit u;
  u.id = "r" + std::to_string(rng() % 100000);
  double power = 1.0 + irand(rng, 1, 30);
  for (int i = 0; i < n_points; ++i) {
    OperatingPoint p;
    p.power = power;
    p.r1 = irand(rng, 0, 4);
    p.r2 = irand(rng, 0, 6);
    p.dwell_up = irand(rng, 1, max_duration);
    p.dwell_down = irand(rng, 1, max_duration);
    u.points.push_back(p);
    power += irand(rng, 1, 20);
  }
  u.min_up = irand(rng, 1, max_duration + 1);
  u.min_down = irand(rng, 1, max_duration + 1);
  u.cost_startup = irand(rng, 0, 40);
  u.cost_fixed = irand(rng, 0, 10);
  u.cost_prop = irand(rng, 0, 5);
  if (urand(rng) < 0.5) {
    int p0 = irand(rng, 1, n_points);
    u.init.point = p0;
    if (settled_init) {
      u.init.dwell =
          std::max(u.point(p0).dwell_up, u.point(p0).dwell_down) +
          irand(rng, 0, 2);
      u.init.since_startup = std::max(u.min_up, u.init.dwell) + irand(rng, 0, 2);
    } else {
      u.init.dwell = irand(rng, 1, max_duration + 1);
      u.init.since_startup = u.init.dwell + irand(rng, 0, 3);
    }
    u.init.offline_elapsed = 1;
  } else {
    u.init.point = 0;
    u.init.offline_elapsed =
        settled_init ? u.min_down + irand(rng, 0, 2) : irand(rng, 1, max_duration + 1);
    u.init.dwell = u.init.offline_elapsed;
    u.init.since_startup = 1;
  }
  return u;
}

// Random walk over points. respect = 1.0 yields a feasible plan; smaller
// values mix in moves that ignore the gates (and occasionally jump two
// levels), exercising each rejection path.
inline Plan random_plan(std::mt19937_64& rng, const Unit& u, int T,
                        double respect, const GateConfig& gates = {}) {
  Plan plan;
  ucpd::UnitState st = ucpd::UnitState::from_init(u.init);
  for (int t = 1; t <= T; ++t) {
    std::vector<int> options;
    bool honor = urand(rng) < respect;
    int lo = st.point - (honor ? 1 : 2), hi = st.point + (honor ? 1 : 2);
    for (int q = std::max(lo, 0); q <= std::min(hi, u.num_points()); ++q) {
      if (honor && ucpd::detail::move_violation(u, st, q, gates)[0] != '\0')
        continue;
      options.push_back(q);
    }
    int next = options[static_cast<size_t>(irand(
        rng, 0, static_cast<int>(options.size()) - 1))];
    plan.points.push_back(next);
    if (next >= st.point - 1 && next <= st.point + 1) {
      st.advance(next);
    } else {
      st = ucpd::UnitState{next, 1, next >= 1 ? 1 : 0};
    }
  }
  return plan;
}

}  // namespace testutil
