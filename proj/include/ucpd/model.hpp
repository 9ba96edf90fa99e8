#pragma once

// Data model for discretized unit commitment. Each unit produces on a ladder
// of operating points (point 0 = offline, implicit); between consecutive
// periods it may only stay or move to a neighboring point, and it must hold a
// point for a minimum number of periods before ramping further up or down.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucpd {

// Bad input data (malformed file, inconsistent dimensions, out-of-range
// indices). Solver outcomes such as infeasibility are statuses, not throws.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A broken internal invariant; maps to exit code 1 in the CLI.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct OperatingPoint {
  double power = 0.0;
  double r1 = 0.0;   // primary reserve available at this point
  double r2 = 0.0;   // secondary reserve available at this point
  int dwell_up = 1;   // periods to hold this point before moving up
  int dwell_down = 1; // periods to hold this point before moving down
};

// Unit state at period 0. dwell/since_startup describe the online history
// (meaningful when point >= 1); offline_elapsed the offline history (point 0).
struct InitialCondition {
  int point = 0;
  int dwell = 1;           // consecutive periods already spent at `point`
  int since_startup = 1;   // online periods since the last start-up
  int offline_elapsed = 1; // offline periods since the last shut-down
};

struct Unit {
  std::string id;
  std::vector<OperatingPoint> points; // points[i-1] describes point i
  int min_up = 1;   // online periods required before a shut-down
  int min_down = 1; // offline periods required before a start-up
  double cost_startup = 0.0;
  double cost_fixed = 0.0; // per online period, any point
  double cost_prop = 0.0;  // per unit of power per period
  InitialCondition init;

  int num_points() const { return static_cast<int>(points.size()); }
  const OperatingPoint& point(int i) const {
    assert(i >= 1 && i <= num_points());
    return points[static_cast<size_t>(i - 1)];
  }
};

struct Instance {
  int horizon = 0;
  std::vector<Unit> units;
  // Demand rows are lower bounds: production may exceed them.
  std::vector<double> demand_power;
  std::vector<double> demand_r1;
  std::vector<double> demand_r2;
};

// A production schedule for one unit: points[t-1] is the operating point in
// period t (0 = offline).
struct Plan {
  std::vector<int> points;

  bool operator==(const Plan& o) const { return points == o.points; }
};

// Semantic toggles shared by the validator, the enumerator, the pricing DP
// and the row builders, so that every code path gates moves identically.
// The default reads the constraint set literally: a shut-down is a downward
// move out of point 1 and honors that point's dwell-down time in addition to
// the minimum-up time. Disabling shutdown_minstop drops the dwell-down gate
// on shut-downs only (sensitivity experiments).
struct GateConfig {
  bool shutdown_minstop = true;
};

struct Violation {
  int period = 0; // period of the offending move (1-based)
  std::string constraint;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Running dynamic state of a unit, advanced one period at a time. Tracks
// exactly the statistics the move gates depend on.
struct UnitState {
  int point = 0;
  int dwell = 1;         // consecutive periods at `point` (offline time if 0)
  int since_startup = 0; // online periods since last start-up, 0 if offline

  static UnitState from_init(const InitialCondition& init) {
    UnitState s;
    s.point = init.point;
    if (init.point == 0) {
      s.dwell = init.offline_elapsed;
      s.since_startup = 0;
    } else {
      s.dwell = init.dwell;
      s.since_startup = init.since_startup;
    }
    return s;
  }

  void advance(int next_point) {
    if (next_point == point) {
      ++dwell;
    } else {
      dwell = 1;
    }
    if (next_point == 0) {
      since_startup = 0;
    } else {
      since_startup = (point == 0) ? 1 : since_startup + 1;
    }
    point = next_point;
  }
};

namespace detail {

// Checks the move state -> next against the gates. Returns an empty string if
// admissible, otherwise the violated constraint's name.
inline const char* move_violation(const Unit& u, const UnitState& s,
                                  int next, const GateConfig& gates) {
  int delta = next - s.point;
  if (delta > 1 || delta < -1) return "transition";
  if (delta == 1) {
    if (s.point == 0) {
      if (s.dwell < u.min_down) return "min_down";
    } else if (s.dwell < u.point(s.point).dwell_up) {
      return "min_stop_up";
    }
  } else if (delta == -1) {
    if (s.point == 1) {
      if (s.since_startup < u.min_up) return "min_up";
      if (gates.shutdown_minstop && s.dwell < u.point(1).dwell_down)
        return "min_stop_down";
    } else if (s.dwell < u.point(s.point).dwell_down) {
      return "min_stop_down";
    }
  }
  return "";
}

}  // namespace detail

// Checks a plan against the unit's dynamics. Structural problems (wrong
// length, point index out of range) are input errors and throw; dynamic
// violations are collected in the report, one entry per offending move.
inline ValidationReport validate_plan(const Unit& u, int horizon,
                                      const Plan& plan,
                                      const GateConfig& gates = {}) {
  if (static_cast<int>(plan.points.size()) != horizon)
    throw InputError("plan length " + std::to_string(plan.points.size()) +
                     " does not match horizon " + std::to_string(horizon));
  ValidationReport report;
  UnitState s = UnitState::from_init(u.init);
  for (int t = 1; t <= horizon; ++t) {
    int next = plan.points[static_cast<size_t>(t - 1)];
    if (next < 0 || next > u.num_points())
      throw InputError("unit " + u.id + ", period " + std::to_string(t) +
                       ": point " + std::to_string(next) + " out of range");
    const char* name = detail::move_violation(u, s, next, gates);
    if (name[0] != '\0') {
      report.ok = false;
      report.violations.push_back(
          {t, name,
           "unit " + u.id + ": move " + std::to_string(s.point) + "->" +
               std::to_string(next) + " at period " + std::to_string(t) +
               " (dwell " + std::to_string(s.dwell) + ", since_startup " +
               std::to_string(s.since_startup) + ")"});
    }
    // Advance even past a violation so later periods are still checked
    // against a well-defined state.
    if (next >= s.point - 1 && next <= s.point + 1) {
      s.advance(next);
    } else {
      s = UnitState{next, 1, next >= 1 ? 1 : 0};
    }
  }
  return report;
}

// Cost of a plan: per online period a fixed charge plus a proportional charge
// on the power produced, plus the start-up charge on each 0 -> 1 move
// (including a start in period 1 from an offline initial state).
// Accumulates in period order; the pricing DP folds its stage costs in the
// same order so the two agree bit for bit.
inline double plan_cost(const Unit& u, const Plan& plan) {
  double total = 0.0;
  int prev = u.init.point;
  for (int point : plan.points) {
    if (point >= 1) {
      total += u.cost_fixed + u.cost_prop * u.point(point).power;
      if (prev == 0) total += u.cost_startup;
    }
    prev = point;
  }
  return total;
}

struct PlanVectors {
  std::vector<double> power;
  std::vector<double> r1;
  std::vector<double> r2;
};

inline PlanVectors plan_vectors(const Unit& u, const Plan& plan) {
  PlanVectors v;
  v.power.reserve(plan.points.size());
  v.r1.reserve(plan.points.size());
  v.r2.reserve(plan.points.size());
  for (int point : plan.points) {
    if (point >= 1) {
      const OperatingPoint& p = u.point(point);
      v.power.push_back(p.power);
      v.r1.push_back(p.r1);
      v.r2.push_back(p.r2);
    } else {
      v.power.push_back(0.0);
      v.r1.push_back(0.0);
      v.r2.push_back(0.0);
    }
  }
  return v;
}

// Greedy "run as high as possible" schedule: start as soon as the minimum
// down-time allows, ramp up whenever the dwell gate opens, never move down.
inline Plan greedy_max_plan(const Unit& u, int horizon,
                            [[maybe_unused]] const GateConfig& gates = {}) {
  Plan plan;
  plan.points.reserve(static_cast<size_t>(horizon));
  UnitState s = UnitState::from_init(u.init);
  for (int t = 1; t <= horizon; ++t) {
    int next = s.point;
    if (s.point == 0) {
      if (s.dwell >= u.min_down) next = 1;
    } else if (s.point < u.num_points() &&
               s.dwell >= u.point(s.point).dwell_up) {
      next = s.point + 1;
    }
    assert(detail::move_violation(u, s, next, gates)[0] == '\0');
    plan.points.push_back(next);
    s.advance(next);
  }
  return plan;
}

// Greedy "run as low as possible" schedule: ramp down whenever allowed, shut
// down once the minimum-up time (and, with the default gates, the dwell-down
// time at point 1) has elapsed, stay offline forever.
inline Plan greedy_min_plan(const Unit& u, int horizon,
                            const GateConfig& gates = {}) {
  Plan plan;
  plan.points.reserve(static_cast<size_t>(horizon));
  UnitState s = UnitState::from_init(u.init);
  for (int t = 1; t <= horizon; ++t) {
    int next = s.point;
    if (s.point == 1) {
      if (s.since_startup >= u.min_up &&
          (!gates.shutdown_minstop || s.dwell >= u.point(1).dwell_down))
        next = 0;
    } else if (s.point >= 2 && s.dwell >= u.point(s.point).dwell_down) {
      next = s.point - 1;
    }
    assert(detail::move_violation(u, s, next, gates)[0] == '\0');
    plan.points.push_back(next);
    s.advance(next);
  }
  return plan;
}

}  // namespace ucpd
