#pragma once

// Deterministic random instance generator. Demands are scaled against the
// fleet's greedy-maximal production profile so that every instance is
// feasible by construction with at least 10% slack at the binding period.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ucpd/model.hpp"

namespace ucpd {

enum class DemandProfile {
  kTwoPeak, // two-day sinusoid-like curve with morning and evening peaks
  kFlat,
};

namespace detail {

// std::uniform_*_distribution is implementation-defined; these helpers keep
// generated instances identical across standard libraries.
inline double urand(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double urand(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * urand(rng);
}

inline int irand(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

}  // namespace detail

// Generates a self-consistent random unit. Initial conditions are "settled":
// every dwell statistic already satisfies its gate, so the unit could hold or
// leave its initial point at period 1.
inline Unit generate_unit(std::mt19937_64& rng, int index, int n_points) {
  using detail::irand;
  using detail::round2;
  using detail::urand;
  Unit u;
  u.id = "u" + std::to_string(index);
  double power = urand(rng, 60.0, 350.0);
  for (int i = 0; i < n_points; ++i) {
    OperatingPoint p;
    p.power = round2(power);
    p.r1 = round2(power * urand(rng, 0.01, 0.05));
    p.r2 = round2(power * urand(rng, 0.02, 0.08));
    p.dwell_up = irand(rng, 1, 3);
    p.dwell_down = irand(rng, 1, 3);
    u.points.push_back(p);
    power *= urand(rng, 1.2, 1.6);
  }
  u.min_up = irand(rng, 2, 6);
  u.min_down = irand(rng, 2, 6);
  u.cost_startup = round2(urand(rng, 500.0, 8000.0));
  u.cost_fixed = round2(urand(rng, 50.0, 400.0));
  u.cost_prop = round2(urand(rng, 5.0, 40.0));

  if (urand(rng) < 0.55) {
    int p0 = irand(rng, 1, n_points);
    const OperatingPoint& op = u.point(p0);
    u.init.point = p0;
    u.init.dwell = std::max(op.dwell_up, op.dwell_down) + irand(rng, 0, 2);
    u.init.since_startup = std::max(u.min_up, u.init.dwell) + irand(rng, 0, 2);
    u.init.offline_elapsed = 1;
  } else {
    u.init.point = 0;
    u.init.offline_elapsed = u.min_down + irand(rng, 0, 2);
    u.init.dwell = u.init.offline_elapsed;
    u.init.since_startup = 1;
  }
  return u;
}

inline Instance generate_instance(uint64_t seed, int n_units, int horizon,
                                  int points_per_unit,
                                  DemandProfile profile = DemandProfile::kTwoPeak) {
  if (n_units < 1) throw InputError("generate: n_units must be >= 1");
  if (horizon < 1) throw InputError("generate: horizon must be >= 1");
  if (points_per_unit < 1)
    throw InputError("generate: points_per_unit must be >= 1");

  std::mt19937_64 rng(seed);
  Instance inst;
  inst.horizon = horizon;
  for (int k = 0; k < n_units; ++k)
    inst.units.push_back(generate_unit(rng, k, points_per_unit));

  // Fleet profile of the all-maximal plan set; this plan set must stay
  // feasible for the demands chosen below.
  std::vector<double> cap_p(horizon, 0.0), cap_r1(horizon, 0.0),
      cap_r2(horizon, 0.0);
  for (const Unit& u : inst.units) {
    PlanVectors v = plan_vectors(u, greedy_max_plan(u, horizon));
    for (int t = 0; t < horizon; ++t) {
      cap_p[t] += v.power[t];
      cap_r1[t] += v.r1[t];
      cap_r2[t] += v.r2[t];
    }
  }

  // Demand shape: interpret the horizon as two days, with peaks around 09:00
  // and 19:00. Periods start at midnight of day one.
  std::vector<double> shape(horizon, 1.0);
  if (profile == DemandProfile::kTwoPeak) {
    double periods_per_day = std::max(horizon / 2.0, 4.0);
    for (int t = 0; t < horizon; ++t) {
      double hour = 24.0 * (t + 0.5) / periods_per_day;
      hour = std::fmod(hour, 24.0);
      double morning = std::exp(-0.5 * std::pow((hour - 9.0) / 2.5, 2));
      double evening = std::exp(-0.5 * std::pow((hour - 19.0) / 2.0, 2));
      shape[t] = 0.55 + 0.30 * morning + 0.45 * evening +
                 0.04 * detail::urand(rng);
    }
  } else {
    for (int t = 0; t < horizon; ++t)
      shape[t] = 1.0 + 0.04 * detail::urand(rng);
  }

  // Scale so the tightest period keeps >= 10% slack against the all-max
  // profile (a touch more when rho < 1).
  double rho = detail::urand(rng, 0.9, 1.0);
  auto scaled = [&](const std::vector<double>& cap, double slack,
                    bool shaped) {
    double scale = std::numeric_limits<double>::infinity();
    for (int t = 0; t < horizon; ++t) {
      double s = shaped ? shape[t] : 1.0;
      if (s > 0.0) scale = std::min(scale, cap[t] / (slack * s));
    }
    if (!std::isfinite(scale) || scale < 0.0)
      throw InputError("generate: parameters admit no feasible demand");
    std::vector<double> d(horizon);
    for (int t = 0; t < horizon; ++t)
      d[t] = detail::round2(rho * scale * (shaped ? shape[t] : 1.0));
    return d;
  };
  inst.demand_power = scaled(cap_p, 1.1, true);
  inst.demand_r1 = scaled(cap_r1, 1.1, false);
  inst.demand_r2 = scaled(cap_r2, 1.1, false);

  // Rounding must not eat into feasibility.
  for (int t = 0; t < horizon; ++t) {
    inst.demand_power[t] = std::min(inst.demand_power[t], cap_p[t]);
    inst.demand_r1[t] = std::min(inst.demand_r1[t], cap_r1[t]);
    inst.demand_r2[t] = std::min(inst.demand_r2[t], cap_r2[t]);
  }
  return inst;
}

}  // namespace ucpd
