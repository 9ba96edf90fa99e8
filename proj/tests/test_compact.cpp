#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "scipy_check.hpp"
#include "ucpd/compact.hpp"
#include "ucpd/generate.hpp"
#include "ucpd/simplex.hpp"

using ucpd::build_compact;
using ucpd::build_unit_polytope;
using ucpd::CompactIndex;
using ucpd::CompactModel;
using ucpd::GateConfig;
using ucpd::Instance;
using ucpd::LpModel;
using ucpd::LpRow;
using ucpd::LpSolution;
using ucpd::LpStatus;
using ucpd::Plan;
using ucpd::RowSense;
using ucpd::Unit;

namespace {

// Writes one unit's plan encoding into the joint column vector.
void fill_encoding(std::vector<double>& x, const CompactIndex& idx, int u,
                   const Unit& un, const Plan& plan) {
  testutil::Encoding e = testutil::encode_plan(un, idx.horizon, plan);
  for (int t = 1; t <= idx.horizon; ++t) {
    for (int i = 1; i <= e.N; ++i) {
      x[static_cast<size_t>(idx.s(u, t, i))] = e.s[t][i];
      x[static_cast<size_t>(idx.yup(u, t, i))] = e.yup[t][i];
    }
    for (int i = 0; i <= e.N - 1; ++i)
      x[static_cast<size_t>(idx.ydn(u, t, i))] = e.ydn[t][i];
  }
}

bool feasible_point(const LpModel& lp, const std::vector<double>& x,
                    double tol = 1e-9) {
  for (int j = 0; j < lp.num_cols(); ++j) {
    if (x[static_cast<size_t>(j)] < lp.lower[static_cast<size_t>(j)] - tol)
      return false;
    if (x[static_cast<size_t>(j)] > lp.upper[static_cast<size_t>(j)] + tol)
      return false;
  }
  for (const LpRow& row : lp.rows) {
    double act = lp.row_activity(row, x);
    if (row.sense == RowSense::kLE && act > row.rhs + tol) return false;
    if (row.sense == RowSense::kGE && act < row.rhs - tol) return false;
    if (row.sense == RowSense::kEQ && std::abs(act - row.rhs) > tol)
      return false;
  }
  return true;
}

double objective_at(const LpModel& lp, const std::vector<double>& x) {
  double obj = lp.objective_offset;
  for (int j = 0; j < lp.num_cols(); ++j)
    obj += lp.objective[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
  return obj;
}

// All point sequences of length T over 0..N.
void enumerate_plans(int n_points, int T,
                     const std::function<void(const Plan&)>& visit) {
  Plan plan;
  plan.points.assign(static_cast<size_t>(T), 0);
  while (true) {
    visit(plan);
    int t = T - 1;
    while (t >= 0 && plan.points[static_cast<size_t>(t)] == n_points) {
      plan.points[static_cast<size_t>(t)] = 0;
      --t;
    }
    if (t < 0) return;
    ++plan.points[static_cast<size_t>(t)];
  }
}

Unit two_point_unit() {
  Unit u;
  u.id = "g1";
  u.points.push_back({100.0, 5.0, 10.0, 2, 1});
  u.points.push_back({150.0, 3.0, 6.0, 1, 2});
  u.min_up = 2;
  u.min_down = 2;
  u.cost_startup = 500.0;
  u.cost_fixed = 100.0;
  u.cost_prop = 2.0;
  u.init.point = 1;
  u.init.dwell = 1;
  u.init.since_startup = 1;
  return u;
}

}  // namespace

TEST_CASE("frozen shapes of tiny models") {
  SECTION("one point, one period") {
    Unit u;
    u.id = "solo";
    u.points.push_back({50.0, 0.0, 0.0, 1, 1});
    u.min_up = 1;
    u.min_down = 1;
    u.init.point = 0;
    u.init.dwell = 1;
    u.init.offline_elapsed = 1;
    Instance inst{1, {u}, {50.0}, {0.0}, {0.0}};

    CompactModel cm = build_compact(inst);
    CHECK(cm.lp.num_cols() == 3);
    CHECK(cm.lp.num_rows() == 5);
    CHECK(cm.lp.col_names[0] == "u0.s.t1.p1");
    CHECK(cm.lp.col_names[1] == "u0.yu.t1.p1");
    CHECK(cm.lp.col_names[2] == "u0.yd.t1.p0");
    CHECK(cm.demand_row_base == 2);
    // The unit cannot start before its offline run covers min-down; here it
    // already does, so the start column stays live.
    CHECK(cm.lp.upper[1] == 1.0);
  }

  SECTION("two points, three periods") {
    Instance inst{3, {two_point_unit()}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0},
                  {0.0, 0.0, 0.0}};
    CompactModel cm = build_compact(inst);
    const CompactIndex& idx = cm.idx;
    CHECK(cm.lp.num_cols() == 18);
    CHECK(cm.lp.num_rows() == 32);

    std::set<int> fixed;
    for (int j = 0; j < cm.lp.num_cols(); ++j)
      if (cm.lp.upper[static_cast<size_t>(j)] == 0.0) fixed.insert(j);
    std::set<int> expect = {idx.yup(0, 1, 2), idx.ydn(0, 1, 1),
                            idx.ydn(0, 2, 1), idx.yup(0, 1, 1),
                            idx.yup(0, 2, 1)};
    CHECK(fixed == expect);

    // Dwell boundary row couples the surviving exits from the initial point.
    bool found = false;
    for (const LpRow& row : cm.lp.rows)
      if (row.name == "u0.dwell.t0") {
        found = true;
        REQUIRE(row.terms.size() == 2);
        CHECK(row.terms[0].first == idx.yup(0, 2, 2));
        CHECK(row.terms[1].first == idx.ydn(0, 1, 0));
        CHECK(row.sense == RowSense::kLE);
        CHECK(row.rhs == 1.0);
      }
    CHECK(found);
  }
}

TEST_CASE("objective coefficients follow the cost model") {
  Unit u = two_point_unit();
  LpModel lp = build_unit_polytope(u, 2);
  CompactIndex idx = ucpd::make_unit_index(u, 2);
  for (int t = 1; t <= 2; ++t) {
    CHECK(lp.objective[static_cast<size_t>(idx.s(0, t, 1))] ==
          u.cost_fixed + u.cost_prop * 100.0);
    CHECK(lp.objective[static_cast<size_t>(idx.s(0, t, 2))] ==
          u.cost_fixed + u.cost_prop * 150.0);
    CHECK(lp.objective[static_cast<size_t>(idx.yup(0, t, 1))] ==
          u.cost_startup);
    CHECK(lp.objective[static_cast<size_t>(idx.yup(0, t, 2))] == 0.0);
    CHECK(lp.objective[static_cast<size_t>(idx.ydn(0, t, 0))] == 0.0);
    CHECK(lp.objective[static_cast<size_t>(idx.ydn(0, t, 1))] == 0.0);
  }
  // Only states are integral.
  for (int j = 0; j < lp.num_cols(); ++j) {
    bool is_state = false;
    for (int t = 1; t <= 2; ++t)
      for (int i = 1; i <= 2; ++i)
        if (j == idx.s(0, t, i)) is_state = true;
    CHECK(static_cast<bool>(lp.integer[static_cast<size_t>(j)]) == is_state);
  }
}

TEST_CASE("integral points of the unit block are exactly the legal plans") {
  std::mt19937_64 rng(5150);
  struct Cfg {
    int n_points, T;
    bool settled;
  };
  const Cfg cfgs[] = {{1, 4, true},  {1, 4, false}, {2, 4, true},
                      {2, 4, false}, {3, 3, true},  {3, 3, false}};
  for (const Cfg& cfg : cfgs) {
    for (int variant = 0; variant < 2; ++variant) {
      GateConfig gates;
      gates.shutdown_minstop = variant == 0;
      for (int rep = 0; rep < 6; ++rep) {
        Unit u = testutil::random_unit(rng, cfg.n_points, cfg.settled);
        LpModel lp = build_unit_polytope(u, cfg.T, gates);
        CompactIndex idx = ucpd::make_unit_index(u, cfg.T);
        int accepted = 0, rejected = 0;
        enumerate_plans(cfg.n_points, cfg.T, [&](const Plan& plan) {
          bool legal = ucpd::validate_plan(u, cfg.T, plan, gates).ok;
          std::vector<double> x(static_cast<size_t>(lp.num_cols()), 0.0);
          fill_encoding(x, idx, 0, u, plan);
          bool inside = feasible_point(lp, x);
          INFO("unit " << u.id << " points " << cfg.n_points << " gate "
                       << gates.shutdown_minstop << " plan "
                       << Catch::rangeToString(plan.points));
          REQUIRE(inside == legal);
          if (legal) {
            ++accepted;
            REQUIRE(objective_at(lp, x) ==
                    Catch::Approx(ucpd::plan_cost(u, plan)).margin(1e-9));
          } else {
            ++rejected;
          }
        });
        CHECK(accepted >= 1);
        CHECK(rejected >= 1);
      }
    }
  }
}

TEST_CASE("demand rows couple the units") {
  Unit small;
  small.id = "small";
  small.points.push_back({2.0, 1.0, 0.0, 1, 1});
  small.min_up = 2;
  small.min_down = 1;
  small.cost_startup = 10.0;
  small.cost_fixed = 1.0;
  small.cost_prop = 1.0;
  small.init.point = 0;
  small.init.dwell = 2;
  small.init.offline_elapsed = 2;

  Unit big = two_point_unit();
  big.id = "big";
  big.points[0].power = 3.0;
  big.points[1].power = 5.0;
  big.points[0].r1 = 0.0;
  big.points[1].r1 = 2.0;

  Instance inst{3, {small, big}, {3.0, 5.0, 5.0}, {0.0, 0.0, 1.0},
                {0.0, 0.0, 0.0}};
  CompactModel cm = build_compact(inst);

  int joint_feasible = 0, compact_feasible = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  double best_compact = std::numeric_limits<double>::infinity();
  enumerate_plans(1, 3, [&](const Plan& ps) {
    enumerate_plans(2, 3, [&](const Plan& pb) {
      bool legal = ucpd::validate_plan(small, 3, ps).ok &&
                   ucpd::validate_plan(big, 3, pb).ok;
      if (legal) {
        ucpd::PlanVectors vs = ucpd::plan_vectors(small, ps);
        ucpd::PlanVectors vb = ucpd::plan_vectors(big, pb);
        for (int t = 0; t < 3 && legal; ++t) {
          size_t ti = static_cast<size_t>(t);
          if (vs.power[ti] + vb.power[ti] < inst.demand_power[ti] - 1e-9)
            legal = false;
          if (vs.r1[ti] + vb.r1[ti] < inst.demand_r1[ti] - 1e-9) legal = false;
          if (vs.r2[ti] + vb.r2[ti] < inst.demand_r2[ti] - 1e-9) legal = false;
        }
      }
      std::vector<double> x(static_cast<size_t>(cm.lp.num_cols()), 0.0);
      fill_encoding(x, cm.idx, 0, small, ps);
      fill_encoding(x, cm.idx, 1, big, pb);
      bool inside = feasible_point(cm.lp, x);
      REQUIRE(inside == legal);
      if (legal) {
        ++joint_feasible;
        double cost =
            ucpd::plan_cost(small, ps) + ucpd::plan_cost(big, pb);
        REQUIRE(objective_at(cm.lp, x) == Catch::Approx(cost).margin(1e-9));
        best_cost = std::min(best_cost, cost);
      }
      if (inside) {
        ++compact_feasible;
        best_compact = std::min(best_compact, objective_at(cm.lp, x));
      }
    });
  });
  CHECK(joint_feasible == compact_feasible);
  CHECK(joint_feasible > 0);

  // The relaxation lies at or below the best schedule.
  LpSolution lp = ucpd::solve_lp(cm.lp);
  REQUIRE(lp.status == LpStatus::kOptimal);
  CHECK(lp.objective <= best_cost + 1e-9);
  CHECK(best_compact == best_cost);
}

TEST_CASE("single unit relaxation is tight and integral") {
  std::mt19937_64 rng(1411);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    int n_points = 1 + rep % 3;
    Unit u = testutil::random_unit(rng, n_points, rep % 2 == 0);
    const int T = 5;
    LpModel lp = build_unit_polytope(u, T);
    CompactIndex idx = ucpd::make_unit_index(u, T);

    double best = std::numeric_limits<double>::infinity();
    enumerate_plans(n_points, T, [&](const Plan& plan) {
      if (ucpd::validate_plan(u, T, plan).ok)
        best = std::min(best, ucpd::plan_cost(u, plan));
    });
    REQUIRE(std::isfinite(best));  // staying put is always legal

    LpSolution sol = ucpd::solve_lp(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    INFO("unit " << u.id << " rep " << rep);
    REQUIRE(sol.objective == Catch::Approx(best).margin(1e-6));
    REQUIRE(ucpd::max_state_fractionality(idx, sol.x) < 1e-7);
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("relaxation bounds the best schedule on small fleets") {
  std::mt19937_64 rng(2026);
  int tight = 0, feasible_count = 0;
  for (int rep = 0; rep < 25; ++rep) {
    Unit a = testutil::random_unit(rng, 1 + rep % 2, true);
    Unit b = testutil::random_unit(rng, 2 - rep % 2, true);
    const int T = 4;
    // Demand reachable by the pair at full output most of the time.
    ucpd::PlanVectors va =
        ucpd::plan_vectors(a, ucpd::greedy_max_plan(a, T));
    ucpd::PlanVectors vb =
        ucpd::plan_vectors(b, ucpd::greedy_max_plan(b, T));
    Instance inst;
    inst.horizon = T;
    inst.units = {a, b};
    for (int t = 0; t < T; ++t) {
      size_t ti = static_cast<size_t>(t);
      double frac = 0.25 * (1 + testutil::irand(rng, 0, 3));
      inst.demand_power.push_back(
          std::floor(frac * (va.power[ti] + vb.power[ti])));
      inst.demand_r1.push_back(0.0);
      inst.demand_r2.push_back(0.0);
    }

    double best = std::numeric_limits<double>::infinity();
    enumerate_plans(a.num_points(), T, [&](const Plan& pa) {
      if (!ucpd::validate_plan(a, T, pa).ok) return;
      ucpd::PlanVectors xa = ucpd::plan_vectors(a, pa);
      enumerate_plans(b.num_points(), T, [&](const Plan& pb) {
        if (!ucpd::validate_plan(b, T, pb).ok) return;
        ucpd::PlanVectors xb = ucpd::plan_vectors(b, pb);
        for (int t = 0; t < T; ++t)
          if (xa.power[static_cast<size_t>(t)] +
                  xb.power[static_cast<size_t>(t)] <
              inst.demand_power[static_cast<size_t>(t)] - 1e-9)
            return;
        best = std::min(best, ucpd::plan_cost(a, pa) + ucpd::plan_cost(b, pb));
      });
    });

    CompactModel cm = build_compact(inst);
    LpSolution sol = ucpd::solve_lp(cm.lp);
    if (!std::isfinite(best)) {
      // A fractional point may still exist; only the converse is guaranteed.
      if (sol.status == LpStatus::kInfeasible) continue;
      continue;
    }
    ++feasible_count;
    REQUIRE(sol.status == LpStatus::kOptimal);
    REQUIRE(sol.objective <= best + 1e-6);
    if (sol.objective > best - 1e-6) ++tight;
  }
  CHECK(feasible_count >= 15);
  CHECK(tight >= 1);
}

TEST_CASE("shutdown gate changes the model exactly as the validator") {
  Unit u;
  u.id = "gate";
  u.points.push_back({10.0, 0.0, 0.0, 1, 3});  // three periods before any stop
  u.min_up = 1;
  u.min_down = 1;
  u.cost_startup = 5.0;
  u.cost_fixed = 1.0;
  u.cost_prop = 1.0;
  u.init.point = 1;
  u.init.dwell = 1;
  u.init.since_startup = 4;

  Plan stop_now{{0, 0, 0}};
  GateConfig on, off;
  off.shutdown_minstop = false;

  REQUIRE_FALSE(ucpd::validate_plan(u, 3, stop_now, on).ok);
  REQUIRE(ucpd::validate_plan(u, 3, stop_now, off).ok);

  LpModel lp_on = build_unit_polytope(u, 3, on);
  LpModel lp_off = build_unit_polytope(u, 3, off);
  CompactIndex idx = ucpd::make_unit_index(u, 3);
  std::vector<double> x(static_cast<size_t>(lp_on.num_cols()), 0.0);
  fill_encoding(x, idx, 0, u, stop_now);
  CHECK_FALSE(feasible_point(lp_on, x));
  CHECK(feasible_point(lp_off, x));
}

TEST_CASE("builder output is deterministic") {
  Instance inst = ucpd::generate_instance(99, 3, 12, 2);
  CompactModel a = build_compact(inst);
  CompactModel b = build_compact(inst);
  REQUIRE(a.lp.num_cols() == b.lp.num_cols());
  REQUIRE(a.lp.num_rows() == b.lp.num_rows());
  CHECK(a.lp.objective == b.lp.objective);
  CHECK(a.lp.lower == b.lp.lower);
  CHECK(a.lp.upper == b.lp.upper);
  CHECK(a.lp.col_names == b.lp.col_names);
  for (int i = 0; i < a.lp.num_rows(); ++i) {
    const LpRow& ra = a.lp.rows[static_cast<size_t>(i)];
    const LpRow& rb = b.lp.rows[static_cast<size_t>(i)];
    REQUIRE(ra.terms == rb.terms);
    REQUIRE(ra.rhs == rb.rhs);
    REQUIRE(ra.name == rb.name);
  }
}

TEST_CASE("external solver agrees on generated relaxations and a tiny ilp") {
  std::vector<LpModel> cases;
  std::vector<double> mine;

  for (uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    Instance inst = ucpd::generate_instance(seed, 3, 12, 3);
    CompactModel cm = build_compact(inst);
    LpSolution sol = ucpd::solve_lp(cm.lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    REQUIRE(ucpd::check_lp_optimality(cm.lp, sol) == "");
    mine.push_back(sol.objective);
    LpModel relax = cm.lp;
    std::fill(relax.integer.begin(), relax.integer.end(), 0);
    cases.push_back(relax);
  }

  // One integral case: the external branch-and-bound must land on the best
  // enumerated schedule.
  Unit u = two_point_unit();
  Instance tiny{3, {u}, {100.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  CompactModel cm = build_compact(tiny);
  double best = std::numeric_limits<double>::infinity();
  enumerate_plans(2, 3, [&](const Plan& plan) {
    if (!ucpd::validate_plan(u, 3, plan).ok) return;
    ucpd::PlanVectors v = ucpd::plan_vectors(u, plan);
    for (int t = 0; t < 3; ++t)
      if (v.power[static_cast<size_t>(t)] <
          tiny.demand_power[static_cast<size_t>(t)] - 1e-9)
        return;
    best = std::min(best, ucpd::plan_cost(u, plan));
  });
  REQUIRE(std::isfinite(best));
  cases.push_back(cm.lp);

  std::vector<testutil::ExternalLp> refs =
      testutil::solve_with_scipy(cases, "compact_cross");
  for (size_t i = 0; i < mine.size(); ++i) {
    REQUIRE(refs[i].status == "optimal");
    REQUIRE(std::abs(mine[i] - refs[i].objective) <
            1e-6 * (1.0 + std::abs(refs[i].objective)));
  }
  REQUIRE(refs.back().status == "optimal");
  REQUIRE(std::abs(refs.back().objective - best) < 1e-6 * (1.0 + best));
}

TEST_CASE("decode recovers the plan from an integral solution") {
  std::mt19937_64 rng(8086);
  for (int rep = 0; rep < 20; ++rep) {
    Unit u = testutil::random_unit(rng, 2, true);
    const int T = 5;
    LpModel lp = build_unit_polytope(u, T);
    CompactIndex idx = ucpd::make_unit_index(u, T);
    LpSolution sol = ucpd::solve_lp(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    REQUIRE(ucpd::max_state_fractionality(idx, sol.x) < 1e-7);

    Plan plan = ucpd::decode_plan(idx, 0, sol.x);
    REQUIRE(ucpd::validate_plan(u, T, plan).ok);
    CHECK(ucpd::plan_cost(u, plan) ==
          Catch::Approx(sol.objective).margin(1e-6));

    std::vector<double> x(static_cast<size_t>(lp.num_cols()), 0.0);
    fill_encoding(x, idx, 0, u, plan);
    for (int t = 1; t <= T; ++t)
      for (int i = 1; i <= 2; ++i) {
        size_t col = static_cast<size_t>(idx.s(0, t, i));
        CHECK(std::abs(x[col] - sol.x[col]) < 1e-7);
      }
  }
}
