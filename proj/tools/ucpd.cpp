// Command-line front end: instance generation, bound comparison, and the
// block-integrality probe. Exit codes: 0 done, 1 internal invariant breach,
// 2 bad usage or unreadable input, 3 infeasible instance, 4 the probe found
// a pricing block whose relaxation separates from its integer optimum.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ucpd/colgen.hpp"
#include "ucpd/generate.hpp"
#include "ucpd/instance_io.hpp"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCounterExample = 4;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ucpd::InputError(path + ": cannot open for writing");
  out << text;
}

// key,value rows; stable order and formatting so identical runs produce
// identical bytes.
struct Report {
  std::vector<std::pair<std::string, std::string>> rows;

  void add(const std::string& key, const std::string& value) {
    rows.push_back({key, value});
  }
  void add(const std::string& key, double value) { add(key, fmt(value)); }
  void add(const std::string& key, long value) {
    add(key, std::to_string(value));
  }

  std::string csv() const {
    std::string out = "key,value\n";
    for (const auto& [k, v] : rows) out += k + "," + v + "\n";
    return out;
  }
  void print() const {
    size_t w = 0;
    for (const auto& [k, v] : rows) w = std::max(w, k.size());
    for (const auto& [k, v] : rows)
      std::printf("%-*s  %s\n", static_cast<int>(w), k.c_str(), v.c_str());
  }
};

struct GenerateArgs {
  uint64_t seed = 1;
  int units = 10;
  int horizon = 48;
  int points = 3;
  std::string profile = "twopeak";
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  ucpd::DemandProfile profile = a.profile == "flat"
                                    ? ucpd::DemandProfile::kFlat
                                    : ucpd::DemandProfile::kTwoPeak;
  ucpd::Instance inst =
      ucpd::generate_instance(a.seed, a.units, a.horizon, a.points, profile);

  std::vector<double> cap(static_cast<size_t>(a.horizon), 0.0);
  for (const ucpd::Unit& u : inst.units) {
    ucpd::PlanVectors v =
        ucpd::plan_vectors(u, ucpd::greedy_max_plan(u, a.horizon));
    for (int t = 0; t < a.horizon; ++t)
      cap[static_cast<size_t>(t)] += v.power[static_cast<size_t>(t)];
  }
  double peak = 0.0, min_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < a.horizon; ++t) {
    peak = std::max(peak, inst.demand_power[static_cast<size_t>(t)]);
    min_slack = std::min(min_slack,
                         cap[static_cast<size_t>(t)] -
                             inst.demand_power[static_cast<size_t>(t)]);
  }

  Report rep;
  rep.add("units", static_cast<long>(a.units));
  rep.add("horizon", static_cast<long>(a.horizon));
  rep.add("points_per_unit", static_cast<long>(a.points));
  rep.add("fleet_capacity_peak",
          *std::max_element(cap.begin(), cap.end()));
  rep.add("demand_peak", peak);
  rep.add("min_power_slack", min_slack);
  rep.print();

  if (!a.out.empty()) {
    ucpd::write_instance(inst, a.out);
    std::printf("wrote %s\n", a.out.c_str());
  } else {
    std::printf("%s", ucpd::instance_to_json(inst).c_str());
  }
  return 0;
}

struct SolveArgs {
  std::string instance;
  std::string method = "all";
  double time_limit = 0.0;  // seconds; 0 = none, checked between stages
  std::string report;
  std::string cg_log;
  int threads = 1;
};

int run_solve(const SolveArgs& a) {
  ucpd::Instance inst = ucpd::read_instance(a.instance);
  Report rep;
  rep.add("instance", a.instance);
  rep.add("units", static_cast<long>(inst.units.size()));
  rep.add("horizon", static_cast<long>(inst.horizon));
  rep.add("method", a.method);

  auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (a.time_limit <= 0.0) return false;
    std::chrono::duration<double> used =
        std::chrono::steady_clock::now() - start;
    return used.count() > a.time_limit;
  };

  bool infeasible = false;
  bool want_compact_lp = a.method == "compact-lp" || a.method == "all";
  bool want_compact_ilp = a.method == "compact-ilp" || a.method == "all";
  bool want_cg = a.method == "cg" || a.method == "all";

  double compact_lp = 0.0;
  bool have_compact_lp = false;
  if (want_compact_lp || want_compact_ilp) {
    ucpd::CompactModel cm = ucpd::build_compact(inst);
    if (want_compact_lp) {
      ucpd::LpSolution lp = ucpd::solve_lp(cm.lp);
      if (lp.status == ucpd::LpStatus::kInfeasible) {
        rep.add("compact_lp", "infeasible");
        infeasible = true;
      } else if (lp.status != ucpd::LpStatus::kOptimal) {
        throw ucpd::InternalError(std::string("compact relaxation: ") +
                                  ucpd::to_string(lp.status));
      } else {
        compact_lp = lp.objective;
        have_compact_lp = true;
        rep.add("compact_lp", lp.objective);
      }
    }
    if (want_compact_ilp && !infeasible) {
      if (out_of_time()) {
        rep.add("compact_ilp", "skipped(time-limit)");
      } else {
        ucpd::BnbResult ilp = ucpd::solve_ilp(cm.lp);
        if (ilp.status == ucpd::LpStatus::kInfeasible) {
          rep.add("compact_ilp", "infeasible");
          infeasible = true;
        } else if (ilp.status != ucpd::LpStatus::kOptimal) {
          throw ucpd::InternalError(std::string("compact ilp: ") +
                                    ucpd::to_string(ilp.status));
        } else {
          rep.add("compact_ilp", ilp.objective);
          rep.add("bnb_nodes", ilp.nodes);
        }
      }
    }
  }

  if (want_cg && !infeasible) {
    if (out_of_time()) {
      rep.add("cg_bound", "skipped(time-limit)");
    } else {
      ucpd::CgResult cg = ucpd::cg_solve(inst);
      if (cg.status == ucpd::CgStatus::kInfeasible) {
        rep.add("cg_bound", "infeasible");
        rep.add("uncoverable_product", cg.coverage.product);
        rep.add("uncoverable_period",
                static_cast<long>(cg.coverage.period));
        rep.add("uncovered_shortfall", cg.coverage.shortfall);
        infeasible = true;
      } else {
        rep.add("cg_bound", cg.lower_bound);
        rep.add("cg_status", ucpd::to_string(cg.status));
        rep.add("cg_iterations", cg.iterations);
        rep.add("cg_columns", static_cast<long>(cg.pool.size()));
        if (have_compact_lp) {
          double rel = std::abs(cg.lower_bound - compact_lp) /
                       (1.0 + std::abs(compact_lp));
          rep.add("bound_rel_diff", rel);
          if (cg.status == ucpd::CgStatus::kConverged &&
              cg.lower_bound < compact_lp - 1e-6 * (1.0 + std::abs(compact_lp)))
            throw ucpd::InternalError(
                "master bound fell below the compact relaxation");
        }
        if (!a.cg_log.empty())
          write_text_file(a.cg_log, ucpd::cg_log_csv(cg, false));
      }
    }
  }

  rep.print();
  if (!a.report.empty()) write_text_file(a.report, rep.csv());
  return infeasible ? kExitInfeasible : 0;
}

struct ConjectureArgs {
  std::string instance;
  int random_units = 0;
  long trials = 100;
  uint64_t seed = 1;
  int horizon = 12;
  int points = 0;  // 0: vary 1..3
  std::string out;
};

int run_conjecture(const ConjectureArgs& a) {
  struct Job {
    ucpd::Unit unit;
    int horizon;
    std::vector<ucpd::DualPrices> harvested;
  };
  std::vector<Job> jobs;

  if (!a.instance.empty()) {
    ucpd::Instance inst = ucpd::read_instance(a.instance);
    std::vector<std::vector<ucpd::DualPrices>> harvested(inst.units.size());
    ucpd::CgResult cg = ucpd::cg_solve(inst);
    if (cg.status != ucpd::CgStatus::kInfeasible)
      for (const ucpd::HarvestedDuals& h : cg.duals_trace)
        for (size_t u = 0; u < inst.units.size(); ++u)
          harvested[u].push_back(h.for_unit(static_cast<int>(u)));
    for (size_t u = 0; u < inst.units.size(); ++u)
      jobs.push_back({inst.units[u], inst.horizon, std::move(harvested[u])});
  } else {
    std::mt19937_64 rng(a.seed);
    for (int k = 0; k < a.random_units; ++k) {
      int pts = a.points > 0 ? a.points
                             : 1 + static_cast<int>(rng() % 3);
      jobs.push_back({ucpd::generate_unit(rng, k, pts), a.horizon, {}});
    }
  }

  Report rep;
  long total_trials = 0, total_counters = 0;
  double worst_gap = 0.0;
  double integral_sum = 0.0;
  std::vector<ucpd::ConjectureCounterExample> found;
  for (size_t k = 0; k < jobs.size(); ++k) {
    ucpd::ConjectureReport r = ucpd::check_conjecture(
        jobs[k].unit, jobs[k].horizon, a.trials, a.seed + 101 * k,
        jobs[k].harvested);
    total_trials += r.trials;
    total_counters += static_cast<long>(r.counter_examples.size());
    worst_gap = std::max(worst_gap, r.max_gap);
    integral_sum += r.integral_fraction * static_cast<double>(r.trials);
    for (ucpd::ConjectureCounterExample& ce : r.counter_examples)
      if (found.size() < 8) found.push_back(std::move(ce));
  }
  rep.add("units_probed", static_cast<long>(jobs.size()));
  rep.add("trials", total_trials);
  rep.add("max_relative_gap", worst_gap);
  rep.add("integral_fraction",
          total_trials == 0 ? 1.0
                            : integral_sum / static_cast<double>(total_trials));
  rep.add("counter_examples", total_counters);

  std::string stem = a.out.empty() ? std::string("conjecture") : a.out;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv")
    stem = stem.substr(0, stem.size() - 4);
  for (size_t k = 0; k < found.size(); ++k) {
    std::string path = stem + "_counter_" + std::to_string(k) + ".json";
    ucpd::write_counter_example(found[k], path);
    rep.add("counter_example_" + std::to_string(k), path);
  }

  rep.print();
  if (!a.out.empty()) write_text_file(a.out, rep.csv());
  return total_counters > 0 ? kExitCounterExample : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretized unit commitment: compact ILP, plan-column "
               "master, and pricing-block integrality probes"};
  app.require_subcommand(1);

  GenerateArgs g;
  CLI::App* gen = app.add_subcommand(
      "generate", "Write a random feasible instance as JSON");
  gen->add_option("--seed", g.seed, "RNG seed");
  gen->add_option("--units", g.units, "number of units")
      ->check(CLI::Range(1, 100000));
  gen->add_option("--horizon", g.horizon, "number of periods")
      ->check(CLI::Range(1, 100000));
  gen->add_option("--points", g.points, "operating points per unit")
      ->check(CLI::Range(1, 64));
  gen->add_option("--profile", g.profile, "demand shape")
      ->check(CLI::IsMember({"twopeak", "flat"}));
  gen->add_option("--out", g.out, "output file (stdout when omitted)");

  SolveArgs s;
  CLI::App* solve = app.add_subcommand(
      "solve", "Solve an instance and report bounds");
  solve->add_option("--instance", s.instance, "instance file")->required();
  solve->add_option("--method", s.method, "what to run")
      ->check(CLI::IsMember({"compact-lp", "compact-ilp", "cg", "all"}));
  solve->add_option("--time-limit", s.time_limit,
                    "soft limit in seconds, checked between stages");
  solve->add_option("--report", s.report, "write key,value CSV here");
  solve->add_option("--cg-log", s.cg_log,
                    "write the per-iteration master CSV here");
  solve->add_option("--threads", s.threads,
                    "pricing thread budget (results are identical for any "
                    "value; pricing runs in unit order)")
      ->envname("UCPD_THREADS")
      ->check(CLI::Range(1, 1024));

  ConjectureArgs c;
  CLI::App* conj = app.add_subcommand(
      "conjecture",
      "Probe pricing blocks for LP/ILP separation; serializes any "
      "counter-example found");
  CLI::Option* ci =
      conj->add_option("--instance", c.instance,
                       "probe this instance's units with duals harvested "
                       "from a master run plus random trials");
  conj->add_option("--random-units", c.random_units,
                   "probe this many generated units instead")
      ->check(CLI::Range(1, 100000))
      ->excludes(ci);
  conj->add_option("--trials", c.trials, "random dual trials per unit")
      ->check(CLI::Range(0L, 1000000000L));
  conj->add_option("--seed", c.seed, "RNG seed");
  conj->add_option("--horizon", c.horizon,
                   "horizon for generated units")
      ->check(CLI::Range(1, 100000));
  conj->add_option("--points", c.points,
                   "points per generated unit (0: vary 1..3)")
      ->check(CLI::Range(0, 64));
  conj->add_option("--out", c.out, "write key,value CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_generate(g);
    if (solve->parsed()) return run_solve(s);
    if (conj->parsed()) {
      if (c.instance.empty() && c.random_units == 0) {
        std::fprintf(stderr,
                     "conjecture: pass --instance or --random-units\n");
        return kExitUsage;
      }
      return run_conjecture(c);
    }
  } catch (const ucpd::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ucpd::InternalError& e) {
    std::fprintf(stderr, "invariant breach: %s\n", e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
  return 0;
}
