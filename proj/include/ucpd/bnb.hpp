// Branch and bound over the bounded-variable LP relaxation.
//
// Depth-first dives with best-bound backtracking: after a node is solved we
// descend into one child immediately (the side the fractional value leans
// toward) and park the sibling; when a dive ends the open node with the
// smallest parent bound is resumed. Children start from the parent basis and
// are repaired by the dual simplex, so most node solves take a handful of
// pivots. Branching picks the most fractional integer column, ties to the
// smallest index.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "ucpd/lp_model.hpp"
#include "ucpd/simplex.hpp"

namespace ucpd {

struct BnbOptions {
  double int_tol = 1e-6;
  double gap_tol = 1e-9;
  long max_nodes = -1;  // negative: no limit
  SimplexOptions lp;
};

struct BnbResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  long nodes = 0;
};

namespace detail {

struct BnbNode {
  std::vector<double> lower, upper;
  Basis basis;
  double bound;  // parent LP value, a valid lower bound for the subtree
  long seq;
};

// Most fractional integer column; ties broken toward the smallest index.
inline int pick_branch_column(const LpModel& model,
                              const std::vector<double>& x, double int_tol) {
  int best = -1;
  double best_frac = int_tol;
  for (int j = 0; j < model.num_cols(); ++j) {
    if (!model.integer[static_cast<size_t>(j)]) continue;
    double v = x[static_cast<size_t>(j)];
    double frac = std::min(v - std::floor(v), std::ceil(v) - v);
    if (frac > best_frac + 1e-12) {
      best_frac = frac;
      best = j;
    }
  }
  return best;
}

}  // namespace detail

inline BnbResult solve_ilp(const LpModel& model, const BnbOptions& opts = {}) {
  BnbResult res;
  std::vector<detail::BnbNode> open;
  std::optional<detail::BnbNode> current;
  current.emplace(detail::BnbNode{model.lower, model.upper, Basis{},
                                  -std::numeric_limits<double>::infinity(), 0});
  long next_seq = 1;
  double incumbent = std::numeric_limits<double>::infinity();

  LpModel node_model = model;
  while (current || !open.empty()) {
    if (res.nodes == opts.max_nodes) {
      // Report the weakest unexplored bound so the caller still gets a
      // valid optimality gap.
      double remaining = incumbent;
      if (current) remaining = std::min(remaining, current->bound);
      for (const detail::BnbNode& n : open)
        remaining = std::min(remaining, n.bound);
      res.status = LpStatus::kIterLimit;
      res.bound = remaining;
      res.objective = incumbent;
      return res;
    }
    detail::BnbNode node;
    if (current) {
      node = std::move(*current);
      current.reset();
    } else {
      size_t pick = 0;
      for (size_t k = 1; k < open.size(); ++k) {
        if (open[k].bound < open[pick].bound - 1e-12 ||
            (open[k].bound < open[pick].bound + 1e-12 &&
             open[k].seq < open[pick].seq))
          pick = k;
      }
      node = std::move(open[pick]);
      open.erase(open.begin() + static_cast<long>(pick));
    }
    if (node.bound >= incumbent - opts.gap_tol) continue;

    node_model.lower = node.lower;
    node_model.upper = node.upper;
    LpSolution sol = solve_lp(node_model, node.basis.empty() ? nullptr : &node.basis,
                              opts.lp);
    ++res.nodes;
    if (sol.status == LpStatus::kUnbounded) {
      res.status = LpStatus::kUnbounded;
      return res;
    }
    if (sol.status == LpStatus::kIterLimit) {
      res.status = LpStatus::kIterLimit;
      res.bound = std::min(node.bound, incumbent);
      res.objective = incumbent;
      return res;
    }
    if (sol.status == LpStatus::kInfeasible) continue;
    if (sol.objective >= incumbent - opts.gap_tol) continue;

    int j = detail::pick_branch_column(node_model, sol.x, opts.int_tol);
    if (j < 0) {
      incumbent = sol.objective;
      res.x = sol.x;
      continue;
    }

    double v = sol.x[static_cast<size_t>(j)];
    detail::BnbNode down{node.lower, node.upper, sol.basis, sol.objective,
                         next_seq++};
    down.upper[static_cast<size_t>(j)] = std::floor(v);
    detail::BnbNode up{std::move(node.lower), std::move(node.upper),
                       sol.basis, sol.objective, next_seq++};
    up.lower[static_cast<size_t>(j)] = std::ceil(v);
    if (v - std::floor(v) <= 0.5) {
      current.emplace(std::move(down));
      open.push_back(std::move(up));
    } else {
      current.emplace(std::move(up));
      open.push_back(std::move(down));
    }
  }

  if (std::isfinite(incumbent)) {
    res.status = LpStatus::kOptimal;
    res.objective = incumbent;
    res.bound = incumbent;
  }
  return res;
}

}  // namespace ucpd
