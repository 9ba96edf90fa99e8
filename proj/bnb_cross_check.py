
import json, sys
import numpy as np
from scipy.optimize import linprog, milp, LinearConstraint, Bounds

cases_path, results_path = sys.argv[1], sys.argv[2]
data = json.load(open(cases_path))
results = []
for case in data["cases"]:
    n = len(case["c"])
    lo = [(-np.inf if v is None else v) for v in case["l"]]
    hi = [(np.inf if v is None else v) for v in case["u"]]
    integrality = np.array(case.get("integer", [0] * n))
    if integrality.any():
        A, clb, cub = [], [], []
        for row in case["rows"]:
            a = [0.0] * n
            for j, v in row["coefs"]:
                a[j] += v
            A.append(a)
            if row["sense"] == "L":
                clb.append(-np.inf); cub.append(row["rhs"])
            elif row["sense"] == "G":
                clb.append(row["rhs"]); cub.append(np.inf)
            else:
                clb.append(row["rhs"]); cub.append(row["rhs"])
        cons = [LinearConstraint(np.array(A), clb, cub)] if A else []
        res = milp(case["c"], constraints=cons, integrality=integrality,
                   bounds=Bounds(lo, hi))
        status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(
            res.status, "other")
        results.append({"status": status,
                        "objective": (res.fun + case["offset"])
                        if status == "optimal" else 0.0})
        continue
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row in case["rows"]:
        a = [0.0] * n
        for j, v in row["coefs"]:
            a[j] += v
        if row["sense"] == "L":
            A_ub.append(a); b_ub.append(row["rhs"])
        elif row["sense"] == "G":
            A_ub.append([-x for x in a]); b_ub.append(-row["rhs"])
        else:
            A_eq.append(a); b_eq.append(row["rhs"])
    bounds = list(zip(lo, hi))
    res = linprog(case["c"], A_ub or None, b_ub or None,
                  A_eq or None, b_eq or None, bounds, method="highs")
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(
        res.status, "other")
    results.append({"status": status,
                    "objective": (res.fun + case["offset"])
                    if status == "optimal" else 0.0})
json.dump(results, open(results_path, "w"))
