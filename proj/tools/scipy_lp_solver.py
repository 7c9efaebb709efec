#!/usr/bin/env python3
"""Reference external LP solver for the dump format.

Usage: scipy_lp_solver.py MODEL.lp

Reads the plain-text dump (`min`/`eq`/`le` lines, sparse idx:coef terms) and
prints either

    optimal <value>
    <x0> <x1> ... <xn-1>

or a single `infeasible` / `unbounded` line. Point OBLIV_KAND_SOLVER at this
script (`external:/path/to/scipy_lp_solver.py`) to cross-check the built-in
simplex against scipy's HiGHS backend.
"""

import sys

import numpy as np
from scipy.optimize import linprog


def parse(path):
    obj = {}
    eq_rows, le_rows = [], []
    with open(path) as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            tag = parts[0]
            if tag == "min":
                terms = parts[1:]
                row = obj
            elif tag in ("eq", "le"):
                row = {}
                (eq_rows if tag == "eq" else le_rows).append((row, float(parts[1])))
                terms = parts[2:]
            else:
                raise ValueError(f"unknown line tag {tag!r}")
            for term in terms:
                idx, coef = term.split(":")
                row[int(idx)] = float(coef)
    n = 1 + max(
        [j for j in obj]
        + [j for row, _ in eq_rows for j in row]
        + [j for row, _ in le_rows for j in row]
    )
    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = v

    def matrix(rows):
        if not rows:
            return None, None
        a = np.zeros((len(rows), n))
        b = np.zeros(len(rows))
        for i, (row, rhs) in enumerate(rows):
            b[i] = rhs
            for j, v in row.items():
                a[i, j] = v
        return a, b

    a_eq, b_eq = matrix(eq_rows)
    a_ub, b_ub = matrix(le_rows)
    return c, a_ub, b_ub, a_eq, b_eq


def main():
    if len(sys.argv) != 2:
        print("usage: scipy_lp_solver.py MODEL.lp", file=sys.stderr)
        return 2
    c, a_ub, b_ub, a_eq, b_eq = parse(sys.argv[1])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:
        print("infeasible")
    elif res.status == 3:
        print("unbounded")
    elif res.status == 0:
        print(f"optimal {res.fun:.17g}")
        print(" ".join(f"{x:.17g}" for x in res.x))
    else:
        print(f"solver status {res.status}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
