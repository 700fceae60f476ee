#!/usr/bin/env python3
"""Convergence under node doubling: Plemelj gaps, solver recovery and near-boundary accuracy.

Writes plot-ready two-column CSVs to ``--out`` and prints the tables.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from dbar_neumann.cauchy import CauchyEvaluator, plemelj_check
from dbar_neumann.conformal import ConformalPair
from dbar_neumann.functions import laurent, neumann_data, random_trig_coeffs, trig
from dbar_neumann.geometry import annulus, disc
from dbar_neumann.neumann import NeumannProblem, SolveOptions, solve


def save(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows([[f"{v:.16e}" if isinstance(v, float) else v for v in r] for r in rows])
    print(f"\n{path.name}")
    for r in rows:
        print("  " + "  ".join(f"{v:.3e}" if isinstance(v, float) else str(v) for v in r))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/convergence")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    coeffs = random_trig_coeffs(np.random.default_rng(args.seed), 8)
    pair = ConformalPair([0.0, 1.0, 0.2])
    domains = {"disc": disc(), "pert": pair.domain(), "annulus": annulus(0.5, 1.0, 0.75)}

    for name, d in domains.items():
        rows = []
        for n in (16, 32, 64, 128, 256, 512):
            s = d.discretize(n)
            r = plemelj_check(d, s, trig(s, coeffs))
            rows.append([n, r.max_interior_gap, r.max_exterior_gap])
        save(out / f"plemelj_{name}.csv", ["n", "interior_gap", "exterior_gap"], rows)

    # solver recovery on the annulus, G = z^2 + 1/z
    A = domains["annulus"]
    Gt = lambda z: z**2 + 1 / z
    z = 0.75 * np.exp(2j * np.pi * np.arange(10) / 10)
    rows = []
    for n in (32, 64, 128, 256):
        s = A.discretize(n)
        res = solve(NeumannProblem(A, neumann_data(s, lambda w: 2 * w - 1 / w**2)), s,
                    SolveOptions(n_test_points=0))
        rows.append([n, float(np.max(np.abs(res.G(z) - (Gt(z) - Gt(0.75)))))])
    save(out / "solve_annulus.csv", ["n", "recovery_error"], rows)

    # near-boundary Cauchy evaluation at shrinking distance from the unit circle
    D = domains["disc"]
    s = D.discretize(256)
    ev = CauchyEvaluator(D, s, laurent(s, {4: 1.0, -2: 1.0}))
    rows = []
    for eps in 10.0 ** -np.arange(1, 13):
        zi = (1 - eps) * np.exp(0.123j)
        ze = np.exp(0.123j) / (1 - eps)
        rows.append([float(eps), float(abs(ev(zi) - zi**4)), float(abs(ev(ze) + ze**-2))])
    save(out / "near_boundary.csv", ["distance", "interior_error", "exterior_error"], rows)


if __name__ == "__main__":
    main()
