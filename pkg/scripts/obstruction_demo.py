#!/usr/bin/env python3
"""The topological obstruction on the annulus 1/2 < |z| < 1.

Admissible data from G'(z) = 2z - 1/z^2 solve with a single-valued G; adding
t * T/zeta makes the data inadmissible, and the hole period of G' grows
linearly in t (it equals -2 pi t).
"""
import numpy as np

from dbar_neumann.functions import neumann_data, tangent_times
from dbar_neumann.geometry import annulus
from dbar_neumann.hardy import classify
from dbar_neumann.neumann import NeumannProblem, SolveOptions, hole_period, solve


def main():
    A = annulus(0.5, 1.0, 0.75)
    s = A.discretize(256)
    g0 = neumann_data(s, lambda z: 2 * z - 1 / z**2)
    bump = tangent_times(s, lambda z: 1 / z)
    print(f"{'t':>6} {'verdict':>12} {'period':>28}")
    for t in (0.0, 1e-9, 1e-6, 1e-3, 0.5, 1.0):
        g = g0 + t * bump
        v = classify(A, s, g)
        res = solve(NeumannProblem(A, g), s, SolveOptions(force=True, n_test_points=0))
        per = hole_period(res)
        print(f"{t:6.0e} {v.verdict:>12} {per.real:+.6e}{per.imag:+.6e}j")


if __name__ == "__main__":
    main()
