"""Polynomial conformal maps of the unit disc and Neumann data built from them.

``phi(w) = sum a_m w^m`` maps the unit disc onto a simply connected domain
(univalence is the caller's responsibility and is only spot-checked); its
inverse ``psi`` is evaluated by Newton's method.
"""
from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.spatial import cKDTree

from .functions import BoundaryFunction
from .geometry import PlanarDomain, polynomial_domain


class NewtonError(RuntimeError):
    pass


class ConformalPair:
    """``phi`` on the closed unit disc together with its inverse ``psi``.

    The inverse is seeded from a table of ``phi`` values on a polar grid
    (boundary correspondence plus interior rings) and refined by Newton
    iteration, at most ``max_iter`` steps, stopping below ``step_tol``.
    """

    def __init__(self, coefficients, table_angles: int = 512, table_radii: int = 24,
                 max_iter: int = 50, step_tol: float = 1e-13):
        self.coefficients = np.asarray(coefficients, dtype=complex)
        if self.coefficients.size < 2 or self.coefficients[1] == 0:
            raise ValueError("phi needs a nonzero linear coefficient")
        self.dcoefficients = P.polyder(self.coefficients)
        self.alpha = complex(self.coefficients[0])
        self.max_iter = max_iter
        self.step_tol = step_tol
        r = np.linspace(0.0, 1.0, table_radii + 1)[1:]
        ang = 2 * np.pi * np.arange(table_angles) / table_angles
        w = (r[:, None] * np.exp(1j * ang)[None, :]).ravel()
        w = np.concatenate([[0.0], w])
        dw = self.dphi(w)
        if np.min(np.abs(dw)) < 1e-12:
            raise ValueError("phi' vanishes on the closed disc")
        self._table_w = w
        z = self.phi(w)
        self._tree = cKDTree(np.column_stack([z.real, z.imag]))

    def phi(self, w):
        return P.polyval(np.asarray(w, dtype=complex), self.coefficients)

    def dphi(self, w):
        return P.polyval(np.asarray(w, dtype=complex), self.dcoefficients)

    def psi(self, z):
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = np.atleast_1d(z).ravel()
        _, idx = self._tree.query(np.column_stack([z.real, z.imag]))
        w = self._table_w[idx].copy()
        active = np.ones(z.shape, dtype=bool)
        for _ in range(self.max_iter):
            step = (self.phi(w[active]) - z[active]) / self.dphi(w[active])
            w[active] -= step
            done = np.abs(step) < self.step_tol
            active[np.flatnonzero(active)[done]] = False
            if not active.any():
                break
        else:
            resid = np.abs(self.phi(w) - z)
            if np.max(resid) > 1e-10:
                raise NewtonError(f"Newton did not converge (residual {np.max(resid):.2e})")
        return w.reshape(shape)

    def dpsi(self, z):
        return 1.0 / self.dphi(self.psi(z))

    def domain(self) -> PlanarDomain:
        return polynomial_domain(self.coefficients)

    def unimodular_factor(self, z) -> np.ndarray:
        """``conj(psi')/|psi'|`` at boundary points; equals ``phi'(psi)/|phi'(psi)|``."""
        d = self.dphi(self.psi(z))
        return d / np.abs(d)


def tangent_via_psi(pair: ConformalPair, sample) -> np.ndarray:
    """Unit tangents ``i (conj(psi')/|psi'|) psi`` at the sample nodes."""
    z = sample.nodes
    return 1j * pair.unimodular_factor(z) * pair.psi(z)


def neumann_data_factory(pair: ConformalPair, samples, F: Callable) -> BoundaryFunction:
    """Admissible Neumann data ``(conj(psi')/|psi'|) F`` for holomorphic ``F`` with ``F(alpha) = 0``."""
    if abs(F(np.array([pair.alpha]))[0]) > 1e-12:
        raise ValueError("F must vanish at alpha = phi(0)")
    return BoundaryFunction.from_fn(samples, lambda z, T, t, j: pair.unimodular_factor(z) * F(z))


def transported(pair: ConformalPair, samples, coeffs: dict) -> BoundaryFunction:
    """``(conj(psi')/|psi'|) sum_m c_m psi^m``; equals ``sum_m c_m zeta^m`` on the unit disc.

    Admissible exactly when only powers ``m >= 1`` occur.
    """
    coeffs = {int(m): complex(c) for m, c in coeffs.items()}

    def fn(z, T, t, j):
        w = pair.psi(z)
        return pair.unimodular_factor(z) * sum(c * w ** float(m) for m, c in coeffs.items())

    return BoundaryFunction.from_fn(samples, fn)
