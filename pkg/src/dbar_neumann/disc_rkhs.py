"""The solution space on the unit disc as a reproducing kernel Hilbert space.

Functions vanishing at ``alpha`` with ``F'`` in the Hardy space ``H^2``
carry the inner product ``<F, G> = oint F'(zeta) conj(G'(zeta)) d sigma``.
The orthonormal basis ``(z^k - alpha^k) / (sqrt(2 pi) k)`` gives the kernel

    K(w, z) = sum_k (w^k - alpha^k) conj(z^k - alpha^k) / (2 pi k^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cauchy import extrapolate_to_zero
from .functions import BoundaryFunction
from .geometry import circle, sample
from .quadrature import csum

DEFAULT_TERMS = 500


@dataclass(frozen=True)
class KernelSeries:
    alpha: complex = 0.0
    n_terms: int = DEFAULT_TERMS

    def __post_init__(self):
        if abs(self.alpha) >= 1:
            raise ValueError("alpha must lie in the open unit disc")
        if self.n_terms < 1:
            raise ValueError("need at least one kernel term")

    @property
    def truncation_bound(self) -> float:
        """Bound ``2/(pi K)`` on the neglected tail, valid on the closed disc."""
        return 2.0 / (np.pi * self.n_terms)

    def _ks(self):
        return np.arange(1, self.n_terms + 1)


def _powers(z, ks):
    """``z[..., None] ** ks`` for consecutive nonnegative integer ``ks``, by cumulative products."""
    z = np.asarray(z, dtype=complex)
    lo, hi = int(ks[0]), int(ks[-1])
    table = np.cumprod(np.broadcast_to(z[..., None], z.shape + (hi,)), axis=-1)
    table = np.concatenate([np.ones(z.shape + (1,), dtype=complex), table], axis=-1)
    return table[..., lo:hi + 1]


def kernel_eval(ks: KernelSeries, w, z):
    """Partial sum of the kernel; ``w``, ``z`` broadcast against each other."""
    w, z = np.broadcast_arrays(np.asarray(w, dtype=complex), np.asarray(z, dtype=complex))
    if np.any(np.abs(w) > 1 + 1e-12) or np.any(np.abs(z) > 1 + 1e-12):
        raise ValueError("kernel arguments must lie in the closed unit disc")
    k = ks._ks()
    a = _powers(ks.alpha, k)  # same rounding as the argument powers, so w = alpha gives exact zeros
    terms = (_powers(w, k) - a) * np.conj(_powers(z, k) - a) / (2 * np.pi * k**2)
    # sum smallest terms first
    out = np.sum(terms[..., ::-1], axis=-1)
    return complex(out) if out.ndim == 0 else out


def kernel_prime_boundary(ks: KernelSeries, z, zeta):
    """``d/dw K(w, z)`` at boundary points ``zeta`` (term-wise differentiated series)."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(np.abs(zeta) - 1) > 1e-12):
        raise ValueError("zeta must be unimodular")
    if abs(z) >= 1:
        raise ValueError("z must lie in the open unit disc")
    k = ks._ks()
    coef = np.conj(_powers(z, k) - _powers(ks.alpha, k)) / (2 * np.pi * k)
    out = np.sum((_powers(zeta, k - 1) * coef)[..., ::-1], axis=-1)
    return complex(out) if out.ndim == 0 else out


def kernel_prime_closed_form(z, zeta):
    """Closed form for ``alpha = 0``: ``conj(K') = Log(1/(1 - z conj(zeta))) / (2 pi conj(zeta))``."""
    zeta = np.asarray(zeta, dtype=complex)
    cz = np.conj(zeta)
    return np.conj(-np.log(1 - z * cz) / (2 * np.pi * cz))


def unit_circle_sample(n: int = 512):
    return sample(circle(0.0, 1.0, "unit"), n)


def _check_unit(s):
    if np.max(np.abs(np.abs(s.nodes) - 1)) > 1e-13:
        raise ValueError("sample must discretize the unit circle")


def gram_matrix(size: int = 16, n: int = 512, alpha: complex = 0.0) -> np.ndarray:
    """Gram matrix of the first ``size`` basis elements, by boundary quadrature."""
    s = unit_circle_sample(n)
    k = np.arange(1, size + 1)
    # derivative of (z^k - alpha^k)/(sqrt(2 pi) k) is z^(k-1)/sqrt(2 pi)
    d = s.nodes[None, :] ** (k[:, None] - 1) / np.sqrt(2 * np.pi)
    G = np.empty((size, size), dtype=complex)
    for i in range(size):
        for j in range(size):
            G[i, j] = csum(d[i] * np.conj(d[j]) * s.ds_weights)
    return G


def reproduce(ks: KernelSeries, dF: Callable, z, n: int = 512, F: Callable | None = None):
    """``oint F'(zeta) conj(K'_z(zeta)) d sigma``; recovers ``F(z)`` when ``F(alpha) = 0``."""
    if F is not None and abs(F(np.array([ks.alpha]))[0]) > 1e-12:
        raise ValueError("F must vanish at alpha")
    s = unit_circle_sample(n)
    trace = dF(s.nodes) * s.ds_weights
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.array([csum(trace * np.conj(kernel_prime_boundary(ks, zz, s.nodes))) for zz in zs])
    return complex(out[0]) if np.ndim(z) == 0 else out


def solve_disc_log(s, g: BoundaryFunction, z):
    """Neumann solution on the unit disc with ``G(0) = 0``:
    ``G(z) = (1/2 pi) oint g(zeta) Log(1/(1 - z conj(zeta))) d sigma``."""
    _check_unit(s)
    gv = g[0] if isinstance(g, BoundaryFunction) else np.asarray(g)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(zs) >= 1):
        raise ValueError("z must lie in the open unit disc")
    w = gv * s.ds_weights
    out = np.array([csum(w * -np.log(1 - zz * np.conj(s.nodes))) for zz in zs]) / (2 * np.pi)
    return complex(out[0]) if np.ndim(z) == 0 else out


def solve_disc_kernel(ks: KernelSeries, s, g: BoundaryFunction, z):
    """Neumann solution with ``G(alpha) = 0`` via ``i oint g conj(T K'_z) d sigma``."""
    _check_unit(s)
    gv = g[0] if isinstance(g, BoundaryFunction) else np.asarray(g)
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(zs) >= 1):
        raise ValueError("z must lie in the open unit disc")
    T = s.boundary_tangents
    w = gv * s.ds_weights
    out = np.array([1j * csum(w * np.conj(T * kernel_prime_boundary(ks, zz, s.nodes)))
                    for zz in zs])
    return complex(out[0]) if np.ndim(z) == 0 else out


@dataclass(frozen=True)
class NormReport:
    p: float
    hardy_sobolev_norm: float  # ||F'||_{L^p(d sigma)} on the circle
    dirichlet_norm: float      # (area integral of |F'|^p)^(1/p)
    bergman_norm: float        # (area integral of |F|^p)^(1/p)
    boundary_norm: float       # ||F||_{L^p(d sigma)}
    dirichlet_ratio: float
    bergman_ratio: float
    area_error_estimate: float
    finite: bool


def area_integral(h: Callable, n_radial: int = 64, n_angle: int = 256, eps_schedule=None) -> tuple:
    """``int_D h dV`` on the unit disc: Gauss-Legendre in ``r``, trapezoid in angle.

    Without ``eps_schedule`` the radial rule runs over the open interval
    ``(0, 1)``; with it the radii are capped at ``1 - eps`` and the results
    extrapolated to ``eps = 0``.  Returns ``(value, error_estimate)``.
    """
    def integral(rmax, nr):
        x, wr = np.polynomial.legendre.leggauss(nr)
        r = 0.5 * rmax * (x + 1)
        wr = 0.5 * rmax * wr
        th = 2 * np.pi * np.arange(n_angle) / n_angle
        vals = h(r[:, None] * np.exp(1j * th)[None, :])
        return float(np.sum(np.sum(vals, axis=1) * (2 * np.pi / n_angle) * r * wr))

    def extrapolated(nr):
        if eps_schedule is None:
            return integral(1.0, nr)
        eps = np.asarray(eps_schedule, dtype=float)
        v, _ = extrapolate_to_zero(eps, [integral(1 - e, nr) for e in eps])
        return v.real

    fine = extrapolated(n_radial)
    coarse = extrapolated(max(n_radial // 2, 2))
    return fine, abs(fine - coarse)


def norms(F: Callable, dF: Callable, p: float = 2.0, n: int = 512, n_radial: int = 64,
          n_angle: int = 256, eps_schedule=None) -> NormReport:
    """Boundary Hardy-Sobolev, Dirichlet and Bergman norms of ``F`` on the unit disc."""
    if not 1 <= p < np.inf:
        raise ValueError("p must be finite and >= 1")
    s = unit_circle_sample(n)
    hs = csum(np.abs(dF(s.nodes)) ** p * s.ds_weights).real ** (1 / p)
    bnd = csum(np.abs(F(s.nodes)) ** p * s.ds_weights).real ** (1 / p)
    dv, de = area_integral(lambda z: np.abs(dF(z)) ** p, n_radial, n_angle, eps_schedule)
    bv, be = area_integral(lambda z: np.abs(F(z)) ** p, n_radial, n_angle, eps_schedule)
    dn, bn = max(dv, 0.0) ** (1 / p), max(bv, 0.0) ** (1 / p)
    finite = all(np.isfinite(v) for v in (hs, bnd, dv, bv))
    return NormReport(p, hs, dn, bn, bnd,
                      dn / hs if hs > 0 else 0.0, bn / bnd if bnd > 0 else 0.0,
                      max(de, be), finite)
