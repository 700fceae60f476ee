"""Periodic trapezoid rule on closed curves, in arc length and complex line form."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functions import BoundaryFunction
from .geometry import BoundarySample, PlanarDomain


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    n_used: int


def csum(x) -> complex:
    """Correctly rounded complex sum, independent of summation order."""
    x = np.asarray(x, dtype=complex).ravel()
    return complex(math.fsum(x.real), math.fsum(x.imag))


def _values(values, j: int = 0) -> np.ndarray:
    if isinstance(values, BoundaryFunction):
        return values[j]
    return np.asarray(values, dtype=complex)


def _rule(terms: np.ndarray) -> tuple:
    """Full and half-resolution trapezoid sums of the weighted terms."""
    full = csum(terms)
    half = 2.0 * csum(terms[::2])
    return full, abs(full - half)


def integrate_ds(sample: BoundarySample, values) -> QuadratureResult:
    """``sum_k f(zeta_k) ds_k`` with a node-halving error estimate."""
    f = _values(values)
    if f.shape != (sample.n_nodes,):
        raise ValueError(f"{f.size} values for {sample.n_nodes} nodes")
    v, err = _rule(f * sample.ds_weights)
    return QuadratureResult(v, err, sample.n_nodes)


def component_integral_dz(sample: BoundarySample, values, as_hole: bool = False) -> QuadratureResult:
    """``oint f d zeta`` over one component in its stored direction (negated for holes)."""
    f = _values(values)
    if f.shape != (sample.n_nodes,):
        raise ValueError(f"{f.size} values for {sample.n_nodes} nodes")
    v, err = _rule(f * sample.dz_weights)
    return QuadratureResult(-v if as_hole else v, err, sample.n_nodes)


def integrate_dz(domain: PlanarDomain, samples, values) -> QuadratureResult:
    """``oint_{bD} f d zeta`` over the positively oriented boundary of ``domain``."""
    if len(samples) != domain.connectivity:
        raise ValueError("one sample per boundary component required")
    if isinstance(values, BoundaryFunction):
        values = values.values
    if len(values) != len(samples):
        raise ValueError("one value set per boundary component required")
    parts = [component_integral_dz(s, values[j], domain.is_hole(j))
             for j, s in enumerate(samples)]
    value = csum([p.value for p in parts])
    return QuadratureResult(value, float(sum(p.error_estimate for p in parts)),
                            sum(p.n_used for p in parts))


def integrate_ds_domain(domain: PlanarDomain, samples, values) -> QuadratureResult:
    """``oint_{bD} f d sigma`` summed over all components."""
    if isinstance(values, BoundaryFunction):
        values = values.values
    parts = [integrate_ds(s, values[j]) for j, s in enumerate(samples)]
    return QuadratureResult(csum([p.value for p in parts]),
                            float(sum(p.error_estimate for p in parts)),
                            sum(p.n_used for p in parts))
