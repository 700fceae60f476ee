"""Complex boundary data sampled on the nodes of a discretized domain."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import BoundarySample

# closed-form boundary data: fn(zeta, T, t, j) -> values on component j, where T is
# the unit tangent of the positively oriented domain boundary
BoundaryFn = Callable[[np.ndarray, np.ndarray, np.ndarray, int], np.ndarray]


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """Per-component node values, optionally backed by a closed form.

    ``values[j]`` holds the samples on component ``j`` at the nodes of the
    matching :class:`BoundarySample`.  When ``fn`` is present the function
    can be re-sampled at another resolution with :meth:`resample`.
    """

    values: tuple
    fn: BoundaryFn | None = None

    def __post_init__(self):
        vals = tuple(np.asarray(v, dtype=complex) for v in self.values)
        for v in vals:
            v.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_fn(cls, samples: Sequence[BoundarySample], fn: BoundaryFn) -> "BoundaryFunction":
        vals = []
        for j, s in enumerate(samples):
            v = np.asarray(fn(s.nodes, s.boundary_tangents, s.t, j), dtype=complex)
            vals.append(np.broadcast_to(v, s.nodes.shape).copy())
        return cls(tuple(vals), fn)

    @classmethod
    def zeros(cls, samples) -> "BoundaryFunction":
        return cls.from_fn(samples, lambda z, T, t, j: np.zeros_like(z))

    def resample(self, samples) -> "BoundaryFunction":
        if self.fn is None:
            raise ValueError("no closed form available for resampling")
        return BoundaryFunction.from_fn(samples, self.fn)

    def check(self, samples) -> None:
        if len(samples) != len(self.values):
            raise ValueError(f"{len(self.values)} value sets for {len(samples)} components")
        for s, v in zip(samples, self.values):
            if v.shape != (s.n_nodes,):
                raise ValueError(f"{v.size} values for {s.n_nodes} nodes")

    @property
    def n_components(self) -> int:
        return len(self.values)

    def __getitem__(self, j) -> np.ndarray:
        return self.values[j]

    def map(self, op) -> "BoundaryFunction":
        """Apply ``op(values, j)`` componentwise (closed form is dropped)."""
        return BoundaryFunction(tuple(op(v, j) for j, v in enumerate(self.values)))

    def __add__(self, other):
        if isinstance(other, BoundaryFunction):
            fn = None
            if self.fn is not None and other.fn is not None:
                f1, f2 = self.fn, other.fn
                fn = lambda z, T, t, j: f1(z, T, t, j) + f2(z, T, t, j)
            return BoundaryFunction(tuple(a + b for a, b in zip(self.values, other.values)), fn)
        return NotImplemented

    def __mul__(self, c):
        c = complex(c)
        fn = None
        if self.fn is not None:
            f1 = self.fn
            fn = lambda z, T, t, j: c * f1(z, T, t, j)
        return BoundaryFunction(tuple(c * v for v in self.values), fn)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other

    def norm(self, samples, p: float = 2.0, normalized: bool = False) -> float:
        """``L^p(d sigma)`` norm; ``normalized`` divides the measure by total length."""
        num = sum(np.sum(np.abs(v) ** p * s.ds_weights) for s, v in zip(samples, self.values))
        if normalized:
            num /= sum(np.sum(s.ds_weights) for s in samples)
        return float(num ** (1.0 / p))


# ---------------------------------------------------------------------------
# builders

def laurent(samples, terms: dict, center: complex = 0.0) -> BoundaryFunction:
    """``sum_p c_p (zeta - center)**p`` for integer powers ``p``."""
    terms = {int(p): complex(c) for p, c in terms.items()}
    center = complex(center)

    def fn(z, T, t, j):
        w = z - center
        return sum(c * w ** float(p) if p < 0 else c * w ** p for p, c in terms.items()) + 0 * z

    return BoundaryFunction.from_fn(samples, fn)


def conj_power(samples, k: int, coeff: complex = 1.0) -> BoundaryFunction:
    return BoundaryFunction.from_fn(samples, lambda z, T, t, j: coeff * np.conj(z) ** k)


def trig(samples, coeffs: dict) -> BoundaryFunction:
    """``sum_k c_k exp(i k t)`` in the curve parameter ``t``."""
    coeffs = {int(k): complex(c) for k, c in coeffs.items()}
    return BoundaryFunction.from_fn(
        samples, lambda z, T, t, j: sum(c * np.exp(1j * k * t) for k, c in coeffs.items()) + 0 * z)


def random_trig_coeffs(rng: np.random.Generator, degree: int, min_freq: int | None = None) -> dict:
    """Random complex coefficients for frequencies ``-degree..degree`` (or ``min_freq..degree``)."""
    lo = -degree if min_freq is None else min_freq
    ks = range(lo, degree + 1)
    vals = rng.standard_normal(len(ks)) + 1j * rng.standard_normal(len(ks))
    return {k: complex(v) for k, v in zip(ks, vals)}


def holomorphic_trace(samples, F: Callable) -> BoundaryFunction:
    return BoundaryFunction.from_fn(samples, lambda z, T, t, j: F(z))


def neumann_data(samples, dG: Callable) -> BoundaryFunction:
    """Neumann data ``g = -i T dG(zeta)`` of a function with derivative ``dG``."""
    return BoundaryFunction.from_fn(samples, lambda z, T, t, j: -1j * T * dG(z))


def tangent_times(samples, F: Callable) -> BoundaryFunction:
    """``T(zeta) * F(zeta)``."""
    return BoundaryFunction.from_fn(samples, lambda z, T, t, j: T * F(z))
