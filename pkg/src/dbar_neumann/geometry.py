"""Parametrized planar domains, boundary sampling and point location.

Every boundary component is a smooth closed curve ``gamma(t)``, ``t`` in
``[0, 2*pi)``.  A :class:`PlanarDomain` stores its components
counterclockwise, the outer curve last; the hole components enter
boundary integrals with a minus sign.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

TWO_PI = 2.0 * np.pi

# resolution used for construction-time checks (simplicity, orientation, diameter)
CHECK_NODES = 256


class GeometryError(ValueError):
    """Invalid curve or domain construction."""


class NearBoundaryError(ValueError):
    """A point is too close to a boundary node for the requested operation."""


class ApproachError(ValueError):
    """An approach point left the domain interior."""


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Smooth closed Jordan curve ``t -> gamma(t)`` with derivative ``dgamma``.

    ``orientation`` is derived from the signed area of the parametrization:
    ``"positive"`` for counterclockwise traversal.
    """

    gamma: Callable[[np.ndarray], np.ndarray]
    dgamma: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    params: dict = field(default_factory=dict)
    orientation: str = field(init=False)

    def __post_init__(self):
        t = np.linspace(0.0, TWO_PI, CHECK_NODES, endpoint=False)
        z = np.asarray(self.gamma(t), dtype=complex)
        dz = np.asarray(self.dgamma(t), dtype=complex)
        if z.shape != t.shape or dz.shape != t.shape:
            raise GeometryError("parametrization must be vectorized over t")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(dz))):
            raise GeometryError("non-finite curve values")
        if np.min(np.abs(dz)) == 0.0:
            raise GeometryError("irregular parametrization: gamma'(t) = 0")
        end = complex(self.gamma(np.array([TWO_PI]))[0])
        diam = _diameter(z)
        if abs(end - z[0]) > 1e-9 * diam:
            raise GeometryError("parametrization is not 2*pi-periodic")
        pairs = cKDTree(np.column_stack([z.real, z.imag])).query_pairs(1e-9 * diam)
        if pairs:
            raise GeometryError(f"curve {self.label!r} self-intersects at sampled nodes")
        area = 0.5 * np.sum((z.conj() * dz).imag) * TWO_PI / CHECK_NODES
        object.__setattr__(self, "orientation", "positive" if area > 0 else "negative")

    def reversed(self) -> "BoundaryCurve":
        g, dg = self.gamma, self.dgamma
        params = dict(self.params, reversed=not self.params.get("reversed", False))
        return BoundaryCurve(lambda t: g(-np.asarray(t)), lambda t: -dg(-np.asarray(t)),
                             self.label, params)

    def counterclockwise(self) -> "BoundaryCurve":
        return self if self.orientation == "positive" else self.reversed()

    @cached_property
    def diameter(self) -> float:
        t = np.linspace(0.0, TWO_PI, CHECK_NODES, endpoint=False)
        return _diameter(self.gamma(t))

    @cached_property
    def centroid(self) -> complex:
        t = np.linspace(0.0, TWO_PI, CHECK_NODES, endpoint=False)
        return complex(np.mean(self.gamma(t)))


def _diameter(z) -> float:
    z = np.asarray(z)
    return float(np.max(np.abs(z[:, None] - z[None, :])))


@dataclass(frozen=True, eq=False)
class BoundarySample:
    """Trapezoid discretization of one curve at ``t_k = 2*pi*k/n``."""

    curve: BoundaryCurve
    n_nodes: int
    t: np.ndarray
    nodes: np.ndarray
    dgamma: np.ndarray
    tangents: np.ndarray
    ds_weights: np.ndarray
    sign: float = 1.0  # -1 on hole components: orientation within the domain boundary

    @property
    def boundary_tangents(self) -> np.ndarray:
        """Unit tangent of the positively oriented domain boundary."""
        return self.sign * self.tangents

    @property
    def dz_weights(self) -> np.ndarray:
        return (TWO_PI / self.n_nodes) * self.dgamma

    @property
    def spacing(self) -> np.ndarray:
        return self.ds_weights


def sample(curve: BoundaryCurve, n: int, sign: float = 1.0) -> BoundarySample:
    if int(n) != n or n < 4 or n % 2:
        raise GeometryError(f"node count must be even and >= 4, got {n}")
    n = int(n)
    t = TWO_PI * np.arange(n) / n
    z = np.asarray(curve.gamma(t), dtype=complex)
    dz = np.asarray(curve.dgamma(t), dtype=complex)
    speed = np.abs(dz)
    if np.any(speed == 0.0):
        raise GeometryError("irregular parametrization: gamma'(t_k) = 0")
    for arr in (t, z, dz):
        arr.setflags(write=False)
    return BoundarySample(curve, n, t, z, dz, dz / speed, (TWO_PI / n) * speed, float(sign))


def winding_number(sampled: BoundarySample, z: complex) -> int:
    """Winding number of the sampled curve about ``z``.

    Raises :class:`NearBoundaryError` when ``z`` is within one local node
    spacing of a node, where the trapezoid sum is unreliable.
    """
    d = np.abs(sampled.nodes - z)
    k = int(np.argmin(d))
    if d[k] < sampled.spacing[k]:
        raise NearBoundaryError(f"{z} is within node spacing of the curve")
    w = np.sum(sampled.dz_weights / (sampled.nodes - z)) / (2j * np.pi)
    return int(round(w.real))


@dataclass(eq=False)
class PlanarDomain:
    """Bounded domain given by its boundary components, outer curve last.

    Components are normalized to counterclockwise parametrizations.  The
    base point ``alpha`` must lie inside the outer curve and outside every
    hole.
    """

    components: Sequence[BoundaryCurve]
    base_point: complex = 0.0
    label: str = ""

    def __post_init__(self):
        if not self.components:
            raise GeometryError("a domain needs at least one boundary component")
        self.components = tuple(c.counterclockwise() for c in self.components)
        self.base_point = complex(self.base_point)
        probe = [sample(c, CHECK_NODES) for c in self.components]
        for j, hole in enumerate(self.components[:-1]):
            pts = probe[j].nodes
            if any(winding_number(probe[-1], p) != 1 for p in pts[::8]):
                raise GeometryError(f"hole {j} is not inside the outer curve")
            for i in range(j):
                if any(winding_number(probe[i], p) != 0 for p in pts[::8]):
                    raise GeometryError(f"holes {i} and {j} overlap")
        try:
            inside = winding_number(probe[-1], self.base_point) == 1 and all(
                winding_number(s, self.base_point) == 0 for s in probe[:-1])
        except NearBoundaryError:
            inside = False
        if not inside:
            raise GeometryError(f"base point {self.base_point} is not in the domain")

    @property
    def connectivity(self) -> int:
        return len(self.components)

    @property
    def outer(self) -> BoundaryCurve:
        return self.components[-1]

    @property
    def holes(self) -> tuple:
        return self.components[:-1]

    @property
    def is_simply_connected(self) -> bool:
        return len(self.components) == 1

    def is_hole(self, j: int) -> bool:
        return j % len(self.components) != len(self.components) - 1

    def orientation_sign(self, j: int) -> float:
        return -1.0 if self.is_hole(j) else 1.0

    @property
    def diameter(self) -> float:
        return self.outer.diameter

    @cached_property
    def _check_samples(self):
        return self.discretize(CHECK_NODES)

    def discretize(self, n: int) -> list:
        """One :class:`BoundarySample` per component, all with ``n`` nodes."""
        return [sample(c, n, self.orientation_sign(j)) for j, c in enumerate(self.components)]


def contains(domain: PlanarDomain, z: complex, samples=None) -> str:
    """Classify ``z`` as ``"interior"``, ``"exterior"`` or ``"near_boundary"``."""
    samples = samples if samples is not None else domain._check_samples
    try:
        if winding_number(samples[-1], z) != 1:
            return "exterior"
        if any(winding_number(s, z) != 0 for s in samples[:-1]):
            return "exterior"
    except NearBoundaryError:
        return "near_boundary"
    return "interior"


def inward_normals(domain: PlanarDomain | None, j: int, sampled: BoundarySample) -> np.ndarray:
    """Unit normals pointing into the domain: ``i*T`` on the outer curve, ``-i*T`` on holes."""
    sign = -1.0 if (domain is not None and domain.is_hole(j)) else 1.0
    return sign * 1j * sampled.tangents


def component_index(domain: PlanarDomain, sampled: BoundarySample) -> int:
    for j, c in enumerate(domain.components):
        if c is sampled.curve:
            return j
    raise GeometryError("sample does not belong to this domain")


def approach_points(sampled: BoundarySample, node_index: int, depths,
                    domain: PlanarDomain | None = None) -> np.ndarray:
    """Points ``zeta_k + d*nu(zeta_k)`` along the inward normal ``nu``.

    ``depths`` must be positive, strictly decreasing and below
    ``0.2 * diameter`` of the curve.  Every returned point is checked to be
    interior.
    """
    depths = np.asarray(depths, dtype=float)
    if np.any(depths <= 0) or np.any(np.diff(depths) >= 0):
        raise ValueError("depths must be positive and strictly decreasing")
    if depths[0] >= 0.2 * sampled.curve.diameter:
        raise ValueError("depth exceeds 0.2 * curve diameter")
    j = component_index(domain, sampled) if domain is not None else 0
    nu = inward_normals(domain, j, sampled)[node_index]
    pts = sampled.nodes[node_index] + depths * nu
    for p in pts:
        if domain is not None:
            ok = locate(domain, p) == "interior"
        else:
            ok = _local_side(sampled, p, 1.0) > 0 and _safe_winding(sampled, p) in (1, None)
        if not ok:
            raise ApproachError(f"approach point {p} is not interior")
    return pts


def _safe_winding(sampled, z):
    try:
        return winding_number(sampled, z)
    except NearBoundaryError:
        return None


def closest_point(curve: BoundaryCurve, z: complex, t0: float, iters: int = 30) -> float:
    """Parameter of the point on ``curve`` nearest to ``z`` (Newton from ``t0``)."""
    t = float(t0)
    h = 1e-5
    for _ in range(iters):
        tt = np.array([t - h, t, t + h])
        g = curve.gamma(tt)
        d2 = np.abs(g - z) ** 2
        d1 = (d2[2] - d2[0]) / (2 * h)
        dd = (d2[2] - 2 * d2[1] + d2[0]) / h**2
        if dd <= 0:
            break
        step = d1 / dd
        t -= step
        if abs(step) < 1e-13:
            break
    return t


def _local_side(sampled: BoundarySample, z: complex, sign: float) -> float:
    k = int(np.argmin(np.abs(sampled.nodes - z)))
    t = closest_point(sampled.curve, z, sampled.t[k])
    g = complex(sampled.curve.gamma(np.array([t]))[0])
    dg = complex(sampled.curve.dgamma(np.array([t]))[0])
    nu = sign * 1j * dg / abs(dg)
    return float(((z - g) * np.conj(nu)).real)


def locate(domain: PlanarDomain, z: complex, samples=None) -> str:
    """Like :func:`contains`, but resolves near-boundary points.

    Near points are classified by the sign of their offset from the closest
    curve point along the inward normal.  Points on the curve (offset below
    ``1e-13 * diameter``) stay ``"near_boundary"``.
    """
    verdict = contains(domain, z, samples)
    if verdict != "near_boundary":
        return verdict
    best = None
    for j, s in enumerate(domain._check_samples):
        d = float(np.min(np.abs(s.nodes - z)))
        if best is None or d < best[0]:
            best = (d, j, s)
    _, j, s = best
    side = _local_side(s, z, domain.orientation_sign(j))
    if abs(side) < 1e-13 * domain.diameter:
        return "near_boundary"
    return "interior" if side > 0 else "exterior"


# ---------------------------------------------------------------------------
# curve library

def circle(center: complex = 0.0, radius: float = 1.0, label: str = "circle") -> BoundaryCurve:
    c, r = complex(center), float(radius)
    return BoundaryCurve(lambda t: c + r * np.exp(1j * np.asarray(t)),
                         lambda t: 1j * r * np.exp(1j * np.asarray(t)),
                         label, {"kind": "circle", "center": [c.real, c.imag], "radius": r})


def ellipse(a: float, b: float, center: complex = 0.0, label: str = "ellipse") -> BoundaryCurve:
    c = complex(center)
    return BoundaryCurve(lambda t: c + a * np.cos(t) + 1j * b * np.sin(t),
                         lambda t: -a * np.sin(t) + 1j * b * np.cos(t),
                         label, {"kind": "ellipse", "a": a, "b": b, "center": [c.real, c.imag]})


def perturbed_circle(center: complex = 0.0, radius: float = 1.0, coefficients=(),
                     label: str = "perturbed_circle") -> BoundaryCurve:
    """``r(t) = radius * (1 + sum_k a_k cos(kt) + b_k sin(kt))``; coefficients are ``(k, a_k, b_k)``."""
    c = complex(center)
    coeffs = [(int(k), float(a), float(b)) for k, a, b in coefficients]

    def rho(t):
        t = np.asarray(t, dtype=float)
        return 1.0 + sum(a * np.cos(k * t) + b * np.sin(k * t) for k, a, b in coeffs)

    def drho(t):
        t = np.asarray(t, dtype=float)
        return sum(k * (-a * np.sin(k * t) + b * np.cos(k * t)) for k, a, b in coeffs) + 0 * t

    return BoundaryCurve(lambda t: c + radius * rho(t) * np.exp(1j * np.asarray(t)),
                         lambda t: radius * (drho(t) + 1j * rho(t)) * np.exp(1j * np.asarray(t)),
                         label, {"kind": "perturbed_circle", "center": [c.real, c.imag],
                                 "radius": radius, "coefficients": [list(x) for x in coeffs]})


def polynomial_image(coefficients, label: str = "polynomial_image") -> BoundaryCurve:
    """Image of the unit circle under ``phi(w) = sum_m coefficients[m] * w**m``."""
    a = np.asarray(coefficients, dtype=complex)
    da = a[1:] * np.arange(1, len(a))

    def gamma(t):
        return np.polynomial.polynomial.polyval(np.exp(1j * np.asarray(t)), a)

    def dgamma(t):
        w = np.exp(1j * np.asarray(t))
        return 1j * w * np.polynomial.polynomial.polyval(w, da)

    return BoundaryCurve(gamma, dgamma, label,
                         {"kind": "polynomial_image",
                          "coefficients": [[c.real, c.imag] for c in a]})


def curve_from_params(params: dict) -> BoundaryCurve:
    """Rebuild a library curve from its ``params`` dictionary."""
    p = dict(params)
    kind = p.pop("kind")
    rev = p.pop("reversed", False)
    label = p.pop("label", kind)
    if "center" in p:
        cx, cy = p.pop("center")
        p["center"] = complex(cx, cy)
    if kind == "polynomial_image":
        p["coefficients"] = [complex(*c) if isinstance(c, (list, tuple)) else complex(c)
                             for c in p["coefficients"]]
    builders = {"circle": circle, "ellipse": ellipse,
                "perturbed_circle": perturbed_circle, "polynomial_image": polynomial_image}
    if kind not in builders:
        raise GeometryError(f"unknown curve kind {kind!r}")
    curve = builders[kind](label=label, **p)
    return curve.reversed() if rev else curve


def disc(center: complex = 0.0, radius: float = 1.0) -> PlanarDomain:
    return PlanarDomain([circle(center, radius, "outer")], base_point=center, label="disc")


def annulus(r_inner: float = 0.5, r_outer: float = 1.0, base_point=None) -> PlanarDomain:
    if base_point is None:
        base_point = 0.5 * (r_inner + r_outer)
    return PlanarDomain([circle(0.0, r_inner, "inner"), circle(0.0, r_outer, "outer")],
                        base_point=base_point, label="annulus")


def polynomial_domain(coefficients) -> PlanarDomain:
    """Simply connected domain bounded by ``phi(unit circle)``; base point ``phi(0)``."""
    curve = polynomial_image(coefficients, "outer")
    return PlanarDomain([curve], base_point=complex(coefficients[0]), label="polynomial_image")


# ---------------------------------------------------------------------------
# trigonometric interpolation on equispaced nodes

def fourier_upsample(values: np.ndarray, factor: int) -> np.ndarray:
    """Trigonometric interpolant of equispaced periodic samples at ``factor`` times the nodes."""
    values = np.asarray(values, dtype=complex)
    n = values.size
    if factor == 1:
        return values.copy()
    c = np.fft.fft(values)
    m = n * factor
    out = np.zeros(m, dtype=complex)
    h = n // 2
    out[:h] = c[:h]
    out[m - h + 1:] = c[h + 1:]
    # split the Nyquist mode symmetrically
    out[h] = 0.5 * c[h]
    out[m - h] = 0.5 * c[h]
    return np.fft.ifft(out) * factor


def spectral_derivative(values: np.ndarray) -> np.ndarray:
    """``d/dt`` of the trigonometric interpolant, Nyquist mode dropped."""
    values = np.asarray(values, dtype=complex)
    n = values.size
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(values))
