"""Cauchy integrals off the boundary, the principal-value transform on it,
nontangential boundary limits and the Plemelj jump check.

Off-curve evaluation uses the trapezoid rule directly when the target is
at least ``NEAR_FACTOR`` node spacings from the boundary.  Closer targets
are handled by refining the nearest component spectrally (the node values
are interpolated by FFT) and subtracting the linear Taylor polynomial of
the density at the nearest fine node; ``oint_{bD} p(zeta)/(zeta - z) dzeta``
is known exactly for a polynomial ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .functions import BoundaryFunction
from .geometry import (TWO_PI, ApproachError, BoundarySample, PlanarDomain, fourier_upsample,
                       inward_normals, locate, spectral_derivative)

NEAR_FACTOR = 5.0
MAX_UPSAMPLE = 128
CHUNK = 2**22  # max matrix entries per vectorized block


class SideError(ValueError):
    """Evaluation point on the wrong side of (or on) the boundary."""


@dataclass(frozen=True)
class PlemeljReport:
    max_interior_gap: float
    max_exterior_gap: float
    nodes_tested: int
    max_jump_gap: float = 0.0
    max_extrapolation_residual: float = 0.0


@dataclass(frozen=True)
class BoundaryLimit:
    value: complex
    residual: float
    converged: bool


class _Component:
    """Node data of one boundary component at some resolution, orientation applied.

    ``df`` and ``d2f`` are the first two complex derivatives of ``f`` along the
    curve.  Parameter derivatives ``ft``, ``ftt`` can be passed in (upsampled
    from a coarser grid) to avoid differentiating interpolated data twice.
    """

    def __init__(self, curve, n, sign, f_values, ft=None, ftt=None):
        t = TWO_PI * np.arange(n) / n
        self.nodes = np.asarray(curve.gamma(t), dtype=complex)
        dg = np.asarray(curve.dgamma(t), dtype=complex)
        self.w = sign * (TWO_PI / n) * dg
        self.f = f_values
        self.ft = spectral_derivative(f_values) if ft is None else ft
        self.ftt = spectral_derivative(self.ft) if ftt is None else ftt
        self.df = self.ft / dg
        self.d2f = (self.ftt - self.df * spectral_derivative(dg)) / dg**2
        self.spacing = (TWO_PI / n) * np.abs(dg)
        self.sum_w = np.sum(self.w)
        self.sum_zw = np.sum(self.nodes * self.w)


class CauchyEvaluator:
    """Vectorized ``C f(z) = (1/2 pi i) oint_{bD} f(zeta)/(zeta - z) dzeta``.

    Works on both sides of the boundary; the side of every target is
    determined geometrically unless supplied.
    """

    def __init__(self, domain: PlanarDomain, samples, f: BoundaryFunction,
                 near_factor: float = NEAR_FACTOR, max_upsample: int = MAX_UPSAMPLE):
        f.check(samples)
        self.domain = domain
        self.samples = samples
        self.near_factor = near_factor
        self.max_upsample = max_upsample
        self._coarse = [_Component(s.curve, s.n_nodes, domain.orientation_sign(j), f[j])
                        for j, s in enumerate(samples)]
        self._fine = {}
        nodes = np.concatenate([s.nodes for s in samples])
        self._tree = cKDTree(np.column_stack([nodes.real, nodes.imag]))
        self._comp = np.concatenate([np.full(s.n_nodes, j) for j, s in enumerate(samples)])
        self._spacing = np.concatenate([c.spacing for c in self._coarse])
        self._offset = np.concatenate([[0], np.cumsum([s.n_nodes for s in samples])])

    def fine(self, j: int, m: int) -> _Component:
        key = (j, m)
        if key not in self._fine:
            s = self.samples[j]
            c = self._coarse[j]
            self._fine[key] = _Component(s.curve, s.n_nodes * m, self.domain.orientation_sign(j),
                                         fourier_upsample(c.f, m), fourier_upsample(c.ft, m),
                                         fourier_upsample(c.ftt, m))
        return self._fine[key]

    def nearest(self, z: np.ndarray, local: bool = False):
        d, idx = self._tree.query(np.column_stack([z.real, z.imag]))
        if local:
            return d, self._comp[idx], self._spacing[idx], idx - self._offset[self._comp[idx]]
        return d, self._comp[idx], self._spacing[idx]

    def _fine_nearest(self, fc, z, k_coarse, m):
        """Nearest fine node, searched within two coarse spacings of the nearest coarse node."""
        n = fc.nodes.size
        win = (k_coarse[:, None] * m + np.arange(-2 * m, 2 * m + 1)[None, :]) % n
        d = np.abs(fc.nodes[win] - z[:, None])
        return win[np.arange(z.size), np.argmin(d, axis=1)]

    def sides(self, z) -> np.ndarray:
        """+1 interior, -1 exterior, 0 on the boundary (within roundoff)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d, comp, h, kc = self.nearest(z, local=True)
        out = np.zeros(z.shape, dtype=int)
        far = d >= h
        if np.any(far):
            zf = z[far]
            # signed windings: 1 inside the outer curve, cancelled by -1 inside a hole
            total = np.round(np.real(self._plain(zf, self._coarse, ones=True))).astype(int)
            out[far] = np.where(total == 1, 1, -1)
        for j in np.unique(comp[~far]):
            sel = np.flatnonzero((~far) & (comp == j))
            fc = self.fine(int(j), 8)
            zz = z[sel]
            k = self._fine_nearest(fc, zz, kc[sel], 8)
            # foot point on the curve: Gauss-Newton on Re((gamma(t) - z) conj gamma'(t)) = 0
            curve, sgn = self.samples[j].curve, self.domain.orientation_sign(int(j))
            tk = TWO_PI * k / fc.nodes.size
            for _ in range(6):
                g, dg = curve.gamma(tk), curve.dgamma(tk)
                tk = tk - np.real((g - zz) * np.conj(dg)) / np.abs(dg) ** 2
            g, dg = curve.gamma(tk), curve.dgamma(tk)
            nu = sgn * 1j * dg / np.abs(dg)  # inward normal
            side = np.real((zz - g) * np.conj(nu))
            tol = 1e-13 * self.domain.diameter
            out[sel] = np.where(side > tol, 1, np.where(side < -tol, -1, 0))
        return out

    def _plain(self, z, comps, ones=False, poly=None):
        """(1/2 pi i) sum over ``comps`` of (f - p(zeta)) w / (zeta - z).

        With ``p(zeta) = f0 + f1 (zeta - z0) + f2 (zeta - z0)^2`` the sum
        splits into products with ``A = 1/(zeta - z)``, using
        ``(zeta - z0)/(zeta - z) = 1 + (z - z0) A`` and
        ``(zeta - z0)^2/(zeta - z) = (zeta - z0) + (z - z0) + (z - z0)^2 A``.
        """
        total = np.zeros(z.shape, dtype=complex)
        for c in comps:
            fw = c.w if ones else c.f * c.w
            step = max(1, CHUNK // max(c.nodes.size, 1))
            for a in range(0, z.size, step):
                zz = z[a:a + step]
                A = 1.0 / (c.nodes[None, :] - zz[:, None])
                val = A @ fw
                if poly is not None and not ones:
                    f0, f1, f2, z0 = (q[a:a + step] for q in poly)
                    aw = A @ c.w
                    dz = zz - z0
                    val = (val - f0 * aw - f1 * (c.sum_w + dz * aw)
                           - f2 * (c.sum_zw - z0 * c.sum_w + dz * c.sum_w + dz**2 * aw))
                total[a:a + step] += val
        return total / (2j * np.pi)

    def __call__(self, z, side=None) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = np.atleast_1d(z).ravel()
        if side is None:
            sides = self.sides(z)
        elif isinstance(side, str):
            sides = np.full(z.shape, 1 if side == "interior" else -1)
        else:
            sides = np.asarray(side).ravel()
        if np.any(sides == 0):
            raise SideError("evaluation point on the boundary")
        out = np.empty(z.shape, dtype=complex)
        d, comp, h, kc = self.nearest(z, local=True)
        far = d >= self.near_factor * h
        if np.any(far):
            out[far] = self._plain(z[far], self._coarse)
        if np.any(~far):
            ratio = self.near_factor * h[~far] / np.maximum(d[~far], 1e-300)
            m = 2 ** np.ceil(np.log2(np.maximum(ratio, 2.0)))
            m = np.minimum(m, self.max_upsample).astype(int)
            near_idx = np.flatnonzero(~far)
            for j in np.unique(comp[near_idx]):
                for mm in np.unique(m[comp[near_idx] == j]):
                    sel = near_idx[(comp[near_idx] == j) & (m == mm)]
                    out[sel] = self._near(z[sel], sides[sel], int(j), int(mm), kc[sel])
        return out.reshape(shape)

    def _near(self, z, sides, j, m, k_coarse):
        fc = self.fine(j, m)
        k = self._fine_nearest(fc, z, k_coarse, m)
        z0, f0, f1, f2 = fc.nodes[k], fc.f[k], fc.df[k], 0.5 * fc.d2f[k]
        comps = [fc if i == j else c for i, c in enumerate(self._coarse)]
        val = self._plain(z, comps, poly=(f0, f1, f2, z0))
        dz = z - z0
        return val + np.where(sides > 0, f0 + f1 * dz + f2 * dz**2, 0.0)


def cauchy_interior(domain: PlanarDomain, samples, f: BoundaryFunction, z):
    """Cauchy integral of ``f`` at interior point(s) ``z``."""
    ev = CauchyEvaluator(domain, samples, f)
    if np.any(ev.sides(z) != 1):
        raise SideError("cauchy_interior needs interior points")
    out = ev(z, side="interior")
    return complex(out) if np.ndim(z) == 0 else out


def cauchy_exterior(domain: PlanarDomain, samples, f: BoundaryFunction, z):
    """Cauchy integral of ``f`` at exterior point(s) ``z``."""
    ev = CauchyEvaluator(domain, samples, f)
    if np.any(ev.sides(z) != -1):
        raise SideError("cauchy_exterior needs exterior points")
    out = ev(z, side="exterior")
    return complex(out) if np.ndim(z) == 0 else out


def hilbert_cauchy(domain: PlanarDomain, samples, f: BoundaryFunction, component: int = -1,
                   node_index=None):
    """Principal-value transform ``HC f = (1/(pi i)) P.V. oint_{bD} f(zeta)/(zeta - w) dzeta``.

    Normalized so that the Plemelj relations read ``C_D f = (f + HC f)/2`` on
    the interior side and ``(-f + HC f)/2`` on the exterior side.  The
    diagonal term of the subtracted integrand is ``f'(zeta_j) w_j`` with
    ``f'`` from spectral differentiation.
    """
    f.check(samples)
    jc = component % len(samples)
    s = samples[jc]
    sign = domain.orientation_sign(jc)
    fj = f[jc]
    w = sign * s.dz_weights
    df = spectral_derivative(fj) / s.dgamma
    idx = np.arange(s.n_nodes) if node_index is None else np.atleast_1d(node_index)
    out = np.empty(idx.size, dtype=complex)
    for a in range(0, idx.size, 256):
        rows = idx[a:a + 256]
        diff = s.nodes[None, :] - s.nodes[rows, None]
        num = fj[None, :] - fj[rows, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = num * w[None, :] / diff
        terms[np.arange(rows.size), rows] = df[rows] * w[rows]
        own = np.sum(terms, axis=1)
        other = np.zeros(rows.size, dtype=complex)
        for i, si in enumerate(samples):
            if i == jc:
                continue
            wi = domain.orientation_sign(i) * si.dz_weights
            other += np.sum(f[i][None, :] * wi[None, :] / (si.nodes[None, :] - s.nodes[rows, None]),
                            axis=1)
        out[a:a + 256] = sign * fj[rows] + (own + other) / (1j * np.pi)
    return complex(out[0]) if np.ndim(node_index) == 0 and node_index is not None else out


# ---------------------------------------------------------------------------
# boundary limits

def extrapolate_to_zero(s, y) -> tuple:
    """Neville extrapolation of samples ``y(s_i)`` to ``s = 0``.

    Returns the value and the change caused by the smallest-``s`` sample.
    """
    s = np.asarray(s, dtype=float)
    p = np.array(y, dtype=complex)
    n = len(s)
    prev = p[0]
    for k in range(1, n):
        # p[i] <- interpolant through s[i-k .. i] evaluated at 0
        for i in range(n - 1, k - 1, -1):
            p[i] = (s[i] * p[i - 1] - s[i - k] * p[i]) / (s[i] - s[i - k])
        if k == n - 1:
            prev = p[n - 2]
    return complex(p[-1]), float(abs(p[-1] - prev))


def default_depth(domain: PlanarDomain, sample: BoundarySample, node_index: int) -> float:
    return float(min(5.0 * sample.spacing[node_index], 0.1 * sample.curve.diameter,
                     0.1 * domain.diameter))


def depth_schedule(depth: float, levels: int) -> np.ndarray:
    return depth * 0.5 ** np.arange(levels)


def normal_points(domain: PlanarDomain, samples, component: int, node_index, depths,
                  side: str = "interior") -> np.ndarray:
    """Points ``zeta_k +- d nu`` (array over nodes x depths); ``nu`` is the inward normal."""
    s = samples[component]
    nu = inward_normals(domain, component % len(samples), s)[node_index]
    sgn = 1.0 if side == "interior" else -1.0
    return s.nodes[node_index][..., None] + sgn * np.asarray(depths)[None, :] * np.atleast_1d(nu)[:, None]


def boundary_limit(domain: PlanarDomain, samples, F: Callable, component: int, node_index: int,
                   depth: float | None = None, levels: int = 8, tol: float = 1e-8,
                   side: str = "interior") -> BoundaryLimit:
    """Limit of ``F`` at ``zeta_k`` along the normal, by extrapolation over depths ``d 2^-i``.

    ``F`` must accept an array of points.  A residual above ``tol`` marks the
    result as not converged; the value is returned regardless.
    """
    component %= len(samples)
    s = samples[component]
    d = default_depth(domain, s, node_index) if depth is None else depth
    depths = depth_schedule(d, levels)
    pts = normal_points(domain, samples, component, np.array([node_index]), depths, side)[0]
    expect = "interior" if side == "interior" else "exterior"
    for p in pts:
        if locate(domain, p) != expect:
            raise ApproachError(f"approach point {p} is not {expect}")
    vals = np.asarray(F(pts), dtype=complex)
    value, res = extrapolate_to_zero(depths, vals)
    return BoundaryLimit(value, res, bool(res <= tol))


def cauchy_boundary_limits(ev: CauchyEvaluator, component: int, node_index, side: str,
                           levels: int = 8):
    """Nontangential limits of the Cauchy integral at several nodes at once."""
    domain, samples = ev.domain, ev.samples
    s = samples[component]
    node_index = np.atleast_1d(node_index)
    vals, res = [], []
    pts = []
    depths = []
    for k in node_index:
        dep = depth_schedule(default_depth(domain, s, k), levels)
        depths.append(dep)
        pts.append(normal_points(domain, samples, component, np.array([k]), dep, side)[0])
    pts = np.array(pts)
    F = ev(pts.ravel(), side=side).reshape(pts.shape)
    for dep, row in zip(depths, F):
        v, r = extrapolate_to_zero(dep, row)
        vals.append(v)
        res.append(r)
    return np.array(vals), np.array(res)


def plemelj_check(domain: PlanarDomain, samples, f: BoundaryFunction, stride: int = 8,
                  levels: int = 8) -> PlemeljReport:
    """Compare one-sided boundary limits of ``C f`` with ``(+-f + HC f)/2`` at every ``stride``-th node."""
    ev = CauchyEvaluator(domain, samples, f)
    gi = ge = gj = rmax = 0.0
    tested = 0
    for j, s in enumerate(samples):
        idx = np.arange(0, s.n_nodes, stride)
        hc = hilbert_cauchy(domain, samples, f, j, idx)
        lim_in, r_in = cauchy_boundary_limits(ev, j, idx, "interior", levels)
        lim_out, r_out = cauchy_boundary_limits(ev, j, idx, "exterior", levels)
        fj = f[j][idx]
        gi = max(gi, float(np.max(np.abs(lim_in - 0.5 * (fj + hc)))))
        ge = max(ge, float(np.max(np.abs(lim_out - 0.5 * (-fj + hc)))))
        gj = max(gj, float(np.max(np.abs(lim_in - lim_out - fj))))
        rmax = max(rmax, float(np.max(r_in)), float(np.max(r_out)))
        tested += idx.size
    return PlemeljReport(gi, ge, tested, gj, rmax)
