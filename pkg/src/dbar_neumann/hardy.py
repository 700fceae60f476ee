"""Membership tests for boundary traces of holomorphic functions and for Neumann data.

Every test returns a :class:`MembershipVerdict` built from normalized
residuals.  Thresholds: a residual at most ``tol`` is compatible with
membership, anything above ``10 * tol`` is a violation, and the decade in
between is reported as inconclusive.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cauchy import CauchyEvaluator
from .functions import BoundaryFunction
from .geometry import PlanarDomain, inward_normals, locate
from .quadrature import component_integral_dz, csum, integrate_ds_domain

MEMBER_TOL = 1e-8
DEFAULT_MAX_DEGREE = 32

MEMBER, NON_MEMBER, INCONCLUSIVE = "member", "non_member", "inconclusive"


@dataclass
class MembershipVerdict:
    verdict: str
    diagnostics: dict
    tolerance_used: float
    test_name: str = ""
    raw: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    max_degree: int | None = None

    @property
    def worst(self) -> tuple:
        if not self.diagnostics:
            return ("", 0.0)
        name = max(self.diagnostics, key=lambda k: self.diagnostics[k])
        return name, self.diagnostics[name]

    def row(self, function_id: str) -> dict:
        name, value = self.worst
        return {"function_id": function_id, "test_name": self.test_name, "verdict": self.verdict,
                "worst_diagnostic_name": name, "worst_value": value,
                "tolerance": self.tolerance_used}


def decide(diagnostics: dict, tol: float) -> str:
    values = list(diagnostics.values())
    if all(v <= tol for v in values):
        return MEMBER
    if any(v > 10 * tol for v in values):
        return NON_MEMBER
    return INCONCLUSIVE


def _verdict(test_name, diagnostics, tol, **kw) -> MembershipVerdict:
    return MembershipVerdict(decide(diagnostics, tol), diagnostics, tol, test_name, **kw)


def _require_simply_connected(domain: PlanarDomain, name: str):
    if not domain.is_simply_connected:
        raise ValueError(f"{name} needs a simply connected domain; use neumann_test_multi")


def _moments(domain, samples, f, max_degree, measure, p, tol, name):
    _require_simply_connected(domain, name)
    if max_degree < 8:
        raise ValueError("max_degree must be at least 8")
    f.check(samples)
    s = samples[0]
    vals = f[0]
    weights = s.ds_weights if measure == "ds" else s.dz_weights
    length = float(np.sum(s.ds_weights))
    rho = float(np.max(np.abs(s.nodes)))
    norm = f.norm(samples, p)
    diag, raw = {}, {}
    zk = np.ones_like(s.nodes)
    for k in range(max_degree + 1):
        m = csum(zk * vals * weights)
        raw[f"moment_{k}"] = m
        scale = norm * length * rho**k
        diag[f"moment_{k}"] = abs(m) / scale if scale > 0 else abs(m)
        zk = zk * s.nodes
    return _verdict(name, diag, tol, raw=raw, max_degree=max_degree)


def moment_test(domain: PlanarDomain, samples, f: BoundaryFunction,
                max_degree: int = DEFAULT_MAX_DEGREE, tol: float = MEMBER_TOL,
                p: float = 2.0) -> MembershipVerdict:
    """Neumann data test by vanishing arc-length moments ``oint zeta^k f d sigma``, ``k <= max_degree``.

    Residuals are normalized by ``||f||_p * length * (max |zeta|)^k``.
    Only finitely many moments are checked, so ``member`` means
    "no violation up to ``max_degree``".
    """
    return _moments(domain, samples, f, max_degree, "ds", p, tol, "moment_test")


def smirnov_hp_test(domain: PlanarDomain, samples, g: BoundaryFunction,
                    max_degree: int = DEFAULT_MAX_DEGREE, tol: float = MEMBER_TOL,
                    p: float = 2.0) -> MembershipVerdict:
    """Hardy trace test by vanishing complex moments ``oint zeta^k g d zeta``."""
    return _moments(domain, samples, g, max_degree, "dz", p, tol, "smirnov_hp_test")


def conj_tangent(samples, g: BoundaryFunction) -> BoundaryFunction:
    """``conj(T) * g`` componentwise, ``T`` the positively oriented unit tangent."""
    return BoundaryFunction(tuple(np.conj(s.boundary_tangents) * g[j]
                                  for j, s in enumerate(samples)))


def default_probes(domain: PlanarDomain, samples, count: int = 16) -> np.ndarray:
    """Exterior probe points: a far circle, a near shell outside the outer
    curve, and for each hole a shrunken copy plus a shell just inside it."""
    outer = samples[-1]
    c = domain.outer.centroid
    R = float(np.max(np.abs(outer.nodes - c)))
    ang = 2 * np.pi * np.arange(count) / count
    pts = [c + 1.5 * R * np.exp(1j * ang)]
    idx = (np.arange(count) * outer.n_nodes) // count
    nu = inward_normals(domain, domain.connectivity - 1, outer)[idx]
    pts.append(outer.nodes[idx] - 0.1 * domain.diameter * nu)
    for j, hole in enumerate(domain.holes):
        s = samples[j]
        idx = (np.arange(count) * s.n_nodes) // count
        hc = hole.centroid
        pts.append(hc + 0.5 * (s.nodes[idx] - hc))
        nu = inward_normals(domain, j, s)[idx]
        pts.append(s.nodes[idx] - 0.1 * hole.diameter * nu)
    pts = np.concatenate(pts)
    return np.array([z for z in pts if locate(domain, z) == "exterior"])


def exterior_vanishing_test(domain: PlanarDomain, samples, g: BoundaryFunction, probe_points=None,
                            variant: str = "neumann", tol: float = MEMBER_TOL,
                            p: float = 2.0) -> MembershipVerdict:
    """Test via vanishing of the Cauchy integral on the complement of the closed domain.

    ``variant="neumann"`` applies the test to ``conj(T) g`` (Neumann data
    space); ``variant="hardy"`` to ``g`` itself (Hardy trace space).
    Diagnostics are ``|C f(z)|`` at each probe divided by the
    length-normalized ``L^p`` norm of ``g``.
    """
    if variant not in ("neumann", "hardy"):
        raise ValueError(f"unknown variant {variant!r}")
    g.check(samples)
    if probe_points is None:
        probes = default_probes(domain, samples)
    else:
        probes = np.atleast_1d(np.asarray(probe_points, dtype=complex))
        bad = [z for z in probes if locate(domain, z) != "exterior"]
        if bad:
            raise ValueError(f"probe points not exterior: {bad}")
    f = conj_tangent(samples, g) if variant == "neumann" else g
    vals = CauchyEvaluator(domain, samples, f)(probes, side="exterior")
    norm = g.norm(samples, p, normalized=True)
    diag = {f"probe_{i}": float(abs(v) / norm if norm > 0 else abs(v)) for i, v in enumerate(vals)}
    raw = {f"probe_{i}": complex(v) for i, v in enumerate(vals)}
    notes = []
    if variant == "neumann" and p <= 1:
        notes.append("outside proven range")
    name = "exterior_vanishing_test" + ("" if variant == "neumann" else "_hardy")
    return _verdict(name, diag, tol, raw=raw, notes=notes,
                    checks={"probes": probes})


def _periods(domain, samples, F: BoundaryFunction, p):
    norm = F.norm(samples, p, normalized=True)
    diag, raw = {}, {}
    for j in range(domain.connectivity - 1):
        s = samples[j]
        per = component_integral_dz(s, F[j], as_hole=True).value
        raw[f"period_{j}"] = per
        scale = norm * float(np.sum(s.ds_weights))
        diag[f"period_{j}"] = abs(per) / scale if scale > 0 else abs(per)
    return diag, raw


def antiderivative_period_test(domain: PlanarDomain, samples, F_trace: BoundaryFunction,
                               tol: float = MEMBER_TOL, p: float = 2.0) -> MembershipVerdict:
    """Single-valued antiderivative test: periods of ``F`` over the hole curves vanish.

    Only the ``N - 1`` hole periods are tested; the outer period then
    follows from Cauchy's theorem, whose full-boundary sum is reported in
    ``checks``.
    """
    F_trace.check(samples)
    if domain.is_simply_connected:
        return _verdict("antiderivative_period_test", {}, tol, notes=["degenerate: simply connected"])
    diag, raw = _periods(domain, samples, F_trace, p)
    full = csum([component_integral_dz(s, F_trace[j], domain.is_hole(j)).value
                 for j, s in enumerate(samples)])
    return _verdict("antiderivative_period_test", diag, tol, raw=raw,
                    checks={"boundary_sum": full})


def neumann_test_multi(domain: PlanarDomain, samples, g: BoundaryFunction,
                       max_degree: int = DEFAULT_MAX_DEGREE, tol: float = MEMBER_TOL,
                       p: float = 2.0) -> MembershipVerdict:
    """Neumann data test on a possibly multiply connected domain.

    ``g`` is admissible iff ``f = conj(T) g`` is a Hardy trace (exterior
    Cauchy integral vanishes outside the outer curve and inside every hole)
    and the periods of ``f`` over the hole curves vanish.  The
    compatibility integral ``oint g d sigma`` is tested as well.  Simply
    connected domains are delegated to :func:`moment_test`.
    """
    if domain.is_simply_connected:
        return moment_test(domain, samples, g, max_degree, tol, p)
    g.check(samples)
    f = conj_tangent(samples, g)
    ext = exterior_vanishing_test(domain, samples, f, variant="hardy", tol=tol, p=p)
    gnorm = g.norm(samples, p, normalized=True)
    fnorm = f.norm(samples, p, normalized=True)
    diag = {k: v * fnorm / gnorm if gnorm > 0 else v for k, v in ext.diagnostics.items()}
    raw = dict(ext.raw)
    pdiag, praw = _periods(domain, samples, f, p)
    diag.update(pdiag)
    raw.update(praw)
    length = sum(float(np.sum(s.ds_weights)) for s in samples)
    comp = integrate_ds_domain(domain, samples, g).value
    raw["compatibility"] = comp
    diag["compatibility"] = abs(comp) / (gnorm * length) if gnorm > 0 else abs(comp)
    return _verdict("neumann_test_multi", diag, tol, raw=raw, notes=ext.notes)


def classify(domain: PlanarDomain, samples, g: BoundaryFunction, **kw) -> MembershipVerdict:
    """Neumann data classification with the natural test for the domain's connectivity."""
    return neumann_test_multi(domain, samples, g, **kw)
