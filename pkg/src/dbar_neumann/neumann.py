"""End-to-end solver for the Neumann problem ``dG/dn = g`` with ``G`` holomorphic.

Pipeline: the trace ``h = i conj(T) g`` of ``G'`` is extended into the
domain by the Cauchy integral ``F = C_D h``, and ``G(z)`` is the integral of
``F`` from the base point along a polyline.  Polylines are routed through a
waypoint graph whose vertices sit on a coarse interior grid and whose edges
keep a fixed clearance from the boundary, so the homotopy class of every
path is determined by the graph's shortest-path tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .cauchy import CauchyEvaluator, cauchy_boundary_limits, extrapolate_to_zero
from .functions import BoundaryFunction
from .geometry import TWO_PI, PlanarDomain, inward_normals, spectral_derivative
from .hardy import NON_MEMBER, MembershipVerdict, classify
from .quadrature import csum, integrate_ds_domain


class PathError(RuntimeError):
    """No admissible polyline between the base point and a target."""


class AdmissibilityError(ValueError):
    """Data classified as non-member and solving was not forced."""


def data_to_trace(domain: PlanarDomain, samples, g: BoundaryFunction) -> BoundaryFunction:
    """Trace of ``G'`` from Neumann data: ``h = i conj(T) g``."""
    g.check(samples)
    return BoundaryFunction(tuple(1j * np.conj(s.boundary_tangents) * g[j]
                                  for j, s in enumerate(samples)))


def trace_to_data(domain: PlanarDomain, samples, h: BoundaryFunction) -> BoundaryFunction:
    """Neumann data from the trace of ``G'``: ``g = -i T h``."""
    h.check(samples)
    return BoundaryFunction(tuple(-1j * s.boundary_tangents * h[j] for j, s in enumerate(samples)))


@dataclass(frozen=True)
class NeumannProblem:
    domain: PlanarDomain
    g: BoundaryFunction
    p_label: float = 2.0

    def __post_init__(self):
        if not 1 <= self.p_label < np.inf:
            raise ValueError("p_label must lie in [1, inf)")

    def compatibility(self, samples) -> float:
        """``|oint g d sigma| / (||g||_p * length)``; zero data gives 0."""
        norm = self.g.norm(samples, self.p_label, normalized=True)
        length = sum(float(np.sum(s.ds_weights)) for s in samples)
        val = abs(integrate_ds_domain(self.domain, samples, self.g).value)
        return val / (norm * length) if norm > 0 else val


@dataclass(frozen=True)
class SolveOptions:
    grid_size: int = 24            # grid cells across the domain diameter
    grid_offset: tuple = (0.5, 0.5)  # grid shift in cell units
    clearance: float = 2.0         # minimum boundary distance of edges, in node spacings
    gl_points: int = 16
    force: bool = False
    check_admissibility: bool = True
    tol: float = 1e-8
    residual_stride: int = 8
    residual_levels: int = 8
    n_test_points: int = 10


@dataclass(frozen=True)
class ResidualReport:
    sup_residual: float
    l2_residual: float
    nodes_tested: int
    max_extrapolation_residual: float = 0.0


# ---------------------------------------------------------------------------
# paths

class WaypointPaths:
    """Antiderivatives ``int_alpha^z F(w) dw`` along waypoint polylines.

    ``F`` must accept arrays of interior points.  Segments are integrated
    with ``gl_points``-point Gauss-Legendre and bisected until the
    boundary distance along a segment exceeds its length.
    """

    def __init__(self, domain: PlanarDomain, samples, F: Callable, alpha=None,
                 grid_size: int = 24, grid_offset=(0.5, 0.5), clearance: float = 2.0,
                 gl_points: int = 16):
        self.domain = domain
        self.samples = samples
        self.F = F
        self.alpha = complex(domain.base_point if alpha is None else alpha)
        self.h = max(float(np.max(s.spacing)) for s in samples)
        # coarse samples would otherwise leave no room for the graph
        self.c = min(clearance * self.h, 0.05 * domain.diameter)
        self.gl = np.polynomial.legendre.leggauss(gl_points)
        cloud = []
        for s in samples:
            t = TWO_PI * np.arange(8 * s.n_nodes) / (8 * s.n_nodes)
            cloud.append(np.asarray(s.curve.gamma(t), dtype=complex))
        cloud = np.concatenate(cloud)
        self._cloud = cloud
        self._btree = cKDTree(np.column_stack([cloud.real, cloud.imag]))
        self.spacing = domain.diameter / grid_size
        self._build_graph(grid_offset)

    # geometry helpers
    def dist(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self._btree.query(np.column_stack([z.real, z.imag]))[0]

    def _interior(self, z) -> np.ndarray:
        """Winding test, valid for points at least a node spacing from the boundary."""
        z = np.atleast_1d(z)
        total = np.zeros(z.shape, dtype=complex)
        for j, s in enumerate(self.samples):
            w = self.domain.orientation_sign(j) * s.dz_weights
            total += np.sum(w[None, :] / (s.nodes[None, :] - z[:, None]), axis=1)
        return np.round((total / (2j * np.pi)).real) == 1

    def clear(self, a: complex, b: complex, c: float | None = None) -> bool:
        """True when sampled boundary distances along ``[a, b]`` all exceed ``c``."""
        c = self.c if c is None else c
        m = max(2, int(np.ceil(abs(b - a) / (0.25 * c))) + 1)
        return bool(np.min(self.dist(a + (b - a) * np.linspace(0, 1, m))) >= c)

    def _build_graph(self, offset):
        outer = self.samples[-1].nodes
        s = self.spacing
        x0, y0 = outer.real.min() + offset[0] * s, outer.imag.min() + offset[1] * s
        nx = int((outer.real.max() - x0) / s) + 1
        ny = int((outer.imag.max() - y0) / s) + 1
        ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        pts = (x0 + ii * s) + 1j * (y0 + jj * s)
        keep = self.dist(pts.ravel()).reshape(pts.shape) > self.c
        keep[keep] = self._interior(pts[keep])
        index = -np.ones(pts.shape, dtype=int)
        index[keep] = np.arange(int(keep.sum()))
        nodes = list(pts[keep])
        rows, cols, lens = [], [], []
        for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
            for i, j in zip(*np.nonzero(keep)):
                i2, j2 = i + di, j + dj
                if 0 <= i2 < nx and 0 <= j2 < ny and keep[i2, j2]:
                    a, b = index[i, j], index[i2, j2]
                    if self.clear(nodes[a], nodes[b]):
                        rows.append(a)
                        cols.append(b)
                        lens.append(abs(nodes[b] - nodes[a]))
        # the base point joins as the last vertex
        root = len(nodes)
        start = self._retreat(self.alpha)
        nodes.append(start)
        for a in self._visible(start, np.arange(root), np.array(nodes[:root])):
            rows.append(root)
            cols.append(a)
            lens.append(abs(nodes[a] - start))
        self.nodes = np.array(nodes)
        self.root = root
        n = len(nodes)
        graph = coo_matrix((lens, (rows, cols)), shape=(n, n)).tocsr()
        self.distances, self.pred = dijkstra(graph, directed=False, indices=root,
                                             return_predecessors=True)
        if not np.isfinite(self.distances[:root]).any():
            raise PathError("base point cannot reach the waypoint graph")
        self._reachable = np.flatnonzero(np.isfinite(self.distances[:root]))
        self._ntree = cKDTree(np.column_stack([self.nodes[self._reachable].real,
                                               self.nodes[self._reachable].imag]))
        # G at the vertices, accumulated along the shortest-path tree
        order = np.argsort(self.distances)
        order = order[np.isfinite(self.distances[order])]
        vals = self.integrate([[self.nodes[self.pred[v]], self.nodes[v]] for v in order[1:]])
        G = np.full(n, np.nan, dtype=complex)
        G[root] = self.integrate([[self.alpha, start]])[0]
        for v, val in zip(order[1:], vals):
            G[v] = G[self.pred[v]] + val
        self.G_nodes = G

    def _visible(self, z, candidates, cpts, c=None) -> list:
        out = []
        d = np.abs(cpts - z)
        for k in np.argsort(d)[:24]:
            if d[k] <= 3 * self.spacing and self.clear(z, cpts[k], c):
                out.append(int(candidates[k]))
        return out

    def _retreat(self, z: complex) -> complex:
        """Move ``z`` away from the boundary until it has the graph clearance."""
        d = float(self.dist(z)[0])
        if d <= 0:
            raise PathError(f"{z} lies on the boundary")
        if d >= 1.5 * self.c:
            return z
        k = self._btree.query([z.real, z.imag])[1]
        u = (z - self._cloud[k]) / d
        z1 = z + (1.5 * self.c - d) * u
        if self.dist(z1)[0] < self.c or not self._interior(np.array([z1]))[0]:
            raise PathError(f"cannot retreat from {z} into the domain")
        return z1

    # quadrature
    def integrate(self, jobs) -> np.ndarray:
        """``int F dw`` over each job, a polyline given as a list of points.

        All segments are graded together: a segment is bisected until the
        boundary distance along it (sampled at 9 points, minus the
        Lipschitz slack ``L/16``) exceeds its length ``L``.
        """
        A, B, O = [], [], []
        for i, chain in enumerate(jobs):
            for a, b in zip(chain[:-1], chain[1:]):
                if a != b:
                    A.append(a)
                    B.append(b)
                    O.append(i)
        out = np.zeros(len(jobs), dtype=complex)
        if not A:
            return out
        A, B, O = np.array(A, dtype=complex), np.array(B, dtype=complex), np.array(O)
        x, w = self.gl
        s9 = np.linspace(0, 1, 9)
        pts, wts, own = [], [], []
        for depth in range(61):
            L = np.abs(B - A)
            cl = self.dist((A[:, None] + (B - A)[:, None] * s9).ravel()).reshape(-1, 9).min(axis=1)
            ok = (cl - L / 16 > L) | (depth == 60)
            pts.append((0.5 * (A[ok] + B[ok]))[:, None] + (0.5 * (B[ok] - A[ok]))[:, None] * x)
            wts.append((0.5 * (B[ok] - A[ok]))[:, None] * w)
            own.append(np.repeat(O[ok], x.size))
            if ok.all():
                break
            A, B, O = A[~ok], B[~ok], O[~ok]
            M = 0.5 * (A + B)
            A, B, O = np.concatenate([A, M]), np.concatenate([M, B]), np.concatenate([O, O])
        pts = np.concatenate([p.ravel() for p in pts])
        wts = np.concatenate([q.ravel() for q in wts])
        own = np.concatenate(own)
        terms = self.F(pts) * wts
        order = np.argsort(own, kind="stable")
        bounds = np.searchsorted(own[order], np.arange(len(jobs) + 1))
        for i in range(len(jobs)):
            out[i] = csum(terms[order[bounds[i]:bounds[i + 1]]])
        return out

    # paths to targets
    def route(self, z: complex) -> tuple:
        """Shortest admissible route to ``z``.

        Returns ``(chain, vertex, tail)``: the full polyline from ``alpha``,
        the last graph vertex on it, and the polyline from that vertex on.
        """
        z = complex(z)
        z1 = self._retreat(z)
        cand = self._reachable
        near = self._ntree.query_ball_point([z1.real, z1.imag], 3 * self.spacing)
        near = cand[np.array(sorted(near), dtype=int)]
        tot = self.distances[near] + np.abs(self.nodes[near] - z1)
        best = None
        for v in near[np.argsort(tot, kind="stable")]:
            if self.clear(z1, self.nodes[v]):
                best = v
                break
        if best is None:
            raise PathError(f"no waypoint visible from {z}")
        head = []
        v = best
        while v >= 0:
            head.append(complex(self.nodes[v]))
            v = self.pred[v]
        head = head[::-1]
        if head[0] != self.alpha:
            head.insert(0, self.alpha)
        tail = [complex(self.nodes[best]), z1] + ([z] if z1 != z else [])
        return head + tail[1:], int(best), tail

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        zs = np.atleast_1d(z).ravel()
        base, tails = [], []
        for zz in zs:
            if zz == self.alpha:
                base.append(0.0)
                tails.append([zz])
                continue
            _, v, tail = self.route(zz)
            base.append(self.G_nodes[v])
            tails.append(tail)
        vals = np.asarray(base, dtype=complex) + self.integrate(tails)
        return vals.reshape(shape)

    def polyline_integral(self, chain) -> complex:
        """``int F dw`` along an explicit polyline, segment by segment."""
        return complex(self.integrate([list(chain)])[0])

    def perturbed(self, chain, shift: float = 0.35) -> list | None:
        """Copy of ``chain`` with one interior waypoint moved by ``shift`` grid cells."""
        inner = list(range(1, len(chain) - 1))
        if not inner:
            return None
        mid = inner[len(inner) // 2]
        for ang in np.arange(8) * np.pi / 4 + np.pi / 8:
            w = chain[mid] + shift * self.spacing * np.exp(1j * ang)
            a, b = chain[mid - 1], chain[mid + 1]
            ca = min(self.c, 0.5 * float(self.dist(a)[0]))
            cb = min(self.c, 0.5 * float(self.dist(b)[0]))
            if self.dist(w)[0] > self.c and self.clear(a, w, ca) and self.clear(w, b, cb):
                return chain[:mid] + [w] + chain[mid + 1:]
        return None


# ---------------------------------------------------------------------------
# solver

@dataclass
class SolveResult:
    G: Callable
    residual_report: ResidualReport
    path_consistency: float
    admissibility: MembershipVerdict | None
    F: Callable = None
    paths: WaypointPaths = None
    test_points: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=complex))

    def row(self, problem_id: str, n_nodes: int) -> dict:
        return {"problem_id": problem_id, "n_nodes": n_nodes,
                "sup_residual": self.residual_report.sup_residual,
                "l2_residual": self.residual_report.l2_residual,
                "path_consistency": self.path_consistency,
                "admissibility_verdict": self.admissibility.verdict if self.admissibility else ""}


def default_test_points(paths: WaypointPaths, count: int = 10) -> np.ndarray:
    """``count`` reachable waypoints spread over the graph, farthest first."""
    cand = paths._reachable
    order = cand[np.argsort(-paths.distances[cand], kind="stable")]
    picks = order[np.linspace(0, order.size - 1, min(count, order.size)).astype(int)]
    return paths.nodes[picks] + 0.25 * paths.spacing * np.exp(0.7j)  # off-grid


def trace_limit_report(ev: CauchyEvaluator, h: BoundaryFunction, stride: int = 8,
                       levels: int = 8) -> ResidualReport:
    """Compare the nontangential limits of ``F = C_D h`` with ``h`` at every ``stride``-th node."""
    sup, l2, tested, rmax = 0.0, 0.0, 0, 0.0
    for j, s in enumerate(ev.samples):
        idx = np.arange(0, s.n_nodes, stride)
        lim, res = cauchy_boundary_limits(ev, j, idx, "interior", levels)
        r = np.abs(lim - h[j][idx])  # |T| = 1, so this equals |-iT F - g|
        sup = max(sup, float(np.max(r)))
        l2 += float(np.sum(r**2 * s.ds_weights[idx] * stride))
        rmax = max(rmax, float(np.max(res)))
        tested += idx.size
    return ResidualReport(sup, float(np.sqrt(l2)), tested, rmax)


def solve(problem: NeumannProblem, samples, options: SolveOptions | None = None,
          test_points=None) -> SolveResult:
    """Solve ``dG/dn = g`` with ``G(alpha) = 0``.

    Admissibility is checked first; a ``non_member`` verdict raises
    :class:`AdmissibilityError` unless ``options.force`` is set.
    """
    opt = options or SolveOptions()
    domain, g = problem.domain, problem.g
    g.check(samples)
    verdict = None
    if opt.check_admissibility:
        verdict = classify(domain, samples, g, p=problem.p_label)
        if verdict.verdict == NON_MEMBER and not opt.force:
            raise AdmissibilityError(f"data is not admissible (worst {verdict.worst})")
    h = data_to_trace(domain, samples, g)
    ev = CauchyEvaluator(domain, samples, h)

    def F(z):
        return ev(z, side="interior")

    paths = WaypointPaths(domain, samples, F, domain.base_point, opt.grid_size, opt.grid_offset,
                          opt.clearance, opt.gl_points)

    def G(z):
        z = np.asarray(z, dtype=complex)
        if np.any(ev.sides(z) != 1):
            raise PathError("G is evaluated at interior points only")
        out = paths(z)
        return complex(out) if out.ndim == 0 else out

    report = trace_limit_report(ev, h, opt.residual_stride, opt.residual_levels)
    tp = (default_test_points(paths, opt.n_test_points) if test_points is None
          else np.atleast_1d(np.asarray(test_points, dtype=complex)))
    consistency = 0.0
    for z in tp:
        chain, _, _ = paths.route(z)
        other = paths.perturbed(chain)
        if other is None:
            continue
        consistency = max(consistency, abs(paths.polyline_integral(chain)
                                           - paths.polyline_integral(other)))
    return SolveResult(G, report, consistency, verdict, F, paths, tp)


# ---------------------------------------------------------------------------
# a posteriori checks

def residual_check(domain: PlanarDomain, samples, G_eval: Callable, g: BoundaryFunction,
                   stride: int = 8, levels: int = 5, depth: float | None = None) -> ResidualReport:
    """Residual of ``dG/dn = g`` with ``G'`` obtained by differentiating ``G``.

    At depths ``d 2^-i`` along the inward normal of every ``stride``-th node,
    ``G'`` is the mean of Richardson-extrapolated central differences along the
    normal and the tangent (step ``d/4``); the values are extrapolated to the
    boundary and compared with ``g`` through ``-i T G'``.
    """
    g.check(samples)
    pts, meta = [], []
    for j, s in enumerate(samples):
        idx = np.arange(0, s.n_nodes, stride)
        nu = inward_normals(domain, j, s)[idx]
        T = s.boundary_tangents[idx]
        d0 = depth if depth is not None else min(8 * float(np.max(s.spacing)),
                                                 0.05 * domain.diameter, 0.05 * s.curve.diameter)
        dep = d0 * 0.5 ** np.arange(levels)
        for k, n_k, t_k in zip(idx, nu, T):
            z = s.nodes[k] + dep * n_k
            for u in (n_k, t_k):
                for e in (dep / 4, dep / 8):
                    pts.append(z + e * u)
                    pts.append(z - e * u)
            meta.append((j, k, n_k, t_k, dep))
    pts = np.array(pts).reshape(len(meta), 2, 2, 2, levels)
    vals = np.asarray(G_eval(pts.ravel()), dtype=complex).reshape(pts.shape)
    sup, l2, rmax = 0.0, 0.0, 0.0
    for (j, k, n_k, t_k, dep), v in zip(meta, vals):
        dG = []
        for a, u in enumerate((n_k, t_k)):
            D1 = (v[a, 0, 0] - v[a, 0, 1]) / (2 * (dep / 4) * u)
            D2 = (v[a, 1, 0] - v[a, 1, 1]) / (2 * (dep / 8) * u)
            dG.append((4 * D2 - D1) / 3)
        val, res = extrapolate_to_zero(dep, 0.5 * (dG[0] + dG[1]))
        s = samples[j]
        r = abs(-1j * s.boundary_tangents[k] * val - g[j][k])
        sup = max(sup, r)
        l2 += r**2 * s.ds_weights[k] * stride
        rmax = max(rmax, res)
    return ResidualReport(float(sup), float(np.sqrt(l2)), len(meta), float(rmax))


def hole_loop(paths: WaypointPaths, hole: int, n: int = 256, offset: float | None = None):
    """Counterclockwise loop around hole component ``hole``, pushed into the domain.

    Returns nodes and ``dz`` weights of the periodic trapezoid rule.
    """
    domain = paths.domain
    if not domain.is_hole(hole):
        raise ValueError(f"component {hole} is not a hole")
    curve = domain.components[hole]
    t = TWO_PI * np.arange(n) / n
    z = np.asarray(curve.gamma(t), dtype=complex)
    dz = np.asarray(curve.dgamma(t), dtype=complex)
    nu = -1j * dz / np.abs(dz)  # outward from the hole, i.e. into the domain
    if offset is None:
        others = np.concatenate([s.nodes for i, s in enumerate(paths.samples) if i != hole])
        gap = float(np.min(np.abs(z[:, None] - others[None, :])))
        offset = min(0.5 * gap, 0.5 * curve.diameter)
    loop = z + offset * nu
    dloop = spectral_derivative(loop)
    return loop, dloop * (TWO_PI / n)


def hole_period(result: SolveResult, hole: int = 0, n: int = 256) -> complex:
    """``oint F dz`` around a hole; nonzero exactly when ``G`` is multivalued."""
    loop, w = hole_loop(result.paths, hole, n)
    return csum(result.F(loop) * w)


def winding_paths(result: SolveResult, z: complex, hole: int = 0, n: int = 256) -> dict:
    """``G(z)`` along the waypoint route and along the same route followed by one
    counterclockwise turn around ``hole`` (joined to ``z`` by a straight spur)."""
    paths = result.paths
    chain, _, _ = paths.route(z)
    direct = paths.polyline_integral(chain)
    loop, w = hole_loop(paths, hole, n)
    k = int(np.argmin(np.abs(loop - z)))
    loop = np.roll(loop, -k)
    w = np.roll(w, -k)
    if not paths.clear(z, loop[0], min(paths.c, 0.5 * float(paths.dist(z)[0]))):
        raise PathError("spur to the hole loop leaves the domain")
    spur = paths.polyline_integral([z, loop[0]])
    around = csum(result.F(loop) * w)
    back = paths.polyline_integral([loop[0], z])
    wound = direct + spur + around + back
    return {"direct": direct, "wound": wound, "difference": wound - direct}
