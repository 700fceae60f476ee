"""Builders and runners behind the scenario CLI.

Each runner takes a validated experiment entry and returns an
:class:`ExperimentResult` with a CSV header, rows and a pass flag.  The
runners are also usable directly from scripts and tests.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cauchy, disc_rkhs, hardy, neumann
from .config import ConfigError, DomainSpec, Tolerances, parse_complex
from .conformal import ConformalPair, neumann_data_factory, transported
from .functions import (BoundaryFunction, conj_power, laurent, neumann_data, random_trig_coeffs,
                        tangent_times, trig)
from .geometry import (PlanarDomain, annulus, curve_from_params, disc, ellipse, locate,
                       perturbed_circle)


@dataclass
class ExperimentResult:
    header: list
    rows: list
    passed: bool
    summary: dict = field(default_factory=dict)


@dataclass
class Scene:
    """A built domain, plus its conformal map when it has one."""
    domain: PlanarDomain
    pair: ConformalPair | None = None


# ---------------------------------------------------------------------------
# domains

def _cx(v, default=0.0, where="value"):
    return complex(default) if v is None else parse_complex(v, where)


def build_domain(spec: DomainSpec) -> Scene:
    k = spec.kind
    if k == "disc":
        d = disc(_cx(spec.center), 1.0 if spec.radius is None else spec.radius)
        if spec.base_point is not None:
            d = PlanarDomain(d.components, _cx(spec.base_point), "disc")
        return Scene(d)
    if k == "annulus":
        bp = None if spec.base_point is None else _cx(spec.base_point)
        return Scene(annulus(spec.r_inner or 0.5, spec.r_outer or 1.0, bp))
    if k == "ellipse":
        if spec.a is None or spec.b is None:
            raise ConfigError("ellipse needs a and b")
        c = _cx(spec.center)
        return Scene(PlanarDomain([ellipse(spec.a, spec.b, c, "outer")],
                                  _cx(spec.base_point, c), "ellipse"))
    if k == "perturbed_circle":
        c = _cx(spec.center)
        curve = perturbed_circle(c, spec.radius or 1.0, spec.coefficients or [], "outer")
        return Scene(PlanarDomain([curve], _cx(spec.base_point, c), "perturbed_circle"))
    if k == "polynomial":
        if not spec.coefficients:
            raise ConfigError("polynomial domain needs coefficients")
        coeffs = [parse_complex(c, "coefficients") for c in spec.coefficients]
        pair = ConformalPair(coeffs)
        return Scene(pair.domain(), pair)
    if k == "multi":
        if not spec.components:
            raise ConfigError("multi domain needs components")
        curves = [curve_from_params(dict(c)) for c in spec.components]
        return Scene(PlanarDomain(curves, _cx(spec.base_point), "multi"))
    raise ConfigError(f"unknown domain kind {k!r}")


# ---------------------------------------------------------------------------
# data

DATA_KEYS = {
    "laurent": {"terms", "center"},
    "conj_power": {"k", "coeff"},
    "trig": {"coeffs", "degree", "min_freq", "seed"},
    "neumann": {"terms", "center"},
    "tangent_laurent": {"terms", "center"},
    "transported": {"terms", "degree", "min_freq", "seed"},
    "factory": {"terms"},
    "constant": {"value"},
    "sum": {"parts"},
}


def _terms(table, where):
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: terms must be a table of power = coefficient")
    try:
        return {int(p): parse_complex(c, where) for p, c in table.items()}
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from e


def laurent_fn(terms: dict, center: complex = 0.0):
    """Holomorphic evaluator ``z -> sum_p c_p (z - center)^p``."""
    def F(z):
        w = np.asarray(z, dtype=complex) - center
        return sum(c * w ** float(p) for p, c in terms.items()) + 0 * w
    return F


def _trig_coeffs(spec, seed, where):
    if "coeffs" in spec:
        return _terms(spec["coeffs"], where)
    rng = np.random.default_rng([seed, int(spec.get("seed", 0))])
    return random_trig_coeffs(rng, int(spec.get("degree", 8)), spec.get("min_freq"))


def build_data(spec: dict, scene: Scene, samples, seed: int = 0, where: str = "data") -> BoundaryFunction:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{where}: data table needs a kind")
    kind = spec["kind"]
    if kind not in DATA_KEYS:
        raise ConfigError(f"{where}: unknown data kind {kind!r}")
    extra = set(spec) - DATA_KEYS[kind] - {"kind", "id", "expect"}
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    center = _cx(spec.get("center"))
    if kind == "laurent":
        return laurent(samples, _terms(spec["terms"], where), center)
    if kind == "conj_power":
        return conj_power(samples, int(spec["k"]), _cx(spec.get("coeff"), 1.0))
    if kind == "trig":
        return trig(samples, _trig_coeffs(spec, seed, where))
    if kind == "neumann":
        return neumann_data(samples, laurent_fn(_terms(spec["terms"], where), center))
    if kind == "tangent_laurent":
        return tangent_times(samples, laurent_fn(_terms(spec["terms"], where), center))
    if kind == "constant":
        v = _cx(spec.get("value"), 1.0)
        return BoundaryFunction.from_fn(samples, lambda z, T, t, j: v + 0 * z)
    if kind in ("transported", "factory"):
        if scene.pair is None:
            raise ConfigError(f"{where}: {kind} data needs a polynomial domain")
        if kind == "factory":
            return neumann_data_factory(scene.pair, samples, laurent_fn(_terms(spec["terms"], where)))
        coeffs = (_terms(spec["terms"], where) if "terms" in spec
                  else _trig_coeffs(spec, seed, where))
        return transported(scene.pair, samples, coeffs)
    if kind == "sum":
        parts = [build_data(p, scene, samples, seed, f"{where}.parts[{i}]")
                 for i, p in enumerate(spec["parts"])]
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out
    raise ConfigError(f"{where}: unhandled data kind {kind!r}")


# ---------------------------------------------------------------------------
# the classifier battery

BATTERY_POWERS = (-3, -2, -1, 1, 2, 3, 4, 5)


def battery(scene: Scene, samples, seed: int = 0, n_random: int = 12) -> list:
    """``(function_id, g, expected)`` triples: eight monomials and ``n_random`` trig combinations.

    On a polynomial domain every function is transported by the conformal
    map (``g = (conj psi'/|psi'|) sum c_m psi^m``), which reduces to the
    plain expression on the unit disc.  Half of the random combinations
    use frequencies ``1..8`` (admissible), half ``-8..8``.
    """
    def make(coeffs):
        if scene.pair is not None:
            return transported(scene.pair, samples, coeffs)
        return laurent(samples, coeffs)

    out = []
    for m in BATTERY_POWERS:
        out.append((f"laurent_{m}", make({m: 1.0}), hardy.MEMBER if m > 0 else hardy.NON_MEMBER))
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        pos = i % 2 == 0
        coeffs = random_trig_coeffs(rng, 8, 1 if pos else None)
        out.append((f"trig_{i}", make(coeffs), hardy.MEMBER if pos else hardy.NON_MEMBER))
    return out


# ---------------------------------------------------------------------------
# runners

def _n(spec, run_n):
    return spec.n if getattr(spec, "n", None) is not None else run_n


def run_plemelj(spec, scene: Scene, n: int, seed: int, tol: Tolerances) -> ExperimentResult:
    samples = scene.domain.discretize(n)
    f = build_data(spec.data, scene, samples, seed)
    r = cauchy.plemelj_check(scene.domain, samples, f, spec.stride, spec.levels)
    ok = max(r.max_interior_gap, r.max_exterior_gap) < tol.plemelj
    header = ["experiment_id", "n_nodes", "nodes_tested", "max_interior_gap", "max_exterior_gap",
              "max_jump_gap", "max_extrapolation_residual", "tolerance", "passed"]
    row = [spec.id, n, r.nodes_tested, r.max_interior_gap, r.max_exterior_gap, r.max_jump_gap,
           r.max_extrapolation_residual, tol.plemelj, ok]
    return ExperimentResult(header, [row], ok, {"max_gap": max(r.max_interior_gap,
                                                               r.max_exterior_gap)})


CLASSIFY_TESTS = {
    "moment": lambda d, s, g, spec, tol: hardy.moment_test(d, s, g, spec.max_degree, tol, spec.p),
    "exterior": lambda d, s, g, spec, tol: hardy.exterior_vanishing_test(d, s, g, tol=tol, p=spec.p),
    "multi": lambda d, s, g, spec, tol: hardy.neumann_test_multi(d, s, g, spec.max_degree, tol, spec.p),
}


def run_classify(spec, scene: Scene, n: int, seed: int, tol: Tolerances,
                 strict: bool = False) -> ExperimentResult:
    samples = scene.domain.discretize(n)
    bad = [t for t in spec.tests if t not in CLASSIFY_TESTS]
    if bad:
        raise ConfigError(f"{spec.id}: unknown tests {bad}")
    funcs = battery(scene, samples, seed) if spec.battery else []
    for i, fs in enumerate(spec.functions):
        fid = fs.get("id", f"f{i}") if isinstance(fs, dict) else f"f{i}"
        expect = fs.get("expect") if isinstance(fs, dict) else None
        funcs.append((fid, build_data(fs, scene, samples, seed, f"{spec.id}.functions[{i}]"), expect))
    header = ["function_id", "test_name", "verdict", "worst_diagnostic_name", "worst_value",
              "tolerance", "expected", "passed"]
    rows, ok, disagreements = [], True, 0
    for fid, g, expect in funcs:
        verdicts = []
        for t in spec.tests:
            v = CLASSIFY_TESTS[t](scene.domain, samples, g, spec, tol.member)
            good = (expect is None or v.verdict == expect)
            if strict and expect is None and v.verdict == hardy.NON_MEMBER:
                good = False
            r = v.row(fid)
            rows.append([r["function_id"], r["test_name"], r["verdict"], r["worst_diagnostic_name"],
                         r["worst_value"], r["tolerance"], expect or "", good])
            ok &= good
            verdicts.append(v.verdict)
        if len(set(verdicts)) > 1:
            disagreements += 1
    ok &= disagreements == 0
    return ExperimentResult(header, rows, ok, {"functions": len(funcs), "disagreements": disagreements})


def _interior_points(scene: Scene, count: int, seed: int) -> np.ndarray:
    """Deterministic interior points: conformal images when available, else
    accepted samples from the bounding box."""
    rng = np.random.default_rng(seed)
    d = scene.domain
    if scene.pair is not None:
        w = 0.9 * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))
        return scene.pair.phi(w)
    nodes = d.discretize(256)
    c = d.outer.centroid
    R = d.diameter
    out = []
    while len(out) < count:
        z = c + R * (rng.random() - 0.5) + 1j * R * (rng.random() - 0.5)
        if locate(d, z) != "interior":
            continue
        dist = min(np.min(np.abs(s.nodes - z)) for s in nodes)
        if dist > 0.05 * R:
            out.append(z)
    return np.array(out)


SOLVE_HEADER = ["problem_id", "n_nodes", "sup_residual", "l2_residual", "path_consistency",
                "admissibility_verdict", "compatibility", "recovery_error", "residual_check_sup",
                "period_re", "period_im", "passed"]


def solve_once(spec, scene: Scene, n: int, seed: int, tol: Tolerances, strict: bool = False):
    """Run one solve; returns the CSV row, the pass flag and the result (or ``None``)."""
    samples = scene.domain.discretize(n)
    g = build_data(spec.data, scene, samples, seed)
    problem = neumann.NeumannProblem(scene.domain, g, spec.p)
    verdict = hardy.classify(scene.domain, samples, g, tol=tol.member, p=spec.p)
    ok = spec.expect_verdict is None or verdict.verdict == spec.expect_verdict
    if strict and spec.expect_verdict is None and verdict.verdict == hardy.NON_MEMBER:
        ok = False
    compat = problem.compatibility(samples)
    nan = float("nan")
    if verdict.verdict == hardy.NON_MEMBER and not spec.force:
        row = [spec.id, n, nan, nan, nan, verdict.verdict, compat, nan, nan, nan, nan, ok]
        return row, ok, None
    opts = neumann.SolveOptions(grid_size=spec.grid_size, force=True, check_admissibility=False,
                                tol=tol.member)
    tp = None if spec.test_points is None else [parse_complex(z, "test_points") for z in spec.test_points]
    res = neumann.solve(problem, samples, opts, tp)
    res.admissibility = verdict
    rep = res.residual_report
    rec = nan
    if spec.exact is not None:
        Gt = laurent_fn(_terms(spec.exact["terms"], f"{spec.id}.exact"),
                        _cx(spec.exact.get("center")))
        pts = _interior_points(scene, 10, seed)
        G0 = Gt(np.array([scene.domain.base_point]))[0]
        rec = float(np.max(np.abs(res.G(pts) - (Gt(pts) - G0))))
        ok &= rec < tol.recovery
    chk = nan
    if spec.residual_check:
        chk = neumann.residual_check(scene.domain, samples, res.G, g).sup_residual
        if verdict.verdict != hardy.NON_MEMBER:
            ok &= chk < tol.residual
    per = complex(nan, nan)
    if spec.hole_period or spec.winding_point is not None:
        if scene.domain.is_simply_connected:
            raise ConfigError(f"{spec.id}: hole periods need a multiply connected domain")
        if spec.winding_point is not None:
            per = neumann.winding_paths(res, parse_complex(spec.winding_point), 0)["difference"]
        else:
            per = neumann.hole_period(res, 0)
        if spec.expect_period is not None:
            ok &= abs(per - parse_complex(spec.expect_period, "expect_period")) < tol.period
    if verdict.verdict != hardy.NON_MEMBER:
        ok &= rep.sup_residual < tol.residual and res.path_consistency < tol.consistency
    row = [spec.id, n, rep.sup_residual, rep.l2_residual, res.path_consistency, verdict.verdict,
           compat, rec, chk, per.real, per.imag, ok]
    return row, ok, res


def run_solve(spec, scene, n, seed, tol, strict=False) -> ExperimentResult:
    row, ok, _ = solve_once(spec, scene, n, seed, tol, strict)
    return ExperimentResult(SOLVE_HEADER, [row], ok, {"verdict": row[5]})


def run_rkhs(spec, n: int, seed: int, tol: Tolerances) -> ExperimentResult:
    """Gram matrix, reproducing property, disc solver exactness and route agreement."""
    alpha = parse_complex(spec.alpha, "alpha")
    rng = np.random.default_rng(seed)
    rows = []
    G = disc_rkhs.gram_matrix(16, n, alpha)
    rows.append(["gram_error", float(np.max(np.abs(G - np.eye(16)))), tol.gram])
    ks = disc_rkhs.KernelSeries(alpha, spec.kernel_terms)
    err = 0.0
    for _ in range(spec.functions):
        c = rng.standard_normal(spec.max_power) + 1j * rng.standard_normal(spec.max_power)
        k = np.arange(1, spec.max_power + 1)
        F = lambda z: np.sum(c * (np.asarray(z)[..., None] ** k - alpha ** k) / (np.sqrt(2 * np.pi) * k), axis=-1)
        dF = lambda z: np.sum(c * np.asarray(z)[..., None] ** (k - 1) / np.sqrt(2 * np.pi), axis=-1)
        z = spec.radius * np.sqrt(rng.random(spec.points)) * np.exp(2j * np.pi * rng.random(spec.points))
        err = max(err, float(np.max(np.abs(disc_rkhs.reproduce(ks, dF, z, n) - F(z)))))
    rows.append(["reproduce_error", err, tol.rkhs])
    s = disc_rkhs.unit_circle_sample(256)
    D = disc()
    ks0 = disc_rkhs.KernelSeries(0.0, spec.kernel_terms)
    z = 0.9 * np.sqrt(rng.random(10)) * np.exp(2j * np.pi * rng.random(10))
    e_log = e_ker = e_core = 0.0
    ker_tol = 0.0
    for m in range(1, spec.max_power + 1):
        g = laurent([s], {m: m})
        a = disc_rkhs.solve_disc_log(s, g, z)
        b = disc_rkhs.solve_disc_kernel(ks0, s, g, z)
        res = neumann.solve(neumann.NeumannProblem(D, g), [s], neumann.SolveOptions(check_admissibility=False))
        e_log = max(e_log, float(np.max(np.abs(a - z**m))))
        bound = 2 / (np.pi * spec.kernel_terms) * g.norm([s], 1.0) + tol.disc_solve
        e_ker = max(e_ker, float(np.max(np.abs(b - a))) / bound)
        ker_tol = bound
        e_core = max(e_core, float(np.max(np.abs(res.G(z) - a))))
    rows.append(["disc_log_exactness", e_log, tol.disc_solve])
    rows.append(["kernel_route_relative", e_ker, 1.0])
    rows.append(["core_solver_agreement", e_core, tol.disc_solve])
    out = [[name, v, t, v < t] for name, v, t in rows]
    ok = all(r[-1] for r in out)
    return ExperimentResult(["check", "value", "tolerance", "passed"], out, ok, {"kernel_bound": ker_tol})


def run_norms(spec, n: int, tol: Tolerances) -> ExperimentResult:
    rows, ok = [], True
    bound = 1 / np.sqrt(2)
    for m in spec.powers:
        m = int(m)
        r = disc_rkhs.norms(lambda z: z**m, lambda z: m * z ** (m - 1), spec.p, n,
                            spec.n_radial, spec.n_angle)
        expected = 1 / np.sqrt(2 * m) if spec.p == 2 else float("nan")
        good = r.finite and r.dirichlet_ratio <= bound + tol.norms and r.bergman_ratio <= bound
        if spec.p == 2:
            good &= abs(r.dirichlet_ratio - expected) < tol.norms
        rows.append([m, spec.p, r.hardy_sobolev_norm, r.dirichlet_norm, r.bergman_norm,
                     r.boundary_norm, r.dirichlet_ratio, expected, r.bergman_ratio,
                     r.area_error_estimate, good])
        ok &= good
    header = ["power", "p", "hardy_sobolev_norm", "dirichlet_norm", "bergman_norm", "boundary_norm",
              "dirichlet_ratio", "expected_ratio", "bergman_ratio", "area_error_estimate", "passed"]
    return ExperimentResult(header, rows, ok, {"max_bergman_ratio": max(r[8] for r in rows)})


SWEEP_METRICS = ("plemelj_gap", "solve_residual", "solve_error")


def run_sweep(spec, scene: Scene, seed: int, tol: Tolerances) -> ExperimentResult:
    if spec.metric not in SWEEP_METRICS:
        raise ConfigError(f"{spec.id}: metric must be one of {SWEEP_METRICS}")
    vals = []
    for n in spec.n_list:
        if spec.metric == "plemelj_gap":
            samples = scene.domain.discretize(n)
            f = build_data(spec.data, scene, samples, seed)
            r = cauchy.plemelj_check(scene.domain, samples, f)
            vals.append(max(r.max_interior_gap, r.max_exterior_gap))
        else:
            samples = scene.domain.discretize(n)
            g = build_data(spec.data, scene, samples, seed)
            res = neumann.solve(neumann.NeumannProblem(scene.domain, g), samples,
                                neumann.SolveOptions(check_admissibility=False))
            if spec.metric == "solve_residual":
                vals.append(res.residual_report.sup_residual)
            else:
                if spec.exact is None:
                    raise ConfigError(f"{spec.id}: solve_error needs exact")
                Gt = laurent_fn(_terms(spec.exact["terms"], f"{spec.id}.exact"))
                pts = _interior_points(scene, 10, seed)
                G0 = Gt(np.array([scene.domain.base_point]))[0]
                vals.append(float(np.max(np.abs(res.G(pts) - (Gt(pts) - G0)))))
    ok = True
    if spec.monotone:
        ok &= all(b <= a or b < tol.monotone_floor for a, b in zip(vals, vals[1:]))
    if spec.target is not None:
        ok &= vals[-1] < spec.target
    return ExperimentResult(["n", spec.metric], [[n, v] for n, v in zip(spec.n_list, vals)], ok,
                            {"final": vals[-1]})
