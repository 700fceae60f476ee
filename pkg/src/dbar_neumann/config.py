"""Scenario configuration: TOML files validated into dataclasses.

A config has a ``[run]`` table, optional ``[tolerances]``, named domain
tables under ``[domains.<name>]`` and an ``[[experiments]]`` array.  Every
table is checked against its dataclass and unknown keys are rejected.
Complex numbers are written either as plain numbers or as ``[re, im]``.

Example::

    [run]
    name = "demo"
    n = 256

    [domains.disc]
    kind = "disc"

    [[experiments]]
    id = "plemelj_disc"
    type = "plemelj_check"
    domain = "disc"
    data = { kind = "sum", parts = [
        { kind = "laurent", terms = { "3" = 1.0 } },
        { kind = "conj_power", k = 1, coeff = 2.0 } ] }
"""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import tomli


class ConfigError(ValueError):
    """Schema violation in a scenario config."""


@dataclass
class RunSection:
    name: str = "run"
    n: int = 256
    seed: int = 0
    output_dir: str = "results"
    strict: bool = False


@dataclass
class Tolerances:
    member: float = 1e-8
    plemelj: float = 1e-6
    recovery: float = 1e-6
    residual: float = 1e-5
    consistency: float = 1e-9
    rkhs: float = 1e-7
    gram: float = 1e-12
    disc_solve: float = 1e-8
    norms: float = 1e-6
    period: float = 1e-8
    monotone_floor: float = 1e-12


@dataclass
class DomainSpec:
    kind: str
    center: list | float | None = None
    radius: float | None = None
    r_inner: float | None = None
    r_outer: float | None = None
    a: float | None = None
    b: float | None = None
    coefficients: list | None = None
    base_point: list | float | None = None
    components: list | None = None

    KINDS = ("disc", "annulus", "ellipse", "perturbed_circle", "polynomial", "multi")


@dataclass
class PlemeljSpec:
    id: str
    type: str
    domain: str
    data: dict
    n: int | None = None
    stride: int = 8
    levels: int = 8


@dataclass
class ClassifySpec:
    id: str
    type: str
    domain: str
    functions: list = field(default_factory=list)
    battery: bool = False
    tests: list = field(default_factory=lambda: ["moment", "exterior"])
    n: int | None = None
    max_degree: int = 32
    p: float = 2.0


@dataclass
class SolveSpec:
    id: str
    type: str
    domain: str
    data: dict
    n: int | None = None
    exact: dict | None = None
    test_points: list | None = None
    force: bool = False
    residual_check: bool = True
    hole_period: bool = False
    winding_point: list | float | None = None
    expect_period: list | float | None = None
    grid_size: int = 24
    expect_verdict: str | None = None
    p: float = 2.0


@dataclass
class RkhsSpec:
    id: str
    type: str
    n: int | None = None
    kernel_terms: int = 500
    alpha: list | float = 0.3
    max_power: int = 8
    functions: int = 5
    points: int = 20
    radius: float = 0.9


@dataclass
class NormsSpec:
    id: str
    type: str
    powers: list = field(default_factory=lambda: list(range(1, 33)))
    p: float = 2.0
    n: int | None = None
    n_radial: int = 64
    n_angle: int = 256


@dataclass
class SweepSpec:
    id: str
    type: str
    metric: str
    domain: str
    data: dict
    n_list: list
    exact: dict | None = None
    target: float | None = None
    monotone: bool = True


EXPERIMENT_TYPES = {"plemelj_check": PlemeljSpec, "classify": ClassifySpec, "solve": SolveSpec,
                    "rkhs_verify": RkhsSpec, "norms": NormsSpec, "convergence_sweep": SweepSpec}


@dataclass
class ScenarioConfig:
    run: RunSection
    tolerances: Tolerances
    domains: dict
    experiments: list
    digest: str = ""


def _build(cls, table, where: str):
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(table) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    missing = [f.name for f in dataclasses.fields(cls)
               if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING
               and f.name not in table]
    if missing:
        raise ConfigError(f"{where}: missing keys {missing}")
    return cls(**table)


def parse_complex(x, where: str = "value") -> complex:
    if isinstance(x, bool):
        raise ConfigError(f"{where}: expected a number")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {x!r}")


def _check_types(obj, where):
    # numeric fields must be numbers, integer fields integers
    for f in dataclasses.fields(obj):
        v = getattr(obj, f.name)
        if v is None:
            continue
        t = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "")
        if t.startswith("int") and (not isinstance(v, int) or isinstance(v, bool)):
            raise ConfigError(f"{where}.{f.name}: expected an integer")
        if t.startswith("float") and (isinstance(v, bool) or not isinstance(v, (int, float))):
            raise ConfigError(f"{where}.{f.name}: expected a number")
        if t.startswith("bool") and not isinstance(v, bool):
            raise ConfigError(f"{where}.{f.name}: expected true/false")
        if t.startswith("str") and not isinstance(v, str):
            raise ConfigError(f"{where}.{f.name}: expected a string")


def _even_n(n, where):
    if n is not None and (n < 4 or n % 2):
        raise ConfigError(f"{where}: n must be even and at least 4")


def parse_config(text: str) -> ScenarioConfig:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise ConfigError(f"malformed TOML: {e}") from e
    unknown = sorted(set(raw) - {"run", "tolerances", "domains", "experiments"})
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}")
    run = _build(RunSection, raw.get("run", {}), "run")
    _check_types(run, "run")
    _even_n(run.n, "run")
    tol = _build(Tolerances, raw.get("tolerances", {}), "tolerances")
    _check_types(tol, "tolerances")
    domains = {}
    for name, table in raw.get("domains", {}).items():
        spec = _build(DomainSpec, table, f"domains.{name}")
        if spec.kind not in DomainSpec.KINDS:
            raise ConfigError(f"domains.{name}: unknown kind {spec.kind!r}")
        domains[name] = spec
    exps, seen = [], set()
    for i, table in enumerate(raw.get("experiments", [])):
        where = f"experiments[{i}]"
        if not isinstance(table, dict) or "type" not in table:
            raise ConfigError(f"{where}: missing type")
        cls = EXPERIMENT_TYPES.get(table["type"])
        if cls is None:
            raise ConfigError(f"{where}: unknown experiment type {table['type']!r}")
        spec = _build(cls, table, where)
        _check_types(spec, where)
        if spec.id in seen:
            raise ConfigError(f"{where}: duplicate id {spec.id!r}")
        seen.add(spec.id)
        if hasattr(spec, "domain") and spec.domain not in domains:
            raise ConfigError(f"{where}: unknown domain {spec.domain!r}")
        _even_n(getattr(spec, "n", None), where)
        if isinstance(spec, SweepSpec):
            ns = spec.n_list
            if (not ns or any(not isinstance(v, int) or v < 4 or v % 2 for v in ns)
                    or any(b <= a for a, b in zip(ns, ns[1:]))):
                raise ConfigError(f"{where}: n_list must be strictly increasing even integers")
        exps.append(spec)
    digest = hashlib.sha256(text.encode()).hexdigest()
    return ScenarioConfig(run, tol, domains, exps, digest)


def load_config(path) -> ScenarioConfig:
    """Read and validate a config; ``OSError`` propagates for I/O problems."""
    return parse_config(Path(path).read_text())
