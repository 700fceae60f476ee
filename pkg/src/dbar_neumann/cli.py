"""Command line scenario runner.

    dbar-neumann run CONFIG [--strict] [--out DIR] [--seed N] [--n-override N]

Writes one CSV per experiment and ``manifest.json`` into the output
directory.  Exit status: 0 all experiments passed, 1 some experiment
failed, 2 config schema violation, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from . import experiments as ex
from .config import ConfigError, ScenarioConfig, load_config

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_IO = 0, 1, 2, 3


@dataclass
class RunManifest:
    name: str
    config_hash: str
    version: str
    seed: int
    strict: bool
    n_override: int | None
    experiments: list = field(default_factory=list)
    passed: bool = True

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def format_value(v) -> str:
    """CSV cell: floats in 17-significant-digit scientific notation."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.16e}"
    if v is None:
        return ""
    try:
        import numpy as np
        if isinstance(v, np.bool_):
            return "true" if v else "false"
        if isinstance(v, np.integer):
            return str(int(v))
        if isinstance(v, np.floating):
            return format_value(float(v))
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([format_value(v) for v in r])


def run_experiment(spec, cfg: ScenarioConfig, seed: int, n_override, strict: bool):
    run_n = n_override if n_override is not None else cfg.run.n
    n = run_n if n_override is not None else ex._n(spec, run_n)
    tol = cfg.tolerances
    scene = ex.build_domain(cfg.domains[spec.domain]) if hasattr(spec, "domain") else None
    t = spec.type
    if t == "plemelj_check":
        return ex.run_plemelj(spec, scene, n, seed, tol)
    if t == "classify":
        return ex.run_classify(spec, scene, n, seed, tol, strict)
    if t == "solve":
        return ex.run_solve(spec, scene, n, seed, tol, strict)
    if t == "rkhs_verify":
        return ex.run_rkhs(spec, n, seed, tol)
    if t == "norms":
        return ex.run_norms(spec, n, tol)
    if t == "convergence_sweep":
        return ex.run_sweep(spec, scene, seed, tol)
    raise ConfigError(f"unknown experiment type {t!r}")


def run(config_path, strict: bool | None = None, out=None, seed: int | None = None,
        n_override: int | None = None) -> RunManifest:
    """Execute every experiment of a config in order; see the module doc for outputs."""
    cfg = load_config(config_path)
    if n_override is not None and (n_override < 4 or n_override % 2):
        raise ConfigError("--n-override must be even and at least 4")
    strict = cfg.run.strict if strict is None else strict
    seed = cfg.run.seed if seed is None else seed
    outdir = Path(out if out is not None else cfg.run.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(cfg.run.name, cfg.digest, __version__, seed, strict, n_override)
    for spec in cfg.experiments:
        t0 = time.perf_counter()
        res = run_experiment(spec, cfg, seed, n_override, strict)
        wall = time.perf_counter() - t0
        fname = f"{spec.id}.csv"
        write_csv(outdir / fname, res.header, res.rows)
        manifest.experiments.append({"id": spec.id, "type": spec.type, "file": fname,
                                     "wall_time": round(wall, 6), "passed": bool(res.passed),
                                     "summary": {k: format_value(v) for k, v in res.summary.items()}})
        manifest.passed &= bool(res.passed)
    (outdir / "manifest.json").write_text(manifest.to_json() + "\n")
    return manifest


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dbar-neumann", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    r.add_argument("--strict", action="store_true", default=None,
                   help="unexpected non_member classifications fail the run")
    r.add_argument("--out", help="output directory (overrides run.output_dir)")
    r.add_argument("--seed", type=int, help="seed for random batteries")
    r.add_argument("--n-override", type=int, help="node count for every experiment")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = run(args.config, args.strict, args.out, args.seed, args.n_override)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    for e in manifest.experiments:
        print(f"{'PASS' if e['passed'] else 'FAIL'} {e['id']} ({e['type']}, {e['wall_time']:.2f}s)")
    return EXIT_OK if manifest.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
