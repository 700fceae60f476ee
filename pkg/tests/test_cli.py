import json
import textwrap

import pytest

from dbar_neumann.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_SCHEMA, format_value, main
from dbar_neumann.config import ConfigError, parse_config

HEAD = """
[run]
name = "t"
n = 128
seed = 3

[domains.disc]
kind = "disc"

[domains.annulus]
kind = "annulus"
r_inner = 0.5
r_outer = 1.0
base_point = 0.75
"""


def write(tmp_path, body, name="c.toml"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(HEAD) + textwrap.dedent(body))
    return p


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0].split(","), [l.split(",") for l in lines[1:]]


def test_empty_experiment_list_writes_manifest_only(tmp_path):
    cfg = write(tmp_path, "")
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]
    m = json.loads((out / "manifest.json").read_text())
    assert m["experiments"] == [] and m["passed"] is True
    assert len(m["config_hash"]) == 64 and m["version"]


PLEMELJ = """
[[experiments]]
id = "plemelj"
type = "plemelj_check"
domain = "disc"
n = 256
data = { kind = "sum", parts = [
    { kind = "laurent", terms = { "3" = 1.0 } },
    { kind = "conj_power", k = 1, coeff = 2.0 } ] }
"""


def test_plemelj_config(tmp_path):
    cfg = write(tmp_path, PLEMELJ)
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == EXIT_OK
    head, rows = read_csv(out / "plemelj.csv")
    r = dict(zip(head, rows[0]))
    assert float(r["max_interior_gap"]) < 1e-6 and float(r["max_exterior_gap"]) < 1e-6
    # 17 significant digits in scientific notation
    mant = r["max_interior_gap"].split("e")[0]
    assert len(mant.replace(".", "").lstrip("-")) == 17


OBSTRUCTED = """
[[experiments]]
id = "obstructed"
type = "solve"
domain = "annulus"
data = { kind = "sum", parts = [
    { kind = "neumann", terms = { "1" = 2.0, "-2" = -1.0 } },
    { kind = "tangent_laurent", terms = { "-1" = 1.0 } } ] }
"""


def test_strict_mode_fails_on_obstruction(tmp_path):
    cfg = write(tmp_path, OBSTRUCTED)
    assert main(["run", str(cfg), "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["run", str(cfg), "--out", str(tmp_path / "b"), "--strict"]) == EXIT_FAIL
    head, rows = read_csv(tmp_path / "b" / "obstructed.csv")
    assert dict(zip(head, rows[0]))["admissibility_verdict"] == "non_member"


def test_expected_non_member_passes_in_strict_mode(tmp_path):
    body = OBSTRUCTED + 'expect_verdict = "non_member"\n'
    assert main(["run", str(write(tmp_path, body)), "--out", str(tmp_path / "o"), "--strict"]) == EXIT_OK


def test_numerical_failure_exit_code(tmp_path):
    # wrong expectation: admissible data declared non_member
    body = """
    [[experiments]]
    id = "wrong"
    type = "solve"
    domain = "disc"
    n = 64
    data = { kind = "neumann", terms = { "1" = 2.0 } }
    expect_verdict = "non_member"
    """
    assert main(["run", str(write(tmp_path, body)), "--out", str(tmp_path / "o")]) == EXIT_FAIL


@pytest.mark.parametrize("body", [
    "[[experiments]]\nid = 'x'\ntype = 'plemelj_check'\ndomain = 'disc'\ndata = { kind = 'laurent', terms = { '1' = 1.0 } }\nbogus = 1\n",
    "[[experiments]]\nid = 'x'\ntype = 'nope'\n",
    "[[experiments]]\nid = 'x'\ntype = 'plemelj_check'\ndomain = 'moon'\ndata = { kind = 'laurent', terms = { '1' = 1.0 } }\n",
    "[[experiments]]\nid = 'x'\ntype = 'convergence_sweep'\nmetric = 'plemelj_gap'\ndomain = 'disc'\ndata = { kind = 'constant' }\nn_list = [64, 32]\n",
    "[[experiments]]\nid = 'x'\ntype = 'plemelj_check'\ndomain = 'disc'\nn = 33\ndata = { kind = 'laurent', terms = { '1' = 1.0 } }\n",
    "[[experiments]]\nid = 'x'\ntype = 'plemelj_check'\ndomain = 'disc'\ndata = { kind = 'laurent', terms = { '1' = 1.0 }, extra = 2 }\n",
    "[extra_table]\nx = 1\n",
    "[[experiments]\n",
])
def test_schema_violations_exit_2(tmp_path, body):
    assert main(["run", str(write(tmp_path, body)), "--out", str(tmp_path / "o")]) == EXIT_SCHEMA


def test_missing_config_exit_3(tmp_path):
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_IO


def test_unwritable_output_exit_3(tmp_path):
    cfg = write(tmp_path, "")
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(cfg), "--out", str(blocker / "sub")]) == EXIT_IO


def test_bad_n_override_exit_2(tmp_path):
    assert main(["run", str(write(tmp_path, "")), "--n-override", "7"]) == EXIT_SCHEMA


def test_constant_sweep_is_flat(tmp_path):
    body = """
    [[experiments]]
    id = "flat"
    type = "convergence_sweep"
    metric = "plemelj_gap"
    domain = "disc"
    data = { kind = "constant", value = [1.5, -0.5] }
    n_list = [32, 64, 128]
    """
    out = tmp_path / "o"
    assert main(["run", str(write(tmp_path, body)), "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out / "flat.csv")
    assert [int(r[0]) for r in rows] == [32, 64, 128]
    assert all(float(r[1]) < 1e-13 for r in rows)


def test_determinism_and_overrides(tmp_path):
    body = PLEMELJ + """
    [[experiments]]
    id = "battery"
    type = "classify"
    domain = "disc"
    battery = true
    """
    cfg = write(tmp_path, body)
    for d in ("a", "b"):
        assert main(["run", str(cfg), "--out", str(tmp_path / d)]) == EXIT_OK
    for f in ("plemelj.csv", "battery.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert main(["run", str(cfg), "--out", str(tmp_path / "c"), "--seed", "99",
                 "--n-override", "64"]) == EXIT_OK
    m = json.loads((tmp_path / "c" / "manifest.json").read_text())
    assert m["seed"] == 99 and m["n_override"] == 64
    assert (tmp_path / "c" / "battery.csv").read_bytes() != (tmp_path / "a" / "battery.csv").read_bytes()
    _, rows = read_csv(tmp_path / "c" / "plemelj.csv")
    assert rows[0][1] == "64"


def test_parse_config_defaults_and_complex():
    cfg = parse_config(textwrap.dedent(HEAD))
    assert cfg.run.n == 128 and cfg.tolerances.member == 1e-8
    assert set(cfg.domains) == {"disc", "annulus"}
    with pytest.raises(ConfigError):
        parse_config("[run]\nn = 'many'\n")


def test_format_value():
    assert format_value(0.1) == "1.0000000000000001e-01"
    assert format_value(float("nan")) == "nan"
    assert format_value(True) == "true" and format_value(7) == "7"
