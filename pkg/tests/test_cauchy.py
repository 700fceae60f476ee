import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbar_neumann.cauchy import (CauchyEvaluator, SideError, boundary_limit, cauchy_exterior,
                                 cauchy_interior, extrapolate_to_zero, hilbert_cauchy,
                                 plemelj_check)
from dbar_neumann.functions import (BoundaryFunction, conj_power, holomorphic_trace, laurent,
                                    random_trig_coeffs, trig)


def test_cauchy_interior_examples(unit_disc, disc256):
    s = disc256
    assert abs(cauchy_interior(unit_disc, s, laurent(s, {2: 1}), 0.3) - 0.09) < 1e-13
    assert abs(cauchy_interior(unit_disc, s, conj_power(s, 1), 0.5)) < 1e-13
    c = 2.5 - 1j
    z = np.array([0.1, -0.4j, 0.7 + 0.2j])
    assert np.max(np.abs(cauchy_interior(unit_disc, s, laurent(s, {0: c}), z) - c)) < 1e-13


def test_cauchy_exterior_examples(unit_disc, disc256):
    s = disc256
    assert abs(cauchy_exterior(unit_disc, s, laurent(s, {2: 1}), 2.0)) < 1e-13
    assert abs(cauchy_exterior(unit_disc, s, laurent(s, {-1: 1}), 2.0) + 0.5) < 1e-12
    assert abs(cauchy_exterior(unit_disc, s, laurent(s, {0: 1}), 3 + 1j)) < 1e-13


def test_side_errors(unit_disc, disc256):
    f = laurent(disc256, {1: 1})
    with pytest.raises(SideError):
        cauchy_interior(unit_disc, disc256, f, 2.0)
    with pytest.raises(SideError):
        cauchy_exterior(unit_disc, disc256, f, 0.2)


def test_hilbert_cauchy_examples(unit_disc, disc256):
    s = disc256
    z = s[0].nodes
    for k in range(0, 6):
        assert np.max(np.abs(hilbert_cauchy(unit_disc, s, laurent(s, {k: 1})) - z**k)) < 1e-12
    for k in range(1, 6):
        assert np.max(np.abs(hilbert_cauchy(unit_disc, s, laurent(s, {-k: 1})) + z**-k)) < 1e-12


def test_boundary_limit_examples(unit_disc, disc256):
    s = disc256
    r = boundary_limit(unit_disc, s, lambda z: z**2, 0, 0)
    assert abs(r.value - 1) < 1e-9
    ev = CauchyEvaluator(unit_disc, s, conj_power(s, 1))
    r = boundary_limit(unit_disc, s, lambda z: ev(z, side="interior"), 0, 17)
    assert abs(r.value) < 1e-12
    r = boundary_limit(unit_disc, s, lambda z: np.log(1 / (1 - 0.5 * z)), 0, 0)
    assert abs(r.value - np.log(2)) < 1e-8
    assert r.converged


def test_plemelj_examples(unit_disc, disc256):
    s = disc256
    rep = plemelj_check(unit_disc, s, laurent(s, {3: 1}) + conj_power(s, 1, 2.0))
    assert rep.max_interior_gap < 1e-6 and rep.max_exterior_gap < 1e-6
    rep = plemelj_check(unit_disc, s, laurent(s, {0: 1}))
    assert rep.max_interior_gap < 1e-10 and rep.max_exterior_gap < 1e-10
    re = BoundaryFunction.from_fn(s, lambda z, T, t, j: z.real + 0j)
    rep = plemelj_check(unit_disc, s, re)
    assert rep.max_interior_gap < 1e-6 and rep.max_exterior_gap < 1e-6
    assert rep.max_jump_gap < 1e-6


def test_plemelj_annulus(ann, ann256):
    f = laurent(ann256, {2: 1.0, -1: 0.5, -2: 0.25j})
    rep = plemelj_check(ann, ann256, f)
    assert rep.max_interior_gap < 1e-6 and rep.max_exterior_gap < 1e-6
    assert rep.nodes_tested == 64


def test_reproduction_of_polynomial(pert, rng):
    s = pert.discretize(256)
    P = lambda z: 1 - 2 * z + 0.5j * z**3 + z**5
    f = holomorphic_trace(s, P)
    r = 0.5 * np.sqrt(rng.uniform(0, 1, 20))
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, 20))
    assert np.max(np.abs(cauchy_interior(pert, s, f, z) - P(z))) < 1e-10


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6, 1e-10])
def test_near_boundary_evaluation_accuracy(unit_disc, disc256, eps):
    # targets far inside one node spacing (0.025) on both sides
    f = laurent(disc256, {4: 1.0, -2: 1.0})
    ev = CauchyEvaluator(unit_disc, disc256, f)
    z = (1 - eps) * np.exp(0.123j)
    w = np.exp(0.123j) / (1 - eps)
    assert list(ev.sides(np.array([z, w]))) == [1, -1]
    assert abs(ev(z) - z**4) < 1e-11
    assert abs(ev(w) + w**-2) < 1e-11


def test_sides_near_hole(ann):
    s = ann.discretize(64)
    ev = CauchyEvaluator(ann, s, laurent(s, {1: 1}))
    z = 0.5 * np.exp(1j)
    assert list(ev.sides(np.array([z * (1 + 1e-9), z * (1 - 1e-9), 0.75, 0.1, 2.0]))) == [1, -1, 1, -1, -1]


def test_extrapolate_to_zero_polynomial():
    s = 0.1 * 0.5 ** np.arange(6)
    y = 3.0 + 2 * s - s**3 + 0.5 * s**5
    v, res = extrapolate_to_zero(s, y)
    assert abs(v - 3.0) < 1e-13


@given(st.integers(0, 10_000), st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_linearity(seed, a, b):
    from dbar_neumann.geometry import disc
    d = disc()
    s = d.discretize(64)
    rng = np.random.default_rng(seed)
    f = trig(s, random_trig_coeffs(rng, 6))
    g = trig(s, random_trig_coeffs(rng, 6))
    pts = np.array([0.3, 0.95j, 1.5, -2.0 + 1j])
    lhs = CauchyEvaluator(d, s, a * f + b * g)(pts)
    rhs = a * CauchyEvaluator(d, s, f)(pts) + b * CauchyEvaluator(d, s, g)(pts)
    scale = 1 + abs(a) + abs(b)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * scale * 10


@given(st.integers(0, 10_000))
def test_jump_identity(seed):
    from dbar_neumann.geometry import disc
    d = disc()
    s = d.discretize(128)
    f = trig(s, random_trig_coeffs(np.random.default_rng(seed), 8))
    rep = plemelj_check(d, s, f, stride=16)
    assert rep.max_jump_gap < 1e-8


def test_plemelj_gaps_decrease_under_doubling(pert):
    coeffs = random_trig_coeffs(np.random.default_rng(1), 8)
    gaps = []
    for n in (64, 128, 256):
        s = pert.discretize(n)
        rep = plemelj_check(pert, s, trig(s, coeffs))
        gaps.append(max(rep.max_interior_gap, rep.max_exterior_gap))
    assert gaps[0] > gaps[1] > gaps[2]
