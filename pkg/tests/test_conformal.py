import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbar_neumann.conformal import (ConformalPair, neumann_data_factory, tangent_via_psi,
                                    transported)
from dbar_neumann.functions import BoundaryFunction
from dbar_neumann.geometry import disc
from dbar_neumann.hardy import MEMBER, NON_MEMBER, exterior_vanishing_test, moment_test


def test_psi_inverts_phi(pair, rng):
    r = 0.95 * np.sqrt(rng.uniform(0, 1, 100))
    w = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    assert np.max(np.abs(pair.psi(pair.phi(w)) - w)) < 1e-10


def test_psi_unimodular_on_boundary(pair, pert):
    s = pert.discretize(256)[0]
    assert np.max(np.abs(pair.psi(s.nodes))) < 1 + 1e-8
    assert np.max(np.abs(np.abs(pair.psi(s.nodes)) - 1)) < 1e-12


def test_tangent_examples():
    ident = ConformalPair([0.0, 1.0])
    s = disc().discretize(64)[0]
    assert np.max(np.abs(tangent_via_psi(ident, s) - 1j * s.nodes)) < 1e-14
    scale = ConformalPair([0.0, 2.0])
    s2 = scale.domain().discretize(64)[0]
    assert np.max(np.abs(tangent_via_psi(scale, s2) - 1j * s2.nodes / 2)) < 1e-14


def test_tangent_at_real_node(pair, pert):
    s = pert.discretize(512)[0]
    assert abs(s.nodes[0] - 1.2) < 1e-15
    assert abs(tangent_via_psi(pair, s)[0] - 1j) < 1e-10


@pytest.mark.parametrize("c", [0.1, 0.2, 0.3])
def test_tangent_agreement_family(c):
    p = ConformalPair([0.0, 1.0, c])
    s = p.domain().discretize(512)[0]
    assert np.max(np.abs(tangent_via_psi(p, s) - s.tangents)) < 1e-9


@given(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))
def test_tangent_agreement_complex_coefficient(a, b):
    c = complex(a, b)
    if abs(c) > 0.3:
        c *= 0.3 / abs(c)
    p = ConformalPair([0.0, 1.0, c])
    s = p.domain().discretize(128)[0]
    assert np.max(np.abs(tangent_via_psi(p, s) - s.tangents)) < 1e-9


def test_factory_examples(unit_disc, pair, pert):
    ident = ConformalPair([0.0, 1.0])
    s = unit_disc.discretize(64)
    g = neumann_data_factory(ident, s, lambda z: z**3)
    assert np.max(np.abs(g[0] - s[0].nodes**3)) < 1e-14
    assert np.max(np.abs(neumann_data_factory(ident, s, lambda z: 0 * z)[0])) == 0.0
    sp = pert.discretize(512)
    g = neumann_data_factory(pair, sp, lambda z: pair.psi(z) ** 2)
    assert moment_test(pert, sp, g).verdict == MEMBER
    assert exterior_vanishing_test(pert, sp, g).verdict == MEMBER


def test_factory_rejects_nonvanishing(pair, pert):
    with pytest.raises(ValueError):
        neumann_data_factory(pair, pert.discretize(64), lambda z: 1 + z)


def test_factory_completeness_probe(pair, pert):
    s = pert.discretize(512)
    g = neumann_data_factory(pair, s, lambda z: pair.psi(z))
    weighted = BoundaryFunction((g[0] * (1 + 0.5 * np.cos(s[0].t)),))
    assert moment_test(pert, s, weighted).verdict == NON_MEMBER
    assert exterior_vanishing_test(pert, s, weighted).verdict == NON_MEMBER


def test_transported_reduces_to_laurent_on_disc(unit_disc):
    ident = ConformalPair([0.0, 1.0])
    s = unit_disc.discretize(64)
    g = transported(ident, s, {2: 1.0, -1: 0.5})
    z = s[0].nodes
    assert np.max(np.abs(g[0] - (z**2 + 0.5 / z))) < 1e-14


def test_invalid_maps():
    with pytest.raises(ValueError):
        ConformalPair([1.0])
    with pytest.raises(ValueError):
        ConformalPair([0.0, 1.0, 0.5])  # phi'(-1) = 0
