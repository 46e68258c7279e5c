import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mupb.acceptance import random_family_spec
from mupb.catalog import (
    FamilySpec,
    PairSpec,
    TripleSpec,
    circuit_for_family,
    columns_match_up_to_phase,
    degenerate_reason,
    exact_equal,
    exact_matmul,
    family_basis,
    hw_operator,
    mu_pair,
    mu_triple,
    standard_basis,
)
from mupb.cyclotomic import Cyc12
from mupb.linalg import overlap2
from mupb.mu import is_mu_pair
from strategies import rngs

SPACES = {"C2": "zxy", "C3": "zxyw"}
FAMILY_CASES = [(lab, 6) for lab in ("I0", "I1", "I2", "I3")] + [(lab, 4) for lab in ("I0", "I1", "I2")]


@pytest.mark.parametrize("space", SPACES)
def test_standard_bases_are_orthonormal_and_pairwise_unbiased(space):
    n = 2 if space == "C2" else 3
    labels = SPACES[space]
    for a in labels:
        b = standard_basis(space, a)
        for i, u in enumerate(b):
            for j, v in enumerate(b):
                assert overlap2(u, v) == Cyc12(int(i == j))
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            for u in standard_basis(space, a):
                for v in standard_basis(space, b):
                    assert overlap2(u, v) == Cyc12(1) / n


@pytest.mark.parametrize("p", [2, 3, 6])
def test_weyl_commutation(p):
    X, Z = hw_operator(p, "X"), hw_operator(p, "Z")
    w = Cyc12.root(12 // p)
    lhs = exact_matmul(Z, X)
    rhs = exact_matmul(X, Z) * w
    assert exact_equal(lhs, rhs)


@pytest.mark.parametrize("label,dim", FAMILY_CASES)
@settings(max_examples=25, deadline=None)
@given(rng=rngs())
def test_family_members_are_orthonormal_product_bases(label, dim, rng):
    b = family_basis(random_family_spec(rng, label, dim))
    assert b.d == dim
    assert b.to_float().gram_deviation() < 1e-12


@pytest.mark.parametrize("label,dim", FAMILY_CASES)
@settings(max_examples=10, deadline=None)
@given(rng=rngs())
def test_circuit_reproduces_the_family(label, dim, rng):
    spec = random_family_spec(rng, label, dim)
    u = circuit_for_family(spec).unitary()
    assert np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-12)
    assert columns_match_up_to_phase(u, family_basis(spec)) < 1e-10


def test_i0_is_exact():
    assert family_basis(FamilySpec("I0", 6)).exact
    assert family_basis(FamilySpec("I0", 4)).exact


def test_degenerate_members_are_flagged():
    assert degenerate_reason(FamilySpec("I1", 6, {"U": np.eye(3)})) is not None
    V = {"alpha": 1.0, "beta": 0.0, "phase": 0.2}
    assert degenerate_reason(FamilySpec("I2", 6, {"u": (1.0, 0.0), "V": V})) is not None
    assert degenerate_reason(FamilySpec("I1", 4, {"u": (0.0, 0.0)})) is not None
    assert degenerate_reason(FamilySpec("I3", 6, {"v": (1.0, 0.0), "w": (0.5, 0.1)})) is None


@pytest.mark.parametrize("label", ["P0", "P2", "P0_4"])
def test_named_pairs_are_exactly_mu(label):
    a, b = mu_pair(PairSpec(label, 4 if label.endswith("_4") else 6))
    assert a.exact and b.exact
    assert is_mu_pair(a, b) == (True, 0.0)


@pytest.mark.parametrize("label,dim", [("T0", 6), ("T1", 6), ("T0_4", 4)])
def test_named_triples_are_exactly_mu(label, dim):
    bases = mu_triple(TripleSpec(label, dim))
    for i in range(3):
        for j in range(i + 1, 3):
            assert is_mu_pair(bases[i], bases[j]) == (True, 0.0)


def test_parametric_pairs_exact_at_sixth_turns():
    a, b = mu_pair(PairSpec("P1", 6, {"xi": 2 * math.pi / 3, "eta": math.pi / 3}))
    assert a.exact and b.exact


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi),
    st.floats(0.01, math.pi - 0.01), st.floats(0.01, math.pi - 0.01),
)
def test_p3_is_mu_for_generic_parameters(zeta, chi, sigma, tau):
    if abs(sigma - tau) < 1e-6:
        return
    a, b = mu_pair(PairSpec("P3", 6, {"zeta": zeta, "chi": chi, "sigma": sigma, "tau": tau}), verify=False)
    ok, dev = is_mu_pair(a, b, 1e-9)
    assert ok, dev


@settings(max_examples=30, deadline=None)
@given(st.floats(0, math.pi - 1e-6), st.floats(0.01, math.pi - 0.01))
def test_p1_4_is_mu(mu, nu):
    a, b = mu_pair(PairSpec("P1_4", 4, {"mu": mu, "nu": nu}), verify=False)
    assert is_mu_pair(a, b, 1e-9)[0]


def test_invalid_pair_parameters():
    with pytest.raises(ValueError):
        mu_pair(PairSpec("P3", 6, {"zeta": 0, "chi": 0, "sigma": 1.0, "tau": 1.0}))
    with pytest.raises(ValueError):
        mu_pair(PairSpec("P1_4", 4, {"mu": 0.3, "nu": 0.0}))
    with pytest.raises(ValueError):
        mu_pair(PairSpec("P9"))


def test_spec_json_round_trip():
    rng = np.random.default_rng(5)
    for label, dim in FAMILY_CASES:
        spec = random_family_spec(rng, label, dim)
        assert FamilySpec.from_json(spec.to_json()) == spec
