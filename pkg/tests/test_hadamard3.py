import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mupb import hadamard3 as h3
from strategies import rngs


@settings(max_examples=200)
@given(rngs(), st.sampled_from(["F", "F+"]))
def test_decompose_round_trip(rng, core):
    D, Dp = h3.random_diag(rng, True), h3.random_diag(rng)
    h = h3.synthesize(D, core, Dp)
    assert h3.is_hadamard3(h)
    dec = h3.decompose_hadamard3(h)
    assert abs(dec.D[0] - 1) < 1e-15
    assert np.max(np.abs(dec.matrix() - h)) < 1e-12


def test_fourier_is_hadamard_and_decomposes_to_itself():
    dec = h3.decompose_hadamard3(h3.F)
    assert dec.core in ("F", "F+")
    assert np.allclose(dec.matrix(), h3.F)


@pytest.mark.parametrize("m", [np.eye(3), np.ones((3, 3)) / np.sqrt(3), np.zeros((2, 2))])
def test_non_hadamards_are_rejected(m):
    assert not h3.is_hadamard3(m)


@settings(max_examples=200, deadline=None)
@given(rngs(), st.sampled_from(["F", "F+"]))
def test_lemma_identities_on_generic_products(rng, core):
    prof = h3.lemma_c1_profile(h3.random_diag(rng, True), h3.random_diag(rng), h3.random_diag(rng, True), core)
    assert prof.holds
    assert prof.closed_form_residual < 1e-10


@pytest.mark.parametrize("core", ["F", "F+"])
def test_trivial_middle_diagonal_gives_monomial(core):
    prof = h3.lemma_c1_profile(np.ones(3), np.ones(3), np.ones(3), core)
    assert prof.pe and prof.holds


def test_lemma_c2_is_the_dagger_variant():
    rng = np.random.default_rng(3)
    D, K, L = h3.random_diag(rng, True), h3.random_diag(rng), h3.random_diag(rng, True)
    a = h3.lemma_c2_profile(D, K, L)
    b = h3.lemma_c1_profile(D, K, L, "F+")
    assert np.allclose(a.U, b.U)


@settings(max_examples=300, deadline=None)
@given(rngs(), st.sampled_from(["pe", "case", "full"]))
def test_trichotomy_never_falsified(rng, kind):
    verdict = h3.trichotomy_check(*h3.random_quadruple(rng, kind))
    assert verdict.branch in ("B0~B1", "B2~B3", "all-four-MU")


def test_trichotomy_rejects_bad_hypothesis():
    eye = np.eye(3, dtype=complex)
    with pytest.raises(h3.HypothesisViolated):
        h3.trichotomy_check(eye, eye, eye, h3.F)


def test_complete_set_lands_in_all_four_branch():
    bases = h3._full_mu_set()
    assert h3.trichotomy_check(*bases).branch == "all-four-MU"


def test_equivalent_pair_branch():
    rng = np.random.default_rng(0)
    B0 = np.eye(3, dtype=complex)
    B1 = B0 @ h3.random_monomial(rng)
    B2 = h3.random_hadamard(rng)
    B3 = h3.random_hadamard(rng)
    assert h3.trichotomy_check(B0, B1, B2, B3).branch == "B0~B1"
