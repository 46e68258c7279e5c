import numpy as np
import pytest
from hypothesis import given, settings

from mupb import hadamard3 as h3
from mupb.acceptance import factorwise_draw
from mupb.catalog import FamilySpec, PairSpec, family_basis, mu_pair, standard_basis
from mupb.cyclotomic import ExactVector
from mupb.linalg import ProductState, random_unitary, same_ray
from mupb.mu import (
    assembled_mu,
    factor_mu_criterion,
    is_mu_pair,
    is_unbiased,
    mu_vectors_c2,
    mu_vectors_c3,
    orthocomplete_c3,
    product_sum_sides,
)
from strategies import rngs, unit_vectors


@settings(max_examples=200, deadline=None)
@given(rngs())
def test_factorwise_equals_assembled(rng):
    for dim in (4, 6):
        s, b, _ = factorwise_draw(rng, dim)
        assert factor_mu_criterion(s, b) == assembled_mu(s, b)


@settings(max_examples=100, deadline=None)
@given(rngs())
def test_positive_draws_are_mu(rng):
    # mode 0 draws are constructed unbiased
    hits = 0
    while hits < 3:
        s, b, mode = factorwise_draw(rng, 6)
        if mode == 0:
            assert assembled_mu(s, b)
            hits += 1


@given(unit_vectors(2), unit_vectors(3), rngs())
def test_sum_rule_sides_agree(phi, Phi, rng):
    m = random_unitary(2, rng)
    right = random_unitary(3, rng)[:, 0]
    lhs, rhs = product_sum_sides([m[:, 0], m[:, 1]], right, phi, Phi)
    assert lhs == rhs


def test_exact_i0_vs_p0_second_basis():
    a, b = mu_pair(PairSpec("P0"))
    assert is_mu_pair(family_basis(FamilySpec("I0", 6)), b) == (True, 0.0)
    assert is_mu_pair(a, a)[0] is False


def test_is_unbiased_exact_and_float():
    z0 = standard_basis("C3", "z")[0]
    x1 = standard_basis("C3", "x")[1]
    assert is_unbiased(z0, x1)
    assert is_unbiased(z0.to_complex(), x1.to_complex())
    assert not is_unbiased(z0, z0)


def test_c2_solutions_for_z_and_x_are_exact_y():
    sol = mu_vectors_c2([standard_basis("C2", "z"), standard_basis("C2", "x")])
    assert sol.kind == "finite"
    y = standard_basis("C2", "y")
    assert all(any(same_ray(v, c) for c in y) for v in sol.vectors)


@settings(max_examples=50, deadline=None)
@given(rngs())
def test_c2_solutions_are_unbiased(rng):
    bases = [random_unitary(2, rng) for _ in range(2)]
    sol = mu_vectors_c2(bases)
    assert len(sol) == 2
    for v in sol.float_vectors():
        for m in bases:
            assert np.allclose(np.abs(m.conj().T @ v) ** 2, 0.5, atol=1e-9)


def test_c2_three_generic_bases_have_no_solution():
    rng = np.random.default_rng(1)
    assert mu_vectors_c2([random_unitary(2, rng) for _ in range(3)]).kind == "empty"


def test_c2_single_basis_is_a_circle():
    sol = mu_vectors_c2([standard_basis("C2", "z")])
    assert sol.kind == "continuous"
    v = sol.member(0.7)
    assert np.allclose(np.abs(v) ** 2, 0.5)


def test_c3_solutions_for_z_and_x_are_exact_y_and_w():
    sol = mu_vectors_c3([standard_basis("C3", "z"), standard_basis("C3", "x")])
    assert len(sol) == 6
    assert all(isinstance(v, ExactVector) for v in sol.vectors)


@settings(max_examples=30, deadline=None)
@given(rngs())
def test_c3_mu_pair_has_six_solutions(rng):
    w1 = random_unitary(3, rng)
    w2 = w1 @ h3.random_hadamard(rng)
    sol = mu_vectors_c3([w1, w2])
    assert len(sol) == 6
    for v in sol.float_vectors():
        for m in (w1, w2):
            assert np.allclose(np.abs(m.conj().T @ v) ** 2, 1 / 3, atol=1e-9)


def test_orthocomplete():
    A = standard_basis("C3", "x")[1]
    B = orthocomplete_c3(A)
    m = B.matrix()
    assert np.allclose(m.conj().T @ m, np.eye(3))
    with pytest.raises(ValueError):
        orthocomplete_c3(standard_basis("C3", "z")[0])


def test_factor_criterion_on_explicit_state():
    b = family_basis(FamilySpec("I0", 6))
    y, w = standard_basis("C2", "y")[0], standard_basis("C3", "x")[2]
    assert factor_mu_criterion(ProductState(y, w), b)
    z = standard_basis("C2", "z")[0]
    assert not factor_mu_criterion(ProductState(z, w), b)
