import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mupb.catalog import standard_basis
from mupb.cyclotomic import Cyc12, ExactVector
from mupb.linalg import (
    NotProduct,
    ProductBasis,
    ProductState,
    basis_from_literal,
    basis_to_literal,
    factorize_product,
    inner,
    overlap2,
    ray_distance,
    same_ray,
    tensor,
)
from strategies import rngs, unit_vectors


def test_row_major_tensor_index():
    a = np.array([1, 2])
    b = np.array([10, 20, 30])
    t = tensor(a, b)
    assert t[1 * 3 + 2] == 2 * 30


@given(unit_vectors(2), st.sampled_from([2, 3]).flatmap(unit_vectors))
def test_factorize_recovers_the_factors(a, b):
    s = factorize_product(np.kron(a, b), 2, len(b))
    assert ray_distance(s.left, a) < 1e-7
    assert ray_distance(s.right, b) < 1e-7


@given(rngs())
def test_entangled_vectors_are_rejected(rng):
    a, b = np.eye(2)
    c, d = np.eye(3)[:2]
    w = rng.uniform(0.2, 0.8)
    v = np.sqrt(w) * np.kron(a, c) + np.sqrt(1 - w) * np.exp(1j * rng.uniform(0, 6)) * np.kron(b, d)
    with pytest.raises(NotProduct):
        factorize_product(v, 2, 3)


def test_exact_factorization():
    y = standard_basis("C2", "y")[1]
    w = standard_basis("C3", "w")[2]
    s = factorize_product(tensor(y, w), 2, 3)
    assert same_ray(s.left, y) and same_ray(s.right, w)
    bell = ExactVector([Cyc12(1), Cyc12(0), Cyc12(0), Cyc12(1)])
    with pytest.raises(NotProduct):
        factorize_product(bell, 2, 2)


def test_exact_and_float_overlaps_agree():
    for la in "zxy":
        for lb in "zxy":
            for u in standard_basis("C2", la):
                for v in standard_basis("C2", lb):
                    ex = overlap2(u, v)
                    fl = abs(np.vdot(u.to_complex(), v.to_complex())) ** 2
                    assert abs(complex(ex) - fl) < 1e-12
                    assert abs(complex(inner(u, v)) - np.vdot(u.to_complex(), v.to_complex())) < 1e-12


def test_backend_mix_is_rejected():
    u = standard_basis("C2", "z")[0]
    with pytest.raises(TypeError):
        inner(u, np.array([1, 0], dtype=complex))
    with pytest.raises(ValueError):
        inner(np.ones(2), np.ones(3))


def test_basis_literal_round_trip():
    z2, z3 = standard_basis("C2", "z"), standard_basis("C3", "x")
    b = ProductBasis(tuple(ProductState(a, A) for a in z2 for A in z3))
    assert b.is_orthonormal()
    back = basis_from_literal(basis_to_literal(b))
    assert back.exact
    assert all(same_ray(s.vector(), t.vector()) for s, t in zip(b, back))
    fb = basis_from_literal(basis_to_literal(b.to_float()))
    assert np.allclose(fb.matrix(), b.to_float().matrix())


def test_non_orthonormal_basis_is_rejected():
    z = standard_basis("C2", "z")[0]
    Z = standard_basis("C3", "z")
    states = tuple(ProductState(z, A) for A in Z) * 2
    with pytest.raises(ValueError):
        ProductBasis(states).validate()
