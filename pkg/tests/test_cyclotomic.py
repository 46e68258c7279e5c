import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mupb.cyclotomic import Cyc12, ExactVector, cyc

ZETA = cmath.exp(2j * cmath.pi / 12)

coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)
elements = st.builds(Cyc12, coef, coef, coef, coef)
nonzero = elements.filter(bool)


def close(a, b, tol=1e-9):
    return abs(complex(a) - complex(b)) < tol


def test_root_order_and_values():
    z = Cyc12.root(1)
    assert z ** 12 == Cyc12(1)
    assert z ** 6 == Cyc12(-1)
    for k in range(12):
        assert close(Cyc12.root(k), ZETA ** k)
    # minimal polynomial x^4 - x^2 + 1
    assert z ** 4 - z ** 2 + 1 == Cyc12(0)


@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@given(elements, elements)
def test_complex_embedding_is_a_homomorphism(a, b):
    assert close(a * b, complex(a) * complex(b))
    assert close(a + b, complex(a) + complex(b))
    assert close(a.conj(), complex(a).conjugate())


@given(nonzero)
def test_inverse(a):
    assert a * a.inverse() == Cyc12(1)
    assert (a / a) == Cyc12(1)


@given(elements, elements)
def test_conjugation_is_an_automorphism(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert a.conj().conj() == a
    assert a.abs2().is_real()


@given(elements)
def test_json_round_trip(a):
    assert Cyc12.from_json(a.to_json()) == a


def test_rational_coercion():
    assert cyc(Fraction(1, 3)) == Cyc12(Fraction(1, 3))
    assert Cyc12(2).to_fraction() == 2
    with pytest.raises(Exception):
        Cyc12.root(1).to_fraction()


@settings(max_examples=30)
@given(st.lists(st.integers(0, 11), min_size=2, max_size=6))
def test_exact_vector_norm_tag(ks):
    v = ExactVector([Cyc12.root(k) for k in ks])
    assert np.isclose(np.linalg.norm(v.to_complex()), 1.0)
    w = ExactVector.from_json(v.to_json())
    assert w == v
