import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mupb.acceptance import FAMILY_LABELS, random_family_spec
from mupb.catalog import FamilySpec, PairSpec, family_basis, mu_pair
from mupb.let import (
    LetRecord,
    apply_let,
    canonical_params,
    classify_product_basis,
    dephase_standard_form,
    family_rank,
    monomial_canonical_form,
    overlap_table,
    random_let,
    same_state_sets,
)
from mupb.linalg import random_unitary
from mupb.mu import is_mu_pair
from strategies import rngs

LABELED = [(lab, d) for d, labs in FAMILY_LABELS.items() for lab in labs]


def _sorted_table(sets):
    return np.sort(overlap_table(sets).ravel())


@settings(max_examples=30, deadline=None)
@given(rngs())
def test_let_preserves_overlaps(rng):
    sets = list(mu_pair(PairSpec("P0")))
    moved = apply_let(sets, random_let(sets, rng))
    assert np.allclose(_sorted_table(sets), _sorted_table(moved), atol=1e-12)
    assert is_mu_pair(*moved, 1e-10)[0]


def test_exact_let_stays_exact():
    sets = list(mu_pair(PairSpec("P0")))
    t = LetRecord(local_unitary=(None, None), perms=((1, 0, 2, 3, 4, 5), tuple(range(6))), conj_left=True, basis_swap=(1, 0))
    moved = apply_let(sets, t)
    assert all(b.exact for b in moved)
    assert is_mu_pair(*moved) == (True, 0.0)


def test_let_record_validation_and_json():
    with pytest.raises(ValueError):
        LetRecord(perms=((0, 0, 1),))
    with pytest.raises(ValueError):
        LetRecord(local_unitary=(np.ones((2, 2)), None))
    rng = np.random.default_rng(2)
    sets = list(mu_pair(PairSpec("P0")))
    t = random_let(sets, rng)
    back = LetRecord.from_json(t.to_json())
    a, b = apply_let(sets, t), apply_let(sets, back)
    assert all(np.allclose(x.matrix(), y.matrix()) for x, y in zip(a, b))


@pytest.mark.parametrize("label,dim", LABELED)
@settings(max_examples=20, deadline=None)
@given(rng=rngs())
def test_classifier_recovers_label_and_witness(label, dim, rng):
    spec = random_family_spec(rng, label, dim)
    b = family_basis(spec)
    scrambled = apply_let([b], random_let([b], rng))[0]
    res = classify_product_basis(scrambled)
    assert res.family.label == label
    assert res.verify(scrambled)
    assert res.family == canonical_params(spec)


@pytest.mark.parametrize("label,dim", LABELED)
@settings(max_examples=20, deadline=None)
@given(rng=rngs())
def test_canonical_params_is_idempotent_and_monotone(label, dim, rng):
    spec = random_family_spec(rng, label, dim)
    c = canonical_params(spec)
    assert canonical_params(c) == c
    assert family_rank(c) <= family_rank(spec)


def test_canonical_params_examples():
    U = random_unitary(3, np.random.default_rng(0))
    assert canonical_params(FamilySpec("I1", 6, {"U": U})) == canonical_params(FamilySpec("I1", 6, {"U": U.conj()}))
    assert canonical_params(FamilySpec("I1", 6, {"U": np.eye(3)})).label == "I0"
    deg = FamilySpec("I2", 6, {"u": (1.0, 0.0), "V": {"alpha": 1.0, "beta": 0.0, "phase": 0.0}})
    assert canonical_params(deg).label == "I3"


@settings(max_examples=30, deadline=None)
@given(rngs(), st.integers(0, 5))
def test_monomial_canonical_form_is_invariant(rng, k):
    from mupb.hadamard3 import PERMS, random_diag, random_hadamard

    h = random_hadamard(rng)
    form = monomial_canonical_form(h)[0]
    P = np.eye(3)[list(PERMS[k])]
    moved = np.diag(random_diag(rng)) @ P @ h @ np.diag(random_diag(rng)) @ np.eye(3)[list(PERMS[(k + 1) % 6])]
    assert np.allclose(monomial_canonical_form(moved)[0], form, atol=1e-8)


@pytest.mark.parametrize("pair", ["P0", "P2", "P0_4"])
def test_dephase_is_idempotent_and_let_invariant(pair):
    sets = list(mu_pair(PairSpec(pair, 4 if pair.endswith("_4") else 6)))
    form, t = dephase_standard_form(sets)
    again, _ = dephase_standard_form(form)
    assert all(same_state_sets([a], [b]) for a, b in zip(form, again))
    assert all(same_state_sets([a], [b]) for a, b in zip(apply_let(sets, t), form))
    moved = apply_let(sets, random_let(sets, np.random.default_rng(4)))
    other, _ = dephase_standard_form(moved)
    assert all(same_state_sets([a], [b]) for a, b in zip(form, other))
