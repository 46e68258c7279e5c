import json
import math

import numpy as np
import pytest

from mupb.acceptance import hidden_product_vector
from mupb.catalog import FamilySpec, PairSpec, TripleSpec, family_basis, mu_pair, mu_triple, standard_basis
from mupb.cyclotomic import Cyc12, ExactVector
from mupb.extension import (
    GridTooCoarse,
    brute_force_product_mu,
    classify_triple,
    extend_pair,
    extend_triple,
    hausdorff_rays,
    load_vector_file,
    no_vector_extension,
    p25_conjugation_check,
    p25_matrix,
    transform_external_vectors,
    transform_vectors,
)
from mupb.linalg import NotProduct, ProductState, factorize_product
from mupb.mu import factor_mu_criterion


def _e(k, n=6):
    return ExactVector([Cyc12(int(j == k)) for j in range(n)])


def test_p25_identity_and_involution():
    ok, w = p25_conjugation_check()
    assert ok
    P = p25_matrix(exact=False).real
    assert np.allclose(P @ P, np.eye(6))
    assert np.argmax(P[:, 1]) == 4 and np.argmax(P[:, 4]) == 1


def test_p25_x6_p25_action_on_e0():
    # P X6 P = X2 (x) X3 sends |0,0> to |1,1>, i.e. index 4
    ok, w = p25_conjugation_check()
    m = np.array([[complex(x) for x in row] for row in w["conjugated"]])
    out = m @ np.eye(6)[0]
    assert np.argmax(np.abs(out)) == 4


def test_transform_examples():
    rep = transform_vectors([hidden_product_vector(), _e(0)])
    first, second = rep["vectors"]
    assert first["product"] and (first["left"], first["right"]) == ("1_y", "1_y")
    assert second["product"] and (second["left"], second["right"]) == ("0_z", "0_z")


def test_entangled_inputs():
    bell = (np.eye(6)[0] + np.eye(6)[4]) / math.sqrt(2)
    with pytest.raises(NotProduct):
        factorize_product(bell, 2, 3)
    # (e0 + e1)/sqrt2 becomes (e0 + e4)/sqrt2 under the transposition
    rep = transform_vectors([(np.eye(6)[0] + np.eye(6)[1]) / math.sqrt(2)])
    assert not rep["vectors"][0]["product"]


def test_vector_file_round_trip(tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"vectors": [hidden_product_vector().to_json(), [[2, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]]]}))
    with pytest.warns(UserWarning):
        vs = load_vector_file(path)
    assert len(vs) == 2
    with pytest.warns(UserWarning):
        assert transform_external_vectors(path)["product_count"] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValueError):
        load_vector_file(bad)
    short = tmp_path / "short.json"
    short.write_text(json.dumps([[[1, 0], [0, 0]]]))
    with pytest.raises(ValueError):
        load_vector_file(short)


def test_no_vector_extension_on_synthetic_list():
    # the transposed images of the twelve product states are unbiased to the
    # standard basis and the X6 eigenbasis, and none is unbiased to a third basis
    from mupb.extension import permute_p25

    twelve = extend_pair(PairSpec("P0")).candidates
    raw = [permute_p25(s.vector()) for s in twelve]
    rep = no_vector_extension(raw, mu_triple(TripleSpec("T0")))
    assert rep["premise_holds"] and rep["verified"]
    assert rep["extending_vectors"] == []
    rep = no_vector_extension(raw + [np.eye(6)[0]], mu_triple(TripleSpec("T1")))
    assert not rep["premise_holds"] and not rep["verified"]


def test_p0_extension():
    rep = extend_pair(PairSpec("P0"))
    assert len(rep.candidates) == 12
    assert all(s.exact for s in rep.candidates)
    y = standard_basis("C2", "y")
    ref = [ProductState(a, A).vector().to_complex() for lab in "yw" for a in y for A in standard_basis("C3", lab)]
    assert hausdorff_rays(rep.candidate_vectors(), ref) < 1e-12
    assert sorted(set(rep.labels)) == ["T0", "T1"]
    bases = mu_pair(PairSpec("P0"))
    assert all(factor_mu_criterion(s.to_float(), b.to_float()) for s in rep.candidates for b in bases)


@pytest.mark.parametrize("spec", [
    PairSpec("P2"),
    PairSpec("P3", 6, {"zeta": 0.3, "chi": 1.2, "sigma": 0.7, "tau": 2.1}),
    PairSpec("P1", 6, {"xi": 1.1, "eta": 2.5}),
    PairSpec("P1_4", 4, {"mu": 0.4, "nu": 0.9}),
])
def test_non_extendable_pairs(spec):
    assert extend_pair(spec).candidates == []


def test_special_p1_extends():
    rep = extend_pair(PairSpec("P1", 6, {"xi": 2 * math.pi / 3, "eta": 2 * math.pi / 3}))
    assert len(rep.candidates) == 6


@pytest.mark.parametrize("label,dim", [("T0", 6), ("T1", 6), ("T0_4", 4)])
def test_triples_are_not_extendable(label, dim):
    rep = extend_triple(TripleSpec(label, dim))
    assert rep.candidates == []
    if dim == 4:
        assert "entangled" in rep.scope


def test_triple_labels():
    assert classify_triple(mu_triple(TripleSpec("T0"))) == "T0"
    assert classify_triple(mu_triple(TripleSpec("T1"))) == "T1"


def test_grid_rejects_coarse_steps():
    with pytest.raises(GridTooCoarse):
        brute_force_product_mu(list(mu_pair(PairSpec("P0"))), 0.06)


def test_grid_oracle_reproduces_the_twelve():
    res = brute_force_product_mu(list(mu_pair(PairSpec("P0"))), 0.01)
    assert res.isolated and len(res.states) == 12
    ref = extend_pair(PairSpec("P0")).candidate_vectors()
    assert hausdorff_rays(res.vectors(), ref) < 1e-6


def test_grid_flags_single_basis_as_continuous():
    res = brute_force_product_mu([family_basis(FamilySpec("I0", 6))], 0.02)
    assert not res.isolated and res.states == []


def test_grid_d4():
    res = brute_force_product_mu(list(mu_pair(PairSpec("P0_4", 4))), 0.01)
    assert res.isolated and len(res.states) == 4
    res = brute_force_product_mu(list(mu_triple(TripleSpec("T0_4", 4))), 0.01)
    assert res.isolated and res.states == []


def test_reports_are_deterministic():
    a = json.dumps(extend_pair(PairSpec("P0"), oracle_step=0.02, seed=3).to_json(), sort_keys=True, default=str)
    b = json.dumps(extend_pair(PairSpec("P0"), oracle_step=0.02, seed=3).to_json(), sort_keys=True, default=str)
    assert a == b
