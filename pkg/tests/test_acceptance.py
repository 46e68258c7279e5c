"""The ten acceptance criteria. Each prints one PASS/FAIL line.

Tolerances and runtime limits are pinned inside mupb.acceptance:
  1  exact MU tables, deviation 0, < 1 s
  2  10^4 draws per dimension, 0 disagreements at 1e-9, < 30 s
  3  12 vectors from both paths, Hausdorff < 1e-6, < 5 min
  4  P0 third bases fall into exactly {T0, T1}, < 10 s
  5  listed pairs and triples have no product extension, grid agrees, < 10 min
  6  10^3 scrambles per family label, all recovered and verified, < 1 min
  7  10^2 circuits per family label, error < 1e-10, < 10 s
  8  10^4 Hadamard round trips < 1e-12, lemma identities, 10^4 trichotomy draws, < 2 min
  9  index transposition identity, hidden product vector becomes |1_y,1_y>, < 1 s
  10 ten I2 instances with |alpha beta| > 1e-4 admit nothing, alpha beta = 0 lands in I3, < 5 min
"""
import pytest

from mupb.acceptance import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
