import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mupb import kernel
from strategies import rngs

needs_ext = pytest.mark.skipif(kernel.compiled_match is None, reason="compiled kernel not built")


def _tables(rng, na, nb, k, target):
    # values scattered around sqrt(target) so products land near target
    s = np.sqrt(target)
    L = s + rng.normal(scale=0.05, size=(na, k))
    R = s + rng.normal(scale=0.05, size=(nb, k))
    return np.ascontiguousarray(L), np.ascontiguousarray(R)


def _same(a, b):
    return all(np.array_equal(x, y) for x, y in zip(a[:3], b[:3])) and a[3] == b[3]


@needs_ext
@settings(max_examples=60, deadline=None)
@given(rngs(), st.integers(1, 40), st.integers(1, 400), st.integers(1, 6), st.floats(0.001, 0.05))
def test_compiled_and_python_kernels_agree(rng, na, nb, k, tau):
    L, R = _tables(rng, na, nb, k, 1 / 6)
    assert _same(kernel.python_match(L, R, 1 / 6, tau, 10**6), kernel.compiled_match(L, R, 1 / 6, tau, 10**6))


@needs_ext
@settings(max_examples=30, deadline=None)
@given(rngs(), st.integers(1, 50))
def test_overflow_is_reported_identically(rng, cap):
    L, R = _tables(rng, 30, 300, 2, 0.25)
    py = kernel.python_match(L, R, 0.25, 0.05, cap)
    cy = kernel.compiled_match(L, R, 0.25, 0.05, cap)
    assert _same(py, cy)
    assert len(py[0]) <= cap


def test_python_kernel_oracle():
    L = np.array([[0.5, 0.5], [0.1, 0.5]])
    R = np.array([[0.5, 0.5], [0.5, 0.1]])
    ia, ib, res, over = kernel.python_match(L, R, 0.25, 1e-12, 10)
    assert list(zip(ia, ib)) == [(0, 0)]
    assert res[0] == 0.0 and not over


def test_python_kernel_rejects_mismatched_tables():
    with pytest.raises(ValueError):
        kernel.python_match(np.zeros((2, 3)), np.zeros((2, 2)), 0.1, 0.1, 5)


def test_backend_selection_by_environment():
    env = dict(os.environ, MUPB_KERNEL="python")
    out = subprocess.run([sys.executable, "-c", "from mupb import kernel; print(kernel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    if kernel.compiled_match is not None:
        env.pop("MUPB_KERNEL")
        out = subprocess.run([sys.executable, "-c", "from mupb import kernel; print(kernel.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "cython"


@needs_ext
def test_grid_search_is_backend_independent():
    from mupb.catalog import PairSpec, mu_pair
    from mupb.extension import brute_force_product_mu

    target = list(mu_pair(PairSpec("P0_4", 4)))
    a = brute_force_product_mu(target, 0.02, backend="python")
    b = brute_force_product_mu(target, 0.02, backend="cython")
    assert a.metadata["hits"] == b.metadata["hits"]
    assert len(a.states) == len(b.states) == 4
    assert all(np.allclose(x, y) for x, y in zip(a.vectors(), b.vectors()))
