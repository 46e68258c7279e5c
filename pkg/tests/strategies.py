"""Shared hypothesis strategies."""
import numpy as np
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

reals = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
angles = st.floats(0.0, 2 * np.pi, allow_nan=False, allow_infinity=False)
seeds = st.integers(0, 2**32 - 1)


def unit_vectors(n):
    return (
        arrays(np.float64, (2, n), elements=reals)
        .map(lambda a: a[0] + 1j * a[1])
        .filter(lambda v: np.linalg.norm(v) > 1e-2)
        .map(lambda v: v / np.linalg.norm(v))
    )


def rngs():
    return seeds.map(np.random.default_rng)
