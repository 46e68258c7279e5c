"""Vectors, product states and product bases for C^2 (x) C^2 and C^2 (x) C^3.

Two interchangeable representations of a state are used throughout:

* float: a 1-d complex128 numpy array of unit norm;
* exact: an :class:`~mupb.cyclotomic.ExactVector`.

Tensor indices are row-major: ``(a (x) b)[j*q + J] = a[j] * b[J]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .cyclotomic import ONE, ZERO, Cyc12, ExactVector, ScaledCyc, cyc

Vector = Union[np.ndarray, ExactVector]

STRUCT_TOL = 1e-10
CLUSTER_TOL = 1e-6


class NotProduct(Exception):
    """Raised when a vector does not factor as a tensor product."""


def is_exact(v) -> bool:
    return isinstance(v, ExactVector)


def to_float(v: Vector) -> np.ndarray:
    if isinstance(v, ExactVector):
        return v.to_complex()
    return np.asarray(v, dtype=complex)


def dim(v: Vector) -> int:
    return v.dim if isinstance(v, ExactVector) else len(v)


def _check_pair(u: Vector, v: Vector) -> None:
    if dim(u) != dim(v):
        raise ValueError(f"dimension mismatch: {dim(u)} vs {dim(v)}")
    if is_exact(u) != is_exact(v):
        raise TypeError("backend mismatch: mix of exact and float vectors")


def inner(u: Vector, v: Vector):
    """<u|v>, antilinear in the first argument."""
    _check_pair(u, v)
    if is_exact(u):
        s = ZERO
        for a, b in zip(u.entries, v.entries):
            if a and b:
                s = s + a.conj() * b
        return ScaledCyc(s, u.norm2 * v.norm2)
    return complex(np.vdot(u, v))


def overlap2(u: Vector, v: Vector):
    """|<u|v>|^2; a Cyc12 on the exact backend, a float otherwise."""
    ip = inner(u, v)
    if isinstance(ip, ScaledCyc):
        return ip.abs2()
    return abs(ip) ** 2


def tensor(a: Vector, b: Vector) -> Vector:
    if dim(a) != 2 or dim(b) not in (2, 3):
        raise ValueError(f"unsupported factor dimensions ({dim(a)}, {dim(b)})")
    if is_exact(a) != is_exact(b):
        raise TypeError("backend mismatch: mix of exact and float vectors")
    if is_exact(a):
        ent = [x * y for x in a.entries for y in b.entries]
        return ExactVector(ent, a.norm2 * b.norm2)
    return np.kron(a, b)


def canonical_phase(v: Vector, tol: float = 1e-12) -> Vector:
    """Rotate the global phase so the first nonzero entry is real and positive.

    On the exact backend the entries are divided by the first nonzero entry,
    which keeps everything inside the field.
    """
    if is_exact(v):
        for x in v.entries:
            if x:
                inv = x.inverse()
                return ExactVector([y * inv for y in v.entries], v.norm2 * inv.abs2())
        raise ValueError("zero vector")
    v = np.asarray(v, dtype=complex)
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        raise ValueError("zero vector")
    x = v[idx[0]]
    return v * (abs(x) / x)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class ProductState:
    """A product state left (x) right with left in C^2 and right in C^q."""

    left: Vector
    right: Vector

    def __post_init__(self):
        if dim(self.left) != 2 or dim(self.right) not in (2, 3):
            raise ValueError("product states live in C^2 (x) C^2 or C^2 (x) C^3")
        if is_exact(self.left) != is_exact(self.right):
            raise TypeError("backend mismatch between factors")

    @property
    def p(self) -> int:
        return 2

    @property
    def q(self) -> int:
        return dim(self.right)

    @property
    def exact(self) -> bool:
        return is_exact(self.left)

    def vector(self) -> Vector:
        return tensor(self.left, self.right)

    def to_float(self) -> ProductState:
        if not self.exact:
            return self
        return ProductState(to_float(self.left), to_float(self.right))

    def canonical(self) -> ProductState:
        return ProductState(canonical_phase(self.left), canonical_phase(self.right))

    def conj(self, left: bool = True, right: bool = True) -> ProductState:
        def c(v):
            return v.conj() if is_exact(v) else np.conj(v)
        return ProductState(c(self.left) if left else self.left, c(self.right) if right else self.right)


@dataclass(frozen=True)
class ProductBasis:
    """An ordered list of p*q product states."""

    states: tuple

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ValueError("empty basis")
        q = self.states[0].q
        if any(s.q != q for s in self.states):
            raise ValueError("mixed factor dimensions")
        if len(self.states) != 2 * q:
            raise ValueError(f"a product basis of C^2 (x) C^{q} needs {2 * q} states")

    @classmethod
    def from_pairs(cls, pairs: Sequence) -> ProductBasis:
        return cls(tuple(ProductState(a, b) for a, b in pairs))

    @property
    def p(self) -> int:
        return 2

    @property
    def q(self) -> int:
        return self.states[0].q

    @property
    def d(self) -> int:
        return 2 * self.q

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, k):
        return self.states[k]

    def to_float(self) -> ProductBasis:
        return ProductBasis(tuple(s.to_float() for s in self.states))

    def vectors(self) -> list:
        return [s.vector() for s in self.states]

    def lefts(self) -> np.ndarray:
        return np.array([to_float(s.left) for s in self.states])

    def rights(self) -> np.ndarray:
        return np.array([to_float(s.right) for s in self.states])

    def matrix(self) -> np.ndarray:
        """Float d x d matrix whose columns are the assembled states."""
        return np.array([to_float(s.vector()) for s in self.states]).T

    def gram_deviation(self) -> float:
        m = self.matrix()
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.d))))

    def is_orthonormal(self, tol: float = STRUCT_TOL) -> bool:
        if self.exact:
            vs = self.vectors()
            for i, u in enumerate(vs):
                for j, v in enumerate(vs):
                    if j < i:
                        continue
                    val = overlap2(u, v)
                    if val != (ONE if i == j else ZERO):
                        return False
            return True
        return self.gram_deviation() <= tol

    def validate(self, tol: float = STRUCT_TOL) -> ProductBasis:
        if not self.is_orthonormal(tol):
            raise ValueError("states do not form an orthonormal basis")
        return self


def factorize_product(v: Vector, p: int, q: int, tol: float = 1e-9) -> ProductState:
    """Split a vector of C^(pq) into canonical factors, or raise NotProduct.

    Float backend: rank-one test on the singular values of the p x q reshape.
    Exact backend: every 2x2 minor must vanish.
    """
    if dim(v) != p * q:
        raise ValueError(f"vector of dimension {dim(v)} is not in C^{p}(x)C^{q}")
    if p != 2 or q not in (2, 3):
        raise ValueError("unsupported factor dimensions")
    if is_exact(v):
        m = v.entries.reshape(p, q)
        for i in range(p):
            for k in range(i + 1, p):
                for j in range(q):
                    for l in range(j + 1, q):
                        if m[i, j] * m[k, l] - m[i, l] * m[k, j]:
                            raise NotProduct("nonvanishing 2x2 minor")
        r0, c0 = next((i, j) for i in range(p) for j in range(q) if m[i, j])
        pivot_inv = m[r0, c0].inverse()
        left = [m[i, c0] * pivot_inv for i in range(p)]
        right = [m[r0, j] * pivot_inv for j in range(q)]
        return ProductState(ExactVector(left), ExactVector(right))
    m = np.asarray(v, dtype=complex).reshape(p, q)
    u, s, vh = np.linalg.svd(m)
    norm = np.linalg.norm(s)
    if s[0] < (1 - tol) * norm or s[1] > tol * norm:
        raise NotProduct(f"singular values {s}")
    left = u[:, 0]
    right = vh[0]
    return ProductState(canonical_phase(left), canonical_phase(right))


# ---------------------------------------------------------------- literals

def vector_to_literal(v: Vector):
    if is_exact(v):
        return v.to_json()
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def vector_from_literal(data, renormalize: bool = True) -> Vector:
    if isinstance(data, dict):
        return ExactVector.from_json(data)
    arr = np.array([complex(re, im) for re, im in data])
    n = np.linalg.norm(arr)
    if n == 0:
        raise ValueError("zero vector literal")
    return arr / n if renormalize else arr


def basis_to_literal(b: ProductBasis) -> dict:
    return {
        "p": b.p,
        "q": b.q,
        "states": [{"left": vector_to_literal(s.left), "right": vector_to_literal(s.right)} for s in b.states],
    }


def basis_from_literal(data: dict) -> ProductBasis:
    return ProductBasis(tuple(
        ProductState(vector_from_literal(s["left"]), vector_from_literal(s["right"])) for s in data["states"]
    ))


def matrix_to_literal(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_literal(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def same_ray(u: Vector, v: Vector, tol: float = 1e-8) -> bool:
    """True when u and v differ only by a global phase."""
    val = overlap2(u, v)
    if isinstance(val, Cyc12):
        return val == ONE
    return abs(val - 1.0) <= tol


def ray_distance(u: np.ndarray, v: np.ndarray) -> float:
    """min over phases of ||u - e^{i t} v|| for unit vectors."""
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(u, v)))))


def exact_scalar(x) -> Cyc12:
    return cyc(x)
