"""Unbiasedness predicates, the factor-wise criterion for product states, and
solvers for vectors unbiased to given bases of C^2 and C^3."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import hadamard3
from .catalog import BasisMatrix, standard_basis
from .cyclotomic import OMEGA, ExactVector, cyc
from .linalg import (
    STRUCT_TOL,
    ProductBasis,
    ProductState,
    dim,
    is_exact,
    overlap2,
    ray_distance,
    to_float,
    vector_to_literal,
)

DEDUPE_TOL = 1e-8


def is_unbiased(u, v, tol: float = STRUCT_TOL) -> bool:
    if dim(u) != dim(v):
        raise ValueError(f"dimension mismatch: {dim(u)} vs {dim(v)}")
    d = dim(u)
    if is_exact(u) and is_exact(v):
        return overlap2(u, v) == cyc(Fraction(1, d))
    return abs(overlap2(to_float(u), to_float(v)) - 1 / d) <= tol


def _factor_table(b1: ProductBasis, b2: ProductBasis):
    """Exact |<s|t>|^2 table for two exact product bases, via the factors."""
    out = []
    for s in b1:
        row = []
        for t in b2:
            row.append(overlap2(s.left, t.left) * overlap2(s.right, t.right))
        out.append(row)
    return out


def is_mu_pair(b1: ProductBasis, b2: ProductBasis, tol: float = STRUCT_TOL) -> tuple:
    """(MU?, max | |<s|t>|^2 - 1/d |) over all d^2 cross pairs."""
    if b1.d != b2.d:
        raise ValueError("bases live in different dimensions")
    d = b1.d
    if b1.exact and b2.exact:
        target = cyc(Fraction(1, d))
        dev = 0.0
        for row in _factor_table(b1, b2):
            for val in row:
                if val != target:
                    dev = max(dev, abs(complex(val).real - 1 / d))
        return dev == 0.0, dev
    m1, m2 = b1.matrix(), b2.matrix()
    dev = float(np.max(np.abs(np.abs(m1.conj().T @ m2) ** 2 - 1 / d)))
    return dev <= tol, dev


def exact_overlap_table(b1: ProductBasis, b2: ProductBasis) -> list:
    """|<s|t>|^2 of the assembled vectors, computed in the field."""
    v1, v2 = b1.vectors(), b2.vectors()
    return [[overlap2(s, t) for t in v2] for s in v1]


def factor_mu_criterion(s: ProductState, b: ProductBasis, tol: float = 1e-9) -> bool:
    """Left factor unbiased to every left factor of b and right factor to every right factor."""
    if s.q != b.q:
        raise ValueError("dimension mismatch")
    exact = s.exact and b.exact
    for t in b:
        if exact:
            if not (is_unbiased(s.left, t.left) and is_unbiased(s.right, t.right)):
                return False
        elif not (is_unbiased(to_float(s.left), to_float(t.left), tol)
                  and is_unbiased(to_float(s.right), to_float(t.right), tol)):
            return False
    return True


def assembled_mu(s: ProductState, b: ProductBasis, tol: float = 1e-9) -> bool:
    """The state s (x) S is unbiased to every assembled vector of b."""
    if s.exact and b.exact:
        v = s.vector()
        return all(is_unbiased(v, t) for t in b.vectors())
    v = to_float(s.vector())
    m = b.matrix()
    return bool(np.max(np.abs(np.abs(m.conj().T @ v) ** 2 - 1 / b.d)) <= tol)


def product_sum_sides(left_states, right_state, phi, Phi, tol: float = 1e-9) -> tuple:
    """Both sides of the set criterion for {|psi_i, Psi>} against |phi, Phi>."""
    p, q = len(phi), len(Phi)
    lhs = all(
        abs(abs(np.vdot(np.kron(psi, right_state), np.kron(phi, Phi))) ** 2 - 1 / (p * q)) <= tol
        for psi in left_states
    )
    rhs = all(abs(abs(np.vdot(psi, phi)) ** 2 - 1 / p) <= tol for psi in left_states) and (
        abs(abs(np.vdot(right_state, Phi)) ** 2 - 1 / q) <= tol
    )
    return lhs, rhs


# --------------------------------------------------------------- solutions

@dataclass
class MuSolutionSet:
    """Vectors unbiased to a list of bases: a continuous family, a finite list, or nothing.

    A continuous member is ``frame @ (1, e^{i a1}, ...)/sqrt(n)`` for the free angles.
    """

    kind: str
    vectors: list = field(default_factory=list)
    free_angles: tuple = ()
    frame: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.vectors)

    def member(self, *angles) -> np.ndarray:
        if self.kind != "continuous":
            raise ValueError("only continuous solution sets have members by angle")
        n = self.frame.shape[0]
        base = np.array([1] + [np.exp(1j * a) for a in angles]) / math.sqrt(n)
        return self.frame @ base

    def float_vectors(self) -> list:
        return [to_float(v) for v in self.vectors]

    def to_json(self) -> dict:
        out = {"kind": self.kind, "free_angles": list(self.free_angles), "vectors": [vector_to_literal(v) for v in self.vectors]}
        if self.frame is not None:
            out["frame"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.frame]
        return out


def _as_matrix(b) -> np.ndarray:
    if isinstance(b, BasisMatrix):
        return b.matrix()
    return np.asarray(b, dtype=complex)


def _as_exact_basis(b):
    return b if isinstance(b, BasisMatrix) and b.exact else None


def bloch_axis(m: np.ndarray) -> np.ndarray:
    a, b = m[:, 0] / np.linalg.norm(m[:, 0])
    return np.array([2 * (np.conj(a) * b).real, 2 * (np.conj(a) * b).imag, abs(a) ** 2 - abs(b) ** 2])


def state_from_bloch(n) -> np.ndarray:
    x, y, z = n
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def dedupe_c2(bases, tol: float = DEDUPE_TOL) -> list:
    out = []
    for b in bases:
        m = _as_matrix(b)
        n = bloch_axis(m)
        if not any(abs(abs(float(n @ bloch_axis(_as_matrix(o)))) - 1) <= tol for o in out):
            out.append(b)
    return out


def same_basis_c3(a, b, tol: float = DEDUPE_TOL) -> bool:
    m = np.abs(_as_matrix(a).conj().T @ _as_matrix(b))
    return hadamard3.is_pe(m, 1e-4) and bool(np.all(np.abs(m[m > 1e-4] - 1) <= tol))


def dedupe_c3(bases, tol: float = DEDUPE_TOL) -> list:
    out = []
    for b in bases:
        if not any(same_basis_c3(b, o, tol) for o in out):
            out.append(b)
    return out


def _exact_y_pair(bases):
    """Exact |0_y>, |1_y> when the deduplicated input is exactly {z, x}."""
    if len(bases) != 2 or not all(_as_exact_basis(b) for b in bases):
        return None
    z, x = standard_basis("C2", "z").matrix(), standard_basis("C2", "x").matrix()
    axes = [bloch_axis(_as_matrix(b)) for b in bases]
    nz, nx = bloch_axis(z), bloch_axis(x)
    got = sorted(int(abs(abs(a @ nz) - 1) < 1e-12) for a in axes)
    if got == [0, 1] and any(abs(abs(a @ nx) - 1) < 1e-12 for a in axes):
        return list(standard_basis("C2", "y"))
    return None


def mu_vectors_c2(bases, tol: float = DEDUPE_TOL) -> MuSolutionSet:
    if not bases:
        raise ValueError("at least one basis is required")
    bases = dedupe_c2(bases, tol)
    if len(bases) == 1:
        return MuSolutionSet("continuous", [], ("lambda",), _as_matrix(bases[0]))
    exact = _exact_y_pair(bases)
    if exact is not None:
        return MuSolutionSet("finite", exact)
    axes = [bloch_axis(_as_matrix(b)) for b in bases]
    n = np.cross(axes[0], axes[1])
    n /= np.linalg.norm(n)
    cands = [n, -n]
    # a point unbiased to basis k lies on the great circle orthogonal to its axis
    keep = [c for c in cands if all(abs(float(c @ a)) <= 1e-9 for a in axes[2:])]
    if not keep:
        return MuSolutionSet("empty")
    return MuSolutionSet("finite", [state_from_bloch(c) for c in keep])


def orthocomplete_c3(A) -> BasisMatrix:
    """{A, diag(1,w,w^2) A, diag(1,w^2,w) A} for A unbiased to the z basis."""
    if is_exact(A):
        e = A.entries
        if any(not x for x in e):
            raise ValueError("A has a zero entry in the z basis; rotate first")
        if any(x.abs2() * 3 != A.norm2 for x in e):
            raise ValueError("A is not unbiased to the z basis")
        cols = [ExactVector([e[0], e[1] * OMEGA**k, e[2] * OMEGA ** (2 * k)], A.norm2) for k in range(3)]
        return BasisMatrix(tuple(cols))
    a = np.asarray(A, dtype=complex)
    a = a / np.linalg.norm(a)
    if np.min(np.abs(a)) <= 1e-12:
        raise ValueError("A has a zero entry in the z basis; rotate first")
    if np.max(np.abs(np.abs(a) - 1 / math.sqrt(3))) > 1e-10:
        raise ValueError("A is not unbiased to the z basis")
    w = hadamard3.OMEGA
    return BasisMatrix(tuple(a * np.array([1, w**k, w ** (2 * k)]) for k in range(3)))


def _exact_c3_pair(bases):
    """Exact H_y and H_w columns when the input is exactly {z, x}."""
    if len(bases) != 2 or not all(_as_exact_basis(b) for b in bases):
        return None
    z, x = standard_basis("C3", "z"), standard_basis("C3", "x")
    ms = {tuple(map(same_basis_c3, [b] * 2, [z, x])) for b in bases}
    if ms == {(True, False), (False, True)}:
        return list(standard_basis("C3", "y")) + list(standard_basis("C3", "w"))
    return None


def _transport_frame(w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """T with w1 ~ T (z basis) and w2 ~ T (x basis), for an MU pair."""
    dec = hadamard3.decompose_hadamard3(w1.conj().T @ w2)
    return w1 @ np.diag(dec.D)


def _c3_pair_candidates(w1: np.ndarray, w2: np.ndarray) -> list:
    T = _transport_frame(w1, w2)
    hy, hw = standard_basis("C3", "y").matrix(), standard_basis("C3", "w").matrix()
    return [T @ hy[:, k] for k in range(3)] + [T @ hw[:, k] for k in range(3)]


def unbiased_to_all(v: np.ndarray, mats, tol: float = 1e-9) -> bool:
    n = len(v)
    return all(float(np.max(np.abs(np.abs(m.conj().T @ v) ** 2 - 1 / n))) <= tol for m in mats)


def mu_vectors_c3(bases, tol: float = DEDUPE_TOL, grid: int = 600) -> MuSolutionSet:
    if not bases:
        raise ValueError("at least one basis is required")
    bases = dedupe_c3(bases, tol)
    if len(bases) == 1:
        return MuSolutionSet("continuous", [], ("xi", "eta"), _as_matrix(bases[0]))
    exact = _exact_c3_pair(bases)
    if exact is not None:
        return MuSolutionSet("finite", exact)
    mats = [_as_matrix(b) for b in bases]
    pair = next(((i, j) for i in range(len(mats)) for j in range(i + 1, len(mats))
                 if hadamard3.mu3(mats[i], mats[j], 1e-8)), None)
    if pair is not None:
        i, j = pair
        cands = _c3_pair_candidates(mats[i], mats[j])
        keep = [c for c in cands if unbiased_to_all(c, mats)]
        if _all_exact_named(bases) and keep:
            keep = _exactify_c3(keep)
        return MuSolutionSet("finite" if keep else "empty", keep)
    sols = solve_torus(mats[0], mats[1:], grid)
    return MuSolutionSet("finite" if sols else "empty", sols)


def _all_exact_named(bases) -> bool:
    return all(_as_exact_basis(b) is not None for b in bases)


def _exactify_c3(vs) -> list:
    """Swap float solutions for catalog columns they coincide with."""
    catalog = [c for lab in ("z", "x", "y", "w") for c in standard_basis("C3", lab)]
    out = []
    for v in vs:
        match = next((c for c in catalog if ray_distance(v, c.to_complex()) < 1e-9), None)
        out.append(match if match is not None else v)
    return out


def solve_torus(frame: np.ndarray, others, n: int = 600, tol: float = 1e-10) -> list:
    """Vectors frame @ (1, e^{i xi}, e^{i eta})/sqrt(3) unbiased to every basis in others.

    Grid over the torus, then Gauss-Newton style polishing with least squares
    and clustering of the polished roots.
    """
    from scipy.optimize import least_squares

    others = [np.asarray(m, dtype=complex) for m in others]
    t = 2 * np.pi * np.arange(n) / n
    step = 2 * np.pi / n
    mats = [m.conj().T @ frame for m in others]

    def resid(x):
        v = np.array([1, np.exp(1j * x[0]), np.exp(1j * x[1])]) / math.sqrt(3)
        return np.concatenate([np.abs(m @ v) ** 2 - 1 / 3 for m in mats])

    seeds = []
    e1 = np.exp(1j * t)
    for a, xa in zip(e1, t):
        v = np.stack([np.ones(n), np.full(n, a), e1]) / math.sqrt(3)
        worst = np.zeros(n)
        for m in mats:
            worst = np.maximum(worst, np.max(np.abs(np.abs(m @ v) ** 2 - 1 / 3), axis=0))
        for k in np.flatnonzero(worst <= 4 * step):
            seeds.append((worst[k], xa, t[k]))
    seeds.sort()
    roots = []
    for _, xa, xb in seeds[:400]:
        r = least_squares(resid, [xa, xb], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.max(np.abs(resid(r.x))) > tol:
            continue
        v = frame @ (np.array([1, np.exp(1j * r.x[0]), np.exp(1j * r.x[1])]) / math.sqrt(3))
        if not any(ray_distance(v, w) < 1e-6 for w in roots):
            roots.append(v)
    return roots
