"""Named bases, Heisenberg-Weyl operators, product-basis families, MU pairs and
triples, and the circuits that prepare the indirect families from I0."""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .cyclotomic import I, OMEGA, ONE, ZERO, Cyc12, ExactVector, as_object_matrix, to_complex_array
from .linalg import (
    ProductBasis,
    ProductState,
    Vector,
    is_exact,
    matrix_from_literal,
    matrix_to_literal,
    to_float,
)

UNITARY_TOL = 1e-10

C2_LABELS = ("z", "x", "y")
C3_LABELS = ("z", "x", "y", "w")

FAMILY_LABELS = ("I0", "I1", "I2", "I3", "B0", "B1", "B2", "B3")
PAIR_LABELS = ("P0", "P1", "P2", "P3", "P0_4", "P1_4")
TRIPLE_LABELS = ("T0", "T1", "T0_4")


# ----------------------------------------------------------- small matrices

@dataclass(frozen=True)
class BasisMatrix:
    """An orthonormal basis stored column by column."""

    columns: tuple

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def dim(self) -> int:
        return len(self.columns)

    @property
    def exact(self) -> bool:
        return all(is_exact(c) for c in self.columns)

    def __iter__(self):
        return iter(self.columns)

    def __getitem__(self, k):
        return self.columns[k]

    def __len__(self) -> int:
        return len(self.columns)

    def matrix(self) -> np.ndarray:
        return np.array([to_float(c) for c in self.columns]).T

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix()
        return bool(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))) <= tol)


def _exact_columns(rows) -> BasisMatrix:
    m = as_object_matrix(rows)
    return BasisMatrix(tuple(ExactVector(list(m[:, k])) for k in range(m.shape[1])))


def standard_basis(space: str, label: str) -> BasisMatrix:
    """Exact z/x/y bases of C^2 and z/x/y/w bases of C^3."""
    return _standard_basis(space.upper(), label)


@functools.lru_cache(maxsize=None)
def _standard_basis(space: str, label: str) -> BasisMatrix:
    w, w2 = OMEGA, OMEGA**2
    if space == "C2":
        table = {
            "z": [[1, 0], [0, 1]],
            "x": [[1, 1], [1, -1]],
            "y": [[1, 1], [I, -I]],
        }
    elif space == "C3":
        table = {
            "z": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            "x": [[1, 1, 1], [1, w, w2], [1, w2, w]],
            "y": [[1, 1, 1], [w, w2, 1], [w, 1, w2]],
            "w": [[1, 1, 1], [w2, 1, w], [w2, w, 1]],
        }
    else:
        raise ValueError(f"unknown space {space!r}; expected C2 or C3")
    if label not in table:
        raise ValueError(f"no basis {label!r} in {space}")
    return _exact_columns(table[label])


def named_state(space: str, label: str, k: int) -> ExactVector:
    return standard_basis(space, label)[k]


def hw_operator(p: int, which: str) -> np.ndarray:
    """Exact shift X_p or phase Z_p as an object array of field elements."""
    if p not in (2, 3, 6):
        raise ValueError("p must be 2, 3 or 6")
    m = np.empty((p, p), dtype=object)
    m[:, :] = ZERO
    if which == "X":
        for j in range(p):
            m[(j + 1) % p, j] = ONE
    elif which == "Z":
        for j in range(p):
            m[j, j] = Cyc12.root(12 * j // p)
    else:
        raise ValueError("which must be 'X' or 'Z'")
    return m


def exact_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(b.shape[0]):
                for l in range(b.shape[1]):
                    out[i * b.shape[0] + k, j * b.shape[1] + l] = a[i, j] * b[k, l]
    return out


def exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty((a.shape[0], b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            s = ZERO
            for k in range(a.shape[1]):
                if a[i, k] and b[k, j]:
                    s = s + a[i, k] * b[k, j]
            out[i, j] = s
    return out


def exact_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


# ------------------------------------------------------------ parametrized

def su2(theta: float, phi: float) -> np.ndarray:
    """Rotation taking |0> to the Bloch point (theta, phi)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = cmath.exp(1j * phi)
    return np.array([[c, -s / e], [e * s, c]], dtype=complex)


def bloch_point(v) -> np.ndarray:
    v = to_float(v)
    v = v / np.linalg.norm(v)
    a, b = v
    return np.array([2 * (a.conjugate() * b).real, 2 * (a.conjugate() * b).imag, abs(a) ** 2 - abs(b) ** 2])


def bloch_angles(v) -> tuple:
    x, y, z = bloch_point(v)
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x) % (2 * math.pi) if math.hypot(x, y) > 1e-15 else 0.0
    return theta, phi


def diag_phases(*angles) -> np.ndarray:
    return np.diag([cmath.exp(1j * a) for a in angles])


def fourier3() -> np.ndarray:
    return standard_basis("C3", "x").matrix()


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def v_block(alpha: complex, beta: complex, phase: float = 0.0) -> np.ndarray:
    """Unitary fixing |0> with V|1> = alpha|1> + beta|2>, V|2> = e^{i phase}(-conj(beta)|1> + conj(alpha)|2>)."""
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-10:
        raise ValueError("|alpha|^2 + |beta|^2 must be 1")
    e = cmath.exp(1j * phase)
    return np.array([[1, 0, 0], [0, alpha, -e * beta.conjugate()], [0, beta, e * alpha.conjugate()]], dtype=complex)


def _nice_root(angle: float):
    """exp(i angle) as an exact root of unity when angle is a multiple of pi/6."""
    k = angle * 6 / math.pi
    kr = round(k)
    if abs(k - kr) < 1e-12:
        return Cyc12.root(int(kr))
    return None


class _Kit:
    """Scalar toolkit: builds states exactly when every phase is a 12th root of unity."""

    def __init__(self, exact: bool):
        self.exact = exact

    def phase(self, angle: float):
        if self.exact:
            r = _nice_root(angle)
            if r is None:
                raise _Inexact
            return r
        return cmath.exp(1j * angle)

    def omega(self, k: int):
        return OMEGA**k if self.exact else cmath.exp(2j * math.pi * k / 3)

    def vec(self, entries) -> Vector:
        if self.exact:
            return ExactVector(list(entries))
        v = np.array([complex(e) for e in entries])
        return v / np.linalg.norm(v)


class _Inexact(Exception):
    pass


def _build(fn, *args):
    try:
        return fn(_Kit(True), *args)
    except _Inexact:
        return fn(_Kit(False), *args)


# ------------------------------------------------------------------- specs

def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return {"complex": [float(v.real), float(v.imag)]}
    if isinstance(v, np.ndarray):
        if v.ndim == 2:
            return {"matrix": matrix_to_literal(v)}
        return [_jsonable(complex(x)) if np.iscomplexobj(v) else float(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _unjson(v):
    if isinstance(v, dict):
        if set(v) == {"matrix"}:
            return matrix_from_literal(v["matrix"])
        if set(v) == {"complex"}:
            return complex(*v["complex"])
        return {k: _unjson(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_unjson(x) for x in v]
    return v


@dataclass(frozen=True)
class _Spec:
    label: str
    dim: int = 6
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"label": self.label, "dim": self.dim, "params": _jsonable(self.params)}

    @classmethod
    def from_json(cls, data: dict):
        return cls(data["label"], int(data.get("dim", 6)), _unjson(data.get("params", {})))

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return self.label == other.label and self.dim == other.dim and _params_close(self.params, other.params)

    __hash__ = None


def _params_close(a, b, tol: float = 1e-9) -> bool:
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_params_close(a[k], b[k], tol) for k in a)
    if isinstance(a, str) or isinstance(b, str):
        return a == b
    try:
        x = np.asarray(a, dtype=complex)
        y = np.asarray(b, dtype=complex)
    except (TypeError, ValueError):
        return a == b
    return x.shape == y.shape and bool(np.all(np.abs(x - y) <= tol))


class FamilySpec(_Spec):
    """Product-basis family label plus parameters.

    Parameters by label (d=6 unless noted):

    * I0: none
    * I1: ``U`` 3x3 unitary; d=4: ``u`` Bloch angles ``(theta, phi)``
    * I2: ``u`` Bloch angles, ``V`` as ``{"alpha", "beta", "phase"}`` or a 3x3
      unitary fixing |0>; d=4: ``v`` Bloch angles
    * I3: ``v``, ``w`` Bloch angles
    * B0..B3: left bases ``a``, ``b``, ``c`` and right bases ``A``, ``B`` given
      by name (``"z"``, ``"x"``, ...), Bloch angles or explicit unitaries; B2
      also takes ``V`` acting on span{A1, A2}.
    """


class PairSpec(_Spec):
    pass


class TripleSpec(_Spec):
    pass


# --------------------------------------------------------------- families

def _left_basis(p) -> list:
    if isinstance(p, str):
        return list(standard_basis("C2", p))
    p = np.asarray(p)
    if p.ndim == 2:
        if not is_unitary(p):
            raise ValueError("left basis matrix is not unitary")
        return [p[:, k].astype(complex) for k in range(2)]
    u = su2(float(p[0]), float(p[1]))
    return [u[:, 0], u[:, 1]]


def _right_basis(p, q: int) -> list:
    if isinstance(p, str):
        return list(standard_basis("C3" if q == 3 else "C2", p))
    p = np.asarray(p)
    if p.ndim == 2:
        if p.shape != (q, q) or not is_unitary(p):
            raise ValueError(f"right basis must be a {q}x{q} unitary")
        return [p[:, k].astype(complex) for k in range(q)]
    if q != 2:
        raise ValueError("Bloch angles only describe C^2 bases")
    u = su2(float(p[0]), float(p[1]))
    return [u[:, 0], u[:, 1]]


def _v_matrix(p) -> np.ndarray:
    if isinstance(p, dict):
        return v_block(_as_complex(p["alpha"]), _as_complex(p["beta"]), float(p.get("phase", 0.0)))
    m = np.asarray(p, dtype=complex)
    if m.shape != (3, 3) or not is_unitary(m):
        raise ValueError("V must be a 3x3 unitary")
    if abs(abs(m[0, 0]) - 1) > 1e-10:
        raise ValueError("V must leave |0_z> invariant")
    return m


def _as_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def _assemble(pairs) -> ProductBasis:
    if not all(is_exact(a) and is_exact(b) for a, b in pairs):
        pairs = [(to_float(a), to_float(b)) for a, b in pairs]
    return ProductBasis(tuple(ProductState(a, b) for a, b in pairs))


def _apply(m: np.ndarray, v) -> np.ndarray:
    return np.asarray(m, dtype=complex) @ to_float(v)


def family_basis(spec: FamilySpec) -> ProductBasis:
    """Explicit ordered state list of a family member."""
    lab, d, p = spec.label, spec.dim, spec.params
    if d not in (4, 6):
        raise ValueError("dim must be 4 or 6")
    q = d // 2
    zl = list(standard_basis("C2", "z"))
    zr = list(standard_basis("C3" if q == 3 else "C2", "z"))
    if lab == "I0":
        return _assemble([(a, b) for a in zl for b in zr])
    if d == 4:
        if lab == "I1":
            u = su2(*p["u"])
            return _assemble([(zl[0], zr[0]), (zl[0], zr[1]), (zl[1], u[:, 0]), (zl[1], u[:, 1])])
        if lab == "I2":
            v = su2(*p["v"])
            return _assemble([(zl[0], zr[0]), (zl[1], zr[0]), (v[:, 0], zr[1]), (v[:, 1], zr[1])])
        if lab == "B0":
            a, A = _left_basis(p["a"]), _right_basis(p["A"], 2)
            return _assemble([(x, y) for x in a for y in A])
        if lab == "B1":
            a, A, B = _left_basis(p["a"]), _right_basis(p["A"], 2), _right_basis(p["B"], 2)
            return _assemble([(a[0], A[0]), (a[0], A[1]), (a[1], B[0]), (a[1], B[1])])
        if lab == "B2":
            a, b, A = _left_basis(p["a"]), _left_basis(p["b"]), _right_basis(p["A"], 2)
            return _assemble([(a[0], A[0]), (a[1], A[0]), (b[0], A[1]), (b[1], A[1])])
        raise ValueError(f"no family {lab} in d=4")
    if lab == "I1":
        U = np.asarray(p["U"], dtype=complex)
        if U.shape != (3, 3) or not is_unitary(U):
            raise ValueError("U must be a 3x3 unitary")
        return _assemble([(zl[0], zr[J]) for J in range(3)] + [(zl[1], U[:, J]) for J in range(3)])
    if lab == "I2":
        u = su2(*p["u"])
        V = _v_matrix(p["V"])
        return _assemble([
            (zl[0], zr[0]), (zl[1], zr[0]),
            (u[:, 0], zr[1]), (u[:, 0], zr[2]),
            (u[:, 1], V[:, 1]), (u[:, 1], V[:, 2]),
        ])
    if lab == "I3":
        v, w = su2(*p["v"]), su2(*p["w"])
        return _assemble([
            (zl[0], zr[0]), (zl[1], zr[0]),
            (v[:, 0], zr[1]), (v[:, 1], zr[1]),
            (w[:, 0], zr[2]), (w[:, 1], zr[2]),
        ])
    if lab == "B0":
        a, A = _left_basis(p["a"]), _right_basis(p["A"], 3)
        return _assemble([(x, y) for x in a for y in A])
    if lab == "B1":
        a, A, B = _left_basis(p["a"]), _right_basis(p["A"], 3), _right_basis(p["B"], 3)
        return _assemble([(a[0], y) for y in A] + [(a[1], y) for y in B])
    if lab == "B2":
        a, b, A = _left_basis(p["a"]), _left_basis(p["b"]), _right_basis(p["A"], 3)
        V = _v_matrix(p.get("V", {"alpha": 1, "beta": 0, "phase": 0.0}))
        Am = np.array([to_float(x) for x in A]).T
        # V acts in the frame {A0, A1, A2}
        VA1, VA2 = Am @ V[:, 1], Am @ V[:, 2]
        return _assemble([
            (a[0], A[0]), (a[1], A[0]),
            (b[0], A[1]), (b[1], VA1),
            (b[0], A[2]), (b[1], VA2),
        ])
    if lab == "B3":
        a, b, c = (_left_basis(p[k]) for k in "abc")
        A = _right_basis(p["A"], 3)
        return _assemble([
            (a[0], A[0]), (a[1], A[0]),
            (b[0], A[1]), (b[1], A[1]),
            (c[0], A[2]), (c[1], A[2]),
        ])
    raise ValueError(f"unknown family label {lab!r}")


def degenerate_reason(spec: FamilySpec, tol: float = 1e-8):
    """Why a family member collapses onto a lower family, or None."""
    lab, p = spec.label, spec.params
    if spec.dim == 6 and lab == "I1":
        U = np.asarray(p["U"], dtype=complex)
        if np.count_nonzero(np.abs(U) > tol) == 3:
            return "U is monomial: basis is I0"
    if spec.dim == 6 and lab == "I2":
        V = _v_matrix(p["V"])
        if abs(V[1, 1] * V[2, 1]) <= tol:
            return "alpha*beta = 0: basis lies in I3"
    if spec.dim == 6 and lab == "I3":
        if _same_c2_basis(p["v"], (0, 0)) and _same_c2_basis(p["w"], (0, 0)):
            return "v, w fix the z basis: basis is I0"
    if spec.dim == 4 and lab in ("I1", "I2"):
        key = "u" if lab == "I1" else "v"
        if _same_c2_basis(p[key], (0, 0)):
            return "rotation fixes the z basis: basis is I0"
    return None


def _same_c2_basis(a, b, tol: float = 1e-8) -> bool:
    n1 = bloch_point(su2(*a)[:, 0])
    n2 = bloch_point(su2(*b)[:, 0])
    return abs(abs(float(n1 @ n2)) - 1) <= tol


# ------------------------------------------------------------ pairs/triples

def _r_state(kit: _Kit, lam: float, j: int):
    s = kit.phase(lam)
    return kit.vec([1, s if j == 0 else -s])


def _s_state(kit: _Kit, mu: float, k: int):
    e = kit.phase(mu)
    if k:
        e = -e
    return kit.vec([1 + e, 1 - e])


def _big_s_column(kit: _Kit, zeta: float, chi: float, J: int):
    d = [1, kit.phase(zeta), kit.phase(chi)]
    # S = F diag(d) F^dagger; column J = sum_k d_k |k_x><k_x|J_z>
    return kit.vec([sum(d[k] * kit.omega((j * k - k * J) % 3) for k in range(3)) for j in range(3)])


def _rx_column(kit: _Kit, xi: float, eta: float, J: int):
    return kit.vec([1, kit.phase(xi) * kit.omega(J), kit.phase(eta) * kit.omega(2 * J)])


def _direct(l: str, r: str, q: int) -> ProductBasis:
    L = standard_basis("C2", l)
    R = standard_basis("C3" if q == 3 else "C2", r)
    return _assemble([(a, b) for a in L for b in R])


def _mixed(l: str, r0: str, r1: str) -> ProductBasis:
    L = standard_basis("C2", l)
    R0, R1 = standard_basis("C3", r0), standard_basis("C3", r1)
    return _assemble([(L[0], b) for b in R0] + [(L[1], b) for b in R1])


def _check_open(name: str, x: float):
    if not 0 < x < math.pi:
        raise ValueError(f"{name} must lie in (0, pi)")


def _pair_p1(kit: _Kit, xi: float, eta: float):
    z, x = standard_basis("C2", "z"), standard_basis("C2", "x")
    b1 = _direct("z", "z", 3)
    X3 = standard_basis("C3", "x")
    second = [(x[0], X3[J]) for J in range(3)] + [(x[1], _rx_column(kit, xi, eta, J)) for J in range(3)]
    return b1, _assemble(second)


def _pair_p3(kit: _Kit, zeta: float, chi: float, sigma: float, tau: float):
    z = standard_basis("C2", "z")
    Z3, X3 = standard_basis("C3", "z"), standard_basis("C3", "x")
    first = [(z[0], Z3[J]) for J in range(3)] + [(z[1], _big_s_column(kit, zeta, chi, J)) for J in range(3)]
    x = standard_basis("C2", "x")
    second = [(x[0], X3[0]), (x[1], X3[0])]
    second += [(_r_state(kit, sigma, j), X3[1]) for j in range(2)]
    second += [(_r_state(kit, tau, j), X3[2]) for j in range(2)]
    return _assemble(first), _assemble(second)


def _pair_p1_4(kit: _Kit, mu: float, nu: float):
    z, x = standard_basis("C2", "z"), standard_basis("C2", "x")
    first = [(z[0], z[0]), (z[0], z[1]), (z[1], _s_state(kit, mu, 0)), (z[1], _s_state(kit, mu, 1))]
    second = [(x[0], x[0]), (x[1], x[0]), (_r_state(kit, nu, 0), x[1]), (_r_state(kit, nu, 1), x[1])]
    return _assemble(first), _assemble(second)


def mu_pair(spec: PairSpec, verify: bool = True) -> tuple:
    lab, p = spec.label, spec.params
    if lab == "P0":
        out = (_direct("z", "z", 3), _direct("x", "x", 3))
    elif lab == "P0_4":
        out = (_direct("z", "z", 2), _direct("x", "x", 2))
    elif lab == "P1":
        out = _build(_pair_p1, float(p["xi"]), float(p["eta"]))
    elif lab == "P2":
        out = (_mixed("z", "z", "y"), _mixed("x", "x", "w"))
    elif lab == "P3":
        sigma, tau = float(p["sigma"]), float(p["tau"])
        _check_open("sigma", sigma)
        _check_open("tau", tau)
        if abs(sigma - tau) < 1e-12:
            raise ValueError("sigma and tau must differ")
        out = _build(_pair_p3, float(p["zeta"]), float(p["chi"]), sigma, tau)
    elif lab == "P1_4":
        nu = float(p["nu"])
        _check_open("nu", nu)
        mu = float(p["mu"])
        if not 0 <= mu < math.pi:
            raise ValueError("mu must lie in [0, pi)")
        out = _build(_pair_p1_4, mu, nu)
    else:
        raise ValueError(f"unknown pair label {lab!r}")
    if verify:
        from .mu import is_mu_pair

        ok, dev = is_mu_pair(*out)
        if not ok:
            raise AssertionError(f"{lab} constructor produced a non-MU pair (deviation {dev})")
    return out


def mu_triple(spec: TripleSpec, verify: bool = True) -> tuple:
    lab = spec.label
    if lab == "T0":
        out = (_direct("z", "z", 3), _direct("x", "x", 3), _direct("y", "y", 3))
    elif lab == "T1":
        out = (_direct("z", "z", 3), _direct("x", "x", 3), _mixed("y", "y", "w"))
    elif lab == "T0_4":
        out = (_direct("z", "z", 2), _direct("x", "x", 2), _direct("y", "y", 2))
    else:
        raise ValueError(f"unknown triple label {lab!r}")
    if verify:
        from .mu import is_mu_pair

        for i in range(3):
            for j in range(i + 1, 3):
                ok, dev = is_mu_pair(out[i], out[j])
                if not ok:
                    raise AssertionError(f"{lab} bases {i},{j} not MU (deviation {dev})")
    return out


# ---------------------------------------------------------------- circuits

@dataclass(frozen=True)
class Gate:
    """A gate on wire 0 (qubit) or wire 1 (q-level system).

    With ``control`` set, ``matrix`` acts on ``target`` only when the other
    wire is in the standard state ``control``.
    """

    name: str
    target: int
    matrix: np.ndarray
    control: Any = None

    def full(self, dims: tuple) -> np.ndarray:
        eye = [np.eye(n, dtype=complex) for n in dims]
        m = np.asarray(self.matrix, dtype=complex)
        if self.control is None:
            ops = list(eye)
            ops[self.target] = m
            return np.kron(ops[0], ops[1])
        cw = 1 - self.target
        proj = np.zeros((dims[cw], dims[cw]), dtype=complex)
        proj[self.control, self.control] = 1
        rest = eye[cw] - proj
        if cw == 0:
            return np.kron(proj, m) + np.kron(rest, eye[1])
        return np.kron(m, proj) + np.kron(eye[0], rest)


@dataclass(frozen=True)
class CircuitSpec:
    dims: tuple
    gates: tuple = ()

    def unitary(self) -> np.ndarray:
        d = self.dims[0] * self.dims[1]
        u = np.eye(d, dtype=complex)
        for g in self.gates:
            u = g.full(self.dims) @ u
        return u

    def describe(self) -> list:
        return [
            {"name": g.name, "target": g.target, "control": g.control} for g in self.gates
        ]


def circuit_for_family(spec: FamilySpec) -> CircuitSpec:
    """Gate sequence taking the standard product basis to the family member."""
    lab, d, p = spec.label, spec.dim, spec.params
    q = d // 2
    dims = (2, q)
    if lab == "I0":
        return CircuitSpec(dims, ())
    if d == 4:
        if lab == "I1":
            return CircuitSpec(dims, (Gate("C-u", 1, su2(*p["u"]), control=1),))
        if lab == "I2":
            return CircuitSpec(dims, (Gate("C-v", 0, su2(*p["v"]), control=1),))
        raise ValueError(f"no circuit for {lab} in d=4")
    X = to_complex_array(hw_operator(3, "X"))
    if lab == "I1":
        return CircuitSpec(dims, (Gate("C-U", 1, np.asarray(p["U"], dtype=complex), control=1),))
    if lab == "I2":
        u = su2(*p["u"])
        return CircuitSpec(dims, (
            Gate("C-V", 1, _v_matrix(p["V"]), control=1),
            Gate("u", 0, u),
            Gate("X", 1, X),
            Gate("C-u+", 0, u.conj().T, control=1),
            Gate("X+", 1, X.conj().T),
        ))
    if lab == "I3":
        return CircuitSpec(dims, (
            Gate("C-w", 0, su2(*p["w"]), control=1),
            Gate("X", 1, X),
            Gate("C-v", 0, su2(*p["v"]), control=1),
        ))
    raise ValueError(f"no circuit for label {lab!r}")


def columns_match_up_to_phase(m: np.ndarray, basis: ProductBasis, tol: float = 1e-10) -> float:
    """Max deviation between the column set of m and the basis states (as rays).

    Returns +inf when some column has no partner.
    """
    cols = [m[:, k] for k in range(m.shape[1])]
    targets = [to_float(s.vector()) for s in basis]
    used = set()
    worst = 0.0
    for c in cols:
        best, bi = math.inf, None
        for i, t in enumerate(targets):
            if i in used:
                continue
            ip = np.vdot(t, c)
            dev = float(np.max(np.abs(c - t * (ip / abs(ip))))) if abs(ip) > 1e-12 else math.inf
            if dev < best:
                best, bi = dev, i
        if bi is None or best > max(tol, 1e-6):
            return math.inf
        used.add(bi)
        worst = max(worst, best)
    return worst
