"""3x3 complex Hadamard matrices: D F D' decomposition, product identities of
D F K F L and D F K F^dagger L, and the four-basis trichotomy."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import matrix_to_literal

OMEGA = np.exp(2j * np.pi / 3)
F = np.array([[OMEGA ** (j * k) for k in range(3)] for j in range(3)]) / np.sqrt(3)
FD = F.conj().T
CORES = {"F": F, "F+": FD}
PE_TOL = 1e-8
PERMS = tuple(itertools.permutations(range(3)))


class TheoremFalsified(AssertionError):
    """A quadruple satisfying the hypothesis landed in no branch."""


class HypothesisViolated(ValueError):
    pass


def is_hadamard3(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.shape != (3, 3):
        return False
    unitary = np.max(np.abs(m.conj().T @ m - np.eye(3))) <= tol
    flat = np.max(np.abs(np.abs(m) - 1 / math.sqrt(3))) <= tol
    return bool(unitary and flat)


def is_unitary(m, tol: float = 1e-10) -> bool:
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def mu3(a, b, tol: float = 1e-8) -> bool:
    """Bases given by the columns of a and b are mutually unbiased."""
    return is_hadamard3(np.asarray(a).conj().T @ np.asarray(b), tol)


@dataclass(frozen=True)
class HadamardDecomp:
    D: np.ndarray  # diagonal entries, D[0] == 1
    core: str  # "F" or "F+"
    Dp: np.ndarray
    residual: float

    def matrix(self) -> np.ndarray:
        return synthesize(self.D, self.core, self.Dp)

    def to_json(self) -> dict:
        return {
            "D": [[float(z.real), float(z.imag)] for z in self.D],
            "core": self.core,
            "Dp": [[float(z.real), float(z.imag)] for z in self.Dp],
            "residual": self.residual,
        }


def synthesize(D, core: str, Dp) -> np.ndarray:
    return np.diag(D) @ CORES[core] @ np.diag(Dp)


def decompose_hadamard3(h, tol: float = 1e-6) -> HadamardDecomp:
    """Write h = diag(D) . core . diag(Dp) with core F or F^dagger and D[0] = 1."""
    h = np.asarray(h, dtype=complex)
    if not is_hadamard3(h, 1e-8):
        raise ValueError("input is not a 3x3 complex Hadamard matrix")
    D = h[:, 0] / h[0, 0]
    Dp = h[0, :] * math.sqrt(3)
    core = (np.conj(D)[:, None] * h) * np.conj(Dp)[None, :]
    c11 = core[1, 1] * math.sqrt(3)
    if abs(c11 - OMEGA) <= tol:
        tag = "F"
    elif abs(c11 - OMEGA**2) <= tol:
        tag = "F+"
    else:
        raise ValueError(f"dephased core entry {c11} is neither omega nor omega^2")
    residual = float(np.max(np.abs(synthesize(D, tag, Dp) - h)))
    return HadamardDecomp(D, tag, Dp, residual)


# ------------------------------------------------------------------ lemmas

def abc(K) -> tuple:
    g, d, e = K
    w = OMEGA
    return ((g + d + e) / 3, (g + w * d + w * w * e) / 3, (g + w * w * d + w * e) / 3)


def is_pe(u, tol: float = 1e-8) -> bool:
    """u = P E with P a permutation and E diagonal, i.e. u is monomial."""
    mask = np.abs(np.asarray(u)) > tol
    return bool(np.all(mask.sum(axis=0) == 1) and np.all(mask.sum(axis=1) == 1))


def _c1_identities(u) -> tuple:
    u = np.asarray(u)
    return (u[0, 1] * u[1, 2] * u[2, 0], u[0, 2] * u[1, 0] * u[2, 1], u[0, 0] * u[1, 1] * u[2, 2])


def _c2_identities(u) -> tuple:
    u = np.asarray(u)
    return (u[0, 0] * u[1, 2] * u[2, 1], u[0, 1] * u[1, 0] * u[2, 2], u[0, 2] * u[1, 1] * u[2, 0])


def alpha_cubed(u) -> complex:
    u = np.asarray(u)
    return u[1, 0] * u[1, 1] * u[1, 2] / (u[0, 0] * u[0, 1] * u[0, 2])


def beta_from(u, alpha: complex, core: str) -> complex:
    u = np.asarray(u)
    if core == "F":
        return alpha**2 * u[0, 1] * u[2, 0] / (u[1, 0] * u[1, 1])
    return alpha**2 * u[0, 2] * u[2, 0] / (u[1, 0] * u[1, 2])


def identity_spread(u, core: str) -> float:
    vals = _c1_identities(u) if core == "F" else _c2_identities(u)
    return float(max(abs(vals[0] - vals[1]), abs(vals[1] - vals[2])))


def lemma_matrix(D, K, L, core: str) -> np.ndarray:
    """Closed form of D F K core L from a, b, c."""
    a, b, c = abc(K)
    _, al, be = D
    _, ze, et = L
    if core == "F":
        rows = [[a, ze * b, et * c], [al * b, al * ze * c, al * et * a], [be * c, be * ze * a, be * et * b]]
    else:
        rows = [[a, ze * c, et * b], [al * b, al * ze * a, al * et * c], [be * c, be * ze * b, be * et * a]]
    return np.array(rows, dtype=complex)


@dataclass(frozen=True)
class LemmaProfile:
    core: str
    U: np.ndarray
    abc: tuple
    pe: bool
    identity_spread: float
    alpha3_residual: float
    beta_residual: float
    alpha_root_match: bool
    closed_form_residual: float

    @property
    def holds(self) -> bool:
        if self.pe:
            return is_pe(self.U, 1e-8)
        return max(self.identity_spread, self.alpha3_residual, self.beta_residual) <= 1e-10 and self.alpha_root_match

    def to_json(self) -> dict:
        return {
            "core": self.core,
            "U": matrix_to_literal(self.U),
            "abc": [[float(z.real), float(z.imag)] for z in self.abc],
            "pe": self.pe,
            "identity_spread": self.identity_spread,
            "alpha3_residual": self.alpha3_residual,
            "beta_residual": self.beta_residual,
            "alpha_root_match": self.alpha_root_match,
            "closed_form_residual": self.closed_form_residual,
            "holds": self.holds,
        }


def lemma_c1_profile(D, K, L, core1: str = "F", tol: float = PE_TOL) -> LemmaProfile:
    """Profile U = D F K core1 L (core1 "F" gives the first lemma, "F+" the second)."""
    D, K, L = (np.asarray(x, dtype=complex) for x in (D, K, L))
    if abs(D[0] - 1) > 1e-12 or abs(L[0] - 1) > 1e-12:
        raise ValueError("normalization d11 = l11 = 1 violated")
    for x in (D, K, L):
        if np.max(np.abs(np.abs(x) - 1)) > 1e-10:
            raise ValueError("diagonal entries must be unimodular")
    U = np.diag(D) @ F @ np.diag(K) @ CORES[core1] @ np.diag(L)
    a, b, c = abc(K)
    closed = float(np.max(np.abs(lemma_matrix(D, K, L, core1) - U)))
    if min(abs(a), abs(b), abs(c)) <= tol:
        return LemmaProfile(core1, U, (a, b, c), True, 0.0, 0.0, 0.0, True, closed)
    spread = identity_spread(U, core1)
    a3 = alpha_cubed(U)
    alpha = D[1]
    a3res = float(abs(a3 - alpha**3))
    roots = [a3 ** (1 / 3) * OMEGA**k for k in range(3)]
    root_match = any(abs(r - alpha) <= 1e-9 for r in roots)
    bres = float(abs(beta_from(U, alpha, core1) - D[2]))
    return LemmaProfile(core1, U, (a, b, c), False, spread, a3res, bres, root_match, closed)


def lemma_c2_profile(D, K, L, tol: float = PE_TOL) -> LemmaProfile:
    return lemma_c1_profile(D, K, L, "F+", tol)


def case2_ratio(u) -> complex:
    u = np.asarray(u)
    return u[0, 2] * u[1, 1] / (u[0, 1] * u[1, 2])


def circulant_vw(phi: complex, chi: complex) -> np.ndarray:
    """F^dagger diag(1, phi, chi) F for cube roots phi, chi."""
    return FD @ np.diag([1, phi, chi]) @ F


# -------------------------------------------------------------- trichotomy

def equivalence_witness(a, b, tol: float = 1e-8):
    """(perm, phases) with b = a P diag(phases), or None."""
    m = np.asarray(a).conj().T @ np.asarray(b)
    for perm in PERMS:
        # column k of b is column perm[k] of a times a phase
        vals = np.array([m[perm[k], k] for k in range(3)])
        if np.all(np.abs(np.abs(vals) - 1) <= tol):
            return perm, vals / np.abs(vals)
    return None


def perm_matrix(perm) -> np.ndarray:
    p = np.zeros((3, 3))
    for k, j in enumerate(perm):
        p[j, k] = 1
    return p


@dataclass(frozen=True)
class TrichotomyVerdict:
    branch: str  # "B0~B1", "B2~B3" or "all-four-MU"
    witness: dict

    def to_json(self) -> dict:
        return {"branch": self.branch, "witness": self.witness}


def _mu_table(bases) -> list:
    return [[bool(i != j and mu3(bases[i], bases[j])) for j in range(4)] for i in range(4)]


def trichotomy_check(B0, B1, B2, B3, tol: float = 1e-8) -> TrichotomyVerdict:
    bases = [np.asarray(b, dtype=complex) for b in (B0, B1, B2, B3)]
    for k, b in enumerate(bases):
        if b.shape != (3, 3) or not is_unitary(b, tol):
            raise HypothesisViolated(f"B{k} is not a 3x3 unitary")
    for i in (0, 1):
        for j in (2, 3):
            if not mu3(bases[i], bases[j], tol):
                raise HypothesisViolated(f"B{i} and B{j} are not mutually unbiased")
    w01 = equivalence_witness(bases[0], bases[1], tol)
    if w01 is not None:
        perm, ph = w01
        resid = float(np.max(np.abs(bases[0] @ perm_matrix(perm) @ np.diag(ph) - bases[1])))
        return TrichotomyVerdict("B0~B1", {"perm": list(perm), "phases": [[z.real, z.imag] for z in ph], "residual": resid})
    w23 = equivalence_witness(bases[2], bases[3], tol)
    if w23 is not None:
        perm, ph = w23
        resid = float(np.max(np.abs(bases[2] @ perm_matrix(perm) @ np.diag(ph) - bases[3])))
        return TrichotomyVerdict("B2~B3", {"perm": list(perm), "phases": [[z.real, z.imag] for z in ph], "residual": resid})
    if mu3(bases[0], bases[1], tol) and mu3(bases[2], bases[3], tol):
        return TrichotomyVerdict("all-four-MU", {"mu_table": _mu_table(bases)})
    raise TheoremFalsified("no branch of the trichotomy holds")


# -------------------------------------------------------------- generators

def random_diag(rng: np.random.Generator, lead_one: bool = False) -> np.ndarray:
    ph = np.exp(2j * np.pi * rng.random(3))
    if lead_one:
        ph[0] = 1
    return ph


def random_monomial(rng: np.random.Generator) -> np.ndarray:
    return perm_matrix(PERMS[rng.integers(6)]) @ np.diag(random_diag(rng))


def random_hadamard(rng: np.random.Generator) -> np.ndarray:
    return synthesize(random_diag(rng, True), ("F", "F+")[rng.integers(2)], random_diag(rng))


def _full_mu_set() -> list:
    hy = np.diag([1, OMEGA, OMEGA]) @ F
    hw = np.diag([1, OMEGA**2, OMEGA**2]) @ F
    return [np.eye(3, dtype=complex), F.copy(), hy, hw]


def random_quadruple(rng: np.random.Generator, kind: str | None = None) -> tuple:
    """Random quadruple satisfying {B0,B1} mu {B2,B3}.

    kinds: "pe" (B1 monomial), "case" (U = V K F1 L and W = V P E with
    random cores), "full" (a transported complete MU set).
    """
    kind = kind or ("pe", "case", "full")[rng.integers(3)]
    I3 = np.eye(3, dtype=complex)
    if kind == "pe":
        return I3, random_monomial(rng), random_hadamard(rng), random_hadamard(rng)
    if kind == "case":
        s1 = ("F", "F+")[rng.integers(2)]
        f1 = ("F", "F+")[rng.integers(2)]
        V = np.diag(random_diag(rng, True)) @ CORES[s1]
        U = V @ np.diag(random_diag(rng)) @ CORES[f1] @ np.diag(random_diag(rng))
        W = V @ random_monomial(rng)
        if rng.integers(2):
            V, W = W, V
        return I3, U, V, W
    if kind == "full":
        bases = _full_mu_set()
        order = rng.permutation(4)
        T = np.diag(random_diag(rng))
        # a common left diagonal keeps B0 equivalent to the standard basis
        out = [T @ bases[k] @ random_monomial(rng) for k in order]
        B0 = out[0]
        left = B0.conj().T
        return tuple(left @ b for b in out)
    raise ValueError(f"unknown quadruple kind {kind!r}")
