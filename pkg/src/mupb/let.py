"""Local equivalence transformations (LETs) and canonical forms.

A LET acts on a list of product bases by, in this order: complex conjugation
of either factor, a local unitary u (x) U, per-state phases, permutations of
the states inside each basis, and a permutation of the bases themselves.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import FamilySpec, bloch_point, family_basis, su2
from .cyclotomic import Cyc12, ExactVector
from .linalg import (
    ProductBasis,
    ProductState,
    is_exact,
    matrix_from_literal,
    matrix_to_literal,
    to_float,
)

PAIR_TOL = 1e-8
KEY_TOL = 1e-8
RAY_TOL = 1e-6

# containment order of the families; canonical_params never increases it
FAMILY_RANK = {6: {"I0": 0, "I1": 1, "I3": 1, "I2": 2}, 4: {"I0": 0, "I1": 1, "I2": 1}}


class ClassificationError(RuntimeError):
    """Internal consistency failure: the input factors do not pair up."""


# ------------------------------------------------------------------ record

@dataclass(frozen=True)
class LetRecord:
    local_unitary: tuple = (None, None)
    phases: tuple | None = None
    perms: tuple | None = None
    conj_left: bool = False
    conj_right: bool = False
    basis_swap: tuple | None = None

    def __post_init__(self):
        for m in self.local_unitary:
            if m is None or isinstance(m, tuple):
                continue
            m = np.asarray(m, dtype=complex)
            if m.shape[0] != m.shape[1] or np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > 1e-9:
                raise ValueError("local unitary is not unitary")
        for p in self.perms or ():
            if sorted(p) != list(range(len(p))):
                raise ValueError(f"{p} is not a permutation")
        if self.basis_swap is not None and sorted(self.basis_swap) != list(range(len(self.basis_swap))):
            raise ValueError("basis_swap is not a permutation")

    def to_json(self) -> dict:
        def mat(m):
            if m is None:
                return None
            if isinstance(m, tuple):
                return {"exact": [[x.to_json() for x in row] for row in m[0]], "norm2": m[1].to_json()}
            return matrix_to_literal(m)

        return {
            "local_unitary": [mat(m) for m in self.local_unitary],
            "phases": None if self.phases is None else [list(map(float, p)) for p in self.phases],
            "perms": None if self.perms is None else [list(map(int, p)) for p in self.perms],
            "conj_left": self.conj_left,
            "conj_right": self.conj_right,
            "basis_swap": None if self.basis_swap is None else list(self.basis_swap),
        }

    @classmethod
    def from_json(cls, data: dict) -> LetRecord:
        def mat(m):
            if m is None:
                return None
            if isinstance(m, dict):
                ent = np.array([[Cyc12.from_json(x) for x in row] for row in m["exact"]], dtype=object)
                return (ent, Cyc12.from_json(m["norm2"]))
            return matrix_from_literal(m)

        return cls(
            tuple(mat(m) for m in data.get("local_unitary", (None, None))),
            None if data.get("phases") is None else tuple(tuple(p) for p in data["phases"]),
            None if data.get("perms") is None else tuple(tuple(p) for p in data["perms"]),
            bool(data.get("conj_left", False)),
            bool(data.get("conj_right", False)),
            None if data.get("basis_swap") is None else tuple(data["basis_swap"]),
        )


def _conj(v):
    return v.conj() if is_exact(v) else np.conj(v)


def _apply_matrix(m, v):
    if m is None:
        return v
    if isinstance(m, tuple):
        if is_exact(v):
            return v.apply(m[0], m[1])
        ent = np.array([[complex(x) for x in row] for row in m[0]]) / math.sqrt(complex(m[1]).real)
        return ent @ to_float(v)
    return np.asarray(m, dtype=complex) @ to_float(v)


def _apply_phase(v, angle: float):
    if angle == 0:
        return v
    if is_exact(v):
        k = angle * 6 / math.pi
        if abs(k - round(k)) < 1e-12:
            return ExactVector([x * Cyc12.root(int(round(k))) for x in v.entries], v.norm2)
        v = to_float(v)
    return v * np.exp(1j * angle)


def _state(l, r) -> ProductState:
    if is_exact(l) != is_exact(r):
        l, r = to_float(l), to_float(r)
    return ProductState(l, r)


def apply_let(sets, t: LetRecord) -> list:
    sets = list(sets)
    if len({b.d for b in sets}) > 1:
        raise ValueError("bases of different dimensions")
    if t.phases is not None and len(t.phases) != len(sets):
        raise ValueError("phase table does not match the number of bases")
    if t.perms is not None and len(t.perms) != len(sets):
        raise ValueError("permutation table does not match the number of bases")
    u, U = t.local_unitary
    out = []
    for bi, b in enumerate(sets):
        states = []
        for si, s in enumerate(b):
            l, r = s.left, s.right
            if t.conj_left:
                l = _conj(l)
            if t.conj_right:
                r = _conj(r)
            l, r = _apply_matrix(u, l), _apply_matrix(U, r)
            if t.phases is not None:
                l = _apply_phase(l, float(t.phases[bi][si]))
            states.append(_state(l, r))
        if t.perms is not None:
            perm = t.perms[bi]
            if len(perm) != len(states):
                raise ValueError("permutation length mismatch")
            states = [states[k] for k in perm]
        out.append(ProductBasis(tuple(states)))
    if t.basis_swap is not None:
        if len(t.basis_swap) != len(out):
            raise ValueError("basis_swap length mismatch")
        out = [out[k] for k in t.basis_swap]
    return out


def random_let(sets, rng: np.random.Generator, conj: bool = True) -> LetRecord:
    from .linalg import random_unitary

    q = sets[0].q
    return LetRecord(
        (random_unitary(2, rng), random_unitary(q, rng)),
        tuple(tuple(2 * math.pi * rng.random(len(b))) for b in sets),
        tuple(tuple(int(x) for x in rng.permutation(len(b))) for b in sets),
        bool(conj and rng.integers(2)),
        bool(conj and rng.integers(2)),
        tuple(int(x) for x in rng.permutation(len(sets))),
    )


# ----------------------------------------------------------------- helpers

def _unit(v) -> np.ndarray:
    v = to_float(v)
    return v / np.linalg.norm(v)


def _same_ray(a, b, tol: float = RAY_TOL) -> bool:
    return abs(abs(np.vdot(a, b)) - 1) <= tol


def _u_from_pair(a: np.ndarray) -> np.ndarray:
    """Unitary sending a to |0> and its orthogonal partner to |1>."""
    a = a / np.linalg.norm(a)
    perp = np.array([-np.conj(a[1]), np.conj(a[0])])
    return np.array([a.conj(), perp.conj()])


def _rz(t: float) -> np.ndarray:
    return np.diag([1, np.exp(1j * t)])


def _bloch_theta_phi(n) -> tuple:
    theta = math.acos(max(-1.0, min(1.0, float(n[2]))))
    phi = math.atan2(float(n[1]), float(n[0])) % (2 * math.pi) if math.hypot(n[0], n[1]) > 1e-12 else 0.0
    if phi > 2 * math.pi - 1e-10:
        phi = 0.0
    return theta, phi


def _group_left(lefts, tol: float = PAIR_TOL) -> list:
    """Indices grouped by the C^2 basis their left factor belongs to."""
    axes = [bloch_point(l) for l in lefts]
    groups = []
    for i, n in enumerate(axes):
        for g in groups:
            if abs(abs(float(n @ axes[g[0]])) - 1) <= tol:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _split_sign(idx, lefts, tol: float = PAIR_TOL) -> tuple:
    """Split a group into states along the first ray and along its orthogonal partner."""
    ref = bloch_point(lefts[idx[0]])
    plus = [i for i in idx if float(bloch_point(lefts[i]) @ ref) > 0]
    minus = [i for i in idx if float(bloch_point(lefts[i]) @ ref) <= 0]
    return plus, minus


def _tol_argmin(keys, tol: float = KEY_TOL) -> int:
    keys = np.asarray(keys, dtype=float)
    alive = np.arange(len(keys))
    for k in range(keys.shape[1]):
        col = keys[alive, k]
        alive = alive[col <= col.min() + tol]
        if len(alive) == 1:
            break
    return int(alive[0])


def _real_rotation_gauge(v: np.ndarray) -> tuple:
    """Monomial M with M v = [[c, -s], [s, c]] up to column phases; c >= s >= 0."""
    P = np.eye(2)
    if abs(v[0, 0]) < abs(v[1, 0]) - 1e-12:
        P = np.array([[0, 1], [1, 0]])
    w = P @ v
    p, q = w[0, 0], w[1, 0]
    d1 = np.conj(p) / abs(p)
    d2 = np.conj(q) / abs(q) if abs(q) > 1e-12 else np.conj(w[1, 1]) / abs(w[1, 1])
    return np.diag([d1, d2]) @ P, float(abs(p)), float(abs(q))


def is_monomial(m, tol: float = 1e-8) -> bool:
    mask = np.abs(np.asarray(m)) > tol
    return bool(np.all(mask.sum(axis=0) == 1) and np.all(mask.sum(axis=1) == 1))


def _gauge_fix(m: np.ndarray, tol: float = 1e-9) -> tuple:
    """Row/column phases making a spanning forest of nonzero entries real positive."""
    n = m.shape[0]
    rp = np.ones(n, dtype=complex)
    cp = np.ones(n, dtype=complex)
    rf = [False] * n
    cf = [False] * n
    for i in range(n):
        for j in range(n):
            e = m[i, j]
            if abs(e) <= tol or (rf[i] and cf[j]):
                continue
            if not rf[i] and not cf[j]:
                rf[i] = True
            if rf[i] and not cf[j]:
                x = rp[i] * e
                cp[j] = np.conj(x) / abs(x)
                cf[j] = True
            else:
                x = e * cp[j]
                rp[i] = np.conj(x) / abs(x)
                rf[i] = True
    out = rp[:, None] * m * cp[None, :]
    out[np.abs(out) <= tol] = 0
    return out, rp, cp


def monomial_canonical_form(m: np.ndarray) -> tuple:
    """Min-key representative of {D1 P m Q D2}: (form, rowperm, rowphases)."""
    n = m.shape[0]
    perms = list(itertools.permutations(range(n)))
    if np.min(np.abs(m)) > 1e-6:
        # no zeros: first row and column real positive, batched over all perms
        idx = np.array(perms)
        rows = np.repeat(idx, len(perms), axis=0)
        cols = np.tile(idx, (len(perms), 1))
        w = m[rows[:, :, None], cols[:, None, :]]
        rp = np.conj(w[:, :, 0]) / np.abs(w[:, :, 0])
        w = w * rp[:, :, None]
        cp = np.conj(w[:, 0, :]) / np.abs(w[:, 0, :])
        w = w * cp[:, None, :]
        keys = np.concatenate([w.real.reshape(len(w), -1), w.imag.reshape(len(w), -1)], axis=1)
        k = _tol_argmin(keys)
        return w[k], tuple(int(x) for x in rows[k]), rp[k]
    keys, data = [], []
    for rperm in perms:
        for cperm in perms:
            w = m[list(rperm)][:, list(cperm)]
            fixed, rp, cp = _gauge_fix(w)
            keys.append(np.concatenate([fixed.real.ravel(), fixed.imag.ravel()]))
            data.append((fixed, rperm, rp))
    best = _tol_argmin(keys)
    return data[best]


def _perm_matrix_rows(perm) -> np.ndarray:
    n = len(perm)
    p = np.zeros((n, n))
    for i, k in enumerate(perm):
        p[i, k] = 1
    return p


def fit_phases_perms(src, dst, tol: float = RAY_TOL) -> tuple:
    """Phases (indexed by source) and perm with dst[k] = e^{i phase} src[perm[k]]."""
    src = [(_unit(s.left), to_float(s.right)) for s in src]
    dst = [(_unit(s.left), to_float(s.right)) for s in dst]
    n = len(src)
    phases = [0.0] * n
    perm = [None] * n
    used = set()
    for k, (dl, dr) in enumerate(dst):
        for i, (sl, sr) in enumerate(src):
            if i in used:
                continue
            if _same_ray(sl, dl, tol) and _same_ray(sr / np.linalg.norm(sr), dr / np.linalg.norm(dr), tol):
                ip = np.vdot(np.kron(sl, sr), np.kron(dl, dr))
                phases[i] = float(np.angle(ip))
                perm[k] = i
                used.add(i)
                break
        else:
            raise ClassificationError(f"no source state matches target state {k}")
    return tuple(phases), tuple(perm)


def bases_match(a: ProductBasis, b: ProductBasis, tol: float = 1e-8) -> bool:
    """Same states in the same order, as vectors."""
    if len(a) != len(b):
        return False
    return all(
        np.max(np.abs(to_float(s.vector()) - to_float(t.vector()))) <= tol for s, t in zip(a, b)
    )


def same_state_sets(a, b, tol: float = 1e-6) -> bool:
    """Lists of bases that agree basis by basis as sets of rays."""
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        vx = [to_float(s.vector()) for s in x]
        vy = [to_float(s.vector()) for s in y]
        used = set()
        for v in vx:
            j = next((j for j, w in enumerate(vy) if j not in used and abs(abs(np.vdot(v, w)) - 1) <= tol), None)
            if j is None:
                return False
            used.add(j)
    return True


def overlap_table(sets) -> np.ndarray:
    vs = np.array([to_float(s.vector()) for b in sets for s in b])
    return np.abs(vs.conj() @ vs.T) ** 2


# ----------------------------------------------------------- classification

@dataclass
class ClassificationResult:
    family: FamilySpec
    witness: LetRecord
    case_tag: int
    notes: list = field(default_factory=list)

    def reproduce(self) -> ProductBasis:
        return apply_let([family_basis(self.family).to_float()], self.witness)[0]

    def verify(self, basis: ProductBasis, tol: float = 1e-8) -> bool:
        return bases_match(self.reproduce(), basis.to_float(), tol)

    def to_json(self) -> dict:
        return {
            "family": self.family.label,
            "dim": self.family.dim,
            "spec": self.family.to_json(),
            "case": self.case_tag,
            "witness": self.witness.to_json(),
            "notes": list(self.notes),
        }


def _witness(basis: ProductBasis, spec: FamilySpec, cl: bool, cr: bool, u, U) -> LetRecord:
    uw = u.conj().T
    Uw = U.conj().T
    if cl:
        uw = uw.conj()
    if cr:
        Uw = Uw.conj()
    base = LetRecord((uw, Uw), conj_left=cl, conj_right=cr)
    pre = apply_let([family_basis(spec).to_float()], base)[0]
    phases, perm = fit_phases_perms(pre.states, basis.states)
    return LetRecord((uw, Uw), (phases,), (perm,), cl, cr)


def _result(basis, spec, cl, cr, u, U, case) -> ClassificationResult:
    return ClassificationResult(spec, _witness(basis, spec, cl, cr, u, U), case)


def _frame(cols) -> np.ndarray:
    m = np.array([to_float(c) / np.linalg.norm(to_float(c)) for c in cols]).T
    if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))) > 1e-8:
        raise ClassificationError("right factors expected to be orthonormal are not")
    return m


def _i3_spec(tv, tw, pw) -> FamilySpec:
    return FamilySpec("I3", 6, {"v": (tv, 0.0), "w": (tw, pw)})


def classify_product_basis(b: ProductBasis) -> ClassificationResult:
    """Family, canonical parameters and a witnessing LET for a product basis."""
    b = b.to_float()
    if not b.is_orthonormal(1e-8):
        raise ValueError("input is not an orthonormal product basis")
    lefts = [_unit(s.left) for s in b]
    rights = [_unit(s.right) for s in b]
    groups = _group_left(lefts)
    sizes = sorted(len(g) for g in groups)
    if b.q == 2:
        if sizes == [4]:
            return _case_direct_or_i1(b, lefts, rights, groups[0], 4)
        if sizes == [2, 2]:
            return _case_i2_d4(b, lefts, rights, groups)
        raise ClassificationError(f"left factor groups {sizes} impossible in d=4")
    if sizes == [6]:
        return _case_direct_or_i1(b, lefts, rights, groups[0], 6)
    if sizes == [2, 4]:
        return _case_i2(b, lefts, rights, groups)
    if sizes == [2, 2, 2]:
        return _case_i3(b, lefts, rights, groups)
    raise ClassificationError(f"left factor groups {sizes} impossible in d=6")


def _case_direct_or_i1(b, lefts, rights, group, d) -> ClassificationResult:
    plus, minus = _split_sign(group, lefts)
    q = d // 2
    if len(plus) != q or len(minus) != q:
        raise ClassificationError("left factors do not split evenly")
    Ta, Tb = _frame([rights[i] for i in plus]), _frame([rights[i] for i in minus])
    a, ap = lefts[plus[0]], lefts[minus[0]]
    uh = Ta.conj().T @ Tb
    if is_monomial(uh):
        spec = FamilySpec("I0", d)
        return _result(b, spec, False, False, _u_from_pair(a), Ta.conj().T, 1)
    if q == 2:
        M, c, s = _real_rotation_gauge(uh)
        theta = 2 * math.acos(min(1.0, c))
        spec = FamilySpec("I1", 4, {"u": (theta, 0.0)})
        return _result(b, spec, False, False, _u_from_pair(a), M @ Ta.conj().T, 1)
    best = None
    cands = []
    for swap in (0, 1):
        for cr in (False, True):
            first, second = (Ta, Tb) if swap == 0 else (Tb, Ta)
            if cr:
                first, second = first.conj(), second.conj()
            form, rperm, rp = monomial_canonical_form(first.conj().T @ second)
            cands.append((form, rperm, rp, swap, cr, first))
    keys = [np.concatenate([c[0].real.ravel(), c[0].imag.ravel()]) for c in cands]
    form, rperm, rp, swap, cr, first = cands[_tol_argmin(keys)]
    U = np.diag(rp) @ _perm_matrix_rows(rperm) @ first.conj().T
    lead = a if swap == 0 else ap
    lead = lead.conj() if False else lead
    spec = FamilySpec("I1", 6, {"U": form})
    return _result(b, spec, False, cr, _u_from_pair(lead), U, 1)


def _case_i2(b, lefts, rights, groups) -> ClassificationResult:
    ga = next(g for g in groups if len(g) == 2)
    gb = next(g for g in groups if len(g) == 4)
    if not _same_ray(rights[ga[0]], rights[ga[1]]):
        raise ClassificationError("the two-state left basis does not share a right factor")
    A = rights[ga[0]]
    bp, bm = _split_sign(gb, lefts)
    if len(bp) != 2 or len(bm) != 2:
        raise ClassificationError("four-state left basis does not split evenly")
    best = None
    for s1 in (0, 1):
        u0 = _u_from_pair(lefts[ga[s1]])
        for role, other in ((bp, bm), (bm, bp)):
            theta, phi = _bloch_theta_phi(bloch_point(u0 @ lefts[role[0]]))
            if theta > math.pi / 2 + 1e-9:
                continue
            if best is None or theta < best[0] - 1e-12:
                best = (theta, phi, u0, role, other)
    theta, phi, u0, role, other = best
    u = _rz(-phi) @ u0
    U0 = _frame([A, rights[role[0]], rights[role[1]]]).conj().T
    vraw = (U0 @ np.array([rights[i] for i in other]).T)[1:, :]
    M, c, s = _real_rotation_gauge(vraw)
    U = np.block([[np.eye(1), np.zeros((1, 2))], [np.zeros((2, 1)), M]]) @ U0
    theta = min(theta, math.pi / 2)
    if s <= 1e-9:
        return _result(b, _i3_spec(theta, theta, 0.0), False, False, u, U, 2)
    spec = FamilySpec("I2", 6, {"u": (theta, 0.0), "V": {"alpha": c, "beta": s, "phase": 0.0}})
    return _result(b, spec, False, False, u, U, 2)


def _case_i3(b, lefts, rights, groups) -> ClassificationResult:
    for g in groups:
        if not _same_ray(rights[g[0]], rights[g[1]]):
            raise ClassificationError("a left basis pair does not share its right factor")
    cands = []
    for roles in itertools.permutations(range(3)):
        gz, gv, gw = (groups[k] for k in roles)
        for cl in (False, True):
            L = [l.conj() for l in lefts] if cl else lefts
            for zs in (0, 1):
                u0 = _u_from_pair(L[gz[zs]])
                nv = bloch_point(u0 @ L[gv[0]])
                nw = bloch_point(u0 @ L[gw[0]])
                for sv in (1, -1):
                    tv, pv = _bloch_theta_phi(sv * nv)
                    if tv > math.pi / 2 + 1e-9:
                        continue
                    rot = -pv if math.sin(tv) > 1e-12 else 0.0
                    for sw in (1, -1):
                        tw, pw = _bloch_theta_phi(sw * nw)
                        if tw > math.pi / 2 + 1e-9:
                            continue
                        pw = (pw + rot) % (2 * math.pi)
                        if pw > 2 * math.pi - 1e-10 or math.sin(tw) <= 1e-12:
                            pw = 0.0
                        key = (min(tv, math.pi / 2), min(tw, math.pi / 2), pw)
                        cands.append((key, cl, u0, rot, (gz[0], gv[0], gw[0])))
    k = _tol_argmin([c[0] for c in cands])
    (tv, tw, pw), cl, u0, rot, (iz, iv, iw) = cands[k]
    u = _rz(rot) @ u0
    R = [rights[iz], rights[iv], rights[iw]]
    U = _frame(R).conj().T
    return _result(b, _i3_spec(tv, tw, pw), cl, False, u, U, 3)


def _case_i2_d4(b, lefts, rights, groups) -> ClassificationResult:
    ga, gb = groups
    if not _same_ray(rights[ga[0]], rights[ga[1]]) or not _same_ray(rights[gb[0]], rights[gb[1]]):
        raise ClassificationError("left pairs do not share right factors")
    best = None
    for first, second in ((ga, gb), (gb, ga)):
        for s1 in (0, 1):
            u0 = _u_from_pair(lefts[first[s1]])
            for r in second:
                theta, phi = _bloch_theta_phi(bloch_point(u0 @ lefts[r]))
                if theta > math.pi / 2 + 1e-9:
                    continue
                if best is None or theta < best[0] - 1e-12:
                    best = (theta, phi, u0, first, second)
    theta, phi, u0, first, second = best
    u = _rz(-phi) @ u0
    U = _frame([rights[first[0]], rights[second[0]]]).conj().T
    spec = FamilySpec("I2", 4, {"v": (min(theta, math.pi / 2), 0.0)})
    return _result(b, spec, False, False, u, U, 2)


def canonical_params(spec: FamilySpec) -> FamilySpec:
    """Canonical representative of the LET class of a family member."""
    if spec.label == "I0":
        return FamilySpec("I0", spec.dim)
    return classify_product_basis(family_basis(spec)).family


def family_rank(spec: FamilySpec) -> int:
    if spec.label.startswith("B"):
        return 3
    return FAMILY_RANK[spec.dim][spec.label]


# -------------------------------------------------------- dephased form

def _is_direct(b: ProductBasis) -> bool:
    lefts = [_unit(s.left) for s in b]
    if len(_group_left(lefts)) != 1:
        return False
    rights = [_unit(s.right) for s in b]
    reps = []
    for r in rights:
        if not any(_same_ray(r, x) for x in reps):
            reps.append(r)
    return len(reps) == b.q


def _orthonormal_subsets(vecs, q) -> list:
    reps = []
    for v in vecs:
        if not any(_same_ray(v, x) for x in reps):
            reps.append(v)
    out = []
    for combo in itertools.combinations(range(len(reps)), q):
        m = np.array([reps[k] for k in combo]).T
        if np.max(np.abs(m.conj().T @ m - np.eye(q))) <= 1e-8:
            out.append([reps[k] for k in combo])
    return out


def _left_pairs(lefts) -> list:
    groups = _group_left(lefts)
    out = []
    for g in groups:
        plus, minus = _split_sign(g, lefts)
        if plus and minus:
            out.append((lefts[plus[0]], lefts[minus[0]]))
    return out


def _canon_factor(m: np.ndarray) -> np.ndarray:
    """Rotate each row so its first non-negligible entry is real positive."""
    idx = np.argmax(np.abs(m) > 1e-9, axis=1)
    lead = m[np.arange(len(m)), idx]
    return m * (np.abs(lead) / lead)[:, None]


def dephase_standard_form(sets, tol: float = KEY_TOL) -> tuple:
    """Canonical LET representative of a list of product bases, with its witness.

    The first basis is put into standard factor form, an anchor state of the
    second basis becomes |0_x, 0_x>, and every state is phase-normalized.
    The representative is the minimum over all remaining discrete choices.
    """
    sets = [b.to_float() for b in sets]
    if not sets:
        raise ValueError("empty list of bases")
    n = len(sets)
    q = sets[0].q
    direct = [k for k in range(n) if _is_direct(sets[k])]
    firsts = direct or list(range(n))
    L = [np.array([_unit(s.left) for s in b]) for b in sets]
    R = [np.array([_unit(s.right) for s in b]) for b in sets]
    cands = []
    for f in firsts:
        rest = [k for k in range(n) if k != f]
        for order in itertools.permutations(rest):
            order = (f,) + order
            for cl in (False, True):
                for cr in (False, True):
                    Lc = [x.conj() if cl else x for x in L]
                    Rc = [x.conj() if cr else x for x in R]
                    for a, ap in _left_pairs(list(Lc[f])):
                        for lpair in ((a, ap), (ap, a)):
                            u0 = _u_from_pair(lpair[0])
                            for triple in _orthonormal_subsets(list(Rc[f]), q):
                                for rord in itertools.permutations(range(q)):
                                    U0 = np.array([triple[k] for k in rord]).conj()
                                    cands.extend(_anchor_candidates(order, cl, cr, u0, U0, Lc, Rc))
    if not cands:
        raise ValueError("first basis cannot be brought to standard factor form")
    best = cands[_tol_argmin([c["key"] for c in cands], tol)]
    return _realize(sets, best)


def _anchor_candidates(order, cl, cr, u0, U0, Lc, Rc) -> list:
    out = []
    anchors = [None]
    if len(order) > 1:
        sec = order[1]
        anchors = []
        for k in range(len(Lc[sec])):
            l = u0 @ Lc[sec][k]
            r = U0 @ Rc[sec][k]
            if np.min(np.abs(l)) > 1e-6 and np.min(np.abs(r)) > 1e-6:
                anchors.append((np.conj(l / np.abs(l)) * (l[0] / abs(l[0])), np.conj(r / np.abs(r)) * (r[0] / abs(r[0]))))
        if not anchors:
            anchors = [None]
    for anc in anchors:
        u, U = u0, U0
        if anc is not None:
            u = np.diag(anc[0]) @ u0
            U = np.diag(anc[1]) @ U0
        key = []
        for bi in order:
            lt = _canon_factor(Lc[bi] @ u.T)
            rt = _canon_factor(Rc[bi] @ U.T)
            rows = np.concatenate([lt.real, lt.imag, rt.real, rt.imag], axis=1)
            srt = np.lexsort(np.round(rows, 6).T[::-1])
            key.append(rows[srt].ravel())
        out.append({"key": np.concatenate(key), "order": order, "cl": cl, "cr": cr, "u": u, "U": U})
    return out


def _realize(sets, c) -> tuple:
    order, cl, cr, u, U = c["order"], c["cl"], c["cr"], c["u"], c["U"]
    base = LetRecord((u, U), conj_left=cl, conj_right=cr)
    moved = apply_let(sets, base)
    phases, perms, outs = [], [], [None] * len(sets)
    for bi, b in enumerate(moved):
        lt = np.array([to_float(s.left) for s in b])
        rt = np.array([to_float(s.right) for s in b])
        lc, rc = _canon_factor(lt), _canon_factor(rt)
        rows = np.concatenate([lc.real, lc.imag, rc.real, rc.imag], axis=1)
        srt = [int(k) for k in np.lexsort(np.round(rows, 6).T[::-1])]
        target = ProductBasis(tuple(ProductState(lc[k], rc[k]) for k in srt))
        ph, perm = fit_phases_perms(b.states, target.states)
        phases.append(ph)
        perms.append(perm)
    t = LetRecord((u, U), tuple(phases), tuple(perms), cl, cr, tuple(order))
    return apply_let(sets, t), t
