"""Extensions of MU product pairs and triples, and the grid oracle that checks them.

Two independent routes find the product states unbiased to a list of product
bases. The analytic route intersects the factor solution sets of
:mod:`mupb.mu`. The grid route sweeps a product chart, matches left and right
overlap tables with the compiled kernel and polishes every cluster.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernel
from .catalog import (
    BasisMatrix,
    PairSpec,
    TripleSpec,
    exact_equal,
    exact_kron,
    exact_matmul,
    hw_operator,
    mu_pair,
    mu_triple,
    standard_basis,
)
from .cyclotomic import ONE, ZERO, ExactVector
from .let import dephase_standard_form, same_state_sets
from .linalg import (
    NotProduct,
    ProductBasis,
    ProductState,
    basis_to_literal,
    canonical_phase,
    factorize_product,
    is_exact,
    ray_distance,
    same_ray,
    to_float,
    vector_from_literal,
    vector_to_literal,
)
from .mu import factor_mu_criterion, is_mu_pair, mu_vectors_c2, mu_vectors_c3

MAX_GRID_STEP = 0.05
CLUSTER_RADIUS = 1e-4
POLISH_TOL = 1e-10
MAX_CLUSTERS = 64
MAX_HITS = 200_000


class GridTooCoarse(ValueError):
    pass


# ------------------------------------------------------------ factor bases

def _dedupe_rays(vecs) -> list:
    out = []
    for v in vecs:
        if not any(same_ray(to_float(v), to_float(o)) for o in out):
            out.append(v)
    return out


def _orthonormal_groups(vecs, n: int) -> list:
    reps = _dedupe_rays(vecs)
    out = []
    for combo in itertools.combinations(range(len(reps)), n):
        m = np.array([to_float(reps[k]) / np.linalg.norm(to_float(reps[k])) for k in combo]).T
        if np.max(np.abs(m.conj().T @ m - np.eye(n))) <= 1e-8:
            out.append(BasisMatrix(tuple(reps[k] for k in combo)))
    return out


def factor_bases(b: ProductBasis) -> tuple:
    """(left C^2 bases, right C^q bases) appearing in a product basis."""
    lefts = _orthonormal_groups([s.left for s in b], 2)
    rights = _orthonormal_groups([s.right for s in b], b.q)
    return lefts, rights


# ----------------------------------------------------------- analytic path

@dataclass
class ExtensionReport:
    input: dict
    candidates: list
    bases: list
    labels: list
    metadata: dict = field(default_factory=dict)
    scope: str = "product states"
    oracle: dict | None = None
    continuous: bool = False

    def candidate_vectors(self) -> list:
        return [to_float(s.vector()) for s in self.candidates]

    def to_json(self) -> dict:
        out = {
            "input": self.input,
            "count": len(self.candidates),
            "candidates": [{"left": vector_to_literal(s.left), "right": vector_to_literal(s.right)} for s in self.candidates],
            "bases": [basis_to_literal(b) for b in self.bases],
            "labels": list(self.labels),
            "label_set": sorted(set(self.labels)),
            "continuous": self.continuous,
            "scope": self.scope,
            "metadata": self.metadata,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
        return out


def _sort_key(s: ProductState) -> tuple:
    v = to_float(canonical_phase(to_float(s.vector())))
    return tuple(np.round(np.concatenate([v.real, v.imag]), 9))


def product_mu_states(bases) -> tuple:
    """Product states unbiased to every basis, via the factor solution sets.

    Returns (states, continuous). ``continuous`` flags a one-basis factor side,
    where the solutions form a family rather than a finite list.
    """
    lefts, rights = [], []
    for b in bases:
        l, r = factor_bases(b)
        lefts += l
        rights += r
    q = bases[0].q
    ls = mu_vectors_c2(lefts)
    rs = mu_vectors_c2(rights) if q == 2 else mu_vectors_c3(rights)
    if ls.kind == "continuous" or rs.kind == "continuous":
        return [], True
    out = []
    for a in ls.vectors:
        for A in rs.vectors:
            if is_exact(a) != is_exact(A):
                a, A = to_float(a), to_float(A)
            s = ProductState(a, A)
            if all(factor_mu_criterion(s, b, 1e-9) for b in bases):
                out.append(s)
    out.sort(key=_sort_key)
    return out, False


def assemble_bases(states, d: int) -> list:
    """All orthonormal d-subsets of the candidate states, as product bases."""
    vs = [to_float(s.vector()) for s in states]
    n = len(vs)
    ortho = np.abs(np.array(vs).conj() @ np.array(vs).T) < 1e-9 if n else np.zeros((0, 0), bool)
    found = []

    def grow(chosen, start):
        if len(chosen) == d:
            found.append(tuple(chosen))
            return
        for k in range(start, n):
            if all(ortho[k, c] for c in chosen):
                grow(chosen + [k], k + 1)

    grow([], 0)
    return [ProductBasis(tuple(states[k] for k in combo)) for combo in found]


_REFERENCE = {}


def _reference_forms(d: int) -> dict:
    if d not in _REFERENCE:
        labels = ("T0", "T1") if d == 6 else ("T0_4",)
        _REFERENCE[d] = {lab: dephase_standard_form(list(mu_triple(TripleSpec(lab, d))))[0] for lab in labels}
    return _REFERENCE[d]


def classify_triple(bases) -> str:
    """LET class of an MU triple: T0, T1 (d=6), T0_4 (d=4) or 'unclassified'."""
    canon, _ = dephase_standard_form(list(bases))
    for lab, ref in _reference_forms(bases[0].d).items():
        if same_state_sets(canon, ref):
            return lab
    return "unclassified"


def _resolve(inp, kind: str) -> tuple:
    if isinstance(inp, (PairSpec, TripleSpec)):
        build = mu_pair if kind == "pair" else mu_triple
        return list(build(inp)), inp.to_json()
    bases = list(inp)
    return bases, {"label": "explicit", "dim": bases[0].d, "bases": [basis_to_literal(b) for b in bases]}


def _extend(bases, info, want: int, oracle_step, seed) -> ExtensionReport:
    states, continuous = product_mu_states(bases)
    found = [] if continuous else assemble_bases(states, bases[0].d)
    labels = []
    if want == 2:
        labels = [classify_triple(bases + [b]) for b in found]
    meta = {"method": "factor solution sets", "seed": seed, "cluster_radius": CLUSTER_RADIUS}
    rep = ExtensionReport(info, states, found, labels, meta, continuous=continuous)
    if oracle_step is not None:
        rep.oracle = oracle_agreement(bases, states, oracle_step, seed)
        meta["grid_step"] = oracle_step
    return rep


def extend_pair(pair, oracle_step: float | None = None, seed: int = 0) -> ExtensionReport:
    bases, info = _resolve(pair, "pair")
    if len(bases) != 2:
        raise ValueError("a pair needs exactly two bases")
    ok, dev = is_mu_pair(bases[0], bases[1], 1e-9)
    if not ok:
        raise ValueError(f"input bases are not mutually unbiased (deviation {dev:.3g})")
    return _extend(bases, info, 2, oracle_step, seed)


def extend_triple(triple, oracle_step: float | None = None, seed: int = 0, external=None) -> ExtensionReport:
    bases, info = _resolve(triple, "triple")
    if len(bases) != 3:
        raise ValueError("a triple needs exactly three bases")
    for i, j in ((0, 1), (0, 2), (1, 2)):
        ok, dev = is_mu_pair(bases[i], bases[j], 1e-9)
        if not ok:
            raise ValueError(f"bases {i} and {j} are not mutually unbiased (deviation {dev:.3g})")
    rep = _extend(bases, info, 3, oracle_step, seed)
    if bases[0].d == 4 and not rep.candidates:
        rep.scope = "product states; every state unbiased to the triple is entangled"
    if external is not None:
        rep.scope = "all vectors, given the ingested solution list"
        rep.metadata["external"] = no_vector_extension(external, bases)
    return rep


# ------------------------------------------------------------- grid oracle

@dataclass
class GridResult:
    states: list
    isolated: bool
    metadata: dict

    def vectors(self) -> list:
        return [to_float(s.vector()) for s in self.states]

    def to_json(self) -> dict:
        return {
            "count": len(self.states),
            "isolated": self.isolated,
            "states": [{"left": vector_to_literal(s.left), "right": vector_to_literal(s.right)} for s in self.states],
            "metadata": self.metadata,
        }


def _left_frames(b: ProductBasis) -> list:
    return [m.matrix() for m in _orthonormal_groups([s.left for s in b], 2)]


def _right_frames(b: ProductBasis) -> list:
    return [m.matrix() for m in _orthonormal_groups([s.right for s in b], b.q)]


def _chart(frame: np.ndarray, angles) -> np.ndarray:
    """frame @ (1, e^{i a1}, ...)/sqrt(n) for every row of angles."""
    n = frame.shape[0]
    ph = np.concatenate([np.ones((len(angles), 1)), np.exp(1j * np.asarray(angles))], axis=1)
    return (ph @ frame.T) / math.sqrt(n)


def _grid(step: float) -> np.ndarray:
    n = int(math.ceil(2 * math.pi / step))
    return 2 * math.pi * np.arange(n) / n


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def brute_force_product_mu(target, grid_step: float = 0.01, extra_states=(), right_frames=None,
                           backend: str | None = None) -> GridResult:
    """Product states unbiased to every target basis (and extra state), by grid sweep.

    Any product state unbiased to a product basis has its left factor unbiased to
    one of that basis' left factor bases and its right factor unbiased to one of
    its right factor bases. The sweep therefore runs over every chart
    (left equator of a left frame) x (torus of a right frame) of the first basis.
    """
    if grid_step > MAX_GRID_STEP:
        raise GridTooCoarse(f"grid step {grid_step} exceeds {MAX_GRID_STEP} rad")
    if grid_step <= 0:
        raise ValueError("grid step must be positive")
    target = [b.to_float() for b in target]
    d = target[0].d
    if d not in (4, 6):
        raise ValueError("only d = 4 and d = 6 are supported")
    q = target[0].q
    match = kernel.match_products
    if backend == "python":
        match = kernel.python_match
    elif backend == "cython":
        if kernel.compiled_match is None:
            raise RuntimeError("compiled kernel is not available")
        match = kernel.compiled_match
    states = [s for b in target for s in b] + [s.to_float() for s in extra_states]
    tl = np.array([to_float(s.left) for s in states])
    tr = np.array([to_float(s.right) for s in states])
    inv_d = 1.0 / d
    t = _grid(grid_step)
    h = t[1] - t[0]
    tau = 1.0 * h
    rframes = right_frames if right_frames is not None else _right_frames(target[0])
    if q == 3:
        xi, eta = np.meshgrid(t, t, indexing="ij")
        rang = np.stack([xi.ravel(), eta.ravel()], axis=1)
    else:
        rang = t[:, None]
    lang = t[:, None]
    seeds, isolated, hits_total = [], True, 0
    for lf in _left_frames(target[0]):
        lv = _chart(lf, lang)
        L = np.ascontiguousarray(np.abs(lv.conj() @ tl.T) ** 2)
        for rf in rframes:
            rf = np.asarray(rf, dtype=complex)
            rv = _chart(rf, rang)
            R = np.ascontiguousarray(np.abs(rv.conj() @ tr.T) ** 2)
            ia, ib, res, overflow = match(L, R, inv_d, tau, MAX_HITS)
            hits_total += len(ia)
            if overflow:
                isolated = False
                break
            order = np.lexsort((ib, ia, res))
            reps = []
            for k in order:
                p = np.concatenate([lang[ia[k]], rang[ib[k]]])
                if any(np.max(np.abs(_wrap(p - r))) <= 8 * h for r in reps):
                    continue
                reps.append(p)
                if len(reps) > MAX_CLUSTERS:
                    isolated = False
                    break
            if not isolated:
                break
            seeds += [(lf, rf, p) for p in reps]
        if not isolated:
            break
    found = []
    if isolated:
        for lf, rf, p in seeds:
            s = _polish(lf, rf, p, tl, tr, inv_d)
            if s is not None and not any(ray_distance(to_float(s.vector()), to_float(o.vector())) < CLUSTER_RADIUS for o in found):
                found.append(s)
        if len(found) > MAX_CLUSTERS:
            isolated = False
    found.sort(key=_sort_key)
    meta = {
        "grid_step": grid_step,
        "cluster_radius": CLUSTER_RADIUS,
        "polish_tol": POLISH_TOL,
        "seeds": len(seeds),
        "hits": int(hits_total),
        "kernel": "python" if match is kernel.python_match else "cython",
    }
    return GridResult(found if isolated else [], isolated, meta)


def _polish(lf, rf, p, tl, tr, inv_d):
    from scipy.optimize import least_squares

    def state(x):
        return _chart(lf, x[:1][None, :])[0], _chart(rf, x[1:][None, :])[0]

    def resid(x):
        l, r = state(x)
        return (np.abs(tl.conj() @ l) ** 2) * (np.abs(tr.conj() @ r) ** 2) - inv_d

    sol = least_squares(resid, p, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    if np.max(np.abs(resid(sol.x))) > POLISH_TOL:
        return None
    l, r = state(sol.x)
    return ProductState(canonical_phase(l), canonical_phase(r))


def hausdorff_rays(a, b) -> float:
    if not a and not b:
        return 0.0
    if not a or not b:
        return math.inf
    da = max(min(ray_distance(x, y) for y in b) for x in a)
    db = max(min(ray_distance(x, y) for x in a) for y in b)
    return max(da, db)


def oracle_agreement(bases, states, grid_step: float, seed: int = 0) -> dict:
    grid = brute_force_product_mu(bases, grid_step)
    dist = hausdorff_rays([to_float(s.vector()) for s in states], grid.vectors())
    return {
        "grid_count": len(grid.states),
        "analytic_count": len(states),
        "hausdorff": dist if math.isfinite(dist) else None,
        "isolated": grid.isolated,
        "agree": grid.isolated and len(grid.states) == len(states) and dist < 1e-6,
        "metadata": grid.metadata,
    }


# ---------------------------------------------------- permutation identity

def p25_matrix(exact: bool = True) -> np.ndarray:
    """Transposition of indices 1 and 4 of C^6."""
    perm = [0, 4, 2, 3, 1, 5]
    if exact:
        m = np.full((6, 6), ZERO, dtype=object)
        for i, k in enumerate(perm):
            m[i, k] = ONE
        return m
    m = np.zeros((6, 6))
    m[np.arange(6), perm] = 1
    return m


def p25_conjugation_check() -> tuple:
    """(holds, witnesses): P X_6 P = X_2 (x) X_3 in exact arithmetic."""
    P = p25_matrix()
    x6 = hw_operator(6, "X")
    lhs = exact_matmul(exact_matmul(P, x6), P)
    rhs = exact_kron(hw_operator(2, "X"), hw_operator(3, "X"))
    ok = exact_equal(lhs, rhs)
    involution = exact_equal(exact_matmul(P, P), exact_matmul(P, P.T))
    return ok and involution, {"P25": P, "X6": x6, "conjugated": lhs, "X2xX3": rhs}


def _factor_label(v, space: str) -> str | None:
    labels = ("z", "x", "y") if space == "C2" else ("z", "x", "y", "w")
    for lab in labels:
        for k, c in enumerate(standard_basis(space, lab)):
            if is_exact(v):
                if same_ray(v, c):
                    return f"{k}_{lab}"
            elif abs(abs(np.vdot(to_float(c), to_float(v))) - 1) < 1e-9:
                return f"{k}_{lab}"
    return None


def _load_vectors(data) -> list:
    items = data["vectors"] if isinstance(data, dict) else data
    if not isinstance(items, list) or not items:
        raise ValueError("expected a non-empty list of vector literals")
    out = []
    for k, lit in enumerate(items):
        if isinstance(lit, dict):
            try:
                v = vector_from_literal(lit)
            except ValueError:
                warnings.warn(f"vector {k}: declared norm does not match; recomputed")
                v = ExactVector.from_json({"cyc": lit["cyc"]})
        else:
            if not isinstance(lit, list) or not all(isinstance(p, list) and len(p) == 2 for p in lit):
                raise ValueError(f"vector {k} is not a list of [re, im] pairs")
            raw = vector_from_literal(lit, renormalize=False)
            n = float(np.linalg.norm(raw))
            if abs(n - 1) > 1e-9:
                warnings.warn(f"vector {k} has norm {n:.6g}; renormalized")
            v = raw / n
        if (v.dim if is_exact(v) else len(v)) != 6:
            raise ValueError(f"vector {k} does not live in C^6")
        out.append(v)
    return out


def load_vector_file(path) -> list:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed vector file: {exc}") from exc
    return _load_vectors(data)


def permute_p25(v):
    perm = [0, 4, 2, 3, 1, 5]
    if is_exact(v):
        return ExactVector([v.entries[k] for k in perm], v.norm2)
    return np.asarray(v)[perm]


def transform_vectors(vectors) -> dict:
    rows = []
    for k, v in enumerate(vectors):
        w = permute_p25(v)
        row = {"index": k, "product": False}
        try:
            s = factorize_product(w, 2, 3)
        except NotProduct:
            pass
        else:
            row.update(product=True, left=_factor_label(s.left, "C2"), right=_factor_label(s.right, "C3"))
        rows.append(row)
    return {"vectors": rows, "product_count": sum(r["product"] for r in rows), "total": len(rows)}


def transform_external_vectors(path) -> dict:
    return transform_vectors(load_vector_file(path))


def no_vector_extension(vectors, triple) -> dict:
    """Check of the full no-extension claim against an ingested solution list.

    The list must hold vectors unbiased to the standard basis and the X_6
    eigenbasis. After the index transposition they are unbiased to the first
    two bases of the triple; none may be unbiased to the third.
    """
    moved = [to_float(permute_p25(v)) for v in vectors]
    mats = [b.to_float().matrix() for b in triple]

    def unbiased(v, m):
        return bool(np.max(np.abs(np.abs(m.conj().T @ v) ** 2 - 1 / 6)) <= 1e-8)

    premise = all(unbiased(v, mats[0]) and unbiased(v, mats[1]) for v in moved)
    extending = [k for k, v in enumerate(moved) if unbiased(v, mats[2])]
    return {"premise_holds": premise, "extending_vectors": extending, "verified": premise and not extending}


# ----------------------------------------------------- I2 restriction

def i2_restriction_check(spec, grid_step: float = 0.01, search_degenerate: bool = False) -> dict:
    """Grid search for a product basis unbiased to an I2 member.

    The right factors of such a basis form a triple {Z^k A} unbiased to the z
    basis, so A must be unbiased to every (Z^k)^dagger V|m>, m = 1, 2. These
    conditions enter the sweep as extra target states |j_z, (Z^k)^dagger V m>.
    """
    from .catalog import FamilySpec, _v_matrix, family_basis
    from .let import canonical_params

    if not isinstance(spec, FamilySpec) or spec.label != "I2" or spec.dim != 6:
        raise ValueError("expected a d=6 I2 family spec")
    V = _v_matrix(spec.params["V"])
    ab = float(abs(V[1, 1]) * abs(V[2, 1]))
    out = {"alpha_beta": ab}
    if ab <= 1e-12:
        out["canonical"] = canonical_params(spec).to_json()
        if not search_degenerate:
            return out
    w = np.exp(2j * math.pi / 3)
    zdag = np.diag([1, w, w * w]).conj()
    e = np.eye(2)
    extras = [
        ProductState(e[j], np.linalg.matrix_power(zdag, k) @ V[:, m])
        for j in range(2) for k in range(3) for m in (1, 2)
    ]
    res = brute_force_product_mu([family_basis(spec)], grid_step, extras, right_frames=[np.eye(3)])
    out.update(admissible=len(res.states), isolated=res.isolated, grid=res.metadata)
    return out
