"""The acceptance suite: ten numbered checks shared by the test-suite and ``mupb selftest``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import hadamard3 as h3
from .catalog import (
    FamilySpec,
    PairSpec,
    TripleSpec,
    circuit_for_family,
    columns_match_up_to_phase,
    family_basis,
    mu_pair,
    mu_triple,
    standard_basis,
    su2,
)
from .cyclotomic import Cyc12, ExactVector
from .extension import (
    brute_force_product_mu,
    classify_triple,
    extend_pair,
    extend_triple,
    hausdorff_rays,
    i2_restriction_check,
    p25_conjugation_check,
    transform_vectors,
)
from .let import apply_let, canonical_params, classify_product_basis, random_let
from .linalg import ProductState, random_unitary, to_float
from .mu import assembled_mu, factor_mu_criterion, is_mu_pair, is_unbiased

FAMILY_LABELS = {6: ("I0", "I1", "I2", "I3"), 4: ("I0", "I1", "I2")}


@dataclass
class CriterionResult:
    number: int
    title: str
    theorem: str
    passed: bool
    seconds: float
    limit: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:>2}. {self.title} ({self.theorem}) {self.seconds:.2f}s / {self.limit:.0f}s"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "theorem": self.theorem,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "limit": self.limit,
            "detail": self.detail,
        }


# ------------------------------------------------------------ generators

def _bloch_angles(n) -> tuple:
    return math.acos(max(-1.0, min(1.0, float(n[2])))), math.atan2(float(n[1]), float(n[0]))


def _axis(v) -> np.ndarray:
    a, b = v / np.linalg.norm(v)
    z = np.conj(a) * b
    return np.array([2 * z.real, 2 * z.imag, abs(a) ** 2 - abs(b) ** 2])


def _perp_axis(n, rng) -> np.ndarray:
    r = rng.normal(size=3)
    r -= (r @ n) * n
    return r / np.linalg.norm(r)


def _rand_angles(rng) -> tuple:
    return math.acos(1 - 2 * rng.random()), 2 * math.pi * rng.random()


def random_family_spec(rng: np.random.Generator, label: str, dim: int = 6) -> FamilySpec:
    """A generic member of a family, with parameters drawn uniformly."""
    if label == "I0":
        return FamilySpec("I0", dim)
    if dim == 4:
        return FamilySpec(label, 4, {"u" if label == "I1" else "v": _rand_angles(rng)})
    if label == "I1":
        return FamilySpec("I1", 6, {"U": random_unitary(3, rng)})
    if label == "I2":
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        n = math.hypot(abs(a), abs(b))
        V = {"alpha": a / n, "beta": b / n, "phase": 2 * math.pi * rng.random()}
        return FamilySpec("I2", 6, {"u": _rand_angles(rng), "V": V})
    if label == "I3":
        return FamilySpec("I3", 6, {"v": _rand_angles(rng), "w": _rand_angles(rng)})
    raise ValueError(f"unknown family {label!r}")


def _equator(rng, n=2) -> np.ndarray:
    return np.concatenate([[1], np.exp(2j * math.pi * rng.random(n - 1))]) / math.sqrt(n)


def _unbiased_unitary(v, rng) -> np.ndarray:
    """Random unitary whose columns are all unbiased to v."""
    n = len(v)
    m = np.column_stack([v, rng.normal(size=(n, n - 1)) + 1j * rng.normal(size=(n, n - 1))])
    q, _ = np.linalg.qr(m)
    q[:, 0] = v
    core = h3.random_hadamard(rng) if n == 3 else su2(math.pi / 2, 2 * math.pi * rng.random())
    return q @ core


def factorwise_draw(rng: np.random.Generator, dim: int) -> tuple:
    """(state, basis) with one third positives, one third perturbed positives, one third random."""
    label = FAMILY_LABELS[dim][rng.integers(len(FAMILY_LABELS[dim]))]
    q = dim // 2
    phi, Phi = _equator(rng), _equator(rng, q)
    if label == "I0":
        spec = FamilySpec("I0", dim)
    elif dim == 4 and label == "I1":
        spec = FamilySpec("I1", 4, {"u": _bloch_angles(_perp_axis(_axis(Phi), rng))})
    elif dim == 4:
        spec = FamilySpec("I2", 4, {"v": _bloch_angles(_perp_axis(_axis(phi), rng))})
    elif label == "I1":
        spec = FamilySpec("I1", 6, {"U": _unbiased_unitary(Phi, rng)})
    elif label == "I2":
        V = np.eye(3, dtype=complex)
        V[1:, 1:] = _unbiased_unitary(Phi[1:] / np.linalg.norm(Phi[1:]), rng)
        spec = FamilySpec("I2", 6, {"u": _bloch_angles(_perp_axis(_axis(phi), rng)), "V": V})
    else:
        n = _axis(phi)
        spec = FamilySpec("I3", 6, {"v": _bloch_angles(_perp_axis(n, rng)), "w": _bloch_angles(_perp_axis(n, rng))})
    mode = rng.integers(3)
    if mode == 1:
        eps = 10 ** rng.uniform(-5, -2)
        if rng.integers(2):
            phi = _nudge(phi, eps, rng)
        else:
            Phi = _nudge(Phi, eps, rng)
    elif mode == 2:
        phi = random_unitary(2, rng)[:, 0]
        Phi = random_unitary(q, rng)[:, 0]
    return ProductState(phi, Phi), family_basis(spec).to_float(), int(mode)


def _nudge(v, eps, rng) -> np.ndarray:
    n = len(v)
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = (h + h.conj().T) / 2
    w, u = np.linalg.eigh(h / np.linalg.norm(h))
    return (u @ np.diag(np.exp(1j * eps * w)) @ u.conj().T) @ v


def hidden_product_vector() -> ExactVector:
    """(1, a^5, 1, -a^3, -a^2, -a^3)/sqrt(6) with a a primitive 12th root of unity."""
    r = Cyc12.root
    return ExactVector([r(0), r(5), r(0), -r(3), -r(2), -r(3)])


# ------------------------------------------------------------ criteria

def _timed(number, title, theorem, limit, fn) -> CriterionResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    return CriterionResult(number, title, theorem, bool(ok) and dt < limit, dt, limit, detail)


def criterion_1() -> CriterionResult:
    def run():
        detail = {}
        sets = {
            "P0": mu_pair(PairSpec("P0"), verify=False),
            "P2": mu_pair(PairSpec("P2"), verify=False),
            "T0": mu_triple(TripleSpec("T0"), verify=False),
            "T1": mu_triple(TripleSpec("T1"), verify=False),
            "T0_4": mu_triple(TripleSpec("T0_4", 4), verify=False),
        }
        for name, bases in sets.items():
            worst = 0.0
            exact = all(b.exact for b in bases)
            for i in range(len(bases)):
                for j in range(i + 1, len(bases)):
                    ok, dev = is_mu_pair(bases[i], bases[j])
                    worst = max(worst, dev if ok else math.inf)
            detail[name] = {"exact": exact, "max_deviation": worst}
        for space, labels in (("C2", "zxy"), ("C3", "zxyw")):
            worst = 0.0
            for i, a in enumerate(labels):
                for b in labels[i + 1:]:
                    for u in standard_basis(space, a):
                        for v in standard_basis(space, b):
                            if not is_unbiased(u, v):
                                worst = math.inf
            detail[space] = {"max_deviation": worst}
        ok = all(v["max_deviation"] == 0.0 for v in detail.values()) and all(
            detail[k]["exact"] for k in sets
        )
        return ok, detail

    return _timed(1, "exact MU tables", "T2/T3", 1.0, run)


def criterion_2(draws: int = 10_000, seed: int = 0) -> CriterionResult:
    def run():
        detail = {}
        ok = True
        for dim in (4, 6):
            rng = np.random.default_rng([seed, dim])
            disagree, positives, modes = 0, 0, [0, 0, 0]
            for _ in range(draws):
                s, b, mode = factorwise_draw(rng, dim)
                f = factor_mu_criterion(s, b, 1e-9)
                a = assembled_mu(s, b, 1e-9)
                disagree += f != a
                positives += bool(f and a)
                modes[mode] += 1
            detail[f"d{dim}"] = {"draws": draws, "disagreements": disagree, "mu_states": positives, "modes": modes}
            ok = ok and disagree == 0 and positives > 0
        return ok, detail

    return _timed(2, "factor-wise vs assembled unbiasedness", "T1", 30.0, run)


def _twelve_reference() -> list:
    y2 = standard_basis("C2", "y")
    out = []
    for lab in ("y", "w"):
        for a in y2:
            for A in standard_basis("C3", lab):
                out.append(ProductState(a, A).vector().to_complex())
    return out


def criterion_3(grid_step: float = 0.01) -> CriterionResult:
    def run():
        ref = _twelve_reference()
        rep = extend_pair(PairSpec("P0"))
        grid = brute_force_product_mu(list(mu_pair(PairSpec("P0"))), grid_step)
        da = hausdorff_rays(rep.candidate_vectors(), ref)
        dg = hausdorff_rays(grid.vectors(), ref)
        detail = {
            "analytic": len(rep.candidates),
            "grid": len(grid.states),
            "analytic_distance": da,
            "grid_distance": dg,
            "analytic_exact": all(s.exact for s in rep.candidates),
            "grid_step": grid_step,
        }
        ok = len(rep.candidates) == 12 and len(grid.states) == 12 and da < 1e-6 and dg < 1e-6
        return ok, detail

    return _timed(3, "twelve product vectors unbiased to P0", "T4", 300.0, run)


def criterion_4() -> CriterionResult:
    def run():
        rep = extend_pair(PairSpec("P0"))
        labels = rep.labels
        return len(rep.bases) == 4 and set(labels) == {"T0", "T1"}, {"bases": len(rep.bases), "labels": labels}

    return _timed(4, "third bases of P0 fall into two classes", "T3", 10.0, run)


def _p3_draws(rng, n):
    out = []
    for _ in range(n):
        s, t = rng.uniform(0.05, math.pi - 0.05, 2)
        while abs(s - t) < 0.05:
            t = rng.uniform(0.05, math.pi - 0.05)
        out.append(PairSpec("P3", 6, {"zeta": 2 * math.pi * rng.random(), "chi": 2 * math.pi * rng.random(), "sigma": s, "tau": t}))
    return out


def _p14_draws(rng, n):
    return [PairSpec("P1_4", 4, {"mu": math.pi * rng.random(), "nu": rng.uniform(0.05, math.pi - 0.05)}) for _ in range(n)]


def criterion_5(grid_step: float = 0.01, seed: int = 0) -> CriterionResult:
    def run():
        rng = np.random.default_rng(seed)
        cases = [("P2", PairSpec("P2"))]
        cases += [(f"P3#{k}", s) for k, s in enumerate(_p3_draws(rng, 5))]
        cases += [(f"P1_4#{k}", s) for k, s in enumerate(_p14_draws(rng, 5))]
        detail, ok = {}, True
        for name, spec in cases:
            rep = extend_pair(spec, oracle_step=grid_step)
            good = not rep.candidates and rep.oracle["agree"]
            detail[name] = {"analytic": len(rep.candidates), "grid": rep.oracle["grid_count"], "ok": good}
            ok = ok and good
        for lab, dim in (("T0", 6), ("T1", 6), ("T0_4", 4)):
            rep = extend_triple(TripleSpec(lab, dim), oracle_step=grid_step)
            good = not rep.candidates and rep.oracle["agree"]
            detail[lab] = {"analytic": len(rep.candidates), "grid": rep.oracle["grid_count"], "ok": good}
            ok = ok and good
        return ok, detail

    return _timed(5, "non-extendable pairs and triples", "T2/T3/Prop1", 600.0, run)


def criterion_6(draws: int = 1000, seed: int = 0) -> CriterionResult:
    def run():
        detail, ok = {}, True
        for dim, labels in FAMILY_LABELS.items():
            for label in labels:
                rng = np.random.default_rng([seed, dim, int(label[1])])
                wrong = unverified = 0
                for _ in range(draws):
                    b = family_basis(random_family_spec(rng, label, dim))
                    sc = apply_let([b], random_let([b], rng))[0]
                    res = classify_product_basis(sc)
                    wrong += res.family.label != label
                    unverified += not res.verify(sc)
                detail[f"{label}/d{dim}"] = {"wrong": wrong, "unverified": unverified}
                ok = ok and wrong == 0 and unverified == 0
        return ok, detail

    return _timed(6, "classifier round trip", "L1/L2", 60.0, run)


def criterion_7(draws: int = 100, seed: int = 0) -> CriterionResult:
    def run():
        detail, ok = {}, True
        for dim, labels in FAMILY_LABELS.items():
            for label in labels:
                rng = np.random.default_rng([seed, dim, int(label[1]), 7])
                worst = 0.0
                for _ in range(draws):
                    spec = random_family_spec(rng, label, dim)
                    worst = max(worst, columns_match_up_to_phase(circuit_for_family(spec).unitary(), family_basis(spec)))
                detail[f"{label}/d{dim}"] = worst
                ok = ok and worst < 1e-10
        return ok, detail

    return _timed(7, "circuit fidelity", "L1/L2", 10.0, run)


def criterion_8(draws: int = 10_000, seed: int = 0) -> CriterionResult:
    def run():
        rng = np.random.default_rng(seed)
        worst = 0.0
        lemma_fail = non_pe = 0
        for k in range(draws):
            core = ("F", "F+")[k % 2]
            D = h3.random_diag(rng, True)
            h = h3.synthesize(D, core, h3.random_diag(rng))
            dec = h3.decompose_hadamard3(h)
            worst = max(worst, float(np.max(np.abs(dec.matrix() - h))))
            prof = h3.lemma_c1_profile(D, h3.random_diag(rng), h3.random_diag(rng, True), core)
            if not prof.pe:
                non_pe += 1
                lemma_fail += not prof.holds
        counter, branches = 0, {}
        for _ in range(draws):
            try:
                v = h3.trichotomy_check(*h3.random_quadruple(rng))
                branches[v.branch] = branches.get(v.branch, 0) + 1
            except h3.TheoremFalsified:
                counter += 1
        detail = {
            "max_residual": worst,
            "non_pe": non_pe,
            "lemma_failures": lemma_fail,
            "counterexamples": counter,
            "branches": branches,
        }
        return worst < 1e-12 and lemma_fail == 0 and counter == 0, detail

    return _timed(8, "3x3 Hadamard decomposition, lemmas and trichotomy", "T5", 120.0, run)


def criterion_9() -> CriterionResult:
    def run():
        ok, _ = p25_conjugation_check()
        rep = transform_vectors([hidden_product_vector()])
        row = rep["vectors"][0]
        good = row["product"] and row.get("left") == "1_y" and row.get("right") == "1_y"
        return ok and good, {"p25_identity": ok, "hidden_product": row}

    return _timed(9, "index transposition identity and product detection", "T4", 1.0, run)


def criterion_10(instances: int = 10, grid_step: float = 0.01, seed: int = 0) -> CriterionResult:
    def run():
        rng = np.random.default_rng(seed)
        rows = []
        ok = True
        while len(rows) < instances:
            spec = random_family_spec(rng, "I2", 6)
            V = spec.params["V"]
            if abs(V["alpha"]) * abs(V["beta"]) <= 1e-4:
                continue
            res = i2_restriction_check(spec, grid_step)
            good = res["isolated"] and res["admissible"] == 0
            rows.append({"alpha_beta": res["alpha_beta"], "admissible": res["admissible"], "ok": good})
            ok = ok and good
        degenerate = FamilySpec("I2", 6, {"u": (1.1, 0.4), "V": {"alpha": 1.0, "beta": 0.0, "phase": 0.7}})
        canon = canonical_params(degenerate)
        expect = canonical_params(FamilySpec("I3", 6, {"v": (1.1, 0.4), "w": (1.1, 0.4)}))
        ok = ok and canon.label == "I3" and canon == expect
        return ok, {"instances": rows, "degenerate": canon.to_json()}

    return _timed(10, "I2 restriction", "T1/I2", 300.0, run)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_all(numbers=None, echo=None) -> list:
    out = []
    for n in numbers or sorted(CRITERIA):
        res = CRITERIA[n]()
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
