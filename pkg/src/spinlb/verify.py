"""Self-verification suites driven by ``spinlb verify``.

Each check returns a :class:`Check`; a suite is a list of them.  The
relation table is a parameter so a corrupted copy can be fed in to make
sure failures are reported by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    ALL_RELATIONS,
    IDENTITY,
    OperatorPoly,
    Relation,
    build_structure_tensor,
    check_dependencies,
    enumerate_basis,
    k_count,
    multiply,
    multiply_monomials,
    parse_monomial,
    trace_inner,
)
from .bounds import ClusterModel, anderson_bound, objective
from .oracle import represent

DENSE_TOL = 1e-10
REFERENCE_GRAM = [[9, 3, 3], [3, 9, 3], [3, 3, 9]]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def check_relations(relations: Sequence[Relation] | None = None, dense_n: int = 6) -> list[Check]:
    out = []
    if relations is None:
        relations = ALL_RELATIONS
    for rel in relations:
        x, y = rel.lhs()
        got = multiply(x, y)
        diff = got - rel.rhs()
        exact = diff.is_zero()
        dense_err = float(
            np.abs(represent(rel.rhs(), dense_n) - represent(x, dense_n) @ represent(y, dense_n)).max()
        )
        ok = exact and dense_err < DENSE_TOL
        detail = "" if ok else f"symbolic diff {diff!r}, dense err {dense_err:.2e}"
        out.append(Check(f"relation {rel.name}", ok, detail))
    return out


def gram_matrix(n: int, sector: str = "A", full_support: bool = True) -> tuple[list, np.ndarray]:
    """Gram matrix ``tr(X Y) / 2^n`` over the chosen elements."""
    elems = enumerate_basis(n, "AB")
    if sector == "A":
        elems = [m for m in elems if m.triple is None]
    if full_support:
        elems = [m for m in elems if len(m.support) == n]
    g = np.array([[trace_inner(x, y, n) / 2**n for y in elems] for x in elems])
    return elems, g


def check_gram_example() -> Check:
    _, g = gram_matrix(4)
    ok = g.shape == (3, 3) and np.array_equal(g, np.array(REFERENCE_GRAM, dtype=float))
    return Check("gram example n=4", ok, "" if ok else f"got {g.tolist()}")


def _poly(text: str, n: int) -> OperatorPoly:
    mono, sign = parse_monomial(text)
    return OperatorPoly({mono: float(sign)}, n)


def check_trace_examples() -> list[Check]:
    out = []
    for n in (3, 4, 5):
        t, _ = parse_monomial("[1,2,3]")
        out.append(Check(f"trace [1,2,3]^2 = 6*2^{n}", trace_inner(t, t, n) == 6 * 2**n))
    # bond ring closing on itself: one cycle
    ring = [_poly(f"({i},{i % 4 + 1})", 4) for i in range(1, 5)]
    prod = multiply(multiply(ring[0], ring[1]), multiply(ring[2], ring[3]))
    value = prod.coeff(IDENTITY) * 2**4
    out.append(Check("trace of bond ring = 3*2^N", abs(value - 3 * 2**4) < 1e-12, f"{value.real:g}"))
    # mixed products linked through a bond chain
    factors = [_poly(s, 6) for s in ("[1,2,3]", "[1,2,6]", "(3,4)", "(4,5)", "(5,6)")]
    prod = factors[0]
    for f in factors[1:]:
        prod = multiply(prod, f)
    value = prod.coeff(IDENTITY) * 2**6
    out.append(Check("trace of linked mixed products = 6*2^N", abs(value - 6 * 2**6) < 1e-12, f"{value.real:g}"))
    return out


def check_oracle_equivalence(n_max: int, sector: str = "AB") -> list[Check]:
    out = []
    for n in range(2, n_max + 1):
        basis = enumerate_basis(n, sector)
        dense = [represent(m, n) for m in basis]
        worst = 0.0
        trace_bad = 0
        for i, x in enumerate(basis):
            for j, y in enumerate(basis):
                prod = multiply_monomials(x, y)
                mat = sum(c * represent(m, n) for m, c in prod.items())
                worst = max(worst, float(np.abs(mat - dense[i] @ dense[j]).max()))
                if trace_inner(x, y, n) != round(np.trace(dense[i].conj().T @ dense[j]).real):
                    trace_bad += 1
        ok = worst < DENSE_TOL and trace_bad == 0
        out.append(Check(f"oracle equivalence n={n}", ok, f"max err {worst:.1e}, trace mismatches {trace_bad}"))
    return out


def check_counting() -> list[Check]:
    out = [Check("K(10) formula = 9495", k_count(10, include_identity=False) == 9495)]
    reference = {2: 1, 3: 3, 4: 9, 5: 25, 10: 9495}
    out.append(Check("table of small K(N)", all(k_count(n, False) == v for n, v in reference.items())))
    enum_ok = all(len(enumerate_basis(n)) == k_count(n) for n in range(1, 11))
    out.append(Check("enumeration matches K(n) for n<=10", enum_ok))
    return out


def check_structure_tensor(n_max: int) -> list[Check]:
    out = []
    for n in range(2, n_max + 1):
        t = build_structure_tensor(n)
        dense = [represent(m, n).real for m in t.basis]
        worst = 0.0
        for i in range(t.size):
            for j in range(i, t.size):
                target = 0.5 * (dense[i] @ dense[j] + dense[j] @ dense[i])
                got = sum(t.matrix(k)[i, j] * dense[k] for k in range(t.size))
                worst = max(worst, float(np.abs(got - target).max()))
        out.append(Check(f"structure tensor n={n} vs dense", worst < DENSE_TOL, f"max err {worst:.1e}"))
    return out


def check_dependency_hypothesis(ns: Sequence[int] = (5, 6, 7, 8)) -> list[Check]:
    out = []
    for n in ns:
        r = check_dependencies(n)
        out.append(
            Check(
                f"dependency hypothesis n={n}",
                r.verified and not r.ill_conditioned,
                f"gram rank {r.gram_rank}, predicted {r.predicted_rank}, set size {r.set_size}",
            )
        )
    return out


def check_gradients(ns: Sequence[int] = (4, 5), points: int = 20, seed: int = 0) -> list[Check]:
    out = []
    rng = np.random.default_rng(seed)
    for n in ns:
        t = build_structure_tensor(n)
        model = ClusterModel(n)
        worst = 0.0
        for _ in range(points):
            b = rng.uniform(-1, 1, t.size)
            b[0] = 1.0
            _, g = objective(b, t, model)
            fd = finite_difference(lambda v: objective(v, t, model)[0], b)
            worst = max(worst, float(np.linalg.norm(g - fd) / max(np.linalg.norm(fd), 1e-12)))
        out.append(Check(f"gradient vs finite differences n={n}", worst < 1e-6, f"max rel err {worst:.1e}"))
    return out


def finite_difference(f: Callable[[np.ndarray], float], x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central differences, independent of any analytic gradient."""
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (f(x + e) - f(x - e)) / (2 * step)
    return g


def check_anderson_small() -> list[Check]:
    ref = {2: -3.0, 3: -2.0, 4: -(3 + 2 * math.sqrt(3)) / 3}
    return [
        Check(f"anderson n={n}", abs(anderson_bound(ClusterModel(n)) - v) < 1e-9)
        for n, v in ref.items()
    ]


def run(level: str = "quick", relations: Sequence[Relation] | None = None) -> list[Check]:
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    checks = check_relations(relations)
    checks.append(check_gram_example())
    checks += check_trace_examples()
    checks += check_counting()
    checks += check_oracle_equivalence(4)
    checks += check_structure_tensor(4)
    checks += check_anderson_small()
    if level == "full":
        checks += check_oracle_equivalence(6, sector="A")
        checks += check_structure_tensor(5)[-1:]
        checks += check_dependency_hypothesis()
        checks += check_gradients()
    return checks
