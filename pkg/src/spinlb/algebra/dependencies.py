"""Linear dependencies within the A and B monomial sets.

Two families of identities are conjectured to generate every dependency:

* the five-site identity (odd supports)::

      (d,a)[b,c,e] - (d,b)[a,c,e] + (d,c)[a,b,e] - (d,e)[a,b,c] = 0

* the 4x4 determinant of scalar products between two disjoint site
  quadruples (even supports).

Both are multiplied by arbitrary pair monomials on the remaining sites.
Distinct supports are mutually orthogonal, so the Gram matrix is block
diagonal by support and ranks are accumulated block by block.
"""

from __future__ import annotations

import logging
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from ..errors import CapacityError
from .basis import enumerate_basis, pair_monomials
from .monomial import Monomial, canonicalize
from .trace import trace_inner

log = logging.getLogger(__name__)

DEPENDENCY_CAP = 8
Instance = dict[Monomial, int]


def _perm_sign(p) -> int:
    return (-1) ** sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def _times_pairs(inst: Instance, pairs: Monomial) -> Instance:
    out: Instance = {}
    for m, c in inst.items():
        mono, sign = canonicalize(m.pairs + pairs.pairs, m.triple)
        out[mono] = out.get(mono, 0) + sign * c
    return {m: c for m, c in out.items() if c}


def five_site_identity(sites) -> Instance:
    """The identity with ``sites[0]`` distinguished and the rest in order."""
    d, rest = sites[0], list(sites[1:])
    out: Instance = {}
    for k, partner in enumerate(rest):
        others = [s for s in rest if s != partner]
        mono, sign = canonicalize([(d, partner)], others)
        out[mono] = out.get(mono, 0) + (-1) ** k * sign
    return out


def determinant_identity(cols, rows) -> Instance:
    """``det[(s_c s_r)]`` over two disjoint site quadruples, expanded."""
    out: Instance = {}
    for perm in permutations(range(4)):
        mono, _ = canonicalize([(cols[perm[i]], rows[i]) for i in range(4)])
        out[mono] = out.get(mono, 0) + _perm_sign(perm)
    return {m: c for m, c in out.items() if c}


def five_site_instances(n: int) -> list[Instance]:
    out = []
    sites = range(1, n + 1)
    for core in combinations(sites, 5):
        rest = [s for s in sites if s not in core]
        for d in core:
            base = five_site_identity([d] + [s for s in core if s != d])
            for pm in pair_monomials(rest):
                out.append(_times_pairs(base, pm))
    return out


def determinant_instances(n: int) -> list[Instance]:
    out = []
    sites = range(1, n + 1)
    for core in combinations(sites, 8):
        rest = [s for s in sites if s not in core]
        first, others = core[0], core[1:]
        for more in combinations(others, 3):
            cols = (first,) + more
            rows = tuple(s for s in others if s not in more)
            base = determinant_identity(cols, rows)
            for pm in pair_monomials(rest):
                out.append(_times_pairs(base, pm))
    return out


def _rank(m: np.ndarray) -> tuple[int, bool]:
    """Numerical rank and an ill-conditioning flag (singular values near the cutoff)."""
    if m.size == 0:
        return 0, False
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0, False
    rel = s / s[0]
    cutoff = max(m.shape) * np.finfo(float).eps * 1e3
    rank = int(np.sum(rel > cutoff))
    grey = bool(np.any((rel > cutoff) & (rel < 1e-8)) or np.any((rel <= cutoff) & (rel > cutoff * 1e-3)))
    return rank, grey


@dataclass
class DependencyReport:
    n: int
    set_size: int
    gram_rank: int
    predicted_rank: int
    verified: bool
    ill_conditioned: bool = False
    identity_instances: int = 0
    blocks: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "set_size": self.set_size,
            "gram_rank": self.gram_rank,
            "predicted_rank": self.predicted_rank,
            "verified": self.verified,
            "ill_conditioned": self.ill_conditioned,
            "identity_instances": self.identity_instances,
            "blocks": self.blocks,
        }


def gram_blocks(elements: list[Monomial], n: int) -> dict[frozenset, tuple[list[int], np.ndarray]]:
    """Gram matrix ``tr(X Y) / 2^n`` split into same-support blocks."""
    groups: dict[frozenset, list[int]] = defaultdict(list)
    for k, m in enumerate(elements):
        groups[m.support].append(k)
    out = {}
    for supp, idx in groups.items():
        g = np.empty((len(idx), len(idx)))
        for a, i in enumerate(idx):
            for b in range(a, len(idx)):
                v = trace_inner(elements[i], elements[idx[b]], n) / 2**n
                g[a, b] = g[b, a] = v
        out[supp] = (idx, g)
    return out


def check_dependencies(n: int, cap: int = DEPENDENCY_CAP) -> DependencyReport:
    """Compare the Gram rank of the A and B sets with the rank left after
    quotienting by all instances of the two identity families."""
    if n > cap:
        raise CapacityError(f"dependency check for n={n} exceeds the cap n <= {cap}")
    elements = enumerate_basis(n, "AB", cap=max(cap, n))
    position = {m: k for k, m in enumerate(elements)}
    instances = five_site_instances(n) + determinant_instances(n)

    by_support: dict[frozenset, list[Instance]] = defaultdict(list)
    for inst in instances:
        supp = next(iter(inst)).support
        by_support[supp].append(inst)

    gram_rank = predicted = 0
    grey = False
    blocks = []
    summary: dict[tuple[int, str], dict] = {}
    for supp, (idx, g) in sorted(gram_blocks(elements, n).items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        r, flag = _rank(g)
        local = {i: a for a, i in enumerate(idx)}
        rows = by_support.get(supp, [])
        mat = np.zeros((len(rows), len(idx)))
        for a, inst in enumerate(rows):
            for m, c in inst.items():
                mat[a, local[position[m]]] = c
        ri, flag_i = _rank(mat)
        gram_rank += r
        predicted += len(idx) - ri
        grey |= flag or flag_i
        key = (len(supp), elements[idx[0]].sector)
        s = summary.setdefault(key, {"support_size": key[0], "sector": key[1], "supports": 0,
                                     "block_size": len(idx), "gram_rank": r, "quotient_rank": len(idx) - ri})
        s["supports"] += 1
    blocks = list(summary.values())
    if grey:
        warnings.warn(f"rank computation for n={n} is ill-conditioned", RuntimeWarning, stacklevel=2)
        log.warning("dependency rank for n=%d has singular values near the cutoff", n)
    return DependencyReport(
        n=n,
        set_size=len(elements),
        gram_rank=gram_rank,
        predicted_rank=predicted,
        verified=gram_rank == predicted,
        ill_conditioned=grey,
        identity_instances=len(instances),
        blocks=blocks,
    )
