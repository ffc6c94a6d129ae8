"""Linear constraints that cut the cluster density matrices down to the
symmetric set: translation equalities on the ``a`` coefficients of
``rho = 2^-n sum_k a_k A_k`` and mirror orbits on the ``b`` coefficients of
``tau = sum_k b_k A_k``.

Geometry enters only through site maps, so other lattices can supply their
own generators; the chain helpers below are the only ones wired up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra.monomial import Monomial

SiteMap = Mapping[int, int]


def chain_shift(n: int) -> dict[int, int]:
    """Translation by one site; sites mapped outside the cluster are omitted."""
    return {s: s + 1 for s in range(1, n)}


def chain_mirror(n: int) -> dict[int, int]:
    return {s: n + 1 - s for s in range(1, n + 1)}


def image(mono: Monomial, site_map: SiteMap) -> Monomial | None:
    """Image of a pair-only monomial under a (partial) site map, or None if it leaves the map's domain."""
    if mono.triple is not None:
        raise ValueError("symmetry constraints are defined on the scalar-product sector only")
    if any(s not in site_map for s in mono.support):
        return None
    out, _ = mono.relabel(site_map)
    return out


def translation_constraints(n: int, basis: Sequence[Monomial]) -> list[tuple[int, int]]:
    """Pairs ``(k, k')`` with ``A_k'`` the one-site translate of ``A_k`` inside the cluster.

    The identity is skipped (its translate is itself).  Every shape is
    included, not only single scalar products.
    """
    index = {m: k for k, m in enumerate(basis)}
    shift = chain_shift(n)
    out = []
    for k, m in enumerate(basis):
        if m.is_identity:
            continue
        t = image(m, shift)
        if t is not None:
            out.append((k, index[t]))
    return out


def orbit_partition(basis: Sequence[Monomial], generators: Sequence[SiteMap]) -> list[list[int]]:
    """Orbits of basis indices under the group generated by full site permutations."""
    index = {m: k for k, m in enumerate(basis)}
    parent = list(range(len(basis)))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for g in generators:
        for k, m in enumerate(basis):
            t = image(m, g)
            if t is None:
                raise ValueError("orbit generators must be permutations of all sites")
            a, b = find(k), find(index[t])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for k in range(len(basis)):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values())


def mirror_identification(n: int, basis: Sequence[Monomial]) -> list[list[int]]:
    """Partition of basis indices into orbits of the reflection ``i -> n + 1 - i``."""
    return orbit_partition(basis, [chain_mirror(n)])


def residual_constraints(
    translation: Sequence[tuple[int, int]], mirror: Sequence[Sequence[int]]
) -> list[tuple[int, int]]:
    """Translation equalities not already implied by the mirror orbits.

    Mirror-symmetric ``b`` makes ``a`` constant on every mirror orbit.  An
    equality is dropped when its two ends are already linked through the
    orbits plus the equalities kept so far, so e.g. on four sites only
    ``a_(1,2) = a_(2,3)`` survives.
    """
    orbit_of = {}
    for o, members in enumerate(mirror):
        for k in members:
            orbit_of[k] = o
    parent = list(range(len(mirror)))

    def find(o):
        while parent[o] != o:
            parent[o] = parent[parent[o]]
            o = parent[o]
        return o

    out = []
    for k, kp in translation:
        a, b = find(orbit_of[k]), find(orbit_of[kp])
        if a == b:
            continue
        parent[max(a, b)] = min(a, b)
        out.append((k, kp))
    return out


@dataclass
class ConstraintSet:
    n: int
    translation: list[tuple[int, int]]
    a_equalities: list[tuple[int, int]]
    b_orbits: list[list[int]]
    normalization: int = 0
    labels: list[str] = field(default_factory=list)

    def describe(self) -> dict:
        """Human-readable form using monomial strings."""
        lab = self.labels
        return {
            "translation": [[lab[k], lab[kp]] for k, kp in self.translation],
            "a_equalities": [[lab[k], lab[kp]] for k, kp in self.a_equalities],
            "b_orbits": [[lab[k] for k in orb] for orb in self.b_orbits],
        }

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "normalization": self.normalization,
            "translation": [list(p) for p in self.translation],
            "a_equalities": [list(p) for p in self.a_equalities],
            "b_orbits": [list(o) for o in self.b_orbits],
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ConstraintSet":
        return cls(
            n=int(doc["n"]),
            translation=[tuple(p) for p in doc["translation"]],
            a_equalities=[tuple(p) for p in doc["a_equalities"]],
            b_orbits=[list(o) for o in doc["b_orbits"]],
            normalization=int(doc["normalization"]),
            labels=list(doc.get("labels", [])),
        )


def build_constraints(n: int, basis: Sequence[Monomial]) -> ConstraintSet:
    translation = translation_constraints(n, basis)
    mirror = mirror_identification(n, basis)
    return ConstraintSet(
        n=n,
        translation=translation,
        a_equalities=residual_constraints(translation, mirror),
        b_orbits=mirror,
        normalization=0,
        labels=[str(m) for m in basis],
    )
