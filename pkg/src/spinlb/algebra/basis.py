"""Enumeration of the scalar-product (A) and mixed-product (B) monomial sets."""

from __future__ import annotations

import hashlib
from itertools import combinations
from math import comb
from typing import Iterator, Sequence

from ..errors import CapacityError
from .monomial import IDENTITY, Monomial, canonicalize

ENUMERATION_CAP = 12


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def k_count(n: int, include_identity: bool = True) -> int:
    """Number of scalar-product monomials on ``n`` sites.

    ``sum_k C(n, 2k) (2k-1)!!``; the identity is the ``k = 0`` term.
    """
    total = sum(comb(n, 2 * k) * double_factorial(2 * k - 1) for k in range(n // 2 + 1))
    return total if include_identity else total - 1


def perfect_matchings(sites: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    """All ways to split an even-length ascending site list into pairs."""
    if not sites:
        yield []
        return
    first = sites[0]
    for k in range(1, len(sites)):
        rest = list(sites[1:k]) + list(sites[k + 1 :])
        for m in perfect_matchings(rest):
            yield [(first, sites[k])] + m


def pair_monomials(sites: Sequence[int]) -> Iterator[Monomial]:
    """Every pair-only monomial (identity included) on a subset of ``sites``."""
    sites = sorted(sites)
    for size in range(0, len(sites) + 1, 2):
        for sub in combinations(sites, size):
            for m in perfect_matchings(sub):
                yield canonicalize(m)[0]


def _a_key(m: Monomial):
    return (len(m.support), m.pairs)


def _b_key(m: Monomial):
    return (len(m.support), m.triple, m.pairs)


def enumerate_basis(n: int, sector: str = "A", cap: int = ENUMERATION_CAP) -> list[Monomial]:
    """Ordered monomial basis on ``n`` sites.

    Parameters
    ----------
    n : int
        Number of sites, ``n >= 1``.
    sector : {"A", "AB"}
        ``"A"`` gives the identity plus all perfect matchings of every even
        subset of sites.  ``"AB"`` appends the mixed-product monomials.
    cap : int
        Largest ``n`` accepted before raising :class:`CapacityError`.

    Ordering is deterministic: identity first, then by support size, then
    lexicographic on the canonical pair list (for B: on the triple, then the
    pairs); the B block follows the A block.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise CapacityError(f"basis enumeration for n={n} exceeds the cap n <= {cap}")
    if sector not in ("A", "AB"):
        raise ValueError(f"unknown sector {sector!r}")
    sites = list(range(1, n + 1))
    a_part = sorted(pair_monomials(sites), key=_a_key)
    assert a_part[0] == IDENTITY
    if sector == "A":
        return a_part
    b_part = []
    for triple in combinations(sites, 3):
        rest = [s for s in sites if s not in triple]
        for pm in pair_monomials(rest):
            b_part.append(canonicalize(pm.pairs, triple)[0])
    b_part.sort(key=_b_key)
    return a_part + b_part


def basis_hash(basis: Sequence[Monomial]) -> str:
    """Stable digest of a basis ordering, used to key cached artifacts."""
    h = hashlib.sha256()
    for m in basis:
        h.update(str(m).encode())
        h.update(b";")
    return h.hexdigest()
