"""Canonical SU(2)-invariant monomials and sparse operator polynomials.

A monomial is a product of scalar products ``(s_i s_j)`` over disjoint site
pairs, optionally times one mixed product ``[s_p s_r s_s]`` on three further
sites.  Sites are 1-based.  The mixed product is totally antisymmetric, so a
permuted triple is stored ascending and the permutation parity is handed
back to the caller to fold into a coefficient.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from ..errors import MalformedMonomialError

PRUNE_TOL = 1e-12

Pair = tuple[int, int]
Triple = tuple[int, int, int]


def _perm_parity(seq: tuple[int, ...]) -> int:
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Monomial:
    """Canonical monomial; build through :func:`canonicalize`, not directly."""

    pairs: tuple[Pair, ...] = ()
    triple: Triple | None = None

    @property
    def support(self) -> frozenset[int]:
        sites = [s for p in self.pairs for s in p]
        if self.triple is not None:
            sites.extend(self.triple)
        return frozenset(sites)

    @property
    def is_identity(self) -> bool:
        return not self.pairs and self.triple is None

    @property
    def sector(self) -> str:
        return "A" if self.triple is None else "B"

    @property
    def max_site(self) -> int:
        return max(self.support, default=0)

    def shape(self) -> tuple[int, int]:
        """(number of pairs, number of triples)."""
        return len(self.pairs), 0 if self.triple is None else 1

    def relabel(self, mapping: Mapping[int, int]) -> tuple["Monomial", int]:
        """Apply a site map and re-canonicalize; returns (monomial, sign)."""
        pairs = [(mapping[i], mapping[j]) for i, j in self.pairs]
        triple = None
        if self.triple is not None:
            triple = tuple(mapping[s] for s in self.triple)
        return canonicalize(pairs, triple)

    def __str__(self) -> str:
        if self.is_identity:
            return "1"
        out = ""
        if self.triple is not None:
            out += "[%d,%d,%d]" % self.triple
        out += "".join("(%d,%d)" % p for p in self.pairs)
        return out

    def __repr__(self) -> str:
        return f"Monomial({self})"


IDENTITY = Monomial()


def canonicalize(
    pairs: Iterable[Iterable[int]] = (), triple: Iterable[int] | None = None
) -> tuple[Monomial, int]:
    """Return the canonical monomial and the sign picked up by sorting the triple.

    Raises
    ------
    MalformedMonomialError
        If a site repeats, a pair or triple has the wrong arity, or an index
        is not a positive integer.
    """
    seen: set[int] = set()

    def _take(site) -> int:
        if isinstance(site, bool) or not isinstance(site, int) or site < 1:
            raise MalformedMonomialError(f"site index must be a positive int, got {site!r}")
        if site in seen:
            raise MalformedMonomialError(f"site {site} appears twice")
        seen.add(site)
        return site

    canon_pairs = []
    for p in pairs:
        p = tuple(p)
        if len(p) != 2:
            raise MalformedMonomialError(f"pair must have two sites, got {p!r}")
        i, j = _take(p[0]), _take(p[1])
        canon_pairs.append((i, j) if i < j else (j, i))
    canon_pairs.sort()

    sign = 1
    canon_triple = None
    if triple is not None:
        t = tuple(triple)
        if len(t) != 3:
            raise MalformedMonomialError(f"triple must have three sites, got {t!r}")
        for s in t:
            _take(s)
        sign = _perm_parity(t)
        canon_triple = tuple(sorted(t))
    return Monomial(tuple(canon_pairs), canon_triple), sign


_TOKEN = re.compile(r"\s*(\(\s*\d+\s*,\s*\d+\s*\)|\[\s*\d+\s*,\s*\d+\s*,\s*\d+\s*\])")


def parse_monomial(text: str) -> tuple[Monomial, int]:
    """Parse ``"(1,2)(3,4)"``, ``"[1,2,3](4,5)"`` or ``"1"``."""
    text = text.strip()
    if text in ("1", ""):
        return IDENTITY, 1
    pairs, triple, pos = [], None, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise MalformedMonomialError(f"cannot parse monomial {text!r}")
        body = [int(x) for x in m.group(1)[1:-1].split(",")]
        if m.group(1).startswith("["):
            if triple is not None:
                raise MalformedMonomialError(f"more than one mixed product in {text!r}")
            triple = body
        else:
            pairs.append(body)
        pos = m.end()
    return canonicalize(pairs, triple)


class OperatorPoly:
    """Sparse complex linear combination of canonical monomials on ``n`` sites."""

    __slots__ = ("terms", "n")

    def __init__(self, terms: Mapping[Monomial, complex] | None = None, n: int = 0):
        self.n = n
        self.terms: dict[Monomial, complex] = {}
        for mono, c in (terms or {}).items():
            if mono.max_site > n:
                raise MalformedMonomialError(f"{mono} has sites outside [1, {n}]")
            if abs(c) >= PRUNE_TOL:
                self.terms[mono] = complex(c)

    @classmethod
    def from_monomial(cls, mono: Monomial, n: int, coeff: complex = 1.0) -> "OperatorPoly":
        return cls({mono: coeff}, n)

    @classmethod
    def parse(cls, spec: Mapping[str, complex], n: int) -> "OperatorPoly":
        """Build from ``{"(1,2)": 1, "[1,2,3]": -2j, ...}``."""
        terms: dict[Monomial, complex] = {}
        for text, c in spec.items():
            mono, sign = parse_monomial(text)
            terms[mono] = terms.get(mono, 0) + sign * c
        return cls(terms, n)

    def __iter__(self) -> Iterator[tuple[Monomial, complex]]:
        return iter(sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0])))

    def __len__(self) -> int:
        return len(self.terms)

    def coeff(self, mono: Monomial) -> complex:
        return self.terms.get(mono, 0j)

    def _combine(self, other: "OperatorPoly", sign: float) -> "OperatorPoly":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, 0j) + sign * c
        return OperatorPoly(out, max(self.n, other.n))

    def __add__(self, other: "OperatorPoly") -> "OperatorPoly":
        return self._combine(other, 1.0)

    def __sub__(self, other: "OperatorPoly") -> "OperatorPoly":
        return self._combine(other, -1.0)

    def __mul__(self, other):
        if isinstance(other, OperatorPoly):
            from .product import multiply

            return multiply(self, other)
        return OperatorPoly({m: c * other for m, c in self.terms.items()}, self.n)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorPoly":
        return self * -1.0

    def is_zero(self, tol: float = PRUNE_TOL) -> bool:
        return all(abs(c) < tol for c in self.terms.values())

    def sector_split(self) -> tuple["OperatorPoly", "OperatorPoly"]:
        """Split into (A-sector part, B-sector part)."""
        a = {m: c for m, c in self.terms.items() if m.triple is None}
        b = {m: c for m, c in self.terms.items() if m.triple is not None}
        return OperatorPoly(a, self.n), OperatorPoly(b, self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorPoly):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self:
            if c.imag == 0:
                cs = f"{c.real:g}"
            elif c.real == 0:
                cs = f"{c.imag:g}i"
            else:
                cs = f"({c.real:g}{c.imag:+g}i)"
            parts.append(f"{cs}*{mono}")
        return " + ".join(parts)


def _sort_key(mono: Monomial):
    return (mono.triple is not None, len(mono.support), mono.triple or (), mono.pairs)


monomial_sort_key = _sort_key
