"""Multiplication of SU(2)-invariant monomials by index contraction.

Every monomial is a tensor network: a scalar product ``(s_i s_j)`` is a
Kronecker delta joining the vector indices of the Pauli vectors on sites i
and j, and a mixed product ``[s_p s_r s_s]`` is a Levi-Civita symbol on three
of them.  Multiplying two monomials stacks the networks; on every site
shared by both factors the two Pauli matrices are fused with

    s^a s^b = delta_ab + i eps_abc s^c

after which the network is reduced with ``delta`` contraction
(``delta_aa = 3``) and the determinant expansion of ``eps eps`` until each
remaining index sits on exactly one site.  The surviving deltas are the
scalar products of the result and at most one epsilon survives as its mixed
product.  The tabulated product relations (see :mod:`.relations`) all follow
from these two identities, and two mixed products with disjoint sites reduce
through the same determinant expansion.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Union

from ..errors import ContractViolationError
from .monomial import IDENTITY, PRUNE_TOL, Monomial, OperatorPoly, canonicalize, monomial_sort_key

# (permutation of the second epsilon's slots, sign)
_PERMS = (
    ((0, 1, 2), 1),
    ((1, 2, 0), 1),
    ((2, 0, 1), 1),
    ((0, 2, 1), -1),
    ((2, 1, 0), -1),
    ((1, 0, 2), -1),
)


def _substitute(deltas: list, eps: list, old: int, new: int) -> None:
    for k, (a, b) in enumerate(deltas):
        if a == old:
            deltas[k] = (new, b)
            return
        if b == old:
            deltas[k] = (a, new)
            return
    for k, e in enumerate(eps):
        if old in e:
            eps[k] = tuple(new if x == old else x for x in e)
            return


def _reduce(coef: complex, deltas: list, eps: list, free: dict, out: dict) -> None:
    stack = [(coef, deltas, eps)]
    while stack:
        coef, deltas, eps = stack.pop()
        deltas = list(deltas)
        eps = list(eps)
        # contract every delta that carries an internal index
        k = 0
        while k < len(deltas):
            a, b = deltas[k]
            if a == b:
                coef *= 3
                deltas.pop(k)
                k = 0
            elif a not in free:
                deltas.pop(k)
                _substitute(deltas, eps, a, b)
                k = 0
            elif b not in free:
                deltas.pop(k)
                _substitute(deltas, eps, b, a)
                k = 0
            else:
                k += 1
        if any(e[0] == e[1] or e[0] == e[2] or e[1] == e[2] for e in eps):
            continue

        pick = None
        for i in range(len(eps)):
            for j in range(i + 1, len(eps)):
                if set(eps[i]) & set(eps[j]):
                    pick = (i, j)
                    break
            if pick:
                break
        if pick is None and len(eps) >= 2:
            pick = (0, 1)
        if pick is not None:
            i, j = pick
            e1, e2 = eps[i], eps[j]
            rest = [e for k, e in enumerate(eps) if k != i and k != j]
            for perm, sgn in _PERMS:
                new = deltas + [(e1[0], e2[perm[0]]), (e1[1], e2[perm[1]]), (e1[2], e2[perm[2]])]
                stack.append((coef * sgn, new, rest))
            continue

        pairs = [(free[a], free[b]) for a, b in deltas]
        triple = tuple(free[x] for x in eps[0]) if eps else None
        mono, sign = canonicalize(pairs, triple)
        out[mono] = out.get(mono, 0j) + sign * coef


@lru_cache(maxsize=None)
def _product_compact(x: Monomial, y: Monomial) -> tuple[tuple[Monomial, complex], ...]:
    label = 0
    xl, yl = {}, {}
    for site in sorted(x.support):
        xl[site] = label
        label += 1
    for site in sorted(y.support):
        yl[site] = label
        label += 1

    deltas, eps = [], []
    for i, j in x.pairs:
        deltas.append((xl[i], xl[j]))
    if x.triple is not None:
        eps.append(tuple(xl[s] for s in x.triple))
    for i, j in y.pairs:
        deltas.append((yl[i], yl[j]))
    if y.triple is not None:
        eps.append(tuple(yl[s] for s in y.triple))

    shared = sorted(x.support & y.support)
    free = {}
    for site, lab in xl.items():
        if site not in y.support:
            free[lab] = site
    for site, lab in yl.items():
        if site not in x.support:
            free[lab] = site

    out: dict[Monomial, complex] = {}
    # fuse s^a s^b on each shared site: choice bit 0 -> delta, 1 -> i*eps
    for mask in range(1 << len(shared)):
        d = list(deltas)
        e = list(eps)
        f = dict(free)
        coef = 1 + 0j
        nxt = label
        for bit, site in enumerate(shared):
            if mask >> bit & 1:
                e.append((xl[site], yl[site], nxt))
                f[nxt] = site
                nxt += 1
                coef *= 1j
            else:
                d.append((xl[site], yl[site]))
        _reduce(coef, d, e, f, out)
    kept = [(m, c) for m, c in out.items() if abs(c) >= PRUNE_TOL]
    return tuple(sorted(kept, key=lambda mc: monomial_sort_key(mc[0])))


def multiply_monomials(x: Monomial, y: Monomial) -> dict[Monomial, complex]:
    """Product ``x * y`` as ``{monomial: coefficient}``.

    The work is cached on the order-preserving relabeling of the joint
    support onto ``1..m``, so translated copies of a product are computed once.
    """
    if x.is_identity:
        return {y: 1 + 0j}
    if y.is_identity:
        return {x: 1 + 0j}
    sites = sorted(x.support | y.support)
    down = {s: k + 1 for k, s in enumerate(sites)}
    up = {k + 1: s for k, s in enumerate(sites)}
    xc, _ = x.relabel(down)
    yc, _ = y.relabel(down)
    out = {}
    for mono, c in _product_compact(xc, yc):
        m, _ = mono.relabel(up)
        out[m] = c
    return out


PolyLike = Union[OperatorPoly, Monomial]


def _as_poly(x: PolyLike, n: int) -> OperatorPoly:
    if isinstance(x, Monomial):
        return OperatorPoly({x: 1.0}, max(n, x.max_site))
    return x


def multiply(x: PolyLike, y: PolyLike) -> OperatorPoly:
    """Product of two operator polynomials (or bare monomials), fully reduced.

    Each output monomial has pairwise disjoint factors and at most one mixed
    product.  Coefficients below the prune threshold are dropped.
    """
    if isinstance(x, OperatorPoly) and isinstance(y, OperatorPoly) and x.n != y.n:
        raise ContractViolationError(f"site counts differ: {x.n} vs {y.n}")
    n = max(getattr(x, "n", 0), getattr(y, "n", 0))
    px, py = _as_poly(x, n), _as_poly(y, n)
    n = max(px.n, py.n)
    out: dict[Monomial, complex] = {}
    for mx, cx in px.terms.items():
        for my, cy in py.terms.items():
            for m, c in multiply_monomials(mx, my).items():
                out[m] = out.get(m, 0j) + cx * cy * c
    return OperatorPoly(out, n)


def identity_poly(n: int) -> OperatorPoly:
    return OperatorPoly({IDENTITY: 1.0}, n)
