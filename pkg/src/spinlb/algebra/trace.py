"""Trace inner product ``tr(X^dagger Y)`` of two monomials by loop counting.

On every site shared by both monomials ``tr(s^a s^b) = 2 delta_ab``, and a
site covered by only one of them is traceless.  So the trace vanishes unless
the supports coincide, and otherwise the superimposed bonds of X and Y form
closed loops (each worth ``delta_aa = 3``) plus, when both carry a mixed
product, three open strands joining the slots of X's triple to the slots of
Y's triple.  Those strands contract ``eps_abc eps_pi(abc) = 6 sign(pi)``; a
strand returning to the triple it left kills the trace.
"""

from __future__ import annotations

from .monomial import Monomial


def _partners(m: Monomial) -> dict[int, int]:
    out = {}
    for i, j in m.pairs:
        out[i] = j
        out[j] = i
    return out


def trace_inner(x: Monomial, y: Monomial, n: int) -> int:
    """``tr(X^dagger Y)`` on ``n`` sites (monomials are Hermitian)."""
    if x.support != y.support:
        return 0
    if (x.triple is None) != (y.triple is None):
        return 0
    xp, yp = _partners(x), _partners(y)
    seen: set[int] = set()
    value = 1

    if x.triple is not None:
        y_slot = {s: k for k, s in enumerate(y.triple)}
        target = []
        for start in x.triple:
            seen.add(start)
            cur = start
            while cur not in y_slot:
                nxt = yp[cur]
                seen.add(nxt)
                if nxt in x.triple:
                    return 0
                cur = xp[nxt]
                seen.add(cur)
            target.append(y_slot[cur])
        if sorted(target) != [0, 1, 2]:
            return 0
        inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if target[i] > target[j])
        value = 6 * (-1) ** inversions

    loops = 0
    for site in sorted(x.support):
        if site in seen:
            continue
        loops += 1
        cur = site
        while True:
            seen.add(cur)
            nxt = xp[cur]
            seen.add(nxt)
            cur = yp[nxt]
            if cur == site:
                break
    return value * 3**loops * 2**n
