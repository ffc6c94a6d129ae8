"""Symmetrized structure constants of the scalar-product basis.

For a real combination ``tau = sum_i b_i A_i`` of A-sector monomials,
``tau^2 = sum_k (b^T C_k b) A_k`` where ``C_k[i, j]`` is the coefficient of
``A_k`` in ``(A_i A_j + A_j A_i) / 2``.  The mixed-product parts of the two
orderings must cancel; the builder checks that instead of assuming it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import InternalConsistencyError
from .basis import ENUMERATION_CAP, basis_hash, enumerate_basis
from .monomial import Monomial, parse_monomial
from .product import multiply_monomials
from .trace import trace_inner

FORMAT = "spinlb.structure_tensor"
FORMAT_VERSION = 1
RESIDUE_TOL = 1e-10


@dataclass
class StructureTensor:
    n: int
    basis: list[Monomial]
    # entries[k] = {(i, j): value} with i <= j
    entries: list[dict[tuple[int, int], float]]
    _dense: dict[int, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    def index(self, mono: Monomial) -> int:
        return self.basis.index(mono)

    def matrix(self, k: int) -> np.ndarray:
        """Dense symmetric ``C_k``."""
        if k not in self._dense:
            m = np.zeros((self.size, self.size))
            for (i, j), v in self.entries[k].items():
                m[i, j] = v
                m[j, i] = v
            m.setflags(write=False)
            self._dense[k] = m
        return self._dense[k]

    def combined(self, weights: dict[int, float]) -> np.ndarray:
        """``sum_k w_k C_k`` as a dense matrix."""
        m = np.zeros((self.size, self.size))
        for k, w in weights.items():
            for (i, j), v in self.entries[k].items():
                m[i, j] += w * v
                if i != j:
                    m[j, i] += w * v
        return m

    def square_coeffs(self, b: Sequence[float]) -> np.ndarray:
        """Raw coefficients ``c_k = b^T C_k b`` of ``tau^2``."""
        b = np.asarray(b, dtype=float)
        out = np.zeros(self.size)
        for k, ent in enumerate(self.entries):
            s = 0.0
            for (i, j), v in ent.items():
                s += v * b[i] * b[j] * (1 if i == j else 2)
            out[k] = s
        return out

    def a_vector(self, b: Sequence[float]) -> np.ndarray:
        """Normalized a-coefficients of ``rho = tau^2 / tr tau^2`` (``a[0] = 1``)."""
        c = self.square_coeffs(b)
        return c / c[0]

    def to_json(self) -> dict:
        return {
            "format": FORMAT,
            "version": FORMAT_VERSION,
            "n": self.n,
            "basis_hash": basis_hash(self.basis),
            "basis": [str(m) for m in self.basis],
            "coeffs": [
                [[i, j, v] for (i, j), v in sorted(ent.items())] for ent in self.entries
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "StructureTensor":
        if doc.get("format") != FORMAT or doc.get("version") != FORMAT_VERSION:
            raise ValueError("not a structure tensor document of a supported version")
        basis = []
        for text in doc["basis"]:
            mono, sign = parse_monomial(text)
            if sign != 1:
                raise ValueError(f"non-canonical basis entry {text!r}")
            basis.append(mono)
        if basis_hash(basis) != doc["basis_hash"]:
            raise ValueError("basis hash mismatch")
        entries = [{(int(i), int(j)): float(v) for i, j, v in ent} for ent in doc["coeffs"]]
        return cls(int(doc["n"]), basis, entries)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)


def _b_residue_norm(residue: dict[Monomial, complex], n: int) -> float:
    """Hilbert-Schmidt norm of a B-sector combination, normalized by 2^n."""
    items = list(residue.items())
    total = 0.0
    for x, cx in items:
        for y, cy in items:
            if x.support == y.support:
                total += (np.conj(cx) * cy * trace_inner(x, y, n)).real
    return float(np.sqrt(max(total, 0.0) / 2**n))


def build_structure_tensor(n: int, cap: int = ENUMERATION_CAP, tol: float = RESIDUE_TOL) -> StructureTensor:
    """Expand every anticommutator of A-sector monomials on ``n`` sites.

    Both orderings are multiplied out independently.  The mixed-product
    residue of their sum must vanish as an operator (checked via the trace
    norm when coefficients do not cancel termwise), and the A-sector
    coefficients must be real.

    Raises
    ------
    InternalConsistencyError
        If either check fails beyond ``tol``.
    """
    basis = enumerate_basis(n, "A", cap=cap)
    index = {m: k for k, m in enumerate(basis)}
    entries: list[dict[tuple[int, int], float]] = [dict() for _ in basis]
    for i, x in enumerate(basis):
        for j in range(i, len(basis)):
            y = basis[j]
            acc: dict[Monomial, complex] = {}
            for m, c in multiply_monomials(x, y).items():
                acc[m] = acc.get(m, 0j) + 0.5 * c
            for m, c in multiply_monomials(y, x).items():
                acc[m] = acc.get(m, 0j) + 0.5 * c
            residue = {}
            for m, c in acc.items():
                if abs(c) < 1e-12:
                    continue
                if m.triple is not None:
                    residue[m] = c
                    continue
                if abs(c.imag) > tol:
                    raise InternalConsistencyError(
                        f"imaginary A-sector coefficient {c} for {m} in {{{x}, {y}}}"
                    )
                entries[index[m]][(i, j)] = float(c.real)
            if residue and _b_residue_norm(residue, n) > tol:
                raise InternalConsistencyError(f"mixed-product residue does not cancel in {{{x}, {y}}}")
    return StructureTensor(n, basis, entries)
