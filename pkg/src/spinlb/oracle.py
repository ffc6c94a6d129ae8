"""Dense 2^n x 2^n matrices for spin operators, plus eigen-solvers.

This is the brute-force ground truth the symbolic algebra and the bounds
are checked against.  Matrices are plain complex numpy arrays.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Union

import numpy as np

from .algebra.monomial import Monomial, OperatorPoly
from .errors import CapacityError, ContractViolationError

MAX_SITES = 10
HERMITIAN_TOL = 1e-10
JACOBI_MAX_DIM = 256

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# nonzero Levi-Civita entries (a, b, c, sign)
_EPS = ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (0, 2, 1, -1), (2, 1, 0, -1), (1, 0, 2, -1))


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapacityError(f"{n} sites exceeds the dense-matrix cap of {cap}")


def site_operator(n: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker product with ``ops[site]`` on the given 1-based sites, identity elsewhere."""
    out = np.ones((1, 1), dtype=complex)
    eye = np.eye(2, dtype=complex)
    for site in range(1, n + 1):
        out = np.kron(out, ops.get(site, eye))
    return out


@lru_cache(maxsize=512)
def _pair_matrix(n: int, i: int, j: int) -> np.ndarray:
    m = sum(site_operator(n, {i: s, j: s}) for s in SIGMA)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=512)
def _triple_matrix(n: int, p: int, r: int, s: int) -> np.ndarray:
    m = sum(sign * site_operator(n, {p: SIGMA[a], r: SIGMA[b], s: SIGMA[c]}) for a, b, c, sign in _EPS)
    m.setflags(write=False)
    return m


def _monomial_matrix(m: Monomial, n: int) -> np.ndarray:
    out = np.eye(2**n, dtype=complex)
    for i, j in m.pairs:
        out = out @ _pair_matrix(n, i, j)
    if m.triple is not None:
        out = out @ _triple_matrix(n, *m.triple)
    return out


def represent(x: Union[Monomial, OperatorPoly], n: int, cap: int = MAX_SITES) -> np.ndarray:
    """Dense matrix of a monomial or polynomial on ``n`` sites."""
    _check_cap(n, cap)
    if isinstance(x, Monomial):
        if x.max_site > n:
            raise ContractViolationError(f"{x} does not fit on {n} sites")
        return _monomial_matrix(x, n)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for mono, c in x.terms.items():
        if mono.max_site > n:
            raise ContractViolationError(f"{mono} does not fit on {n} sites")
        out += c * _monomial_matrix(mono, n)
    return out


def _check_hermitian(op: np.ndarray) -> None:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ContractViolationError(f"expected a square matrix, got shape {op.shape}")
    if not np.allclose(op, op.conj().T, atol=HERMITIAN_TOL, rtol=0):
        raise ContractViolationError("operator is not Hermitian")


def real_embedding(op: np.ndarray) -> np.ndarray:
    """Real symmetric ``[[X, -Y], [Y, X]]`` for Hermitian ``X + iY``; spectrum doubled."""
    x, y = op.real, op.imag
    return np.block([[x, -y], [y, x]])


def _round_robin(size: int):
    """Rounds of disjoint index pairs covering all pairs once (circle method)."""
    idx = list(range(size))
    for _ in range(size - 1):
        yield [(idx[k], idx[size - 1 - k]) for k in range(size // 2)]
        idx = [idx[0]] + [idx[-1]] + idx[1:-1]


def jacobi_eigvalsh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by parallel-ordered cyclic Jacobi.

    Every round rotates a set of disjoint (p, q) planes at once; a sweep is
    one full round-robin over all planes.  Stops when the off-diagonal
    Frobenius norm drops below ``tol`` (relative to the matrix norm when that
    exceeds one).
    """
    a = np.array(a, dtype=float)
    size = a.shape[0]
    if size == 1:
        return a.diagonal().copy()
    pad = size % 2
    if pad:
        a = np.pad(a, ((0, 1), (0, 1)))
    full = a.shape[0]
    scale = max(1.0, np.linalg.norm(a))
    rounds = [(np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in _round_robin(full)]

    def off(m):
        # direct sum; ||m||^2 - ||diag||^2 cancels catastrophically
        return np.linalg.norm(m - np.diag(m.diagonal()))

    for _ in range(max_sweeps):
        if off(a) < tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            active = np.abs(apq) > 1e-30 * scale
            theta = (aqq - app) / (2 * np.where(active, apq, 1.0))
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(1.0, theta))
            t = np.where(active, t, 0.0)
            c = 1 / np.sqrt(1 + t**2)
            s = t * c
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * cp - s * cq
            a[:, q] = s * cp + c * cq
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
    else:
        raise ContractViolationError("Jacobi iteration did not converge")
    vals = a.diagonal().copy()
    if pad:
        # the padded zero row/column decouples; drop one zero eigenvalue
        vals = np.delete(vals, size)
    return np.sort(vals)


def eigvalsh(op: np.ndarray, method: str = "auto") -> np.ndarray:
    """Sorted eigenvalues of a Hermitian matrix.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    :data:`JACOBI_MAX_DIM` real dimensions, LAPACK beyond).
    """
    _check_hermitian(op)
    op = np.asarray(op)
    is_real = not np.iscomplexobj(op) or np.abs(op.imag).max(initial=0.0) == 0.0
    dim = op.shape[0] * (1 if is_real else 2)
    if method == "auto":
        method = "jacobi" if dim <= JACOBI_MAX_DIM else "lapack"
    if method == "lapack":
        return np.linalg.eigvalsh(op)
    if method != "jacobi":
        raise ValueError(f"unknown eigensolver {method!r}")
    if is_real:
        return jacobi_eigvalsh(np.real(op))
    return jacobi_eigvalsh(real_embedding(op))[::2]


def min_eigenvalue(op: np.ndarray, method: str = "auto") -> float:
    """Smallest eigenvalue of a Hermitian matrix (checked to 1e-10)."""
    return float(eigvalsh(op, method)[0])


def inverse_iteration(op: np.ndarray, shift: float, iters: int = 200, seed: int = 0) -> float:
    """Eigenvalue of ``op`` nearest ``shift`` via inverse power iteration."""
    op = np.asarray(op, dtype=complex)
    dim = op.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    lu = np.linalg.inv(op - shift * np.eye(dim))
    lam = shift
    for _ in range(iters):
        w = lu @ v
        v = w / np.linalg.norm(w)
        new = float(np.real(np.vdot(v, op @ v)))
        if abs(new - lam) < 1e-15:
            lam = new
            break
        lam = new
    return lam


def spectrum_positivity(op: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff every eigenvalue is >= -tol."""
    return bool(eigvalsh(op)[0] >= -tol)
