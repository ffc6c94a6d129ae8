"""Anderson and symmetric-cluster lower bounds for the Heisenberg chain.

The chain ``H = sum_j (s_j s_{j+1})`` with periodic closure is cut into
translated open clusters of ``n`` sites and ``n - 1`` bonds.  Each bond
belongs to exactly one cluster, so the energy per spin equals the energy
per bond and every bound below is reported as ``min tr(H_cl rho) / (n - 1)``.

* Anderson: minimize over all cluster density matrices, i.e. the lowest
  eigenvalue of ``H_cl``.
* Symmetric cluster bound: minimize over ``rho = tau^2 / tr tau^2`` with
  ``tau`` a mirror-symmetric real combination of scalar-product monomials,
  subject to the translation equalities that survive the mirror
  identification.  The positivity of ``rho`` is built in.

The constrained problem is non-convex in ``b``; it is solved with an
augmented Lagrangian around L-BFGS and many seeded restarts.  A local
optimizer gives no certificate of the global minimum, so the report carries
the spread of the local minima and how often the best basin was hit.
"""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .algebra.monomial import OperatorPoly, canonicalize
from .algebra.structure import StructureTensor
from .errors import ContractViolationError, DegeneratePointError
from .oracle import min_eigenvalue, represent
from .symmetry import ConstraintSet

log = logging.getLogger(__name__)

BETHE_PER_SPIN = 1.0 - 4.0 * math.log(2.0)
DEGENERATE_TOL = 1e-14
BASIN_TOL = 1e-6
MIN_BASIN_HITS = 3


@dataclass(frozen=True)
class ClusterModel:
    """Open Heisenberg cluster of ``n`` sites with bonds ``(i, i + 1)``."""

    n: int
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a cluster needs at least two sites")
        if self.weights is not None and len(self.weights) != self.n - 1:
            raise ValueError("need one weight per bond")

    @property
    def bonds(self) -> list[tuple[int, int]]:
        return [(i, i + 1) for i in range(1, self.n)]

    @property
    def bond_weights(self) -> tuple[float, ...]:
        return self.weights if self.weights is not None else (1.0,) * (self.n - 1)

    @property
    def per_spin_factor(self) -> float:
        return 1.0 / (self.n - 1)

    def hamiltonian(self) -> OperatorPoly:
        terms = {}
        for (i, j), w in zip(self.bonds, self.bond_weights):
            terms[canonicalize([(i, j)])[0]] = w
        return OperatorPoly(terms, self.n)


@dataclass
class OptimizerConfig:
    restarts: int = 64
    seed: int = 0
    feas_tol: float = 1e-8
    penalty_init: float = 10.0
    penalty_growth: float = 5.0
    max_outer: int = 30
    max_inner: int = 2000
    grad_tol: float = 1e-10
    jobs: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "OptimizerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> "OptimizerConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class BoundReport:
    cluster_size: int
    anderson_per_spin: float
    variational_per_spin: float | None
    bethe_reference: float = BETHE_PER_SPIN
    status: str = "ok"
    optimizer_restarts_used: int = 0
    feasible_restarts: int = 0
    best_constraint_residual: float | None = None
    best_basin_hits: int = 0
    low_basin_hits: bool = False
    local_minima: list[float] = field(default_factory=list)
    a_coefficients: list[float] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def local_minima_spread(self) -> float:
        return max(self.local_minima) - min(self.local_minima) if self.local_minima else 0.0

    def to_json(self, timing: bool = False) -> dict:
        """JSON form; ``wall_time`` only when ``timing`` is set, so payloads stay reproducible."""
        doc = {
            "cluster_size": self.cluster_size,
            "anderson_per_spin": self.anderson_per_spin,
            "variational_per_spin": self.variational_per_spin,
            "bethe_reference": self.bethe_reference,
            "status": self.status,
            "optimizer_restarts_used": self.optimizer_restarts_used,
            "feasible_restarts": self.feasible_restarts,
            "best_constraint_residual": self.best_constraint_residual,
            "best_basin_hits": self.best_basin_hits,
            "low_basin_hits": self.low_basin_hits,
            "local_minima_spread": self.local_minima_spread,
            "local_minima": self.local_minima,
            "a_coefficients": self.a_coefficients,
        }
        if timing:
            doc["wall_time"] = self.wall_time
        return doc


def anderson_bound(model: ClusterModel, method: str = "auto") -> float:
    """Lowest eigenvalue of the cluster Hamiltonian, per spin."""
    return min_eigenvalue(represent(model.hamiltonian(), model.n), method) * model.per_spin_factor


def _energy_form(tensor: StructureTensor, model: ClusterModel) -> np.ndarray:
    # tr(H tau^2) / 2^n = 3 sum_bonds w * c_bond, since tr((s_i s_j)^2) = 3 * 2^n
    weights = {}
    for (i, j), w in zip(model.bonds, model.bond_weights):
        k = tensor.index(canonicalize([(i, j)])[0])
        weights[k] = weights.get(k, 0.0) + 3.0 * w * model.per_spin_factor
    return tensor.combined(weights)


def _ratio(b: np.ndarray, num: np.ndarray, den: np.ndarray) -> tuple[float, np.ndarray]:
    nb = num @ b
    db = den @ b
    g = float(b @ db)
    if g < DEGENERATE_TOL:
        raise DegeneratePointError(f"tr(tau^2) = {g:.3e} is degenerate")
    f = float(b @ nb) / g
    return f, 2.0 * (nb - f * db) / g


def objective(b: Sequence[float], tensor: StructureTensor, model: ClusterModel) -> tuple[float, np.ndarray]:
    """Per-spin energy ``tr(H_cl tau^2) / (tr tau^2 (n - 1))`` and its gradient.

    ``b`` holds one coefficient per A-sector basis element of ``tensor``.
    The value is invariant under ``b -> c b``, so no normalization
    constraint is needed.

    Raises
    ------
    DegeneratePointError
        If ``tr tau^2`` is numerically zero.
    """
    if tensor.n != model.n:
        raise ContractViolationError(f"tensor has n={tensor.n}, model has n={model.n}")
    b = np.asarray(b, dtype=float)
    return _ratio(b, _energy_form(tensor, model), tensor.matrix(0))


class ReducedProblem:
    """The constrained minimization in mirror-orbit coordinates.

    ``b_full = P @ b`` with ``P`` the orbit indicator matrix.  Every
    quantity is a ratio of quadratic forms over ``b^T G b`` (``G = C_0``),
    which keeps the problem scale invariant.
    """

    def __init__(self, tensor: StructureTensor, model: ClusterModel, constraints: ConstraintSet):
        if not (tensor.n == model.n == constraints.n):
            raise ContractViolationError("tensor, model and constraints disagree on n")
        self.tensor = tensor
        self.orbits = constraints.b_orbits
        p = np.zeros((tensor.size, len(self.orbits)))
        for o, members in enumerate(self.orbits):
            p[members, o] = 1.0
        self.P = p
        self.energy = p.T @ _energy_form(tensor, model) @ p
        self.gram = p.T @ tensor.matrix(constraints.normalization) @ p
        self.equalities = list(constraints.a_equalities)
        m = len(self.orbits)
        self.D = np.zeros((len(self.equalities), m, m))
        for r, (k, kp) in enumerate(self.equalities):
            self.D[r] = p.T @ (tensor.matrix(k) - tensor.matrix(kp)) @ p
        self._Dflat = self.D.reshape(-1, m)
        self.identity_orbit = next(o for o, mem in enumerate(self.orbits) if constraints.normalization in mem)

    @property
    def dim(self) -> int:
        return len(self.orbits)

    def value(self, b: np.ndarray) -> tuple[float, np.ndarray]:
        return _ratio(b, self.energy, self.gram)

    def residuals(self, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Normalized constraint values ``h_r = b^T D_r b / b^T G b`` and their Jacobian."""
        g = float(b @ self.gram @ b)
        if g < DEGENERATE_TOL:
            raise DegeneratePointError(f"tr(tau^2) = {g:.3e} is degenerate")
        if not self.equalities:
            return np.zeros(0), np.zeros((0, self.dim))
        db = (self._Dflat @ b).reshape(len(self.equalities), -1)
        h = db @ b / g
        jac = 2.0 * (db - np.outer(h, self.gram @ b)) / g
        return h, jac

    def lagrangian(self, b, lam, mu) -> tuple[float, np.ndarray]:
        f, gf = self.value(b)
        if not self.equalities:
            return f, gf
        h, jac = self.residuals(b)
        w = lam + mu * h
        return f + lam @ h + 0.5 * mu * (h @ h), gf + w @ jac

    def expand(self, b: np.ndarray) -> np.ndarray:
        return self.P @ b

    def normalize(self, b: np.ndarray) -> np.ndarray:
        return b / math.sqrt(float(b @ self.gram @ b))

    def initial_point(self, seed: int, restart: int) -> np.ndarray:
        rng = np.random.default_rng([seed, restart])
        b = rng.uniform(-0.5, 0.5, size=self.dim)
        b[self.identity_orbit] = 1.0
        return b


@dataclass
class LocalResult:
    restart: int
    value: float
    residual: float
    b: np.ndarray
    outer_iterations: int


def solve_from(problem: ReducedProblem, b0: np.ndarray, config: OptimizerConfig, restart: int = 0) -> LocalResult:
    """One augmented-Lagrangian run from ``b0``.

    Penalty starts at ``penalty_init`` and grows by ``penalty_growth``
    whenever the max residual fails to shrink fourfold; multipliers are
    updated after every inner L-BFGS solve.
    """
    b = problem.normalize(np.asarray(b0, dtype=float))
    lam = np.zeros(len(problem.equalities))
    mu = config.penalty_init
    prev = math.inf
    viol = math.inf
    outer = 0
    for outer in range(1, config.max_outer + 1):
        try:
            res = minimize(
                problem.lagrangian,
                b,
                args=(lam, mu),
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": config.max_inner, "gtol": config.grad_tol, "ftol": 1e-15, "maxcor": 20},
            )
        except DegeneratePointError:
            return LocalResult(restart, math.nan, math.inf, b, outer)
        b = problem.normalize(res.x)
        h, _ = problem.residuals(b)
        viol = float(np.max(np.abs(h))) if h.size else 0.0
        if viol < config.feas_tol:
            break
        lam = lam + mu * h
        if viol > 0.25 * prev:
            mu *= config.penalty_growth
        prev = viol
    value, _ = problem.value(b)
    return LocalResult(restart, value, viol, b, outer)


def _run_restart(args) -> LocalResult:
    problem, config, r = args
    return solve_from(problem, problem.initial_point(config.seed, r), config, r)


def variational_bound(
    model: ClusterModel,
    tensor: StructureTensor,
    constraints: ConstraintSet,
    config: OptimizerConfig | None = None,
    anderson: float | None = None,
) -> BoundReport:
    """Multistart minimization of the per-spin energy over symmetric clusters.

    Returns the lowest local minimum whose constraint residual is below
    ``config.feas_tol``.  If no restart reaches feasibility the report has
    ``status == "infeasible"`` and ``variational_per_spin is None``.
    """
    config = config or OptimizerConfig()
    start = time.perf_counter()
    problem = ReducedProblem(tensor, model, constraints)
    if anderson is None:
        anderson = anderson_bound(model)
    tasks = [(problem, config, r) for r in range(config.restarts)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_restart, tasks))
    else:
        results = [_run_restart(t) for t in tasks]
    results.sort(key=lambda r: r.restart)

    feasible = [r for r in results if math.isfinite(r.value) and r.residual < config.feas_tol]
    report = BoundReport(
        cluster_size=model.n,
        anderson_per_spin=anderson,
        variational_per_spin=None,
        optimizer_restarts_used=len(results),
        feasible_restarts=len(feasible),
    )
    if not feasible:
        report.status = "infeasible"
        finite = [r.residual for r in results if math.isfinite(r.residual)]
        report.best_constraint_residual = min(finite) if finite else None
        log.warning("n=%d: no restart reached feasibility", model.n)
    else:
        best = min(feasible, key=lambda r: (r.value, r.restart))
        report.variational_per_spin = best.value
        report.best_constraint_residual = best.residual
        report.local_minima = sorted(r.value for r in feasible)
        report.best_basin_hits = sum(1 for r in feasible if r.value - best.value < BASIN_TOL)
        report.low_basin_hits = report.best_basin_hits < MIN_BASIN_HITS
        report.a_coefficients = tensor.a_vector(problem.expand(best.b)).tolist()
        if report.low_basin_hits:
            log.warning("n=%d: best basin reached by only %d restarts", model.n, report.best_basin_hits)
    report.wall_time = time.perf_counter() - start
    return report


def sandwich_check(report: BoundReport, slack: float = 1e-9) -> bool:
    """``anderson <= variational <= 1 - 4 log 2`` within ``slack``."""
    if report.variational_per_spin is None or report.status != "ok":
        return False
    return (
        report.anderson_per_spin <= report.variational_per_spin + slack
        and report.variational_per_spin <= report.bethe_reference + slack
    )


def density_matrix(a: Sequence[float], tensor: StructureTensor) -> np.ndarray:
    """Dense ``rho = 2^-n sum_k a_k A_k`` for an a-vector over ``tensor.basis``."""
    poly = OperatorPoly({m: c for m, c in zip(tensor.basis, a)}, tensor.n)
    return represent(poly, tensor.n) / 2**tensor.n
