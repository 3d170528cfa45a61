"""Dense strictly convex QP solver with KKT certification.

Dual active-set method: starting from the unconstrained minimizer, the
most violated inequality is driven to equality while dual-blocking
constraints are dropped along the way. The method is finite and
deterministic, needs no feasible starting point, and an unbounded dual
ray is an infeasibility certificate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .condense import QpProblem


@dataclass(frozen=True)
class SolverSettings:
    feasibility_tol: float = 1e-8
    stationarity_tol: float = 1e-8
    complementarity_tol: float = 1e-8
    max_iterations: int = 10000

    def __post_init__(self):
        for name in ("feasibility_tol", "stationarity_tol", "complementarity_tol"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")


class QpStatus(enum.Enum):
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max_iterations"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class QpSolution:
    """Solver output: minimizer, status, and certified KKT residuals."""

    u_star: np.ndarray
    status: QpStatus
    iterations: int
    kkt: tuple
    duals: np.ndarray


def check_kkt(problem: QpProblem, candidate, duals) -> tuple:
    """Residual norms (stationarity, primal feasibility, complementarity).

    Duals must be nonnegative; anything else is not a candidate
    certificate for an inequality-constrained minimum.
    """
    u = np.asarray(candidate, dtype=float)
    lam = np.asarray(duals, dtype=float)
    if u.shape != (problem.n,):
        raise ValueError(f"candidate must have shape ({problem.n},)")
    if lam.shape != (problem.G.shape[0],):
        raise ValueError("one multiplier per inequality row required")
    if lam.size and float(lam.min()) < 0.0:
        raise ValueError("inequality multipliers must be nonnegative")
    slack = problem.G @ u - problem.h
    stationarity = float(np.max(np.abs(problem.Q @ u + problem.p + problem.G.T @ lam)))
    primal = float(np.max(np.maximum(slack, 0.0), initial=0.0))
    complementarity = float(np.max(np.abs(lam * slack), initial=0.0))
    return (stationarity, primal, complementarity)


def _directions(Q, G_active, g):
    """Primal/dual step directions for one unit of the entering multiplier.

    Solves  Q z + G_a' r = g,  G_a z = 0.
    """
    na = G_active.shape[0]
    n = Q.shape[0]
    if na == 0:
        return np.linalg.solve(Q, g), np.zeros(0)
    K = np.zeros((n + na, n + na))
    K[:n, :n] = Q
    K[:n, n:] = G_active.T
    K[n:, :n] = G_active
    rhs = np.concatenate([g, np.zeros(na)])
    sol = np.linalg.solve(K, rhs)
    return sol[:n], sol[n:]


def solve(problem: QpProblem, settings: SolverSettings | None = None,
          warm_start=None) -> QpSolution:
    """Minimize 0.5 u'Qu + p'u subject to Gu <= h for symmetric PD Q.

    warm_start is accepted for interface compatibility; the dual method
    re-derives the active set exactly from the unconstrained minimizer,
    so a primal hint cannot change the returned minimizer.
    """
    settings = settings or SolverSettings()
    Q, p, G, h = problem.Q, problem.p, problem.G, problem.h
    n = p.shape[0]
    nrows = G.shape[0]
    if warm_start is not None:
        ws = np.asarray(warm_start, dtype=float)
        if ws.shape != (n,):
            raise ValueError(f"warm_start must have shape ({n},)")

    u = np.linalg.solve(Q, -p)
    active: list[int] = []
    lam = np.zeros(0)
    iterations = 0
    status = QpStatus.OPTIMAL

    while nrows:
        viol = G @ u - h
        k = int(np.argmax(viol))
        if viol[k] <= settings.feasibility_tol:
            break
        g = G[k]
        gz_floor = 1e-12 * (1.0 + float(g @ g))
        lam_k = 0.0
        while True:
            iterations += 1
            if iterations > settings.max_iterations:
                status = QpStatus.MAX_ITERATIONS
                break
            Ga = G[active] if active else np.zeros((0, n))
            z, r = _directions(Q, Ga, g)
            gz = float(g @ z)
            ck = float(g @ u - h[k])
            t_full = ck / gz if gz > gz_floor else np.inf
            t_drop = np.inf
            j_drop = -1
            for idx in range(len(active)):
                if r[idx] > 1e-12:
                    t = lam[idx] / r[idx]
                    if t < t_drop:
                        t_drop, j_drop = t, idx
            if not np.isfinite(t_full) and not np.isfinite(t_drop):
                # entering normal lies in the cone of active normals:
                # no point satisfies this row together with the active set
                status = QpStatus.INFEASIBLE
                break
            t = min(t_full, t_drop)
            u = u - t * z
            lam = lam - t * r
            lam_k += t
            if t_full <= t_drop:
                active.append(k)
                lam = np.append(lam, lam_k)
                break
            active.pop(j_drop)
            lam = np.delete(lam, j_drop)
        if status is not QpStatus.OPTIMAL:
            break

    if status is QpStatus.OPTIMAL and active:
        # one equality-KKT re-solve on the final active set removes the
        # drift accumulated by the incremental updates
        Ga = G[active]
        na = len(active)
        K = np.zeros((n + na, n + na))
        K[:n, :n] = Q
        K[:n, n:] = Ga.T
        K[n:, :n] = Ga
        rhs = np.concatenate([-p, h[active]])
        sol = np.linalg.solve(K, rhs)
        u = sol[:n]
        lam = np.maximum(sol[n:], 0.0)

    duals = np.zeros(nrows)
    if active:
        duals[np.asarray(active, dtype=int)] = np.maximum(lam, 0.0)
    kkt = check_kkt(problem, u, duals)
    if status is QpStatus.OPTIMAL:
        within = (kkt[0] <= settings.stationarity_tol
                  and kkt[1] <= settings.feasibility_tol
                  and kkt[2] <= settings.complementarity_tol)
        if not within:
            status = QpStatus.MAX_ITERATIONS
    return QpSolution(u, status, iterations, kkt, duals)
