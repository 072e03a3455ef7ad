"""Dense two-phase revised simplex for small standard-form linear programs.

    minimize c @ x  subject to  A @ x = b,  x >= 0

Pricing uses Devex reference weights (an approximation of steepest edge);
after a run of degenerate pivots the solver switches to Bland's rule, which
cannot cycle. The basis inverse is kept explicitly and refactored
periodically.

Right-hand sides with many zero entries make the polynomial LPs massively
degenerate, so b is moved to b + eps * A @ w for a fixed positive w before
solving (this keeps every feasible problem feasible). Optimality of a basis
does not depend on b, hence the duals returned are exact for the original
problem; the primal point is recomputed from the original b and clipped at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


@dataclass
class SimplexResult:
    x: np.ndarray
    duals: np.ndarray
    objective: float
    iterations: int
    basis: np.ndarray


_REFACTOR = 50
_DEGENERATE_RUN = 30


class _Tableau:
    def __init__(self, A, b):
        self.A = A
        self.b = b
        self.m, self.n = A.shape
        self.basis = np.arange(self.n, self.n + self.m)
        self.Binv = np.eye(self.m)
        self.xB = b.copy()
        self.iterations = 0
        self._since_refactor = 0

    def column(self, j):
        if j < self.n:
            return self.A[:, j]
        e = np.zeros(self.m)
        e[j - self.n] = 1.0
        return e

    def refactor(self):
        cols = np.column_stack([self.column(j) for j in self.basis])
        self.Binv = np.linalg.inv(cols)
        self.xB = self.Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-13] = 0.0
        self._since_refactor = 0

    def pivot(self, r, j, alpha):
        theta = max(self.xB[r], 0.0) / alpha[r]
        self.xB -= theta * alpha
        self.xB[r] = theta
        pr = self.Binv[r] / alpha[r]
        self.Binv -= np.outer(alpha, pr)
        self.Binv[r] = pr
        self.basis[r] = j
        self.iterations += 1
        self._since_refactor += 1
        if self._since_refactor >= _REFACTOR:
            self.refactor()

    def run(self, cost, max_iter, tol=1e-11):
        """Iterate to optimality for the given cost vector (artificials never enter)."""
        bland = False
        degenerate = 0
        scale = max(1.0, float(np.max(np.abs(cost[: self.n]))))
        weights = np.ones(self.n)  # Devex reference weights
        while True:
            if self.iterations >= max_iter:
                raise LPError(f"iteration limit {max_iter} reached")
            y = cost[self.basis] @ self.Binv
            d = cost[: self.n] - self.A.T @ y
            d[self.basis[self.basis < self.n]] = 0.0
            cand = np.flatnonzero(d < -tol * scale)
            if cand.size == 0:
                return y
            if bland:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(d[cand] ** 2 / weights[cand])])
            alpha = self.Binv @ self.A[:, j]
            amax = float(np.max(np.abs(alpha)))
            rows = np.flatnonzero(alpha > 1e-9 * max(1.0, amax))
            if rows.size == 0:
                raise Unbounded("objective unbounded below")
            # Harris two-pass ratio test: among rows that block within a small
            # feasibility tolerance, take the largest pivot element
            xb = np.maximum(self.xB[rows], 0.0)
            slack = 1e-9 * max(1.0, float(np.max(self.xB)))
            bound = np.min((xb + slack) / alpha[rows])
            ratios = xb / alpha[rows]
            near = ratios <= bound
            if bland:
                best = ratios[near].min()
                ties = rows[near][ratios[near] <= best + 1e-12 * max(1.0, best)]
                r = int(ties[np.argmin(self.basis[ties])])
            else:
                r = int(rows[near][np.argmax(alpha[rows][near])])
            best = float(ratios[rows == r][0])
            if best <= 1e-12:
                degenerate += 1
                bland = bland or degenerate >= _DEGENERATE_RUN
            else:
                degenerate = 0
                bland = False
            if not bland:
                leaving = self.basis[r]
                ratio = (self.Binv[r] @ self.A) / alpha[r]
                wq = weights[j]
                np.maximum(weights, ratio ** 2 * wq, out=weights)
                if leaving < self.n:
                    weights[leaving] = max(wq / alpha[r] ** 2, 1.0)
            self.pivot(r, j, alpha)

def solve_standard(A, b, c, max_iter: int | None = None, perturb: float = 1e-9,
                   start=None) -> SimplexResult:
    """Solve min c@x s.t. A@x = b, x >= 0.

    ``start`` optionally lists m column indices forming a feasible basis; phase
    one is then skipped (an unusable start falls back to it silently).
    Raises Infeasible or Unbounded. The returned ``duals`` y satisfy
    A.T @ y <= c (to tolerance) and ``objective`` is b @ y.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).ravel()
    c = np.array(c, dtype=float).ravel()
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("shape mismatch between A, b and c")
    flip = np.where(b < 0, -1.0, 1.0)
    A *= flip[:, None]
    b *= flip
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    b_true = b.copy()
    if start is not None:
        res = _warm(A, b, c, np.asarray(start, dtype=int), max_iter, perturb)
        if res is not None:
            y, tab = res
            return _finish(tab, A, b_true, c, flip)
    if perturb:
        push = A @ np.random.default_rng(12345).uniform(0.5, 1.0, n)
        size = float(np.max(np.abs(push), initial=0.0))
        if size > 0:
            b = b + perturb * max(1.0, float(np.max(np.abs(b), initial=0.0))) / size * push

    tab = _Tableau(A, b)
    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    tab.run(phase1, max_iter)
    tab.refactor()
    infeas = float(np.sum(tab.xB[tab.basis >= n]))
    if infeas > 1e-8 * (1.0 + float(np.max(np.abs(b), initial=0.0))):
        raise Infeasible(f"no feasible point (phase-one residual {infeas:.3g})")

    # drive zero-level artificials out of the basis where a structural column can replace them
    for r in range(m):
        if tab.basis[r] < n:
            continue
        row = tab.Binv[r] @ A
        row[tab.basis[tab.basis < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > 1e-8:
            tab.pivot(r, j, tab.Binv @ A[:, j])
    tab.refactor()

    phase2 = np.concatenate([c, np.zeros(m)])
    tab.run(phase2, max_iter)
    return _finish(tab, A, b_true, c, flip)


def _warm(A, b, c, start, max_iter, perturb):
    m, n = A.shape
    if start.shape != (m,) or start.min() < 0 or start.max() >= n:
        return None
    B = A[:, start]
    try:
        xB = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        return None
    if xB.min() < -1e-9 * max(1.0, float(np.max(np.abs(xB)))):
        return None
    tab = _Tableau(A, b)
    tab.basis = start.copy()
    if perturb:
        # moving b along the basis columns makes the start strictly nondegenerate
        w = np.random.default_rng(12345).uniform(0.5, 1.0, m)
        tab.b = b + perturb * max(1.0, float(np.max(np.abs(xB)))) * (B @ w)
    tab.refactor()
    if tab.xB.min() < 0:
        return None
    y = tab.run(np.concatenate([c, np.zeros(m)]), max_iter)
    return y, tab


def _finish(tab, A, b_true, c, flip):
    m, n = A.shape
    tab.b = b_true
    tab.refactor()
    cost = np.concatenate([c, np.zeros(m)])
    y = cost[tab.basis] @ tab.Binv
    x = np.zeros(n)
    structural = tab.basis < n
    x[tab.basis[structural]] = np.maximum(tab.xB[structural], 0.0)
    return SimplexResult(x=x, duals=y * flip, objective=float(b_true @ y),
                         iterations=tab.iterations, basis=tab.basis.copy())
