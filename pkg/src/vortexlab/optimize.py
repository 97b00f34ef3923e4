"""Preconditioned limited-memory BFGS with Armijo backtracking.

Works on arrays of any shape. The caller supplies the objective (value and
gradient together) and optionally a preconditioner used as the initial inverse
Hessian of the two-loop recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import StalledError

FunGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]
#: Relative gradient norm below which energy differences drown in rounding.
ROUNDING_FLOOR = 1e-6

Preconditioner = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class LBFGSOptions:
    grad_tol: float = 1e-7
    max_iter: int = 5000
    memory: int = 10
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40


@dataclass
class OptimizeReport:
    """Iteration summary; ``grad_norm`` is sqrt(gᵀPg / E), a relative field error scale."""

    iterations: int
    converged: bool
    energy: float
    grad_norm: float
    evaluations: int
    message: str
    history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"iterations": self.iterations, "converged": self.converged,
                "energy": self.energy, "grad_norm": self.grad_norm,
                "evaluations": self.evaluations, "message": self.message}


def lbfgs(fun_grad: FunGrad, x0: np.ndarray, options: LBFGSOptions | None = None,
          precondition: Preconditioner | None = None,
          embed: Callable[[np.ndarray], np.ndarray] | None = None) -> tuple[np.ndarray, OptimizeReport]:
    """Minimize ``fun_grad`` starting at ``x0``.

    ``embed`` maps free variables to the full state passed to the
    preconditioner (for fields: appends the fixed boundary ring). Stops once
    sqrt(gᵀPg / max(E, tiny)) < grad_tol. A failed line search raises
    StalledError unless the iterate is already within a 100x looser tolerance
    (or below ROUNDING_FLOOR), in which case it counts as converged: energy
    decrements there are at the level of floating-point rounding.
    """
    opt = options or LBFGSOptions()
    embed = embed or (lambda x: x)
    precondition = precondition or (lambda g, _x: g)
    x = np.array(x0, dtype=float)
    f, g = fun_grad(x)
    evals = 1
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    history = [f]
    tiny = np.finfo(float).tiny

    def rel_norm(gp_dot: float, f: float) -> float:
        return float(np.sqrt(max(gp_dot, 0.0) / max(abs(f), tiny)))

    it = 0
    while True:
        pg = precondition(g, embed(x))
        gnorm = rel_norm(float(np.vdot(g, pg)), f)
        if gnorm < opt.grad_tol or f == 0.0:
            return x, OptimizeReport(it, True, f, gnorm, evals, "gradient tolerance reached", history)
        if it >= opt.max_iter:
            return x, OptimizeReport(it, False, f, gnorm, evals, "iteration cap reached", history)

        q = g.copy()
        alphas = []
        for s, y in zip(reversed(s_hist), reversed(y_hist)):
            a = np.vdot(s, q) / np.vdot(y, s)
            alphas.append(a)
            q -= a * y
        d = precondition(q, embed(x))
        for (s, y), a in zip(zip(s_hist, y_hist), reversed(alphas)):
            beta = np.vdot(y, d) / np.vdot(y, s)
            d += (a - beta) * s
        d = -d
        slope = float(np.vdot(g, d))
        if slope >= 0.0:
            s_hist.clear()
            y_hist.clear()
            d = -pg
            slope = -float(np.vdot(g, pg))

        t = 1.0
        for _ in range(opt.max_backtracks):
            x_new = x + t * d
            f_new, g_new = fun_grad(x_new)
            evals += 1
            if np.isfinite(f_new) and f_new <= f + opt.armijo * t * slope:
                break
            t *= opt.backtrack
        else:
            if gnorm < max(100 * opt.grad_tol, ROUNDING_FLOOR):
                return x, OptimizeReport(it, True, f, gnorm, evals,
                                         "converged to rounding level", history)
            raise StalledError(f"line search failed at iteration {it} (E={f:.12g})")

        s = x_new - x
        y = g_new - g
        sy = float(np.vdot(s, y))
        if sy > 1e-14 * np.sqrt(float(np.vdot(s, s)) * float(np.vdot(y, y))):
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > opt.memory:
                s_hist.pop(0)
                y_hist.pop(0)
        x, f, g = x_new, f_new, g_new
        it += 1
        history.append(f)
