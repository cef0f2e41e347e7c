"""Gradient descent with a harmonically shrinking step over the free matrix C.

Each outer iteration restarts from step 1 and divides the step as
``mu <- 1 / (1/mu + 1)`` (so 1, 1/2, 1/3, ...) until the cost strictly
decreases.  Iterations stop when ``||C_{n+1} - C_n||_F <= eps``.
"""

import csv
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .filterbank import SynthesisBank
from .objective import Objective
from .paramspace import assemble

log = logging.getLogger(__name__)

HISTORY_CAP = 100_000


@dataclass
class OptimResult:
    C: np.ndarray
    bank: SynthesisBank
    cost: float
    initial_cost: float
    iterations: int
    converged: bool
    reason: str
    history: list = field(default_factory=list)  # (iteration, cost, step, grad_norm)

    @property
    def costs(self) -> np.ndarray:
        return np.array([h[1] for h in self.history])


def optimize(objective: Objective, eps: float = 1e-13, max_iter: int = 100_000,
             mu_min: float = 1e-16, max_rejections: int = 10_000, C0=None,
             callback=None) -> OptimResult:
    ps = objective.ps
    C = ps.zeros() if C0 is None else np.array(C0, dtype=ps.c_dtype)
    J = objective.cost(C)
    J0 = J
    history: list = [(0, J, 0.0, 0.0)]

    if ps.dim == 0:
        return OptimResult(C, assemble(ps, C), J, J0, 0, True, "no free parameters", history)

    reason = "max_iter"
    converged = False
    n = 0
    while n < max_iter:
        _, D = objective.value_and_grad(C)
        gnorm = float(np.linalg.norm(D))
        rejections = 0
        mu = 1.0
        while True:
            C_new = C - mu * D
            J_new = objective.cost(C_new)
            if J_new < J:
                break
            rejections += 1
            mu = 1.0 / (rejections + 1)
            # a step this short would end the run anyway; rounding noise can
            # otherwise keep the harmonic loop going for ~1/eps iterations
            if mu < mu_min or mu * gnorm <= eps or rejections >= max_rejections:
                break
        if not J_new < J:
            reason, converged = "stationary", True
            break
        step = float(np.linalg.norm(C_new - C))
        C, J = C_new, J_new
        n += 1
        if len(history) < HISTORY_CAP:
            history.append((n, J, mu, gnorm))
        if callback is not None:
            callback(n, C, J)
        if step <= eps:
            reason, converged = "step below eps", True
            break
    else:
        warnings.warn(f"optimize: max_iter={max_iter} reached, returning best iterate", RuntimeWarning)

    log.info("optimize: %s after %d iterations, cost %.6g -> %.6g", reason, n, J0, J)
    bank = assemble(ps, C)
    bank.metadata.update({"initial_cost": J0, "final_cost": J, "iterations": n})
    return OptimResult(C, bank, J, J0, n, converged, reason, history)


def write_history(result: OptimResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "cost", "step", "gradient_norm"])
        for row in result.history:
            w.writerow([row[0], repr(row[1]), repr(row[2]), repr(row[3])])
