"""The competitive operator: F preconditioned through the mixed Hessian.

F_alpha(z) solves M u = F(z) with M = [[I, a*B], [-a*B^T, I]] and
B = grad_xy f(z).  M is the identity plus a real skew-symmetric matrix, so
its symmetric part is I and the solve is always well posed; in particular
F_alpha and F share their zero set exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError
from .problems import ProblemSpec, eval_operator


@dataclass(frozen=True)
class CompetitiveSystem:
    """The block system defining one competitive-operator evaluation."""

    alpha: float
    B: np.ndarray
    g: np.ndarray

    def matrix(self) -> np.ndarray:
        d_x, d_y = self.B.shape
        M = np.eye(d_x + d_y)
        M[:d_x, d_x:] = self.alpha * self.B
        M[d_x:, :d_x] = -self.alpha * self.B.T
        return M

    def solve(self) -> np.ndarray:
        return np.linalg.solve(self.matrix(), self.g)


def competitive_system(problem: ProblemSpec, z, alpha: float) -> CompetitiveSystem:
    if problem.mixed_hessian is None:
        raise CapabilityError(f"{problem.name!r} has no mixed Hessian; competitive mode unavailable")
    if not alpha >= 0:
        raise ValueError("alpha must be >= 0")
    z = np.asarray(z, dtype=float)
    B = np.asarray(problem.mixed_hessian(z), dtype=float)
    if B.shape != (problem.d_x, problem.d_y):
        raise ValueError(f"mixed Hessian of {problem.name!r} has shape {B.shape}")
    return CompetitiveSystem(float(alpha), B, eval_operator(problem, z))


def eval_f_alpha(problem: ProblemSpec, z, alpha: float) -> np.ndarray:
    """Evaluate the competitive operator at z."""
    return competitive_system(problem, z, alpha).solve()


def f_alpha_jacobian(problem: ProblemSpec, z, alpha: float, fd_step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of the competitive operator."""
    z = np.asarray(z, dtype=float)
    d = problem.d
    jac = np.empty((d, d))
    for j in range(d):
        step = np.zeros(d)
        step[j] = fd_step
        jac[:, j] = (eval_f_alpha(problem, z + step, alpha) - eval_f_alpha(problem, z - step, alpha)) / (2 * fd_step)
    return jac


def stationary_equivalence_check(problem: ProblemSpec, z, alpha: float, tol: float) -> bool:
    """True when z is classified the same way by F and by F_alpha.

    The competitive solve can shrink or stretch the field by at most the
    condition number of the block matrix, so the F_alpha test uses the
    tolerance scaled by that bound.
    """
    system = competitive_system(problem, z, alpha)
    kappa = float(np.linalg.cond(system.matrix()))
    zero_f = float(np.linalg.norm(system.g)) <= tol
    zero_fa = float(np.linalg.norm(system.solve())) <= tol * kappa
    return zero_f == zero_fa
