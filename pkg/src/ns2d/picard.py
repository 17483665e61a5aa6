"""Generic contraction fixed-point driver for x = y + L(x) + B(x, x).

Works on any element type with +, scalar *, and a norm callable: plain floats
in the closed-form tests, spectral trajectories in the solvers.  Outcomes are
reported as a result object in the style of scipy's optimizers; only misuse
(bad arguments) raises.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

__all__ = ["PicardProblem", "PicardResult", "picard_solve"]


@dataclass
class PicardProblem:
    """Data of the abstract quadratic equation.

    lam bounds the linear part L in the primary norm, gamma bounds the
    bilinear part B.  The optional secondary norm tracks a second space in
    which the same iteration is known to stay bounded when
    kappa * (1 - lam) < (1 - mu) * gamma.
    """

    y: Any
    bilinear: Callable[[Any, Any], Any]
    norm: Callable[[Any], float]
    linear: Callable[[Any], Any] | None = None
    lam: float = 0.0
    gamma: float = 1.0
    secondary_norm: Callable[[Any], float] | None = None
    mu: float | None = None
    kappa: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must lie in [0, 1), got {self.lam}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass
class PicardResult:
    status: str                     # converged | refused | diverged | max_iter
    x: Any = None
    iterations: int = 0
    diffs: list[float] = field(default_factory=list)
    contraction_ratios: list[float] = field(default_factory=list)
    gate_lhs: float = 0.0           # 4 gamma ||y||
    gate_rhs: float = 0.0           # (1 - lam)^2
    norm_y: float = 0.0
    norm_x: float = 0.0
    certificate: float = 0.0        # 2 gamma ||x|| + lam, < 1 when contractive
    secondary_norm_y: float | None = None
    secondary_norm_x: float | None = None
    secondary_ratio: float | None = None
    secondary_gate_ok: bool | None = None
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def picard_solve(problem: PicardProblem, *, tol: float = 1e-10,
                 max_iter: int = 60) -> PicardResult:
    """Iterate x_{n+1} = y + L(x_n) + B(x_n, x_n) from x_0 = 0.

    Refuses to run (status "refused") when the smallness gate
    4 gamma ||y|| < (1 - lam)^2 fails; tol is an absolute threshold on the
    primary norm of successive differences.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    norm_y = problem.norm(problem.y)
    gate_lhs = 4.0 * problem.gamma * norm_y
    gate_rhs = (1.0 - problem.lam) ** 2
    res = PicardResult(status="", gate_lhs=gate_lhs, gate_rhs=gate_rhs, norm_y=norm_y)
    if problem.secondary_norm is not None:
        res.secondary_norm_y = problem.secondary_norm(problem.y)
        if problem.mu is not None and problem.kappa is not None:
            res.secondary_gate_ok = problem.kappa * (1.0 - problem.lam) \
                < (1.0 - problem.mu) * problem.gamma
    if not gate_lhs < gate_rhs:
        res.status = "refused"
        res.message = (f"smallness gate failed: 4*gamma*||y|| = {gate_lhs:.6g} "
                       f">= (1-lam)^2 = {gate_rhs:.6g}")
        return res

    x = problem.y  # first iterate from x_0 = 0
    res.diffs.append(norm_y)
    diverging = 0
    for it in range(1, max_iter + 1):
        nxt = problem.y + problem.bilinear(x, x)
        if problem.linear is not None:
            nxt = nxt + problem.linear(x)
        diff = problem.norm(nxt - x)
        res.diffs.append(diff)
        if len(res.diffs) >= 2 and res.diffs[-2] > 0.0:
            ratio = diff / res.diffs[-2]
            res.contraction_ratios.append(ratio)
            diverging = diverging + 1 if ratio >= 1.0 else 0
        x = nxt
        res.iterations = it
        if diff <= tol:
            res.status = "converged"
            break
        if not diff < 1e6 * max(norm_y, 1.0) or diverging >= 3:
            res.status = "diverged"
            res.message = f"iteration diverging at step {it}, last diff {diff:.6g}"
            res.x = x
            return res
    else:
        res.status = "max_iter"
        res.message = f"no convergence within {max_iter} iterations"
        res.x = x
        return res

    res.x = x
    res.norm_x = problem.norm(x)
    res.certificate = 2.0 * problem.gamma * res.norm_x + problem.lam
    res.message = "converged"
    if problem.secondary_norm is not None:
        res.secondary_norm_x = problem.secondary_norm(x)
        if res.secondary_norm_y and res.secondary_norm_y > 0.0:
            res.secondary_ratio = res.secondary_norm_x / res.secondary_norm_y
    return res
