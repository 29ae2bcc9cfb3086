"""Contraction fixed points of scaled projections and their profiles.

For |lam| < 1 the map x -> lam * P(x) is a contraction with a unique fixed
point y(lam), found by iteration from 0. Two scalar profiles are derived
from it: g(lam) = J(y(lam)), increasing on (-1, 1), and
h(lam) = ||y(1/lam)||^2, decreasing on (1, inf). Their inverses are realized
by bisection, which needs monotonicity only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, LevelRangeError, PreconditionError, SpecValidationError
from .functional import j_value_batch
from .projector import Projector

__all__ = [
    "DELTA",
    "G_BRACKET",
    "H_BRACKET",
    "FixedPointResult",
    "Profile",
    "fixed_point",
    "fixed_point_grid",
    "g_value",
    "g_values",
    "h_value",
    "h_values",
    "invert_monotone",
    "invert_monotone_batch",
    "profile",
]

DELTA = 1e-6
G_BRACKET = (-1.0 + 1e-2, 1.0 - 1e-2)
H_BRACKET = (1.0 + 1e-2, 1e3)

_FP_TOL = 1e-12
_FP_MAX_ITER = 200_000


@dataclass(frozen=True)
class FixedPointResult:
    """Fixed point of x -> lam * P(x) with convergence diagnostics.

    residual is the defining gap ||lam * P(point) - point|| evaluated at the
    returned point; converged means the iteration met its stopping rule.
    """

    point: np.ndarray
    lam: float
    iterations: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class Profile:
    """A sampled scalar map over a strictly increasing parameter grid."""

    grid: np.ndarray
    values: np.ndarray
    meaning: str

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64).reshape(-1)
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if grid.size != values.size:
            raise SpecValidationError("grid and values must have equal length")
        if grid.size and not np.all(np.diff(grid) > 0.0):
            raise SpecValidationError("grid must be strictly increasing")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise SpecValidationError("grid and values must be finite")
        if self.meaning not in ("g", "h", "gamma", "phi"):
            raise SpecValidationError("meaning must be one of g, h, gamma, phi")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def _check_lams(lams):
    lams = np.asarray(lams, dtype=np.float64).reshape(-1)
    if np.any(np.abs(lams) > 1.0 - DELTA):
        raise PreconditionError(f"contraction scale must satisfy |lam| <= 1 - {DELTA}")
    return lams


def fixed_point_grid(proj: Projector, lams, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """Fixed points for a batch of scales; returns (points, iters, converged).

    Raises ConvergenceError if any entry fails to meet its stopping rule.
    """
    lams = _check_lams(lams)
    if not (tol > 0.0):
        raise PreconditionError("tol must be positive")
    Y, iters, _, conv = proj.fixed_point_batch(lams, tol, max_iter)
    if not np.all(conv):
        raise ConvergenceError(
            f"fixed-point iteration exceeded {max_iter} steps for "
            f"{int(np.sum(~conv))} scale(s)"
        )
    return Y, iters, conv


def fixed_point(proj: Projector, lam, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """Fixed point of x -> lam * P(x), iterated from 0.

    Stops when the step norm falls below tol * (1-|lam|) / max(|lam|, 1e-6),
    which bounds the distance to the true fixed point by tol. The defining
    residual of the returned point is evaluated independently.
    """
    lam = float(lam)
    _check_lams([lam])
    if not (tol > 0.0):
        raise PreconditionError("tol must be positive")
    Y, iters, _, conv = proj.fixed_point_batch(np.array([lam]), tol, max_iter)
    y = Y[0]
    residual = float(np.linalg.norm(lam * proj.project(y) - y))
    return FixedPointResult(
        point=y,
        lam=lam,
        iterations=int(iters[0]),
        residual=residual,
        converged=bool(conv[0]),
    )


def g_values(proj: Projector, lams, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """Potential values at the fixed points: g(lam) = J(y(lam))."""
    lams = _check_lams(lams)
    if lams.size == 0:
        return np.zeros(0)
    Y, _, _ = fixed_point_grid(proj, lams, tol, max_iter)
    return j_value_batch(proj, Y)


def g_value(proj: Projector, lam, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """g(lam) = J(y(lam)), increasing on (-1, 1)."""
    return float(g_values(proj, [float(lam)], tol, max_iter)[0])


def h_values(proj: Projector, lams, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """Squared fixed-point norms at reciprocal scale: h(lam) = ||y(1/lam)||^2."""
    lams = np.asarray(lams, dtype=np.float64).reshape(-1)
    # 1/lam must stay inside the accepted contraction range |mu| <= 1 - delta
    if np.any(lams < 1.0 / (1.0 - DELTA)):
        raise PreconditionError(f"h is sampled for lam >= 1/(1 - {DELTA})")
    if lams.size == 0:
        return np.zeros(0)
    Y, _, _ = fixed_point_grid(proj, 1.0 / lams, tol, max_iter)
    return np.einsum("ij,ij->i", Y, Y)


def h_value(proj: Projector, lam, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """h(lam) = ||y(1/lam)||^2, decreasing on (1, inf)."""
    return float(h_values(proj, [float(lam)], tol, max_iter)[0])


def invert_monotone(f, target, lo, hi, tol, direction="increasing"):
    """Bisection solve of f(p) = target for monotone f on [lo, hi].

    Stops when |f(p) - target| <= tol or the bracket width falls below tol.
    Raises LevelRangeError when the target lies outside [f(lo), f(hi)]
    (ordered by direction).
    """
    if direction not in ("increasing", "decreasing"):
        raise PreconditionError("direction must be 'increasing' or 'decreasing'")
    if not (tol > 0.0):
        raise PreconditionError("tol must be positive")
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise PreconditionError("bracket requires lo < hi")
    sign = 1.0 if direction == "increasing" else -1.0
    flo = sign * f(lo)
    fhi = sign * f(hi)
    t = sign * float(target)
    if not (flo <= t <= fhi):
        raise LevelRangeError(
            f"target {target} outside the bracket range "
            f"[{min(sign * flo, sign * fhi)}, {max(sign * flo, sign * fhi)}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = sign * f(mid)
        if abs(fm - t) <= tol or (hi - lo) <= tol:
            return mid
        if fm < t:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def invert_monotone_batch(
    fvec, targets, lo, hi, tol, direction="increasing", max_steps=200, width_tol=None
):
    """Vectorized bisection: fvec maps a parameter array to a value array.

    Every target must lie inside [f(lo), f(hi)] (ordered by direction).
    width_tol defaults to tol; pass a smaller value to make the stopping
    rule value-governed when f is steep. Returns the parameter array.
    """
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    if targets.size == 0:
        return np.zeros(0)
    if width_tol is None:
        width_tol = tol
    sign = 1.0 if direction == "increasing" else -1.0
    ends = sign * fvec(np.array([lo, hi], dtype=np.float64))
    t = sign * targets
    inside = (ends[0] <= t) & (t <= ends[1])
    if not np.all(inside):
        raise LevelRangeError(f"targets {targets[~inside].tolist()} outside the bracket range")
    los = np.full(targets.size, float(lo))
    his = np.full(targets.size, float(hi))
    mids = 0.5 * (los + his)
    for _ in range(max_steps):
        mids = 0.5 * (los + his)
        fm = sign * fvec(mids)
        done = (np.abs(fm - t) <= tol) | ((his - los) <= width_tol)
        if np.all(done):
            break
        low = fm < t
        los = np.where(low, mids, los)
        his = np.where(low, his, mids)
    return mids


def profile(proj: Projector, meaning, grid, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """Pointwise profile over a grid; meanings: g, h, gamma, phi."""
    grid = np.asarray(grid, dtype=np.float64).reshape(-1)
    if meaning == "g":
        return Profile(grid, g_values(proj, grid, tol, max_iter), "g")
    if meaning == "h":
        return Profile(grid, h_values(proj, grid, tol, max_iter), "h")
    if meaning in ("gamma", "phi"):
        from . import levelset

        fn = levelset.gamma_value if meaning == "gamma" else levelset.phi_value
        vals = np.array([fn(proj, float(r)) for r in grid])
        return Profile(grid, vals, meaning)
    raise SpecValidationError("meaning must be one of g, h, gamma, phi")
