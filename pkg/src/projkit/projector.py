"""Projection evaluation handles.

A Projector pairs a compiled set program with the cached projection of the
origin and an iteration policy for intersection members. It is immutable
after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DimensionMismatchError, SpecValidationError
from .program import compile_set
from .sets import ConvexSetSpec, as_vector

__all__ = ["IterationPolicy", "Projector", "project", "project_origin"]


@dataclass(frozen=True)
class IterationPolicy:
    """Cycle budget and tolerance for iterative (intersection) projections."""

    max_iter: int = 5000
    tol: float = 1e-12

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise SpecValidationError("max_iter must be positive")
        if not (float(self.tol) > 0.0):
            raise SpecValidationError("tol must be positive")
        object.__setattr__(self, "max_iter", int(self.max_iter))
        object.__setattr__(self, "tol", float(self.tol))


class Projector:
    """Evaluator for the metric projection onto a described set.

    Attributes:
        set: the set spec.
        p0: cached projection of the origin.
        p0_norm_sq: squared norm of p0.
        policy: iteration limits for intersection programs (None uses the
            spec's own policy).
    """

    def __init__(self, set_spec: ConvexSetSpec, policy: IterationPolicy | None = None):
        if not isinstance(set_spec, ConvexSetSpec):
            raise SpecValidationError("expected a set spec")
        self.set = set_spec
        prog = compile_set(set_spec)
        if policy is not None:
            prog = type(prog)(
                dim=prog.dim,
                kinds=prog.kinds,
                vec_a=prog.vec_a,
                vec_b=prog.vec_b,
                shift=prog.shift,
                scal_a=prog.scal_a,
                scal_b=prog.scal_b,
                max_iter=policy.max_iter,
                tol=policy.tol,
            )
        self._prog = prog
        self.policy = IterationPolicy(prog.max_iter, prog.tol)
        p0 = self.project_batch(np.zeros((1, prog.dim)))[0]
        self.p0 = p0
        # same summation path as the potential's row residuals, so the
        # potential cancels to exactly 0.0 at the origin
        self.p0_norm_sq = float(np.einsum("ij,ij->i", p0[None, :], p0[None, :])[0])

    @property
    def dim(self):
        return self._prog.dim

    @property
    def backend(self):
        return _kernels.BACKEND

    @property
    def is_iterative(self):
        return self._prog.n_members > 1

    def project_batch(self, X):
        """Project each row of X; raises ConvergenceError on iterative failure."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self._prog.dim:
            raise DimensionMismatchError(
                f"expected points of dimension {self._prog.dim}, got shape {X.shape}"
            )
        if not np.all(np.isfinite(X)):
            raise SpecValidationError("points must be finite")
        p = self._prog
        Y, _, inc, status = _kernels.project_batch(
            p.kinds, p.vec_a, p.vec_b, p.shift, p.scal_a, p.scal_b,
            p.max_iter, p.tol, X,
        )
        if np.any(status == -1):
            worst = float(np.max(inc[status == -1]))
            raise ConvergenceError(
                "projection stalled; intersection may be empty "
                f"(last increment {worst:.3e})",
                last_residual=worst,
            )
        if np.any(status == 0):
            worst = float(np.max(inc[status == 0]))
            raise ConvergenceError(
                f"projection did not reach tol within {p.max_iter} cycles "
                f"(last increment {worst:.3e})",
                last_residual=worst,
            )
        return Y

    def project(self, x):
        """Project a single point."""
        x = as_vector(x, dim=self._prog.dim)
        return self.project_batch(x.reshape(1, -1))[0]

    def fixed_point_batch(self, lams, tol, max_iter):
        """Kernel-level contraction iterations; see fixed_point for the API."""
        p = self._prog
        lams = np.asarray(lams, dtype=np.float64).reshape(-1)
        Y, iters, inc, status = _kernels.fixed_point_batch(
            p.kinds, p.vec_a, p.vec_b, p.shift, p.scal_a, p.scal_b,
            p.max_iter, p.tol, lams, tol, max_iter,
        )
        if np.any(status == -1):
            raise ConvergenceError(
                "inner projection failed during contraction iteration",
                last_residual=float(np.max(inc[status == -1])),
            )
        return Y, iters, inc, status == 1


def project(proj: Projector, x):
    """Project x onto the set held by proj."""
    return proj.project(x)


def project_origin(proj: Projector):
    """Cached projection of the origin."""
    return proj.p0.copy()
