"""Weighted residual extrema over finite-atom measure spaces.

Step functions u assign one ambient vector per atom. Over the constraint
class U (equality of the weighted squared norm to r times the total
weight), the infimum and supremum of the weighted squared residual both
collapse to constant functions at the sphere extremizers, so each side of
the equalities can be computed two independent ways: product-space
optimization over U, and a sphere extremum times the total weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, PreconditionError, SpecValidationError
from .levelset import MIN_ORIGIN_GAP, REL_MARGIN, _residual_extremum, gamma_direct, sphere_min_point
from .functional import residual_sq_batch
from .projector import Projector

__all__ = [
    "DiscreteMeasureSpace",
    "StepFunction",
    "ConstraintClass",
    "ExtremaRecord",
    "integral_residual",
    "constraint_value",
    "extremize_over_U",
    "verify_extrema_equalities",
    "ellipse_grid_extremum",
]


@dataclass(frozen=True)
class DiscreteMeasureSpace:
    """Finite measure space: positive atom measures and a nonnegative density.

    The exponent p of the ambient function space is recorded for validation
    (p >= 2) but has no computational effect over finitely many atoms.
    """

    atom_weights: np.ndarray
    density: np.ndarray
    exponent: float = 2.0

    def __post_init__(self):
        mu = np.asarray(self.atom_weights, dtype=np.float64).reshape(-1)
        eta = np.asarray(self.density, dtype=np.float64).reshape(-1)
        if mu.size == 0 or mu.size != eta.size:
            raise SpecValidationError("atom_weights and density must be nonempty, equal-length")
        if not np.all(np.isfinite(mu)) or not np.all(np.isfinite(eta)):
            raise SpecValidationError("atom data must be finite")
        if np.any(mu <= 0.0):
            raise SpecValidationError("every atom weight must be positive")
        if np.any(eta < 0.0):
            raise SpecValidationError("the density must be nonnegative")
        if not np.any(eta * mu > 0.0):
            raise SpecValidationError("at least one atom must carry positive density mass")
        if not self.exponent >= 2.0:
            raise SpecValidationError("exponent must be >= 2")
        object.__setattr__(self, "atom_weights", mu)
        object.__setattr__(self, "density", eta)
        object.__setattr__(self, "exponent", float(self.exponent))

    @property
    def n_atoms(self):
        return int(self.atom_weights.size)

    @property
    def weights(self):
        """Per-atom mass of the density: eta_i * mu_i."""
        return self.density * self.atom_weights

    @property
    def eta_mass(self):
        """Total density mass, the weight multiplying r in the constraint."""
        return float(np.sum(self.weights))


@dataclass(frozen=True)
class StepFunction:
    """One ambient vector per atom."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise SpecValidationError("values must be a 2-d array (atoms x dimension)")
        if not np.all(np.isfinite(v)):
            raise SpecValidationError("values must be finite")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ConstraintClass:
    """The equality class (weighted squared norm = r * total weight) or its sublevel."""

    kind: str
    r: float

    def __post_init__(self):
        if self.kind not in ("equality", "sublevel"):
            raise SpecValidationError("kind must be 'equality' or 'sublevel'")
        if not self.r > 0.0:
            raise SpecValidationError("r must be positive")

    def is_feasible(self, space: DiscreteMeasureSpace, u: StepFunction, tol=1e-9):
        target = self.r * space.eta_mass
        value = constraint_value(space, u)
        slack = tol * max(1.0, target)
        if self.kind == "equality":
            return bool(abs(value - target) <= slack)
        return bool(value <= target + slack)


def _check_atoms(space: DiscreteMeasureSpace, proj: Projector, u: StepFunction):
    if u.values.shape[0] != space.n_atoms:
        raise DimensionMismatchError(
            f"step function has {u.values.shape[0]} atoms, space has {space.n_atoms}"
        )
    if u.values.shape[1] != proj.dim:
        raise DimensionMismatchError(
            f"step function dimension {u.values.shape[1]} != set dimension {proj.dim}"
        )


def integral_residual(space: DiscreteMeasureSpace, proj: Projector, u: StepFunction):
    """Weighted squared residual: sum of eta_i*mu_i*||u_i - P(u_i)||^2."""
    _check_atoms(space, proj, u)
    return float(np.sum(space.weights * residual_sq_batch(proj, u.values)))


def constraint_value(space: DiscreteMeasureSpace, u: StepFunction):
    """Weighted squared norm: sum of eta_i*mu_i*||u_i||^2."""
    if u.values.shape[0] != space.n_atoms:
        raise DimensionMismatchError(
            f"step function has {u.values.shape[0]} atoms, space has {space.n_atoms}"
        )
    return float(np.sum(space.weights * np.einsum("ij,ij->i", u.values, u.values)))


def _retract(U, w, target):
    """Rescale the weighted block of each start so the constraint holds exactly."""
    cur = np.einsum("kij,kij->k", U * w[None, :, None], U)
    cur[cur <= 0.0] = np.inf
    t = np.sqrt(target / cur)
    t[~np.isfinite(t)] = 1.0
    active = w > 0.0
    out = U.copy()
    out[:, active, :] = U[:, active, :] * t[:, None, None]
    return out


def extremize_over_U(space: DiscreteMeasureSpace, proj: Projector, r, mode,
                     n_starts=32, iters=500, seed=0):
    """Best-effort extremum of the weighted residual over the equality class.

    Multi-start projected gradient on the product space; the retraction
    rescales the positively weighted atoms onto the constraint, and the
    constant functions at the two sphere extremizers seed the starts.
    Returns (StepFunction, value).
    """
    if mode not in ("min", "max"):
        raise PreconditionError("mode must be 'min' or 'max'")
    p0_sq = proj.p0_norm_sq
    if p0_sq <= MIN_ORIGIN_GAP:
        raise PreconditionError("the set must not contain the origin")
    eps = REL_MARGIN * p0_sq
    r = float(r)
    if not eps < r < p0_sq - eps:
        raise PreconditionError(f"r must lie in ({eps}, {p0_sq - eps})")
    m, d = space.n_atoms, proj.dim
    w = space.weights
    target = r * space.eta_mass
    sign = 1.0 if mode == "min" else -1.0
    point_min, _ = _residual_extremum(proj, r, "min", n_starts, seed, iters)
    point_max, _ = _residual_extremum(proj, r, "max", n_starts, seed, iters)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 37]))
    starts = [
        np.broadcast_to(point_min, (1, m, d)),
        np.broadcast_to(point_max, (1, m, d)),
        rng.normal(size=(int(n_starts), m, d)),
    ]
    U = _retract(np.concatenate(starts, axis=0), w, target)

    def objective(U):
        flat = U.reshape(-1, d)
        res = residual_sq_batch(proj, flat).reshape(U.shape[0], m)
        PU = proj.project_batch(flat).reshape(U.shape)
        grad = 2.0 * w[None, :, None] * (U - PU)
        return np.sum(w[None, :] * res, axis=1), grad

    vals, grad = objective(U)
    base = 0.1 * np.sqrt(r) / max(float(np.max(w)), 1e-300)
    step = np.full(U.shape[0], base)
    for _ in range(int(iters)):
        cgrad = 2.0 * w[None, :, None] * U
        cn = np.einsum("kij,kij->k", cgrad, cgrad)
        cn[cn == 0.0] = 1.0
        g = sign * grad
        tangent = g - (np.einsum("kij,kij->k", g, cgrad) / cn)[:, None, None] * cgrad
        tn_sq = np.einsum("kij,kij->k", tangent, tangent)
        Y = _retract(U - step[:, None, None] * tangent, w, target)
        new_vals, new_grad = objective(Y)
        accept = sign * new_vals <= sign * vals - 1e-4 * step * tn_sq
        U = np.where(accept[:, None, None], Y, U)
        vals = np.where(accept, new_vals, vals)
        grad = np.where(accept[:, None, None], new_grad, grad)
        step = np.where(accept, np.minimum(step * 1.5, 10.0 * base), step * 0.5)
        if np.all(step < 1e-14 * base):
            break
    k = int(np.argmin(sign * vals))
    return StepFunction(U[k].copy()), float(vals[k])


@dataclass(frozen=True)
class ExtremaRecord:
    """Both sides of the weighted extremum equalities at one level."""

    r: float
    lhs_min: float
    rhs_min: float
    gap_min: float
    lhs_max: float
    rhs_max: float
    gap_max: float
    attained_by_constant: bool


def verify_extrema_equalities(space: DiscreteMeasureSpace, proj: Projector, r,
                              n_starts=32, iters=500, seed=0):
    """Compare product-space extrema against sphere extrema times the mass.

    The right-hand sides come from gamma_direct (infimum) and the residual
    at the sphere minimizer of J (supremum); gaps are relative to
    max(1, RHS). Also checks that the constant step functions built from
    the sphere extremizers are feasible and attain the bounds.
    """
    r = float(r)
    u_min, lhs_min = extremize_over_U(space, proj, r, "min", n_starts, iters, seed)
    u_max, lhs_max = extremize_over_U(space, proj, r, "max", n_starts, iters, seed)
    rhs_min = gamma_direct(proj, r, n_starts, seed, iters) * space.eta_mass
    w_point = sphere_min_point(proj, r, n_starts, seed, iters)
    rhs_max = float(residual_sq_batch(proj, w_point[None, :])[0]) * space.eta_mass
    gap_min = abs(lhs_min - rhs_min) / max(1.0, rhs_min)
    gap_max = abs(lhs_max - rhs_max) / max(1.0, rhs_max)
    cls = ConstraintClass("equality", r)
    m = space.n_atoms
    v_point, v_res = _residual_extremum(proj, r, "min", n_starts, seed, iters)
    const_min = StepFunction(np.broadcast_to(v_point, (m, proj.dim)).copy())
    const_max = StepFunction(np.broadcast_to(w_point, (m, proj.dim)).copy())
    attained = (
        cls.is_feasible(space, const_min)
        and cls.is_feasible(space, const_max)
        and abs(integral_residual(space, proj, const_min) - rhs_min) <= 1e-6 * max(1.0, rhs_min)
        and abs(integral_residual(space, proj, const_max) - rhs_max) <= 1e-6 * max(1.0, rhs_max)
    )
    return ExtremaRecord(
        r=r,
        lhs_min=float(lhs_min),
        rhs_min=float(rhs_min),
        gap_min=float(gap_min),
        lhs_max=float(lhs_max),
        rhs_max=float(rhs_max),
        gap_max=float(gap_max),
        attained_by_constant=bool(attained),
    )


def ellipse_grid_extremum(space: DiscreteMeasureSpace, proj: Projector, r, mode,
                          pitch=1e-4):
    """Exhaustive constraint-grid oracle in dimension 1 with <= 2 weighted atoms.

    The equality constraint is an ellipse (two weighted atoms) or a point
    pair (one weighted atom) in the plane of weighted coordinates; a dense
    parameter grid gives ground truth. Returns (StepFunction, value).
    """
    if mode not in ("min", "max"):
        raise PreconditionError("mode must be 'min' or 'max'")
    if proj.dim != 1:
        raise PreconditionError("the exhaustive oracle requires dimension 1")
    w = space.weights
    idx = np.flatnonzero(w > 0.0)
    if idx.size > 2:
        raise PreconditionError("the exhaustive oracle requires <= 2 weighted atoms")
    target = float(r) * space.eta_mass
    m = space.n_atoms
    if idx.size == 1:
        a = np.sqrt(target / w[idx[0]])
        cand = np.zeros((2, m))
        cand[0, idx[0]] = a
        cand[1, idx[0]] = -a
    else:
        theta = np.arange(0.0, 2.0 * np.pi, pitch)
        a = np.sqrt(target / w[idx[0]])
        b = np.sqrt(target / w[idx[1]])
        cand = np.zeros((theta.size, m))
        cand[:, idx[0]] = a * np.cos(theta)
        cand[:, idx[1]] = b * np.sin(theta)
    res = residual_sq_batch(proj, cand.reshape(-1, 1)).reshape(cand.shape[0], m)
    vals = np.sum(w[None, :] * res, axis=1)
    k = int(np.argmin(vals)) if mode == "min" else int(np.argmax(vals))
    return StepFunction(cand[k][:, None].copy()), float(vals[k])
