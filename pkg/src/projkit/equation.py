"""Monotone potential operators and the scaled projection equation.

A potential operator Q is the gradient of a convex functional
I(x) = integral over [0,1] of <Q(sx), x> ds. The equation P(x) + lam*Q(x) = 0
is solved by gradient descent on F = J + lam*I, whose gradient is exactly
P + lam*Q. The solvability threshold lam* is estimated from its defining
double infimum over sublevel sets of I.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, PreconditionError, SpecValidationError
from .functional import j_value_batch
from .levelset import _sphere_descend
from .projector import Projector

__all__ = [
    "IdentityPotential",
    "LinearSymmetricPSD",
    "CoordinatewiseOddPower",
    "LambdaStarEstimate",
    "SolveResult",
    "q_apply",
    "potential_value",
    "potential_value_quadrature",
    "check_monotone",
    "lambda_star_estimate",
    "solve_projection_equation",
]

# documented sampling region for Lipschitz defaults of the nonlinear variant
WORKING_RADIUS = 10.0


@dataclass(frozen=True)
class IdentityPotential:
    """Q(x) = x with potential I(x) = ||x||^2 / 2."""

    lipschitz_bound: float = 1.0

    def __post_init__(self):
        if not self.lipschitz_bound > 0.0:
            raise SpecValidationError("lipschitz_bound must be positive")

    # homogeneity degree of I, used for exact radial level-set rescaling
    @property
    def degree(self):
        return 2.0

    def apply(self, X):
        return np.array(X, dtype=np.float64)

    def value_rows(self, X):
        return 0.5 * np.einsum("ij,ij->i", X, X)


@dataclass(frozen=True)
class LinearSymmetricPSD:
    """Q(x) = A x for symmetric positive-semidefinite A; I(x) = <Ax, x>/2."""

    matrix: np.ndarray
    lipschitz_bound: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise SpecValidationError("matrix must be square")
        if not np.all(np.isfinite(A)):
            raise SpecValidationError("matrix must be finite")
        scale = float(np.max(np.abs(A))) if A.size else 0.0
        if float(np.max(np.abs(A - A.T))) > 1e-12 * max(scale, 1.0):
            raise SpecValidationError("matrix must be symmetric")
        eigs = np.linalg.eigvalsh(A) if A.size else np.zeros(0)
        if eigs.size and float(eigs[0]) < -1e-12 * max(float(eigs[-1]), 1.0):
            raise SpecValidationError("matrix must be positive-semidefinite")
        object.__setattr__(self, "matrix", A)
        if self.lipschitz_bound <= 0.0:
            top = float(eigs[-1]) if eigs.size else 0.0
            object.__setattr__(self, "lipschitz_bound", top if top > 0.0 else 1.0)

    @property
    def degree(self):
        return 2.0

    @property
    def min_eigenvalue(self):
        eigs = np.linalg.eigvalsh(self.matrix)
        return float(eigs[0]) if eigs.size else 0.0

    def apply(self, X):
        return np.asarray(X, dtype=np.float64) @ self.matrix

    def value_rows(self, X):
        X = np.asarray(X, dtype=np.float64)
        return 0.5 * np.einsum("ij,ij->i", X @ self.matrix, X)


@dataclass(frozen=True)
class CoordinatewiseOddPower:
    """Q(x)_i = scale * x_i^p for odd p; I(x) = scale * sum |x_i|^(p+1) / (p+1)."""

    exponent: int
    scale: float = 1.0
    lipschitz_bound: float = 0.0

    def __post_init__(self):
        if int(self.exponent) != self.exponent or self.exponent < 1 or self.exponent % 2 == 0:
            raise SpecValidationError("exponent must be an odd integer >= 1")
        if not self.scale > 0.0:
            raise SpecValidationError("scale must be positive")
        object.__setattr__(self, "exponent", int(self.exponent))
        if self.lipschitz_bound <= 0.0:
            p = self.exponent
            object.__setattr__(
                self, "lipschitz_bound", self.scale * p * WORKING_RADIUS ** (p - 1)
            )

    @property
    def degree(self):
        return float(self.exponent + 1)

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        return self.scale * np.sign(X) * np.abs(X) ** self.exponent

    def value_rows(self, X):
        X = np.asarray(X, dtype=np.float64)
        p = self.exponent
        return self.scale * np.sum(np.abs(X) ** (p + 1), axis=1) / (p + 1)


@dataclass(frozen=True)
class LambdaStarEstimate:
    """Estimated solvability threshold with the attaining level and point."""

    value: float
    r_grid: tuple
    samples_per_r: int
    argmin_r: float
    argmin_x: np.ndarray


@dataclass(frozen=True)
class SolveResult:
    """Solution of P(x) + lam*Q(x) = 0 with a fresh residual certificate."""

    point: np.ndarray
    lam: float
    residual: float
    iterations: int
    converged: bool


def q_apply(q, x):
    """Apply the operator to one point."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return q.apply(x[None, :])[0]


def potential_value(q, x, n_quad=64):
    """I(x), in closed form for every provided variant.

    n_quad is the quadrature budget for variants without a closed form;
    all shipped variants have one, so it only gates validity (>= 2).
    """
    if n_quad < 2:
        raise PreconditionError("n_quad must be >= 2")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return float(q.value_rows(x[None, :])[0])


def potential_value_quadrature(q, x, n_quad=256):
    """I(x) by composite Simpson quadrature of s -> <Q(sx), x>; cross-check."""
    if n_quad < 2 or n_quad % 2:
        raise PreconditionError("n_quad must be an even count >= 2")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    s = np.linspace(0.0, 1.0, n_quad + 1)
    vals = q.apply(s[:, None] * x[None, :]) @ x
    w = np.ones(n_quad + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(np.sum(w * vals) / (3.0 * n_quad))


def check_monotone(q, n_pairs, seed, radius=WORKING_RADIUS):
    """Min over sampled pairs of <Q(x)-Q(y), x-y>; negatives are violations."""
    if n_pairs < 1:
        raise PreconditionError("n_pairs must be >= 1")
    dim = _operator_dim(q)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 17]))
    X = rng.uniform(-radius, radius, size=(int(n_pairs), dim))
    Y = rng.uniform(-radius, radius, size=(int(n_pairs), dim))
    gaps = np.einsum("ij,ij->i", q.apply(X) - q.apply(Y), X - Y)
    return float(np.min(gaps))


def _operator_dim(q, default=3):
    if isinstance(q, LinearSymmetricPSD):
        return q.matrix.shape[0]
    return default


def _require_coercive(q):
    if isinstance(q, LinearSymmetricPSD):
        top = float(np.max(np.linalg.eigvalsh(q.matrix))) if q.matrix.size else 0.0
        if q.min_eigenvalue <= 1e-12 * max(top, 1.0):
            raise PreconditionError(
                "potential must be coercive: the matrix has a (near-)singular direction"
            )


def _level_rescale(q, X, r):
    """Exact retraction onto {I = r} using k-homogeneity of I."""
    vals = q.value_rows(X)
    t = (r / vals) ** (1.0 / q.degree)
    return X * t[:, None]


def _boundary_min_j(proj: Projector, q, r, n_starts, iters, seed):
    """Min of J over the level surface {I = r}; (point, value).

    The infimum of J over the sublevel set {I <= r} is attained here:
    grad J = P never vanishes when 0 is outside the set, so there are no
    interior critical points. For the identity potential the surface is the
    sphere of squared norm 2r and the sphere engine (with its exhaustive
    low-dimensional grid) is reused; otherwise projected descent with the
    exact homogeneous rescaling serves, seeded exhaustively in dims <= 2.
    """
    if isinstance(q, IdentityPotential):
        point, value = _sphere_descend(proj, 2.0 * r, "min_j", n_starts, iters, seed)
        return point, value
    d = proj.dim
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 23]))
    starts = []
    if d == 1:
        starts.append(np.array([[1.0], [-1.0]]))
    elif d == 2:
        theta = np.arange(0.0, 2.0 * np.pi, 1e-3)
        starts.append(np.stack([np.cos(theta), np.sin(theta)], axis=1))
    eye = np.eye(d)
    starts.append(np.vstack([eye, -eye]))
    if float(np.linalg.norm(proj.p0)) > 0.0:
        starts.append(-proj.p0[None, :] / np.linalg.norm(proj.p0))
    g = rng.normal(size=(int(n_starts), d))
    g[np.all(g == 0.0, axis=1)] = 1.0
    starts.append(g)
    X = _level_rescale(q, np.vstack(starts), r)
    vals = j_value_batch(proj, X)
    step = np.full(X.shape[0], 0.1 * np.sqrt(2.0 * r / q.degree))
    base = step[0]
    for _ in range(int(iters)):
        PX = proj.project_batch(X)
        QX = q.apply(X)
        qn = np.einsum("ij,ij->i", QX, QX)
        qn[qn == 0.0] = 1.0
        tangent = PX - (np.einsum("ij,ij->i", PX, QX) / qn)[:, None] * QX
        tn_sq = np.einsum("ij,ij->i", tangent, tangent)
        Y = _level_rescale(q, X - step[:, None] * tangent, r)
        new_vals = j_value_batch(proj, Y)
        accept = new_vals <= vals - 1e-4 * step * tn_sq
        X = np.where(accept[:, None], Y, X)
        vals = np.where(accept, new_vals, vals)
        step = np.where(accept, np.minimum(step * 1.5, 10.0 * base), step * 0.5)
        if np.all(step < 1e-14 * base):
            break
    k = int(np.argmin(vals))
    return X[k], float(vals[k])


def lambda_star_estimate(proj: Projector, q, r_grid, samples_per_r=64, seed=0,
                         n_starts=32, iters=500):
    """Upper estimate of the solvability threshold lam*.

    For each level r, the inner infimum m_J(r) of J over {I <= r} is taken
    on the level surface, then the quotient (J(x) - m_J(r)) / (r - I(x)) is
    minimized over strictly feasible samples plus a refinement path
    approaching the surface argmin from inside, where the quotient's
    infimum is typically attained as a 0/0 limit. The result is an upper
    bound on lam* up to the inner optimizer's error on m_J.
    """
    _require_coercive(q)
    rs = np.asarray(r_grid, dtype=np.float64).reshape(-1)
    if rs.size == 0 or np.any(rs <= 0.0):
        raise PreconditionError("r_grid must be nonempty with every r > 0")
    if samples_per_r < 10:
        raise PreconditionError("samples_per_r must be >= 10")
    d = proj.dim
    best = (np.inf, np.nan, np.zeros(d))
    for i, r in enumerate(rs):
        r = float(r)
        x_b, m_hat = _boundary_min_j(proj, q, r, n_starts, iters, seed + 31 * i)
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 29, i]))
        raw = rng.normal(size=(int(samples_per_r), d))
        raw[np.all(raw == 0.0, axis=1)] = 1.0
        # random candidates strictly inside: scale surface points inward
        shrink = rng.uniform(0.05, 0.999, size=int(samples_per_r))
        cands = _level_rescale(q, raw, r) * shrink[:, None]
        # refinement path toward the surface argmin of J from inside
        deltas = np.geomspace(1e-6, 0.5, 24)
        cands = np.vstack([cands, x_b[None, :] * (1.0 - deltas)[:, None]])
        ivals = q.value_rows(cands)
        keep = ivals < r
        if not np.any(keep):
            warnings.warn(f"no strictly feasible candidates at level r={r}; skipped")
            continue
        cands = cands[keep]
        ivals = ivals[keep]
        num = np.maximum(j_value_batch(proj, cands) - m_hat, 0.0)
        den = np.maximum(r - ivals, 1e-9 * r)
        quots = num / den
        k = int(np.argmin(quots))
        if quots[k] < best[0]:
            best = (float(quots[k]), r, cands[k].copy())
    if not np.isfinite(best[0]):
        raise ConvergenceError("no level produced a feasible quotient candidate")
    return LambdaStarEstimate(
        value=best[0],
        r_grid=tuple(float(r) for r in rs),
        samples_per_r=int(samples_per_r),
        argmin_r=best[1],
        argmin_x=best[2],
    )


def solve_projection_equation(proj: Projector, q, lam, tol=1e-10, max_iter=100_000):
    """Solve P(x) + lam*Q(x) = 0 by gradient descent on F = J + lam*I.

    F is convex with gradient P + lam*Q, Lipschitz at most
    1 + lam*lipschitz_bound, so the constant step 1/(1 + lam*L) descends
    monotonically. The returned residual is re-evaluated with a fresh
    projection, independent of the iteration's own values.
    """
    lam = float(lam)
    if not lam > 0.0:
        raise PreconditionError("lam must be positive")
    if not tol > 0.0:
        raise PreconditionError("tol must be positive")
    _require_coercive(q)
    step = 1.0 / (1.0 + lam * q.lipschitz_bound)
    x = np.zeros(proj.dim)
    iterations = 0
    f_prev = np.inf
    for iterations in range(1, int(max_iter) + 1):
        px = proj.project_batch(x[None, :])[0]
        grad = px + lam * q.apply(x[None, :])[0]
        # descent of F = J + lam*I is a designed-in invariant; a violation
        # means the Lipschitz bound is wrong for this operator
        j_val = 0.5 * (x @ x - (x - px) @ (x - px) + proj.p0_norm_sq)
        f_val = j_val + lam * float(q.value_rows(x[None, :])[0])
        if f_val > f_prev + 1e-12 * max(1.0, abs(f_prev)):
            raise ConvergenceError(
                f"descent violated at iteration {iterations}; "
                "the operator's lipschitz_bound is too small",
                last_residual=float(np.linalg.norm(grad)),
            )
        f_prev = f_val
        if float(np.linalg.norm(grad)) <= tol:
            break
        x = x - step * grad
    residual = float(np.linalg.norm(
        proj.project_batch(x[None, :])[0] + lam * q.apply(x[None, :])[0]
    ))
    if residual > tol:
        raise ConvergenceError(
            f"no solution found within {max_iter} iterations "
            f"(best residual {residual}); the scale may be below the threshold",
            last_residual=residual,
        )
    return SolveResult(point=x, lam=lam, residual=residual,
                       iterations=iterations, converged=True)
