"""Sampled geometric property checks for projectors.

Each check returns a scalar whose sign or size certifies the property on
the sample: positive values are violations for the nonexpansiveness and
variational-inequality checks, and the ray-invariance and negated-origin
checks return distances that should vanish. All sampling is deterministic
per seed.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .projector import Projector
from .sets import as_vector

__all__ = [
    "sample_ball",
    "sample_sphere",
    "check_nonexpansive",
    "check_idempotence",
    "check_variational_inequality",
    "check_ray_invariance",
    "check_neg_fixed_point",
]


def _rng(seed, *tags):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(t) for t in tags]]))


def sample_ball(rng, n, dim, radius):
    """n points uniform in the centered ball of the given radius."""
    g = rng.normal(size=(n, dim))
    norms = np.sqrt(np.sum(g * g, axis=1))
    norms[norms == 0.0] = 1.0
    u = rng.random(n) ** (1.0 / dim)
    return (radius * u / norms)[:, None] * g


def sample_sphere(rng, n, dim, r_sq):
    """n points uniform on the sphere of squared norm r_sq."""
    g = rng.normal(size=(n, dim))
    norms = np.sqrt(np.sum(g * g, axis=1))
    norms[norms == 0.0] = 1.0
    return (np.sqrt(r_sq) / norms)[:, None] * g


def check_nonexpansive(proj: Projector, n_pairs, seed, radius=10.0):
    """Max over sampled pairs of ||P(x)-P(y)|| - ||x-y||.

    Positive values are violations. The first pair is degenerate (x = y) by
    construction, so an exact zero contribution is always included.
    """
    if n_pairs < 1:
        raise PreconditionError("n_pairs must be >= 1")
    rng = _rng(seed, 1)
    X = sample_ball(rng, n_pairs, proj.dim, radius)
    Y = sample_ball(rng, n_pairs, proj.dim, radius)
    Y[0] = X[0]
    PX = proj.project_batch(X)
    PY = proj.project_batch(Y)
    dp = np.sqrt(np.sum((PX - PY) ** 2, axis=1))
    dx = np.sqrt(np.sum((X - Y) ** 2, axis=1))
    return float(np.max(dp - dx))


def check_idempotence(proj: Projector, n_samples, seed, radius=10.0):
    """Max over sampled x of ||P(P(x)) - P(x)||."""
    if n_samples < 1:
        raise PreconditionError("n_samples must be >= 1")
    rng = _rng(seed, 3)
    X = sample_ball(rng, n_samples, proj.dim, radius)
    PX = proj.project_batch(X)
    PPX = proj.project_batch(PX)
    return float(np.max(np.sqrt(np.sum((PPX - PX) ** 2, axis=1))))


def check_variational_inequality(proj: Projector, u, n_samples, seed):
    """Max over sampled x in X of <P(u)-u, P(u)-x>.

    Values at or below tolerance certify the projection inequality on the
    sample. Set samples are projections of ambient Gaussian points, which
    concentrates them on the boundary where the inequality is tight.
    """
    if n_samples < 1:
        raise PreconditionError("n_samples must be >= 1")
    u = as_vector(u, dim=proj.dim)
    rng = _rng(seed, 2)
    ambient = rng.normal(size=(n_samples, proj.dim)) * 5.0
    X = proj.project_batch(ambient)
    pu = proj.project(u)
    return float(np.max((pu - X) @ (pu - u)))


def check_ray_invariance(proj: Projector, u, lambdas):
    """Max over lambda < 1 of ||P(u + lambda*(P(u)-u)) - P(u)||.

    The invariance is only claimed strictly below 1; any lambda >= 1 is
    rejected.
    """
    lambdas = np.asarray(lambdas, dtype=np.float64).reshape(-1)
    if np.any(lambdas >= 1.0):
        raise PreconditionError("ray invariance requires every lambda < 1")
    u = as_vector(u, dim=proj.dim)
    pu = proj.project(u)
    pts = u[None, :] + lambdas[:, None] * (pu - u)[None, :]
    moved = proj.project_batch(pts)
    return float(np.max(np.sqrt(np.sum((moved - pu) ** 2, axis=1)))) if lambdas.size else 0.0


def check_neg_fixed_point(proj: Projector):
    """||P(-P(0)) - P(0)||; zero certifies -P(0) is fixed by x -> -P(x)."""
    return float(np.linalg.norm(proj.project(-proj.p0) - proj.p0))
