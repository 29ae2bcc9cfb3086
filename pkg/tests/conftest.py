"""Shared projector fixtures.

The two closed-form fixtures are used throughout: every profile and
extremizer on them is hand-computable, so tests can pin exact expected
values instead of comparing the code against itself.

clamp1: X = [1, 2] in R^1, P(0) = 1.
    P(x) = clip(x, 1, 2), J(x) = x for x <= 1,
    g(lam) = lam, h(lam) = 1/lam^2, h_inv(r) = 1/sqrt(r),
    x_hat_r = r, v_hat_r = sqrt(r), w_hat_r = -sqrt(r),
    gamma(r) = (1 - sqrt(r))^2, max residual on S_r = (1 + sqrt(r))^2.

ball2: ball of radius 1 centered at (3, 0), P(0) = (2, 0).
    On the axis x = (t, 0), t < 2: P(x) = (2, 0) and J(x) = 2t.
    g(lam) = 4*lam, h(lam) = 4/lam^2, h_inv(r) = 2/sqrt(r),
    x_hat_r = (r/2, 0), v_hat_r = (sqrt(r), 0), w_hat_r = (-sqrt(r), 0),
    gamma(r) = (2 - sqrt(r))^2, max residual on S_r = (2 + sqrt(r))^2.
"""

import pytest

from projkit import Ball, Box, Halfspace, Intersection, Projector, Simplex


@pytest.fixture(scope="session")
def clamp1():
    return Projector(Box(lo=[1.0], hi=[2.0]))


@pytest.fixture(scope="session")
def ball2():
    return Projector(Ball(center=[3.0, 0.0], radius=1.0))


@pytest.fixture(scope="session")
def simplex3():
    # sum(x) = 1 keeps the origin outside
    return Projector(Simplex(scale=1.0, dimension=3))


@pytest.fixture(scope="session")
def boxcut2():
    """Box [1,2]^2 cut by x + y <= 3.5: a genuinely iterative projector."""
    return Projector(Intersection((
        Box(lo=[1.0, 1.0], hi=[2.0, 2.0]),
        Halfspace(normal=[1.0, 1.0], offset=3.5),
    )))
