"""Projection correctness against an independent QP oracle and hand values.

The oracle solves min ||y - x||^2 subject to the set's membership
constraints with scipy's SLSQP. The projection is the unique minimizer, so
it suffices that P(x) is feasible and never farther from x than the
oracle's solution.
"""

import numpy as np
import pytest
from scipy import optimize

from projkit import (
    Ball,
    Box,
    ConvergenceError,
    DimensionMismatchError,
    Halfspace,
    Hyperplane,
    Intersection,
    IterationPolicy,
    Projector,
    Simplex,
    SpecValidationError,
    Translate,
    contains,
    project_origin,
)


def _oracle_constraints(spec, offset):
    """SLSQP constraint dicts for membership of y + offset in spec."""
    if isinstance(spec, Translate):
        return _oracle_constraints(spec.base, offset - spec.shift)
    if isinstance(spec, Intersection):
        cons = []
        for m in spec.members:
            cons.extend(_oracle_constraints(m, offset))
        return cons
    if isinstance(spec, Halfspace):
        n, b = spec.normal, spec.offset
        return [{"type": "ineq", "fun": lambda y, n=n, b=b, o=offset: b - n @ (y + o)}]
    if isinstance(spec, Hyperplane):
        n, b = spec.normal, spec.offset
        return [{"type": "eq", "fun": lambda y, n=n, b=b, o=offset: n @ (y + o) - b}]
    if isinstance(spec, Box):
        lo, hi = spec.lo, spec.hi
        return [
            {"type": "ineq", "fun": lambda y, lo=lo, o=offset: (y + o) - lo},
            {"type": "ineq", "fun": lambda y, hi=hi, o=offset: hi - (y + o)},
        ]
    if isinstance(spec, Ball):
        c, r = spec.center, spec.radius
        return [{"type": "ineq",
                 "fun": lambda y, c=c, r=r, o=offset: r * r - np.sum((y + o - c) ** 2)}]
    if isinstance(spec, Simplex):
        s = spec.scale
        return [
            {"type": "ineq", "fun": lambda y, o=offset: y + o},
            {"type": "eq", "fun": lambda y, s=s, o=offset: np.sum(y + o) - s},
        ]
    raise AssertionError(f"no oracle for {type(spec).__name__}")


def qp_oracle(spec, x):
    """Nearest feasible point to x by SLSQP from several starts.

    The success flag is ignored: any returned iterate that is feasible is a
    valid upper bound on the distance, which is all the comparison needs.
    """
    x = np.asarray(x, dtype=np.float64)
    cons = _oracle_constraints(spec, np.zeros(x.size))
    best, best_val = None, np.inf
    for start in (x, np.zeros_like(x), np.ones_like(x)):
        res = optimize.minimize(
            lambda y: np.sum((y - x) ** 2), start, jac=lambda y: 2.0 * (y - x),
            method="SLSQP", constraints=cons,
            options={"maxiter": 500, "ftol": 1e-12},
        )
        if contains(spec, res.x, 1e-7) and res.fun < best_val:
            best, best_val = res.x, res.fun
    assert best is not None, "oracle produced no feasible candidate"
    return best


ORACLE_SPECS = [
    Box([-1.0, 0.5, 0.0], [1.0, 2.0, 0.25]),
    Ball([1.0, -2.0], 1.5),
    Simplex(2.0, 4),
    Halfspace([1.0, -1.0, 2.0], 0.5),
    Hyperplane([2.0, 1.0], 3.0),
    Translate(Ball([0.5, 0.5], 0.75), [-3.0, 1.0]),
    Intersection((Box([1.0, 1.0], [2.0, 2.0]), Halfspace([1.0, 1.0], 3.5))),
    Intersection((Ball([0.0, 0.0, 0.0], 2.0), Halfspace([0.0, 0.0, 1.0], 0.5),
                  Box([-3.0, -3.0, -3.0], [3.0, 0.9, 3.0]))),
]


@pytest.mark.parametrize("spec", ORACLE_SPECS, ids=lambda s: type(s).__name__)
def test_projection_matches_qp_oracle(spec):
    proj = Projector(spec)
    rng = np.random.default_rng(np.random.SeedSequence([7, spec.dim]))
    X = rng.normal(size=(12, spec.dim)) * 4.0
    PX = proj.project_batch(X)
    for x, px in zip(X, PX):
        assert contains(spec, px, 1e-8)
        y = qp_oracle(spec, x)
        # uniqueness: feasible and at least as close as the oracle optimum
        assert np.linalg.norm(x - px) <= np.linalg.norm(x - y) + 1e-7


def test_box_projection_is_clip():
    proj = Projector(Box([-1.0, 0.0], [1.0, 2.0]))
    x = np.array([-3.0, 5.0])
    assert np.array_equal(proj.project(x), np.array([-1.0, 2.0]))
    inside = np.array([0.25, 1.5])
    assert np.array_equal(proj.project(inside), inside)


def test_ball_projection_closed_form():
    proj = Projector(Ball([3.0, 0.0], 1.0))
    assert np.allclose(proj.project([0.0, 0.0]), [2.0, 0.0], atol=1e-15)
    assert np.allclose(proj.project([3.0, 5.0]), [3.0, 1.0], atol=1e-15)
    inside = np.array([3.2, 0.1])
    assert np.array_equal(proj.project(inside), inside)


def test_simplex_projection_hand_values():
    proj = Projector(Simplex(1.0, 3))
    # symmetric point spreads evenly
    assert np.allclose(proj.project([5.0, 5.0, 5.0]), np.ones(3) / 3.0, atol=1e-12)
    # strongly dominated coordinates clip to zero
    assert np.allclose(proj.project([2.0, 0.0, 0.0]), [1.0, 0.0, 0.0], atol=1e-12)
    p = proj.project([0.6, 0.5, 0.1])
    assert abs(float(np.sum(p)) - 1.0) <= 1e-12 and np.all(p >= -1e-15)


def test_hyperplane_and_halfspace_closed_forms():
    hp = Projector(Hyperplane([0.0, 2.0], 4.0))
    assert np.allclose(hp.project([7.0, 0.0]), [7.0, 2.0], atol=1e-15)
    hs = Projector(Halfspace([1.0, 0.0], 1.0))
    assert np.allclose(hs.project([3.0, 5.0]), [1.0, 5.0], atol=1e-15)
    assert np.array_equal(hs.project([0.5, 5.0]), np.array([0.5, 5.0]))


def test_translate_folding_is_exact():
    base = Ball([0.5, -0.5], 0.75)
    shift = np.array([10.0, -3.0])
    folded = Projector(Translate(base, shift))
    plain = Projector(base)
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 2)) * 6.0
    expect = plain.project_batch(X - shift) + shift
    assert np.allclose(folded.project_batch(X), expect, atol=1e-12)


def test_nested_translate_of_intersection():
    inner = Intersection((Box([0.0], [1.0]), Halfspace([1.0], 0.5)))
    spec = Translate(Translate(inner, [2.0]), [3.0])
    proj = Projector(spec)
    # effective set is [5, 5.5]
    assert abs(float(proj.project([0.0])[0]) - 5.0) <= 1e-9
    assert abs(float(proj.project([9.0])[0]) - 5.5) <= 1e-9


def test_intersection_agrees_with_members_when_nested():
    flat = Intersection((Box([0.0, 0.0], [2.0, 2.0]), Halfspace([1.0, 0.0], 1.0)))
    nested = Intersection((Intersection((Box([0.0, 0.0], [2.0, 2.0]),)),
                           Halfspace([1.0, 0.0], 1.0)))
    rng = np.random.default_rng(11)
    X = rng.normal(size=(10, 2)) * 3.0
    assert np.allclose(Projector(flat).project_batch(X),
                       Projector(nested).project_batch(X), atol=1e-10)


def test_projection_of_distant_point_onto_cut_box(boxcut2):
    # corrections burn down over ~||x|| cycles; the result is still exact
    for t in (100.0, 500.0):
        assert np.allclose(boxcut2.project([t, t]), [1.75, 1.75], atol=1e-9)
    assert np.allclose(boxcut2.project([-50.0, -50.0]), [1.0, 1.0], atol=1e-9)


def test_empty_intersection_is_flagged():
    spec = Intersection((Box([0.0], [1.0]), Box([2.0], [3.0])))
    with pytest.raises(ConvergenceError, match="empty"):
        Projector(spec)


def test_iteration_policy_override():
    spec = Intersection((Box([1.0, 1.0], [2.0, 2.0]), Halfspace([1.0, 1.0], 3.5)))
    with pytest.raises(ConvergenceError, match="cycles"):
        Projector(spec, policy=IterationPolicy(max_iter=2)).project([40.0, 40.0])
    with pytest.raises(SpecValidationError):
        IterationPolicy(max_iter=0)
    with pytest.raises(SpecValidationError):
        IterationPolicy(tol=0.0)


def test_projector_attributes(clamp1, ball2, boxcut2):
    assert clamp1.dim == 1 and ball2.dim == 2
    assert not clamp1.is_iterative and boxcut2.is_iterative
    assert np.array_equal(clamp1.p0, [1.0]) and clamp1.p0_norm_sq == 1.0
    assert np.allclose(ball2.p0, [2.0, 0.0], atol=1e-15) and ball2.p0_norm_sq == 4.0
    assert np.array_equal(project_origin(clamp1), clamp1.p0)
    # project_origin hands out a copy, not the cached array
    project_origin(clamp1)[0] = 99.0
    assert clamp1.p0[0] == 1.0


def test_projector_input_validation(clamp1):
    with pytest.raises(DimensionMismatchError):
        clamp1.project([1.0, 2.0])
    with pytest.raises(DimensionMismatchError):
        clamp1.project_batch(np.zeros((3, 2)))
    with pytest.raises(SpecValidationError):
        clamp1.project_batch(np.array([[np.inf]]))
    with pytest.raises(SpecValidationError):
        Projector("not a set")


def test_idempotence_on_random_batches(ball2, simplex3, boxcut2):
    rng = np.random.default_rng(5)
    for proj, tol in ((ball2, 1e-12), (simplex3, 1e-12), (boxcut2, 1e-9)):
        X = rng.normal(size=(50, proj.dim)) * 8.0
        PX = proj.project_batch(X)
        assert np.max(np.abs(proj.project_batch(PX) - PX)) <= tol
