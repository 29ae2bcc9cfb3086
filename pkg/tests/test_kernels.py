"""Backend parity and stall semantics of the projection kernels.

Both backends must produce bitwise-comparable results (within 1e-12) on the
same compiled programs, and both must distinguish an empty intersection
(plateau at an infeasible iterate) from the long correction burn-down that
a feasible iterate goes through when the input is far away.
"""

import numpy as np
import pytest

from projkit import Ball, Box, Halfspace, Hyperplane, Intersection, Simplex, Translate
from projkit._kernels import get_backend
from projkit.program import compile_set

pure = get_backend("python")
try:
    compiled = get_backend("compiled")
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled backend not built")


def _run_project(backend, spec, X):
    p = compile_set(spec)
    return backend.project_batch(p.kinds, p.vec_a, p.vec_b, p.shift,
                                 p.scal_a, p.scal_b, p.max_iter, p.tol, X)


def _run_fixed_point(backend, spec, lams):
    p = compile_set(spec)
    return backend.fixed_point_batch(p.kinds, p.vec_a, p.vec_b, p.shift,
                                     p.scal_a, p.scal_b, p.max_iter, p.tol,
                                     lams, 1e-12, 200_000)


PARITY_SPECS = [
    Box([-1.0, 0.0, 0.5], [1.0, 2.0, 0.75]),
    Ball([3.0, 0.0], 1.0),
    Simplex(1.0, 4),
    Halfspace([1.0, -2.0], 0.5),
    Hyperplane([0.0, 1.0, 1.0], 2.0),
    Translate(Simplex(2.0, 3), [1.0, -1.0, 0.5]),
    Intersection((Box([1.0, 1.0], [2.0, 2.0]), Halfspace([1.0, 1.0], 3.5))),
]


@needs_compiled
@pytest.mark.parametrize("spec", PARITY_SPECS, ids=lambda s: type(s).__name__)
def test_project_batch_parity(spec):
    rng = np.random.default_rng(np.random.SeedSequence([2, spec.dim]))
    X = rng.normal(size=(40, spec.dim)) * 5.0
    Yp, _, _, sp = _run_project(pure, spec, X)
    Yc, _, _, sc = _run_project(compiled, spec, X)
    assert np.array_equal(sp, sc)
    assert np.max(np.abs(Yp - Yc)) <= 1e-12


@needs_compiled
@pytest.mark.parametrize("spec", [Box([1.0], [2.0]), Ball([3.0, 0.0], 1.0),
                                  Intersection((Box([1.0, 1.0], [2.0, 2.0]),
                                                Halfspace([1.0, 1.0], 3.5)))],
                         ids=["box", "ball", "cut_box"])
def test_fixed_point_batch_parity(spec):
    lams = np.array([-0.9, -0.25, 0.0, 0.5, 0.999])
    Yp, ip, _, sp = _run_fixed_point(pure, spec, lams)
    Yc, ic, _, sc = _run_fixed_point(compiled, spec, lams)
    assert np.array_equal(sp, sc) and np.all(sp == 1)
    assert np.max(np.abs(Yp - Yc)) <= 1e-12
    assert np.array_equal(ip, ic)


@pytest.mark.parametrize("backend", [pure] + ([compiled] if compiled else []),
                         ids=["python"] + (["compiled"] if compiled else []))
def test_feasible_plateau_is_not_a_stall(backend):
    # corrections of a distant input decay by about one box-width per cycle,
    # holding the increment metric constant for far more than the stall
    # window while the iterate already sits at the answer
    spec = Intersection((Box([1.0, 1.0], [2.0, 2.0]), Halfspace([1.0, 1.0], 3.5)))
    X = np.array([[300.0, 300.0]])
    Y, _, _, status = _run_project(backend, spec, X)
    assert status[0] == 1
    assert np.allclose(Y[0], [1.75, 1.75], atol=1e-9)


@pytest.mark.parametrize("backend", [pure] + ([compiled] if compiled else []),
                         ids=["python"] + (["compiled"] if compiled else []))
def test_infeasible_plateau_is_a_stall(backend):
    spec = Intersection((Box([0.0], [1.0]), Box([2.0], [3.0])))
    X = np.array([[0.5]])
    _, _, _, status = _run_project(backend, spec, X)
    assert status[0] == -1


@pytest.mark.parametrize("backend", [pure] + ([compiled] if compiled else []),
                         ids=["python"] + (["compiled"] if compiled else []))
def test_rounding_frozen_plateau_is_not_a_stall(backend):
    # this input pins the iterate bitwise for ~160 cycles while corrections
    # accumulate (batched summation quantizes the shrinking increments to
    # exact equality), then escapes and converges; the plateau probe must
    # not read the freeze as an empty intersection
    d = 7
    spec = Intersection((Box(np.ones(d), 2.0 * np.ones(d)),
                         Halfspace(np.ones(d), 1.5 * d + 0.25)))
    pt = np.array([7.52008207, 7.31789203, 7.77573533, -0.04066598,
                   7.53916923, -0.06573685, -6.10494059])
    X = np.tile(pt, (2, 1))
    Y, _, _, status = _run_project(backend, spec, X)
    assert np.all(status == 1)
    assert np.max(np.abs(Y[0] - Y[1])) <= 1e-12
    assert abs(np.sum(Y[0]) - (1.5 * d + 0.25)) <= 1e-8
    assert np.all(Y[0] >= 1.0 - 1e-9) and np.all(Y[0] <= 2.0 + 1e-9)


@pytest.mark.parametrize("backend", [pure] + ([compiled] if compiled else []),
                         ids=["python"] + (["compiled"] if compiled else []))
def test_budget_exhaustion_reports_status_zero(backend):
    spec = Intersection((Box([1.0, 1.0], [2.0, 2.0]), Halfspace([1.0, 1.0], 3.5)),
                        max_iter=2)
    X = np.array([[40.0, 40.0]])
    _, _, _, status = _run_project(backend, spec, X)
    assert status[0] == 0


def test_backend_names():
    assert pure.BACKEND_NAME == "python"
    if compiled is not None:
        assert compiled.BACKEND_NAME == "compiled"
    with pytest.raises(ValueError):
        get_backend("fortran")


@needs_compiled
def test_single_member_sets_have_identical_bits():
    # closed-form members go through one arithmetic path per backend; the
    # operations are simple enough to agree exactly
    spec = Box([-1.0, 0.0], [1.0, 2.0])
    rng = np.random.default_rng(9)
    X = rng.normal(size=(100, 2)) * 3.0
    Yp, _, _, _ = _run_project(pure, spec, X)
    Yc, _, _, _ = _run_project(compiled, spec, X)
    assert np.array_equal(Yp, Yc)
