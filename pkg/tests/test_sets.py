"""Set spec validation, membership, boundedness, and JSON round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projkit import (
    Ball,
    Box,
    DimensionMismatchError,
    Halfspace,
    Hyperplane,
    Intersection,
    NormLevel,
    Simplex,
    SpecValidationError,
    Translate,
    as_vector,
    contains,
    is_bounded,
    set_from_json,
    set_from_json_obj,
    set_to_json,
    set_to_json_obj,
)


def test_as_vector_coercion():
    v = as_vector([1, 2, 3])
    assert v.dtype == np.float64 and v.shape == (3,)
    assert as_vector(2.5).shape == (1,)
    with pytest.raises(SpecValidationError):
        as_vector([[1.0, 2.0]])
    with pytest.raises(SpecValidationError):
        as_vector([1.0, np.nan])
    with pytest.raises(DimensionMismatchError):
        as_vector([1.0, 2.0], dim=3)


def test_validation_rejects_bad_parameters():
    with pytest.raises(SpecValidationError):
        Box(lo=[2.0], hi=[1.0])
    with pytest.raises(SpecValidationError):
        Ball(center=[0.0], radius=0.0)
    with pytest.raises(SpecValidationError):
        Ball(center=[0.0], radius=np.inf)
    with pytest.raises(SpecValidationError):
        Simplex(scale=-1.0, dimension=2)
    with pytest.raises(SpecValidationError):
        Simplex(scale=1.0, dimension=0)
    with pytest.raises(SpecValidationError):
        Halfspace(normal=[0.0, 0.0], offset=1.0)
    with pytest.raises(SpecValidationError):
        Hyperplane(normal=[0.0], offset=1.0)
    with pytest.raises(SpecValidationError):
        Intersection(())
    with pytest.raises(DimensionMismatchError):
        Intersection((Box([0.0], [1.0]), Ball([0.0, 0.0], 1.0)))
    with pytest.raises(SpecValidationError):
        Intersection((Box([0.0], [1.0]),), max_iter=0)
    with pytest.raises(SpecValidationError):
        Translate(base="not a set", shift=[0.0])


def test_dim_property():
    assert Box([0.0, 0.0], [1.0, 1.0]).dim == 2
    assert Ball([1.0, 2.0, 3.0], 1.0).dim == 3
    assert Simplex(1.0, 5).dim == 5
    assert Halfspace([1.0], 0.0).dim == 1
    assert Translate(Ball([0.0, 0.0], 1.0), [1.0, 1.0]).dim == 2
    assert Intersection((Box([0.0], [1.0]), Halfspace([1.0], 2.0))).dim == 1


def test_contains_closed_forms():
    box = Box([0.0, 0.0], [1.0, 2.0])
    assert contains(box, [0.5, 1.0], 0.0)
    assert not contains(box, [1.5, 1.0], 1e-9)
    assert contains(box, [1.0 + 1e-12, 1.0], 1e-9)
    ball = Ball([3.0, 0.0], 1.0)
    assert contains(ball, [2.0, 0.0], 0.0)
    assert not contains(ball, [1.9, 0.0], 1e-3)
    simplex = Simplex(1.0, 3)
    assert contains(simplex, [0.2, 0.3, 0.5], 1e-12)
    assert not contains(simplex, [0.5, 0.5, 0.5], 1e-9)
    hs = Halfspace([1.0, 1.0], 1.0)
    assert contains(hs, [0.5, 0.5], 0.0)
    assert not contains(hs, [1.0, 1.0], 1e-9)
    hp = Hyperplane([0.0, 1.0], 2.0)
    assert contains(hp, [7.0, 2.0], 1e-12)
    assert not contains(hp, [0.0, 2.1], 1e-3)
    tr = Translate(Ball([0.0, 0.0], 1.0), [5.0, 0.0])
    assert contains(tr, [5.5, 0.0], 0.0)
    assert not contains(tr, [0.0, 0.0], 1e-9)
    inter = Intersection((Box([0.0, 0.0], [2.0, 2.0]), Halfspace([1.0, 0.0], 1.0)))
    assert contains(inter, [0.5, 1.5], 0.0)
    assert not contains(inter, [1.5, 1.5], 1e-9)
    with pytest.raises(SpecValidationError):
        contains(box, [0.5, 0.5], -1.0)


def test_is_bounded():
    assert is_bounded(Box([0.0], [1.0]))
    assert is_bounded(Ball([0.0], 1.0))
    assert is_bounded(Simplex(1.0, 2))
    assert not is_bounded(Halfspace([1.0], 0.0))
    assert not is_bounded(Hyperplane([1.0], 0.0))
    assert is_bounded(Translate(Ball([0.0], 1.0), [3.0]))
    assert not is_bounded(Translate(Halfspace([1.0], 0.0), [3.0]))
    # one bounded member certifies the whole intersection
    assert is_bounded(Intersection((Halfspace([1.0], 5.0), Box([0.0], [1.0]))))
    assert not is_bounded(Intersection((Halfspace([1.0], 5.0), Hyperplane([1.0], 0.0))))


def test_norm_level():
    sphere = NormLevel(4.0)
    assert sphere.radius == 2.0
    assert sphere.contains([2.0, 0.0])
    assert not sphere.contains([1.0, 0.0])
    ball = NormLevel(4.0, kind="open_ball")
    assert ball.contains([1.0, 0.0])
    assert not ball.contains([2.0, 0.0])
    with pytest.raises(SpecValidationError):
        NormLevel(0.0)
    with pytest.raises(SpecValidationError):
        NormLevel(1.0, kind="closed_ball")


SPECS = [
    Halfspace([1.0, -2.0], 0.5),
    Hyperplane([0.0, 3.0], -1.0),
    Box([-1.0, 0.0], [1.0, 2.0]),
    Ball([3.0, 0.0], 1.0),
    Simplex(1.5, 2),
    Translate(Ball([1.0, 1.0], 0.5), [-2.0, 3.0]),
    Intersection((Box([0.0, 0.0], [2.0, 2.0]), Halfspace([1.0, 1.0], 3.0)),
                 max_iter=777, tol=1e-11),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_json_round_trip(spec):
    # canonical JSON text is the equality notion: field arrays are ndarrays
    obj = set_to_json_obj(spec)
    back = set_from_json_obj(obj)
    assert type(back) is type(spec)
    assert set_to_json(back) == set_to_json(spec)


def test_json_preserves_intersection_policy():
    spec = SPECS[-1]
    back = set_from_json(set_to_json(spec))
    assert back.max_iter == 777 and back.tol == 1e-11


def test_json_parse_rejects_malformed():
    with pytest.raises(SpecValidationError):
        set_from_json_obj(["not", "an", "object"])
    with pytest.raises(SpecValidationError):
        set_from_json_obj({"type": "moebius_strip"})
    with pytest.raises(SpecValidationError):
        set_from_json_obj({"type": "box", "lo": [0.0]})
    with pytest.raises(SpecValidationError):
        set_from_json("not json at all {")


@settings(max_examples=50, deadline=None)
@given(
    lo=st.lists(st.floats(-5.0, 5.0), min_size=1, max_size=4),
    width=st.lists(st.floats(0.0, 5.0), min_size=4, max_size=4),
)
def test_box_round_trip_property(lo, width):
    hi = [l + w for l, w in zip(lo, width)]
    spec = Box(lo, hi[: len(lo)])
    assert set_to_json(set_from_json(set_to_json(spec))) == set_to_json(spec)
