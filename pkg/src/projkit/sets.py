"""Declarative descriptions of closed convex sets.

Each spec names a set with an exact closed-form projector (halfspace,
hyperplane, box, ball, simplex), a rigid translate of another spec, or an
intersection projected iteratively. Specs are immutable, validated on
construction, and serialize to JSON with a "type" discriminator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, SpecValidationError

__all__ = [
    "as_vector",
    "ConvexSetSpec",
    "Halfspace",
    "Hyperplane",
    "Box",
    "Ball",
    "Simplex",
    "Translate",
    "Intersection",
    "NormLevel",
    "contains",
    "is_bounded",
    "set_to_json_obj",
    "set_from_json_obj",
    "set_to_json",
    "set_from_json",
]


def as_vector(x, dim=None):
    """Coerce to a finite 1-D float64 array, optionally checking its length."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size < 1:
        raise SpecValidationError("vector must be 1-D with at least one entry")
    if not np.all(np.isfinite(v)):
        raise SpecValidationError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.size}")
    return v


class ConvexSetSpec:
    """Base class for set descriptions; see the concrete variants."""

    @property
    def dim(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Halfspace(ConvexSetSpec):
    """{x : <normal, x> <= offset}, normal nonzero."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal)
        if not np.any(n != 0.0):
            raise SpecValidationError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.size


@dataclass(frozen=True)
class Hyperplane(ConvexSetSpec):
    """{x : <normal, x> = offset}, normal nonzero."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal)
        if not np.any(n != 0.0):
            raise SpecValidationError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.size


@dataclass(frozen=True)
class Box(ConvexSetSpec):
    """{x : lo <= x <= hi componentwise}."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lo)
        hi = as_vector(self.hi, dim=lo.size)
        if np.any(lo > hi):
            raise SpecValidationError("box requires lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.size


@dataclass(frozen=True)
class Ball(ConvexSetSpec):
    """{x : ||x - center|| <= radius}, radius > 0."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_vector(self.center)
        r = float(self.radius)
        if not (r > 0.0 and np.isfinite(r)):
            raise SpecValidationError("ball radius must be positive and finite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return self.center.size


@dataclass(frozen=True)
class Simplex(ConvexSetSpec):
    """{x >= 0, sum(x) = scale} in the given dimension, scale > 0."""

    scale: float
    dimension: int

    def __post_init__(self):
        s = float(self.scale)
        d = int(self.dimension)
        if not (s > 0.0 and np.isfinite(s)):
            raise SpecValidationError("simplex scale must be positive and finite")
        if d < 1:
            raise SpecValidationError("simplex dimension must be >= 1")
        object.__setattr__(self, "scale", s)
        object.__setattr__(self, "dimension", d)

    @property
    def dim(self):
        return self.dimension


@dataclass(frozen=True)
class Translate(ConvexSetSpec):
    """base shifted rigidly by shift: {s + y : y in base}."""

    base: ConvexSetSpec
    shift: np.ndarray

    def __post_init__(self):
        if not isinstance(self.base, ConvexSetSpec):
            raise SpecValidationError("translate base must be a set spec")
        s = as_vector(self.shift, dim=self.base.dim)
        object.__setattr__(self, "shift", s)

    @property
    def dim(self):
        return self.base.dim


@dataclass(frozen=True)
class Intersection(ConvexSetSpec):
    """Intersection of members, projected iteratively.

    Non-emptiness is the author's responsibility; the projector flags runs
    whose increments stop shrinking as a suspected empty intersection.
    """

    members: tuple
    max_iter: int = 5000
    tol: float = 1e-12

    def __post_init__(self):
        members = tuple(self.members)
        if len(members) < 1:
            raise SpecValidationError("intersection needs at least one member")
        dims = set()
        for m in members:
            if not isinstance(m, ConvexSetSpec):
                raise SpecValidationError("intersection members must be set specs")
            dims.add(m.dim)
        if len(dims) != 1:
            raise DimensionMismatchError("intersection members must share a dimension")
        if int(self.max_iter) < 1:
            raise SpecValidationError("max_iter must be positive")
        if not (float(self.tol) > 0.0):
            raise SpecValidationError("tol must be positive")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "max_iter", int(self.max_iter))
        object.__setattr__(self, "tol", float(self.tol))

    @property
    def dim(self):
        return self.members[0].dim


@dataclass(frozen=True)
class NormLevel:
    """A squared-norm level: sphere {||x||^2 = r} or open ball {||x||^2 < r}."""

    r: float
    kind: str = "sphere"

    def __post_init__(self):
        r = float(self.r)
        if not (r > 0.0 and np.isfinite(r)):
            raise SpecValidationError("level r must be positive and finite")
        if self.kind not in ("sphere", "open_ball"):
            raise SpecValidationError("kind must be 'sphere' or 'open_ball'")
        object.__setattr__(self, "r", r)

    @property
    def radius(self):
        return float(np.sqrt(self.r))

    def contains(self, x, tol=1e-9):
        n2 = float(np.dot(x, x))
        if self.kind == "sphere":
            return abs(n2 - self.r) <= tol * max(1.0, self.r)
        return n2 < self.r


def contains(set_spec, x, tol):
    """Whether x satisfies the set's defining constraints within tol."""
    if tol < 0.0:
        raise SpecValidationError("tol must be >= 0")
    x = as_vector(x, dim=set_spec.dim)
    if isinstance(set_spec, Halfspace):
        nn = float(np.linalg.norm(set_spec.normal))
        return float(np.dot(set_spec.normal, x)) - set_spec.offset <= tol * nn
    if isinstance(set_spec, Hyperplane):
        nn = float(np.linalg.norm(set_spec.normal))
        return abs(float(np.dot(set_spec.normal, x)) - set_spec.offset) <= tol * nn
    if isinstance(set_spec, Box):
        return bool(np.all(x >= set_spec.lo - tol) and np.all(x <= set_spec.hi + tol))
    if isinstance(set_spec, Ball):
        return float(np.linalg.norm(x - set_spec.center)) <= set_spec.radius + tol
    if isinstance(set_spec, Simplex):
        return bool(np.all(x >= -tol) and abs(float(np.sum(x)) - set_spec.scale) <= tol)
    if isinstance(set_spec, Translate):
        return contains(set_spec.base, x - set_spec.shift, tol)
    if isinstance(set_spec, Intersection):
        return all(contains(m, x, tol) for m in set_spec.members)
    raise SpecValidationError(f"unknown set spec {type(set_spec).__name__}")


def is_bounded(set_spec):
    """Whether the described set is certified bounded.

    Halfspaces and hyperplanes are unbounded; an intersection is certified
    bounded when at least one member is.
    """
    if isinstance(set_spec, (Box, Ball, Simplex)):
        return True
    if isinstance(set_spec, (Halfspace, Hyperplane)):
        return False
    if isinstance(set_spec, Translate):
        return is_bounded(set_spec.base)
    if isinstance(set_spec, Intersection):
        return any(is_bounded(m) for m in set_spec.members)
    raise SpecValidationError(f"unknown set spec {type(set_spec).__name__}")


def set_to_json_obj(set_spec):
    """Plain-JSON form with a "type" discriminator; vectors become lists."""
    if isinstance(set_spec, Halfspace):
        return {"type": "halfspace", "normal": set_spec.normal.tolist(), "offset": set_spec.offset}
    if isinstance(set_spec, Hyperplane):
        return {"type": "hyperplane", "normal": set_spec.normal.tolist(), "offset": set_spec.offset}
    if isinstance(set_spec, Box):
        return {"type": "box", "lo": set_spec.lo.tolist(), "hi": set_spec.hi.tolist()}
    if isinstance(set_spec, Ball):
        return {"type": "ball", "center": set_spec.center.tolist(), "radius": set_spec.radius}
    if isinstance(set_spec, Simplex):
        return {"type": "simplex", "scale": set_spec.scale, "dimension": set_spec.dimension}
    if isinstance(set_spec, Translate):
        return {
            "type": "translate",
            "base": set_to_json_obj(set_spec.base),
            "shift": set_spec.shift.tolist(),
        }
    if isinstance(set_spec, Intersection):
        return {
            "type": "intersection",
            "members": [set_to_json_obj(m) for m in set_spec.members],
            "max_iter": set_spec.max_iter,
            "tol": set_spec.tol,
        }
    raise SpecValidationError(f"unknown set spec {type(set_spec).__name__}")


def _require(obj, key):
    if key not in obj:
        raise SpecValidationError(f"set spec missing field '{key}'")
    return obj[key]


def set_from_json_obj(obj):
    """Parse the JSON object form produced by set_to_json_obj."""
    if not isinstance(obj, dict):
        raise SpecValidationError("set spec must be a JSON object")
    kind = _require(obj, "type")
    if kind == "halfspace":
        return Halfspace(_require(obj, "normal"), _require(obj, "offset"))
    if kind == "hyperplane":
        return Hyperplane(_require(obj, "normal"), _require(obj, "offset"))
    if kind == "box":
        return Box(_require(obj, "lo"), _require(obj, "hi"))
    if kind == "ball":
        return Ball(_require(obj, "center"), _require(obj, "radius"))
    if kind == "simplex":
        return Simplex(_require(obj, "scale"), _require(obj, "dimension"))
    if kind == "translate":
        return Translate(set_from_json_obj(_require(obj, "base")), _require(obj, "shift"))
    if kind == "intersection":
        members = [set_from_json_obj(m) for m in _require(obj, "members")]
        return Intersection(
            tuple(members),
            max_iter=obj.get("max_iter", 5000),
            tol=obj.get("tol", 1e-12),
        )
    raise SpecValidationError(f"unknown set type '{kind}'")


def set_to_json(set_spec):
    return json.dumps(set_to_json_obj(set_spec), sort_keys=True)


def set_from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"invalid JSON: {exc}") from exc
    return set_from_json_obj(obj)
