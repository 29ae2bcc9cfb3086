"""Compilation of set specs into flat numeric programs for the kernels.

A program is a table of primitive rows (kind code plus parameter arrays).
Translates are folded into primitive parameters at compile time (offset and
center shifts are exact); the simplex keeps an explicit shift vector because
its threshold projection has no closed translate fold. Nested intersections
are flattened into one member list; the outermost intersection's iteration
policy governs the whole solve.

Kind codes: 0 halfspace, 1 hyperplane, 2 box, 3 ball, 4 simplex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sets
from .errors import SpecValidationError

KIND_HALFSPACE = 0
KIND_HYPERPLANE = 1
KIND_BOX = 2
KIND_BALL = 3
KIND_SIMPLEX = 4

__all__ = ["SetProgram", "compile_set"]


@dataclass(frozen=True)
class SetProgram:
    """Flat projection program: one row per primitive member.

    vec_a holds the normal (halfspace/hyperplane), lo (box), or center
    (ball); vec_b holds hi (box); shift is the simplex translate offset;
    scal_a holds the offset, radius, or simplex scale; scal_b caches the
    squared normal length. max_iter/tol apply when m >= 2 (cyclic solve).
    """

    dim: int
    kinds: np.ndarray
    vec_a: np.ndarray
    vec_b: np.ndarray
    shift: np.ndarray
    scal_a: np.ndarray
    scal_b: np.ndarray
    max_iter: int
    tol: float

    @property
    def n_members(self):
        return int(self.kinds.size)


def _collect(spec, shift, rows):
    """Append primitive rows for spec shifted by shift (exact folds)."""
    if isinstance(spec, sets.Translate):
        _collect(spec.base, shift + spec.shift, rows)
    elif isinstance(spec, sets.Intersection):
        for m in spec.members:
            _collect(m, shift, rows)
    elif isinstance(spec, sets.Halfspace):
        rows.append(
            (KIND_HALFSPACE, spec.normal.copy(), None, None,
             spec.offset + float(np.dot(spec.normal, shift)),
             float(np.dot(spec.normal, spec.normal)))
        )
    elif isinstance(spec, sets.Hyperplane):
        rows.append(
            (KIND_HYPERPLANE, spec.normal.copy(), None, None,
             spec.offset + float(np.dot(spec.normal, shift)),
             float(np.dot(spec.normal, spec.normal)))
        )
    elif isinstance(spec, sets.Box):
        rows.append((KIND_BOX, spec.lo + shift, spec.hi + shift, None, 0.0, 0.0))
    elif isinstance(spec, sets.Ball):
        rows.append((KIND_BALL, spec.center + shift, None, None, spec.radius, 0.0))
    elif isinstance(spec, sets.Simplex):
        rows.append((KIND_SIMPLEX, None, None, shift.copy(), spec.scale, 0.0))
    else:
        raise SpecValidationError(f"unknown set spec {type(spec).__name__}")


def compile_set(spec):
    """Compile a set spec into a SetProgram."""
    if not isinstance(spec, sets.ConvexSetSpec):
        raise SpecValidationError("expected a set spec")
    dim = spec.dim
    rows = []
    _collect(spec, np.zeros(dim), rows)
    m = len(rows)
    kinds = np.zeros(m, dtype=np.int32)
    vec_a = np.zeros((m, dim))
    vec_b = np.zeros((m, dim))
    shift = np.zeros((m, dim))
    scal_a = np.zeros(m)
    scal_b = np.zeros(m)
    for i, (kind, va, vb, sh, sa, sb) in enumerate(rows):
        kinds[i] = kind
        if va is not None:
            vec_a[i] = va
        if vb is not None:
            vec_b[i] = vb
        if sh is not None:
            shift[i] = sh
        scal_a[i] = sa
        scal_b[i] = sb

    # Policy of the outermost intersection governs the cyclic solve.
    max_iter, tol = 5000, 1e-12
    top = spec
    while isinstance(top, sets.Translate):
        top = top.base
    if isinstance(top, sets.Intersection):
        max_iter, tol = top.max_iter, top.tol
    return SetProgram(
        dim=dim,
        kinds=kinds,
        vec_a=vec_a,
        vec_b=vec_b,
        shift=shift,
        scal_a=scal_a,
        scal_b=scal_b,
        max_iter=max_iter,
        tol=tol,
    )
