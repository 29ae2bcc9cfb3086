"""Level-set extremizers of the potential and the gamma profiler.

For a set with 0 outside it, the potential J restricted to spheres S_r of
squared norm r has a unique maximizer v_r (realized through the inverse of
the profile h) and a global minimizer w_r (found by multi-start projected
gradient descent). The profile gamma(r) = inf over S_r of the squared
residual is computed two ways: through phi(r) = J(v_r) via
gamma = r + ||P(0)||^2 - 2*phi, and by direct residual minimization.
The report assembles finite-difference diagnostics of the derivative
identities relating gamma', phi' and 1/h^{-1}(r).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LevelRangeError, PreconditionError
from .fixed_point import (
    G_BRACKET,
    H_BRACKET,
    fixed_point_grid,
    g_values,
    h_values,
    invert_monotone_batch,
)
from .functional import j_value_batch, residual_sq_batch
from .projector import Projector
from .sets import is_bounded

__all__ = [
    "GammaRow",
    "minimal_norm_point",
    "sphere_max_point",
    "sphere_min_point",
    "phi_value",
    "gamma_value",
    "gamma_direct",
    "gamma_profile_report",
    "continuity_scan",
    "level_set_samples",
]

MIN_ORIGIN_GAP = 1e-9
REL_MARGIN = 1e-3

_BISECT_TOL = 1e-10
_BISECT_WIDTH = 1e-13


@dataclass(frozen=True)
class GammaRow:
    """One r-level of the gamma profile with derivative diagnostics.

    gamma_fd and phi_fd are central differences; eigen_residual is
    ||P(v_r) - h_inv*v_r||; slope_neg_h_inv_residual is |gamma_fd + h_inv|
    and envelope_residual is |gamma_fd - (1 - h_inv)|, the two candidate
    slope identities reported side by side; second_diff is the raw central
    second difference of gamma at a dedicated wider step.
    """

    r: float
    gamma: float
    gamma_fd: float
    h_inv: float
    phi: float
    phi_fd: float
    eigen_residual: float
    slope_neg_h_inv_residual: float
    envelope_residual: float
    second_diff: float

    def __post_init__(self):
        if not self.r > 0.0:
            raise PreconditionError("gamma rows require r > 0")
        if self.gamma < -1e-9:
            raise PreconditionError("gamma must be nonnegative")


def _rng(seed, *tags):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(t) for t in tags]]))


def _origin_gap(proj: Projector):
    p0_sq = proj.p0_norm_sq
    if p0_sq <= MIN_ORIGIN_GAP:
        raise PreconditionError(
            "level-set analysis requires 0 outside the set (||P(0)||^2 > 1e-09)"
        )
    return p0_sq


def _check_interval(rs, lo, hi):
    rs = np.asarray(rs, dtype=np.float64).reshape(-1)
    bad = rs[(rs <= lo) | (rs >= hi)]
    if bad.size:
        raise LevelRangeError(f"levels {bad.tolist()} outside the open interval ({lo}, {hi})")
    return rs


def _widen_g_bracket(proj: Projector, rs, bracket):
    # g spans (-||P(0)||^2, ||P(0)||^2) only in the limit |lam| -> 1, so the
    # default bracket may not cover levels near the endpoints; move the ends
    # toward +-1 geometrically, with a gap floor keeping iteration counts sane
    lo, hi = float(bracket[0]), float(bracket[1])
    mn, mx = float(np.min(rs)), float(np.max(rs))
    for _ in range(8):
        if float(g_values(proj, [lo])[0]) <= mn or (1.0 + lo) <= 1e-5:
            break
        lo = -1.0 + 0.25 * (1.0 + lo)
    for _ in range(8):
        if float(g_values(proj, [hi])[0]) >= mx or (1.0 - hi) <= 1e-5:
            break
        hi = 1.0 - 0.25 * (1.0 - hi)
    return lo, hi


def _min_norm_batch(proj: Projector, rs, tol=_BISECT_TOL, bracket=G_BRACKET):
    lo, hi = _widen_g_bracket(proj, rs, bracket)
    lams = invert_monotone_batch(
        lambda ts: g_values(proj, ts), rs, lo, hi, tol,
        direction="increasing", width_tol=_BISECT_WIDTH,
    )
    points, _, _ = fixed_point_grid(proj, lams)
    return points


def minimal_norm_point(proj: Projector, r, tol=_BISECT_TOL, bracket=G_BRACKET):
    """The minimal-norm point of the level set {J = r}.

    Realized as the fixed point of lam*P at lam solving J(y(lam)) = r;
    admissible levels form the open interval (-||P(0)||^2, ||P(0)||^2)
    shrunk by a relative margin on both ends.
    """
    p0_sq = _origin_gap(proj)
    eps = REL_MARGIN * p0_sq
    rs = _check_interval([float(r)], -p0_sq + eps, p0_sq - eps)
    return _min_norm_batch(proj, rs, tol, bracket)[0]


def _sphere_max_batch(proj: Projector, rs, tol=_BISECT_TOL, bracket=H_BRACKET):
    # h spans (0, ||P(0)||^2) only in the limit lam -> 1+; same adaptive
    # lower-end treatment as the g bracket, with the same gap floor
    lo, hi = float(bracket[0]), float(bracket[1])
    mx = float(np.max(rs))
    for _ in range(8):
        if float(h_values(proj, [lo])[0]) >= mx or (lo - 1.0) <= 1e-5:
            break
        lo = 1.0 + 0.25 * (lo - 1.0)
    lams = invert_monotone_batch(
        lambda ts: h_values(proj, ts), rs, lo, hi, tol,
        direction="decreasing", width_tol=_BISECT_WIDTH,
    )
    points, _, _ = fixed_point_grid(proj, 1.0 / lams)
    return points, lams


def sphere_max_point(proj: Projector, r, tol=_BISECT_TOL, bracket=H_BRACKET):
    """The maximizer v_r of J on the sphere of squared norm r.

    Realized as the fixed point of mu*P with mu = 1/h^{-1}(r), which places
    it on S_r by the defining property of h.
    """
    p0_sq = _origin_gap(proj)
    eps = REL_MARGIN * p0_sq
    rs = _check_interval([float(r)], eps, p0_sq - eps)
    return _sphere_max_batch(proj, rs, tol, bracket)[0][0]


def phi_values(proj: Projector, rs, tol=_BISECT_TOL, bracket=H_BRACKET):
    p0_sq = _origin_gap(proj)
    eps = REL_MARGIN * p0_sq
    rs = _check_interval(rs, eps, p0_sq - eps)
    points, _ = _sphere_max_batch(proj, rs, tol, bracket)
    return j_value_batch(proj, points)


def phi_value(proj: Projector, r, tol=_BISECT_TOL, bracket=H_BRACKET):
    """phi(r) = sup of J over the sphere of squared norm r."""
    return float(phi_values(proj, [float(r)], tol, bracket)[0])


def gamma_values(proj: Projector, rs, tol=_BISECT_TOL, bracket=H_BRACKET):
    rs = np.asarray(rs, dtype=np.float64).reshape(-1)
    return rs + proj.p0_norm_sq - 2.0 * phi_values(proj, rs, tol, bracket)


def gamma_value(proj: Projector, r, tol=_BISECT_TOL, bracket=H_BRACKET):
    """gamma(r) = inf over S_r of ||x - P(x)||^2, via gamma = r + ||P(0)||^2 - 2*phi(r)."""
    return float(gamma_values(proj, [float(r)], tol, bracket)[0])


def _sphere_starts(proj: Projector, r, n_starts, seed):
    d = proj.dim
    root = np.sqrt(r)
    rows = [np.eye(d)[0] * root, -np.eye(d)[0] * root]
    p0n = float(np.linalg.norm(proj.p0))
    if p0n > 0.0:
        rows.append(proj.p0 * (root / p0n))
        rows.append(-proj.p0 * (root / p0n))
    rng = _rng(seed, 11)
    g = rng.normal(size=(int(n_starts), d))
    norms = np.sqrt(np.sum(g * g, axis=1))
    norms[norms == 0.0] = 1.0
    rows.append((root / norms)[:, None] * g)
    return np.vstack([np.atleast_2d(a) for a in rows])


def _sphere_objective(proj: Projector, X, r, mode):
    # shared projection evaluation: J and the residual differ by constants on S_r
    PX = proj.project_batch(X)
    res = np.einsum("ij,ij->i", X - PX, X - PX)
    if mode == "min_res":
        return res, 2.0 * (X - PX)
    vals = 0.5 * (r - res + proj.p0_norm_sq)
    return vals, PX


def _sphere_descend(proj: Projector, r, mode, n_starts, iters, seed):
    """Multi-start projected gradient descent on the sphere of squared norm r.

    mode 'min_j' minimizes J, mode 'min_res' minimizes the squared residual.
    In dimensions <= 2 an exhaustive sign/angle grid seeds the iteration.
    Returns (best point, best value).
    """
    if not r > 0.0:
        raise PreconditionError("sphere optimization requires r > 0")
    d = proj.dim
    root = np.sqrt(r)
    X = _sphere_starts(proj, r, n_starts, seed)
    if d == 1:
        X = np.array([[root], [-root]])
    elif d == 2:
        theta = np.arange(0.0, 2.0 * np.pi, 1e-4)
        grid = root * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        gvals, _ = _sphere_objective(proj, grid, r, mode)
        X = np.vstack([X, grid[int(np.argmin(gvals))][None, :]])
    vals, grad = _sphere_objective(proj, X, r, mode)
    step = np.full(X.shape[0], 0.1 * root)
    base = 0.1 * root
    for _ in range(int(iters)):
        radial = np.einsum("ij,ij->i", grad, X) / r
        tangent = grad - radial[:, None] * X
        tn_sq = np.einsum("ij,ij->i", tangent, tangent)
        Z = X - step[:, None] * tangent
        zn = np.sqrt(np.einsum("ij,ij->i", Z, Z))
        zn[zn == 0.0] = 1.0
        Y = (root / zn)[:, None] * Z
        new_vals, new_grad = _sphere_objective(proj, Y, r, mode)
        accept = new_vals <= vals - 1e-4 * step * tn_sq
        X = np.where(accept[:, None], Y, X)
        vals = np.where(accept, new_vals, vals)
        grad = np.where(accept[:, None], new_grad, grad)
        step = np.where(accept, np.minimum(step * 1.5, 10.0 * base), step * 0.5)
        if np.all(step < 1e-14 * base):
            break
    k = int(np.argmin(vals))
    return X[k], float(vals[k])


def sphere_min_point(proj: Projector, r, n_starts=32, seed=0, iters=500):
    """Best-effort global minimizer w_r of J on the sphere of squared norm r."""
    point, _ = _sphere_descend(proj, float(r), "min_j", n_starts, iters, seed)
    return point


def _residual_extremum(proj: Projector, r, mode, n_starts=32, seed=0, iters=500):
    """(point, value) extremizing the squared residual over S_r.

    mode 'min' minimizes it directly; mode 'max' minimizes J, which is
    equivalent to maximizing the residual at fixed r.
    """
    if mode == "min":
        return _sphere_descend(proj, float(r), "min_res", n_starts, iters, seed)
    point, _ = _sphere_descend(proj, float(r), "min_j", n_starts, iters, seed)
    return point, float(residual_sq_batch(proj, point[None, :])[0])


def gamma_direct(proj: Projector, r, n_starts=32, seed=0, iters=500):
    """gamma(r) by direct residual minimization; an independent cross-check."""
    return _residual_extremum(proj, r, "min", n_starts, seed, iters)[1]


def gamma_profile_report(proj: Projector, r_grid, tol=_BISECT_TOL, bracket=H_BRACKET):
    """GammaRow diagnostics over a grid of interior levels.

    Requires a bounded set: the sphere extrema underlying the report are
    attained minima/maxima only when the set is compact. Each row needs
    its full finite-difference stencil inside the admissible interval.
    """
    if not is_bounded(proj.set):
        raise PreconditionError("gamma profile requires a bounded set")
    p0_sq = _origin_gap(proj)
    eps = REL_MARGIN * p0_sq
    rs = np.asarray(r_grid, dtype=np.float64).reshape(-1)
    if rs.size == 0:
        return []
    h_fd = np.maximum(1e-5, 1e-4 * rs)
    h2 = np.maximum(1e-3, 1e-2 * rs)
    lo_needed = rs - h2
    hi_needed = rs + h2
    if np.any(lo_needed <= eps) or np.any(hi_needed >= p0_sq - eps):
        raise LevelRangeError(
            "an r with its stencil margin falls outside the admissible interval "
            f"({eps}, {p0_sq - eps})"
        )
    stencil = np.concatenate([rs - h2, rs - h_fd, rs, rs + h_fd, rs + h2])
    points, lams = _sphere_max_batch(proj, stencil, tol, bracket)
    phis = j_value_batch(proj, points).reshape(5, rs.size)
    gammas = stencil.reshape(5, rs.size) + p0_sq - 2.0 * phis
    centers = points.reshape(5, rs.size, proj.dim)[2]
    h_inv = lams.reshape(5, rs.size)[2]
    Pc = proj.project_batch(centers)
    eig_gap = Pc - h_inv[:, None] * centers
    eigen = np.sqrt(np.einsum("ij,ij->i", eig_gap, eig_gap))
    gamma_fd = (gammas[3] - gammas[1]) / (2.0 * h_fd)
    phi_fd = (phis[3] - phis[1]) / (2.0 * h_fd)
    second = gammas[4] - 2.0 * gammas[2] + gammas[0]
    rows = []
    for i in range(rs.size):
        rows.append(GammaRow(
            r=float(rs[i]),
            gamma=float(gammas[2][i]),
            gamma_fd=float(gamma_fd[i]),
            h_inv=float(h_inv[i]),
            phi=float(phis[2][i]),
            phi_fd=float(phi_fd[i]),
            eigen_residual=float(eigen[i]),
            slope_neg_h_inv_residual=float(abs(gamma_fd[i] + h_inv[i])),
            envelope_residual=float(abs(gamma_fd[i] - (1.0 - h_inv[i]))),
            second_diff=float(second[i]),
        ))
    return rows


def continuity_scan(proj: Projector, which, r_grid):
    """Max jump ||point(r_{i+1}) - point(r_i)|| along a fine level grid.

    which selects the minimal-norm point map (x_hat) or the sphere
    maximizer map (v_hat). Small values evidence continuity at the
    sampled pitch, which must not exceed 1e-3 * ||P(0)||^2.
    """
    if which not in ("x_hat", "v_hat"):
        raise PreconditionError("which must be 'x_hat' or 'v_hat'")
    p0_sq = _origin_gap(proj)
    eps = REL_MARGIN * p0_sq
    rs = np.asarray(r_grid, dtype=np.float64).reshape(-1)
    if rs.size < 2:
        return 0.0
    if not np.all(np.diff(rs) > 0.0):
        raise PreconditionError("r_grid must be strictly increasing")
    # 1e-9 relative slack absorbs grid-construction roundoff in the pitch
    if np.max(np.diff(rs)) > 1e-3 * p0_sq * (1.0 + 1e-9):
        raise PreconditionError("grid pitch must be <= 1e-3 * ||P(0)||^2")
    if which == "x_hat":
        rs = _check_interval(rs, -p0_sq + eps, p0_sq - eps)
        points = _min_norm_batch(proj, rs)
    else:
        rs = _check_interval(rs, eps, p0_sq - eps)
        points, _ = _sphere_max_batch(proj, rs)
    jumps = np.sqrt(np.sum(np.diff(points, axis=0) ** 2, axis=1))
    return float(np.max(jumps))


def level_set_samples(proj: Projector, r, n_dirs, seed, t_max=1e3, tol=1e-8):
    """Points of the level set {J = r} found by ray root-finding.

    Along each random unit direction d, brackets of J(t*d) - r on a
    geometric t-scan are bisected to roots. Directions without a sign
    change are discarded and counted. Returns (samples, n_discarded).
    """
    _origin_gap(proj)
    d = proj.dim
    rng = _rng(seed, 13)
    dirs = rng.normal(size=(int(n_dirs), d))
    norms = np.sqrt(np.sum(dirs * dirs, axis=1))
    norms[norms == 0.0] = 1.0
    dirs /= norms[:, None]
    ts = np.geomspace(1e-3, float(t_max), 121)
    flat = (dirs[:, None, :] * ts[None, :, None]).reshape(-1, d)
    vals = j_value_batch(proj, flat).reshape(len(dirs), ts.size) - float(r)
    prod = vals[:, :-1] * vals[:, 1:]
    cell = prod <= 0.0
    has = np.any(cell, axis=1)
    n_discarded = int(np.sum(~has))
    if not np.any(has):
        return np.zeros((0, d)), n_discarded
    first = np.argmax(cell[has], axis=1)
    kept = dirs[has]
    lo = ts[first]
    hi = ts[first + 1]
    flo = vals[has, first]
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        fm = j_value_batch(proj, kept * mid[:, None]) - float(r)
        if np.all(np.abs(fm) <= tol):
            break
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    mid = 0.5 * (lo + hi)
    samples = kept * mid[:, None]
    ok = np.abs(j_value_batch(proj, samples) - float(r)) <= max(tol, 1e-9)
    n_discarded += int(np.sum(~ok))
    return samples[ok], n_discarded
