"""Pure-numpy projection kernels (fallback backend).

Semantics contract shared with the compiled backend:

- project_batch projects rows of X onto the programmed set. Single-member
  programs use the exact closed form. Multi-member programs run the cyclic
  correction scheme until the per-row cycle increment (total iterate
  movement across the member steps of one cycle; zero certifies a fixed
  point of the scheme) falls below tol, the cycle budget runs out, or the
  increment stops improving for 100 cycles and a correction-free probe
  confirms the row is pinned between members (suspected empty
  intersection): 50 plain cyclic-projection sweeps from the plateaued
  iterate must end with a sweep path above tol and above 90% of the first
  sweep's path. A feasible plateau exits the probe at once (zero path,
  the scheme is just burning down correction terms for a distant input)
  and a plateau frozen by float rounding makes probe progress (no
  correction terms push back), so neither reads as a stall.
- fixed_point_batch iterates x <- lam * P(x) from 0 per row until the
  increment falls below tol * (1 - |lam|) / max(|lam|, 1e-6).

Row status codes: 1 converged, 0 budget exhausted, -1 stalled/diverged.
"""

import numpy as np

BACKEND_NAME = "python"

_DELTA = 1e-6
_STALL_WINDOW = 100
_PROBE_SWEEPS = 50


def _member_project(kinds, vec_a, vec_b, shift, scal_a, scal_b, j, W):
    """Project rows of W onto member j. Interior rows are returned bitwise."""
    kind = int(kinds[j])
    if kind == 0:  # halfspace
        n = vec_a[j]
        viol = W @ n - scal_a[j]
        t = np.maximum(viol, 0.0) / scal_b[j]
        return W - t[:, None] * n
    if kind == 1:  # hyperplane
        n = vec_a[j]
        t = (W @ n - scal_a[j]) / scal_b[j]
        return W - t[:, None] * n
    if kind == 2:  # box
        return np.minimum(np.maximum(W, vec_a[j]), vec_b[j])
    if kind == 3:  # ball
        c = vec_a[j]
        D = W - c
        dist = np.sqrt(np.sum(D * D, axis=1))
        outside = dist > scal_a[j]
        safe = np.where(outside, dist, 1.0)
        scaled = c + (scal_a[j] / safe)[:, None] * D
        return np.where(outside[:, None], scaled, W)
    if kind == 4:  # simplex, sort-and-threshold
        Z = W - shift[j]
        U = -np.sort(-Z, axis=1)
        css = np.cumsum(U, axis=1) - scal_a[j]
        d = Z.shape[1]
        idx = np.arange(1, d + 1, dtype=np.float64)
        cond = U > css / idx
        # first column is always true for positive scale, so rho is defined
        rho = d - 1 - np.argmax(cond[:, ::-1], axis=1)
        theta = css[np.arange(Z.shape[0]), rho] / (rho + 1.0)
        return np.maximum(Z - theta[:, None], 0.0) + shift[j]
    raise ValueError(f"unknown kind code {kind}")


def _sweep_stalled(kinds, vec_a, vec_b, shift, scal_a, scal_b, tol, Z):
    """Probe plateaued rows with plain cyclic projections (no corrections).

    Returns True per row when the sweep path neither falls below tol nor
    shrinks under 90% of its first value within the sweep budget. Rows of
    a nonempty intersection keep contracting toward it; only a gap pair
    bounces in place.
    """
    m = kinds.shape[0]
    z = Z.copy()
    first = None
    path = None
    for _ in range(_PROBE_SWEEPS):
        path = np.zeros(z.shape[0])
        for j in range(m):
            y = _member_project(kinds, vec_a, vec_b, shift, scal_a, scal_b, j, z)
            path += np.sqrt(np.sum((y - z) ** 2, axis=1))
            z = y
        if first is None:
            first = path.copy()
        if np.all(path <= tol):
            break
    return (path > tol) & (path > 0.9 * first)


def project_batch(kinds, vec_a, vec_b, shift, scal_a, scal_b, max_iter, tol, X):
    """Project each row of X; returns (Y, iters, last_increment, status)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    m = kinds.shape[0]
    iters = np.zeros(n, dtype=np.int64)
    inc = np.zeros(n, dtype=np.float64)
    status = np.ones(n, dtype=np.int8)
    if n == 0:
        return X.copy(), iters, inc, status
    if m == 1:
        Y = _member_project(kinds, vec_a, vec_b, shift, scal_a, scal_b, 0, X)
        iters[:] = 1
        return Y, iters, inc, status

    x = X.copy()
    corr = np.zeros((m, n, X.shape[1]))
    status[:] = 0
    best = np.full(n, np.inf)
    since_best = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xs = x[idx]
        step = np.zeros(idx.size)
        for j in range(m):
            w = xs + corr[j, idx]
            y = _member_project(kinds, vec_a, vec_b, shift, scal_a, scal_b, j, w)
            corr[j, idx] = w - y
            step += np.sqrt(np.sum((y - xs) ** 2, axis=1))
            xs = y
        x[idx] = xs
        iters[idx] += 1
        inc[idx] = step
        done = step <= tol
        improved = step < best[idx]
        best[idx] = np.where(improved, step, best[idx])
        since_best[idx] = np.where(improved, 0, since_best[idx] + 1)
        status[idx[done]] = 1
        active[idx[done]] = False
        plateau = (~done) & (since_best[idx] >= _STALL_WINDOW)
        if np.any(plateau):
            rows = idx[plateau]
            stalled = _sweep_stalled(kinds, vec_a, vec_b, shift, scal_a, scal_b,
                                     tol, x[rows])
            status[rows[stalled]] = -1
            active[rows[stalled]] = False
            since_best[rows[~stalled]] = 0
    return x, iters, inc, status


def fixed_point_batch(kinds, vec_a, vec_b, shift, scal_a, scal_b,
                      proj_max_iter, proj_tol, lams, tol, max_iter):
    """Iterate x <- lam * P(x) from 0 per row of lams.

    Returns (Y, iters, last_increment, status); status -1 marks rows whose
    inner projection failed.
    """
    lams = np.ascontiguousarray(lams, dtype=np.float64)
    k = lams.shape[0]
    d = vec_a.shape[1]
    Y = np.zeros((k, d))
    iters = np.zeros(k, dtype=np.int64)
    inc = np.zeros(k, dtype=np.float64)
    status = np.zeros(k, dtype=np.int8)
    if k == 0:
        return Y, iters, inc, status
    thr = tol * (1.0 - np.abs(lams)) / np.maximum(np.abs(lams), _DELTA)
    active = np.ones(k, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        P, _, _, pstat = project_batch(
            kinds, vec_a, vec_b, shift, scal_a, scal_b, proj_max_iter, proj_tol, Y[idx]
        )
        bad = pstat != 1
        Xn = lams[idx, None] * P
        step = np.sqrt(np.sum((Xn - Y[idx]) ** 2, axis=1))
        Y[idx] = Xn
        iters[idx] += 1
        inc[idx] = step
        done = step <= thr[idx]
        status[idx[done]] = 1
        status[idx[bad]] = -1
        active[idx[done | bad]] = False
    return Y, iters, inc, status
