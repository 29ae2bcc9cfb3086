# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled projection kernels.

Mirrors the semantics contract documented in the pure backend: exact
closed forms for single-member programs, cyclic correction scheme with
per-row stopping and stall detection for intersections, and the
contraction iteration x <- lam * P(x) with the relative stopping rule.
Row status codes: 1 converged, 0 budget exhausted, -1 stalled/diverged.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double DELTA = 1e-6
cdef int STALL_WINDOW = 100
cdef int PROBE_SWEEPS = 50


cdef inline void member_project_row(
    int kind,
    double[:, ::1] vec_a, double[:, ::1] vec_b, double[:, ::1] shift,
    double[::1] scal_a, double[::1] scal_b,
    Py_ssize_t j, double* w, double* out, double* srt, double* zbuf,
    Py_ssize_t d,
) noexcept nogil:
    cdef Py_ssize_t i, k, rho
    cdef double viol, t, dist, a, theta, cum, z, key
    if kind == 0:  # halfspace
        viol = -scal_a[j]
        for i in range(d):
            viol += vec_a[j, i] * w[i]
        if viol > 0.0:
            t = viol / scal_b[j]
            for i in range(d):
                out[i] = w[i] - t * vec_a[j, i]
        else:
            for i in range(d):
                out[i] = w[i]
    elif kind == 1:  # hyperplane
        viol = -scal_a[j]
        for i in range(d):
            viol += vec_a[j, i] * w[i]
        t = viol / scal_b[j]
        for i in range(d):
            out[i] = w[i] - t * vec_a[j, i]
    elif kind == 2:  # box
        for i in range(d):
            z = w[i]
            if z < vec_a[j, i]:
                z = vec_a[j, i]
            if z > vec_b[j, i]:
                z = vec_b[j, i]
            out[i] = z
    elif kind == 3:  # ball
        dist = 0.0
        for i in range(d):
            z = w[i] - vec_a[j, i]
            zbuf[i] = z
            dist += z * z
        dist = sqrt(dist)
        if dist > scal_a[j]:
            t = scal_a[j] / dist
            for i in range(d):
                out[i] = vec_a[j, i] + t * zbuf[i]
        else:
            for i in range(d):
                out[i] = w[i]
    else:  # simplex, sort-and-threshold
        a = scal_a[j]
        for i in range(d):
            z = w[i] - shift[j, i]
            zbuf[i] = z
            srt[i] = z
        # insertion sort descending
        for i in range(1, d):
            key = srt[i]
            k = i
            while k > 0 and srt[k - 1] < key:
                srt[k] = srt[k - 1]
                k -= 1
            srt[k] = key
        cum = 0.0
        theta = 0.0
        rho = -1
        for i in range(d):
            cum += srt[i]
            if srt[i] > (cum - a) / (i + 1):
                rho = i
                theta = (cum - a) / (i + 1)
        for i in range(d):
            z = zbuf[i] - theta
            if z < 0.0:
                z = 0.0
            out[i] = z + shift[j, i]


cdef inline int project_row(
    int[::1] kinds,
    double[:, ::1] vec_a, double[:, ::1] vec_b, double[:, ::1] shift,
    double[::1] scal_a, double[::1] scal_b,
    int max_iter, double tol,
    double* x, double* out,
    double* w, double* y, double* corr, double* srt, double* zbuf,
    double* prb,
    Py_ssize_t d, long* iters_out, double* inc_out,
) noexcept nogil:
    cdef Py_ssize_t m = kinds.shape[0]
    cdef Py_ssize_t i, j
    cdef int it, s
    cdef double step, diff, best, move, first, path
    cdef long since
    if m == 1:
        member_project_row(kinds[0], vec_a, vec_b, shift, scal_a, scal_b,
                           0, x, out, srt, zbuf, d)
        iters_out[0] = 1
        inc_out[0] = 0.0
        return 1
    for i in range(d):
        out[i] = x[i]
    for i in range(m * d):
        corr[i] = 0.0
    best = -1.0
    since = 0
    for it in range(max_iter):
        step = 0.0
        for j in range(m):
            for i in range(d):
                w[i] = out[i] + corr[j * d + i]
            member_project_row(kinds[j], vec_a, vec_b, shift, scal_a, scal_b,
                               j, w, y, srt, zbuf, d)
            move = 0.0
            for i in range(d):
                corr[j * d + i] = w[i] - y[i]
                diff = y[i] - out[i]
                move += diff * diff
                out[i] = y[i]
            step += sqrt(move)
        iters_out[0] = it + 1
        inc_out[0] = step
        if step <= tol:
            return 1
        if best < 0.0 or step < best:
            best = step
            since = 0
        else:
            since += 1
            if since >= STALL_WINDOW:
                # Probe the plateau with plain cyclic sweeps (no correction
                # terms). A gap pair bounces at constant path; a feasible
                # plateau has zero path and a rounding-frozen one contracts,
                # so only the bounce reads as a stall.
                for i in range(d):
                    prb[i] = out[i]
                first = -1.0
                path = 0.0
                for s in range(PROBE_SWEEPS):
                    path = 0.0
                    for j in range(m):
                        for i in range(d):
                            w[i] = prb[i]
                        member_project_row(kinds[j], vec_a, vec_b, shift,
                                           scal_a, scal_b, j, w, y, srt, zbuf, d)
                        move = 0.0
                        for i in range(d):
                            diff = y[i] - prb[i]
                            move += diff * diff
                            prb[i] = y[i]
                        path += sqrt(move)
                    if first < 0.0:
                        first = path
                    if path <= tol:
                        break
                if path > tol and path > 0.9 * first:
                    return -1
                since = 0
    return 0


def project_batch(int[::1] kinds,
                  double[:, ::1] vec_a, double[:, ::1] vec_b, double[:, ::1] shift,
                  double[::1] scal_a, double[::1] scal_b,
                  int max_iter, double tol, X):
    """Project each row of X; returns (Y, iters, last_increment, status)."""
    X_arr = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] Xv = X_arr
    cdef Py_ssize_t n = Xv.shape[0]
    cdef Py_ssize_t d = Xv.shape[1]
    cdef Py_ssize_t m = kinds.shape[0]
    Y_arr = np.empty((n, d), dtype=np.float64)
    iters_arr = np.zeros(n, dtype=np.int64)
    inc_arr = np.zeros(n, dtype=np.float64)
    status_arr = np.ones(n, dtype=np.int8)
    cdef double[:, ::1] Yv = Y_arr
    cdef long[::1] itv = iters_arr
    cdef double[::1] incv = inc_arr
    cdef signed char[::1] stv = status_arr
    scratch = np.empty(5 * d, dtype=np.float64)
    cdef double[::1] sc = scratch
    cdef double* w = &sc[0]
    cdef double* y = &sc[d]
    cdef double* srt = &sc[2 * d]
    cdef double* zbuf = &sc[3 * d]
    cdef double* prb = &sc[4 * d]
    corr = np.empty(m * d, dtype=np.float64)
    cdef double[::1] corrv = corr
    cdef Py_ssize_t row
    cdef long it_row
    cdef double inc_row
    cdef int st
    if n == 0:
        return Y_arr, iters_arr, inc_arr, status_arr
    with nogil:
        for row in range(n):
            st = project_row(kinds, vec_a, vec_b, shift, scal_a, scal_b,
                             max_iter, tol,
                             &Xv[row, 0], &Yv[row, 0],
                             w, y, &corrv[0], srt, zbuf, prb,
                             d, &it_row, &inc_row)
            itv[row] = it_row
            incv[row] = inc_row
            stv[row] = st
    return Y_arr, iters_arr, inc_arr, status_arr


def fixed_point_batch(int[::1] kinds,
                      double[:, ::1] vec_a, double[:, ::1] vec_b, double[:, ::1] shift,
                      double[::1] scal_a, double[::1] scal_b,
                      int proj_max_iter, double proj_tol,
                      lams, double tol, long max_iter):
    """Iterate x <- lam * P(x) from 0 per row of lams.

    Returns (Y, iters, last_increment, status); status -1 marks rows whose
    inner projection failed.
    """
    lam_arr = np.ascontiguousarray(lams, dtype=np.float64)
    cdef double[::1] lamv = lam_arr
    cdef Py_ssize_t k = lamv.shape[0]
    cdef Py_ssize_t d = vec_a.shape[1]
    cdef Py_ssize_t m = kinds.shape[0]
    Y_arr = np.zeros((k, d), dtype=np.float64)
    iters_arr = np.zeros(k, dtype=np.int64)
    inc_arr = np.zeros(k, dtype=np.float64)
    status_arr = np.zeros(k, dtype=np.int8)
    cdef double[:, ::1] Yv = Y_arr
    cdef long[::1] itv = iters_arr
    cdef double[::1] incv = inc_arr
    cdef signed char[::1] stv = status_arr
    scratch = np.empty(6 * d, dtype=np.float64)
    cdef double[::1] sc = scratch
    cdef double* w = &sc[0]
    cdef double* y = &sc[d]
    cdef double* srt = &sc[2 * d]
    cdef double* zbuf = &sc[3 * d]
    cdef double* p = &sc[4 * d]
    cdef double* prb = &sc[5 * d]
    corr = np.empty(m * d, dtype=np.float64)
    cdef double[::1] corrv = corr
    cdef Py_ssize_t row, i
    cdef long it, pit
    cdef double lam, thr, step, diff, absl, pinc, xi
    cdef int pst
    if k == 0:
        return Y_arr, iters_arr, inc_arr, status_arr
    with nogil:
        for row in range(k):
            lam = lamv[row]
            absl = fabs(lam)
            thr = tol * (1.0 - absl) / (absl if absl > DELTA else DELTA)
            for it in range(max_iter):
                pst = project_row(kinds, vec_a, vec_b, shift, scal_a, scal_b,
                                  proj_max_iter, proj_tol,
                                  &Yv[row, 0], p,
                                  w, y, &corrv[0], srt, zbuf, prb,
                                  d, &pit, &pinc)
                step = 0.0
                for i in range(d):
                    xi = lam * p[i]
                    diff = xi - Yv[row, i]
                    step += diff * diff
                    Yv[row, i] = xi
                step = sqrt(step)
                itv[row] = it + 1
                incv[row] = step
                if pst != 1:
                    stv[row] = -1
                    break
                if step <= thr:
                    stv[row] = 1
                    break
    return Y_arr, iters_arr, inc_arr, status_arr
