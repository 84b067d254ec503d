# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loop for the annealed mean-field descent solver.

One call runs the whole temperature schedule for a single replica: the
forward-point extrapolation, the BLAS mean-field matvec, the entropy-scaled
descent update with the boundary rule, and the box clamp, all without
touching Python. The GIL is released for the duration, so replicas can run
on a thread pool.
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dgemv

cnp.import_array()


def descend(
    double[:, ::1] q,
    double[::1] h,
    x_curr,
    x_prev,
    double[::1] temps,
    double eta,
    double zeta,
):
    """Advance (x_curr, x_prev) through one descent step per temperature.

    ``q`` must be symmetric with zero diagonal (the BLAS call exploits the
    symmetry to skip a transpose). Returns the pair (x, x_prev) after the
    final step so a caller can resume the loop; inputs are not modified.
    """
    cdef cnp.ndarray[double, ndim=1] x_arr = np.array(x_curr, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] xp_arr = np.array(x_prev, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] fwd_arr = np.empty_like(x_arr)
    cdef cnp.ndarray[double, ndim=1] phi_arr = np.empty_like(x_arr)

    cdef double[::1] x = x_arr
    cdef double[::1] xp = xp_arr
    cdef double[::1] fwd = fwd_arr
    cdef double[::1] phi = phi_arr

    cdef int n = q.shape[0]
    cdef int n_step = temps.shape[0]
    if x.shape[0] != n or xp.shape[0] != n:
        raise ValueError("state vectors must match the model dimension")

    cdef int inc = 1
    cdef double one = 1.0
    cdef char trans = b'N'  # row-major symmetric q: Fortran sees q^T == q
    cdef Py_ssize_t t, i
    cdef double temp, xi, xn

    with nogil:
        for t in range(n_step):
            temp = temps[t]
            for i in range(n):
                fwd[i] = x[i] + zeta * (x[i] - xp[i])
            memcpy(&phi[0], &h[0], n * sizeof(double))
            dgemv(&trans, &n, &n, &one, &q[0, 0], &n, &fwd[0], &inc, &one,
                  &phi[0], &inc)
            for i in range(n):
                xi = x[i]
                xn = 2.0 * xi - xp[i] - eta * temp * (xi - 0.5)
                if 0.0 < xi < 1.0:
                    xn = xn - eta * phi[i]
                if xn >= 1.0:
                    xn = 1.0
                elif xn <= 0.0:
                    xn = 0.0
                xp[i] = xi
                x[i] = xn
    return x_arr, xp_arr
