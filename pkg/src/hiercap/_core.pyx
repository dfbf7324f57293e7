# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled capacity integrand kernel (hot loop of every quadrature call).

Same contract as hiercap._fallback.integrand_nats; selected automatically
by hiercap._backend when the extension built.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()


def integrand_nats(
    double[:, ::1] pts,
    cnp.int64_t[::1] subset_of,
    cnp.int64_t[::1] centers,
    double[:, ::1] offsets,
    double[::1] out,
):
    """Fill ``out`` with lse_all - lse_sub (nats) per evaluation row.

    ``pts`` are constellation points divided by sqrt(N0); row ``s`` is
    evaluated at ``pts[centers[s]] + offsets[s]``. Log-sum-exps use
    max-subtraction so high-SNR exponents never underflow the ratio.
    """
    cdef Py_ssize_t M = pts.shape[0]
    cdef Py_ssize_t n = centers.shape[0]
    cdef Py_ssize_t s, x, c
    cdef cnp.int64_t sub_c
    cdef double y0, y1, d0, d1, z, zmax_all, zmax_sub, sum_all, sum_sub
    cdef double[::1] zbuf = np.empty(M, dtype=np.float64)

    if offsets.shape[0] != n or out.shape[0] != n or subset_of.shape[0] != M:
        raise ValueError("inconsistent kernel argument shapes")

    with nogil:
        for s in range(n):
            c = centers[s]
            sub_c = subset_of[c]
            y0 = pts[c, 0] + offsets[s, 0]
            y1 = pts[c, 1] + offsets[s, 1]
            zmax_all = -1e308
            zmax_sub = -1e308
            for x in range(M):
                d0 = y0 - pts[x, 0]
                d1 = y1 - pts[x, 1]
                z = -(d0 * d0 + d1 * d1)
                zbuf[x] = z
                if z > zmax_all:
                    zmax_all = z
                if subset_of[x] == sub_c and z > zmax_sub:
                    zmax_sub = z
            sum_all = 0.0
            sum_sub = 0.0
            for x in range(M):
                sum_all += exp(zbuf[x] - zmax_all)
                if subset_of[x] == sub_c:
                    sum_sub += exp(zbuf[x] - zmax_sub)
            out[s] = (zmax_all + log(sum_all)) - (zmax_sub + log(sum_sub))
