# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled theta-average kernels; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    """
    #include <math.h>
    /* Inner theta sum over the distinct cosines; vectorizable with libmvec. */
    static void sp_theta_fields(const double *a, const double *b, Py_ssize_t n,
                                const double *c, const double *wt, Py_ssize_t nh,
                                double e, double *P, double *Fa, double *Fb)
    {
        for (Py_ssize_t i = 0; i < n; ++i) {
            double ai = a[i], bi = b[i];
            double s2 = ai * ai + bi * bi, ab2 = 2.0 * ai * bi;
            double sp = 0.0, s0 = 0.0, s1 = 0.0;
            if (s2 > 0.0) {
                #pragma omp simd reduction(+:sp,s0,s1)
                for (Py_ssize_t k = 0; k < nh; ++k) {
                    double x = fmax(s2 + ab2 * c[k], 1e-300);
                    double y = wt[k] * exp(e * log(x));
                    sp += x * y;
                    s0 += y;
                    s1 += y * c[k];
                }
            }
            P[i] = sp;
            Fa[i] = ai * s0 + bi * s1;
            Fb[i] = bi * s0 + ai * s1;
        }
    }
    """
    void sp_theta_fields(const double *a, const double *b, Py_ssize_t n,
                         const double *c, const double *wt, Py_ssize_t nh,
                         double e, double *P, double *Fa, double *Fb) nogil


def half_nodes(int m):
    k = np.arange(m // 2 + 1)
    c = np.cos(2.0 * np.pi * k / m)
    wt = np.full(k.shape, 2.0 / m)
    wt[0] = wt[-1] = 1.0 / m
    return c, wt


def theta_fields(a, b, double p, int m):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0]
    c_arr, w_arr = half_nodes(m)
    cdef double[::1] c = c_arr
    cdef double[::1] wt = w_arr
    P_arr = np.empty(n)
    Fa_arr = np.empty(n)
    Fb_arr = np.empty(n)
    cdef double[::1] P = P_arr
    cdef double[::1] Fa = Fa_arr
    cdef double[::1] Fb = Fb_arr
    if n == 0:
        return P_arr, Fa_arr, Fb_arr
    with nogil:
        sp_theta_fields(&av[0], &bv[0], n, &c[0], &wt[0], c.shape[0],
                        0.5 * (p - 1.0), &P[0], &Fa[0], &Fb[0])
    return P_arr, Fa_arr, Fb_arr


def theta_power(a, b, double p, int m):
    P, _, _ = theta_fields(a, b, p, m)
    return P
