# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) kernel for the logit-coordinate field.

Same interface and arithmetic as ``_kernels_py``; the step loop runs
without the GIL so seed campaigns can use threads.
"""

from libc.math cimport exp, fabs, pow, sqrt
from libc.stdlib cimport malloc, free

NAME = "cython"

cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561
cdef double A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247
cdef double A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192
cdef double B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920
cdef double E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double SAFETY = 0.9, FAC_MIN = 0.2, FAC_MAX = 10.0
cdef double BETA = 0.04
cdef double ALPHA = 0.2 - 0.75 * 0.04

REACHED_END, CHUNK_FULL, UNDERFLOW = 0, 1, 2


cdef inline double _sigmoid(double y) nogil:
    cdef double e
    if y >= 0:
        return 1.0 / (1.0 + exp(-y))
    e = exp(y)
    return e / (1.0 + e)


cdef void _field(const double[::1] c, const double[:, ::1] a, double* y,
                 double* s, double* out, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double acc
    for j in range(n):
        s[j] = _sigmoid(y[j])
    for i in range(n):
        acc = c[i]
        for j in range(n):
            acc = acc + a[i, j] * s[j]
        out[i] = acc


def dopri_run(const double[::1] c, const double[:, ::1] a, const double[::1] y0,
              double t0, double t_end, double h, double err_old,
              double rtol, double atol, double hmin,
              double[::1] out_t, double[:, ::1] out_y, double[:, ::1] out_f):
    """Advance from ``(t0, y0)`` until ``t_end``, a full buffer or underflow.

    Returns ``(count, t, h, err_old, accepted, rejected, status)``.
    """
    cdef Py_ssize_t n = y0.shape[0], cap = out_t.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef long accepted = 0, rejected = 0
    cdef int status = 0
    cdef bint last_rejected = False
    cdef double t = t0, step, err, acc, e, sc, fac, ya, yb
    cdef double* buf = <double*> malloc(11 * n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* y = buf
    cdef double* yt = buf + n
    cdef double* yn = buf + 2 * n
    cdef double* k1 = buf + 3 * n
    cdef double* k2 = buf + 4 * n
    cdef double* k3 = buf + 5 * n
    cdef double* k4 = buf + 6 * n
    cdef double* k5 = buf + 7 * n
    cdef double* k6 = buf + 8 * n
    cdef double* k7 = buf + 9 * n
    cdef double* s = buf + 10 * n
    try:
        with nogil:
            for i in range(n):
                y[i] = y0[i]
            _field(c, a, y, s, k1, n)
            while t < t_end:
                if count >= cap:
                    status = 1
                    break
                if h < hmin:
                    status = 2
                    break
                step = h if h < t_end - t else t_end - t
                for i in range(n):
                    yt[i] = y[i] + step * A21 * k1[i]
                _field(c, a, yt, s, k2, n)
                for i in range(n):
                    yt[i] = y[i] + step * (A31 * k1[i] + A32 * k2[i])
                _field(c, a, yt, s, k3, n)
                for i in range(n):
                    yt[i] = y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                _field(c, a, yt, s, k4, n)
                for i in range(n):
                    yt[i] = y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                           + A54 * k4[i])
                _field(c, a, yt, s, k5, n)
                for i in range(n):
                    yt[i] = y[i] + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                           + A64 * k4[i] + A65 * k5[i])
                _field(c, a, yt, s, k6, n)
                for i in range(n):
                    yn[i] = y[i] + step * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                           + B5 * k5[i] + B6 * k6[i])
                _field(c, a, yn, s, k7, n)
                acc = 0.0
                for i in range(n):
                    e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                                + E6 * k6[i] + E7 * k7[i])
                    ya = fabs(y[i])
                    yb = fabs(yn[i])
                    sc = atol + rtol * (ya if ya > yb else yb)
                    acc = acc + (e / sc) * (e / sc)
                err = sqrt(acc / n)
                if err <= 1.0:
                    if err < 1e-10:
                        err = 1e-10
                    fac = SAFETY * pow(err, -ALPHA) * pow(err_old, BETA)
                    if fac > FAC_MAX:
                        fac = FAC_MAX
                    if fac < FAC_MIN:
                        fac = FAC_MIN
                    if last_rejected and fac > 1.0:
                        fac = 1.0
                    t = t + step
                    out_t[count] = t
                    for i in range(n):
                        y[i] = yn[i]
                        k1[i] = k7[i]
                        out_y[count, i] = y[i]
                        out_f[count, i] = k1[i]
                    count += 1
                    accepted += 1
                    err_old = err
                    last_rejected = False
                    h = step * fac
                else:
                    rejected += 1
                    last_rejected = True
                    fac = SAFETY * pow(err, -ALPHA)
                    h = step * (fac if fac > FAC_MIN else FAC_MIN)
    finally:
        free(buf)
    return count, t, h, err_old, accepted, rejected, status
