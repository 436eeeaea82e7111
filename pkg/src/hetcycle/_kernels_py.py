"""Pure-Python Dormand-Prince 5(4) kernel for the logit-coordinate field.

Mirrors ``_kernels.pyx`` call for call; used when the extension is missing
or ``HETCYCLE_PURE`` is set.  The field is ``dy/dt = c + A sigma(y)`` with
``sigma`` the logistic function.
"""

import math

NAME = "python"

# Dormand-Prince tableau.
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)

SAFETY, FAC_MIN, FAC_MAX = 0.9, 0.2, 10.0
BETA = 0.04
ALPHA = 0.2 - 0.75 * BETA

REACHED_END, CHUNK_FULL, UNDERFLOW = 0, 1, 2


def sigmoid(y):
    if y >= 0:
        return 1.0 / (1.0 + math.exp(-y))
    e = math.exp(y)
    return e / (1.0 + e)


def field(c, a, y):
    n = len(y)
    s = [sigmoid(v) for v in y]
    out = []
    for i in range(n):
        # Same accumulation order as the compiled kernel, so results match bitwise.
        acc = c[i]
        for j in range(n):
            acc = acc + a[i][j] * s[j]
        out.append(acc)
    return out


def dopri_run(c, a, y0, t0, t_end, h, err_old, rtol, atol, hmin,
              out_t, out_y, out_f):
    """Advance from ``(t0, y0)`` until ``t_end``, a full buffer or underflow.

    Accepted step ends are written to ``out_t``, ``out_y``, ``out_f``.
    Returns ``(count, t, h, err_old, accepted, rejected, status)``.
    """
    n = len(y0)
    c = [float(v) for v in c]
    a = [[float(v) for v in row] for row in a]
    y = [float(v) for v in y0]
    t = float(t0)
    cap = len(out_t)
    k1 = field(c, a, y)
    count = accepted = rejected = 0
    last_rejected = False
    status = REACHED_END
    while t < t_end:
        if count >= cap:
            status = CHUNK_FULL
            break
        if h < hmin:
            status = UNDERFLOW
            break
        step = min(h, t_end - t)
        r = range(n)
        k2 = field(c, a, [y[i] + step * A21 * k1[i] for i in r])
        k3 = field(c, a, [y[i] + step * (A31 * k1[i] + A32 * k2[i]) for i in r])
        k4 = field(c, a, [y[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in r])
        k5 = field(c, a, [y[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                         + A54 * k4[i]) for i in r])
        k6 = field(c, a, [y[i] + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                         + A64 * k4[i] + A65 * k5[i]) for i in r])
        yn = [y[i] + step * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i]
                             + B6 * k6[i]) for i in r]
        k7 = field(c, a, yn)
        acc = 0.0
        for i in r:
            e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                        + E6 * k6[i] + E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            acc += (e / sc) * (e / sc)
        err = math.sqrt(acc / n)
        if err <= 1.0:
            err = max(err, 1e-10)
            fac = SAFETY * err ** -ALPHA * err_old ** BETA
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            if last_rejected:
                fac = min(fac, 1.0)
            t = t + step
            y, k1 = yn, k7
            out_t[count] = t
            for i in r:
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
            h = step * max(FAC_MIN, SAFETY * err ** -ALPHA)
    return count, t, h, err_old, accepted, rejected, status
