"""Compiled scalar kernels shared by the landscape and the integrator.

Parameters travel as a float64 array in the order of ``PARAM_ORDER`` so the
same compiled code serves single evaluations and the inner simulation loop.
"""

import math

import numpy as np
from numba import njit

PARAM_ORDER = ("x1", "x2", "x0", "f0", "y_b", "y_f", "L_d", "y_d")
X1, X2, X0, F0, YB, YF, LD, YD = range(8)


@njit(cache=True)
def branch_terms(p, x, y):
    """Return (g, g', g'', f, f', f'') for the branch that owns ``x``."""
    xi = p[X1] if x >= 0.0 else p[X2]
    yb = p[YB]
    yf = p[YF]
    u = y + yb
    g = 2.0 * xi * y / u
    dg = 2.0 * xi * yb / (u * u)
    d2g = -4.0 * xi * yb / (u * u * u)
    c = p[F0] * (xi / p[X0]) ** 2
    r = (y + yf) / u
    dr = (yb - yf) / (u * u)
    d2r = -2.0 * (yb - yf) / (u * u * u)
    f = c * r * r
    df = 2.0 * c * r * dr
    d2f = 2.0 * c * (dr * dr + r * d2r)
    return g, dg, d2g, f, df, d2f


@njit(cache=True)
def drift_offset(p, y):
    return p[LD] * math.exp(-y / p[YD]) + p[X0] * p[X0] / p[F0]


@njit(cache=True)
def loss(p, x, y):
    g, _, _, f, _, _ = branch_terms(p, x, y)
    if x >= 0.0:
        q = x * (x - g)
    else:
        q = x * (x + g)
    return drift_offset(p, y) + q / f


@njit(cache=True)
def gradient(p, x, y):
    g, dg, _, f, df, _ = branch_terms(p, x, y)
    # sign flips g for the sharp branch: q = x^2 - s*x*g
    s = 1.0 if x >= 0.0 else -1.0
    q = x * x - s * x * g
    qx = 2.0 * x - s * g
    qy = -s * x * dg
    dl0 = -(p[LD] / p[YD]) * math.exp(-y / p[YD])
    return qx / f, dl0 + qy / f - q * df / (f * f)


@njit(cache=True)
def hessian(p, x, y):
    g, dg, d2g, f, df, d2f = branch_terms(p, x, y)
    s = 1.0 if x >= 0.0 else -1.0
    q = x * x - s * x * g
    qx = 2.0 * x - s * g
    qy = -s * x * dg
    qxy = -s * dg
    qyy = -s * x * d2g
    d2l0 = (p[LD] / (p[YD] * p[YD])) * math.exp(-y / p[YD])
    hxx = 2.0 / f
    hxy = qxy / f - qx * df / (f * f)
    hyy = (d2l0 + qyy / f - 2.0 * qy * df / (f * f)
           - q * d2f / (f * f) + 2.0 * q * df * df / (f * f * f))
    return hxx, hxy, hyy


@njit(cache=True)
def psd_sqrt(a, b, c):
    """Principal square root of the PSD part of [[a, b], [b, c]].

    Negative eigenvalues are clamped to zero before the root is taken.
    """
    half_tr = 0.5 * (a + c)
    half_diff = 0.5 * (a - c)
    rad = math.sqrt(half_diff * half_diff + b * b)
    lam1 = half_tr + rad
    lam2 = half_tr - rad
    s1 = math.sqrt(lam1) if lam1 > 0.0 else 0.0
    s2 = math.sqrt(lam2) if lam2 > 0.0 else 0.0
    if rad == 0.0:
        return s1, 0.0, s1
    # unit eigenvector of lam1, chosen from the better-conditioned column
    if half_diff >= 0.0:
        vx = half_diff + rad
        vy = b
    else:
        vx = b
        vy = rad - half_diff
    nrm = math.sqrt(vx * vx + vy * vy)
    vx /= nrm
    vy /= nrm
    # S = s1 v v^T + s2 (I - v v^T)
    d = s1 - s2
    return s2 + d * vx * vx, d * vx * vy, s2 + d * vy * vy


@njit(cache=True, nogil=True)
def integrate(p, eta, sigma, clamp_y, diverge_x, x, y, t0, normals,
              stride, rec, n_rec, switches, n_sw, last_sw):
    """Advance one trajectory through ``len(normals)`` steps.

    ``rec`` receives (t, x, y, loss) rows every ``stride`` steps while room
    remains; ``switches`` receives sign-change iterations while room remains.
    Counters are returned so callers can keep streaming chunks.
    Returns (x, y, t, n_rec, n_sw, last_sw, diverged).
    """
    n = normals.shape[0]
    two_sigma = 2.0 * sigma
    noisy = sigma > 0.0
    t = t0
    for i in range(n):
        gx, gy = gradient(p, x, y)
        xi_x = 0.0
        xi_y = 0.0
        if noisy:
            hxx, hxy, hyy = hessian(p, x, y)
            sa, sb, sc = psd_sqrt(two_sigma * hxx, two_sigma * hxy,
                                  two_sigma * hyy)
            z0 = normals[i, 0]
            z1 = normals[i, 1]
            xi_x = sa * z0 + sb * z1
            xi_y = sb * z0 + sc * z1
        xn = x - eta * (gx + xi_x)
        yn = y
        if not clamp_y:
            yn = abs(y - eta * (gy + xi_y))
        t += 1
        was_flat = x >= 0.0
        x = xn
        y = yn
        val = loss(p, x, y)
        if not math.isfinite(val) or not math.isfinite(x) or abs(x) > diverge_x:
            return x, y, t, n_rec, n_sw, last_sw, True
        if (x >= 0.0) != was_flat:
            if n_sw < switches.shape[0]:
                switches[n_sw] = t
            n_sw += 1
            last_sw = t
        if stride > 0 and t % stride == 0 and n_rec < rec.shape[0]:
            rec[n_rec, 0] = t
            rec[n_rec, 1] = x
            rec[n_rec, 2] = y
            rec[n_rec, 3] = val
            n_rec += 1
    return x, y, t, n_rec, n_sw, last_sw, False


def pack(params):
    return np.array([getattr(params, k) for k in PARAM_ORDER], dtype=np.float64)
