"""JIT-compiled hot loops.

Every function here has a twin with the same signature in ``numpy_impl``.
Parallel loops never share accumulators, so results do not depend on the
thread count.
"""
import math

import numpy as np
from numba import njit, prange

_BIG = 1.0e250
_SMALL = 1.0e-250
_SERIES_MAX = 1.0
_IVE_ASYMPTOTIC_MIN = 1000.0


@njit(cache=True)
def _jn_series(n, x):
    half = 0.5 * x
    term = math.exp(n * math.log(half) - math.lgamma(n + 1.0))
    total = term
    q = half * half
    for k in range(1, 60):
        term *= -q / (k * (k + n))
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


@njit(cache=True)
def _jn_scalar(n, x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _SERIES_MAX:
        return _jn_series(n, x)
    top = max(float(n), x)
    m = 2 * ((int(top) + 20 + int(math.sqrt(60.0 * top))) // 2)
    bjp = 0.0
    bj = 1.0
    ans = 0.0
    total = 0.0
    for k in range(m, 0, -1):
        bjm = (2.0 * k / x) * bj - bjp
        bjp = bj
        bj = bjm
        if abs(bj) > _BIG:
            bj *= _SMALL
            bjp *= _SMALL
            ans *= _SMALL
            total *= _SMALL
        j = k - 1
        if j == n:
            ans = bj
        if j >= 2 and j % 2 == 0:
            total += 2.0 * bj
    total += bj
    return ans / total


@njit(parallel=True, cache=True)
def bessel_j_array(n, x):
    out = np.empty(x.shape[0])
    for i in prange(x.shape[0]):
        out[i] = _jn_scalar(n, x[i])
    return out


@njit(cache=True)
def _in_series(n, x):
    half = 0.5 * x
    term = math.exp(n * math.log(half) - math.lgamma(n + 1.0))
    total = term
    q = half * half
    for k in range(1, 60):
        term *= q / (k * (k + n))
        total += term
        if term < 1e-17 * total:
            break
    return total


@njit(cache=True)
def _ive_asymptotic(n, x):
    mu = 4.0 * n * n
    term = 1.0
    total = 1.0
    for k in range(1, 200):
        term *= -(mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total / math.sqrt(2.0 * math.pi * x)


@njit(cache=True)
def _ive_scalar(n, x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _SERIES_MAX:
        return _in_series(n, x) * math.exp(-x)
    if x >= _IVE_ASYMPTOTIC_MIN and x >= 0.5 * n * n:
        return _ive_asymptotic(n, x)
    m = 2 * ((n + 30 + int(math.sqrt(100.0 * x))) // 2)
    bip = 0.0
    bi = 1.0
    ans = 0.0
    total = 0.0
    for k in range(m, 0, -1):
        bim = (2.0 * k / x) * bi + bip
        bip = bi
        bi = bim
        if bi > _BIG:
            bi *= _SMALL
            bip *= _SMALL
            ans *= _SMALL
            total *= _SMALL
        j = k - 1
        if j == n:
            ans = bi
        if j >= 1:
            total += 2.0 * bi
    total += bi
    return ans / total


@njit(parallel=True, cache=True)
def bessel_ive_array(n, x):
    out = np.empty(x.shape[0])
    for i in prange(x.shape[0]):
        out[i] = _ive_scalar(n, x[i])
    return out


# pi split into three parts for Cody-Waite reduction; P1 has 33 significant
# bits so k*P1 is exact for |k| < 2**20 (|arg| < 3.3e6).
_P1 = 3.1415926534682512
_P2 = 1.2154188766544394e-10
_P3 = 1.2246467991473532e-16
_INV_PI = 0.3183098861837907


@njit(cache=True, error_model="numpy")
def _sinc2_weighted(arg, w, tmp):
    """tmp[j] = w[j] * sinc(arg[j])**2, written so that LLVM vectorises it.

    sin(a) = +-sin(r) with r = a - k*pi in [-pi/2, pi/2], and sin(r)/r is a
    Taylor polynomial to r**20 (truncation < 1e-17 on that interval).
    Beyond |a| = 3.3e6 the reduction loses bits but sinc**2 < 1e-13 there.
    """
    for j in range(arg.shape[0]):
        a = arg[j]
        k = math.floor(a * _INV_PI + 0.5)
        r = ((a - k * _P1) - k * _P2) - k * _P3
        z = r * r
        s = 1.0 + z * (-1.6666666666666666e-01 + z * (8.3333333333333332e-03
            + z * (-1.9841269841269841e-04 + z * (2.7557319223985893e-06
            + z * (-2.5052108385441720e-08 + z * (1.6059043836821613e-10
            + z * (-7.6471637318198164e-13 + z * (2.8114572543455206e-15
            + z * (-8.2206352466243295e-18 + z * 1.9572941063391263e-20)))))))))
        ra = r / a if k != 0.0 else 1.0
        v = ra * s
        tmp[j] = v * v * w[j]


@njit(parallel=True, cache=True)
def angular_spectrum(ksx, ksy, qx, qy, wq, k_p, k_s, k_i, length, grating, paraxial):
    """Signal intensity per (ks_y, ks_x) node, idler traced over pump nodes q.

    The idler wavevector is q - ks, so every pump node doubles as an idler
    node and no interpolation is needed.
    """
    nx = ksx.shape[0]
    ny = ksy.shape[0]
    nq = qx.shape[0]
    kzp = np.empty(nq)
    for j in range(nq):
        kzp[j] = math.sqrt(k_p * k_p - qx[j] * qx[j] - qy[j] * qy[j])
    ki2 = k_i * k_i
    half_l = 0.5 * length
    offset = k_p - k_s - k_i - grating
    out = np.empty((ny, nx))
    for iy in prange(ny):
        sy = ksy[iy]
        arg = np.empty(nq)
        tmp = np.empty(nq)
        for ix in range(nx):
            sx = ksx[ix]
            if paraxial:
                for j in range(nq):
                    ux = 2.0 * sx - qx[j]
                    uy = 2.0 * sy - qy[j]
                    arg[j] = (offset + (ux * ux + uy * uy) / (2.0 * k_p)) * half_l
            else:
                kzs = math.sqrt(k_s * k_s - sx * sx - sy * sy)
                for j in range(nq):
                    dx = qx[j] - sx
                    dy = qy[j] - sy
                    arg[j] = (kzp[j] - kzs - math.sqrt(ki2 - dx * dx - dy * dy)
                              - grating) * half_l
            _sinc2_weighted(arg, wq, tmp)
            acc = 0.0
            for j in range(nq):
                acc += tmp[j]
            out[iy, ix] = acc * length * length
    return out


@njit(parallel=True, cache=True)
def heralded_amplitude(sx, sy, kix, kiy, xiw, pump, pk0, pdk, k_p, k_s, k_i,
                       length, grating, paraxial, with_phase):
    """sum_j Phi(ks_m, ki_j) * xiw_j for every signal node m.

    Pump values are bilinearly interpolated on the centred k-grid
    (``pump[iy, ix]`` at ``pk0 + i*pdk``); outside the grid they are zero.
    """
    ns = sx.shape[0]
    ni = kix.shape[0]
    npx = pump.shape[1]
    npy = pump.shape[0]
    half_l = 0.5 * length
    offset = k_p - k_s - k_i - grating
    kzi = np.empty(ni)
    for j in range(ni):
        kzi[j] = math.sqrt(k_i * k_i - kix[j] * kix[j] - kiy[j] * kiy[j])
    out = np.empty(ns, dtype=np.complex128)
    for m in prange(ns):
        ax = sx[m]
        ay = sy[m]
        kzs = math.sqrt(k_s * k_s - ax * ax - ay * ay)
        acc = 0.0 + 0.0j
        for j in range(ni):
            qx = ax + kix[j]
            qy = ay + kiy[j]
            fx = (qx - pk0) / pdk
            fy = (qy - pk0) / pdk
            if fx < 0.0 or fy < 0.0 or fx > npx - 1 or fy > npy - 1:
                continue
            i0 = min(int(fx), npx - 2)
            j0 = min(int(fy), npy - 2)
            tx = fx - i0
            ty = fy - j0
            ep = ((1.0 - tx) * (1.0 - ty) * pump[j0, i0]
                  + tx * (1.0 - ty) * pump[j0, i0 + 1]
                  + (1.0 - tx) * ty * pump[j0 + 1, i0]
                  + tx * ty * pump[j0 + 1, i0 + 1])
            if paraxial:
                ux = ax - kix[j]
                uy = ay - kiy[j]
                dk = offset + (ux * ux + uy * uy) / (2.0 * k_p)
            else:
                dk = math.sqrt(k_p * k_p - qx * qx - qy * qy) - kzs - kzi[j] - grating
            arg = dk * half_l
            if arg == 0.0:
                s = 1.0
            else:
                s = math.sin(arg) / arg
            amp = ep * (length * s)
            if with_phase:
                amp *= complex(math.cos(arg), math.sin(arg))
            acc += amp * xiw[j]
        out[m] = acc
    return out
