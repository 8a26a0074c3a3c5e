"""Vectorised numpy versions of the kernels in ``numba_impl``."""
import math

import numpy as np

_BIG = 1.0e250
_SMALL = 1.0e-250
_SERIES_MAX = 1.0
_IVE_ASYMPTOTIC_MIN = 1000.0
_CHUNK = 1 << 20


def _series(n, x, sign):
    half = 0.5 * x
    term = np.exp(n * np.log(half) - math.lgamma(n + 1.0))
    total = term.copy()
    q = half * half
    for k in range(1, 40):
        term = term * (sign * q / (k * (k + n)))
        total += term
    return total


def bessel_j_array(n, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x == 0.0] = 1.0 if n == 0 else 0.0
    small = (x > 0.0) & (x <= _SERIES_MAX)
    if small.any():
        out[small] = _series(n, x[small], -1.0)
    big = x > _SERIES_MAX
    if not big.any():
        return out
    xb = x[big]
    top = max(float(n), float(xb.max()))
    m = 2 * ((int(top) + 20 + int(math.sqrt(60.0 * top))) // 2)
    bjp = np.zeros_like(xb)
    bj = np.ones_like(xb)
    ans = np.zeros_like(xb)
    total = np.zeros_like(xb)
    for k in range(m, 0, -1):
        bjm = (2.0 * k / xb) * bj - bjp
        bjp = bj
        bj = bjm
        over = np.abs(bj) > _BIG
        if over.any():
            bj = np.where(over, bj * _SMALL, bj)
            bjp = np.where(over, bjp * _SMALL, bjp)
            ans = np.where(over, ans * _SMALL, ans)
            total = np.where(over, total * _SMALL, total)
        j = k - 1
        if j == n:
            ans = bj.copy()
        if j >= 2 and j % 2 == 0:
            total += 2.0 * bj
    total += bj
    out[big] = ans / total
    return out


def _ive_asymptotic(n, x):
    mu = 4.0 * n * n
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 200):
        term = term * (-(mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * x))
        total += term
        if np.all(np.abs(term) < 1e-17 * np.abs(total)):
            break
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_ive_array(n, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x == 0.0] = 1.0 if n == 0 else 0.0
    small = (x > 0.0) & (x <= _SERIES_MAX)
    if small.any():
        xs = x[small]
        out[small] = _series(n, xs, 1.0) * np.exp(-xs)
    asym = (x >= _IVE_ASYMPTOTIC_MIN) & (x >= 0.5 * n * n)
    if asym.any():
        out[asym] = _ive_asymptotic(n, x[asym])
    mid = (x > _SERIES_MAX) & ~asym
    if not mid.any():
        return out
    xb = x[mid]
    m = 2 * ((n + 30 + int(math.sqrt(100.0 * float(xb.max())))) // 2)
    bip = np.zeros_like(xb)
    bi = np.ones_like(xb)
    ans = np.zeros_like(xb)
    total = np.zeros_like(xb)
    for k in range(m, 0, -1):
        bim = (2.0 * k / xb) * bi + bip
        bip = bi
        bi = bim
        over = bi > _BIG
        if over.any():
            bi = np.where(over, bi * _SMALL, bi)
            bip = np.where(over, bip * _SMALL, bip)
            ans = np.where(over, ans * _SMALL, ans)
            total = np.where(over, total * _SMALL, total)
        j = k - 1
        if j == n:
            ans = bi.copy()
        if j >= 1:
            total += 2.0 * bi
    total += bi
    out[mid] = ans / total
    return out


def _sinc(arg):
    safe = np.where(arg == 0.0, 1.0, arg)
    return np.where(arg == 0.0, 1.0, np.sin(safe) / safe)


def angular_spectrum(ksx, ksy, qx, qy, wq, k_p, k_s, k_i, length, grating, paraxial):
    nx = ksx.shape[0]
    ny = ksy.shape[0]
    nq = qx.shape[0]
    kzp = np.sqrt(k_p * k_p - qx * qx - qy * qy)
    block = max(1, _CHUNK // max(nq, 1))
    out = np.empty((ny, nx))
    for iy in range(ny):
        sy = ksy[iy]
        for start in range(0, nx, block):
            sx = ksx[start:start + block][:, None]
            if paraxial:
                ux = 2.0 * sx - qx[None, :]
                uy = 2.0 * sy - qy[None, :]
                dk = (k_p - k_s - k_i - grating) + (ux * ux + uy * uy) / (2.0 * k_p)
            else:
                kzs = np.sqrt(k_s * k_s - sx * sx - sy * sy)
                dx = qx[None, :] - sx
                dy = qy[None, :] - sy
                dk = kzp[None, :] - kzs - np.sqrt(k_i * k_i - dx * dx - dy * dy) - grating
            s = _sinc(0.5 * length * dk)
            out[iy, start:start + block] = (s * s) @ wq
    return out * length * length


def heralded_amplitude(sx, sy, kix, kiy, xiw, pump, pk0, pdk, k_p, k_s, k_i,
                       length, grating, paraxial, with_phase):
    ns = sx.shape[0]
    ni = kix.shape[0]
    npy, npx = pump.shape
    kzi = np.sqrt(k_i * k_i - kix * kix - kiy * kiy)
    block = max(1, _CHUNK // max(ni, 1))
    out = np.empty(ns, dtype=np.complex128)
    for start in range(0, ns, block):
        ax = sx[start:start + block][:, None]
        ay = sy[start:start + block][:, None]
        qx = ax + kix[None, :]
        qy = ay + kiy[None, :]
        fx = (qx - pk0) / pdk
        fy = (qy - pk0) / pdk
        inside = (fx >= 0.0) & (fy >= 0.0) & (fx <= npx - 1) & (fy <= npy - 1)
        fxc = np.where(inside, fx, 0.0)
        fyc = np.where(inside, fy, 0.0)
        i0 = np.minimum(fxc.astype(np.int64), npx - 2)
        j0 = np.minimum(fyc.astype(np.int64), npy - 2)
        tx = fxc - i0
        ty = fyc - j0
        ep = ((1.0 - tx) * (1.0 - ty) * pump[j0, i0]
              + tx * (1.0 - ty) * pump[j0, i0 + 1]
              + (1.0 - tx) * ty * pump[j0 + 1, i0]
              + tx * ty * pump[j0 + 1, i0 + 1])
        ep = np.where(inside, ep, 0.0)
        if paraxial:
            ux = ax - kix[None, :]
            uy = ay - kiy[None, :]
            dk = (k_p - k_s - k_i - grating) + (ux * ux + uy * uy) / (2.0 * k_p)
        else:
            kzs = np.sqrt(k_s * k_s - ax * ax - ay * ay)
            dk = (np.sqrt(np.maximum(k_p * k_p - qx * qx - qy * qy, 0.0))
                  - kzs - kzi[None, :] - grating)
        arg = 0.5 * length * dk
        amp = ep * (length * _sinc(arg))
        if with_phase:
            amp = amp * np.exp(1j * arg)
        out[start:start + block] = amp @ xiw
    return out
