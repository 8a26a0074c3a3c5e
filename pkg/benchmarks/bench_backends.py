"""Compare the numba and numpy kernel backends on representative sizes.

Usage::

    python3 benchmarks/bench_backends.py [--size small|full] [--repeat 3]

Each kernel is run once to trigger JIT compilation, then timed ``repeat``
times; the best wall time per backend, the speed-up and the maximum relative
difference between the two outputs are printed.
"""
import argparse
import time

import numpy as np

from twistlab._kernels import implementation
from twistlab.spdc import PhaseMatching, bbo_like, ppktp_like

SIZES = {
    # (angular-spectrum signal side, pump side, heralded signal/idler side, bessel points)
    "small": (32, 64, 24, 20000),
    "full": (64, 256, 64, 200000),
}


def _best(fn, repeat):
    fn()
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def _grid(half, n):
    x = (np.arange(n) - n / 2 + 0.5) * (2 * half / n)
    xx, yy = np.meshgrid(x, x)
    return x, xx.ravel(), yy.ravel(), x[1] - x[0]


def angular_spectrum_case(ns, nq):
    crystal, wl = bbo_like()
    m = PhaseMatching(crystal, wl)
    ring = m.ring_radius()
    ks, _, _, _ = _grid(1.3 * ring, ns)
    _, qx, qy, dq = _grid(6e4, nq)
    wq = np.exp(-(qx ** 2 + qy ** 2) * (50e-6) ** 2 / 2) ** 2 * dq * dq
    args = (ks, ks, qx, qy, wq, m.k_p, m.k_s, m.k_i, crystal.length, m.grating, False)
    return args


def heralded_case(n):
    crystal, wl = ppktp_like()
    m = PhaseMatching(crystal, wl)
    _, sx, sy, _ = _grid(8e4, n)
    _, kix, kiy, dki = _grid(4e4, n)
    xiw = (np.exp(-(kix ** 2 + kiy ** 2) * (20e-6) ** 2 / 2) * dki * dki).astype(complex)
    npump = 128
    pk = (np.arange(npump) - npump / 2) * 2e3
    px, py = np.meshgrid(pk, pk)
    pump = np.exp(-(px ** 2 + py ** 2) * (100e-6) ** 2 / 4) * np.exp(1j * np.arctan2(py, px))
    return (sx, sy, kix, kiy, xiw, np.ascontiguousarray(pump), pk[0], pk[1] - pk[0],
            m.k_p, m.k_s, m.k_i, crystal.length, m.grating, False, True)


def _reldiff(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", choices=sorted(SIZES), default="small")
    parser.add_argument("--repeat", type=int, default=3)
    opts = parser.parse_args(argv)
    ns, nq, nh, nb = SIZES[opts.size]
    fast = implementation("numba")
    ref = implementation("numpy")

    x = np.linspace(0.0, 80.0, nb)
    cases = [
        ("bessel_j_array(n=7)", lambda impl: impl.bessel_j_array(7, x)),
        ("bessel_ive_array(n=7)", lambda impl: impl.bessel_ive_array(7, x)),
    ]
    as_args = angular_spectrum_case(ns, nq)
    cases.append((f"angular_spectrum({ns}^2 x {nq}^2)",
                  lambda impl: impl.angular_spectrum(*as_args)))
    h_args = heralded_case(nh)
    cases.append((f"heralded_amplitude({nh}^2 x {nh}^2)",
                  lambda impl: impl.heralded_amplitude(*h_args)))

    print(f"{'kernel':36s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speed-up':>9s} {'max rel diff':>13s}")
    for name, call in cases:
        t_fast, out_fast = _best(lambda: call(fast), opts.repeat)
        t_ref, out_ref = _best(lambda: call(ref), opts.repeat)
        print(f"{name:36s} {t_fast:10.4f} {t_ref:10.4f} {t_ref / t_fast:9.1f} "
              f"{_reldiff(out_fast, out_ref):13.2e}")


if __name__ == "__main__":
    main()
