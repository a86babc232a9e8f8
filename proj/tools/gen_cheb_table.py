#!/usr/bin/env python3
"""Generate the rational Chebyshev pole/weight tables for exp(-x) on [0, inf).

Poles come from the Caratheodory-Fejer construction of the near-best type (nu, nu)
rational approximant (Trefethen, Weideman & Schmelzer, BIT 46 (2006)),
the offset and weights are then fitted by a linear minimax (Lawson) iteration.
The result agrees with the minimax approximant of Cody, Meinardus & Varga to
several digits for the degrees tabulated here. The partial-fraction form is

    r(x) = offset + sum_j weight_j / (x - pole_j),   x >= 0.

Output is written to stdout in the format of src/cheb_table_data.inc.
"""
import sys

import mpmath as mp
import numpy as np
from scipy.linalg import hankel, svd


def cf_poles(n, K=75, nf=1024):
    """Poles of the CF approximant to exp(z) on (-inf, 0], mapped to x = -z."""
    w = np.exp(2j * np.pi * np.arange(nf) / nf)
    t = np.real(w)
    scl = 9.0
    F = np.exp(scl * (t - 1) / (t + 1 + 1e-16))
    c = np.real(np.fft.fft(F)) / nf
    _, _, Vh = svd(hankel(c[1:K + 1]))
    v = Vh.T[:, n]
    zr = np.roots(v)
    qk = zr[np.abs(zr) > 1]
    zk = scl * (qk - 1) ** 2 / (qk + 1) ** 2
    return -zk


def fit_weights(poles, npts=4000, sweeps=200):
    """Linear minimax fit of offset and weights for fixed poles (Lawson iteration)."""
    upper = [complex(p) for p in poles if p.imag > 0]
    reals = [complex(p).real for p in poles if p.imag == 0]
    tt = np.cos(np.pi * (np.arange(npts) + 0.5) / npts)
    xs = np.concatenate([[0.0], 9 * (1 - tt) / (1 + tt)])
    cols = [np.ones_like(xs)]
    for p in upper:
        r = 1 / (xs - p)
        cols += [2 * r.real, -2 * r.imag]
    for p in reals:
        cols.append(1 / (xs - p))
    B = np.stack(cols, axis=1)
    f = np.exp(-xs)
    wts = np.full(len(xs), 1.0 / len(xs))
    for _ in range(sweeps):
        sw = np.sqrt(wts)
        coef, *_ = np.linalg.lstsq(B * sw[:, None], f * sw, rcond=None)
        err = np.abs(B @ coef - f)
        wts = wts * err
        wts /= wts.sum()
    offset = coef[0]
    out_p, out_w = [], []
    k = 1
    for p in upper:
        wj = complex(coef[k], coef[k + 1])
        out_p += [p, p.conjugate()]
        out_w += [wj, wj.conjugate()]
        k += 2
    for p in reals:
        out_p.append(complex(p, 0.0))
        out_w.append(complex(coef[k], 0.0))
        k += 1
    return float(offset), np.array(out_p), np.array(out_w)


def cf(n):
    poles = cf_poles(n)
    poles = np.where(np.abs(poles.imag) < 1e-8 * np.maximum(1.0, np.abs(poles)),
                     poles.real + 0j, poles)
    # snap conjugate pairs
    return fit_weights(poles)


def sup_error(off, poles, weights):
    mp.mp.dps = 30
    worst = mp.mpf(0)
    for k in range(0, 4001):
        s = mp.mpf(k) / 4001
        x = s / (1 - s)
        r = mp.mpf(off) + sum(mp.mpc(w) / (x - mp.mpc(p)) for p, w in zip(poles, weights))
        worst = max(worst, abs(mp.re(r) - mp.e ** (-x)))
    return float(worst)


def main():
    print("// Generated by tools/gen_cheb_table.py. Do not edit by hand.")
    print("// r(x) = offset + sum_j weight_j / (x - pole_j) approximates exp(-x) on [0, inf).")
    for n in range(4, 15):
        off, poles, weights = cf(n)
        err = sup_error(off, poles, weights)
        print(f"nu={n} sup error {err:.4e} offset {off:.4e}", file=sys.stderr)
        print(f"// nu = {n}, sup error {err:.3e}")
        print(f"{{{n}, {float(off)!r},")
        print("  {")
        for p, w in zip(poles, weights):
            print(f"    {{{{{float(p.real)!r}, {float(p.imag)!r}}}, {{{float(w.real)!r}, {float(w.imag)!r}}}}},")
        print("  }},")


if __name__ == "__main__":
    main()
