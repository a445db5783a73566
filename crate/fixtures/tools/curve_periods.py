"""Siegel point of the Jacobian of y^2 = f(x), f a squarefree sextic.

Cycles are lifts of loops around the segments [e_k, e_{k+1}] of a root chain;
with c_k.c_{k+1} = 1 the basis a1 = c1, a2 = c1 + c3, b1 = c2, b2 = c4 is
symplectic. Lift orientations are fixed by requiring Z symmetric with Im Z > 0.

usage: curve_periods.py c0 c1 ... c6 [--dps N]
"""

import itertools
import json
import sys

from mpmath import mp, mpc, mpf, matrix, polyroots, quad, sqrt, cos, sin, pi, eig


def segment_period(coeffs, roots, k, j):
    lead = coeffs[-1]
    e0, e1 = roots[k], roots[k + 1]
    d = e1 - e0
    c = (e0 + e1) / 2
    others = [r for i, r in enumerate(roots) if i not in (k, k + 1)]

    def integrand(theta):
        t = (1 - cos(theta)) / 2
        x = e0 + t * d
        rest = mpc(1)
        for r in others:
            rest *= sqrt(c - r) * sqrt((x - r) / (c - r))
        # sqrt((x-e0)(x-e1)) = i d sqrt(t(1-t)), and dt = sqrt(t(1-t)) dtheta
        return x**j / (sqrt(lead) * 1j * rest)

    return 2 * quad(integrand, [0, pi])


def siegel_point(coeffs):
    coeffs = [mpf(c) for c in coeffs]
    roots = polyroots(coeffs[::-1], maxsteps=200, extraprec=2 * mp.prec)
    roots = sorted(roots, key=lambda r: (mp.re(r), mp.im(r)))
    c = [[segment_period(coeffs, roots, k, j) for j in range(2)] for k in range(4)]
    best = None
    for signs in itertools.product((1, -1), repeat=4):
        s = [[signs[k] * c[k][j] for j in range(2)] for k in range(4)]
        a = matrix([[s[0][j], s[0][j] + s[2][j]] for j in range(2)])
        b = matrix([[s[1][j], s[3][j]] for j in range(2)])
        z = a**-1 * b
        asym = abs(z[0, 1] - z[1, 0]) / max(abs(z[0, 0]), abs(z[1, 1]))
        y = matrix([[mp.im(z[i, j]) for j in range(2)] for i in range(2)])
        ev = eig((y + y.T) / 2)[0]
        if min(mp.re(v) for v in ev) > 0 and (best is None or asym < best[0]):
            best = (asym, z)
    return best


def main():
    args = sys.argv[1:]
    if "--dps" in args:
        i = args.index("--dps")
        mp.dps = int(args[i + 1])
        del args[i : i + 2]
    else:
        mp.dps = 40
    asym, z = siegel_point([int(a) for a in args])
    def fmt(x):
        return "0" if abs(x) < mpf(10) ** (10 - mp.dps) else mp.nstr(x, mp.dps - 10)

    out = {
        "asymmetry": mp.nstr(asym, 5),
        "z": [[[fmt(mp.re(z[i, j])), fmt(mp.im(z[i, j]))] for j in range(2)] for i in range(2)],
    }
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
