#!/usr/bin/env python3
"""Quadrature oracle for the genus-2 fixture.

Curve: y^2 = x(x-1)(x-2)(x-3)(x-4), branch points 0,1,2,3,4,inf.

Holomorphic differentials x^j dx / y (j = 0, 1) are integrated over
A_1 = loop around [0,1], A_2 = loop around [2,3],
B_1 = loop around [1,2] + loop around [3,4], B_2 = loop around [3,4].
y is the product of principal square roots of (x - e_i), evaluated on the
upper side of the real axis, which is analytic in the closed upper half plane.

The normalized differentials omega = C * (dx/y, x dx/y) satisfy A-periods = I
and tau = C * B.

Marked point p_inf: x0 = 1/2 on the sheet where y > 0, local coordinate
z = x - x0.  With f = d AJ / dz,
    U1 = -f(0),  U2 = -f'(0),  U3 = -f''(0)/2,
the KP directions for theta(tau, z) = sum exp(pi i n.tau.n + 2 pi i n.z).
V = f'(0) is the second Abel-Jacobi derivative used by the flex check
together with U = f(0) (the sign of U does not matter there).
Named points are Abel-Jacobi images  A(p) = int_{x0}^{p} omega  along the
straight segment in the closed upper half plane.

Usage: python3 genus2_oracle.py > genus2_y2_x5.json
"""

import json
import sys

import mpmath as mp

mp.mp.dps = 40
BRANCH = [0, 1, 2, 3, 4]
X0 = mp.mpf("0.5")


def y_of(x):
    x = mp.mpc(x)
    if x.imag == 0:
        x = mp.mpc(x.real, mp.mpf("1e-60"))
    p = mp.mpc(1)
    for e in BRANCH:
        p *= mp.sqrt(x - e)
    return p


def seg(j, a, b):
    # integral of x^j dx / y over the real segment [a, b], endpoints are branch points
    return mp.quad(lambda t: t ** j / y_of(t), [a, b])


def raw_periods():
    a = mp.matrix(2, 2)
    b = mp.matrix(2, 2)
    for j in range(2):
        a[j, 0] = 2 * seg(j, 0, 1)
        a[j, 1] = 2 * seg(j, 2, 3)
        l12 = 2 * seg(j, 1, 2)
        l34 = 2 * seg(j, 3, 4)
        b[j, 0] = l12 + l34
        b[j, 1] = l34
    return a, b


def path_integral(c, x1):
    # int_{x0}^{x1} C (1, x)^t dx / y along the straight segment
    x1 = mp.mpc(x1)
    out = []
    for row in range(2):
        def integrand(s, row=row):
            x = X0 + s * (x1 - X0)
            return (c[row, 0] + c[row, 1] * x) / y_of(x) * (x1 - X0)
        out.append(mp.quad(integrand, [0, 1]))
    return out


def main():
    a, b = raw_periods()
    c = a ** -1
    tau = c * b
    # pick orientation so Im tau is positive definite
    if mp.im(tau[0, 0]) < 0:
        tau = -tau
        flip = True
    else:
        flip = False
    asym = abs(tau[0, 1] - tau[1, 0])
    if asym > mp.mpf("1e-18"):
        sys.exit("period matrix is not symmetric: %s" % asym)
    tau = (tau + tau.T) / 2

    y0 = y_of(X0)
    f0 = [(c[r, 0] + c[r, 1] * X0) / y0 for r in range(2)]
    # d/dx of (c0 + c1 x)/y = c1/y - (c0 + c1 x) y'/y^2,  y'/y = sum 1/(2(x - e))
    dlog = sum(1 / (2 * (X0 - e)) for e in BRANCH)
    d2log = -sum(1 / (2 * (X0 - e) ** 2) for e in BRANCH)
    f1 = [c[r, 1] / y0 - (c[r, 0] + c[r, 1] * X0) / y0 * dlog for r in range(2)]
    # second derivative of g/y with g linear: g''=0
    # (g/y)'' = -2 g' (y'/y)/y + g/y * ((y'/y)^2 - (y'/y)')
    f2 = [
        -2 * c[r, 1] * dlog / y0
        + (c[r, 0] + c[r, 1] * X0) / y0 * (dlog ** 2 - d2log)
        for r in range(2)
    ]
    u1 = [-v for v in f0]
    u2 = [-v for v in f1]
    u3 = [-v / 2 for v in f2]

    points = {
        "p": mp.mpf("0.2"),
        "q": mp.mpf("0.35"),
        "r": mp.mpc("0.7", "0.25"),
        "s": mp.mpc("0.9", "0.4"),
        "t": mp.mpc("0.15", "0.3"),
    }
    aj = {}
    for name, x in points.items():
        aj[name] = path_integral(c, x)

    def cpair(v):
        v = mp.mpc(v)
        re = float(v.real) if abs(v.real) > 1e-30 else 0.0
        im = float(v.imag) if abs(v.imag) > 1e-30 else 0.0
        return [re, im]

    doc = {
        "genus": 2,
        "tau": [[cpair(tau[i, j]) for j in range(2)] for i in range(2)],
        "points": {k: [cpair(v) for v in vec] for k, vec in aj.items()},
        "vectors": {
            "U1": [cpair(v) for v in u1],
            "U2": [cpair(v) for v in u2],
            "U3": [cpair(v) for v in u3],
            "V": [cpair(v) for v in f1],
        },
        "provenance": (
            "genus2_oracle.py: mpmath tanh-sinh quadrature (40 digits) of x^j dx/y, j=0,1, "
            "on y^2=x(x-1)(x-2)(x-3)(x-4); A-cycles around [0,1],[2,3]; "
            "B-cycles [1,2]+[3,4], [3,4]; marked point x0=1/2 (y>0), local coordinate x-x0; "
            "AJ images of p=0.2, q=0.35, r=0.7+0.25i, s=0.9+0.4i, t=0.15+0.3i"
            + ("; tau orientation flipped" if flip else "")
        ),
    }
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
