"""Reference computations written independently of the package code.

They favour obviousness over speed: pure-Python sums, closed-form
formulas and brute-force optimisation.
"""

import math
from itertools import combinations

import numpy as np


def two_pass_moments(values):
    """Mean, variance, third and fourth central moments (divisor N) with
    compensated summation."""
    xs = [float(v) for v in values]
    n = len(xs)
    mean = math.fsum(xs) / n
    dev = [x - mean for x in xs]
    return (
        mean,
        math.fsum(d * d for d in dev) / n,
        math.fsum(d * d * d for d in dev) / n,
        math.fsum(d ** 4 for d in dev) / n,
    )


def c1c2c3_scalar(r, g, b):
    """atan2 form of the channel-ratio angles; atan2(x, 0) = pi/2 for
    x > 0 and atan2(0, 0) = 0 reproduce the zero-denominator convention."""
    return (math.atan2(r, max(g, b)), math.atan2(g, max(r, b)), math.atan2(b, max(r, g)))


def covariance3(points):
    pts = [tuple(map(float, p)) for p in points]
    n = len(pts)
    mean = [math.fsum(p[i] for p in pts) / n for i in range(3)]
    return [[math.fsum((p[i] - mean[i]) * (p[j] - mean[j]) for p in pts) / n for j in range(3)] for i in range(3)]


def sym3_min_eigenvalue(a):
    """Smallest eigenvalue of a symmetric 3x3 matrix by the trigonometric
    closed form of the characteristic cubic."""
    p1 = a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2
    q = (a[0][0] + a[1][1] + a[2][2]) / 3
    if p1 == 0 and a[0][0] == a[1][1] == a[2][2]:
        return q
    p2 = (a[0][0] - q) ** 2 + (a[1][1] - q) ** 2 + (a[2][2] - q) ** 2 + 2 * p1
    p = math.sqrt(p2 / 6)
    b = [[(a[i][j] - (q if i == j else 0.0)) / p for j in range(3)] for i in range(3)]
    det = (b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
           - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
           + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]))
    r = min(1.0, max(-1.0, det / 2))
    phi = math.acos(r) / 3
    return q + 2 * p * math.cos(phi + 2 * math.pi / 3)


def grid_plane_residual(points, steps=181):
    """Brute-force minimum over a grid of unit normals of the mean squared
    distance to the best plane with that normal (coarse; for sanity)."""
    pts = np.asarray(points, float)
    d = pts - pts.mean(axis=0)
    best = math.inf
    for az in np.linspace(0, math.pi, steps):
        for el in np.linspace(0, math.pi / 2, steps // 2 + 1):
            n = np.array([math.cos(az) * math.sin(el), math.sin(az) * math.sin(el), math.cos(el)])
            best = min(best, float(np.mean((d @ n) ** 2)))
    return best


def elementary_rpy(roll, pitch, yaw):
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return rz @ ry @ rx


def load_balance_residuals(fz, weight, roll, pitch, h, length, width):
    """Force and moment residuals of wheel loads (FL, RL, FR, RR) against
    the body-frame gravity vector, with ground contacts a height h below
    the centre of gravity (x forward, y left)."""
    fx = weight * math.sin(pitch)
    fy = -weight * math.cos(pitch) * math.sin(roll)
    fzw = -weight * math.cos(pitch) * math.cos(roll)
    xs = (length / 2, -length / 2, length / 2, -length / 2)
    ys = (width / 2, width / 2, -width / 2, -width / 2)
    vertical = math.fsum(fz) + fzw
    # moments about the CG; in-plane ground reactions act at z = -h
    pitch_moment = math.fsum(x * f for x, f in zip(xs, fz)) - h * fx
    roll_moment = math.fsum(y * f for y, f in zip(ys, fz)) - h * fy
    return vertical, pitch_moment, roll_moment


def qp_dual_objective(X, y, C, iters=20000):
    """Dual SVM objective with a bias feature, solved by accelerated
    projected gradient on the box [0, C]."""
    A = np.hstack([np.asarray(X, float), np.ones((len(X), 1))]) * np.asarray(y, float)[:, None]
    Q = A @ A.T
    L = float(np.linalg.eigvalsh(Q)[-1])
    a = np.zeros(len(y))
    z = a.copy()
    t = 1.0
    for _ in range(iters):
        a_next = np.clip(z - (Q @ z - 1.0) / L, 0.0, C)
        t_next = (1 + math.sqrt(1 + 4 * t * t)) / 2
        z = a_next + (t - 1) / t_next * (a_next - a)
        a, t = a_next, t_next
    return float(0.5 * a @ Q @ a - a.sum())


def vote_decode(scores, n_classes):
    """Majority vote over one-vs-one learners (pair order as
    itertools.combinations); ties to the lowest class index."""
    pairs = list(combinations(range(n_classes), 2))
    out = []
    for row in np.atleast_2d(scores):
        votes = [0] * n_classes
        for (i, j), s in zip(pairs, row):
            votes[i if s > 0 else j] += 1
        out.append(max(range(n_classes), key=lambda k: (votes[k], -k)))
    return np.array(out)
