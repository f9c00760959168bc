"""Smallest enclosing ball of a finite point set in dimension 1 or 2.

The 2D case uses the classic randomized incremental (move-to-front style)
algorithm: expected linear time, exact up to floating point.  Degenerate
(collinear) triples fall back to the widest two-point diameter ball.
"""

from __future__ import annotations

import numpy as np


def _ball_two(p, q):
    center = 0.5 * (p + q)
    return center, float(np.linalg.norm(p - center))


def _circumcircle(p, q, r):
    """Circumcenter/radius of a triangle, or None when (near-)collinear."""
    ax, ay = p
    bx, by = q
    cx, cy = r
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    scale = max(abs(ax - cx), abs(ay - cy), abs(bx - cx), abs(by - cy), 1.0)
    if abs(d) <= 1e-14 * scale * scale:
        return None
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    center = np.array([ux, uy])
    radius = max(
        float(np.linalg.norm(p - center)),
        float(np.linalg.norm(q - center)),
        float(np.linalg.norm(r - center)),
    )
    return center, radius


def _ball_three(p, q, r):
    # try the three pairwise balls first: if one contains the third point it
    # is the minidisk of the triple
    best = None
    for a, b, c in ((p, q, r), (p, r, q), (q, r, p)):
        center, radius = _ball_two(a, b)
        if np.linalg.norm(c - center) <= radius * (1.0 + 1e-12) + 1e-300:
            if best is None or radius < best[1]:
                best = (center, radius)
    if best is not None:
        return best
    circ = _circumcircle(p, q, r)
    if circ is not None:
        return circ
    # collinear: widest pair
    balls = [_ball_two(p, q), _ball_two(p, r), _ball_two(q, r)]
    return max(balls, key=lambda b: b[1])


def _contains(center, radius, point, tol):
    return np.linalg.norm(point - center) <= radius + tol


def smallest_enclosing_ball(points: np.ndarray):
    """Return (center, radius) of the minimal ball covering ``points``.

    Parameters
    ----------
    points : ndarray of shape (m, d) with d in {1, 2} and m >= 1.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    m, d = pts.shape
    if m == 0:
        raise ValueError("point set is empty")
    if d == 1:
        lo, hi = float(pts.min()), float(pts.max())
        return np.array([0.5 * (lo + hi)]), 0.5 * (hi - lo)
    if d != 2:
        raise ValueError(f"only d <= 2 supported, got d={d}")

    pts = np.unique(pts, axis=0)
    rng = np.random.default_rng(0)
    pts = pts[rng.permutation(len(pts))]
    span = float(np.max(np.abs(pts))) if len(pts) else 1.0
    tol = 1e-10 * max(span, 1.0)

    center, radius = pts[0].copy(), 0.0
    for i in range(1, len(pts)):
        if _contains(center, radius, pts[i], tol):
            continue
        center, radius = pts[i].copy(), 0.0
        for j in range(i):
            if _contains(center, radius, pts[j], tol):
                continue
            center, radius = _ball_two(pts[i], pts[j])
            for k in range(j):
                if _contains(center, radius, pts[k], tol):
                    continue
                center, radius = _ball_three(pts[i], pts[j], pts[k])
    return center, radius
