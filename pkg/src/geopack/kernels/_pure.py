"""Vectorised numpy kernels: constraint values plus Jacobian values.

Every function returns ``(g, jv)`` where ``g`` holds constraint values in the
canonical ``g(x) <= 0`` / ``g(x) = 0`` orientation and ``jv`` the Jacobian
entries in the order fixed by :mod:`geopack.kernels.structure`.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .structure import PHI, RHO, pair_indices

_K = np.arange(6)
_OUT_S = np.sin(_K * PHI)
_OUT_C = np.cos(_K * PHI)


@lru_cache(maxsize=None)
def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return pair_indices(n)


def minmax_eval(x: np.ndarray, n: int, d: int, dual: bool):
    pi, pj = _pairs(n)
    P = len(pi)
    X = x[: n * d].reshape(n, d)
    t = x[n * d]
    delta = X[pi] - X[pj]
    D = np.einsum("pk,pk->p", delta, delta)
    g = np.empty(2 * P)
    jv = np.empty((2, P, 2 * d + 1))
    if dual:
        g[:P] = t - D
        g[P:] = D - 1.0
        jv[0, :, 2 * d] = 1.0
        jv[1, :, 2 * d] = 0.0
    else:
        g[:P] = 1.0 - D
        g[P:] = D - t
        jv[0, :, 2 * d] = 0.0
        jv[1, :, 2 * d] = -1.0
    jv[0, :, :d] = -2.0 * delta
    jv[0, :, d : 2 * d] = 2.0 * delta
    jv[1, :, :d] = 2.0 * delta
    jv[1, :, d : 2 * d] = -2.0 * delta
    return g, jv.ravel()


_CONTAIN_JV = np.array(
    [[-1.0, 1.0, 0.0], [1.0, 1.0, -1.0], [-1.0, 1.0, 0.0], [1.0, 1.0, 1.0]]
)


def circles_eval(x: np.ndarray, n: int):
    pi, pj = _pairs(n)
    xs = x[0 : 2 * n : 2]
    ys = x[1 : 2 * n : 2]
    r = x[2 * n : 3 * n]
    a = x[3 * n]
    contain = np.stack([r - xs, xs + r - a, r - ys, ys + r - 2.0 + a], axis=1)
    radius = r - 0.5 * a
    dx = xs[pi] - xs[pj]
    dy = ys[pi] - ys[pj]
    S = r[pi] + r[pj]
    overlap = S * S - dx * dx - dy * dy
    g = np.concatenate([contain.ravel(), radius, overlap])
    jv_pairs = np.stack([-2 * dx, -2 * dy, 2 * dx, 2 * dy, 2 * S, 2 * S], axis=1)
    jv = np.concatenate(
        [
            np.broadcast_to(_CONTAIN_JV, (n, 4, 3)).ravel(),
            np.tile([1.0, -0.5], n),
            jv_pairs.ravel(),
        ]
    )
    return g, jv


def _containment(x: np.ndarray, n: int):
    R = x[0]
    xs = x[1 : 1 + 2 * n : 2]
    ys = x[2 : 2 + 2 * n : 2]
    th = x[1 + 2 * n : 1 + 3 * n]
    ang = th[:, None] + (_K + 0.5) * PHI
    sv, cv = np.sin(ang), np.cos(ang)
    vx = xs[:, None] + sv  # (n, 6) vertex coordinates
    vy = ys[:, None] + cv
    g = -(R * RHO + vx[:, :, None] * _OUT_S + vy[:, :, None] * _OUT_C)
    jv = np.empty((n, 6, 6, 4))
    jv[..., 0] = -RHO
    jv[..., 1] = -_OUT_S
    jv[..., 2] = -_OUT_C
    jv[..., 3] = -(cv[:, :, None] * _OUT_S - sv[:, :, None] * _OUT_C)
    return g.ravel(), jv.ravel()


def hex_eval(x: np.ndarray, n: int, literal: bool):
    pi, pj = _pairs(n)
    P = len(pi)
    gc, jc = _containment(x, n)
    xs = x[1 : 1 + 2 * n : 2]
    ys = x[2 : 2 + 2 * n : 2]
    th = x[1 + 2 * n : 1 + 3 * n]
    ang = th[:, None] + _K * PHI
    As, Bs = np.sin(ang), np.cos(ang)
    gs = [gc]
    js = [jc]
    if literal:
        base = 1 + 3 * n
        a = x[base : base + 6 * n].reshape(n, 6)
        b = x[base + 6 * n : base + 12 * n].reshape(n, 6)
        c = x[base + 12 * n : base + 18 * n].reshape(n, 6)
        lam = x[base + 18 * n :].reshape(P, 12)
        X6 = np.broadcast_to(xs[:, None], (n, 6))
        Y6 = np.broadcast_to(ys[:, None], (n, 6))
        gs += [(a - As).ravel(), (b - Bs).ravel(), (c - (a * X6 + b * Y6 - RHO)).ravel()]
        one = np.ones((n, 6))
        js += [
            np.stack([one, -Bs], axis=2).ravel(),
            np.stack([one, As], axis=2).ravel(),
            np.stack([one, -X6, -Y6, -a, -b], axis=2).ravel(),
        ]
        Ac = np.concatenate([a[pi], a[pj]], axis=1)
        Bc = np.concatenate([b[pi], b[pj]], axis=1)
        Cc = np.concatenate([c[pi], c[pj]], axis=1)
        gp = np.stack(
            [
                lam.sum(axis=1) - 1.0,
                (lam * Ac).sum(axis=1),
                (lam * Bc).sum(axis=1),
                -(lam * Cc).sum(axis=1),
            ],
            axis=1,
        )
        jp = np.concatenate(
            [np.ones((P, 12)), Ac, lam, Bc, lam, -Cc, -lam], axis=1
        )
    else:
        lam = x[1 + 3 * n :].reshape(P, 12)
        Ac = np.concatenate([As[pi], As[pj]], axis=1)
        Bc = np.concatenate([Bs[pi], Bs[pj]], axis=1)
        Xc = np.concatenate([np.repeat(xs[pi, None], 6, 1), np.repeat(xs[pj, None], 6, 1)], 1)
        Yc = np.concatenate([np.repeat(ys[pi, None], 6, 1), np.repeat(ys[pj, None], 6, 1)], 1)
        Cc = Ac * Xc + Bc * Yc - RHO
        lA = lam * Ac
        lB = lam * Bc
        dC = lam * (Bc * Xc - Ac * Yc)
        gp = np.stack(
            [lam.sum(axis=1) - 1.0, lA.sum(axis=1), lB.sum(axis=1), -(lam * Cc).sum(axis=1)],
            axis=1,
        )
        half = lambda v: (v[:, :6].sum(axis=1, keepdims=True), v[:, 6:].sum(axis=1, keepdims=True))  # noqa: E731
        lBi, lBj = half(lB)
        lAi, lAj = half(lA)
        dCi, dCj = half(dC)
        jp = np.concatenate(
            [
                np.ones((P, 12)),
                Ac, lBi, lBj,
                Bc, -lAi, -lAj,
                -Cc, -lAi, -lBi, -dCi, -lAj, -lBj, -dCj,
            ],
            axis=1,
        )
    gs.append(gp.ravel())
    js.append(jp.ravel())
    return np.concatenate(gs), np.concatenate(js)


def al_merit(c, x, g, jv, rows, cols, y, mu, is_eq):
    """Augmented Lagrangian value and gradient; returns ``(value, grad, w)``.

    ``w`` holds the shifted multipliers ``y + mu g`` (clipped at zero for
    inequalities), which are both the gradient weights and the next
    first-order multiplier estimate.
    """
    is_eq = is_eq.astype(bool)
    w = y + mu * g
    w = np.where(is_eq, w, np.maximum(w, 0.0))
    terms = np.where(is_eq, y * g + 0.5 * mu * g * g, (w * w - y * y) / (2.0 * mu))
    val = float(c @ x + terms.sum())
    grad = c + np.bincount(cols, weights=jv * w[rows], minlength=len(x))
    return val, grad, w
