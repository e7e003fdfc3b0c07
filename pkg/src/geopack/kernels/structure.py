"""Variable layouts and Jacobian sparsity patterns for the three model families.

Both kernel backends emit Jacobian values in exactly the order produced here,
so the (rows, cols) arrays below are the single source of truth for layout.
"""

from __future__ import annotations

import numpy as np

RHO = np.sqrt(3.0) / 2.0
PHI = np.pi / 3.0


def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Return the (i, j) arrays of all pairs i < j in lexicographic order."""
    i, j = np.triu_indices(n, k=1)
    return i.astype(np.int64), j.astype(np.int64)


def _rows(counts: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(len(counts), dtype=np.int64), counts)


# -- min-max ratio -----------------------------------------------------------

def minmax_structure(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows 0..P-1 are min-distance rows, P..2P-1 max-distance rows.

    Each row touches the d coordinates of both points and the scalar t.
    """
    pi, pj = pair_indices(n)
    t = n * d
    k = np.arange(d)
    per_pair = np.concatenate(
        [pi[:, None] * d + k, pj[:, None] * d + k, np.full((len(pi), 1), t)], axis=1
    )
    cols = np.concatenate([per_pair.ravel(), per_pair.ravel()])
    rows = _rows(np.full(2 * len(pi), 2 * d + 1))
    return rows, cols.astype(np.int64)


# -- circles -----------------------------------------------------------------

def circles_structure(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Layout ``[x0, y0, ..., x_{n-1}, y_{n-1}, r_0..r_{n-1}, alpha]``.

    Rows: 4 containment rows per circle (x >= r, x <= alpha - r, y >= r,
    y <= 2 - alpha - r), then n radius rows (r <= alpha/2), then one
    non-overlap row per pair.
    """
    pi, pj = pair_indices(n)
    ir = 2 * n + np.arange(n)
    ix = 2 * np.arange(n)
    iy = ix + 1
    a = np.full(n, 3 * n)
    contain = np.stack(
        [
            np.stack([ix, ir, a], axis=1),
            np.stack([ix, ir, a], axis=1),
            np.stack([iy, ir, a], axis=1),
            np.stack([iy, ir, a], axis=1),
        ],
        axis=1,
    ).ravel()
    radius = np.stack([ir, a], axis=1).ravel()
    pairs = np.stack(
        [2 * pi, 2 * pi + 1, 2 * pj, 2 * pj + 1, 2 * n + pi, 2 * n + pj], axis=1
    ).ravel()
    counts = np.concatenate(
        [np.full(4 * n, 3), np.full(n, 2), np.full(len(pi), 6)]
    )
    return _rows(counts), np.concatenate([contain, radius, pairs]).astype(np.int64)


# -- hexagons ----------------------------------------------------------------

class HexLayout:
    """Index arithmetic for the hexagon model.

    Full layout: ``R, (x_i, y_i)*n, theta*n, a*6n, b*6n, c*6n, lambda*12P``.
    Reduced layout drops a, b, c (they are computed from theta, x, y).
    """

    def __init__(self, n: int, literal: bool):
        self.n = n
        self.literal = literal
        self.pi, self.pj = pair_indices(n)
        self.num_pairs = len(self.pi)
        self.theta0 = 1 + 2 * n
        if literal:
            self.a0 = 1 + 3 * n
            self.b0 = self.a0 + 6 * n
            self.c0 = self.b0 + 6 * n
            self.lam0 = self.c0 + 6 * n
        else:
            self.a0 = self.b0 = self.c0 = -1
            self.lam0 = 1 + 3 * n
        self.num_vars = self.lam0 + 12 * self.num_pairs

    @property
    def num_constraints(self) -> int:
        eqs = 18 * self.n if self.literal else 0
        return 36 * self.n + eqs + 4 * self.num_pairs


def hex_structure(n: int, literal: bool) -> tuple[np.ndarray, np.ndarray]:
    """Containment rows (hexagon, vertex, outer side), then for the literal
    model the a/b/c definition rows, then four Farkas rows per pair
    (sum, x-balance, y-balance, separation)."""
    L = HexLayout(n, literal)
    i = np.arange(n)
    th = L.theta0 + i
    # containment: R, x_i, y_i, theta_i for each of 36 rows of hexagon i
    per_hex = np.stack([np.zeros(n, np.int64), 1 + 2 * i, 2 + 2 * i, th], axis=1)
    contain = np.repeat(per_hex[:, None, :], 36, axis=1).ravel()
    cols = [contain]
    counts = [np.full(36 * n, 4)]
    if literal:
        s = np.arange(6)
        ia = (L.a0 + 6 * i[:, None] + s).ravel()
        ib = (L.b0 + 6 * i[:, None] + s).ravel()
        ic = (L.c0 + 6 * i[:, None] + s).ravel()
        thr = np.repeat(th, 6)
        xr = np.repeat(1 + 2 * i, 6)
        yr = xr + 1
        cols.append(np.stack([ia, thr], axis=1).ravel())
        cols.append(np.stack([ib, thr], axis=1).ravel())
        cols.append(np.stack([ic, ia, ib, xr, yr], axis=1).ravel())
        counts += [np.full(6 * n, 2), np.full(6 * n, 2), np.full(6 * n, 5)]
    P = L.num_pairs
    lam = L.lam0 + 12 * np.arange(P)[:, None] + np.arange(12)
    pi, pj = L.pi, L.pj
    if literal:
        s = np.arange(6)
        side_i = lambda base: base + 6 * pi[:, None] + s  # noqa: E731
        side_j = lambda base: base + 6 * pj[:, None] + s  # noqa: E731
        ab = lambda base: np.concatenate([side_i(base), side_j(base)], axis=1)  # noqa: E731
        per_pair = [
            lam,
            np.concatenate([lam, ab(L.a0)], axis=1),
            np.concatenate([lam, ab(L.b0)], axis=1),
            np.concatenate([lam, ab(L.c0)], axis=1),
        ]
        pair_counts = [12, 24, 24, 24]
    else:
        thi = (L.theta0 + pi)[:, None]
        thj = (L.theta0 + pj)[:, None]
        xi, yi = (1 + 2 * pi)[:, None], (2 + 2 * pi)[:, None]
        xj, yj = (1 + 2 * pj)[:, None], (2 + 2 * pj)[:, None]
        per_pair = [
            lam,
            np.concatenate([lam, thi, thj], axis=1),
            np.concatenate([lam, thi, thj], axis=1),
            np.concatenate([lam, xi, yi, thi, xj, yj, thj], axis=1),
        ]
        pair_counts = [12, 14, 14, 18]
    cols.append(np.concatenate(per_pair, axis=1).ravel())
    counts.append(np.tile(pair_counts, P))
    return _rows(np.concatenate(counts)), np.concatenate(cols).astype(np.int64)
