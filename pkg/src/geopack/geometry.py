"""Unit regular hexagon geometry: vertices, half-spaces, separating axes and
Farkas separation multipliers.

A hexagon pose is ``(cx, cy, theta)``. Side ``j`` carries the unit normal
``n_j = (sin(theta + j*pi/3), cos(theta + j*pi/3))`` and the hexagon is the
set ``{p : n_j . p >= n_j . c - rho for all j}``; normals come in opposite
pairs, so this is the hexagon of apothem ``rho`` with vertices at angles
``theta + (j + 1/2) * pi/3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

RHO = np.sqrt(3.0) / 2.0
PHI = np.pi / 3.0
_K = np.arange(6)
_TRIPLES = np.array(list(combinations(range(12), 3)), dtype=np.int64)

DISJOINT = "disjoint"
TOUCHING = "touching"
OVERLAPPING = "overlapping"


@dataclass(frozen=True)
class HexHalfSpaces:
    """Rows ``a_j x + b_j y >= c_j`` for the six sides of one hexagon."""

    normals: np.ndarray  # (6, 2), unit rows
    offsets: np.ndarray  # (6,)

    def slack(self, p) -> np.ndarray:
        return self.normals @ np.asarray(p, dtype=float) - self.offsets


def vertices(cx: float, cy: float, theta: float, side: float = 1.0) -> np.ndarray:
    ang = theta + (_K + 0.5) * PHI
    return np.stack([cx + side * np.sin(ang), cy + side * np.cos(ang)], axis=1)


def halfspaces(cx: float, cy: float, theta: float) -> HexHalfSpaces:
    ang = theta + _K * PHI
    normals = np.stack([np.sin(ang), np.cos(ang)], axis=1)
    return HexHalfSpaces(normals, normals @ np.array([cx, cy]) - RHO)


def separation(A, B) -> float:
    """Largest projection gap of two unit hexagons over all 12 edge normals.

    Positive means a separating line exists, zero means contact, negative is
    the smallest penetration depth over the tested axes.
    """
    va = vertices(*A)
    vb = vertices(*B)
    ang = np.concatenate([A[2] + _K[:3] * PHI, B[2] + _K[:3] * PHI])
    axes = np.stack([np.sin(ang), np.cos(ang)], axis=1)
    pa = va @ axes.T
    pb = vb @ axes.T
    gap = np.maximum(pb.min(axis=0) - pa.max(axis=0), pa.min(axis=0) - pb.max(axis=0))
    return float(gap.max())


def classify(A, B, tol: float = 1e-12) -> str:
    gap = separation(A, B)
    if gap > tol:
        return DISJOINT
    if gap >= -tol:
        return TOUCHING
    return OVERLAPPING


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers proving two hexagon interiors are disjoint.

    ``lam[:6]`` weight the sides of the first hexagon, ``lam[6:]`` the second.
    """

    lam: np.ndarray
    sum_residual: float
    x_residual: float
    y_residual: float
    separation: float  # sum_k lam_k c_k, must be >= 0


def _pair_system(A, B):
    ha, hb = halfspaces(*A), halfspaces(*B)
    N = np.concatenate([ha.normals, hb.normals])
    c = np.concatenate([ha.offsets, hb.offsets])
    M = np.vstack([np.ones(12), N.T])
    return M, c


def farkas_value(A, B) -> tuple[float, np.ndarray]:
    """Maximise ``c . lam`` over ``{lam >= 0, sum lam = 1, N^T lam = 0}``.

    The feasible set has three equality rows, so every vertex is a basic
    solution on some triple of columns; all 220 triples are enumerated.
    Returns ``(value, lam)``; value is ``-inf`` if no basic solution is
    feasible (cannot happen for two hexagons, whose normals span the plane).
    """
    M, c = _pair_system(A, B)
    sub = M[:, _TRIPLES].transpose(1, 0, 2)
    det = np.linalg.det(sub)
    ok = np.abs(det) > 1e-13
    rhs = np.broadcast_to(np.array([1.0, 0.0, 0.0]), (int(ok.sum()), 3))
    sol = np.linalg.solve(sub[ok], rhs[..., None])[..., 0]
    feas = np.all(sol >= -1e-12, axis=1)
    if not feas.any():
        return -np.inf, np.zeros(12)
    sol = np.clip(sol[feas], 0.0, None)
    trip = _TRIPLES[ok][feas]
    vals = np.einsum("tk,tk->t", sol, c[trip])
    best = int(np.argmax(vals))
    lam = np.zeros(12)
    lam[trip[best]] = sol[best]
    lam /= lam.sum()
    return float(c @ lam), lam


def find_farkas(A, B, tol: float = 1e-9) -> FarkasCertificate | None:
    value, lam = farkas_value(A, B)
    if not value >= -tol:
        return None
    M, c = _pair_system(A, B)
    res = M @ lam
    return FarkasCertificate(lam, float(res[0] - 1.0), float(res[1]), float(res[2]), float(c @ lam))
