"""Model builders for the three packing families and codecs between flat
variable vectors and structured configurations.

Variable orderings
------------------
min-max (n points in d dims)
    ``x[i*d + k]`` is coordinate k of point i; the last entry is ``t_max``
    (primal) or ``t_min`` (dual).
circles
    ``x0, y0, x1, y1, ..., r_0, ..., r_{n-1}, alpha``.
hexagons
    ``R, x0, y0, ..., theta_0..theta_{n-1}``, then (literal model only)
    ``a``, ``b``, ``c`` with 6 entries per hexagon, then 12 Farkas
    multipliers per pair ``i < j`` in lexicographic order.

Constraint counts
-----------------
min-max: ``n(n-1)``; circles: ``5n + n(n-1)/2``;
hexagons: ``36n + 18n + 2n(n-1)`` (literal) or ``36n + 2n(n-1)`` (reduced).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import kernels
from .geometry import PHI, RHO, farkas_value
from .kernels.structure import (
    HexLayout,
    circles_structure,
    hex_structure,
    minmax_structure,
    pair_indices,
)
from .nlp import ConstraintBlock, LinearObjective, NlpError, NlpProblem

ALPHA_MIN = 1e-4
SOLVER_ANGLE_BOX = (-2.0 * np.pi, 2.0 * np.pi)


class ModelError(ValueError):
    pass


# -- configurations -----------------------------------------------------------

@dataclass
class PointConfig:
    points: np.ndarray
    t_min: float = 1.0
    t_max: float = 1.0
    formulation: str = "primal"

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[0] < 2:
            raise ModelError("a point configuration needs n >= 2")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def ratio(self) -> float:
        return self.t_max / self.t_min


@dataclass
class CircleConfig:
    centers: np.ndarray
    radii: np.ndarray
    alpha: float = 1.0
    variant: str = "square"

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        self.radii = np.asarray(self.radii, dtype=float).reshape(-1)
        if len(self.radii) != len(self.centers):
            raise ModelError("centers and radii disagree on n")

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def height(self) -> float:
        return 2.0 - self.alpha


@dataclass
class HexConfig:
    R: float
    centers: np.ndarray
    thetas: np.ndarray
    farkas: np.ndarray | None = None  # (n(n-1)/2, 12)

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        self.thetas = np.asarray(self.thetas, dtype=float).reshape(-1)
        if len(self.thetas) != len(self.centers):
            raise ModelError("centers and thetas disagree on n")
        P = self.n * (self.n - 1) // 2
        if self.farkas is None:
            self.farkas = np.full((P, 12), 1.0 / 12.0)
        self.farkas = np.asarray(self.farkas, dtype=float).reshape(P, 12)

    @property
    def n(self) -> int:
        return len(self.thetas)

    def poses(self) -> list[tuple[float, float, float]]:
        return [(float(x), float(y), float(t)) for (x, y), t in zip(self.centers, self.thetas)]

    def halfspace_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(a, b, c)`` arrays of shape (n, 6) derived from centers and angles."""
        ang = self.thetas[:, None] + np.arange(6) * PHI
        a, b = np.sin(ang), np.cos(ang)
        c = a * self.centers[:, :1] + b * self.centers[:, 1:] - RHO
        return a, b, c

    def repair_farkas(self) -> "HexConfig":
        """Replace every pair's multipliers by the best vertex of its Farkas system."""
        poses = self.poses()
        pi, pj = pair_indices(self.n)
        lam = np.array([farkas_value(poses[i], poses[j])[1] for i, j in zip(pi, pj)])
        return HexConfig(self.R, self.centers.copy(), self.thetas.copy(), lam.reshape(-1, 12))


# -- builders -------------------------------------------------------------------

def _pair_labels(n: int, name: str) -> list[str]:
    pi, pj = pair_indices(n)
    return [f"{name}[{i},{j}]" for i, j in zip(pi, pj)]


def _point_labels(n: int, d: int) -> list[str]:
    return [f"x[{i},{k}]" for i in range(n) for k in range(d)]


def _check_minmax(n: int, d: int) -> None:
    if n < 2 or d < 1:
        raise ModelError(f"min-max model needs n >= 2 and d >= 1 (got n={n}, d={d})")


def _minmax(n: int, d: int, dual: bool, pin_first: bool) -> NlpProblem:
    _check_minmax(n, d)
    rows, cols = minmax_structure(n, d)
    labels = _pair_labels(n, "mindist") + _pair_labels(n, "maxdist")
    block = ConstraintBlock(
        kernel=partial(kernels.minmax_eval, n=n, d=d, dual=dual),
        rows=rows,
        cols=cols,
        is_eq=np.zeros(len(labels), dtype=bool),
        labels=tuple(labels),
    )
    box = 1.25 if dual else float(n)
    lower = np.full(n * d + 1, -box)
    upper = np.full(n * d + 1, box)
    if dual:
        lower[-1], upper[-1] = 0.0, 1.0
    else:
        lower[-1], upper[-1] = 1.0, np.inf
    if pin_first:
        lower[:d] = upper[:d] = 0.0
    coeffs = np.zeros(n * d + 1)
    coeffs[-1] = 1.0
    return NlpProblem(
        lower=lower,
        upper=upper,
        sense="max" if dual else "min",
        objective=LinearObjective(coeffs),
        block=block,
        var_labels=tuple(_point_labels(n, d) + ["t_min" if dual else "t_max"]),
        meta={"family": "minmax", "n": n, "d": d,
              "formulation": "dual" if dual else "primal"},
    )


def build_minmax_primal(n: int, d: int, pin_first: bool = False) -> NlpProblem:
    """Minimise ``t_max`` with all squared pair distances in ``[1, t_max]``."""
    return _minmax(n, d, False, pin_first)


def build_minmax_dual(n: int, d: int, pin_first: bool = False) -> NlpProblem:
    """Maximise ``t_min`` with all squared pair distances in ``[t_min, 1]``."""
    return _minmax(n, d, True, pin_first)


def build_circles(n: int, variant: str = "square") -> NlpProblem:
    """Maximise the sum of radii of n circles in a rectangle of perimeter 4.

    The rectangle is ``[0, alpha] x [0, 2 - alpha]``; the square variant
    pins ``alpha = 1``.
    """
    if n < 1:
        raise ModelError(f"circle model needs n >= 1 (got {n})")
    if variant not in ("square", "rectangle"):
        raise ModelError(f"unknown circle variant {variant!r}")
    rows, cols = circles_structure(n)
    labels = []
    for i in range(n):
        labels += [f"left[{i}]", f"right[{i}]", f"bottom[{i}]", f"top[{i}]"]
    labels += [f"radius_cap[{i}]" for i in range(n)]
    labels += _pair_labels(n, "overlap")
    block = ConstraintBlock(
        kernel=partial(kernels.circles_eval, n=n),
        rows=rows,
        cols=cols,
        is_eq=np.zeros(len(labels), dtype=bool),
        labels=tuple(labels),
    )
    lower = np.concatenate([np.zeros(3 * n), [ALPHA_MIN]])
    upper = np.concatenate([np.tile([1.0, 2.0], n), np.full(n, 0.5), [1.0]])
    if variant == "square":
        lower[-1] = 1.0
    coeffs = np.zeros(3 * n + 1)
    coeffs[2 * n : 3 * n] = 1.0
    var_labels = [f"{c}[{i}]" for i in range(n) for c in "xy"]
    var_labels += [f"r[{i}]" for i in range(n)] + ["alpha"]
    return NlpProblem(
        lower=lower,
        upper=upper,
        sense="max",
        objective=LinearObjective(coeffs),
        block=block,
        var_labels=tuple(var_labels),
        meta={"family": "circles", "n": n, "variant": variant},
    )


def hex_box(n: int) -> float:
    """Half-width of the box holding hexagon centers."""
    return 2.0 * np.sqrt(n)


def build_hexagons(n: int, eliminate: bool = False,
                   angle_box: tuple[float, float] = (0.0, PHI)) -> NlpProblem:
    """Minimise the side ``R`` of a regular hexagon holding n unit hexagons.

    With ``eliminate=True`` the half-space variables ``a, b, c`` are
    substituted by their defining expressions, removing 18n equalities.
    ``angle_box`` bounds every rotation; the six-fold symmetry makes any
    interval of length ``pi/3`` sufficient, wider boxes only help local
    solvers move across the seam.
    """
    if n < 1:
        raise ModelError(f"hexagon model needs n >= 1 (got {n})")
    literal = not eliminate
    L = HexLayout(n, literal)
    rows, cols = hex_structure(n, literal)
    labels = [f"contain[{i},v{j},s{k}]" for i in range(n) for j in range(6) for k in range(6)]
    if literal:
        for name in ("normal_a", "normal_b", "offset_c"):
            labels += [f"{name}[{i},{j}]" for i in range(n) for j in range(6)]
    n_eq_block = len(labels)
    for i, j in zip(L.pi, L.pj):
        labels += [f"{name}[{i},{j}]" for name in
                   ("farkas_sum", "farkas_x", "farkas_y", "farkas_sep")]
    is_eq = np.zeros(len(labels), dtype=bool)
    is_eq[36 * n : n_eq_block] = True
    is_eq[n_eq_block:] = True
    is_eq[n_eq_block + 3 :: 4] = False
    block = ConstraintBlock(
        kernel=partial(kernels.hex_eval, n=n, literal=literal),
        rows=rows,
        cols=cols,
        is_eq=is_eq,
        labels=tuple(labels),
    )
    rmax = hex_box(n)
    lower = np.empty(L.num_vars)
    upper = np.empty(L.num_vars)
    lower[0], upper[0] = np.sqrt(n), rmax + 1.0
    lower[1 : 1 + 2 * n], upper[1 : 1 + 2 * n] = -rmax, rmax
    lower[L.theta0 : L.theta0 + n], upper[L.theta0 : L.theta0 + n] = angle_box
    var_labels = ["R"] + [f"{c}[{i}]" for i in range(n) for c in "xy"]
    var_labels += [f"theta[{i}]" for i in range(n)]
    if literal:
        cmax = np.sqrt(2.0) * rmax + 1.0
        lower[L.a0 : L.c0], upper[L.a0 : L.c0] = -1.0, 1.0
        lower[L.c0 : L.lam0], upper[L.c0 : L.lam0] = -cmax, cmax
        for name in "abc":
            var_labels += [f"{name}[{i},{j}]" for i in range(n) for j in range(6)]
    lower[L.lam0 :], upper[L.lam0 :] = 0.0, 1.0
    var_labels += [f"lambda[{i},{j},{k}]" for i, j in zip(L.pi, L.pj) for k in range(1, 13)]
    coeffs = np.zeros(L.num_vars)
    coeffs[0] = 1.0
    return NlpProblem(
        lower=lower,
        upper=upper,
        sense="min",
        objective=LinearObjective(coeffs),
        block=block,
        var_labels=tuple(var_labels),
        meta={"family": "hexagons", "n": n, "literal": literal},
    )


def build(family: str, n: int, d: int = 2, variant: str = "square",
          formulation: str = "primal", eliminate: bool = True) -> NlpProblem:
    """Dispatch to a family builder.

    This is the solver-facing entry point: hexagon equalities are eliminated
    by default and, when they are, rotations get the free box
    ``SOLVER_ANGLE_BOX``.
    """
    if family == "minmax":
        if formulation not in ("primal", "dual"):
            raise ModelError(f"unknown formulation {formulation!r}")
        return _minmax(n, d, formulation == "dual", False)
    if family == "circles":
        return build_circles(n, variant)
    if family == "hexagons":
        box = SOLVER_ANGLE_BOX if eliminate else (0.0, PHI)
        return build_hexagons(n, eliminate=eliminate, angle_box=box)
    raise ModelError(f"unknown family {family!r}")


# -- codecs ---------------------------------------------------------------------

def encode(problem: NlpProblem, config) -> np.ndarray:
    """Flatten a configuration into ``problem``'s variable vector."""
    fam = problem.family
    m = problem.meta
    if fam == "minmax":
        if not isinstance(config, PointConfig) or config.points.shape != (m["n"], m["d"]):
            raise NlpError("point configuration does not match the model dimensions")
        last = config.t_min if m["formulation"] == "dual" else config.t_max
        return np.concatenate([config.points.ravel(), [last]])
    if fam == "circles":
        if not isinstance(config, CircleConfig) or config.n != m["n"]:
            raise NlpError("circle configuration does not match the model dimensions")
        return np.concatenate([config.centers.ravel(), config.radii, [config.alpha]])
    if fam == "hexagons":
        if not isinstance(config, HexConfig) or config.n != m["n"]:
            raise NlpError("hexagon configuration does not match the model dimensions")
        parts = [[config.R], config.centers.ravel(), config.thetas]
        if m["literal"]:
            parts += [v.ravel() for v in config.halfspace_arrays()]
        parts.append(config.farkas.ravel())
        return np.concatenate(parts)
    raise NlpError(f"problem family {fam!r} has no codec")


def decode(problem: NlpProblem, x) -> PointConfig | CircleConfig | HexConfig:
    x = problem.check_x(x)
    m = problem.meta
    n = m["n"]
    if problem.family == "minmax":
        d = m["d"]
        pts = x[: n * d].reshape(n, d).copy()
        if m["formulation"] == "dual":
            return PointConfig(pts, t_min=float(x[-1]), t_max=1.0, formulation="dual")
        return PointConfig(pts, t_min=1.0, t_max=float(x[-1]), formulation="primal")
    if problem.family == "circles":
        return CircleConfig(x[: 2 * n].reshape(n, 2).copy(), x[2 * n : 3 * n].copy(),
                            float(x[3 * n]), m["variant"])
    if problem.family == "hexagons":
        L = HexLayout(n, m["literal"])
        return HexConfig(float(x[0]), x[1 : 1 + 2 * n].reshape(n, 2).copy(),
                         x[L.theta0 : L.theta0 + n].copy(),
                         x[L.lam0 :].reshape(-1, 12).copy())
    raise NlpError(f"problem family {problem.family!r} has no codec")


# -- min-max scale transforms ---------------------------------------------------------

def primal_to_dual(config: PointConfig) -> PointConfig:
    """Scale a primal solution (``t_min = 1``) to the dual normalisation."""
    s = 1.0 / np.sqrt(config.t_max)
    return PointConfig(config.points * s, t_min=1.0 / config.t_max, t_max=1.0,
                       formulation="dual")


def dual_to_primal(config: PointConfig) -> PointConfig:
    s = 1.0 / np.sqrt(config.t_min)
    return PointConfig(config.points * s, t_min=1.0, t_max=1.0 / config.t_min,
                       formulation="primal")


# -- feasible witnesses -----------------------------------------------------------------

def _grid_points(n: int, d: int) -> np.ndarray:
    side = 1
    while side**d < n:
        side += 1
    grid = np.stack(np.meshgrid(*[np.arange(side)] * d, indexing="ij"), axis=-1)
    return grid.reshape(-1, d)[:n].astype(float)


def hex_lattice_sites(n: int, spacing: float) -> np.ndarray:
    """The n sites of a triangular lattice nearest the origin (deterministic order)."""
    k = int(np.ceil(np.sqrt(n))) + 2
    u = spacing * np.array([np.sin(PHI), np.cos(PHI)])
    v = spacing * np.array([0.0, 1.0])
    ij = np.stack(np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1), indexing="ij"), -1)
    pts = ij.reshape(-1, 2) @ np.stack([u, v])
    r = np.round(np.hypot(pts[:, 0], pts[:, 1]), 9)
    ang = np.round(np.arctan2(pts[:, 1], pts[:, 0]), 9)
    order = np.lexsort((ang, r))
    return pts[order[:n]]


def hex_required_R(centers, thetas) -> float:
    """Smallest outer side length containing every vertex."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    thetas = np.asarray(thetas, dtype=float).reshape(-1)
    ang = thetas[:, None] + (np.arange(6) + 0.5) * PHI
    vx = centers[:, :1] + np.sin(ang)
    vy = centers[:, 1:] + np.cos(ang)
    k = np.arange(6) * PHI
    proj = -(vx[..., None] * np.sin(k) + vy[..., None] * np.cos(k))
    return float(proj.max() / RHO)


def feasible_witness(problem: NlpProblem) -> np.ndarray:
    """A hand-built feasible point for any model produced by this module."""
    m = problem.meta
    n = m["n"]
    if problem.family == "minmax":
        pts = _grid_points(n, m["d"])
        pts -= pts.mean(axis=0).round()
        diff = pts[:, None, :] - pts[None, :, :]
        tmax = float((diff**2).sum(-1).max())
        cfg = PointConfig(pts, t_min=1.0, t_max=tmax)
        if m["formulation"] == "dual":
            cfg = primal_to_dual(cfg)
        return encode(problem, cfg)
    if problem.family == "circles":
        centers = np.zeros((n, 2))
        centers[0] = 0.5
        radii = np.zeros(n)
        radii[0] = 0.5
        return encode(problem, CircleConfig(centers, radii, 1.0, m["variant"]))
    if problem.family == "hexagons":
        centers = hex_lattice_sites(n, np.sqrt(3.0))
        thetas = np.zeros(n)
        R = max(np.sqrt(n), hex_required_R(centers, thetas))
        return encode(problem, HexConfig(R, centers, thetas).repair_farkas())
    raise NlpError(f"problem family {problem.family!r} has no witness")
