"""Independent certification of candidate solutions.

Every check works from the geometry alone: point coordinates, circle
centers and radii, hexagon poses. Stored auxiliary variables (``t_max``,
Farkas multipliers) are never trusted. Near-feasible solutions are repaired
in the pessimistic direction before their objective is certified, and the
certified value is rounded against the optimiser (up for minimisation, down
for maximisation) at five decimals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Decimal

import numpy as np

from .geometry import (
    DISJOINT,
    OVERLAPPING,
    TOUCHING,
    FarkasCertificate,
    classify,
    find_farkas,
    separation,
)
from .kernels.structure import pair_indices
from .models import CircleConfig, HexConfig, PointConfig, hex_required_R

DEFAULT_TOL = 1e-9
DECIMALS = 5
SNAP_REL = 1e-12
_STEP = Decimal(1).scaleb(-DECIMALS)

__all__ = [
    "DEFAULT_TOL",
    "DISJOINT",
    "OVERLAPPING",
    "TOUCHING",
    "FarkasCertificate",
    "Verdict",
    "circle_violations",
    "find_farkas",
    "hex_overlap_oracle",
    "report_value",
    "validate",
    "validate_circles",
    "validate_hexagons",
    "validate_minmax",
]


@dataclass
class Verdict:
    feasible: bool
    max_violation: float
    certified_objective: float
    reported_value: str | None
    sense: str
    violations: list[tuple[str, float]] = field(default_factory=list)
    claimed_objective: float | None = None
    repaired: bool = False
    config: object = None

    def worst(self, k: int = 5) -> list[tuple[str, float]]:
        return sorted(self.violations, key=lambda v: -v[1])[:k]


def report_value(sense: str, raw: float) -> str:
    """Round ``raw`` at five decimals in the pessimistic direction.

    Up for minimisation, down for maximisation. A value within
    ``SNAP_REL`` (relative) of a five-decimal grid point is reported as that
    point, so that floating-point noise on an exact optimum such as 1 or 0.5
    does not push it across the grid.

    >>> report_value("min", 3.9248401)
    '3.92485'
    >>> report_value("max", 2.9395799)
    '2.93957'
    >>> report_value("min", 1.0 + 2e-16)
    '1.00000'
    """
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    raw = float(raw)
    if not math.isfinite(raw):
        raise ValueError(f"cannot report a non-finite value ({raw})")
    exact = Decimal(raw)
    nearest = exact.quantize(_STEP, rounding=ROUND_HALF_EVEN)
    if abs(exact - nearest) <= Decimal(SNAP_REL * max(1.0, abs(raw))):
        return str(nearest)
    mode = ROUND_CEILING if sense == "min" else ROUND_FLOOR
    return str(exact.quantize(_STEP, rounding=mode))


def _labelled(values: np.ndarray, labels: list[str]) -> list[tuple[str, float]]:
    idx = np.flatnonzero(values > 0.0)
    return [(labels[k], float(values[k])) for k in idx]


# -- min-max ratio ------------------------------------------------------------------

def validate_minmax(config: PointConfig, tol: float = DEFAULT_TOL) -> Verdict:
    """Certify the squared max/min distance ratio of a point set.

    The repaired configuration is rescaled so that its smallest squared
    distance is exactly one.
    """
    pts = np.asarray(config.points, dtype=float)
    n = len(pts)
    claimed = config.t_max / config.t_min if config.t_min > 0 else math.inf
    if n < 2:
        raise ValueError("need at least two points")
    if not np.all(np.isfinite(pts)):
        return Verdict(False, math.inf, math.nan, None, "min",
                       [("finite_coordinates", math.inf)], claimed)
    pi, pj = pair_indices(n)
    D = ((pts[pi] - pts[pj]) ** 2).sum(axis=1)
    dmin, dmax = float(D.min()), float(D.max())
    labels = [f"[{i},{j}]" for i, j in zip(pi, pj)]
    # violations of the configuration as stored, in its own normalisation
    raw = _labelled(config.t_min - D, ["mindist" + s for s in labels])
    raw += _labelled(D - config.t_max, ["maxdist" + s for s in labels])
    if dmin <= 0.0:
        dup = [("duplicate" + labels[k], 0.0) for k in np.flatnonzero(D <= 0.0)]
        return Verdict(False, math.inf, math.inf, None, "min", dup + raw, claimed)
    ratio = dmax / dmin
    scaled = PointConfig(pts / math.sqrt(dmin), t_min=1.0, t_max=ratio, formulation="primal")
    return Verdict(
        feasible=True,
        max_violation=0.0,
        certified_objective=ratio,
        reported_value=report_value("min", ratio),
        sense="min",
        violations=raw,
        claimed_objective=claimed,
        repaired=bool(raw),
        config=scaled,
    )


# -- circles -------------------------------------------------------------------------

def circle_violations(config: CircleConfig) -> np.ndarray:
    """Signed geometric violations (positive = violated) in a fixed order:
    left, right, bottom, top per circle, radius cap, radius sign, then pairs."""
    c, r, a = config.centers, config.radii, config.alpha
    h = 2.0 - a
    x, y = c[:, 0], c[:, 1]
    pi, pj = pair_indices(config.n)
    dist = np.hypot(x[pi] - x[pj], y[pi] - y[pj])
    return np.concatenate([
        np.stack([r - x, x + r - a, r - y, y + r - h], axis=1).ravel(),
        r - a / 2.0,
        -r,
        r[pi] + r[pj] - dist,
    ])


def _circle_labels(n: int) -> list[str]:
    labels = []
    for i in range(n):
        labels += [f"left[{i}]", f"right[{i}]", f"bottom[{i}]", f"top[{i}]"]
    labels += [f"radius_cap[{i}]" for i in range(n)]
    labels += [f"radius_sign[{i}]" for i in range(n)]
    pi, pj = pair_indices(n)
    return labels + [f"overlap[{i},{j}]" for i, j in zip(pi, pj)]


def validate_circles(config: CircleConfig, tol: float = DEFAULT_TOL) -> Verdict:
    """Certify the sum of radii; violations are repaired by shrinking every
    radius by the largest violation (radii never grow)."""
    claimed = float(np.sum(config.radii))
    alpha = float(config.alpha)
    bad_alpha = not (0.0 < alpha <= 1.0) or (config.variant == "square" and alpha != 1.0)
    if bad_alpha or not (np.all(np.isfinite(config.centers)) and np.all(np.isfinite(config.radii))):
        return Verdict(False, math.inf, math.nan, None, "max",
                       [("alpha" if bad_alpha else "finite_values", math.inf)], claimed)
    viol = circle_violations(config)
    raw = _labelled(viol, _circle_labels(config.n))
    fixed = CircleConfig(config.centers.copy(), config.radii.copy(), alpha, config.variant)
    worst = float(viol.max(initial=0.0))
    rounds = 0
    while worst > 0.0 and rounds < 10:
        fixed.radii = np.maximum(fixed.radii - worst * (1.0 + 1e-9) - 1e-16, 0.0)
        worst = float(circle_violations(fixed).max(initial=0.0))
        rounds += 1
    certified = float(np.sum(fixed.radii))
    remaining = max(worst, 0.0)
    return Verdict(
        feasible=remaining <= tol,
        max_violation=remaining,
        certified_objective=certified,
        reported_value=report_value("max", certified),
        sense="max",
        violations=raw,
        claimed_objective=claimed,
        repaired=rounds > 0,
        config=fixed,
    )


# -- hexagons -------------------------------------------------------------------------

def hex_overlap_oracle(A, B, tol: float = 1e-12) -> str:
    """Classify two unit hexagon poses ``(cx, cy, theta)`` by separating axes.

    Returns ``"disjoint"``, ``"touching"`` (projection gap within ``tol`` of
    zero) or ``"overlapping"``. Independent of any Farkas multipliers.
    """
    return classify(A, B, tol)


def validate_hexagons(config: HexConfig, tol: float = DEFAULT_TOL) -> Verdict:
    """Certify the outer side length; containment is repaired by inflating
    ``R``, pairwise overlap is not repairable."""
    n = config.n
    claimed = float(config.R)
    if not (np.all(np.isfinite(config.centers)) and np.all(np.isfinite(config.thetas))
            and math.isfinite(claimed)):
        return Verdict(False, math.inf, math.nan, None, "min",
                       [("finite_values", math.inf)], claimed)
    need = hex_required_R(config.centers, config.thetas)
    violations = []
    if need > claimed:
        violations.append(("containment", need - claimed))
    R = max(claimed, need)
    poses = config.poses()
    pi, pj = pair_indices(n)
    worst = 0.0
    for i, j in zip(pi, pj):
        gap = separation(poses[i], poses[j])
        if gap < 0.0:
            violations.append((f"overlap[{i},{j}]", -gap))
            worst = max(worst, -gap)
    area_deficit = math.sqrt(n) - R
    if area_deficit > 0.0:
        violations.append(("area_bound", area_deficit))
    remaining = max(worst, area_deficit, 0.0)
    fixed = HexConfig(R, config.centers.copy(), config.thetas.copy(), config.farkas.copy())
    return Verdict(
        feasible=remaining <= tol,
        max_violation=remaining,
        certified_objective=R,
        reported_value=report_value("min", R),
        sense="min",
        violations=violations,
        claimed_objective=claimed,
        repaired=R > claimed,
        config=fixed,
    )


def validate(config, tol: float = DEFAULT_TOL) -> Verdict:
    if isinstance(config, PointConfig):
        return validate_minmax(config, tol)
    if isinstance(config, CircleConfig):
        return validate_circles(config, tol)
    if isinstance(config, HexConfig):
        return validate_hexagons(config, tol)
    raise TypeError(f"cannot validate {type(config).__name__}")
