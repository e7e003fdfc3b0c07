"""Multi-start augmented Lagrangian solver.

Each restart samples a family-aware starting point and runs an augmented
Lagrangian outer loop whose box-constrained subproblems are minimised with
L-BFGS-B. The best feasible restart is polished with tighter tolerances and
then geometrically repaired so the returned point is feasible to rounding.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from . import kernels
from .geometry import PHI, separation
from .kernels.structure import pair_indices
from .models import (
    CircleConfig,
    HexConfig,
    decode,
    encode,
    hex_box,
    hex_lattice_sites,
    hex_required_R,
)
from .nlp import NlpProblem

log = logging.getLogger(__name__)

MU_INIT = 10.0
MU_GROWTH = 5.0
MU_MAX = 1e10
VIOLATION_SHRINK = 0.25
MULTIPLIER_CAP = 1e12
HEX_SEED_SPACING = 1.6
HEX_SEED_JITTER = 0.3
ACTIVE_TOL = 1e-7


@dataclass(frozen=True)
class SolveOptions:
    restarts: int = 64
    seed: int = 0
    time_limit: float | None = None
    feas_tol: float = 1e-9
    opt_tol: float = 1e-8
    max_outer_iters: int = 50
    max_inner_iters: int = 500
    threads: int | None = None  # None: GEOPACK_THREADS or 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.feas_tol <= 0 or self.opt_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class RestartStat:
    index: int
    objective: float
    violation: float
    iterations: int
    converged: bool


@dataclass
class SolveReport:
    best_x: np.ndarray
    best_objective: float
    feasible: bool
    max_violation: float
    best_restart: int
    restart_stats: list[RestartStat] = field(default_factory=list)
    wall_time: float = 0.0
    seed_used: int = 0


def thread_count(opts: SolveOptions) -> int:
    if opts.threads is not None:
        return max(1, int(opts.threads))
    try:
        return max(1, int(os.environ.get("GEOPACK_THREADS", "1")))
    except ValueError:
        return 1


# -- augmented Lagrangian -------------------------------------------------------------

class _Merit:
    """Augmented Lagrangian of ``sign * f`` for fixed multipliers and penalty."""

    def __init__(self, problem: NlpProblem, sign: float):
        self.problem = problem
        self.c = np.ascontiguousarray(sign * problem.objective.coeffs)
        self.is_eq = np.ascontiguousarray(problem.block.is_eq, dtype=np.uint8)
        self.rows = problem.block.rows
        self.cols = problem.block.cols
        self.y = np.zeros(problem.num_constraints)
        self.mu = MU_INIT

    def __call__(self, x):
        x = np.ascontiguousarray(x, dtype=float)
        g, jv = self.problem.jacobian(x)
        val, grad, _ = kernels.al_merit(self.c, x, g, jv, self.rows, self.cols,
                                        self.y, self.mu, self.is_eq)
        if not np.isfinite(val):
            return 1e300, np.zeros_like(x)
        return val, grad

    def shifted(self, g):
        w = self.y + self.mu * g
        return np.where(self.is_eq, w, np.maximum(w, 0.0))

    def projected_gradient(self, x, jv, y):
        grad = self.c + self.problem.jt_dot(jv, y)
        p = self.problem
        return float(np.max(np.abs(x - np.clip(x - grad, p.lower, p.upper)), initial=0.0))


def local_solve(problem: NlpProblem, x0, opts: SolveOptions = SolveOptions(),
                trace: list | None = None) -> tuple[np.ndarray, bool]:
    """Run one augmented Lagrangian solve from ``x0``.

    Returns ``(x, converged)``. ``converged`` means the violation is at most
    ``feas_tol`` and the projected Lagrangian gradient at most ``opt_tol``;
    otherwise ``x`` is the best iterate seen (feasible first, then objective).
    If ``trace`` is a list, one list of merit values per outer iteration is
    appended to it.
    """
    x, converged, _ = _augmented_lagrangian(problem, x0, opts, trace)
    return x, converged


def _augmented_lagrangian(problem, x0, opts, trace=None):
    lo, hi = problem.lower, problem.upper
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    sign = 1.0 if problem.sense == "min" else -1.0
    merit = _Merit(problem, sign)
    bounds = list(zip(np.where(np.isfinite(lo), lo, None), np.where(np.isfinite(hi), hi, None)))

    def rank(xv, viol):
        return (viol > opts.feas_tol, viol if viol > opts.feas_tol else sign * problem.objective(xv))

    g, jv = problem.jacobian(x)
    viol = problem.violation(x, g)
    best = (rank(x, viol), x.copy())
    prev_viol = viol
    failures = 0
    iters = 0
    for _ in range(opts.max_outer_iters):
        steps = [] if trace is not None else None
        callback = (lambda xk: steps.append(merit(xk)[0])) if trace is not None else None
        if steps is not None:
            steps.append(merit(x)[0])
        res = minimize(merit, x, jac=True, method="L-BFGS-B", bounds=bounds,
                       callback=callback,
                       options={"maxiter": opts.max_inner_iters, "gtol": opts.opt_tol * 0.1,
                                "ftol": 1e-16})
        iters += int(res.nit)
        if trace is not None:
            trace.append(steps)
        if not np.all(np.isfinite(res.x)):
            failures += 1
            if failures >= 3:
                return best[1], False, iters
            merit.mu = max(MU_INIT, merit.mu / 2.0)
            continue
        x = np.clip(res.x, lo, hi)
        g, jv = problem.jacobian(x)
        viol = problem.violation(x, g)
        y_new = np.clip(merit.shifted(g), -MULTIPLIER_CAP, MULTIPLIER_CAP)
        cand = rank(x, viol)
        if cand < best[0]:
            best = (cand, x.copy())
        pg = merit.projected_gradient(x, jv, y_new)
        merit.y = y_new
        if viol <= opts.feas_tol and pg <= opts.opt_tol:
            return x, True, iters
        if viol > opts.feas_tol and viol > VIOLATION_SHRINK * prev_viol:
            merit.mu = min(merit.mu * MU_GROWTH, MU_MAX)
        prev_viol = viol
    return best[1], False, iters


# -- starting points -----------------------------------------------------------------

def restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])


def initial_sample(problem: NlpProblem, rng: np.random.Generator,
                   repair_multipliers: bool = True,
                   hex_spacing: float = HEX_SEED_SPACING,
                   hex_jitter: float = HEX_SEED_JITTER) -> np.ndarray:
    """Family-aware random start for ``problem`` (deterministic given ``rng``).

    min-max
        scrambled Halton points with Gaussian jitter, scaled so the start is
        feasible (min squared distance 1, or max squared distance 1 for the
        dual) when the coordinate box allows it.
    circles
        n random cells of a ``ceil(sqrt(n))`` grid, radius about a quarter
        cell, jittered inside the cell; feasible by construction.
    hexagons
        a triangular lattice with spacing ``hex_spacing`` and uniform jitter
        of at most ``hex_jitter`` per coordinate, uniform rotations, side
        ``1.2 sqrt(n)`` and multipliers drawn uniformly on the simplex, then
        replaced by the best Farkas vertex of each pair unless
        ``repair_multipliers`` is false. The default
        spacing is below ``sqrt(3)``, so seeds overlap and the solver pushes
        them apart; spacing ``s`` with ``s - 2 sqrt(2) hex_jitter >= 2``
        gives disjoint seeds.
    """
    m = problem.meta
    n = m.get("n", 0)
    fam = problem.family
    if fam == "minmax":
        d = m["d"]
        pts = qmc.Halton(d, scramble=True, seed=rng).random(n)
        pts += rng.normal(scale=0.05 / n ** (1.0 / d), size=pts.shape)
        pts -= pts.mean(axis=0)
        diff = pts[:, None, :] - pts[None, :, :]
        D = (diff**2).sum(-1)[np.triu_indices(n, 1)]
        dmin, dmax = max(D.min(), 1e-12), D.max()
        if m["formulation"] == "dual":
            pts /= np.sqrt(dmax)
            x = np.concatenate([pts.ravel(), [dmin / dmax]])
        else:
            scale = min(1.0 / np.sqrt(dmin), 0.9 * n / np.abs(pts).max())
            pts *= scale
            x = np.concatenate([pts.ravel(), [max(1.0, dmax * scale**2)]])
        return np.clip(x, problem.lower, problem.upper)
    if fam == "circles":
        k = int(np.ceil(np.sqrt(n)))
        h = 1.0 / k
        cells = rng.choice(k * k, size=n, replace=False)
        r = h / 4.0 * rng.uniform(0.5, 1.5, size=n)
        base = np.stack([cells % k, cells // k], axis=1) * h + h / 2.0
        slack = (h / 2.0 - r)[:, None]
        centers = base + rng.uniform(-1.0, 1.0, size=(n, 2)) * slack
        return encode(problem, CircleConfig(centers, r, 1.0, m["variant"]))
    if fam == "hexagons":
        R0 = 1.2 * np.sqrt(n)
        sites = hex_lattice_sites(n, hex_spacing)
        sites -= sites.mean(axis=0)
        sites += rng.uniform(-hex_jitter, hex_jitter, size=sites.shape)
        thetas = rng.uniform(0.0, PHI, size=n)
        lam = rng.dirichlet(np.ones(12), size=n * (n - 1) // 2)
        cfg = HexConfig(R0, sites, thetas, lam)
        if repair_multipliers:
            cfg = cfg.repair_farkas()
        return np.clip(encode(problem, cfg), problem.lower, problem.upper)
    # any other problem: uniform in the box, standard normal on infinite sides
    lo = np.where(np.isfinite(problem.lower), problem.lower, -np.inf)
    hi = np.where(np.isfinite(problem.upper), problem.upper, np.inf)
    x = rng.standard_normal(problem.num_vars)
    both = np.isfinite(lo) & np.isfinite(hi)
    x[both] = rng.uniform(lo[both], hi[both])
    return np.clip(x, lo, hi)


# -- final refinement and repair -------------------------------------------------------------

def refine(problem: NlpProblem, x, iters: int = 8) -> np.ndarray:
    """Gauss-Newton on the active constraints, taken as equalities.

    Removes the last ~1e-10 of constraint residual the augmented Lagrangian
    leaves behind, so that optimal values land on their exact decimals.
    Variables at a bound and inactive constraints are left alone.
    """
    lo, hi = problem.lower, problem.upper
    x = np.array(x, dtype=float)
    g, _ = problem.jacobian(x)
    active = problem.block.is_eq | (g > -ACTIVE_TOL)
    free = (x > lo + 1e-12) & (x < hi - 1e-12)
    if not active.any() or not free.any():
        return x
    resid = float(np.abs(g[active]).max())
    for _ in range(iters):
        if resid <= 1e-15:
            break
        J = problem.jacobian_dense(x)[np.ix_(active, free)]
        step = np.linalg.lstsq(J, -g[active], rcond=1e-12)[0]
        x_new = x.copy()
        x_new[free] = np.clip(x[free] + step, lo[free], hi[free])
        g_new, _ = problem.jacobian(x_new)
        r_new = float(np.abs(g_new[active]).max())
        if not r_new < resid:
            break
        x, g, resid = x_new, g_new, r_new
    return x


def repair(problem: NlpProblem, x) -> np.ndarray:
    """Move a near-feasible point to exact feasibility without improving it.

    Problems outside the three packing families are returned unchanged.
    """
    fam = problem.family
    if fam not in ("minmax", "circles", "hexagons"):
        return np.asarray(x, dtype=float)
    cfg = decode(problem, x)
    if fam == "minmax":
        pts = cfg.points
        pi, pj = pair_indices(len(pts))

        def sqdist(p):
            return ((p[pi] - p[pj]) ** 2).sum(axis=1)

        D = sqdist(pts)
        if D.min() <= 0.0:  # coincident points: nothing to rescale
            return np.asarray(x, dtype=float)
        if cfg.formulation == "dual":
            pts = pts / np.sqrt(D.max())
            while sqdist(pts).max() > 1.0:
                pts = pts * (1.0 - 2.0**-52)
            cfg.t_min = float(sqdist(pts).min())
        else:
            pts = pts / np.sqrt(D.min())
            while sqdist(pts).min() < 1.0:
                pts = pts * (1.0 + 2.0**-52)
            cfg.t_max = float(sqdist(pts).max())
        cfg.points = pts
        return encode(problem, cfg)
    if fam == "circles":
        from .validator import circle_violations

        for _ in range(5):
            worst = float(circle_violations(cfg).max(initial=0.0))
            if worst <= 0.0:
                break
            cfg.radii = np.maximum(cfg.radii - worst * (1.0 + 1e-9) - 1e-16, 0.0)
        return encode(problem, cfg)
    # hexagons
    n = cfg.n
    pi, pj = pair_indices(n)
    for _ in range(5):  # spread centers until no pair overlaps
        poses = cfg.poses()
        worst = min((separation(poses[i], poses[j]) for i, j in zip(pi, pj)), default=0.0)
        if worst >= 0.0:
            break
        cfg.centers = cfg.centers * (1.0 + 2.0 * (-worst) / np.sqrt(3.0) + 1e-15)
    cfg.thetas = np.mod(cfg.thetas, PHI)
    cfg.R = max(hex_required_R(cfg.centers, cfg.thetas), np.sqrt(n))
    return encode(problem, cfg.repair_farkas())


# -- multi-start driver -----------------------------------------------------------------

def _run_restart(problem, opts, index, deadline):
    if deadline is not None and time.monotonic() > deadline:
        return None
    x0 = initial_sample(problem, restart_rng(opts.seed, index))
    x, converged, iters = _augmented_lagrangian(problem, x0, opts)
    viol = problem.violation(x)
    stat = RestartStat(index, problem.objective(x), viol, iters, converged)
    return x, stat


def solve(problem: NlpProblem, opts: SolveOptions = SolveOptions()) -> SolveReport:
    """Run ``opts.restarts`` local solves and return the best feasible result.

    The incumbent is chosen by (infeasible, objective in its sense, restart
    index), so the result does not depend on the thread schedule. A time
    limit skips restarts that would start after it expires.
    """
    t0 = time.monotonic()
    deadline = None if opts.time_limit is None else t0 + opts.time_limit
    sign = 1.0 if problem.sense == "min" else -1.0
    workers = thread_count(opts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _run_restart(problem, opts, i, deadline),
                                    range(opts.restarts)))
    else:
        results = [_run_restart(problem, opts, i, deadline) for i in range(opts.restarts)]
    results = [r for r in results if r is not None]
    if not results:  # time limit hit before the first restart finished starting
        results = [_run_restart(problem, opts, 0, None)]
    stats = [s for _, s in results]

    def key(item):
        x, s = item
        if s.violation <= opts.feas_tol:
            return (0, sign * s.objective, s.index)
        return (1, s.violation, s.index)

    x_best, s_best = min(results, key=key)
    polish = replace(opts, feas_tol=opts.feas_tol / 10.0, opt_tol=opts.opt_tol / 10.0)
    x_pol, _ = local_solve(problem, x_best, polish)
    cand = [repair(problem, xc) for xc in
            (x_best, x_pol, refine(problem, x_best), refine(problem, x_pol))]

    def final_key(xc):
        v = problem.violation(xc)
        return (v > opts.feas_tol, v if v > opts.feas_tol else sign * problem.objective(xc))

    x_final = min(cand, key=final_key)
    viol = problem.violation(x_final)
    report = SolveReport(
        best_x=x_final,
        best_objective=problem.objective(x_final),
        feasible=viol <= opts.feas_tol,
        max_violation=viol,
        best_restart=s_best.index,
        restart_stats=stats,
        wall_time=time.monotonic() - t0,
        seed_used=opts.seed,
    )
    log.info("solved %s: objective %.10g (restart %d, %.1fs)", problem.meta,
             report.best_objective, report.best_restart, report.wall_time)
    return report
