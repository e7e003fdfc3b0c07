"""Smooth NLP representation: ``min/max f(x)  s.t.  g_k(x) <= 0 or = 0,  l <= x <= u``.

Constraints of one model are evaluated together by a vectorised kernel that
returns all values plus the Jacobian entries on a fixed sparsity pattern.
Per-constraint callables are views onto that kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, partial
from typing import Callable, Sequence

import numpy as np

INEQUALITY = "inequality"
EQUALITY = "equality"


class NlpError(ValueError):
    """Malformed input to an NLP evaluation (wrong dimension, bad index)."""


class NonFiniteError(NlpError):
    """A function evaluated to NaN; the message names the offending constraint."""


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LinearObjective:
    """``f(x) = coeffs . x``; every objective in this package is linear."""

    coeffs: np.ndarray

    def __call__(self, x: np.ndarray) -> float:
        return float(self.coeffs @ x)

    def grad(self, x: np.ndarray) -> np.ndarray:
        return np.array(self.coeffs, dtype=float)


@dataclass(frozen=True)
class Constraint:
    kind: str
    func: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    label: str


@dataclass(frozen=True, eq=False)
class ConstraintBlock:
    """All constraints of a model, evaluated by one kernel call.

    ``kernel(x)`` returns ``(g, jv)``; the Jacobian is the sparse matrix with
    entries ``jv`` at ``(rows, cols)``. Duplicate (row, col) pairs are summed.
    """

    kernel: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    rows: np.ndarray
    cols: np.ndarray
    is_eq: np.ndarray
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class NlpProblem:
    lower: np.ndarray
    upper: np.ndarray
    sense: str
    objective: LinearObjective
    block: ConstraintBlock
    var_labels: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lower", _frozen(self.lower))
        object.__setattr__(self, "upper", _frozen(self.upper))
        object.__setattr__(self, "meta", dict(self.meta))
        if self.sense not in ("min", "max"):
            raise NlpError(f"objective sense must be 'min' or 'max', got {self.sense!r}")
        if len(self.lower) != len(self.upper) or len(self.lower) != len(self.var_labels):
            raise NlpError("bounds and variable labels must have equal length")
        if np.any(self.lower > self.upper):
            bad = int(np.argmax(self.lower > self.upper))
            raise NlpError(f"lower > upper for variable {self.var_labels[bad]}")

    @property
    def num_vars(self) -> int:
        return len(self.lower)

    @property
    def num_constraints(self) -> int:
        return len(self.block)

    @property
    def family(self) -> str:
        return self.meta.get("family", "")

    @cached_property
    def constraints(self) -> tuple[Constraint, ...]:
        return tuple(
            Constraint(
                kind=EQUALITY if self.block.is_eq[k] else INEQUALITY,
                func=partial(_single_value, self, k),
                grad=partial(_single_grad, self, k),
                label=self.block.labels[k],
            )
            for k in range(len(self.block))
        )

    def check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != self.num_vars:
            raise NlpError(f"expected a vector of length {self.num_vars}, got shape {x.shape}")
        return x

    def jacobian(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Constraint values and Jacobian entries (on ``block.rows/cols``)."""
        return self.block.kernel(x)

    def jt_dot(self, jv: np.ndarray, w: np.ndarray) -> np.ndarray:
        """``J(x)^T w`` for Jacobian entries ``jv``."""
        return np.bincount(
            self.block.cols, weights=jv * w[self.block.rows], minlength=self.num_vars
        )

    def jacobian_dense(self, x) -> np.ndarray:
        x = self.check_x(x)
        _, jv = self.block.kernel(x)
        J = np.zeros((self.num_constraints, self.num_vars))
        np.add.at(J, (self.block.rows, self.block.cols), jv)
        return J

    def violation(self, x, g: np.ndarray | None = None) -> float:
        """Max of inequality positive parts, equality residuals and box excess."""
        if g is None:
            g, _ = self.block.kernel(x)
        return max_violation(g, self.block.is_eq, x, self.lower, self.upper)


def max_violation(g, is_eq, x, lower, upper) -> float:
    v = np.where(is_eq, np.abs(g), np.maximum(g, 0.0))
    worst = float(v.max()) if len(v) else 0.0
    box = max(float(np.max(lower - x, initial=0.0)), float(np.max(x - upper, initial=0.0)))
    return max(worst, box, 0.0)


@dataclass(frozen=True)
class Evaluation:
    objective_value: float
    constraint_values: np.ndarray
    max_violation: float


def _raise_nonfinite(problem: NlpProblem, g: np.ndarray) -> None:
    bad = np.flatnonzero(np.isnan(g))
    if len(bad):
        label = problem.block.labels[bad[0]]
        raise NonFiniteError(f"constraint {label!r} evaluated to NaN")


def evaluate(problem: NlpProblem, x: Sequence[float]) -> Evaluation:
    x = problem.check_x(x)
    g, _ = problem.block.kernel(x)
    _raise_nonfinite(problem, g)
    f = problem.objective(x)
    if np.isnan(f):
        raise NonFiniteError("objective evaluated to NaN")
    g = np.array(g)
    g.setflags(write=False)
    return Evaluation(f, g, problem.violation(x, g))


def gradient(problem: NlpProblem, x: Sequence[float], which="objective") -> np.ndarray:
    """Exact gradient of the objective (``which="objective"``) or of constraint ``which``."""
    x = problem.check_x(x)
    if isinstance(which, str):
        if which != "objective":
            raise NlpError(f"unknown function selector {which!r}")
        return problem.objective.grad(x)
    k = int(which)
    if not 0 <= k < problem.num_constraints:
        raise NlpError(f"constraint index {k} out of range [0, {problem.num_constraints})")
    g, jv = problem.block.kernel(x)
    _raise_nonfinite(problem, g)
    sel = problem.block.rows == k
    out = np.zeros(problem.num_vars)
    np.add.at(out, problem.block.cols[sel], jv[sel])
    return out


def _single_value(problem: NlpProblem, k: int, x) -> float:
    return float(problem.block.kernel(problem.check_x(x))[0][k])


def _single_grad(problem: NlpProblem, k: int, x) -> np.ndarray:
    return gradient(problem, x, k)
