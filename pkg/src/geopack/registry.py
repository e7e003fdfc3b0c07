"""Best-known values and comparison of certified results against them.

Values are kept as decimal strings exactly as published, never as binary
floats. A registry file is a JSON array of entry objects; :func:`dumps`
produces a canonical layout so that ``dumps(loads(text)) == text`` for any
text it wrote.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from decimal import Decimal, InvalidOperation

__all__ = [
    "ComparisonRow",
    "Registry",
    "RegistryEntry",
    "RegistryError",
    "builtin_registry",
    "compare",
    "make_key",
]

FAMILIES = ("minmax", "circles", "hexagons")
STATUSES = ("matched", "improved", "worse", "new")
_FIELDS = ("family", "variant", "n", "d", "best_value", "previous_best", "source", "sense")


class RegistryError(ValueError):
    pass


def make_key(family: str, n: int, d: int | None = None, variant: str | None = None) -> tuple:
    """Canonical registry key ``(family, variant, n, d)``.

    ``variant`` only applies to circles and ``d`` only to min-max problems;
    both are normalised to ``None`` elsewhere.
    """
    if family not in FAMILIES:
        raise RegistryError(f"unknown family {family!r}")
    if family == "minmax":
        return (family, None, int(n), int(2 if d is None else d))
    if family == "circles":
        return (family, variant or "square", int(n), None)
    return (family, None, int(n), None)


def _decimal(s: str, what: str) -> Decimal:
    if not isinstance(s, str):
        raise RegistryError(f"{what} must be a decimal string, got {type(s).__name__}")
    try:
        v = Decimal(s)
    except InvalidOperation as exc:
        raise RegistryError(f"{what} is not a decimal: {s!r}") from exc
    if not v.is_finite():
        raise RegistryError(f"{what} is not finite: {s!r}")
    return v


@dataclass(frozen=True)
class RegistryEntry:
    family: str
    variant: str | None
    n: int
    d: int | None
    best_value: str
    previous_best: str
    source: str
    sense: str

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise RegistryError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if make_key(self.family, self.n, self.d, self.variant) != self.key:
            raise RegistryError(f"non-canonical key {self.key}")
        best = _decimal(self.best_value, "best_value")
        prev = _decimal(self.previous_best, "previous_best")
        if (self.sense == "min" and best > prev) or (self.sense == "max" and best < prev):
            raise RegistryError(f"best_value {self.best_value} is worse than "
                                f"previous_best {self.previous_best} for {self.key}")

    @property
    def key(self) -> tuple:
        return (self.family, self.variant, self.n, self.d)


class Registry:
    """Read-only mapping from keys to :class:`RegistryEntry`."""

    def __init__(self, entries=()):
        self._entries: dict[tuple, RegistryEntry] = {}
        for e in entries:
            if e.key in self._entries:
                raise RegistryError(f"duplicate registry key {e.key}")
            self._entries[e.key] = e

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def __contains__(self, key) -> bool:
        return key in self._entries

    def get(self, key) -> RegistryEntry | None:
        return self._entries.get(key)

    def __getitem__(self, key) -> RegistryEntry:
        return self._entries[key]

    def dumps(self) -> str:
        return json.dumps([asdict(e) for e in self], indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Registry":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RegistryError(f"registry is not valid JSON: {exc}") from exc
        if not isinstance(raw, list):
            raise RegistryError("registry must be a JSON array")
        entries = []
        for item in raw:
            if not isinstance(item, dict) or set(item) != set(_FIELDS):
                raise RegistryError(f"registry entry must have exactly the fields {_FIELDS}")
            entries.append(RegistryEntry(**item))
        return cls(entries)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "Registry":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


_BUILTIN = [
    # family, variant, n, d, best, previous, source, sense
    ("minmax", None, 16, 2, "12.88924", "12.88927", "table1", "min"),
    ("minmax", None, 21, 2, "17.77499", "17.776", "table1", "min"),
    ("minmax", None, 22, 2, "19.05398", "19.055", "table1", "min"),
    ("minmax", None, 29, 2, "25.92460", "25.929", "table1", "min"),
    ("minmax", None, 14, 3, "4.16578", "4.16585", "table1", "min"),
    ("circles", "square", 32, None, "2.93957", "2.93794", "table2", "max"),
    ("circles", "rectangle", 26, None, "2.63930", "2.638", "table2", "max"),
    ("circles", "rectangle", 27, None, "2.69015", "2.687", "table2", "max"),
    ("hexagons", None, 11, None, "3.92485", "3.93010", "table3", "min"),
    ("hexagons", None, 12, None, "3.94165", "3.94192", "table3", "min"),
    ("hexagons", None, 14, None, "4.26900", "4.27240", "table3", "min"),
    ("hexagons", None, 15, None, "4.44769", "4.45406", "table3", "min"),
    ("hexagons", None, 16, None, "4.52788", "4.53633", "table3", "min"),
]


def builtin_registry() -> Registry:
    """The published best-known values baked into the package."""
    return Registry(RegistryEntry(*row) for row in _BUILTIN)


@dataclass(frozen=True)
class ComparisonRow:
    """One result against the registry.

    ``relative_gap = (ours - best) / |best|`` is negative when ours is
    smaller: better for minimisation, worse for maximisation. It is ``nan``
    when there is no registry entry.
    """

    key: tuple
    our_value: str
    best_value: str | None
    relative_gap: float
    status: str

    def as_dict(self) -> dict:
        family, variant, n, d = self.key
        return {
            "family": family, "variant": variant, "n": n, "d": d,
            "our_value": self.our_value, "best_value": self.best_value,
            "relative_gap": None if math.isnan(self.relative_gap) else self.relative_gap,
            "status": self.status,
        }


def compare(verdict, key, registry: Registry | None = None) -> ComparisonRow:
    """Compare a feasible verdict's 5-decimal value with the registry entry for ``key``."""
    if not verdict.feasible or verdict.reported_value is None:
        raise RegistryError("cannot compare an infeasible verdict")
    registry = builtin_registry() if registry is None else registry
    entry = registry.get(key)
    ours = _decimal(verdict.reported_value, "reported_value")
    if entry is None:
        return ComparisonRow(key, verdict.reported_value, None, math.nan, "new")
    if entry.sense != verdict.sense:
        raise RegistryError(f"sense mismatch: registry {entry.sense}, verdict {verdict.sense}")
    best = _decimal(entry.best_value, "best_value")
    q = Decimal("0.00001")
    diff = ours.quantize(q) - best.quantize(q)
    if diff == 0:
        status = "matched"
    elif (diff < 0) == (entry.sense == "min"):
        status = "improved"
    else:
        status = "worse"
    gap = float((ours - best) / abs(best))
    return ComparisonRow(key, verdict.reported_value, entry.best_value, gap, status)
