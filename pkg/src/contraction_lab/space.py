"""Semimetric spaces: finite label/matrix spaces and real intervals with a
distance formula.

The two semimetric axioms are d(x,y) = 0 iff x = y and symmetry; no triangle
inequality is assumed.  Compatibility with a triangle function phi is the
separate generalized condition d(x,y) <= phi(d(x,z), d(z,y)), checked over
all ordered triples on finite spaces (degenerate z included) and over seeded
samples plus corner/midpoint combinations on intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import trifun
from .expressions import Expression, parse_expression
from .trifun import TriangleFunctionSpec, CheckItem

DEFAULT_SEED = 0
TRIPLE_SAMPLES = 10_000
PAIR_SAMPLES = 10_000

# A violation of lhs <= rhs is declared only beyond this slack.
INEQ_REL_TOL = 1e-12
INEQ_ABS_TOL = 1e-12

TAIL_WINDOW = (1000, 10001)
TAIL_TOL = 1e-6


class StructuralError(ValueError):
    """Malformed space, matrix or expression payload."""


def violates(lhs, rhs):
    """Elementwise test of lhs > rhs beyond the shared inequality slack."""
    return np.asarray(lhs) > np.asarray(rhs) * (1.0 + INEQ_REL_TOL) + INEQ_ABS_TOL


@dataclass(frozen=True)
class FiniteSemimetricSpace:
    """Finitely many labelled points with a full distance matrix."""

    labels: tuple[str, ...]
    dist: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.dist, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise StructuralError("distance matrix must be square")
        if matrix.shape[0] != len(self.labels):
            raise StructuralError("matrix size does not match the label count")
        if len(set(self.labels)) != len(self.labels):
            raise StructuralError("labels must be distinct")
        if not np.all(np.isfinite(matrix)):
            raise StructuralError("distances must be finite")
        object.__setattr__(self, "dist", matrix)

    @property
    def size(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise StructuralError(f"unknown point label {label!r}") from None

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteSemimetricSpace":
        if not isinstance(obj, dict) or "labels" not in obj or "dist" not in obj:
            raise StructuralError("finite space JSON needs 'labels' and 'dist'")
        try:
            matrix = np.asarray(obj["dist"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise StructuralError(f"bad distance matrix: {exc}") from None
        return cls(tuple(str(x) for x in obj["labels"]), matrix)


@dataclass(frozen=True)
class IntervalSpace:
    """A real interval [lo, hi] with a two-variable distance expression."""

    lo: float
    hi: float
    dist_expr: str = "abs(x-y)"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise StructuralError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise StructuralError("interval needs lo < hi")
        object.__setattr__(self, "_dist", parse_expression(self.dist_expr, allowed=("x", "y")))

    @property
    def distance(self) -> Expression:
        return self._dist  # type: ignore[attr-defined]

    def d(self, x, y):
        return self.distance(x=x, y=y)

    def contains(self, x) -> bool:
        return bool(np.all((np.asarray(x) >= self.lo - INEQ_ABS_TOL)
                           & (np.asarray(x) <= self.hi + INEQ_ABS_TOL)))

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "dist": self.dist_expr}

    @classmethod
    def from_json(cls, obj: dict) -> "IntervalSpace":
        if not isinstance(obj, dict) or "lo" not in obj or "hi" not in obj:
            raise StructuralError("interval space JSON needs 'lo' and 'hi'")
        return cls(float(obj["lo"]), float(obj["hi"]), str(obj.get("dist", "abs(x-y)")))


Space = Union[FiniteSemimetricSpace, IntervalSpace]


def space_from_json(obj: dict) -> Space:
    """Dispatch on the payload shape: labelled matrix or interval."""
    if isinstance(obj, dict) and "labels" in obj:
        return FiniteSemimetricSpace.from_json(obj)
    return IntervalSpace.from_json(obj)


@dataclass(frozen=True)
class SpaceReport:
    passed: bool
    scope: str  # "exhaustive" | "sampled"
    checks: tuple[CheckItem, ...]


def _interval_samples(space: IntervalSpace, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return space.lo + (space.hi - space.lo) * rng.random(count)


def validate_semimetric(space: Space, seed: int = DEFAULT_SEED) -> SpaceReport:
    """Check the two semimetric axioms (plus non-negativity of values)."""
    if isinstance(space, FiniteSemimetricSpace):
        return _validate_finite(space)
    return _validate_interval(space, seed)


def _validate_finite(space: FiniteSemimetricSpace) -> SpaceReport:
    D = space.dist
    checks: list[CheckItem] = []

    negative = D < -INEQ_ABS_TOL
    if np.any(negative):
        i, j = np.argwhere(negative)[0]
        checks.append(CheckItem("nonnegative", False,
                                (space.labels[i], space.labels[j], float(D[i, j]))))
    else:
        checks.append(CheckItem("nonnegative", True))

    asym = np.abs(D - D.T) > INEQ_REL_TOL * np.maximum(1.0, np.abs(D)) + INEQ_ABS_TOL
    if np.any(asym):
        i, j = np.argwhere(asym)[0]
        checks.append(CheckItem("symmetry", False,
                                (space.labels[i], space.labels[j], float(D[i, j]), float(D[j, i]))))
    else:
        checks.append(CheckItem("symmetry", True))

    diag = np.abs(np.diag(D)) > INEQ_ABS_TOL
    if np.any(diag):
        i = int(np.argwhere(diag)[0][0])
        checks.append(CheckItem("identity_zero_self", False,
                                (space.labels[i], float(D[i, i]))))
    else:
        checks.append(CheckItem("identity_zero_self", True))

    off = D + np.eye(space.size)  # lift the diagonal out of the way
    collapsed = off <= INEQ_ABS_TOL
    if np.any(collapsed):
        i, j = np.argwhere(collapsed)[0]
        checks.append(CheckItem("identity_distinct_positive", False,
                                (space.labels[i], space.labels[j], float(D[i, j])),
                                "distinct points at zero distance"))
    else:
        checks.append(CheckItem("identity_distinct_positive", True))

    return SpaceReport(all(c.passed for c in checks), "exhaustive", tuple(checks))


def _validate_interval(space: IntervalSpace, seed: int) -> SpaceReport:
    ends = np.array([space.lo, 0.5 * (space.lo + space.hi), space.hi])
    xs = np.concatenate([ends, _interval_samples(space, PAIR_SAMPLES, seed)])
    ys = np.concatenate([ends[::-1], _interval_samples(space, PAIR_SAMPLES, seed + 1)])
    dxy = np.asarray(space.d(xs, ys), dtype=np.float64)
    dyx = np.asarray(space.d(ys, xs), dtype=np.float64)
    dxx = np.asarray(space.d(xs, xs), dtype=np.float64)
    checks: list[CheckItem] = []

    bad = ~np.isfinite(dxy) | (dxy < -INEQ_ABS_TOL)
    if np.any(bad):
        k = int(np.argwhere(bad)[0][0])
        checks.append(CheckItem("nonnegative", False, (float(xs[k]), float(ys[k]), float(dxy[k]))))
    else:
        checks.append(CheckItem("nonnegative", True))

    asym = np.abs(dxy - dyx) > INEQ_REL_TOL * np.maximum(1.0, np.abs(dxy)) + INEQ_ABS_TOL
    if np.any(asym):
        k = int(np.argwhere(asym)[0][0])
        checks.append(CheckItem("symmetry", False,
                                (float(xs[k]), float(ys[k]), float(dxy[k]), float(dyx[k]))))
    else:
        checks.append(CheckItem("symmetry", True))

    self_bad = np.abs(dxx) > INEQ_ABS_TOL
    if np.any(self_bad):
        k = int(np.argwhere(self_bad)[0][0])
        checks.append(CheckItem("identity_zero_self", False, (float(xs[k]), float(dxx[k]))))
    else:
        checks.append(CheckItem("identity_zero_self", True))

    distinct = np.abs(xs - ys) > 1e-9
    degenerate = distinct & (dxy <= INEQ_ABS_TOL)
    if np.any(degenerate):
        k = int(np.argwhere(degenerate)[0][0])
        checks.append(CheckItem("identity_distinct_positive", False,
                                (float(xs[k]), float(ys[k]), float(dxy[k]))))
    else:
        checks.append(CheckItem("identity_distinct_positive", True))

    return SpaceReport(all(c.passed for c in checks), "sampled", tuple(checks))


@dataclass(frozen=True)
class TriangleViolation:
    """One failed instance of d(x,y) <= phi(d(x,z), d(z,y))."""

    x: str | float
    y: str | float
    z: str | float
    lhs: float
    rhs: float


def check_generalized_triangle(
    space: Space,
    phi: TriangleFunctionSpec,
    seed: int = DEFAULT_SEED,
    samples: int = TRIPLE_SAMPLES,
) -> list[TriangleViolation]:
    """All found violations of the generalized triangle condition.

    Finite spaces are checked over every ordered triple, including the
    degenerate ones with z = x or z = y.  Interval spaces are sampled:
    corner/midpoint combinations first, then `samples` seeded triples.
    """
    if isinstance(space, FiniteSemimetricSpace):
        D = space.dist
        lhs = D[:, :, None]
        u = D[:, None, :]  # d(x, z)
        v = D.T[None, :, :]  # d(z, y)
        with np.errstate(all="ignore"):
            rhs = np.asarray(trifun._eval_raw(phi, u, v))
        rhs = np.broadcast_to(rhs, (space.size,) * 3)
        lhs = np.broadcast_to(lhs, (space.size,) * 3)
        bad = violates(lhs, rhs)
        out = []
        for i, j, k in np.argwhere(bad):
            out.append(
                TriangleViolation(
                    space.labels[i], space.labels[j], space.labels[k],
                    float(lhs[i, j, k]), float(rhs[i, j, k]),
                )
            )
        return out

    ends = np.array([space.lo, 0.5 * (space.lo + space.hi), space.hi])
    corners = np.array(np.meshgrid(ends, ends, ends, indexing="ij")).reshape(3, -1).T
    rng = np.random.default_rng(seed)
    random_part = space.lo + (space.hi - space.lo) * rng.random((samples, 3))
    triples = np.vstack([corners, random_part])
    xs, ys, zs = triples[:, 0], triples[:, 1], triples[:, 2]
    lhs = np.asarray(space.d(xs, ys), dtype=np.float64)
    with np.errstate(all="ignore"):
        rhs = np.asarray(trifun._eval_raw(phi, space.d(xs, zs), space.d(zs, ys)), dtype=np.float64)
    bad = violates(lhs, rhs) | ~np.isfinite(rhs)
    out = []
    for (k,) in np.argwhere(bad):
        out.append(
            TriangleViolation(
                float(xs[k]), float(ys[k]), float(zs[k]), float(lhs[k]), float(rhs[k])
            )
        )
    return out


def minimal_b_constant(space: FiniteSemimetricSpace) -> float:
    """Smallest K making the space a b-metric space: the supremum of
    d(x,y) / (d(x,z) + d(z,y)) over ordered triples with x != y.

    Degenerate chains through z = x or z = y participate, so the result is
    at least 1 on any space with two or more points, with equality exactly
    when the space is metric.
    """
    if space.size < 2:
        raise ValueError("need at least two points")
    D = space.dist
    lhs = np.broadcast_to(D[:, :, None], (space.size,) * 3)
    denom = D[:, None, :] + D.T[None, :, :]
    distinct = ~np.eye(space.size, dtype=bool)[:, :, None]
    usable = distinct & (denom > 0.0)
    ratios = np.where(usable, lhs / np.where(denom > 0.0, denom, 1.0), 0.0)
    return float(np.max(ratios))


# --- continuity harness -----------------------------------------------------

SeqFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PairEntry:
    """Convergent pair (x_n -> x, y_n -> y); checks d(x_n,y_n) -> d(x,y)."""

    name: str
    x_seq: SeqFn
    y_seq: SeqFn
    x_limit: float
    y_limit: float
    tol: float = TAIL_TOL


@dataclass(frozen=True)
class SqueezeEntry:
    """Abstract squeeze data (a_n, b_n, c_n, l).

    Hypotheses validated on the window before the limit is judged:
        l   <= phi(b_n, phi(a_n, c_n))
        c_n <= phi(a_n, phi(l, b_n))
    Entries violating either are rejected with a diagnostic rather than
    counted as failures.  The conclusion under test is c_n -> l.
    """

    name: str
    a_seq: SeqFn
    b_seq: SeqFn
    c_seq: SeqFn
    limit: float
    tol: float = TAIL_TOL


BatteryEntry = Union[PairEntry, SqueezeEntry]


@dataclass(frozen=True)
class EntryResult:
    name: str
    kind: str  # "pair" | "squeeze"
    status: str  # "pass" | "fail" | "rejected"
    max_deviation: float | None
    detail: str = ""


@dataclass(frozen=True)
class HarnessReport:
    refused: bool
    reason: str
    entries: tuple[EntryResult, ...]

    @property
    def passed(self) -> bool:
        return (not self.refused) and all(e.status != "fail" for e in self.entries)


def default_battery(space: IntervalSpace) -> list[BatteryEntry]:
    """Fast-converging default entries sized to the tail window and its tol."""
    lo, hi, span = space.lo, space.hi, space.hi - space.lo
    mid = lo + 0.5 * span
    q = lo + 0.7 * span
    entries: list[BatteryEntry] = [
        PairEntry("ends_cubic", lambda n: lo + span / n**3, lambda n: hi - span / n**3, lo, hi),
        PairEntry("mid_geometric", lambda n: mid + 0.25 * span * np.power(0.5, n),
                  lambda n: np.full_like(n, mid), mid, mid),
        PairEntry("wobble_cubic", lambda n: lo + span * np.abs(np.sin(n)) / n**3,
                  lambda n: mid + 0.1 * span * np.cos(n) / n**3, lo, mid),
        PairEntry("same_limit", lambda n: q + 0.1 * span / n**3,
                  lambda n: q - 0.1 * span / n**3, q, q),
        SqueezeEntry("constant_target", lambda n: 1.0 / n**3, lambda n: 1.0 / n**3,
                   lambda n: np.ones_like(n), 1.0),
    ]
    return entries


def continuity_harness(
    space: IntervalSpace,
    phi: TriangleFunctionSpec,
    battery: Sequence[BatteryEntry] | None = None,
    seed: int = DEFAULT_SEED,
) -> HarnessReport:
    """Empirical continuity check for the distance of an interval space.

    Refuses outright (with a diagnostic) when phi fails the vanishing
    deviation battery or the space fails the sampled generalized triangle
    condition, since the conclusions under test assume both.
    """
    deviation = trifun.check_limit_deviation(phi)
    if not deviation.passed:
        w = deviation.witness
        return HarnessReport(
            True,
            "triangle function failed the vanishing-deviation battery "
            f"(pair {w.x_name}/{w.y_name}, deviation {w.max_deviation:g})",
            (),
        )
    triangle = check_generalized_triangle(space, phi, seed=seed)
    if triangle:
        v = triangle[0]
        return HarnessReport(
            True,
            "space fails the generalized triangle condition at sampled triples "
            f"(x={v.x:g}, y={v.y:g}, z={v.z:g}: {v.lhs:g} > {v.rhs:g})",
            (),
        )

    if battery is None:
        battery = default_battery(space)
    lo_idx, hi_idx = TAIL_WINDOW
    n = np.arange(lo_idx, hi_idx, dtype=np.float64)
    results: list[EntryResult] = []
    with np.errstate(all="ignore"):
        for entry in battery:
            if isinstance(entry, PairEntry):
                xv = np.asarray(entry.x_seq(n), dtype=np.float64)
                yv = np.asarray(entry.y_seq(n), dtype=np.float64)
                if not (space.contains(xv) and space.contains(yv)):
                    results.append(EntryResult(entry.name, "pair", "rejected", None,
                                               "sequence leaves the interval"))
                    continue
                target = float(space.d(entry.x_limit, entry.y_limit))
                dev = float(np.max(np.abs(space.d(xv, yv) - target)))
                status = "pass" if dev < entry.tol else "fail"
                results.append(EntryResult(entry.name, "pair", status, dev))
            else:
                av = np.asarray(entry.a_seq(n), dtype=np.float64)
                bv = np.asarray(entry.b_seq(n), dtype=np.float64)
                cv = np.asarray(entry.c_seq(n), dtype=np.float64)
                l = entry.limit
                inner = trifun._eval_raw(phi, av, cv)
                first = np.asarray(trifun._eval_raw(phi, bv, inner), dtype=np.float64)
                if np.any(violates(l, first)):
                    k = int(np.argwhere(violates(l, first))[0][0])
                    results.append(EntryResult(
                        entry.name, "squeeze", "rejected", None,
                        f"lower squeeze fails at n={int(n[k])}: {l} > {first[k]:g}"))
                    continue
                second = np.asarray(
                    trifun._eval_raw(phi, av, trifun._eval_raw(phi, np.full_like(n, l), bv)),
                    dtype=np.float64,
                )
                if np.any(violates(cv, second)):
                    k = int(np.argwhere(violates(cv, second))[0][0])
                    results.append(EntryResult(
                        entry.name, "squeeze", "rejected", None,
                        f"upper squeeze fails at n={int(n[k])}: {cv[k]:g} > {second[k]:g}"))
                    continue
                dev = float(np.max(np.abs(cv - l)))
                status = "pass" if dev < entry.tol else "fail"
                results.append(EntryResult(entry.name, "squeeze", status, dev))
    return HarnessReport(False, "", tuple(results))
