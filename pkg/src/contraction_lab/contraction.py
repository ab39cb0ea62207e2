"""Contractive self-maps on semimetric spaces.

Six inequality families classify a self-map T through d(Tx, Ty) <= rhs(x, y):

    partial                rhs = alpha*d(x,y) + beta*d(x,Tx)
    partial_dual           rhs = alpha*d(x,y) + beta*d(y,Ty)
    weak                   rhs = alpha*d(x,y) + delta*d(x,Ty)
    weak_dual              rhs = alpha*d(x,y) + delta*d(y,Tx)
    bianchini              rhs = beta*max(d(x,Tx), d(y,Ty))
    chatterjea_bianchini   rhs = beta*max(d(x,Ty), d(y,Tx))

The module verifies membership (exhaustively on finite spaces, on seeded
samples on intervals), estimates minimal constants, derives the per-step
Picard factor of each family, and decides whether the matching fixed-point
principle applies for a given triangle function, with a per-hypothesis
checklist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import trifun
from .expressions import parse_expression
from .space import (
    DEFAULT_SEED,
    PAIR_SAMPLES,
    FiniteSemimetricSpace,
    IntervalSpace,
    Space,
    StructuralError,
    violates,
)
from .trifun import TriangleFunctionSpec

TAGS = (
    "partial",
    "partial_dual",
    "weak",
    "weak_dual",
    "bianchini",
    "chatterjea_bianchini",
)

# tag -> names of the constants it uses, in report order
TAG_CONSTANTS = {
    "partial": ("alpha", "beta"),
    "partial_dual": ("alpha", "beta"),
    "weak": ("alpha", "delta"),
    "weak_dual": ("alpha", "delta"),
    "bianchini": ("beta",),
    "chatterjea_bianchini": ("beta",),
}

ESTIMATE_GRID = 101


@dataclass(frozen=True)
class ContractionKind:
    """A family tag plus the constants that family uses."""

    tag: str
    alpha: float | None = None
    beta: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown contraction tag {self.tag!r}")
        wanted = TAG_CONSTANTS[self.tag]
        for name in ("alpha", "beta", "delta"):
            value = getattr(self, name)
            if name in wanted:
                if value is None or not math.isfinite(value) or value < 0.0:
                    raise ValueError(f"{self.tag} needs finite {name} >= 0")
            elif value is not None:
                raise ValueError(f"{self.tag} does not take {name}")

    def constants(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in TAG_CONSTANTS[self.tag]}

    def to_json(self) -> dict:
        return {"tag": self.tag, **self.constants()}

    @classmethod
    def from_json(cls, obj: dict) -> "ContractionKind":
        if not isinstance(obj, dict) or "tag" not in obj:
            raise ValueError("contraction kind JSON needs a 'tag' field")
        extra = set(obj) - {"tag", "alpha", "beta", "delta"}
        if extra:
            raise ValueError(f"unknown contraction kind fields: {sorted(extra)}")
        return cls(obj["tag"], obj.get("alpha"), obj.get("beta"), obj.get("delta"))


@dataclass(frozen=True)
class SelfMap:
    """A self-map: an image table on finite spaces, an expression in x on
    intervals."""

    images: tuple[int, ...] | None = None
    expr: str | None = None

    def __post_init__(self):
        if (self.images is None) == (self.expr is None):
            raise StructuralError("self-map needs exactly one of images or expr")
        if self.expr is not None:
            object.__setattr__(self, "_fn", parse_expression(self.expr, allowed=("x",)))

    @classmethod
    def from_json(cls, obj: dict) -> "SelfMap":
        if not isinstance(obj, dict):
            raise StructuralError("self-map JSON must be an object")
        if "images" in obj:
            images = obj["images"]
            if not all(isinstance(i, int) and not isinstance(i, bool) for i in images):
                raise StructuralError("self-map images must be integer indices")
            return cls(images=tuple(images))
        if "expr" in obj:
            return cls(expr=str(obj["expr"]))
        raise StructuralError("self-map JSON needs 'images' or 'expr'")

    def to_json(self) -> dict:
        if self.images is not None:
            return {"images": list(self.images)}
        return {"expr": self.expr}

    def validate_for(self, space: Space) -> None:
        """Structural fit: index range on finite spaces, domain fit sampled
        on intervals."""
        if isinstance(space, FiniteSemimetricSpace):
            if self.images is None:
                raise StructuralError("finite spaces need an image table")
            if len(self.images) != space.size:
                raise StructuralError("image table size does not match the space")
            if any(not 0 <= i < space.size for i in self.images):
                raise StructuralError("image index out of range")
            return
        if self.expr is None:
            raise StructuralError("interval spaces need an expression map")
        xs = np.concatenate([
            np.array([space.lo, 0.5 * (space.lo + space.hi), space.hi]),
            space.lo + (space.hi - space.lo) * np.random.default_rng(DEFAULT_SEED).random(1000),
        ])
        images = np.asarray(self(xs), dtype=np.float64)
        if not np.all(np.isfinite(images)) or not space.contains(images):
            k = int(np.argwhere(~np.isfinite(images) | (images < space.lo - 1e-12)
                                | (images > space.hi + 1e-12))[0][0])
            raise StructuralError(
                f"map leaves the interval at sampled x={float(xs[k]):g}: "
                f"T(x)={float(images[k]):g}"
            )

    def __call__(self, x):
        if self.images is not None:
            if np.ndim(x) == 0:
                return self.images[int(x)]
            return np.asarray(self.images, dtype=np.int64)[np.asarray(x, dtype=np.int64)]
        return self._fn(x=x)  # type: ignore[attr-defined]


def _component_arrays(space: FiniteSemimetricSpace, images: tuple[int, ...]):
    """All-pairs component matrices for the six right-hand sides."""
    D = space.dist
    T = np.asarray(images, dtype=np.intp)
    lhs = D[np.ix_(T, T)]           # d(Tx, Ty)
    step = D[np.arange(space.size), T]  # d(x, Tx) as a vector
    cross = D[:, T]                 # cross[i, j] = d(x_i, T x_j) = d(x, Ty)
    return lhs, D, step, cross


def _rhs_matrix(kind: ContractionKind, D, step, cross):
    if kind.tag == "partial":
        return kind.alpha * D + kind.beta * step[:, None]
    if kind.tag == "partial_dual":
        return kind.alpha * D + kind.beta * step[None, :]
    if kind.tag == "weak":
        return kind.alpha * D + kind.delta * cross
    if kind.tag == "weak_dual":
        return kind.alpha * D + kind.delta * cross.T
    if kind.tag == "bianchini":
        return kind.beta * np.maximum(step[:, None], step[None, :])
    return kind.beta * np.maximum(cross, cross.T)


def defining_rhs(kind: ContractionKind, space: Space, mapping: SelfMap, x, y) -> float:
    """The right-hand side of the family's inequality at the pair (x, y)."""
    if isinstance(space, FiniteSemimetricSpace):
        x = space.index_of(x) if isinstance(x, str) else x
        y = space.index_of(y) if isinstance(y, str) else y
    tx, ty = mapping(x), mapping(y)
    d = space.d
    if kind.tag == "partial":
        return kind.alpha * d(x, y) + kind.beta * d(x, tx)
    if kind.tag == "partial_dual":
        return kind.alpha * d(x, y) + kind.beta * d(y, ty)
    if kind.tag == "weak":
        return kind.alpha * d(x, y) + kind.delta * d(x, ty)
    if kind.tag == "weak_dual":
        return kind.alpha * d(x, y) + kind.delta * d(y, tx)
    if kind.tag == "bianchini":
        return kind.beta * max(d(x, tx), d(y, ty))
    return kind.beta * max(d(x, ty), d(y, tx))


@dataclass(frozen=True)
class PairWitness:
    x: str | float
    y: str | float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class ContractionCertificate:
    """Outcome of checking the family inequality over pairs.

    margin is min(rhs - lhs); the witness is the pair achieving it.  The
    certificate passes when no pair violates the inequality beyond the
    shared slack.
    """

    kind: ContractionKind
    scope: str  # "all-pairs" | "sampled"
    margin: float
    witness: PairWitness
    violations: tuple[PairWitness, ...]

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0


def verify_contraction(
    space: Space,
    mapping: SelfMap,
    kind: ContractionKind,
    seed: int = DEFAULT_SEED,
    samples: int = PAIR_SAMPLES,
) -> ContractionCertificate:
    """Check d(Tx,Ty) <= rhs over ordered pairs (exhaustive or sampled)."""
    mapping.validate_for(space)
    if isinstance(space, FiniteSemimetricSpace):
        lhs, D, step, cross = _component_arrays(space, mapping.images)
        rhs = _rhs_matrix(kind, D, step, cross)
        margin_matrix = rhs - lhs
        flat = int(np.argmin(margin_matrix))
        i, j = divmod(flat, space.size)
        witness = PairWitness(space.labels[i], space.labels[j],
                              float(lhs[i, j]), float(rhs[i, j]))
        bad = violates(lhs, rhs)
        violations = tuple(
            PairWitness(space.labels[a], space.labels[b], float(lhs[a, b]), float(rhs[a, b]))
            for a, b in np.argwhere(bad)
        )
        return ContractionCertificate(kind, "all-pairs", float(margin_matrix[i, j]),
                                      witness, violations)

    ends = np.array([space.lo, 0.5 * (space.lo + space.hi), space.hi])
    grid = np.array(np.meshgrid(ends, ends, indexing="ij")).reshape(2, -1).T
    rng = np.random.default_rng(seed)
    random_part = space.lo + (space.hi - space.lo) * rng.random((samples, 2))
    pairs = np.vstack([grid, random_part])
    xs, ys = pairs[:, 0], pairs[:, 1]
    txs = np.asarray(mapping(xs), dtype=np.float64)
    tys = np.asarray(mapping(ys), dtype=np.float64)
    d = space.d
    lhs = np.asarray(d(txs, tys), dtype=np.float64)
    if kind.tag == "partial":
        rhs = kind.alpha * d(xs, ys) + kind.beta * d(xs, txs)
    elif kind.tag == "partial_dual":
        rhs = kind.alpha * d(xs, ys) + kind.beta * d(ys, tys)
    elif kind.tag == "weak":
        rhs = kind.alpha * d(xs, ys) + kind.delta * d(xs, tys)
    elif kind.tag == "weak_dual":
        rhs = kind.alpha * d(xs, ys) + kind.delta * d(ys, txs)
    elif kind.tag == "bianchini":
        rhs = kind.beta * np.maximum(d(xs, txs), d(ys, tys))
    else:
        rhs = kind.beta * np.maximum(d(xs, tys), d(ys, txs))
    rhs = np.asarray(rhs, dtype=np.float64)
    margins = rhs - lhs
    k = int(np.argmin(margins))
    witness = PairWitness(float(xs[k]), float(ys[k]), float(lhs[k]), float(rhs[k]))
    bad = violates(lhs, rhs)
    violations = tuple(
        PairWitness(float(xs[a]), float(ys[a]), float(lhs[a]), float(rhs[a]))
        for (a,) in np.argwhere(bad)
    )
    return ContractionCertificate(kind, "sampled", float(margins[k]), witness, violations)


@dataclass(frozen=True)
class FrontierPoint:
    """Minimal feasible alpha at one grid value of the secondary constant."""

    secondary: float
    alpha_min: float


@dataclass(frozen=True)
class ConstantsEstimate:
    """Minimal constants achieving the family inequality for a given map.

    Single-constant families report beta_star (or unbounded with the witness
    pair).  Two-constant families report the (secondary, alpha_min) frontier
    over a grid of the secondary constant in [0, 1).
    """

    tag: str
    scope: str
    beta_star: float | None = None
    unbounded: bool = False
    witness: PairWitness | None = None
    frontier: tuple[FrontierPoint, ...] = ()

    def best_rate(self) -> tuple[float, "ContractionKind | None"]:
        """Smallest per-step factor available on the estimate, with a kind
        realizing it (None when nothing lies below 1)."""
        best = math.inf
        best_kind = None
        if self.tag in ("bianchini", "chatterjea_bianchini"):
            if not self.unbounded and self.beta_star is not None:
                best = self.beta_star
                best_kind = ContractionKind(self.tag, beta=self.beta_star)
            return best, best_kind
        for point in self.frontier:
            a, s = point.alpha_min, point.secondary
            if self.tag == "partial":
                rate = a + s
                kind = ContractionKind(self.tag, alpha=a, beta=s)
            elif self.tag == "partial_dual":
                rate = a / (1.0 - s) if s < 1.0 else math.inf
                kind = ContractionKind(self.tag, alpha=a, beta=s)
            elif self.tag == "weak":
                rate = (a + s) / (1.0 - s) if s < 1.0 else math.inf
                kind = ContractionKind(self.tag, alpha=a, delta=s)
            else:
                rate = a
                kind = ContractionKind(self.tag, alpha=a, delta=s)
            if rate < best:
                best, best_kind = rate, kind
        return best, best_kind


def _interval_pair_components(space: IntervalSpace, mapping: SelfMap, seed: int, samples: int):
    ends = np.array([space.lo, 0.5 * (space.lo + space.hi), space.hi])
    grid = np.array(np.meshgrid(ends, ends, indexing="ij")).reshape(2, -1).T
    rng = np.random.default_rng(seed)
    random_part = space.lo + (space.hi - space.lo) * rng.random((samples, 2))
    pairs = np.vstack([grid, random_part])
    xs, ys = pairs[:, 0], pairs[:, 1]
    txs = np.asarray(mapping(xs), dtype=np.float64)
    tys = np.asarray(mapping(ys), dtype=np.float64)
    d = space.d
    return {
        "xs": xs, "ys": ys,
        "lhs": np.asarray(d(txs, tys), dtype=np.float64),
        "dxy": np.asarray(d(xs, ys), dtype=np.float64),
        "x_tx": np.asarray(d(xs, txs), dtype=np.float64),
        "y_ty": np.asarray(d(ys, tys), dtype=np.float64),
        "x_ty": np.asarray(d(xs, tys), dtype=np.float64),
        "y_tx": np.asarray(d(ys, txs), dtype=np.float64),
    }


def estimate_min_constants(
    space: Space,
    mapping: SelfMap,
    tag: str,
    seed: int = DEFAULT_SEED,
    samples: int = PAIR_SAMPLES,
) -> ConstantsEstimate:
    """Estimate the smallest constants placing the map in the family `tag`.

    On finite spaces the estimate is exhaustive and tight; on intervals it
    is a sampled lower bound (scope "sampled").
    """
    if tag not in TAGS:
        raise ValueError(f"unknown contraction tag {tag!r}")
    mapping.validate_for(space)
    if isinstance(space, FiniteSemimetricSpace):
        lhs, D, step, cross = _component_arrays(space, mapping.images)
        scope = "all-pairs"
        dxy = D
        kernels = {
            "bianchini": np.maximum(step[:, None], step[None, :]),
            "chatterjea_bianchini": np.maximum(cross, cross.T),
            "partial": step[:, None] + np.zeros_like(D),
            "partial_dual": step[None, :] + np.zeros_like(D),
            "weak": cross,
            "weak_dual": cross.T,
        }
        labels = space.labels
        def pair_witness(i, j, denom):
            return PairWitness(labels[i], labels[j], float(lhs[i, j]), float(denom))
    else:
        comp = _interval_pair_components(space, mapping, seed, samples)
        scope = "sampled"
        lhs = comp["lhs"]
        dxy = comp["dxy"]
        kernels = {
            "bianchini": np.maximum(comp["x_tx"], comp["y_ty"]),
            "chatterjea_bianchini": np.maximum(comp["x_ty"], comp["y_tx"]),
            "partial": comp["x_tx"],
            "partial_dual": comp["y_ty"],
            "weak": comp["x_ty"],
            "weak_dual": comp["y_tx"],
        }
        xs, ys = comp["xs"], comp["ys"]
        def pair_witness(i, j, denom):
            return PairWitness(float(xs[i]), float(ys[i]), float(lhs.flat[i]), float(denom))

    kernel = kernels[tag]
    if tag in ("bianchini", "chatterjea_bianchini"):
        positive = kernel > 0.0
        stuck = ~positive & (lhs > 0.0)
        if np.any(stuck):
            idx = np.argwhere(stuck)[0]
            if len(idx) == 2:
                witness = pair_witness(int(idx[0]), int(idx[1]), 0.0)
            else:
                witness = pair_witness(int(idx[0]), int(idx[0]), 0.0)
            return ConstantsEstimate(tag, scope, unbounded=True, witness=witness)
        if not np.any(positive):
            return ConstantsEstimate(tag, scope, beta_star=0.0)
        ratios = np.where(positive, lhs / np.where(positive, kernel, 1.0), 0.0)
        flat = int(np.argmax(ratios))
        if ratios.ndim == 2:
            i, j = divmod(flat, ratios.shape[1])
            witness = pair_witness(i, j, float(kernel[i, j]))
        else:
            witness = pair_witness(flat, flat, float(kernel.flat[flat]))
        return ConstantsEstimate(tag, scope, beta_star=float(ratios.flat[flat]),
                                 witness=witness)

    grid = np.arange(ESTIMATE_GRID, dtype=np.float64) / ESTIMATE_GRID
    residual = lhs[None, ...] - grid.reshape((-1,) + (1,) * lhs.ndim) * kernel[None, ...]
    positive_d = dxy > 0.0
    needed = np.where(positive_d[None, ...], residual / np.where(positive_d, dxy, 1.0), 0.0)
    axes = tuple(range(1, needed.ndim))
    alpha_min = np.clip(np.max(needed, axis=axes), 0.0, None)
    frontier = tuple(FrontierPoint(float(g), float(a)) for g, a in zip(grid, alpha_min))
    return ConstantsEstimate(tag, scope, frontier=frontier)


@dataclass(frozen=True)
class StepFactorResult:
    """Per-step Picard factor of a family, when the derivation applies."""

    value: float | None
    derivable: bool
    reason: str = ""
    caveats: tuple[str, ...] = ()


def step_contraction_factor(kind: ContractionKind, phi: TriangleFunctionSpec) -> StepFactorResult:
    """The factor r with d(x_{n+1}, x_{n+2}) <= r * d(x_n, x_{n+1}).

    partial: alpha+beta.  partial_dual: alpha/(1-beta), needs beta < 1.
    weak: (alpha+delta)/(1-delta), needs delta < 1 and phi bounded by u+v
    (the applicability checklist carries that condition).  weak_dual: alpha.
    bianchini: beta.  chatterjea_bianchini: the reciprocal of the
    generalized inverse of the unit profile at 1/beta; 0 when beta = 0.
    Factors at or above 1 are reported as not derivable.
    """
    caveats: tuple[str, ...] = ()
    if kind.tag == "partial":
        value = kind.alpha + kind.beta
    elif kind.tag == "partial_dual":
        if kind.beta >= 1.0:
            return StepFactorResult(None, False, "needs beta < 1")
        value = kind.alpha / (1.0 - kind.beta)
    elif kind.tag == "weak":
        if kind.delta >= 1.0:
            return StepFactorResult(None, False, "needs delta < 1")
        value = (kind.alpha + kind.delta) / (1.0 - kind.delta)
        caveats = ("valid only when phi is bounded by u+v on the orbit pairs",)
    elif kind.tag == "weak_dual":
        value = kind.alpha
    elif kind.tag == "bianchini":
        value = kind.beta
    else:
        if kind.beta == 0.0:
            return StepFactorResult(0.0, True)
        threshold = trifun.unit_profile_inverse(phi, 1.0 / kind.beta)
        if not threshold > 1.0:
            return StepFactorResult(
                None, False,
                f"unit profile inverse at 1/beta is {threshold:g}, needs > 1",
            )
        value = 0.0 if math.isinf(threshold) else 1.0 / threshold
        caveats = ("relies on homogeneity of phi and on positive step distances",)
    if not value < 1.0:
        return StepFactorResult(None, False, f"factor {value:g} is not below 1", caveats)
    return StepFactorResult(float(value), True, "", caveats)


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    certified: bool
    detail: str = ""


@dataclass(frozen=True)
class ApplicabilityRecord:
    """Decision on whether the family's fixed-point principle applies.

    `principle` names the statement in force; `rate` is the per-step factor
    it guarantees; `unique` records whether it also grants uniqueness.
    `certified` is False when any hypothesis was only sampled (custom phi).
    """

    principle: str
    applicable: bool
    unique: bool
    rate: float | None
    certified: bool
    checklist: tuple[HypothesisCheck, ...]

    def failed(self) -> list[str]:
        return [c.name for c in self.checklist if not c.passed]


_PRINCIPLES = {
    "partial": "partial_contraction",
    "partial_dual": "partial_contraction_dual_variant",
    "weak": "weak_contraction_primal_variant",
    "weak_dual": "weak_contraction",
    "bianchini": "bianchini_contraction",
    "chatterjea_bianchini": "chatterjea_bianchini_contraction",
}

_ZERO_SLOT_GRID = np.concatenate([np.linspace(0.0, 0.999, 1000), [1.0 - 1e-9]])


def _homogeneity_check(phi: TriangleFunctionSpec) -> HypothesisCheck:
    if phi.kind != "custom":
        return HypothesisCheck("homogeneity", True, True, "closed form")
    report = trifun.check_homogeneity(phi)
    detail = "sampled" if report.passed else f"fails at {report.witness[:3]}"
    return HypothesisCheck("homogeneity", report.passed, False, detail)


def _origin_continuity_check(phi: TriangleFunctionSpec) -> HypothesisCheck:
    if phi.kind != "custom":
        return HypothesisCheck("origin_continuity", True, True, "closed form")
    report = trifun.check_limit_deviation(phi)
    return HypothesisCheck("origin_continuity", report.origin_continuous, False,
                           f"tail value {report.origin_tail:g}")


def _full_continuity_check(phi: TriangleFunctionSpec) -> HypothesisCheck:
    if phi.kind != "custom":
        return HypothesisCheck("full_continuity", True, True, "closed form")
    passed, detail = _sampled_full_continuity(phi)
    return HypothesisCheck("full_continuity", passed, False, detail)


@lru_cache(maxsize=128)
def _sampled_full_continuity(phi: TriangleFunctionSpec) -> tuple[bool, str]:
    """Probe for jumps: tiny symmetric perturbations at sampled points."""
    h = 1e-9
    rng = np.random.default_rng(DEFAULT_SEED)
    base = np.concatenate([np.linspace(0.0, 4.0, 30), rng.uniform(0.0, 4.0, 70)])
    uu, vv = np.meshgrid(base, base, indexing="ij")
    with np.errstate(all="ignore"):
        lo = np.asarray(trifun._eval_raw(phi, np.maximum(uu - h, 0.0),
                                         np.maximum(vv - h, 0.0)), dtype=np.float64)
        hi = np.asarray(trifun._eval_raw(phi, uu + h, vv + h), dtype=np.float64)
        osc = np.abs(hi - lo)
        jump = osc > 1e-6 * np.maximum(1.0, np.abs(hi))
    if np.any(jump):
        i, j = np.argwhere(jump)[0]
        return False, f"oscillation {osc[i, j]:g} near (u={base[i]:g}, v={base[j]:g})"
    return True, "sampled"


def _zero_slot_check(phi: TriangleFunctionSpec) -> HypothesisCheck:
    """phi(0, v) < 1 for all 0 <= v < 1."""
    name = "zero_slot_bound"
    if phi.kind in ("additive", "max", "power"):
        return HypothesisCheck(name, True, True, "phi(0, v) = v")
    if phi.kind == "bscaled":
        ok = phi.K <= 1.0
        return HypothesisCheck(name, ok, True, f"sup over v < 1 is K = {phi.K:g}")
    with np.errstate(all="ignore"):
        values = np.asarray(trifun._eval_raw(phi, 0.0, _ZERO_SLOT_GRID), dtype=np.float64)
    bad = ~(values < 1.0)
    if np.any(bad):
        k = int(np.argwhere(bad)[0][0])
        return HypothesisCheck(name, False, False,
                               f"phi(0, {_ZERO_SLOT_GRID[k]:g}) = {values[k]:g}")
    return HypothesisCheck(name, True, False, "sampled")


def _subadditive_check(phi: TriangleFunctionSpec) -> HypothesisCheck:
    """phi(a, b) <= a + b."""
    name = "bounded_by_sum"
    if phi.kind == "additive":
        return HypothesisCheck(name, True, True, "equality")
    if phi.kind == "max":
        return HypothesisCheck(name, True, True, "max <= sum")
    if phi.kind == "bscaled":
        ok = phi.K <= 1.0
        return HypothesisCheck(name, ok, True, f"K = {phi.K:g}")
    if phi.kind == "power":
        ok = phi.q >= 1.0
        return HypothesisCheck(name, ok, True, f"q = {phi.q:g}")
    rng = np.random.default_rng(DEFAULT_SEED)
    a = np.concatenate([np.linspace(0.0, 5.0, 40), rng.uniform(0.0, 5.0, 200)])
    b = np.concatenate([np.linspace(5.0, 0.0, 40), rng.uniform(0.0, 5.0, 200)])
    with np.errstate(all="ignore"):
        values = np.asarray(trifun._eval_raw(phi, a, b), dtype=np.float64)
    bad = violates(values, a + b)
    if np.any(bad):
        k = int(np.argwhere(bad)[0][0])
        return HypothesisCheck(name, False, False,
                               f"phi({a[k]:g}, {b[k]:g}) = {values[k]:g} > {a[k] + b[k]:g}")
    return HypothesisCheck(name, True, False, "sampled")


def _distance_continuity_check(phi: TriangleFunctionSpec) -> HypothesisCheck:
    """Distance continuity via the vanishing-deviation route.

    Closed-form verdicts for the named families (additive, max and power
    satisfy the route for every parameter; bscaled does only at K = 1);
    custom functions run the battery.
    """
    name = "distance_continuity"
    if phi.kind in ("additive", "max", "power"):
        return HypothesisCheck(name, True, True, "vanishing-deviation route")
    if phi.kind == "bscaled":
        ok = phi.K <= 1.0
        detail = "K = 1 reduces to additive" if ok else \
            f"route unavailable at K = {phi.K:g}: deviation tends to (K-1)*y"
        return HypothesisCheck(name, ok, True, detail)
    ok = trifun.limit_deviation_passes(phi)
    return HypothesisCheck(name, ok, False, "battery " + ("passed" if ok else "failed"))


def _chain_check(phi: TriangleFunctionSpec, rate: float | None) -> HypothesisCheck:
    name = "chain_bound_finite"
    if rate is None:
        return HypothesisCheck(name, False, True, "no per-step factor available")
    if phi.kind == "custom":
        report = trifun.chain_report(phi, rate)
        ok = math.isfinite(report.c_alpha) and report.converged
        return HypothesisCheck(name, ok, False,
                               f"observed C({rate:g}) = {report.c_alpha:g}, "
                               + ("converged" if report.converged else "not converged"))
    c = trifun.chain_bound_constant(phi, rate)
    ok = math.isfinite(c)
    detail = f"C({rate:g}) = {c:g}"
    if phi.kind == "bscaled":
        detail += f", rate*K = {rate * phi.K:g}"
    return HypothesisCheck(name, ok, True, detail)


def applicability(kind: ContractionKind, phi: TriangleFunctionSpec) -> ApplicabilityRecord:
    """Decide whether the family's fixed-point principle applies to (kind, phi).

    The checklist mirrors the hypotheses of the matching principle: the
    constants inequality, homogeneity, a finite chain bound at the per-step
    rate, the continuity requirement (at the origin for the partial and weak
    principles, full continuity for the bianchini and chatterjea families),
    and the family-specific side conditions.  The dual/primal variants carry
    the extra conditions their derivations need; they are reported as
    requirements of this route without any claim of necessity.
    """
    checks: list[HypothesisCheck] = []
    factor = step_contraction_factor(kind, phi)
    rate = factor.value if factor.derivable else None

    if kind.tag == "partial":
        ok = kind.alpha + kind.beta < 1.0
        checks.append(HypothesisCheck("constants", ok, True,
                                      f"alpha + beta = {kind.alpha + kind.beta:g}"))
    elif kind.tag == "partial_dual":
        ok = kind.beta < 1.0 and kind.alpha + kind.beta < 1.0
        checks.append(HypothesisCheck("constants", ok, True,
                                      f"alpha/(1-beta) = "
                                      f"{kind.alpha / (1.0 - kind.beta) if kind.beta < 1 else math.inf:g}"))
    elif kind.tag == "weak":
        ok = kind.alpha + 2.0 * kind.delta < 1.0
        checks.append(HypothesisCheck("constants", ok, True,
                                      f"alpha + 2*delta = {kind.alpha + 2.0 * kind.delta:g}"))
    elif kind.tag == "weak_dual":
        ok = kind.alpha < 1.0
        checks.append(HypothesisCheck("constants", ok, True, f"alpha = {kind.alpha:g}"))
    elif kind.tag == "bianchini":
        ok = kind.beta < 1.0
        checks.append(HypothesisCheck("constants", ok, True, f"beta = {kind.beta:g}"))
    else:
        checks.append(HypothesisCheck("constants", True, True,
                                      f"beta = {kind.beta:g} (uniqueness needs beta < 1)"))

    checks.append(_homogeneity_check(phi))
    checks.append(_chain_check(phi, rate))

    if kind.tag in ("partial", "partial_dual", "weak_dual"):
        checks.append(_origin_continuity_check(phi))
    else:
        checks.append(_full_continuity_check(phi))

    if kind.tag == "partial_dual" or kind.tag == "bianchini":
        checks.append(_zero_slot_check(phi))
    if kind.tag == "weak":
        checks.append(_subadditive_check(phi))
    if kind.tag == "chatterjea_bianchini":
        value = float(trifun._eval_raw(phi, 0.0, kind.beta))
        checks.append(HypothesisCheck("zero_slot_at_beta", value < 1.0, True,
                                      f"phi(0, beta) = {value:g}"))
        if kind.beta > 0.0:
            threshold = trifun.unit_profile_inverse(phi, 1.0 / kind.beta)
            checks.append(HypothesisCheck("inverse_gap", threshold > 1.0,
                                          phi.kind != "custom",
                                          f"inverse at 1/beta is {threshold:g}"))
        else:
            checks.append(HypothesisCheck("inverse_gap", True, True, "beta = 0"))
        checks.append(_distance_continuity_check(phi))

    applicable = all(c.passed for c in checks)
    if kind.tag in ("partial", "partial_dual", "bianchini"):
        unique = applicable
    elif kind.tag in ("weak", "weak_dual"):
        unique = applicable and kind.delta == 0.0
    else:
        unique = applicable and kind.beta < 1.0
    certified = all(c.certified for c in checks)
    return ApplicabilityRecord(
        principle=_PRINCIPLES[kind.tag],
        applicable=applicable,
        unique=unique,
        rate=rate,
        certified=certified,
        checklist=tuple(checks),
    )
