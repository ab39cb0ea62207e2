"""Shared test fixtures: hand-rolled oracles and seeded instance builders.

The oracles here are deliberately independent of the package internals:
plain-Python loops and closed formulas recomputed from scratch, used to
freeze expected values.
"""

from __future__ import annotations

import math

import numpy as np

import contraction_lab as cl
from contraction_lab.search import random_metric, random_self_map, random_ultrametric

# ---------------------------------------------------------------------------
# independent oracles


def phi_oracle(phi: cl.TriangleFunctionSpec, u: float, v: float) -> float:
    """Scalar triangle-function evaluation via math.* only."""
    if phi.kind == "additive":
        return u + v
    if phi.kind == "max":
        return max(u, v)
    if phi.kind == "bscaled":
        return phi.K * (u + v)
    if phi.kind == "power":
        return (u**phi.q + v**phi.q) ** (1.0 / phi.q)
    raise NotImplementedError(phi.kind)


def chain_oracle(phi: cl.TriangleFunctionSpec, alpha: float, p: int) -> float:
    """Right-to-left nested chain value, plain floats."""
    value = alpha**p
    for i in range(p - 1, -1, -1):
        value = phi_oracle(phi, alpha**i, value)
    return value


def c_alpha_oracle(phi: cl.TriangleFunctionSpec, alpha: float) -> float:
    if phi.kind == "additive":
        return 1.0 / (1.0 - alpha)
    if phi.kind == "max":
        return 1.0
    if phi.kind == "power":
        return (1.0 - alpha**phi.q) ** (-1.0 / phi.q)
    if phi.kind == "bscaled":
        return phi.K / (1.0 - alpha * phi.K) if alpha * phi.K < 1.0 else math.inf
    raise NotImplementedError(phi.kind)


def minimal_b_oracle(dist: np.ndarray) -> float:
    """Triple loop over ordered triples with x != y."""
    n = dist.shape[0]
    best = 1.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for k in range(n):
                denom = dist[i, k] + dist[k, j]
                if denom > 0.0:
                    best = max(best, dist[i, j] / denom)
    return best


# ---------------------------------------------------------------------------
# recurring spaces


def stretched_space() -> cl.FiniteSemimetricSpace:
    """Three points with d(x,y)=d(x,z)=1 and d(y,z)=3."""
    dist = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 3.0], [1.0, 3.0, 0.0]])
    return cl.FiniteSemimetricSpace(("x", "y", "z"), dist)


def line_space() -> cl.FiniteSemimetricSpace:
    """Three collinear points, an honest metric."""
    dist = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    return cl.FiniteSemimetricSpace(("a", "b", "c"), dist)


def unit_interval() -> cl.IntervalSpace:
    return cl.IntervalSpace(0.0, 1.0)


# ---------------------------------------------------------------------------
# seeded instance sets for the rate / oracle / bound criteria

RATE_CAP = 0.95
EPS_UP = 1e-9


def _pick_kind(tag: str, space, mapping, rng) -> cl.ContractionKind | None:
    """Constants just above the estimated frontier, under the rate cap."""
    est = cl.estimate_min_constants(space, mapping, tag)
    if est.unbounded:
        return None
    if tag in ("bianchini", "chatterjea_bianchini"):
        beta = est.beta_star + EPS_UP
        if beta >= RATE_CAP:
            return None
        return cl.ContractionKind(tag, beta=beta)

    points = list(est.frontier)
    order = rng.permutation(len(points))
    for idx in order:
        pt = points[idx]
        alpha = pt.alpha_min + EPS_UP
        second = pt.secondary
        if tag == "partial" and alpha + second < RATE_CAP:
            return cl.ContractionKind(tag, alpha=alpha, beta=second)
        if tag == "partial_dual" and alpha + second < RATE_CAP:
            return cl.ContractionKind(tag, alpha=alpha, beta=second)
        if tag == "weak" and alpha + 2.0 * second < RATE_CAP:
            return cl.ContractionKind(tag, alpha=alpha, delta=second)
        if tag == "weak_dual" and alpha < RATE_CAP and second < RATE_CAP:
            return cl.ContractionKind(tag, alpha=alpha, delta=second)
    return None


def rate_instances(tag: str, count: int, seed: int) -> list[tuple]:
    """(space, mapping, kind, phi) tuples that verify and are applicable."""
    rng = np.random.default_rng(seed)
    ultra = tag in ("bianchini", "chatterjea_bianchini")
    phi = cl.maximum() if ultra else cl.additive()
    out: list[tuple] = []
    while len(out) < count:
        size = int(rng.integers(3, 9))
        space = random_ultrametric(rng, size) if ultra else random_metric(rng, size)
        mapping = random_self_map(rng, size)
        kind = _pick_kind(tag, space, mapping, rng)
        if kind is None:
            continue
        if not cl.verify_contraction(space, mapping, kind).passed:
            continue
        if not cl.applicability(kind, phi).applicable:
            continue
        out.append((space, mapping, kind, phi))
    return out


def bianchini_bound_instances(beta: float, count: int, seed: int) -> list[tuple]:
    """(space, mapping) pairs on ultrametrics verifying Bianchini at beta."""
    rng = np.random.default_rng(seed)
    kind = cl.ContractionKind("bianchini", beta=beta)
    out: list[tuple] = []
    while len(out) < count:
        size = int(rng.integers(3, 9))
        space = random_ultrametric(rng, size)
        mapping = random_self_map(rng, size)
        if cl.verify_contraction(space, mapping, kind).passed:
            out.append((space, mapping))
    return out
