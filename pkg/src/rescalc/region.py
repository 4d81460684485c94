"""Single-letter rate region of a feedback channel.

For an isometry ``U: A' -> AB`` every input state ``rho`` gives the rate pair
``(I(R;B)/2, I(A;B)/2)``. This module samples inputs, maximizes weighted
rates, extracts the Pareto frontier, and provides a classical capacity
baseline. Only the one-copy region is explored.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .entropy import RatePair, feedback_coefficients
from .quantum import Isometry, MultiState, TOL, max_dim, DimensionError

FD_STEP = 1e-5
GAIN_TOL = 1e-8
MAX_ITERS = 10000
NOTE = "single-letter region (one channel use); the regularized region is not computed"


def _check_dims(u: Isometry) -> int:
    d = u.matrix.shape[1]
    if d * d > max_dim() or u.matrix.shape[0] > max_dim():
        raise DimensionError(f"channel dimensions exceed the cap {max_dim()}")
    return d


def _ginibre(rng: np.random.Generator, d: int) -> np.ndarray:
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def _density(m: np.ndarray) -> np.ndarray:
    r = m @ m.conj().T
    r = (r + r.conj().T) / 2
    return r / np.trace(r).real


def _rates(u: Isometry, rho: np.ndarray, bob) -> RatePair:
    return feedback_coefficients(u, MultiState(u.in_systems, rho), bob)


def _streams(seed: int, n: int) -> list:
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def dominates(a: RatePair, b: RatePair, tol: float = TOL) -> bool:
    return (a.q >= b.q - tol and a.e >= b.e - tol) and (a.q > b.q + tol or a.e > b.e + tol)


def pareto_frontier(points: Sequence[RatePair], tol: float = TOL) -> list[RatePair]:
    """Non-dominated points sorted by ``q``; among near-duplicates the first is kept."""
    keep = []
    for i, p in enumerate(points):
        if any(dominates(o, p, tol) for o in points):
            continue
        if any(abs(k.q - p.q) <= tol and abs(k.e - p.e) <= tol for _, k in keep):
            continue
        keep.append((i, p))
    keep.sort(key=lambda t: (t[1].q, t[0]))
    return [p for _, p in keep]


@dataclass
class RegionResult:
    points: list
    frontier: list
    channel_id: str
    samples: int
    restarts: int = 0
    seed: int = 0
    sources: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "e", "source"])
        for p, s in zip(self.points, self.sources or ["sample"] * len(self.points)):
            w.writerow([repr(float(p.q)), repr(float(p.e)), s])
        for p in self.frontier:
            w.writerow([repr(float(p.q)), repr(float(p.e)), "frontier"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"channel_id": self.channel_id, "samples": self.samples, "restarts": self.restarts,
                "seed": self.seed, "note": NOTE, **self.meta,
                "points": [{"q": p.q, "e": p.e, "source": s}
                           for p, s in zip(self.points, self.sources or ["sample"] * len(self.points))],
                "frontier": [{"q": p.q, "e": p.e} for p in self.frontier]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def sample_region(u: Isometry, n_samples: int, seed: int, bob: Optional[Sequence[str]] = None,
                  channel_id: str = "") -> RegionResult:
    """Rate pairs of ``n_samples`` Hilbert-Schmidt random inputs.

    Sample ``i`` draws from its own substream of ``SeedSequence(seed)``, so
    results do not depend on evaluation order.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    d = _check_dims(u)
    points = [_rates(u, _density(_ginibre(rng, d)), bob) for rng in _streams(seed, n_samples)]
    return RegionResult(points, pareto_frontier(points), channel_id or u.name, n_samples, 0, seed,
                        ["sample"] * n_samples)


@dataclass
class WeightedOptimum:
    pair: RatePair
    rho: np.ndarray
    objective: float
    converged: bool
    iterations: int
    restart: int

    def __iter__(self):
        yield self.pair
        yield self.rho


def _unpack(x: np.ndarray, d: int) -> np.ndarray:
    return x[: d * d].reshape(d, d) + 1j * x[d * d:].reshape(d, d)


def _ascend(f, x: np.ndarray, max_iters: int) -> tuple[np.ndarray, float, bool, int]:
    fx = f(x)
    step = 1.0
    for it in range(1, max_iters + 1):
        g = np.empty_like(x)
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = FD_STEP
            g[k] = (f(x + e) - f(x - e)) / (2 * FD_STEP)
        norm = np.linalg.norm(g)
        if norm == 0:
            return x, fx, True, it
        while step > 1e-12:
            y = x + step * g / norm
            fy = f(y)
            if fy > fx:
                break
            step /= 2
        else:
            return x, fx, True, it
        gain = fy - fx
        x, fx = y, fy
        step = min(step * 2, 1.0)
        if gain < GAIN_TOL:
            return x, fx, True, it
    return x, fx, False, max_iters


def maximize_weighted(u: Isometry, lam: float, restarts: int = 20, seed: int = 0,
                      bob: Optional[Sequence[str]] = None, max_iters: int = MAX_ITERS) -> WeightedOptimum:
    """Locally maximize ``lam*q + (1-lam)*e`` over inputs ``rho = M M^dag / tr``.

    Each restart starts from its own Ginibre draw and climbs along central
    finite-difference gradients with a backtracking step. The best restart
    wins, ties broken by larger ``q + e`` and then by restart order.
    ``converged`` is False if some restart hit ``max_iters``.
    """
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    d = _check_dims(u)

    def objective(x):
        r = _rates(u, _density(_unpack(x, d)), bob)
        return lam * r.q + (1 - lam) * r.e

    best: Optional[WeightedOptimum] = None
    all_converged = True
    for i, rng in enumerate(_streams(seed, restarts)):
        m = _ginibre(rng, d)
        x0 = np.concatenate([m.real.ravel(), m.imag.ravel()])
        x, fx, ok, its = _ascend(objective, x0, max_iters)
        all_converged &= ok
        rho = _density(_unpack(x, d))
        pair = _rates(u, rho, bob)
        cand = WeightedOptimum(pair, rho, fx, ok, its, i)
        if best is None or (fx, pair.q + pair.e) > (best.objective, best.pair.q + best.pair.e):
            best = cand
    best.converged = all_converged
    return best


def optimize_region(u: Isometry, lambdas: Sequence[float], restarts: int, seed: int,
                    bob: Optional[Sequence[str]] = None, channel_id: str = "") -> RegionResult:
    """Trace the frontier by maximizing a sweep of weights."""
    pts, sources, flags = [], [], []
    for j, lam in enumerate(lambdas):
        opt = maximize_weighted(u, lam, restarts, seed + j, bob)
        pts.append(opt.pair)
        sources.append(f"lambda={lam:g}")
        flags.append(opt.converged)
    return RegionResult(pts, pareto_frontier(pts), channel_id or u.name, 0, restarts, seed, sources,
                        {"lambdas": list(map(float, lambdas)), "converged": flags})


def blahut_arimoto(channel, tol: float = 1e-9, max_iter: int = 1_000_000) -> float:
    """Capacity in bits of a discrete memoryless channel ``W[x, y] = P(y|x)``.

    Iterates until the gap between the standard lower and upper capacity
    bounds drops below ``tol`` and returns the lower bound.
    """
    w = np.asarray(channel, dtype=float)
    if w.ndim != 2 or w.size == 0:
        raise ValueError("channel must be a nonempty 2-D array")
    if (w < 0).any() or not np.allclose(w.sum(axis=1), 1.0, atol=TOL, rtol=0):
        raise ValueError("every row of the channel must be a probability distribution")
    p = np.full(w.shape[0], 1.0 / w.shape[0])
    logw = np.where(w > 0, np.log2(np.where(w > 0, w, 1.0)), 0.0)
    for _ in range(max_iter):
        q = p @ w
        logq = np.log2(np.where(q > 0, q, 1.0))
        dvec = np.sum(w * (logw - logq), axis=1)
        lower = math.log2(float(np.sum(p * np.exp2(dvec))))
        upper = float(np.max(dvec))
        if upper - lower < tol:
            return max(lower, 0.0)
        p = p * np.exp2(dvec)
        p /= p.sum()
    raise RuntimeError(f"Blahut-Arimoto did not reach tolerance {tol} in {max_iter} iterations")
