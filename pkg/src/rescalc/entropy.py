"""Entropic functionals in bits, for quantum states and classical joint pmfs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .quantum import (TOL, Isometry, MultiState, PureState, State, apply, partial_trace,
                      purify)

EIG_CLAMP = 1e-12


def binary_entropy(p: float) -> float:
    if p < 0 or p > 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    return -sum(x * math.log2(x) for x in (p, 1 - p) if x > 0)


def entropy_of_spectrum(probs) -> float:
    lam = np.asarray(probs, dtype=float).ravel()
    lam = lam[lam > EIG_CLAMP]
    return float(-np.sum(lam * np.log2(lam))) + 0.0


def von_neumann_entropy(s: State, subset: Iterable[str]) -> float:
    subset = set(subset)
    if not subset:
        return 0.0
    if isinstance(s, PureState) and subset == set(s.names):
        return 0.0
    rho = partial_trace(s, subset)
    return entropy_of_spectrum(np.linalg.eigvalsh(rho.matrix))


def mutual_information(s: State, x: Iterable[str], y: Iterable[str]) -> float:
    x, y = set(x), set(y)
    if x & y:
        raise ValueError(f"subsets overlap on {sorted(x & y)}")
    return (von_neumann_entropy(s, x) + von_neumann_entropy(s, y)
            - von_neumann_entropy(s, x | y))


def quantum_conditional_entropy(s: State, x: Iterable[str], given: Iterable[str]) -> float:
    x, given = set(x), set(given)
    return von_neumann_entropy(s, x | given) - von_neumann_entropy(s, given)


@dataclass(frozen=True)
class RatePair:
    """Qubits (``q``) and ebits (``e``) per channel use."""

    q: float
    e: float

    def __iter__(self):
        yield self.q
        yield self.e


def feedback_coefficients(u: Isometry, rho: MultiState, bob: Optional[Sequence[str]] = None,
                          ref: str = "R") -> RatePair:
    """Rate pair ``(I(R;B)/2, I(A;B)/2)`` of the state ``(1 x U) phi`` for a purification ``phi`` of ``rho``.

    ``bob`` names the output systems received by Bob; by default those whose
    label starts with ``B``. Every other output system belongs to Alice.
    """
    if tuple(x.name for x in rho.systems) != u.in_names or rho.dims != tuple(x.dim for x in u.in_systems):
        raise ValueError(f"state systems {[str(x) for x in rho.systems]} do not match "
                         f"isometry inputs {[str(x) for x in u.in_systems]}")
    if bob is None:
        bob = [n for n in u.out_names if n.startswith("B")]
    bob = set(bob)
    if not bob <= set(u.out_names):
        raise ValueError(f"Bob systems {sorted(bob)} are not outputs of the isometry")
    alice = set(u.out_names) - bob
    psi = apply(u, purify(rho, ref))
    q = 0.5 * mutual_information(psi, {ref}, bob)
    e = 0.5 * mutual_information(psi, alice, bob)
    return RatePair(q, e)


def link_values(psi: PureState) -> tuple[float, float, float]:
    """Half mutual informations ``(I(1;2), I(1;3), I(2;3)) / 2`` of a tripartite pure state.

    Each single-party entropy is the sum of the two links touching it.
    """
    if not isinstance(psi, PureState) or len(psi.systems) != 3:
        raise ValueError("expected a pure state on exactly three systems")
    r, a, b = psi.names
    return (0.5 * mutual_information(psi, {r}, {a}),
            0.5 * mutual_information(psi, {r}, {b}),
            0.5 * mutual_information(psi, {a}, {b}))


# --- classical --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JointPMF:
    variables: tuple[tuple[str, int], ...]
    probs: np.ndarray

    def __post_init__(self):
        variables = tuple((str(n), int(k)) for n, k in self.variables)
        names = [n for n, _ in variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names {names}")
        shape = tuple(k for _, k in variables)
        p = np.array(self.probs, dtype=float).reshape(shape)
        if (p < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
        p.flags.writeable = False
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "probs", p)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    def marginal(self, subset: Iterable[str]) -> np.ndarray:
        subset = set(subset)
        unknown = subset - set(self.names)
        if unknown:
            raise KeyError(f"unknown variables {sorted(unknown)}")
        axes = tuple(i for i, n in enumerate(self.names) if n not in subset)
        return self.probs.sum(axis=axes)

    @classmethod
    def from_channel(cls, input_probs, channel, names=("X", "Y")) -> "JointPMF":
        px = np.asarray(input_probs, dtype=float)
        w = np.asarray(channel, dtype=float)
        return cls(((names[0], w.shape[0]), (names[1], w.shape[1])), px[:, None] * w)

    @classmethod
    def from_json(cls, d: dict) -> "JointPMF":
        return cls(tuple((v["name"], v["size"]) for v in d["variables"]), d["probs"])

    def to_json(self) -> dict:
        return {"variables": [{"name": n, "size": k} for n, k in self.variables],
                "probs": [float(x) for x in self.probs.ravel()]}

    @classmethod
    def load(cls, path) -> "JointPMF":
        with open(path) as f:
            return cls.from_json(json.load(f))


def shannon_entropy(p: JointPMF, subset: Iterable[str]) -> float:
    subset = set(subset)
    if not subset:
        return 0.0
    return entropy_of_spectrum(p.marginal(subset))


def classical_mutual_information(p: JointPMF, x: Iterable[str], y: Iterable[str]) -> float:
    x, y = set(x), set(y)
    if x & y:
        raise ValueError(f"subsets overlap on {sorted(x & y)}")
    return shannon_entropy(p, x) + shannon_entropy(p, y) - shannon_entropy(p, x | y)


def conditional_entropy(p: JointPMF, x: Iterable[str], given: Iterable[str]) -> float:
    x, given = set(x), set(given)
    return shannon_entropy(p, x | given) - shannon_entropy(p, given)
