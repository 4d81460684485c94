"""Exact small-scale checks of the protocols behind the calculus.

Coherent superdense coding and coherent teleportation are built as explicit
isometries and compared against their ideal actions. Entanglement
concentration and Schumacher compression are evaluated exactly over type
classes of the i.i.d. source.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .entropy import binary_entropy, mutual_information, von_neumann_entropy
from .quantum import (Isometry, PureState, ghz, maximally_entangled, partial_trace, permute_systems,
                      tensor)

CIRCUIT_TOL = 1e-12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PHI = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


# --- a minimal named-qubit simulator -------------------------------------------

class _Register:
    """State vector over named qubits, stored as a rank-k tensor."""

    def __init__(self, names: Sequence[str], vector: np.ndarray):
        self.names = list(names)
        self.t = np.asarray(vector, dtype=complex).reshape((2,) * len(self.names))

    def _ax(self, q: str) -> int:
        return self.names.index(q)

    def gate(self, u: np.ndarray, q: str) -> None:
        a = self._ax(q)
        self.t = np.moveaxis(np.tensordot(u, self.t, axes=([1], [a])), 0, a)

    def controlled(self, u: np.ndarray, control: str, target: str) -> None:
        c, a = self._ax(control), self._ax(target)
        idx = [slice(None)] * self.t.ndim
        idx[c] = 1
        sub = self.t[tuple(idx)]
        a2 = a - (1 if a > c else 0)
        sub = np.moveaxis(np.tensordot(u, sub, axes=([1], [a2])), 0, a2)
        self.t = self.t.copy()
        self.t[tuple(idx)] = sub

    def add(self, name: str, vector=(1, 0)) -> None:
        self.t = np.tensordot(self.t, np.asarray(vector, dtype=complex), axes=0)
        self.names.append(name)

    def rename(self, old: str, new: str) -> None:
        self.names[self._ax(old)] = new

    def vector(self, order: Sequence[str]) -> np.ndarray:
        return np.transpose(self.t, [self._ax(q) for q in order]).reshape(-1)


def _build(inputs: Sequence[str], outputs: Sequence[str], run, name: str) -> Isometry:
    cols = []
    for k in range(2 ** len(inputs)):
        e = np.zeros(2 ** len(inputs), dtype=complex)
        e[k] = 1
        reg = _Register(inputs, e)
        run(reg)
        cols.append(reg.vector(outputs))
    return Isometry([(q, 2) for q in inputs], [(q, 2) for q in outputs], np.stack(cols, axis=1), name)


def cobit_isometry(src: str = "A'", alice: str = "A", bob: str = "B") -> Isometry:
    """The coherent bit channel ``|i> -> |i>|i>`` on a qubit."""
    m = np.zeros((4, 2), dtype=complex)
    m[0, 0] = m[3, 1] = 1
    return Isometry([(src, 2)], [(alice, 2), (bob, 2)], m, "Delta")


def coherent_sdc() -> Isometry:
    """Two cobits from one ebit and one qubit channel.

    Alice encodes the message qubits ``A1 A2`` onto her ebit half ``Ea`` with
    controlled ``X`` (from ``A2``) and controlled ``Z`` (from ``A1``) and sends
    ``Ea`` to Bob, who decodes with CNOT and Hadamard. Outputs are
    ``A1 A2 B1 B2``; the ideal action is ``|ij> -> |ij>|ij>``.
    """
    def run(reg: _Register):
        base = reg.vector(["A1", "A2"])
        reg.names = ["A1", "A2", "Ea", "Eb"]
        reg.t = np.kron(base, _PHI).reshape((2,) * 4)
        reg.controlled(_X, "A2", "Ea")
        reg.controlled(_Z, "A1", "Ea")
        reg.rename("Ea", "B1")       # the qubit channel
        reg.rename("Eb", "B2")
        reg.controlled(_X, "B1", "B2")
        reg.gate(_H, "B1")
    return _build(["A1", "A2"], ["A1", "A2", "B1", "B2"], run, "coherent-sdc")


def coherent_teleport() -> Isometry:
    """One qubit channel and two ebits from two cobits and one ebit.

    Alice entangles the message ``M`` with her ebit half ``Ae`` (CNOT, then
    Hadamard on ``M``); cobits copy ``M`` to ``Bm`` and ``Ae`` to ``Bn``; Bob
    corrects his half ``Be`` with controlled ``X`` from ``Bn`` and controlled
    ``Z`` from ``Bm``. Outputs are ``Be M Bm Ae Bn``; the ideal action is
    ``|psi> -> |psi>_Be (x) Phi_{M Bm} (x) Phi_{Ae Bn}``.
    """
    def run(reg: _Register):
        base = reg.vector(["M"])
        reg.names = ["M", "Ae", "Be"]
        reg.t = np.kron(base, _PHI).reshape((2,) * 3)
        reg.controlled(_X, "M", "Ae")
        reg.gate(_H, "M")
        reg.add("Bm")
        reg.controlled(_X, "M", "Bm")        # cobit M -> M Bm
        reg.add("Bn")
        reg.controlled(_X, "Ae", "Bn")       # cobit Ae -> Ae Bn
        reg.controlled(_X, "Bn", "Be")
        reg.controlled(_Z, "Bm", "Be")
    return _build(["M"], ["Be", "M", "Bm", "Ae", "Bn"], run, "coherent-teleport")


def ideal_sdc() -> np.ndarray:
    d = cobit_isometry().matrix
    # (Delta x Delta) has outputs A1 B1 A2 B2; reorder to A1 A2 B1 B2
    m = np.kron(d, d).reshape(2, 2, 2, 2, 4).transpose(0, 2, 1, 3, 4)
    return m.reshape(16, 4)


def ideal_teleport() -> np.ndarray:
    return np.kron(np.eye(2, dtype=complex), np.kron(_PHI, _PHI)[:, None])


def phase_normalized(m: np.ndarray) -> np.ndarray:
    """Rescale so the first nonzero entry (column-major) is real positive."""
    flat = np.asarray(m).ravel(order="F")
    nz = np.flatnonzero(np.abs(flat) > CIRCUIT_TOL)
    if nz.size == 0:
        return np.asarray(m)
    z = flat[nz[0]]
    return np.asarray(m) * (abs(z) / z)


@dataclass(frozen=True)
class CircuitCheck:
    name: str
    deviation: float          # max entrywise |V - ideal| after phase normalization
    isometry_defect: float    # max entrywise |V^dag V - 1|
    tol: float = CIRCUIT_TOL

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol and self.isometry_defect <= self.tol

    def to_json(self) -> dict:
        return {"name": self.name, "deviation": self.deviation,
                "isometry_defect": self.isometry_defect, "tol": self.tol, "passed": self.passed}


def _check(name: str, v: Isometry, ideal: np.ndarray) -> CircuitCheck:
    a, b = phase_normalized(v.matrix), phase_normalized(ideal)
    dev = float(np.max(np.abs(a - b)))
    defect = float(np.max(np.abs(v.matrix.conj().T @ v.matrix - np.eye(v.matrix.shape[1]))))
    return CircuitCheck(name, dev, defect)


def verify_circuits() -> list[CircuitCheck]:
    return [_check("coherent-sdc", coherent_sdc(), ideal_sdc()),
            _check("coherent-teleport", coherent_teleport(), ideal_teleport())]


CIRCUIT_FACTS = {
    "coherent-sdc": "[q->q] + [qq] >= 2*[q->qq]",
    "coherent-teleport": "2*[q->qq] + [qq] >= [q->q] + 2*[qq]",
}


def circuit_facts() -> dict:
    """Resource inequalities certified by the circuit checks that pass."""
    from .calculus import parse_inequality
    return {c.name: parse_inequality(CIRCUIT_FACTS[c.name], name=c.name)
            for c in verify_circuits() if c.passed}


# --- concentration and compression ---------------------------------------------

@dataclass(frozen=True)
class YieldCurve:
    n: int
    per_copy_yield: float
    target: float

    @property
    def gap(self) -> float:
        return self.target - self.per_copy_yield

    def row(self) -> dict:
        return {"n": self.n, "value": self.per_copy_yield, "target": self.target, "gap": self.gap}


MAX_COPIES = 10 ** 6


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_COPIES:
        raise ValueError(f"number of copies must be an integer in [1, {MAX_COPIES}], got {n!r}")


def _log_binomials(n: int) -> np.ndarray:
    lf = np.array([math.lgamma(k + 1) for k in range(n + 1)])
    return lf[n] - lf - lf[::-1]


def concentration_yield(p: float, n: int) -> YieldCurve:
    """Expected ebits per copy from measuring the type of ``n`` copies.

    For ``sqrt(p)|00> + sqrt(1-p)|11>`` the type class of weight ``k`` is
    found with probability ``C(n,k) p^k (1-p)^(n-k)`` and leaves a maximally
    entangled state of Schmidt rank ``C(n,k)``.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p!r}")
    _check_n(n)
    k = np.arange(n + 1)
    lc = _log_binomials(n)
    w = np.exp(lc + k * math.log(p) + (n - k) * math.log1p(-p))
    value = float(np.sum(w * lc) / math.log(2) / n)
    return YieldCurve(n, value, binary_entropy(p))


EXACT_LIMIT = 4096


def schumacher_fidelity(p: float, n: int, rate: float) -> float:
    """Probability mass kept by the ``2^floor(n*rate)`` likeliest eigenvectors of ``diag(p,1-p)^n``.

    Type classes are taken whole in order of decreasing eigenvalue and the
    last one partially. Class sizes are exact integers up to
    ``EXACT_LIMIT`` copies and log-space floats beyond.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if not (isinstance(rate, (int, float)) and math.isfinite(rate) and rate >= 0):
        raise ValueError(f"rate must be a finite nonnegative number, got {rate!r}")
    _check_n(n)
    bits = math.floor(n * rate + 1e-12)
    if bits >= n:
        return 1.0
    lp = math.log(p) if p > 0 else -math.inf
    lq = math.log1p(-p) if p < 1 else -math.inf

    def logprob(k):
        a = k * lp if k else 0.0
        b = (n - k) * lq if n - k else 0.0
        return a + b
    order = sorted(range(n + 1), key=lambda k: (-logprob(k), k))
    mass = 0.0
    if n <= EXACT_LIMIT:
        budget = 1 << bits
        for k in order:
            if budget <= 0:
                break
            take = min(math.comb(n, k), budget)
            budget -= take
            if logprob(k) > -math.inf:
                mass += math.exp(math.log(take) + logprob(k))
        return min(mass, 1.0)
    lc = _log_binomials(n)
    log_budget = bits * math.log(2)
    log_used = -math.inf
    for k in order:
        remaining = log_budget + math.log1p(-math.exp(log_used - log_budget)) if log_used < log_budget else -math.inf
        if remaining == -math.inf:
            break
        log_take = min(lc[k], remaining)
        log_used = np.logaddexp(log_used, log_take)
        if logprob(k) > -math.inf:
            mass += math.exp(log_take + logprob(k))
    return min(mass, 1.0)


def yield_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["n", "value", "target", "gap"], lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(v)) if k != "n" else int(v)) for k, v in r.items()})
    return buf.getvalue()


# --- GHZ versus three EPR pairs ------------------------------------------------

PARTIES = ("R", "A", "B")


def _partial_transpose_spectrum(state: PureState, left: Sequence[str], right: Sequence[str]) -> np.ndarray:
    rho = permute_systems(partial_trace(state, list(left) + list(right)), list(left) + list(right))
    dl = 2 ** len(left)
    dr = 2 ** len(right)
    m = rho.matrix.reshape(dl, dr, dl, dr).transpose(0, 3, 2, 1).reshape(dl * dr, dl * dr)
    return np.sort(np.linalg.eigvalsh(m))[::-1]


@dataclass
class GhzDemo:
    entropies: dict = field(default_factory=dict)        # state -> party -> H
    mutual_info: dict = field(default_factory=dict)      # state -> "X;Y" -> I
    pair_spectra: dict = field(default_factory=dict)     # state -> "XY" -> eigenvalues
    pt_spectra: dict = field(default_factory=dict)       # state -> "XY" -> partial-transpose eigenvalues

    def to_json(self) -> dict:
        def clean(d):
            return {s: {k: ([float(x) for x in v] if isinstance(v, np.ndarray) else float(v))
                        for k, v in inner.items()} for s, inner in d.items()}
        return {"entropies": clean(self.entropies), "mutual_information": clean(self.mutual_info),
                "pair_spectra": clean(self.pair_spectra),
                "partial_transpose_spectra": clean(self.pt_spectra)}

    def to_text(self) -> str:
        states = list(self.entropies)
        lines = ["quantity      " + "".join(f"{s:>16}" for s in states)]
        for p in PARTIES:
            lines.append(f"H({p})          " + "".join(f"{self.entropies[s][p]:16.6f}" for s in states))
        for k in self.mutual_info[states[0]]:
            lines.append(f"I({k})        " + "".join(f"{self.mutual_info[s][k]:16.6f}" for s in states))
        for k in self.pair_spectra[states[0]]:
            for s in states:
                spec = " ".join(f"{x:.4f}" for x in self.pair_spectra[s][k] if abs(x) > 1e-12)
                lines.append(f"spec({k}) {s}: {spec}")
        for k in self.pt_spectra[states[0]]:
            for s in states:
                lines.append(f"min eig of partial transpose on {k}, {s}: {self.pt_spectra[s][k].min():.4f}")
        return "\n".join(lines)


def ghz_states() -> dict:
    """Two GHZ states and three EPR pairs, each party holding two qubits."""
    g = tensor(ghz(("R1", "A1", "B1")), ghz(("R2", "A2", "B2")))
    epr = tensor(tensor(maximally_entangled("R1", "A1"), maximally_entangled("R2", "B1")),
                 maximally_entangled("A2", "B2"))
    return {"GHZ x2": g, "EPR x3": epr}


def ghz_entropy_demo() -> GhzDemo:
    demo = GhzDemo()
    groups = {p: [f"{p}1", f"{p}2"] for p in PARTIES}
    for label, psi in ghz_states().items():
        demo.entropies[label] = {p: von_neumann_entropy(psi, groups[p]) for p in PARTIES}
        demo.mutual_info[label] = {}
        demo.pair_spectra[label] = {}
        demo.pt_spectra[label] = {}
        for i, x in enumerate(PARTIES):
            for y in PARTIES[i + 1:]:
                demo.mutual_info[label][f"{x};{y}"] = mutual_information(psi, groups[x], groups[y])
                rho = partial_trace(psi, groups[x] + groups[y])
                demo.pair_spectra[label][x + y] = np.sort(np.linalg.eigvalsh(rho.matrix))[::-1]
                demo.pt_spectra[label][x + y] = _partial_transpose_spectrum(psi, groups[x], groups[y])
    return demo
