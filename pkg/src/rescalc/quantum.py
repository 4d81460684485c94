"""Labeled multipartite states and isometries.

Every array is indexed row-major over the declared system order, so a state on
``[R, A]`` with dims ``(2, 3)`` has basis index ``r * 3 + a``. All values are
immutable: arrays are stored read-only and operations return new objects.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

TOL = 1e-9
DEFAULT_MAX_DIM = 4096


class DimensionError(ValueError):
    """Raised when declared labels and array shapes disagree, or a cap is hit."""


def max_dim() -> int:
    return int(os.environ.get("RT_MAX_DIM", DEFAULT_MAX_DIM))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SystemLabel:
    name: str
    dim: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("system name must be non-empty")
        if int(self.dim) < 1:
            raise ValueError(f"system {self.name!r} has dimension {self.dim} < 1")

    def __str__(self):
        return f"{self.name}({self.dim})"


def _systems(systems: Iterable) -> tuple[SystemLabel, ...]:
    out = []
    for s in systems:
        if isinstance(s, SystemLabel):
            out.append(s)
        else:
            name, dim = s
            out.append(SystemLabel(name, int(dim)))
    names = [s.name for s in out]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ValueError(f"duplicate system labels: {sorted(dup)}")
    return tuple(out)


def _total_dim(systems: Sequence[SystemLabel]) -> int:
    d = int(np.prod([s.dim for s in systems], dtype=np.int64)) if systems else 1
    if d > max_dim():
        raise DimensionError(f"total dimension {d} exceeds cap {max_dim()} (set RT_MAX_DIM to raise it)")
    return d


@dataclass(frozen=True, eq=False)
class MultiState:
    """Density operator over an ordered list of labeled subsystems."""

    systems: tuple[SystemLabel, ...]
    matrix: np.ndarray

    def __post_init__(self):
        systems = _systems(self.systems)
        object.__setattr__(self, "systems", systems)
        m = _frozen(self.matrix)
        d = _total_dim(systems)
        if m.shape != (d, d):
            raise DimensionError(f"matrix shape {m.shape} does not match system dims {self.dims}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TOL:
            raise ValueError(f"density matrix has trace {np.trace(m).real!r}, expected 1")
        if np.linalg.eigvalsh(m).min() < -TOL:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.systems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.systems)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PureState:
    """State vector over an ordered list of labeled subsystems."""

    systems: tuple[SystemLabel, ...]
    vector: np.ndarray

    def __post_init__(self):
        systems = _systems(self.systems)
        object.__setattr__(self, "systems", systems)
        v = _frozen(np.ravel(self.vector))
        d = _total_dim(systems)
        if v.shape != (d,):
            raise DimensionError(f"vector length {v.shape[0]} does not match system dims {self.dims}")
        if abs(np.linalg.norm(v) - 1.0) > TOL:
            raise ValueError(f"state vector has norm {np.linalg.norm(v)!r}, expected 1")
        object.__setattr__(self, "vector", v)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.systems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.systems)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def density(self) -> MultiState:
        return MultiState(self.systems, np.outer(self.vector, self.vector.conj()))


State = Union[MultiState, PureState]


@dataclass(frozen=True, eq=False)
class Isometry:
    """Linear isometry from ``in_systems`` to ``out_systems``."""

    in_systems: tuple[SystemLabel, ...]
    out_systems: tuple[SystemLabel, ...]
    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        ins, outs = _systems(self.in_systems), _systems(self.out_systems)
        object.__setattr__(self, "in_systems", ins)
        object.__setattr__(self, "out_systems", outs)
        m = _frozen(self.matrix)
        shape = (_total_dim(outs), _total_dim(ins))
        if m.shape != shape:
            raise DimensionError(f"isometry matrix has shape {m.shape}, labels imply {shape}")
        defect = np.max(np.abs(m.conj().T @ m - np.eye(shape[1])), initial=0.0)
        if defect > TOL:
            raise ValueError(f"matrix is not an isometry (max |V^dag V - I| = {defect:.3g})")
        object.__setattr__(self, "matrix", m)

    @property
    def in_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.in_systems)

    @property
    def out_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.out_systems)


def _index(systems: Sequence[SystemLabel], names: Iterable[str]) -> list[int]:
    pos = {s.name: i for i, s in enumerate(systems)}
    idx = []
    for n in names:
        if n not in pos:
            raise KeyError(f"unknown system label {n!r}; state has {[s.name for s in systems]}")
        idx.append(pos[n])
    return idx


# --- constructors -----------------------------------------------------------

def basis_state(systems, digits: Sequence[int]) -> PureState:
    systems = _systems(systems)
    v = np.zeros(_total_dim(systems), dtype=complex)
    v[np.ravel_multi_index(tuple(digits), [s.dim for s in systems])] = 1.0
    return PureState(systems, v)


def maximally_entangled(a: str, b: str, dim: int = 2) -> PureState:
    v = np.eye(dim, dtype=complex).ravel() / np.sqrt(dim)
    return PureState((SystemLabel(a, dim), SystemLabel(b, dim)), v)


def ghz(names: Sequence[str] = ("R", "A", "B")) -> PureState:
    n = len(names)
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return PureState(tuple(SystemLabel(x, 2) for x in names), v)


def diagonal_state(name: str, probs: Sequence[float]) -> MultiState:
    return MultiState((SystemLabel(name, len(probs)),), np.diag(np.asarray(probs, dtype=complex)))


def maximally_mixed(name: str, dim: int = 2) -> MultiState:
    return diagonal_state(name, [1.0 / dim] * dim)


def identity_isometry(src: str, dst: str, dim: int = 2) -> Isometry:
    return Isometry((SystemLabel(src, dim),), (SystemLabel(dst, dim),), np.eye(dim), name="id")


# --- operations -------------------------------------------------------------

def tensor(a: State, b: State) -> State:
    """Kronecker product; systems are ``a.systems + b.systems``."""
    clash = set(a.names) & set(b.names)
    if clash:
        raise ValueError(f"cannot tensor states sharing labels {sorted(clash)}")
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(a.systems + b.systems, np.kron(a.vector, b.vector))
    if isinstance(a, PureState):
        a = a.density()
    if isinstance(b, PureState):
        b = b.density()
    return MultiState(a.systems + b.systems, np.kron(a.matrix, b.matrix))


def tensor_power(s: State, n: int, suffix: str = "_") -> State:
    """``n`` copies of ``s`` with labels renamed ``X -> X_1 .. X_n``."""
    out = None
    for k in range(1, n + 1):
        copy = relabel(s, {x: f"{x}{suffix}{k}" for x in s.names})
        out = copy if out is None else tensor(out, copy)
    return out


def relabel(s: State, mapping: dict[str, str]) -> State:
    systems = tuple(SystemLabel(mapping.get(x.name, x.name), x.dim) for x in s.systems)
    if isinstance(s, PureState):
        return PureState(systems, s.vector)
    return MultiState(systems, s.matrix)


def partial_trace(s: State, keep: Iterable[str]) -> MultiState:
    """Reduced state on ``keep``; kept systems stay in their original order."""
    keep = set(keep)
    _index(s.systems, keep)
    kept = [i for i, x in enumerate(s.systems) if x.name in keep]
    traced = [i for i, x in enumerate(s.systems) if x.name not in keep]
    dims = s.dims
    dk = int(np.prod([dims[i] for i in kept], dtype=np.int64))
    dt = int(np.prod([dims[i] for i in traced], dtype=np.int64))
    systems = tuple(s.systems[i] for i in kept)
    if isinstance(s, PureState):
        m = s.vector.reshape(dims).transpose(kept + traced).reshape(dk, dt)
        rho = m @ m.conj().T
    else:
        n = len(dims)
        t = s.matrix.reshape(dims + dims)
        perm = kept + traced + [n + i for i in kept] + [n + i for i in traced]
        t = t.transpose(perm).reshape(dk, dt, dk, dt)
        rho = np.einsum("ijkj->ik", t)
    return MultiState(systems, rho)


def permute_systems(s: State, new_order: Sequence[str]) -> State:
    new_order = list(new_order)
    if sorted(new_order) != sorted(s.names) or len(set(new_order)) != len(new_order):
        raise ValueError(f"{new_order} is not a permutation of {list(s.names)}")
    perm = _index(s.systems, new_order)
    systems = tuple(s.systems[i] for i in perm)
    dims = s.dims
    if isinstance(s, PureState):
        return PureState(systems, s.vector.reshape(dims).transpose(perm).reshape(-1))
    n = len(dims)
    m = s.matrix.reshape(dims + dims).transpose(perm + [n + i for i in perm])
    return MultiState(systems, m.reshape(s.dim, s.dim))


def purify(rho: MultiState, ref: Union[str, SystemLabel] = "R") -> PureState:
    """Canonical purification with the reference system placed first.

    Eigenvectors of ``rho`` are paired with reference basis states in order of
    descending eigenvalue (ties keep the eigensolver's ascending index order),
    so ``|psi> = sum_k sqrt(lam_k) |k>_ref |e_k>``.
    """
    name = ref.name if isinstance(ref, SystemLabel) else ref
    if name in rho.names:
        raise ValueError(f"reference label {name!r} already used by the state")
    d = rho.dim
    if isinstance(ref, SystemLabel) and ref.dim != d:
        raise DimensionError(f"reference dimension must equal dim(rho) = {d}")
    lam, vecs = np.linalg.eigh(rho.matrix)
    if lam.min() < -TOL:
        raise ValueError("cannot purify a non-PSD operator")
    order = sorted(range(d), key=lambda k: (-lam[k], k))
    v = np.zeros((d, d), dtype=complex)
    for r, k in enumerate(order):
        e = vecs[:, k]
        lead = e[np.flatnonzero(np.abs(e) > TOL)[0]]
        v[r] = np.sqrt(max(lam[k], 0.0)) * e * (abs(lead) / lead)
    v /= np.linalg.norm(v)
    return PureState((SystemLabel(name, d),) + rho.systems, v.reshape(-1))


def apply(v: Isometry, s: State) -> State:
    """Apply ``v`` to its input systems of ``s``, identity elsewhere.

    The output systems take the position of the first input system; the
    remaining systems keep their order.
    """
    for x in v.in_systems:
        (i,) = _index(s.systems, [x.name])
        if s.systems[i].dim != x.dim:
            raise DimensionError(f"system {x.name!r} has dim {s.systems[i].dim}, isometry expects {x.dim}")
    clash = (set(s.names) - set(v.in_names)) & set(v.out_names)
    if clash:
        raise ValueError(f"isometry outputs {sorted(clash)} clash with untouched systems")
    first = min(_index(s.systems, v.in_names))
    rest = [x.name for x in s.systems if x.name not in v.in_names]
    before = [x for x in rest if s.names.index(x) < first]
    after = [x for x in rest if s.names.index(x) > first]
    t = permute_systems(s, before + list(v.in_names) + after)
    db = int(np.prod([x.dim for x in t.systems[: len(before)]], dtype=np.int64))
    da = int(np.prod([x.dim for x in t.systems[len(before) + len(v.in_names):]], dtype=np.int64))
    din, dout = v.matrix.shape[1], v.matrix.shape[0]
    systems = t.systems[: len(before)] + v.out_systems + t.systems[len(before) + len(v.in_names):]
    _total_dim(systems)
    if isinstance(t, PureState):
        out = np.einsum("oi,bia->boa", v.matrix, t.vector.reshape(db, din, da))
        return PureState(systems, out.reshape(-1))
    m = t.matrix.reshape(db, din, da, db, din, da)
    out = np.einsum("oi,bialjc,pj->boalpc", v.matrix, m, v.matrix.conj())
    d = db * dout * da
    return MultiState(systems, out.reshape(d, d))


def compose(first: Isometry, second: Isometry) -> Isometry:
    """``second`` after ``first``; ``second``'s inputs must be a subset of ``first``'s outputs."""
    probe_sys = first.in_systems
    cols = []
    for k in range(first.matrix.shape[1]):
        e = np.zeros(first.matrix.shape[1], dtype=complex)
        e[k] = 1.0
        out = apply(second, apply(first, PureState(probe_sys, e)))
        cols.append(out.vector)
    return Isometry(first.in_systems, out.systems, np.stack(cols, axis=1), name=f"{second.name}*{first.name}")


def kron_isometry(a: Isometry, b: Isometry) -> Isometry:
    return Isometry(a.in_systems + b.in_systems, a.out_systems + b.out_systems,
                    np.kron(a.matrix, b.matrix), name=f"{a.name}(x){b.name}")


# --- JSON -------------------------------------------------------------------

def _encode_array(a: np.ndarray):
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _decode_array(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _encode_systems(systems):
    return [{"name": s.name, "dim": s.dim} for s in systems]


def _decode_systems(items):
    return tuple(SystemLabel(str(x["name"]), int(x["dim"])) for x in items)


def to_json(obj) -> dict:
    if isinstance(obj, Isometry):
        d = {"kind": "isometry", "in_systems": _encode_systems(obj.in_systems),
             "out_systems": _encode_systems(obj.out_systems), "data": _encode_array(obj.matrix)}
        if obj.name:
            d["name"] = obj.name
        return d
    if isinstance(obj, PureState):
        return {"kind": "pure", "systems": _encode_systems(obj.systems), "data": _encode_array(obj.vector)}
    if isinstance(obj, MultiState):
        return {"kind": "density", "systems": _encode_systems(obj.systems), "data": _encode_array(obj.matrix)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_json(d: dict):
    kind = d.get("kind")
    if kind == "isometry":
        return Isometry(_decode_systems(d["in_systems"]), _decode_systems(d["out_systems"]),
                        _decode_array(d["data"]), name=d.get("name", ""))
    if kind == "pure":
        return PureState(_decode_systems(d["systems"]), _decode_array(d["data"]))
    if kind == "density":
        return MultiState(_decode_systems(d["systems"]), _decode_array(d["data"]))
    raise ValueError(f"unknown kind {kind!r}; expected density, pure or isometry")


def load(path) -> Union[MultiState, PureState, Isometry]:
    with open(path) as f:
        return from_json(json.load(f))


def dump(obj, path) -> None:
    with open(path, "w") as f:
        json.dump(to_json(obj), f, indent=1)
        f.write("\n")
