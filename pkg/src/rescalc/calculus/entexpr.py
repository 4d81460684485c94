"""Exact linear combinations of joint entropies.

An :class:`EntExpr` is ``constant + sum_S c_S H(S)`` with rational ``c_S``.
Mutual informations and conditional entropies are expanded into this basis at
construction, so two expressions are equal exactly when their canonical forms
under the same :class:`Context` have identical term maps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Callable, Iterable, Mapping, Optional, Union

Number = Union[int, Fraction]
Subset = frozenset

LABEL_RE = re.compile(r"[A-Z][a-z0-9]*(?:_[A-Z])?['^]*")


def split_labels(text: str) -> list[str]:
    """Split ``"RA'B"`` or ``"X_AY_B"`` into labels; raises on leftovers."""
    out, pos = [], 0
    text = text.replace(",", " ")
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = LABEL_RE.match(text, pos)
        if not m:
            raise ValueError(f"bad system label at {text[pos:]!r}")
        out.append(m.group())
        pos = m.end()
    return out


def label_key(labels: Iterable[str]) -> tuple:
    """Shortlex order: fewer labels first, then sorted label tuple."""
    t = tuple(sorted(labels))
    return (len(t), t)


def format_labels(labels: Iterable[str]) -> str:
    t = sorted(labels)
    if all(len(x) == 1 for x in t):
        return "".join(t)
    return ",".join(t)


@dataclass(frozen=True)
class Context:
    """Facts about the labels an expression talks about.

    ``pure`` lists groups of systems whose joint state is pure, ``classical``
    marks labels that are random variables, ``free`` declares labels with no
    structural assumptions.
    """

    pure: frozenset = frozenset()
    classical: frozenset = frozenset()
    free: frozenset = frozenset()

    @classmethod
    def make(cls, pure: Iterable[Iterable[str]] = (), classical: Iterable[str] = (),
             free: Iterable[str] = ()) -> "Context":
        groups = frozenset(frozenset(g) for g in pure if len(frozenset(g)) > 0)
        return cls(groups, frozenset(classical), frozenset(free))

    def union(self, other: "Context") -> "Context":
        return Context(self.pure | other.pure, self.classical | other.classical, self.free | other.free)

    @property
    def bound(self) -> frozenset:
        out = set(self.classical) | set(self.free)
        for g in self.pure:
            out |= g
        return frozenset(out)

    def is_empty(self) -> bool:
        return not (self.pure or self.classical or self.free)

    def map_labels(self, fn: Callable[[str], Optional[str]]) -> "Context":
        def m(ls):
            return frozenset(y for y in (fn(x) for x in ls) if y is not None)
        return Context(frozenset(g for g in (m(g) for g in self.pure) if g), m(self.classical), m(self.free))

    def to_text(self) -> str:
        items = [f"pure({format_labels(g)})" for g in sorted(self.pure, key=label_key)]
        if self.classical:
            items.append(f"classical({format_labels(self.classical)})")
        if self.free:
            items.append(f"free({format_labels(self.free)})")
        return ", ".join(items)


@lru_cache(maxsize=65536)
def _representative(s: frozenset, groups: frozenset) -> frozenset:
    seen = {s}
    frontier = [s]
    while frontier:
        cur = frontier.pop()
        for g in groups:
            if cur <= g:
                nxt = g - cur
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    return min(seen, key=label_key)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("entropic coefficients must be exact; got a float")
    return Fraction(x)


@dataclass(frozen=True)
class EntExpr:
    terms: tuple = ()          # sorted ((frozenset labels, Fraction), ...), no zeros, no empty set
    constant: Fraction = field(default=Fraction(0))

    @classmethod
    def build(cls, terms: Mapping[frozenset, Number] = None, constant: Number = 0) -> "EntExpr":
        merged: dict[frozenset, Fraction] = {}
        for s, c in (terms or {}).items():
            s = frozenset(s)
            if not s:
                continue
            merged[s] = merged.get(s, Fraction(0)) + _frac(c)
        items = tuple(sorted(((s, c) for s, c in merged.items() if c != 0), key=lambda t: label_key(t[0])))
        return cls(items, _frac(constant))

    # constructors
    @classmethod
    def const(cls, c: Number) -> "EntExpr":
        return cls.build({}, c)

    @classmethod
    def H(cls, labels: Iterable[str], given: Iterable[str] = ()) -> "EntExpr":
        x, y = frozenset(labels), frozenset(given)
        if not y:
            return cls.build({x: 1})
        return cls.build({x | y: 1}) - cls.build({y: 1})

    @classmethod
    def I(cls, x: Iterable[str], y: Iterable[str]) -> "EntExpr":
        x, y = frozenset(x), frozenset(y)
        if x & y:
            raise ValueError(f"mutual information arguments overlap on {sorted(x & y)}")
        return cls.build({x: 1}) + cls.build({y: 1}) - cls.build({x | y: 1})

    # arithmetic
    @property
    def map(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "EntExpr") -> "EntExpr":
        other = _coerce(other)
        m = self.map
        for s, c in other.terms:
            m[s] = m.get(s, Fraction(0)) + c
        return EntExpr.build(m, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> "EntExpr":
        return EntExpr(tuple((s, -c) for s, c in self.terms), -self.constant)

    def __sub__(self, other: "EntExpr") -> "EntExpr":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "EntExpr":
        return _coerce(other) - self

    def __mul__(self, k) -> "EntExpr":
        if isinstance(k, EntExpr):
            if k.terms and self.terms:
                raise ValueError("product of two entropic expressions is not linear")
            if k.terms:
                return k * self.constant
            k = k.constant
        k = _frac(k)
        return EntExpr.build({s: c * k for s, c in self.terms}, self.constant * k)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "EntExpr":
        return self * (1 / _frac(k))

    # queries
    def is_zero(self) -> bool:
        return not self.terms and self.constant == 0

    def is_constant(self) -> bool:
        return not self.terms

    @property
    def labels(self) -> frozenset:
        out = set()
        for s, _ in self.terms:
            out |= s
        return frozenset(out)

    def entropic_part(self) -> "EntExpr":
        return EntExpr(self.terms, Fraction(0))

    def evaluate(self, entropy: Callable[[frozenset], float]) -> float:
        return float(self.constant) + sum(float(c) * entropy(s) for s, c in self.terms)

    def map_labels(self, fn: Callable[[str], Optional[str]]) -> "EntExpr":
        out: dict[frozenset, Fraction] = {}
        for s, c in self.terms:
            t = frozenset(y for y in (fn(x) for x in s) if y is not None)
            out[t] = out.get(t, Fraction(0)) + c
        return EntExpr.build(out, self.constant)

    def canonical(self, ctx: Optional[Context] = None) -> "EntExpr":
        groups = ctx.pure if ctx else frozenset()
        if not groups:
            return self
        out: dict[frozenset, Fraction] = {}
        for s, c in self.terms:
            r = _representative(s, groups)
            out[r] = out.get(r, Fraction(0)) + c
        return EntExpr.build(out, self.constant)

    # printing
    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        if not self.terms:
            return _fmt_frac(self.constant)
        coeffs = [c for _, c in self.terms]
        g = _common_factor(coeffs)
        inner = _format_sum({s: c / g for s, c in self.terms}, self.constant / g)
        if g == 1:
            return inner
        if g == -1:
            return f"-({inner})" if _needs_parens(inner) else f"-{inner}"
        return f"{_fmt_frac(g)}*({inner})" if _needs_parens(inner) else f"{_fmt_frac(g)}*{inner}"

    def __str__(self):
        return self.to_text()


def _coerce(x) -> EntExpr:
    if isinstance(x, EntExpr):
        return x
    return EntExpr.const(x)


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _common_factor(coeffs: list[Fraction]) -> Fraction:
    num = 0
    den = 1
    for c in coeffs:
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    g = Fraction(num, den)
    if all(c < 0 for c in coeffs):
        g = -g
    return g


def _needs_parens(s: str) -> bool:
    return " + " in s or " - " in s


def _format_sum(terms: dict, constant: Fraction) -> str:
    """Render with mutual-information triples folded back into ``I(X;Y)``."""
    terms = dict(terms)
    parts: list[tuple[Fraction, str]] = []
    for joint in sorted(terms, key=label_key, reverse=True):
        if joint not in terms or len(joint) < 2 or terms[joint] >= 0:
            continue
        c = -terms[joint]
        for k in range(1, len(joint) // 2 + 1):
            found = False
            for xs in combinations(sorted(joint), k):
                x = frozenset(xs)
                y = joint - x
                if k * 2 == len(joint) and label_key(x) > label_key(y):
                    continue
                if terms.get(x) == c and terms.get(y) == c:
                    parts.append((c, f"I({format_labels(x)};{format_labels(y)})"))
                    del terms[x], terms[y], terms[joint]
                    found = True
                    break
            if found:
                break
    # H(XY) - H(Y) -> H(X|Y)
    for joint in sorted(terms, key=label_key, reverse=True):
        if joint not in terms or len(joint) < 2 or terms[joint] <= 0:
            continue
        c = terms[joint]
        for y in sorted((s for s in terms if s < joint and terms[s] == -c), key=label_key, reverse=True):
            parts.append((c, f"H({format_labels(joint - y)}|{format_labels(y)})"))
            del terms[joint], terms[y]
            break
    for s in sorted(terms, key=label_key):
        parts.append((terms[s], f"H({format_labels(s)})"))
    out = ""
    for c, body in parts:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        piece = body if mag == 1 else f"{_fmt_frac(mag)}*{body}"
        out = (f"-{piece}" if sign == "-" else piece) if not out else f"{out} {sign} {piece}"
    if constant:
        sign = "-" if constant < 0 else "+"
        piece = _fmt_frac(abs(constant))
        out = (f"-{piece}" if sign == "-" else piece) if not out else f"{out} {sign} {piece}"
    return out


def canonicalize(e: EntExpr, ctx: Optional[Context] = None) -> EntExpr:
    """Normal form of ``e``: each joint-entropy subset is replaced by the
    shortlex-least member of its class under complementation inside pure
    groups; equal coefficients merge and zeros drop.
    """
    if ctx is not None:
        unbound = e.labels - ctx.bound
        if unbound and not ctx.is_empty():
            raise ValueError(f"labels {sorted(unbound)} are outside the declared context")
    return e.canonical(ctx)


# --- nonnegativity certificates ----------------------------------------------

MAX_WORLD = 7


@lru_cache(maxsize=256)
def _atoms(world: frozenset, classical: bool) -> tuple:
    labels = sorted(world)
    subsets = [frozenset(c) for k in range(1, len(labels) + 1) for c in combinations(labels, k)]
    atoms = []
    for s in subsets:
        atoms.append((f"H({format_labels(s)})", EntExpr.H(s)))
    for i, x in enumerate(subsets):
        for y in subsets[i + 1:]:
            if x & y:
                continue
            atoms.append((f"I({format_labels(x)};{format_labels(y)})", EntExpr.I(x, y)))
            if classical:
                atoms.append((f"H({format_labels(x)}|{format_labels(y)})", EntExpr.H(x, y)))
                atoms.append((f"H({format_labels(y)}|{format_labels(x)})", EntExpr.H(y, x)))
    return tuple(atoms)


@lru_cache(maxsize=4096)
def _canonical_atoms(world: frozenset, classical: bool, ctx: Context) -> tuple:
    return tuple((name, atom.canonical(ctx)) for name, atom in _atoms(world, classical))


def _ratio(target: EntExpr, atom: EntExpr) -> Optional[Fraction]:
    if len(target.terms) != len(atom.terms) or not atom.terms:
        return None
    tm = target.map
    s0, c0 = atom.terms[0]
    if s0 not in tm:
        return None
    k = tm[s0] / c0
    if k <= 0:
        return None
    for s, c in atom.terms:
        if tm.get(s) != c * k:
            return None
    return k


def certify_nonnegative(e: EntExpr, ctx: Optional[Context] = None) -> Optional[str]:
    """Return a witness string if ``e >= 0`` follows from a single elementary
    entropic inequality, else ``None``.

    The witness is ``k*atom`` (plus a nonnegative constant) where ``atom`` is a
    von Neumann entropy ``H(S)``, a mutual information ``I(X;Y)``, or (for
    classical labels) a conditional entropy ``H(X|Y)``. This is a sufficient
    test only; it is not a general entropy-inequality prover.
    """
    ctx = ctx or Context()
    c = e.canonical(ctx)
    if c.constant < 0:
        return None
    ent = c.entropic_part()
    if ent.is_zero():
        return _fmt_frac(c.constant)
    worlds = [(g, False) for g in ctx.pure]
    if ctx.classical and e.labels <= ctx.classical:
        worlds.append((ctx.classical, True))
    worlds.append((e.labels, bool(ctx.classical) and e.labels <= ctx.classical))
    for world, classical in worlds:
        if len(world) > MAX_WORLD:
            continue
        for name, atom in _canonical_atoms(frozenset(world), classical, ctx):
            k = _ratio(ent, atom)
            if k is not None:
                w = name if k == 1 else f"{_fmt_frac(k)}*{name}"
                return w if c.constant == 0 else f"{w} + {_fmt_frac(c.constant)}"
    return None
