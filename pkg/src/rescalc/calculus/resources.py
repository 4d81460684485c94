"""Resource terms, resource expressions and resource inequalities."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .entexpr import Context, EntExpr, certify_nonnegative, format_labels

# Kinds with a sender and a receiver.
DIRECTED = {"qubit", "cbit", "cobit"}
STATIC = {"ebit", "cc"}
KINDS = DIRECTED | STATIC | {"channel", "state"}

_BRACKETS = {
    ("qubit", "fwd"): "[q->q]", ("qubit", "bwd"): "[q<-q]",
    ("cbit", "fwd"): "[c->c]", ("cbit", "bwd"): "[c<-c]",
    ("cobit", "fwd"): "[q->qq]", ("cobit", "bwd"): "[qq<-q]",
    ("ebit", None): "[qq]", ("cc", None): "[cc]",
}


def label_party(label: str) -> str:
    """Party owning a system label: the ``_P`` subscript if present, else the first letter."""
    if "_" in label:
        return label.split("_", 1)[1][0]
    return label[0]


_DECOR_SWAP = str.maketrans({"'": "^", "^": "'"})


def swap_parties(label: str) -> str:
    """Interchange Alice and Bob in a label.

    ``A <-> B`` and ``X_A <-> X_B``. A decorated register changes role as well
    as owner: Alice's input ``A'`` becomes Bob's output ``B^`` and vice versa.
    """
    if "_" in label:
        base, sub = label.split("_", 1)
        p = {"A": "B", "B": "A"}.get(sub[0], sub[0])
        return f"{base}_{p}{sub[1:]}"
    first = {"A": "B", "B": "A"}.get(label[0])
    if first is None:
        return label
    return first + label[1:].translate(_DECOR_SWAP)


@dataclass(frozen=True)
class ResourceTerm:
    kind: str
    direction: Optional[str] = None
    name: str = ""
    ins: tuple = ()
    outs: tuple = ()
    rel: Optional[str] = None
    parties: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown resource kind {self.kind!r}")
        if self.kind in DIRECTED and self.direction not in ("fwd", "bwd"):
            raise ValueError(f"{self.kind} needs a direction")
        if self.kind not in DIRECTED and self.direction is not None:
            raise ValueError(f"{self.kind} carries no direction")
        if self.rel is not None and self.kind != "channel":
            raise ValueError("only channel terms carry a relative state")
        object.__setattr__(self, "ins", tuple(sorted(set(self.ins))))
        object.__setattr__(self, "outs", tuple(sorted(set(self.outs))))
        object.__setattr__(self, "parties", tuple(sorted(set(self.parties))))

    @classmethod
    def channel(cls, name: str, ins: Iterable[str], outs: Iterable[str], rel: Optional[str] = None):
        return cls("channel", name=name, ins=tuple(ins), outs=tuple(outs), rel=rel)

    @classmethod
    def state(cls, name: str, parties: Iterable[str]):
        return cls("state", name=name, parties=tuple(parties))

    @property
    def directed(self) -> bool:
        return self.kind in DIRECTED

    @property
    def feedback(self) -> bool:
        """A channel whose sender also receives part of the output."""
        if self.kind != "channel" or not self.ins:
            return False
        senders = {label_party(x) for x in self.ins}
        return any(label_party(x) in senders for x in self.outs)

    @property
    def labels(self) -> frozenset:
        return frozenset(self.ins) | frozenset(self.outs) | frozenset(self.parties)

    def flipped(self) -> "ResourceTerm":
        if not self.directed:
            return self
        return replace(self, direction="bwd" if self.direction == "fwd" else "fwd")

    def map_labels(self, fn: Callable[[str], Optional[str]]) -> "ResourceTerm":
        if self.kind not in ("channel", "state"):
            return self

        def m(ls):
            return tuple(y for y in (fn(x) for x in ls) if y is not None)
        return replace(self, ins=m(self.ins), outs=m(self.outs), parties=m(self.parties))

    def map_names(self, mapping: dict) -> "ResourceTerm":
        if self.kind not in ("channel", "state"):
            return self
        rel = mapping.get(self.rel, self.rel) if self.rel else None
        return replace(self, name=mapping.get(self.name, self.name), rel=rel)

    def to_text(self) -> str:
        if self.kind == "channel":
            body = f"{self.name}{{{format_labels(self.ins)}->{format_labels(self.outs)}}}"
            return f"<{body}:{self.rel}>" if self.rel else f"<{body}>"
        if self.kind == "state":
            return f"<{self.name}@{format_labels(self.parties)}>"
        return _BRACKETS[(self.kind, self.direction)]

    def sort_key(self):
        order = ["cobit", "qubit", "cbit", "ebit", "cc", "channel", "state"]
        return (order.index(self.kind), self.direction or "", self.name, self.ins, self.outs,
                self.rel or "", self.parties)

    def __str__(self):
        return self.to_text()


def _coef_text(c: EntExpr) -> str:
    if c.is_constant() and c.constant == 1:
        return ""
    t = c.to_text()
    if " + " in t or " - " in t or t.startswith("-"):
        t = f"({t})"
    return t + "*"


@dataclass(frozen=True)
class ResourceExpr:
    """Sum of ``coefficient * resource`` terms; duplicates are kept until :meth:`collect`."""

    terms: tuple = ()

    @classmethod
    def of(cls, *pairs) -> "ResourceExpr":
        return cls(tuple((c if isinstance(c, EntExpr) else EntExpr.const(c), t) for c, t in pairs))

    def __add__(self, other: "ResourceExpr") -> "ResourceExpr":
        return ResourceExpr(self.terms + other.terms)

    def collect(self, ctx: Optional[Context] = None) -> dict:
        """Term -> summed coefficient, canonicalized under ``ctx``, zeros dropped."""
        out: dict[ResourceTerm, EntExpr] = {}
        for c, t in self.terms:
            out[t] = out.get(t, EntExpr()) + c
        out = {t: c.canonical(ctx) for t, c in out.items()}
        return {t: c for t, c in out.items() if not c.is_zero()}

    @classmethod
    def from_map(cls, m: dict) -> "ResourceExpr":
        return cls(tuple((m[t], t) for t in sorted(m, key=lambda t: t.sort_key())))

    def map_terms(self, fn) -> "ResourceExpr":
        return ResourceExpr(tuple(fn(c, t) for c, t in self.terms))

    @property
    def labels(self) -> frozenset:
        out = set()
        for c, _ in self.terms:
            out |= c.labels
        return frozenset(out)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_coef_text(c) + t.to_text() for c, t in self.terms)

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class Inequality:
    lhs: ResourceExpr
    rhs: ResourceExpr
    relation: str = ">="
    context: Context = field(default_factory=Context)
    name: str = ""

    def __post_init__(self):
        if self.relation not in (">=", "="):
            raise ValueError(f"relation must be '>=' or '=', got {self.relation!r}")

    @property
    def labels(self) -> frozenset:
        return self.lhs.labels | self.rhs.labels

    def canonical(self, ctx: Optional[Context] = None) -> "Inequality":
        """Side-wise canonical form.

        Coefficients are summed per resource and reduced under the purity
        context; a term whose coefficient is provably nonpositive moves to the
        other side with its sign flipped. Terms are not netted across sides:
        that is what :func:`rules.cancel` is for.
        """
        ctx = self.context.union(ctx) if ctx else self.context
        left, right = self.lhs.collect(ctx), self.rhs.collect(ctx)
        for src, dst in ((left, right), (right, left)):
            for t in list(src):
                c = src[t]
                if _has_negative_part(c) and certify_nonnegative(-c, ctx) is not None:
                    del src[t]
                    merged = (dst.get(t, EntExpr()) - c).canonical(ctx)
                    if merged.is_zero():
                        dst.pop(t, None)
                    else:
                        dst[t] = merged
        return Inequality(ResourceExpr.from_map(left), ResourceExpr.from_map(right),
                          self.relation, ctx, self.name)

    def key(self, ctx: Optional[Context] = None):
        c = self.canonical(ctx)
        sides = tuple(frozenset((t, co) for t, co in c_side.items())
                      for c_side in (c.lhs.collect(), c.rhs.collect()))
        if self.relation == "=":
            return ("=", frozenset(sides))
        return (">=",) + sides

    def equivalent(self, other: "Inequality") -> bool:
        """Canonical identity under the union of both contexts; ``=`` is orientation-free."""
        ctx = self.context.union(other.context)
        return self.key(ctx) == other.key(ctx)

    def implies(self, other: "Inequality") -> bool:
        """True if ``self`` establishes ``other`` (identical, or an equality read in either direction)."""
        if self.equivalent(other):
            return True
        if self.relation == "=" and other.relation == ">=":
            return (replace(self, relation=">=").equivalent(other)
                    or Inequality(self.rhs, self.lhs, ">=", self.context).equivalent(other))
        return False

    def is_trivial(self) -> bool:
        """``X >= X`` after canonicalization."""
        c = self.canonical()
        return c.lhs.collect() == c.rhs.collect()

    def to_text(self, with_context: bool = True) -> str:
        s = f"{self.lhs.to_text()} {self.relation} {self.rhs.to_text()}"
        if with_context and not self.context.is_empty():
            s += " where " + self.context.to_text()
        return s

    def __str__(self):
        return self.to_text()


def _has_negative_part(c: EntExpr) -> bool:
    return c.constant < 0 or any(v < 0 for _, v in c.terms)
