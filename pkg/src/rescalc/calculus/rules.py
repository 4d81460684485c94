"""Inference rules over resource inequalities.

Every rule returns a canonical :class:`Inequality` and raises
:class:`RuleError` (with the symbolic residual) when its precondition fails.
"""

from __future__ import annotations

from typing import Optional

from .entexpr import Context, EntExpr, certify_nonnegative
from .resources import Inequality, ResourceExpr, ResourceTerm, label_party, swap_parties


class RuleError(ValueError):
    pass


def _join_relation(a: Inequality, b: Inequality) -> str:
    return "=" if a.relation == b.relation == "=" else ">="


def _check_relative_states(*ineqs: Inequality) -> None:
    seen: dict[tuple, str] = {}
    for i in ineqs:
        for side in (i.lhs, i.rhs):
            for _, t in side.terms:
                if t.kind != "channel" or t.rel is None:
                    continue
                key = (t.name, t.ins, t.outs)
                if seen.setdefault(key, t.rel) != t.rel:
                    raise RuleError(f"channel {t.name}{{{','.join(t.ins)}->{','.join(t.outs)}}} is "
                                    f"relative to both {seen[key]!r} and {t.rel!r}")


def _describe_difference(a: dict, b: dict) -> str:
    parts = []
    for t in sorted(set(a) | set(b), key=lambda t: t.sort_key()):
        ca, cb = a.get(t, EntExpr()), b.get(t, EntExpr())
        if ca != cb:
            parts.append(f"{t}: {ca} vs {cb} (leftover {ca - cb})")
    return "; ".join(parts)


def refl(expr: ResourceExpr, ctx: Optional[Context] = None) -> Inequality:
    """``X >= X``."""
    return Inequality(expr, expr, ">=", ctx or Context()).canonical()


def add(i1: Inequality, i2: Inequality) -> Inequality:
    """Run two protocols side by side: sides add termwise."""
    _check_relative_states(i1, i2)
    ctx = i1.context.union(i2.context)
    return Inequality(i1.lhs + i2.lhs, i1.rhs + i2.rhs, _join_relation(i1, i2), ctx).canonical()


def chain(i1: Inequality, i2: Inequality) -> Inequality:
    """``X >= Y`` and ``Y >= Z`` give ``X >= Z``; ``Y`` must match canonically."""
    ctx = i1.context.union(i2.context)
    mid1, mid2 = i1.rhs.collect(ctx), i2.lhs.collect(ctx)
    if mid1 != mid2:
        raise RuleError("middle expressions differ: " + _describe_difference(mid1, mid2))
    return Inequality(i1.lhs, i2.rhs, _join_relation(i1, i2), ctx).canonical()


def cancel(i: Inequality, term: ResourceTerm, amount: EntExpr) -> tuple[Inequality, list[str]]:
    """Remove ``amount`` of ``term`` from both sides.

    Both remaining coefficients must be certified nonnegative; the returned
    witnesses name the elementary inequality used for each side.
    """
    c = i.canonical()
    ctx = c.context
    left, right = c.lhs.collect(ctx), c.rhs.collect(ctx)
    amount = amount.canonical(ctx)
    if amount.is_zero():
        return c, []
    witnesses = []
    for side_name, side in (("left", left), ("right", right)):
        if term not in side:
            raise RuleError(f"{term} does not occur on the {side_name} side")
        rest = (side[term] - amount).canonical(ctx)
        w = certify_nonnegative(rest, ctx)
        if w is None:
            raise RuleError(f"cannot cancel ({amount})*{term}: {side_name} coefficient {side[term]} "
                            f"minus amount leaves {rest}, not certified nonnegative")
        witnesses.append(f"{side_name}: {rest} >= 0 by {w}")
        if rest.is_zero():
            del side[term]
        else:
            side[term] = rest
    out = Inequality(ResourceExpr.from_map(left), ResourceExpr.from_map(right), c.relation, ctx)
    return out.canonical(), witnesses


def reverse(i: Inequality) -> Inequality:
    """Swap the sides (resource reversal)."""
    return Inequality(i.rhs, i.lhs, i.relation, i.context).canonical()


def _swap_term(c: EntExpr, t: ResourceTerm):
    return c.map_labels(swap_parties), t.map_labels(swap_parties)


def time_reverse(i: Inequality) -> Inequality:
    """Run the protocol backwards with the roles of Alice and Bob exchanged.

    Read backwards, every static resource (ebits, shared randomness, states,
    relative channels from a source) that was consumed is produced and vice
    versa, so it changes sides. Communication stays a cost but its direction
    reverses; exchanging Alice and Bob reverses it once more, so directed
    terms keep their side and direction. Labels go through
    :func:`swap_parties`. The map is an involution.
    """
    lhs, rhs = [], []
    for side, same, other in ((i.lhs, lhs, rhs), (i.rhs, rhs, lhs)):
        for c, t in side.terms:
            c, t = _swap_term(c, t)
            if t.directed:
                same.append((c, t.flipped().flipped()))
            else:
                other.append((c, t))
    ctx = i.context.map_labels(swap_parties)
    return Inequality(ResourceExpr(tuple(lhs)), ResourceExpr(tuple(rhs)), i.relation, ctx).canonical()


def _admissible_substitution(old: ResourceTerm, new: Optional[ResourceTerm], side: str) -> None:
    if new is None:
        if side != "rhs":
            raise RuleError(f"{old} can only be discarded from the produced (right) side")
        return
    if old.kind == "channel" and new.kind == "state":
        if not old.ins or any(label_party(x) != "S" for x in old.ins) or old.rel is None:
            raise RuleError(f"{old} is not a relative channel from a source; it cannot become a state")
        if set(new.parties) != set(old.outs):
            raise RuleError(f"state {new} must be held by the channel outputs {list(old.outs)}")
        return
    if old.kind == new.kind == "channel" and (old.ins, old.outs, old.rel) == (new.ins, new.outs, new.rel):
        return
    raise RuleError(f"cannot substitute {new} for {old}")


def relabel(i: Inequality, labels: Optional[dict] = None, names: Optional[dict] = None,
            terms: Optional[dict] = None) -> Inequality:
    """Systematic substitution.

    ``labels`` maps system labels (``None`` erases a label, i.e. takes that
    system to be trivial), ``names`` renames channels/states/relative states,
    and ``terms`` replaces whole resource terms: a relative channel from a
    source may become the state it prepares, and a produced term may be
    discarded (mapped to ``None``).
    """
    labels, names, terms = dict(labels or {}), dict(names or {}), dict(terms or {})
    used = set(i.labels)
    for side in (i.lhs, i.rhs):
        for _, t in side.terms:
            used |= t.labels
    used |= i.context.bound
    images = [labels.get(x, x) for x in used]
    images = [y for y in images if y is not None]
    if len(images) != len(set(images)):
        dup = sorted({y for y in images if images.count(y) > 1})
        raise RuleError(f"relabeling collides on {dup}")
    missing = [t for t in terms if not any(t == u for s in (i.lhs, i.rhs) for _, u in s.terms)]
    if missing:
        raise RuleError(f"substituted term {missing[0]} does not occur")

    def lab(x):
        return labels.get(x, x)

    out = {"lhs": [], "rhs": []}
    for side_name, side in (("lhs", i.lhs), ("rhs", i.rhs)):
        for c, t in side.terms:
            c = c.map_labels(lab)
            if t in terms:
                new = terms[t]
                _admissible_substitution(t, new, side_name)
                if new is None:
                    continue
                out[side_name].append((c, new))
            else:
                out[side_name].append((c, t.map_labels(lab).map_names(names)))
    ctx = i.context.map_labels(lab)
    return Inequality(ResourceExpr(tuple(out["lhs"])), ResourceExpr(tuple(out["rhs"])),
                      i.relation, ctx).canonical()


def feedback(i: Inequality, name: str, env: str, leftover: str, purifier: str) -> Inequality:
    """Hand the environment ``env`` of the consumed channel back to the sender.

    The single non-feedback channel on the left becomes the feedback channel
    ``name`` whose outputs include ``env``. Running the same protocol then
    leaves the receiver holding a purification ``purifier`` of ``env``,
    recorded as the produced state ``leftover`` on systems ``env, purifier``.
    """
    c = i.canonical()
    left = c.lhs.collect(c.context)
    channels = [t for t in left if t.kind == "channel" and not t.feedback]
    if len(channels) != 1:
        raise RuleError(f"expected exactly one non-feedback channel on the left, found {len(channels)}")
    (old,) = channels
    if left[old] != EntExpr.const(1):
        raise RuleError(f"{old} must be consumed with coefficient 1, not {left[old]}")
    if env in old.outs or env in old.ins:
        raise RuleError(f"{env} is already part of {old}")
    if env not in c.context.bound:
        raise RuleError(f"environment {env} does not appear in the purity context")
    if purifier in c.context.bound or purifier in c.labels:
        raise RuleError(f"purifying label {purifier} is already in use")
    new = ResourceTerm.channel(name, old.ins, old.outs + (env,), old.rel)
    left[new] = left.pop(old)
    rhs = c.rhs + ResourceExpr.of((1, ResourceTerm.state(leftover, (env, purifier))))
    ctx = c.context.union(Context.make([(env, purifier)]))
    return Inequality(ResourceExpr.from_map(left), rhs, c.relation, ctx).canonical()


def compose(i: Inequality, first: ResourceTerm, second: ResourceTerm) -> Inequality:
    """Replace produced channels ``first`` and ``second`` by ``second`` after ``first``.

    ``first``'s outputs must be exactly ``second``'s inputs. Relative states
    carry through only when ``first`` is an identity channel.
    """
    c = i.canonical()
    right = c.rhs.collect(c.context)
    for t in (first, second):
        if t.kind != "channel":
            raise RuleError(f"{t} is not a channel")
        if right.get(t) != EntExpr.const(1):
            raise RuleError(f"{t} must be produced with coefficient 1")
    if first.outs != second.ins:
        raise RuleError(f"outputs {list(first.outs)} of {first} do not feed inputs {list(second.ins)} of {second}")
    if second.rel is not None and not (first.name == "id" and first.rel == second.rel):
        raise RuleError(f"relative state of {second} is not guaranteed after {first}")
    del right[first], right[second]
    composite = ResourceTerm.channel(second.name, first.ins, second.outs, first.rel)
    right[composite] = right.get(composite, EntExpr()) + EntExpr.const(1)
    return Inequality(c.lhs, ResourceExpr.from_map(right), c.relation, c.context).canonical()


def equate(i1: Inequality, i2: Inequality) -> Inequality:
    """``X >= Y`` and ``Y >= X`` give ``X = Y``."""
    ctx = i1.context.union(i2.context)
    a = Inequality(i1.lhs, i1.rhs, ">=", ctx)
    b = Inequality(i2.rhs, i2.lhs, ">=", ctx)
    if not a.equivalent(b):
        a_c, b_c = a.canonical(), b.canonical()
        diff = _describe_difference(a_c.lhs.collect(), b_c.lhs.collect()) or \
            _describe_difference(a_c.rhs.collect(), b_c.rhs.collect())
        raise RuleError("inequalities are not reverses of each other: " + diff)
    return Inequality(i1.lhs, i1.rhs, "=", ctx).canonical()


def rewrite(i: Inequality, ctx: Context) -> Inequality:
    """Declare further structure (e.g. purity of a group) and re-canonicalize."""
    return i.canonical(ctx)
