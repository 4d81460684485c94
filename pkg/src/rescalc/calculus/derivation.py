"""Derivation scripts: parsing and replay.

A script is a sequence of lines ``[label:] op args``; ``#`` starts a comment.
References name an earlier step label, ``sN`` (the N-th step, 1-based), a
supplied fact or an axiom. Operations::

    use NAME                         axiom or fact
    refl EXPR [where CTX]            EXPR >= EXPR
    add REF REF
    chain REF REF
    equate REF REF                   REF1 and the reverse of REF2 give an equality
    cancel REF TERM COEFF
    rewrite REF purity(LABELS) ...   declare more structure
    reverse REF
    timerev REF
    relabel REF ITEM, ITEM, ...      X->Y (label or name), X->_ (erase label),
                                     <term> -> <term> | _ (substitute a term)
    feedback REF NAME ENV STATE PURIFIER
    compose REF TERM TERM
    qed REF | INEQUALITY             the previous result must establish this
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from .axioms import AxiomDB
from .entexpr import Context
from .parser import ParseError, _Parser, parse_context, parse_inequality, parse_resource
from .resources import Inequality
from . import rules

STEP_OPS = ("use", "refl", "add", "chain", "equate", "cancel", "rewrite", "reverse",
            "timerev", "relabel", "feedback", "compose", "qed")

_LABEL_PREFIX = re.compile(r"^([A-Za-z][\w-]*):\s+")


@dataclass(frozen=True)
class Step:
    op: str
    args: str
    label: str = ""
    line: int = 0

    def to_text(self) -> str:
        head = f"{self.label}: " if self.label else ""
        return f"{head}{self.op} {self.args}".rstrip()


@dataclass(frozen=True)
class Derivation:
    steps: tuple
    name: str = ""

    @property
    def goal(self) -> Optional[str]:
        for s in reversed(self.steps):
            if s.op == "qed":
                return s.args
        return None


def parse_script(text: str, name: str = "") -> Derivation:
    steps = []
    for n, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        label = ""
        m = _LABEL_PREFIX.match(body)
        if m and m.group(1) not in STEP_OPS:
            label, body = m.group(1), body[m.end():]
        parts = body.split(None, 1)
        op = parts[0]
        if op not in STEP_OPS:
            raise ParseError(f"unknown step {op!r}", n, raw.find(op) + 1)
        steps.append(Step(op, parts[1].strip() if len(parts) > 1 else "", label, n))
    if not steps:
        raise ParseError("empty derivation script", 1, 1)
    return Derivation(tuple(steps), name)


def load_script(path) -> Derivation:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    from pathlib import Path
    return parse_script(text, Path(path).stem)


# --- report -------------------------------------------------------------------

@dataclass
class StepRecord:
    index: int
    line: int
    label: str
    op: str
    args: str
    inputs: list = field(default_factory=list)
    result: str = ""
    ok: bool = True
    message: str = ""
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ProofReport:
    script: str
    steps: list
    passed: bool
    goal_name: str = ""
    goal: str = ""
    failure: str = ""

    @property
    def flags(self) -> list:
        return [f for s in self.steps for f in s.flags]

    def to_json(self) -> dict:
        return {"script": self.script, "passed": self.passed, "goal_name": self.goal_name,
                "goal": self.goal, "failure": self.failure,
                "steps": [s.to_json() for s in self.steps]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = [f"derivation {self.script}" if self.script else "derivation"]
        for s in self.steps:
            head = f"[{s.index}] line {s.line}: " + (f"{s.label}: " if s.label else "") + f"{s.op} {s.args}"
            lines.append(head.rstrip())
            for i in s.inputs:
                lines.append(f"      in:  {i}")
            if s.result:
                lines.append(f"      out: {s.result}")
            for fl in s.flags:
                lines.append(f"      note: {fl}")
            if not s.ok:
                lines.append(f"      FAILED: {s.message}")
        if self.passed:
            lines.append(f"goal reached: {self.goal_name or self.goal}")
        else:
            lines.append(f"proof failed: {self.failure}")
        return "\n".join(lines)


# --- replay -------------------------------------------------------------------

class StepError(ValueError):
    pass


def _split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside of brackets."""
    out, depth, cur, i = [], 0, [], 0
    while i < len(text):
        ch = text[i]
        if ch in "<{([":
            depth += 1
        elif ch in ">})]" and not (ch == ">" and i > 0 and text[i - 1] == "-"):
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            out.append("".join(cur))
            cur = []
            i += len(sep)
            continue
        cur.append(ch)
        i += 1
    out.append("".join(cur))
    return [s.strip() for s in out]


class _Replay:
    def __init__(self, axioms: AxiomDB, facts: Optional[dict]):
        self.axioms = axioms
        self.facts = dict(facts or {})
        self.env: dict[str, Inequality] = {}
        self.last: Optional[Inequality] = None
        self.goal_name = ""

    def resolve(self, ref: str) -> Inequality:
        if ref in self.env:
            return self.env[ref]
        if ref in self.facts:
            return self.facts[ref]
        if ref in self.axioms:
            return self.axioms.get(ref).statement
        raise StepError(f"unknown reference {ref!r}")

    def refs(self, args: str, n: int) -> list[str]:
        parts = args.split()
        if len(parts) != n:
            raise StepError(f"expected {n} reference(s), got {len(parts)}")
        return parts

    def head(self, args: str) -> tuple[str, str]:
        parts = args.split(None, 1)
        if not parts:
            raise StepError("missing reference")
        return parts[0], parts[1] if len(parts) > 1 else ""

    def run(self, step: Step, rec: StepRecord) -> Inequality:
        op, args = step.op, step.args
        if op == "use":
            (name,) = self.refs(args, 1)
            if name in self.facts:
                rec.flags.append(f"fact {name} supplied by an exact circuit check")
                return self.facts[name].canonical()
            if name not in self.axioms:
                raise StepError(f"unknown axiom {name!r}")
            ax = self.axioms.get(name)
            if ax.kind == "asserted":
                rec.flags.append(f"asserted without construction: {name}")
            return ax.statement.canonical()
        if op == "refl":
            p = _Parser(args)
            e = p.expr()
            ctx = p.where()
            p.take("eof")
            return rules.refl(e, ctx)
        if op in ("add", "chain", "equate"):
            a, b = (self.resolve(r) for r in self.refs(args, 2))
            rec.inputs += [a.to_text(), b.to_text()]
            return {"add": rules.add, "chain": rules.chain, "equate": rules.equate}[op](a, b)
        if op in ("reverse", "timerev"):
            (r,) = self.refs(args, 1)
            a = self.resolve(r)
            rec.inputs.append(a.to_text())
            return rules.reverse(a) if op == "reverse" else rules.time_reverse(a)
        ref, rest = self.head(args)
        a = self.resolve(ref)
        rec.inputs.append(a.to_text())
        if op == "cancel":
            p = _Parser(rest)
            term = p.resource()
            coeff = p.product()
            while p.at("punct", "+") or p.at("punct", "-"):
                sign = p.take("punct").text
                nxt = p.product()
                coeff = coeff + nxt if sign == "+" else coeff - nxt
            p.take("eof")
            out, witnesses = rules.cancel(a, term, coeff)
            rec.flags.append("cancellation admitted as an engine rule (asymptotic side conditions not checked)")
            rec.flags += witnesses
            return out
        if op == "rewrite":
            ctx = parse_context(re.sub(r"\bpurity\s*\(", "pure(", rest))
            return rules.rewrite(a, ctx)
        if op == "relabel":
            return self.relabel(a, rest, rec)
        if op == "feedback":
            parts = rest.split()
            if len(parts) != 4:
                raise StepError("feedback needs NAME ENV STATE PURIFIER")
            rec.flags.append("asserted observation: the sender keeps the channel environment and the "
                             "receiver's leftover purification is concentrated afterwards")
            return rules.feedback(a, *parts)
        if op == "compose":
            p = _Parser(rest)
            t1, t2 = p.resource(), p.resource()
            p.take("eof")
            return rules.compose(a, t1, t2)
        raise StepError(f"unsupported step {op!r}")

    def relabel(self, a: Inequality, rest: str, rec: StepRecord) -> Inequality:
        used = set(a.labels) | set(a.context.bound)
        names = set()
        for side in (a.lhs, a.rhs):
            for _, t in side.terms:
                used |= t.labels
                if t.name:
                    names.add(t.name)
                if t.rel:
                    names.add(t.rel)
        labels, renames, terms = {}, {}, {}
        for item in _split_top(rest, ","):
            if not item:
                continue
            pair = _split_top(item, "->")
            if len(pair) != 2:
                raise StepError(f"relabel item {item!r} is not of the form X -> Y")
            src, dst = pair
            if src.startswith("<") or src.startswith("["):
                terms[parse_resource(src)] = None if dst == "_" else parse_resource(dst)
                rec.flags.append(f"term substitution {src} -> {dst}")
            elif src in used:
                labels[src] = None if dst == "_" else dst
            elif src in names:
                renames[src] = dst
            else:
                raise StepError(f"{src!r} is neither a system label nor a name in the inequality")
        return rules.relabel(a, labels, renames, terms)

    def qed(self, args: str, rec: StepRecord) -> Inequality:
        if self.last is None:
            raise StepError("qed before any result")
        target_text = args.strip()
        if re.fullmatch(r"[A-Za-z][\w-]*", target_text):
            target = self.resolve(target_text)
            self.goal_name = target_text
        else:
            target = parse_inequality(target_text)
        rec.inputs.append(self.last.to_text())
        if not self.last.implies(target):
            ctx = self.last.context.union(target.context)
            raise StepError(f"result {self.last.canonical(ctx).to_text(False)} does not establish "
                            f"goal {target.canonical(ctx).to_text(False)}")
        return target.canonical()


def verify_derivation(d: Derivation, axioms: Optional[AxiomDB] = None,
                      facts: Optional[dict] = None) -> ProofReport:
    """Replay ``d`` step by step; stops at the first failing step."""
    if axioms is None:
        from .axioms import axioms as default_axioms
        axioms = default_axioms()
    r = _Replay(axioms, facts)
    records = []
    goal_text = d.goal or ""
    reached = False
    for idx, step in enumerate(d.steps, start=1):
        rec = StepRecord(idx, step.line, step.label, step.op, step.args)
        records.append(rec)
        try:
            if step.op == "qed":
                out = r.qed(step.args, rec)
                reached = True
            else:
                out = r.run(step, rec)
                r.last = out
            rec.result = out.to_text()
            r.env[f"s{idx}"] = out
            if step.label:
                r.env[step.label] = out
        except (ValueError, KeyError) as e:
            rec.ok = False
            rec.message = str(e).strip("'\"")
            return ProofReport(d.name, records, False, r.goal_name, goal_text,
                               f"step {idx} (line {step.line}, {step.op}): {rec.message}")
    if not reached:
        return ProofReport(d.name, records, False, "", goal_text, "script has no qed step")
    return ProofReport(d.name, records, True, r.goal_name, goal_text)
