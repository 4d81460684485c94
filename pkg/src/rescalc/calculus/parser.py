"""Concrete syntax for resource inequalities.

::

    ineq     := expr (">=" | "=") expr [ "where" ctx { "," ctx } ]
    expr     := "0" | term { "+" term }
    term     := [ coeff ["*"] ] resource
    coeff    := factor { ["*"] factor }
    factor   := rational | "H(" labels [ "|" labels ] ")" | "I(" labels ";" labels ")"
              | "(" ["-"] coeff { ("+"|"-") coeff } ")" | "-" factor
    resource := "[q->q]" | "[q<-q]" | "[qq]" | "[c->c]" | "[c<-c]" | "[cc]" | "[q->qq]" | "[qq<-q]"
              | "<" name "{" labels "->" labels "}" [ ":" name ] ">"
              | "<" name "@" labels ">"
    ctx      := ("pure" | "classical" | "free") "(" labels ")"

Labels are an uppercase letter with optional lowercase/digit suffix, optional
``_P`` party subscript and optional ``'``/``^`` decorations, so ``H(RA'B)``
reads as ``H(R, A', B)``. ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .entexpr import Context, EntExpr, split_labels
from .resources import Inequality, ResourceExpr, ResourceTerm


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


_BRACKET = re.compile(
    r"\[\s*(?:q\s*(?:->|→)\s*qq|qq\s*(?:<-|←)\s*q|q\s*(?:->|→|<-|←)\s*q|c\s*(?:->|→|<-|←)\s*c"
    r"|q\s*q|c\s*c)\s*\]")
_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<res>\[[^\]]*\])
  | (?P<rel>>=|≥)
  | (?P<arrow>->|→)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-zͰ-Ͽ][A-Za-z0-9Ͱ-Ͽ]*(?:_[A-Z][a-z0-9]*)?['^]*)
  | (?P<punct>[(){}<>;|,*/+\-:@=_])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        col = pos - line_start + 1
        if kind == "res" and not _BRACKET.fullmatch(tok):
            raise ParseError(f"unknown resource token {tok!r}", line, col)
        if kind == "punct" and tok == "=":
            kind = "rel"
        if kind != "ws":
            out.append(Token(kind, tok, line, col))
        for i, ch in enumerate(tok):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def _bracket_term(tok: str) -> ResourceTerm:
    s = re.sub(r"\s+", "", tok[1:-1]).replace("→", "->").replace("←", "<-")
    table = {
        "q->q": ("qubit", "fwd"), "q<-q": ("qubit", "bwd"),
        "c->c": ("cbit", "fwd"), "c<-c": ("cbit", "bwd"),
        "q->qq": ("cobit", "fwd"), "qq<-q": ("cobit", "bwd"),
        "qq": ("ebit", None), "cc": ("cc", None),
    }
    kind, direction = table[s]
    return ResourceTerm(kind, direction)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def take(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            want = text or kind
            t = self.tok
            raise ParseError(f"expected {want!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        t = self.tok
        self.i += 1
        return t

    def error(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    # grammar
    def inequality(self) -> Inequality:
        lhs = self.expr()
        if not self.at("rel"):
            self.error(f"expected '>=' or '=', found {self.tok.text or 'end of input'!r}")
        rel = ">=" if self.take("rel").text in (">=", "≥") else "="
        rhs = self.expr()
        ctx = self.where()
        ineq = Inequality(lhs, rhs, rel, ctx)
        if not ctx.is_empty():
            unbound = ineq.labels - ctx.bound
            if unbound:
                self.error(f"unbound system label(s) {sorted(unbound)}; declare them in the where clause")
        return ineq

    def where(self) -> Context:
        if not self.at("ident", "where"):
            return Context()
        self.take("ident")
        pure, classical, free = [], set(), set()
        while True:
            t = self.take("ident")
            self.take("punct", "(")
            labels = self.labels(stop=(")",))
            self.take("punct", ")")
            if t.text == "pure":
                pure.append(labels)
            elif t.text == "classical":
                classical |= set(labels)
            elif t.text == "free":
                free |= set(labels)
            else:
                raise ParseError(f"unknown context item {t.text!r}", t.line, t.col)
            if not self.at("punct", ","):
                break
            self.take("punct")
        return Context.make(pure, classical, free)

    def expr(self) -> ResourceExpr:
        if self.at("num", "0") and self.peek().kind in ("rel", "eof") or (
                self.at("num", "0") and self.peek().kind == "ident" and self.peek().text == "where"):
            self.take("num")
            return ResourceExpr()
        terms = [self.term()]
        while self.at("punct", "+"):
            self.take("punct")
            terms.append(self.term())
        return ResourceExpr(tuple(terms))

    def at_resource(self) -> bool:
        return self.at("res") or self.at("punct", "<")

    def term(self):
        coeff = EntExpr.const(1)
        if not self.at_resource():
            coeff = self.product(in_term=True)
            if self.at("punct", "*"):
                self.take("punct")
        if not self.at_resource():
            self.error(f"expected a resource, found {self.tok.text or 'end of input'!r}")
        return coeff, self.resource()

    def product(self, in_term: bool = False) -> EntExpr:
        value = self.factor()
        while True:
            if self.at("punct", "*"):
                nxt = self.peek()
                if in_term and (nxt.kind == "res" or (nxt.kind == "punct" and nxt.text == "<")):
                    return value
                self.take("punct")
            elif not self.at_factor():
                return value
            try:
                value = value * self.factor()
            except ValueError as e:
                self.error(str(e))

    def at_factor(self) -> bool:
        t = self.tok
        return (t.kind == "num" or (t.kind == "punct" and t.text == "(")
                or (t.kind == "ident" and t.text in ("H", "I") and self.peek().text == "("))

    def factor(self) -> EntExpr:
        t = self.tok
        if t.kind == "num":
            self.take("num")
            value = Fraction(t.text)
            if self.at("punct", "/"):
                self.take("punct")
                value /= Fraction(self.take("num").text)
            return EntExpr.const(value)
        if t.kind == "punct" and t.text == "-":
            self.take("punct")
            return -self.factor()
        if t.kind == "punct" and t.text == "(":
            self.take("punct")
            value = self.product()
            while self.at("punct", "+") or self.at("punct", "-"):
                sign = self.take("punct").text
                nxt = self.product()
                value = value + nxt if sign == "+" else value - nxt
            self.take("punct", ")")
            return value
        if t.kind == "ident" and t.text in ("H", "I"):
            self.take("ident")
            self.take("punct", "(")
            x = self.labels(stop=(";", "|", ")"))
            try:
                if t.text == "I":
                    self.take("punct", ";")
                    y = self.labels(stop=(")",))
                    value = EntExpr.I(x, y)
                elif self.at("punct", "|"):
                    self.take("punct")
                    value = EntExpr.H(x, self.labels(stop=(")",)))
                else:
                    value = EntExpr.H(x)
            except ValueError as e:
                raise ParseError(str(e), t.line, t.col)
            self.take("punct", ")")
            return value
        self.error(f"expected a coefficient, found {t.text or 'end of input'!r}")

    def labels(self, stop) -> list[str]:
        out = []
        while not (self.tok.kind == "eof" or (self.tok.kind in ("punct", "arrow") and self.tok.text in stop)
                   or self.tok.kind == "arrow" and "->" in stop):
            t = self.tok
            if t.kind == "punct" and t.text == ",":
                self.take("punct")
                continue
            if t.kind != "ident":
                raise ParseError(f"expected a system label, found {t.text!r}", t.line, t.col)
            try:
                out.extend(split_labels(t.text))
            except ValueError as e:
                raise ParseError(str(e), t.line, t.col)
            self.take("ident")
        return out

    def resource(self) -> ResourceTerm:
        if self.at("res"):
            return _bracket_term(self.take("res").text)
        start = self.take("punct", "<")
        name = self.take("ident").text if self.at("ident") else ""
        if self.at("punct", "{"):
            self.take("punct")
            ins = self.labels(stop=("->",))
            self.take("arrow")
            outs = self.labels(stop=("}",))
            self.take("punct", "}")
            rel = None
            if self.at("punct", ":"):
                self.take("punct")
                rel = self.take("ident").text
            self.take("punct", ">")
            return ResourceTerm.channel(name, ins, outs, rel)
        if self.at("punct", "@"):
            if not name:
                raise ParseError("state term needs a name", start.line, start.col)
            self.take("punct")
            parties = self.labels(stop=(">",))
            self.take("punct", ">")
            return ResourceTerm.state(name, parties)
        self.error("expected '{' (channel) or '@' (state) after resource name")


def parse_inequality(text: str, name: str = "") -> Inequality:
    p = _Parser(text)
    ineq = p.inequality()
    p.take("eof")
    if name:
        ineq = Inequality(ineq.lhs, ineq.rhs, ineq.relation, ineq.context, name)
    return ineq


def parse_expr(text: str) -> ResourceExpr:
    p = _Parser(text)
    e = p.expr()
    p.take("eof")
    return e


def parse_resource(text: str) -> ResourceTerm:
    p = _Parser(text)
    r = p.resource()
    p.take("eof")
    return r


def parse_coeff(text: str) -> EntExpr:
    p = _Parser(text)
    c = p.product()
    while p.at("punct", "+") or p.at("punct", "-"):
        sign = p.take("punct").text
        nxt = p.product()
        c = c + nxt if sign == "+" else c - nxt
    p.take("eof")
    return c


def parse_context(text: str) -> Context:
    p = _Parser("where " + text)
    ctx = p.where()
    p.take("eof")
    return ctx


def parse(text: str):
    """Parse either a single inequality or a derivation script."""
    from .derivation import STEP_OPS, parse_script
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        first = re.sub(r"^[a-z][\w-]*:\s*", "", body).split(None, 1)[0]
        if first in STEP_OPS:
            return parse_script(text)
        break
    return parse_inequality(text)


# --- conventional notation ------------------------------------------------------

_GREEK = {"ρ": "rho", "σ": "sigma", "φ": "phi", "ψ": "psi", "τ": "tau", "Δ": "Delta",
          "Φ": "Phi", "ξ": "xi", "Γ": "Gamma", "ϕ": "phi"}


def from_notation(text: str) -> str:
    """Rewrite conventional typeset notation into the DSL.

    Handles ``≥ → ← ⟨ ⟩``, state subscripts on entropic functionals
    (``I(R;B)_ψ``), superscript signatures (``U^{A'→AB}``, ``σ^{AB}``),
    relative states (``: ρ^{A'}``), hats (``B̂``) and grouped classical
    systems (``(XY)_A``).
    """
    s = text.replace("≥", ">=").replace("→", "->").replace("←", "<-")
    s = s.replace("⟨", "<").replace("⟩", ">").replace("̂", "^")
    s = re.sub(r"\(([A-Z]+)\)_([A-Z])", lambda m: " ".join(f"{c}_{m.group(2)}" for c in m.group(1)), s)
    s = re.sub(r"\)_[^\s\[\]()+<>=]+", ")", s)
    s = re.sub(r":\s*([^\s{}<>^]+)\^(?:\{[^}]*\}|[A-Z]'?)", r":\1", s)
    s = re.sub(r"(\S+?)\^\{([^}]*->[^}]*)\}", r"\1{\2}", s)
    s = re.sub(r"<\s*([^\s{}<>^@]+)\^\{([^}]*)\}\s*>", r"<\1@\2>", s)
    s = re.sub(r"<\s*([^<>{}@]*?->[^<>{}]*?)>", r"<{\1}>", s)
    for g, a in _GREEK.items():
        s = s.replace(g, a)
    return s
