"""Scalar expressions for component calculations, backed by sympy.

Coordinates are real symbols, unknown fields are undefined functions of
their declared dependencies, and ``c``/``pi`` are the named constants.
Text output follows Maxima's one-dimensional syntax
(``'diff(B1,r,1)+B1/r``, ``abs(r)``, ``%pi``, ``matrix([..],[..])``) and
:func:`parse_scalar` reads that syntax back.
"""
from __future__ import annotations

import re
from typing import Mapping, Optional

import sympy as sp
from sympy.core.function import AppliedUndef

from .errors import ParseError, UnboundSymbol

C = sp.Symbol("c", positive=True)
PI = sp.pi
T = sp.Symbol("t", real=True)

NAMED_CONSTANTS = {"c": C, "%pi": PI}


def symbol(name: str) -> sp.Symbol:
    """A real coordinate (or parameter) symbol."""
    if name == "c":
        return C
    return sp.Symbol(name, real=True)


def function(name: str, deps) -> sp.Expr:
    """Unknown function ``name`` of the given symbols."""
    return sp.Function(name)(*deps)


def diff(e, x) -> sp.Expr:
    return sp.diff(e, x)


def simplify(e):
    """Deterministic light normal form: expand over a cancelled fraction.

    ``sqrt(r^2)`` becomes ``abs(r)`` because coordinates are real; the
    absolute value is never dropped.
    """
    if isinstance(e, sp.MatrixBase):
        return e.applyfunc(simplify)
    e = sp.sympify(e)
    e = e.replace(lambda x: isinstance(x, sp.Abs) and isinstance(x.args[0], sp.Abs),
                  lambda x: x.args[0])
    return sp.expand(sp.cancel(sp.together(e)))


def eval_at(e, bindings: Mapping, functions: Optional[Mapping] = None) -> float:
    """Evaluate numerically.

    ``functions`` maps an unknown-function name to a sympy expression in the
    function's own dependency symbols; derivatives of it follow.
    """
    e = sp.sympify(e)
    if functions:
        reps = {}
        for f in e.atoms(AppliedUndef):
            name = f.func.__name__
            if name in functions:
                reps[f] = functions[name]
        e = e.subs(reps).doit()
    left = e.atoms(AppliedUndef)
    if left:
        raise UnboundSymbol(f"unbound function {sorted(str(f.func) for f in left)[0]}")
    subs = {}
    for s in e.free_symbols:
        if s.name not in bindings:
            raise UnboundSymbol(f"unbound symbol {s.name}")
        subs[s] = bindings[s.name]
    return float(e.evalf(subs=subs))


# ------------------------------------------------------------ printing

def _is_constant(e) -> bool:
    return e.free_symbols <= {C} and not e.atoms(AppliedUndef)


def _fmt_atom_args(e) -> str:
    return ",".join(to_text(a) for a in e.args)


def _is_negative(e) -> bool:
    coeff, _ = e.as_coeff_Mul()
    return coeff.is_negative is True


def _fmt_factor(e) -> str:
    text = to_text(e)
    if isinstance(e, (sp.Add, sp.Mul)) or (isinstance(e, sp.Rational) and not e.is_Integer):
        return f"({text})"
    if isinstance(e, sp.Integer) and e < 0:
        return f"({text})"
    return text


def _fmt_monomial(e) -> str:
    """Term without its overall sign handling: numerator/denominator."""
    num, den = sp.fraction(e)
    coeff, rest = num.as_coeff_Mul()
    factors = list(sp.Mul.make_args(rest)) if rest != 1 else []
    factors = sorted(factors, key=_factor_key)
    parts = []
    if coeff != 1 or not factors:
        parts.append(str(coeff))
    parts.extend(_fmt_factor(f) for f in factors)
    text = "*".join(parts)
    if den != 1:
        dtext = to_text(den)
        if isinstance(den, (sp.Mul, sp.Add)):
            dtext = f"({dtext})"
        text = f"{text}/{dtext}"
    return text


def _factor_key(f):
    # constants, then plain symbols, then functions/derivatives
    if f.is_number:
        return (0, str(f))
    if isinstance(f, (sp.Derivative, AppliedUndef)):
        return (2, str(f))
    return (1, to_text(f))


def _deriv_info(term):
    for a in sp.preorder_traversal(term):
        if isinstance(a, sp.Derivative):
            return a.expr.func.__name__, str(a.variables[0])
    return None


def _term_order(terms):
    """Derivative terms first (descending function, then variable), then the
    rest with constant-free terms before those carrying ``c`` or ``%pi``."""
    deriv = [t for t in terms if _deriv_info(t) is not None]
    other = [t for t in terms if _deriv_info(t) is None]
    deriv.sort(key=lambda t: (_deriv_info(t), to_text(-t if _is_negative(t) else t)), reverse=True)
    other.sort(key=lambda t: (len(t.atoms(sp.Symbol) & {C}) + (1 if t.has(PI) else 0),
                              _fmt_monomial(-t if _is_negative(t) else t)))
    return deriv + other


def _group_denominators(terms):
    """Collect terms sharing a coordinate-dependent denominator."""
    items, groups = [], {}
    for t in terms:
        num, den = sp.fraction(t)
        if den != 1 and not _is_constant(den):
            if den not in groups:
                groups[den] = []
                items.append(("group", den))
            groups[den].append(num)
        else:
            items.append(("term", t))
    out = []
    for kind, x in items:
        if kind == "group" and len(groups[x]) > 1:
            out.append(("group", x, groups[x]))
        elif kind == "group":
            out.append(("term", groups[x][0] / x, None))
        else:
            out.append(("term", x, None))
    return out


def _sum_text(terms) -> str:
    terms = _term_order(list(terms))
    pieces = []
    for kind, x, nums in _group_denominators(terms):
        if kind == "group":
            nums = _term_order(nums)
            neg = _is_negative(nums[0])
            if neg:
                nums = [-n for n in nums]
            inner = _join(nums)
            dtext = to_text(x)
            if isinstance(x, (sp.Mul, sp.Add)):
                dtext = f"({dtext})"
            pieces.append((neg, f"({inner})/{dtext}"))
        else:
            neg = _is_negative(x)
            pieces.append((neg, _fmt_monomial(-x if neg else x)))
    # groups lead, like the transcript rows
    pieces = [p for p in pieces if p[1].startswith("(")] + \
             [p for p in pieces if not p[1].startswith("(")]
    text = ""
    for k, (neg, body) in enumerate(pieces):
        if k == 0:
            text = ("-" if neg else "") + body
        else:
            text += ("-" if neg else "+") + body
    return text


def _join(terms) -> str:
    text = ""
    for k, t in enumerate(terms):
        neg = _is_negative(t)
        body = _fmt_monomial(-t if neg else t)
        if k == 0:
            text = ("-" if neg else "") + body
        else:
            text += ("-" if neg else "+") + body
    return text


def to_text(e) -> str:
    """Maxima-style one-dimensional text."""
    if isinstance(e, sp.MatrixBase):
        rows = ["[" + ",".join(to_text(x) for x in e.row(i)) + "]" for i in range(e.rows)]
        return "matrix(" + ",".join(rows) + ")"
    if isinstance(e, (list, tuple)):
        return "[" + ",".join(to_text(x) for x in e) + "]"
    e = sp.sympify(e)
    if e is PI:
        return "%pi"
    if isinstance(e, sp.Integer):
        return str(e)
    if isinstance(e, sp.Rational):
        return f"{e.p}/{e.q}"
    if isinstance(e, sp.Symbol):
        return e.name
    if isinstance(e, AppliedUndef):
        return e.func.__name__
    if isinstance(e, sp.Derivative):
        spec = ",".join(f"{v},{n}" for v, n in e.variable_count)
        return f"'diff({to_text(e.expr)},{spec})"
    if isinstance(e, sp.Abs):
        return f"abs({to_text(e.args[0])})"
    if isinstance(e, (sp.sin, sp.cos, sp.tan, sp.exp, sp.log)):
        return f"{type(e).__name__}({_fmt_atom_args(e)})"
    if isinstance(e, sp.Pow):
        base, ex = e.args
        if ex == sp.Rational(1, 2):
            return f"sqrt({to_text(base)})"
        if ex.is_negative:
            return _fmt_monomial(e)
        return f"{_fmt_factor(base)}^{_fmt_factor(ex)}"
    if isinstance(e, sp.Add):
        return _sum_text(sp.Add.make_args(e))
    if isinstance(e, sp.Mul):
        neg = _is_negative(e)
        return ("-" if neg else "") + _fmt_monomial(-e if neg else e)
    return str(e)


def to_tex(e) -> str:
    return sp.latex(e)


# ------------------------------------------------------------ parsing

_SCALAR_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>%?[A-Za-z_][A-Za-z0-9_]*)"
                           r"|(?P<op>'diff|[-+*/^(),\[\]]))")


class _ScalarParser:
    """Precedence climbing over the Maxima-style text produced by to_text."""

    BINARY = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}

    def __init__(self, text: str, functions: Mapping, symbols: Mapping):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _SCALAR_TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                if text[pos:].strip() == "":
                    break
                raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind)))
            pos = m.end()
        self.toks.append(("eof", ""))
        self.i = 0
        self.functions = functions
        self.symbols = symbols

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.take()
        if t[1] != text:
            raise ParseError(f"expected {text!r}, found {t[1]!r}")

    def parse(self):
        e = self.expr(0)
        if self.peek()[0] != "eof":
            raise ParseError(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self, min_prec):
        kind, tok = self.peek()
        if tok == "-":
            self.take()
            lhs = -self.expr(25)
        else:
            lhs = self.atom()
        while True:
            kind, tok = self.peek()
            prec = self.BINARY.get(tok) if kind == "op" else None
            if prec is None or prec < min_prec:
                return lhs
            self.take()
            rhs = self.expr(prec if tok == "^" else prec + 1)
            lhs = {"+": lambda: lhs + rhs, "-": lambda: lhs - rhs, "*": lambda: lhs * rhs,
                   "/": lambda: lhs / rhs, "^": lambda: lhs ** rhs}[tok]()

    def atom(self):
        kind, tok = self.take()
        if kind == "num":
            return sp.Integer(int(tok))
        if tok == "(":
            e = self.expr(0)
            self.expect(")")
            return e
        if tok == "'diff":
            self.expect("(")
            f = self.expr(0)
            while self.peek()[1] == ",":
                self.take()
                var = self.expr(0)
                self.expect(",")
                n = int(self.take()[1])
                f = sp.Derivative(f, (var, n))
            self.expect(")")
            return f
        if kind == "name":
            if tok in ("matrix",):
                return self.matrix()
            if tok in ("abs", "sqrt", "sin", "cos", "tan", "exp", "log") and self.peek()[1] == "(":
                self.take()
                arg = self.expr(0)
                self.expect(")")
                fn = {"abs": sp.Abs, "sqrt": sp.sqrt, "sin": sp.sin, "cos": sp.cos,
                      "tan": sp.tan, "exp": sp.exp, "log": sp.log}[tok]
                return fn(arg)
            if tok in NAMED_CONSTANTS:
                return NAMED_CONSTANTS[tok]
            if tok in self.functions:
                return function(tok, self.functions[tok])
            if tok in self.symbols:
                return self.symbols[tok]
            return symbol(tok)
        raise ParseError(f"unexpected {tok!r}")

    def matrix(self):
        self.expect("(")
        rows = []
        while True:
            self.expect("[")
            row = [self.expr(0)]
            while self.peek()[1] == ",":
                self.take()
                row.append(self.expr(0))
            self.expect("]")
            rows.append(row)
            if self.peek()[1] != ",":
                break
            self.take()
        self.expect(")")
        return sp.Matrix(rows)


def parse_scalar(text: str, functions: Optional[Mapping] = None,
                 symbols: Optional[Mapping] = None):
    """Parse Maxima-style text; ``functions`` maps names to dependency lists."""
    return _ScalarParser(text, functions or {}, symbols or {}).parse()


def normal_text(e) -> str:
    """Printed normal form used for golden comparisons."""
    return to_text(simplify(e))
