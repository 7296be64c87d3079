"""Parser for the Cadabra-style input language.

Expressions use juxtaposition for products (binding tightest), then unary
minus, then ``+``/``-``.  Statements are property declarations
(``{A,B}::Commuting.``), expression entries (``B A;``, ``name := expr;``),
substitution rules (``lhs -> rhs``), algorithm calls (``@join!!(%){expand};``)
and a few chart commands for the component side.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, RepeatedIndex, TensorKernelError
from .expr import Derivative, Index, Sum, Tensor, Term, normalize, validate
from .properties import Pattern


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int


@dataclass(frozen=True)
class Token:
    kind: str       # NAME, NUM, OP, EOF
    text: str
    span: SourceSpan


@dataclass
class Statement:
    kind: str                 # PropertyDecl, ExprAssign, AlgorithmCall, ChartCommand
    payload: dict
    terminator: str
    span: SourceSpan
    text: str = ""


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<name>\\[A-Za-z]+|[A-Za-z][A-Za-z0-9]*)
  | (?P<num>\d+)
  | (?P<op>:=|::|->|\.\.|!!|@@|[\^_{}()\[\]+\-*/,;.:@!%\#=])
""", re.VERBOSE)

CHART_WORDS = {"chart", "christoffel", "maxwell", "show"}


def tokenize(text: str, line0: int = 1) -> list:
    tokens, pos, line, col = [], 0, line0, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             SourceSpan(line, col, pos, pos + 1))
        kind = m.lastgroup
        chunk = m.group()
        span = SourceSpan(line, col, pos, m.end())
        if kind != "ws":
            tokens.append(Token({"name": "NAME", "num": "NUM", "op": "OP"}[kind], chunk, span))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("EOF", "", SourceSpan(line, col, pos, pos)))
    return tokens


class _Parser:
    def __init__(self, text: str, props=None, line0: int = 1):
        self.text = text
        self.toks = tokenize(text, line0)
        self.i = 0
        self.props = props

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text) -> bool:
        return self.tok.kind in ("OP", "NAME") and self.tok.text == text

    def take(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.take()

    def fail(self, msg, tok=None):
        raise ParseError(msg, (tok or self.tok).span)

    def raw_until_close(self, open_, close) -> str:
        """Source text up to the matching ``close`` (consumed)."""
        depth, start = 1, self.tok.span.start
        while True:
            t = self.tok
            if t.kind == "EOF":
                self.fail(f"unbalanced {open_!r}")
            if t.kind == "OP" and t.text == open_:
                depth += 1
            elif t.kind == "OP" and t.text == close:
                depth -= 1
                if depth == 0:
                    self.take()
                    return self.text[start:t.span.start].strip()
            self.take()

    # ------------------------------------------------------------ expressions

    def parse_sum(self) -> Sum:
        terms = []
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        elif self.at("+"):
            self.take()
        terms.extend(self._signed(self.parse_product(), sign))
        while self.at("+") or self.at("-"):
            sign = 1 if self.take().text == "+" else -1
            terms.extend(self._signed(self.parse_product(), sign))
        return Sum(tuple(terms))

    @staticmethod
    def _signed(t: Term, sign: int) -> list:
        return [Term(t.coeff * sign, t.factors)]

    def _starts_factor(self) -> bool:
        t = self.tok
        return t.kind in ("NAME", "NUM") or (t.kind == "OP" and t.text == "(")

    def parse_product(self) -> Term:
        coeff = Fraction(1)
        factors = []
        if self.at("-"):
            self.take()
            coeff = -coeff
        if not self._starts_factor():
            self.fail(f"expected a factor, found {self.tok.text or 'end of input'!r}")
        while self._starts_factor():
            c, f = self.parse_factor()
            coeff *= c
            if f is not None:
                factors.append(f)
            while self.at("/"):
                self.take()
                if self.tok.kind != "NUM":
                    self.fail("only division by an integer literal is supported")
                d = int(self.take().text)
                if d == 0:
                    self.fail("division by zero")
                coeff /= d
            if self.at("*"):
                self.take()
        return Term(coeff, tuple(factors))

    def parse_factor(self):
        t = self.tok
        if t.kind == "NUM":
            self.take()
            return Fraction(int(t.text)), None
        if self.at("("):
            self.take()
            inner = self.parse_sum()
            self.expect(")")
            return Fraction(1), inner
        if t.kind == "NAME":
            return Fraction(1), self.parse_tensor()
        self.fail(f"unexpected {t.text!r}")

    def parse_indices(self, allow_wild=False):
        """Index groups after a head. Returns a tuple, or None for ``{#}``."""
        out, wild = [], False
        while self.at("^") or self.at("_"):
            up = self.take().text == "^"
            if self.at("{"):
                self.take()
                while not self.at("}"):
                    if self.at("#"):
                        if not allow_wild:
                            self.fail("'#' is only allowed in declarations")
                        self.take()
                        wild = True
                        continue
                    tok = self.tok
                    if tok.kind not in ("NAME", "NUM"):
                        self.fail(f"bad index {tok.text!r}")
                    self.take()
                    out.append(self._index(tok, up))
                self.expect("}")
            else:
                tok = self.take()
                if tok.kind not in ("NAME", "NUM"):
                    self.fail(f"bad index {tok.text!r}", tok)
                out.append(self._index(tok, up))
        return None if wild else tuple(out)

    def _index(self, tok: Token, up: bool) -> Index:
        name = tok.text
        if self.props is not None and not self.props.check_index(name):
            self.fail(f"index {name} is not in any declared index set", tok)
        return Index(name, up)

    def parse_tensor(self):
        head_tok = self.take()
        head = head_tok.text
        indices = self.parse_indices()
        if self.at("{"):
            if self.props is not None and not self.props.is_derivative(head):
                self.fail(f"{head} is not declared as a derivative", head_tok)
            self.take()
            arg = self.parse_sum()
            self.expect("}")
            return Derivative(head, indices, normalize(arg))
        if self.props is not None and self.props.arities.get(head, 0) is not None \
                and not self.props.is_gamma(head):
            try:
                self.props.check_arity(head, len(indices))
            except TensorKernelError as exc:
                self.fail(str(exc), head_tok)
        return Tensor(head, indices)

    def parse_body(self):
        """An expression, or a substitution rule ``lhs -> rhs``."""
        start = self.tok
        lhs = self._checked(self.parse_sum(), start)
        if self.at("->"):
            self.take()
            start = self.tok
            rhs = self._checked(self.parse_sum(), start)
            return ("rule", lhs, rhs)
        return ("expr", lhs, None)

    def _checked(self, e: Sum, start: Token) -> Sum:
        try:
            return validate(normalize(e))
        except RepeatedIndex as exc:
            raise ParseError(str(exc), start.span) from None

    # ------------------------------------------------------------ patterns

    def parse_pattern(self) -> Pattern:
        tok = self.tok
        if tok.kind != "NAME":
            self.fail(f"expected a name, found {tok.text!r}")
        self.take()
        if self.at("#"):
            self.take()
            return Pattern(tok.text + "#", ())
        indices = self.parse_indices(allow_wild=True)
        if self.at("{"):
            self.take()
            if self.at("#"):
                self.take()
                self.expect("}")
                return Pattern(tok.text, None)
            inner = self.parse_pattern()
            self.expect("}")
            return Pattern(tok.text, indices, inner)
        return Pattern(tok.text, indices)

    def parse_targets(self) -> list:
        if self.at("{"):
            self.take()
            out = [self.parse_pattern()]
            while self.at(","):
                self.take()
                out.append(self.parse_pattern())
            self.expect("}")
            return out
        return [self.parse_pattern()]

    # ------------------------------------------------------------ statements

    def terminator(self) -> str:
        if self.at(";") or self.at("."):
            term = self.take().text
        elif self.tok.kind == "EOF":
            term = ";"
        else:
            self.fail(f"expected ';' or '.', found {self.tok.text!r}")
        if self.tok.kind != "EOF":
            self.fail(f"unexpected {self.tok.text!r} after end of statement")
        return term

    def parse_statement(self) -> Statement:
        first = self.tok
        span = first.span
        if first.kind == "NAME" and first.text in CHART_WORDS and self.peek().kind == "NAME":
            body = self.text.strip()
            term = body[-1] if body.endswith((";", ".")) else ";"
            words = body.rstrip(";.").split()
            return Statement("ChartCommand", {"words": words}, term, span, self.text)
        if self.at("@"):
            return self._algorithm(span)
        if self.at("::") or self._looks_like_decl():
            targets = [] if self.at("::") else self.parse_targets()
            self.expect("::")
            prop = self.take()
            if prop.kind != "NAME":
                self.fail("expected a property name", prop)
            args = ""
            if self.at("("):
                self.take()
                args = self.raw_until_close("(", ")")
            term = self.terminator()
            return Statement("PropertyDecl", {"targets": targets, "property": prop.text,
                                              "args": args}, term, span, self.text)
        name = None
        if self.tok.kind == "NAME" and self.peek().kind == "OP" and self.peek().text == ":=":
            name = self.take().text
            self.take()
        kind, lhs, rhs = self.parse_body()
        term = self.terminator()
        return Statement("ExprAssign", {"name": name, "kind": kind, "lhs": lhs, "rhs": rhs},
                         term, span, self.text)

    def _looks_like_decl(self) -> bool:
        depth = 0
        for t in self.toks[self.i:]:
            if t.kind == "OP" and t.text in "({[":
                depth += 1
            elif t.kind == "OP" and t.text in ")}]":
                depth -= 1
            elif t.kind == "OP" and t.text == "::" and depth == 0:
                return True
            elif t.kind == "OP" and t.text in (":=", "->", "@"):
                return False
        return False

    def _algorithm(self, span) -> Statement:
        self.expect("@")
        name_tok = self.take()
        if name_tok.kind != "NAME":
            self.fail("expected an algorithm name", name_tok)
        name = name_tok.text
        end = name_tok.span.end
        # algorithm names contain underscores, which tokenize as operators
        while self.tok.span.start == end and (self.tok.kind == "NAME" or self.at("_")):
            name += self.tok.text
            end = self.take().span.end
        mode = "once"
        depth = None
        if self.at("!!"):
            self.take()
            mode = "repeat"
        elif self.at("!"):
            self.take()
            if self.tok.kind == "NUM":
                depth = int(self.take().text)
        self.expect("(")
        target = self.raw_until_close("(", ")")
        args = ""
        if self.at("("):
            self.take()
            args = self.raw_until_close("(", ")")
        elif self.at("{"):
            self.take()
            args = self.raw_until_close("{", "}")
        term = self.terminator()
        return Statement("AlgorithmCall", {"name": name, "mode": mode, "depth": depth,
                                           "target": target, "args": args},
                         term, span, self.text)


def parse_statement(text: str, props=None, line: int = 1) -> Statement:
    """Parse one complete statement (terminated by ';' or '.')."""
    return _Parser(text, props, line).parse_statement()


def parse_expr(text: str, props=None) -> Sum:
    """Parse a bare expression (no terminator needed)."""
    p = _Parser(text, props)
    start = p.tok
    e = p._checked(p.parse_sum(), start)
    if p.at(";"):
        p.take()
    if p.tok.kind != "EOF":
        p.fail(f"unexpected {p.tok.text!r}")
    return e


def parse_rule(text: str, props=None):
    from .rewrite import make_rule
    p = _Parser(text, props)
    kind, lhs, rhs = p.parse_body()
    if kind != "rule":
        p.fail("expected a rule 'lhs -> rhs'")
    return make_rule(lhs, rhs)


def split_statements(text: str) -> list:
    """Split script text into ``(statement, first line, expected lines)``.

    Lines starting with ``#>`` hold expected output for the preceding
    statement; other lines starting with ``# `` are comments.
    """
    out = []
    buf, buf_line, depth = [], None, 0
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped.startswith("#>"):
            if not out:
                raise ParseError("expected-output line before any statement",
                                 SourceSpan(lineno, 1, 0, 0))
            out[-1][2].append(stripped[2:].strip())
            continue
        if stripped == "#" or stripped.startswith("# ") or (not buf and not stripped):
            continue
        k = 0
        while k < len(line):
            ch = line[k]
            if buf_line is None and not ch.isspace():
                buf_line = lineno
            if ch in "({[":
                depth += 1
            elif ch in ")}]":
                depth -= 1
            buf.append(ch)
            ends = depth == 0 and (ch == ";" or (ch == "." and _is_terminal_dot(line, k)))
            if ends:
                stmt = "".join(buf).strip()
                if stmt:
                    out.append((stmt, buf_line, []))
                buf, buf_line = [], None
            k += 1
        buf.append("\n")
    rest = "".join(buf).strip()
    if rest:
        out.append((rest, buf_line, []))
    return out


def _is_terminal_dot(line: str, k: int) -> bool:
    prev = line[k - 1] if k > 0 else ""
    nxt = line[k + 1] if k + 1 < len(line) else ""
    return prev != "." and nxt != "." and not nxt.isdigit()
