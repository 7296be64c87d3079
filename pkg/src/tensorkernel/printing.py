"""Plain-text and TeX rendering of tensor expressions.

Plain text is the re-parseable input syntax (``2 g_{a b}``,
``\\partial_{c}{g_{a b}}``); TeX mirrors the transcript display style
(``2\\, {g}_{a b}``, ``{\\delta}^{a}\\,_{b}``).
"""
from fractions import Fraction

from .expr import Derivative, Index, Sum, Tensor, Term, as_sum


def _groups(indices):
    """Split a slot list into runs of equal variance."""
    runs = []
    for i in indices:
        if runs and runs[-1][0] == i.up:
            runs[-1][1].append(i.name)
        else:
            runs.append((i.up, [i.name]))
    return runs


def _coeff_plain(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def _coeff_tex(c: Fraction) -> str:
    if c.denominator == 1:
        return f"{c.numerator}\\,"
    return f"\\frac{{{c.numerator}}}{{{c.denominator}}}"


def print_plain(node) -> str:
    if isinstance(node, Tensor):
        return node.head + "".join(
            ("^" if up else "_") + "{" + " ".join(names) + "}"
            for up, names in _groups(node.indices))
    if isinstance(node, Derivative):
        return print_plain(Tensor(node.head, node.indices)) + "{" + print_plain(node.arg) + "}"
    if isinstance(node, Term):
        return _sum_text(Sum((node,)), print_plain, _coeff_plain, plain=True)
    if isinstance(node, Sum):
        return _sum_text(node, print_plain, _coeff_plain, plain=True)
    return print_plain(as_sum(node))


def print_tex(node) -> str:
    if isinstance(node, Tensor):
        groups = [("^" if up else "_") + "{" + " ".join(names) + "}"
                  for up, names in _groups(node.indices)]
        return "{" + node.head + "}" + "\\,".join(groups)
    if isinstance(node, Derivative):
        return print_tex(Tensor(node.head, node.indices)) + "{" + print_tex(node.arg) + "}"
    if isinstance(node, (Term, Sum)):
        return _sum_text(as_sum(node), print_tex, _coeff_tex, plain=False)
    return print_tex(as_sum(node))


def _term_body(t: Term, render, coeff_fmt, plain) -> str:
    mag = abs(t.coeff)
    parts = []
    for f in t.factors:
        if isinstance(f, Sum):
            parts.append("(" + render(f) + ")")
        else:
            parts.append(render(f))
    if not parts:
        if mag.denominator == 1:
            return str(mag.numerator)
        if plain:
            return f"{mag.numerator}/{mag.denominator}"
        return f"\\frac{{{mag.numerator}}}{{{mag.denominator}}}"
    body = " ".join(parts)
    if mag == 1:
        return body
    return coeff_fmt(mag) + " " + body


def _sum_text(s: Sum, render, coeff_fmt, plain) -> str:
    if not s.terms:
        return "0"
    out = []
    for k, t in enumerate(s.terms):
        body = _term_body(t, render, coeff_fmt, plain)
        if k == 0:
            out.append(("-" if t.coeff < 0 else "") + body)
        else:
            out.append((" - " if t.coeff < 0 else " + ") + body)
    return "".join(out)


def print_rule(lhs, rhs, tex=False) -> str:
    render = print_tex if tex else print_plain
    arrow = " \\rightarrow " if tex else " -> "
    return render(lhs) + arrow + render(rhs)


def index_text(i: Index) -> str:
    return ("^" if i.up else "_") + "{" + i.name + "}"
