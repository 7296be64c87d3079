"""Component tensor calculus on coordinate charts.

Holonomic operators on three-dimensional charts: metric and inverse,
Christoffel symbols, div/rot/grad, physical components via Lame
coefficients, and the Maxwell residuals of the cylindrical example.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional

import sympy as sp

from .errors import (DimensionNotThree, KindMismatch, NonOrthogonalChart,
                     ParseError, SingularMetric, UnknownChart)
from .scalar import C, PI, T, function, simplify, symbol, to_tex, to_text

SCALAR, CONTRAVARIANT, COVARIANT, PHYSICAL = "scalar", "contravariant", "covariant", "physical"
FIELD_HEADER = "tensorkernel-fields v1"


@dataclass(frozen=True)
class ComponentField:
    kind: str
    components: tuple
    dependencies: tuple = ()

    def __post_init__(self):
        if self.kind not in (SCALAR, CONTRAVARIANT, COVARIANT, PHYSICAL):
            raise KindMismatch(f"unknown field kind {self.kind}")

    def matrix(self) -> sp.Matrix:
        return sp.Matrix(list(self.components))


@dataclass(eq=False)
class Chart:
    name: str
    coords: tuple
    metric: sp.Matrix
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.metric = sp.Matrix(self.metric)
        n = len(self.coords)
        if self.metric.shape != (n, n):
            raise SingularMetric(f"metric of {self.name} is not {n}x{n}")
        if simplify(self.metric - self.metric.T) != sp.zeros(n, n):
            raise SingularMetric(f"metric of {self.name} is not symmetric")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @cached_property
    def det(self):
        return simplify(self.metric.det())

    @cached_property
    def inverse(self) -> sp.Matrix:
        if self.det == 0:
            raise SingularMetric(f"metric of {self.name} is singular")
        return simplify(self.metric.inv())

    @cached_property
    def is_diagonal(self) -> bool:
        return all(self.metric[i, j] == 0 for i in range(self.dim)
                   for j in range(self.dim) if i != j)

    @cached_property
    def sqrt_det(self):
        """sqrt|det g|; for diagonal metrics the product of |sqrt(g_ii)|."""
        if self.is_diagonal:
            h = sp.Mul(*[sp.sqrt(self.metric[i, i]) for i in range(self.dim)])
            return simplify(h if h.is_nonnegative else sp.Abs(h))
        return simplify(sp.sqrt(sp.Abs(self.det)))

    @cached_property
    def christoffel(self) -> list:
        """``gamma[a][b][c]`` = Gamma^a_{bc}."""
        g, ginv, x, n = self.metric, self.inverse, self.coords, self.dim
        out = [[[sp.Integer(0)] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(b, n):
                    s = sum(ginv[a, d] * (sp.diff(g[d, c], x[b]) + sp.diff(g[b, d], x[c])
                                          - sp.diff(g[b, c], x[d])) for d in range(n))
                    out[a][b][c] = out[a][c][b] = simplify(s / 2)
        return out


def _sym(*names):
    return tuple(symbol(n) for n in names)


def builtin_chart(name: str) -> Chart:
    if name == "cartesian3":
        return Chart(name, _sym("x", "y", "z"), sp.eye(3))
    if name == "cylindrical":
        r, th, z = _sym("r", "theta", "z")
        return Chart(name, (r, th, z), sp.diag(1, r ** 2, 1))
    if name == "spherical":
        r, th, ph = _sym("r", "theta", "phi")
        return Chart(name, (r, th, ph), sp.diag(1, r ** 2, r ** 2 * sp.sin(th) ** 2))
    raise UnknownChart(f"unknown chart {name}; built-ins are cartesian3, cylindrical, spherical")


BUILTIN_CHARTS = ("cartesian3", "cylindrical", "spherical")


def define_chart(name: str, coords, metric) -> Chart:
    """User chart from coordinate names and a metric (matrix or Maxima text)."""
    from .scalar import parse_scalar
    syms = tuple(symbol(x) for x in coords)
    if isinstance(metric, str):
        metric = parse_scalar(metric, symbols={x.name: x for x in syms})
    if not isinstance(metric, sp.MatrixBase):
        raise ParseError(f"metric of {name} must be a matrix")
    return Chart(name, syms, metric)


def lookup_chart(name: str, charts: Optional[dict] = None) -> Chart:
    if charts and name in charts:
        return charts[name]
    return builtin_chart(name)


def inverse_metric(c: Chart) -> sp.Matrix:
    return c.inverse


def christoffel(c: Chart) -> list:
    return c.christoffel


# ------------------------------------------------------------ operators

def _need(v: ComponentField, kind: str, op: str) -> None:
    if v.kind != kind:
        raise KindMismatch(f"{op} needs a {kind} field, got {v.kind}")


def div(c: Chart, v: ComponentField):
    """d_i v^i + Gamma^j_{ji} v^i."""
    _need(v, CONTRAVARIANT, "div")
    n, gam = c.dim, c.christoffel
    s = sum(sp.diff(v.components[i], c.coords[i]) for i in range(n))
    s += sum(gam[j][j][i] * v.components[i] for i in range(n) for j in range(n))
    return simplify(s)


def rot(c: Chart, w: ComponentField) -> ComponentField:
    """(rot w)^i = eps^{ijk} d_j w_k / sqrt|det g|."""
    if c.dim != 3:
        raise DimensionNotThree(f"rot needs a three-dimensional chart, {c.name} has {c.dim}")
    _need(w, COVARIANT, "rot")
    out = []
    for i in range(3):
        s = sp.Integer(0)
        for j in range(3):
            for k in range(3):
                eps = sp.LeviCivita(i, j, k)
                if eps:
                    s += eps * sp.diff(w.components[k], c.coords[j])
        out.append(simplify(s / c.sqrt_det))
    return ComponentField(CONTRAVARIANT, tuple(out), w.dependencies)


def grad(c: Chart, f) -> ComponentField:
    return ComponentField(COVARIANT, tuple(simplify(sp.diff(f, x)) for x in c.coords))


def raise_index(c: Chart, w: ComponentField) -> ComponentField:
    _need(w, COVARIANT, "raise_index")
    v = c.inverse * w.matrix()
    return ComponentField(CONTRAVARIANT, tuple(simplify(x) for x in v), w.dependencies)


def lower_index(c: Chart, v: ComponentField) -> ComponentField:
    _need(v, CONTRAVARIANT, "lower_index")
    w = c.metric * v.matrix()
    return ComponentField(COVARIANT, tuple(simplify(x) for x in w), v.dependencies)


def lame(c: Chart) -> tuple:
    if not c.is_diagonal:
        raise NonOrthogonalChart(f"{c.name} has off-diagonal metric entries")
    return tuple(simplify(sp.sqrt(c.metric[i, i])) for i in range(c.dim))


def physical_components(c: Chart, v: ComponentField) -> ComponentField:
    """v^i -> h_i v^i and w_i -> w_i / h_i."""
    h = lame(c)
    if v.kind == CONTRAVARIANT:
        comps = [h[i] * v.components[i] for i in range(c.dim)]
    elif v.kind == COVARIANT:
        comps = [v.components[i] / h[i] for i in range(c.dim)]
    else:
        raise KindMismatch(f"physical components need a vector, got {v.kind}")
    return ComponentField(PHYSICAL, tuple(simplify(x) for x in comps), v.dependencies)


def metric_compatibility_check(c: Chart) -> list:
    """nabla_k g_{ij} for all i, j, k; identically zero for a Levi-Civita connection."""
    g, gam, x, n = c.metric, c.christoffel, c.coords, c.dim
    return [[[simplify(sp.diff(g[i, j], x[k])
                       - sum(gam[l][i][k] * g[l, j] for l in range(n))
                       - sum(gam[l][j][k] * g[i, l] for l in range(n)))
              for k in range(n)] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class MaxwellResiduals:
    div_b: sp.Expr
    div_d: sp.Expr
    rot_h: tuple
    rot_e: tuple

    def lines(self, tex: bool = False) -> list:
        fmt = to_tex if tex else to_text
        return [
            f"Div(B) = {fmt(self.div_b)}",
            f"Div(D)-4*%pi*rho = {fmt(self.div_d)}",
            f"Rot(H)+'diff(D,t)/c-4*%pi*j/c = {fmt(sp.Matrix(self.rot_h))}",
            f"Rot(E)+'diff(B,t)/c = {fmt(sp.Matrix(self.rot_e))}",
        ]


def maxwell_residuals(c: Chart, B: ComponentField, D: ComponentField, j: ComponentField,
                      H: ComponentField, E: ComponentField, rho, t=T) -> MaxwellResiduals:
    """Div(B); Div(D) - 4 pi rho; Rot(H) + dD/dt / c - 4 pi j / c; Rot(E) + dB/dt / c."""
    _need(j, CONTRAVARIANT, "the current j")
    rh, re_ = rot(c, H), rot(c, E)
    rot_h = tuple(simplify(rh.components[i] + sp.diff(D.components[i], t) / C
                           - 4 * PI * j.components[i] / C) for i in range(3))
    rot_e = tuple(simplify(re_.components[i] + sp.diff(B.components[i], t) / C)
                  for i in range(3))
    return MaxwellResiduals(div(c, B), simplify(div(c, D) - 4 * PI * rho), rot_h, rot_e)


# ------------------------------------------------------------ field specs

@dataclass
class FieldSpec:
    fields: dict          # name -> (component names, kind or None, dependency names)

    def field(self, name: str, kind: str) -> ComponentField:
        comps, declared, deps = self.fields[name]
        if declared is not None and declared != kind:
            raise KindMismatch(f"{name} is declared {declared}, needed {kind}")
        dsyms = tuple(symbol(d) for d in deps)
        return ComponentField(kind, tuple(function(n, dsyms) for n in comps), dsyms)

    def scalar(self, name: str):
        comps, _, deps = self.fields[name]
        return function(comps[0], tuple(symbol(d) for d in deps))

    def function_deps(self) -> dict:
        out = {}
        for comps, _, deps in self.fields.values():
            for n in comps:
                out[n] = tuple(symbol(d) for d in deps)
        return out


_FIELD_LINE = re.compile(
    r"^(?P<name>\w+)\s*=\s*(?:\[(?P<comps>[^\]]*)\]|(?P<scalar>\w+))"
    r"(?:\s+(?P<kind>contravariant|covariant|scalar))?"
    r"(?:\s+depends\s+(?P<deps>[\w\s,]+))?\s*$")


def parse_field_spec(text: str) -> FieldSpec:
    lines = [ln.strip() for ln in text.splitlines()]
    body = [(k, ln) for k, ln in enumerate(lines, 1) if ln and not ln.startswith("#")]
    if not body or body[0][1] != FIELD_HEADER:
        raise ParseError(f"field spec must start with the header line '{FIELD_HEADER}'")
    fields = {}
    for k, ln in body[1:]:
        m = _FIELD_LINE.match(ln)
        if m is None:
            raise ParseError(f"bad field spec line {k}: {ln}")
        if m.group("comps") is not None:
            comps = [x.strip() for x in m.group("comps").split(",") if x.strip()]
        else:
            comps = [m.group("scalar")]
        deps = [d.strip() for d in (m.group("deps") or "").replace(",", " ").split()]
        fields[m.group("name")] = (comps, m.group("kind"), deps)
    return FieldSpec(fields)


def default_field_spec(c: Chart) -> FieldSpec:
    """The fields of the cylindrical example, generalised to any chart."""
    deps = ["t"] + [x.name for x in c.coords]
    comps = lambda stem: [f"{stem}{k}" for k in range(1, c.dim + 1)]
    return FieldSpec({
        "j": (comps("j"), CONTRAVARIANT, deps),
        "B": (comps("B"), CONTRAVARIANT, deps),
        "D": (comps("D"), CONTRAVARIANT, deps),
        "H": (comps("H_"), COVARIANT, deps),
        "E": (comps("E_"), COVARIANT, deps),
        "rho": (["rho"], SCALAR, deps),
    })


def maxwell_from_spec(c: Chart, spec: FieldSpec) -> MaxwellResiduals:
    return maxwell_residuals(
        c, spec.field("B", CONTRAVARIANT), spec.field("D", CONTRAVARIANT),
        spec.field("j", CONTRAVARIANT), spec.field("H", COVARIANT),
        spec.field("E", COVARIANT), spec.scalar("rho"))


# ------------------------------------------------------------ reports

def chart_report(c: Chart, tex: bool = False) -> list:
    fmt = to_tex if tex else to_text
    return [f"coords = [{','.join(x.name for x in c.coords)}]",
            f"lg = {fmt(c.metric)}",
            f"ug = {fmt(c.inverse)}"]


def christoffel_report(c: Chart, tex: bool = False) -> list:
    fmt = to_tex if tex else to_text
    out = []
    gam = c.christoffel
    for a in range(c.dim):
        for b in range(c.dim):
            for cc in range(b, c.dim):
                if gam[a][b][cc] != 0:
                    x = c.coords
                    out.append(f"Gamma^{x[a].name}_{x[b].name} {x[cc].name} = {fmt(gam[a][b][cc])}")
    return out or ["all Christoffel symbols vanish"]


def chart_command(words: list, tex: bool = False, spec_path: Optional[str] = None,
                  charts: Optional[dict] = None) -> list:
    """``chart show NAME``, ``chart define NAME coords X,Y metric M``,
    ``christoffel NAME`` and ``maxwell NAME [FILE]``.

    ``charts`` holds user definitions; ``chart define`` adds to it.
    """
    if words[:2] == ["chart", "define"]:
        if len(words) < 7 or words[3] != "coords" or words[5] != "metric" or charts is None:
            raise ParseError("expected 'chart define NAME coords X,Y,... metric matrix(...)'")
        coords = [x for x in words[4].split(",") if x]
        charts[words[2]] = define_chart(words[2], coords, " ".join(words[6:]))
        return chart_report(charts[words[2]], tex)
    if words[:2] == ["chart", "show"] and len(words) == 3:
        return chart_report(lookup_chart(words[2], charts), tex)
    if words[0] == "christoffel" and len(words) == 2:
        return christoffel_report(lookup_chart(words[1], charts), tex)
    if words[0] == "maxwell" and len(words) in (2, 3):
        c = lookup_chart(words[1], charts)
        path = words[2] if len(words) == 3 else spec_path
        spec = parse_field_spec(Path(path).read_text()) if path else default_field_spec(c)
        return maxwell_from_spec(c, spec).lines(tex)
    raise ParseError("expected 'chart show NAME', 'chart define ...', 'christoffel NAME' "
                     "or 'maxwell NAME [FILE]'")
