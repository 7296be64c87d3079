"""Gamma-matrix algebra on the antisymmetrised basis.

A basis element ``gamma_{a1...ap}`` is a tuple of indices; products are
expanded with the rank-one step

    gamma_a gamma_{b1..bq} = gamma_{a b1..bq} + sum_j (-1)^(j+1) g_{a bj} gamma_{b1..^bj..bq}

applied recursively to the left factor.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import MissingGammaMetric
from .expr import Index, Sum, Tensor, Term, map_terms, normalize
from .rewrite import _contract_step, fixpoint


def _pair(x: Index, y: Index) -> tuple:
    return (x, y) if (x.name, x.up) <= (y.name, y.up) else (y, x)


def _add(acc: dict, key, c) -> None:
    v = acc.get(key, Fraction(0)) + c
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


def clifford_step(a: Index, gammas: tuple) -> dict:
    """gamma_a times gamma_B as ``{(metric pairs, gamma slots): coeff}``."""
    out = {}
    _add(out, ((), (a,) + tuple(gammas)), Fraction(1))
    for j, b in enumerate(gammas):
        rest = tuple(gammas[:j]) + tuple(gammas[j + 1:])
        _add(out, ((_pair(a, b),), rest), Fraction((-1) ** j))
    return out


def gamma_product(left: tuple, right: tuple) -> dict:
    """Expand gamma_left gamma_right into the antisymmetrised basis."""
    if not left:
        return {((), tuple(right)): Fraction(1)}
    a, rest = left[0], tuple(left[1:])
    out = {}
    for (ms, gs), c in gamma_product(rest, right).items():
        for (ms2, gs2), c2 in clifford_step(a, gs).items():
            _add(out, (tuple(sorted(ms + ms2)), gs2), c * c2)
    # gamma_{a rest} = gamma_a gamma_rest - sum_k (-1)^k g_{a r_k} gamma_{rest\k}
    for k, r in enumerate(rest):
        sub = rest[:k] + rest[k + 1:]
        for (ms, gs), c in gamma_product(sub, right).items():
            _add(out, (tuple(sorted(ms + (_pair(a, r),))), gs), -c * (-1) ** k)
    return out


def _contract(metrics: tuple, gammas: tuple, dim: Optional[int]):
    """Resolve metric pairs against each other and the gamma slots.

    Returns ``(factor, metrics, gammas)`` or ``None`` when the term vanishes.
    """
    metrics, gammas, factor = list(metrics), list(gammas), 1
    changed = True
    while changed:
        changed = False
        for k, (x, y) in enumerate(metrics):
            if x.name == y.name:
                if dim is not None and x.up != y.up:
                    factor *= dim
                    del metrics[k]
                    changed = True
                    break
                continue
            for mine, other in ((x, y), (y, x)):
                partner = mine.flipped()
                if partner in gammas:
                    gammas[gammas.index(partner)] = other
                    del metrics[k]
                    changed = True
                    break
                hit = next((j for j, m in enumerate(metrics) if j != k and partner in m), None)
                if hit is not None:
                    m = metrics[hit]
                    metrics[hit] = _pair(*[other if i == partner else i for i in m])
                    del metrics[k]
                    changed = True
                    break
            if changed:
                break
    names = [g.name for g in gammas]
    if len(set(names)) != len(names):
        return None
    if dim is not None and len(gammas) > dim:
        return None
    return factor, tuple(sorted(metrics)), tuple(gammas)


def expand_pair(head: str, left: Tensor, right: Tensor, props) -> Sum:
    """gamma_left gamma_right as a sum, highest rank first, contracted."""
    metric = props.gamma_metric(head)
    if metric is None:
        raise MissingGammaMetric(f"{head} has no metric declared via GammaMatrix(metric=...)")
    names = [i.name for i in left.indices + right.indices]
    dim = props.dimension_of(names[0]) if names else None
    acc = {}
    for (ms, gs), c in gamma_product(tuple(left.indices), tuple(right.indices)).items():
        res = _contract(ms, gs, dim)
        if res is None:
            continue
        factor, ms, gs = res
        _add(acc, (ms, gs), c * factor)
    ranked = sorted(acc.items(), key=lambda kv: (
        -len(kv[0][1]),
        tuple((props.name_rank(i.name), i.up) for i in kv[0][1]),
        tuple((props.name_rank(i.name), i.up) for m in kv[0][0] for i in m)))
    terms = []
    for (ms, gs), c in ranked:
        factors = ((Tensor(head, gs),) if gs else ()) + tuple(Tensor(metric, m) for m in ms)
        terms.append(Term(c, factors))
    return Sum(tuple(terms))


def _is_gamma(f, props) -> bool:
    return isinstance(f, Tensor) and props.is_gamma(f.head)


def _join_term(t: Term, props, expand: bool) -> Sum:
    fs, out, i, hit = list(t.factors), [], 0, False
    while i < len(fs):
        a = fs[i]
        b = fs[i + 1] if i + 1 < len(fs) else None
        if (b is not None and _is_gamma(a, props) and _is_gamma(b, props)
                and a.head == b.head and (expand or len(a.indices) <= 1)):
            out.append(expand_pair(a.head, a, b, props))
            i += 2
            hit = True
        else:
            out.append(a)
            i += 1
    new = normalize(Sum((Term(t.coeff, tuple(out)),)))
    return _absorb_metrics(new, props) if hit or any(_is_gamma(f, props) for f in fs) else new


def _absorb_metrics(s: Sum, props) -> Sum:
    """Contract the gamma metric into other bare factors of each term."""
    def eliminable(f):
        return (isinstance(f, Tensor) and len(f.indices) == 2
                and f.head in _gamma_metrics(props))

    terms = []
    for t in s.terms:
        while True:
            new = _contract_step(t, eliminable, props)
            if new is None:
                break
            t = new
        terms.append(t)
    return Sum(tuple(terms))


def _gamma_metrics(props) -> set:
    return {v for k, kinds in props.props.items() for kind, v in kinds.items()
            if kind == "GammaMatrix" and v}


def join(e, props, expand: bool = True, repeat: bool = False) -> Sum:
    """Join adjacent gamma pairs; ``repeat`` iterates to a fixpoint."""
    once = lambda x: map_terms(normalize(x), lambda t: _join_term(t, props, expand))
    return fixpoint(once, e) if repeat else once(e)


def spinor_dimension(n: int) -> int:
    if n < 1:
        raise ValueError("vector-space dimension must be at least 1")
    return 2 ** (n // 2) if n % 2 == 0 else 2 ** ((n - 1) // 2)
