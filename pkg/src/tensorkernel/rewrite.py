"""Rewrite algorithms over expressions, parameterised by a property table."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable

from .errors import PatternArityMismatch
from .expr import (Derivative, Sum, Tensor, Term, all_names, as_sum,
                   collect, free_indices, is_atomic, map_indices,
                   map_terms, normalize, rename, term_dummies, validate)

FIXPOINT_LIMIT = 100


@dataclass(frozen=True)
class Rule:
    lhs: Tensor
    rhs: Sum

    def __str__(self):
        from .printing import print_rule
        return print_rule(self.lhs, self.rhs)


def fixpoint(fn: Callable[[Sum], Sum], e: Sum, limit: int = FIXPOINT_LIMIT) -> Sum:
    for _ in range(limit):
        new = fn(e)
        if new == e:
            return new
        e = new
    return e


# ------------------------------------------------------------ distribute

def distribute(e) -> Sum:
    """Multiply out every product of brackets."""
    return map_terms(normalize(e), _distribute_term)


def _distribute_term(t: Term) -> Sum:
    options = []
    for f in t.factors:
        if isinstance(f, Sum):
            options.append([(s.coeff, s.factors) for s in f.terms])
        else:
            options.append([(Fraction(1), (f,))])
    out = []
    for combo in product(*options):
        c = t.coeff
        factors = ()
        for k, fs in combo:
            c *= k
            factors += fs
        out.append(Term(c, factors))
    return Sum(tuple(out))


# ------------------------------------------------------------ prodsort

def _sort_key(f, props):
    if isinstance(f, Tensor):
        return (props.head_rank(f.head), tuple(i.up for i in f.indices),
                tuple(props.name_rank(i.name) for i in f.indices))
    if isinstance(f, Derivative):
        return (props.head_rank(f.head), tuple(i.up for i in f.indices),
                tuple(props.name_rank(i.name) for i in f.indices))
    return None


def _head(f):
    return f.head if isinstance(f, (Tensor, Derivative)) else None


def prodsort(e, props) -> Sum:
    """Sort factors into canonical head order where commutation allows it.

    Swapping two anticommuting objects flips the sign; noncommuting pairs
    (same gamma head, brackets) are never exchanged.
    """
    def sort_term(t: Term) -> Sum:
        fs = list(t.factors)
        sign = 1
        changed = True
        while changed:
            changed = False
            for i in range(len(fs) - 1):
                a, b = fs[i], fs[i + 1]
                if not (is_atomic(a) and is_atomic(b)):
                    continue
                rel = props.commutation(_head(a), _head(b))
                if rel == 0 or not _sort_key(b, props) < _sort_key(a, props):
                    continue
                fs[i], fs[i + 1] = b, a
                sign *= rel
                changed = True
        return Sum((Term(t.coeff * sign, tuple(fs)),))

    return map_terms(normalize(e), sort_term)


# ------------------------------------------------------------ substitute

def make_rule(lhs, rhs) -> Rule:
    lhs_sum = as_sum(lhs)
    if not (len(lhs_sum.terms) == 1 and len(lhs_sum.terms[0].factors) == 1
            and isinstance(lhs_sum.terms[0].factors[0], Tensor)
            and lhs_sum.terms[0].coeff == 1):
        raise PatternArityMismatch("rule left-hand side must be a single tensor")
    pattern = lhs_sum.terms[0].factors[0]
    names = [i.name for i in pattern.indices]
    if len(set(names)) != len(names):
        raise PatternArityMismatch("rule pattern indices must be distinct")
    rhs = validate(normalize(rhs))
    if rhs.terms and set(free_indices(rhs)) != set(pattern.indices):
        raise PatternArityMismatch(
            f"rule sides have different free indices: {pattern.indices} vs {free_indices(rhs)}")
    return Rule(pattern, rhs)


def _match(pattern: Tensor, f) -> dict:
    if not isinstance(f, Tensor) or f.head != pattern.head:
        return None
    if len(f.indices) != len(pattern.indices):
        return None
    mapping = {}
    for p, i in zip(pattern.indices, f.indices):
        if p.up != i.up:
            return None
        mapping[p.name] = i.name
    return mapping


def substitute(e, rule: Rule, props=None) -> Sum:
    """Replace every factor matching ``rule.lhs`` (one pass)."""
    return normalize(_subst_sum(normalize(e), rule, props, set()))


def _subst_sum(s: Sum, rule, props, outer) -> Sum:
    return Sum(tuple(_subst_term(t, rule, props, outer) for t in s.terms))


def _subst_term(t: Term, rule, props, outer) -> Term:
    used = set(outer) | all_names(t)
    factors = []
    for f in t.factors:
        mapping = _match(rule.lhs, f)
        if mapping is not None:
            factors.append(_instantiate(rule, mapping, used, props))
            used |= all_names(factors[-1])
        elif isinstance(f, Sum):
            factors.append(_subst_sum(f, rule, props, used))
        elif isinstance(f, Derivative):
            factors.append(Derivative(f.head, f.indices,
                                      _subst_sum(f.arg, rule, props, used)))
        else:
            factors.append(f)
    return Term(t.coeff, tuple(factors))


def _instantiate(rule: Rule, mapping: dict, used: set, props) -> Sum:
    pattern_names = {i.name for i in rule.lhs.indices}
    taken = set(used) | set(mapping.values())
    out = []
    for t in rule.rhs.terms:
        fresh = {}
        for d in term_dummies(t):
            if d in pattern_names:
                continue
            if d in taken or d in fresh.values():
                from .expr import fresh_name
                new = fresh_name(props, d, taken | set(fresh.values()) | all_names(t))
                fresh[d] = new
        t = rename(t, fresh)
        out.append(rename(t, mapping))
    return Sum(tuple(out))


# ------------------------------------------------------------ metric / delta

def _contract_step(t: Term, is_eliminable, props) -> Term:
    """Eliminate one metric-like factor by renaming its contraction partner.

    Returns ``None`` when no factor can be eliminated.
    """
    fs = list(t.factors)
    for k, f in enumerate(fs):
        if not is_eliminable(f):
            continue
        for slot in (0, 1):
            mine, other = f.indices[slot], f.indices[1 - slot]
            if mine.name == other.name:
                continue
            partner = mine.flipped()
            for j, g in enumerate(fs):
                if j == k or not is_atomic(g):
                    continue
                if partner in _atomic_indices(g):
                    fs[j] = map_indices(g, lambda i: other if i == partner else i)
                    del fs[k]
                    return Term(t.coeff, tuple(fs))
    return None


def _atomic_indices(g):
    from .expr import iter_indices
    return set(iter_indices(g))


def eliminate_metric(e, props, repeat: bool = False) -> Sum:
    """Contract bare metric factors into their partners (raise/lower)."""
    def step(t: Term) -> Sum:
        budget = len(t.factors) if repeat else sum(1 for f in t.factors if props.is_metric_factor(f))
        for _ in range(budget):
            new = _contract_step(t, props.is_metric_factor, props)
            if new is None:
                break
            t = new
        return Sum((t,))

    once = lambda x: map_terms(normalize(x), step)
    return fixpoint(once, e) if repeat else once(e)


def eliminate_kr(e, props, repeat: bool = False) -> Sum:
    """Contract Kronecker deltas; traces become the index-set dimension."""
    def step(t: Term) -> Sum:
        while True:
            new = _contract_step(t, props.is_kronecker, props)
            if new is None:
                break
            t = new
        coeff, factors = t.coeff, []
        for f in t.factors:
            if props.is_kronecker(f) and f.indices[0].name == f.indices[1].name:
                dim = props.dimension_of(f.indices[0].name)
                if dim is not None:
                    coeff *= dim
                    continue
            factors.append(f)
        return Sum((Term(coeff, tuple(factors)),))

    once = lambda x: map_terms(normalize(x), step)
    return fixpoint(once, e) if repeat else once(e)


# ------------------------------------------------------------ collect

def collect_terms(e) -> Sum:
    """Merge like terms at every bracket level; empty sums print as 0."""
    def rec(s: Sum) -> Sum:
        terms = []
        for t in s.terms:
            fs = []
            for f in t.factors:
                if isinstance(f, Sum):
                    fs.append(rec(f))
                elif isinstance(f, Derivative):
                    fs.append(Derivative(f.head, f.indices, rec(f.arg)))
                else:
                    fs.append(f)
            terms.append(Term(t.coeff, tuple(fs)))
        return collect(normalize(Sum(tuple(terms))))

    return rec(normalize(e))


# ------------------------------------------------------------ post rules

def apply_post_rules(e, props, max_orbit: int = 10 ** 6) -> Sum:
    """Run the PostDefaultRules pipeline declared in ``props``."""
    from .algorithms import apply_post_rules as _apply
    return _apply(normalize(e), props, max_orbit)
