"""Immutable tensor-expression tree.

Every expression is a :class:`Sum` of :class:`Term` objects.  A term is an
exact rational coefficient times an ordered tuple of factors; a factor is a
:class:`Tensor`, a :class:`Derivative` wrapping a sub-expression, or a
parenthesised :class:`Sum`.  Nested sums survive until ``distribute`` is
run, which is what lets transcripts show intermediate bracketed forms.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator, Optional, Union

from .errors import FreeIndexMismatch, NoContractibleSlots, RepeatedIndex


@dataclass(frozen=True, order=True)
class Index:
    name: str
    up: bool

    def flipped(self) -> "Index":
        return Index(self.name, not self.up)

    def __repr__(self):
        return ("^" if self.up else "_") + self.name


@dataclass(frozen=True)
class Tensor:
    head: str
    indices: tuple = ()

    def __str__(self):
        from .printing import print_plain
        return print_plain(self)


@dataclass(frozen=True)
class Derivative:
    head: str
    indices: tuple
    arg: "Sum"

    def __str__(self):
        from .printing import print_plain
        return print_plain(self)


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    factors: tuple = ()

    def __str__(self):
        from .printing import print_plain
        return print_plain(self)


@dataclass(frozen=True)
class Sum:
    terms: tuple = ()

    def __str__(self):
        from .printing import print_plain
        return print_plain(self)

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms


Factor = Union[Tensor, Derivative, Sum]
Node = Union[Tensor, Derivative, Sum, Term]
Expr = Sum

ZERO = Sum(())


def const(value) -> Sum:
    value = Fraction(value)
    if value == 0:
        return ZERO
    return Sum((Term(value, ()),))


ONE = const(1)


def as_sum(node) -> Sum:
    if isinstance(node, Sum):
        return node
    if isinstance(node, Term):
        return Sum((node,))
    if isinstance(node, (Tensor, Derivative)):
        return Sum((Term(Fraction(1), (node,)),))
    return const(node)


def scale(e: Sum, c) -> Sum:
    c = Fraction(c)
    if c == 0:
        return ZERO
    return Sum(tuple(Term(t.coeff * c, t.factors) for t in e.terms))


# ---------------------------------------------------------------- traversal

def iter_indices(node) -> Iterator[Index]:
    """Every index occurrence in ``node``, depth first, in print order."""
    if isinstance(node, Tensor):
        yield from node.indices
    elif isinstance(node, Derivative):
        yield from node.indices
        yield from iter_indices(node.arg)
    elif isinstance(node, Term):
        for f in node.factors:
            yield from iter_indices(f)
    elif isinstance(node, Sum):
        for t in node.terms:
            yield from iter_indices(t)


def all_names(node) -> set:
    return {i.name for i in iter_indices(node)}


def factor_free(f) -> tuple:
    """Free indices contributed by one factor, in first-occurrence order."""
    if isinstance(f, Tensor):
        return _free_of(f.indices)
    if isinstance(f, Derivative):
        return _free_of(tuple(f.indices) + free_indices(f.arg))
    if isinstance(f, Sum):
        return free_indices(f)
    raise TypeError(f)


def term_open_indices(t: Term) -> list:
    """Indices visible at the level of the term (nested dummies excluded)."""
    out = []
    for f in t.factors:
        if isinstance(f, Tensor):
            out.extend(f.indices)
        elif isinstance(f, Derivative):
            out.extend(f.indices)
            out.extend(free_indices(f.arg))
        else:
            out.extend(factor_free(f))
    return out


def _free_of(indices: Iterable[Index]) -> tuple:
    indices = list(indices)
    counts = Counter(i.name for i in indices)
    return tuple(i for i in indices if counts[i.name] == 1)


def term_free(t: Term) -> tuple:
    return _free_of(term_open_indices(t))


def term_dummies(t: Term) -> list:
    """Names contracted at the level of ``t`` (first-occurrence order)."""
    counts = Counter(i.name for i in term_open_indices(t))
    seen = []
    for i in term_open_indices(t):
        if counts[i.name] == 2 and i.name not in seen:
            seen.append(i.name)
    return seen


def free_indices(e) -> tuple:
    """Free indices of an expression, in first-occurrence order of its first term."""
    e = as_sum(e)
    if not e.terms:
        return ()
    return term_free(e.terms[0])


def free_set(e) -> frozenset:
    return frozenset(free_indices(e))


# ---------------------------------------------------------------- validation

def validate_term(t: Term) -> None:
    idx = term_open_indices(t)
    by_name = {}
    for i in idx:
        by_name.setdefault(i.name, []).append(i)
    for name, occ in by_name.items():
        if len(occ) > 2:
            raise RepeatedIndex(f"index {name} appears {len(occ)} times in one term")
        if len(occ) == 2 and occ[0].up == occ[1].up:
            pos = "upper" if occ[0].up else "lower"
            raise RepeatedIndex(f"index {name} repeated in the same ({pos}) position")
    for f in t.factors:
        if isinstance(f, Sum):
            validate(f)
        elif isinstance(f, Derivative):
            validate(f.arg)


def validate(e: Sum) -> Sum:
    """Check index placement in every term and free-index agreement of sums."""
    reference = None
    for t in e.terms:
        validate_term(t)
        fs = frozenset(term_free(t))
        if reference is None:
            reference = fs
        elif fs != reference:
            raise FreeIndexMismatch(
                f"free indices {_fmt(fs)} do not match {_fmt(reference)}")
    return e


def _fmt(indices) -> str:
    return "{" + ", ".join(sorted(repr(i) for i in indices)) + "}"


# ---------------------------------------------------------------- normal form

def normalize(e) -> Sum:
    """Flatten single-term brackets, fold coefficients and drop zero terms.

    Like terms are *not* merged here; that is ``collect_terms``' job.
    """
    e = as_sum(e)
    out = []
    for t in e.terms:
        out.extend(_normalize_term(t))
    return Sum(tuple(out))


def _normalize_term(t: Term) -> list:
    if t.coeff == 0:
        return []
    coeff = Fraction(t.coeff)
    factors = []
    for f in t.factors:
        if isinstance(f, Derivative):
            f = Derivative(f.head, tuple(f.indices), normalize(f.arg))
            factors.append(f)
        elif isinstance(f, Sum):
            f = normalize(f)
            if not f.terms:
                return []
            if len(f.terms) == 1:
                inner = f.terms[0]
                coeff *= inner.coeff
                factors.extend(inner.factors)
            else:
                factors.append(f)
        else:
            factors.append(f)
    if len(factors) == 1 and isinstance(factors[0], Sum):
        return [Term(coeff * s.coeff, s.factors) for s in factors[0].terms]
    return [Term(coeff, tuple(factors))]


def collect(e: Sum) -> Sum:
    """Merge terms with identical factor tuples, keeping first-occurrence order."""
    order = []
    coeffs = {}
    for t in e.terms:
        key = t.factors
        if key not in coeffs:
            order.append(key)
            coeffs[key] = Fraction(0)
        coeffs[key] += t.coeff
    return Sum(tuple(Term(coeffs[k], k) for k in order if coeffs[k] != 0))


# ---------------------------------------------------------------- renaming

def map_indices(node, fn: Callable[[Index], Index]):
    """Rebuild ``node`` with every index occurrence passed through ``fn``."""
    if isinstance(node, Tensor):
        return Tensor(node.head, tuple(fn(i) for i in node.indices))
    if isinstance(node, Derivative):
        return Derivative(node.head, tuple(fn(i) for i in node.indices),
                          map_indices(node.arg, fn))
    if isinstance(node, Term):
        return Term(node.coeff, tuple(map_indices(f, fn) for f in node.factors))
    if isinstance(node, Sum):
        return Sum(tuple(map_indices(t, fn) for t in node.terms))
    raise TypeError(node)


def rename(node, mapping: dict):
    """Rename index names (variance untouched) by ``mapping``."""
    if not mapping:
        return node
    return map_indices(node, lambda i: Index(mapping.get(i.name, i.name), i.up))


def replace_index(node, old: Index, new: Index):
    """Replace occurrences of exactly ``old`` (name and variance) by ``new``."""
    return map_indices(node, lambda i: new if i == old else i)


def _default_fresh(like: str, exclude: set) -> str:
    for c in "abcdefghijklmnopqrstuvwxyz":
        if c not in exclude:
            return c
    n = 1
    while f"n{n}" in exclude:
        n += 1
    return f"n{n}"


def fresh_name(props, like: str, exclude: set) -> str:
    if props is None:
        return _default_fresh(like, exclude)
    return props.fresh_name(like, exclude)


def freshen_dummies(t: Term, avoid: set, props=None) -> Term:
    """Rename dummies of ``t`` that clash with ``avoid``."""
    mapping = {}
    used = set(avoid) | all_names(t)
    for d in term_dummies(t):
        if d in avoid:
            new = fresh_name(props, d, used)
            used.add(new)
            mapping[d] = new
    return rename(t, mapping)


# ---------------------------------------------------------------- algebra

def add(a, b) -> Sum:
    """Sum of two expressions with like terms merged."""
    a, b = as_sum(a), as_sum(b)
    if a.terms and b.terms and free_set(a) != free_set(b):
        raise FreeIndexMismatch(
            f"cannot add expressions with free indices {_fmt(free_set(a))} "
            f"and {_fmt(free_set(b))}")
    return collect(normalize(Sum(a.terms + b.terms)))


def tensor_product(a, b, props=None) -> Sum:
    """Distributed product of ``a`` and ``b`` with dummy clashes resolved.

    Dummies of the right operand that collide with names of the left one are
    renamed to the first unused names of their index set; left dummies that
    collide with right free indices are renamed likewise.
    """
    a, b = normalize(a), normalize(b)
    terms = []
    for ta, tb in product(a.terms, b.terms):
        tb = freshen_dummies(tb, all_names(ta), props)
        ta = freshen_dummies(ta, {i.name for i in term_free(tb)} | all_names(tb), props)
        t = Term(ta.coeff * tb.coeff, ta.factors + tb.factors)
        validate_term(t)
        terms.append(t)
    from .rewrite import distribute
    return collect(distribute(Sum(tuple(terms))))


def contract_last(e, props=None) -> Sum:
    """Identify the last free upper and last free lower slot as a dummy pair.

    The slots are chosen on the first monomial; every monomial then has the
    same two names contracted, so the result is again a valid sum.
    """
    e = normalize(e)
    if not e.terms:
        return e
    free = term_free(e.terms[0])
    uppers = [i for i in free if i.up]
    lowers = [i for i in free if not i.up]
    if not uppers or not lowers:
        raise NoContractibleSlots("need at least one free upper and one free lower index")
    up, low = uppers[-1], lowers[-1]
    used = set().union(*(all_names(t) for t in e.terms))
    name = fresh_name(props, low.name, used)
    out = []
    for t in e.terms:
        t = replace_index(t, up, Index(name, True))
        t = replace_index(t, low, Index(name, False))
        out.append(t)
    return validate(Sum(tuple(out)))


def valence(t: Term) -> tuple:
    """(number of upper, number of lower) free slots of a monomial."""
    free = term_free(t)
    return sum(i.up for i in free), sum(not i.up for i in free)


def map_terms(e: Sum, fn: Callable[[Term], Sum], deep: bool = True) -> Sum:
    """Apply ``fn`` bottom-up to every term, including those inside brackets
    and derivative arguments, and renormalise."""
    out = []
    for t in e.terms:
        if deep:
            t = Term(t.coeff, tuple(_map_factor(f, fn) for f in t.factors))
        out.extend(fn(t).terms)
    return normalize(Sum(tuple(out)))


def _map_factor(f, fn):
    if isinstance(f, Sum):
        return map_terms(f, fn)
    if isinstance(f, Derivative):
        return Derivative(f.head, f.indices, map_terms(f.arg, fn))
    return f


def is_atomic(f) -> bool:
    return isinstance(f, (Tensor, Derivative))


def single_tensor(e: Sum) -> Optional[Tensor]:
    """The bare tensor if ``e`` is exactly one tensor with coefficient 1."""
    if (len(e.terms) == 1 and e.terms[0].coeff == 1
            and len(e.terms[0].factors) == 1
            and isinstance(e.terms[0].factors[0], Tensor)):
        return e.terms[0].factors[0]
    return None
