"""Slot-permutation symmetries: tableaux, monoterm canonicalisation and
Young projection.

Permutations act on slot lists: ``apply(p, slots)[i] == slots[p.perm[i]]``.
A symmetry element ``(p, s)`` of a tensor states ``T[apply(p, x)] == s * T[x]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Optional

from .errors import NoSymmetry, OrbitTooLarge
from .expr import (Derivative, Index, Sum, Tensor, Term, ZERO, all_names,
                   factor_free, normalize, single_tensor)


@dataclass(frozen=True)
class SignedPermutation:
    perm: tuple
    sign: int = 1

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(tuple(range(n)), 1)

    def __len__(self):
        return len(self.perm)

    def __mul__(self, other: "SignedPermutation") -> "SignedPermutation":
        # apply(p * q, x) == apply(p, apply(q, x))
        return SignedPermutation(tuple(other.perm[i] for i in self.perm),
                                 self.sign * other.sign)

    def inverse(self) -> "SignedPermutation":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return SignedPermutation(tuple(inv), self.sign)

    def apply(self, seq):
        return type(seq)(seq[i] for i in self.perm) if isinstance(seq, tuple) \
            else [seq[i] for i in self.perm]

    def shifted(self, offset: int, total: int) -> "SignedPermutation":
        """Embed into a longer slot list starting at ``offset``."""
        perm = list(range(total))
        for i, p in enumerate(self.perm):
            perm[offset + i] = offset + p
        return SignedPermutation(tuple(perm), self.sign)


def perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def transposition(n: int, i: int, j: int, sign: int) -> SignedPermutation:
    perm = list(range(n))
    perm[i], perm[j] = perm[j], perm[i]
    return SignedPermutation(tuple(perm), sign)


def close_group(gens: Iterable[SignedPermutation], n: int) -> dict:
    """All elements generated by ``gens`` as ``{perm: sign}``.

    A permutation reachable with both signs is stored with sign 0; such a
    group forces any tensor carrying it to vanish.
    """
    ident = tuple(range(n))
    gens = list(gens)
    elements = {ident: 1}
    frontier = [SignedPermutation(ident, 1)]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = h * g
                old = elements.get(k.perm)
                if old is None:
                    elements[k.perm] = k.sign
                    nxt.append(k)
                elif old != k.sign and old != 0:
                    elements[k.perm] = 0
                    nxt.append(SignedPermutation(k.perm, 0))
        frontier = nxt
    return elements


@dataclass(frozen=True)
class Tableau:
    """Young diagram with slot numbers filled in row by row."""

    shape: tuple
    slot_order: tuple

    def __post_init__(self):
        shape = tuple(self.shape)
        if any(a < b for a, b in zip(shape, shape[1:])) or any(r <= 0 for r in shape):
            raise ValueError(f"tableau shape {shape} is not a partition")
        if sorted(self.slot_order) != list(range(sum(shape))):
            raise ValueError(f"slot order {self.slot_order} is not a permutation "
                             f"of 0..{sum(shape) - 1}")

    @property
    def size(self) -> int:
        return sum(self.shape)

    @property
    def rows(self) -> list:
        out, k = [], 0
        for length in self.shape:
            out.append(list(self.slot_order[k:k + length]))
            k += length
        return out

    @property
    def columns(self) -> list:
        rows = self.rows
        return [[r[j] for r in rows if len(r) > j] for j in range(self.shape[0])]

    def generators(self) -> list:
        """Column antisymmetries plus exchanges of equal-length columns."""
        n, gens = self.size, []
        cols = self.columns
        for col in cols:
            for a, b in zip(col, col[1:]):
                gens.append(transposition(n, a, b, -1))
        for c1, c2 in zip(cols, cols[1:]):
            if len(c1) == len(c2) and len(c1) > 0:
                perm = list(range(n))
                for a, b in zip(c1, c2):
                    perm[a], perm[b] = b, a
                gens.append(SignedPermutation(tuple(perm), 1))
        return gens

    def hook_lengths(self) -> list:
        conj = [sum(1 for r in self.shape if r > j) for j in range(self.shape[0])]
        return [[self.shape[i] - j + conj[j] - i - 1 for j in range(self.shape[i])]
                for i in range(len(self.shape))]

    def num_standard(self) -> int:
        """Number of standard tableaux of this shape (hook-length formula)."""
        return math.factorial(self.size) // math.prod(h for row in self.hook_lengths() for h in row)

    def projector(self) -> dict:
        """Idempotent Young projector as ``{perm: coefficient}``.

        Rows are symmetrised first, columns antisymmetrised last, so images
        are antisymmetric in every column.
        """
        n = self.size
        row_group = _subgroup(self.rows, n, antisym=False)
        col_group = _subgroup(self.columns, n, antisym=True)
        norm = Fraction(self.num_standard(), math.factorial(n))
        out = {}
        for q in col_group:
            for p in row_group:
                pi = p * q
                out[pi.perm] = out.get(pi.perm, Fraction(0)) + norm * q.sign
        return {k: v for k, v in out.items() if v != 0}


def _subgroup(blocks, n, antisym) -> list:
    """Direct product of full symmetric groups on each block."""
    per_block = []
    for block in blocks:
        options = []
        for image in permutations(block):
            perm = list(range(n))
            for src, dst in zip(block, image):
                perm[src] = dst
            sign = perm_sign(tuple(perm)) if antisym else 1
            options.append(SignedPermutation(tuple(perm), sign))
        per_block.append(options)
    out = []
    for combo in product(*per_block):
        g = SignedPermutation.identity(n)
        for h in combo:
            g = h * g
        out.append(g)
    return out


def algebra_product(x: dict, y: dict) -> dict:
    """Operator product ``x(y(T))`` of two projector-like group-algebra elements."""
    out = {}
    for p1, c1 in x.items():
        for p2, c2 in y.items():
            k = (SignedPermutation(p2) * SignedPermutation(p1)).perm
            out[k] = out.get(k, Fraction(0)) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


RIEMANN_TABLEAU = Tableau((2, 2), (0, 2, 1, 3))
BIANCHI_TABLEAU = Tableau((3, 2), (1, 3, 0, 2, 4))


# ------------------------------------------------------------ slot bookkeeping

class _Slots:
    """Permutable factors of a term with their symmetry groups."""

    def __init__(self, term: Term, props, reserved: frozenset):
        self.term = term
        self.props = props
        self.blocks = []      # (factor position, local slots, group dict)
        fixed_names = set(reserved)
        for pos, f in enumerate(term.factors):
            slots = _permutable_slots(f)
            if slots is None:
                fixed_names |= all_names(f)
                continue
            self.blocks.append((pos, slots, props.slot_group(f)))
        flat = [i for _, s, _ in self.blocks for i in s]
        counts = {}
        for i in flat:
            counts[i.name] = counts.get(i.name, 0) + 1
        self.dummies = [n for n in dict.fromkeys(i.name for i in flat)
                        if counts[n] == 2 and n not in fixed_names]
        self.fixed = fixed_names | {i.name for i in flat if i.name not in self.dummies}
        self.swappable = [d for d in self.dummies if props.pair_swappable(d)]

    def size(self) -> int:
        n = 2 ** len(self.swappable)
        for _, _, g in self.blocks:
            n *= len(g)
        return n

    def pools(self) -> dict:
        """Candidate dummy names per index set, best first."""
        need = len(self.dummies)
        out = {}
        for d in self.dummies:
            key = self.props.set_key(d)
            if key not in out:
                out[key] = self.props.candidate_names(d, self.fixed, need)
        return out

    def rebuild(self, new_slots: list):
        factors = list(self.term.factors)
        for (pos, _, _), slots in zip(self.blocks, new_slots):
            factors[pos] = _with_slots(factors[pos], slots)
        return tuple(factors)


def _permutable_slots(f) -> Optional[tuple]:
    if isinstance(f, Tensor):
        return tuple(f.indices)
    if isinstance(f, Derivative):
        inner = single_tensor(f.arg)
        if inner is not None:
            return tuple(f.indices) + tuple(inner.indices)
    return None


def _with_slots(f, slots):
    if isinstance(f, Tensor):
        return Tensor(f.head, tuple(slots))
    inner = single_tensor(f.arg)
    k = len(f.indices)
    return Derivative(f.head, tuple(slots[:k]),
                      Sum((Term(Fraction(1), (Tensor(inner.head, tuple(slots[k:])),)),)))


def _greedy_rename(flat, dummies, pools, props):
    """Assign dummies the smallest free pool names in first-appearance order."""
    mapping, taken = {}, {}
    for i in flat:
        if i.name in dummies and i.name not in mapping:
            key = props.set_key(i.name)
            k = taken.get(key, 0)
            mapping[i.name] = pools[key][k]
            taken[key] = k + 1
    return mapping


def _key(flat, props):
    # upper before lower, so a contracted pair keeps its first index raised
    return tuple((props.name_rank(i.name), not i.up) for i in flat)


# ------------------------------------------------------------ canonicalise

def canonicalise(e, props, max_orbit: int = 10 ** 6) -> Sum:
    """Bring every monomial to its minimal representative under slot
    symmetries and dummy relabelling; self-negating monomials become 0."""
    return normalize(_canon_sum(normalize(e), props, frozenset(), max_orbit))


def _canon_sum(s: Sum, props, reserved, max_orbit) -> Sum:
    out = []
    for t in s.terms:
        out.extend(canonicalise_term(t, props, reserved, max_orbit).terms)
    return Sum(tuple(out))


def _outside_names(t: Term, skip: int) -> set:
    names = set()
    for k, f in enumerate(t.factors):
        if k != skip:
            names |= all_names(f)
    return names


def canonicalise_term(t: Term, props, reserved=frozenset(), max_orbit=10 ** 6) -> Sum:
    factors = list(t.factors)
    for k, f in enumerate(factors):
        if isinstance(f, Sum):
            inner_res = frozenset(reserved | _outside_names(t, k)
                                  | {i.name for i in factor_free(f)})
            factors[k] = _canon_sum(f, props, inner_res, max_orbit)
        elif isinstance(f, Derivative) and single_tensor(f.arg) is None:
            inner_res = frozenset(reserved | _outside_names(t, k) | {i.name for i in f.indices})
            factors[k] = Derivative(f.head, f.indices,
                                    _canon_sum(f.arg, props, inner_res, max_orbit))
    t = Term(t.coeff, tuple(factors))
    flat = normalize(Sum((t,)))
    if flat.terms != (t,):
        # a bracket collapsed to one term; its slots now join the outer term
        return _canon_sum(flat, props, reserved, max_orbit)
    slots = _Slots(t, props, frozenset(reserved))
    if not slots.blocks:
        return Sum((t,))
    if slots.size() > max_orbit:
        raise OrbitTooLarge(f"orbit of {slots.size()} elements exceeds limit {max_orbit}")
    pools = slots.pools()
    dummies = set(slots.dummies)
    groups = [list(g.items()) for _, _, g in slots.blocks]
    best_key, best_slots, signs = None, None, set()
    for choice in product(*groups):
        sign = 1
        permuted = []
        for (perm, s), (_, local, _) in zip(choice, slots.blocks):
            sign *= s
            permuted.append([local[i] for i in perm])
        for mask in range(2 ** len(slots.swappable)):
            flip = {d for b, d in enumerate(slots.swappable) if mask >> b & 1}
            blocks = [[Index(i.name, not i.up) if i.name in flip else i for i in blk]
                      for blk in permuted]
            flat = [i for blk in blocks for i in blk]
            mapping = _greedy_rename(flat, dummies, pools, props)
            renamed = [[Index(mapping.get(i.name, i.name), i.up) for i in blk] for blk in blocks]
            key = _key([i for blk in renamed for i in blk], props)
            if best_key is None or key < best_key:
                best_key, best_slots, signs = key, renamed, {sign}
            elif key == best_key:
                signs.add(sign)
    if len(signs) > 1 or 0 in signs:
        return ZERO
    (sign,) = signs
    return Sum((Term(t.coeff * sign, slots.rebuild(best_slots)),))


def orbit_oracle(term: Term, props, max_slots: int = 8) -> Sum:
    """Brute-force canonical form: every group element, every variance swap
    of contracted pairs and every relabelling of dummies is enumerated."""
    from .errors import OrbitTooLarge as _Too
    slots = _Slots(term, props, frozenset())
    total = sum(len(s) for _, s, _ in slots.blocks)
    if total > max_slots:
        raise _Too(f"{total} slots exceed the oracle limit of {max_slots}")
    if not slots.blocks:
        return Sum((term,))
    groups = []
    for (_, local, _), f in zip(slots.blocks, [term.factors[p] for p, _, _ in slots.blocks]):
        groups.append(_naive_closure(props.slot_generators(f), len(local)))
    dummies = slots.dummies
    targets = []
    for d in dummies:
        key = props.set_key(d)
        if key not in [k for k, _ in targets]:
            targets.append((key, props.candidate_names(d, slots.fixed, len(dummies))))
    by_set = {}
    for d in dummies:
        by_set.setdefault(props.set_key(d), []).append(d)
    relabelings = [{}]
    for key, names in targets:
        ds = by_set[key]
        new = []
        for base in relabelings:
            for image in permutations(names[:len(ds)]):
                m = dict(base)
                m.update(zip(ds, image))
                new.append(m)
        relabelings = new
    best, best_slots, signs = None, None, set()
    for choice in product(*groups):
        sign, permuted = 1, []
        for (perm, s), (_, local, _) in zip(choice, slots.blocks):
            sign *= s
            permuted.append([local[i] for i in perm])
        for flips in product((False, True), repeat=len(dummies)):
            if any(fl and not props.pair_swappable(d) for d, fl in zip(dummies, flips)):
                continue
            flip = {d for d, fl in zip(dummies, flips) if fl}
            for m in relabelings:
                blocks = [[Index(m.get(i.name, i.name), (not i.up) if i.name in flip else i.up)
                           for i in blk] for blk in permuted]
                key = _key([i for blk in blocks for i in blk], props)
                if best is None or key < best:
                    best, best_slots, signs = key, blocks, {sign}
                elif key == best:
                    signs.add(sign)
    if len(signs) > 1 or 0 in signs:
        return ZERO
    return Sum((Term(term.coeff * signs.pop(), slots.rebuild(best_slots)),))


def _naive_closure(gens, n) -> list:
    elems = {tuple(range(n)): {1}}
    changed = True
    while changed:
        changed = False
        for p, ss in list(elems.items()):
            for g in gens:
                for s in list(ss):
                    k = g * SignedPermutation(p, s)
                    bucket = elems.setdefault(k.perm, set())
                    if k.sign not in bucket:
                        bucket.add(k.sign)
                        changed = True
    out = []
    for p, ss in elems.items():
        out.append((p, 0 if len(ss) > 1 else next(iter(ss))))
    return out


# ------------------------------------------------------------ young projection

def young_project(e, props, head: Optional[str] = None, max_orbit: int = 10 ** 6) -> Sum:
    """Replace tableau-carrying factors by their Young projections.

    The expansion is reduced modulo monoterm symmetries (each produced term is
    canonicalised) but like terms are not collected.
    """
    e = normalize(e)
    out = []
    for t in e.terms:
        expanded = _project_term(t, props, head)
        if expanded is None:
            out.append(t)
            continue
        for u in expanded:
            out.extend(canonicalise_term(u, props, frozenset(), max_orbit).terms)
    return normalize(Sum(tuple(out)))


def _project_term(t: Term, props, head):
    hit = False
    partial = [Term(t.coeff, ())]
    for f in t.factors:
        tab = props.tableau_of(f) if _permutable_slots(f) is not None else None
        if tab is not None and head is not None and _factor_head(f) != head:
            tab = None
        if tab is None:
            partial = [Term(p.coeff, p.factors + (f,)) for p in partial]
            continue
        hit = True
        slots = _permutable_slots(f)
        images = []
        for perm, c in tab.projector().items():
            images.append((c, _with_slots(f, [slots[i] for i in perm])))
        partial = [Term(p.coeff * c, p.factors + (g,)) for p in partial for c, g in images]
    return partial if hit else None


def _factor_head(f) -> str:
    if isinstance(f, Tensor):
        return f.head
    inner = single_tensor(f.arg)
    return inner.head if inner is not None else f.head


def require_tableau(props, head: str) -> Tableau:
    tab = props.tableau_for_head(head)
    if tab is None:
        raise NoSymmetry(f"{head} carries no tableau symmetry")
    return tab
