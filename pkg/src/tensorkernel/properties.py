"""Session registry of index sets and declared tensor properties."""
from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from typing import Optional

from .errors import (ArityMismatch, ConflictingProperty, NoSymmetry,
                     ParseError, UnknownProperty)
from .expr import Derivative, Tensor, single_tensor
from .symmetry import (BIANCHI_TABLEAU, RIEMANN_TABLEAU,
                       Tableau, close_group, transposition)

KNOWN = {
    "Indices", "Integer", "Metric", "KroneckerDelta", "PartialDerivative",
    "Derivative", "GammaMatrix", "Commuting", "AntiCommuting",
    "SelfNonCommuting", "TableauSymmetry", "RiemannTensor",
    "SatisfiesBianchi", "PostDefaultRules",
}

IMPLICIT_NAMES = list(string.ascii_lowercase) + list(string.ascii_uppercase)


@dataclass
class IndexSet:
    names: list
    label: Optional[str] = None
    family: Optional[str] = None
    dimension: Optional[int] = None
    bounds: Optional[tuple] = None      # (lo, hi) of an Integer declaration

    def __contains__(self, name: str) -> bool:
        if name in self.names:
            return True
        return self.family is not None and re.fullmatch(
            re.escape(self.family) + r"[0-9]+", name) is not None

    def position(self, name: str) -> int:
        if name in self.names:
            return self.names.index(name)
        return len(self.names) + int(name[len(self.family):])

    def candidates(self):
        yield from self.names
        if self.family is not None:
            k = 1
            while True:
                yield f"{self.family}{k}"
                k += 1


@dataclass(frozen=True)
class Pattern:
    """Left-hand side of a declaration: ``g_{a b}``, ``\\gamma_{#}``,
    ``\\nabla_{e}{R_{a b c d}}`` or a bare name."""

    head: str
    indices: Optional[tuple] = ()      # None means ``#`` (any number)
    inner: Optional["Pattern"] = None

    @property
    def key(self):
        if self.inner is not None:
            return (self.head, _arity(self.indices), self.inner.head)
        return self.head


def _arity(indices):
    return None if indices is None else len(indices)


@dataclass
class PropertyTable:
    index_sets: list = field(default_factory=list)
    props: dict = field(default_factory=dict)          # key -> {kind: args}
    head_order: list = field(default_factory=list)
    relations: dict = field(default_factory=dict)      # frozenset({h1, h2}) -> kind
    arities: dict = field(default_factory=dict)
    post_rules: list = field(default_factory=list)
    metric_sets: dict = field(default_factory=dict)    # metric head -> set idx or None
    _group_cache: dict = field(default_factory=dict)

    # ------------------------------------------------------------ declaring

    def declare(self, targets, kind: str, args: str = "") -> None:
        if kind not in KNOWN:
            raise UnknownProperty(f"unknown property {kind}")
        handler = getattr(self, "_decl_" + kind)
        handler(list(targets), args or "")
        self._group_cache.clear()

    def _touch(self, head: str) -> None:
        if head not in self.head_order:
            self.head_order.append(head)

    def _set_prop(self, pattern: Pattern, kind: str, value=True) -> None:
        if pattern.inner is None:
            self._touch(pattern.head)
            if pattern.indices is not None:
                self.check_arity(pattern.head, len(pattern.indices))
            else:
                self.arities[pattern.head] = None
        else:
            self._touch(pattern.head)
            self._touch(pattern.inner.head)
        self.props.setdefault(pattern.key, {})[kind] = value

    def _decl_Indices(self, targets, args):
        names, family = [], None
        for t in targets:
            name = t.head if isinstance(t, Pattern) else t
            if name.endswith("#"):
                family = name[:-1]
            else:
                names.append(name)
        label = args.strip() or None
        for s in self.index_sets:
            if label is not None and s.label == label:
                s.names, s.family = names, family
                return
        self.index_sets.append(IndexSet(names, label, family))

    def _decl_Integer(self, targets, args):
        m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", args)
        if not m:
            raise ParseError(f"Integer range must look like lo..hi, got {args!r}")
        lo, hi = int(m.group(1)), int(m.group(2))
        names = [t.head if isinstance(t, Pattern) else t for t in targets]
        s = self.set_of(names[0]) if names else None
        if s is None:
            s = IndexSet([n for n in names if not n.endswith("#")])
            self.index_sets.append(s)
        s.dimension = hi - lo + 1
        s.bounds = (lo, hi)

    def _decl_Metric(self, targets, args):
        for p in targets:
            if p.indices is not None and len(p.indices) != 2:
                raise ArityMismatch("a metric has exactly two slots")
            self._set_prop(p, "Metric")
            s = None
            if p.indices:
                s = self.set_of(p.indices[0].name)
            self.metric_sets[p.head] = None if s is None else self.index_sets.index(s)

    def _decl_KroneckerDelta(self, targets, args):
        for p in targets:
            self._set_prop(p, "KroneckerDelta")

    def _decl_PartialDerivative(self, targets, args):
        for p in targets:
            self._set_prop(Pattern(p.head, None), "PartialDerivative")

    def _decl_Derivative(self, targets, args):
        for p in targets:
            self._set_prop(Pattern(p.head, None), "Derivative")

    def _decl_GammaMatrix(self, targets, args):
        m = re.search(r"metric\s*=\s*([^\s,)]+)", args)
        metric = m.group(1) if m else None
        for p in targets:
            self._set_prop(Pattern(p.head, None), "GammaMatrix", metric)

    def _relate(self, targets, kind):
        heads = [t.head for t in targets]
        for h in heads:
            self._touch(h)
        for i, a in enumerate(heads):
            for b in heads[i + 1:]:
                key = frozenset((a, b))
                old = self.relations.get(key)
                if old is not None and old != kind:
                    raise ConflictingProperty(f"{a}, {b} already declared {old}")
                self.relations[key] = kind

    def _decl_Commuting(self, targets, args):
        self._relate(targets, "Commuting")

    def _decl_AntiCommuting(self, targets, args):
        self._relate(targets, "AntiCommuting")

    def _decl_SelfNonCommuting(self, targets, args):
        for p in targets:
            self._set_prop(Pattern(p.head, p.indices), "SelfNonCommuting")

    def _decl_TableauSymmetry(self, targets, args):
        shape = _int_list(args, "shape")
        order = _int_list(args, "indices")
        tab = Tableau(tuple(shape), tuple(order))
        for p in targets:
            n = len(p.indices or ()) + (len(p.inner.indices or ()) if p.inner else 0)
            if n != tab.size:
                raise ArityMismatch(f"tableau has {tab.size} cells but pattern has {n} slots")
            self._set_prop(p, "TableauSymmetry", tab)

    def _decl_RiemannTensor(self, targets, args):
        for p in targets:
            self._set_prop(p, "TableauSymmetry", RIEMANN_TABLEAU)

    def _decl_SatisfiesBianchi(self, targets, args):
        for p in targets:
            self._set_prop(p, "TableauSymmetry", BIANCHI_TABLEAU)

    def _decl_PostDefaultRules(self, targets, args):
        rules = []
        for m in re.finditer(r"@@?(\w+)(!!|!)", args):
            rules.append((m.group(1), m.group(2) == "!!"))
        self.post_rules = rules

    # ------------------------------------------------------------ queries

    def get(self, key, kind):
        return self.props.get(key, {}).get(kind)

    def has(self, head: str, kind: str) -> bool:
        return kind in self.props.get(head, {})

    def check_arity(self, head: str, n: int) -> None:
        if head not in self.arities:
            self.arities[head] = n
        elif self.arities[head] is not None and self.arities[head] != n:
            raise ArityMismatch(f"{head} used with {n} slots, previously {self.arities[head]}")

    def is_metric(self, head: str) -> bool:
        return self.has(head, "Metric")

    def is_gamma(self, head: str) -> bool:
        return self.has(head, "GammaMatrix")

    def gamma_metric(self, head: str) -> Optional[str]:
        return self.get(head, "GammaMatrix")

    def is_derivative(self, head: str) -> bool:
        return self.has(head, "Derivative") or self.has(head, "PartialDerivative")

    def is_kronecker(self, f) -> bool:
        if not isinstance(f, Tensor) or len(f.indices) != 2:
            return False
        mixed = f.indices[0].up != f.indices[1].up
        if self.has(f.head, "KroneckerDelta"):
            return mixed
        return False

    def is_metric_factor(self, f) -> bool:
        return isinstance(f, Tensor) and len(f.indices) == 2 and self.is_metric(f.head)

    def commutation(self, a: str, b: str) -> int:
        """+1 commute, -1 anticommute, 0 may not be reordered."""
        if a == b:
            if self.is_gamma(a) or self.has(a, "SelfNonCommuting"):
                return 0
            return 1
        rel = self.relations.get(frozenset((a, b)))
        if rel == "AntiCommuting":
            return -1
        return 1

    def head_rank(self, head: str):
        if head in self.head_order:
            return (0, self.head_order.index(head), head)
        return (1, 0, head)

    # index sets

    @property
    def implicit(self) -> bool:
        return not self.index_sets or all(not s.names and s.family is None
                                          for s in self.index_sets)

    def set_of(self, name: str) -> Optional[IndexSet]:
        for s in self.index_sets:
            if name in s:
                return s
        return None

    def check_index(self, name: str) -> bool:
        if self.set_of(name) is not None:
            return True
        return self.implicit

    def set_key(self, name: str):
        s = self.set_of(name)
        return None if s is None else self.index_sets.index(s)

    def name_rank(self, name: str):
        s = self.set_of(name)
        if s is None:
            pos = IMPLICIT_NAMES.index(name) if name in IMPLICIT_NAMES else len(IMPLICIT_NAMES)
            return (len(self.index_sets), pos, name)
        return (self.index_sets.index(s), s.position(name), name)

    def candidate_names(self, like: str, exclude, count: int) -> list:
        s = self.set_of(like)
        source = s.candidates() if s is not None else iter(IMPLICIT_NAMES + [f"n{k}" for k in range(1, 100)])
        out = []
        for n in source:
            if n not in exclude:
                out.append(n)
                if len(out) == count:
                    break
        return out

    def fresh_name(self, like: str, exclude) -> str:
        names = self.candidate_names(like, exclude, 1)
        if not names:
            raise UnknownProperty(f"index set of {like} has no unused names left")
        return names[0]

    def dimension_of(self, name_or_set) -> Optional[int]:
        s = name_or_set if isinstance(name_or_set, IndexSet) else self.set_of(name_or_set)
        return None if s is None else s.dimension

    def pair_swappable(self, name: str) -> bool:
        """May the upper/lower positions of a dummy pair be exchanged?"""
        idx = self.set_key(name)
        return any(v is None or v == idx for v in self.metric_sets.values())

    # symmetries

    def tableau_of(self, f) -> Optional[Tableau]:
        if isinstance(f, Tensor):
            return self.get(f.head, "TableauSymmetry")
        if isinstance(f, Derivative):
            inner = single_tensor(f.arg)
            if inner is None:
                return None
            return self.get((f.head, len(f.indices), inner.head), "TableauSymmetry") or \
                self.get((f.head, None, inner.head), "TableauSymmetry")
        return None

    def tableau_for_head(self, head: str) -> Optional[Tableau]:
        for key, kinds in self.props.items():
            tab = kinds.get("TableauSymmetry")
            if tab is None:
                continue
            if key == head or (isinstance(key, tuple) and head in (key[0], key[2])):
                return tab
        return None

    def tensor_generators(self, head: str, n: int) -> list:
        """Monoterm generators of a bare tensor with ``n`` slots."""
        gens = []
        tab = self.get(head, "TableauSymmetry")
        if tab is not None and tab.size == n:
            gens.extend(tab.generators())
        if n == 2 and (self.is_metric(head) or self.has(head, "KroneckerDelta")):
            gens.append(transposition(2, 0, 1, 1))
        if self.is_gamma(head):
            gens.extend(transposition(n, i, i + 1, -1) for i in range(n - 1))
        return gens

    def slot_generators(self, f) -> list:
        if isinstance(f, Tensor):
            return self.tensor_generators(f.head, len(f.indices))
        inner = single_tensor(f.arg)
        k, n = len(f.indices), len(f.indices) + len(inner.indices)
        gens = []
        tab = self.tableau_of(f)
        if tab is not None and tab.size == n:
            gens.extend(tab.generators())
        for g in self.tensor_generators(inner.head, len(inner.indices)):
            gens.append(g.shifted(k, n))
        if self.has(f.head, "PartialDerivative"):
            gens.extend(transposition(n, i, i + 1, 1) for i in range(k - 1))
        return gens

    def slot_group(self, f) -> dict:
        if isinstance(f, Tensor):
            key = ("T", f.head, len(f.indices))
        else:
            inner = single_tensor(f.arg)
            key = ("D", f.head, len(f.indices), inner.head, len(inner.indices))
        group = self._group_cache.get(key)
        if group is None:
            n = len(f.indices) if isinstance(f, Tensor) else key[2] + key[4]
            group = close_group(self.slot_generators(f), n)
            self._group_cache[key] = group
        return group

    def monoterm_generators(self, head: str, arity: Optional[int] = None) -> list:
        """Signed slot permutations generating the monoterm group of ``head``."""
        if arity is None:
            arity = self.arities.get(head)
            tab = self.tableau_for_head(head)
            if arity is None and tab is not None:
                arity = tab.size
        if arity == 0:
            return []
        gens = self.tensor_generators(head, arity or 0)
        if not gens:
            raise NoSymmetry(f"{head} has no declared slot symmetry")
        return gens

    # ------------------------------------------------------------ display

    def describe(self) -> str:
        lines = []
        for s in self.index_sets:
            names = ",".join(s.names + ([s.family + "#"] if s.family else []))
            label = f"({s.label})" if s.label else ""
            lines.append(f"{{{names}}}::Indices{label}.")
            if s.bounds:
                lines.append(f"{{{names}}}::Integer({s.bounds[0]}..{s.bounds[1]}).")
        for key, kinds in self.props.items():
            name = key if isinstance(key, str) else f"{key[0]}{{{key[2]}}}"
            for kind, val in kinds.items():
                if kind == "TableauSymmetry":
                    lines.append(f"{name}::TableauSymmetry(shape={list(val.shape)}, "
                                 f"indices={list(val.slot_order)}).")
                elif kind == "GammaMatrix":
                    lines.append(f"{name}::GammaMatrix(metric={val}).")
                else:
                    lines.append(f"{name}::{kind}.")
        for pair, kind in self.relations.items():
            lines.append("{" + ",".join(sorted(pair)) + "}::" + kind + ".")
        if self.post_rules:
            rules = ", ".join(f"@@{n}{'!!' if r else '!'}(%)" for n, r in self.post_rules)
            lines.append(f"::PostDefaultRules({rules}).")
        return "\n".join(lines)


def _int_list(args: str, name: str) -> list:
    m = re.search(name + r"\s*=\s*\{([^}]*)\}", args)
    if not m:
        raise ParseError(f"missing {name}={{...}} argument")
    return [int(x) for x in m.group(1).replace(",", " ").split()]


def pattern_of(node) -> Pattern:
    """Declaration pattern for a parsed tensor or derivative."""
    if isinstance(node, Tensor):
        return Pattern(node.head, tuple(node.indices))
    if isinstance(node, Derivative):
        inner = single_tensor(node.arg)
        return Pattern(node.head, tuple(node.indices),
                       None if inner is None else Pattern(inner.head, tuple(inner.indices)))
    raise TypeError(node)
