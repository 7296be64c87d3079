"""Name-based dispatch for the ``@algorithm`` commands."""
from __future__ import annotations

from .clifford import join
from .errors import UnknownProperty
from .expr import Sum
from .rewrite import (collect_terms, distribute, eliminate_kr, eliminate_metric,
                      fixpoint, prodsort, substitute)
from .symmetry import canonicalise, require_tableau, young_project

DEFAULT_MAX_ORBIT = 10 ** 6


def run_algorithm(name: str, e: Sum, props, repeat: bool = False, args: str = "",
                  rule=None, max_orbit: int = DEFAULT_MAX_ORBIT) -> Sum:
    """Apply one named algorithm; ``repeat`` iterates to a fixpoint."""
    words = args.replace(",", " ").split()
    if name == "join":
        return join(e, props, expand="expand" in words, repeat=repeat)
    if name == "eliminate_metric":
        return eliminate_metric(e, props, repeat=repeat)
    if name == "eliminate_kr":
        return eliminate_kr(e, props, repeat=repeat)
    simple = {
        "distribute": distribute,
        "collect_terms": collect_terms,
        "prodsort": lambda x: prodsort(x, props),
        "canonicalise": lambda x: canonicalise(x, props, max_orbit),
        "canonicalize": lambda x: canonicalise(x, props, max_orbit),
    }
    if name in simple:
        fn = simple[name]
    elif name in ("young_project_tensor", "young_project"):
        head = words[0] if words else None
        if head is not None:
            require_tableau(props, head)
        fn = lambda x: young_project(x, props, head, max_orbit)
    elif name == "substitute":
        if rule is None:
            raise UnknownProperty("substitute needs a rule argument")
        fn = lambda x: substitute(x, rule, props)
    else:
        raise UnknownProperty(f"unknown algorithm @{name}")
    return fixpoint(fn, e) if repeat else fn(e)


def apply_post_rules(e: Sum, props, max_orbit: int = DEFAULT_MAX_ORBIT) -> Sum:
    """Run the declared PostDefaultRules pipeline in order."""
    for name, repeat in props.post_rules:
        e = run_algorithm(name, e, props, repeat, max_orbit=max_orbit)
    return e
