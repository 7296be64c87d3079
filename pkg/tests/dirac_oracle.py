"""Explicit 4x4 Dirac representation with exact Gaussian-rational entries.

Kept independent of the symbolic engine: it only knows matrices, the
diagonal metric diag(+1,-1,-1,-1) and plain index sums.
"""
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

DIM = 4
METRIC = (1, -1, -1, -1)


class GMat:
    """4x4 matrix over Q[i] as separate real/imaginary arrays.

    Integer matrices stay in int64 (exact for these small entries); a
    non-integral scale switches to object arrays of Fractions.
    """

    def __init__(self, re, im=None):
        self.re = np.array(re, dtype=np.int64)
        self.im = np.zeros((DIM, DIM), dtype=np.int64) if im is None else np.array(im, dtype=np.int64)

    @classmethod
    def _raw(cls, re, im):
        # entries are already Fractions
        m = cls.__new__(cls)
        m.re, m.im = re, im
        return m

    def __matmul__(self, other):
        return GMat._raw(self.re.dot(other.re) - self.im.dot(other.im),
                         self.re.dot(other.im) + self.im.dot(other.re))

    def __add__(self, other):
        return GMat._raw(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GMat._raw(self.re - other.re, self.im - other.im)

    def scale(self, c):
        c = Fraction(c)
        if c.denominator == 1:
            return GMat._raw(self.re * int(c), self.im * int(c))
        return GMat._raw(self.re.astype(object) * c, self.im.astype(object) * c)

    def __eq__(self, other):
        return bool((self.re == other.re).all() and (self.im == other.im).all())

    def __repr__(self):
        return f"GMat(re={self.re.tolist()}, im={self.im.tolist()})"


def identity():
    return GMat(np.eye(DIM, dtype=int))


def zero():
    return GMat(np.zeros((DIM, DIM), dtype=int))


def _dirac_upper():
    # gamma^0 = diag(1,1,-1,-1); gamma^k = [[0, s_k], [-s_k, 0]]
    z = np.zeros((2, 2), dtype=int)
    s1 = (np.array([[0, 1], [1, 0]]), z)
    s2 = (z, np.array([[0, -1], [1, 0]]))
    s3 = (np.array([[1, 0], [0, -1]]), z)
    g0 = GMat(np.diag([1, 1, -1, -1]))
    out = [g0]
    for re, im in (s1, s2, s3):
        out.append(GMat(np.block([[z, re], [-re, z]]),
                        np.block([[z, im], [-im, z]])))
    return out


GAMMA_UP = _dirac_upper()
GAMMA_DOWN = [GAMMA_UP[m].scale(METRIC[m]) for m in range(DIM)]


@lru_cache(maxsize=None)
def gamma(idx, up):
    """Antisymmetrised product gamma_{[m1 ... mr]} for concrete indices.

    ``up`` is a tuple of booleans, one per index.
    """
    if len(set(idx)) < len(idx):
        return zero()
    base = [GAMMA_UP[m] if u else GAMMA_DOWN[m] for m, u in zip(idx, up)]
    out = identity()
    # distinct indices anticommute for a diagonal metric, so the ordered
    # product already equals the antisymmetrised one
    for b in base:
        out = out @ b
    return out


def gamma_antisym_bruteforce(idx, up):
    """Reference antisymmetrisation by explicit sum over orderings."""
    n = len(idx)
    total = zero()
    count = 0
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        m = identity()
        for p in perm:
            m = m @ (GAMMA_UP[idx[p]] if up[p] else GAMMA_DOWN[idx[p]])
        total = total + m.scale(sign)
        count += 1
    return total.scale(Fraction(1, count))


def metric(m, n, up_m, up_n):
    if up_m != up_n:
        return 1 if m == n else 0
    return METRIC[m] if m == n else 0


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
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


def evaluate(expr, values, gamma_head="\\gamma", metric_head="g"):
    """Matrix value of a symbolic gamma/metric expression.

    ``values`` binds every free index name to 0..3; contracted names are
    summed. Only the tree shape of the expression is used (terms with
    Fraction coefficients, factors with ``head``/``indices``, nested sums).
    """
    total = zero()
    for term in expr.terms:
        total = total + _evaluate_term(term, values, gamma_head, metric_head)
    return total


def _term_names(term):
    names = []
    for f in term.factors:
        if hasattr(f, "terms"):
            names.extend(_free_names(f))
        else:
            names.extend(i.name for i in f.indices)
    return names


def _free_names(expr):
    if not expr.terms:
        return []
    names = _term_names(expr.terms[0])
    return [n for n in names if names.count(n) == 1]


def _evaluate_term(term, values, gamma_head, metric_head):
    counts = {}
    for n in _term_names(term):
        counts[n] = counts.get(n, 0) + 1
    dummies = [n for n, k in counts.items() if k == 2 and n not in values]
    total = zero()
    for combo in _assignments(len(dummies)):
        env = dict(values)
        env.update(zip(dummies, combo))
        m, k_total = identity(), term.coeff
        for f in term.factors:
            if hasattr(f, "terms"):
                m = m @ evaluate(f, env, gamma_head, metric_head)
            elif f.head == gamma_head:
                m = m @ gamma(tuple(env[i.name] for i in f.indices),
                              tuple(i.up for i in f.indices))
            elif f.head == metric_head:
                a, b = f.indices
                k = metric(env[a.name], env[b.name], a.up, b.up)
                if k == 0:
                    break
                k_total *= k
            else:
                raise ValueError(f"unknown head {f.head}")
        else:
            total = total + m.scale(k_total)
    return total


def _assignments(k):
    if k == 0:
        yield ()
        return
    for rest in _assignments(k - 1):
        for v in range(DIM):
            yield rest + (v,)
