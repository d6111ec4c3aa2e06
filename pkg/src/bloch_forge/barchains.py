"""Formal integer combinations of bar symbols [g1|...|gn].

Chains live in the normalized bar complex of a finite group: tuples never
contain the identity and zero coefficients are never stored.  The boundary is
the standard coinvariant bar differential

    d[g1|...|gn] = [g2|...|gn] + sum_i (-1)^i [g1|...|g_i g_{i+1}|...|gn]
                   + (-1)^n [g1|...|g_{n-1}].
"""

from __future__ import annotations

from itertools import combinations, permutations

from .groups import FiniteGroup


class BarChain:
    """Sparse chain in the normalized bar complex of a group."""

    __slots__ = ("group", "degree", "terms")

    def __init__(self, group: FiniteGroup, degree: int, terms=None):
        self.group = group
        self.degree = degree
        self.terms: dict[tuple[int, ...], int] = {}
        if terms:
            for t, c in (terms.items() if isinstance(terms, dict) else terms):
                self.add_term(t, c)

    def add_term(self, t: tuple[int, ...], c: int):
        if len(t) != self.degree:
            raise ValueError(f"tuple {t} has wrong degree (expected {self.degree})")
        if c == 0 or any(g == 0 for g in t):
            return
        new = self.terms.get(t, 0) + c
        if new:
            self.terms[t] = new
        else:
            del self.terms[t]

    def copy(self) -> "BarChain":
        out = BarChain(self.group, self.degree)
        out.terms = dict(self.terms)
        return out

    def __add__(self, other: "BarChain") -> "BarChain":
        assert self.group is other.group and self.degree == other.degree
        out = self.copy()
        for t, c in other.terms.items():
            out.add_term(t, c)
        return out

    def __sub__(self, other: "BarChain") -> "BarChain":
        return self + (-other)

    def __neg__(self) -> "BarChain":
        out = BarChain(self.group, self.degree)
        out.terms = {t: -c for t, c in self.terms.items()}
        return out

    def scale(self, k: int) -> "BarChain":
        out = BarChain(self.group, self.degree)
        if k:
            out.terms = {t: k * c for t, c in self.terms.items()}
        return out

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, BarChain) and self.group is other.group
                and self.degree == other.degree and self.terms == other.terms)

    def __len__(self):
        return len(self.terms)

    def map_entries(self, f, target: FiniteGroup | None = None) -> "BarChain":
        """Apply an entrywise map (a homomorphism on indices) to every tuple."""
        out = BarChain(target or self.group, self.degree)
        for t, c in self.terms.items():
            out.add_term(tuple(f(g) for g in t), c)
        return out

    def __repr__(self):
        items = sorted(self.terms.items())[:4]
        body = " ".join(f"{c:+d}[{','.join(map(str, t))}]" for t, c in items)
        more = "" if len(self.terms) <= 4 else f" ... ({len(self.terms)} terms)"
        return f"<BarChain deg={self.degree} {body}{more}>"


def bar_boundary(chain: BarChain) -> BarChain:
    """Normalized coinvariant bar differential."""
    if chain.degree < 1:
        raise ValueError("boundary needs degree >= 1")
    g = chain.group
    out = BarChain(g, chain.degree - 1)
    n = chain.degree
    for t, c in chain.terms.items():
        out.add_term(t[1:], c)
        sign = 1
        for i in range(n - 1):
            sign = -sign
            merged = t[:i] + (g.mul(t[i], t[i + 1]),) + t[i + 2:]
            out.add_term(merged, sign * c)
        out.add_term(t[:-1], c if n % 2 == 0 else -c)
    return out


def shuffle_cycle(group: FiniteGroup, gs) -> BarChain:
    """Alternating sum over all orderings of a pairwise-commuting tuple."""
    gs = list(gs)
    for a, b in combinations(gs, 2):
        if group.mul(a, b) != group.mul(b, a):
            raise ValueError("shuffle cycle needs pairwise commuting elements")
    out = BarChain(group, len(gs))
    for perm in permutations(range(len(gs))):
        sign = perm_sign(perm)
        out.add_term(tuple(gs[i] for i in perm), sign)
    return out


def perm_sign(perm) -> int:
    sign = 1
    for i, j in combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            sign = -sign
    return sign


def shuffle_product(a: BarChain, b: BarChain) -> BarChain:
    """Chain-level cross product of two chains with commuting entries."""
    assert a.group is b.group
    g = a.group
    p, q = a.degree, b.degree
    out = BarChain(g, p + q)
    for ta, ca in a.terms.items():
        for tb, cb in b.terms.items():
            for positions in combinations(range(p + q), p):
                posset = set(positions)
                word = []
                ia = ib = 0
                for k in range(p + q):
                    if k in posset:
                        word.append(ta[ia])
                        ia += 1
                    else:
                        word.append(tb[ib])
                        ib += 1
                sign = _shuffle_sign(positions, p + q)
                out.add_term(tuple(word), sign * ca * cb)
    return out


def _shuffle_sign(positions, n) -> int:
    others = [k for k in range(n) if k not in positions]
    inv = 0
    for x in positions:
        for y in others:
            if y < x:
                inv += 1
    return -1 if inv % 2 else 1


def rho_s(chain: BarChain, s: int) -> BarChain:
    """Degree-raising conjugation homotopy for a group element s.

    On a symbol [g1|g2] it gives [s|sg1s'|sg2s'] - [g1|s|sg2s'] + [g1|g2|s]
    (s' the inverse of s); extended linearly, and to any degree by inserting
    s in each slot with alternating signs.
    """
    g = chain.group
    si = g.inv(s)
    n = chain.degree
    out = BarChain(g, n + 1)
    for t, c in chain.terms.items():
        conj = [g.mul(g.mul(s, x), si) for x in t]
        for i in range(n + 1):
            word = tuple(t[:i]) + (s,) + tuple(conj[i:])
            out.add_term(word, c if i % 2 == 0 else -c)
    return out


def standard_lift(t: tuple[int, ...], group: FiniteGroup) -> tuple[int, ...]:
    """Homogeneous lift (h0, ..., hn) with h_{i-1} h_i^-1 = g_i and h_n = 1."""
    out = [0] * (len(t) + 1)
    acc = 0
    for i in range(len(t) - 1, -1, -1):
        acc = group.mul(t[i], acc)
        out[i] = acc
    out[len(t)] = 0
    return tuple(out)


def bar_of_standard(h: tuple[int, ...], group: FiniteGroup) -> tuple[int, ...]:
    """Inverse of standard_lift: (h0, ..., hn) -> (h0 h1^-1, ..., h_{n-1} h_n^-1)."""
    return tuple(group.mul(h[i], group.inv(h[i + 1])) for i in range(len(h) - 1))
