"""Finite groups as indexed element lists with multiplication tables.

Groups are built by closing a generator set under multiplication (BFS from
the identity, so element indexing is deterministic).  Matrix groups over the
finite local rings carry 2x2 matrices as 4-tuples of ring element indices;
abstract groups carry whatever hashable labels they were built from.
"""

from __future__ import annotations

import random
from itertools import product

from .budgets import BUDGETS, BudgetError
from .rings import Ring


class FiniteGroup:
    """Multiplication-table group; identity has index 0."""

    TABLE_LIMIT = 2048

    def __init__(self, elements, law, name="group", check=True, inverter=None):
        self.elements = list(elements)
        self.order = len(self.elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != self.order:
            raise ValueError("duplicate element labels")
        self._law = law
        self.name = name
        self._table = None
        if self.order <= self.TABLE_LIMIT:
            import numpy as np

            t = np.zeros((self.order, self.order), dtype=np.int32)
            for i, a in enumerate(self.elements):
                for j, b in enumerate(self.elements):
                    t[i, j] = self.index[law(a, b)]
            self._table = t
        self._inv = self._build_inverses(inverter)
        self._orders: dict[int, int] = {}
        self._abelian: bool | None = None
        if check:
            self._spot_check()

    # -- core ops -----------------------------------------------------------

    def mul(self, i: int, j: int) -> int:
        if self._table is not None:
            return int(self._table[i, j])
        return self.index[self._law(self.elements[i], self.elements[j])]

    def inv(self, i: int) -> int:
        return self._inv[i]

    def _build_inverses(self, inverter=None):
        inv = [0] * self.order
        if inverter is not None:
            for i, e in enumerate(self.elements):
                inv[i] = self.index[inverter(e)]
        elif self._table is not None:
            import numpy as np

            for i in range(self.order):
                js = np.where(self._table[i] == 0)[0]
                inv[i] = int(js[0])
        else:
            for i in range(self.order):
                j = i
                while self.mul(j, i) != 0:
                    j = self.mul(j, i)
                inv[i] = j
        return inv

    def _spot_check(self):
        n = self.order
        assert self.index[self.elements[0]] == 0
        assert all(self.mul(0, i) == i and self.mul(i, 0) == i for i in range(n))
        triples = None
        if n <= 64:
            triples = product(range(n), repeat=3)
        else:
            rng = random.Random(0xBF)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                       for _ in range(200))
        for a, b, c in triples:
            assert self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)), \
                "associativity failed"
        for i in range(n):
            assert self.mul(i, self._inv[i]) == 0 and self.mul(self._inv[i], i) == 0

    def element_order(self, i: int) -> int:
        if i not in self._orders:
            k, j = 1, i
            while j != 0:
                j = self.mul(j, i)
                k += 1
            self._orders[i] = k
        return self._orders[i]

    @property
    def is_abelian(self) -> bool:
        if self._abelian is None:
            self._abelian = all(
                self.mul(i, j) == self.mul(j, i)
                for i in range(self.order) for j in range(i + 1, self.order)
            )
        return self._abelian

    def conjugate(self, g: int, h: int) -> int:
        """g h g^-1"""
        return self.mul(self.mul(g, h), self.inv(g))

    def power(self, g: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(g), -e)
        r, b = 0, g
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    def closure(self, gens: list[int]) -> list[int]:
        """Sorted element indices of the subgroup generated by gens."""
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def subgroup(self, element_indices) -> "Subgroup":
        return Subgroup(self, sorted(set(element_indices) | {0}))

    def generated_subgroup(self, gens: list[int]) -> "Subgroup":
        return Subgroup(self, self.closure(gens))

    def conjugate_subgroup(self, sub: "Subgroup", g: int) -> "Subgroup":
        return Subgroup(self, sorted(self.conjugate(g, h) for h in sub.embed))

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


class Subgroup(FiniteGroup):
    """A subgroup with its own indexing plus the embedding into the parent."""

    def __init__(self, parent: FiniteGroup, element_indices: list[int]):
        self.parent = parent
        self.embed = list(element_indices)
        if self.embed[0] != 0:
            if 0 not in self.embed:
                raise ValueError("subgroup must contain the identity")
            self.embed.remove(0)
            self.embed.insert(0, 0)
        to_sub = {p: s for s, p in enumerate(self.embed)}
        self.to_sub = to_sub

        def law(a, b):
            return parent.mul(a, b)

        # elements are labelled by their parent indices
        super().__init__(self.embed, law, name=f"{parent.name}-sub{len(self.embed)}",
                         check=False)

    def restrict_index(self, parent_idx: int) -> int:
        return self.to_sub[parent_idx]

    def contains_parent(self, parent_idx: int) -> bool:
        return parent_idx in self.to_sub


# ---------------------------------------------------------------------------
# constructors


def group_from_generators(ring: Ring, mats, cap: int | None = None,
                          name: str = "matgroup") -> FiniteGroup:
    """Close a set of invertible 2x2 matrices over the ring under products."""
    cap = cap or BUDGETS.group_elements

    def mmul(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return (
            ring.add(ring.mul(a, e), ring.mul(b, g)),
            ring.add(ring.mul(a, f), ring.mul(b, h)),
            ring.add(ring.mul(c, e), ring.mul(d, g)),
            ring.add(ring.mul(c, f), ring.mul(d, h)),
        )

    ident = (1, 0, 0, 1)
    for m in mats:
        det = ring.sub(ring.mul(m[0], m[3]), ring.mul(m[1], m[2]))
        if not ring.is_unit(det):
            raise ValueError("generator matrix is not invertible")
    def minv(x):
        a, b, c, d = x
        det_inv = ring.inv(ring.sub(ring.mul(a, d), ring.mul(b, c)))
        return (
            ring.mul(det_inv, d), ring.mul(det_inv, ring.neg(b)),
            ring.mul(det_inv, ring.neg(c)), ring.mul(det_inv, a),
        )

    elements = [ident]
    seen = {ident}
    head = 0
    while head < len(elements):
        x = elements[head]
        head += 1
        for g in mats:
            y = mmul(x, g)
            if y not in seen:
                if len(elements) >= cap:
                    raise BudgetError(f"group closure exceeded cap {cap}")
                seen.add(y)
                elements.append(y)
    return FiniteGroup(elements, mmul, name=name,
                       check=len(elements) <= 512, inverter=minv)


def _ring_additive_gens(ring: Ring):
    if ring.kind == "zmod":
        return [1]
    if ring.kind == "gf":
        return [ring._from_coords(tuple(1 if i == j else 0 for i in range(ring.m)))
                for j in range(ring.m)]
    gens = []
    for j in range(ring.depth):
        for b in _ring_additive_gens(ring.base):
            coords = [0] * ring.depth
            coords[j] = b
            gens.append(ring._from_coords(tuple(coords)))
    return gens


def elementary_matrices(ring: Ring):
    out = []
    for x in _ring_additive_gens(ring):
        out.append((1, x, 0, 1))
        out.append((1, 0, x, 1))
    return out


def sl2(ring: Ring, cap: int | None = None) -> FiniteGroup:
    return group_from_generators(ring, elementary_matrices(ring), cap,
                                 name=f"SL2({ring.descriptor()})")


def gl2(ring: Ring, cap: int | None = None) -> FiniteGroup:
    gens = elementary_matrices(ring)
    for u in ring.units_group().generators:
        gens.append((u, 0, 0, 1))
    return group_from_generators(ring, gens, cap, name=f"GL2({ring.descriptor()})")


def b2(ring: Ring, cap: int | None = None) -> FiniteGroup:
    gens = [(1, x, 0, 1) for x in _ring_additive_gens(ring)]
    for u in ring.units_group().generators:
        gens.append((u, 0, 0, 1))
        gens.append((1, 0, 0, u))
    return group_from_generators(ring, gens, cap, name=f"B2({ring.descriptor()})")


def t2(ring: Ring, cap: int | None = None) -> FiniteGroup:
    gens = []
    for u in ring.units_group().generators:
        gens.append((u, 0, 0, 1))
        gens.append((1, 0, 0, u))
    return group_from_generators(ring, gens, cap, name=f"T2({ring.descriptor()})")


def n2(ring: Ring, cap: int | None = None) -> FiniteGroup:
    gens = [(1, x, 0, 1) for x in _ring_additive_gens(ring)]
    return group_from_generators(ring, gens, cap, name=f"N2({ring.descriptor()})")


def n2_center(ring: Ring, cap: int | None = None) -> FiniteGroup:
    """Subgroup generated by the unipotent upper triangulars and the center."""
    gens = [(1, x, 0, 1) for x in _ring_additive_gens(ring)]
    for u in ring.units_group().generators:
        gens.append((u, 0, 0, u))
    return group_from_generators(ring, gens, cap,
                                 name=f"N2Z({ring.descriptor()})")


def gm2(ring: Ring, cap: int | None = None) -> FiniteGroup:
    gens = [(0, 1, 1, 0)]
    for u in ring.units_group().generators:
        gens.append((u, 0, 0, 1))
        gens.append((1, 0, 0, u))
    return group_from_generators(ring, gens, cap, name=f"GM2({ring.descriptor()})")


def additive_group(ring: Ring) -> FiniteGroup:
    return FiniteGroup(list(ring.elements()), ring.add,
                       name=f"({ring.descriptor()},+)", check=ring.size <= 64)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(list(range(n)), lambda a, b: (a + b) % n, name=f"C{n}")


def abelian_group(factors) -> FiniteGroup:
    factors = list(factors)

    def law(a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, factors))

    elements = list(product(*[range(d) for d in factors]))
    elements.sort()
    ident = tuple(0 for _ in factors)
    elements.remove(ident)
    elements.insert(0, ident)
    return FiniteGroup(elements, law, name="x".join(f"C{d}" for d in factors))


def product_group(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    def law(a, b):
        return (g.mul(a[0], b[0]), h.mul(a[1], b[1]))

    elements = [(i, j) for i in range(g.order) for j in range(h.order)]
    return FiniteGroup(elements, law, name=f"{g.name}x{h.name}",
                       check=g.order * h.order <= 512)


# ---------------------------------------------------------------------------
# abelian structure and Sylow machinery


def abelian_structure(g: FiniteGroup):
    """Invariant factors, generator indices and discrete logs of an abelian group.

    Returns (factors, gens, dlog) with dlog[element] a tuple of exponents for
    the canonical cyclic decomposition (factors[0] | factors[1] | ...).
    """
    from .intlinalg import (IntMatrix, smith_normal_form,
                            _apply_inverse_ops_to_vector, _apply_ops_to_vector)

    assert g.is_abelian, "abelian_structure needs an abelian group"
    gens: list[int] = []
    span: dict[int, tuple[int, ...]] = {0: ()}
    relations: list[list[int]] = []
    for x in range(g.order):
        if x in span:
            continue
        t, xt = 1, x
        while xt not in span:
            t += 1
            xt = g.mul(xt, x)
        base_vec = span[xt]
        new_span: dict[int, tuple[int, ...]] = {}
        for y, vec in span.items():
            pw = y
            for s in range(t):
                new_span[pw] = vec + (s,)
                pw = g.mul(pw, x)
        relations = [rel + [0] for rel in relations]
        relations.append([-c for c in base_vec] + [t])
        gens.append(x)
        span = new_span
    k = len(gens)
    rel = IntMatrix(k, len(relations))
    for j, col in enumerate(relations):
        for i, v in enumerate(col):
            if v:
                rel[i, j] = v
    snf = smith_normal_form(rel, want_transforms=True)
    diag = list(snf.diag)
    assert len(diag) == k
    keep = [i for i, d in enumerate(diag) if d != 1]
    factors = tuple(diag[i] for i in keep)
    dlog = {}
    for u, vec in span.items():
        dense = {i: v for i, v in enumerate(vec) if v}
        y = _apply_ops_to_vector(snf.row_ops, dense)
        dlog[u] = tuple(y.get(i, 0) % diag[i] for i in keep)
    canonical_gens = []
    for j in keep:
        col = _apply_inverse_ops_to_vector(snf.row_ops, {j: 1})
        e = 0
        for i, c in col.items():
            e = g.mul(e, g.power(gens[i], c))
        canonical_gens.append(e)
    for gi, e in enumerate(canonical_gens):
        want = tuple(1 if i == gi else 0 for i in range(len(keep)))
        assert dlog[e] == want
    return factors, canonical_gens, dlog


def p_part(n: int, p: int) -> int:
    q = 1
    while n % (q * p) == 0:
        q *= p
    return q


def sylow_subgroup(g: FiniteGroup, p: int, seeds=range(8)) -> Subgroup:
    """A Sylow p-subgroup found by random p-element closure.

    Deterministic: over the fixed seed schedule, the lexicographically least
    element-index set found is returned.
    """
    target = p_part(g.order, p)
    if target == 1:
        return g.subgroup([0])
    found: list[tuple[int, ...]] = []
    for seed in seeds:
        rng = random.Random((seed << 16) ^ g.order ^ p)
        current = [0]
        attempts = 0
        while len(current) < target and attempts < 64 * target:
            attempts += 1
            x = rng.randrange(g.order)
            n = g.element_order(x)
            m = n // p_part(n, p)
            h = g.power(x, m)
            if h == 0 or h in current:
                continue
            cand = g.closure(current + [h])
            if p_part(len(cand), p) == len(cand) and len(cand) <= target:
                current = cand
        if len(current) == target:
            found.append(tuple(current))
    if not found:
        raise BudgetError(f"no Sylow {p}-subgroup found within budget")
    return Subgroup(g, list(min(found)))


def double_coset_reps(g: FiniteGroup, sub: Subgroup) -> list[int]:
    """Representatives of sub\\g/sub, in increasing element-index order."""
    seen = bytearray(g.order)
    reps = []
    elems = sub.embed
    for x in range(g.order):
        if seen[x]:
            continue
        reps.append(x)
        for a in elems:
            ax = g.mul(a, x)
            for b in elems:
                seen[g.mul(ax, b)] = 1
    return reps


def left_coset_reps(g: FiniteGroup, sub: Subgroup) -> list[int]:
    """Lexicographically least representatives of g/sub."""
    seen = bytearray(g.order)
    reps = []
    for x in range(g.order):
        if seen[x]:
            continue
        reps.append(x)
        for a in sub.embed:
            seen[g.mul(x, a)] = 1
    return reps


def intersection(g: FiniteGroup, s1: Subgroup, s2: Subgroup) -> Subgroup:
    common = sorted(set(s1.embed) & set(s2.embed))
    return Subgroup(g, common)


# ---------------------------------------------------------------------------


def parse_group(spec: str, cap: int | None = None) -> FiniteGroup:
    """Group grammar: sl2(<ring>), gl2, b2, t2, n2, gm2, cyclic(n), product(a, b)."""
    from .rings import parse_ring

    s = spec.strip().replace(" ", "")
    for prefix, ctor in (("sl2(", sl2), ("gl2(", gl2), ("b2(", b2), ("t2(", t2),
                         ("n2(", n2), ("gm2(", gm2)):
        if s.startswith(prefix) and s.endswith(")"):
            return ctor(parse_ring(s[len(prefix):-1]), cap)
    if s.startswith("cyclic(") and s.endswith(")"):
        return cyclic_group(int(s[7:-1]))
    if s.startswith("product(") and s.endswith(")"):
        body = s[8:-1]
        depth = 0
        for k, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return product_group(parse_group(body[:k], cap),
                                     parse_group(body[k + 1:], cap))
    if s.startswith("additive(") and s.endswith(")"):
        return additive_group(parse_ring(s[9:-1]))
    raise ValueError(f"cannot parse group spec {spec!r}")
