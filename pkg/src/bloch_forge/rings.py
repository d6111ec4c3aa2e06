"""Exact arithmetic in finite commutative local rings.

Supported rings: prime fields and Galois fields gf(q), integers mod a prime
power zmod(p^k), and truncated polynomial rings truncpoly(F, m) = F[t]/(t^m)
over a finite field.  Elements are integer indices 0..|R|-1; the index encodes
the canonical coordinate vector, so equality and hashing are exact and
enumeration order is the lexicographic order on coordinates.

Descriptor grammar (see docs/rings.md):
    gf(q)  gf(q, poly=[c0,c1,...,1])  zmod(n)  truncpoly(<base>, m)
"""

from __future__ import annotations

from functools import lru_cache

from .budgets import BUDGETS, BudgetError
from .intlinalg import (
    IntMatrix,
    smith_normal_form,
    _apply_inverse_ops_to_vector,
    _apply_ops_to_vector,
)


def factor_prime_power(n: int) -> tuple[int, int]:
    """Return (p, k) with n = p^k, or raise ValueError."""
    if n < 2:
        raise ValueError(f"{n} is not a prime power")
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            m = n
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise ValueError(f"{n} is not a prime power")
            return p, k
        p += 1 if p == 2 else 2
    return n, 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    p, k = factor_prime_power(n) if _is_prime_power(n) else (0, 0)
    return k == 1 and p == n


def _is_prime_power(n: int) -> bool:
    try:
        factor_prime_power(n)
        return True
    except ValueError:
        return False


# -- polynomial helpers over F_p (coefficient tuples, low degree first) -----


def _poly_trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _poly_mulmod(a, b, modulus, p):
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    return _poly_divmod(prod, modulus, p)[1]


def _poly_divmod(a, b, p):
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = pow(lb, p - 2, p)
    q = [0] * max(0, len(a) - db)
    while len(_poly_trim(a)) - 1 >= db and any(a):
        a = list(_poly_trim(a))
        if len(a) - 1 < db:
            break
        coef = (a[-1] * inv_lb) % p
        shift = len(a) - 1 - db
        q[shift] = coef
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
    return _poly_trim(q), _poly_trim(a)


def _poly_gcd(a, b, p):
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def poly_is_irreducible(coeffs, p) -> bool:
    """Irreducibility over F_p: gcd(f, x^(p^i) - x) = 1 for all i <= deg(f)/2."""
    f = _poly_trim(coeffs)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    xp = (0, 1)
    for _ in range(1, m // 2 + 1):
        xp = _poly_powmod(xp, p, f, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(f, _poly_trim(diff), p)
        if len(g) - 1 >= 1:
            return False
    return True


def _poly_powmod(a, e, modulus, p):
    result = (1,)
    base = _poly_divmod(a, modulus, p)[1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, modulus, p)
        base = _poly_mulmod(base, base, modulus, p)
        e >>= 1
    return result


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Default irreducible modulus for gf(p^m).

    The small fields the element tables depend on get pinned presentations
    (a^2 = a+1 for gf(4), a^3 = a+1 for gf(8), a^2 = -1 for gf(9)); everything
    else takes the lexicographically first monic irreducible.
    """
    pinned = {
        (2, 2): (1, 1, 1),        # x^2 + x + 1
        (2, 3): (1, 1, 0, 1),     # x^3 + x + 1
        (3, 2): (1, 0, 1),        # x^2 + 1
    }
    if (p, m) in pinned:
        return pinned[(p, m)]
    if m == 1:
        return (0, 1)
    for code in range(p**m):
        coeffs = []
        n = code
        for _ in range(m):
            coeffs.append(n % p)
            n //= p
        cand = tuple(coeffs) + (1,)
        if poly_is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial found for p={p}, m={m}")


# ---------------------------------------------------------------------------


class Ring:
    """A finite commutative local ring with indexed elements.

    Elements are ints in range(size); 0 is zero and 1 is one.  All operations
    are pure; multiplication/addition tables are built once when the ring is
    small enough.
    """

    TABLE_LIMIT = 4096

    def __init__(self, kind: str, **kw):
        self.kind = kind
        if kind == "zmod":
            n = kw["n"]
            p, k = factor_prime_power(n)
            self.p, self.k, self.size = p, k, n
            self.char = n
            self.residue_size = p
        elif kind == "gf":
            p, m, modulus = kw["p"], kw["m"], kw["modulus"]
            if not poly_is_irreducible(modulus, p):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
            if len(modulus) - 1 != m or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            self.p, self.m, self.modulus = p, m, tuple(c % p for c in modulus)
            self.size = p**m
            self.char = p
            self.residue_size = self.size
        elif kind == "truncpoly":
            base, depth = kw["base"], kw["depth"]
            if not base.is_field:
                raise ValueError("truncpoly base must be a finite field")
            if depth < 1:
                raise ValueError("nilpotency degree must be >= 1")
            self.base = base
            self.depth = depth
            self.size = base.size**depth
            self.p = base.p
            self.char = base.p
            self.residue_size = base.size
        else:
            raise ValueError(f"unknown ring kind {kind}")
        if self.size > BUDGETS.ring_elements:
            raise BudgetError(f"ring with {self.size} elements exceeds cap")
        self._units_group = None
        self._build_tables()

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def zmod(n: int) -> "Ring":
        return Ring("zmod", n=n)

    @staticmethod
    def gf(q: int, modulus=None) -> "Ring":
        p, m = factor_prime_power(q)
        if m == 1 and modulus is None:
            return Ring("zmod", n=p)
        if modulus is None:
            modulus = default_modulus(p, m)
        return Ring("gf", p=p, m=m, modulus=tuple(modulus))

    @staticmethod
    def truncpoly(base: "Ring", depth: int) -> "Ring":
        return Ring("truncpoly", base=base, depth=depth)

    # -- raw coordinate codecs ----------------------------------------------

    def coords(self, x: int):
        """Canonical coordinate vector over the prime field (or the residue)."""
        if self.kind == "zmod":
            return (x,)
        if self.kind == "gf":
            out = []
            for _ in range(self.m):
                out.append(x % self.p)
                x //= self.p
            return tuple(out)
        out = []
        q = self.base.size
        for _ in range(self.depth):
            out.append(x % q)
            x //= q
        return tuple(out)

    def _from_coords(self, coords) -> int:
        if self.kind == "zmod":
            return coords[0] % self.size
        if self.kind == "gf":
            x = 0
            for c in reversed(coords):
                x = x * self.p + (c % self.p)
            return x
        x = 0
        for c in reversed(coords):
            x = x * self.base.size + c
        return x

    # -- arithmetic ----------------------------------------------------------

    def _add_raw(self, a: int, b: int) -> int:
        if self.kind == "zmod":
            return (a + b) % self.size
        if self.kind == "gf":
            ca, cb = self.coords(a), self.coords(b)
            return self._from_coords(tuple((x + y) % self.p for x, y in zip(ca, cb)))
        ca, cb = self.coords(a), self.coords(b)
        return self._from_coords(tuple(self.base.add(x, y) for x, y in zip(ca, cb)))

    def _mul_raw(self, a: int, b: int) -> int:
        if self.kind == "zmod":
            return (a * b) % self.size
        if self.kind == "gf":
            pa = _poly_trim(self.coords(a))
            pb = _poly_trim(self.coords(b))
            if not pa or not pb:
                return 0
            prod = _poly_mulmod(pa, pb, self.modulus, self.p)
            return self._from_coords(prod + (0,) * (self.m - len(prod)))
        ca, cb = self.coords(a), self.coords(b)
        out = [0] * self.depth
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    if i + j < self.depth and y:
                        out[i + j] = self.base.add(out[i + j], self.base.mul(x, y))
        return self._from_coords(out)

    def _build_tables(self):
        n = self.size
        self._add_t = self._mul_t = None
        if n <= self.TABLE_LIMIT:
            import numpy as np

            add = np.zeros((n, n), dtype=np.int32)
            mul = np.zeros((n, n), dtype=np.int32)
            for a in range(n):
                for b in range(a, n):
                    s = self._add_raw(a, b)
                    m = self._mul_raw(a, b)
                    add[a, b] = add[b, a] = s
                    mul[a, b] = mul[b, a] = m
            self._add_t, self._mul_t = add, mul
        self._neg_t = [self._neg_raw(a) for a in range(n)] if n <= self.TABLE_LIMIT else None
        self._unit = [self._is_unit_raw(a) for a in range(n)] if n <= self.TABLE_LIMIT else None
        self._inv_t = None
        if n <= self.TABLE_LIMIT:
            inv = [0] * n
            for a in range(n):
                if self._unit[a]:
                    inv[a] = self._inv_raw(a)
            self._inv_t = inv

    def _neg_raw(self, a: int) -> int:
        if self.kind == "zmod":
            return (-a) % self.size
        if self.kind == "gf":
            return self._from_coords(tuple((-c) % self.p for c in self.coords(a)))
        return self._from_coords(tuple(self.base.neg(c) for c in self.coords(a)))

    def _is_unit_raw(self, a: int) -> bool:
        return self.residue(a) != 0

    def _inv_raw(self, a: int) -> int:
        if self.kind == "zmod":
            return pow(a, -1, self.size)
        if self.kind == "gf":
            return self.pow(a, self.size - 2)
        # truncpoly: geometric series around the constant term
        ca = self.coords(a)
        c0 = ca[0]
        u = self._from_coords((self.base.inv(c0),) + (0,) * (self.depth - 1))
        nilpart = self.sub(self.mul(u, a), 1)   # u*a = 1 + n with n nilpotent
        acc, term = 1, 1
        for _ in range(1, self.depth):
            term = self.mul(term, self.neg(nilpart))
            acc = self.add(acc, term)
        return self.mul(u, acc)

    def add(self, a: int, b: int) -> int:
        if self._add_t is not None:
            return int(self._add_t[a, b])
        return self._add_raw(a, b)

    def mul(self, a: int, b: int) -> int:
        if self._mul_t is not None:
            return int(self._mul_t[a, b])
        return self._mul_raw(a, b)

    def neg(self, a: int) -> int:
        if self._neg_t is not None:
            return self._neg_t[a]
        return self._neg_raw(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def is_unit(self, a: int) -> bool:
        if self._unit is not None:
            return self._unit[a]
        return self._is_unit_raw(a)

    def inv(self, a: int) -> int:
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{self.format_element(a)} is not a unit")
        if self._inv_t is not None:
            return self._inv_t[a]
        return self._inv_raw(a)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> R."""
        n %= self.char
        x = 0
        for _ in range(n):
            x = self.add(x, 1)
        return x

    # -- structure -----------------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind == "gf" or (self.kind == "zmod" and self.k == 1)

    def elements(self):
        return range(self.size)

    def units(self):
        return [a for a in range(self.size) if self.is_unit(a)]

    def maximal_ideal(self):
        return [a for a in range(self.size) if not self.is_unit(a)]

    @property
    def residue_ring(self) -> "Ring":
        if self.is_field:
            return self
        if self.kind == "zmod":
            if not hasattr(self, "_res"):
                self._res = Ring.zmod(self.p)
            return self._res
        return self.base

    def residue(self, a: int) -> int:
        """Image in the residue field (an element index of residue_ring)."""
        if self.is_field:
            return a
        if self.kind == "zmod":
            return a % self.p
        return self.coords(a)[0]

    def units_group(self) -> "UnitsGroup":
        if self._units_group is None:
            self._units_group = UnitsGroup(self)
        return self._units_group

    # -- formatting ----------------------------------------------------------

    def format_element(self, x: int) -> str:
        if self.kind == "zmod":
            return str(x)
        if self.kind == "gf":
            if self.m == 1:
                return str(x)
            terms = []
            for i, c in enumerate(self.coords(x)):
                if not c:
                    continue
                if i == 0:
                    terms.append(str(c))
                else:
                    var = "a" if i == 1 else f"a^{i}"
                    terms.append(var if c == 1 else f"{c}*{var}")
            return "+".join(reversed(terms)) if terms else "0"
        terms = []
        for j, c in enumerate(self.coords(x)):
            if c == 0:
                continue
            cs = self.base.format_element(c)
            if j == 0:
                terms.append(cs)
            else:
                var = "t" if j == 1 else f"t^{j}"
                cs = var if cs == "1" else f"({cs})*{var}"
                terms.append(cs)
        return "+".join(terms) if terms else "0"

    def descriptor(self) -> str:
        if self.kind == "zmod":
            return f"zmod({self.size})" if self.k > 1 else f"gf({self.p})"
        if self.kind == "gf":
            return f"gf({self.size})"
        return f"truncpoly({self.base.descriptor()}, {self.depth})"

    def __repr__(self):
        return f"Ring({self.descriptor()}, {self.size} elements)"

    def __eq__(self, other):
        return isinstance(other, Ring) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def key(self):
        if self.kind == "zmod":
            return ("zmod", self.size)
        if self.kind == "gf":
            return ("gf", self.p, self.m, self.modulus)
        return ("truncpoly", self.base.key(), self.depth)


def parse_ring(desc: str) -> Ring:
    """Parse a ring descriptor: gf(q), gf(q, poly=...), zmod(n), truncpoly(b, m)."""
    s = desc.strip().replace(" ", "")
    if s.startswith("gf(") and s.endswith(")"):
        body = s[3:-1]
        if "poly=" in body:
            qs, polys = body.split(",poly=")
            coeffs = [int(c) for c in polys.strip("[]()").split(",")]
            return Ring.gf(int(qs), coeffs)
        return Ring.gf(int(body))
    if s.startswith("zmod(") and s.endswith(")"):
        return Ring.zmod(int(s[5:-1]))
    if s.startswith("truncpoly(") and s.endswith(")"):
        body = s[10:-1]
        depth = body.rsplit(",", 1)
        base = parse_ring(depth[0])
        return Ring.truncpoly(base, int(depth[1]))
    raise ValueError(f"cannot parse ring descriptor {desc!r}")


@lru_cache(maxsize=None)
def cached_ring(desc: str) -> Ring:
    return parse_ring(desc)


# ---------------------------------------------------------------------------


class UnitsGroup:
    """R^x as an abelian group: invariant factors, generators, discrete logs."""

    def __init__(self, ring: Ring):
        self.ring = ring
        units = ring.units()
        self.order = len(units)
        gens: list[int] = []
        span: dict[int, tuple[int, ...]] = {1: ()}
        relations: list[list[int]] = []
        for x in units:
            if x in span:
                continue
            # minimal t with x^t inside the current span
            t = 1
            xt = x
            while xt not in span:
                t += 1
                xt = ring.mul(xt, x)
            base_vec = span[xt]
            new_span: dict[int, tuple[int, ...]] = {}
            for y, vec in span.items():
                pw = y
                for s in range(t):
                    new_span[pw] = vec + (s,)
                    pw = ring.mul(pw, x)
            relations = [rel + [0] for rel in relations]
            relations.append([-c for c in base_vec] + [t])
            gens.append(x)
            span = new_span
        # canonicalize via Smith form of the relation lattice
        k = len(gens)
        rel = IntMatrix(k, len(relations))
        for j, col in enumerate(relations):
            for i, v in enumerate(col):
                if v:
                    rel[i, j] = v
        snf = smith_normal_form(rel, want_transforms=True)
        diag = list(snf.diag) + [0] * (k - snf.rank)
        assert all(d for d in diag), "units group of a finite ring is finite"
        keep = [i for i, d in enumerate(diag) if d != 1]
        self.factors = tuple(diag[i] for i in keep)
        row_ops = snf.row_ops
        self._dlog: dict[int, tuple[int, ...]] = {}
        for u, vec in span.items():
            dense = {i: v for i, v in enumerate(vec) if v}
            y = _apply_ops_to_vector(row_ops, dense)
            self._dlog[u] = tuple(y.get(i, 0) % diag[i] for i in keep)
        self.generators = []
        for j in keep:
            col = _apply_inverse_ops_to_vector(row_ops, {j: 1})
            g = 1
            for i, e in col.items():
                g = ring.mul(g, ring.pow(gens[i], e))
            self.generators.append(g)
        # sanity: generators realize the canonical coordinates
        for gi, g in enumerate(self.generators):
            want = tuple(1 if i == gi else 0 for i in range(len(keep)))
            assert self._dlog[g] == want, "discrete log table inconsistent"
        total = 1
        for d in self.factors:
            total *= d
        assert total == self.order

    def dlog(self, x: int) -> tuple[int, ...]:
        return self._dlog[x]

    def element_from_dlog(self, vec) -> int:
        g = 1
        for gen, e, d in zip(self.generators, vec, self.factors):
            g = self.ring.mul(g, self.ring.pow(gen, e % d))
        return g

    def __repr__(self):
        return f"UnitsGroup({self.ring.descriptor()}, factors={self.factors})"
