"""Group homology via the normalized bar complex.

Three computation paths share one coordinate interface:

  * bar_homology     -- honest bar-complex Smith forms (any group in budget);
  * AbelianBasis     -- closed form for abelian groups through the tensor
                        product of one small periodic complex per cyclic
                        factor, with explicit comparison maps both ways, so
                        every homology class has usable bar-chain coordinates;
  * GenericBasis     -- kernel/image Smith forms with coordinates, for
                        nonabelian groups of modest order.

On top of the coordinate interface: homology with coefficients, transfers
(restriction maps) at chain level, and the Sylow stable-element method.
"""

from __future__ import annotations

from itertools import product

from .budgets import BUDGETS, BudgetError
from .barchains import (BarChain, bar_boundary, bar_of_standard, shuffle_product,
                        standard_lift)
from .groups import (FiniteGroup, Subgroup, abelian_structure, cyclic_group,
                     double_coset_reps, left_coset_reps, p_part, sylow_subgroup)
from .intlinalg import (AbGroup, ColumnEchelon, IntMatrix, LatticeSolver,
                        _apply_inverse_ops_to_vector, _apply_ops_to_vector,
                        cokernel, kernel_basis, smith_normal_form)


# ---------------------------------------------------------------------------
# bar complex matrices


def bar_dim(order: int, degree: int) -> int:
    return (order - 1) ** degree if degree > 0 else 1


def tuple_to_index(t: tuple[int, ...], order: int) -> int:
    idx = 0
    for g in t:
        idx = idx * (order - 1) + (g - 1)
    return idx


def index_to_tuple(idx: int, order: int, degree: int) -> tuple[int, ...]:
    out = []
    for _ in range(degree):
        out.append(idx % (order - 1) + 1)
        idx //= order - 1
    return tuple(reversed(out))


def boundary_matrix(group: FiniteGroup, degree: int) -> IntMatrix:
    """The bar differential C_degree -> C_{degree-1} as an integer matrix."""
    n = group.order
    rows = bar_dim(n, degree - 1)
    cols = bar_dim(n, degree)
    if degree == 1:
        return IntMatrix(rows, cols)   # normalized d_1 = 0
    m = IntMatrix(rows, cols)
    for idx in range(cols):
        t = index_to_tuple(idx, n, degree)
        col: dict[int, int] = {}

        def put(face: tuple[int, ...], sign: int):
            if all(g != 0 for g in face):
                r = tuple_to_index(face, n)
                col[r] = col.get(r, 0) + sign

        put(t[1:], 1)
        sign = 1
        for i in range(degree - 1):
            sign = -sign
            put(t[:i] + (group.mul(t[i], t[i + 1]),) + t[i + 2:], sign)
        put(t[:-1], 1 if degree % 2 == 0 else -1)
        for r, v in col.items():
            if v:
                m.entries[(r, idx)] = v
    return m


def chain_to_vector(chain: BarChain) -> dict[int, int]:
    n = chain.group.order
    return {tuple_to_index(t, n): c for t, c in chain.terms.items()}


def _check_bar_budget(group: FiniteGroup, degree: int):
    if degree >= 3 and group.order > BUDGETS.bar_order_deg3:
        raise BudgetError(
            f"bar homology in degree {degree} capped at order "
            f"{BUDGETS.bar_order_deg3}; try the stable-element method")
    if degree == 2 and group.order > BUDGETS.bar_order_deg2:
        raise BudgetError(
            f"bar homology in degree 2 capped at order {BUDGETS.bar_order_deg2}")


def bar_homology(group: FiniteGroup, degree: int) -> AbGroup:
    """H_degree(G, Z) straight from the normalized bar complex."""
    if degree == 0:
        return AbGroup(1, ())
    if degree > 3:
        raise BudgetError("bar homology implemented for degrees <= 3")
    _check_bar_budget(group, degree)
    d_n = boundary_matrix(group, degree)
    d_n1 = boundary_matrix(group, degree + 1)
    snf_up = smith_normal_form(d_n1)
    rank_n = smith_normal_form(d_n).rank
    nullity = d_n.cols - rank_n
    torsion = [d for d in snf_up.diag if d > 1]
    return AbGroup.from_diagonal(torsion, nullity - snf_up.rank)


# ---------------------------------------------------------------------------
# canonical quotient coordinates (shared by both coordinate paths)


class _QuotientCoords:
    """Z^r modulo an image lattice, with canonical coordinates via Smith form."""

    def __init__(self, r: int, image_cols: list[dict[int, int]]):
        self.r = r
        y = IntMatrix.from_columns(r, image_cols)
        snf = smith_normal_form(y, want_transforms=True)
        diag = list(snf.diag)
        self.row_ops = snf.row_ops
        self.moduli = []          # per kept coordinate: d > 1, or 0 for free
        self.kept = []            # indices into the transformed coordinates
        for i in range(r):
            d = diag[i] if i < len(diag) else 0
            if d == 1:
                continue
            self.kept.append(i)
            self.moduli.append(d)
        self.ab = AbGroup.from_diagonal([d for d in self.moduli if d],
                                        sum(1 for d in self.moduli if d == 0))

    def coords(self, y: dict[int, int]) -> tuple[int, ...]:
        c = _apply_ops_to_vector(self.row_ops, y)
        out = []
        for i, d in zip(self.kept, self.moduli):
            v = c.get(i, 0)
            out.append(v % d if d else v)
        return tuple(out)

    def generator_vector(self, j: int) -> dict[int, int]:
        return _apply_inverse_ops_to_vector(self.row_ops, {self.kept[j]: 1})

    @property
    def ncoords(self) -> int:
        return len(self.kept)


# ---------------------------------------------------------------------------
# abelian path: tensor product of periodic complexes


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _carry(a: int, b: int, d: int) -> int:
    return 1 if a + b >= d else 0


def _psi_cyclic(d: int, exps: tuple[int, ...]) -> int:
    """Comparison map from the bar complex of Z/d to its periodic complex."""
    p = len(exps)
    if p == 0:
        return 1
    if p == 1:
        return exps[0]
    if p == 2:
        return _carry(exps[0], exps[1], d)
    if p == 3:
        e, f, g = exps
        c1 = _carry(f, g, d)
        c2 = _carry((e + f) % d, g, d)
        c3 = _carry(e, (f + g) % d, d)
        c4 = _carry(e, f, d)
        return (c1 * (e + (f + g) % d) - c2 * ((e + f + g) % d)
                + c3 * ((e + f + g) % d) - c4 * ((e + f) % d))
    raise ValueError("comparison map implemented through degree 3")


class AbelianBasis:
    """Homology coordinates for an abelian group in degrees 1..3."""

    def __init__(self, group: FiniteGroup, degree: int):
        assert group.is_abelian
        if not 1 <= degree <= 3:
            raise ValueError("degrees 1..3 only")
        self.group = group
        self.degree = degree
        self.factors, self.gens, self.dlog = abelian_structure(group)
        k = len(self.factors)
        self.comps_n = list(_compositions(degree, k))
        self.comps_n1 = list(_compositions(degree + 1, k))
        self.comps_nm1 = list(_compositions(degree - 1, k))
        self.idx_n = {m: i for i, m in enumerate(self.comps_n)}
        self.idx_nm1 = {m: i for i, m in enumerate(self.comps_nm1)}
        d_n = self._differential(self.comps_n, self.idx_nm1)
        d_n1 = self._differential(self.comps_n1, self.idx_n)
        kern = kernel_basis(d_n)
        self._kernel = kern
        self._ksolve = LatticeSolver(
            IntMatrix.from_columns(len(self.comps_n),
                                   [{i: v[i] for i in range(len(v)) if v[i]}
                                    for v in kern]))
        image_cols = []
        for col in d_n1.columns():
            dense = [0] * len(self.comps_n)
            for i, v in col.items():
                dense[i] = v
            x = self._ksolve.solve(dense)
            assert x is not None
            image_cols.append({i: v for i, v in enumerate(x) if v})
        self._q = _QuotientCoords(len(kern), image_cols)
        self.ab = self._q.ab

    def _differential(self, comps, idx_lower) -> IntMatrix:
        m = IntMatrix(len(idx_lower), len(comps))
        for j, comp in enumerate(comps):
            sign_acc = 0
            for i, p in enumerate(comp):
                if p >= 2 and p % 2 == 0:
                    lower = comp[:i] + (p - 1,) + comp[i + 1:]
                    sign = -1 if sign_acc % 2 else 1
                    m.add_at(idx_lower[lower], j, sign * self.factors[i])
                sign_acc += p
        return m

    # -- comparison map bar -> periodic tensor complex ----------------------

    def psi(self, chain: BarChain, degree: int | None = None) -> dict[int, int]:
        degree = chain.degree if degree is None else degree
        comps = {m: i for i, m in enumerate(_compositions(degree, len(self.factors)))}
        out: dict[int, int] = {}
        for t, c in chain.terms.items():
            logs = [self.dlog[g] for g in t]
            for m, mi in comps.items():
                val = c
                pos = 0
                for i, p in enumerate(m):
                    if p > 3:
                        val = 0
                        break
                    leg = tuple(logs[pos + r][i] for r in range(p))
                    pos += p
                    v = _psi_cyclic(self.factors[i], leg)
                    val *= v
                    if val == 0:
                        break
                if val:
                    out[mi] = out.get(mi, 0) + val
        return {i: v for i, v in out.items() if v}

    # -- standard chains per factor and their shuffle assembly --------------

    def _standard_chain(self, i: int, p: int) -> BarChain:
        g = self.group
        t = self.gens[i]
        d = self.factors[i]
        if p == 0:
            return BarChain(g, 0, {(): 1})
        if p == 1:
            return BarChain(g, 1, {(t,): 1})
        if p == 2:
            ch = BarChain(g, 2)
            pw = 0
            for _ in range(d):
                ch.add_term((pw, t), 1)
                pw = g.mul(pw, t)
            return ch
        if p == 3:
            ch = BarChain(g, 3)
            pw = 0
            for _ in range(d):
                ch.add_term((t, pw, t), 1)
                pw = g.mul(pw, t)
            return ch
        raise ValueError("standard chains through degree 3 only")

    def phi(self, comp: tuple[int, ...]) -> BarChain:
        """Explicit bar chain realizing one basis cell of the small complex."""
        chain = None
        for i, p in enumerate(comp):
            if p == 0:
                continue
            leg = self._standard_chain(i, p)
            chain = leg if chain is None else shuffle_product(chain, leg)
        if chain is None:
            chain = BarChain(self.group, 0, {(): 1})
        return chain

    # -- coordinate interface ------------------------------------------------

    def coords(self, chain: BarChain) -> tuple[int, ...]:
        vec = self.psi(chain)
        dense = [0] * len(self.comps_n)
        for i, v in vec.items():
            dense[i] = v
        y = self._ksolve.solve(dense)
        if y is None:
            raise ValueError("chain is not a cycle")
        return self._q.coords({i: v for i, v in enumerate(y) if v})

    def generator(self, j: int) -> BarChain:
        yvec = self._q.generator_vector(j)
        chain = BarChain(self.group, self.degree)
        for kidx, coeff in yvec.items():
            kvec = self._kernel[kidx]
            for ci, cval in enumerate(kvec):
                if cval:
                    chain = chain + self.phi(self.comps_n[ci]).scale(coeff * cval)
        return chain

    def is_zero(self, chain: BarChain) -> bool:
        return all(v == 0 for v in self.coords(chain))


# ---------------------------------------------------------------------------
# generic path


class GenericBasis:
    """Homology coordinates straight from kernel/image lattices of the bar complex."""

    def __init__(self, group: FiniteGroup, degree: int):
        if degree < 1:
            raise ValueError("degree >= 1")
        _check_bar_budget(group, degree)
        self.group = group
        self.degree = degree
        n = group.order
        d_n = boundary_matrix(group, degree)
        rows = d_n.rows
        ech = ColumnEchelon()
        cols = d_n.columns()
        for j in range(d_n.cols):
            aug = dict(cols[j])
            aug[rows + j] = 1
            ech.insert(aug)
        self._kpivots = {}
        for r, col in sorted(ech.pivots.items()):
            if r >= rows:
                self._kpivots[r - rows] = {i - rows: v for i, v in col.items()
                                           if i >= rows}
        self._kernel_order = sorted(self._kpivots)
        self._kindex = {r: i for i, r in enumerate(self._kernel_order)}
        d_n1 = boundary_matrix(group, degree + 1)
        img = ColumnEchelon()
        for col in d_n1.columns():
            img.insert(col)
        image_cols = []
        for r in sorted(img.pivots):
            image_cols.append(self._kernel_coords(img.pivots[r]))
        self._q = _QuotientCoords(len(self._kpivots), image_cols)
        self.ab = self._q.ab

    def _kernel_coords(self, vec: dict[int, int]) -> dict[int, int]:
        """Back-substitute a cycle vector against the kernel echelon."""
        vec = dict(vec)
        out: dict[int, int] = {}
        while vec:
            r = min(vec)
            piv = self._kpivots.get(r)
            if piv is None or vec[r] % piv[r]:
                raise ValueError("vector is not in the cycle lattice")
            q = vec[r] // piv[r]
            out[self._kindex[r]] = q
            for i, v in piv.items():
                nv = vec.get(i, 0) - q * v
                if nv:
                    vec[i] = nv
                else:
                    vec.pop(i, None)
        return out

    def coords(self, chain: BarChain) -> tuple[int, ...]:
        return self._q.coords(self._kernel_coords(chain_to_vector(chain)))

    def generator(self, j: int) -> BarChain:
        yvec = self._q.generator_vector(j)
        chain = BarChain(self.group, self.degree)
        n = self.group.order
        for yi, coeff in yvec.items():
            piv = self._kpivots[self._kernel_order[yi]]
            for ci, cval in piv.items():
                chain.add_term(index_to_tuple(ci, n, self.degree), coeff * cval)
        return chain

    def is_zero(self, chain: BarChain) -> bool:
        return all(v == 0 for v in self.coords(chain))


_basis_cache: dict[tuple[int, int], object] = {}


def homology_basis(group: FiniteGroup, degree: int):
    """Coordinate system for H_degree(group); cached per group object."""
    key = (id(group), degree)
    hb = _basis_cache.get(key)
    if hb is None:
        hb = (AbelianBasis(group, degree) if group.is_abelian
              else GenericBasis(group, degree))
        _basis_cache[key] = hb
        _basis_cache.setdefault(("keepalive", id(group)), group)
    return hb


def abelian_homology(group: FiniteGroup, degree: int):
    """Closed-form homology of an abelian group with explicit generator cycles.

    Returns (AbGroup, [BarChain generators]).
    """
    if degree == 0:
        return AbGroup(1, ()), []
    hb = AbelianBasis(group, degree)
    gens = [hb.generator(j) for j in range(hb._q.ncoords)]
    return hb.ab, gens


def class_of_cycle(group: FiniteGroup, chain: BarChain) -> tuple[int, ...]:
    """Coordinates of a cycle in the canonical decomposition of its homology."""
    if not bar_boundary(chain).is_zero:
        raise ValueError("chain is not a cycle")
    return homology_basis(group, chain.degree).coords(chain)


# ---------------------------------------------------------------------------
# coefficients


class GModule:
    """A finitely generated abelian group with an integer action of a group.

    The module is presented on len(torsion)+free_rank generators; actions is
    a dict {generator element index: action matrix} over the group's chosen
    generators.
    """

    def __init__(self, group: FiniteGroup, ab: AbGroup, actions: dict[int, IntMatrix]):
        self.group = group
        self.ab = ab
        self.k = len(ab.torsion) + ab.free_rank
        self.moduli = list(ab.torsion) + [0] * ab.free_rank
        self._gen_actions = dict(actions)
        self._element_actions: list[IntMatrix | None] = [None] * group.order
        ident = IntMatrix(self.k, self.k)
        for i in range(self.k):
            ident[i, i] = 1
        self._element_actions[0] = ident
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g, mat in self._gen_actions.items():
                    y = group.mul(g, x)
                    if self._element_actions[y] is None:
                        self._element_actions[y] = mat.matmul(self._element_actions[x])
                        nxt.append(y)
            frontier = nxt
        if any(a is None for a in self._element_actions):
            raise ValueError("action generators do not generate the group")
        if group.order <= 512:
            for x in range(group.order):
                for g, mat in self._gen_actions.items():
                    y = group.mul(g, x)
                    prod = mat.matmul(self._element_actions[x])
                    diff = _mat_sub(prod, self._element_actions[y])
                    if not self._lattice_zero(diff):
                        raise ValueError("action matrices do not respect the group law")

    def _lattice_zero(self, m: IntMatrix) -> bool:
        for (i, _), v in m.entries.items():
            d = self.moduli[i]
            if d == 0 or v % d:
                if v:
                    return False
        return True

    def action(self, element: int) -> IntMatrix:
        return self._element_actions[element]


def _mat_sub(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    out = IntMatrix(a.rows, a.cols)
    for ij, v in a.entries.items():
        out.add_at(*ij, v)
    for ij, v in b.entries.items():
        out.add_at(ij[0], ij[1], -v)
    return out


def coinvariants(module: GModule) -> AbGroup:
    """H_0(G, M): cokernel of the stacked (g - 1) columns plus torsion relations."""
    k = module.k
    cols = []
    for g, mat in module._gen_actions.items():
        for j in range(k):
            col: dict[int, int] = {}
            for i in range(k):
                v = mat[i, j] - (1 if i == j else 0)
                if v:
                    col[i] = v
            cols.append(col)
    for i, d in enumerate(module.moduli):
        if d:
            cols.append({i: d})
    return cokernel(IntMatrix.from_columns(k, cols))


def module_homology(group: FiniteGroup, module: GModule, degree: int) -> AbGroup:
    """H_degree(G, M) from the normalized bar complex with coefficients."""
    if degree == 0:
        return coinvariants(module)
    if degree > 2:
        raise BudgetError("module homology implemented for degrees <= 2")
    n = group.order
    k = module.k

    def cdim(d):
        return bar_dim(n, d) * k

    def gen_index(tidx, b):
        return tidx * k + b

    def diff(d) -> IntMatrix:
        m = IntMatrix(cdim(d - 1), cdim(d))
        if d == 0:
            return IntMatrix(0, k)
        for tidx in range(bar_dim(n, d)):
            t = index_to_tuple(tidx, n, d)
            act = module.action(group.inv(t[0]))
            face0 = t[1:]
            face0_ok = all(g != 0 for g in face0)
            f0 = tuple_to_index(face0, n) if face0_ok else 0
            for b in range(k):
                col = gen_index(tidx, b)
                if face0_ok:
                    for i in range(k):
                        v = act[i, b]
                        if v:
                            m.add_at(gen_index(f0, i), col, v)
                sign = 1
                for i in range(d - 1):
                    sign = -sign
                    merged = t[:i] + (group.mul(t[i], t[i + 1]),) + t[i + 2:]
                    if all(g != 0 for g in merged):
                        m.add_at(gen_index(tuple_to_index(merged, n), b), col, sign)
                last = t[:-1]
                m.add_at(gen_index(tuple_to_index(last, n), b), col,
                         1 if d % 2 == 0 else -1)
        return m

    def torsion_rel(d) -> list[dict[int, int]]:
        cols = []
        for tidx in range(bar_dim(n, d)):
            for b, db in enumerate(module.moduli):
                if db:
                    cols.append({gen_index(tidx, b): db})
        return cols

    d_n = diff(degree)
    d_n1 = diff(degree + 1)
    rel_lower = torsion_rel(degree - 1)
    rel_here = torsion_rel(degree)
    # cycles: x with d_n x inside the relation lattice one degree down
    blk = IntMatrix(cdim(degree - 1), cdim(degree) + len(rel_lower))
    for (i, j), v in d_n.entries.items():
        blk[i, j] = v
    for jj, col in enumerate(rel_lower):
        for i, v in col.items():
            blk[i, cdim(degree) + jj] = -v
    kern = kernel_basis(blk)
    kmat_cols = []
    for vec in kern:
        col = {i: vec[i] for i in range(cdim(degree)) if vec[i]}
        if col:
            kmat_cols.append(col)
    ech = ColumnEchelon()
    for col in kmat_cols:
        ech.insert(col)
    kb = [ech.pivots[r] for r in sorted(ech.pivots)]
    kmat = IntMatrix.from_columns(cdim(degree), kb)
    solver = LatticeSolver(kmat)
    quots = []
    for col in d_n1.columns() + rel_here:
        dense = [0] * cdim(degree)
        for i, v in col.items():
            dense[i] = v
        x = solver.solve(dense)
        assert x is not None, "boundaries must be cycles"
        quots.append({i: v for i, v in enumerate(x) if v})
    return cokernel(IntMatrix.from_columns(kmat.cols, quots))


# ---------------------------------------------------------------------------
# transfers


def restrict_chain(chain: BarChain, sub: Subgroup) -> BarChain:
    """Chain-level transfer H_n(G) -> H_n(H) along the coset-section chain map."""
    g = sub.parent
    assert chain.group is g
    reps = left_coset_reps(g, sub)
    rep_of = [0] * g.order
    for r in reps:
        for a in sub.embed:
            rep_of[g.mul(r, a)] = r
    out = BarChain(sub, chain.degree)
    for t, c in chain.terms.items():
        h = standard_lift(t, g)
        for r in reps:
            shifted = tuple(g.mul(x, r) for x in h)
            bar_entries = []
            overlined = tuple(g.mul(g.inv(rep_of[x]), x) for x in shifted)
            word = bar_of_standard(overlined, g)
            out.add_term(tuple(sub.restrict_index(x) for x in word), c)
    return out


def corestrict_chain(chain: BarChain, parent: FiniteGroup) -> BarChain:
    """Induced map H_n(H) -> H_n(G) for a subgroup chain (just the inclusion)."""
    sub = chain.group
    assert isinstance(sub, Subgroup) and sub.parent is parent
    return chain.map_entries(lambda i: sub.embed[i], parent)


def conjugate_chain(chain: BarChain, g: int, target: Subgroup) -> BarChain:
    """Push a chain over a subgroup through conjugation by g into g H g^-1."""
    sub = chain.group
    parent = sub.parent
    out = BarChain(target, chain.degree)
    for t, c in chain.terms.items():
        word = tuple(target.restrict_index(parent.conjugate(g, sub.embed[x]))
                     for x in t)
        out.add_term(word, c)
    return out


def reindex_chain(chain: BarChain, to_parent, target: Subgroup) -> BarChain:
    """Reindex a chain via an entry map to parent indices of `target`."""
    out = BarChain(target, chain.degree)
    for t, c in chain.terms.items():
        out.add_term(tuple(target.restrict_index(to_parent(x)) for x in t), c)
    return out


# ---------------------------------------------------------------------------
# stable elements


def stable_element_homology(group: FiniteGroup, p: int, degree: int,
                            sylow: Subgroup | None = None) -> AbGroup:
    """The p-primary part of H_degree(group) by the stable-element method."""
    syl = sylow if sylow is not None else sylow_subgroup(group, p)
    if syl.order == 1:
        return AbGroup.zero()
    hb = homology_basis(syl, degree)
    kk = hb.ab
    ncoords = len(kk.torsion) + kk.free_rank
    assert kk.free_rank == 0, "homology of a finite group is torsion in degree > 0"
    if ncoords == 0:
        return AbGroup.zero()
    gens = [hb.generator(j) for j in range(ncoords)]
    moduli = list(kk.torsion)
    constraint_rows: list[dict[int, int]] = []
    constraint_mods: list[int] = []
    syl_set = set(syl.embed)
    for g in double_coset_reps(group, syl):
        if g in syl.to_sub:
            continue
        conj_set = {group.conjugate(g, x) for x in syl.embed}
        common = sorted(syl_set & conj_set)
        if len(common) == 1:
            continue
        ksub = Subgroup(group, common)
        hbk = homology_basis(ksub, degree)
        nk = len(hbk.ab.torsion)
        if nk == 0:
            continue
        syl_g = group.conjugate_subgroup(syl, g)
        k_in_p = Subgroup(syl, sorted(syl.to_sub[x] for x in common))
        k_in_pg = Subgroup(syl_g, sorted(syl_g.to_sub[x] for x in common))
        cols_a = []
        cols_b = []
        for z in gens:
            ra = restrict_chain(z, k_in_p)
            cols_a.append(hbk.coords(view_as_subgroup(ra, k_in_p, ksub)))
            zg = conjugate_chain(z, g, syl_g)
            rb = restrict_chain(zg, k_in_pg)
            cols_b.append(hbk.coords(view_as_subgroup(rb, k_in_pg, ksub)))
        for row in range(nk):
            rowvec = {}
            for j in range(ncoords):
                v = cols_a[j][row] - cols_b[j][row]
                if v:
                    rowvec[j] = v
            if rowvec:
                constraint_rows.append(rowvec)
                constraint_mods.append(hbk.ab.torsion[row])
    # invariant sublattice: x with C x = 0 modulo the per-row moduli
    nrows = len(constraint_rows)
    blk = IntMatrix(nrows, ncoords + nrows)
    for i, rowvec in enumerate(constraint_rows):
        for j, v in rowvec.items():
            blk[i, j] = v
        blk[i, ncoords + i] = constraint_mods[i]
    kern = kernel_basis(blk)
    ech = ColumnEchelon()
    for vec in kern:
        col = {i: vec[i] for i in range(ncoords) if vec[i]}
        if col:
            ech.insert(col)
    for j, d in enumerate(moduli):
        ech.insert({j: d})
    lat = [ech.pivots[r] for r in sorted(ech.pivots)]
    lmat = IntMatrix.from_columns(ncoords, lat)
    solver = LatticeSolver(lmat)
    rel_cols = []
    for j, d in enumerate(moduli):
        dense = [0] * ncoords
        dense[j] = d
        x = solver.solve(dense)
        assert x is not None
        rel_cols.append({i: v for i, v in enumerate(x) if v})
    return cokernel(IntMatrix.from_columns(lmat.cols, rel_cols))


def homology_by_stable_elements(group: FiniteGroup, degree: int) -> AbGroup:
    """H_degree(group) assembled from its p-primary parts over p | |G|."""
    out = AbGroup.zero()
    n = group.order
    p = 2
    while p <= n:
        if n % p == 0:
            out = out.direct_sum(stable_element_homology(group, p, degree))
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    return out


# ---------------------------------------------------------------------------
# induced actions on homology


def homology_action_matrix(hb, entry_map) -> IntMatrix:
    """Matrix of a chain-map-inducing entry map on homology coordinates."""
    ncoords = len(hb.ab.torsion) + hb.ab.free_rank
    m = IntMatrix(ncoords, ncoords)
    for j in range(ncoords):
        z = hb.generator(j)
        image = z.map_entries(entry_map)
        for i, v in enumerate(hb.coords(image)):
            if v:
                m[i, j] = v
    return m


def homology_module(hb, acting: FiniteGroup, entry_map_for) -> GModule:
    """H_n as a module over an acting group; entry_map_for(g) maps entries."""
    actions = {}
    gens = _group_generators(acting)
    for g in gens:
        actions[g] = homology_action_matrix(hb, entry_map_for(g))
    return GModule(acting, hb.ab, actions)


def _group_generators(group: FiniteGroup) -> list[int]:
    """A small generating set found greedily."""
    gens: list[int] = []
    span = {0}
    for x in range(group.order):
        if x not in span:
            gens.append(x)
            span = set(group.closure(gens))
            if len(span) == group.order:
                break
    return gens
