"""Pre-Bloch and Bloch groups, K2 presentations, torsion bookkeeping.

The pre-Bloch group of a finite local ring R is presented on symbols [a] with
a and 1-a units, modulo one five-term column per ordered pair (a, b) with
a, 1-a, b, 1-b, a-b all units.  The symbol map sends [a] to a (x) (1-a) in the
sign-twisted quotient of the tensor square of R^x; its kernel is the Bloch
group.  All groups are computed exactly through integer Smith forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .intlinalg import AbGroup, IntMatrix, LatticeSolver, cokernel, kernel_basis
from .rings import Ring, UnitsGroup


@dataclass
class PresentedAbGroup:
    """Generators-with-labels plus a relation matrix (columns = relations)."""

    labels: list
    relations: IntMatrix
    _structure: AbGroup | None = field(default=None, repr=False)
    _solver: LatticeSolver | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.relations.rows != len(self.labels):
            raise ValueError("relation matrix rows must match generator count")

    @property
    def ngens(self) -> int:
        return len(self.labels)

    def structure(self) -> AbGroup:
        if self._structure is None:
            self._structure = cokernel(self.relations)
        return self._structure

    def solver(self) -> LatticeSolver:
        if self._solver is None:
            self._solver = LatticeSolver(self.relations)
        return self._solver

    def index_of(self, label) -> int:
        return self.labels.index(label)

    def is_zero_class(self, vec) -> bool:
        """Does the generator-coordinate vector map to 0 in the quotient?"""
        return self.solver().contains(vec)


class TensorSigma:
    """(R^x (x) R^x) / <x(x)y + y(x)x>, with evaluable pair coordinates.

    Generators are e[i,j] = u_i (x) u_j over the canonical generators u_i of
    the units group; pair coordinates come from discrete logs.
    """

    def __init__(self, units: UnitsGroup):
        self.units = units
        k = len(units.factors)
        self.k = k
        cols: list[dict[int, int]] = []
        # order relations of the tensor square of the units group
        for i in range(k):
            for j in range(k):
                cols.append({i * k + j: units.factors[i]})
                cols.append({i * k + j: units.factors[j]})
        # symmetry relators x(x)y + y(x)x on generator pairs
        for i in range(k):
            for j in range(k):
                col: dict[int, int] = {}
                col[i * k + j] = col.get(i * k + j, 0) + 1
                col[j * k + i] = col.get(j * k + i, 0) + 1
                cols.append(col)
        self.presented = PresentedAbGroup(
            [(i, j) for i in range(k) for j in range(k)],
            IntMatrix.from_columns(k * k, cols),
        )

    def pair_coords(self, x: int, y: int) -> list[int]:
        """Coordinates of x (x) y on the e[i,j] generator lattice."""
        lx = self.units.dlog(x)
        ly = self.units.dlog(y)
        k = self.k
        vec = [0] * (k * k)
        for i, a in enumerate(lx):
            if a:
                for j, b in enumerate(ly):
                    if b:
                        vec[i * k + j] += a * b
        return vec

    def structure(self) -> AbGroup:
        return self.presented.structure()

    def is_zero(self, vec) -> bool:
        return self.presented.is_zero_class(vec)


def tensor_sigma(units: UnitsGroup) -> TensorSigma:
    return TensorSigma(units)


# ---------------------------------------------------------------------------


def symbol_set(r: Ring) -> list[int]:
    """Elements a with a and 1-a both units, in canonical order."""
    return [a for a in r.elements() if r.is_unit(a) and r.is_unit(r.sub(1, a))]


def five_term_pairs(r: Ring) -> list[tuple[int, int]]:
    """Ordered pairs (a, b) with a, 1-a, b, 1-b, a-b all units."""
    syms = symbol_set(r)
    return [(a, b) for a in syms for b in syms if r.is_unit(r.sub(a, b))]


def five_term_entries(r: Ring, a: int, b: int) -> list[tuple[int, int]]:
    """The five symbols of the relation for (a, b), with signs."""
    one = 1
    inv_a, inv_b = r.inv(a), r.inv(b)
    return [
        (a, +1),
        (b, -1),
        (r.div(b, a), +1),
        (r.div(r.sub(one, inv_a), r.sub(one, inv_b)), -1),
        (r.div(r.sub(one, a), r.sub(one, b)), +1),
    ]


def pre_bloch_group(r: Ring) -> PresentedAbGroup:
    """The pre-Bloch group presentation of a finite local ring."""
    syms = symbol_set(r)
    index = {a: i for i, a in enumerate(syms)}
    cols = []
    for a, b in five_term_pairs(r):
        col: dict[int, int] = {}
        for sym, sign in five_term_entries(r, a, b):
            i = index[sym]
            col[i] = col.get(i, 0) + sign
        cols.append(col)
    return PresentedAbGroup(syms, IntMatrix.from_columns(len(syms), cols))


def lambda_map(r: Ring, pre: PresentedAbGroup, tensor: TensorSigma) -> IntMatrix:
    """Matrix of [a] -> a (x) (1-a) on generator coordinates.

    Verifies well-definedness: every five-term relator must land in the
    relation lattice of the target.
    """
    k2 = tensor.k * tensor.k
    cols = []
    for a in pre.labels:
        vec = tensor.pair_coords(a, r.sub(1, a))
        cols.append({i: v for i, v in enumerate(vec) if v})
    mat = IntMatrix.from_columns(k2, cols)
    for col in pre.relations.columns():
        image = [0] * k2
        for gen, coeff in col.items():
            for i, v in cols[gen].items():
                image[i] += coeff * v
        if not tensor.is_zero(image):
            raise AssertionError(
                "five-term relator does not map to zero; symbol map construction is broken"
            )
    return mat


def bloch_group(r: Ring) -> AbGroup:
    """B(R): kernel of the symbol map out of the pre-Bloch group."""
    pre = pre_bloch_group(r)
    if pre.ngens == 0:
        return AbGroup.zero()
    tensor = tensor_sigma(r.units_group())
    lam = lambda_map(r, pre, tensor)
    k2 = tensor.k * tensor.k
    # kernel lattice K = { x : lam @ x lies in the relation lattice of T }
    tcols = tensor.presented.relations.columns()
    block = IntMatrix(k2, pre.ngens + len(tcols))
    for (i, j), v in lam.entries.items():
        block[i, j] = v
    for jj, col in enumerate(tcols):
        for i, v in col.items():
            block[i, pre.ngens + jj] = -v
    kern = kernel_basis(block)
    kmat = IntMatrix.from_columns(pre.ngens,
                                  [{i: vec[i] for i in range(pre.ngens) if vec[i]}
                                   for vec in kern])
    # B = K / (five-term lattice), computed in K-coordinates
    solver = LatticeSolver(kmat)
    rel_in_k = []
    for col in pre.relations.columns():
        dense = [0] * pre.ngens
        for i, v in col.items():
            dense[i] = v
        x = solver.solve(dense)
        assert x is not None, "five-term lattice must sit inside the kernel lattice"
        rel_in_k.append({i: v for i, v in enumerate(x) if v})
    return cokernel(IntMatrix.from_columns(kmat.cols, rel_in_k))


# ---------------------------------------------------------------------------


def k2_presentations(r: Ring) -> tuple[AbGroup, AbGroup, AbGroup]:
    """Three symbol presentations on the tensor square of the units group.

    Returns (steinberg+symmetry, steinberg+minus, steinberg-only) as groups;
    the first two agree for local rings with residue field of size >= 3, and
    all three agree when the residue field has more than five elements.
    """
    units = r.units_group()
    tensor = TensorSigma(units)
    k = tensor.k
    k2 = k * k
    base_cols = []
    for i in range(k):
        for j in range(k):
            base_cols.append({i * k + j: units.factors[i]})
            base_cols.append({i * k + j: units.factors[j]})
    steinberg = []
    for a in symbol_set(r):
        vec = tensor.pair_coords(a, r.sub(1, a))
        steinberg.append({i: v for i, v in enumerate(vec) if v})
    symmetry = []
    minus = []
    for i in range(k):
        for j in range(k):
            col: dict[int, int] = {}
            col[i * k + j] = col.get(i * k + j, 0) + 1
            col[j * k + i] = col.get(j * k + i, 0) + 1
            symmetry.append(col)
    for b in r.units():
        vec = tensor.pair_coords(b, r.neg(b))
        minus.append({i: v for i, v in enumerate(vec) if v})

    def group(cols):
        return cokernel(IntMatrix.from_columns(k2, base_cols + cols))

    k2ms = group(steinberg + symmetry)
    k2m = group(steinberg + minus)
    k2m_simple = group(steinberg)
    return k2ms, k2m, k2m_simple


# ---------------------------------------------------------------------------


def tor_and_tilde(m: int) -> tuple[AbGroup, AbGroup, AbGroup]:
    """Torsion bookkeeping for cyclic unit groups of order m.

    Returns (tor, tilde, h1) where tor = Z/m is the torsion product of two
    cyclic groups of order m, tilde its extension by Z/2 (nontrivial exactly
    when m is even, in which case tilde = Z/2m), and h1 the first homology of
    the order-2 group acting by the swap on the 2-primary tensor square.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    tor = AbGroup.cyclic(m) if m > 1 else AbGroup.zero()
    tilde = AbGroup.cyclic(2 * m) if m % 2 == 0 else tor
    v = 1
    while m % (2 * v) == 0:
        v *= 2
    # swap acts as the identity on Z/v (x) Z/v; compute H_1 honestly
    from .groups import cyclic_group
    from .homology import GModule, module_homology

    if v == 1:
        h1 = AbGroup.zero()
    else:
        sigma2 = cyclic_group(2)
        mod = GModule(AbGroup(0, (v,)), [IntMatrix.from_dense([[1]])], sigma2)
        h1 = module_homology(sigma2, mod, 1)
    return tor, tilde, h1


def bw_order_check(q: int) -> bool:
    """Order consistency of the torsion extension, the Bloch group and q^2-1."""
    if q < 4:
        raise ValueError("q must be at least 4")
    _, tilde, _ = tor_and_tilde(q - 1)
    b = bloch_group(Ring.gf(q))
    t_order = tilde.order() or 1
    b_order = b.order()
    if b_order is None:
        return False
    return t_order * b_order == q * q - 1
