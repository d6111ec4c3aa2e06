"""Sparse exact integer linear algebra.

Everything downstream (presentations, homology, exactness checks) reduces to
four primitives over arbitrary-precision integers:

  * smith_normal_form -- invariant factors, optionally with unimodular
    transforms recorded as operation logs;
  * cokernel          -- Z^rows / column span, reported canonically;
  * kernel_basis      -- a basis of the (saturated) integer kernel lattice;
  * LatticeSolver     -- membership and exact preimages in a column lattice.

Matrices are hyper-sparse (boundary maps have <= n+2 entries per column), so
elimination uses dict-of-dicts storage with Markowitz-style pivoting.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .budgets import BUDGETS, BudgetError


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class IntMatrix:
    """Sparse integer matrix; no zero entries are stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict | None = None):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], int] = {}
        if entries:
            for (i, j), v in entries.items():
                self[i, j] = v

    @classmethod
    def from_dense(cls, data) -> "IntMatrix":
        m = cls(len(data), len(data[0]) if data else 0)
        for i, row in enumerate(data):
            for j, v in enumerate(row):
                if v:
                    m.entries[(i, j)] = int(v)
        return m

    @classmethod
    def from_columns(cls, rows: int, columns: list[dict[int, int]]) -> "IntMatrix":
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    m.entries[(i, j)] = v
        return m

    def __getitem__(self, ij):
        return self.entries.get(ij, 0)

    def __setitem__(self, ij, v):
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        if v:
            self.entries[ij] = int(v)
        else:
            self.entries.pop(ij, None)

    def add_at(self, i: int, j: int, v: int) -> None:
        self[i, j] = self.entries.get((i, j), 0) + v

    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self):
        d = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            d[i][j] = v
        return d

    def column(self, j: int) -> dict[int, int]:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def columns(self) -> list[dict[int, int]]:
        out = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def transpose(self) -> "IntMatrix":
        t = IntMatrix(self.cols, self.rows)
        for (i, j), v in self.entries.items():
            t.entries[(j, i)] = v
        return t

    def matvec(self, x) -> list[int]:
        y = [0] * self.rows
        for (i, j), v in self.entries.items():
            if x[j]:
                y[i] += v * x[j]
        return y

    def vecmat(self, x) -> list[int]:
        y = [0] * self.cols
        for (i, j), v in self.entries.items():
            if x[i]:
                y[j] += v * x[i]
        return y

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = IntMatrix(self.rows, other.cols)
        bycol: dict[int, list[tuple[int, int]]] = {}
        for (i, j), v in self.entries.items():
            bycol.setdefault(j, []).append((i, v))
        for (k, j), w in other.entries.items():
            for i, v in bycol.get(k, ()):
                out.add_at(i, j, v * w)
        return out

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def write_matrixmarket(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("%%MatrixMarket matrix coordinate integer general\n")
            fh.write(f"{self.rows} {self.cols} {self.nnz()}\n")
            for (i, j) in sorted(self.entries):
                fh.write(f"{i + 1} {j + 1} {self.entries[(i, j)]}\n")

    @classmethod
    def read_matrixmarket(cls, path: str) -> "IntMatrix":
        with open(path) as fh:
            header = fh.readline()
            if "coordinate" not in header or "integer" not in header:
                raise ValueError("unsupported MatrixMarket header: " + header.strip())
            line = fh.readline()
            while line.startswith("%"):
                line = fh.readline()
            r, c, _ = map(int, line.split())
            m = cls(r, c)
            for line in fh:
                if not line.strip():
                    continue
                i, j, v = line.split()
                m[int(i) - 1, int(j) - 1] = int(v)
        return m


# ---------------------------------------------------------------------------
# abelian groups as invariant factors


def _invariant_chain(diag: list[int]) -> tuple[int, ...]:
    """Canonical divisibility chain from an arbitrary multiset of moduli."""
    factored: dict[int, list[int]] = {}
    for d in diag:
        d = abs(d)
        if d in (0, 1):
            continue
        n, p = d, 2
        while p * p <= n:
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                factored.setdefault(p, []).append(e)
            p += 1 if p == 2 else 2
        if n > 1:
            factored.setdefault(n, []).append(1)
    if not factored:
        return ()
    width = max(len(v) for v in factored.values())
    chain = [1] * width
    for p, exps in factored.items():
        exps = sorted(exps)
        for k, e in enumerate(exps):
            chain[width - len(exps) + k] *= p**e
    return tuple(c for c in chain if c > 1)


@dataclass(frozen=True)
class AbGroup:
    """A finitely generated abelian group in canonical invariant-factor form."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"not a divisibility chain: {self.torsion}")
        if any(d < 2 for d in self.torsion):
            raise ValueError(f"invalid invariant factor in {self.torsion}")

    @classmethod
    def from_diagonal(cls, diag, free_rank: int = 0) -> "AbGroup":
        return cls(free_rank, _invariant_chain(list(diag)))

    @classmethod
    def zero(cls) -> "AbGroup":
        return cls(0, ())

    @classmethod
    def cyclic(cls, n: int) -> "AbGroup":
        if n == 0:
            return cls(1, ())
        return cls(0, (n,)) if n > 1 else cls(0, ())

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def direct_sum(self, other: "AbGroup") -> "AbGroup":
        return AbGroup(self.free_rank + other.free_rank,
                       _invariant_chain(list(self.torsion) + list(other.torsion)))

    def primary_part(self, p: int) -> "AbGroup":
        diag = []
        for d in self.torsion:
            q = 1
            while d % p == 0:
                d //= p
                q *= p
            if q > 1:
                diag.append(q)
        return AbGroup.from_diagonal(diag)

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# operation logs for unimodular transforms

# ops: ("swap", i, j) | ("add", i, j, c)  row_i += c*row_j  | ("neg", i)


def _apply_ops_to_vector(ops, vec: dict[int, int]) -> dict[int, int]:
    """Apply a row-op log to a sparse vector (vector transforms like U @ v)."""
    v = dict(vec)
    for op in ops:
        if op[0] == "swap":
            _, i, j = op
            vi, vj = v.get(i, 0), v.get(j, 0)
            if vj:
                v[i] = vj
            else:
                v.pop(i, None)
            if vi:
                v[j] = vi
            else:
                v.pop(j, None)
        elif op[0] == "add":
            _, i, j, c = op
            if v.get(j, 0):
                w = v.get(i, 0) + c * v[j]
                if w:
                    v[i] = w
                else:
                    v.pop(i, None)
        else:
            _, i = op
            if v.get(i, 0):
                v[i] = -v[i]
    return v


def _ops_matrix(ops, n: int) -> IntMatrix:
    """Materialize a row-op log as the unimodular matrix it applies."""
    m = IntMatrix(n, n)
    rows = {i: {i: 1} for i in range(n)}
    for op in ops:
        if op[0] == "swap":
            _, i, j = op
            rows[i], rows[j] = rows[j], rows[i]
        elif op[0] == "add":
            _, i, j, c = op
            ri = rows[i]
            for k, v in rows[j].items():
                w = ri.get(k, 0) + c * v
                if w:
                    ri[k] = w
                else:
                    ri.pop(k, None)
        else:
            _, i = op
            rows[i] = {k: -v for k, v in rows[i].items()}
    for i, row in rows.items():
        for k, v in row.items():
            m.entries[(i, k)] = v
    return m


def _apply_inverse_ops_to_vector(ops, vec: dict[int, int]) -> dict[int, int]:
    """Apply the inverse of a row-op log (replay reversed, ops inverted)."""
    v = dict(vec)
    for op in reversed(ops):
        if op[0] == "swap":
            _, i, j = op
            vi, vj = v.get(i, 0), v.get(j, 0)
            if vj:
                v[i] = vj
            else:
                v.pop(i, None)
            if vi:
                v[j] = vi
            else:
                v.pop(j, None)
        elif op[0] == "add":
            _, i, j, c = op
            if v.get(j, 0):
                w = v.get(i, 0) - c * v[j]
                if w:
                    v[i] = w
                else:
                    v.pop(i, None)
        else:
            _, i = op
            if v.get(i, 0):
                v[i] = -v[i]
    return v


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass
class SmithForm:
    """Diagonal invariants of M together with recorded transforms.

    D = U @ M @ V, with U, V unimodular.  Transforms are kept as operation
    logs and materialized only on request.
    """

    diag: tuple[int, ...]
    rows: int
    cols: int
    row_ops: list | None = None
    col_ops: list | None = None

    @property
    def rank(self) -> int:
        return len(self.diag)

    def U(self) -> IntMatrix:
        if self.row_ops is None:
            raise ValueError("transforms were not requested")
        return _ops_matrix(self.row_ops, self.rows)

    def V(self) -> IntMatrix:
        if self.col_ops is None:
            raise ValueError("transforms were not requested")
        # col ops on M correspond to row ops on M^T; V = (ops on I)^T
        return _ops_matrix(self.col_ops, self.cols).transpose()

    def D(self) -> IntMatrix:
        d = IntMatrix(self.rows, self.cols)
        for k, v in enumerate(self.diag):
            d.entries[(k, k)] = v
        return d

    def group(self, extra_free: int = 0) -> AbGroup:
        return AbGroup.from_diagonal(self.diag, self.rows - self.rank + extra_free)


class _SparseElim:
    """Shared row/column elimination state with optional op recording."""

    def __init__(self, m: IntMatrix, record: bool):
        self.rowd: dict[int, dict[int, int]] = {}
        self.colr: dict[int, set[int]] = {}
        for (i, j), v in m.entries.items():
            self.rowd.setdefault(i, {})[j] = v
            self.colr.setdefault(j, set()).add(i)
        self.nrows = m.rows
        self.ncols = m.cols
        self.row_ops: list | None = [] if record else None
        self.col_ops: list | None = [] if record else None
        self.nnz = m.nnz()
        self.maxbits = BUDGETS.matrix_entry_bits
        self.dirty_cols: set[int] = set()

    def _check(self, v: int):
        if v.bit_length() > self.maxbits:
            raise BudgetError("matrix entry exceeded bit-size cap")
        if self.nnz > BUDGETS.matrix_nnz:
            raise BudgetError("matrix fill-in exceeded cap")

    def row_add(self, i: int, j: int, c: int):
        """row_i += c * row_j"""
        ri = self.rowd.setdefault(i, {})
        colr = self.colr
        dirty = self.dirty_cols
        get = ri.get
        for col, v in self.rowd.get(j, {}).items():
            w = get(col, 0) + c * v
            if w:
                if col not in ri:
                    colr.setdefault(col, set()).add(i)
                    dirty.add(col)
                    self.nnz += 1
                ri[col] = w
            elif col in ri:
                del ri[col]
                colr[col].discard(i)
                dirty.add(col)
                self.nnz -= 1
        self._check(c)
        if self.row_ops is not None:
            self.row_ops.append(("add", i, j, c))

    def col_add(self, i: int, j: int, c: int):
        """col_i += c * col_j"""
        dirty = self.dirty_cols
        for row in list(self.colr.get(j, set())):
            v = self.rowd[row][j]
            w = self.rowd[row].get(i, 0) + c * v
            if w:
                if i not in self.rowd[row]:
                    self.colr.setdefault(i, set()).add(row)
                    dirty.add(i)
                    self.nnz += 1
                self.rowd[row][i] = w
            elif i in self.rowd[row]:
                del self.rowd[row][i]
                self.colr[i].discard(row)
                dirty.add(i)
                self.nnz -= 1
        self._check(c)
        if self.col_ops is not None:
            self.col_ops.append(("add", i, j, c))

    def row_combine(self, i: int, j: int, a: int, b: int, c: int, d: int):
        """(row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j); ad-bc = +-1."""
        cols = set(self.rowd.get(i, {})) | set(self.rowd.get(j, {}))
        ri = self.rowd.setdefault(i, {})
        rj = self.rowd.setdefault(j, {})
        for col in cols:
            vi = ri.get(col, 0)
            vj = rj.get(col, 0)
            wi = a * vi + b * vj
            wj = c * vi + d * vj
            for (row, rd, w, old) in ((i, ri, wi, vi), (j, rj, wj, vj)):
                if w:
                    if not old:
                        self.colr.setdefault(col, set()).add(row)
                        self.nnz += 1
                    rd[col] = w
                    self._check(w)
                elif old:
                    del rd[col]
                    self.colr[col].discard(row)
                    self.nnz -= 1
        if self.row_ops is not None:
            # decompose the 2x2 unimodular combine into elementary ops:
            # U = [[a, b], [c, d]] acting on rows (i, j)
            self.row_ops.append(("combine2", i, j, a, b, c, d))

    def row_swap(self, i: int, j: int):
        ri = self.rowd.pop(i, {})
        rj = self.rowd.pop(j, {})
        if rj:
            self.rowd[i] = rj
        if ri:
            self.rowd[j] = ri
        for c in ri:
            self.colr[c].discard(i)
            self.colr[c].add(j)
        for c in rj:
            self.colr[c].discard(j)
            self.colr[c].add(i)
        # entries present in both rows were toggled twice; redo them exactly
        for c in set(ri) & set(rj):
            self.colr[c].add(i)
            self.colr[c].add(j)
        if self.row_ops is not None:
            self.row_ops.append(("swap", i, j))

    def col_swap(self, i: int, j: int):
        rows = self.colr.get(i, set()) | self.colr.get(j, set())
        for r in rows:
            rd = self.rowd[r]
            vi, vj = rd.pop(i, None), rd.pop(j, None)
            if vj is not None:
                rd[i] = vj
            if vi is not None:
                rd[j] = vi
        ci = self.colr.pop(i, set())
        cj = self.colr.pop(j, set())
        if cj:
            self.colr[i] = cj
        if ci:
            self.colr[j] = ci
        if self.col_ops is not None:
            self.col_ops.append(("swap", i, j))

    def row_neg(self, i: int):
        for c, v in self.rowd.get(i, {}).items():
            self.rowd[i][c] = -v
        if self.row_ops is not None:
            self.row_ops.append(("neg", i))

    def col_combine(self, i: int, j: int, a: int, b: int, c: int, d: int):
        """(col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j)."""
        rows = set(self.colr.get(i, set())) | set(self.colr.get(j, set()))
        for row in rows:
            rd = self.rowd[row]
            vi = rd.get(i, 0)
            vj = rd.get(j, 0)
            wi = a * vi + b * vj
            wj = c * vi + d * vj
            for (col, w, old) in ((i, wi, vi), (j, wj, vj)):
                if w:
                    if not old:
                        self.colr.setdefault(col, set()).add(row)
                        self.nnz += 1
                    rd[col] = w
                    self._check(w)
                elif old:
                    del rd[col]
                    self.colr[col].discard(row)
                    self.nnz -= 1
        if self.col_ops is not None:
            self.col_ops.append(("combine2", i, j, a, b, c, d))


def _expand_combines(ops):
    """Rewrite combine2 ops as elementary swap/add/neg ops."""
    out = []
    for op in ops:
        if op[0] != "combine2":
            out.append(op)
            continue
        _, i, j, a, b, c, d = op
        # Find elementary sequence for [[a,b],[c,d]] (det +-1) acting on (i, j).
        # Use integer row reduction of the 2x2 itself, recording inverse ops.
        m = [[a, b], [c, d]]
        seq = []
        # reduce m to identity-ish by elementary ops; record what we do
        while m[1][0]:
            if m[0][0] and abs(m[0][0]) <= abs(m[1][0]):
                q = m[1][0] // m[0][0]
                m[1][0] -= q * m[0][0]
                m[1][1] -= q * m[0][1]
                seq.append(("add", 1, 0, -q))
            else:
                m[0], m[1] = m[1], m[0]
                seq.append(("swap",))
        if m[0][0] < 0:
            m[0][0], m[0][1] = -m[0][0], -m[0][1]
            seq.append(("neg", 0))
        # now m = [[1, t], [0, e]] with e = +-1
        t = m[0][1]
        if t:
            m[0][1] = 0
            seq.append(("add", 0, 1, -t * (1 if m[1][1] > 0 else -1)))
        if m[1][1] < 0:
            seq.append(("neg", 1))
        # seq reduces [[a,b],[c,d]] to I, so [[a,b],[c,d]] = inverse(seq)
        inv = []
        for s in reversed(seq):
            if s[0] == "swap":
                inv.append(("swap", i, j))
            elif s[0] == "neg":
                inv.append(("neg", i if s[1] == 0 else j))
            else:
                _, r, o, cc = s
                ri = i if r == 0 else j
                oi = i if o == 0 else j
                inv.append(("add", ri, oi, -cc))
        out.extend(inv)
    return out


def _pick_pivot(el: _SparseElim, heap, score_cap: int | None = None):
    """Markowitz-style pivot among unit entries; magnitude-first otherwise.

    Unit (+-1) pivots never trigger gcd churn, so fill-in is the only cost and
    the Markowitz score governs.  Without a unit entry, magnitude comes first
    to keep coefficient growth polynomial.  Candidate columns come from a lazy
    heap keyed by column fill; stale entries are skipped and reinserted.
    """
    import heapq

    best_unit = best_unit_key = None
    best_other = best_other_key = None
    stash = []
    scanned = 0
    while heap:
        nnz, c = heapq.heappop(heap)
        rows = el.colr.get(c)
        if not rows:
            continue
        if nnz != len(rows):
            heapq.heappush(heap, (len(rows), c))
            continue
        stash.append((nnz, c))
        cn = nnz - 1
        for r in rows:
            v = el.rowd[r][c]
            rn = len(el.rowd[r]) - 1
            if v == 1 or v == -1:
                key = (rn * cn, r, c)
                if best_unit_key is None or key < best_unit_key:
                    best_unit_key, best_unit = key, (r, c)
            else:
                key = (abs(v), rn * cn, r, c)
                if best_other_key is None or key < best_other_key:
                    best_other_key, best_other = key, (r, c)
        scanned += 1
        if best_unit_key is not None and (best_unit_key[0] == 0 or scanned >= 24):
            break
        if best_unit_key is None and scanned >= 96 and best_other_key is not None:
            break
    for item in stash:
        heapq.heappush(heap, item)
    if score_cap is not None:
        if best_unit_key is not None and best_unit_key[0] <= score_cap:
            return best_unit
        return None
    return best_unit if best_unit is not None else best_other


def _nearest_quot(w: int, v: int) -> int:
    """Quotient q minimizing |w - q*v| (v > 0)."""
    q, rem = divmod(w, v)
    if 2 * rem > v:
        q += 1
    return q


def _smith_eliminate(el: _SparseElim,
                     score_cap: int | None = None) -> list[tuple[int, int, int]]:
    """Diagonalize in place; returns pivot positions with their values.

    Per pivot, Euclidean descent: reduce the pivot column/row by symmetric
    remainders, swapping the smallest remainder into the pivot seat.  Only
    quotient multiples of single rows/columns are ever added, which keeps
    coefficient growth tame.  With score_cap, stops once the cheapest unit
    pivot would exceed the fill score (the caller finishes another way).
    """
    import heapq

    diag = []
    heap = [(len(rows), c) for c, rows in el.colr.items() if rows]
    heapq.heapify(heap)
    while True:
        piv = _pick_pivot(el, heap, score_cap)
        if piv is None:
            break
        r, c = piv
        if el.rowd[r][c] < 0:
            el.row_neg(r)
        while True:
            # clear column c by row reductions
            while True:
                v = el.rowd[r][c]
                best_i, best_w = None, None
                for i in list(el.colr[c]):
                    if i == r:
                        continue
                    q = _nearest_quot(el.rowd[i][c], v)
                    if q:
                        el.row_add(i, r, -q)
                    w = el.rowd.get(i, {}).get(c, 0)
                    if w and (best_w is None or abs(w) < best_w):
                        best_i, best_w = i, abs(w)
                if best_i is None:
                    break
                el.row_swap(r, best_i)
                if el.rowd[r][c] < 0:
                    el.row_neg(r)
            # clear row r by column reductions
            while True:
                v = el.rowd[r][c]
                best_j, best_w = None, None
                for j in list(el.rowd[r]):
                    if j == c:
                        continue
                    q = _nearest_quot(el.rowd[r][j], v)
                    if q:
                        el.col_add(j, c, -q)
                    w = el.rowd[r].get(j, 0)
                    if w and (best_w is None or abs(w) < best_w):
                        best_j, best_w = j, abs(w)
                if best_j is None:
                    break
                el.col_swap(c, best_j)
                if el.rowd[r][c] < 0:
                    el.row_neg(r)
            if len(el.colr[c]) == 1 and len(el.rowd[r]) == 1:
                break
        diag.append((r, c, el.rowd[r][c]))
        del el.rowd[r]
        el.colr[c].clear()
        el.dirty_cols.discard(c)
        for j in el.dirty_cols:
            rows = el.colr.get(j)
            if rows:
                heapq.heappush(heap, (len(rows), j))
        el.dirty_cols.clear()
    return diag


def _dense_snf_array(a) -> list[int]:
    """Smith diagonal of a dense numpy integer array (int64 or object).

    Min-magnitude pivoting with symmetric-remainder reduction; escalates to
    exact object dtype when int64 entries threaten to overflow.
    """
    import numpy as np

    if a.size == 0:
        return []
    exact = a.dtype == object
    diag = []
    top = 0
    GUARD = 2**55
    nr, nc = a.shape
    while top < min(nr, nc):
        while True:
            sub = a[top:, top:]
            nz = np.nonzero(sub)
            if len(nz[0]) == 0:
                return diag
            vals = np.abs(sub[nz])
            k = int(np.argmin(vals))
            pi, pj = int(nz[0][k]) + top, int(nz[1][k]) + top
            if pi != top:
                a[[top, pi], :] = a[[pi, top], :]
            if pj != top:
                a[:, [top, pj]] = a[:, [pj, top]]
            if a[top, top] < 0:
                a[top, :] = -a[top, :]
            v = int(a[top, top])
            col = a[top + 1:, top]
            row = a[top, top + 1:]
            colany = col.any()
            if not colany and not row.any():
                break
            if not exact:
                mx = int(np.abs(a[top:, top:]).max())
                if mx > GUARD or mx * (mx // max(v, 1) + 1) > 2**62:
                    a = a.astype(object)
                    exact = True
                    continue
            if colany:
                q = (col + (v // 2)) // v
                if q.any():
                    a[top + 1:, :] -= np.outer(q, a[top, :])
            row = a[top, top + 1:]
            if row.any():
                q = (row + (v // 2)) // v
                if q.any():
                    a[:, top + 1:] -= np.outer(a[:, top], q)
            if not a[top + 1:, top].any() and not a[top, top + 1:].any():
                break
        diag.append(int(a[top, top]))
        top += 1
    return diag


def _row_lattice_finish(el: _SparseElim) -> list[int]:
    """Invariant factors of the live submatrix via a dense row-lattice echelon.

    Inserts every live row into an integer row echelon over the (narrow) live
    column set, then runs the dense Smith routine on the echelon.  Exact:
    int64 fast path with escalation to Python-int object arrays.
    """
    import numpy as np

    live_cols = sorted(c for c, rows in el.colr.items() if rows)
    if not live_cols:
        return []
    w = len(live_cols)
    cmap = {c: j for j, c in enumerate(live_cols)}
    ech: list = [None] * w
    exact = False
    GUARD = 2**55

    def escalate():
        nonlocal exact
        for j in range(w):
            if ech[j] is not None:
                ech[j] = ech[j].astype(object)
        exact = True

    rows = [rd for rd in el.rowd.values() if rd]
    rows.sort(key=lambda rd: (len(rd), min(cmap[c] for c in rd)))
    seen: set = set()
    for rd in rows:
        key = tuple(sorted((cmap[c], v) for c, v in rd.items()))
        if key in seen:
            continue
        seen.add(key)
        vec = np.zeros(w, dtype=object if exact else np.int64)
        big = False
        for c, v in rd.items():
            vec[cmap[c]] = v
            if abs(v) > GUARD:
                big = True
        if big and not exact:
            escalate()
            vec = vec.astype(object)
        start = 0
        while True:
            nz = np.nonzero(vec[start:])[0]
            if len(nz) == 0:
                break
            j = start + int(nz[0])
            start = j
            piv = ech[j]
            if piv is None:
                if vec[j] < 0:
                    vec = -vec
                ech[j] = vec.astype(object) if exact else vec
                break
            p = int(piv[j])
            v = int(vec[j])
            if not exact:
                mx = max(int(np.abs(vec).max()), int(np.abs(piv).max()))
                if mx > GUARD or (abs(v) // p + 1) * mx > 2**62:
                    escalate()
                    vec = vec.astype(object)
                    piv = ech[j]
            if v % p == 0:
                vec = vec - (v // p) * piv
            else:
                g, x, y = xgcd(p, v)
                newp = x * piv + y * vec
                vec = (p // g) * vec - (v // g) * piv
                ech[j] = newp
    basis = [r for r in ech if r is not None]
    if not basis:
        return []
    a = np.array([list(r) for r in basis],
                 dtype=object if exact else np.int64)
    return _dense_snf_array(a)


def smith_normal_form(m: IntMatrix, want_transforms: bool = False) -> SmithForm:
    """Smith normal form with d1 | d2 | ... | dr, all positive.

    With want_transforms, row/column operations are recorded so that
    U @ M @ V = D can be reconstructed and verified.
    """
    if not want_transforms:
        # orient the narrow side as columns, run the sparse phase while unit
        # pivots are cheap, then finish over the remaining narrow row lattice
        work = m.transpose() if m.rows < m.cols else m
        el = _SparseElim(work, False)
        vals = []
        for cap in (512, 4096, 32768, None):
            vals.extend(v for (_, _, v) in _smith_eliminate(el, score_cap=cap))
            live_c = sum(1 for c, rows in el.colr.items() if rows)
            if live_c == 0:
                break
            if live_c <= 64:
                vals.extend(_row_lattice_finish(el))
                break
        chain = _invariant_chain(vals)
        full = (1,) * (len(vals) - len(chain)) + chain
        return SmithForm(full, m.rows, m.cols)

    el = _SparseElim(m, want_transforms)
    pivots = _smith_eliminate(el)

    # Move pivots onto the leading diagonal in order.
    row_ops = _expand_combines(el.row_ops)
    col_ops = _expand_combines(el.col_ops)
    perm_rows = {}
    perm_cols = {}
    diag_vals = []
    for k, (r, c, v) in enumerate(pivots):
        perm_rows[k] = r
        perm_cols[k] = c
        diag_vals.append(v)

    # realize the permutation with swaps
    def permute(ops, mapping, n):
        cur = list(range(n))
        pos = {x: i for i, x in enumerate(cur)}
        for target, source in mapping.items():
            i = pos[source]
            if i != target:
                a, b = cur[target], cur[i]
                cur[target], cur[i] = b, a
                pos[a], pos[b] = i, target
                ops.append(("swap", target, i))

    permute(row_ops, perm_rows, m.rows)
    permute(col_ops, perm_cols, m.cols)

    # sign fix and divisibility fix on the leading diagonal
    vals = list(diag_vals)
    for k, v in enumerate(vals):
        if v < 0:
            vals[k] = -v
            row_ops.append(("neg", k))
    changed = True
    while changed:
        changed = False
        for a in range(len(vals)):
            for b in range(a + 1, len(vals)):
                if vals[b] % vals[a]:
                    da, db = vals[a], vals[b]
                    g, x, y = xgcd(da, db)
                    lcm = da // g * db
                    # col_a += col_b ; then 2x2 row/col combine to diag(g, lcm)
                    col_ops.append(("add", a, b, 1))
                    row_ops.append(("combine2", a, b, x, y, -(db // g), da // g))
                    # after row combine: [[g, y*db], [0, lcm*sign]] -> clear (a,b)
                    col_ops.append(("add", b, a, -(y * db // g)))
                    if (da // g) * db < 0:
                        row_ops.append(("neg", b))
                    vals[a], vals[b] = g, lcm
                    changed = True
    row_ops = _expand_combines(row_ops)
    col_ops = _expand_combines(col_ops)
    return SmithForm(tuple(vals), m.rows, m.cols, row_ops, col_ops)


def rank(m: IntMatrix) -> int:
    return smith_normal_form(m).rank


def cokernel(m: IntMatrix) -> AbGroup:
    """Z^rows / (column span of m), canonical."""
    snf = smith_normal_form(m)
    return snf.group()


# ---------------------------------------------------------------------------
# column echelon / lattice membership


class ColumnEchelon:
    """Incremental integer column echelon of a growing set of columns.

    Pivot columns are indexed by their topmost nonzero row.  The column span
    of the inserted vectors equals the span of the pivot columns.
    """

    __slots__ = ("pivots", "stop_row")

    def __init__(self, stop_row: int | None = None):
        self.pivots: dict[int, dict[int, int]] = {}
        # rows >= stop_row are "tracking" rows: reduction stops there
        self.stop_row = stop_row

    def reduce(self, col: dict[int, int]) -> dict[int, int]:
        col = {i: v for i, v in col.items() if v}
        while col:
            r = min(col)
            if self.stop_row is not None and r >= self.stop_row:
                break
            p = self.pivots.get(r)
            if p is None:
                break
            pv = p[r]
            v = col[r]
            if v % pv == 0:
                q = v // pv
                for i, w in p.items():
                    nv = col.get(i, 0) - q * w
                    if nv:
                        col[i] = nv
                    else:
                        col.pop(i, None)
            else:
                g, x, y = xgcd(pv, v)
                newp = {}
                for i in set(p) | set(col):
                    w = x * p.get(i, 0) + y * col.get(i, 0)
                    if w:
                        newp[i] = w
                newc = {}
                for i in set(p) | set(col):
                    w = (pv // g) * col.get(i, 0) - (v // g) * p.get(i, 0)
                    if w:
                        newc[i] = w
                self.pivots[r] = newp
                col = newc
        return col

    def insert(self, col: dict[int, int]) -> bool:
        """Insert a column; returns True if it enlarged the lattice."""
        rem = self.reduce(col)
        if rem:
            r = min(rem)
            if rem[r] < 0:
                rem = {i: -v for i, v in rem.items()}
            self.pivots[r] = rem
            return True
        return False

    def contains(self, col: dict[int, int]) -> bool:
        saved = dict(self.pivots)
        rem = self.reduce(col)
        ok = not rem
        if rem:
            # reduce() may have mixed pivot columns; that keeps the lattice
            # equal, so no restore is strictly needed, but keep it tidy.
            self.pivots = saved
        return ok

    def rank(self) -> int:
        return len(self.pivots)


class LatticeSolver:
    """Solve M @ x = v exactly, or decide that v is outside the column lattice.

    Built once per matrix; each pivot column carries tracking coordinates so
    preimages are recovered without storing a full transform matrix.
    """

    def __init__(self, m: IntMatrix):
        self.rows = m.rows
        self.cols = m.cols
        ech = ColumnEchelon(stop_row=m.rows)
        for j, col in enumerate(m.columns()):
            aug = dict(col)
            aug[m.rows + j] = 1
            rem = ech.reduce(aug)
            if rem and min(rem) < m.rows:
                r = min(rem)
                if rem[r] < 0:
                    rem = {i: -v for i, v in rem.items()}
                ech.pivots[r] = rem
        self._ech = ech

    def solve(self, v) -> list[int] | None:
        if not isinstance(v, dict):
            v = {i: int(x) for i, x in enumerate(v) if x}
        col = dict(v)
        combo: dict[int, int] = {}
        while col:
            live = [r for r in col if r < self.rows]
            if not live:
                break
            r = min(live)
            p = self._ech.pivots.get(r)
            if p is None:
                return None
            pv = p[r]
            if col[r] % pv:
                return None
            q = col[r] // pv
            for i, w in p.items():
                nv = col.get(i, 0) - q * w
                if nv:
                    col[i] = nv
                else:
                    col.pop(i, None)
        if any(r < self.rows and v for r, v in col.items()):
            return None
        x = [0] * self.cols
        for r, v in col.items():
            if r >= self.rows and v:
                x[r - self.rows] = -v
        return x

    def contains(self, v) -> bool:
        return self.solve(v) is not None

    def image_rank(self) -> int:
        return len([r for r in self._ech.pivots if r < self.rows])


def kernel_basis(m: IntMatrix) -> list[list[int]]:
    """Basis of the integer kernel lattice {x : Mx = 0} (always saturated)."""
    ech = ColumnEchelon()
    kernel: list[list[int]] = []
    cols = m.columns()
    for j in range(m.cols):
        aug = dict(cols[j])
        aug[m.rows + j] = 1
        ech.insert(aug)
    for r, col in sorted(ech.pivots.items()):
        if r >= m.rows:
            vec = [0] * m.cols
            for i, v in col.items():
                vec[i - m.rows] = v
            kernel.append(vec)
    return kernel


def lattice_coordinates(m: IntMatrix, v) -> list[int] | None:
    """One-shot membership + preimage; use LatticeSolver for repeated queries."""
    return LatticeSolver(m).solve(v)


def bareiss_rank(dense) -> int:
    """Fraction-free Gaussian elimination rank (independent oracle for tests)."""
    a = [list(map(int, row)) for row in dense]
    if not a or not a[0]:
        return 0
    nr, nc = len(a), len(a[0])
    prev = 1
    r = 0
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == nr:
            break
    return r
