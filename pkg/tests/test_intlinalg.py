import random

from bloch_forge.intlinalg import (
    AbGroup,
    IntMatrix,
    LatticeSolver,
    bareiss_rank,
    cokernel,
    kernel_basis,
    lattice_coordinates,
    smith_normal_form,
)


def dense_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            out[i][j] = sum(a[i][t] * b[t][j] for t in range(k))
    return out


def test_snf_diag_2_3():
    d = smith_normal_form(IntMatrix.from_dense([[2, 0], [0, 3]])).diag
    assert d == (1, 6)


def test_snf_2x2_hand_elimination():
    # d1 = gcd of entries = 2, d1*d2 = |det| = 8
    d = smith_normal_form(IntMatrix.from_dense([[2, 4], [6, 8]])).diag
    assert d == (2, 4)


def test_snf_zero_matrix():
    assert smith_normal_form(IntMatrix(3, 5)).diag == ()


def test_snf_identity_rank():
    snf = smith_normal_form(IntMatrix.from_dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert snf.diag == (1, 1, 1)
    assert snf.rank == 3


def test_cokernel_examples():
    assert cokernel(IntMatrix(2, 0)) == AbGroup(2, ())
    assert cokernel(IntMatrix.from_dense([[2]])) == AbGroup(0, (2,))
    assert cokernel(IntMatrix.from_dense([[2, 0], [0, 3]])) == AbGroup(0, (6,))


def test_kernel_examples():
    assert kernel_basis(IntMatrix.from_dense([[1, 1]])) in ([[1, -1]], [[-1, 1]])
    assert kernel_basis(IntMatrix.from_dense([[1, 0], [0, 1]])) == []
    # solve 2a = b, b = 2c by hand: (1, 2, 1)
    ker = kernel_basis(IntMatrix.from_dense([[2, -1, 0], [0, 1, -2]]))
    assert len(ker) == 1
    v = ker[0]
    assert [abs(x) for x in v] == [1, 2, 1]


def test_lattice_coordinates_examples():
    m = IntMatrix.from_dense([[2]])
    assert lattice_coordinates(m, [4]) == [2]
    assert lattice_coordinates(m, [3]) is None


def test_lattice_solver_multicolumn():
    m = IntMatrix.from_dense([[2, 3], [0, 1]])
    s = LatticeSolver(m)
    x = s.solve([7, 1])
    assert x is not None
    assert m.matvec(x) == [7, 1]
    assert s.solve([1, 0]) is None


def random_sparse(rng, rows, cols, fill=0.2, bound=50):
    m = IntMatrix(rows, cols)
    for i in range(rows):
        for j in range(cols):
            if rng.random() < fill:
                v = rng.randint(-bound, bound)
                if v:
                    m[i, j] = v
    return m


def test_snf_reconstruction_and_divisibility_random():
    rng = random.Random(7)
    for trial in range(200):
        rows = rng.randint(1, 12) if trial < 150 else rng.randint(13, 40)
        cols = rng.randint(1, 12) if trial < 150 else rng.randint(13, 40)
        m = random_sparse(rng, rows, cols)
        snf = smith_normal_form(m, want_transforms=True)
        u = snf.U().to_dense()
        v = snf.V().to_dense()
        lhs = dense_mul(dense_mul(u, m.to_dense()), v)
        assert lhs == snf.D().to_dense()
        for a, b in zip(snf.diag, snf.diag[1:]):
            assert b % a == 0
        assert all(d > 0 for d in snf.diag)
        # rank cross-check against fraction-free elimination
        assert snf.rank == bareiss_rank(m.to_dense())
        # determinant of the transforms is +-1
        assert abs(det_int(u)) == 1
        assert abs(det_int(v)) == 1


def det_int(a):
    # Bareiss determinant for small dense integer matrices
    a = [row[:] for row in a]
    n = len(a)
    sign = 1
    prev = 1
    for c in range(n - 1):
        if a[c][c] == 0:
            for i in range(c + 1, n):
                if a[i][c]:
                    a[c], a[i] = a[i], a[c]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                a[i][j] = (a[c][c] * a[i][j] - a[i][c] * a[c][j]) // prev
            a[i][c] = 0
        prev = a[c][c]
    return sign * a[n - 1][n - 1]


def test_cokernel_invariant_under_unimodular_change():
    rng = random.Random(11)
    for _ in range(30):
        m = random_sparse(rng, 6, 6, fill=0.4, bound=8)
        snf = smith_normal_form(m, want_transforms=True)
        transformed = snf.U().matmul(m).matmul(snf.V())
        assert cokernel(m) == cokernel(transformed)


def test_kernel_vectors_annihilate_and_saturate():
    rng = random.Random(13)
    for _ in range(40):
        m = random_sparse(rng, 5, 9, fill=0.35, bound=9)
        ker = kernel_basis(m)
        for v in ker:
            assert m.matvec(v) == [0] * m.rows
        if ker:
            kmat = IntMatrix.from_dense([list(col) for col in zip(*ker)])
            snf = smith_normal_form(kmat)
            assert all(d == 1 for d in snf.diag)
        # kernel dimension complements the rank
        assert len(ker) + smith_normal_form(m).rank == m.cols


def test_solver_agrees_with_membership():
    rng = random.Random(17)
    for _ in range(40):
        m = random_sparse(rng, 5, 7, fill=0.4, bound=6)
        solver = LatticeSolver(m)
        x = [rng.randint(-4, 4) for _ in range(7)]
        v = m.matvec(x)
        got = solver.solve(v)
        assert got is not None
        assert m.matvec(got) == v


def test_matrixmarket_roundtrip(tmp_path):
    m = IntMatrix.from_dense([[0, 2, -1], [3, 0, 0]])
    path = tmp_path / "m.mtx"
    m.write_matrixmarket(str(path))
    back = IntMatrix.read_matrixmarket(str(path))
    assert back == m


def test_abgroup_canonical():
    assert AbGroup.from_diagonal([2, 3]) == AbGroup(0, (6,))
    assert AbGroup.from_diagonal([2, 2, 3]) == AbGroup(0, (2, 6))
    assert AbGroup.from_diagonal([4, 6]) == AbGroup(0, (2, 12))
    assert str(AbGroup(1, (2,))) == "Z + Z/2"
    assert str(AbGroup.zero()) == "0"
    assert AbGroup(0, (30,)).primary_part(5) == AbGroup(0, (5,))
    assert AbGroup(0, (2, 6)).order() == 12
