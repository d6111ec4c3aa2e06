import random

import pytest

from bloch_forge.rings import Ring, parse_ring, poly_is_irreducible


def test_zmod9_units():
    r = Ring.zmod(9)
    assert r.size == 9
    assert len(r.units()) == 6
    assert not r.is_unit(3)
    assert r.is_unit(2)
    assert r.residue_ring.size == 3


def test_gf8_defining_relation():
    r = Ring.gf(8)
    assert r.size == 8 and len(r.units()) == 7
    a = 2  # the generator "a" has index p = 2
    assert r.coords(a) == (0, 1, 0)
    # a^3 = a + 1 under the pinned modulus x^3 + x + 1
    assert r.pow(a, 3) == r.add(a, 1)


def test_gf4_defining_relation():
    r = Ring.gf(4)
    a = 2
    assert r.mul(a, a) == r.add(a, 1)


def test_gf9_defining_relation():
    r = Ring.gf(9)
    a = 3
    assert r.mul(a, a) == r.neg(1)


def test_truncpoly_gf4():
    base = Ring.gf(4)
    r = Ring.truncpoly(base, 2)
    assert r.size == 16
    assert len(r.units()) == 12
    assert r.residue_ring.size == 4
    t = r._from_coords((0, 1))
    assert r.mul(t, t) == 0
    assert r.is_unit(r.add(t, 1))


def test_unit_count_plus_ideal_is_size():
    for desc in ["gf(2)", "gf(4)", "gf(9)", "zmod(8)", "zmod(25)",
                 "truncpoly(gf(4), 2)", "truncpoly(gf(5), 3)"]:
        r = parse_ring(desc)
        assert len(r.units()) + len(r.maximal_ideal()) == r.size
        assert set(r.maximal_ideal()) == {x for x in r.elements() if r.residue(x) == 0}


def test_inverses_exhaustive():
    for desc in ["gf(16)", "zmod(27)", "truncpoly(gf(3), 2)"]:
        r = parse_ring(desc)
        for u in r.units():
            assert r.mul(u, r.inv(u)) == 1


def test_residue_is_homomorphism():
    for desc in ["zmod(9)", "truncpoly(gf(4), 2)", "zmod(25)"]:
        r = parse_ring(desc)
        k = r.residue_ring
        for a in r.elements():
            for b in r.elements():
                assert r.residue(r.add(a, b)) == k.add(r.residue(a), r.residue(b))
                assert r.residue(r.mul(a, b)) == k.mul(r.residue(a), r.residue(b))


def test_residue_examples():
    r = Ring.zmod(25)
    assert r.residue(7) == 2
    f8 = Ring.gf(8)
    for x in f8.elements():
        assert f8.residue(x) == x


def test_units_group_cyclic_fields():
    assert Ring.gf(7).units_group().factors == (6,)
    assert Ring.zmod(9).units_group().factors == (6,)
    assert Ring.gf(2).units_group().factors == ()


def test_units_group_truncpoly_gf4():
    # (F4[t]/(t^2))^x has 12 elements, Z/3 x Z/2 x Z/2 = Z/2 + Z/6 canonically
    g = Ring.truncpoly(Ring.gf(4), 2).units_group()
    assert g.factors == (2, 6)
    assert g.order == 12


def test_units_group_zmod8():
    assert Ring.zmod(8).units_group().factors == (2, 2)


def test_dlog_homomorphism_random():
    rng = random.Random(5)
    for desc in ["gf(13)", "zmod(27)", "truncpoly(gf(4), 2)", "gf(16)"]:
        r = parse_ring(desc)
        g = r.units_group()
        units = r.units()
        assert g.dlog(1) == (0,) * len(g.factors)
        for _ in range(1000):
            x, y = rng.choice(units), rng.choice(units)
            lx, ly, lxy = g.dlog(x), g.dlog(y), g.dlog(r.mul(x, y))
            assert lxy == tuple((a + b) % d for a, b, d in zip(lx, ly, g.factors))
        for u in units:
            assert g.element_from_dlog(g.dlog(u)) == u


def test_irreducibility_guard():
    assert poly_is_irreducible((1, 1, 1), 2)       # x^2+x+1 over F2
    assert not poly_is_irreducible((1, 0, 1), 2)   # x^2+1 = (x+1)^2 over F2
    with pytest.raises(ValueError):
        Ring.gf(4, (1, 0, 1))
    with pytest.raises(ValueError):
        Ring.zmod(6)


def test_parse_roundtrip():
    for desc in ["gf(8)", "zmod(49)", "truncpoly(gf(9), 2)"]:
        assert parse_ring(desc).descriptor() == desc
    r = parse_ring("gf(4, poly=[1,1,1])")
    assert r.size == 4


def test_enumeration_deterministic():
    r1, r2 = Ring.gf(8), Ring.gf(8)
    assert list(r1.elements()) == list(r2.elements())
    assert [r1.coords(x) for x in r1.elements()] == [r2.coords(x) for x in r2.elements()]
