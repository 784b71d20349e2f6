import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_rank, brute_solve, clmul_mod, power, subset_xors
from spreadcode.errors import DegreeMismatch, LogOfZero, NotPrimitive, WidthMismatch
from spreadcode.gf2 import (
    DEFAULT_POLYS,
    GFContext,
    format_bits,
    gf_add,
    gf_new,
    load_poly_table,
    parse_bits,
    rank,
    solve_xor,
)


def b(text):
    return parse_bits(text)[0]


def test_nu4_is_nu_plus_one():
    ctx = gf_new(4, 0x13)
    assert format_bits(ctx.nu(4), 4) == "1100"


def test_m6_nu21_matches_multiplication_oracle():
    ctx = gf_new(6, 0x43)
    assert ctx.nu(21) == power(2, 21, 0x43, 6)
    assert format_bits(ctx.nu(21), 6) == "110111"


def test_reducible_poly_rejected():
    with pytest.raises(NotPrimitive):
        GFContext(4, 0b10101)  # (x^2+x+1)^2


def test_irreducible_but_not_primitive_rejected():
    # x^4+x^3+x^2+x+1 is irreducible; x has order 5.
    with pytest.raises(NotPrimitive):
        GFContext(4, 0b11111)


def test_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        GFContext(4, 0x43)
    with pytest.raises(DegreeMismatch):
        GFContext(25)


def test_tables_invert_each_other():
    ctx = gf_new(6)
    assert ctx.exp_table[0] == 1
    assert len(set(ctx.exp_table)) == 63
    assert all(ctx.log_table[ctx.exp_table[i]] == i for i in range(63))


@pytest.mark.parametrize("m", sorted(DEFAULT_POLYS))
def test_bundled_polynomials_are_primitive(m):
    # Independent check: x^((2^m-1)/p) != 1 for every prime p | 2^m-1.
    poly = DEFAULT_POLYS[m]
    coeffs = [int(c) for c in bin(poly)[2:]]
    assert sympy.Poly(coeffs, sympy.Symbol("x"), modulus=2).is_irreducible
    order = (1 << m) - 1
    for p in sympy.factorint(order):
        e = order // p
        acc, base = 1, 2
        while e:
            if e & 1:
                acc = clmul_mod(acc, base, poly, m)
            base = clmul_mod(base, base, poly, m)
            e >>= 1
        assert acc != 1


def test_poly_table_override(tmp_path, monkeypatch):
    table = tmp_path / "polys.txt"
    table.write_text("# custom\n4 19\n6 61\n")
    assert load_poly_table(table) == {4: 0x19, 6: 0x61}
    monkeypatch.setenv("SPREADCODE_POLY_TABLE", str(table))
    ctx = GFContext(4)
    assert ctx.poly == 0x19  # x^4+x^3+1


def test_add_examples():
    assert format_bits(gf_add(b("1010"), b("0010")), 4) == "1000"
    assert gf_add(b("1101"), b("1101")) == 0
    assert format_bits(b("1010") ^ b("1101") ^ b("0001"), 4) == "0110"


def test_add_width_mismatch():
    with pytest.raises(WidthMismatch):
        gf_add(b("10101"), b("1000"), width=4)
    with pytest.raises(WidthMismatch):
        gf_new(4).add(0b10000, 1)


def test_pow_mul_log_examples():
    ctx = gf_new(4)
    assert format_bits(ctx.pow(ctx.nu(), 5), 4) == "0110"
    assert ctx.mul(b("1011"), 1) == b("1011")
    m6 = gf_new(6)
    assert m6.log(1 ^ m6.nu(3)) == 32
    with pytest.raises(LogOfZero):
        m6.log(0)


@pytest.mark.parametrize("m", [4, 6, 8])
def test_mul_matches_shift_and_add(m):
    ctx = gf_new(m)
    rng = random.Random(m)
    for _ in range(1000):
        x, y, z = (rng.randrange(1 << m) for _ in range(3))
        assert ctx.mul(x, y) == clmul_mod(x, y, ctx.poly, m)
        assert ctx.mul(x, y ^ z) == ctx.mul(x, y) ^ ctx.mul(x, z)
        if x and y:
            assert ctx.log(ctx.mul(x, y)) == (ctx.log(x) + ctx.log(y)) % ctx.order


def test_bit_text_roundtrip():
    assert parse_bits("110111") == (0b111011, 6)
    assert format_bits(1, 4) == "1000"
    with pytest.raises(ValueError):
        parse_bits("10a1")


def test_rank_examples(psrc5, psrc21):
    assert rank(psrc5.node_bases[0] + psrc5.node_bases[1]) == 4
    assert rank([b("1010"), b("1010")]) == 1
    assert rank([]) == 0
    rows = [v for basis in psrc21.node_bases[:5] for v in basis]
    assert rank(rows) == brute_rank(rows)


def test_rank_does_not_modify_input():
    rows = [3, 5, 6]
    rank(rows)
    assert rows == [3, 5, 6]


def test_solve_xor_examples():
    pool = [b("010000"), b("110000"), b("000111")]
    assert solve_xor([b("110111")], pool) == [(1, 2)]
    assert solve_xor([0], pool) == [()]
    assert solve_xor([b("1111")], [b("1000")]) == [None]


def test_solve_xor_prefers_smallest_then_lexicographic():
    # 7 = 1^2^4 = 3^4 = 7; the single vector wins, then the lower index pair.
    assert solve_xor([7], [1, 2, 4, 3, 7]) == [(4,)]
    assert solve_xor([6], [2, 4, 6, 6]) == [(2,)]
    assert solve_xor([3], [1, 2, 3, 1, 2]) == [(2,)]


vectors = st.lists(st.integers(0, 255), min_size=0, max_size=12)


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_rank_matches_subset_enumeration(rows):
    assert rank(rows) == brute_rank(rows)


@settings(max_examples=200, deadline=None)
@given(vectors, st.integers(0, 255))
def test_solve_xor_matches_brute_force(pool, target):
    (got,) = solve_xor([target], pool)
    want = brute_solve(target, pool)
    assert got == want
    if got is not None:
        acc = 0
        for i in got:
            acc ^= pool[i]
        assert acc == target
    else:
        assert target not in subset_xors(pool)
