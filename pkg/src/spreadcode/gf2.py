"""GF(2^m) arithmetic on exp/log tables and GF(2) linear algebra on int bitsets.

A vector of width ``m`` is a Python int whose bit ``j`` is coordinate ``j``,
i.e. the coefficient of ``nu**j`` in the basis ``1, nu, ..., nu**(m-1)``.
The text form prints coordinate 0 first, so the field element 1 is ``1000``
for m=4.
"""

from __future__ import annotations

import os
from functools import lru_cache

from .errors import DegreeMismatch, LogOfZero, NotPrimitive, WidthMismatch

MAX_M = 24

# x^m + ... + 1 as int bitmasks. m=4 and m=6 are the ones whose printed
# coordinates must come out bit-exact; the rest are conventional choices.
DEFAULT_POLYS = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x1000087,
}

POLY_TABLE_ENV = "SPREADCODE_POLY_TABLE"


def load_poly_table(path):
    """Read a ``m hexpoly`` per line table; blank lines and ``#`` comments skipped."""
    table = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            m, poly = line.split()
            table[int(m)] = int(poly, 16)
    return table


def default_poly(m):
    override = os.environ.get(POLY_TABLE_ENV)
    if override:
        table = load_poly_table(override)
        if m in table:
            return table[m]
    try:
        return DEFAULT_POLYS[m]
    except KeyError:
        raise DegreeMismatch(f"no bundled polynomial for m={m}") from None


def format_bits(v, width):
    if v >> width:
        raise WidthMismatch(f"{v:#x} does not fit in {width} bits")
    return "".join("1" if (v >> j) & 1 else "0" for j in range(width))


def parse_bits(text):
    """Parse ``"110111"`` into (value, width)."""
    text = text.strip().strip("()")
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a bit string: {text!r}")
    v = 0
    for j, ch in enumerate(text):
        if ch == "1":
            v |= 1 << j
    return v, len(text)


def poly_to_str(poly):
    terms = []
    for e in range(poly.bit_length() - 1, -1, -1):
        if (poly >> e) & 1:
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
    return "+".join(terms)


class GFContext:
    """Arithmetic tables for GF(2^m) with generator ``nu = x``.

    Construction fails with :class:`NotPrimitive` unless ``x`` has order
    exactly ``2^m - 1`` modulo ``poly``.
    """

    __slots__ = ("m", "poly", "order", "exp_table", "log_table")

    def __init__(self, m, poly="default"):
        if not 2 <= m <= MAX_M:
            raise DegreeMismatch(f"m={m} outside [2, {MAX_M}]")
        if poly == "default" or poly is None:
            poly = default_poly(m)
        if poly.bit_length() - 1 != m:
            raise DegreeMismatch(f"polynomial {poly:#x} does not have degree {m}")
        order = (1 << m) - 1
        exp_table = [0] * order
        log_table = [-1] * (1 << m)
        top = 1 << m
        x = 1
        for i in range(order):
            if log_table[x] >= 0:
                raise NotPrimitive(
                    f"{poly_to_str(poly)}: x has order {i} < {order}")
            exp_table[i] = x
            log_table[x] = i
            x <<= 1
            if x & top:
                x ^= poly
        if x != 1:
            # x^order != 1 only if poly has no constant term.
            raise NotPrimitive(f"{poly_to_str(poly)}: x is not a unit")
        self.m = m
        self.poly = poly
        self.order = order
        self.exp_table = exp_table
        self.log_table = log_table

    def __repr__(self):
        return f"GFContext(m={self.m}, poly={poly_to_str(self.poly)})"

    def _check(self, a):
        if a < 0 or a >> self.m:
            raise WidthMismatch(f"{a:#x} is not a {self.m}-bit element")

    def add(self, a, b):
        self._check(a)
        self._check(b)
        return a ^ b

    def mul(self, a, b):
        self._check(a)
        self._check(b)
        if a == 0 or b == 0:
            return 0
        return self.exp_table[(self.log_table[a] + self.log_table[b]) % self.order]

    def pow(self, a, e):
        self._check(a)
        if a == 0:
            if e < 0:
                raise LogOfZero("0 has no inverse")
            return 1 if e == 0 else 0
        return self.exp_table[(self.log_table[a] * e) % self.order]

    def log(self, a):
        self._check(a)
        if a == 0:
            raise LogOfZero("log of 0")
        return self.log_table[a]

    def exp(self, i):
        return self.exp_table[i % self.order]

    def nu(self, i=1):
        """``nu**i``."""
        return self.exp_table[i % self.order]


@lru_cache(maxsize=32)
def gf_new(m, poly="default"):
    """Cached :class:`GFContext` factory; contexts are immutable."""
    return GFContext(m, poly)


def gf_add(a, b, width=None):
    if width is not None and (a >> width or b >> width):
        raise WidthMismatch(f"operands wider than {width} bits")
    return a ^ b


def rank(rows):
    """GF(2) rank of int bitset rows. Empty input has rank 0."""
    basis = {}
    r = 0
    for v in rows:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                r += 1
                break
            v ^= b
    return r


def in_span(target, rows):
    return rank(list(rows) + [target]) == rank(rows)


def span_points(rows):
    """All 2^r vectors of the span of ``rows`` (including 0)."""
    points = {0}
    for v in rows:
        points |= {p ^ v for p in points}
    return points


def _eliminate(pool):
    """Reduce ``pool`` in index order.

    Returns (basis, null) where basis maps pivot bit -> (vector, index mask)
    and null holds index masks of the dependencies found.
    """
    basis = {}
    null = []
    for i, v in enumerate(pool):
        mask = 1 << i
        while v:
            top = v.bit_length() - 1
            entry = basis.get(top)
            if entry is None:
                basis[top] = (v, mask)
                break
            v ^= entry[0]
            mask ^= entry[1]
        else:
            null.append(mask)
    return basis, null


def _mask_key(mask):
    idx = tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)
    return len(idx), idx


# Exact minimum-weight search enumerates 2^len(null) solutions.
MAX_EXACT_NULLITY = 16


def solve_xor(targets, pool):
    """Express each target as the XOR of a subset of ``pool``.

    Returns one entry per target: a sorted tuple of pool indices, or ``None``
    when the target lies outside the span of the pool. Among all solutions the
    smallest subset wins, ties broken by the lexicographically smallest index
    tuple (exact while the pool's nullity is at most ``MAX_EXACT_NULLITY``).
    """
    basis, null = _eliminate(pool)
    exact = len(null) <= MAX_EXACT_NULLITY
    out = []
    for t in targets:
        mask = 0
        v = t
        while v:
            entry = basis.get(v.bit_length() - 1)
            if entry is None:
                break
            v ^= entry[0]
            mask ^= entry[1]
        if v:
            out.append(None)
            continue
        best = mask
        if exact and null:
            best_key = _mask_key(mask)
            # Gray-code walk over the coset mask + span(null).
            cur = mask
            for step in range(1, 1 << len(null)):
                cur ^= null[(step & -step).bit_length() - 1]
                key = _mask_key(cur)
                if key < best_key:
                    best, best_key = cur, key
        out.append(_mask_key(best)[1])
    return out


def xor_of(indices, values):
    acc = 0
    for i in indices:
        acc ^= values[i]
    return acc
