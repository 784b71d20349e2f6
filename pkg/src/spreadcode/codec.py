"""Encoding objects into per-node pieces, decoding, and systematic retrieval.

A fragment of L bytes stands in for one GF(2) symbol: every bit position of
the fragments is coded independently with the same coefficient vector, so a
piece payload is just the XOR of the fragments its coefficient selects.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    FragmentLengthMismatch,
    InconsistentPieces,
    NodeUnavailable,
    SpreadCodeError,
    Unrecoverable,
)
from .gf2 import format_bits, parse_bits, solve_xor


@dataclass(frozen=True)
class ObjectData:
    fragments: tuple
    size: int | None = None  # true byte length before padding

    def __post_init__(self):
        lengths = {len(f) for f in self.fragments}
        if len(lengths) > 1:
            raise FragmentLengthMismatch(f"fragment lengths differ: {sorted(lengths)}")

    @property
    def B(self):
        return len(self.fragments)

    @property
    def fragment_len(self):
        return len(self.fragments[0]) if self.fragments else 0

    @classmethod
    def from_bytes(cls, data, B):
        """Split ``data`` into B equal fragments, zero-padding the tail."""
        L = max(1, -(-len(data) // B))
        padded = data.ljust(B * L, b"\0")
        return cls(tuple(padded[i * L:(i + 1) * L] for i in range(B)), len(data))

    def to_bytes(self):
        data = b"".join(self.fragments)
        return data if self.size is None else data[:self.size]

    def digest(self):
        return object_digest(self.to_bytes())


def object_digest(data):
    return hashlib.sha256(data).hexdigest()[:16]


@dataclass(frozen=True)
class Piece:
    coeff: int
    payload: bytes
    node: int = 0   # 1-based node id, 0 if unknown
    index: int = 0  # 1-based position within the node's basis

    @property
    def label(self):
        return f"{self.node}.{self.index}"


@dataclass(frozen=True)
class NodePieces:
    node_id: int
    pieces: tuple

    @property
    def storage(self):
        return sum(len(p.payload) for p in self.pieces)


def _as_int(b):
    return int.from_bytes(b, "little")


def _as_bytes(v, L):
    return v.to_bytes(L, "little")


def encode(layout, obj):
    if obj.B != layout.B:
        raise DimensionMismatch(f"object has {obj.B} fragments, layout needs {layout.B}")
    L = obj.fragment_len
    if L < 1:
        raise FragmentLengthMismatch("fragments must be at least one byte")
    frags = [_as_int(f) for f in obj.fragments]
    out = []
    for l, basis in enumerate(layout.node_bases, start=1):
        pieces = []
        for j, coeff in enumerate(basis, start=1):
            acc = 0
            c = coeff
            while c:
                low = c & -c
                acc ^= frags[low.bit_length() - 1]
                c ^= low
            pieces.append(Piece(coeff, _as_bytes(acc, L), l, j))
        out.append(NodePieces(l, tuple(pieces)))
    return out


def decode(pieces, B, size=None):
    """Solve for the B fragments from any pieces whose coefficients span GF(2)^B.

    Raises :class:`Unrecoverable` (with the achieved rank) when they do not,
    and :class:`InconsistentPieces` when a dependent piece disagrees with the
    others, which means some payload is corrupt.
    """
    pieces = list(pieces)
    if not pieces:
        raise Unrecoverable(0, B)
    L = len(pieces[0].payload)
    if any(len(p.payload) != L for p in pieces):
        raise FragmentLengthMismatch("piece payload lengths differ")
    basis = {}
    for p in pieces:
        if p.coeff >> B:
            raise DimensionMismatch(f"coefficient wider than {B} bits")
        c, v = p.coeff, _as_int(p.payload)
        while c:
            top = c.bit_length() - 1
            entry = basis.get(top)
            if entry is None:
                basis[top] = (c, v)
                break
            c ^= entry[0]
            v ^= entry[1]
        else:
            if v:
                raise InconsistentPieces(
                    f"piece {p.label} ({format_bits(p.coeff, B)}) contradicts the others")
    if len(basis) < B:
        raise Unrecoverable(len(basis), B)
    frags = [0] * B
    for bit in range(B):
        c, v = basis[bit]
        c ^= 1 << bit
        while c:
            low = c & -c
            v ^= frags[low.bit_length() - 1]
            c ^= low
        frags[bit] = v
    return ObjectData(tuple(_as_bytes(f, L) for f in frags), size)


@dataclass(frozen=True)
class SystematicSource:
    """Where fragment ``fragment`` (0-based) can be read without inversion.

    ``pieces`` are 1-based piece indices on ``node`` whose XOR is the unit
    vector; a single index means the piece is stored verbatim.
    """

    fragment: int
    node: int
    pieces: tuple

    @property
    def direct(self):
        return len(self.pieces) == 1


def systematic_map(layout):
    out = []
    for i in range(layout.B):
        unit = 1 << i
        node = layout.node_of(unit)
        (subset,) = solve_xor([unit], layout.basis(node))
        out.append(SystematicSource(i, node, tuple(j + 1 for j in subset)))
    return out


def retrieve_systematic(layout, fetch, size=None):
    """Assemble the object from the unit-vector pieces.

    ``fetch(node, piece_index)`` returns the payload bytes or raises
    :class:`NodeUnavailable` (any :class:`SpreadCodeError` counts as a miss).
    Each piece is read at most once.
    """
    cache = {}
    missing = []
    frags = []
    for src in systematic_map(layout):
        acc = None
        for j in src.pieces:
            key = (src.node, j)
            if key not in cache:
                try:
                    cache[key] = fetch(src.node, j)
                except SpreadCodeError:
                    cache[key] = None
            data = cache[key]
            if data is None:
                acc = None
                break
            acc = _as_int(data) ^ (acc or 0)
            L = len(data)
        if acc is None:
            missing.append(src.fragment)
            frags.append(None)
        else:
            frags.append(_as_bytes(acc, L))
    if missing:
        raise NodeUnavailable(missing)
    return ObjectData(tuple(frags), size)


def write_piece(path, piece, digest, size, B):
    header = (f"piece v={format_bits(piece.coeff, B)} len={len(piece.payload)} "
              f"object={digest} size={size} node={piece.node} index={piece.index}\n")
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(piece.payload)


def read_piece(path):
    """Return (piece, header fields) from a piece file."""
    with open(path, "rb") as fh:
        raw = fh.read()
    head, sep, payload = raw.partition(b"\n")
    fields = head.decode("utf-8").split()
    if not sep or not fields or fields[0] != "piece":
        raise SpreadCodeError(f"{path}: not a piece file")
    meta = dict(tok.split("=", 1) for tok in fields[1:])
    coeff, width = parse_bits(meta["v"])
    if len(payload) != int(meta["len"]):
        raise FragmentLengthMismatch(f"{path}: payload is {len(payload)} bytes, header says {meta['len']}")
    meta["width"] = width
    piece = Piece(coeff, payload, int(meta.get("node", 0)), int(meta.get("index", 0)))
    return piece, meta
