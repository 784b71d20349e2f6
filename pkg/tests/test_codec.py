import os
import random
from itertools import combinations

import pytest

from oracles import brute_deficient, brute_rank
from spreadcode.codec import (
    ObjectData,
    Piece,
    decode,
    encode,
    read_piece,
    retrieve_systematic,
    systematic_map,
    write_piece,
)
from spreadcode.errors import (
    DimensionMismatch,
    FragmentLengthMismatch,
    InconsistentPieces,
    NodeUnavailable,
    Unrecoverable,
)
from spreadcode.gf2 import parse_bits
from spreadcode.layout import SpreadLayout, layout_for


def xor(*chunks):
    out = bytearray(len(chunks[0]))
    for c in chunks:
        for i, byte in enumerate(c):
            out[i] ^= byte
    return bytes(out)


def random_object(rng, B, L):
    return ObjectData(tuple(bytes(rng.randrange(256) for _ in range(L)) for _ in range(B)))


def all_pieces(nodes, ids=None):
    return [p for held in nodes if ids is None or held.node_id in ids for p in held.pieces]


def test_encode_example(psrc5):
    o = random_object(random.Random(1), 4, 8)
    o1, o2, o3, o4 = o.fragments
    nodes = encode(psrc5, o)
    assert [p.payload for p in nodes[2].pieces] == [o3, xor(o1, o2, o4)]
    assert [p.payload for p in nodes[0].pieces] == [o1, xor(o2, o3)]
    assert all(held.storage == 2 * 8 for held in nodes)


def test_encode_zero_object(psrc21):
    nodes = encode(psrc21, ObjectData((b"\0\0",) * 6))
    assert all(p.payload == b"\0\0" for p in all_pieces(nodes))


def test_encode_matches_bit_plane_oracle(psrc21):
    rng = random.Random(7)
    obj = random_object(rng, 6, 1)
    for held in encode(psrc21, obj):
        for piece in held.pieces:
            for j in range(8):
                symbols = [(f[0] >> j) & 1 for f in obj.fragments]
                parity = 0
                for i in range(6):
                    if piece.coeff >> i & 1:
                        parity ^= symbols[i]
                assert (piece.payload[0] >> j) & 1 == parity


def test_encode_errors(psrc5):
    with pytest.raises(DimensionMismatch):
        encode(psrc5, ObjectData((b"a",) * 3))
    with pytest.raises(FragmentLengthMismatch):
        ObjectData((b"ab", b"a", b"a", b"a"))
    with pytest.raises(FragmentLengthMismatch):
        encode(psrc5, ObjectData((b"",) * 4))


def test_decode_two_nodes(psrc5):
    obj = random_object(random.Random(2), 4, 16)
    nodes = encode(psrc5, obj)
    assert decode(all_pieces(nodes, {1, 2}), 4) == obj


def test_decode_single_node_unrecoverable(psrc5):
    nodes = encode(psrc5, random_object(random.Random(3), 4, 4))
    with pytest.raises(Unrecoverable) as exc:
        decode(all_pieces(nodes, {3}), 4)
    assert exc.value.rank == 2


def test_decode_deficient_five_group(psrc21):
    bases = psrc21.node_bases
    bad = [s for s in combinations(range(21), 5)
           if brute_rank([v for i in s for v in bases[i]]) < 6]
    assert len(bad) == brute_deficient(bases, 6, 5)
    nodes = encode(psrc21, random_object(random.Random(4), 6, 4))
    for group in bad:
        with pytest.raises(Unrecoverable) as exc:
            decode(all_pieces(nodes, {i + 1 for i in group}), 6)
        # Five collinear points of the GF(4) plane span a 4-dim GF(2) space.
        assert exc.value.rank == 4


def test_decode_detects_corruption(psrc5):
    nodes = encode(psrc5, random_object(random.Random(5), 4, 4))
    pieces = all_pieces(nodes)
    bad = pieces[-1]
    pieces[-1] = Piece(bad.coeff, xor(bad.payload, b"\x01\0\0\0"), bad.node, bad.index)
    with pytest.raises(InconsistentPieces):
        decode(pieces, 4)


def test_decode_partial_node_pieces(psrc21):
    obj = random_object(random.Random(6), 6, 5)
    nodes = encode(psrc21, obj)
    pieces = [nodes[n - 1].pieces[i - 1] for n, i in
              [(1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1)]]
    assert decode(pieces, 6) == obj


def test_roundtrip_all_pairs_psrc5(psrc5):
    obj = random_object(random.Random(8), 4, 32)
    nodes = encode(psrc5, obj)
    for pair in combinations(range(1, 6), 2):
        assert decode(all_pieces(nodes, set(pair)), 4) == obj


def test_roundtrip_random_triples_psrc21(psrc21):
    rng = random.Random(9)
    obj = random_object(rng, 6, 32)
    nodes = encode(psrc21, obj)
    checked = 0
    for _ in range(500):
        trio = set(rng.sample(range(1, 22), 3))
        pieces = all_pieces(nodes, trio)
        if brute_rank([p.coeff for p in pieces]) == 6:
            assert decode(pieces, 6) == obj
            checked += 1
        else:
            with pytest.raises(Unrecoverable):
                decode(pieces, 6)
    assert checked > 350


def test_encoding_is_linear(psrc21):
    rng = random.Random(10)
    for _ in range(20):
        a, b = random_object(rng, 6, 9), random_object(rng, 6, 9)
        ab = ObjectData(tuple(xor(x, y) for x, y in zip(a.fragments, b.fragments)))
        for pa, pb, pab in zip(all_pieces(encode(psrc21, a)), all_pieces(encode(psrc21, b)),
                               all_pieces(encode(psrc21, ab))):
            assert pab.payload == xor(pa.payload, pb.payload)


def test_bit_planes_decode_independently(psrc21):
    rng = random.Random(11)
    obj = random_object(rng, 6, 1)
    pieces = all_pieces(encode(psrc21, obj), {1, 2, 4})
    full = decode(pieces, 6)
    for j in range(8):
        plane = [Piece(p.coeff, bytes([(p.payload[0] >> j) & 1])) for p in pieces]
        got = decode(plane, 6)
        assert [f[0] for f in got.fragments] == [(f[0] >> j) & 1 for f in full.fragments]


def test_from_bytes_pads_and_trims():
    obj = ObjectData.from_bytes(b"hello world", 4)
    assert obj.fragment_len == 3
    assert obj.fragments[-1] == b"ld\0"
    assert obj.to_bytes() == b"hello world"
    assert ObjectData.from_bytes(b"", 4).fragment_len == 1


def test_systematic_map_psrc21(psrc21):
    srcs = systematic_map(psrc21)
    assert [(s.fragment, s.node, s.pieces) for s in srcs] == [
        (i, i + 1, (1,)) for i in range(6)]
    assert all(s.direct for s in srcs)


def test_systematic_map_psrc5(psrc5):
    assert systematic_map(psrc5)[3].node == 4


def test_systematic_map_requires_combination(psrc5):
    bases = list(psrc5.node_bases)
    bases[0] = (parse_bits("0110")[0], parse_bits("1110")[0])
    layout = SpreadLayout(psrc5.params, tuple(bases), psrc5.ctx)
    src = systematic_map(layout)[0]
    assert (src.node, src.pieces, src.direct) == (1, (1, 2), False)
    obj = random_object(random.Random(12), 4, 6)
    nodes = encode(layout, obj)
    got = retrieve_systematic(layout, lambda n, i: nodes[n - 1].pieces[i - 1].payload)
    assert got == obj


def test_retrieve_systematic_reads_six_pieces(psrc21):
    obj = random_object(random.Random(13), 6, 8)
    nodes = encode(psrc21, obj)
    reads = []

    def fetch(n, i):
        reads.append((n, i))
        return nodes[n - 1].pieces[i - 1].payload

    assert retrieve_systematic(psrc21, fetch) == obj
    assert len(reads) == 6 and len({n for n, _ in reads}) == 6


def test_retrieve_systematic_dead_node(psrc21):
    nodes = encode(psrc21, random_object(random.Random(14), 6, 2))

    def fetch(n, i):
        if n == 1:
            raise NodeUnavailable([0])
        return nodes[n - 1].pieces[i - 1].payload

    with pytest.raises(NodeUnavailable) as exc:
        retrieve_systematic(psrc21, fetch)
    assert exc.value.missing == [0]


def test_piece_file_roundtrip(tmp_path, psrc21):
    obj = ObjectData.from_bytes(os.urandom(100), 6)
    piece = encode(psrc21, obj)[6].pieces[1]
    path = tmp_path / "p.piece"
    write_piece(path, piece, obj.digest(), 100, 6)
    assert path.read_bytes().startswith(b"piece v=011100 len=17 object=")
    again, meta = read_piece(path)
    assert again == piece
    assert meta["size"] == "100" and meta["width"] == 6
