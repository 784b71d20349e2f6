"""Pure-Python implementations of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function; :mod:`spreadcode.kernels`
picks one at import. Vectors are ints of at most 32 bits, ``vecs`` is the
node-major flat list of basis vectors (``alpha`` per node).
"""

from math import comb

BACKEND = "python"


def _insert(basis, v):
    """Reduce ``v`` into the xor-basis (indexed by top bit); True if rank grew."""
    while v:
        top = v.bit_length() - 1
        b = basis[top]
        if not b:
            basis[top] = v
            return True
        v ^= b
    return False


def count_deficient(vecs, n, alpha, width, size, first_lo=0, first_hi=None):
    """Number of ``size``-subsets of nodes with pooled rank < ``width``.

    Only subsets whose smallest node index lies in ``[first_lo, first_hi)``
    are counted, so callers can split the enumeration across workers.
    """
    if first_hi is None:
        first_hi = n
    if size <= 0:
        return 1 if size == 0 and first_lo == 0 and width > 0 else 0
    total = 0

    def rec(start, stop, depth, basis, r):
        nonlocal total
        need = size - depth
        for e in range(start, min(stop, n - need + 1)):
            nb = basis[:]
            nr = r
            for j in range(e * alpha, e * alpha + alpha):
                if _insert(nb, vecs[j]):
                    nr += 1
            if nr >= width:
                continue
            rest = need - 1
            if rest == 0:
                total += 1
            elif nr + alpha * rest < width:
                total += comb(n - 1 - e, rest)
            else:
                rec(e + 1, n, depth + 1, nb, nr)

    rec(first_lo, first_hi, 0, [0] * width, 0)
    return total


def count_deficient_all(vecs, n, alpha, width, first_lo=0, first_hi=None):
    """Deficient-subset counts for every size 1..n (index 0 left at 0)."""
    if first_hi is None:
        first_hi = n
    counts = [0] * (n + 1)

    def rec(start, stop, depth, basis, r):
        for e in range(start, stop):
            nb = basis[:]
            nr = r
            for j in range(e * alpha, e * alpha + alpha):
                if _insert(nb, vecs[j]):
                    nr += 1
            if nr >= width:
                continue
            rest = n - 1 - e
            if nr + alpha * rest < width:
                # Every superset drawn from the remaining nodes stays deficient.
                for extra in range(rest + 1):
                    counts[depth + 1 + extra] += comb(rest, extra)
            else:
                counts[depth + 1] += 1
                rec(e + 1, n, depth + 1, nb, nr)

    rec(first_lo, first_hi, 0, [0] * width, 0)
    return counts


def count_deficient_samples(vecs, n, alpha, width, subsets):
    """Count rows of ``subsets`` (node-index sequences) with pooled rank < width."""
    deficient = 0
    for row in subsets:
        basis = [0] * width
        r = 0
        for e in row:
            e = int(e)
            for j in range(e * alpha, e * alpha + alpha):
                if _insert(basis, vecs[j]):
                    r += 1
            if r >= width:
                break
        if r < width:
            deficient += 1
    return deficient


def first_feasible_combo(piece_vecs, piece_nodes, targets, width, size, max_nodes, budget):
    """Lexicographically first ``size``-combination of pieces whose span holds all targets.

    Combinations touching more than ``max_nodes`` distinct nodes are skipped
    without being counted. Returns ``(combo, examined)``; ``combo`` is None
    when none exists or the ``budget`` of examined combinations ran out.
    """
    m = len(piece_vecs)
    examined = 0
    chosen = []

    def contains(basis):
        for t in targets:
            v = t
            while v:
                b = basis[v.bit_length() - 1]
                if not b:
                    return False
                v ^= b
        return True

    def rec(start, basis, nodes):
        nonlocal examined
        for i in range(start, m - (size - len(chosen)) + 1):
            node = piece_nodes[i]
            new_node = node not in nodes
            if new_node and len(nodes) >= max_nodes:
                continue
            v = piece_vecs[i]
            nb = basis[:]
            _insert(nb, v)
            chosen.append(i)
            if new_node:
                nodes.add(node)
            if len(chosen) == size:
                examined += 1
                if contains(nb):
                    return True
            elif rec(i + 1, nb, nodes):
                return True
            chosen.pop()
            if new_node:
                nodes.discard(node)
            if examined > budget:
                return False
        return False

    if size <= 0 or size > m:
        return None, 0
    if rec(0, [0] * width, set()) and examined <= budget:
        return tuple(chosen), examined
    return None, examined
