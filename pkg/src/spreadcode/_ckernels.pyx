# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; same signatures and results."""

from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset
from libc.stdint cimport uint32_t, uint64_t
from math import comb

BACKEND = "cython"

cdef enum:
    MAXW = 32


cdef extern from *:
    int __builtin_clz(unsigned int x) nogil


cdef inline int _top(uint32_t v) nogil:
    return 31 - __builtin_clz(v)


cdef inline int _insert(uint32_t* basis, uint32_t v) nogil:
    cdef int top
    while v:
        top = _top(v)
        if basis[top] == 0:
            basis[top] = v
            return 1
        v ^= basis[top]
    return 0


cdef uint32_t* _to_c(vecs) except NULL:
    cdef Py_ssize_t m = len(vecs), i
    cdef uint32_t* out = <uint32_t*> malloc((m + 1) * sizeof(uint32_t))
    if out == NULL:
        raise MemoryError()
    for i in range(m):
        out[i] = <uint32_t> vecs[i]
    return out


cdef struct Ctx:
    uint32_t* vecs
    uint32_t* stack      # (depth+1) * MAXW xor-bases
    int n
    int alpha
    int width
    int size


cdef class _Acc:
    cdef public object bulk
    def __init__(self):
        self.bulk = 0


cdef uint64_t _rec_size(Ctx* c, int start, int stop, int depth, int r, _Acc acc):
    cdef uint64_t total = 0
    cdef int e, j, nr, rest
    cdef int need = c.size - depth
    cdef uint32_t* cur = c.stack + depth * MAXW
    cdef uint32_t* nxt = c.stack + (depth + 1) * MAXW
    cdef int hi = c.n - need + 1
    if stop < hi:
        hi = stop
    for e in range(start, hi):
        memcpy(nxt, cur, MAXW * sizeof(uint32_t))
        nr = r
        for j in range(e * c.alpha, e * c.alpha + c.alpha):
            nr += _insert(nxt, c.vecs[j])
        if nr >= c.width:
            continue
        rest = need - 1
        if rest == 0:
            total += 1
        elif nr + c.alpha * rest < c.width:
            acc.bulk += comb(c.n - 1 - e, rest)
        else:
            total += _rec_size(c, e + 1, c.n, depth + 1, nr, acc)
    return total


def count_deficient(vecs, int n, int alpha, int width, int size, int first_lo=0, first_hi=None):
    cdef Ctx c
    cdef int hi = n if first_hi is None else first_hi
    if size <= 0:
        return 1 if size == 0 and first_lo == 0 and width > 0 else 0
    if width > MAXW:
        raise ValueError("width > 32")
    acc = _Acc()
    c.vecs = _to_c(vecs)
    c.stack = <uint32_t*> malloc((size + 2) * MAXW * sizeof(uint32_t))
    if c.stack == NULL:
        free(c.vecs)
        raise MemoryError()
    memset(c.stack, 0, (size + 2) * MAXW * sizeof(uint32_t))
    c.n = n
    c.alpha = alpha
    c.width = width
    c.size = size
    try:
        total = _rec_size(&c, first_lo, hi, 0, 0, acc)
    finally:
        free(c.vecs)
        free(c.stack)
    return int(total) + acc.bulk


cdef void _rec_all(Ctx* c, int start, int stop, int depth, int r, uint64_t* counts, list bulk):
    cdef int e, j, nr, rest
    cdef uint32_t* cur = c.stack + depth * MAXW
    cdef uint32_t* nxt = c.stack + (depth + 1) * MAXW
    for e in range(start, stop):
        memcpy(nxt, cur, MAXW * sizeof(uint32_t))
        nr = r
        for j in range(e * c.alpha, e * c.alpha + c.alpha):
            nr += _insert(nxt, c.vecs[j])
        if nr >= c.width:
            continue
        rest = c.n - 1 - e
        if nr + c.alpha * rest < c.width:
            bulk.append((depth + 1, rest))
        else:
            counts[depth + 1] += 1
            _rec_all(c, e + 1, c.n, depth + 1, nr, counts, bulk)


def count_deficient_all(vecs, int n, int alpha, int width, int first_lo=0, first_hi=None):
    cdef Ctx c
    cdef int hi = n if first_hi is None else first_hi
    cdef uint64_t* counts
    cdef int i
    if width > MAXW:
        raise ValueError("width > 32")
    bulk = []
    c.vecs = _to_c(vecs)
    c.stack = <uint32_t*> malloc((n + 2) * MAXW * sizeof(uint32_t))
    counts = <uint64_t*> malloc((n + 1) * sizeof(uint64_t))
    if c.stack == NULL or counts == NULL:
        free(c.vecs)
        free(c.stack)
        free(counts)
        raise MemoryError()
    memset(c.stack, 0, (n + 2) * MAXW * sizeof(uint32_t))
    memset(counts, 0, (n + 1) * sizeof(uint64_t))
    c.n = n
    c.alpha = alpha
    c.width = width
    c.size = n
    try:
        _rec_all(&c, first_lo, hi, 0, 0, counts, bulk)
        out = [int(counts[i]) for i in range(n + 1)]
    finally:
        free(c.vecs)
        free(c.stack)
        free(counts)
    for depth, rest in bulk:
        for extra in range(rest + 1):
            out[depth + extra] += comb(rest, extra)
    return out


def count_deficient_samples(vecs, int n, int alpha, int width, subsets):
    cdef uint32_t* cv
    cdef uint32_t basis[MAXW]
    cdef int r, j, e
    cdef long deficient = 0
    if width > MAXW:
        raise ValueError("width > 32")
    cv = _to_c(vecs)
    try:
        for row in subsets:
            memset(basis, 0, MAXW * sizeof(uint32_t))
            r = 0
            for x in row:
                e = <int> x
                for j in range(e * alpha, e * alpha + alpha):
                    r += _insert(basis, cv[j])
                if r >= width:
                    break
            if r < width:
                deficient += 1
    finally:
        free(cv)
    return deficient


cdef struct ComboCtx:
    uint32_t* vecs
    int* nodes
    uint32_t* targets
    int ntargets
    int m
    int size
    int max_nodes
    long budget
    long examined
    int* chosen
    int* node_use      # per node id: how many chosen pieces sit on it
    int distinct
    uint32_t* stack


cdef int _contains(ComboCtx* c, uint32_t* basis) nogil:
    cdef int t, top
    cdef uint32_t v
    for t in range(c.ntargets):
        v = c.targets[t]
        while v:
            top = _top(v)
            if basis[top] == 0:
                return 0
            v ^= basis[top]
    return 1


cdef int _rec_combo(ComboCtx* c, int start, int depth) nogil:
    cdef int i, node, fresh
    cdef uint32_t* cur = c.stack + depth * MAXW
    cdef uint32_t* nxt = c.stack + (depth + 1) * MAXW
    for i in range(start, c.m - (c.size - depth) + 1):
        node = c.nodes[i]
        fresh = c.node_use[node] == 0
        if fresh and c.distinct >= c.max_nodes:
            continue
        memcpy(nxt, cur, MAXW * sizeof(uint32_t))
        _insert(nxt, c.vecs[i])
        c.chosen[depth] = i
        c.node_use[node] += 1
        c.distinct += fresh
        if depth + 1 == c.size:
            c.examined += 1
            if _contains(c, nxt):
                return 1
        elif _rec_combo(c, i + 1, depth + 1):
            return 1
        c.node_use[node] -= 1
        c.distinct -= fresh
        if c.examined > c.budget:
            return 0
    return 0


def first_feasible_combo(piece_vecs, piece_nodes, targets, int width, int size, int max_nodes, long budget):
    cdef ComboCtx c
    cdef int i, found
    cdef int maxnode
    if size <= 0 or size > len(piece_vecs):
        return None, 0
    if width > MAXW:
        raise ValueError("width > 32")
    maxnode = max(piece_nodes) + 1
    c.m = len(piece_vecs)
    c.size = size
    c.max_nodes = max_nodes
    c.budget = budget
    c.examined = 0
    c.distinct = 0
    c.ntargets = len(targets)
    c.vecs = _to_c(piece_vecs)
    c.targets = _to_c(targets)
    c.nodes = <int*> malloc(c.m * sizeof(int))
    c.chosen = <int*> malloc((size + 1) * sizeof(int))
    c.node_use = <int*> malloc(maxnode * sizeof(int))
    c.stack = <uint32_t*> malloc((size + 2) * MAXW * sizeof(uint32_t))
    try:
        if c.nodes == NULL or c.chosen == NULL or c.node_use == NULL or c.stack == NULL:
            raise MemoryError()
        for i in range(c.m):
            c.nodes[i] = piece_nodes[i]
        memset(c.node_use, 0, maxnode * sizeof(int))
        memset(c.stack, 0, (size + 2) * MAXW * sizeof(uint32_t))
        with nogil:
            found = _rec_combo(&c, 0, 0)
        if found and c.examined <= c.budget:
            return tuple(c.chosen[i] for i in range(size)), c.examined
        return None, c.examined
    finally:
        free(c.vecs)
        free(c.targets)
        free(c.nodes)
        free(c.chosen)
        free(c.node_use)
        free(c.stack)
