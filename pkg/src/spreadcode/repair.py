"""Repair partner discovery and repair planning.

All node ids are 1-based. A plan downloads pieces from live nodes and
rebuilds each lost piece as an XOR of downloaded ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import kernels
from .codec import Piece
from .errors import (
    AlphaUnsupported,
    Infeasible,
    InsufficientLiveNodes,
    InvalidNode,
    PairInsufficient,
    SpreadCodeError,
)
from .gf2 import format_bits, rank, solve_xor
from .layout import subfield_generator

MIN_DOWNLOAD_BUDGET = 1 << 18


@dataclass(frozen=True)
class RepairPlan:
    failed_node: int
    downloads: tuple   # (node, piece index) pairs, 1-based
    recipes: tuple     # per lost piece: indices into downloads
    targets: tuple     # lost coefficient vectors, in the failed node's order
    optimal: bool = True

    @property
    def download_units(self):
        return len(self.downloads)

    @property
    def sources(self):
        grouped = {}
        for node, idx in self.downloads:
            grouped.setdefault(node, []).append(idx)
        return [(node, tuple(idxs)) for node, idxs in grouped.items()]

    @property
    def d(self):
        return len(self.sources)

    def format(self, B):
        lines = []
        for target, recipe in zip(self.targets, self.recipes):
            terms = " ^ ".join(
                "piece[{}.{}]".format(*self.downloads[i]) for i in recipe)
            lines.append(f"lost={format_bits(target, B)} = {terms}")
        lines.append(f"download_units={self.download_units}")
        return "\n".join(lines)

    def execute(self, fetch):
        """Rebuild the lost pieces; ``fetch(node, idx)`` returns payload bytes."""
        raw = [fetch(n, i) for n, i in self.downloads]
        L = len(raw[0]) if raw else 0
        payloads = [int.from_bytes(b, "little") for b in raw]
        out = []
        for j, (target, recipe) in enumerate(zip(self.targets, self.recipes), start=1):
            acc = 0
            for i in recipe:
                acc ^= payloads[i]
            out.append(Piece(target, acc.to_bytes(L, "little"), self.failed_node, j))
        return out


def _covers(layout, nodes, failed):
    rows = [v for node in nodes for v in layout.node_bases[node - 1]]
    return rank(rows + list(layout.node_bases[failed - 1])) == rank(rows)


def _check_distinct(layout, *nodes):
    for node in nodes:
        layout.check_node(node)
    if len(set(nodes)) != len(nodes):
        raise InvalidNode(f"nodes must be distinct: {nodes}")


def three_partners_alpha2(layout, l, i):
    """Closed-form partners of first contact ``i`` for failed ``l`` when alpha=2.

    With a = nu^(l-1), c = nu^(i-1) and omega the subfield generator, the
    partners own the points a+c, c+a*omega and a+c*omega.
    """
    if layout.alpha != 2:
        raise AlphaUnsupported(f"closed form needs alpha=2, layout has alpha={layout.alpha}")
    _check_distinct(layout, l, i)
    ctx = layout.ctx
    omega = subfield_generator(ctx, 2)
    a = ctx.nu(l - 1)
    c = ctx.nu(i - 1)
    values = (a ^ c, c ^ ctx.mul(a, omega), a ^ ctx.mul(c, omega))
    return [layout.coset_node(v) for v in values]


def pair_partner(layout, l, i):
    """Every node j such that nodes i and j together can rebuild node l."""
    _check_distinct(layout, l, i)
    if layout.alpha == 2:
        return three_partners_alpha2(layout, l, i)
    return exhaustive_partners(layout, l, i)


def exhaustive_partners(layout, l, i):
    _check_distinct(layout, l, i)
    return [j for j in range(1, layout.n + 1)
            if j not in (l, i) and _covers(layout, (i, j), l)]


def repair_pairs(layout, l, live=None):
    layout.check_node(l)
    if live is None:
        live = range(1, layout.n + 1)
    cand = sorted(set(live) - {l})
    return [(i, j) for i, j in combinations(cand, 2) if _covers(layout, (i, j), l)]


def _plan_from_downloads(layout, l, downloads, optimal=True):
    targets = layout.node_bases[l - 1]
    pool = [layout.node_bases[n - 1][p - 1] for n, p in downloads]
    recipes = solve_xor(targets, pool)
    if any(r is None for r in recipes):
        raise PairInsufficient(f"downloads do not span N{l}")
    return RepairPlan(l, tuple(downloads), tuple(recipes), tuple(targets), optimal)


def plan_pair_repair(layout, l, pair):
    i, j = sorted(pair)
    _check_distinct(layout, l, i, j)
    if not _covers(layout, (i, j), l):
        raise PairInsufficient(f"N{i}, N{j} cannot repair N{l}")
    downloads = [(n, p) for n in (i, j) for p in range(1, layout.alpha + 1)]
    return _plan_from_downloads(layout, l, downloads)


def plan_min_download(layout, l, d, live=None, budget=MIN_DOWNLOAD_BUDGET):
    """Fewest-pieces repair of node ``l`` using at most ``d`` live source nodes.

    Exact lexicographic search over piece subsets of growing size while the
    number of examined subsets stays within ``budget``; beyond that a greedy
    plan is returned with ``optimal=False``.
    """
    layout.check_node(l)
    if d < 2:
        raise SpreadCodeError("repair needs d >= 2")
    if live is None:
        live = range(1, layout.n + 1)
    live = sorted(set(live) - {l})
    if len(live) < 2 or not _covers(layout, live, l):
        raise InsufficientLiveNodes(f"live nodes cannot rebuild N{l}")
    pool = [(node, p) for node in live for p in range(1, layout.alpha + 1)]
    vecs = [layout.node_bases[n - 1][p - 1] for n, p in pool]
    nodes = [n for n, _ in pool]
    targets = list(layout.node_bases[l - 1])
    spent = 0
    for size in range(layout.alpha, min(layout.alpha * d, len(pool)) + 1):
        combo, examined = kernels.first_feasible_combo(
            vecs, nodes, targets, layout.B, size, d, budget - spent)
        spent += examined
        if combo is not None:
            return _plan_from_downloads(layout, l, [pool[c] for c in combo])
        if spent > budget:
            return _greedy_plan(layout, l, d, live)
    raise InsufficientLiveNodes(f"no set of {d} live nodes can rebuild N{l}")


def _greedy_plan(layout, l, d, live):
    lost = set(layout.spans[l - 1]) - {0}
    pairs = repair_pairs(layout, l, live)
    chosen = list(pairs[0]) if pairs else []
    rows = [v for n in chosen for v in layout.node_bases[n - 1]]
    while len(chosen) < d and not lost <= _span_of(rows):
        best = max(
            (n for n in live if n not in chosen),
            key=lambda n: (len(lost & _span_of(rows + list(layout.node_bases[n - 1]))), -n),
        )
        chosen.append(best)
        rows += layout.node_bases[best - 1]
    if not lost <= _span_of(rows):
        raise InsufficientLiveNodes(f"greedy search found no {d}-node repair for N{l}")
    downloads = [(n, p) for n in chosen for p in range(1, layout.alpha + 1)]
    for item in list(downloads):
        trial = [x for x in downloads if x != item]
        if _covers_pieces(layout, trial, l):
            downloads = trial
    return _plan_from_downloads(layout, l, downloads, optimal=False)


def _span_of(rows):
    pts = {0}
    for v in rows:
        pts |= {p ^ v for p in pts}
    return pts


def _covers_pieces(layout, downloads, l):
    rows = [layout.node_bases[n - 1][p - 1] for n, p in downloads]
    return rank(rows + list(layout.node_bases[l - 1])) == rank(rows)


@dataclass
class Assignment:
    pairs: dict      # failed node -> (i, j)
    load: dict       # live node -> number of repairs it serves
    infeasible: list

    @property
    def feasible(self):
        return not self.infeasible


def assign_repairs(layout, failed, live):
    """Greedy load-balanced pair choice; failed nodes without a pair are listed, not raised."""
    failed = sorted(set(failed))
    live = sorted(set(live))
    if set(failed) & set(live):
        raise SpreadCodeError("failed and live sets overlap")
    load = {n: 0 for n in live}
    pairs = {}
    infeasible = []
    for f in failed:
        cands = repair_pairs(layout, f, live)
        if not cands:
            infeasible.append(f)
            continue
        i, j = min(cands, key=lambda p: (max(load[p[0]], load[p[1]]),
                                         load[p[0]] + load[p[1]], p))
        pairs[f] = (i, j)
        load[i] += 1
        load[j] += 1
    return Assignment(pairs, load, infeasible)


def simultaneous_assignment(layout, failed, live):
    if not failed:
        raise SpreadCodeError("no failed nodes given")
    result = assign_repairs(layout, failed, live)
    if result.infeasible:
        raise Infeasible(result.infeasible[0])
    return result
