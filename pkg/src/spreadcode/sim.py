"""Deterministic logical-time cluster simulator.

Each epoch first applies the failure model, then repairs every dead node
against the live set as it stood right after the failures (nodes repaired in
the same epoch never serve as sources). Repairs without a viable plan are
counted as failed and retried in the next epoch.
"""

from __future__ import annotations

import csv
import io
import random
from collections import Counter
from dataclasses import dataclass, field

from .codec import ObjectData, decode, encode, retrieve_systematic, systematic_map
from .errors import InsufficientLiveNodes, ScenarioError, SpreadCodeError
from .layout import derive_params, build_layout
from .repair import assign_repairs, plan_min_download, plan_pair_repair

POLICIES = ("eager", "min-download", "none")
REPORT_COLUMNS = ("epoch", "live", "transfers", "repairs_ok", "repairs_failed", "decodable")


@dataclass
class ScenarioConfig:
    B: int
    alpha: int
    seed: int
    object_len: int = 64
    p_node: float | None = None        # per-epoch survival probability
    kills: dict = field(default_factory=dict)  # epoch -> list of node ids
    policy: str = "eager"
    d: int = 2
    epochs: int = 1

    def __post_init__(self):
        if self.seed is None:
            raise ScenarioError("seed is mandatory")
        if self.policy not in POLICIES:
            raise ScenarioError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.p_node is not None and not 0.0 <= self.p_node <= 1.0:
            raise ScenarioError("p_node must be in [0, 1]")
        if self.epochs < 0 or self.object_len < 1:
            raise ScenarioError("epochs must be >= 0 and object_len >= 1")


_INT_KEYS = {"B", "alpha", "seed", "object_len", "d", "epochs"}


def parse_scenario(text):
    """key=value lines; ``kill=<epoch>:<node>,<node>`` may repeat."""
    values = {}
    kills = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = (s.strip() for s in line.partition("="))
        if not sep:
            raise ScenarioError(f"line {lineno}: expected key=value")
        try:
            if key == "kill":
                epoch, _, nodes = val.partition(":")
                kills.setdefault(int(epoch), []).extend(
                    int(n) for n in nodes.split(",") if n.strip())
            elif key in _INT_KEYS:
                values[key] = int(val)
            elif key == "p_node":
                values[key] = float(val)
            elif key == "policy":
                values[key] = val
            else:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ScenarioError(f"line {lineno}: {exc}") from None
    missing = {"B", "alpha", "seed"} - values.keys()
    if missing:
        raise ScenarioError("scenario lacks " + ", ".join(sorted(missing)))
    return ScenarioConfig(kills=kills, **values)


@dataclass
class NodeState:
    alive: bool
    pieces: tuple | None


@dataclass
class Metrics:
    pieces_transferred: int = 0
    repairs_ok: int = 0
    repairs_failed: int = 0
    retrieval_attempts: int = 0
    retrieval_successes: int = 0
    repair_degrees: Counter = field(default_factory=Counter)


@dataclass
class ClusterState:
    config: ScenarioConfig
    layout: object
    original: ObjectData
    nodes: list
    rng: random.Random
    epoch: int = 0
    metrics: Metrics = field(default_factory=Metrics)
    history: list = field(default_factory=list)

    def live_nodes(self):
        return [i for i, s in enumerate(self.nodes, start=1) if s.alive]

    def fetch(self, node, idx):
        state = self.nodes[node - 1]
        if not state.alive:
            raise InsufficientLiveNodes(f"N{node} is down")
        return state.pieces[idx - 1].payload


def sim_init(config):
    params = derive_params(config.B, config.alpha)
    layout = build_layout(params)
    rng = random.Random(config.seed)
    data = rng.randbytes(config.object_len)
    obj = ObjectData.from_bytes(data, params.B)
    nodes = [NodeState(True, held.pieces) for held in encode(layout, obj)]
    return ClusterState(config, layout, obj, nodes, rng)


def _kill(state, node):
    s = state.nodes[node - 1]
    s.alive = False
    s.pieces = None


def _apply_failures(state):
    cfg = state.config
    for node in cfg.kills.get(state.epoch, ()):
        state.layout.check_node(node)
        _kill(state, node)
    if cfg.p_node is not None and cfg.p_node < 1.0:
        for node in state.live_nodes():
            if state.rng.random() >= cfg.p_node:
                _kill(state, node)


def _repair(state):
    """Repair dead nodes; returns (transfers, ok, failed) for this epoch."""
    cfg = state.config
    dead = [i for i, s in enumerate(state.nodes, start=1) if not s.alive]
    if cfg.policy == "none" or not dead:
        return 0, 0, 0
    live = state.live_nodes()
    plans = {}
    failed = 0
    if cfg.policy == "eager":
        assignment = assign_repairs(state.layout, dead, live)
        for node, pair in assignment.pairs.items():
            plans[node] = plan_pair_repair(state.layout, node, pair)
        failed = len(assignment.infeasible)
    else:
        for node in dead:
            try:
                plans[node] = plan_min_download(state.layout, node, cfg.d, live)
            except SpreadCodeError:
                failed += 1
    transfers = 0
    rebuilt = {node: plan.execute(state.fetch) for node, plan in plans.items()}
    for node, pieces in rebuilt.items():
        state.nodes[node - 1] = NodeState(True, tuple(pieces))
        transfers += plans[node].download_units
        state.metrics.repair_degrees[plans[node].d] += 1
    return transfers, len(plans), failed


def is_decodable(state):
    pieces = [p for s in state.nodes if s.alive for p in s.pieces]
    try:
        out = decode(pieces, state.layout.B, state.original.size)
    except SpreadCodeError:
        return False
    return out == state.original


def sim_step(state):
    state.epoch += 1
    _apply_failures(state)
    transfers, ok, failed = _repair(state)
    m = state.metrics
    m.pieces_transferred += transfers
    m.repairs_ok += ok
    m.repairs_failed += failed
    state.history.append(
        (state.epoch, len(state.live_nodes()), transfers, ok, failed, int(is_decodable(state))))
    return state


def sim_run(config):
    state = sim_init(config)
    for _ in range(config.epochs):
        sim_step(state)
    return state


@dataclass(frozen=True)
class RetrievalResult:
    success: bool
    contacted: tuple


def sim_retrieve(state, strategy="random-k"):
    """Try to rebuild the object; ``strategy`` is random-k, systematic or all-live."""
    layout = state.layout
    live = state.live_nodes()
    if strategy == "random-k":
        contacted = tuple(sorted(state.rng.sample(live, layout.k))) if len(live) >= layout.k else ()
    elif strategy == "systematic":
        contacted = tuple(sorted({src.node for src in systematic_map(layout)}))
    elif strategy == "all-live":
        contacted = tuple(live)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    success = False
    if strategy == "systematic":
        try:
            success = retrieve_systematic(layout, state.fetch, state.original.size) == state.original
        except SpreadCodeError:
            success = False
    elif contacted and all(state.nodes[n - 1].alive for n in contacted):
        pieces = [p for n in contacted for p in state.nodes[n - 1].pieces]
        try:
            success = decode(pieces, layout.B, state.original.size) == state.original
        except SpreadCodeError:
            success = False
    state.metrics.retrieval_attempts += 1
    state.metrics.retrieval_successes += int(success)
    return RetrievalResult(success, contacted)


def sim_report(state):
    """CSV with one row per epoch (header only before the first step)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    w.writerows(state.history)
    return buf.getvalue()


def sim_summary(state):
    m = state.metrics
    degrees = ",".join(f"d{d}:{c}" for d, c in sorted(m.repair_degrees.items())) or "-"
    durable = all(row[-1] for row in state.history) if state.history else is_decodable(state)
    return (f"epochs={state.epoch} live={len(state.live_nodes())}/{state.layout.n} "
            f"transfers={m.pieces_transferred} repairs_ok={m.repairs_ok} "
            f"repairs_failed={m.repairs_failed} degrees={degrees} "
            f"retrievals={m.retrieval_successes}/{m.retrieval_attempts} durable={int(durable)}")
