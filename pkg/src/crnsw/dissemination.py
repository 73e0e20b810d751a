"""Slotted flooding over the channel-feasible SU graph.

Per slot each informed node sends on every tuned radio to the lowest-id
uninformed neighbour reachable on that radio's channel. A transmission
goes through when the PU of that channel is idle in the slot; PU activity
is redrawn independently per slot and channel. Blocked sends retry next
slot.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channels import Assignment
from .errors import ParameterError
from .shortcuts import ShortcutPlan
from .topology import Topology


@dataclass(frozen=True)
class SimConfig:
    source: int
    pu_busy_prob_per_channel: Sequence[float]
    slot_length: float = 0.1
    max_slots: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.max_slots < 1:
            raise ParameterError("max_slots must be >= 1")
        p = np.asarray(self.pu_busy_prob_per_channel, dtype=float)
        if np.any((p < 0) | (p > 1)):
            raise ParameterError("PU busy probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class SimResult:
    latency_slots: int | None  # None when some reachable node was not informed in time
    covered_fraction: float  # informed / all SUs
    per_node_first_arrival: dict = field(default_factory=dict)
    reachable: frozenset = frozenset()

    def latency_over(self, nodes: Iterable[int]) -> int | None:
        """Slot by which every node in `nodes` was informed, or None."""
        arr = self.per_node_first_arrival
        slots = []
        for v in nodes:
            if v not in arr:
                return None
            slots.append(arr[v])
        return max(slots, default=0)

    def csv_row(self, scenario: str, seed: int, shortcuts: int) -> dict:
        lat = "" if self.latency_slots is None else self.latency_slots
        return {"scenario": scenario, "seed": seed, "shortcuts": shortcuts,
                "latency": lat, "covered_fraction": self.covered_fraction}


def channel_links(t: Topology, plan: ShortcutPlan, a: Assignment) -> dict[int, list[tuple[int, int]]]:
    """(neighbour, channel) pairs each SU can transmit on, data links first."""
    links = {v: [] for v in t.su_ids}
    for u, v in sorted(t.edges):
        for c in sorted(a.data_channels(u) & a.data_channels(v)):
            links[u].append((v, c))
            links[v].append((u, c))
    for u, v in plan.shortcuts:
        cu, cv = a.shortcut_channel(u), a.shortcut_channel(v)
        if cu is not None and cu == cv:
            links[u].append((v, cu))
            links[v].append((u, cu))
    return links


def usable_graph(t: Topology, plan: ShortcutPlan, a: Assignment) -> dict[int, set]:
    g = {v: set() for v in t.su_ids}
    for u, nbrs in channel_links(t, plan, a).items():
        for v, _ in nbrs:
            g[u].add(v)
    return g


def _reachable(g, src) -> set:
    seen = {src}
    q = deque([src])
    while q:
        u = q.popleft()
        for w in g[u]:
            if w not in seen:
                seen.add(w)
                q.append(w)
    return seen


def run_dissemination(t: Topology, plan: ShortcutPlan, a: Assignment, cfg: SimConfig) -> SimResult:
    if cfg.source not in t.adjacency:
        raise ParameterError(f"source {cfg.source} is not an SU")
    busy_p = np.asarray(cfg.pu_busy_prob_per_channel, dtype=float)
    rng = np.random.default_rng(cfg.seed)
    partner = plan.partner()
    data = {u: a.data_channels(u) for u in t.su_ids}

    # per node: one (channel, receivers by id) entry per tuned radio
    radios = {}
    for u in t.su_ids:
        per = []
        for c in a.per_node[u].data_channels:
            per.append((c, sorted(v for v in t.neighbors(u) if c in data[v])))
        p = partner.get(u)
        sc = a.shortcut_channel(u)
        if p is not None and sc is not None and a.shortcut_channel(p) == sc:
            per.append((sc, [p]))
        radios[u] = per

    reach = _reachable(usable_graph(t, plan, a), cfg.source)
    arrival = {cfg.source: 0}
    slot = 0
    while len(arrival) < len(reach) and slot < cfg.max_slots:
        slot += 1
        idle = rng.random(len(busy_p)) >= busy_p
        new = {}
        for u in sorted(arrival):
            targeted = set()
            for c, rx in radios[u]:
                v = next((w for w in rx if w not in arrival and w not in targeted), None)
                if v is None:
                    continue
                targeted.add(v)
                if idle[c]:
                    new.setdefault(v, slot)
        arrival.update(new)

    done = len(arrival) == len(reach)
    latency = max(arrival.values()) if done else None
    return SimResult(
        latency_slots=latency,
        covered_fraction=len(arrival) / len(t.su_ids),
        per_node_first_arrival=dict(arrival),
        reachable=frozenset(reach),
    )


def latency_ratio(with_plan: SimResult, without_plan: SimResult) -> float | None:
    """Latency with shortcuts over latency without, both measured on the
    nodes the shortcut-free run reaches. None when incomparable."""
    base = without_plan.latency_slots
    if base is None or base == 0:
        return None
    lat = with_plan.latency_over(without_plan.reachable)
    if lat is None:
        return None
    return lat / base
