"""Per-node channel-to-radio assignment.

The CA policy ranks the channels a node shares with its neighbourhood by
slack Delta = T_v - T_r, drops channels whose slack is negative and hands
the smallest-slack channel to each free radio in turn. Shortcut endpoints
reserve their first radio for the shortcut link.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ParameterError
from .queueing import ChannelModel, QueueParams
from .shortcuts import ShortcutPlan
from .topology import Topology

CA = "CA"
RANDOM = "Random"


@dataclass(frozen=True)
class ChannelTiming:
    channel: int
    t_v: float
    t_r: float

    @property
    def delta(self) -> float:
        return self.t_v - self.t_r


def estimate_timing(q: QueueParams, packet_bits: float, w: float, channel: int = 0) -> ChannelTiming:
    """T_v is the mean PU inter-arrival time 1/lambda_p; T_r = packet_bits / W."""
    if w <= 0:
        raise ParameterError("data rate must be positive")
    if packet_bits <= 0:
        raise ParameterError("packet size must be positive")
    t_v = math.inf if q.lambda_p == 0 else 1.0 / q.lambda_p
    return ChannelTiming(channel, t_v, packet_bits / w)


def channel_timings(model: ChannelModel, packet_bits: float) -> dict[int, ChannelTiming]:
    return {k: estimate_timing(q, packet_bits, model.data_rate_w, k) for k, q in enumerate(model.channels)}


@dataclass(frozen=True)
class NodeAssignment:
    channels: tuple = ()  # radio order; radio 0 is the shortcut radio when `shortcut` is set
    shortcut: tuple | None = None  # (partner, channel or None)
    unassigned: int = 0
    peers: tuple = ()  # per data radio: the neighbour it was tuned for

    @property
    def data_channels(self) -> tuple:
        if self.shortcut is not None and self.shortcut[1] is not None:
            return self.channels[1:]
        return self.channels


@dataclass(frozen=True)
class Assignment:
    per_node: dict = field(default_factory=dict)
    method: str = CA

    @property
    def unassigned_radios(self) -> dict[int, int]:
        return {v: a.unassigned for v, a in self.per_node.items()}

    def data_channels(self, v: int) -> frozenset:
        return frozenset(self.per_node[v].data_channels)

    def shortcut_channel(self, v: int) -> int | None:
        sc = self.per_node[v].shortcut
        return None if sc is None else sc[1]


def _temp(avai, neighbor_sets: Mapping[int, frozenset]) -> set:
    shared = set()
    for chans in neighbor_sets.values():
        shared |= set(avai) & set(chans)
    return shared


def ranked_channels(chans, timings: Mapping[int, ChannelTiming]) -> list[int]:
    """Channels sorted by (Delta, index) with negative-slack channels removed."""
    keep = [c for c in chans if timings[c].delta >= 0]
    return sorted(keep, key=lambda c: (timings[c].delta, c))


def _peers(chans, neighbor_sets) -> tuple:
    out = []
    for c in chans:
        holders = sorted(n for n, s in neighbor_sets.items() if c in s)
        out.append(holders[0] if holders else None)
    return tuple(out)


def _check_radios(radios, shortcut):
    if radios < 1:
        raise ParameterError("a node needs at least one radio")
    if shortcut is not None and radios < 2:
        raise ParameterError("shortcut endpoints need at least two radios")


def assign_channels(
    node: int,
    avai,
    neighbor_sets: Mapping[int, frozenset],
    timings: Mapping[int, ChannelTiming],
    radios: int,
    shortcut: tuple | None = None,
) -> NodeAssignment:
    """Minimal-slack-first assignment for one node.

    `shortcut` is (partner, channel) for shortcut endpoints; that radio is
    served first and its channel is excluded from the data radios.
    """
    _check_radios(radios, shortcut)
    free = radios
    chosen = []
    if shortcut is not None:
        free -= 1
        if shortcut[1] is not None:
            chosen.append(shortcut[1])
    taken = set(chosen)
    temp = [c for c in ranked_channels(_temp(avai, neighbor_sets), timings) if c not in taken]
    data = temp[:free]
    chosen.extend(data)
    return NodeAssignment(
        channels=tuple(chosen),
        shortcut=shortcut,
        unassigned=radios - len(chosen),
        peers=_peers(data, neighbor_sets),
    )


def assign_random(
    node: int,
    avai,
    neighbor_sets: Mapping[int, frozenset],
    radios: int,
    seed: int,
    shortcut: tuple | None = None,
) -> NodeAssignment:
    _check_radios(radios, shortcut)
    rng = random.Random(seed * 1_000_003 + node)
    free = radios
    chosen = []
    if shortcut is not None:
        free -= 1
        if shortcut[1] is not None:
            chosen.append(shortcut[1])
    # fixed per-node permutation, so reserving a shortcut radio only trims the tail
    order = sorted(set(avai).union(*neighbor_sets.values()))
    rng.shuffle(order)
    pool = _temp(avai, neighbor_sets) - set(chosen)
    data = [c for c in order if c in pool][:free]
    chosen.extend(data)
    return NodeAssignment(tuple(chosen), shortcut, radios - len(chosen), _peers(data, neighbor_sets))


def shortcut_channel(avai_u, avai_v, timings, method: str, rng: random.Random | None = None) -> int | None:
    common = set(avai_u) & set(avai_v)
    if method == CA:
        ranked = ranked_channels(common, timings)
        return ranked[0] if ranked else None
    pool = sorted(common)
    return rng.choice(pool) if pool else None


def _shortcut_channels(t: Topology, plan: ShortcutPlan, timings, method, seed, avai) -> dict:
    rng = random.Random(seed)
    out = {}
    for u, v in plan.shortcuts:
        c = shortcut_channel(avai[u], avai[v], timings, method, rng)
        out[u] = (v, c)
        out[v] = (u, c)
    return out


def assign_network(
    t: Topology,
    plan: ShortcutPlan,
    timings: Mapping[int, ChannelTiming],
    method: str = CA,
    seed: int = 0,
    avai: Mapping[int, frozenset] | None = None,
) -> Assignment:
    """Run the per-node assignment for every SU in id order."""
    if method not in (CA, RANDOM):
        raise ParameterError(f"unknown assignment method {method!r}")
    avai = {v: t.node(v).channels for v in t.su_ids} if avai is None else avai
    sc = _shortcut_channels(t, plan, timings, method, seed, avai)
    per = {}
    for v in t.su_ids:
        per[v] = _assign_one(t, v, avai, timings, method, seed, sc.get(v))
    return Assignment(per, method)


def _assign_one(t, v, avai, timings, method, seed, shortcut):
    nbr_sets = {u: avai[u] for u in t.neighbors(v)}
    radios = t.node(v).radios
    if method == CA:
        return assign_channels(v, avai[v], nbr_sets, timings, radios, shortcut)
    return assign_random(v, avai[v], nbr_sets, radios, seed, shortcut)


def reassign_on_pu_arrival(
    assignment: Assignment,
    t: Topology,
    plan: ShortcutPlan,
    timings: Mapping[int, ChannelTiming],
    affected,
    new_avai: Mapping[int, frozenset],
    seed: int = 0,
) -> Assignment:
    """Re-run the assignment for the affected nodes only.

    An affected shortcut endpoint that lost its shortcut channel picks a new
    one; the partner keeps its entry, so the link stays down until the
    partner is updated too.
    """
    affected = set(affected)
    if not affected:
        return assignment
    unknown = affected - set(assignment.per_node)
    if unknown:
        raise ParameterError(f"nodes {sorted(unknown)} not in assignment")
    avai = {v: t.node(v).channels for v in t.su_ids}
    avai.update({v: frozenset(c) for v, c in new_avai.items()})
    partner = plan.partner()
    per = dict(assignment.per_node)
    rng = random.Random(seed)
    for v in sorted(affected):
        sc = per[v].shortcut
        if sc is not None and (sc[1] is None or sc[1] not in avai[v]):
            p = partner[v]
            sc = (p, shortcut_channel(avai[v], avai[p], timings, assignment.method, rng))
        per[v] = _assign_one(t, v, avai, timings, assignment.method, seed, sc)
    return Assignment(per, assignment.method)


def dump_assignment(a: Assignment) -> str:
    lines = []
    for v in sorted(a.per_node):
        radios = " ".join(f"{r}:{c}" for r, c in enumerate(a.per_node[v].channels))
        lines.append(f"a {v} {radios}".rstrip())
    return "\n".join(lines) + "\n"


def load_assignment(text: str) -> dict[int, tuple]:
    """Parse the radio:channel lines back into node -> channel tuples."""
    out = {}
    for ln in text.splitlines():
        parts = ln.split()
        if not parts:
            continue
        if parts[0] != "a":
            raise ParameterError(f"unrecognised assignment line {ln!r}")
        pairs = sorted((int(r), int(c)) for r, c in (p.split(":") for p in parts[2:]))
        out[int(parts[1])] = tuple(c for _, c in pairs)
    return out
