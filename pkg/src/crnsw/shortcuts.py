"""Small-world shortcut creation: NSC plus the RS and wide-region baselines.

NSC hubs are local degree maxima with a non-empty channel set. Each hub
looks for candidates inside a narrow region pointing at a destination node
and proposes a shortcut to the candidate with the best connectivity ratio.
A candidate accepts (ack) only if it is not yet a shortcut endpoint.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ParameterError
from .topology import Topology, components, nearest_to_center

NSC = "NSC"
RS = "RS"
WIDE = "WIDE"
NONE = "NONE"

MESSAGE_TYPES = ("hello", "create", "ack", "nack", "force")


@dataclass(frozen=True)
class GeometryParams:
    alpha: float = 30.0
    destination: int | None = None  # None: see default_destination

    def __post_init__(self):
        if not 0 < self.alpha < 180:
            raise ParameterError("alpha must lie in (0, 180) degrees")

    def resolve(self, t: Topology) -> int:
        return default_destination(t) if self.destination is None else self.destination


def default_destination(t: Topology) -> int:
    """SU nearest the area centre within the largest connected component."""
    return nearest_to_center(t, among=components(t.adjacency)[0])


@dataclass(frozen=True)
class ShortcutPlan:
    shortcuts: tuple = ()  # (hub, target) in creation order
    method: str = NONE
    messages: dict = field(default_factory=lambda: dict.fromkeys(MESSAGE_TYPES, 0))
    forced: frozenset = frozenset()  # (hub, target) pairs made by force-create

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(self.shortcuts)

    @property
    def endpoints(self) -> set[int]:
        return {v for pair in self.shortcuts for v in pair}

    @property
    def targets(self) -> list[int]:
        return [t for _, t in self.shortcuts]

    def partner(self) -> dict[int, int]:
        out = {}
        for u, v in self.shortcuts:
            out[u] = v
            out[v] = u
        return out

    def total_messages(self) -> int:
        return sum(self.messages.values())

    def __len__(self):
        return len(self.shortcuts)


def empty_plan() -> ShortcutPlan:
    return ShortcutPlan()


def select_hubs(t: Topology, max_hubs: int | None = None, exclude=frozenset()) -> list[int]:
    """Local degree maxima with a non-empty channel set, by (degree desc, id asc).

    Nodes in `exclude` are neither eligible nor compared against.
    """
    hubs = []
    for v in t.su_ids:
        if v in exclude:
            continue
        node = t.node(v)
        deg = t.degree(v)
        if not node.channels or node.radios < 2:
            continue
        if all(deg >= t.degree(u) for u in t.neighbors(v) if u not in exclude):
            hubs.append(v)
    hubs.sort(key=lambda v: (-t.degree(v), v))
    return hubs if max_hubs is None else hubs[:max_hubs]


def in_search_region(i, d, j, alpha: float) -> bool:
    """Whether j lies inside the wedge from i towards d.

    Both angles must satisfy tan(theta) < tan(alpha/2), and j must project
    strictly between i and d on the i->d axis.
    """
    ux, uy = d[0] - i[0], d[1] - i[1]
    vx, vy = j[0] - i[0], j[1] - i[1]
    length2 = ux * ux + uy * uy
    if length2 == 0:
        raise ParameterError("hub and destination coincide")
    dot_i = ux * vx + uy * vy
    dot_d = length2 - dot_i  # (i - d) . (j - d)
    if dot_i <= 0 or dot_d <= 0:
        return False
    cross = abs(ux * vy - uy * vx)
    limit = math.tan(math.radians(alpha / 2))
    return cross / dot_i < limit and cross / dot_d < limit


def in_wide_region(i, d, j) -> bool:
    """Half-plane towards d: the angle at i between i->d and i->j is below 90 degrees."""
    if tuple(j) == tuple(d) or tuple(j) == tuple(i):
        return False
    ux, uy = d[0] - i[0], d[1] - i[1]
    return ux * (j[0] - i[0]) + uy * (j[1] - i[1]) > 0


def region_candidates(t: Topology, hub: int, dest: int, alpha: float, wide: bool = False) -> list[int]:
    hi = t.node(hub).position
    dp = t.node(dest).position
    nbrs = t.neighbors(hub)
    out = []
    for j in t.su_ids:
        if j == hub or j in nbrs:
            continue
        pj = t.node(j).position
        ok = in_wide_region(hi, dp, pj) if wide else in_search_region(hi, dp, pj, alpha)
        if ok:
            out.append(j)
    return out


def _rank_by_connectivity(t: Topology, hub: int, cands: Sequence[int], connectivity) -> list[int]:
    return sorted(cands, key=lambda j: (-connectivity[hub][j], -t.degree(j), j))


def _rank_by_degree(t: Topology, cands: Sequence[int]) -> list[int]:
    return sorted(cands, key=lambda j: (-t.degree(j), j))


def select_shortcut_candidate(t: Topology, hub: int, g: GeometryParams, connectivity) -> int | None:
    dest = g.resolve(t)
    if hub == dest:
        return None
    ranked = _rank_by_connectivity(t, hub, region_candidates(t, hub, dest, g.alpha), connectivity)
    return ranked[0] if ranked else None


def select_wide_candidate(t: Topology, hub: int, g: GeometryParams) -> int | None:
    """Highest-degree non-neighbour in the half-plane towards the destination."""
    dest = g.resolve(t)
    if hub == dest:
        return None
    ranked = _rank_by_degree(t, region_candidates(t, hub, dest, g.alpha, wide=True))
    return ranked[0] if ranked else None


def _two_hop(t: Topology, hub: int) -> list[int]:
    nbrs = t.neighbors(hub)
    out = set()
    for u in nbrs:
        out |= t.neighbors(u)
    out -= nbrs
    out.discard(hub)
    return sorted(out)


def _handshake(
    t: Topology,
    dest: int,
    budget: int,
    ranker: Callable[[int], list[int]],
    rng: random.Random,
    method: str,
    extra_search: bool,
) -> ShortcutPlan:
    msgs = dict.fromkeys(MESSAGE_TYPES, 0)
    made: list[tuple[int, int]] = []
    forced = set()
    endpoints: set[int] = set()
    if budget <= 0:
        return ShortcutPlan((), method, msgs, frozenset())
    tried: set[int] = {dest}
    # hubs are re-elected among the remaining nodes until the budget is met
    while len(made) < budget:
        hubs = select_hubs(t, exclude=endpoints | tried)
        if not hubs:
            break
        for hub in hubs:
            if len(made) >= budget:
                break
            if hub in endpoints:
                continue
            tried.add(hub)
            msgs["hello"] += 1
            ranked = ranker(hub)
            target = None
            for cand in ranked:
                msgs["create"] += 1
                if cand in endpoints:
                    msgs["nack"] += 1
                    continue
                msgs["ack"] += 1
                target = cand
                break
            if target is None and ranked:
                # every candidate refused; fall back to a nearby node that has channels
                pool = [v for v in _two_hop(t, hub) if v not in endpoints and t.node(v).channels]
                if pool:
                    target = rng.choice(pool)
                    msgs["force"] += 1
                    forced.add((hub, target))
            if target is None:
                continue
            made.append((hub, target))
            endpoints |= {hub, target}
            if extra_search:
                msgs["hello"] += 1
    return ShortcutPlan(tuple(made), method, msgs, frozenset(forced))


def build_plan_nsc(t: Topology, g: GeometryParams, connectivity, shortcut_budget: int, seed: int = 0) -> ShortcutPlan:
    if shortcut_budget < 0:
        raise ParameterError("shortcut budget must be >= 0")
    dest = g.resolve(t)

    def ranker(hub):
        return _rank_by_connectivity(t, hub, region_candidates(t, hub, dest, g.alpha), connectivity)

    return _handshake(t, dest, shortcut_budget, ranker, random.Random(seed), NSC, extra_search=False)


def build_plan_wide(t: Topology, g: GeometryParams, shortcut_budget: int, seed: int = 0) -> ShortcutPlan:
    """Baseline with a half-plane search region and degree-only candidate choice."""
    if shortcut_budget < 0:
        raise ParameterError("shortcut budget must be >= 0")
    dest = g.resolve(t)

    def ranker(hub):
        return _rank_by_degree(t, region_candidates(t, hub, dest, g.alpha, wide=True))

    return _handshake(t, dest, shortcut_budget, ranker, random.Random(seed), WIDE, extra_search=True)


def build_plan_rs(t: Topology, shortcut_budget: int, seed: int = 0) -> ShortcutPlan:
    """Pair uniformly random nodes with uniformly random non-neighbours."""
    if shortcut_budget < 0:
        raise ParameterError("shortcut budget must be >= 0")
    rng = random.Random(seed)
    msgs = dict.fromkeys(MESSAGE_TYPES, 0)
    made = []
    used: set[int] = set()
    pool = list(t.su_ids)
    while len(made) < shortcut_budget and pool:
        u = rng.choice(pool)
        others = [v for v in t.su_ids if v != u and v not in used and v not in t.neighbors(u)]
        if not others:
            pool.remove(u)
            continue
        v = rng.choice(others)
        made.append((u, v))
        used |= {u, v}
        pool = [w for w in pool if w not in used]
        msgs["create"] += 1
        msgs["ack"] += 1
    return ShortcutPlan(tuple(made), RS, msgs, frozenset())


def dump_plan(plan: ShortcutPlan) -> str:
    lines = [f"plan {plan.method}"]
    for u, v in plan.shortcuts:
        tail = " forced" if (u, v) in plan.forced else ""
        lines.append(f"s {u} {v} {plan.method}{tail}")
    counts = " ".join(f"{k}={plan.messages.get(k, 0)}" for k in MESSAGE_TYPES)
    lines.append(f"msgs {counts}")
    return "\n".join(lines) + "\n"


def load_plan(text: str) -> ShortcutPlan:
    pairs, forced, method = [], set(), NONE
    msgs = dict.fromkeys(MESSAGE_TYPES, 0)
    for ln in text.splitlines():
        parts = ln.split()
        if not parts:
            continue
        if parts[0] == "plan":
            method = parts[1]
        elif parts[0] == "s":
            u, v = int(parts[1]), int(parts[2])
            method = parts[3]
            pairs.append((u, v))
            if len(parts) > 4 and parts[4] == "forced":
                forced.add((u, v))
        elif parts[0] == "msgs":
            for kv in parts[1:]:
                k, val = kv.split("=")
                msgs[k] = int(val)
        else:
            raise ParameterError(f"unrecognised plan line {ln!r}")
    return ShortcutPlan(tuple(pairs), method, msgs, frozenset(forced))
