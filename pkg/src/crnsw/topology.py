"""Random geometric CRN topologies and the graph metrics capacity depends on."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ParameterError

Adjacency = Mapping[int, "set[int] | frozenset[int]"]

SU = "SU"
PU = "PU"


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    kind: str
    tx_range: float
    radios: int = 0
    channels: frozenset = frozenset()

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Topology:
    """SUs occupy ids 0..M-1; PUs follow. Edges are SU pairs (u < v)."""

    nodes: tuple[Node, ...]
    edges: frozenset
    area: tuple[float, float]
    n_channels: int
    seed: int = 0
    _adj: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        adj = {n.id: set() for n in self.nodes if n.kind == SU}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", {k: frozenset(v) for k, v in adj.items()})

    @property
    def su_ids(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind == SU]

    @property
    def pus(self) -> list[Node]:
        return [n for n in self.nodes if n.kind == PU]

    @property
    def adjacency(self) -> dict[int, frozenset]:
        return self._adj

    def node(self, i: int) -> Node:
        return self.nodes[i]

    def neighbors(self, i: int) -> frozenset:
        return self._adj[i]

    def degree(self, i: int) -> int:
        return len(self._adj[i])

    def graph(self, extra_edges: Iterable[tuple[int, int]] = ()) -> dict[int, set]:
        """Mutable copy of the SU adjacency, optionally with extra (shortcut) edges."""
        g = {k: set(v) for k, v in self._adj.items()}
        for u, v in extra_edges:
            g[u].add(v)
            g[v].add(u)
        return g

    def with_channels(self, channel_sets: Mapping[int, frozenset]) -> "Topology":
        nodes = tuple(
            Node(n.id, n.x, n.y, n.kind, n.tx_range, n.radios, frozenset(channel_sets[n.id]))
            if n.id in channel_sets else n
            for n in self.nodes
        )
        return Topology(nodes, self.edges, self.area, self.n_channels, self.seed)


def generate_topology(
    m_su: int,
    n_pu: int,
    area=(1000.0, 1000.0),
    su_range: float = 50.0,
    pu_range: float = 100.0,
    radios: int = 4,
    n_channels: int = 12,
    channel_availability: float = 0.8,
    seed: int = 0,
    target_degree: float | None = 4.0,
) -> Topology:
    """Place PUs and SUs uniformly at random and connect SUs within range.

    With `target_degree` set, positions are scaled about the origin (and the
    area with them) so the SU graph has round(target * M / 2) edges.
    PU i owns channel i mod N. Each SU lists every channel independently
    with probability `channel_availability`.
    """
    if m_su < 1 or n_pu < 0 or n_channels < 1:
        raise ParameterError("need m_su >= 1, n_pu >= 0, n_channels >= 1")
    width, height = float(area[0]), float(area[1])
    if width <= 0 or height <= 0:
        raise ParameterError("deployment area must be positive")
    if not 0.0 <= channel_availability <= 1.0:
        raise ParameterError("channel availability must lie in [0, 1]")

    rng = np.random.default_rng(seed)
    su_xy = rng.uniform((0, 0), (width, height), size=(m_su, 2))
    pu_xy = rng.uniform((0, 0), (width, height), size=(n_pu, 2))
    avail = rng.random((m_su, n_channels)) < channel_availability

    scale = 1.0
    if target_degree is not None and m_su > 1:
        want = int(round(target_degree * m_su / 2))
        d = np.sort(_pair_distances(su_xy))
        if 0 < want <= len(d):
            hi = d[want] if want < len(d) else d[want - 1] * 1.01
            scale = su_range / (0.5 * (d[want - 1] + hi))
    su_xy = su_xy * scale
    pu_xy = pu_xy * scale

    nodes = []
    for i in range(m_su):
        chans = frozenset(int(c) for c in np.flatnonzero(avail[i]))
        nodes.append(Node(i, float(su_xy[i, 0]), float(su_xy[i, 1]), SU, su_range, radios, chans))
    for j in range(n_pu):
        nodes.append(Node(m_su + j, float(pu_xy[j, 0]), float(pu_xy[j, 1]), PU, pu_range, 0,
                          frozenset({j % n_channels})))
    edges = frozenset(_range_edges(su_xy, su_range))
    return Topology(tuple(nodes), edges, (float(width * scale), float(height * scale)), n_channels, seed)


def _pair_distances(xy: np.ndarray) -> np.ndarray:
    iu = np.triu_indices(len(xy), k=1)
    diff = xy[:, None, :] - xy[None, :, :]
    return np.sqrt((diff ** 2).sum(-1))[iu]


def _range_edges(xy: np.ndarray, r: float):
    diff = xy[:, None, :] - xy[None, :, :]
    close = np.sqrt((diff ** 2).sum(-1)) <= r
    us, vs = np.nonzero(np.triu(close, k=1))
    return [(int(u), int(v)) for u, v in zip(us, vs)]


# --- graph metrics -----------------------------------------------------------


@dataclass(frozen=True)
class TopologyMetrics:
    mean_degree: float
    clustering: float
    avg_path_length: float | None
    per_node_degree: dict
    per_node_clustering: dict


def clustering_coefficient(adj: Adjacency) -> tuple[float, dict[int, float]]:
    """Mean local clustering and per-node values (0 for degree < 2)."""
    per = {}
    for v, nbrs in adj.items():
        k = len(nbrs)
        if k < 2:
            per[v] = 0.0
            continue
        links = sum(len(adj[u] & nbrs) for u in nbrs) / 2
        per[v] = links / (k * (k - 1) / 2)
    if not per:
        raise ParameterError("graph has no nodes")
    return sum(per.values()) / len(per), per


def bfs_distances(adj: Adjacency, src: int) -> dict[int, int]:
    dist = {src: 0}
    q = deque([src])
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if w not in dist:
                dist[w] = du
                q.append(w)
    return dist


@dataclass(frozen=True)
class PathStats:
    total_hops: int
    connected_pairs: int  # ordered pairs
    n_nodes: int
    inverse_hops: float = 0.0  # sum of 1/d over connected ordered pairs

    @property
    def mean(self) -> float | None:
        return self.total_hops / self.connected_pairs if self.connected_pairs else None

    @property
    def reach(self) -> float:
        """Fraction of ordered node pairs that are connected."""
        n = self.n_nodes
        return self.connected_pairs / (n * (n - 1)) if n > 1 else 0.0

    @property
    def efficiency(self) -> float:
        """Mean of 1/d over all ordered pairs, unreachable pairs contributing 0."""
        n = self.n_nodes
        return self.inverse_hops / (n * (n - 1)) if n > 1 else 0.0

    @property
    def harmonic(self) -> float:
        """Harmonic mean hop distance over all ordered pairs (inf if none connected)."""
        e = self.efficiency
        return 1.0 / e if e > 0 else math.inf


def path_stats(adj: Adjacency) -> PathStats:
    total = pairs = 0
    inv = 0.0
    for s in adj:
        d = bfs_distances(adj, s)
        total += sum(d.values())
        pairs += len(d) - 1
        inv += sum(1.0 / h for h in d.values() if h)
    return PathStats(total, pairs, len(adj), inv)


def average_path_length(adj: Adjacency) -> float | None:
    """Mean hop distance over ordered connected pairs; None when there are none.

    Disconnected pairs are left out rather than counted as infinite.
    """
    return path_stats(adj).mean


def path_length_ratio(t: Topology, shortcuts: Iterable[tuple[int, int]]) -> float:
    base = average_path_length(t.adjacency)
    with_sc = average_path_length(t.graph(shortcuts))
    if base is None or with_sc is None:
        raise ParameterError("no connected pairs")
    return with_sc / base


def measure(t: Topology, shortcuts: Iterable[tuple[int, int]] = ()) -> TopologyMetrics:
    g = t.graph(shortcuts)
    deg = {v: len(n) for v, n in g.items()}
    cg, per_c = clustering_coefficient(g)
    return TopologyMetrics(
        mean_degree=sum(deg.values()) / len(deg),
        clustering=cg,
        avg_path_length=average_path_length(g),
        per_node_degree=deg,
        per_node_clustering=per_c,
    )


def components(adj: Adjacency) -> list[set[int]]:
    """Connected components, largest first (ties by smallest member id)."""
    seen: set[int] = set()
    comps = []
    for v in sorted(adj):
        if v not in seen:
            c = set(bfs_distances(adj, v))
            seen |= c
            comps.append(c)
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps


def nearest_to_center(t: Topology, among: Iterable[int] | None = None) -> int:
    cx, cy = t.area[0] / 2, t.area[1] / 2
    sus = [t.node(i) for i in (t.su_ids if among is None else among)]
    return min(sus, key=lambda n: ((n.x - cx) ** 2 + (n.y - cy) ** 2, n.id)).id


# --- text format -------------------------------------------------------------


def dump_topology(t: Topology) -> str:
    sus = [n for n in t.nodes if n.kind == SU]
    pus = [n for n in t.nodes if n.kind == PU]
    su_range = sus[0].tx_range if sus else 0.0
    pu_range = pus[0].tx_range if pus else 0.0
    lines = [
        f"nodes {len(t.nodes)} channels {t.n_channels}",
        f"area {t.area[0]!r} {t.area[1]!r}",
        f"range su={su_range!r} pu={pu_range!r}",
        f"seed {t.seed}",
    ]
    for n in t.nodes:
        chans = ",".join(str(c) for c in sorted(n.channels))
        lines.append(f"{n.id} {n.x!r} {n.y!r} {n.kind} {n.radios} ch:{chans}")
    for u, v in sorted(t.edges):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def load_topology(text: str) -> Topology:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "nodes" or head[2] != "channels":
        raise ParameterError(f"bad header: {lines[0]!r}")
    n_nodes, n_channels = int(head[1]), int(head[3])
    area, ranges, seed = (0.0, 0.0), {"su": 0.0, "pu": 0.0}, 0
    nodes, edges = [], []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "area":
            area = (float(parts[1]), float(parts[2]))
        elif parts[0] == "range":
            ranges = {k: float(v) for k, v in (p.split("=") for p in parts[1:])}
        elif parts[0] == "seed":
            seed = int(parts[1])
        elif parts[0] == "e":
            u, v = int(parts[1]), int(parts[2])
            edges.append((min(u, v), max(u, v)))
        else:
            nid, x, y, kind, radios, ch = parts
            chans = ch[3:]
            channels = frozenset(int(c) for c in chans.split(",")) if chans else frozenset()
            rng = ranges["su"] if kind == SU else ranges["pu"]
            nodes.append(Node(int(nid), float(x), float(y), kind, rng, int(radios), channels))
    if len(nodes) != n_nodes:
        raise ParameterError(f"header says {n_nodes} nodes, found {len(nodes)}")
    return Topology(tuple(nodes), frozenset(edges), area, n_channels, seed)
