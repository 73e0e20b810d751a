"""Independent brute-force references and small fixture builders for the tests."""

import itertools
import math

import numpy as np

from crnsw.channels import ChannelTiming
from crnsw.topology import SU, Node, Topology


def birth_death_stationary(lam, mu, n_servers, k_capacity):
    """Stationary law of M/M/N/K by solving pi Q = 0 with a dense generator."""
    size = k_capacity + 1
    q = np.zeros((size, size))
    for h in range(size):
        if h < k_capacity:
            q[h, h + 1] = lam
        if h > 0:
            q[h, h - 1] = mu * min(h, n_servers)
        q[h, h] = -q[h].sum()
    a = np.vstack([q.T, np.ones(size)])
    b = np.zeros(size + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    return pi


def clustering_bruteforce(adj):
    """Triple loop over nodes and neighbour pairs."""
    per = {}
    for v in adj:
        nb = sorted(adj[v])
        k = len(nb)
        if k < 2:
            per[v] = 0.0
            continue
        closed = sum(1 for a, b in itertools.combinations(nb, 2) if b in adj[a])
        per[v] = closed / (k * (k - 1) / 2)
    return sum(per.values()) / len(per), per


def floyd_warshall_apl(adj):
    nodes = sorted(adj)
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    d = np.full((n, n), math.inf)
    np.fill_diagonal(d, 0)
    for u in adj:
        for v in adj[u]:
            d[idx[u], idx[v]] = 1
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    off = ~np.eye(n, dtype=bool)
    fin = np.isfinite(d) & off
    if not fin.any():
        return None
    return float(d[fin].sum() / fin.sum())


def random_graph(rng, n, p):
    adj = {v: set() for v in range(n)}
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def build_topology(positions, edges, channels=None, radios=4, n_channels=4, area=(100.0, 100.0)):
    """Hand-made SU-only topology; every node gets all channels unless told otherwise."""
    nodes = []
    for i, (x, y) in enumerate(positions):
        ch = frozenset(range(n_channels)) if channels is None else frozenset(channels[i])
        r = radios[i] if isinstance(radios, (list, tuple)) else radios
        nodes.append(Node(i, float(x), float(y), SU, 50.0, r, ch))
    es = frozenset((min(u, v), max(u, v)) for u, v in edges)
    return Topology(tuple(nodes), es, area, n_channels, 0)


def topology_from_adj(adj, radios=4, n_channels=4):
    n = len(adj)
    pos = [(10.0 * i, 0.0) for i in range(n)]
    edges = {(min(u, v), max(u, v)) for u in adj for v in adj[u]}
    return build_topology(pos, edges, radios=radios, n_channels=n_channels, area=(10.0 * n + 1, 1.0))


def timings_from_deltas(deltas, t_r=1.0):
    return {c: ChannelTiming(c, d + t_r, t_r) for c, d in enumerate(deltas)}
