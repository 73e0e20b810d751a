"""Spectrum-opportunity model for licensed channels.

Each channel carries two customer classes. PU traffic behaves as an
M/M/1/1 system (one licensed user per channel) and has preemptive priority;
SU traffic is an M/M/N/K queue that only advances while the PU is silent.
Interrupted SU transmissions resume where they stopped.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class QueueParams:
    lambda_p: float
    mu_p: float
    lambda_s: float
    mu_s: float
    n_servers: int = 1
    k_capacity: int = 1

    def __post_init__(self):
        if self.mu_p <= 0 or self.mu_s <= 0:
            raise ParameterError("service rates must be positive")
        if self.lambda_p < 0 or self.lambda_s < 0:
            raise ParameterError("arrival rates must be non-negative")
        if self.n_servers < 1 or self.k_capacity < self.n_servers:
            raise ParameterError("need k_capacity >= n_servers >= 1")
        if self.rho_p >= 1:
            raise ParameterError(f"PU load rho_p={self.rho_p} must be < 1")
        if self.rho_s >= 1:
            raise ParameterError(f"SU load rho_s={self.rho_s} must be < 1")

    @property
    def rho_p(self) -> float:
        return self.lambda_p / self.mu_p

    @property
    def rho_s(self) -> float:
        return self.lambda_s / (self.n_servers * self.mu_s)


@dataclass(frozen=True)
class ChannelModel:
    channels: tuple[QueueParams, ...]
    data_rate_w: float

    def __post_init__(self):
        if len(self.channels) < 1:
            raise ParameterError("channel model needs at least one channel")
        if self.data_rate_w <= 0:
            raise ParameterError("data rate must be positive")
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @classmethod
    def sample(cls, n_channels, lambda_p, lambda_s, data_rate_w, rng, k_capacity=None):
        """Draw per-channel service rates uniformly, restricted to stable loads.

        Service rates are drawn from (0, 1] conditioned on rho < 1, i.e.
        mu_p ~ U(lambda_p, 1) and mu_s ~ U(lambda_s / N, 1).
        """
        k_capacity = 2 * n_channels if k_capacity is None else k_capacity
        lo_p = lambda_p * 1.001
        lo_s = lambda_s / n_channels * 1.001
        if lo_p >= 1 or lo_s >= 1:
            raise ParameterError("arrival rates too high for service rates in (0, 1]")
        chans = []
        for _ in range(n_channels):
            mu_p = float(rng.uniform(lo_p, 1.0))
            mu_s = float(rng.uniform(lo_s, 1.0))
            chans.append(QueueParams(lambda_p, mu_p, lambda_s, mu_s, n_channels, k_capacity))
        return cls(tuple(chans), data_rate_w)


def pu_idle_prob(q: QueueParams) -> float:
    return 1.0 / (1.0 + q.rho_p)


def _log_term(q: QueueParams, h: int) -> float:
    # log of the unnormalised stationary weight of state h
    n = q.n_servers
    if h == 0:
        return 0.0
    if q.lambda_s == 0:
        return -math.inf
    log_rho = math.log(q.rho_s)
    if h < n:
        return h * (math.log(n) + log_rho) - math.lgamma(h + 1)
    return n * math.log(n) + h * log_rho - math.lgamma(n + 1)


def su_all_idle_prob(q: QueueParams) -> float:
    """Probability that no SU occupies the channel group (closed-form normaliser)."""
    n, k = q.n_servers, q.k_capacity
    if q.lambda_s == 0:
        return 1.0
    rho = q.rho_s
    head = sum(math.exp(_log_term(q, i)) for i in range(n))
    # (N rho)^N / N! * (1 - rho^(K-N+1)) / (1 - rho)
    tail = math.exp(n * math.log(n * rho) - math.lgamma(n + 1))
    tail *= (1.0 - rho ** (k - n + 1)) / (1.0 - rho)
    return 1.0 / (head + tail)


def su_occupancy_dist(q: QueueParams, h: int) -> float:
    """Stationary probability of h SUs in the system, h in [0, K]."""
    if not 0 <= h <= q.k_capacity:
        raise ParameterError(f"h={h} outside [0, {q.k_capacity}]")
    if h == 0:
        return su_all_idle_prob(q)
    return math.exp(_log_term(q, h)) * su_all_idle_prob(q)


def su_distribution(q: QueueParams) -> np.ndarray:
    return np.array([su_occupancy_dist(q, h) for h in range(q.k_capacity + 1)])


def expected_busy_channels(q: QueueParams) -> float:
    dist = su_distribution(q)
    busy = np.minimum(np.arange(q.k_capacity + 1), q.n_servers)
    return float(dist @ busy)


def representative_h(q: QueueParams, n_total: int) -> int:
    """Number of SU-occupied channels plugged into the link formula.

    The expected number of busy servers, rounded, clamped to [1, n_total].
    """
    h = int(round(expected_busy_channels(q)))
    return min(max(h, 1), n_total, q.k_capacity)


def link_channel_avail_prob(q: QueueParams, h: int, n_total: int, *, self_link: bool = False) -> float:
    """Per-channel link probability p_ij^k = p_p0 * (h/N) * p_sh."""
    if self_link:
        return 1.0
    if n_total < 1 or h < 1 or h > n_total or h > q.k_capacity:
        raise ParameterError(f"need 1 <= h <= min(N, K); got h={h}, N={n_total}")
    return pu_idle_prob(q) * (h / n_total) * su_occupancy_dist(q, h)


def channel_link_probs(model: ChannelModel) -> np.ndarray:
    """p_ij^k for every channel of the model, with h chosen per channel."""
    n = model.n_channels
    return np.array([link_channel_avail_prob(q, representative_h(q, n), n) for q in model.channels])


def link_connectivity(per_channel: Sequence[float]) -> float:
    p = np.asarray(per_channel, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise ParameterError("per-channel probabilities must lie in [0, 1]")
    return float(1.0 - np.prod(1.0 - p))


def mean_connectivity(matrix) -> float:
    """Average of p_ij^k over ordered pairs i != j and channels.

    `matrix` has shape (M, M, N); diagonal entries are ignored.
    """
    p = np.asarray(matrix, dtype=float)
    if p.ndim != 3 or p.shape[0] != p.shape[1]:
        raise ParameterError("expected an (M, M, N) array")
    m, _, n = p.shape
    if m < 2:
        raise ParameterError("mean connectivity needs at least two nodes")
    total = p.sum() - np.trace(p, axis1=0, axis2=1).sum()
    return float(total / (n * m * (m - 1)))


def pairwise_connectivity(per_channel: np.ndarray, channel_sets: Sequence[frozenset]) -> np.ndarray:
    """Connectivity ratio between every pair of nodes.

    Channel k contributes to pair (i, j) only when both nodes list it as
    available. Diagonal is 1.
    """
    m = len(channel_sets)
    n = len(per_channel)
    mask = np.zeros((m, n), dtype=bool)
    for i, chans in enumerate(channel_sets):
        mask[i, list(chans)] = True
    log_q = np.log1p(-np.asarray(per_channel, dtype=float))
    # log prod over common channels of (1 - p^k)
    common = mask.astype(float) @ (mask * log_q).T
    conn = 1.0 - np.exp(common)
    np.fill_diagonal(conn, 1.0)
    return conn


@dataclass
class DesResult:
    pu_idle_fraction: float
    su_occupancy: np.ndarray  # time fractions over PU-idle time, states 0..K
    events: int
    elapsed: float


def des_oracle(q: QueueParams, horizon: int, seed: int) -> DesResult:
    """Event-driven simulation of the preemptive-resume channel model.

    While the PU holds the channel every SU clock is frozen: in-service
    SUs keep their residual work and resume afterwards, and no new SU
    requests are issued. SU occupancy is therefore measured over PU-idle
    time. PU requests arriving while the PU is active are lost (M/M/1/1).
    """
    if horizon < 1:
        raise ParameterError("horizon must be >= 1")
    rng = random.Random(seed)
    exp = rng.expovariate
    inf = math.inf
    n_srv, cap = q.n_servers, q.k_capacity

    t = 0.0
    idle_time = 0.0
    occ_time = [0.0] * (cap + 1)
    pu_busy = False
    next_pu = exp(q.lambda_p) if q.lambda_p > 0 else inf
    su_arr = exp(q.lambda_s) if q.lambda_s > 0 else inf
    service: list[float] = []  # residual work of in-service SUs
    n = 0

    for _ in range(horizon):
        if pu_busy:
            t = next_pu
            pu_busy = False
            next_pu = t + exp(q.lambda_p) if q.lambda_p > 0 else inf
            continue
        dt_pu = next_pu - t
        if service:
            idx = min(range(len(service)), key=service.__getitem__)
            dt_srv = service[idx]
        else:
            idx, dt_srv = -1, inf
        dt_su = min(su_arr, dt_srv)
        if dt_pu == inf and dt_su == inf:
            break
        dt = min(dt_pu, dt_su)
        t += dt
        idle_time += dt
        occ_time[n] += dt
        if dt_pu <= dt_su:
            su_arr -= dt
            service = [s - dt for s in service]
            pu_busy = True
            next_pu = t + exp(q.mu_p)
        elif su_arr <= dt_srv:
            service = [s - dt for s in service]
            if n < cap:
                n += 1
                if len(service) < n_srv:
                    service.append(exp(q.mu_s))
            su_arr = exp(q.lambda_s)
        else:
            su_arr -= dt
            service.pop(idx)
            service = [s - dt for s in service]
            n -= 1
            if n > len(service):
                service.append(exp(q.mu_s))

    total = t if t > 0 else 1.0
    occ = np.array(occ_time)
    occ = occ / idle_time if idle_time > 0 else occ
    return DesResult(
        pu_idle_fraction=idle_time / total if t > 0 else 1.0,
        su_occupancy=occ,
        events=horizon,
        elapsed=t,
    )
