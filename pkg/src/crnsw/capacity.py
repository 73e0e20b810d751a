"""Network capacity of the secondary network under the small-world model.

Capa   = M * T' * F * sensing_factor
Capa_e = Capa / L(G)
T'     = T_0 / k_0,  k_0 = p_avg * [(4 - 2/k) + (gamma + beta) * C(G) * (k - 1) * (1 - 1/k)]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParameterError

MIN_RADIO_CHANNEL = "min"
SQRT_RATIO = "sqrt-ratio"


@dataclass(frozen=True)
class ConsumptionParams:
    gamma: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if not (0 <= self.gamma <= 1 and 0 <= self.beta <= 1):
            raise ParameterError("consumption ratios must lie in [0, 1]")


@dataclass(frozen=True)
class CapacityParams:
    t0: float = 2e6
    tau: float = 0.010
    t_slot: float = 0.100
    p_f: float = 0.2
    p_d: float = 0.9
    p_h0: float = 0.5
    p_h1: float | None = None  # defaults to 1 - p_h0
    factor_f: float = 4.0
    m: int = 100

    def __post_init__(self):
        if self.p_h1 is None:
            object.__setattr__(self, "p_h1", 1.0 - self.p_h0)
        for name in ("p_f", "p_d", "p_h0", "p_h1"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ParameterError(f"{name}={v} outside [0, 1]")
        if abs(self.p_h0 + self.p_h1 - 1) > 1e-12:
            raise ParameterError("P(H0) + P(H1) must equal 1")
        if self.t_slot <= 0 or not 0 <= self.tau <= self.t_slot:
            raise ParameterError("need 0 <= tau <= T_s")
        if self.t0 <= 0 or self.factor_f <= 0 or self.m < 1:
            raise ParameterError("T_0, F and M must be positive")


@dataclass(frozen=True)
class CapacityReport:
    consumed_links_f: float
    consumed_nodes_k0: float
    t_prime: float
    capa: float
    capa_e: float
    k: float
    c_g: float
    l_g: float
    p_avg: float
    ratio: float  # M*T0 / (bracket * p_avg * L), diagnostic
    params: CapacityParams = field(repr=False, default=None)

    CSV_FIELDS = ("m", "k", "cg", "lg", "pavg", "f_factor", "tau", "ts", "pf", "pd", "ph0",
                  "t_prime", "capa", "capa_e")

    def csv_row(self) -> dict:
        p = self.params
        return {
            "m": p.m, "k": self.k, "cg": self.c_g, "lg": self.l_g, "pavg": self.p_avg,
            "f_factor": p.factor_f, "tau": p.tau, "ts": p.t_slot, "pf": p.p_f, "pd": p.p_d,
            "ph0": p.p_h0, "t_prime": self.t_prime, "capa": self.capa, "capa_e": self.capa_e,
        }


def consumed_links(k_a, k_b, c_a, c_b, cp: ConsumptionParams = ConsumptionParams()) -> float:
    """Links consumed by one A->B transmission: full plus weighted partial consumption."""
    if k_a < 1 or k_b < 1:
        raise ParameterError("degrees must be >= 1")
    if not (0 <= c_a <= 1 and 0 <= c_b <= 1):
        raise ParameterError("clustering must lie in [0, 1]")
    f1 = 2 * k_a + 2 * k_b - 2
    f_a = c_b * k_b * (k_b - 1) * (1 - 1 / k_b)
    f_b = c_a * k_a * (k_a - 1) * (1 - 1 / k_a)
    return f1 + cp.beta * f_a + cp.gamma * f_b


def _bracket(k, c_g, cp: ConsumptionParams) -> float:
    return (4 - 2 / k) + (cp.gamma + cp.beta) * c_g * (k - 1) * (1 - 1 / k)


def consumed_nodes_avg(k, c_g, p_avg, cp: ConsumptionParams = ConsumptionParams()) -> float:
    if k < 1:
        raise ParameterError("mean degree must be >= 1")
    if not 0 <= p_avg <= 1:
        raise ParameterError("mean connectivity must lie in [0, 1]")
    return p_avg * _bracket(k, c_g, cp)


def effective_per_node_capacity(t0, k, c_g, p_avg, cp: ConsumptionParams = ConsumptionParams()) -> float:
    k0 = consumed_nodes_avg(k, c_g, p_avg, cp)
    if k0 <= 0:
        raise ParameterError("no consumed nodes (p_avg = 0): per-node capacity undefined")
    return t0 / k0


def sensing_factor(p: CapacityParams) -> float:
    if p.tau > p.t_slot:
        raise ParameterError("sensing time exceeds slot length")
    return (1 - p.tau / p.t_slot) * ((1 - p.p_f) * p.p_h0 + (1 - p.p_d) * p.p_h1)


def network_capacity(p: CapacityParams, k, c_g, l_g, p_avg, cp: ConsumptionParams = ConsumptionParams()) -> CapacityReport:
    if not l_g >= 1:
        raise ParameterError(f"L(G)={l_g} must be >= 1")
    k0 = consumed_nodes_avg(k, c_g, p_avg, cp)
    t_prime = effective_per_node_capacity(p.t0, k, c_g, p_avg, cp)
    capa = p.m * t_prime * p.factor_f * sensing_factor(p)
    return CapacityReport(
        consumed_links_f=k0 * k,
        consumed_nodes_k0=k0,
        t_prime=t_prime,
        capa=capa,
        capa_e=capa / l_g,
        k=k, c_g=c_g, l_g=l_g, p_avg=p_avg,
        ratio=p.m * p.t0 / (_bracket(k, c_g, cp) * p_avg * l_g),
        params=p,
    )


def mrmc_factor(m: int, radios_r: int, channels_n: int, w: float | None = None,
                policy: str = MIN_RADIO_CHANNEL, n_base: int = 1) -> float:
    """Enhancement factor for multiple radios and channels.

    "min": parallel transmissions are bounded by both radios and channels.
    "sqrt-ratio": sqrt(R * n_base / N), the ratio of the multi-channel
    capacity bound W*sqrt(M*R/N) to the same bound at R = 1, N = n_base.
    """
    if radios_r < 1 or channels_n < 1:
        raise ParameterError("need at least one radio and one channel")
    if policy == MIN_RADIO_CHANNEL:
        return float(min(radios_r, channels_n))
    if policy == SQRT_RATIO:
        return math.sqrt(radios_r * n_base / channels_n)
    raise ParameterError(f"unknown F policy {policy!r}")
