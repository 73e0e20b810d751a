"""Batch experiments: parameter sweeps averaged over seeds."""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import CapacityParams, mrmc_factor, network_capacity
from .channels import CA, RANDOM, assign_network, channel_timings
from .dissemination import SimConfig, latency_ratio, run_dissemination, usable_graph
from .errors import ConfigError
from .queueing import ChannelModel, channel_link_probs, mean_connectivity, pairwise_connectivity, pu_idle_prob
from .shortcuts import (NONE, NSC, RS, WIDE, GeometryParams, ShortcutPlan, build_plan_nsc,
                        build_plan_rs, build_plan_wide, default_destination, empty_plan)
from .topology import generate_topology, measure, path_stats

LATENCY = "latency_vs_shortcuts"
APL = "apl_vs_shortcuts"
CAP_SENSING = "capacity_vs_sensing"
CAP_SHORTCUTS = "capacity_vs_shortcuts"
CAP_AVAIL = "capacity_vs_availability"

WITHOUT_SW = "WithoutSW"
RS_RANDOM = "RS+Random"
NSC_RANDOM = "NSC+Random"
NSC_CA = "NSC+CA"
WIDE_CA = "WIDE"

# scheme -> (shortcut method, channel assignment)
SCHEMES = {
    WITHOUT_SW: (NONE, RANDOM),
    RS_RANDOM: (RS, RANDOM),
    NSC_RANDOM: (NSC, RANDOM),
    NSC_CA: (NSC, CA),
    WIDE_CA: (WIDE, CA),
}

CAPACITY_SCHEMES = (NSC_CA, NSC_RANDOM, RS_RANDOM, WITHOUT_SW)

# scenario -> (swept quantity, default grid, default schemes, allowed schemes)
SCENARIOS = {
    LATENCY: ("shortcuts", tuple(range(0, 51, 5)), (NSC_CA, WIDE_CA), tuple(SCHEMES)),
    APL: ("shortcuts", tuple(range(0, 51, 5)), (NSC_CA, NSC_RANDOM, RS_RANDOM), tuple(SCHEMES)),
    CAP_SENSING: ("tau", tuple(round(0.002 * i, 3) for i in range(1, 11)), CAPACITY_SCHEMES, CAPACITY_SCHEMES),
    CAP_SHORTCUTS: ("shortcuts", tuple(range(0, 51, 5)), CAPACITY_SCHEMES, CAPACITY_SCHEMES),
    CAP_AVAIL: ("availability", (0.2, 0.4, 0.6, 0.8, 1.0), CAPACITY_SCHEMES, CAPACITY_SCHEMES),
}

# fixed shortcut count for the sweeps that do not vary it
DEFAULT_SHORTCUTS = {CAP_SENSING: 10, CAP_AVAIL: 30}


@dataclass(frozen=True)
class SimParams:
    n_channels: int = 12
    n_radios: int = 4
    n_pus: int = 12
    n_sus: int = 100
    pu_range: float = 100.0
    su_range: float = 50.0
    t0: float = 2e6
    mean_degree: float = 4.0
    clustering: float = 0.4
    lambda_p: float = 0.2
    lambda_s: float = 0.5
    alpha: float = 30.0
    p_d: float = 0.9
    p_f: float = 0.2
    p_h0: float = 0.5
    t_slot: float = 0.100
    packet_bytes: int = 512
    # experiment-section settings outside the table
    area: float = 1000.0
    channel_availability: float = 0.8
    tau: float = 0.010
    data_rate_w: float = 2e6
    f_policy: str = "min"


# config-file key prefix (lower case) -> SimParams field
PARAM_KEYS = {
    "number of channels": "n_channels",
    "number of radios": "n_radios",
    "number of pus": "n_pus",
    "number of sus": "n_sus",
    "pu transmission range": "pu_range",
    "su transmission range": "su_range",
    "capacity available of a su": "t0",
    "average degree of the network": "mean_degree",
    "average clustering coefficient": "clustering",
    "average arrival rates of pu": "lambda_p",
    "average arrival rates of su": "lambda_s",
    "bisectrix of an angle": "alpha",
    "detection probability": "p_d",
    "false alarm probability": "p_f",
    "pu-free probability": "p_h0",
    "time slot": "t_slot",
    "packet size": "packet_bytes",
    "area side": "area",
    "channel availability": "channel_availability",
    "sensing time": "tau",
    "channel data rate": "data_rate_w",
    "f policy": "f_policy",
}

_UNITS = {"ms": 1e-3, "s": 1.0, "mbps": 1e6, "kbps": 1e3, "bps": 1.0, "bytes": 1.0,
          "m": 1.0, "degrees": 1.0, "deg": 1.0}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    schemes: tuple = ()
    sweep: tuple | None = None  # None: the scenario's default grid
    seeds: int = 20
    seed_offset: int = 0
    shortcuts: int | None = None  # fixed count for tau / availability sweeps
    max_slots: int = 1000
    params: SimParams = field(default_factory=SimParams)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        _, grid, default_schemes, allowed = SCENARIOS[self.scenario]
        if not self.schemes:
            object.__setattr__(self, "schemes", default_schemes)
        if self.sweep is None:
            object.__setattr__(self, "sweep", grid)
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "sweep", tuple(self.sweep))
        bad = [s for s in self.schemes if s not in allowed]
        if bad:
            raise ConfigError(f"schemes {bad} not valid for {self.scenario}")
        if not self.sweep:
            raise ConfigError("sweep is empty")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        if self.shortcuts is None:
            object.__setattr__(self, "shortcuts", DEFAULT_SHORTCUTS.get(self.scenario, 0))

    def canonical(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


# --- one network evaluation ----------------------------------------------------


@dataclass(frozen=True)
class NetworkEval:
    k: float
    c_g: float
    p_avg: float
    l_harmonic: float  # harmonic mean hops over all ordered pairs (inf if none connected)
    l_mean: float  # arithmetic mean over connected pairs
    reach: float
    l_harmonic_base: float
    l_mean_base: float
    shortcuts: int
    messages: int
    latency: float | None = None  # slots, measured over the shortcut-free reach
    latency_base: float | None = None
    latency_ratio: float | None = None
    covered_fraction: float | None = None


@lru_cache(maxsize=256)
def _network(sp: SimParams, availability: float, seed: int):
    topo = generate_topology(
        sp.n_sus, sp.n_pus, area=(sp.area, sp.area), su_range=sp.su_range, pu_range=sp.pu_range,
        radios=sp.n_radios, n_channels=sp.n_channels, channel_availability=availability,
        seed=seed, target_degree=sp.mean_degree,
    )
    model = ChannelModel.sample(sp.n_channels, sp.lambda_p, sp.lambda_s, sp.data_rate_w,
                                np.random.default_rng([seed, 1]))
    pk = channel_link_probs(model)
    conn = pairwise_connectivity(pk, [topo.node(v).channels for v in topo.su_ids])
    m, n = len(topo.su_ids), sp.n_channels
    p_avg = mean_connectivity(np.broadcast_to(pk, (m, m, n)))
    return topo, model, conn, p_avg


def build_plan(method: str, topo, conn, budget: int, alpha: float, seed: int) -> ShortcutPlan:
    g = GeometryParams(alpha)
    if method == NONE or budget == 0:
        return empty_plan()
    if method == NSC:
        return build_plan_nsc(topo, g, conn, budget, seed)
    if method == RS:
        return build_plan_rs(topo, budget, seed)
    return build_plan_wide(topo, g, budget, seed)


@lru_cache(maxsize=4096)
def evaluate_network(sp: SimParams, scheme: str, budget: int, availability: float, seed: int,
                     with_latency: bool = False, max_slots: int = 1000) -> NetworkEval:
    topo, model, conn, p_avg = _network(sp, availability, seed)
    plan_method, assign_method = SCHEMES[scheme]
    plan = build_plan(plan_method, topo, conn, budget, sp.alpha, seed)
    timings = channel_timings(model, sp.packet_bytes * 8)
    assign = assign_network(topo, plan, timings, assign_method, seed)
    assign0 = assign_network(topo, empty_plan(), timings, assign_method, seed)
    ps = path_stats(usable_graph(topo, plan, assign))
    ps0 = path_stats(usable_graph(topo, empty_plan(), assign0))
    phys = measure(topo)
    out = dict(
        k=phys.mean_degree, c_g=phys.clustering, p_avg=p_avg,
        l_harmonic=ps.harmonic, l_mean=ps.mean if ps.mean is not None else math.nan,
        reach=ps.reach, l_harmonic_base=ps0.harmonic,
        l_mean_base=ps0.mean if ps0.mean is not None else math.nan,
        shortcuts=len(plan), messages=plan.total_messages(),
    )
    if with_latency:
        busy = [1.0 - pu_idle_prob(q) for q in model.channels]
        cfg = SimConfig(default_destination(topo), busy, sp.t_slot, max_slots, seed)
        res = run_dissemination(topo, plan, assign, cfg)
        base = run_dissemination(topo, empty_plan(), assign0, cfg)
        lat = res.latency_over(base.reachable)
        out.update(latency=lat, latency_base=base.latency_slots,
                   latency_ratio=latency_ratio(res, base), covered_fraction=res.covered_fraction)
    return NetworkEval(**out)


def capacity_of(sp: SimParams, ev: NetworkEval, tau: float, analytic: bool = False):
    f = mrmc_factor(sp.n_sus, sp.n_radios, sp.n_channels, sp.data_rate_w, policy=sp.f_policy)
    p = CapacityParams(t0=sp.t0, tau=tau, t_slot=sp.t_slot, p_f=sp.p_f, p_d=sp.p_d,
                       p_h0=sp.p_h0, factor_f=f, m=sp.n_sus)
    k, c = (sp.mean_degree, sp.clustering) if analytic else (ev.k, ev.c_g)
    return network_capacity(p, k, c, ev.l_harmonic, ev.p_avg)


# --- experiments -------------------------------------------------------------


def _cell_params(cfg: ExperimentConfig, x):
    kind = SCENARIOS[cfg.scenario][0]
    sp = cfg.params
    budget, avail, tau = cfg.shortcuts, sp.channel_availability, sp.tau
    if kind == "shortcuts":
        budget = int(x)
    elif kind == "availability":
        avail = float(x)
    else:
        tau = float(x)
    return budget, avail, tau


def run_cell(cfg: ExperimentConfig, x, scheme: str, seed: int) -> dict:
    """Metrics for one (sweep value, scheme, seed) work item."""
    sp = cfg.params
    budget, avail, tau = _cell_params(cfg, x)
    latency = cfg.scenario == LATENCY
    ev = evaluate_network(sp, scheme, budget, avail, seed, latency, cfg.max_slots)
    row = {
        "k": ev.k, "cg": ev.c_g, "lg": ev.l_harmonic, "lg_connected": ev.l_mean,
        "reach": ev.reach, "pavg": ev.p_avg, "realized_shortcuts": ev.shortcuts,
        "messages": ev.messages,
        "apl_ratio": ev.l_harmonic / ev.l_harmonic_base,
    }
    if latency:
        row.update(latency=ev.latency, latency_ratio=ev.latency_ratio,
                   covered_fraction=ev.covered_fraction)
    if cfg.scenario in (CAP_SENSING, CAP_SHORTCUTS, CAP_AVAIL):
        sim = capacity_of(sp, ev, tau)
        ana = capacity_of(sp, ev, tau, analytic=True)
        row.update(t_prime=sim.t_prime, capa=sim.capa, capa_e=sim.capa_e,
                   capa_analytic=ana.capa, capa_e_analytic=ana.capa_e)
    return row


# columns aggregated as mean and sample standard deviation
_METRICS = {
    LATENCY: ("latency", "latency_ratio"),
    APL: ("apl_ratio", "lg", "lg_connected"),
    CAP_SENSING: ("capa_e", "capa"),
    CAP_SHORTCUTS: ("capa_e", "capa"),
    CAP_AVAIL: ("capa_e", "capa"),
}
_MEASURED = ("k", "cg", "lg", "lg_connected", "reach", "pavg", "realized_shortcuts", "messages")
_CAP_EXTRA = ("t_prime", "capa_analytic", "capa_e_analytic")


@dataclass
class ResultTable:
    config: ExperimentConfig
    columns: list
    rows: list  # list of dicts, deterministic order
    runs: list = field(default_factory=list)  # per-seed rows

    def column(self, name, scheme=None):
        return [r[name] for r in self.rows if scheme is None or r["scheme"] == scheme]


def _stats(vals):
    vals = [float(v) for v in vals if v is not None and not (isinstance(v, float) and math.isnan(v))]
    if not vals:
        return math.nan, math.nan, 0
    arr = np.array(vals)
    sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return float(arr.mean()), sd, len(arr)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ResultTable:
    kind = SCENARIOS[cfg.scenario][0]
    seeds = [cfg.seed_offset + i for i in range(cfg.seeds)]
    keys = [(x, s, seed) for x in cfg.sweep for s in cfg.schemes for seed in seeds]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(run_cell, [cfg] * len(keys), *zip(*keys)))
    else:
        results = [run_cell(cfg, *k) for k in keys]
    cells = dict(zip(keys, results))

    metrics = _METRICS[cfg.scenario]
    cap = cfg.scenario in (CAP_SENSING, CAP_SHORTCUTS, CAP_AVAIL)
    rows, runs = [], []
    for x in cfg.sweep:
        for scheme in cfg.schemes:
            per = [cells[(x, scheme, seed)] for seed in seeds]
            plan_m, assign_m = SCHEMES[scheme]
            row = {kind: x, "scheme": scheme, "plan_method": plan_m, "assignment": assign_m,
                   "seeds": len(seeds)}
            for m in metrics:
                mean, sd, n = _stats(r.get(m) for r in per)
                row[f"{m}_mean"], row[f"{m}_std"] = mean, sd
                if m.startswith("latency"):
                    row[f"{m}_n"] = n
            for m in _MEASURED + (_CAP_EXTRA if cap else ()):
                row[m] = _stats(r[m] for r in per)[0]
            rows.append(row)
            for seed, r in zip(seeds, per):
                runs.append({kind: x, "scheme": scheme, "seed": seed, **r})
    columns = list(rows[0].keys())
    return ResultTable(cfg, columns, rows, runs)


# --- output ------------------------------------------------------------------

METRIC_NOTES = {
    "lg": "harmonic mean hop count over all ordered SU pairs of the usable graph "
          "(shortcuts count as one hop; unreachable pairs add zero inverse distance); used as L(G)",
    "lg_connected": "arithmetic mean hop count over connected ordered pairs only",
    "reach": "fraction of ordered SU pairs that are connected",
    "apl_ratio": "lg with shortcuts over lg of the same assignment without shortcuts",
    "latency": "slots until every node reached by the shortcut-free run is informed",
    "k, cg": "measured on the physical SU graph (simulation mode)",
    "capa_analytic": "same pipeline with the configured mean_degree and clustering in place of measured values",
    "pavg": "mean per-channel link probability over ordered pairs and channels",
    "f_policy": "config.params.f_policy; min uses F = min(R, N), sqrt-ratio uses sqrt(R / N)",
}


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


_PLOT = '''"""Plot {scenario}.csv (written by the experiment harness)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("{scenario}.csv")))
for scheme in dict.fromkeys(r["scheme"] for r in rows):
    pts = [(float(r["{x}"]), float(r["{y}_mean"])) for r in rows if r["scheme"] == scheme]
    plt.plot(*zip(*pts), marker="o", label=scheme)
plt.xlabel("{x}")
plt.ylabel("{y}")
plt.legend()
plt.savefig("{scenario}.png", dpi=150)
'''

_PLOT_Y = {LATENCY: "latency_ratio", APL: "apl_ratio", CAP_SENSING: "capa_e",
           CAP_SHORTCUTS: "capa_e", CAP_AVAIL: "capa_e"}


def emit_outputs(results: list[ResultTable], out_dir) -> list[Path]:
    if not results:
        raise ConfigError("no results to write")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    manifest = {"version": __version__, "metrics": METRIC_NOTES, "experiments": []}
    for res in results:
        cfg = res.config
        name = cfg.scenario
        p = out / f"{name}.csv"
        p.write_text(to_csv(res.columns, res.rows), encoding="utf-8")
        written.append(p)
        if res.runs:
            run_cols = list(res.runs[0].keys())
            p = out / f"{name}_runs.csv"
            p.write_text(to_csv(run_cols, res.runs), encoding="utf-8")
            written.append(p)
        p = out / f"{name}_plot.py"
        p.write_text(_PLOT.format(scenario=name, x=SCENARIOS[name][0], y=_PLOT_Y[name]), encoding="utf-8")
        written.append(p)
        manifest["experiments"].append({
            "scenario": name,
            "config_hash": cfg.config_hash(),
            "seeds": [cfg.seed_offset + i for i in range(cfg.seeds)],
            "config": json.loads(cfg.canonical()),
        })
    p = out / "manifest.json"
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(p)
    return written


# --- config files --------------------------------------------------------------


def _parse_value(raw: str, kind):
    s = raw.strip()
    if kind is str:
        return s
    m = re.fullmatch(r"([-+0-9.eE]+)\s*([A-Za-z]*)", s)
    if not m:
        raise ConfigError(f"cannot parse value {raw!r}")
    num, unit = float(m.group(1)), m.group(2).lower()
    if unit:
        if unit not in _UNITS:
            raise ConfigError(f"unknown unit {unit!r} in {raw!r}")
        num *= _UNITS[unit]
    return int(round(num)) if kind is int else num


def _param_field(key: str) -> str:
    k = key.strip().lower()
    for prefix, name in PARAM_KEYS.items():
        if k.startswith(prefix):
            return name
    raise ConfigError(f"unknown simulation parameter {key!r}")


def _split(raw: str) -> list[str]:
    return [p.strip() for p in raw.split(",") if p.strip()]


def parse_config(text: str) -> list[ExperimentConfig]:
    """Parse the key = value config format; one config per listed scenario."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(str(e)) from e
    types = {f.name: f.type for f in fields(SimParams)}
    t2_kw = {}
    exp = {}
    for section in cp.sections():
        if section.strip().lower() == "experiment":
            exp = dict(cp[section])
            continue
        for key, raw in cp[section].items():
            name = _param_field(key)
            kind = {"int": int, "float": float, "str": str}[types[name]]
            t2_kw[name] = _parse_value(raw, kind)
    sp = SimParams(**t2_kw)

    scen_raw = exp.get("scenario", "all")
    scenarios = list(SCENARIOS) if scen_raw.strip() == "all" else _split(scen_raw)
    configs = []
    for sc in scenarios:
        if sc not in SCENARIOS:
            raise ConfigError(f"unknown scenario {sc!r}")
        kind = SCENARIOS[sc][0]
        sweep = SCENARIOS[sc][1]
        if "sweep" in exp and len(scenarios) == 1:
            vals = [_parse_value(v, float) for v in _split(exp["sweep"])]
            sweep = tuple(int(v) if kind == "shortcuts" else v for v in vals)
        schemes = tuple(_split(exp["schemes"])) if "schemes" in exp else ()
        if schemes and len(scenarios) > 1:
            schemes = tuple(s for s in schemes if s in SCENARIOS[sc][3])
        configs.append(ExperimentConfig(
            scenario=sc,
            schemes=schemes,
            sweep=sweep,
            seeds=int(exp.get("seeds", 20)),
            seed_offset=int(exp.get("seed_offset", 0)),
            shortcuts=int(exp["shortcuts"]) if "shortcuts" in exp else None,
            max_slots=int(exp.get("max_slots", 1000)),
            params=sp,
        ))
    return configs


def override(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(cfg, **kw) if kw else cfg
