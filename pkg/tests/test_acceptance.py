"""Acceptance criteria 1 to 8.

Each test prints one ``criterion N: PASS|FAIL`` line (repeated in the
terminal summary by conftest.py) and asserts on the same verdict.
Runtime limits are part of the verdict.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from crnsw.capacity import CapacityParams, consumed_links, consumed_nodes_avg, network_capacity, sensing_factor
from crnsw.harness import (
    APL,
    CAP_AVAIL,
    CAP_SENSING,
    CAP_SHORTCUTS,
    CAPACITY_SCHEMES,
    LATENCY,
    NSC_CA,
    SCENARIOS,
    WIDE_CA,
    ExperimentConfig,
    run_experiment,
)
from crnsw.queueing import QueueParams, des_oracle, pu_idle_prob, su_distribution
from crnsw.topology import average_path_length, clustering_coefficient
from oracles import birth_death_stationary, clustering_bruteforce, floyd_warshall_apl, random_graph

ROOT = Path(__file__).resolve().parents[1]
SEEDS = 20
RESULTS: dict[int, str] = {}


def verdict(n, ok, detail, elapsed, limit=None):
    in_time = limit is None or elapsed < limit
    budget = f" / limit {limit:g}s" if limit is not None else ""
    line = f"criterion {n}: {'PASS' if ok and in_time else 'FAIL'}  {detail}  [{elapsed:.1f}s{budget}]"
    RESULTS[n] = line
    print(line)
    assert ok, line
    assert in_time, line


def series(res, metric, scheme):
    kind = SCENARIOS[res.config.scenario][0]
    return {r[kind]: r[metric] for r in res.rows if r["scheme"] == scheme}


def test_criterion_1_closed_forms():
    t = time.perf_counter()
    rep = network_capacity(CapacityParams(m=100), 4, 0.4, 4.0, 0.5)
    checks = {
        "pu_idle": (pu_idle_prob(QueueParams(0.2, 0.4, 0.5, 1.0)), 2 / 3),
        "consumed_links": (consumed_links(4, 4, 0.4, 0.4), 17.6),
        "consumed_nodes": (consumed_nodes_avg(4, 0.4, 1.0), 4.4),
        "sensing_factor": (sensing_factor(CapacityParams()), 0.405),
        "capa_mbps": (rep.capa / 1e6, 1620 / 11),
        "capa_e_mbps": (rep.capa_e / 1e6, 405 / 11),
    }
    off = {k: v for k, (v, ref) in checks.items() if abs(v - ref) > 1e-9}
    detail = f"{len(checks)} values within 1e-9" if not off else f"off: {off}"
    verdict(1, not off, detail, time.perf_counter() - t, 1)


def test_criterion_2_queue_oracle():
    t = time.perf_counter()
    worst_pu = 0.0
    for rho in (0.2, 0.5, 0.8):
        q = QueueParams(0.2 * rho, 0.2, 0.5, 1.0)
        r = des_oracle(q, 10**6, seed=11)
        worst_pu = max(worst_pu, abs(r.pu_idle_fraction - pu_idle_prob(q)))
    worst_su = 0.0
    for n, k in ((1, 1), (2, 4), (3, 6)):
        q = QueueParams(0.2, 0.4, 0.5 * n, 1.0, n, k)
        r = des_oracle(q, 10**6, seed=12)
        ref = birth_death_stationary(q.lambda_s, q.mu_s, n, k)
        assert np.allclose(su_distribution(q), ref, atol=1e-10)
        worst_su = max(worst_su, float(np.max(np.abs(r.su_occupancy - ref))))
    ok = worst_pu <= 0.02 and worst_su <= 0.02
    verdict(2, ok, f"max |PU idle err| {worst_pu:.4f}, max |SU state err| {worst_su:.4f} (tol 0.02)",
            time.perf_counter() - t, 30)


def test_criterion_3_graph_oracles():
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(1, 51))
        adj = random_graph(rng, n, float(rng.uniform(0, 0.5)))
        got_c, got_per = clustering_coefficient(adj)
        ref_c, ref_per = clustering_bruteforce(adj)
        if got_c != ref_c or got_per != ref_per or average_path_length(adj) != floyd_warshall_apl(adj):
            mismatches += 1
    verdict(3, mismatches == 0, f"{mismatches} mismatches on 200 graphs (exact equality)",
            time.perf_counter() - t, 10)


def test_criterion_4_path_length_trend():
    t = time.perf_counter()
    cfg = ExperimentConfig(APL, sweep=(0, 10, 20, 30, 40, 50), seeds=SEEDS)
    res = run_experiment(cfg)
    problems, summary = [], []
    for scheme in cfg.schemes:
        s = series(res, "apl_ratio_mean", scheme)
        xs = sorted(s)
        if any(s[b] > s[a] for a, b in zip(xs, xs[1:])):
            problems.append(f"{scheme} not monotone")
        early, late = s[0] - s[30], s[30] - s[50]
        if not late < 0.3 * early:
            problems.append(f"{scheme} late drop {late:.3f} >= 0.3 x {early:.3f}")
        summary.append(f"{scheme} {s[30]:.3f}@30 {s[50]:.3f}@50")
    verdict(4, not problems, "; ".join(problems or summary), time.perf_counter() - t, 120)


def test_criterion_5_latency_vs_wide():
    t = time.perf_counter()
    cfg = ExperimentConfig(LATENCY, schemes=(NSC_CA, WIDE_CA), seeds=SEEDS)
    res = run_experiment(cfg)
    nsc, wide = series(res, "latency_mean", NSC_CA), series(res, "latency_mean", WIDE_CA)
    worse = [x for x in cfg.sweep if x >= 10 and not nsc[x] < wide[x]]
    gain30 = 1 - nsc[30] / wide[30]
    ok = not worse and gain30 >= 0.10
    detail = (f"improvement at 30 = {gain30:+.1%} (need >= 10%); "
              f"NSC not below WIDE at {worse or 'no'} shortcut counts; "
              f"mean slots NSC/WIDE @10 {nsc[10]:.2f}/{wide[10]:.2f} @50 {nsc[50]:.2f}/{wide[50]:.2f}")
    verdict(5, ok, detail, time.perf_counter() - t, 120)


def test_criterion_6_capacity_ordering():
    t = time.perf_counter()
    runs = {
        CAP_SENSING: ExperimentConfig(CAP_SENSING, sweep=SCENARIOS[CAP_SENSING][1] + (0.1,), seeds=SEEDS),
        CAP_SHORTCUTS: ExperimentConfig(CAP_SHORTCUTS, seeds=SEEDS),
        CAP_AVAIL: ExperimentConfig(CAP_AVAIL, seeds=SEEDS),
    }
    problems = []
    res = {}
    for name, cfg in runs.items():
        res[name] = run_experiment(cfg)
        cap = {s: series(res[name], "capa_e_mean", s) for s in CAPACITY_SCHEMES}
        for hi, lo in zip(CAPACITY_SCHEMES, CAPACITY_SCHEMES[1:]):
            bad = [x for x in cfg.sweep if cap[hi][x] < cap[lo][x]]
            if bad:
                problems.append(f"{name}: {hi} < {lo} at {len(bad)}/{len(cfg.sweep)} points")
    sens = series(res[CAP_SENSING], "capa_e_mean", NSC_CA)
    taus = sorted(sens)
    if any(sens[b] >= sens[a] for a, b in zip(taus, taus[1:])):
        problems.append("capacity not strictly decreasing in tau")
    if sens[0.1] != 0.0:
        problems.append(f"capacity at tau = T_s is {sens[0.1]}")
    avail = series(res[CAP_AVAIL], "capa_e_mean", NSC_CA)
    xs = sorted(avail)
    if any(avail[b] < avail[a] for a, b in zip(xs, xs[1:])):
        problems.append("NSC+CA capacity decreases with availability")
    detail = "; ".join(problems) or "all capacity orderings and trends hold"
    verdict(6, not problems, detail, time.perf_counter() - t, 300)


def test_criterion_7_determinism(tmp_path):
    t = time.perf_counter()
    cfg = ROOT / "configs" / "default.cfg"
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        cmd = [sys.executable, "-m", "crnsw.cli", "--config", str(cfg), "--out", str(out)]
        assert subprocess.run(cmd, capture_output=True, text=True).returncode == 0
        outs.append(out)
    csvs = sorted(p.name for p in outs[0].glob("*.csv"))
    differ = [n for n in csvs if (outs[0] / n).read_bytes() != (outs[1] / n).read_bytes()]
    ok = len(csvs) == 2 * len(SCENARIOS) and not differ
    verdict(7, ok, f"{len(csvs)} CSVs from two full runs, {len(differ)} differ", time.perf_counter() - t)


PROPERTY_TESTS = [
    "tests/test_queueing.py::test_distribution_normalised",
    "tests/test_queueing.py::test_probabilities_bounded",
    "tests/test_queueing.py::test_pu_idle_strictly_decreasing",
    "tests/test_queueing.py::test_connectivity_monotone",
    "tests/test_topology.py::test_edge_addition_connected_never_lengthens",
    "tests/test_topology.py::test_edge_addition_never_raises_harmonic",
    "tests/test_topology.py::test_clustering_matches_oracle",
    "tests/test_shortcuts.py::test_plan_invariants",
    "tests/test_shortcuts.py::test_region_containment",
    "tests/test_shortcuts.py::test_nsc_candidates_subset_of_wide",
    "tests/test_channels.py::test_ca_invariants",
    "tests/test_channels.py::test_random_invariants",
    "tests/test_channels.py::test_reassign_is_local",
    "tests/test_channels.py::test_network_assignment",
    "tests/test_capacity.py::test_effective_capacity_times_length",
    "tests/test_capacity.py::test_node_consumption_matches_link_consumption",
    "tests/test_capacity.py::test_strictly_decreasing_in_tau",
    "tests/test_dissemination.py::test_connected_graph_fully_covered",
]


def test_criterion_8_property_suites():
    t = time.perf_counter()
    cmd = [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_TESTS]
    proc = subprocess.run(cmd, cwd=ROOT, capture_output=True, text=True)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    verdict(8, proc.returncode == 0, f"{len(PROPERTY_TESTS)} property suites: {tail}", time.perf_counter() - t)
