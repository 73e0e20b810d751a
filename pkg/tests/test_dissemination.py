import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnsw.channels import CA, assign_network
from crnsw.dissemination import SimConfig, SimResult, latency_ratio, run_dissemination, usable_graph
from crnsw.errors import ParameterError
from crnsw.harness import NSC_CA, NSC_RANDOM, RS_RANDOM, SimParams, evaluate_network
from crnsw.shortcuts import NSC, ShortcutPlan, empty_plan
from crnsw.topology import bfs_distances, components
from oracles import build_topology, random_graph, timings_from_deltas, topology_from_adj


def flat_timings(n):
    return timings_from_deltas([1.0] * n)


def run(t, plan=None, busy=0.0, seed=0, method=CA, source=0, max_slots=1000):
    plan = plan or empty_plan()
    a = assign_network(t, plan, flat_timings(t.n_channels), method, seed)
    cfg = SimConfig(source, [busy] * t.n_channels, max_slots=max_slots, seed=seed)
    return run_dissemination(t, plan, a, cfg)


def test_single_node():
    t = build_topology([(0, 0)], [])
    r = run(t)
    assert r.latency_slots == 0 and r.covered_fraction == 1.0


def test_two_nodes_one_hop():
    t = build_topology([(0, 0), (10, 0)], [(0, 1)], n_channels=1, radios=1)
    assert run(t).latency_slots == 1


def test_shortcut_halves_path():
    t = build_topology([(0, 0), (10, 0), (20, 0)], [(0, 1), (1, 2)], radios=2, n_channels=2)
    plan = ShortcutPlan(((0, 2),), NSC)
    with_sc, without = run(t, plan), run(t)
    assert without.latency_slots == 2
    assert with_sc.latency_slots == 1
    assert latency_ratio(with_sc, without) == 0.5


def test_unreachable_nodes_reported():
    t = build_topology([(0, 0), (10, 0), (90, 0)], [(0, 1)], n_channels=1, radios=1)
    r = run(t)
    assert r.covered_fraction == pytest.approx(2 / 3)
    assert r.reachable == frozenset({0, 1})
    assert r.latency_slots == 1


def test_blocked_channel_gives_no_latency():
    t = build_topology([(0, 0), (10, 0)], [(0, 1)], n_channels=1, radios=1)
    r = run(t, busy=1.0, max_slots=20)
    assert r.latency_slots is None and r.covered_fraction == 0.5


def test_csv_row():
    r = SimResult(3, 1.0, {0: 0}, frozenset({0}))
    assert r.csv_row("latency_vs_shortcuts", 4, 10) == {
        "scenario": "latency_vs_shortcuts", "seed": 4, "shortcuts": 10, "latency": 3, "covered_fraction": 1.0}
    assert SimResult(None, 0.5).csv_row("x", 0, 0)["latency"] == ""


@pytest.mark.parametrize("bad", [dict(max_slots=0), dict(pu_busy_prob_per_channel=[1.5])])
def test_config_validation(bad):
    kw = dict(source=0, pu_busy_prob_per_channel=[0.1])
    kw.update(bad)
    with pytest.raises(ParameterError):
        SimConfig(**kw)


def test_unknown_source():
    t = build_topology([(0, 0)], [])
    a = assign_network(t, empty_plan(), flat_timings(4))
    with pytest.raises(ParameterError):
        run_dissemination(t, empty_plan(), a, SimConfig(5, [0.0] * 4))


def test_latency_ratio_cases():
    one = SimResult(1, 1.0, {0: 0, 1: 1}, frozenset({0, 1}))
    assert latency_ratio(one, one) == 1.0
    assert latency_ratio(one, SimResult(None, 0.5)) is None
    lost = SimResult(None, 0.5, {0: 0}, frozenset({0, 1}))
    assert latency_ratio(lost, one) is None


def test_same_seed_same_result():
    t = topology_from_adj(random_graph(np.random.default_rng(1), 25, 0.15))
    assert run(t, busy=0.4, seed=3) == run(t, busy=0.4, seed=3)


# --- properties ---------------------------------------------------------------


@st.composite
def connected_graphs(draw):
    n = draw(st.integers(2, 20))
    seed = draw(st.integers(0, 10_000))
    adj = random_graph(np.random.default_rng(seed), n, draw(st.floats(0.0, 0.5)))
    for v in range(n - 1):  # spanning path keeps it connected
        adj[v].add(v + 1)
        adj[v + 1].add(v)
    return adj


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.data())
def test_latency_is_eccentricity_without_pus(adj, data):
    # enough radios and channels that every neighbour can be served in one slot
    deg = max(len(v) for v in adj.values())
    t = topology_from_adj(adj, radios=deg, n_channels=deg)
    src = data.draw(st.sampled_from(sorted(adj)))
    r = run(t, source=src)
    assert r.latency_slots == max(bfs_distances(adj, src).values())


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.floats(0.0, 0.8), st.integers(0, 1000))
def test_connected_graph_fully_covered(adj, busy, seed):
    t = topology_from_adj(adj, radios=2, n_channels=3)
    assert len(components(usable_graph(t, empty_plan(), assign_network(t, empty_plan(), flat_timings(3))))) == 1
    r = run(t, busy=busy, seed=seed, max_slots=5000)
    assert r.covered_fraction == 1.0 and r.latency_slots is not None


@pytest.mark.slow
def test_shortcuts_lower_mean_latency():
    lat0, lat30 = [], []
    for seed in range(20):
        lat0.append(evaluate_network(SimParams(), NSC_CA, 0, 0.8, seed, True).latency)
        lat30.append(evaluate_network(SimParams(), NSC_CA, 30, 0.8, seed, True).latency)
    pairs = [(a, b) for a, b in zip(lat0, lat30) if a is not None and b is not None]
    assert len(pairs) >= 15
    assert np.mean([b for _, b in pairs]) <= np.mean([a for a, _ in pairs])


@pytest.mark.slow
def test_nsc_ratio_below_rs_at_default_budget():
    def mean_ratio(scheme):
        rs = [evaluate_network(SimParams(), scheme, 10, 0.8, s, True).latency_ratio for s in range(20)]
        return np.mean([r for r in rs if r is not None])

    assert mean_ratio(NSC_RANDOM) < mean_ratio(RS_RANDOM)
