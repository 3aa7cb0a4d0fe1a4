import numpy as np
import pytest

from oracles import planar_triangle_value
from qmaxcut.graph import WeightedGraph, complete, cycle, edgeless, random_graph, single_edge, total_weight
from qmaxcut.sdp import (
    default_rank,
    sdp_objective,
    sdp_value_mc,
    sdp_value_s,
    solve_sdp,
    spin_coefficient,
    stationarity_residual,
    verify_relaxation,
)


def test_single_edge_spin_half():
    sol = solve_sdp(single_edge(), c=3.0)
    assert abs(sol.value - 4.0) < 1e-12
    y = sol.gram.vectors
    assert abs(y[0] @ y[1] + 1) < 1e-12
    assert sol.certified


def test_k3_max_cut():
    assert abs(sdp_value_mc(complete(3)) - planar_triangle_value()) < 1e-9


@pytest.mark.parametrize("g", [cycle(4), cycle(6, 2.0), WeightedGraph(4, ((0, 2, 1.0), (1, 3, 0.5), (0, 3, 2.0)))])
def test_bipartite_saturates(g):
    assert abs(sdp_value_mc(g) - 2 * total_weight(g)) < 1e-9


def test_affine_examples():
    assert abs(sdp_value_s(single_edge(), 0.5) - 4.0) < 1e-10
    assert abs(sdp_value_s(complete(3), 1) - 3.0) < 1e-8
    # S = 1/2 on K3: (1 - 3) * 1.5 + 3 * 2.25
    assert abs(sdp_value_s(complete(3), 0.5) - 3.75) < 1e-8


def test_spin_coefficient():
    assert spin_coefficient(0.5) == 3.0
    assert spin_coefficient(1) == 2.0
    assert spin_coefficient(1.5) == 5 / 3


@pytest.mark.parametrize("seed", range(5))
def test_feasibility_and_stationarity(seed):
    g = random_graph(9, 0.5, 1.0, seed=seed)
    sol = solve_sdp(g, seed=seed)
    y = sol.gram.vectors
    assert np.abs(np.linalg.norm(y, axis=1) - 1).max() < 1e-10
    assert np.linalg.eigvalsh(sol.gram.gram())[0] > -1e-10
    assert sol.stationarity_residual <= 1e-8
    assert sol.certified
    assert abs(stationarity_residual(g.weight_matrix(), y) - sol.stationarity_residual) == 0
    assert abs(sdp_objective(g, y) - sol.value) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_rank_robustness(seed):
    g = random_graph(10, 0.5, 1.0, seed=seed)
    low = solve_sdp(g, rank=default_rank(g.n), seed=seed).value
    full = solve_sdp(g, rank=g.n, seed=seed + 1).value
    assert abs(low - full) <= 1e-6 * max(1, full)


def test_rank_precondition():
    with pytest.raises(ValueError):
        solve_sdp(random_graph(10, 0.5, seed=1), rank=2)
    with pytest.raises(ValueError):
        solve_sdp(single_edge(), c=0.5)


@pytest.mark.parametrize("seed", range(5))
def test_affine_identity(seed):
    g = random_graph(7, 0.6, 2.0, seed=seed + 40)
    mc = sdp_value_mc(g, seed=seed)
    for two_s in (1, 2, 3):
        c = spin_coefficient(two_s / 2)
        s_val = sdp_value_s(g, two_s / 2, seed=seed + 7)
        assert abs(s_val - ((1 - c) * total_weight(g) + c * mc)) <= 1e-7 * max(1, s_val)


def test_sdp_dominates_product_value():
    from qmaxcut.classical import prod_local_search

    for seed in range(4):
        g = random_graph(7, 0.6, 1.0, seed=seed)
        assert sdp_value_mc(g) >= prod_local_search(g)[0] - 1e-9


def test_ascent_is_monotone():
    from qmaxcut.classical import random_unit_vectors, sweep

    g = random_graph(12, 0.4, 1.0, seed=3)
    a = g.weight_matrix()
    y = random_unit_vectors(np.random.default_rng(0), g.n, default_rank(g.n))
    prev = sdp_objective(g, y)
    for _ in range(20):
        sweep(a, y)
        cur = sdp_objective(g, y)
        assert cur >= prev - 1e-12
        assert np.abs(np.linalg.norm(y, axis=1) - 1).max() < 1e-12
        prev = cur


def test_large_c_limit():
    g = random_graph(6, 0.6, 1.0, seed=2)
    mc = sdp_value_mc(g)
    assert abs(sdp_value_s(g, 200) - mc) < 0.01 * mc


def test_relaxation_reports():
    rep = verify_relaxation(single_edge(), 0.5)
    assert abs(rep["sdp_s"] - 4) < 1e-10 and abs(rep["gap"]) < 1e-7
    rep = verify_relaxation(complete(3), 0.5)
    assert rep["relaxation_holds"] and rep["sdp_s"] >= rep["qmaxcut"]
    assert rep["moment_diag_error"] < 1e-10
    rep = verify_relaxation(edgeless(3), 1)
    assert rep["sdp_s"] == 0 and rep["qmaxcut"] == 0


def test_relaxation_failure_surfaces_values():
    with pytest.raises(AssertionError, match="qmaxcut"):
        verify_relaxation(complete(3), 0.5, qmaxcut=100.0)


def test_deterministic():
    g = random_graph(8, 0.5, seed=9)
    a, b = solve_sdp(g, seed=4), solve_sdp(g, seed=4)
    assert a.value == b.value
    assert np.array_equal(a.gram.vectors, b.gram.vectors)
