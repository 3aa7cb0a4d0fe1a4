import math

import numpy as np
import pytest

from qmaxcut.graph import complete, edgeless, random_graph, single_edge
from qmaxcut.ratios import alpha_gp, f_star
from qmaxcut.rounding import (
    end_to_end,
    estimate_overlap_mean,
    gaussian_round,
    round_and_evaluate,
    rounded_value,
)
from qmaxcut.sdp import GramVectors, solve_sdp, spin_coefficient


def test_collinear_vectors_keep_signs():
    y = np.array([[1.0], [-1.0], [1.0]])
    om = gaussian_round(GramVectors(y), seed=3)
    assert np.allclose(om[0], om[2])
    assert np.allclose(om[0], -om[1])
    assert np.allclose(np.linalg.norm(om, axis=1), 1)


def test_identical_and_antipodal_inputs():
    rng = np.random.default_rng(0)
    v = rng.standard_normal(5)
    v /= np.linalg.norm(v)
    om = gaussian_round(np.stack([v, v, -v]), seed=1)
    assert np.array_equal(om[0], om[1])
    assert abs(om[0] @ om[2] + 1) < 1e-15


def test_round_is_deterministic():
    y = solve_sdp(random_graph(6, 0.6, seed=2)).gram
    assert np.array_equal(gaussian_round(y, 11), gaussian_round(y, 11))
    assert not np.array_equal(gaussian_round(y, 11), gaussian_round(y, 12))


def test_round_rejects_empty():
    with pytest.raises(ValueError):
        gaussian_round(np.zeros((0, 3)), 0)


def test_overlap_edge_cases():
    mean, se = estimate_overlap_mean(-1.0, 5000, seed=0)
    assert mean == pytest.approx(-1.0, abs=1e-12) and se < 1e-12
    mean, se = estimate_overlap_mean(0.0, 100_000, seed=1)
    assert abs(mean) <= 3 * se
    with pytest.raises(ValueError):
        estimate_overlap_mean(0.5, 0)
    with pytest.raises(ValueError):
        estimate_overlap_mean(1.5, 10)


@pytest.mark.parametrize("rho", [-0.9, -0.5, 0.3, 0.8])
def test_overlap_law(rho):
    mean, se = estimate_overlap_mean(rho, 200_000, seed=5)
    assert abs(mean - f_star(rho)) <= 4 * se


def test_single_edge_every_trial_two():
    sol = solve_sdp(single_edge(), spin_coefficient(0.5))
    rep = round_and_evaluate(single_edge(), sol.gram, 200, seed=0)
    assert rep.best_value == pytest.approx(2.0, abs=1e-12)
    assert rep.mean_value == pytest.approx(2.0, abs=1e-12)
    assert rep.std_error < 1e-12
    assert rep.edge_overlaps == pytest.approx([-1.0], abs=1e-12)


def test_edgeless_graph():
    g = edgeless(3)
    sol = solve_sdp(g)
    rep = round_and_evaluate(g, sol.gram, 10, seed=0)
    assert rep.best_value == 0 and rep.mean_value == 0


def test_report_invariants_and_determinism():
    g = random_graph(8, 0.5, 1.0, seed=4)
    gram = solve_sdp(g).gram
    a = round_and_evaluate(g, gram, 500, seed=9)
    b = round_and_evaluate(g, gram, 500, seed=9)
    assert a.best_value == b.best_value and a.mean_value == b.mean_value
    assert a.best_value >= a.mean_value - 1e-12
    assert rounded_value(g, a.best_assignment) == pytest.approx(a.best_value, abs=1e-12)
    assert len(a.edge_overlaps) == len(g.edges)


def test_mismatch_rejected():
    gram = solve_sdp(complete(3)).gram
    with pytest.raises(ValueError):
        round_and_evaluate(complete(4), gram, 10, 0)


def test_rotation_invariance():
    g = random_graph(7, 0.6, 1.0, seed=1)
    gram = solve_sdp(g).gram
    q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((gram.rank, gram.rank)))
    a = round_and_evaluate(g, gram, 4000, seed=1)
    b = round_and_evaluate(g, GramVectors(gram.vectors @ q), 4000, seed=2)
    assert abs(a.mean_value - b.mean_value) <= 4 * math.hypot(a.std_error, b.std_error)


def test_mean_meets_guarantee():
    g = complete(3)
    c = spin_coefficient(0.5)
    sol = solve_sdp(g, c)
    rep = round_and_evaluate(g, sol.gram, 100_000, seed=0)
    assert rep.mean_value >= alpha_gp(0.5)[0] * sol.value - 3 * rep.std_error


@pytest.mark.parametrize("two_s", [1, 2, 3])
def test_single_edge_pipeline_ratio(two_s):
    res = end_to_end(single_edge(), two_s / 2, "gp_s", trials=50, seed=0)
    assert res.value == pytest.approx(2.0, abs=1e-12)
    assert res.ratio == pytest.approx(two_s / (two_s + 1), abs=1e-9)


def test_pipeline_variational_and_lieb_range():
    from qmaxcut.ratios import alpha_lieb

    g = random_graph(8, 0.5, 1.0, seed=7)
    for algorithm in ("lieb_bov", "gp_s"):
        res = end_to_end(g, 1, algorithm, trials=300, seed=1)
        assert res.value <= res.exact_value + 1e-9
        assert alpha_lieb(1) <= res.ratio <= 1


def test_pipeline_validation():
    with pytest.raises(ValueError):
        end_to_end(single_edge(), 0.5, "other")
    res = end_to_end(single_edge(), 0.5, trials=5, exact=False)
    assert res.exact_value is None and res.ratio is None
