import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from oracles import heisenberg_by_matrix_elements, qmaxcut_by_matrix_elements
from qmaxcut.exact import (
    ConvergenceError,
    SizeCapError,
    build_heisenberg,
    build_qha_hamiltonian,
    build_qmc_hamiltonian,
    extreme_eigenvalue,
    hilbert_dim,
    lanczos,
    qha_value,
    qmaxcut_state,
    qmaxcut_value,
)
from qmaxcut.graph import complete, cycle, edgeless, random_graph, single_edge, total_weight


@pytest.mark.parametrize("two_s", [1, 2, 3])
def test_single_edge_value(two_s):
    s = two_s / 2
    assert abs(qmaxcut_value(single_edge(), s) - (2 + 1 / s)) < 1e-8
    # weight-2 edge: minimum of H_QHA is -(S+1)/S
    assert abs(qha_value(single_edge(), s) + (s + 1) / s) < 1e-8


@pytest.mark.parametrize("two_s", [1, 2, 3])
def test_unit_edge_qha(two_s):
    s = two_s / 2
    assert abs(qha_value(single_edge(1.0), s) + (s + 1) / (2 * s)) < 1e-10


# frozen from the matrix-element oracle in tests/oracles.py
FROZEN = [
    (complete(3), 1, 3.0),
    (complete(3), 2, 3.0),
    (complete(3), 3, 2.666666666666667),
    (cycle(4), 1, 6.0),
    (cycle(4), 2, 5.0),
    (cycle(5), 1, 6.236067977499793),
    (complete(4), 2, 5.0),
    (random_graph(5, 0.9, 2.0, 2), 1, 12.445936275246481),
    (random_graph(5, 0.9, 2.0, 2), 2, 10.784085268738995),
    (random_graph(5, 0.9, 2.0, 2), 3, 10.240301761920144),
]


@pytest.mark.parametrize("g, two_s, expected", FROZEN)
def test_frozen_values(g, two_s, expected):
    assert abs(qmaxcut_value(g, two_s / 2) - expected) < 1e-9


@pytest.mark.parametrize("two_s", [1, 2])
def test_hamiltonian_matches_matrix_elements(two_s):
    g = random_graph(4, 0.8, 1.5, seed=two_s)
    h = build_heisenberg(g, two_s / 2).toarray()
    ref = heisenberg_by_matrix_elements(g.n, g.edges, two_s)
    assert np.abs(h - ref).max() < 1e-12


def test_oracle_agrees_live():
    g = random_graph(4, 0.7, 1.0, seed=8)
    assert abs(qmaxcut_value(g, 1) - qmaxcut_by_matrix_elements(g.n, g.edges, 2)) < 1e-10


@pytest.mark.parametrize("seed", range(4))
def test_complement_identity(seed):
    g = random_graph(6, 0.6, 1.0, seed=seed)
    for two_s in (1, 2):
        qmc = qmaxcut_value(g, two_s / 2, seed=seed)
        qha = qha_value(g, two_s / 2, seed=seed)
        assert abs(qmc + qha - total_weight(g)) < 1e-9


def test_operators_hermitian_and_real():
    g = random_graph(5, 0.6, 1.0, seed=1)
    for build in (build_heisenberg, build_qha_hamiltonian, build_qmc_hamiltonian):
        h = build(g, 1)
        assert not np.iscomplexobj(h.data)
        assert abs(h - h.T).max() < 1e-14


def test_edgeless_is_zero():
    g = edgeless(3)
    assert qmaxcut_value(g, 1) == 0.0
    assert qha_value(g, 0.5) == 0.0


def test_size_cap():
    g = complete(4)
    assert hilbert_dim(g, 1.5) == 256
    with pytest.raises(SizeCapError):
        build_heisenberg(g, 1.5, max_dim=255)
    with pytest.raises(SizeCapError):
        qmaxcut_value(complete(12), 1.5)


def test_lanczos_matches_dense_and_eigsh():
    g = random_graph(8, 0.5, 1.0, seed=2)
    h = build_qha_hamiltonian(g, 0.5)
    dense = np.linalg.eigvalsh(h.toarray())
    for which, ref in (("smallest", dense[0]), ("largest", dense[-1])):
        res = lanczos(h, which, seed=3)
        assert abs(res.value - ref) < 1e-9
        assert res.residual <= 1e-10 * max(1, abs(ref))
    ref = eigsh(h, k=1, which="SA")[0][0]
    assert abs(lanczos(h, "smallest").value - ref) < 1e-9


def test_lanczos_deterministic_for_seed():
    h = build_qha_hamiltonian(random_graph(9, 0.5, 1.0, seed=4), 0.5)
    a = lanczos(h, "smallest", seed=5)
    b = lanczos(h, "smallest", seed=5)
    assert a.value == b.value
    assert np.array_equal(a.vector, b.vector)


def test_lanczos_reports_non_convergence():
    h = sp.diags(np.linspace(0, 1, 2000)).tocsr()
    with pytest.raises(ConvergenceError) as exc:
        lanczos(h, "smallest", krylov_dim=3, max_restarts=2, tol=1e-14)
    assert exc.value.residual > 0


def test_extreme_eigenvalue_validation():
    with pytest.raises(ValueError):
        extreme_eigenvalue(sp.identity(3, format="csr"), "middle")


def test_ground_state_is_eigenvector():
    g = cycle(6)
    res = qmaxcut_state(g, 1)
    h = build_qmc_hamiltonian(g, 1)
    assert np.linalg.norm(h @ res.vector - res.value * res.vector) < 1e-8


@pytest.mark.slow
def test_large_sparse_instance():
    # d^N = 4^8 = 65536 goes through Lanczos
    g = random_graph(8, 0.5, 1.0, seed=6)
    qmc = qmaxcut_value(g, 1.5)
    qha = qha_value(g, 1.5)
    assert abs(qmc + qha - total_weight(g)) < 1e-8
