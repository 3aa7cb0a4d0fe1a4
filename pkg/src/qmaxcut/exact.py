"""Many-body Hamiltonians and their extreme eigenvalues.

H_QMC(G) = (1/2) sum w_ij (1 - S_i.S_j / S^2)   and
H_QHA(G) = (1/(2 S^2)) sum w_ij S_i.S_j,          H_QMC = W - H_QHA.

Small operators are diagonalised densely; larger ones go through a Lanczos
iteration with full reorthogonalisation and explicit restarts.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .graph import WeightedGraph, total_weight
from .spin import as_spin, heisenberg_pair

log = logging.getLogger(__name__)

MAX_DIM = 2**21
DENSE_DIM = 512


class SizeCapError(ValueError):
    """Hilbert-space dimension above the configured cap."""


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass
class SpectralResult:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int = 0
    seed: int | None = None


def hilbert_dim(g: WeightedGraph, s) -> int:
    return as_spin(s).d ** g.n


def _check_size(g: WeightedGraph, s, max_dim: int) -> int:
    dim = hilbert_dim(g, s)
    if dim > max_dim:
        raise SizeCapError(f"dimension {as_spin(s).d}^{g.n} = {dim} exceeds cap {max_dim}")
    return dim


def build_heisenberg(g: WeightedGraph, s, max_dim: int = MAX_DIM) -> sp.csr_matrix:
    """sum_{ij in E} w_ij S_i . S_j (unnormalised)."""
    dim = _check_size(g, s, max_dim)
    h = sp.csr_matrix((dim, dim))
    for i, j, w in g.edges:
        if w:
            h = h + w * heisenberg_pair(s, i, j, g.n)
    h.sum_duplicates()
    h.eliminate_zeros()
    return h


def build_qha_hamiltonian(g: WeightedGraph, s, max_dim: int = MAX_DIM) -> sp.csr_matrix:
    spin = as_spin(s)
    return (build_heisenberg(g, spin, max_dim) / (2 * spin.s**2)).tocsr()


def build_qmc_hamiltonian(g: WeightedGraph, s, max_dim: int = MAX_DIM) -> sp.csr_matrix:
    qha = build_qha_hamiltonian(g, s, max_dim)
    eye = sp.identity(qha.shape[0], format="csr")
    return (total_weight(g) * eye - qha).tocsr()


def _residual(h, x, value) -> float:
    return float(np.linalg.norm(h @ x - value * x))


def _dense_extreme(h, which: str) -> SpectralResult:
    a = h.toarray() if sp.issparse(h) else np.asarray(h)
    n = a.shape[0]
    k = n - 1 if which == "largest" else 0
    vals, vecs = sla.eigh(a, subset_by_index=[k, k])
    x = vecs[:, 0]
    return SpectralResult(float(vals[0]), x, _residual(a, x, vals[0]))


def lanczos(
    h,
    which: str = "smallest",
    seed: int = 0,
    tol: float = 1e-10,
    krylov_dim: int = 120,
    max_restarts: int = 50,
) -> SpectralResult:
    """Extreme eigenpair by Lanczos with full reorthogonalisation.

    The Krylov basis is rebuilt from the current Ritz vector whenever
    ``krylov_dim`` is reached. Convergence means a true residual
    |Hx - lambda x| <= tol * max(1, |lambda|).
    """
    if which not in ("smallest", "largest"):
        raise ValueError(f"which must be 'smallest' or 'largest', got {which!r}")
    sign = 1.0 if which == "smallest" else -1.0
    n = h.shape[0]
    cplx = np.iscomplexobj(h.data if sp.issparse(h) else h)
    dtype = complex if cplx else float
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    if cplx:
        v = v + 1j * rng.standard_normal(n)
    m = min(krylov_dim, n)
    basis = np.empty((m, n), dtype=dtype)
    residual = np.inf
    total = 0
    for _ in range(max_restarts):
        basis[0] = v / np.linalg.norm(v)
        alphas, betas = [], []
        theta, s_vec = 0.0, np.ones(1)
        for j in range(m):
            w = sign * (h @ basis[j])
            alpha = float(np.vdot(basis[j], w).real)
            alphas.append(alpha)
            # two rounds of classical Gram-Schmidt against the whole basis
            for _ in range(2):
                w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
            beta = float(np.linalg.norm(w))
            total += 1
            if j:
                ev, evec = sla.eigh_tridiagonal(np.array(alphas), np.array(betas), select="i", select_range=(0, 0))
            else:
                ev, evec = np.array(alphas), np.ones((1, 1))
            theta, s_vec = float(ev[0]), evec[:, 0]
            estimate = beta * abs(s_vec[-1])
            if estimate <= 0.1 * tol * max(1.0, abs(theta)) or beta < 1e-14 or j == m - 1:
                break
            betas.append(beta)
            basis[j + 1] = w / beta
        x = basis[: len(s_vec)].T @ s_vec
        x /= np.linalg.norm(x)
        residual = _residual(h, x, sign * theta)
        if residual <= tol * max(1.0, abs(theta)):
            return SpectralResult(sign * theta, x, residual, total, seed)
        v = x
    raise ConvergenceError(f"Lanczos did not converge after {total} iterations", residual)


def extreme_eigenvalue(
    h,
    which: str = "largest",
    seed: int = 0,
    dense_dim: int = DENSE_DIM,
    tol: float = 1e-10,
) -> SpectralResult:
    if h.shape[0] < 1:
        raise ValueError("operator must have dimension >= 1")
    if which not in ("smallest", "largest"):
        raise ValueError(f"which must be 'smallest' or 'largest', got {which!r}")
    if h.shape[0] <= dense_dim:
        return _dense_extreme(h, which)
    return lanczos(h, which, seed=seed, tol=tol)


def qha_value(g: WeightedGraph, s, seed: int = 0, max_dim: int = MAX_DIM) -> float:
    """QHA_S(G): ground energy of the normalised antiferromagnet."""
    return extreme_eigenvalue(build_qha_hamiltonian(g, s, max_dim), "smallest", seed=seed).value


def qmaxcut_value(g: WeightedGraph, s, seed: int = 0, max_dim: int = MAX_DIM) -> float:
    """QMaxCut_S(G): largest eigenvalue of H_QMC."""
    return qmaxcut_state(g, s, seed=seed, max_dim=max_dim).value


def qmaxcut_state(g: WeightedGraph, s, seed: int = 0, max_dim: int = MAX_DIM) -> SpectralResult:
    return extreme_eigenvalue(build_qmc_hamiltonian(g, s, max_dim), "largest", seed=seed)
