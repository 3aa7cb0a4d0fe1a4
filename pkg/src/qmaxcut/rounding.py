"""Gaussian projection of SDP vectors onto unit 3-vectors, with Monte-Carlo statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph
from .sdp import GramVectors, solve_sdp, spin_coefficient
from .spin import as_spin

ALGORITHMS = ("lieb_bov", "gp_s")


@dataclass
class RoundingReport:
    trials: int
    best_value: float
    mean_value: float
    std_error: float
    seed: int
    best_assignment: np.ndarray
    edge_overlaps: list[float] = field(default_factory=list)


@dataclass
class PipelineResult:
    algorithm: str
    value: float
    assignment: np.ndarray
    rounding: RoundingReport
    sdp_value: float
    exact_value: float | None = None

    @property
    def ratio(self) -> float | None:
        if self.exact_value is None:
            return None
        return self.value / self.exact_value if self.exact_value else 1.0


def _project(vectors: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    k = vectors.shape[1]
    while True:
        z = rng.standard_normal((3, k))
        omegas = vectors @ z.T
        norms = np.linalg.norm(omegas, axis=1)
        if np.all(norms >= 1e-14):
            return omegas / norms[:, None]


def gaussian_round(gram: GramVectors | np.ndarray, seed) -> np.ndarray:
    """Omega_i = Z y_i / |Z y_i| with Z a 3 x k standard normal matrix.

    ``seed`` may be an int, a SeedSequence or a Generator. Z is redrawn as a
    whole if any projection is numerically zero.
    """
    vectors = gram.vectors if isinstance(gram, GramVectors) else np.asarray(gram, dtype=float)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise ValueError("need a nonempty N x k array of vectors")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return _project(vectors, rng)


def estimate_overlap_mean(rho: float, trials: int, seed: int = 0, batch: int = 100_000) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of Omega_1.Omega_2 for inputs at inner product rho."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    y1 = np.array([1.0, 0.0])
    y2 = np.array([rho, math.sqrt(max(0.0, 1.0 - rho * rho))])
    rng = np.random.default_rng(seed)
    total = total_sq = 0.0
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        z = rng.standard_normal((m, 3, 2))
        a = z @ y1
        b = z @ y2
        # a zero-length projection has probability zero; guard anyway
        na = np.maximum(np.linalg.norm(a, axis=1), 1e-300)
        nb = np.maximum(np.linalg.norm(b, axis=1), 1e-300)
        dots = np.einsum("ij,ij->i", a, b) / (na * nb)
        total += float(dots.sum())
        total_sq += float((dots * dots).sum())
        done += m
    mean = total / trials
    var = max(0.0, total_sq / trials - mean * mean)
    se = math.sqrt(var / (trials - 1)) if trials > 1 else 0.0
    return mean, se


def rounded_value(g: WeightedGraph, omegas: np.ndarray) -> float:
    """(1/2) sum w_ij (1 - Omega_i.Omega_j), the coherent-product-state QMaxCut energy."""
    return 0.5 * math.fsum(w * (1.0 - float(omegas[i] @ omegas[j])) for i, j, w in g.edges)


def round_and_evaluate(g: WeightedGraph, gram: GramVectors, trials: int, seed: int = 0) -> RoundingReport:
    """Round ``trials`` times; trial t draws from the t-th child of SeedSequence(seed)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if gram.n != g.n:
        raise ValueError(f"Gram vectors for {gram.n} vertices but graph has {g.n}")
    if g.n == 0:
        return RoundingReport(trials, 0.0, 0.0, 0.0, seed, np.zeros((0, 3)))
    ii = np.array([e[0] for e in g.edges], dtype=int)
    jj = np.array([e[1] for e in g.edges], dtype=int)
    ww = np.array([e[2] for e in g.edges], dtype=float)
    values = np.empty(trials)
    overlap_sum = np.zeros(len(ww))
    best_value, best_omegas = -np.inf, None
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        omegas = _project(gram.vectors, np.random.default_rng(child))
        dots = np.einsum("ij,ij->i", omegas[ii], omegas[jj])
        overlap_sum += dots
        values[t] = 0.5 * float(ww @ (1.0 - dots))
        if values[t] > best_value:
            best_value, best_omegas = values[t], omegas
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return RoundingReport(
        trials=trials,
        best_value=float(best_value),
        mean_value=mean,
        std_error=se,
        seed=seed,
        best_assignment=best_omegas,
        edge_overlaps=(overlap_sum / trials).tolist(),
    )


def end_to_end(
    g: WeightedGraph,
    s,
    algorithm: str = "gp_s",
    trials: int = 1000,
    seed: int = 0,
    exact: bool = True,
    max_dim: int | None = None,
) -> PipelineResult:
    """Solve the SDP, round, and keep the best of ``trials`` product states.

    ``lieb_bov`` rounds the Max-Cut SDP, ``gp_s`` the spin-S SDP. With
    ``exact`` set and the instance within ``max_dim``, the realised ratio
    against the exact optimum is attached.
    """
    from .exact import MAX_DIM, SizeCapError, qmaxcut_value

    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    spin = as_spin(s)
    c = 1.0 if algorithm == "lieb_bov" else spin_coefficient(spin)
    sol = solve_sdp(g, c, seed=seed)
    report = round_and_evaluate(g, sol.gram, trials, seed)
    exact_value = None
    if exact:
        try:
            exact_value = qmaxcut_value(g, spin, seed=seed, max_dim=max_dim or MAX_DIM)
        except SizeCapError:
            exact_value = None
    return PipelineResult(algorithm, report.best_value, report.best_assignment, report, sol.value, exact_value)
