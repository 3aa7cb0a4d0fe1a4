"""Mediator gadget: a penalised spin pair (a, b) inducing a ferromagnetic coupling on (1, 2).

Sites are ordered (1, 2, a, b). The full Hamiltonian is

    H(Delta) = Delta H0 + sqrt(Delta) H2 [+ H1],
    H0 = (S_a + S_b)^2,   H2 = (S_1 + S_2) . S_a,

and at second order its low-energy block is M = P H1 P - P H2 H0^+ H2 P,
where P projects the mediators onto the kernel of H0 (their singlet).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .spin import as_spin, spin_matrices

SITES = 4
MAX_TWO_S = 4


@dataclass(frozen=True)
class EffectiveFit:
    coupling: float
    offset: float
    residual: float


@dataclass(frozen=True)
class GadgetInstance:
    two_s: int
    delta: float
    include_h1: bool = False

    def __post_init__(self):
        as_spin(self.two_s / 2)
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def dim(self) -> int:
        return (self.two_s + 1) ** SITES

    def hamiltonian(self) -> np.ndarray:
        s = self.two_s / 2
        h = self.delta * build_h0(s) + np.sqrt(self.delta) * build_h2(s)
        if self.include_h1:
            h = h + h1_shift(s) * np.eye(self.dim)
        return h


def _check(s):
    spin = as_spin(s)
    if spin.two_s > MAX_TWO_S:
        raise ValueError(f"gadget diagonalisation limited to 2S <= {MAX_TWO_S}, got {spin.two_s}")
    return spin


def _embed(a: np.ndarray, site: int, d: int) -> np.ndarray:
    ops = [np.eye(d)] * SITES
    ops[site] = a
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _site_spins(s, site: int) -> list[np.ndarray]:
    spin = as_spin(s)
    return [_embed(a, site, spin.d) for a in spin_matrices(spin)]


def _real(h: np.ndarray) -> np.ndarray:
    if np.abs(h.imag).max(initial=0.0) > 1e-12:
        raise ArithmeticError("expected a real operator")
    return np.ascontiguousarray(h.real)


def build_h0(s) -> np.ndarray:
    """(S_a + S_b)^2 on the four-site space."""
    spin = _check(s)
    total = [a + b for a, b in zip(_site_spins(spin, 2), _site_spins(spin, 3))]
    return _real(sum(t @ t for t in total))


def build_h2(s) -> np.ndarray:
    """(S_1 + S_2) . S_a on the four-site space."""
    spin = _check(s)
    left = [a + b for a, b in zip(_site_spins(spin, 0), _site_spins(spin, 1))]
    return _real(sum(x @ y for x, y in zip(left, _site_spins(spin, 2))))


def h1_shift(s) -> float:
    """Identity coefficient 2 S^2 (S+1)^2 / (3 (2S+1)) for the optional H1 term."""
    spin = as_spin(s)
    return 2 * spin.s**2 * (spin.s + 1) ** 2 / (3 * (2 * spin.s + 1))


def reference_coupling(s) -> float:
    """S(S+1) / (3 (2S+1)), the analytic coupling the gadget is compared with."""
    spin = as_spin(s)
    return spin.casimir / (3 * (2 * spin.s + 1))


def pair_singlet(s) -> np.ndarray:
    """Kernel vector of (S_a + S_b)^2 on two spins, phase-fixed to a real vector."""
    spin = as_spin(s)
    d = spin.d
    triple = spin_matrices(spin)
    total = [np.kron(a, np.eye(d)) + np.kron(np.eye(d), a) for a in triple]
    h = _real(sum(t @ t for t in total))
    vals, vecs = np.linalg.eigh(h)
    if vals[0] > 1e-10 or vals[1] < 1e-6:
        raise ArithmeticError("pair kernel is not one-dimensional")
    v = vecs[:, 0]
    return v * np.sign(v[np.argmax(np.abs(v))])


def kernel_isometry(s) -> np.ndarray:
    """V with V V^T = P: columns span (spins 1, 2 arbitrary) x (mediator singlet)."""
    spin = as_spin(s)
    return np.kron(np.eye(spin.d**2), pair_singlet(spin)[:, None])


def projector(s) -> np.ndarray:
    v = kernel_isometry(s)
    return v @ v.T


def projected_h2_norm(s) -> float:
    """Spectral norm of P H2 P, which vanishes because the singlet has <S_a> = 0."""
    p = projector(s)
    return float(np.linalg.norm(p @ build_h2(s) @ p, 2))


def pair_pseudo_inverse(s) -> np.ndarray:
    spin = _check(s)
    h0 = build_h0(spin)
    vals, vecs = np.linalg.eigh(h0)
    inv = np.where(vals > 1e-9, 1.0 / np.where(vals > 1e-9, vals, 1.0), 0.0)
    return (vecs * inv) @ vecs.T


def heisenberg_12(s) -> np.ndarray:
    """S_1 . S_2 on the d^2 space of the two logical spins."""
    spin = as_spin(s)
    d = spin.d
    return _real(sum(np.kron(a, np.eye(d)) @ np.kron(np.eye(d), a) for a in spin_matrices(spin)))


def fit_heisenberg(m: np.ndarray, s) -> EffectiveFit:
    """Least-squares fit m = -c S_1.S_2 + e I; residual is the Frobenius norm of the misfit."""
    ss = heisenberg_12(s)
    basis = np.stack([-ss.ravel(), np.eye(ss.shape[0]).ravel()], axis=1)
    coef, *_ = np.linalg.lstsq(basis, m.ravel(), rcond=None)
    c, e = (float(x) for x in coef)
    residual = float(np.linalg.norm(m - (-c * ss + e * np.eye(ss.shape[0]))))
    return EffectiveFit(c, e, residual)


def effective_hamiltonian(s, include_h1: bool = False) -> tuple[np.ndarray, EffectiveFit]:
    """Second-order effective matrix on spins (1, 2) and its Heisenberg fit."""
    spin = _check(s)
    v = kernel_isometry(spin)
    h2 = build_h2(spin)
    m = -v.T @ h2 @ pair_pseudo_inverse(spin) @ h2 @ v
    if include_h1:
        m = m + h1_shift(spin) * np.eye(m.shape[0])
    m = 0.5 * (m + m.T)
    fit = fit_heisenberg(m, spin)
    scale = max(1.0, float(np.linalg.norm(m)))
    if fit.residual > 1e-8 * scale:
        raise ArithmeticError(f"effective matrix is not of Heisenberg form (residual {fit.residual:.3e})")
    return m, fit


def total_spin_commutator(s, m: np.ndarray) -> float:
    """max_alpha |[M, S_1^alpha + S_2^alpha]| (Frobenius)."""
    spin = as_spin(s)
    d = spin.d
    worst = 0.0
    for a in spin_matrices(spin):
        t = np.kron(a, np.eye(d)) + np.kron(np.eye(d), a)
        worst = max(worst, float(np.linalg.norm(m @ t - t @ m)))
    return worst


def mediator_correlations(s) -> dict:
    """<S_a^i S_b^j> for the true singlet and for the unsigned state sum_m |m>|-m> / sqrt(d)."""
    spin = as_spin(s)
    d = spin.d
    triple = list(spin_matrices(spin))
    unsigned = np.zeros(d * d)
    for k in range(d):
        unsigned[k * d + (d - 1 - k)] = 1.0
    unsigned /= np.sqrt(d)
    out = {"reference": reference_coupling(spin)}
    for name, state in (("singlet", pair_singlet(spin)), ("unsigned", unsigned)):
        corr = np.array([[np.vdot(state, np.kron(a, b) @ state).real for b in triple] for a in triple])
        out[name] = corr
    return out


@dataclass(frozen=True)
class ConvergenceRow:
    two_s: int
    delta: float
    spec_error: float
    scaled_error: float


def spectral_convergence(s, deltas, include_h1: bool = False) -> list[ConvergenceRow]:
    """Max deviation of the lowest d^2 levels of H(Delta) from the spectrum of M."""
    spin = _check(s)
    deltas = [float(x) for x in deltas]
    if any(x <= 0 for x in deltas) or any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be positive and strictly increasing")
    m, _ = effective_hamiltonian(spin, include_h1)
    target = np.linalg.eigvalsh(m)
    k = len(target)
    rows = []
    for delta in deltas:
        h = GadgetInstance(spin.two_s, delta, include_h1).hamiltonian()
        low = sla.eigh(h, eigvals_only=True, subset_by_index=[0, k - 1])
        err = float(np.max(np.abs(low - target)))
        rows.append(ConvergenceRow(spin.two_s, delta, err, err * float(np.sqrt(delta))))
    return rows


def convergence_csv(rows: list[ConvergenceRow]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["two_s", "delta", "spec_error", "scaled_error"])
    for r in rows:
        out.writerow([r.two_s, repr(r.delta), repr(r.spec_error), repr(r.scaled_error)])
    return buf.getvalue()
