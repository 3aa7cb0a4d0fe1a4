"""Spin-S matrices, Kronecker embedding and Bloch coherent states.

Basis ordering is m = S, S-1, ..., -S on every site; many-body vectors are
site-major (site 0 is the slowest index).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, order=True)
class SpinValue:
    """Spin quantum number stored as the integer 2S."""

    two_s: int

    def __post_init__(self):
        if int(self.two_s) != self.two_s or self.two_s < 1:
            raise ValueError(f"2S must be a positive integer, got {self.two_s!r}")
        object.__setattr__(self, "two_s", int(self.two_s))

    @classmethod
    def from_s(cls, s) -> "SpinValue":
        two_s = Fraction(s) * 2
        if two_s.denominator != 1:
            raise ValueError(f"S must be a multiple of 1/2, got {s!r}")
        return cls(int(two_s))

    @property
    def s(self) -> float:
        return self.two_s / 2

    @property
    def d(self) -> int:
        return self.two_s + 1

    @property
    def casimir(self) -> float:
        """S(S+1)."""
        return self.s * (self.s + 1)

    def __str__(self):
        return str(Fraction(self.two_s, 2))


def as_spin(s) -> SpinValue:
    return s if isinstance(s, SpinValue) else SpinValue.from_s(s)


@dataclass(frozen=True)
class SpinTriple:
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    def __iter__(self):
        return iter((self.sx, self.sy, self.sz))

    def dot(self, n) -> np.ndarray:
        """S . n for a real 3-vector n."""
        return n[0] * self.sx + n[1] * self.sy + n[2] * self.sz

    def casimir(self) -> np.ndarray:
        return self.sx @ self.sx + self.sy @ self.sy + self.sz @ self.sz


@lru_cache(maxsize=None)
def _spin_matrices(two_s: int) -> SpinTriple:
    s = two_s / 2
    m = s - np.arange(two_s + 1)
    # <m+1|S+|m> = sqrt(S(S+1) - m(m+1)); row k holds m_k = S - k
    raise_ = np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    lower = raise_.conj().T
    sx = (raise_ + lower) / 2
    sy = (raise_ - lower) / 2j
    sz = np.diag(m).astype(complex)
    for a in (sx, sy, sz):
        a.flags.writeable = False
    return SpinTriple(sx, sy, sz)


def spin_matrices(s) -> SpinTriple:
    return _spin_matrices(as_spin(s).two_s)


def _unit(omega, atol=1e-10) -> np.ndarray:
    omega = np.asarray(omega, dtype=float).reshape(3)
    if abs(np.linalg.norm(omega) - 1.0) > atol:
        raise ValueError(f"expected a unit 3-vector, got norm {np.linalg.norm(omega)}")
    return omega


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.round(np.abs(v), 12)))
    return v * (abs(v[k]) / v[k])


def coherent_state(s, omega) -> np.ndarray:
    """Highest-weight eigenvector of S . omega (eigenvalue S)."""
    spin = as_spin(s)
    omega = _unit(omega)
    _, vecs = np.linalg.eigh(spin_matrices(spin).dot(omega))
    return fix_phase(vecs[:, -1])


def product_coherent_state(s, omegas) -> np.ndarray:
    omegas = np.asarray(omegas, dtype=float)
    state = np.ones(1, dtype=complex)
    for omega in omegas:
        state = np.kron(state, coherent_state(s, omega))
    return state


def site_operator(a, site: int, n: int) -> sp.csr_matrix:
    """Embed the d x d matrix ``a`` at ``site`` of an n-site chain."""
    if not 0 <= site < n:
        raise IndexError(f"site {site} out of range for {n} sites")
    a = sp.csr_matrix(a)
    d = a.shape[0]
    left = sp.identity(d**site, format="csr")
    right = sp.identity(d ** (n - site - 1), format="csr")
    return sp.kron(sp.kron(left, a, format="csr"), right, format="csr")


def expectation(op, state: np.ndarray) -> complex:
    return complex(np.vdot(state, op @ state))


def spin_expectation(s, state: np.ndarray) -> np.ndarray:
    """Real 3-vector <S> of a single-site state."""
    return np.array([np.vdot(state, a @ state).real for a in spin_matrices(s)])


def total_sz(s, n: int) -> sp.csr_matrix:
    sz = spin_matrices(s).sz
    return sum((site_operator(sz, k, n) for k in range(1, n)), site_operator(sz, 0, n))


def heisenberg_pair(s, i: int, j: int, n: int) -> sp.csr_matrix:
    """S_i . S_j on n sites as a real sparse matrix."""
    triple = spin_matrices(s)
    term = None
    for a in triple:
        prod = site_operator(a, i, n) @ site_operator(a, j, n)
        term = prod if term is None else term + prod
    # S^y entries are imaginary, so the S^y S^y product is exactly real
    if term.nnz and np.abs(term.data.imag).max() > 0:
        raise ArithmeticError("S_i . S_j acquired an imaginary part")
    return sp.csr_matrix(term.real)
