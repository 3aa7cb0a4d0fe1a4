"""Approximation-ratio functions for Gaussian rounding to unit 3-vectors.

F(rho) = (8 / (3 pi)) rho 2F1(1/2, 1/2; 5/2; rho^2) is the expected overlap of
two rounded vectors whose inputs have inner product rho. The ratios are
minima over rho in [-1, 0) of

    g(rho)   = (1 - F(rho)) / (1 - rho)                  (Max-Cut SDP)
    f_S(rho) = (1 - F(rho)) / (1 - ((S+1)/S) rho)        (spin-S SDP)
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .spin import as_spin

GRID_POINTS = 10_000
SERIES_RTOL = 1e-15


def _series(a: float, b: float, c: float, z: np.ndarray) -> np.ndarray:
    """Plain Gauss series, stopped once every term is below SERIES_RTOL of its partial sum."""
    term = np.ones_like(z)
    total = np.ones_like(z)
    n = 0
    while True:
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1))) * z
        total = total + term
        n += 1
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)):
            return total
        if n > 10_000:
            raise ArithmeticError("hypergeometric series failed to converge")


def hyp2f1_half(z):
    """2F1(1/2, 1/2; 5/2; z) for z in [0, 1]; scalar or array.

    The direct series is used for z <= 1/2. Above that the linear transformation
    to 1 - z is applied (c - a - b = 3/2 is not an integer):

        2F1 = (3 pi / 8) 2F1(1/2, 1/2; -1/2; 1-z) + (1-z)^{3/2} 2F1(2, 2; 5/2; 1-z)

    so both series converge at rate <= 1/2. z = 1 returns 3 pi / 8.
    """
    arr = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("z must lie in [0, 1]")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    low = flat <= 0.5
    if np.any(low):
        out[low] = _series(0.5, 0.5, 2.5, flat[low])
    high = ~low
    if np.any(high):
        u = 1.0 - flat[high]
        out[high] = 3 * math.pi / 8 * _series(0.5, 0.5, -0.5, u) + u**1.5 * _series(2.0, 2.0, 2.5, u)
    out[flat == 1.0] = 3 * math.pi / 8
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def f_star(rho):
    """Expected overlap E[Omega_i . Omega_j] after rounding inputs at inner product rho."""
    arr = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > 1):
        raise ValueError("rho must lie in [-1, 1]")
    out = 8 / (3 * math.pi) * arr * hyp2f1_half(arr * arr)
    out = np.where(np.abs(arr) == 1.0, np.sign(arr), out)
    return float(out) if np.ndim(out) == 0 else out


def g_ratio(rho):
    rho = np.asarray(rho, dtype=float)
    out = (1 - f_star(rho)) / (1 - rho)
    return float(out) if out.ndim == 0 else out


def f_s(rho, s):
    spin = as_spin(s)
    c = (spin.two_s + 2) / spin.two_s
    rho = np.asarray(rho, dtype=float)
    out = (1 - f_star(rho)) / (1 - c * rho)
    return float(out) if out.ndim == 0 else out


def minimize_on_negative(func, points: int = GRID_POINTS, xtol: float = 1e-12) -> tuple[float, float]:
    """(min, argmin) of func over [-1, 0): dense grid, then golden section inside the best bracket."""
    grid = np.linspace(-1.0, 0.0, points + 1)[:-1]
    values = func(grid)
    k = int(np.argmin(values))
    if 0 < k < points - 1:
        lo, mid, hi = grid[k - 1], grid[k], grid[k + 1]
        if values[k] < values[k - 1] and values[k] < values[k + 1]:
            res = minimize_scalar(lambda r: float(func(r)), bracket=(lo, mid, hi), method="golden",
                                  tol=xtol, options={"xtol": xtol})
            if res.fun <= values[k]:
                return float(res.fun), float(res.x)
    return float(values[k]), float(grid[k])


def alpha_bov() -> tuple[float, float]:
    return minimize_on_negative(g_ratio)


def alpha_gp(s) -> tuple[float, float]:
    spin = as_spin(s)
    return minimize_on_negative(lambda r: f_s(r, spin))


def alpha_lieb(s, bov: float | None = None) -> float:
    spin = as_spin(s)
    bov = alpha_bov()[0] if bov is None else bov
    return (spin.s / (spin.s + 1)) ** 2 * bov


def alpha_star(s) -> float:
    spin = as_spin(s)
    return spin.two_s / (spin.two_s + 1)


@dataclass(frozen=True)
class RatioRow:
    two_s: int
    alpha_star: float
    alpha_lieb: float
    alpha_gp: float
    argmin_rho: float


@dataclass
class RatioTable:
    alpha_bov: float
    alpha_bov_argmin: float
    rows: list[RatioRow] = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)

    COLUMNS = ("two_s", "alpha_star", "alpha_lieb", "alpha_gp", "argmin_rho")

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(self.COLUMNS)
        out.writerow(["bov", "", "", f"{self.alpha_bov:.6g}", f"{self.alpha_bov_argmin:.6g}"])
        for row in self.rows:
            out.writerow([row.two_s] + [f"{getattr(row, c):.6g}" for c in self.COLUMNS[1:]])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "alpha_bov": self.alpha_bov,
            "alpha_bov_argmin": self.alpha_bov_argmin,
            "rows": [asdict(r) for r in self.rows],
            "thresholds": self.thresholds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def first_two_s_reaching(fraction: float, which: str = "gp", limit: int = 4096) -> int | None:
    """Smallest 2S at which alpha_GP (or alpha_L) reaches ``fraction`` * alpha_BOV."""
    bov = alpha_bov()[0]
    if which == "lieb":
        # (S/(S+1))^2 >= fraction  <=>  S >= r / (1 - r) with r = sqrt(fraction)
        r = math.sqrt(fraction)
        two_s = max(1, math.ceil(2 * r / (1 - r) - 1e-9))
        while alpha_lieb(as_spin(two_s / 2), bov) < fraction * bov:
            two_s += 1
        return two_s
    if which != "gp":
        raise ValueError("which must be 'gp' or 'lieb'")
    for two_s in range(1, limit + 1):
        if alpha_gp(as_spin(two_s / 2))[0] >= fraction * bov:
            return two_s
    return None


def ratio_table(two_s_max: int, fraction: float = 0.99) -> RatioTable:
    if two_s_max < 1:
        raise ValueError("2S_max must be >= 1")
    bov, bov_rho = alpha_bov()
    rows = []
    for two_s in range(1, two_s_max + 1):
        spin = as_spin(two_s / 2)
        gp, rho = alpha_gp(spin)
        rows.append(RatioRow(two_s, alpha_star(spin), alpha_lieb(spin, bov), gp, rho))
    thresholds = {
        "fraction": fraction,
        "two_s_gp": first_two_s_reaching(fraction, "gp"),
        "two_s_lieb": first_two_s_reaching(fraction, "lieb"),
    }
    return RatioTable(bov, bov_rho, rows, thresholds)


@dataclass
class ChainReport:
    checks: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    @property
    def violations(self) -> list[dict]:
        return [c for c in self.checks if not c["ok"]]

    def add(self, name: str, two_s: int, margins: np.ndarray, rhos: np.ndarray | None = None):
        margins = np.atleast_1d(margins)
        k = int(np.argmin(margins))
        self.checks.append({
            "check": name,
            "two_s": two_s,
            "ok": bool(margins[k] > 0),
            "min_margin": float(margins[k]),
            "worst_rho": None if rhos is None else float(rhos[k]),
        })


def verify_chain(two_s_max: int, grid_points: int = 1000) -> ChainReport:
    """Pointwise (S/(S+1))^2 g < f_S < f_{S+1} < g on [-1, -1e-6] and the minimised chain."""
    rhos = np.linspace(-1.0, -1e-6, grid_points)
    g = g_ratio(rhos)
    bov = alpha_bov()[0]
    report = ChainReport()
    previous = None
    for two_s in range(1, two_s_max + 1):
        spin = as_spin(two_s / 2)
        fs = f_s(rhos, spin)
        fs_next = f_s(rhos, as_spin(two_s / 2 + 1))
        report.add("lieb_g < f_S", two_s, fs - (spin.s / (spin.s + 1)) ** 2 * g, rhos)
        report.add("f_S < f_S+1", two_s, fs_next - fs, rhos)
        report.add("f_S+1 < g", two_s, g - fs_next, rhos)
        gp = alpha_gp(spin)[0]
        lieb = alpha_lieb(spin, bov)
        report.add("alpha_L < alpha_GP", two_s, np.array([gp - lieb]))
        report.add("alpha_GP < alpha_BOV", two_s, np.array([bov - gp]))
        report.add("alpha_GP(S) < alpha_GP(S+1)", two_s, np.array([alpha_gp(as_spin(two_s / 2 + 1))[0] - gp]))
        if previous is not None:
            report.add("alpha_GP increasing in 2S", two_s, np.array([gp - previous]))
        previous = gp
    return report
