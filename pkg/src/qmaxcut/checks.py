"""Invariant suites run by ``qmaxcut verify``.

Each check returns a small JSON-friendly record; nothing here depends on
wall-clock time, so identical seeds give identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import classical, exact, gadget, graph, ratios, rounding, sdp, spin


@dataclass
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "name": self.name, "ok": self.ok, "detail": self.detail}


class _Suite:
    def __init__(self, name: str):
        self.name = name
        self.results: list[CheckResult] = []

    def check(self, name: str, ok, **detail):
        self.results.append(CheckResult(self.name, name, bool(ok), detail))


def _graph_suite(seed: int) -> _Suite:
    s = _Suite("graph")
    for spec in ("single_edge:2", "cycle:5:1.5", "complete:4", f"random:6:0.5:2:{seed}"):
        g = graph.generate(spec)
        s.check(f"round trip {spec}", graph.parse_instance(g.render()) == g)
    s.check("W(G0) = 1", graph.total_weight(graph.single_edge()) == 1.0)
    try:
        graph.parse_instance("2\n0 1 -1\n")
        s.check("negative weight rejected", False)
    except graph.InstanceError:
        s.check("negative weight rejected", True)
    return s


def _spin_suite() -> _Suite:
    s = _Suite("spin")
    rng = np.random.default_rng(7)
    for two_s in range(1, 5):
        sx, sy, sz = spin.spin_matrices(two_s / 2)
        comm = float(np.abs(sx @ sy - sy @ sx - 1j * sz).max())
        cas = float(np.abs(spin.spin_matrices(two_s / 2).casimir() - spin.as_spin(two_s / 2).casimir * np.eye(two_s + 1)).max())
        omega = classical.random_unit_vectors(rng, 1)[0]
        bloch = spin.spin_expectation(two_s / 2, spin.coherent_state(two_s / 2, omega))
        coh = float(np.abs(bloch - two_s / 2 * omega).max())
        s.check(f"algebra 2S={two_s}", max(comm, cas, coh) < 1e-12, commutator=comm, casimir=cas, coherent=coh)
    return s


def _exact_suite(seed: int) -> _Suite:
    s = _Suite("exact")
    g0 = graph.single_edge()
    for two_s in (1, 2, 3):
        value = exact.qmaxcut_value(g0, two_s / 2, seed=seed)
        s.check(f"QMaxCut(G0) 2S={two_s}", abs(value - (2 + 2 / two_s)) < 1e-8, value=value)
    k3 = graph.complete(3)
    qmc = exact.qmaxcut_value(k3, 0.5, seed=seed)
    qha = exact.qha_value(k3, 0.5, seed=seed)
    s.check("complement identity K3", abs(qmc + qha - graph.total_weight(k3)) < 1e-10, qmaxcut=qmc, qha=qha)
    return s


def _classical_suite(seed: int) -> _Suite:
    s = _Suite("classical")
    value, _ = classical.prod_local_search(graph.complete(3), seed=seed)
    s.check("Prod(K3) = 9/4", abs(value - 2.25) < 1e-9, value=value)
    for k in range(3):
        g = graph.random_graph(5, 0.7, 1.0, seed + k)
        local, _ = classical.prod_local_search(g, seed=seed)
        bf = classical.prod_brute_force(g)
        s.check(f"local search vs brute force #{k}", abs(local - bf) < 1e-3 and local <= bf + 1e-9,
                local=local, brute_force=bf)
    return s


def _sdp_suite(seed: int) -> _Suite:
    s = _Suite("sdp")
    mc = sdp.sdp_value_mc(graph.complete(3), seed=seed)
    s.check("SDP_MC(K3) = 9/4", abs(mc - 2.25) < 1e-7, value=mc)
    for k in range(3):
        g = graph.random_graph(7, 0.6, 1.0, seed + 100 + k)
        for two_s in (1, 2):
            c = sdp.spin_coefficient(two_s / 2)
            lhs = sdp.sdp_value_s(g, two_s / 2, seed=seed + 1)
            rhs = (1 - c) * graph.total_weight(g) + c * sdp.sdp_value_mc(g, seed=seed + 2)
            s.check(f"affine identity #{k} 2S={two_s}", abs(lhs - rhs) <= 1e-7 * max(1.0, lhs), sdp_s=lhs, affine=rhs)
    try:
        rep = sdp.verify_relaxation(graph.random_graph(5, 0.6, 1.0, seed + 200), 0.5, seed=seed)
        s.check("relaxation holds", True, gap=rep["gap"])
    except AssertionError as exc:
        s.check("relaxation holds", False, error=str(exc))
    return s


def _rounding_suite(seed: int) -> _Suite:
    s = _Suite("rounding")
    mean, se = rounding.estimate_overlap_mean(-1.0, 1000, seed)
    s.check("antipodal overlap", abs(mean + 1) < 1e-12 and se < 1e-12, mean=mean)
    mean, se = rounding.estimate_overlap_mean(-0.5, 100_000, seed)
    target = ratios.f_star(-0.5)
    s.check("overlap law at -0.5", abs(mean - target) <= 4 * se, mean=mean, std_error=se, expected=target)
    res = rounding.end_to_end(graph.single_edge(), 1.5, "gp_s", trials=20, seed=seed)
    s.check("G0 realised ratio 3/4", abs(res.value - 2) < 1e-12 and abs(res.ratio - 0.75) < 1e-8, ratio=res.ratio)
    return s


def _ratio_suite() -> _Suite:
    s = _Suite("ratios")
    bov, _ = ratios.alpha_bov()
    gp, _ = ratios.alpha_gp(0.5)
    s.check("alpha_BOV", 0.955 <= bov <= 0.957, value=bov)
    s.check("alpha_GP(1/2)", 0.496 <= gp <= 0.500, value=gp)
    worst = max(abs(ratios.f_s(-1.0, k / 2) - k / (k + 1)) for k in range(1, 11))
    s.check("f_S(-1) = 2S/(2S+1)", worst < 1e-12, max_error=worst)
    s.check("2F1(1) = 3 pi / 8", ratios.hyp2f1_half(1.0) == 3 * math.pi / 8)
    chain = ratios.verify_chain(10)
    s.check("inequality chain 2S<=10", chain.ok, violations=chain.violations)
    return s


def _gadget_suite() -> _Suite:
    s = _Suite("gadget")
    for two_s in (1, 2):
        half = two_s / 2
        norm = gadget.projected_h2_norm(half)
        _, fit = gadget.effective_hamiltonian(half)
        rows = gadget.spectral_convergence(half, [1e2, 1e3, 1e4])
        errs = [r.spec_error for r in rows]
        scaled = [r.scaled_error for r in rows]
        s.check(f"P H2 P = 0, 2S={two_s}", norm <= 1e-12, norm=norm)
        s.check(f"Heisenberg fit 2S={two_s}", fit.residual <= 1e-10 and fit.coupling > 0,
                coupling=fit.coupling, residual=fit.residual,
                coupling_ratio=fit.coupling / gadget.reference_coupling(half))
        s.check(f"spectral convergence 2S={two_s}",
                all(b < a for a, b in zip(errs, errs[1:])) and max(scaled) < 3 * min(scaled),
                errors=errs, scaled=scaled)
    return s


def instance_suite(g: graph.WeightedGraph, two_s: int, seed: int) -> _Suite:
    """Lieb sandwich and relaxation bound on a user instance."""
    s = _Suite("instance")
    half = spin.as_spin(two_s / 2)
    cha = classical.cha_value(g, seed=seed)
    qha = exact.qha_value(g, half, seed=seed)
    factor = ((half.s + 1) / half.s) ** 2
    s.check("Lieb sandwich", factor * cha - 1e-7 <= qha <= cha + 1e-7, cha=cha, qha=qha)
    qmc = graph.total_weight(g) - qha
    sdp_s = sdp.sdp_value_s(g, half, seed=seed)
    s.check("SDP relaxation", sdp_s >= qmc - 1e-7, sdp_s=sdp_s, qmaxcut=qmc)
    return s


def run_all(seed: int = 0) -> list[CheckResult]:
    suites = [
        _graph_suite(seed),
        _spin_suite(),
        _exact_suite(seed),
        _classical_suite(seed),
        _sdp_suite(seed),
        _rounding_suite(seed),
        _ratio_suite(),
        _gadget_suite(),
    ]
    return [r for suite in suites for r in suite.results]
