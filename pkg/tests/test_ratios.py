import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import hyp2f1

from oracles import pochhammer_series
from qmaxcut.ratios import (
    RatioTable,
    alpha_bov,
    alpha_gp,
    alpha_lieb,
    alpha_star,
    f_s,
    f_star,
    first_two_s_reaching,
    g_ratio,
    hyp2f1_half,
    ratio_table,
    verify_chain,
)


def test_hypergeometric_values():
    assert hyp2f1_half(0.0) == 1.0
    assert hyp2f1_half(1.0) == 3 * math.pi / 8
    assert abs(hyp2f1_half(0.25) - pochhammer_series(0.5, 0.5, 2.5, 0.25)) < 1e-13


def test_hypergeometric_against_scipy():
    z = np.linspace(0, 1, 4001)
    assert np.abs(hyp2f1_half(z) - hyp2f1(0.5, 0.5, 2.5, z)).max() < 1e-12


def test_hypergeometric_continuous_across_branch():
    lo, hi = hyp2f1_half(0.5), hyp2f1_half(np.nextafter(0.5, 1))
    assert abs(lo - hi) < 1e-14


def test_hypergeometric_domain():
    for z in (-0.1, 1.1, math.nan):
        with pytest.raises(ValueError):
            hyp2f1_half(z)


def test_f_star_endpoints_and_domain():
    assert f_star(0.0) == 0.0
    assert f_star(1.0) == 1.0
    assert f_star(-1.0) == -1.0
    with pytest.raises(ValueError):
        f_star(1.01)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1))
def test_f_star_odd(rho):
    assert abs(f_star(-rho) + f_star(rho)) < 1e-14


def test_f_star_below_identity():
    rho = np.linspace(1e-6, 1 - 1e-6, 2000)
    vals = f_star(rho)
    assert np.all(vals > 0)
    assert np.all(vals < rho)


def test_alpha_bov():
    value, rho = alpha_bov()
    assert 0.955 <= value <= 0.957
    assert -1 < rho < 0
    assert value < 1
    assert abs(g_ratio(-1.0) - 1) < 1e-15
    assert abs(g_ratio(-1e-9) - 1) < 1e-8


def test_alpha_gp_half():
    value, rho = alpha_gp(0.5)
    assert 0.496 <= value <= 0.500
    assert -1 < rho < 0


@pytest.mark.parametrize("two_s", range(1, 11))
def test_f_s_endpoints(two_s):
    s = two_s / 2
    assert abs(f_s(-1.0, s) - two_s / (two_s + 1)) < 1e-12
    assert f_s(0.0, s) == 1.0
    value, rho = alpha_gp(s)
    assert value <= two_s / (two_s + 1) + 1e-15
    assert -1 < rho < 0


def test_minimiser_is_a_minimum():
    value, rho = alpha_gp(1)
    grid = np.linspace(-1, -1e-9, 200_001)
    assert value <= f_s(grid, 1).min() + 1e-12
    assert abs(f_s(rho, 1) - value) < 1e-15


def test_large_spin_approaches_bov():
    assert abs(alpha_gp(100)[0] - alpha_bov()[0]) < 0.01


def test_lieb_and_star():
    bov = alpha_bov()[0]
    assert alpha_star(0.5) == 0.5
    assert alpha_star(1.5) == 0.75
    assert alpha_lieb(0.5) == pytest.approx(bov / 9, rel=1e-15)
    assert abs(alpha_lieb(0.5) - 0.1063) < 1e-4
    assert alpha_lieb(1) < alpha_lieb(2)


def test_monotone_in_spin():
    gps = [alpha_gp(k / 2)[0] for k in range(1, 16)]
    lbs = [alpha_lieb(k / 2) for k in range(1, 16)]
    assert all(b > a for a, b in zip(gps, gps[1:]))
    assert all(b > a for a, b in zip(lbs, lbs[1:]))
    assert max(gps) < alpha_bov()[0]


def test_chain():
    report = verify_chain(10)
    assert report.ok, report.violations
    names = {c["check"] for c in report.checks}
    assert {"lieb_g < f_S", "f_S < f_S+1", "f_S+1 < g", "alpha_L < alpha_GP"} <= names
    assert alpha_gp(0.5)[0] < alpha_gp(1)[0]


def test_chain_reports_violations():
    from qmaxcut.ratios import ChainReport

    rep = ChainReport()
    rep.add("demo", 3, np.array([0.1, -0.2]), np.array([-0.9, -0.5]))
    assert not rep.ok
    assert rep.violations[0]["worst_rho"] == -0.5 and rep.violations[0]["two_s"] == 3


def test_thresholds():
    assert first_two_s_reaching(0.99, "lieb") == 397
    two_s = first_two_s_reaching(0.99, "gp")
    bov = alpha_bov()[0]
    assert alpha_gp(two_s / 2)[0] >= 0.99 * bov > alpha_gp((two_s - 1) / 2)[0]


def test_table_exports():
    table = ratio_table(4)
    assert isinstance(table, RatioTable)
    rows = list(csv.reader(io.StringIO(table.to_csv())))
    assert rows[0] == ["two_s", "alpha_star", "alpha_lieb", "alpha_gp", "argmin_rho"]
    assert rows[1][0] == "bov" and rows[1][3] == "0.956337"
    assert rows[2][:4] == ["1", "0.5", "0.10626", "0.498767"]
    data = json.loads(table.to_json())
    assert len(data["rows"]) == 4
    gps = [r["alpha_gp"] for r in data["rows"]]
    assert gps == sorted(gps)
    with pytest.raises(ValueError):
        ratio_table(0)
