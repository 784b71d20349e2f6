import math
from itertools import combinations

import numpy as np
import pytest
from scipy.stats import binom

from oracles import brute_deficient
from spreadcode.errors import BudgetExceeded
from spreadcode.layout import layout_for
from spreadcode.resilience import (
    availability,
    availability_csv,
    bandwidth_csv,
    compare_bandwidth,
    mds_availability,
    msr_download,
    rho_exhaustive,
    rho_sampled,
    rho_table,
    rho_table_sampled,
)


@pytest.fixture(scope="module")
def table21(psrc21):
    return rho_table(psrc21)


def test_rho_exhaustive_matches_brute_force(psrc21):
    for x in (3, 4, 5, 6):
        deficient, rho = rho_exhaustive(psrc21, x)
        assert deficient == brute_deficient(psrc21.node_bases, 6, x)
        assert rho == 1 - deficient / math.comb(21, x)
    assert rho_exhaustive(psrc21, 21) == (0, 1.0)


def test_frozen_deficient_counts(table21):
    # Values produced by the brute-force oracle above.
    assert table21.deficient[:7] == [1, 21, 210, 210, 105, 21, 0]
    assert table21.total[5] == 20349


def test_gf2_rank_counts_differ_from_real_rank(psrc21):
    # Rank over the rationals undercounts GF(2) deficiency: 200 vs 210 triples.
    real = {}
    for x in (3, 5):
        real[x] = sum(
            np.linalg.matrix_rank(np.array(
                [[v >> j & 1 for j in range(6)] for i in s for v in psrc21.node_bases[i]],
                dtype=float)) < 6
            for s in combinations(range(21), x))
    assert real == {3: 200, 5: 17}
    assert rho_exhaustive(psrc21, 3)[0] == 210
    assert rho_exhaustive(psrc21, 5)[0] == 21


def test_rho_table_invariants(table21):
    rho = table21.rho
    assert all(r == 0 for r in rho[:3])
    assert rho[21] == 1.0
    assert all(a <= b for a, b in zip(rho, rho[1:]))


@pytest.mark.parametrize("B,alpha", [(4, 2), (6, 3), (8, 4)])
def test_k2_layouts_are_mds(B, alpha):
    t = rho_table(layout_for(B, alpha))
    assert t.rho[1] == 0.0 and all(r == 1.0 for r in t.rho[2:])


def test_workers_give_identical_results(psrc21, table21):
    assert rho_table(psrc21, workers=3).deficient == table21.deficient
    assert rho_exhaustive(psrc21, 4, workers=2) == rho_exhaustive(psrc21, 4)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        rho_exhaustive(layout_for(8, 2), 10)
    with pytest.raises(BudgetExceeded):
        rho_table(layout_for(8, 2))


def test_rho_sampled_below_k_is_exact(psrc21):
    est = rho_sampled(psrc21, 2, 1000, seed=1)
    assert est.estimate == 0.0 and est.samples == 0


def test_rho_sampled_deterministic(psrc21):
    assert rho_sampled(psrc21, 4, 5000, seed=9) == rho_sampled(psrc21, 4, 5000, seed=9)


def test_rho_sampled_agrees_with_exhaustive(psrc21):
    exact = rho_exhaustive(psrc21, 5)[1]
    big = rho_sampled(psrc21, 5, 100_000, seed=2024)
    assert big.covers(exact)
    hits = sum(rho_sampled(psrc21, 4, 4000, seed=s).covers(rho_exhaustive(psrc21, 4)[1])
               for s in range(100))
    assert hits >= 93


def test_rho_sampled_uses_wilson_for_rare_events(psrc21):
    est = rho_sampled(psrc21, 5, 200, seed=0)
    assert est.method == "wilson"
    assert est.ci_low <= est.estimate <= est.ci_high <= 1.0


def test_sampled_table_on_85_nodes():
    layout = layout_for(8, 2)
    t = rho_table_sampled(layout, 2000, seed=3)
    assert t.rho[:4] == [0.0] * 4 and t.rho[85] == 1.0
    assert t.rho[30] == 1.0


def test_mds_curve_is_binomial_survival():
    curve = mds_availability(21, 3)
    for p, v in curve:
        assert v == pytest.approx(binom.sf(2, 21, p), abs=1e-12)


def test_availability_shape(table21):
    psrc = availability(table21)
    mds = mds_availability(21, 3)
    vals = psrc.values()
    assert vals[0] == 0.0 and vals[-1] == 1.0
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
    assert all(a <= b + 1e-15 for a, b in zip(vals, mds.values()))
    # Direct sum with scipy weights as an independent route.
    for p, v in psrc.points[::10]:
        direct = sum(r * binom.pmf(x, 21, p) for x, r in enumerate(table21.rho))
        assert v == pytest.approx(direct, abs=1e-12)


def test_availability_csv(table21):
    lines = availability_csv(table21).splitlines()
    assert lines[0] == "p,objup_psrc,objup_mds"
    assert len(lines) == 102
    assert table21.to_csv().splitlines()[0] == "x,deficient,total,rho"


def test_msr_download():
    assert msr_download(6, 3, 3) == 6
    assert msr_download(6, 3, 4) == 4
    assert msr_download(6, 3, 2) is None


def test_compare_bandwidth(psrc21):
    rows = compare_bandwidth(psrc21, [2, 3, 4])
    assert rows == [(2, None, 4), (3, 6, 3), (4, 4, 3)]
    assert bandwidth_csv(rows).splitlines() == [
        "d,msr_units,psrc_units", "2,n/a,4", "3,6,3", "4,4,3"]
