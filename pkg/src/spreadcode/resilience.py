"""Static resilience: rho_x tables, availability curves and repair bandwidth.

``rho[x]`` is the fraction of x-node subsets whose pooled basis vectors have
full rank B, i.e. from which the object can be decoded.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import BudgetExceeded
from .repair import plan_min_download

ENUMERATION_BUDGET = 1 << 22
Z95 = 1.959963984540054


@dataclass
class RhoTable:
    n: int
    k: int
    B: int
    deficient: list
    total: list
    method: str = "exhaustive"

    @property
    def rho(self):
        return [1.0 - d / t if t else 0.0 for d, t in zip(self.deficient, self.total)]

    def unretrievable(self, x):
        return self.deficient[x] / self.total[x]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "deficient", "total", "rho"])
        for x, (d, t, r) in enumerate(zip(self.deficient, self.total, self.rho)):
            w.writerow([x, d, t, repr(r)])
        return buf.getvalue()


def _layout_args(layout):
    return list(layout.flat_vectors), layout.n, layout.alpha, layout.B


def _count_range(args):
    vecs, n, alpha, width, x, lo, hi = args
    if x is None:
        return kernels.count_deficient_all(vecs, n, alpha, width, lo, hi)
    return kernels.count_deficient(vecs, n, alpha, width, x, lo, hi)


def _partitioned(layout, x, workers):
    vecs, n, alpha, width = _layout_args(layout)
    if workers <= 1:
        return _count_range((vecs, n, alpha, width, x, 0, n))
    # One task per smallest-element value; results merge by plain summation.
    tasks = [(vecs, n, alpha, width, x, lo, lo + 1) for lo in range(n)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_count_range, tasks))
    if x is None:
        return [sum(col) for col in zip(*parts)]
    return sum(parts)


def rho_exhaustive(layout, x, budget=ENUMERATION_BUDGET, workers=1):
    """Exact (deficient subset count, rho_x) by enumeration."""
    total = math.comb(layout.n, x)
    if total > budget:
        raise BudgetExceeded(
            f"C({layout.n},{x}) = {total} subsets exceeds budget {budget}; use rho_sampled")
    if x == 0:
        deficient = 1
    else:
        deficient = _partitioned(layout, x, workers)
    return deficient, 1.0 - deficient / total


def rho_table(layout, budget=ENUMERATION_BUDGET, workers=1):
    """Exact table for every x in 0..n; every C(n,x) must fit the budget."""
    n = layout.n
    totals = [math.comb(n, x) for x in range(n + 1)]
    if max(totals) > budget:
        raise BudgetExceeded(
            f"largest C({n},x) = {max(totals)} exceeds budget {budget}; use rho_table_sampled")
    deficient = list(_partitioned(layout, None, workers))
    deficient[0] = 1
    return RhoTable(n, layout.k, layout.B, deficient, totals)


@dataclass(frozen=True)
class SampledRho:
    x: int
    samples: int
    deficient: int
    estimate: float
    ci_low: float
    ci_high: float
    method: str

    def covers(self, value):
        return self.ci_low <= value <= self.ci_high


def _interval(successes, trials):
    p = successes / trials
    failures = trials - successes
    if min(successes, failures) < 5:
        denom = 1 + Z95 ** 2 / trials
        centre = (p + Z95 ** 2 / (2 * trials)) / denom
        half = Z95 * math.sqrt(p * (1 - p) / trials + Z95 ** 2 / (4 * trials ** 2)) / denom
        return max(0.0, centre - half), min(1.0, centre + half), "wilson"
    half = Z95 * math.sqrt(p * (1 - p) / trials)
    return max(0.0, p - half), min(1.0, p + half), "normal"


def sample_subsets(n, x, samples, rng):
    """``samples`` uniform x-subsets of range(n) as an int array (one row each)."""
    return np.argsort(rng.random((samples, n)), axis=1)[:, :x]


def rho_sampled(layout, x, samples, seed, chunk=100_000):
    """Monte Carlo estimate of rho_x with a 95% confidence interval."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if x < layout.k:
        return SampledRho(x, 0, 0, 0.0, 0.0, 0.0, "exact")
    if x >= layout.n:
        return SampledRho(x, 0, 0, 1.0, 1.0, 1.0, "exact")
    vecs, n, alpha, width = _layout_args(layout)
    rng = np.random.default_rng(seed)
    deficient = 0
    left = samples
    while left:
        m = min(chunk, left)
        subsets = sample_subsets(n, x, m, rng)
        deficient += kernels.count_deficient_samples(vecs, n, alpha, width, subsets.tolist())
        left -= m
    lo, hi, how = _interval(samples - deficient, samples)
    return SampledRho(x, samples, deficient, 1 - deficient / samples, lo, hi, how)


def rho_table_sampled(layout, samples, seed):
    """Sampled rho table; x < k and x = n are exact, the rest estimated."""
    n = layout.n
    deficient = []
    totals = []
    for x in range(n + 1):
        if x < layout.k:
            deficient.append(math.comb(n, x))
            totals.append(math.comb(n, x))
        elif x == n:
            deficient.append(0)
            totals.append(1)
        else:
            est = rho_sampled(layout, x, samples, seed + x)
            deficient.append(est.deficient)
            totals.append(est.samples)
    return RhoTable(n, layout.k, layout.B, deficient, totals,
                    method=f"sampled({samples},{seed})")


@dataclass
class AvailabilityCurve:
    points: list  # (p_node, obj_up)

    def __iter__(self):
        return iter(self.points)

    def values(self):
        return [v for _, v in self.points]


DEFAULT_GRID = tuple(i / 100 for i in range(101))


def _binom_weight(n, x, p):
    if p <= 0.0:
        return 1.0 if x == 0 else 0.0
    if p >= 1.0:
        return 1.0 if x == n else 0.0
    logw = (math.lgamma(n + 1) - math.lgamma(x + 1) - math.lgamma(n - x + 1)
            + x * math.log(p) + (n - x) * math.log1p(-p))
    return math.exp(logw)


def objup(rho, n, k, p):
    up = math.fsum(sorted(rho[x] * _binom_weight(n, x, p) for x in range(k, n + 1)))
    if up <= 0.5:
        return up
    # Near 1 the complement is the accurate quantity; summing it keeps the curve monotone.
    down = math.fsum(sorted((1.0 - (rho[x] if x >= k else 0.0)) * _binom_weight(n, x, p)
                            for x in range(n + 1)))
    return min(1.0, max(0.0, 1.0 - down))


def availability(table, grid=DEFAULT_GRID):
    rho = table.rho
    return AvailabilityCurve([(p, objup(rho, table.n, table.k, p)) for p in grid])


def mds_availability(n, k, grid=DEFAULT_GRID):
    ones = [0.0] * k + [1.0] * (n + 1 - k)
    return AvailabilityCurve([(p, objup(ones, n, k, p)) for p in grid])


def availability_csv(table, grid=DEFAULT_GRID):
    psrc = availability(table, grid)
    mds = mds_availability(table.n, table.k, grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "objup_psrc", "objup_mds"])
    for (p, a), (_, b) in zip(psrc, mds):
        w.writerow([repr(p), repr(a), repr(b)])
    return buf.getvalue()


def msr_download(B, k, d):
    """Total MSR repair download B*d / (k*(d-k+1)); None when d < k."""
    if d < k:
        return None
    return Fraction(B * d, k * (d - k + 1))


def compare_bandwidth(layout, ds, failed=1):
    rows = []
    for d in ds:
        msr = msr_download(layout.B, layout.k, d)
        psrc = plan_min_download(layout, failed, d).download_units if d >= 2 else None
        rows.append((d, msr, psrc))
    return rows


def _fmt_units(v):
    if v is None:
        return "n/a"
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{float(v):g}"
    return str(int(v))


def bandwidth_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "msr_units", "psrc_units"])
    for d, msr, psrc in rows:
        w.writerow([d, _fmt_units(msr), _fmt_units(psrc)])
    return buf.getvalue()
