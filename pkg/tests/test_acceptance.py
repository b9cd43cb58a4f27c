"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (see conftest) before asserting.
"""

import math
import os
import time

import mpmath
import numpy as np
from scipy import special
from scipy import stats as sps

from respart import builtin
from respart.asymptotics import (
    critical_lower_bound,
    fraction_ratio,
    gumbel_expect,
    gumbel_order_cdf,
)
from respart.boltzmann import (
    expected_multiplicity,
    iter_blocks,
    sample_conditioned_block,
    solve_q,
)
from respart.experiments import ExperimentConfig, run_verify_theorem1
from respart.graphical import (
    fraction_scaling_table,
    is_graphical_erdos_gallai,
    is_graphical_nash_williams,
    is_realizable_bruteforce,
)
from respart.partitions import count, count_with_max_parts, enumerate_partitions

BUILTINS = ["identity", "linear:2", "linear:3", "binary", "smooth_cutoff"]
WORKERS = max(1, min(4, os.cpu_count() or 1))


def test_criterion_01_criterion_equivalence(criterion):
    t0 = time.perf_counter()
    disagreements = checked = brute = 0
    for name in ["identity", "binary", "linear:2", "linear:3"]:
        r = builtin(name)
        for n in range(0, 41, 2):
            for p in enumerate_partitions(n, r):
                checked += 1
                disagreements += is_graphical_nash_williams(p) != is_graphical_erdos_gallai(p)
    # identity enumerates every partition, so this covers every even-sum sequence up to 16
    for n in range(0, 17, 2):
        for p in enumerate_partitions(n, builtin("identity")):
            if len(p) <= 8:
                brute += 1
                truth = is_realizable_bruteforce(p)
                disagreements += (is_graphical_nash_williams(p) != truth) + (is_graphical_erdos_gallai(p) != truth)
    elapsed = time.perf_counter() - t0
    ok = disagreements == 0 and elapsed < 300
    criterion(
        "1 criterion equivalence",
        ok,
        f"checked={checked} brute={brute} disagreements={disagreements} {elapsed:.1f}s",
    )
    assert ok


def test_criterion_02_solver(criterion):
    n = 10**4
    ref = math.pi / math.sqrt(6 * n)
    rel = abs(solve_q(n, builtin("identity")).alpha - ref) / ref
    worst = 0.0
    for name in BUILTINS:
        for n in (10**3, 10**4):
            worst = max(worst, solve_q(n, builtin(name)).alpha / (math.pi / math.sqrt(6 * n)))
    ok = rel <= 0.05 and worst <= 1.10
    criterion("2 size-equation solver", ok, f"identity rel err={rel:.4f} max alpha/(pi/sqrt(6n))={worst:.4f}")
    assert ok


def test_criterion_03_gumbel_numerics(criterion):
    worst_moment = 0.0
    for k in (1, 2, 5, 10, 100):
        psi, psi1, psi2 = special.digamma(k), special.polygamma(1, k), special.polygamma(2, k)
        closed = {1: -psi, 2: psi**2 + psi1, 3: -(psi**3 + 3 * psi * psi1 + psi2)}
        for power, value in closed.items():
            got = gumbel_expect(k, lambda x, p=power: x**p)
            worst_moment = max(worst_moment, abs(got - value) / abs(value))
    worst_cdf = 0.0
    for k in (1, 2, 5, 10, 50):
        for y in np.linspace(-3, 10, 50):
            ref = float(mpmath.gammainc(k, mpmath.e ** (-float(y)), mpmath.inf, regularized=True))
            worst_cdf = max(worst_cdf, abs(gumbel_order_cdf(k, float(y)) - ref))
    ok = worst_moment <= 1e-8 and worst_cdf <= 1e-10
    criterion("3 Gumbel numerics", ok, f"max moment rel err={worst_moment:.2e} max cdf abs err={worst_cdf:.2e}")
    assert ok


def test_criterion_04_binary_extreme_part_trend(criterion):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(
        "verify theorem1", "binary", (50, 100, 200, 400), k=1, samples=10**5, seed=1, window=0.02, mode="sampled"
    )
    report = run_verify_theorem1(cfg)
    tvs = [row["tv"] for row in report.rows]
    elapsed = time.perf_counter() - t0
    ok = all(b < a for a, b in zip(tvs, tvs[1:])) and elapsed < 600
    criterion("4 binary X1 vs 2^(Y1-1) trend", ok, "tv=" + ", ".join(f"{v:.5f}" for v in tvs) + f" {elapsed:.0f}s")
    assert ok


def test_criterion_05_graphical_fraction_scaling(criterion):
    ns = list(range(20, 61, 2))
    spreads, medians = {}, {}
    for name in ("identity", "linear:2"):
        scaled = [rep.scaled for rep in fraction_scaling_table(ns, builtin(name), workers=WORKERS)]
        spreads[name] = max(scaled) / min(scaled)
        medians[name] = float(np.median(scaled))
    magnitude = abs(math.log10(medians["identity"]) - math.log10(medians["linear:2"]))
    ok = all(s <= 2 for s in spreads.values()) and magnitude < 1
    criterion(
        "5 graphical fraction * sqrt(n) stability",
        ok,
        f"spread identity={spreads['identity']:.3f} linear:2={spreads['linear:2']:.3f} "
        f"median scaled {medians['identity']:.3f} vs {medians['linear:2']:.3f}",
    )
    assert ok


def test_criterion_06_linear_invariance(criterion):
    ratios = [fraction_ratio(100, builtin(f"linear:{m}")) for m in (1, 2, 3, 5)]
    spread = max(ratios) - min(ratios)
    ok = spread <= 1e-8 * abs(ratios[0])
    criterion("6 ratio linear invariance", ok, f"ratio={ratios[0]:.12f} spread={spread:.1e}")
    assert ok


def test_criterion_07_smooth_cutoff(criterion):
    n = 10**6
    smooth = fraction_ratio(n, builtin("smooth_cutoff"))
    ident = fraction_ratio(n, builtin("identity"))
    rel = abs(smooth - ident) / ident
    ok = rel <= 0.05
    criterion("7 smooth cutoff insensitivity", ok, f"smooth={smooth:.10f} identity={ident:.10f} rel={rel:.2e}")
    assert ok


def test_criterion_08_critical_lower_bound(criterion):
    worst = 0.0
    ok = True
    for n in (10**3, 10**4, 10**5, 10**6):
        diff = abs(critical_lower_bound(n, builtin("binary")) - n ** math.log(2) / 2)
        worst = max(worst, diff / math.log(n))
        ok = ok and diff <= 2 * math.log(n)
    zero = all(critical_lower_bound(n, builtin("identity")) == 0 for n in (3, 10**3, 10**6, 10**9))
    ok = ok and zero
    criterion("8 critical lower bound", ok, f"max |diff|/ln n={worst:.3f} identity zero={zero}")
    assert ok


def test_criterion_09_sampler_fidelity(criterion):
    n, samples = 10**4, 10**5
    params = solve_q(n, builtin("identity"))
    z = np.concatenate(list(iter_blocks(params, samples, seed=7)))
    worst_se = 0.0
    for j, m in enumerate(params.parts[:5]):
        mean = z[:, j].mean()
        se = z[:, j].std(ddof=1) / math.sqrt(samples)
        worst_se = max(worst_se, abs(mean - expected_multiplicity(params, m)) / se)
    size_err = abs((z @ params.parts_array).mean() - n) / n

    small = solve_q(10, builtin("identity"))
    accepted = sample_conditioned_block(small, samples, 0.0, seed=7, max_tries=10**8)
    support = [p.parts for p in enumerate_partitions(10, builtin("identity"))]
    index = {s: i for i, s in enumerate(support)}
    observed = np.zeros(len(support))
    for row in accepted:
        parts = tuple(m for m, c in sorted(zip(small.parts, row.tolist()), reverse=True) for _ in range(c))
        observed[index[parts]] += 1
    pvalue = sps.chisquare(observed).pvalue
    ok = worst_se <= 3 and size_err <= 0.02 and len(support) == 42 and pvalue > 0.01
    criterion(
        "9 sampler fidelity",
        ok,
        f"max |mean-E|/se={worst_se:.2f} size err={size_err:.4f} chi2 p={pvalue:.3f} over {len(support)} partitions",
    )
    assert ok


def test_criterion_10_counting_consistency(criterion):
    t0 = time.perf_counter()
    bad = []
    for name in BUILTINS:
        r = builtin(name)
        for n in range(0, 41):
            c = count(n, r)
            if c != sum(1 for _ in enumerate_partitions(n, r)) or count_with_max_parts(n, n, r) != c:
                bad.append((name, n))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    criterion("10 counting consistency", ok, f"mismatches={bad} {elapsed:.1f}s")
    assert ok
