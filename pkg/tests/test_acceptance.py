"""Acceptance criteria 1-9.

Each test prints one ``[criterion N] PASS|FAIL ...`` line (shown even under
output capture) and then asserts. Thresholds and runtime budgets are the
acceptance bars; oracles are independent of the code under test where the
criterion is derived.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from affmed.bench import ExperimentConfig, format_records, hardcase_config, run_experiment
from affmed.cli import main as cli_main
from affmed.instances import (DistributionSpec, breakdown_family, discrete_law, heavytailed_bound, moments,
                              quant_family, sample)
from affmed.median import MedianConfig, SlabConstraint, helly_feasibility_certificate, high_dim_median
from affmed.trimmed import brute_force_interval, directional_feasible_interval, window_size


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}", flush=True)
        return ok

    return emit


# 1. one-dimensional exactness ----------------------------------------------


def test_criterion_1_one_dimensional_exactness(report):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_end = worst_mid = 0.0
    for trial in range(500):
        k = int(rng.integers(1, 13))
        nu = (1 / 3, 1 / 6)[trial % 2]
        if trial % 4 < 2:
            Y = rng.standard_normal(k) * rng.uniform(0.1, 10)
        else:
            Y = rng.integers(-3, 4, k).astype(float)  # ties
        fast, slow = directional_feasible_interval(Y, nu), brute_force_interval(Y, nu)
        worst_end = max(worst_end, abs(fast.lo - slow.lo), abs(fast.hi - slow.hi))
        est = high_dim_median(Y[:, None], MedianConfig(nu=nu)).estimate[0]
        worst_mid = max(worst_mid, abs(est - slow.midpoint))
    elapsed = time.perf_counter() - t0
    ok = worst_end <= 1e-10 and worst_mid <= 1e-10 and elapsed < 10
    report(1, ok, f"endpoint err {worst_end:.2e}, midpoint err {worst_mid:.2e}, {elapsed:.1f}s")
    assert ok


# 2. existence and feasibility ----------------------------------------------


def _instance(rng, kind, n, d):
    if kind == 0:
        return rng.standard_normal((n, d)) @ rng.standard_normal((d, d)) + rng.standard_normal(d)
    if kind == 1:
        atoms = np.vstack([np.eye(d), np.zeros(d), np.full(d, 1.0 / d)])
        return atoms[rng.integers(0, d + 2, n)]
    r = int(rng.integers(1, d + 1))  # rank-deficient
    return rng.standard_normal((n, r)) @ rng.standard_normal((r, d))


def _hull_ok(rep, X):
    w = rep.hull_weights
    scale = 1.0 + float(np.abs(X).max())
    return (w.min() >= -1e-9 and abs(w.sum() - 1.0) <= 1e-9
            and np.abs(w @ X - rep.estimate).max() <= 1e-8 * scale)


def _helly_draws(rng, draws):
    failures = 0
    for _ in range(draws):
        d = int(rng.integers(1, 5))
        n = int(rng.integers(12 * d, 80))
        nu = 1 / (3 * d)
        X = rng.standard_normal((n, d))
        m = window_size(n, nu)
        cons = []
        for _ in range(d + 1):
            v = rng.standard_normal(d)
            v /= np.linalg.norm(v)
            order = np.argsort(X @ v, kind="stable")
            s = int(rng.integers(m, n + 1))
            a = int(rng.integers(0, n - s + 1))
            cons.append(SlabConstraint.from_subset(X, v, np.sort(order[a:a + s])))
        try:
            mu = helly_feasibility_certificate(X, cons, nu)
        except ValueError:
            failures += 1
            continue
        # independent recheck: the certificate point lies in every slab
        if any(abs(mu @ c.v - c.center) > c.halfwidth + 1e-9 for c in cons):
            failures += 1
    return failures


def test_criterion_2_existence_and_feasibility(report):
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    bad, worst = [], 0.0
    for trial in range(10_000):
        n, d = int(rng.integers(1, 201)), int(rng.integers(1, 9))
        X = _instance(rng, trial % 3, n, d)
        rep = high_dim_median(X, MedianConfig(seed=trial))
        worst = max(worst, rep.certified_outlyingness)
        if rep.certified_outlyingness > 2.1 or not _hull_ok(rep, X) or "iteration_limit" in rep.flags:
            bad.append((trial, n, d, rep.certified_outlyingness, rep.flags))
    helly_fail = _helly_draws(rng, 1000)
    elapsed = time.perf_counter() - t0
    ok = not bad and helly_fail == 0 and elapsed < 300
    report(2, ok, f"{len(bad)} bad of 10^4 (max outlyingness {worst:.3f}), "
                  f"{helly_fail} Helly failures of 10^3, {elapsed:.0f}s")
    assert ok, bad[:5]


# 3. d = 2 audit --------------------------------------------------------------


def _grid_worst_ratio(X, x, nu, step_deg=0.1):
    """Worst ``|<x,u> - mean_W| / (2 sigma_W)`` over contiguous windows and a 0.1 degree grid."""
    n = X.shape[0]
    th = np.radians(np.arange(0.0, 180.0, step_deg))
    U = np.stack([np.cos(th), np.sin(th)], axis=1)
    P = np.sort(X @ U.T, axis=0)  # (n, G)
    p = x @ U.T
    worst = 0.0
    for s in range(window_size(n, nu), n + 1):
        for a in range(n - s + 1):
            W = P[a:a + s]
            mu = W.mean(axis=0)
            sig = np.abs(W - mu).mean(axis=0)
            dev = np.abs(p - mu)
            tol = 1e-8 * (1.0 + np.abs(W).max(axis=0))  # zero-width slabs: equality up to rounding
            r = np.where(sig > tol, dev / (2 * np.where(sig > tol, sig, 1.0)), np.where(dev <= tol, 0.0, np.inf))
            worst = max(worst, float(r.max()))
    return worst


def test_criterion_3_planar_audit(report):
    rng = np.random.default_rng(303)
    t0 = time.perf_counter()
    worst = 0.0
    for trial in range(100):
        n = int(rng.integers(3, 61))
        X = _instance(rng, trial % 3, n, 2)
        rep = high_dim_median(X, MedianConfig(seed=trial))
        worst = max(worst, _grid_worst_ratio(X, rep.estimate, 1 / 6))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1.05 and elapsed < 120
    report(3, ok, f"worst grid ratio {worst:.4f} (bar 1.05), {elapsed:.1f}s")
    assert ok


# 4. affine equivariance --------------------------------------------------------


def _well_conditioned(rng, d, cond_max=100.0):
    while True:
        A = rng.standard_normal((d, d))
        if np.linalg.cond(A) <= cond_max:
            return A


def test_criterion_4_affine_equivariance(report):
    rng = np.random.default_rng(404)
    worst1 = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 60))
        Y = rng.standard_normal((n, 1)) * rng.uniform(0.1, 5)
        a = rng.uniform(0.1, 10) * rng.choice([-1.0, 1.0])
        b = rng.uniform(-100, 100)
        x = high_dim_median(Y).estimate[0]
        y = high_dim_median(a * Y + b).estimate[0]
        worst1 = max(worst1, abs(y - (a * x + b)) / max(1.0, abs(a * x + b)))
    worst = 0.0
    for t in range(50):
        d = (3, 5)[t % 2]
        n = int(rng.integers(30, 200))
        X = rng.standard_normal((n, d)) if t % 4 < 2 else rng.standard_t(3, (n, d))
        A, b = _well_conditioned(rng, d), rng.standard_normal(d) * 5
        cfg = MedianConfig(seed=1000 + t, equivariant_mode="whitened")
        x = high_dim_median(X, cfg).estimate
        y = high_dim_median(X @ A.T + b, cfg).estimate
        target = A @ x + b
        worst = max(worst, np.linalg.norm(y - target) / max(1.0, np.linalg.norm(target)))
    ok = worst1 <= 1e-10 and worst <= 1e-3
    report(4, ok, f"d=1 rel err {worst1:.2e} (bar 1e-10), d in {{3,5}} rel err {worst:.2e} (bar 1e-3)")
    assert ok


# 5. separation on the hard instance -------------------------------------------


def test_criterion_5_hardcase_separation(report):
    d = 20
    t0 = time.perf_counter()
    recs = run_experiment(hardcase_config(d, gamma=1 / (10 * d), n=20000, trials=20, base_seed=5))
    elapsed = time.perf_counter() - t0
    by = {}
    for r in recs:
        assert r.failure == "", r
        by.setdefault(r.estimator, []).append(r)
    tukey = [r.error_mahalanobis for r in by["tukey"]]
    ours = [r.error_mahalanobis for r in by["ours"]]
    sd_bad = sum(r.undefined_flag or r.error_mahalanobis > 10 for r in by["stahel_donoho"])
    bar = math.sqrt(d) / 2 - 0.25
    ok = (min(tukey) >= bar and sum(e <= 3 for e in ours) >= 0.95 * len(ours)
          and sd_bad >= 0.9 * len(by["stahel_donoho"]) and elapsed < 600)
    report(5, ok, f"tukey min {min(tukey):.3f} (bar {bar:.3f}), ours max {max(ours):.3f} (bar 3), "
                  f"SD undefined/>10 in {sd_bad}/20, {elapsed:.0f}s")
    assert ok


# 6. rate scaling ---------------------------------------------------------------

SMOOTHED = {"kind": "intuition_gamma", "params": {"gamma": "auto", "noise": 0.1}}


def _median_error(d, n, seed):
    cfg = ExperimentConfig(families=[SMOOTHED], d=[d], n=[n], delta=[0.05], eta=[0.0], trials=30,
                           base_seed=seed, estimators=[{"kind": "ours"}])
    return float(np.median([r.error_mahalanobis for r in run_experiment(cfg)]))


def test_criterion_6_rate_scaling(report):
    e4, e16 = _median_error(4, 4000, 11), _median_error(16, 4000, 11)
    e2k, e8k = _median_error(8, 2000, 11), _median_error(8, 8000, 11)
    rd, rn = e16 / e4, e2k / e8k
    ok = 1.4 <= rd <= 3.2 and 1.4 <= rn <= 3.2
    report(6, ok, f"d 4->16 growth {rd:.2f}, n 2000->8000 shrink {rn:.2f} (band [1.4, 3.2])")
    assert ok


# 7. contamination and breakdown ------------------------------------------------


def test_criterion_7_contamination(report):
    d, n = 8, 8000
    cfg = ExperimentConfig(
        families=[SMOOTHED], d=[d], n=[n], eta=[0.0, 0.005, 0.02], trials=10, base_seed=3,
        contamination=[{"mode": "replace", "strategy": "far_along_min_variance", "scale": 100}],
        estimators=[{"kind": "ours"}])
    recs = run_experiment(cfg)
    med = {eta: float(np.median([r.error_mahalanobis for r in recs if r.eta == eta])) for eta in (0.0, 0.005, 0.02)}
    monotone = med[0.0] <= med[0.005] <= med[0.02]
    bounded = all(med[eta] <= 5 * math.sqrt(d * eta) + med[0.0] for eta in (0.005, 0.02))

    fam = {"kind": "breakdown_lb", "params": {"index": 1, "r": 1.0}}
    equivariant = [{"kind": "ours"}, {"kind": "empirical_mean"}]
    clean = run_experiment(ExperimentConfig(families=[fam], d=[d], n=[n], eta=[0.0], trials=5, base_seed=5,
                                            estimators=equivariant))
    broken = run_experiment(ExperimentConfig(
        families=[fam], d=[d], n=[n], eta=[2 / (d + 1)], trials=5, base_seed=5, estimators=equivariant,
        contamination=[{"mode": "replace", "strategy": "point_mass_at", "point": "e1"}]))
    ratios = {}
    for e in ("ours", "empirical_mean"):
        c = np.median([r.error_mahalanobis for r in clean if r.estimator == e])
        b = np.median([r.error_mahalanobis for r in broken if r.estimator == e])
        ratios[e] = b / c
    breaks = all(v > 10 for v in ratios.values())
    ok = monotone and bounded and breaks
    report(7, ok, "median errors " + ", ".join(f"eta={k}: {v:.3f}" for k, v in med.items())
           + "; breakdown ratios " + ", ".join(f"{k} {v:.1f}x" for k, v in ratios.items()))
    assert ok


# 8. instance correctness -------------------------------------------------------


def _mc_specs():
    return [
        DistributionSpec("intuition_gamma", 5, {"gamma": 0.02, "noise": 0.1}),
        DistributionSpec("heavytailed_lb", 4, {"index": 2, "eps": 0.3}),
        DistributionSpec("breakdown_lb", 5, {"index": 0, "r": 1.0}),
        DistributionSpec("breakdown_lb", 5, {"index": 3, "r": 1.0}),
        DistributionSpec("quant_lb", 5, {"index": 0, "eta": 0.05}),
        DistributionSpec("quant_lb", 5, {"index": 2, "eta": 0.05}),
        DistributionSpec("gaussian", 3, {"mean": [1.0, -2.0, 0.5], "cov": [[2, 0.5, 0], [0.5, 1, 0.2], [0, 0.2, 0.5]]}),
    ]


def test_criterion_8_instance_correctness(report):
    problems = []
    # Huber identity for breakdown, recomputed from the exact masses
    d, r = 6, 1.0
    fam = breakdown_family(d, r)
    _, p0 = discrete_law(fam[0])
    for i in range(1, d + 1):
        atoms, pi = discrete_law(fam[i])
        w = Fraction(1, d + 1)
        pt = [Fraction(int(np.array_equal(a, np.eye(d)[i - 1]))) for a in atoms]
        if any(a != (1 - w) * b + w * c for a, b, c in zip(p0, pi, pt)):
            problems.append(f"breakdown member {i}")
    # quant: eta-replacement identity (see the ledger on the mixture form)
    eta = Fraction(0.05)  # masses are exact in the float's binary value
    fam = quant_family(d, 0.05)
    _, q0 = discrete_law(fam[0])
    for i in range(1, d + 1):
        atoms, qi = discrete_law(fam[i])
        hit = [int(np.array_equal(a, np.eye(d)[i - 1])) for a in atoms]
        other = [int(any(np.array_equal(a, np.eye(d)[j]) for j in range(d) if j != i - 1)) for a in atoms]
        moved = [b + eta * h - eta * o / (d - 1) for b, h, o in zip(qi, hit, other)]
        if moved != q0 or sum(abs(a - b) for a, b in zip(q0, qi)) / 2 != eta:
            problems.append(f"quant member {i}")
    # moments against Monte Carlo
    worst = 0.0
    for s, spec in enumerate(_mc_specs()):
        X = sample(spec, 10**6, 800 + s)
        mom = moments(spec)
        err = max(np.abs(X.mean(axis=0) - mom.mean).max(), np.abs(np.cov(X.T, bias=True) - mom.cov).max())
        worst = max(worst, err)
    if worst > 5e-3:
        problems.append(f"moments off by {worst:.2e}")
    # heavy-tailed covariance dominated by its bound
    gap = math.inf
    for d in (2, 4, 7):
        for i in range(1, d + 1):
            spec = DistributionSpec("heavytailed_lb", d, {"index": i, "eps": 0.35})
            gap = min(gap, np.linalg.eigvalsh(heavytailed_bound(spec) + 1e-12 * np.eye(d) - moments(spec).cov)[0])
    if gap < 0:
        problems.append(f"covariance bound violated by {gap:.2e}")
    ok = not problems
    report(8, ok, f"MC moment err {worst:.2e} (bar 5e-3), min bound eigen gap {gap:.2e}; {problems or 'identities exact'}")
    assert ok


# 9. determinism ----------------------------------------------------------------


def test_criterion_9_determinism(report, tmp_path, monkeypatch):
    cfg = {"families": [SMOOTHED, {"kind": "gaussian"}],
           "grid": {"d": [3, 5], "n": [400], "eta": [0.0, 0.02]},
           "contamination": [{"mode": "replace", "strategy": "far_along_min_variance", "scale": 20}],
           "estimators": [{"kind": k} for k in ("ours", "tukey", "stahel_donoho", "coord_median", "empirical_mean")],
           "trials": 2, "base_seed": 99}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for threads, name in (("1", "a.csv"), ("1", "b.csv"), ("2", "c.csv")):
        monkeypatch.setenv("AFFMED_THREADS", threads)
        assert cli_main(["bench", "--config", str(path), "--out", str(tmp_path / name)]) == 0
        outs.append((tmp_path / name).read_bytes())
    ok = outs[0] == outs[1] == outs[2] and len(outs[0]) > 0
    report(9, ok, f"{len(outs[0])} bytes, reruns identical: {outs[0] == outs[1]}, across pool sizes: {outs[0] == outs[2]}")
    assert ok
