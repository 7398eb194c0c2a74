"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Run with `pytest tests/test_acceptance.py -v -s`.
"""

import functools
import io
import math
import time

import numpy as np
import pytest

from pabounds import (
    BoundParams,
    BscSource,
    MarginalTable,
    ToeplitzFamily,
    binary_entropy,
    binomial_cdf_inverse,
    binomial_model,
    exponential_lower_bound,
    gaussian_approximation,
    hybrid_lower_bound,
    log_binomial_cdf,
    normal_quantile,
    spectral_lower_bound,
    spectral_upper_bound,
    verify_entropy_inequalities,
    verify_exponential_bound,
    verify_leftover_bound,
)
from pabounds.cli import SweepSpec, log_spaced_floats, log_spaced_ints, run_sweep_eps, run_sweep_n
from pabounds.hashing import random_joint_table

from oracles import binomial_cdf_fraction, normal_quantile_bisect

Q = 0.11
EPS = 1e-10
H_Q = binary_entropy(Q)

COLS = {"n": 0, "eps": 1, "s_low": 5, "e_low": 6, "h_low": 7, "s_up": 8, "gauss": 9}


def criterion(number, label):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number} ({label}): FAIL")
                raise
            print(f"ACCEPTANCE {number} ({label}): PASS")

        return wrapper

    return decorate


def parse_rows(text):
    lines = [l for l in text.strip().splitlines()[1:] if not l.startswith("#")]
    return np.array([[float(v) for v in line.split(",")] for line in lines])


@pytest.fixture(scope="module")
def fixed_eps_sweep():
    """100-point log sweep of n over [1e2, 1e6] at eps = 1e-10, in nats."""
    spec = SweepSpec(mode="sweep-n", q=Q, eps=EPS, units="nats")
    spec.n_grid = log_spaced_ints(100, 10 ** 6, 100)
    buf = io.StringIO()
    start = time.perf_counter()
    run_sweep_n(spec, buf)
    elapsed = time.perf_counter() - start
    return elapsed, parse_rows(buf.getvalue())


@pytest.fixture(scope="module")
def fixed_n_sweeps():
    """eps sweeps over [1e-15, 1e-1] at n in {1e3, 1e4, 1e5}, in nats."""
    out = {}
    for n in (10 ** 3, 10 ** 4, 10 ** 5):
        spec = SweepSpec(mode="sweep-eps", q=Q, n=n, units="nats")
        spec.eps_grid = log_spaced_floats(1e-15, 1e-1, 29)
        buf = io.StringIO()
        run_sweep_eps(spec, buf)
        out[n] = parse_rows(buf.getvalue())
    return out


@criterion(1, "figure-1 crossover")
def test_crossover_reproduction(fixed_eps_sweep):
    elapsed, rows = fixed_eps_sweep
    n = rows[:, COLS["n"]]
    exponential_ahead = rows[:, COLS["e_low"]] > rows[:, COLS["s_low"]]
    split = int(exponential_ahead.sum())
    # the exponential bound leads exactly on a prefix of the grid
    assert exponential_ahead[:split].all()
    assert not exponential_ahead[split:].any()
    crossover = n[split]
    assert 5e3 <= crossover <= 2e4, f"crossover at n={crossover}"
    assert elapsed <= 10.0, f"sweep took {elapsed:.2f}s"


@criterion(2, "hybrid dominance")
def test_hybrid_dominance(fixed_eps_sweep, fixed_n_sweeps):
    _, rows = fixed_eps_sweep
    grids = [rows] + list(fixed_n_sweeps.values())
    for grid in grids:
        h = grid[:, COLS["h_low"]]
        assert np.all(h >= grid[:, COLS["s_low"]] - 1e-12)
        assert np.all(h >= grid[:, COLS["e_low"]] - 1e-9)


@criterion(3, "sandwich")
def test_sandwich(fixed_eps_sweep, fixed_n_sweeps):
    _, rows = fixed_eps_sweep
    for grid in [rows] + list(fixed_n_sweeps.values()):
        lowers = np.max(
            grid[:, [COLS["s_low"], COLS["e_low"], COLS["h_low"]]], axis=1
        )
        assert np.all(lowers <= grid[:, COLS["s_up"]] + 1e-9)
    large = rows[:, COLS["n"]] >= 10 ** 3
    lowers = np.max(
        rows[:, [COLS["s_low"], COLS["e_low"], COLS["h_low"]]], axis=1
    )[large]
    gauss = rows[large, COLS["gauss"]]
    assert np.all(gauss >= lowers - 1e-9)
    assert np.all(gauss <= rows[large, COLS["s_up"]] + 1e-9)


@criterion(4, "rate convergence")
def test_rate_convergence():
    params = BoundParams(EPS, BscSource(Q, 10 ** 6))
    hybrid_rate = hybrid_lower_bound(params).value_nats / 10 ** 6
    upper_rate = spectral_upper_bound(params).value_nats / 10 ** 6
    assert H_Q == pytest.approx(0.34652, abs=1e-5)
    assert abs(hybrid_rate - H_Q) <= 0.02
    assert abs(upper_rate - H_Q) <= 0.02


@criterion(5, "proven-inequality suite")
def test_proven_inequality_suite():
    start = time.perf_counter()

    for n in range(1, 5):
        table = BscSource(Q, n).product_table()
        for k in range(1, min(3, n) + 1):
            family = ToeplitzFamily(n, k)
            assert verify_leftover_bound(family, table)["pass"]
            assert verify_exponential_bound(family, table)["pass"]

    rng = np.random.default_rng(2024)
    for m in range(2, 7):
        for _ in range(2):
            z_size = int(rng.integers(2, 9))
            table = random_joint_table(rng, 2 ** m, z_size)
            refs = {
                "marginal": table.z_marginal(),
                "uniform": MarginalTable.uniform(z_size),
                "random": MarginalTable(
                    random_joint_table(rng, 1, z_size).weights[0]
                ).mixed_with_uniform(0.01),
            }
            for k in (1, 2, 3):
                family = ToeplitzFamily(m, k)
                assert verify_leftover_bound(family, table, refs)["pass"]
                assert verify_exponential_bound(family, table)["pass"]

    reports = verify_entropy_inequalities(
        instance_count=200,
        alphabet_cap=8,
        eps_grid=(0.01, 0.1, 0.3),
        zeta_grid=(0.05, 0.1),
        seed=2024,
    )
    for report in reports:
        assert report["pass"], report
        assert report["instances"] >= 200

    elapsed = time.perf_counter() - start
    assert elapsed <= 300.0, f"suite took {elapsed:.1f}s"


@criterion(6, "numerics")
def test_numerics():
    for q in (0.11, 0.25, 0.5):
        for n in range(1, 31):
            model = binomial_model(n, q)
            for k in range(0, n):
                exact = float(binomial_cdf_fraction(n, q, k))
                got = math.exp(log_binomial_cdf(model, k))
                assert abs(got - exact) <= 1e-12 * exact

    assert binomial_cdf_inverse(binomial_model(10, 0.5), 0.5) == 5

    for q in (0.11, 0.25, 0.5):
        for n in range(1, 31):
            model = binomial_model(n, q)
            probs = [math.exp(log_binomial_cdf(model, k)) for k in range(n + 1)]
            for k in range(n):
                if probs[k] * (1.0 + 1e-15) < probs[k + 1] and 0.0 < probs[k] < 1.0:
                    assert binomial_cdf_inverse(model, probs[k]) == k + 1

    value = normal_quantile(1e-10)
    assert value == pytest.approx(-6.3613, abs=1e-3)
    assert value == pytest.approx(normal_quantile_bisect(1e-10), abs=1e-9)


@criterion(7, "path consistency")
def test_path_consistency():
    checks = (
        spectral_lower_bound,
        spectral_upper_bound,
        exponential_lower_bound,
        hybrid_lower_bound,
        gaussian_approximation,
    )
    for q in (0.11, 0.25):
        for eps in (0.2, 0.05):
            for n in range(1, 11):
                closed = BoundParams(eps, BscSource(q, n))
                general = BoundParams(eps, BscSource(q, n).single_letter(), n=n)
                for fn in checks:
                    a = fn(closed).value_nats
                    b = fn(general).value_nats
                    assert a == pytest.approx(b, abs=1e-9), (fn.__name__, q, eps, n)
