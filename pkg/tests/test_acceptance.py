"""Acceptance gate.

Eight release criteria, one test each, covering: dual-route equilibrium
agreement, the convex-combination identity, exact limit cases, simulated
violation frequency and wastage cost against the linear model, emission
settlement arithmetic, CLI determinism, and sweep monotonicity.  Each test
prints a single PASS line (bypassing capture) once its assertions hold.
"""

import csv
import filecmp
import json
import math
import textwrap
import time

import numpy as np
import pytest

from greenprov import (
    CostRates,
    DataCenterAccount,
    DemandStats,
    Policy,
    Scenario,
    balance_closed_form,
    balance_numeric,
    derive_co2_rate,
    emissions_from_report,
    make_profile,
    run_simulation,
    settle,
)
from greenprov.cli import main
from greenprov.schemas import SWEEP_HEADER


def announce(capsys, line):
    with capsys.disabled():
        print(line)


@pytest.fixture(scope="module")
def corpus():
    """10^4 randomized valid (stats, rates) tuples, zero surcharge.

    About one tuple in ten prices a whole cost channel at zero so the
    endpoint branches stay covered; never both, which would be degenerate.
    """
    rng = np.random.default_rng(20260816)
    tuples = []
    while len(tuples) < 10_000:
        agreed = float(10.0 ** rng.uniform(-1, 3))
        peak = agreed * float(rng.uniform(0.05, 1.0))
        mean = peak * float(rng.uniform(0.0, 1.0))
        c_en = float(10.0 ** rng.uniform(-3, 2))
        c_co2 = float(10.0 ** rng.uniform(-3, 2))
        c_viol = float(10.0 ** rng.uniform(-3, 2))
        roll = rng.random()
        if roll < 0.05:
            c_viol = 0.0
        elif roll < 0.10:
            c_en = c_co2 = 0.0
        tuples.append(
            (DemandStats(mean, peak, agreed), CostRates(c_en, c_co2, c_viol))
        )
    return tuples


def test_c1_closed_form_agrees_with_bisection(corpus, capsys):
    """Both solver routes give the same level on 10^4 random inputs."""
    start = time.perf_counter()
    worst = 0.0
    for stats, rates in corpus:
        closed = balance_closed_form(stats, rates).r_provisioned
        numeric = balance_numeric(stats, rates).r_provisioned
        worst = max(worst, abs(closed - numeric) / stats.max_demand)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-9
    assert elapsed <= 5.0
    announce(
        capsys,
        f"PASS criterion 1: closed form vs bisection on {len(corpus)} tuples, "
        f"worst relative gap {worst:.2e}, {elapsed:.2f}s",
    )


def test_c2_convex_combination_identity(corpus, capsys):
    """The level is the weighted average of mean and max demand and never
    leaves that interval."""
    worst = 0.0
    for stats, rates in corpus:
        r = balance_closed_form(stats, rates).r_provisioned
        assert stats.mean_demand <= r <= stats.max_demand
        w1 = stats.max_demand * (rates.c_en + rates.c_co2)
        w2 = stats.r_agreed * rates.c_viol
        weighted = (w1 * stats.mean_demand + w2 * stats.max_demand) / (w1 + w2)
        scale = max(abs(r), abs(weighted))
        gap = abs(r - weighted) / scale if scale else 0.0
        worst = max(worst, gap)
    assert worst <= 1e-12
    announce(
        capsys,
        f"PASS criterion 2: bounds held on {len(corpus)} tuples, "
        f"weighted-average identity worst relative gap {worst:.2e}",
    )


def test_c3_limit_cases_and_price_pooling(capsys):
    """Free violations pin the level to the mean, free provisioning to the
    max, and only the sum c_en + c_co2 ever matters."""
    stats = DemandStats(40.0, 80.0, 100.0)
    assert balance_closed_form(stats, CostRates(1.5, 0.5, 0)).r_provisioned == 40.0
    assert balance_closed_form(stats, CostRates(0, 0, 3)).r_provisioned == 80.0

    rng = np.random.default_rng(99)
    for _ in range(2000):
        a = float(10.0 ** rng.uniform(-3, 2))
        b = float(10.0 ** rng.uniform(-3, 2))
        cv = float(10.0 ** rng.uniform(-3, 2))
        split = balance_closed_form(stats, CostRates(a, b, cv))
        pooled = balance_closed_form(stats, CostRates(a + b, 0.0, cv))
        zeroed = balance_closed_form(stats, CostRates(0.0, a + b, cv))
        assert split == pooled == zeroed
    announce(
        capsys,
        "PASS criterion 3: limit cases exact; 2000 random price splits "
        "identical to their pooled forms",
    )


def test_c4_uniform_violation_frequency(capsys):
    """Simulated violation frequency matches the linear probability within
    3-sigma binomial bounds at quarter, half, and three-quarter coverage."""
    start = time.perf_counter()
    peak = 80.0
    profile = make_profile("uniform", [0, peak])
    stats = DemandStats(40.0, peak, 100.0)
    rates = CostRates(1.5, 0.5, 1.0)
    n = 10**6
    checks = []
    for fraction in (0.25, 0.5, 0.75):
        level = fraction * peak
        scenario = Scenario(
            profile=profile, stats=stats, rates=rates,
            policy=Policy.fixed_level(level), steps=n, replications=1,
            seed=1234, energy_full=2.0, carbon_intensity=0.5,
        )
        report = run_simulation(scenario, trace=False)
        p = 1.0 - level / peak
        bound = 3.0 * math.sqrt(p * (1.0 - p) / n)
        assert report.model_violation_probability == pytest.approx(p, abs=1e-15)
        assert abs(report.violation_frequency - p) <= bound
        checks.append(f"r={level:g}: |{report.violation_frequency:.5f}-{p}|<={bound:.2e}")
    elapsed = time.perf_counter() - start
    assert elapsed <= 30.0
    announce(
        capsys,
        f"PASS criterion 4: {'; '.join(checks)}; {elapsed:.2f}s",
    )


def test_c5_wastage_cost_consistency(capsys):
    """At full coverage the realized mean step wastage cost matches the
    linear model within 3 sigma; below the maximum it strictly exceeds it."""
    peak, mean, agreed, price = 80.0, 40.0, 100.0, 2.0
    profile = make_profile("uniform", [0, peak])
    stats = DemandStats(mean, peak, agreed)
    rates = CostRates(1.5, 0.5, 1.0)
    n = 10**6

    def mean_step_wastage(level):
        scenario = Scenario(
            profile=profile, stats=stats, rates=rates,
            policy=Policy.fixed_level(level), steps=n, replications=1,
            seed=77, energy_full=2.0, carbon_intensity=0.5,
        )
        return run_simulation(scenario, trace=False).total_wastage_cost / n

    model_at_max = (peak - mean) / agreed * price
    step_sigma = (price / agreed) * math.sqrt(profile.variance())
    bound = 3.0 * step_sigma / math.sqrt(n)
    observed = mean_step_wastage(peak)
    assert abs(observed - model_at_max) <= bound

    below = mean_step_wastage(60.0)
    model_below = (60.0 - mean) / agreed * price
    assert below > model_below
    announce(
        capsys,
        f"PASS criterion 5: at r=max |{observed:.5f}-{model_at_max}|<={bound:.2e}; "
        f"at r=60 realized {below:.4f} > model {model_below}",
    )


def test_c6_settlement_arithmetic_and_round_trip(capsys):
    """Settlement is price-linear with the right signs, symmetric books net
    to zero, and the derived CO2e rate closes the loop through a simulation."""
    accounts = [
        DataCenterAccount("a", 100_000, 120_000),
        DataCenterAccount("b", 50_000, 20_000),
        DataCenterAccount("c", 7_000, 7_000),
    ]
    base = settle(accounts, 0.013)
    doubled = settle(accounts, 0.026)
    for one, two in zip(base.entries, doubled.entries):
        assert two.cash_flow == 2.0 * one.cash_flow
        if one.position_kg != 0.0:
            assert (one.cash_flow < 0) == (one.emissions_kg > one.cap_kg)

    symmetric = settle(
        [DataCenterAccount("s", 1000, 500), DataCenterAccount("d", 500, 1000)], 0.02
    )
    assert symmetric.total_position_kg == 0.0
    assert symmetric.total_cash_flow == 0.0

    energy_full, intensity, price = 2.0, 0.5, 0.01
    c_co2 = derive_co2_rate(energy_full, intensity, price)
    scenario = Scenario(
        profile=make_profile("uniform", [0, 80]),
        stats=DemandStats(40.0, 80.0, 100.0),
        rates=CostRates(1.5, c_co2, 1.0),
        policy=Policy.balance(),
        steps=20_000, replications=2, seed=5,
        energy_full=energy_full, carbon_intensity=intensity,
    )
    report = run_simulation(scenario, trace=False)
    loop = emissions_from_report(report) * price
    gap = abs(loop - report.total_co2_use_cost) / report.total_co2_use_cost
    assert gap <= 1e-9
    announce(
        capsys,
        f"PASS criterion 6: linearity/sign/net-zero exact; round trip "
        f"relative gap {gap:.2e}",
    )


CLI_CONFIG = """
demand:
  kind: uniform
  lower: 0
  upper: 80

stats:
  r_agreed: 100

rates:
  c_en: 1.5
  c_co2: 0.5
  c_viol: 1.0

policy:
  kind: balance

simulation:
  steps: 2000
  replications: 2
  seed: 42
  energy_full: 2.0
  carbon_intensity: 0.5

market:
  price_per_kg: 0.01
  accounts:
    - {name: dc-east, cap_kg: 100000, emissions_kg: 120000}
    - {name: dc-west, cap_kg: 50000, emissions_kg: 20000}
"""


def test_c7_cli_outputs_are_byte_identical(tmp_path, capsys):
    """Every workflow rerun with the same config and seed reproduces its
    output files byte for byte."""
    config = tmp_path / "scenario.yaml"
    config.write_text(textwrap.dedent(CLI_CONFIG), encoding="utf-8")
    runs = {
        "balance": ["balance", str(config)],
        "simulate": ["simulate", str(config), "--trace"],
        "etm": ["etm", str(config)],
        "sweep": ["sweep", str(config), "--param", "c_viol=0:10:11"],
    }
    produced = {
        "balance": ["balance.json"],
        "simulate": ["report.json", "trace.csv"],
        "etm": ["settlement.csv"],
        "sweep": ["sweep.csv"],
    }
    compared = 0
    for name, argv in runs.items():
        first = tmp_path / f"{name}_a"
        second = tmp_path / f"{name}_b"
        assert main(argv + ["--output", str(first)]) == 0
        assert main(argv + ["--output", str(second)]) == 0
        for filename in produced[name]:
            assert filecmp.cmp(first / filename, second / filename, shallow=False), (
                f"{name}/{filename} differs between identical runs"
            )
            compared += 1
    capsys.readouterr()
    announce(
        capsys,
        f"PASS criterion 7: {compared} output files byte-identical across reruns "
        "of all four workflows",
    )


def test_c8_sweep_monotonicity(tmp_path, capsys):
    """Raising the violation price never lowers the balance level; raising
    the provisioning price never raises it."""
    config = tmp_path / "scenario.yaml"
    config.write_text(textwrap.dedent(CLI_CONFIG), encoding="utf-8")
    idx = SWEEP_HEADER.index("r_provisioned")

    def levels(param):
        out = tmp_path / param.split("=")[0]
        assert main(["sweep", str(config), "--output", str(out), "--param", param]) == 0
        with open(out / "sweep.csv", encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))[1:]
        assert len(rows) == 11
        assert all(row[-1] == "" for row in rows)
        return [float(row[idx]) for row in rows]

    up = levels("c_viol=0:10:11")
    assert all(a <= b for a, b in zip(up, up[1:]))
    down = levels("c_en=0:10:11")  # raises c_en + c_co2 row by row
    assert all(a >= b for a, b in zip(down, down[1:]))
    capsys.readouterr()
    announce(
        capsys,
        "PASS criterion 8: 11-point c_viol sweep nondecreasing "
        f"({up[0]:.4g}..{up[-1]:.4g}); 11-point energy-price sweep nonincreasing "
        f"({down[0]:.4g}..{down[-1]:.4g})",
    )
