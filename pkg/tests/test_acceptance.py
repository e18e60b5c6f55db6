"""Acceptance criteria 1-12, one test each.

Every test appends a line to RESULTS; conftest prints them after the run.
Tolerances and time limits are pinned below.
"""

import json
import subprocess
import sys
import time

import pytest

from binpart import counting as co
from binpart.characterizations import TABLE_CD, cd_equivalent, derive_table_cd
from binpart.partitions import b, b3_stream
from binpart.report import load_families

DENSITY_TOLERANCE = 0.005
TABLE6_TOLERANCE = 0.005
MINUTE = 60.0

RESULTS: dict[int, str] = {}
REGISTRY = load_families()


def record(num: int, ok: bool, started: float, limit: float, detail: str) -> None:
    elapsed = time.perf_counter() - started
    in_time = elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    timing = f"{elapsed:.1f}s of {limit:.0f}s" + ("" if in_time else " (over time)")
    RESULTS[num] = f"criterion {num:2d}: {status}  [{timing}] {detail}"
    assert ok, RESULTS[num]
    assert in_time, RESULTS[num]


def run_family(name, **kwargs):
    rep = REGISTRY[name].run(**kwargs)
    return rep


def summarize(reports):
    bad = [r for r in reports if not r.passed]
    if not bad:
        return True, "all of " + ", ".join(r.family for r in reports) + " pass"
    parts = [f"{r.family} fails at {json.dumps(r.counterexample, sort_keys=True, default=str)}" for r in bad]
    return False, "; ".join(parts)


def test_criterion_01_exact_values():
    t0 = time.perf_counter()
    problems = []
    if b(4) != 4:
        problems.append(f"b(4) = {b(4)}")
    if b3_stream(2) != [1, 3, 9]:
        problems.append(f"b_3(0..2) = {b3_stream(2)}")
    listed = list(zip(TABLE_CD["c"], TABLE_CD["d"]))
    for k in (3, 4, 5):
        derived = derive_table_cd(k)
        if not all(cd_equivalent(x, y) for x, y in zip(derived, listed)):
            problems.append(f"k={k}: derived {derived}")
    record(1, not problems, t0, MINUTE, "; ".join(problems) or "b(4), b_3(0..2) and the (c_i, d_i) table for k=3,4,5 match")


def test_criterion_02_congruences():
    t0 = time.perf_counter()
    reports = [
        run_family("b-mod32", max=10**5),
        run_family("b-mod16", max=10**5),
        run_family("b3-mod32", max=10**4),
        run_family("b2k-small-mod8", k_max=5),
        run_family("b2k-mod32", max=10**5, ks=(3, 4, 5)),
        run_family("gupta-rodseth", max=10**5, s_max=8),
        run_family("colored-binomial", max=2000),
        run_family("binomial-valuation", k_max=12, max=1000),
    ]
    ok, detail = summarize(reports)
    record(2, ok, t0, 5 * MINUTE, detail)


def test_criterion_03_characterizations():
    t0 = time.perf_counter()
    reports = [
        run_family("s1-oracle", max=2 * 10**5),
        run_family("s3-oracle", max=2 * 10**5),
        run_family("s2k-oracle", max=2 * 10**5, ks=(3, 4, 5)),
    ]
    ok, detail = summarize(reports)
    record(3, ok, t0, 5 * MINUTE, detail)


def test_criterion_04_s1_prime_and_gaps():
    t0 = time.perf_counter()
    reports = [run_family("s1-prefix"), run_family("gaps", max=10**6, min_count=10)]
    ok, detail = summarize(reports)
    record(4, ok, t0, MINUTE, detail)


def test_criterion_05_beta_classes():
    t0 = time.perf_counter()
    ok, detail = summarize([run_family("beta-classes", max=4 * 10**4)])
    record(5, ok, t0, MINUTE, detail)


def test_criterion_06_bounds():
    t0 = time.perf_counter()
    x_max = 1 << 16
    reports = [
        co.bound_check("S1x", x_max),
        co.bound_check("S3x", x_max),
        co.bound_check("S2kx", x_max, 3),
        co.bound_check("S2kx", x_max, 4),
        run_family("extremal", l_max=4),
    ]
    ok, detail = summarize(reports)
    record(6, ok, t0, 5 * MINUTE, detail)


def test_criterion_07_density():
    t0 = time.perf_counter()
    x = 1 << 20
    ratios = {m: co.count_S(m, x) / x for m in (1, 3, 7)}
    bad = {m: r for m, r in ratios.items() if abs(r - float(co.density(m))) >= DENSITY_TOLERANCE}
    shown = ", ".join(f"m={m}: {r:.6f}" for m, r in ratios.items())
    record(7, not bad, t0, 2 * MINUTE, shown)


def test_criterion_08_census():
    t0 = time.perf_counter()
    got = co.representation_census(1000)
    ok = got == co.CENSUS
    detail = f"got {json.dumps(got, sort_keys=True)}, expected {json.dumps(co.CENSUS, sort_keys=True)}"
    record(8, ok, t0, 60 * MINUTE, detail)


def test_criterion_09_two_squares_tables():
    t0 = time.perf_counter()
    n_max = 14
    r2_values = co.r2_of_b2n(1 << n_max)
    problems = []
    for n, t in co.table_T(n_max, r2_values):
        if t != co.TABLE4[n]:
            problems.append(f"T(2^{n}) = {t} vs {co.TABLE4[n]}")
    first = {s: f for s, _, f in co.r2_stats(1 << n_max, r2_values)}
    for s, (_, n_i) in sorted(co.TABLE5.items()):
        if n_i <= 1 << n_max and first.get(s) != n_i:
            problems.append(f"first index of s={s}: first n {first.get(s)} vs {n_i}")
    for m, ratio in co.table_T_ratios(co.table_T(12, r2_values)):
        if m in co.TABLE6 and abs(ratio - co.TABLE6[m]) > TABLE6_TOLERANCE:
            problems.append(f"ratio at m={m}: {ratio:.4f} vs {co.TABLE6[m]:.2f}")
    record(9, not problems, t0, 10 * MINUTE, "; ".join(problems) or "T(2^n), first indices and ratios match in range")


def test_criterion_10_sigma_and_paperfolding():
    t0 = time.perf_counter()
    reports = [run_family("sigma-mod32", max=10**5),
               run_family("paperfolding", max=2000, ms=(2, 4, 6, 8, 10, 12, 14, 16))]
    ok, detail = summarize(reports)
    notes = [n for r in reports for n in r.notes]
    record(10, ok, t0, 5 * MINUTE, detail + ("; " + "; ".join(notes) if notes else ""))


def test_criterion_11_dfao():
    t0 = time.perf_counter()
    reports = [
        run_family("dfao-ptm", max=10**5),
        run_family("dfao-chi", max=1 << 18, calibrate_max=1 << 12),
        run_family("kernel-chi", length=256, depth=8),
    ]
    ok, detail = summarize(reports)
    record(11, ok, t0, MINUTE, detail)


def _verify_all(threads: int) -> tuple[int, bytes]:
    proc = subprocess.run(
        [sys.executable, "-m", "binpart.cli", "verify", "--all", "--budget", "small", "--seed", "0",
         "--threads", str(threads)],
        capture_output=True,
    )
    return proc.returncode, proc.stdout


@pytest.mark.slow
def test_criterion_12_determinism():
    t0 = time.perf_counter()
    code1, out1 = _verify_all(1)
    code8, out8 = _verify_all(8)
    same = out1 == out8 and code1 == code8 and bool(out1)
    lines = len(out1.splitlines())
    record(12, same, t0, 20 * MINUTE,
           f"{lines} reports, byte-identical across 1 and 8 threads" if same else "outputs differ")
