"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import json
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from qlattice.classical import (
    CommElement,
    euler_field,
    poisson_bracket,
    rep_fields,
    sl2_defects,
)
from qlattice.coeffs import BETA, q_power
from qlattice.expr import evaluate, evaluate_commutative, parse, to_text
from qlattice.qcombinatorics import expand_power_depth, gauss_binom
from qlattice.screening import nilpotency_check, serre_window_check
from qlattice.skewalg import AlgebraContext, TruncatedSeries, series_mul
from qlattice.virasoro import F_PRESETS, GENERATOR_PRESETS, GeneratorSpec, check_invariance, context_for, ladder
from qlattice.volkov import (
    three_point_closed,
    three_point_recursion,
    two_point_closed,
    two_point_recursion,
    verify_reduced_two_point,
)

ROOT = Path(__file__).resolve().parents[1]
q = q_power(4)


@pytest.fixture
def report(capsys):
    def emit(n: int, failures: list[str], summary: str):
        line = f"{'PASS' if not failures else 'FAIL'} criterion {n}: {summary}"
        if failures:
            line += " | " + "; ".join(failures)
        with capsys.disabled():
            print(f"\n{line}")
        assert not failures, line

    return emit


def test_criterion_01_sl3_serre(report):
    t0 = time.perf_counter()
    bad = [f"n={n} swap={s}" for n in range(1, 5) for s in (False, True) if not serre_window_check("sl3", n, swap=s).is_zero()]
    dt = time.perf_counter() - t0
    if dt >= 10:
        bad.append(f"took {dt:.1f}s")
    report(1, bad, f"sl3 Serre residual zero for 1-4 sites per type, both orders ({dt:.2f}s)")


def test_criterion_02_affine_serre(report):
    t0 = time.perf_counter()
    bad = []
    for preset in ("affine-sl2-laurent", "affine-sl2"):
        for n in range(1, 4):
            if not serre_window_check(preset, n).is_zero():
                bad.append(f"{preset} n={n}")
    dt = time.perf_counter() - t0
    if dt >= 30:
        bad.append(f"took {dt:.1f}s")
    report(2, bad, f"cubic affine Serre residual zero for 1-3 sites ({dt:.2f}s)")


def test_criterion_03_nilpotency(report):
    t0 = time.perf_counter()
    bad = [f"N={N} sites={k}" for N in (2, 3, 5) for k in (2, 3) if not nilpotency_check(k, N)]
    dt = time.perf_counter() - t0
    if dt >= 10:
        bad.append(f"took {dt:.1f}s")
    report(3, bad, f"(sum x)^N vanishes modulo Phi_N for N in 2,3,5 and 2-3 sites ({dt:.2f}s)")


def test_criterion_04_two_point(report):
    t0 = time.perf_counter()
    rec = two_point_recursion(12)
    bad = [f"C_{i}" for i in range(13) if two_point_closed(i) != rec[i]]
    res = verify_reduced_two_point(12, rec)
    bad += [f"order {k} residual" for k in range(1, 13) if res[k]]
    if res[0] != 1 - BETA:
        bad.append(f"order 0 residual {res[0]}")
    dt = time.perf_counter() - t0
    if dt >= 5:
        bad.append(f"took {dt:.1f}s")
    report(4, bad, f"two-point closed form equals recursion to order 12; order-0 residual 1-beta ({dt:.2f}s)")


def test_criterion_05_three_point(report):
    t0 = time.perf_counter()
    table = three_point_recursion(8, 8)
    mism = [(n, m) for n in range(9) for m in range(9) if three_point_closed(n, m) != table[(n, m)]]
    bad = []
    if mism:
        bad.append(f"{len(mism)} of 81 cells differ, first {mism[0]}")
    bad += [f"C_0,{m} nonzero" for m in range(1, 9) if table[(0, m)]]
    two = two_point_recursion(8)
    bad += [f"m=0 column at n={n}" for n in range(9) if table[(n, 0)] != two[n]]
    dt = time.perf_counter() - t0
    if dt >= 10:
        bad.append(f"took {dt:.1f}s")
    report(5, bad, f"three-point closed form against recursion for n,m <= 8 ({dt:.2f}s)")


def test_criterion_06_q_binomials(report):
    bad = []
    ctx = AlgebraContext.preset("sl2-lattice", [1, 2])
    cube = evaluate(parse("(x1+x2)^(3)"), ctx).body
    expected = (
        ctx.x(2, 3) + ctx.monomial({2: 2, 1: 1}, 1 + q + q**2) + ctx.monomial({2: 1, 1: 2}, 1 + q + q**2) + ctx.x(1, 3)
    )
    if cube != expected:
        bad.append(f"cube expansion {cube}")
    # sign times q^(k(k-1)/2) times the binomial at q^-1 (a substitution s -> 1/s)
    wrong = []
    for n in range(1, 7):
        for k in range(0, 9):
            inv = gauss_binom(n + k - 1, k).subs(s=Fraction(1, 2))
            lhs = gauss_binom(-n, k).subs(s=Fraction(2))
            rhs = (-1) ** k * Fraction(16) ** (k * (k - 1) // 2) * inv
            if lhs != rhs:
                wrong.append((n, k))
    if wrong:
        bad.append(f"negative-exponent identity with q^(k(k-1)/2) fails for {len(wrong)} of 54 (n,k), first {wrong[0]}")
    big = AlgebraContext.preset("sl2-lattice", range(1, 5))
    inv = expand_power_depth(big, [2, 3, 4], -1, 10)
    one = series_mul(inv, TruncatedSeries.exact(big.x(2) + big.x(3) + big.x(4)))
    if one.body != big.one():
        bad.append("series inverse")
    report(6, bad, "cube expansion, negative-exponent identity for n<=6 k<=8, inverse at depth 10")


INVARIANCE_PRESETS = [
    "sigma-half",
    "inverse-pair",
    "nested-sum",
    "nested-family-3",
    "nested-family-4",
    "nested-family-5",
    "abcd-5",
    "abcd-6",
    "composite-4",
]


def _invariance(name, depth):
    spec = GENERATOR_PRESETS[name]
    lo, hi = spec.default_window()
    ctx = context_for(sorted(set(spec.sites) | set(range(lo, hi + 1))))
    return check_invariance(ctx, spec, (lo, hi), depth=depth)


def test_criterion_07_invariance(report):
    bad = []
    for name in INVARIANCE_PRESETS:
        t0 = time.perf_counter()
        rep = _invariance(name, 8)
        dt = time.perf_counter() - t0
        if dt >= 60:
            bad.append(f"{name} took {dt:.1f}s")
        if not rep.passed:
            bad.append(f"{name}: {rep.residual_term_count} residual terms")
        elif not _invariance(name, 12).passed:
            bad.append(f"{name}: passes at depth 8 but not 12")
    report(7, bad, "screening invariance of the listed generators at depth 8 (stable to 12)")


def test_criterion_08_ladder(report):
    bad = []
    for e in ladder(8):
        if not e.tail_free:
            bad.append(f"{e.name} has tail terms")
        if e.ratio is None:
            bad.append(f"{e.name} not proportional to its closed form")
    report(8, bad, "rho combinations tail-free and proportional to their closed forms at depth 8")


def _basis():
    for a1 in range(-2, 3):
        for a2 in range(-2, 3):
            for b in range(-2, 3):
                yield CommElement.monomial({"x1": a1, "x2": a2, "Uplus": b})


def test_criterion_09_classical(report):
    bad = []
    # H on degree-0 images: the rep-field H where its slots suffice, otherwise the Euler field
    _, H3, _ = rep_fields("three_point")
    for name, spec in GENERATOR_PRESETS.items():
        if spec.total_degree != 0:
            continue
        f = evaluate_commutative(parse(spec.to_text()))
        H = H3 if set(f.slots) <= {"x1", "x2", "x3", "V"} else euler_field(f.slots)
        if not H(f).is_zero():
            bad.append(f"H f != 0 for {name}")
    E, H, F = rep_fields("two_point")
    basis = list(_basis())
    probe = [basis[7], basis[62], basis[111]]
    for D, label in ((E, "E"), (H, "H"), (F, "F")):
        for f in probe:
            for g in probe:
                if D(f * g) != D(f) * g + f * D(g):
                    bad.append(f"Leibniz fails for {label}")
    defect_count = {k: 0 for k in ("HE", "HF", "EF")}
    for f in basis:
        for k, v in sl2_defects("two_point", f).items():
            if not v.is_zero():
                defect_count[k] += 1
    for k, c in defect_count.items():
        if c:
            bad.append(f"sl2 relation {k} fails on {c} of {len(basis)} monomials")
    x = CommElement.var
    if poisson_bracket("x1", x("x2")) != x("x1") * x("x2"):
        bad.append("{x1,x2}")
    if poisson_bracket("x2", x("x1")) != -(x("x1") * x("x2")):
        bad.append("{x2,x1}")
    report(9, bad, "classical H on degree-0 images, Leibniz, sl2 composition, Poisson values")


ACCEPTANCE_CORPUS = [spec.to_text() for spec in GENERATOR_PRESETS.values()] + [
    GeneratorSpec(f).to_text() for f in F_PRESETS.values()
] + [
    "(x1+x2)^(3)",
    "x1*x2",
    "beta*x1 + x2 + beta*x3",
    "x1 - x2",
]


def test_criterion_10_parser_and_cli(report, tmp_path):
    bad = []
    for text in ACCEPTANCE_CORPUS:
        once = to_text(parse(text))
        if parse(once) != parse(text) or to_text(parse(once)) != once:
            bad.append(f"round trip {text!r}")
    exe = [sys.executable, "-m", "qlattice"]
    for argv, code in (
        (["serre", "--preset", "sl3", "--sites", "2"], 0),
        (["volkov", "two-point", "--order", "12"], 0),
        (["volkov", "three-point", "--order", "2"], 1),
        (["serre", "--preset", "bogus", "--sites", "2"], 2),
    ):
        p = subprocess.run(exe + argv, capture_output=True, text=True, cwd=ROOT)
        if p.returncode != code:
            bad.append(f"{' '.join(argv)} exited {p.returncode}, wanted {code}")
    t0 = time.perf_counter()
    p = subprocess.run(exe + ["--config", str(ROOT / "configs" / "full_suite.json")], capture_output=True, text=True, cwd=ROOT)
    dt = time.perf_counter() - t0
    try:
        rep = json.loads(p.stdout)
        keys_ok = set(rep) == {"command", "config_digest", "checks"} and all(
            set(c) == {"name", "verdict", "residual_term_count", "cut", "details"} for c in rep["checks"]
        )
        if not keys_ok:
            bad.append("suite report schema")
        any_fail = any(c["verdict"] == "fail" for c in rep["checks"])
        if p.returncode != (1 if any_fail else 0):
            bad.append(f"suite exit {p.returncode} inconsistent with verdicts")
    except json.JSONDecodeError:
        bad.append(f"suite produced no JSON (exit {p.returncode})")
    if dt >= 300:
        bad.append(f"suite took {dt:.0f}s")
    report(10, bad, f"corpus round trip, CLI exit codes and schema, full suite in one --config run ({dt:.1f}s)")
