"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for just the summary lines.
"""

from __future__ import annotations

import sys
from functools import lru_cache

import pytest

from weilcalc.harness import SuiteConfig, SuiteResult, run_suite
from weilcalc.weil import FLOAT, RATIONAL

SEED = 0


@lru_cache(maxsize=None)
def suite(name: str, trials: int | None = None, kind: str | None = None, degrees: tuple | None = None,
          m: int | None = None, tol: float | None = None) -> SuiteResult:
    return run_suite(SuiteConfig(name, m=m, degrees=degrees, trials=trials, seed=SEED, tol=tol, kind=kind))


def check_stats(r: SuiteResult, prefix: str) -> tuple[int, int, float]:
    """(trials, failures, max residual) over the checks whose name starts with ``prefix``."""
    rows = [v for k, v in r.checks.items() if k.startswith(prefix)]
    return (sum(v["trials"] for v in rows), sum(v["failures"] for v in rows),
            max((v["max_residual"] for v in rows), default=0.0))


def report(capsys, number: int, title: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} -- {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def criterion_1(capsys=None):
    r = suite("algebra-pullback")
    dim = r.checks["diagram-is-limit"]["pullback_dim"]
    ok = r.failures == 0 and dim == 5 and r.elapsed < 1.0
    return report(capsys, 1, "quasi-colimit diagram is a pullback", ok,
                  f"pullback_dim={dim}, failures={r.failures}, {r.elapsed:.2f}s (< 1 s)")


def criterion_2(capsys=None):
    r = suite("taylor-roundtrip", trials=1000, kind=RATIONAL)
    n, fails, _ = check_stats(r, "cube-table-cube")
    n2, fails2, _ = check_stats(r, "table-cube-table")
    ok = n == 1000 and fails == fails2 == 0 and r.elapsed < 5.0
    return report(capsys, 2, "Taylor tables round-trip exactly", ok,
                  f"{n} random tables (n <= 4, m <= 3), {fails + fails2} mismatches, {r.elapsed:.2f}s (< 5 s)")


def criterion_3(capsys=None):
    r = suite("taylor-roundtrip", trials=1000, kind=RATIONAL)
    n, fails, res = check_stats(r, "D(D_")
    ok = n == 2000 and fails == 0 and res == 0
    return report(capsys, 3, "D(D_2 g) = D(D_1 g) = b_12 on microsquares", ok,
                  f"{n // 2} microsquares, {fails} mismatches, exact")


def criterion_4(capsys=None):
    exact = suite("general-jacobi", trials=100, kind=RATIONAL)
    flt = suite("general-jacobi", trials=100, kind=FLOAT, tol=1e-9)
    n, fails, res = check_stats(exact, "residual")
    nf, failsf, resf = check_stats(flt, "residual")
    ok = (fails == 0 and res == 0 and failsf == 0 and resf <= 1e-9
          and exact.elapsed < 10 and flt.elapsed < 10 and n == nf == 100)
    return report(capsys, 4, "general Jacobi identity of strong differences", ok,
                  f"rational residual {res} over {n} families, float max {resf:.2e} (<= 1e-9), "
                  f"{exact.elapsed:.2f}s / {flt.elapsed:.2f}s (< 10 s)")


def criterion_5(capsys=None):
    r = suite("oracle-compare")
    row = r.checks["calibration-abs"]
    ok = row["failures"] == 0 and row["max_residual"] <= 1e-10 and row["trials"] == 20
    return report(capsys, 5, "vector-field bracket calibration against X.grad Y - Y.grad X", ok,
                  f"sign {row['frozen_sign']:+d}, max abs error {row['max_residual']:.2e} at {row['trials']} points")


def criterion_6(capsys=None):
    a = suite("bracket-antisym")  # 50 float pairs, 200 exact rational trials
    b = suite("fn-antisym", trials=50, tol=1e-9)
    na, fa, ra = check_stats(a, "antisym(")
    nb, fb, rb = check_stats(b, "graded-antisym(")
    ok = fa == fb == 0 and max(ra, rb) <= 1e-9 and na == nb == 9 * 50
    return report(capsys, 6, "antisymmetry of [,]_L and graded antisymmetry of [,]_FN", ok,
                  f"p,q <= 2 with 50 pairs each: [,]_L max {ra:.2e}, [,]_FN max {rb:.2e} (<= 1e-9)")


def criterion_7(capsys=None):
    a = suite("bracket-jacobi", trials=20, tol=1e-8)
    b = suite("fn-jacobi", trials=20, tol=1e-8)
    na, fa, ra = check_stats(a, "jacobi(")
    _, fal, ral = check_stats(a, "jacobi-aligned(")
    nb, fb, rb = check_stats(b, "graded-jacobi(")
    t111 = b.checks["graded-jacobi(1,1,1)"]["elapsed"]
    failing = sorted(k[len("jacobi"):] for k, v in a.checks.items() if k.startswith("jacobi(") and v["failures"])
    ok = fa == fb == 0 and max(ra, rb) <= 1e-8 and t111 < 60
    detail = (f"[,]_L Jacobi max {ra:.2e} ({fa}/{na} failing, at {', '.join(failing) or 'none'}); "
              f"with sigma_(p+q,r) on the third term max {ral:.2e} ({fal} failing); "
              f"[,]_FN graded Jacobi max {rb:.2e} ({fb}/{nb} failing), (1,1,1) in {t111:.1f}s (< 60 s)")
    return report(capsys, 7, "Jacobi identities of [,]_L and [,]_FN", ok, detail)


FULL_GRID_EXTRA = (2, 2, 2)  # beyond the default cap p+q+r <= 5


def criterion_8(capsys=None):
    a = suite("lie-hat-bracket")
    a6 = suite("lie-hat-bracket", trials=1, degrees=FULL_GRID_EXTRA)
    b = suite("lie-bracket-fn")
    b6 = suite("lie-bracket-fn", trials=1, degrees=FULL_GRID_EXTRA)
    na, fa, ra = check_stats(a, "statement(")
    na6, fa6, ra6 = check_stats(a6, "statement(")
    _, fr, rr = check_stats(a, "reparametrized(")
    _, fr6, rr6 = check_stats(a6, "reparametrized(")
    nb, fb, rb = check_stats(b, "statement(")
    nb6, fb6, rb6 = check_stats(b6, "statement(")
    fa, ra, fb, rb = fa + fa6, max(ra, ra6), fb + fb6, max(rb, rb6)
    ok = fa == fb == 0 and max(ra, rb) <= 1e-8
    detail = (f"L^ identity max {ra:.2e} ({fa}/{na + na6} failing); with the swapped composite realigned by "
              f"sigma^(+r)_(p,q) instead of signed: max {max(rr, rr6):.2e} ({fr + fr6} failing); "
              f"L identity on forms max {rb:.2e} ({fb}/{nb + nb6} failing); (p,q,r) <= (2,2,2)")
    return report(capsys, 8, "Lie derivation of brackets", ok, detail)


def criterion_9(capsys=None):
    r = suite("form-algebra", trials=100, tol=1e-10)
    names = ["tensor-homogeneous", "tensor-associative", "alternation-alternates", "A(p,q+r)=A(p,q,r)",
             "A(p+q,r)=A(p,q,r)", "wedge-associative", "product-rule", "wedge-rule"]
    rows = {k: r.checks[k] for k in names}
    worst = max(v["max_residual"] for v in rows.values())
    fails = sum(v["failures"] for v in rows.values())
    enough = all(v["trials"] >= 100 for k, v in rows.items() if k != "tensor-homogeneous")
    ok = fails == 0 and worst <= 1e-10 and enough
    return report(capsys, 9, "tensor / alternation / wedge algebra and Lie derivation rules", ok,
                  f"{len(names)} identities x 100 trials, max residual {worst:.2e} (<= 1e-10)")


def criterion_10(capsys=None):
    r = suite("oracle-compare")
    n, fails, res = check_stats(r, "fn-vs-classical(")
    ok = fails == 0 and res <= 1e-6
    return report(capsys, 10, "FN bracket against the coordinate formula", ok,
                  f"(p,q) in (0,0),(1,0),(1,1): {n} probes on fixtures and random forms, max rel error {res:.2e}")


def criterion_11(capsys=None):
    r = suite("bracket-antisym")
    n, fails, res = check_stats(r, "sum-fiberwise=sum-D(2)")
    n2, fails2, _ = check_stats(r, "projection-law")
    ok = fails == fails2 == 0 and res == 0 and n >= 200
    return report(capsys, 11, "sum of icons via D(2) equals fiberwise sum; projection law", ok,
                  f"{n} exact rational trials, {fails + fails2} mismatches")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_acceptance(criterion, capsys):
    assert criterion(capsys)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
