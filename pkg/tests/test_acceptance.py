"""Acceptance suite: eight criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""

import math
import time

import numpy as np
import pytest

from expwidth.convexgeom import Disk, Polygon, Strip, breadth, diameter, point_cloud, width
from expwidth.criteria import (
    Analysis,
    EstimationParams,
    Verdict,
    breadth_criterion,
    critical_width,
    diameter_sufficient,
    theorem1_verdict,
    theorem2_verdict,
)
from expwidth.divisor import PointDistribution, geometric_grid, rotate, union
from expwidth.generators import generate
from expwidth.logmeasure import (
    LogProfile,
    check_submeasure_axioms,
    log_submeasure,
    right_log_measure,
)

PI = math.pi
RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    assert ok, RESULTS[n]


def harmonic_prefix(h: float) -> np.ndarray:
    """Independent oracle: H(m) for m = 0..h by direct summation of 1/n."""
    n = np.arange(1, int(h) + 1, dtype=float)
    return np.concatenate([[0.0], np.cumsum(1.0 / n)])


@pytest.fixture(scope="module")
def harmonic():
    return generate("arith n=10^6")


def test_criterion_1_harmonic_log_measure(harmonic):
    t0 = time.perf_counter()
    value = right_log_measure(harmonic, 10, 1e4)
    elapsed = time.perf_counter() - t0
    target = math.log(1e3)
    err = abs(value - target)
    record(1, err <= 1e-2 and elapsed < 1.0,
           f"l_Z(10, 10^4) = {value:.6f}, |. - ln 1000| = {err:.4f} (tol 1e-2), {elapsed:.3f}s")


def test_criterion_2_critical_width(harmonic):
    t0 = time.perf_counter()
    an = Analysis(harmonic)
    cw = critical_width(an, PI / 2)
    v_pi = theorem1_verdict(an, PI, PI / 2)
    v_4pi = theorem1_verdict(an, 4 * PI, PI / 2)
    elapsed = time.perf_counter() - t0
    ok = (abs(cw.value - 2 * PI) <= 0.15 and cw.converged
          and v_pi.verdict is Verdict.COMPLETE and v_4pi.verdict is Verdict.INCOMPLETE
          and elapsed < 10.0)
    record(2, ok, f"critical width {cw.value:.5f} (2pi +- 0.15), converged={cw.converged}, "
                  f"b=pi {v_pi.verdict.value}, b=4pi {v_4pi.verdict.value}, {elapsed:.2f}s")


def test_criterion_3_theorem2_boundary(harmonic):
    an = Analysis(harmonic)
    at_2pi = theorem2_verdict(an, 2 * PI, PI / 2)
    at_pi = theorem2_verdict(an, PI, PI / 2)
    bounded = at_2pi.diagnostics["continuous_rates"]
    growing = at_pi.diagnostics["continuous_rates"] + at_pi.diagnostics["ladder_rates"]
    half_ln10 = 0.5 * math.log(10)
    # The sup for b = pi is H(h) - 1 - (1/2) ln h: its per-decade increase falls short of
    # (1/2) ln 10 by the finite-horizon Euler-Maclaurin and integer-part terms (< 1e-3 relative).
    ok = (at_2pi.verdict is Verdict.INCOMPLETE and all(abs(r) < 0.1 for r in bounded)
          and at_pi.verdict is Verdict.COMPLETE and all(r >= half_ln10 * (1 - 1e-3) for r in growing))
    record(3, ok, f"b=2pi {at_2pi.verdict.value} (max rate {max(map(abs, bounded)):.2e} < 0.1), "
                  f"b=pi {at_pi.verdict.value} (min rate {min(growing):.6f} vs 0.5 ln 10 = {half_ln10:.6f})")


def test_criterion_3_oracle_rates(harmonic):
    """The continuous detector reproduces the independent harmonic-sum oracle exactly."""
    an = Analysis(harmonic)
    v = theorem2_verdict(an, PI, PI / 2)
    H = harmonic_prefix(1e6)
    grid = an.grid
    logs = np.log(grid)
    marks = [int(np.searchsorted(logs, logs[-1] - k * math.log(10) + 1e-9, side="right")) - 1 for k in range(4)]
    hs = np.floor(grid + 1e-9).astype(int)

    def sup_at(m):
        # max over grid pairs 1 <= r < R <= grid[m] of (H(R) - H(r)) - (1/2) ln(R/r)
        best = -math.inf
        for j in range(1, m + 1):
            vals = (H[hs[j]] - H[hs[:j]]) - 0.5 * (logs[j] - logs[:j])
            best = max(best, float(vals.max()))
        return best

    sups = [sup_at(m) for m in marks]
    rates = [(sups[k] - sups[k + 1]) / ((logs[marks[k]] - logs[marks[k + 1]]) / math.log(10)) for k in range(3)]
    np.testing.assert_allclose(v.diagnostics["continuous_rates"], rates, rtol=1e-9, atol=1e-9)


FIVE = {
    "harmonic": "arith n=10^6",
    "scaled harmonic (lambda=2)": "arith n=2*10^6 λ=2",
    "symmetric harmonic": "arith n=10^6 sym=1",
    "geometric 2^k": "geom ratio=2 horizon=10^6",
    "sector cloud": "sector theta=0 a=pi/4 density=1 horizon=10^6 seed=7",
}


def test_criterion_4_density_coincidence():
    lines, ok = [], True
    for name, spec in FIVE.items():
        Z = generate(spec)
        an = Analysis(Z, EstimationParams(horizon=1e6))
        rep = an.report(0.0)
        ok &= rep.relative_spread <= 0.05
        lines.append(f"{name}: spread {rep.relative_spread:.4f}")
    record(4, ok, "; ".join(lines))


def _random_finite(rng) -> PointDistribution:
    n = int(rng.integers(1, 200))
    mod = np.exp(rng.uniform(math.log(0.2), math.log(900.0), n))
    arg = rng.uniform(-PI, PI, n)
    # some points on exact axes, where Re(1/z) vanishes or ties
    axis = rng.random(n) < 0.2
    arg[axis] = rng.choice([0.0, PI / 2, PI, -PI / 2], axis.sum())
    pts = mod * np.exp(1j * arg)
    return PointDistribution(pts, rng.integers(1, 5, n))


def test_criterion_5_submeasure_axioms():
    rng = np.random.default_rng(20240605)
    grid = geometric_grid(0.1, math.exp(1 / 8), 1e3)
    worst_l2, worst_add, l1_finite = 0, 0.0, True
    for _ in range(100):
        Z = _random_finite(rng)
        theta = float(rng.uniform(-PI, PI))
        profile = LogProfile(Z)
        sub = check_submeasure_axioms(profile.table(grid, "submeasure", theta), eps=1e-9)
        right = check_submeasure_axioms(profile.table(grid, "right", theta), eps=1e-9)
        worst_l2 = max(worst_l2, sub.n_violations, right.n_violations)
        worst_add = max(worst_add, right.max_additivity_defect)
        l1_finite &= math.isfinite(sub.l1_bound)
    record(5, worst_l2 == 0 and l1_finite and worst_add <= 1e-9,
           f"100 random distributions: max [l2] violations {worst_l2}, [l1] finite={l1_finite}, "
           f"max additivity defect {worst_add:.2e} (tol 1e-9)")


def test_criterion_6_geometry_exactness():
    rng = np.random.default_rng(6)
    checks = []
    r = 1.7
    D = Disk(0.3 - 2j, r)
    thetas = rng.uniform(-10, 10, 100)
    checks.append(all(width(D, t) == 2 * r for t in thetas) and breadth(D) == diameter(D) == 2 * r)
    square = Polygon((0, 1, 1 + 1j, 1j))
    checks.append(abs(breadth(square) - 1) <= 1e-12 and abs(diameter(square) - math.sqrt(2)) <= 1e-12)
    S = Strip(0.4, 2.5)
    others = rng.uniform(-PI, PI, 100)
    checks.append(width(S, 0.4 + PI / 2) == 2.5 and all(width(S, t) == math.inf for t in others))
    exact = True
    for _ in range(100):
        k = int(rng.integers(1, 13))
        pts = list(rng.normal(size=k) + 1j * rng.normal(size=k))
        exact &= diameter(point_cloud(pts)) == max(abs(p - q) for p in pts for q in pts)
    checks.append(exact)
    names = ("disk", "square", "strip", "point clouds")
    record(6, all(checks), ", ".join(f"{n} {'ok' if c else 'BAD'}" for n, c in zip(names, checks)))


def _random_case(rng):
    kind = rng.integers(0, 3)
    h = "10^5"
    if kind == 0:
        spec = (f"arith step={rng.uniform(0.5, 2):.6f} dir={rng.uniform(-PI, PI):.6f} "
                f"sym={int(rng.integers(0, 2))} horizon={h}")
    elif kind == 1:
        spec = (f"sector theta={rng.uniform(-PI, PI):.6f} a={rng.uniform(0.2, 1.5):.6f} "
                f"density={rng.uniform(0.5, 2):.6f} horizon={h} seed={int(rng.integers(0, 1000))}")
    else:
        spec = f"arith step={rng.uniform(0.5, 2):.6f} dir={rng.uniform(-PI, PI):.6f} horizon={h}"
    return generate(spec)


def test_criterion_7_equivariance_and_monotonicity():
    rng = np.random.default_rng(77)
    params = EstimationParams(horizon=1e5)
    failures = {"rotation": 0, "b": 0, "Z": 0}
    inconclusive_after_enlarging = 0
    for _ in range(50):
        Z = _random_case(rng)
        extra = _random_case(rng)
        phi = float(rng.uniform(-PI, PI))
        theta = float(rng.uniform(-PI, PI))
        b = float(rng.uniform(0.5, 4 * PI))
        an = Analysis(Z, params)
        v = theorem1_verdict(an, b, theta).verdict
        if theorem1_verdict(Analysis(rotate(Z, phi), params), b, theta + phi).verdict is not v:
            failures["rotation"] += 1
        for b2 in (0.5 * b, 2 * b):
            v2 = theorem1_verdict(an, b2, theta).verdict
            if b2 > b and v is Verdict.INCOMPLETE and v2 is not Verdict.INCOMPLETE:
                failures["b"] += 1
            if b2 < b and v is Verdict.COMPLETE and v2 is not Verdict.COMPLETE:
                failures["b"] += 1
        if v is Verdict.COMPLETE:
            w = theorem1_verdict(Analysis(union(Z, extra), params), b, theta).verdict
            if w is not Verdict.COMPLETE:
                failures["Z"] += 1
                inconclusive_after_enlarging += w is Verdict.INCONCLUSIVE
    record(7, sum(failures.values()) == 0,
           f"50 cases: rotation mismatches {failures['rotation']}, b-monotonicity breaks {failures['b']}, "
           f"Z-enlargement breaks {failures['Z']} ({inconclusive_after_enlarging} inconclusive)")


def test_criterion_8_degenerate_inputs(imaginary):
    empty = PointDistribution()
    rep = Analysis(empty).report(0.0)
    verdicts = {
        "theorem1": theorem1_verdict(empty, 1.0, 0.0).verdict,
        "theorem2": theorem2_verdict(empty, 1.0, 0.0).verdict,
        "corollary3": breadth_criterion(empty, 1.0).verdict,
        "corollary4": diameter_sufficient(empty, 1.0).verdict,
    }
    empty_ok = (all(v == 0 for v in rep.variants().values())
                and all(v in (Verdict.INCOMPLETE, Verdict.NO_CONCLUSION) for v in verdicts.values()))
    an = Analysis(imaginary)
    table = an.submeasure_table(PI / 2 - PI / 2)
    grid = an.grid
    direct = [log_submeasure(imaginary, grid[i], grid[j]) for i in range(0, grid.size, 7)
              for j in range(i + 1, grid.size, 5)]
    imag_ok = table.is_zero() and all(x == 0.0 for x in direct) and critical_width(an, PI / 2).value == 0.0
    record(8, empty_ok and imag_ok,
           f"empty: ln-dens {rep.estimate}, verdicts {sorted(v.value for v in verdicts.values())}; "
           f"imaginary at theta=pi/2: L identically 0 = {imag_ok}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
