"""Completeness criteria for exponential systems in terms of width, breadth and diameter.

Every criterion compares a logarithmic block density (or the growth of a
logarithmic submeasure) with b / (2 pi). Those are limits r -> oo estimated at
a finite horizon, so verdicts are three-valued: a binary answer is only given
when the estimates have converged and the margin clears the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .divisor import PointDistribution, UpperDensity, geometric_grid, upper_density
from .errors import HypothesisViolation, InsufficientGrid
from .logmeasure import (
    DEFAULT_BASE,
    DEFAULT_HORIZON,
    DEFAULT_RATIO,
    DEFAULT_TAIL_FRACTION,
    DensityReport,
    LogProfile,
    RedhefferCheck,
    density_report,
    fmt,
    redheffer_sufficient,
    running_sup,
)

TWO_PI = 2.0 * math.pi


class Verdict(str, Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    INCONCLUSIVE = "inconclusive"
    NO_CONCLUSION = "no-conclusion"


@dataclass(frozen=True)
class EstimationParams:
    grid_base: float = DEFAULT_BASE
    grid_ratio: float = DEFAULT_RATIO
    horizon: float = DEFAULT_HORIZON
    tail_fraction: float = DEFAULT_TAIL_FRACTION
    # block densities must agree within this relative spread
    tolerance: float = 0.05
    spread_floor: float = 1.0
    growth_tol: float = 1e-6
    # a density margin is decisive beyond max(decision_rel_tol * estimate, spread, decision_abs_tol)
    decision_rel_tol: float = 0.02
    decision_abs_tol: float = 1e-9
    # sup detectors: divergent above divergence_margin per decade, bounded below bounded_rate
    divergence_margin: float = 1.0
    bounded_rate: float = 0.1
    detector_decades: int = 3
    density_slope_threshold: float = 0.1
    theta_steps: int = 720
    redheffer_half_angle: float = math.pi / 4
    redheffer_sum_tol: float = 0.05

    def __post_init__(self):
        if not self.grid_ratio > 1:
            raise ValueError("grid ratio must exceed 1")
        if not self.horizon >= self.grid_base * self.grid_ratio**3:
            raise ValueError("horizon must be at least base * ratio**3")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.theta_steps >= 1:
            raise ValueError("theta_steps must be >= 1")


@dataclass
class CompletenessVerdict:
    verdict: Verdict
    theorem: str
    clause: str
    b: float
    theta: float | None
    margin: float
    estimate: float
    diagnostics: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    reason: str = ""

    CSV_HEADER = ("theorem", "clause", "b", "theta", "verdict", "margin", "flags")

    def csv_row(self) -> list[str]:
        flags = ";".join(f"{k}={v}" for k, v in sorted(self.flags.items()))
        theta = "" if self.theta is None else fmt(self.theta)
        return [self.theorem, self.clause, fmt(self.b), theta, self.verdict.value,
                fmt(self.margin), flags]

    def summary(self) -> str:
        where = "" if self.theta is None else f", theta={fmt(self.theta)}"
        text = (f"{self.theorem} (b={fmt(self.b)}{where}): {self.verdict.value}, "
                f"margin {fmt(self.margin)}\n  {self.clause}")
        if self.reason:
            text += f"\n  reason: {self.reason}"
        return text


class Analysis:
    """Per-distribution cache shared by the criteria.

    Holds the radial grid, the upper density and block-density reports of
    rotations of Z (keyed by the rotation angle).
    """

    def __init__(self, Z: PointDistribution, params: EstimationParams | None = None):
        self.Z = Z
        self.params = params or EstimationParams()
        p = self.params
        horizon = min(p.horizon, Z.truncation_radius)
        if not horizon > p.grid_base:
            raise InsufficientGrid(f"horizon {horizon:g} does not exceed the grid base {p.grid_base:g}")
        self.grid = geometric_grid(p.grid_base, p.grid_ratio, horizon)
        self.profile = LogProfile(Z)
        self._density: UpperDensity | None = None
        self._reports: dict[float, DensityReport] = {}

    @property
    def upper_density(self) -> UpperDensity:
        if self._density is None:
            self._density = upper_density(self.Z, 1.0, self.grid, self.params.tail_fraction,
                                          self.params.density_slope_threshold)
        return self._density

    def report(self, phi: float) -> DensityReport:
        """Block-density report of the submeasure of e^{i phi} Z."""
        key = float(phi)
        rep = self._reports.get(key)
        if rep is None:
            p = self.params
            table = self.profile.table(self.grid, "submeasure", phi)
            rep = density_report(table, p.tail_fraction, p.tolerance, p.spread_floor, p.growth_tol)
            self._reports[key] = rep
        return rep

    def submeasure_table(self, phi: float):
        return self.profile.table(self.grid, "submeasure", phi)


def _analysis(Z, params) -> Analysis:
    if isinstance(Z, Analysis):
        return Z
    return Analysis(Z, params)


def _decision_tol(rep: DensityReport, p: EstimationParams) -> float:
    return max(p.decision_rel_tol * abs(rep.estimate), rep.spread, p.decision_abs_tol)


def _decide(rep: DensityReport, threshold: float, p: EstimationParams) -> tuple[Verdict, float, str]:
    margin = rep.estimate - threshold
    tol = _decision_tol(rep, p)
    if not rep.converged:
        return Verdict.INCONCLUSIVE, margin, "block densities have not converged at the horizon"
    if margin > tol:
        return Verdict.COMPLETE, margin, ""
    if margin < -tol:
        return Verdict.INCOMPLETE, margin, ""
    return Verdict.INCONCLUSIVE, margin, f"|margin| <= {fmt(tol)}: no claim at the threshold"


def _report_diagnostics(rep: DensityReport, ud: UpperDensity) -> dict:
    d = {f"ln_dens_{k}": v for k, v in rep.variants().items()}
    d.update(
        relative_spread=rep.relative_spread,
        relative_drift=rep.relative_drift,
        tail_slope=rep.tail_slope,
        converged=rep.converged,
        horizon=rep.horizon,
        upper_density=ud.estimate,
        upper_density_diverging=ud.diverging,
    )
    return d


# -- Theorem 1 -------------------------------------------------------------------


@dataclass
class CriticalWidth:
    value: float
    report: DensityReport | None
    upper_density: UpperDensity

    @property
    def converged(self) -> bool:
        return self.report is None or self.report.converged


def critical_width(Z, theta: float, params: EstimationParams | None = None) -> CriticalWidth:
    """2 pi * ln-dens(e^{i(pi/2 - theta)} Z): the width below which Exp^Z is complete.

    +inf when the upper density of Z looks infinite.
    """
    an = _analysis(Z, params)
    if an.Z.is_empty():
        raise ValueError("critical_width needs a nonempty distribution")
    ud = an.upper_density
    if ud.diverging:
        return CriticalWidth(math.inf, None, ud)
    rep = an.report(math.pi / 2 - theta)
    return CriticalWidth(TWO_PI * rep.estimate, rep, ud)


_T1_COMPLETE = ("I-II: Exp^Z complete in Hol(D) for every convex domain D with width_D(theta) <= b, "
                "and in C(K)∩Hol(int K) for every convex compact K with width_K(theta) < b")
_T1_INCOMPLETE = ("not I-II: Exp^Z is not complete for some convex domain D with "
                  "width_D(theta) <= b (and some compact K with width_K(theta) < b)")
_T1_OPEN = "III undecided: ln-dens of e^{i(pi/2-theta)}Z versus b/(2 pi)"


def theorem1_verdict(Z, b: float, theta: float,
                     params: EstimationParams | None = None) -> CompletenessVerdict:
    if not (b > 0 and math.isfinite(b)):
        raise ValueError(f"b must be a positive real, got {b}")
    an = _analysis(Z, params)
    ud = an.upper_density
    threshold = b / TWO_PI
    if ud.diverging:
        return CompletenessVerdict(
            Verdict.COMPLETE, "theorem1", _T1_COMPLETE + " [III: infinite upper density]",
            b, theta, math.inf, math.inf,
            diagnostics={"upper_density": ud.estimate, "upper_density_slope": ud.tail_slope},
            flags={"density": "infinite"},
        )
    rep = an.report(math.pi / 2 - theta)
    verdict, margin, reason = _decide(rep, threshold, an.params)
    clause = {Verdict.COMPLETE: _T1_COMPLETE, Verdict.INCOMPLETE: _T1_INCOMPLETE}.get(verdict, _T1_OPEN)
    return CompletenessVerdict(
        verdict, "theorem1", clause, b, theta, margin, rep.estimate,
        diagnostics=_report_diagnostics(rep, ud),
        flags={"density": "finite", "converged": str(rep.converged).lower()},
        reason=reason,
    )


# -- Theorem 2 ---------------------------------------------------------------------


class Growth(str, Enum):
    DIVERGENT = "divergent"
    BOUNDED = "bounded"
    UNDETERMINED = "undetermined"


@dataclass
class SupDetector:
    """Per-decade growth of a running supremum over the last decades of the horizon."""

    name: str
    rates: list[float]
    values: list[float]
    growth: Growth

    def margin(self, divergence_margin: float) -> float:
        if self.growth is Growth.DIVERGENT:
            return min(self.rates) - divergence_margin
        return max(self.rates) - divergence_margin


def _classify(rates, p: EstimationParams) -> Growth:
    if all(r > p.divergence_margin for r in rates):
        return Growth.DIVERGENT
    if all(r < p.bounded_rate for r in rates):
        return Growth.BOUNDED
    return Growth.UNDETERMINED


def _decade_marks(values_at, log_positions, horizon_log, decades):
    """Running-sup values at the last position <= horizon / 10^k, k = 0..decades."""
    out = []
    for k in range(decades + 1):
        limit = horizon_log - k * math.log(10.0) + 1e-9
        idx = int(np.searchsorted(log_positions, limit, side="right")) - 1
        out.append(idx)
    return out


def continuous_detector(an: Analysis, b: float, theta: float) -> SupDetector:
    """Growth of sup over grid pairs 1 <= r < R <= h of L(r, R) - (b / 2pi) ln(R / r)."""
    p = an.params
    table = an.submeasure_table(math.pi / 2 - theta)
    i1 = int(np.searchsorted(table.grid, 1.0 - 1e-12, side="left"))
    S = running_sup(table, b / TWO_PI, min_index=i1)
    logs = np.log(table.grid)
    marks = _decade_marks(S, logs, logs[-1], p.detector_decades)
    if marks[-1] <= i1:
        raise InsufficientGrid(
            f"the sup detector needs {p.detector_decades} decades above r = 1 below the horizon"
        )
    rates = [float((S[marks[k]] - S[marks[k + 1]]) / ((logs[marks[k]] - logs[marks[k + 1]]) / math.log(10)))
             for k in range(p.detector_decades)]
    return SupDetector("continuous", rates, [float(S[m]) for m in marks], _classify(rates, p))


def ladder_detector(an: Analysis, b: float, theta: float) -> SupDetector:
    """Growth of max over 0 <= n < N of L(e^n, e^N) - (b / 2pi)(N - n), running in N."""
    p = an.params
    horizon = an.grid[-1]
    n_max = int(math.floor(math.log(horizon) + 1e-12))
    radii = np.exp(np.arange(n_max + 1, dtype=float))
    radii = np.minimum(radii, an.Z.truncation_radius)
    right, left = an.profile.cumulative(radii, math.pi / 2 - theta)
    L = np.fmax(right[None, :] - right[:, None], left[None, :] - left[:, None])
    steps = np.arange(n_max + 1)
    shifted = L - (b / TWO_PI) * (steps[None, :] - steps[:, None])
    shifted[np.tril_indices(n_max + 1)] = -np.inf
    T = shifted.max(axis=0)
    U = np.maximum.accumulate(T)
    marks = _decade_marks(U, steps.astype(float), math.log(horizon), p.detector_decades)
    if marks[-1] < 1 or len(set(marks)) < len(marks):
        raise InsufficientGrid("the ladder detector needs three decades of e^N radii")
    rates = [float((U[marks[k]] - U[marks[k + 1]]) / ((marks[k] - marks[k + 1]) / math.log(10)))
             for k in range(p.detector_decades)]
    return SupDetector("ladder", rates, [float(U[m]) for m in marks], _classify(rates, p))


_T2_COMPLETE = ("I and IV: Exp^Z complete in C(K)∩Hol(int K) for every convex compact K with "
                "width_K(theta) <= b, and on the closed strip of width b in direction theta")
_T2_INCOMPLETE = ("not I/IV: Exp^Z is not complete on some convex compact K with width_K(theta) <= b "
                  "(the closed strip of width b in direction theta)")
_T2_OPEN = "II/III undecided: sup of L - (b/2pi) ln(R/r) neither clearly divergent nor bounded"


def theorem2_verdict(Z, b: float, theta: float, redheffer: str = "check",
                     params: EstimationParams | None = None) -> CompletenessVerdict:
    """Divergence test of sup (L(r,R) - (b/2pi) ln(R/r)) in continuous and ladder form.

    ``redheffer`` is ``"check"`` to test the finite-Redheffer-density
    hypothesis near theta and theta - pi heuristically, or ``"assert"`` to
    take it as given.
    """
    if not (b >= 0 and math.isfinite(b)):
        raise ValueError(f"b must be a nonnegative real, got {b}")
    if redheffer not in ("check", "assert"):
        raise ValueError("redheffer must be 'check' or 'assert'")
    an = _analysis(Z, params)
    p = an.params
    flags: dict[str, str] = {}
    checks: list[RedhefferCheck] = []
    if redheffer == "assert":
        flags["redheffer"] = "asserted-by-user"
    else:
        checks = [redheffer_sufficient(an.Z, direction, p.redheffer_half_angle, p.redheffer_sum_tol)
                  for direction in (theta, theta - math.pi)]
        ok = all(c.finite for c in checks)
        flags["redheffer"] = "heuristically-confirmed" if ok else "unknown"
        flags["redheffer_conditions"] = "/".join(c.status.value for c in checks)

    cont = continuous_detector(an, b, theta)
    ladder = ladder_detector(an, b, theta)
    flags["continuous"] = cont.growth.value
    flags["ladder"] = ladder.growth.value
    diagnostics = {
        "continuous_rates": cont.rates,
        "ladder_rates": ladder.rates,
        "continuous_sup": cont.values,
        "ladder_sup": ladder.values,
    }
    for c in checks:
        diagnostics[f"redheffer_{fmt(c.theta)}"] = c.status.value

    reason = ""
    if flags["redheffer"] == "unknown":
        verdict = Verdict.INCONCLUSIVE
        reason = "finite Redheffer density near theta and theta - pi could not be confirmed"
    elif cont.growth is ladder.growth is Growth.DIVERGENT:
        verdict = Verdict.COMPLETE
    elif cont.growth is ladder.growth is Growth.BOUNDED:
        verdict = Verdict.INCOMPLETE
    else:
        verdict = Verdict.INCONCLUSIVE
        reason = (f"continuous detector {cont.growth.value}, ladder detector {ladder.growth.value}")
    if verdict is Verdict.COMPLETE:
        margin = min(cont.margin(p.divergence_margin), ladder.margin(p.divergence_margin))
    else:
        margin = max(cont.margin(p.divergence_margin), ladder.margin(p.divergence_margin))
    clause = {Verdict.COMPLETE: _T2_COMPLETE, Verdict.INCOMPLETE: _T2_INCOMPLETE}.get(verdict, _T2_OPEN)
    return CompletenessVerdict(verdict, "theorem2", clause, b, theta, margin,
                               max(cont.rates), diagnostics, flags, reason)


# -- Corollaries ---------------------------------------------------------------------


def theta_grid(steps: int) -> np.ndarray:
    """``steps`` directions j*pi/steps covering [0, pi); ln-dens is pi-periodic in theta."""
    return np.arange(steps) * (math.pi / steps)


def direction_profile(Z, params: EstimationParams | None = None):
    """Block-density reports of e^{i theta} Z over the theta grid."""
    an = _analysis(Z, params)
    thetas = theta_grid(an.params.theta_steps)
    return an, thetas, [an.report(float(t)) for t in thetas]


_C3_COMPLETE = ("I-II: Exp^Z complete in Hol(D) for every convex domain of breadth <= b and in "
                "C(K)∩Hol(int K) for every convex compact K of breadth < b")
_C3_INCOMPLETE = "not I-II: some convex domain of breadth <= b carries an incomplete Exp^Z"
_C3_OPEN = "III undecided: inf over theta of ln-dens(e^{i theta}Z) versus b/(2 pi)"


def breadth_criterion(Z, b: float, params: EstimationParams | None = None) -> CompletenessVerdict:
    """Compare inf over the theta grid of ln-dens(e^{i theta} Z) with b / 2pi.

    Raises HypothesisViolation when Z appears to have infinite upper density.
    """
    if not (b > 0 and math.isfinite(b)):
        raise ValueError(f"b must be a positive real, got {b}")
    an = _analysis(Z, params)
    p = an.params
    ud = an.upper_density
    if ud.diverging:
        raise HypothesisViolation(
            "the breadth criterion needs finite upper density; the estimate diverges "
            f"(tail slope {ud.tail_slope:.3g})"
        )
    _, thetas, reports = direction_profile(an)
    threshold = b / TWO_PI
    estimates = np.array([r.estimate for r in reports])
    k = int(np.argmin(estimates))
    rep = reports[k]
    verdict, margin, reason = _decide(rep, threshold, p)
    unconverged = [float(t) for t, r in zip(thetas, reports) if not r.converged]
    if verdict is Verdict.COMPLETE and unconverged:
        verdict = Verdict.INCONCLUSIVE
        reason = f"{len(unconverged)} directions have not converged"
    clause = {Verdict.COMPLETE: _C3_COMPLETE, Verdict.INCOMPLETE: _C3_INCOMPLETE}.get(verdict, _C3_OPEN)
    return CompletenessVerdict(
        verdict, "corollary3", clause, b, None, margin, float(estimates[k]),
        diagnostics={"argmin_theta": float(thetas[k]), "theta_steps": p.theta_steps,
                     "unconverged_directions": len(unconverged),
                     **_report_diagnostics(rep, ud)},
        flags={"theta_steps": str(p.theta_steps)},
        reason=reason,
    )


_C4_COMPLETE = ("Exp^Z complete in C(K)∩Hol(int K) for every convex compact K of diameter < b "
                "and in Hol(D) for every convex domain D of diameter <= b")
_C4_NONE = "no conclusion: the diameter condition is only sufficient"


def diameter_sufficient(Z, b: float, params: EstimationParams | None = None) -> CompletenessVerdict:
    """Sufficient diameter condition: infinite upper density or sup_theta ln-dens >= b / 2pi."""
    if not (b > 0 and math.isfinite(b)):
        raise ValueError(f"b must be a positive real, got {b}")
    an = _analysis(Z, params)
    ud = an.upper_density
    if ud.diverging:
        return CompletenessVerdict(Verdict.COMPLETE, "corollary4", _C4_COMPLETE + " [infinite upper density]",
                                   b, None, math.inf, math.inf,
                                   diagnostics={"upper_density": ud.estimate},
                                   flags={"density": "infinite"})
    _, thetas, reports = direction_profile(an)
    threshold = b / TWO_PI
    estimates = np.array([r.estimate for r in reports])
    k = int(np.argmax(estimates))
    rep = reports[k]
    verdict, margin, reason = _decide(rep, threshold, an.params)
    if verdict is not Verdict.COMPLETE:
        verdict = Verdict.NO_CONCLUSION
    clause = _C4_COMPLETE if verdict is Verdict.COMPLETE else _C4_NONE
    return CompletenessVerdict(
        verdict, "corollary4", clause, b, None, margin, float(estimates[k]),
        diagnostics={"argmax_theta": float(thetas[k]), "theta_steps": an.params.theta_steps,
                     **_report_diagnostics(rep, ud)},
        flags={"density": "finite", "theta_steps": str(an.params.theta_steps)},
        reason=reason,
    )
