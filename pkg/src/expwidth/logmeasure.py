"""Logarithmic measures of point distributions and their block densities.

For a distribution Z and an interval (r, R]:

* the right measure sums Re+(1/z) over r < |z| <= R,
* the left measure is the right measure of -Z,
* the submeasure L_Z is the larger of the two.

Interval functions are sampled on a geometric radial grid into an
:class:`IntervalMeasureTable`; :func:`density_report` turns a table into the
four block-density estimates together with their spread and tail trend.
Limits r -> oo are estimated at a finite horizon and every estimate says so.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .angles import unit
from .divisor import PointDistribution, geometric_grid, rotate, sector_part
from .errors import HorizonExceeded, InsufficientGrid, InvalidHalfAngle, InvalidInterval

DEFAULT_BASE = 1.0
DEFAULT_RATIO = math.exp(1.0 / 8.0)
DEFAULT_HORIZON = 1e6
DEFAULT_TAIL_FRACTION = 0.3

PROVENANCES = ("right", "left", "submeasure", "user-supplied")


# -- measures on a distribution ----------------------------------------------


def _check_interval(Z: PointDistribution, r: float, R: float) -> None:
    if not (0 < r < R):
        raise InvalidInterval(f"need 0 < r < R, got ({r}, {R}]")
    if R > Z.truncation_radius * (1 + 1e-12):
        raise HorizonExceeded(
            f"R = {R:g} exceeds the truncation radius {Z.truncation_radius:g} of the distribution"
        )


def _annulus_inverses(Z: PointDistribution, r: float, R: float):
    lo, hi = np.searchsorted(Z.moduli, [r, R], side="right")
    return 1.0 / Z.points[lo:hi], Z.multiplicities[lo:hi]


def _positive_sum(values: np.ndarray, mult: np.ndarray) -> float:
    # fsum is correctly rounded, so the result does not depend on point order
    return math.fsum(mult * np.maximum(values, 0.0))


def right_log_measure(Z: PointDistribution, r: float, R: float) -> float:
    """Sum of Re+(1/z) over points with r < |z| <= R, counted with multiplicity."""
    _check_interval(Z, r, R)
    inv, mult = _annulus_inverses(Z, r, R)
    return _positive_sum(inv.real, mult)


def left_log_measure(Z: PointDistribution, r: float, R: float) -> float:
    """Right logarithmic measure of -Z."""
    _check_interval(Z, r, R)
    inv, mult = _annulus_inverses(Z, r, R)
    return _positive_sum(-inv.real, mult)


def log_submeasure(Z: PointDistribution, r: float, R: float) -> float:
    _check_interval(Z, r, R)
    inv, mult = _annulus_inverses(Z, r, R)
    return max(_positive_sum(inv.real, mult), _positive_sum(-inv.real, mult))


class LogProfile:
    """Cumulative right/left logarithmic sums of a distribution and its rotations.

    Rotating Z leaves every |z| unchanged, so the assignment of points to
    grid shells is computed once. For e^{i theta} Z the per-point value is
    x = Re(e^{-i theta} / z); the right and left sums of a shell are
    (sum|x| + sum x) / 2 and (sum|x| - sum x) / 2, and sum x is linear in
    (cos theta, sin theta), so each direction costs one pass over the points.
    """

    def __init__(self, Z: PointDistribution):
        self.Z = Z
        nonzero = Z.moduli > 0
        self._moduli = Z.moduli[nonzero]
        mult = Z.multiplicities[nonzero].astype(float)
        inv = 1.0 / Z.points[nonzero]
        self._re = mult * inv.real
        self._im = mult * inv.imag
        self._shells: dict[bytes, tuple] = {}

    def _shell_data(self, grid: np.ndarray):
        key = grid.tobytes()
        data = self._shells.get(key)
        if data is None:
            # shell k holds r_{k-1} < |z| <= r_k; shell len(grid) lies beyond the grid
            labels = np.searchsorted(grid, self._moduli, side="left")
            n = grid.size + 1
            data = (labels, np.bincount(labels, self._re, n), np.bincount(labels, self._im, n))
            self._shells[key] = data
        return data

    def cumulative(self, grid, theta: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """Right and left sums over 0 < |z| <= r for each grid radius r, for e^{i theta} Z."""
        grid = np.asarray(grid, dtype=float)
        labels, lin_re, lin_im = self._shell_data(grid)
        u = unit(-theta)
        c, s = u.real, u.imag
        if s == 0:
            x = self._re * c
        elif c == 0:
            x = -self._im * s
        else:
            x = c * self._re - s * self._im
        n = grid.size + 1
        total = np.bincount(labels, np.abs(x), n)
        linear = c * lin_re - s * lin_im
        right = np.maximum(0.5 * (total + linear), 0.0)
        left = np.maximum(0.5 * (total - linear), 0.0)
        return np.cumsum(right)[:-1], np.cumsum(left)[:-1]

    def table(self, grid, kind: str = "submeasure", theta: float = 0.0) -> "IntervalMeasureTable":
        grid = np.asarray(grid, dtype=float)
        if grid[-1] > self.Z.truncation_radius * (1 + 1e-12):
            raise HorizonExceeded(
                f"grid reaches {grid[-1]:g}, beyond truncation radius {self.Z.truncation_radius:g}"
            )
        right, left = self.cumulative(grid, theta)
        if kind == "right":
            values = _differences(right)
        elif kind == "left":
            values = _differences(left)
        elif kind == "submeasure":
            values = np.fmax(_differences(right), _differences(left))
        else:
            raise ValueError(f"unknown table kind {kind!r}")
        return IntervalMeasureTable(grid, values, kind)


def _differences(cum: np.ndarray) -> np.ndarray:
    values = cum[None, :] - cum[:, None]
    values[np.tril_indices(len(cum))] = np.nan
    # cumulative sums are nondecreasing, so any negative entry is rounding
    return np.where(np.isnan(values), np.nan, np.maximum(values, 0.0))


# -- interval tables ------------------------------------------------------------


@dataclass
class IntervalMeasureTable:
    """Values l(r_i, r_j) of an interval function for i < j on an increasing grid.

    ``values[i, j]`` holds l(r_i, r_j); entries with i >= j are NaN.
    """

    grid: np.ndarray
    values: np.ndarray
    provenance: str = "user-supplied"

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.array(self.values, dtype=float)
        n = self.grid.size
        if n < 2:
            raise InsufficientGrid("a table needs at least two grid radii")
        if np.any(np.diff(self.grid) <= 0) or self.grid[0] <= 0:
            raise InvalidInterval("grid must be positive and strictly increasing")
        if self.values.shape != (n, n):
            raise ValueError(f"values must be {n}x{n}")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        self.values[np.tril_indices(n)] = np.nan
        upper = self.values[np.triu_indices(n, 1)]
        if np.any(~np.isfinite(upper)) or np.any(upper < 0):
            raise ValueError("table values must be finite and >= 0")

    @classmethod
    def from_function(cls, grid, fn: Callable[[float, float], float],
                      provenance: str = "user-supplied") -> "IntervalMeasureTable":
        grid = np.asarray(grid, dtype=float)
        n = grid.size
        values = np.full((n, n), np.nan)
        for i in range(n):
            for j in range(i + 1, n):
                values[i, j] = fn(grid[i], grid[j])
        return cls(grid, values, provenance)

    @classmethod
    def from_distribution(cls, Z: PointDistribution, grid=None, kind: str = "submeasure",
                          theta: float = 0.0) -> "IntervalMeasureTable":
        if grid is None:
            grid = default_grid(Z)
        return LogProfile(Z).table(grid, kind, theta)

    @property
    def size(self) -> int:
        return self.grid.size

    @property
    def ratio(self) -> float | None:
        """Common ratio of the grid, or None when the grid is not geometric."""
        q = self.grid[1:] / self.grid[:-1]
        if np.allclose(q, q[0], rtol=1e-9, atol=0):
            return float(np.exp(np.mean(np.log(q))))
        return None

    @property
    def decades(self) -> float:
        return math.log10(self.grid[-1] / self.grid[0])

    def log_lengths(self) -> np.ndarray:
        lg = np.log(self.grid)
        out = lg[None, :] - lg[:, None]
        out[np.tril_indices(self.size)] = np.nan
        return out

    def _sup_operands(self):
        # values and log lengths with -inf / 0 below the diagonal, for fast suprema
        cached = getattr(self, "_sup_cache", None)
        if cached is None:
            vals = np.where(np.isnan(self.values), -np.inf, self.values)
            lens = np.nan_to_num(self.log_lengths(), nan=0.0)
            cached = (vals, lens)
            self._sup_cache = cached
        return cached

    def __call__(self, i: int, j: int) -> float:
        return float(self.values[i, j])

    def _combine(self, other, op, provenance="user-supplied"):
        if not np.array_equal(self.grid, other.grid):
            raise ValueError("tables live on different grids")
        return IntervalMeasureTable(self.grid, op(self.values, other.values), provenance)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __mul__(self, c: float):
        if c < 0:
            raise ValueError("only nonnegative multiples stay in the cone")
        return IntervalMeasureTable(self.grid, self.values * c, "user-supplied")

    __rmul__ = __mul__

    def maximum(self, other):
        return self._combine(other, np.fmax)

    def is_zero(self) -> bool:
        return bool(np.all(self.values[np.triu_indices(self.size, 1)] == 0))

    # -- CSV ------------------------------------------------------------------

    def to_csv(self, stream=None) -> str | None:
        """Write ``r,R,value`` rows; returns the text when no stream is given."""
        buf = io.StringIO() if stream is None else stream
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "R", "value"])
        for i in range(self.size):
            for j in range(i + 1, self.size):
                w.writerow([fmt(self.grid[i]), fmt(self.grid[j]), fmt(self.values[i, j])])
        return buf.getvalue() if stream is None else None

    @classmethod
    def from_csv(cls, stream, provenance: str = "user-supplied") -> "IntervalMeasureTable":
        if isinstance(stream, str):
            stream = io.StringIO(stream)
        rows = list(csv.DictReader(stream))
        if not rows or set(rows[0]) != {"r", "R", "value"}:
            raise ValueError("interval table CSV needs the header r,R,value")
        rs = np.array([float(row["r"]) for row in rows])
        Rs = np.array([float(row["R"]) for row in rows])
        vals = np.array([float(row["value"]) for row in rows])
        grid = np.unique(np.concatenate([rs, Rs]))
        pos = {x: k for k, x in enumerate(grid.tolist())}
        values = np.full((grid.size, grid.size), np.nan)
        for r, R, v in zip(rs.tolist(), Rs.tolist(), vals.tolist()):
            values[pos[r], pos[R]] = v
        if np.any(np.isnan(values[np.triu_indices(grid.size, 1)])):
            raise ValueError("interval table CSV is missing some (r, R) pairs")
        return cls(grid, values, provenance)


def fmt(x: float) -> str:
    """Fixed 12-significant-digit formatting used in every output file."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


def default_grid(Z: PointDistribution, base: float = DEFAULT_BASE, ratio: float = DEFAULT_RATIO,
                 horizon: float = DEFAULT_HORIZON) -> np.ndarray:
    return geometric_grid(base, ratio, min(horizon, Z.truncation_radius))


# -- block densities -------------------------------------------------------------


@dataclass
class DensityReport:
    """Four block-density estimates of an interval function, with diagnostics.

    ``estimate`` is the upper-block value (the limit over large block factors);
    ``value`` repeats it only when the four estimates agree within
    ``tolerance`` and the tail shows no drift.
    """

    bar: float
    underline: float
    inf: float
    b: float
    spread: float
    relative_spread: float
    tolerance: float
    tail_slope: float
    relative_drift: float
    converged: bool
    exact_zero: bool
    horizon: float
    block_factors: np.ndarray = field(repr=False)
    block_estimates: np.ndarray = field(repr=False)
    window: tuple[float, float] = (math.nan, math.nan)

    @property
    def estimate(self) -> float:
        return self.bar

    @property
    def value(self) -> float | None:
        return self.bar if self.converged else None

    def variants(self) -> dict[str, float]:
        return {"bar": self.bar, "underline": self.underline, "inf": self.inf, "b": self.b}

    def rows(self) -> list[tuple[str, str]]:
        out = [(k, fmt(v)) for k, v in self.variants().items()]
        out += [
            ("spread", fmt(self.spread)),
            ("relative_spread", fmt(self.relative_spread)),
            ("tolerance", fmt(self.tolerance)),
            ("tail_slope", fmt(self.tail_slope)),
            ("relative_drift", fmt(self.relative_drift)),
            ("window_a_min", fmt(self.window[0])),
            ("window_a_max", fmt(self.window[1])),
            ("horizon", fmt(self.horizon)),
            ("converged", str(self.converged).lower()),
            ("ln_dens", fmt(self.value) if self.value is not None else "undeclared"),
        ]
        return out


def _require_block_grid(table: IntervalMeasureTable, min_decades: float = 3.0) -> float:
    q = table.ratio
    if q is None or not q > 1:
        raise InsufficientGrid("block densities need a geometric grid with ratio > 1")
    if table.decades < min_decades - 1e-9:
        raise InsufficientGrid(
            f"table spans {table.decades:.2f} decades; at least {min_decades:g} are required"
        )
    return q


def block_profile(table: IntervalMeasureTable, tail_fraction: float = DEFAULT_TAIL_FRACTION):
    """(1/ln a) * limsup-estimate of l(r, a r) for every block factor a = q^k.

    The limsup over r is estimated as the maximum over starting radii in the
    last ``tail_fraction`` of the grid.
    """
    q = _require_block_grid(table)
    if not 0 < tail_fraction < 1:
        raise ValueError("tail_fraction must lie in (0, 1)")
    m = table.size - 1
    t0 = min(int(math.floor((1.0 - tail_fraction) * m)), m - 1)
    ks = np.arange(1, m - t0 + 1)
    limsup = np.array([np.max(np.diagonal(table.values, offset=k)[t0:]) for k in ks])
    return q ** ks, limsup / (ks * math.log(q))


def running_sup(table: IntervalMeasureTable, slope: float, min_index: int = 0) -> np.ndarray:
    """S[h] = max over grid pairs min_index <= i < j <= h of l(r_i, r_j) - slope * ln(r_j / r_i).

    Entries for h <= min_index are -inf.
    """
    vals, lens = table._sup_operands()
    if min_index >= table.size:
        return np.full(table.size, -np.inf)
    col = (vals[min_index:] - slope * lens[min_index:]).max(axis=0)
    return np.maximum.accumulate(col)


def b_density(table: IntervalMeasureTable, tail_fraction: float = DEFAULT_TAIL_FRACTION,
              growth_tol: float = 1e-6, start_fraction: float = 0.5,
              iterations: int = 80) -> float:
    """Smallest b >= 0 for which sup(l - b ln(R/r)) stops growing across the tail.

    "Stops growing" means the running supremum gains at most ``growth_tol``
    between the start of the tail and the horizon. Found by bisection.

    Only pairs with r at or beyond the first ``start_fraction`` of the grid
    enter the supremum. For a subadditive l this does not change whether the
    supremum is finite, and it keeps large early fluctuations from masking
    the tail drift at a finite horizon.
    """
    _require_block_grid(table)
    m = table.size - 1
    t0 = max(1, min(int(math.floor((1.0 - tail_fraction) * m)), m - 1))
    i0 = min(int(math.floor(start_fraction * m)), t0 - 1)

    def growth(b):
        s = running_sup(table, b, min_index=i0)
        return s[m] - s[t0]

    if growth(0.0) <= growth_tol:
        return 0.0
    lens = table.log_lengths()
    with np.errstate(invalid="ignore"):
        hi = float(np.nanmax(table.values[i0:] / lens[i0:])) + 1.0
    tries = 0
    while growth(hi) > growth_tol:
        hi *= 2.0
        tries += 1
        if tries > 60:
            return math.inf
    lo = 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if growth(mid) > growth_tol:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    return hi


def density_report(table: IntervalMeasureTable, tail_fraction: float = DEFAULT_TAIL_FRACTION,
                   tolerance: float = 0.05, spread_floor: float = 1.0,
                   growth_tol: float = 1e-6) -> DensityReport:
    """All four block densities of ``table`` and whether they agree.

    ``relative_spread`` is (max - min) / max(max estimate, spread_floor); the
    floor keeps near-zero densities from producing meaningless ratios.
    """
    factors, est = block_profile(table, tail_fraction)
    K = factors.size
    lo_k = max(0, int(math.ceil(K / 2)) - 1)
    window = est[lo_k:]
    bar = float(window.max())
    underline = float(window.min())
    inf_variant = float(est.min())
    b_var = b_density(table, tail_fraction, growth_tol)
    four = np.array([bar, underline, inf_variant, b_var])
    spread = float(four.max() - four.min())
    scale = max(float(four.max()), spread_floor)
    rel = spread / scale

    loga = np.log(factors[lo_k:])
    slope = 0.0
    if loga.size >= 2:
        slope = float(np.polyfit(loga, window, 1)[0])
    drift = abs(slope) * float(np.ptp(loga)) / scale if loga.size >= 2 else 0.0
    exact_zero = table.is_zero()
    return DensityReport(
        bar=bar,
        underline=underline,
        inf=inf_variant,
        b=b_var,
        spread=spread,
        relative_spread=rel,
        tolerance=tolerance,
        tail_slope=slope,
        relative_drift=drift,
        converged=bool(exact_zero or (rel <= tolerance and drift <= tolerance)),
        exact_zero=exact_zero,
        horizon=float(table.grid[-1]),
        block_factors=factors,
        block_estimates=est,
        window=(float(factors[lo_k]), float(factors[-1])),
    )


VARIANTS = ("bar", "underline", "inf", "b")


def block_density(table: IntervalMeasureTable, variant: str = "bar", **params) -> float:
    """One block-density estimate; ``variant`` is one of bar, underline, inf, b."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if variant == "b":
        return b_density(table, params.get("tail_fraction", DEFAULT_TAIL_FRACTION),
                         params.get("growth_tol", 1e-6))
    return density_report(table, **params).variants()[variant]


# -- submeasure axioms ------------------------------------------------------------


@dataclass
class AxiomReport:
    l1_bound: float
    l1_block: float
    l2_violations: list[tuple[float, float, float]]
    n_violations: int
    max_additivity_defect: float
    eps: float

    @property
    def is_submeasure(self) -> bool:
        return self.n_violations == 0 and math.isfinite(self.l1_bound)

    @property
    def is_additive(self) -> bool:
        return self.max_additivity_defect <= self.eps


def check_submeasure_axioms(table: IntervalMeasureTable, eps: float = 1e-9,
                            max_report: int = 1000) -> AxiomReport:
    """Check logarithmic growth [l1] and subadditivity [l2] on all grid triples.

    The l1 bound uses, for each r_i, the shortest grid block r_i < r_j with
    r_j >= 2 r_i. A triple r1 < r2 < r3 violates l2 when
    l(r1, r3) > l(r1, r2) + l(r2, r3) + eps * max(1, l(r1, r3)).
    """
    n = table.size
    V = table.values
    g = table.grid
    l1 = -math.inf
    l1_block = math.nan
    for i in range(n):
        j = int(np.searchsorted(g, 2.0 * g[i] * (1 - 1e-12), side="left"))
        if j < n and j > i:
            if V[i, j] > l1:
                l1 = float(V[i, j])
                l1_block = float(g[j] / g[i])
    if l1 == -math.inf:
        l1 = 0.0

    triples: list[tuple[float, float, float]] = []
    n_viol = 0
    defect = 0.0
    for j in range(1, n - 1):
        A = V[:j, j][:, None]
        B = V[j, j + 1:][None, :]
        C = V[:j, j + 1:]
        gap = C - (A + B)
        scale = np.maximum(1.0, np.abs(C))
        defect = max(defect, float(np.max(np.abs(gap) / scale)))
        bad = np.argwhere(gap > eps * scale)
        n_viol += len(bad)
        for i, kk in bad[: max(0, max_report - len(triples))]:
            triples.append((float(g[i]), float(g[j]), float(g[j + 1 + kk])))
    return AxiomReport(l1, l1_block, triples, n_viol, defect, eps)


# -- Redheffer sufficient conditions ---------------------------------------------


class RedhefferStatus(str, Enum):
    FINITE_BY_SUM = "finite_by_sum"
    FINITE_BY_SEPARATION = "finite_by_separation"
    UNKNOWN = "unknown"


@dataclass
class RedhefferCheck:
    status: RedhefferStatus
    theta: float
    half_angle: float
    points: int
    tail_increment: float = math.nan
    min_separation: float = math.nan
    strip_half_width: float = math.nan

    @property
    def finite(self) -> bool:
        return self.status is not RedhefferStatus.UNKNOWN


def redheffer_sufficient(Z: PointDistribution, theta: float, half_angle: float,
                         sum_tol: float = 0.05, min_separation: float = 1e-9,
                         strip_slack: float = 1e-9) -> RedhefferCheck:
    """Test the two sufficient conditions for finite Redheffer density near theta.

    W is the sector part of Z around theta. The check returns

    * ``finite_by_sum`` when the sum of 1/|z| over W converges at the horizon:
      the increment over the last decade is at most ``sum_tol`` and no larger
      than the decade before it;
    * ``finite_by_separation`` when W rotated by -theta is separated and lies
      in a horizontal strip whose half-width does not grow in the last decade;
    * ``unknown`` otherwise.

    A distribution with an infinite truncation radius is a genuinely finite
    set, for which both sums and strips are trivially finite.
    """
    if not (0 < half_angle <= math.pi / 2):
        raise InvalidHalfAngle(f"half-angle must lie in (0, pi/2], got {half_angle}")
    W = sector_part(Z, theta, half_angle)
    check = RedhefferCheck(RedhefferStatus.UNKNOWN, theta, half_angle, W.total)
    if W.is_empty() or not math.isfinite(Z.truncation_radius):
        check.status = RedhefferStatus.FINITE_BY_SUM
        check.tail_increment = 0.0
        return check

    h = Z.truncation_radius
    inv = W.multiplicities / W.moduli
    cum = np.concatenate([[0.0], np.cumsum(inv)])
    at = cum[np.searchsorted(W.moduli, [h / 100.0, h / 10.0, h], side="right")]
    last, previous = at[2] - at[1], at[1] - at[0]
    check.tail_increment = float(last)
    if last <= sum_tol and last <= previous:
        check.status = RedhefferStatus.FINITE_BY_SUM
        return check

    turned = rotate(W, -theta).points
    if turned.size >= 2:
        tree = cKDTree(np.column_stack([turned.real, turned.imag]))
        dist, _ = tree.query(np.column_stack([turned.real, turned.imag]), k=2)
        nn = dist[:, 1]
        check.min_separation = float(nn.min())
    else:
        nn = np.array([math.inf])
        check.min_separation = math.inf
    outer = np.abs(turned) > h / 10.0
    im = np.abs(turned.imag)
    inner_width = float(im[~outer].max()) if np.any(~outer) else math.nan
    outer_width = float(im[outer].max()) if np.any(outer) else 0.0
    check.strip_half_width = float(im.max())
    separated = check.min_separation >= min_separation
    if turned.size >= 2 and np.any(outer) and np.any(~outer):
        # nearest-neighbour gaps must not shrink towards the horizon
        separated = separated and nn[outer].min() >= 0.5 * nn[~outer].min()
    in_strip = (not math.isnan(inner_width)) and outer_width <= inner_width + strip_slack * max(1.0, inner_width)
    if separated and in_strip:
        check.status = RedhefferStatus.FINITE_BY_SEPARATION
    return check
