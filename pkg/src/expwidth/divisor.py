"""Point distributions on the complex plane (divisors) and their algebra.

A distribution is a finite multiset of complex points. Each carries a
``truncation_radius``: the radius within which the distribution is known
completely. Explicitly listed finite sets default to ``inf`` (they are known
everywhere); generator-backed ones are materialized up to a finite horizon,
and measures past that horizon are refused or flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .angles import unit, wrap
from .errors import (
    ContainmentError,
    InfiniteMultiplicity,
    InvalidHalfAngle,
    InvalidInterval,
    ZeroScalarError,
)

# |e^{i theta} z| may exceed |z| by a rounding error
_RADIUS_SLACK = 1e-12


@dataclass(frozen=True)
class GeneratorSource:
    kind: str
    params: tuple = ()

    def as_dict(self) -> dict:
        return dict(self.params)


class PointDistribution:
    """Immutable multiset of complex points with positive integer multiplicities.

    Points are merged by exact coordinate equality and stored sorted by
    modulus, which makes annulus queries a pair of binary searches.
    """

    __slots__ = ("_points", "_mult", "_moduli", "_cum", "truncation_radius", "source")

    def __init__(
        self,
        points: Iterable[complex] = (),
        multiplicities: Iterable[int] | None = None,
        truncation_radius: float = math.inf,
        source: GeneratorSource | None = None,
    ):
        pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points,
                         dtype=complex).ravel()
        if multiplicities is None:
            mult = np.ones(pts.shape, dtype=np.int64)
        else:
            raw = np.asarray(
                list(multiplicities) if not isinstance(multiplicities, np.ndarray) else multiplicities
            ).ravel()
            if raw.shape != pts.shape:
                raise ValueError("points and multiplicities differ in length")
            if raw.dtype.kind == "f":
                if np.any(np.isinf(raw)):
                    raise InfiniteMultiplicity(
                        "infinite multiplicities are not supported: logarithmic sums would diverge"
                    )
                if np.any(raw != np.round(raw)):
                    raise ValueError("multiplicities must be integers")
            mult = raw.astype(np.int64)
        if np.any(mult < 1):
            raise ValueError("multiplicities must be >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite complex numbers")
        if not truncation_radius > 0:
            raise ValueError("truncation_radius must be positive")

        if pts.size:
            # exact merge on (re, im); stable order by modulus then coordinates
            re, im = pts.real, pts.imag
            order = np.lexsort((im, re))
            re, im, mult = re[order], im[order], mult[order]
            starts = np.concatenate([[True], (np.diff(re) != 0) | (np.diff(im) != 0)])
            first = np.flatnonzero(starts)
            mult = np.add.reduceat(mult, first)
            pts = re[first] + 1j * im[first]
            mods = np.abs(pts)
            order = np.lexsort((pts.imag, pts.real, mods))
            pts, mult, mods = pts[order], mult[order], mods[order]
            if mods[-1] > truncation_radius * (1 + _RADIUS_SLACK):
                raise ValueError(
                    f"point of modulus {mods[-1]:g} lies outside truncation radius {truncation_radius:g}"
                )
        else:
            mods = np.zeros(0)
            mult = np.zeros(0, dtype=np.int64)

        for arr in (pts, mult, mods):
            arr.setflags(write=False)
        self._points = pts
        self._mult = mult
        self._moduli = mods
        self._cum = None
        self.truncation_radius = float(truncation_radius)
        self.source = source

    # -- accessors -------------------------------------------------------
    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def multiplicities(self) -> np.ndarray:
        return self._mult

    @property
    def moduli(self) -> np.ndarray:
        return self._moduli

    @property
    def total(self) -> int:
        return int(self._mult.sum())

    def is_empty(self) -> bool:
        return self._points.size == 0

    def __len__(self) -> int:
        return int(self._points.size)

    def entries(self) -> Iterator[tuple[complex, int]]:
        for z, m in zip(self._points.tolist(), self._mult.tolist()):
            yield complex(z), int(m)

    def multiplicity(self, z: complex) -> int:
        hit = self._points == complex(z)
        return int(self._mult[hit].sum())

    def cumulative_count(self, radii) -> np.ndarray:
        """Number of points (with multiplicity) with |z| <= r, for each r."""
        if self._cum is None:
            cum = np.concatenate([[0], np.cumsum(self._mult)])
            cum.setflags(write=False)
            self._cum = cum
        idx = np.searchsorted(self._moduli, np.asarray(radii, dtype=float), side="right")
        return self._cum[idx]

    def __eq__(self, other):
        if not isinstance(other, PointDistribution):
            return NotImplemented
        return (
            self._points.shape == other._points.shape
            and bool(np.all(self._points == other._points))
            and bool(np.all(self._mult == other._mult))
        )

    __hash__ = None

    def isclose(self, other: "PointDistribution", atol: float = 1e-9) -> bool:
        """Pointwise equality up to coordinate noise (e.g. after rotating back)."""
        if self._points.shape != other._points.shape:
            return False
        a = sorted(zip(np.round(self._points.real / atol), np.round(self._points.imag / atol),
                       self._mult))
        b = sorted(zip(np.round(other._points.real / atol), np.round(other._points.imag / atol),
                       other._mult))
        return all(x[2] == y[2] and abs(x[0] - y[0]) <= 1 and abs(x[1] - y[1]) <= 1
                   for x, y in zip(a, b))

    def __repr__(self) -> str:
        kind = self.source.kind if self.source else "explicit"
        return (f"PointDistribution({kind}, {len(self)} points, total={self.total}, "
                f"truncation_radius={self.truncation_radius:g})")


# -- regions --------------------------------------------------------------


@dataclass(frozen=True)
class ClosedDisk:
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise InvalidInterval("disk radius must be >= 0")

    @property
    def extent(self) -> float:
        return self.radius

    def mask(self, points, moduli):
        return moduli <= self.radius

    def rotated(self, phi: float) -> "ClosedDisk":
        return self


@dataclass(frozen=True)
class Annulus:
    """Half-open annulus inner < |z| <= outer."""

    inner: float
    outer: float

    def __post_init__(self):
        if not (0 <= self.inner < self.outer):
            raise InvalidInterval(f"annulus needs 0 <= r < R, got ({self.inner}, {self.outer}]")

    @property
    def extent(self) -> float:
        return self.outer

    def mask(self, points, moduli):
        return (moduli > self.inner) & (moduli <= self.outer)

    def rotated(self, phi: float) -> "Annulus":
        return self


@dataclass(frozen=True)
class Sector:
    """Open angular sector |arg z - theta| < half_angle, with optional radial bounds.

    The origin never belongs to a sector.
    """

    theta: float
    half_angle: float
    inner: float = 0.0
    outer: float = math.inf

    def __post_init__(self):
        if not (0 < self.half_angle <= math.pi):
            raise InvalidHalfAngle(f"half-angle must lie in (0, pi], got {self.half_angle}")
        if not (0 <= self.inner < self.outer):
            raise InvalidInterval("sector radial bounds need 0 <= inner < outer")

    @property
    def extent(self) -> float:
        return self.outer

    def mask(self, points, moduli):
        nonzero = moduli > 0
        dev = np.abs(wrap(np.angle(points) - self.theta))
        return nonzero & (dev < self.half_angle) & (moduli > self.inner) & (moduli <= self.outer)

    def rotated(self, phi: float) -> "Sector":
        return Sector(float(wrap(self.theta + phi)), self.half_angle, self.inner, self.outer)


Region = ClosedDisk | Annulus | Sector


class Count(int):
    """Integer count that remembers whether it is only a lower bound.

    A region reaching past the truncation radius may contain points that
    were never materialized; such counts carry ``lower_bound = True``.
    """

    lower_bound: bool

    def __new__(cls, value: int, lower_bound: bool = False):
        obj = super().__new__(cls, value)
        obj.lower_bound = lower_bound
        return obj

    def __repr__(self) -> str:
        suffix = ", lower bound" if self.lower_bound else ""
        return f"Count({int(self)}{suffix})"


# -- operations -----------------------------------------------------------


def count(Z: PointDistribution, S: Region) -> Count:
    """Z(S): number of points of Z in S, with multiplicity."""
    if Z.is_empty():
        value = 0
    elif isinstance(S, ClosedDisk):
        value = int(Z.cumulative_count([S.radius])[0])
    elif isinstance(S, Annulus):
        lo, hi = Z.cumulative_count([S.inner, S.outer])
        value = int(hi - lo)
    else:
        value = int(Z.multiplicities[S.mask(Z.points, Z.moduli)].sum())
    return Count(value, lower_bound=S.extent > Z.truncation_radius)


def _derived(Z: PointDistribution, points, truncation_radius, kind: str, **params):
    src = None
    if Z.source is not None:
        src = GeneratorSource(kind, (("base", Z.source),) + tuple(sorted(params.items())))
    return PointDistribution(points, Z.multiplicities, truncation_radius, src)


def rotate(Z: PointDistribution, theta: float) -> PointDistribution:
    """e^{i theta} Z: the distribution with multiplicity Z(e^{-i theta} z) at z."""
    u = unit(theta)
    if u == 1:
        return Z
    return _derived(Z, Z.points * u, Z.truncation_radius, "rotate", theta=theta)


def scale(Z: PointDistribution, w: complex) -> PointDistribution:
    """wZ, with (wZ)(z) = Z(z/w). ``scale(Z, -1)`` is -Z."""
    w = complex(w)
    if w == 0:
        raise ZeroScalarError("cannot scale a distribution by 0")
    return _derived(Z, Z.points * w, Z.truncation_radius * abs(w), "scale", w=w)


def union(Z: PointDistribution, W: PointDistribution) -> PointDistribution:
    """Multiplicities add. The result is known only within both horizons."""
    pts = np.concatenate([Z.points, W.points])
    mult = np.concatenate([Z.multiplicities, W.multiplicities])
    horizon = min(Z.truncation_radius, W.truncation_radius)
    keep = np.abs(pts) <= horizon * (1 + _RADIUS_SLACK)
    return PointDistribution(pts[keep], mult[keep], horizon)


def difference(Z: PointDistribution, W: PointDistribution) -> PointDistribution:
    """Z minus W; requires W(z) <= Z(z) everywhere."""
    if W.is_empty():
        return Z
    lookup = dict(Z.entries())
    for z, m in W.entries():
        if lookup.get(z, 0) < m:
            raise ContainmentError(f"W is not contained in Z: W({z}) = {m} > Z({z}) = {lookup.get(z, 0)}")
        lookup[z] -= m
    kept = [(z, m) for z, m in lookup.items() if m > 0]
    pts = [z for z, _ in kept]
    mult = [m for _, m in kept]
    return PointDistribution(pts, mult, Z.truncation_radius)


def is_subset(Z: PointDistribution, W: PointDistribution) -> bool:
    lookup = dict(W.entries())
    return all(lookup.get(z, 0) >= m for z, m in Z.entries())


def sector_part(Z: PointDistribution, theta: float, half_angle: float) -> PointDistribution:
    """Points of Z with |arg z - theta| < half_angle, for half_angle in (0, pi/2]."""
    if not (0 < half_angle <= math.pi / 2):
        raise InvalidHalfAngle(f"half-angle must lie in (0, pi/2], got {half_angle}")
    keep = Sector(theta, half_angle).mask(Z.points, Z.moduli)
    return PointDistribution(Z.points[keep], Z.multiplicities[keep], Z.truncation_radius)


def geometric_grid(base: float, ratio: float, horizon: float) -> np.ndarray:
    """base * ratio**k for k = 0..m with the last radius <= horizon."""
    if not ratio > 1:
        raise ValueError("grid ratio must exceed 1")
    if not (0 < base < horizon) or not math.isfinite(horizon):
        raise ValueError(f"need 0 < base < horizon < inf, got base={base}, horizon={horizon}")
    m = int(math.floor(math.log(horizon / base) / math.log(ratio) + 1e-9))
    grid = base * ratio ** np.arange(m + 1)
    return np.minimum(grid, horizon)


class UpperDensity(NamedTuple):
    estimate: float
    diverging: bool
    tail_slope: float
    argmax_radius: float
    horizon: float


def upper_density(
    Z: PointDistribution,
    p: float = 1.0,
    grid=None,
    tail_fraction: float = 0.3,
    slope_threshold: float = 0.1,
) -> UpperDensity:
    """Estimate the upper p-density limsup Z(closed disk r) / r**p.

    The estimate is the maximum of the ratio over ``grid``. ``diverging`` is
    a heuristic for an infinite upper density: the ratio's log-log slope over
    the last ``tail_fraction`` of the grid exceeds ``slope_threshold`` and the
    running maximum is attained inside that tail.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    if grid is None:
        horizon = min(1e6, Z.truncation_radius)
        grid = geometric_grid(1.0, math.exp(1 / 8), horizon)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    if np.any(grid <= 0) or np.any(grid > Z.truncation_radius * (1 + _RADIUS_SLACK)):
        raise InvalidInterval("grid radii must lie in (0, truncation_radius]")
    grid = np.sort(grid)
    ratios = Z.cumulative_count(grid) / grid**p
    best = int(np.argmax(ratios))
    n_tail = max(3, int(math.ceil(tail_fraction * grid.size)))
    tail_r, tail_v = grid[-n_tail:], ratios[-n_tail:]
    slope = 0.0
    pos = tail_v > 0
    if pos.sum() >= 2 and np.ptp(np.log(tail_r[pos])) > 0:
        slope = float(np.polyfit(np.log(tail_r[pos]), np.log(tail_v[pos]), 1)[0])
    in_tail = best >= grid.size - n_tail or ratios[-n_tail:].max() >= ratios.max()
    return UpperDensity(
        estimate=float(ratios.max()),
        diverging=bool(slope > slope_threshold and in_tail),
        tail_slope=slope,
        argmax_radius=float(grid[best]),
        horizon=float(grid[-1]),
    )
