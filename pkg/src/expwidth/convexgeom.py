"""Support functions, directional width, breadth and diameter of planar convex bodies.

Bodies are polygons (including degenerate segments and single points), disks
and strips; :func:`point_cloud` builds the polygon hull of arbitrary points.
Values are extended reals: +inf for unbounded directions of a strip, -inf for
the empty body.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import unit, wrap

_PERP_TOL = 1e-12


def _cross(o: complex, a: complex, b: complex) -> float:
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def convex_hull(points) -> list[complex]:
    """Counterclockwise hull vertices without collinear points (monotone chain).

    Collinear input gives its two extreme points; a single distinct point
    gives itself.
    """
    pts = sorted({(float(complex(z).real), float(complex(z).imag)) for z in points})
    pts = [complex(x, y) for x, y in pts]
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain: list[complex] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower, upper = half(pts), half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    # the chain tests each turn anchored at a different vertex than Polygon's
    # check does; drop vertices that are collinear up to rounding under either
    changed = True
    while changed and len(hull) >= 3:
        changed = False
        for k in range(len(hull)):
            if _cross(hull[k - 2], hull[k - 1], hull[k]) <= 0:
                del hull[k - 1]
                changed = True
                break
    return hull


@dataclass(frozen=True)
class Polygon:
    """Convex polygon given by counterclockwise vertices in strictly convex position.

    One vertex is a point and two vertices a segment.
    """

    vertices: tuple[complex, ...]

    def __post_init__(self):
        vs = tuple(complex(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        n = len(vs)
        if n == 0:
            raise ValueError("a polygon needs at least one vertex (use EMPTY for the empty body)")
        if n == 2 and vs[0] == vs[1]:
            raise ValueError("segment endpoints coincide")
        if n >= 3:
            for k in range(n):
                if _cross(vs[k - 2], vs[k - 1], vs[k]) <= 0:
                    raise ValueError("vertices must be in strictly convex counterclockwise position")
            # a star-shaped traversal would pass the local test; total turning must be 2*pi
            turn = sum(
                math.atan2(_cross(0j, vs[k] - vs[k - 1], vs[(k + 1) % n] - vs[k]),
                           ((vs[k] - vs[k - 1]) * (vs[(k + 1) % n] - vs[k]).conjugate()).real)
                for k in range(n)
            )
            if abs(turn - 2 * math.pi) > 1e-6:
                raise ValueError("vertices wind more than once")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=complex)

    # rounding can break strict convexity of nearly degenerate polygons,
    # so transformed copies are rebuilt as hulls
    def rotated(self, phi: float) -> "Polygon":
        u = unit(phi)
        return point_cloud(v * u for v in self.vertices)

    def translated(self, c: complex) -> "Polygon":
        return point_cloud(v + c for v in self.vertices)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "center", complex(self.center))

    def rotated(self, phi: float) -> "Disk":
        return Disk(self.center * unit(phi), self.radius)

    def translated(self, c: complex) -> "Disk":
        return Disk(self.center + c, self.radius)


@dataclass(frozen=True)
class Strip:
    """Closed strip of width ``width`` around the line offset*i*e^{i phi} + t e^{i phi}.

    ``phi`` is the axis direction; ``offset`` is the signed distance of the
    centre line from the origin, measured along e^{i(phi + pi/2)}. The strip
    of width b in direction theta (finite width there) has axis theta - pi/2.
    """

    phi: float
    width: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.width >= 0:
            raise ValueError("strip width must be >= 0")

    def rotated(self, phi: float) -> "Strip":
        return Strip(float(wrap(self.phi + phi)), self.width, self.offset)

    def translated(self, c: complex) -> "Strip":
        normal = unit(self.phi + math.pi / 2)
        shift = (complex(c) * normal.conjugate()).real
        return Strip(self.phi, self.width, self.offset + shift)


class _Empty:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"

    def rotated(self, phi: float) -> "_Empty":
        return self

    def translated(self, c: complex) -> "_Empty":
        return self


EMPTY = _Empty()

ConvexBody = Polygon | Disk | Strip | _Empty


def point_cloud(points) -> Polygon | _Empty:
    """Convex hull of a finite set of points as a body."""
    hull = convex_hull(points)
    if not hull:
        return EMPTY
    return Polygon(tuple(hull))


def support(S: ConvexBody, theta: float) -> float:
    """sup over s in S of Re(s e^{-i theta})."""
    if S is EMPTY:
        return -math.inf
    if isinstance(S, Polygon):
        return float(np.max((S.array * unit(-theta)).real))
    if isinstance(S, Disk):
        return (S.center * unit(-theta)).real + S.radius
    if isinstance(S, Strip):
        d = float(wrap(theta - S.phi))
        if abs(d - math.pi / 2) <= _PERP_TOL:
            return S.offset + S.width / 2
        if abs(d + math.pi / 2) <= _PERP_TOL:
            return -S.offset + S.width / 2
        return math.inf
    raise TypeError(f"not a convex body: {S!r}")


def support_homogeneous(S: ConvexBody, z: complex) -> float:
    """sup over s in S of Re(s conj(z)), with the convention 0 * x = 0."""
    z = complex(z)
    if z == 0:
        return 0.0
    if isinstance(S, Polygon):
        return float(np.max((S.array * z.conjugate()).real))
    return abs(z) * support(S, math.atan2(z.imag, z.real))


def width(S: ConvexBody, theta: float) -> float:
    """Distance between the two support lines orthogonal to e^{i theta}."""
    if S is EMPTY:
        return -math.inf
    if isinstance(S, Disk):
        # the centre terms of the two support values cancel only up to rounding
        return 2.0 * S.radius
    return support(S, theta) + support(S, theta + math.pi)


def _antipodal_pairs(vs: list[complex]):
    """Rotating calipers over a strictly convex ccw polygon.

    Yields (edge_index, vertex_index) with the vertex farthest from the
    line through edge (edge_index, edge_index + 1).
    """
    n = len(vs)
    j = 1
    for i in range(n):
        a, b = vs[i], vs[(i + 1) % n]
        while abs(_cross(a, b, vs[(j + 1) % n])) > abs(_cross(a, b, vs[j])):
            j = (j + 1) % n
        yield i, j


def breadth(S: ConvexBody) -> float:
    """Minimum width over all directions."""
    if S is EMPTY:
        return -math.inf
    if isinstance(S, Disk):
        return 2.0 * S.radius
    if isinstance(S, Strip):
        return S.width
    vs = list(S.vertices)
    if len(vs) <= 2:
        return 0.0
    best = math.inf
    for i, j in _antipodal_pairs(vs):
        a, b = vs[i], vs[(i + 1) % len(vs)]
        best = min(best, abs(_cross(a, b, vs[j])) / abs(b - a))
    return best


def diameter(S: ConvexBody) -> float:
    """Maximum width over all directions, i.e. the largest pairwise distance."""
    if S is EMPTY:
        return -math.inf
    if isinstance(S, Disk):
        return 2.0 * S.radius
    if isinstance(S, Strip):
        return math.inf
    vs = list(S.vertices)
    if len(vs) == 1:
        return 0.0
    if len(vs) == 2:
        return abs(vs[1] - vs[0])
    n = len(vs)
    best = 0.0
    for i, j in _antipodal_pairs(vs):
        # the farthest vertex from an edge is antipodal to both its endpoints
        for k in (i, (i + 1) % n):
            for jj in (j, (j - 1) % n, (j + 1) % n):
                best = max(best, abs(vs[k] - vs[jj]))
    return best


def parse_body(text: str) -> ConvexBody:
    """Parse the body file format.

    ``disk: re im r`` / ``strip: phi b offset`` / one ``polygon: re im`` line
    per vertex (hull taken). Blank lines and ``#`` comments are ignored.
    """
    from .generators import eval_number

    kind = None
    verts: list[complex] = []
    body = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"bad body line {raw!r}")
        key, rest = line.split(":", 1)
        key = key.strip().lower()
        nums = [eval_number(t) for t in rest.split()]
        if kind is not None and key != kind:
            raise ValueError("a body file describes exactly one body")
        kind = key
        if key == "polygon":
            if len(nums) != 2:
                raise ValueError("polygon lines need 're im'")
            verts.append(complex(nums[0], nums[1]))
        elif key == "disk":
            if len(nums) != 3 or body is not None:
                raise ValueError("disk needs exactly one line 're im r'")
            body = Disk(complex(nums[0], nums[1]), nums[2])
        elif key == "strip":
            if len(nums) not in (2, 3) or body is not None:
                raise ValueError("strip needs exactly one line 'phi b [offset]'")
            body = Strip(*nums)
        else:
            raise ValueError(f"unknown body kind {key!r}")
    if kind == "polygon":
        return point_cloud(verts)
    if body is None:
        return EMPTY
    return body


def format_body(S: ConvexBody) -> str:
    if S is EMPTY:
        return "# empty body\n"
    if isinstance(S, Disk):
        return f"disk: {S.center.real!r} {S.center.imag!r} {S.radius!r}\n"
    if isinstance(S, Strip):
        return f"strip: {S.phi!r} {S.width!r} {S.offset!r}\n"
    return "".join(f"polygon: {v.real!r} {v.imag!r}\n" for v in S.vertices)
