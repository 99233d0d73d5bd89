import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from expwidth.divisor import (
    Annulus,
    ClosedDisk,
    PointDistribution,
    Sector,
    count,
    difference,
    geometric_grid,
    is_subset,
    rotate,
    scale,
    sector_part,
    union,
    upper_density,
)
from expwidth.errors import ContainmentError, InfiniteMultiplicity, InvalidHalfAngle, ZeroScalarError

coords = st.integers(-40, 40).map(float)
points = st.lists(st.builds(complex, coords, coords), max_size=25)
mults = st.integers(1, 4)


@st.composite
def distributions(draw, allow_zero=True):
    pts = draw(points)
    if not allow_zero:
        pts = [z for z in pts if z != 0]
    ms = draw(st.lists(mults, min_size=len(pts), max_size=len(pts)))
    return PointDistribution(pts, ms)


angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


def as_multiset(Z):
    return sorted((z.real, z.imag, m) for z, m in Z.entries())


class TestConstruction:
    def test_merges_equal_points(self):
        Z = PointDistribution([1, 1, 2, 1], [1, 2, 1, 1])
        assert Z.multiplicity(1) == 4
        assert Z.total == 5
        assert len(Z) == 2

    def test_no_epsilon_merging(self):
        Z = PointDistribution([1.0, 1.0 + 1e-15])
        assert len(Z) == 2

    def test_rejects_bad_multiplicities(self):
        with pytest.raises(ValueError):
            PointDistribution([1], [0])
        with pytest.raises(ValueError):
            PointDistribution([1], [1.5])
        with pytest.raises(InfiniteMultiplicity):
            PointDistribution([1], [math.inf])

    def test_points_beyond_horizon_rejected(self):
        with pytest.raises(ValueError):
            PointDistribution([5], truncation_radius=4)

    def test_sorted_by_modulus(self):
        Z = PointDistribution([3, -1, 2j])
        assert list(Z.moduli) == [1, 2, 3]

    def test_arrays_read_only(self):
        Z = PointDistribution([1, 2])
        with pytest.raises(ValueError):
            Z.points[0] = 5


class TestCount:
    def test_disk(self):
        assert count(PointDistribution([1, 2, 3]), ClosedDisk(2)) == 2

    def test_multiplicity(self):
        assert count(PointDistribution([1], [3]), ClosedDisk(1)) == 3

    def test_annulus_brute_force(self):
        Z = PointDistribution(np.arange(1, 101))
        assert count(Z, Annulus(10, 50)) == 40
        assert count(Z, Annulus(10, 50)) == sum(1 for n in range(1, 101) if 10 < n <= 50)

    def test_empty_region(self):
        assert count(PointDistribution([1, 2]), Annulus(5, 6)) == 0
        assert count(PointDistribution(), ClosedDisk(3)) == 0

    def test_lower_bound_past_horizon(self):
        Z = PointDistribution([1, 2], truncation_radius=3)
        assert count(Z, ClosedDisk(2)).lower_bound is False
        assert count(Z, ClosedDisk(10)).lower_bound is True

    @given(distributions(), st.floats(0.5, 30), st.floats(0.5, 30))
    def test_additive_over_disjoint_annuli(self, Z, a, b):
        lo, hi = sorted((a, b))
        if lo == hi:
            return
        assert count(Z, ClosedDisk(lo)) + count(Z, Annulus(lo, hi)) == count(Z, ClosedDisk(hi))

    @given(distributions(), angles, angles, st.floats(0.05, math.pi))
    def test_rotation_preserves_sector_counts(self, Z, theta, phi, a):
        S = Sector(phi, a)
        assert count(rotate(Z, theta), S.rotated(theta)) == count(Z, S)


class TestAlgebra:
    def test_rotate_quarter_turn(self):
        assert rotate(PointDistribution([1]), math.pi / 2) == PointDistribution([1j])

    def test_rotate_identity(self):
        Z = PointDistribution([1, 2j])
        assert rotate(Z, 0) == Z

    @given(distributions(), angles)
    def test_rotate_inverse(self, Z, theta):
        assert rotate(rotate(Z, theta), -theta).isclose(Z, atol=1e-12)

    def test_scale_examples(self):
        assert scale(PointDistribution([1, 2]), -1) == PointDistribution([-1, -2])
        assert scale(PointDistribution([1j]), 2j) == PointDistribution([-2])

    def test_scale_zero(self):
        with pytest.raises(ZeroScalarError):
            scale(PointDistribution([1]), 0)

    @given(distributions(), st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)).filter(lambda w: abs(w) > 0.1))
    def test_scale_inverse(self, Z, w):
        assert scale(scale(Z, w), 1 / w).isclose(Z, atol=1e-9)

    def test_scale_moves_horizon(self):
        Z = PointDistribution([1], truncation_radius=10)
        assert scale(Z, 2j).truncation_radius == 20

    def test_union_and_difference(self):
        a, b = PointDistribution([1], [1]), PointDistribution([1], [2])
        assert union(a, b) == PointDistribution([1], [3])
        assert difference(PointDistribution([1], [3]), a) == PointDistribution([1], [2])

    def test_difference_requires_containment(self):
        with pytest.raises(ContainmentError):
            difference(PointDistribution([1]), PointDistribution([2]))

    @given(distributions(), distributions())
    def test_difference_undoes_union(self, Z, W):
        assert difference(union(Z, W), W) == Z

    def test_union_horizon_is_smaller(self):
        Z = PointDistribution([1, 5], truncation_radius=6)
        W = PointDistribution([2], truncation_radius=3)
        U = union(Z, W)
        assert U.truncation_radius == 3
        assert U == PointDistribution([1, 2])


class TestSectorPart:
    def test_examples(self):
        assert sector_part(PointDistribution([1, 1j, -1]), 0, math.pi / 4) == PointDistribution([1])
        z = complex(math.cos(math.pi / 8), math.sin(math.pi / 8))
        assert sector_part(PointDistribution([z]), 0, math.pi / 4) == PointDistribution([z])

    def test_boundary_is_open(self):
        assert sector_part(PointDistribution([1 + 1j]), 0, math.pi / 4).is_empty()

    def test_lattice_brute_force(self):
        pts = [complex(m, n) for m in range(1, 21) for n in range(1, 21)]
        Z = PointDistribution(pts)
        expected = [z for z in pts if abs(math.atan2(z.imag, z.real) - math.pi / 2) < math.pi / 8]
        assert sector_part(Z, math.pi / 2, math.pi / 8) == PointDistribution(expected)

    def test_origin_excluded(self):
        assert sector_part(PointDistribution([0, 1]), 0, math.pi / 2) == PointDistribution([1])

    def test_half_angle_range(self):
        with pytest.raises(InvalidHalfAngle):
            sector_part(PointDistribution([1]), 0, 2.0)
        with pytest.raises(InvalidHalfAngle):
            sector_part(PointDistribution([1]), 0, 0.0)

    @given(distributions(), angles, st.floats(0.01, math.pi / 2))
    def test_is_subset(self, Z, theta, a):
        assert is_subset(sector_part(Z, theta, a), Z)


class TestUpperDensity:
    def test_integers(self):
        Z = PointDistribution(np.arange(1, 10**5 + 1), truncation_radius=1e5)
        ud = upper_density(Z, 1.0)
        assert 0.99 <= ud.estimate <= 1.01
        assert not ud.diverging

    def test_empty(self):
        assert upper_density(PointDistribution()).estimate == 0

    def test_squares_half_density(self):
        n = np.arange(1, 301)
        Z = PointDistribution(n.astype(float) ** 2, truncation_radius=300.0**2)
        ud = upper_density(Z, 0.5, geometric_grid(1, math.exp(1 / 8), 300.0**2))
        assert ud.estimate == pytest.approx(1.0, abs=1e-12)
        assert not ud.diverging

    def test_lattice_diverges(self):
        from expwidth.generators import generate

        ud = upper_density(generate("lattice spacing=1 horizon=1000"))
        assert ud.diverging


def test_geometric_grid():
    g = geometric_grid(1, 2, 1000)
    assert list(g) == [2.0**k for k in range(10)]
