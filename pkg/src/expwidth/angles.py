"""Direction helpers with exact quarter turns.

Rotating by pi/2 in floating point through cos/sin leaves a residue of
about 6e-17 in the real part, which would make a purely imaginary set look
slightly non-imaginary. Multiples of pi/2 are therefore mapped to the exact
units 1, i, -1, -i.
"""

import math

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

_QUARTER_UNITS = (complex(1, 0), complex(0, 1), complex(-1, 0), complex(0, -1))


def quarter_turns(theta: float) -> int | None:
    """Return k in {0,1,2,3} if theta is (numerically) k*pi/2 mod 2*pi."""
    k = round(theta / HALF_PI)
    if abs(theta - k * HALF_PI) <= 8.0 * math.ulp(max(1.0, abs(theta))):
        return k % 4
    return None


def unit(theta: float) -> complex:
    """e^{i theta}, exact at multiples of pi/2."""
    k = quarter_turns(theta)
    if k is not None:
        return _QUARTER_UNITS[k]
    return complex(math.cos(theta), math.sin(theta))


def wrap(theta):
    """Reduce angles into (-pi, pi]. Works on scalars and numpy arrays."""
    out = -((-theta + math.pi) % TWO_PI) + math.pi
    return out


def parse_angle(text: str) -> float:
    """Parse '0.3', 'pi/2', '3*pi/4', '-π/8', '10^4'."""
    from .generators import eval_number

    return eval_number(text)
