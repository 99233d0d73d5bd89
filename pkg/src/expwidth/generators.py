"""Generator-backed point distributions.

A generator is described by a kind and keyword parameters, written on the
command line as e.g. ``arith n=1000 step=1 dir=pi/2`` or
``sector theta=0 a=pi/4 density=1 horizon=10^4 seed=7``. Generators are
materialized up to a horizon; :func:`with_horizon` re-materializes a
generator-backed distribution further out, reproducing the same inner points.
"""

from __future__ import annotations

import ast
import math
import operator

import numpy as np

from .angles import unit
from .divisor import GeneratorSource, PointDistribution

_NAMES = {"pi": math.pi, "π": math.pi, "e": math.e, "inf": math.inf}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}

_KEY_ALIASES = {"θ": "theta", "φ": "phi", "λ": "step_inverse"}


def eval_number(text: str | float | int) -> float:
    """Evaluate a small arithmetic expression: numbers, pi, e, inf, + - * / ^ **."""
    if isinstance(text, (int, float)):
        return float(text)
    src = text.strip().replace("^", "**").replace("π", "pi")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported expression {text!r}")

    return float(ev(tree))


def parse_spec(spec: str) -> GeneratorSource:
    """``'arith n=10 step=1'`` -> GeneratorSource('arith', (('n', 10.0), ('step', 1.0)))."""
    tokens = spec.split()
    if not tokens:
        raise ValueError("empty generator spec")
    kind, params = tokens[0].lower(), {}
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ValueError(f"bad generator parameter {tok!r} (expected key=value)")
        key, value = tok.split("=", 1)
        key = _KEY_ALIASES.get(key, key)
        params[key] = eval_number(value)
    allowed = GENERATORS[kind][1]
    unknown = set(params) - allowed
    if unknown:
        raise ValueError(f"{kind}: unknown parameters {sorted(unknown)}; allowed {sorted(allowed)}")
    return GeneratorSource(kind, tuple(sorted(params.items())))


def _horizon(p: dict, natural: float | None) -> float:
    if "horizon" in p:
        return p["horizon"]
    if natural is None:
        raise ValueError("generator needs a horizon")
    return natural


def _arith(p: dict):
    step = p.get("step", 1.0)
    if "step_inverse" in p:
        step = 1.0 / p["step_inverse"]
    if not step > 0:
        raise ValueError("arith: step must be positive")
    n = p.get("n")
    horizon = _horizon(p, None if n is None else n * step)
    kmax = int(math.floor(horizon / step + 1e-9))
    if n is not None:
        kmax = min(kmax, int(n))
    radii = step * np.arange(1, kmax + 1, dtype=float)
    rays = [unit(p.get("dir", 0.0))]
    if p.get("sym", 0):
        rays.append(-rays[0])
    pts = np.concatenate([radii * u for u in rays]) if radii.size else np.zeros(0, complex)
    return pts, horizon


def _geom(p: dict):
    ratio, start = p.get("ratio", 2.0), p.get("start", 1.0)
    if not (ratio > 1 and start > 0):
        raise ValueError("geom: need ratio > 1 and start > 0")
    n = p.get("n")
    horizon = _horizon(p, None if n is None else start * ratio ** (n - 1))
    kmax = int(math.floor(math.log(horizon / start) / math.log(ratio) + 1e-9)) if horizon >= start else -1
    if n is not None:
        kmax = min(kmax, int(n) - 1)
    radii = start * ratio ** np.arange(kmax + 1, dtype=float)
    return radii * unit(p.get("dir", 0.0)), horizon


def _lattice(p: dict):
    spacing = p.get("spacing", 1.0)
    horizon = _horizon(p, None)
    k = int(math.floor(horizon / spacing))
    m, n = np.meshgrid(np.arange(-k, k + 1), np.arange(-k, k + 1))
    pts = (m.ravel() + 1j * n.ravel()).astype(complex) * spacing
    pts = pts[(np.abs(pts) <= horizon) & (pts != 0)]
    return pts * unit(p.get("angle", 0.0)), horizon


def _sector(p: dict):
    theta, a = p.get("theta", 0.0), p.get("a", math.pi / 4)
    density = p.get("density", 1.0)
    seed = int(p.get("seed", 0))
    horizon = _horizon(p, None)
    if not (0 < a <= math.pi and density > 0):
        raise ValueError("sector: need 0 < a <= pi and density > 0")
    # fixed-width radial blocks, each with its own stream, so that a larger
    # horizon reproduces every point of a smaller one
    width = 1024.0 / density
    chunks = []
    for k in range(int(math.ceil(horizon / width))):
        rng = np.random.default_rng([seed, k])
        n_k = rng.poisson(density * width)
        radii = width * (k + 1.0 - rng.random(n_k))
        args = theta + a * (2.0 * rng.random(n_k) - 1.0)
        keep = radii <= horizon
        chunks.append(radii[keep] * np.exp(1j * args[keep]))
    pts = np.concatenate(chunks) if chunks else np.zeros(0, complex)
    return pts, horizon


GENERATORS = {
    "arith": (_arith, {"n", "step", "step_inverse", "dir", "sym", "horizon"}),
    "geom": (_geom, {"n", "ratio", "start", "dir", "horizon"}),
    "lattice": (_lattice, {"spacing", "angle", "horizon"}),
    "sector": (_sector, {"theta", "a", "density", "horizon", "seed"}),
}


def materialize(source: GeneratorSource | str) -> PointDistribution:
    if isinstance(source, str):
        source = parse_spec(source)
    fn = GENERATORS[source.kind][0]
    pts, horizon = fn(source.as_dict())
    return PointDistribution(pts, truncation_radius=horizon, source=source)


def generate(spec: str) -> PointDistribution:
    return materialize(parse_spec(spec))


def with_horizon(Z: PointDistribution, horizon: float) -> PointDistribution:
    """Re-materialize a generator-backed distribution up to ``horizon``."""
    if Z.source is None or Z.source.kind not in GENERATORS:
        raise ValueError("only plain generator-backed distributions can be extended")
    params = Z.source.as_dict()
    params.pop("n", None)
    params["horizon"] = float(horizon)
    return materialize(GeneratorSource(Z.source.kind, tuple(sorted(params.items()))))
