import csv
import io
import json
import math
import subprocess
import sys

import mpmath
import pytest

from expwidth.cli import RunConfig, main
from expwidth.generators import generate
from expwidth.io import read_distribution


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_generate_round_trip(tmp_path):
    path = tmp_path / "cloud.txt"
    spec = "sector θ=0 a=π/4 density=1 horizon=10^4 seed=7"
    code, _ = run("generate", spec, "--out", str(path))
    assert code == 0
    assert read_distribution(path) == generate(spec)


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        run("generate", "sector a=0.3 horizon=5000 seed=11", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_generate_stdout():
    code, text = run("generate", "arith n=3 dir=pi/2")
    assert code == 0
    assert text.splitlines()[-3:] == ["0 1 1", "0 2 1", "0 3 1"]


def test_geom_disk():
    code, text = run("geom", "disk", "0", "0", "1", "--theta", "0,0.7,pi/3")
    assert code == 0
    values = {(r["quantity"], r["theta"]): float(r["value"]) for r in rows(text)}
    assert values[("breadth", "")] == values[("diameter", "")] == 2
    assert all(v == 2 for (q, _), v in values.items() if q == "width")


def test_geom_square():
    code, text = run("geom", "polygon", "0", "0", "1", "0", "1", "1", "0", "1")
    values = {r["quantity"]: r["value"] for r in rows(text)}
    assert values == {"breadth": "1", "diameter": "1.41421356237"}


def test_geom_strip_file(tmp_path):
    body = tmp_path / "strip.txt"
    body.write_text("strip: 0 3\n")
    code, text = run("geom", "file", str(body), "--theta", "pi/2,0.3")
    widths = [r["value"] for r in rows(text) if r["quantity"] == "width"]
    assert widths == ["3", "inf"]


def test_measure(tmp_path):
    code, text = run("measure", "arith n=10^5", "--r", "10", "--R", "10^4")
    assert code == 0
    values = {r["quantity"]: float(r["value"]) for r in rows(text)}
    assert values["right"] == pytest.approx(float(mpmath.harmonic(10**4) - mpmath.harmonic(10)), abs=1e-11)
    assert values["left"] == 0


def test_measure_table(tmp_path):
    code, text = run("measure", "arith n=100 sym=1", "--table", "--horizon", "100")
    assert code == 0
    assert text.startswith("r,R,value\n")


@pytest.mark.parametrize("source, expected", [
    ("arith n=10^6", 1.0),
    ("arith n=10^6 dir=pi/2", 0.0),
])
def test_density(tmp_path, source, expected):
    out = tmp_path / "run"
    code, text = run("density", source, "--out", str(out))
    assert code == 0
    report = {r["quantity"]: r["value"] for r in rows(text)}
    for key in ("bar", "underline", "inf", "b"):
        assert float(report[key]) == pytest.approx(expected, abs=0.05)
    assert report["converged"] == "true"
    for name in ("density.csv", "block_profile.csv", "density_blocks.svg", "density_curves.svg"):
        assert (out / name).exists()
    assert (out / "density_blocks.svg").read_text().lstrip().startswith("<?xml")


def test_density_empty(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing here\n")
    code, text = run("density", str(empty))
    assert code == 0
    report = {r["quantity"]: r["value"] for r in rows(text)}
    assert [report[k] for k in ("bar", "underline", "inf", "b")] == ["0"] * 4


def test_verdict_sweep():
    code, text = run("verdict", "arith n=10^6", "--b", "pi,2*pi,3*pi", "--theta", "pi/2", "--theorems", "1")
    assert code == 0
    verdicts = [r["verdict"] for r in rows(text)]
    assert verdicts[0] == "complete"
    assert verdicts[1] in ("incomplete", "inconclusive")
    assert verdicts[2] == "incomplete"


def test_sweep_outputs_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        code, _ = run("sweep", "arith n=10^4 sym=1", "--horizon", "10^4", "--theta-steps", "24",
                      "--b", "pi", "--out", str(d))
        assert code == 0
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"sweep.csv", "sweep.svg", "sweep_verdicts.csv"}


def test_sweep_theta_column_covers_half_turn(tmp_path):
    code, text = run("sweep", "arith n=10^4", "--horizon", "10^4", "--theta-steps", "8")
    table = rows(text)
    thetas = [float(r["theta"]) for r in table]
    assert thetas == sorted(thetas) and 0 <= thetas[0] and thetas[-1] < math.pi
    by_theta = {round(float(r["theta"]), 6): float(r["critical_width"]) for r in table}
    assert by_theta[round(math.pi / 2, 6)] == pytest.approx(2 * math.pi, abs=0.3)
    assert by_theta[0.0] == 0.0


def test_hypothesis_violation_exit_code():
    code, _ = run("verdict", "lattice spacing=1 horizon=1500", "--b", "1", "--theorems", "3",
                  "--theta-steps", "4")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["measure", "no-such-thing"],
    ["verdict", "arith n=10", "--b", "1"],
    ["geom", "blob", "1"],
    ["density", "arith n=10^6", "--grid-ratio", "1"],
])
def test_errors_exit_one(argv):
    assert run(*argv)[0] == 1


def test_config_file_and_override(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"horizon": "10^4", "theta_steps": 12, "tolerance": 0.1}))
    cfg = RunConfig.from_sources(str(cfg_path), {"theta_steps": 30})
    assert cfg.horizon == 1e4 and cfg.theta_steps == 30 and cfg.tolerance == 0.1


def test_config_rejects_unknown_keys(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"horizn": 5}))
    with pytest.raises(ValueError):
        RunConfig.from_sources(str(cfg_path), {})


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "expwidth", "geom", "disk", "0", "0", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "breadth,,2" in res.stdout
