import itertools
import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import qcdiff

ROOT = Path(os.environ.get("QCDIFF_SOURCE_DIR", Path(__file__).resolve().parents[2]))
TAU = (1 + math.sqrt(5)) / 2
GOLDEN = {"preset": "golden"}


def test_golden_scheme_density_and_dual():
    info = qcdiff.scheme_info(GOLDEN)
    basis = np.array([[1.0, TAU], [1.0, -1.0 / TAU]])
    assert info["d"] == 1 and info["m"] == 1
    assert np.allclose(info["basis"], basis, atol=1e-15)
    assert np.allclose(info["dual_basis"], np.linalg.inv(basis).T, atol=1e-14)
    assert info["density"] == pytest.approx(1 / math.sqrt(5), rel=1e-14)


def test_enumeration_matches_brute_force():
    got = qcdiff.enumerate_points(GOLDEN, [-6, 6], [-1, 1])
    brute = []
    for n, k in itertools.product(range(-30, 31), repeat=2):
        x, y = n + k * TAU, n - k / TAU
        if -6 <= x <= 6 and -1 <= y <= 1:
            brute.append((n, k))
    assert sorted(tuple(c) for _, _, c in got) == sorted(brute)


def test_fibonacci_gaps():
    # internal window of length tau whose ends no lattice point hits
    points = qcdiff.enumerate_points(GOLDEN, [-200, 200], [-0.9, TAU - 0.9])
    xs = np.sort([x[0] for x, _, _ in points])
    gaps = np.diff(xs)
    assert set(np.round(gaps, 9)) == {round(1.0, 9), round(TAU, 9)}


def test_materialized_weights_are_gaussian_in_internal_space():
    sigma = 0.6
    xs, ws = qcdiff.materialize(GOLDEN, {"kind": "gaussian", "sigma": sigma}, [-5, 5])
    got = {round(x[0], 10): w for x, w in zip(xs, ws)}
    brute = {}
    for n, k in itertools.product(range(-40, 41), repeat=2):
        x, y = n + k * TAU, n - k / TAU
        w = math.exp(-math.pi * y * y / sigma**2)
        if -5 <= x <= 5 and w > 1e-12:
            brute[round(x, 10)] = w
    assert got.keys() == brute.keys()
    for x, w in brute.items():
        assert got[x] == pytest.approx(w, abs=1e-14)


def test_analytic_peaks_match_closed_form():
    sigma = 0.6
    dens = 1 / math.sqrt(5)
    peaks = qcdiff.analytic_diffraction(GOLDEN, {"kind": "gaussian", "sigma": sigma}, [-4, 4], 1e-8)
    central = [p for p in peaks if abs(p["frequency"][0]) < 1e-12]
    assert len(central) == 1
    assert central[0]["intensity"] == pytest.approx((dens * sigma) ** 2, rel=1e-12)
    for p in peaks:
        eta = p["internal"][0]
        amp = dens * sigma * math.exp(-math.pi * sigma**2 * eta**2)
        assert abs(p["amplitude"] - amp) <= 1e-14
        assert p["intensity"] == pytest.approx(amp * amp, rel=1e-12, abs=1e-300)


def test_poisson_summation_residual_within_bound():
    r = qcdiff.psf_verify(GOLDEN, {"kind": "gaussian", "sigma": 1.0}, {"kind": "gaussian", "sigma": 0.7}, 12.0)
    assert r["pass"]
    assert abs(r["lhs"] - r["rhs"]) == pytest.approx(r["residual"], abs=1e-15)


def test_run_config_writes_report(tmp_path):
    result = qcdiff.run_config(ROOT / "configs" / "examples" / "z2_psf.json", out_dir=tmp_path)
    assert result["command"] == "psf"
    assert result["pass"] and result["checks"]
    assert json.loads((tmp_path / "report.json").read_text())["pass"] is True


def test_config_error_is_raised_without_artifacts(tmp_path):
    assert "psf" in qcdiff.command_names()
    with pytest.raises(qcdiff.ConfigError):
        qcdiff.run_command("psf", {"command": "psf", "cases": [{"scheme": {"preset": "nope"}}]}, out_dir=tmp_path)
    assert not any(tmp_path.iterdir())


def _validator():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((ROOT / "schema" / "config.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


CONFIGS = sorted(p for d in ("acceptance", "examples") for p in (ROOT / "configs" / d).glob("*.json"))


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: f"{p.parent.name}/{p.name}")
def test_shipped_configs_validate(path):
    errors = list(_validator().iter_errors(json.loads(path.read_text())))
    assert not errors, [e.message for e in errors]


def test_schema_rejects_broken_configs():
    v = _validator()
    assert not v.is_valid({"command": "diffract"})
    assert not v.is_valid({"command": "explode"})
    assert not v.is_valid({"command": "psf", "cases": [{"scheme": GOLDEN, "g": {"kind": "gaussian"},
                                                        "h": {"kind": "gaussian", "sigma": 1}}]})
