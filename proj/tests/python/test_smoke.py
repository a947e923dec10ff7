import json
import math
import os
from pathlib import Path

import pytest

import platopt

FIXTURES = Path(os.environ.get("PLATOPT_FIXTURES_DIR", Path(__file__).parents[2] / "fixtures"))


SMALL = """\
simulation:
  timestep: 5 min
  horizon: 30 min
  reoptimisation_interval: 15 min
  span: 1 h
nodes:
  - id: main
devices:
  - {id: gen, type: source, carrier: el, node: main, flow_max: 5 MW}
  - {id: load, type: sink, carrier: el, node: main, flow_min: 2 MW, flow_max: 2 MW}
"""


def test_version():
    assert platopt.__version__ == "0.1.0"


def test_well_split_sums_to_one():
    s = platopt.well_split(500.0, 0.6)
    assert math.isclose(s["water"] + s["oil"] + s["gas"], 1.0, abs_tol=1e-12)
    assert math.isclose(s["gas"], 200.0 / 201.0, rel_tol=1e-12)


def test_gas_turbine_fuel():
    assert math.isclose(platopt.gas_turbine_fuel(10.9, 21.8, 2.0, 0.3, 1.0, 0.0, 40.0), 0.7085)


def test_validate_reports_broken_fixture():
    assert platopt.validate(str(FIXTURES / "base.yaml")) == []
    diagnostics = platopt.validate(str(FIXTURES / "broken.yaml"))
    assert any("N9" in d for d in diagnostics)


def test_bad_config_raises(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("simulation: [\n")
    with pytest.raises(platopt.ConfigError):
        platopt.validate(str(path))
    with pytest.raises(platopt.IoError):
        platopt.validate(str(tmp_path / "missing.yaml"))


def test_simulate_small_system(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(SMALL)
    result = platopt.simulate(str(path))
    assert result["steps"] == 12
    assert len(result["windows"]) == 4
    assert all(w["status"] == "optimal" for w in result["windows"])
    assert result["series"]["dev.gen.flow"] == pytest.approx([2.0] * 12, abs=1e-6)
    assert result["kpis"]["emission_total_kg"] == 0.0


def test_simulate_reserve_day_prefix():
    result = platopt.simulate(str(FIXTURES / "reserve_day.yaml"), steps=24)
    assert result["steps"] == 24
    assert min(result["emission"]) > 0.0
    assert result["kpis"]["min_reserve_mw"] >= 5.0 - 1e-6


def test_cli_round_trip(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(SMALL)
    out = tmp_path / "bundle"
    code, stdout, _ = platopt.run_cli(["simulate", "--config", str(path), "--out", str(out), "--quiet"])
    assert code == 0, stdout
    code, stdout, _ = platopt.run_cli(["kpi", str(out), "--json"])
    assert code == 0
    assert json.loads(stdout)["steps"] == 12
    assert platopt.read_results(str(out))["kpis"]["steps"] == 12

    code, _, stderr = platopt.run_cli(["simulate", "--config", str(path), "--out", str(out), "--quiet"])
    assert code == 1
    assert json.loads(stderr.strip().splitlines()[-1])["exit_code"] == 1
