import json
import subprocess
import sys

import pytest

from primerem.cli import main
from primerem.config import RunConfig, load_config
from primerem.errors import ConfigError
from primerem.output import parse_grid


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def test_precedence(tmp_path):
    cfg_file = tmp_path / "c.json"
    cfg_file.write_text(json.dumps({"y_cap": 1000, "threads": 3, "quad_rel_tol": 1e-7}))
    env = {"PRIMEREM_Y_CAP": "5000", "PRIMEREM_THREADS": "2"}
    cfg = load_config({"threads": 4, "delta_max": None}, env=env, config_file=cfg_file)
    assert cfg.threads == 4          # flag
    assert cfg.y_cap == 5000         # env over file
    assert cfg.quad_rel_tol == 1e-7  # file
    assert cfg.delta_max == 0.5      # default
    env["PRIMEREM_CONFIG"] = str(cfg_file)
    assert load_config({}, env={"PRIMEREM_CONFIG": str(cfg_file)}).y_cap == 1000


def test_defaults():
    cfg = load_config({}, env={})
    assert cfg == RunConfig()
    assert cfg.y_cap == 10**8 and cfg.solve_rel_tol == 1e-3


@pytest.mark.parametrize("flags", [
    {"y_cap": 1}, {"y_cap": 2 * 10**10}, {"delta_max": 1.5}, {"threads": 0},
    {"output_format": "xml"}, {"y_cap": "abc"}, {"y_cap": 10.5}, {"bogus": 1},
])
def test_invalid_config(flags):
    with pytest.raises(ConfigError):
        load_config(flags, env={})


def test_bad_config_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config({}, env={}, config_file=p)
    p.write_text('{"nope": 1}')
    with pytest.raises(ConfigError):
        load_config({}, env={}, config_file=p)
    with pytest.raises(ConfigError):
        load_config({}, env={}, config_file=tmp_path / "missing.json")


def test_parse_grid():
    assert parse_grid("1:3:3") == [1.0, 2.0, 3.0]
    assert parse_grid("10:1000:3:geom") == pytest.approx([10, 100, 1000])
    assert parse_grid("1:2:0") == []
    for bad in ["1:2", "a:b:3", "1:2:3:cubic", "0:10:3:geom", "1:2:-1"]:
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_cli_pi(capsys):
    code, out, _ = run_cli(capsys, "pi", "1000000")
    assert code == 0 and out.strip() == "78498"
    doc = run_json(capsys, "pi", "1000000", "--method", "sieve")
    assert doc["command"] == "pi" and doc["result"]["pi"] == 78498


def test_cli_integral_degenerate(capsys):
    doc = run_json(capsys, "integral", "2", "2")
    assert doc["result"]["value"] == 0


def test_cli_y_grid_matches_single_calls(capsys):
    grid = run_json(capsys, "integral", "2", "--y-grid", "10:100000:7:geom")["result"]
    assert len(grid) == 7
    for row in grid:
        single = run_json(capsys, "integral", "2", repr(row["b"]))["result"]
        assert single["value"] == row["value"]
        assert single["abs_error"] == row["abs_error"]


def test_cli_empty_grid(capsys):
    code, out, _ = run_cli(capsys, "integral", "2", "--y-grid", "10:100:0", "--format", "csv")
    assert code == 0
    assert out.strip().splitlines() == ["a,b,value,abs_error,method"]


def test_cli_nsolve_json(capsys):
    doc = run_json(capsys, "nsolve", "--delta", "0.5")
    r = doc["result"]
    assert r["target"] == pytest.approx(-180.034, abs=1e-3)
    assert r["n_value"] == pytest.approx(64.8, abs=0.1)
    assert not r["multiple_roots"] and not r["cap_hit"]


def test_cli_exit_codes(capsys):
    assert run_cli(capsys, "integral", "1", "10")[0] == 1                  # a < 2
    assert run_cli(capsys, "integral", "2")[0] == 2                        # no upper limit
    assert run_cli(capsys, "li", "1")[0] == 1                              # singularity
    assert run_cli(capsys, "nsolve", "--delta", "0.9")[0] == 1             # out of range
    assert run_cli(capsys, "integral", "2", "--y-grid", "bad")[0] == 2
    assert run_cli(capsys, "pi", "10", "--y-cap", "1")[0] == 2
    code, _, err = run_cli(capsys, "cache", "show")
    assert code == 2 and "cache" in err


def test_cli_deterministic(capsys):
    argv = ["weighted", "2", "100000", "--delta", "0.3", "--format", "json"]
    outs = {run_cli(capsys, *argv)[1] for _ in range(3)}
    assert len(outs) == 1


def test_cli_cache_commands(capsys, tmp_path):
    path = str(tmp_path / "ck.bin")
    doc = run_json(capsys, "cache", "warm", "30000000", "--cache-path", path)
    # prime sum cross-checked against a plain bytearray sieve
    assert doc["result"]["rows"] == [{"x": 30000000, "pi": 1857859, "prime_sum": 26942805919966}]
    assert run_json(capsys, "cache", "show", "--cache-path", path)["result"]["records"] == 1
    doc = run_json(capsys, "cache", "clear", "--cache-path", path)
    assert doc["result"]["records"] == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "primerem", "li", "2"],
                         capture_output=True, text=True, check=True).stdout
    assert float(out) == pytest.approx(1.0451637801174951, rel=1e-15)
