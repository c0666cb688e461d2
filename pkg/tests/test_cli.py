"""CLI contract: exit codes, report formats, cache behavior."""

import json
import math

import numpy as np
import pytest

import miw.bounds
from miw import cli
from miw.checks import make_check
from miw.ground_state import solve


def test_solve_prints_summary(capsys):
    assert cli.main(["solve", "--n", "3"]) == 0
    out = capsys.readouterr().out
    assert "x1 = 0.99999" in out
    assert "zero-mean residual" in out


def test_solve_rejects_small_n(capsys):
    assert cli.main(["solve", "--n", "1"]) == 2
    assert "at least 2" in capsys.readouterr().err


def test_solve_rejects_bad_tol():
    assert cli.main(["solve", "--n", "10", "--tol", "-1"]) == 2


def test_unknown_flag_is_usage_error():
    assert cli.main(["solve", "--frobnicate"]) == 2
    assert cli.main(["nonsense"]) == 2


def test_help_exits_zero():
    assert cli.main(["--help"]) == 0


def test_solve_writes_out_file(tmp_path, capsys):
    out = tmp_path / "entry.json"
    assert cli.main(["solve", "--n", "10", "--out", str(out)]) == 0
    capsys.readouterr()
    entry = json.loads(out.read_text())
    assert entry["n_worlds"] == 10
    assert entry["format_version"] == cli.FORMAT_VERSION
    assert len(entry["half_locations"]) == 5


def test_cache_roundtrip_is_bitexact(tmp_path):
    cfg = solve(1000)
    cli.save_configuration(cfg, tmp_path)
    back = cli.load_configuration(1000, 1e-13, "double", tmp_path)
    assert back is not None
    assert np.array_equal(cfg.locations, back.locations)
    assert np.array_equal(cfg.partial_sums, back.partial_sums)
    assert cfg.shoot_value == back.shoot_value
    assert cfg.residuals == back.residuals


def test_cache_mismatch_is_miss(tmp_path):
    cli.save_configuration(solve(1000), tmp_path)
    assert cli.load_configuration(1000, 1e-12, "double", tmp_path) is None
    assert cli.load_configuration(1001, 1e-13, "double", tmp_path) is None


def test_cache_corruption_is_miss(tmp_path):
    cli.save_configuration(solve(50), tmp_path)
    path = cli.cache_path(tmp_path, 50, 1e-13, "double")
    path.write_text(path.read_text()[:40])
    assert cli.load_configuration(50, 1e-13, "double", tmp_path) is None


def test_solve_uses_cache(tmp_path, capsys):
    args = ["solve", "--n", "500", "--cache-dir", str(tmp_path)]
    assert cli.main(args) == 0
    assert "cache miss" in capsys.readouterr().out
    assert cli.main(args) == 0
    assert "cache hit" in capsys.readouterr().out
    assert cli.cache_path(tmp_path, 500, 1e-13, "double").exists()


def test_env_var_overrides_cache_flag(tmp_path, monkeypatch, capsys):
    env_dir = tmp_path / "env"
    flag_dir = tmp_path / "flag"
    monkeypatch.setenv("MIW_CACHE_DIR", str(env_dir))
    assert cli.main(["solve", "--n", "40", "--cache-dir", str(flag_dir)]) == 0
    capsys.readouterr()
    assert cli.cache_path(env_dir, 40, 1e-13, "double").exists()
    assert not flag_dir.exists()


def test_geometric_grid():
    assert cli._geometric_grid(10, 10, 1) == [10]
    grid = cli._geometric_grid(100, 100_000, 4)
    assert grid == [100, 1000, 10_000, 100_000]
    assert cli._geometric_grid(2, 4, 9) == [2, 3, 4]


def test_verify_csv_contract(tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = cli.main(
        ["verify", "--n-min", "2", "--n-max", "4", "--steps", "3", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "N,x1,d_K,d_W,N_dK,N_dW_scaled,checks_passed,checks_total"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "2"
    assert float(first[1]) == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-12)
    assert first[6] == first[7] == "4"
    err = capsys.readouterr().err
    assert "skipped N=2" in err


def test_verify_json_mirrors_csv(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = cli.main(
        [
            "verify",
            "--n-min", "101",
            "--n-max", "1000",
            "--steps", "2",
            "--format", "json",
            "--out", str(out),
        ]
    )
    assert code == 0
    capsys.readouterr()
    payload = json.loads(out.read_text())
    assert [row["N"] for row in payload["rows"]] == [101, 1000]
    row = payload["rows"][0]
    assert set(row) == {
        "N", "x1", "d_K", "d_W", "N_dK", "N_dW_scaled", "checks_passed", "checks_total"
    }
    assert row["checks_passed"] == row["checks_total"] == 13
    per_check = payload["checks"]["101"]
    assert any(c["name"] == "square_gap" for c in per_check)
    assert all("margin" in c for c in per_check)
    assert payload["wasserstein_constant"] == 0.0


def test_verify_bad_range(capsys):
    assert cli.main(["verify", "--n-min", "10", "--n-max", "5", "--steps", "2"]) == 2
    assert cli.main(["verify", "--n-min", "2", "--n-max", "4", "--steps", "0"]) == 2


def test_verify_exit_one_on_failing_check(monkeypatch, capsys):
    real = miw.bounds.run_sweep

    def rigged(n_values, tol=1e-13, max_workers=1):
        sweep = real(n_values, tol=tol)
        bad = make_check("kolmogorov_upper", 2.0, 1.0)
        sweep.checks[n_values[0]].append(bad)
        return sweep

    monkeypatch.setattr(miw.bounds, "run_sweep", rigged)
    code = cli.main(["verify", "--n-min", "2", "--n-max", "3", "--steps", "2"])
    assert code == 1
    assert "FAILED check kolmogorov_upper" in capsys.readouterr().err


def test_coupling_table(capsys):
    assert cli.main(["coupling", "--n", "3"]) == 0
    out = capsys.readouterr().out
    assert "E h(W*)" in out
    assert "0.24999999999999" in out
    assert "identity residual tanh" in out


def test_coupling_subset_of_functions(capsys):
    assert cli.main(["coupling", "--n", "2", "--identity-functions", "w", "sin"]) == 0
    out = capsys.readouterr().out
    assert "identity residual w " in out
    assert "w3" not in out


def test_coupling_unknown_function(capsys):
    assert cli.main(["coupling", "--n", "3", "--identity-functions", "exp"]) == 2


def test_plotdata_deterministic(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    args = ["plotdata", "--n-min", "10", "--n-max", "1000", "--steps", "3"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.count("# series:") == 4
    for name in (
        "kolmogorov_distance",
        "wasserstein_distance",
        "scaled_kolmogorov",
        "scaled_wasserstein",
    ):
        assert f"# series: {name}" in text
    block = text.split("\n\n\n")[2].splitlines()
    ns = [int(line.split()[0]) for line in block if not line.startswith("#")]
    assert ns == sorted(ns) == [10, 100, 1000]
    scaled = [float(line.split()[1]) for line in block if not line.startswith("#")]
    assert all(0.5 <= v <= 55.0 for v in scaled)


def test_plotdata_bad_flags():
    assert cli.main(["plotdata", "--n-min", "5", "--n-max", "2", "--steps", "2"]) == 2
    assert cli.main(["plotdata", "--n-min", "1", "--n-max", "9", "--steps", "2"]) == 2


def test_stein_check_passes(capsys):
    code = cli.main(
        ["stein-check", "--n", "101", "--z-count", "5", "--w-count", "10"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "0 violations" in out
    assert "tail-decay constant" in out


def test_cache_entry_text_roundtrips():
    cfg = solve(7)
    entry = json.loads(cli.cache_entry_text(cfg))
    assert entry["half_locations"] == [float(v) for v in cfg.half_locations]
    assert entry["shoot_value"] == cfg.shoot_value
