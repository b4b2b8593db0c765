"""Command-line interface: schemas, exit codes, config merging, and
reproducibility."""

import json
import math

import pytest

from fracops.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_ndjson(out):
    return [json.loads(line) for line in out.strip().splitlines()]


class TestEval:
    def test_torsion_row_schema(self, capsys):
        code, out, err = run(capsys, "eval", "field=ball_torsion", "x=0.0", "--s", "0.5")
        assert code == 0
        rows = parse_ndjson(out)
        assert len(rows) == 1
        assert set(rows[0]) == {"x", "value", "err_est"}
        assert rows[0]["value"] == pytest.approx(1.0, rel=1e-3)
        assert rows[0]["err_est"] >= 0.0

    def test_multiple_points(self, capsys):
        code, out, _ = run(capsys, "eval", "x=0.0;0.3;0.6")
        assert code == 0
        assert len(parse_ndjson(out)) == 3

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "eval", "x=0.0", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,value,err_est"
        assert len(lines) == 2


class TestSymbol:
    def test_fraclap_exact(self, capsys):
        code, out, _ = run(capsys, "symbol", "xi=2.0", "--s", "0.5")
        assert code == 0
        row = parse_ndjson(out)[0]
        assert set(row) == {"xi", "symbol", "err_est"}
        assert row["symbol"] == pytest.approx(2.0, rel=1e-12)
        assert row["err_est"] == 0.0

    def test_grid_of_frequencies(self, capsys):
        code, out, _ = run(capsys, "symbol", "xi_min=1.0", "xi_max=2.0", "count=5")
        assert code == 0
        assert len(parse_ndjson(out)) == 5

    def test_stable_kernel(self, capsys):
        code, out, _ = run(
            capsys, "symbol", "kernel=stable", "atoms=(1 1.0);(-1 1.0)",
            "xi=3.0", "--n", "1", "--s", "0.5",
        )
        assert code == 0
        assert parse_ndjson(out)[0]["symbol"] == pytest.approx(3.0, rel=1e-12)


class TestWos:
    def test_schema_and_value(self, capsys):
        code, out, _ = run(capsys, "wos", "x=0.0", "--samples", "5000", "--seed", "1")
        assert code == 0
        row = parse_ndjson(out)[0]
        assert set(row) == {"x", "mean", "stderr", "n_samples", "mean_steps",
                            "max_steps_hit"}
        assert abs(row["mean"] - 1.0) < 4 * row["stderr"]

    def test_reproducible_byte_identical(self, capsys):
        args = ("wos", "x=0.2", "--samples", "2000", "--seed", "7")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_seed_matters(self, capsys):
        _, out1, _ = run(capsys, "wos", "x=0.2", "--samples", "2000", "--seed", "1")
        _, out2, _ = run(capsys, "wos", "x=0.2", "--samples", "2000", "--seed", "2")
        assert out1 != out2


class TestSolve:
    def test_torsion_profile(self, capsys):
        code, out, _ = run(capsys, "solve", "f=q", "--grid-n", "64")
        assert code == 0
        rows = parse_ndjson(out)
        assert len(rows) == 64
        assert set(rows[0]) == {"x", "value", "residual"}
        mid = rows[31]
        assert mid["value"] == pytest.approx(1.0, abs=0.05)
        assert rows[0]["residual"] < 1e-8


class TestObstacle:
    def test_summary_and_artifacts(self, capsys, tmp_path):
        out_path = str(tmp_path / "sol.csv")
        code, out, _ = run(
            capsys, "obstacle", "N=512", "height=0.5", "--tol", "1e-9",
            "--out", out_path,
        )
        assert code == 0
        row = parse_ndjson(out)[0]
        assert set(row) == {"exponent", "r_squared", "free_boundary",
                            "residual", "sweeps", "contact_nodes"}
        assert row["r_squared"] > 0.99
        assert row["contact_nodes"] > 0
        with open(out_path) as fh:
            assert fh.readline().strip() == "x,value"
        with open(out_path + ".json") as fh:
            meta = json.load(fh)
        assert meta["N"] == 512
        assert "exponent" in meta


class TestHeat:
    def test_schema_and_closed_form(self, capsys):
        code, out, _ = run(capsys, "heat", "t=1.0", "count=11", "--s", "0.5")
        assert code == 0
        rows = parse_ndjson(out)
        assert len(rows) == 11
        assert set(rows[0]) == {"x", "p", "mass_defect"}
        center = rows[5]
        assert center["p"] == pytest.approx(1.0 / math.pi, rel=1e-10)
        assert all(r["mass_defect"] < 1e-6 for r in rows)


class TestVerify:
    def test_all_pass(self, capsys):
        code, out, _ = run(capsys, "verify")
        assert code == 0
        lines = out.strip().splitlines()
        named = [ln for ln in lines if ln.startswith(("PASS", "FAIL"))]
        assert len(named) >= 12
        assert all(ln.startswith("PASS") for ln in named)
        assert lines[-1].endswith("checks passed")


class TestConfigAndErrors:
    def test_config_file_merge_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("s=0.3\nxi=2.0\n# comment\n")
        code, out, _ = run(capsys, "symbol", "--config", str(cfg), "--s", "0.5")
        assert code == 0
        # flag --s 0.5 overrides config s=0.3: |2|^{2*0.5} = 2
        assert parse_ndjson(out)[0]["symbol"] == pytest.approx(2.0, rel=1e-12)

    def test_config_used_when_no_flag(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("s=0.25\nxi=2.0\n")
        code, out, _ = run(capsys, "symbol", "--config", str(cfg))
        assert code == 0
        assert parse_ndjson(out)[0]["symbol"] == pytest.approx(2.0**0.5, rel=1e-12)

    def test_positional_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("xi=1.0\n")
        code, out, _ = run(capsys, "symbol", "xi=2.0", "--config", str(cfg), "--s", "0.5")
        assert code == 0
        assert parse_ndjson(out)[0]["symbol"] == pytest.approx(2.0, rel=1e-12)

    def test_missing_command_usage_error(self, capsys):
        code, _, err = run(capsys)
        assert code == 1
        assert "usage error" in err

    def test_bad_positional_usage_error(self, capsys):
        code, _, err = run(capsys, "eval", "notakeyvalue")
        assert code == 1
        assert "usage error" in err

    def test_unknown_field_usage_error(self, capsys):
        code, _, err = run(capsys, "eval", "field=bogus")
        assert code == 1

    def test_bad_config_line(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("just a line without equals\n")
        code, _, err = run(capsys, "symbol", "--config", str(cfg))
        assert code == 1

    def test_numerical_error_exit_2(self, capsys):
        # tol=0 is unattainable: PSOR reports non-convergence
        code, _, err = run(capsys, "obstacle", "N=64", "--tol", "0")
        assert code == 2
        diag = json.loads(err.strip().splitlines()[-1])
        assert "error" in diag and "message" in diag

    def test_out_file(self, capsys, tmp_path):
        path = str(tmp_path / "rows.ndjson")
        code, out, _ = run(capsys, "symbol", "xi=1.0", "--out", path)
        assert code == 0
        assert out == ""
        with open(path) as fh:
            assert json.loads(fh.readline())["symbol"] == pytest.approx(1.0)
