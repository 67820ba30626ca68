"""End-to-end CLI tests via click's runner."""

import json

import pytest
from click.testing import CliRunner

from atomlight.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def presets_dir(tmp_path, runner):
    result = runner.invoke(main, ["init", str(tmp_path / "presets")])
    assert result.exit_code == 0, result.output
    return tmp_path / "presets"


class TestInit:
    def test_writes_three_presets(self, tmp_path, runner):
        result = runner.invoke(main, ["init", str(tmp_path / "p")])
        assert result.exit_code == 0
        assert sorted(p.name for p in (tmp_path / "p").glob("*.seq")) == [
            "hybrid_interferometer.seq",
            "rabi_from_spinwave.seq",
            "rabi_from_write.seq",
        ]

    def test_refuses_overwrite_without_force(self, tmp_path, runner):
        assert runner.invoke(main, ["init", str(tmp_path / "p")]).exit_code == 0
        blocked = runner.invoke(main, ["init", str(tmp_path / "p")])
        assert blocked.exit_code == 8
        forced = runner.invoke(main, ["init", str(tmp_path / "p"), "--force"])
        assert forced.exit_code == 0


class TestSimulate:
    def test_missing_file(self, runner):
        result = runner.invoke(main, ["simulate", "missing.seq"])
        assert result.exit_code == 3
        assert "file not found" in result.output

    def test_parse_error_is_located(self, tmp_path, runner):
        bad = tmp_path / "bad.seq"
        bad.write_text("stokkes amp=1.0\n", encoding="utf-8")
        result = runner.invoke(main, ["simulate", str(bad)])
        assert result.exit_code == 4
        assert "line 1" in result.output

    def test_plain_run_to_stdout(self, presets_dir, runner):
        result = runner.invoke(
            main, ["simulate", str(presets_dir / "hybrid_interferometer.seq")]
        )
        assert result.exit_code == 0
        assert result.output.startswith("# atomlight csv schema: records/1")
        assert "write," in result.output and "spinwave," in result.output

    def test_phase_scan_csv(self, presets_dir, runner, tmp_path):
        out = tmp_path / "fringe.csv"
        result = runner.invoke(
            main,
            [
                "simulate",
                str(presets_dir / "hybrid_interferometer.seq"),
                "--scan",
                "phase=0:12.566370614359172:100",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "# atomlight csv schema: scan/1"
        body = [ln for ln in lines if ln and not ln.startswith("#")]
        # header + 100 points x 2 channels
        assert len(body) == 1 + 200
        assert sum(1 for ln in body if ",write," in ln) == 100

    def test_csv_is_default_format(self, presets_dir, runner, tmp_path):
        out = tmp_path / "run.csv"
        result = runner.invoke(
            main,
            ["simulate", str(presets_dir / "rabi_from_spinwave.seq"), "--out", str(out)],
        )
        assert result.exit_code == 0
        assert out.read_text().startswith("# atomlight csv schema: records/1")

    def test_json_inferred_from_extension(self, presets_dir, runner, tmp_path):
        out = tmp_path / "run.json"
        result = runner.invoke(
            main,
            ["simulate", str(presets_dir / "rabi_from_spinwave.seq"), "--out", str(out)],
        )
        assert result.exit_code == 0
        payload = json.loads(out.read_text())
        assert payload["schema_version"] == 1
        assert payload["kind"] == "records"

    def test_explicit_format_wins(self, presets_dir, runner, tmp_path):
        out = tmp_path / "run.json"
        result = runner.invoke(
            main,
            [
                "simulate",
                str(presets_dir / "rabi_from_spinwave.seq"),
                "--out",
                str(out),
                "--format",
                "csv",
            ],
        )
        assert result.exit_code == 0
        assert out.read_text().startswith("# atomlight csv schema: records/1")

    def test_bad_scan_name(self, presets_dir, runner):
        result = runner.invoke(
            main,
            ["simulate", str(presets_dir / "hybrid_interferometer.seq"), "--scan", "bogus=0:1:5"],
        )
        assert result.exit_code == 5
        assert "unknown scan name" in result.output

    def test_bad_scan_grid(self, presets_dir, runner):
        result = runner.invoke(
            main,
            ["simulate", str(presets_dir / "hybrid_interferometer.seq"), "--scan", "phase=0:1"],
        )
        assert result.exit_code == 5

    def test_zero_count_scan_is_empty_not_error(self, presets_dir, runner, tmp_path):
        out = tmp_path / "empty.csv"
        result = runner.invoke(
            main,
            [
                "simulate",
                str(presets_dir / "hybrid_interferometer.seq"),
                "--scan",
                "phase=0:1:0",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0
        body = [ln for ln in out.read_text().splitlines() if ln and not ln.startswith("#")]
        assert len(body) == 1  # header only

    def test_trace_rejects_bad_sample_count(self, presets_dir, runner):
        result = runner.invoke(
            main,
            ["simulate", str(presets_dir / "rabi_from_spinwave.seq"), "--trace", "1"],
        )
        assert result.exit_code == 5

    def test_scan_and_trace_cannot_combine(self, presets_dir, runner):
        result = runner.invoke(
            main,
            [
                "simulate",
                str(presets_dir / "rabi_from_spinwave.seq"),
                "--trace",
                "64",
                "--scan",
                "dur=0:100:5",
            ],
        )
        assert result.exit_code == 2

    def test_trace_produces_time_series(self, presets_dir, runner, tmp_path):
        out = tmp_path / "trace.csv"
        result = runner.invoke(
            main,
            [
                "simulate",
                str(presets_dir / "rabi_from_spinwave.seq"),
                "--trace",
                "128",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0
        body = [ln for ln in out.read_text().splitlines() if ln and not ln.startswith("#")]
        assert len(body) > 100

    def test_seeded_noise_is_reproducible(self, presets_dir, runner, tmp_path):
        args = [
            "simulate",
            str(presets_dir / "hybrid_interferometer.seq"),
            "--scan",
            "phase=0:6.283185307179586:20",
            "--noise",
            "0.02",
            "--seed",
            "5",
        ]
        a = runner.invoke(main, args + ["--out", str(tmp_path / "a.csv")])
        b = runner.invoke(main, args + ["--out", str(tmp_path / "b.csv")])
        assert a.exit_code == b.exit_code == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_jobs_flag_identical_output(self, presets_dir, runner, tmp_path):
        base = [
            "simulate",
            str(presets_dir / "hybrid_interferometer.seq"),
            "--scan",
            "phase=0:6.283185307179586:16",
        ]
        a = runner.invoke(main, base + ["--jobs", "1", "--out", str(tmp_path / "a.csv")])
        b = runner.invoke(main, base + ["--jobs", "4", "--out", str(tmp_path / "b.csv")])
        assert a.exit_code == b.exit_code == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_output_dir_env(self, presets_dir, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("ATOMLIGHT_OUTPUT_DIR", str(tmp_path / "outputs"))
        result = runner.invoke(
            main,
            ["simulate", str(presets_dir / "rabi_from_spinwave.seq"), "--out", "run.csv"],
        )
        assert result.exit_code == 0
        assert (tmp_path / "outputs" / "run.csv").is_file()


class TestFit:
    def test_fringe_round_trip(self, presets_dir, runner, tmp_path):
        fringe = tmp_path / "fringe.csv"
        assert (
            runner.invoke(
                main,
                [
                    "simulate",
                    str(presets_dir / "hybrid_interferometer.seq"),
                    "--scan",
                    "phase=0:12.566370614359172:100",
                    "--out",
                    str(fringe),
                ],
            ).exit_code
            == 0
        )
        result = runner.invoke(main, ["fit", str(fringe), "--model", "fringe"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["model"] == "fringe"
        assert "visibility" in payload["params"]
        assert payload["params"]["visibility"] == pytest.approx(0.966, abs=0.005)

    def test_rabi_round_trip(self, presets_dir, runner, tmp_path):
        trace = tmp_path / "trace.csv"
        assert (
            runner.invoke(
                main,
                [
                    "simulate",
                    str(presets_dir / "rabi_from_spinwave.seq"),
                    "--trace",
                    "200",
                    "--out",
                    str(trace),
                ],
            ).exit_code
            == 0
        )
        result = runner.invoke(main, ["fit", str(trace), "--model", "rabi"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["params"]["omega"] == pytest.approx(2e8, rel=0.01)
        assert payload["params"]["gamma"] > 0.0

    def test_unknown_model_is_usage_error(self, runner, tmp_path):
        data = tmp_path / "x.csv"
        data.write_text("# atomlight csv schema: records/1\nchannel,time_ns,intensity\n")
        result = runner.invoke(main, ["fit", str(data), "--model", "nosuch"])
        assert result.exit_code == 2

    def test_schema_mismatch(self, runner, tmp_path):
        data = tmp_path / "x.csv"
        data.write_text("a,b\n1,2\n", encoding="utf-8")
        result = runner.invoke(main, ["fit", str(data), "--model", "fringe"])
        assert result.exit_code == 6

    def test_non_convergence_exit_code(self, runner, tmp_path):
        rows = "\n".join(f"write,{t}.0,0.5" for t in range(40))
        data = tmp_path / "flat.csv"
        data.write_text(
            "# atomlight csv schema: records/1\nchannel,time_ns,intensity\n" + rows + "\n",
            encoding="utf-8",
        )
        result = runner.invoke(main, ["fit", str(data), "--model", "rabi"])
        assert result.exit_code == 7

    def test_missing_input(self, runner):
        assert runner.invoke(main, ["fit", "none.csv", "--model", "rabi"]).exit_code == 3


class TestFigures:
    def test_generates_all_datasets(self, runner, tmp_path):
        outdir = tmp_path / "figs"
        result = runner.invoke(
            main, ["figures", str(outdir), "--points", "40", "--trace-points", "64"]
        )
        assert result.exit_code == 0, result.output
        names = sorted(p.name for p in outdir.iterdir())
        assert names == [
            "fig2a.csv",
            "fig2b.csv",
            "fig2c.csv",
            "fig2d.csv",
            "fig4.csv",
            "fig5.csv",
            "fig6a.csv",
            "fig6b.csv",
            "summary.json",
        ]
        summary = json.loads((outdir / "summary.json").read_text())
        assert summary["fig4"]["write_visibility"] == pytest.approx(0.966, abs=0.005)
        assert summary["fig4"]["spinwave_visibility"] == pytest.approx(0.948, abs=0.005)
        assert summary["fig5"]["recovered_phase_rad"] == pytest.approx(2.5, abs=0.01)
        assert summary["fig6"]["kappa_recovered"] == pytest.approx(0.06, rel=0.01)
        assert summary["fig2b"]["slope_rad_per_s_per_amp"] == pytest.approx(2e7, rel=1e-6)

    def test_empty_grid_rejected(self, runner, tmp_path):
        result = runner.invoke(main, ["figures", str(tmp_path / "x"), "--points", "0"])
        assert result.exit_code == 5

    def test_default_directory_from_env(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("ATOMLIGHT_OUTPUT_DIR", str(tmp_path / "from_env"))
        result = runner.invoke(main, ["figures", "--points", "10", "--trace-points", "32"])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "from_env" / "summary.json").is_file()
