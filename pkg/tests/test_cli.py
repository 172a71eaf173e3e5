"""Command-line interface: subcommands, exit codes, table output."""

import json
import socket
import subprocess
import sys
import time
import urllib.request

import pytest

from flexlab.cli import EXIT_BIND, EXIT_DIVERGENCE, EXIT_OK, EXIT_VALIDATION, main
from flexlab.config import default_config, default_config_document
from flexlab.engine import run_day, summarize
from flexlab.scenario import ScenarioScript


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_doc(tmp_path, doc, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc), encoding="utf-8")
    return str(p)


class TestRun:
    def test_identity_run(self, capsys):
        code, out, _ = run_cli(capsys, "run")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0].startswith("period")
        assert "DR intervals: none" in out
        for row in lines[1:4]:
            assert "0.00" in row          # every delta column is zero
        assert lines[3].startswith("total")

    def test_shed_table_shows_dr_interval_and_saving(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--script", "shed.json")
        assert code == EXIT_OK
        assert "DR intervals: [720, 840)" in out
        dr_row = next(l for l in out.splitlines() if l.startswith("DR "))
        assert float(dr_row.split()[-1]) > 0   # positive DR-period saving

    def test_shift_table_reports_non_dr_saving(self, capsys):
        code, out, _ = run_cli(capsys, "run", "--script", "shift.json")
        assert code == EXIT_OK
        assert "DR intervals: [360, 420)" in out
        non_dr = next(l for l in out.splitlines() if l.startswith("non-DR"))
        assert float(non_dr.split()[-1]) > 0

    def test_table_cells_equal_summary_fields(self, capsys):
        from flexlab.config import asset_path

        _, out, _ = run_cli(capsys, "run", "--script", "shed.json")
        _, summary = run_day(default_config(),
                             ScenarioScript.load(asset_path("shed.json")))
        rows = {line.split()[0]: line.split() for line in out.splitlines()[1:4]}
        expect = {
            "DR": (summary.baseline.dr_kwh, summary.controlled.dr_kwh,
                   summary.saving.dr_pct),
            "non-DR": (summary.baseline.non_dr_kwh, summary.controlled.non_dr_kwh,
                       summary.saving.non_dr_pct),
            "total": (summary.baseline.total_kwh, summary.controlled.total_kwh,
                      summary.saving.total_pct),
        }
        for name, (base, ctrl, pct) in expect.items():
            cells = rows[name]
            assert cells[1] == f"{base:.2f}"
            assert cells[2] == f"{ctrl:.2f}"
            assert cells[3] == f"{base - ctrl:.2f}"
            assert cells[4] == f"{pct:.1f}"

    def test_out_dir_gets_three_files(self, capsys, tmp_path):
        out_dir = tmp_path / "artifacts"
        code, _, _ = run_cli(capsys, "run", "--script", "shed.json",
                             "--out", str(out_dir))
        assert code == EXIT_OK
        assert (out_dir / "export.csv").is_file()
        assert (out_dir / "summary.json").is_file()
        log = (out_dir / "commands.ndjson").read_text(encoding="utf-8")
        times = [json.loads(line)["t_min"] for line in log.splitlines()]
        assert times == [720, 840]
        summary_doc = json.loads((out_dir / "summary.json").read_text())
        assert summary_doc["dr_intervals"] == [[720, 840]]

    def test_reruns_are_byte_identical(self, capsys, tmp_path):
        run_cli(capsys, "run", "--script", "shift.json", "--out",
                str(tmp_path / "a"))
        run_cli(capsys, "run", "--script", "shift.json", "--out",
                str(tmp_path / "b"))
        assert (tmp_path / "a/export.csv").read_bytes() == \
            (tmp_path / "b/export.csv").read_bytes()
        assert (tmp_path / "a/summary.json").read_bytes() == \
            (tmp_path / "b/summary.json").read_bytes()

    def test_missing_config_is_validation_error(self, capsys):
        code, _, err = run_cli(capsys, "run", "--config", "/no/such/file.json")
        assert code == EXIT_VALIDATION
        assert err.startswith("validation: ")
        assert "file not found" in err

    def test_missing_script_is_validation_error(self, capsys):
        code, _, err = run_cli(capsys, "run", "--script", "nonexistent.json")
        assert code == EXIT_VALIDATION
        assert "script: file not found" in err

    def test_divergent_model_exits_3(self, capsys, tmp_path):
        doc = default_config_document()
        doc["zones"][0]["capacitance_j_per_k"] = 100.0
        code, _, err = run_cli(capsys, "run", "--config", write_doc(tmp_path, doc))
        assert code == EXIT_DIVERGENCE
        assert err.startswith("divergence: ")
        assert "model divergence" in err


class TestValidate:
    def test_default_config_ok(self, capsys):
        code, out, err = run_cli(capsys, "validate")
        assert code == EXIT_OK
        assert out.startswith("ok:")
        assert err == ""

    def test_dt_zero_named(self, capsys, tmp_path):
        doc = default_config_document()
        doc["dt_s"] = 0
        code, _, err = run_cli(capsys, "validate", "--config",
                               write_doc(tmp_path, doc))
        assert code == EXIT_VALIDATION
        assert "dt_s" in err and "must be > 0" in err

    def test_unordered_weather_named(self, capsys, tmp_path):
        weather = tmp_path / "w.csv"
        weather.write_text("minute,t_out_c,solar_w_m2\n60,20,0\n30,21,0\n",
                           encoding="utf-8")
        doc = default_config_document()
        doc["weather_path"] = "w.csv"
        code, _, err = run_cli(capsys, "validate", "--config",
                               write_doc(tmp_path, doc))
        assert code == EXIT_VALIDATION
        assert "weather" in err and "not strictly greater" in err

    def test_every_violation_printed_on_its_own_line(self, capsys, tmp_path):
        doc = default_config_document()
        doc["zones"][0]["ua_w_per_k"] = -1.0
        doc["dt_s"] = 0
        doc["baseline"]["heating_setpoint_c"] = 30.0
        code, _, err = run_cli(capsys, "validate", "--config",
                               write_doc(tmp_path, doc))
        assert code == EXIT_VALIDATION
        lines = [l for l in err.splitlines() if l]
        assert len(lines) >= 3
        assert all(l.startswith("validation: ") for l in lines)


class TestServe:
    def test_bind_failure_exits_4(self, capsys):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            code, _, err = run_cli(capsys, "serve", "--port", str(port))
        finally:
            blocker.close()
        assert code == EXIT_BIND
        assert err.startswith("bind: ")

    def test_speed_must_be_positive(self, capsys):
        code, _, err = run_cli(capsys, "serve", "--speed", "0")
        assert code == EXIT_VALIDATION
        assert "speed must be positive" in err

    def test_serves_health_endpoint(self):
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
        probe.close()
        proc = subprocess.Popen(
            [sys.executable, "-m", "flexlab", "serve", "--port", str(port)],
            stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
        try:
            deadline = time.monotonic() + 60   # generous: CI boxes stall
            body = None
            while time.monotonic() < deadline:
                try:
                    with urllib.request.urlopen(
                            f"http://127.0.0.1:{port}/healthz", timeout=1) as resp:
                        body = json.loads(resp.read())
                        break
                except OSError:
                    time.sleep(0.1)
            assert body == {"status": "ok"}
        finally:
            proc.terminate()
            out, _ = proc.communicate(timeout=10)
        assert "dashboard at" in out


class TestLogging:
    def test_log_level_env_var(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "flexlab", "run", "--out", str(tmp_path / "o")],
            capture_output=True, text=True,
            env={"FLEXLAB_LOG": "WARNING", "PATH": "/usr/bin:/bin"})
        assert result.returncode == 0
        assert "wrote export.csv" not in result.stderr
        result = subprocess.run(
            [sys.executable, "-m", "flexlab", "run", "--out", str(tmp_path / "o")],
            capture_output=True, text=True,
            env={"FLEXLAB_LOG": "INFO", "PATH": "/usr/bin:/bin"})
        assert "wrote export.csv" in result.stderr
