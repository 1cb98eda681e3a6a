"""Driver behavior: argument handling, exit codes, emitted artifacts."""

from __future__ import annotations

import json

import pytest

from graphmass import cli
from graphmass.cli import EntryConfig, RunConfig, execute_run, main
from graphmass.errors import ConfigError
from graphmass.mass import CheckOutcome


@pytest.fixture(autouse=True)
def _no_ambient_outdir(monkeypatch):
    monkeypatch.delenv("GRAPHMASS_OUTDIR", raising=False)


def write_config(tmp_path, payload):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class TestRunCommand:
    def test_single_scenario_passes(self, capsys):
        code = main(["run", "flat", "--checks", "identities"])
        out, err = capsys.readouterr()
        assert code == 0
        assert '"tool":"graphmass"' in out
        assert "[PASS] flat/identities" in err

    def test_hypothesis_violation_exits_two(self, capsys):
        """The bump has no horizon sign hypothesis to lean on, so the
        pmt check is vacuous and the run flags it."""
        code = main(["run", "bump", "--checks", "pmt"])
        _, err = capsys.readouterr()
        assert code == 2
        assert "hypothesis violated" in err

    def test_unknown_scenario_suggests(self, capsys):
        code = main(["run", "schwarz"])
        _, err = capsys.readouterr()
        assert code == 3
        assert "did you mean" in err

    def test_unknown_override_rejected(self, capsys):
        code = main(["run", "flat", "--bogus", "1"])
        _, err = capsys.readouterr()
        assert code == 3
        assert "takes no parameter" in err

    def test_bad_radii_is_numerical_failure(self, capsys):
        # radius 2 sits on the horizon, so the flux shell is illegal
        code = main(["run", "schwarzschild3", "--radii", "2,3,4",
                     "--checks", "identities"])
        _, err = capsys.readouterr()
        assert code == 4
        assert "[ERROR]" in err


class TestConfigFile:
    PAYLOAD = {"scenarios": [{"name": "flat"},
                             {"name": "bump", "params": {"alpha": 0.2}}],
               "checks": ["identities"]}

    def test_runs_all_entries(self, tmp_path, capsys):
        code = main(["run", write_config(tmp_path, self.PAYLOAD)])
        out, err = capsys.readouterr()
        assert code == 0
        assert '"alpha":0.20000000000000001' in out
        assert "[PASS] flat/identities" in err
        assert "[PASS] bump/identities" in err

    def test_scenario_filter(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.PAYLOAD)
        code = main(["run", cfg, "--scenario", "flat"])
        _, err = capsys.readouterr()
        assert code == 0
        assert "flat/identities" in err
        assert "bump" not in err

    def test_scenario_filter_miss(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.PAYLOAD)
        code = main(["run", cfg, "--scenario", "nope"])
        _, err = capsys.readouterr()
        assert code == 3
        assert "config has no scenario named" in err

    def test_overrides_need_a_name(self, tmp_path, capsys):
        cfg = write_config(tmp_path, self.PAYLOAD)
        code = main(["run", cfg, "--alpha", "0.3"])
        _, err = capsys.readouterr()
        assert code == 3
        assert "not a config file" in err

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{oops", encoding="utf-8")
        code = main(["run", str(path)])
        _, err = capsys.readouterr()
        assert code == 3
        assert "not valid JSON" in err

    def test_unknown_keys(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"scenarios": ["flat"], "bogus": 1})
        code = main(["run", cfg])
        _, err = capsys.readouterr()
        assert code == 3
        assert "unknown config keys" in err


class TestArtifacts:
    def test_out_dir_writes_report_and_tables(self, tmp_path, capsys):
        out_dir = tmp_path / "artifacts"
        code = main(["run", "flat", "--checks", "identities",
                     "--out", str(out_dir), "--format", "both"])
        out, err = capsys.readouterr()
        assert code == 0
        names = sorted(p.name for p in out_dir.iterdir())
        assert names == ["bulk.csv", "flux.csv", "report.json"]
        # gates and "wrote" lines move to stdout when files are written
        assert "[PASS] flat/identities" in out
        assert out.count("wrote ") == 3
        assert err == ""
        doc = json.loads((out_dir / "report.json").read_text())
        assert set(doc) == {"header", "body"}
        assert doc["body"]["tool"] == "graphmass"

    def test_outdir_env_variable(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("GRAPHMASS_OUTDIR", str(tmp_path / "env_out"))
        code = main(["run", "flat", "--checks", "identities"])
        out, _ = capsys.readouterr()
        assert code == 0
        assert (tmp_path / "env_out" / "report.json").exists()
        assert "[PASS] flat/identities" in out


class TestOtherCommands:
    def test_list(self, capsys):
        code = main(["list"])
        out, _ = capsys.readouterr()
        assert code == 0
        for name in ("schwarzschild3", "two_body_glued"):
            assert name in out
        assert "[geometry-only]" in out
        assert "defaults:" in out

    def test_list_rejects_extras(self, capsys):
        code = main(["list", "--extra"])
        _, err = capsys.readouterr()
        assert code == 3
        assert "unexpected arguments" in err

    def test_verify_single_criterion(self, capsys):
        code = main(["verify", "--only", "8"])
        out, _ = capsys.readouterr()
        assert code == 0
        assert "criterion  8 [PASS]" in out
        assert "1/1 criteria passed" in out


def make_outcome(name, passed=True, hypothesis_ok=True, vacuous=False):
    return CheckOutcome(name=name, scenario="flat", passed=passed,
                        hypothesis_ok=hypothesis_ok, vacuous=vacuous,
                        values={}, notes=())


def make_result(outcomes=(), error=None, error_kind=None):
    return {"name": "flat", "outcomes": list(outcomes), "error": error,
            "error_kind": error_kind, "summary": None, "runtime": 0.0}


class TestExitPrecedence:
    """More diagnostic exit codes win when several conditions apply."""

    def run_with(self, monkeypatch, results):
        queue = list(results)
        monkeypatch.setattr(cli, "_run_entry",
                            lambda entry, run: queue.pop(0))
        run = RunConfig(entries=[EntryConfig(name="flat")
                                 for _ in results])
        code, document, _ = execute_run(run)
        return code, document

    def test_failed_check(self, monkeypatch):
        code, doc = self.run_with(monkeypatch, [
            make_result([make_outcome("pmt", passed=False)])])
        assert code == 1
        assert doc.body["verdicts"][0]["passed"] is False

    def test_hypothesis_beats_failure(self, monkeypatch):
        code, _ = self.run_with(monkeypatch, [
            make_result([make_outcome("pmt", passed=False),
                         make_outcome("penrose", hypothesis_ok=False)])])
        assert code == 2

    def test_numerical_beats_hypothesis(self, monkeypatch):
        code, doc = self.run_with(monkeypatch, [
            make_result([make_outcome("penrose", hypothesis_ok=False)]),
            make_result(error="tail fit failed", error_kind="numerical")])
        assert code == 4
        assert doc.body["errors"][0]["kind"] == "numerical"

    def test_config_error_propagates(self, monkeypatch):
        with pytest.raises(ConfigError, match="bad knob"):
            self.run_with(monkeypatch, [
                make_result(error="bad knob", error_kind="config")])
