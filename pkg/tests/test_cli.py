import json
import os

import pytest

from zetalab import cli


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, argv):
    code, out = run_cli(capsys, argv)
    return code, json.loads(out)


def test_zeta_basel(capsys):
    code, payload = run_json(capsys, ["zeta", "--re", "2", "--im", "0"])
    assert code == 0
    assert payload["value"]["re"].startswith("1.6449340668")
    assert float(payload["value"]["err_bound"]) < 1e-60


def test_zeta_pole_exit_code(capsys):
    code, payload = run_json(capsys, ["zeta", "--re", "1", "--im", "0"])
    assert code == 1
    assert payload["error"]["type"] == "PoleError"
    assert "pole" in payload["error"]["message"]


def test_usage_error_exit_code(capsys):
    code = cli.main(["zeta", "--bogus-flag", "1"])
    capsys.readouterr()
    assert code == 2
    assert cli.main(["not-a-command"]) == 2
    capsys.readouterr()


def test_zero_free_boundary_subop(capsys):
    code, payload = run_json(capsys, ["zeta", "zero-free-boundary", "--t", "0"])
    assert code == 0
    import math
    assert float(payload["sigma"]) == 1.0 - 0.034666 / math.log(705.0 / 47.886)


def test_sieve_csv(capsys, tmp_path):
    out = tmp_path / "mu.csv"
    code, payload = run_json(
        capsys, ["sieve", "--limit", "50", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,mu,d"
    assert len(lines) == 51
    assert payload["mertens"] == -3  # M(50)


def test_check_lemma1_cli(capsys):
    code, payload = run_json(capsys, ["check", "lemma1", "--j", "10"])
    assert code == 0
    assert payload["report"]["extras"]["grid_violations"] == 0


def test_fv_and_root_smoke(capsys):
    code, payload = run_json(
        capsys, ["fv", "--v", "100", "--sigma", "3", "--t", "0"])
    assert code == 0
    assert abs(float(payload["value"]["re"]) - 1.0) < 0.05
    code, payload = run_json(capsys, ["root", "zeta", "--lo", "14",
                                      "--hi", "14.2", "--precision", "128"])
    assert code == 0
    assert payload["result"]["status"] == "found"
    assert payload["result"]["value"].startswith("14.1347")


def test_winding_cli(capsys):
    code, payload = run_json(
        capsys, ["winding", "--fn", "invzeta", "--center", "1+0j",
                 "--radius", "0.3", "--precision", "128"])
    assert code == 0
    assert payload["winding_number"] == 1


def test_perron_cli(capsys):
    code, payload = run_json(
        capsys, ["perron", "--sigma", "2", "--t", "0", "--v", "20",
                 "--w", "200", "--precision", "64"])
    assert code == 0
    assert payload["within_envelope"] is True


def test_guv_cli(capsys):
    code, payload = run_json(
        capsys, ["guv", "--u", "5", "--v", "20", "--gamma", "14.134725",
                 "--j", "1", "--method", "cauchy", "--sigma", "1.5"])
    assert code == 0
    assert "value" in payload


def test_final_byte_identical_and_notes(capsys):
    argv = ["final", "--regime", "star", "--v", "300", "--gamma", "14.134725"]
    code1, out1 = run_cli(capsys, argv)
    code2, out2 = run_cli(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical
    payload = json.loads(out1)
    notes = payload["report"]["notes"]
    assert any("measurement only" in n for n in notes)
    # desk-scale hypothesis violations are present
    assert payload["report"]["hypotheses_satisfied"] is False
    assert payload["report"]["params"]["violations"]


def test_config_file_and_env_precedence(capsys, tmp_path, monkeypatch):
    cfgfile = tmp_path / "lab.cfg"
    cfgfile.write_text("precision_bits = 128\noutput_format = text\n")
    monkeypatch.setenv("ZETALAB_THREADS", "3")
    code, out = run_cli(capsys, ["zeta", "--re", "2", "--config", str(cfgfile)])
    assert code == 0
    prec_line = [ln for ln in out.splitlines() if ln.startswith("precision_bits")]
    assert prec_line and prec_line[0].split()[-1] == "128"  # config applied
    # CLI flag beats the config file
    code, payload = run_json(
        capsys, ["zeta", "--re", "2", "--config", str(cfgfile),
                 "--precision", "192", "--format", "json"])
    assert payload["precision_bits"] == 192
    monkeypatch.delenv("ZETALAB_THREADS")


def test_env_threads_invalid_is_usage_error(capsys, monkeypatch):
    monkeypatch.setenv("ZETALAB_THREADS", "zebra")
    code = cli.main(["zeta", "--re", "2"])
    capsys.readouterr()
    assert code == 2


def test_precision_doubling_keeps_digits(capsys):
    _, p128 = run_json(capsys, ["zeta", "--re", "0.3", "--im", "30",
                                "--precision", "128"])
    _, p256 = run_json(capsys, ["zeta", "--re", "0.3", "--im", "30",
                                "--precision", "256"])
    lo, hi = p128["value"]["re"], p256["value"]["re"]
    # every digit shown at 128 bits (err-bound-limited) reappears at 256
    assert hi.startswith(lo[:20])


def test_csv_and_text_formats(capsys):
    code, out = run_cli(capsys, ["zeta", "--re", "2", "--format", "csv"])
    assert code == 0
    assert out.splitlines()[0] == "key,value"
    code, out = run_cli(capsys, ["zeta", "--re", "2", "--format", "text"])
    assert "value.re" in out


def test_check_bound_csv_grid_dump(capsys):
    code, out = run_cli(capsys, ["check", "bound", "--lemma", "3", "--v",
                                 "300", "--gamma", "14.134725",
                                 "--format", "csv"])
    assert code == 0
    header = out.splitlines()[0]
    assert "lhs" in header and "ratio" in header


def test_output_path(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out = run_cli(capsys, ["zeta", "--re", "2", "--out", str(path)])
    assert code == 0
    assert out == ""
    assert json.loads(path.read_text())["value"]["re"].startswith("1.6449")
