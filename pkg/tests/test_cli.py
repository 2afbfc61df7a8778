"""In-process tests of the command-line front end.

Everything drives `hgpade.cli.main(argv)` directly so that exit codes,
stdout reports and stderr messages are all observable without spawning
subprocesses.
"""

import json
from fractions import Fraction

import pytest

from hgpade.arith import D_n_profile
from hgpade.cli import emit_report, main

R2 = ["--a", "1/3,1/4", "--b", "1/2"]


def _json_out(capsys):
    out = capsys.readouterr().out
    assert out.endswith("\n")
    return json.loads(out)


# ---------------------------------------------------------------------------
# exit-code contract
# ---------------------------------------------------------------------------


def test_no_command_exits_1(capsys):
    assert main([]) == 1
    assert "no command" in capsys.readouterr().err


def test_unknown_command_exits_1(capsys):
    # argparse would exit 2; the contract reserves 2 for hypothesis flags
    assert main(["frobnicate"]) == 1


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "criterion" in capsys.readouterr().out


def test_bad_rational_names_the_flag(capsys):
    code = main(["build", "--a", "1/0", "--b", "", "--alphas", "1", "--n", "1"])
    assert code == 1
    assert "--a" in capsys.readouterr().err


def test_bad_n_range_exits_1(capsys):
    code = main(["criterion", *R2, "--alphas", "1", "--n-range", "16:4"])
    assert code == 1
    assert "--n-range" in capsys.readouterr().err


def test_degenerate_spec_exits_2_with_named_flags(capsys):
    code = main(["build", "--a", "2,1/4", "--b", "1/2", "--alphas", "1", "--n", "1"])
    assert code == 2
    err = capsys.readouterr().err
    assert "a_not_positive_integer" in err
    assert "eta_minus_zeta_not_natural" in err


# ---------------------------------------------------------------------------
# build / verify round trip
# ---------------------------------------------------------------------------


def test_build_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "system.json"
    code = main(["build", *R2, "--alphas", "1", "--n", "1", "--out", str(path)])
    assert code == 0
    assert json.loads(path.read_text())["n"] == 1

    code = main(["verify", "--system", str(path)])
    assert code == 0
    report = _json_out(capsys)
    assert report["ok"] is True
    assert report["failures"] == []


def test_verify_corrupted_system_exits_3(tmp_path, capsys):
    path = tmp_path / "system.json"
    assert main(["build", *R2, "--alphas", "1", "--n", "1", "--out", str(path)]) == 0
    data = json.loads(path.read_text())
    data["P"]["0"] = data["P"]["0"][:-1]  # drop the leading coefficient of P_0
    path.write_text(json.dumps(data))

    code = main(["verify", "--system", str(path)])
    assert code == 3
    captured = capsys.readouterr()
    assert json.loads(captured.out)["ok"] is False
    assert "verify failure" in captured.err


def test_verify_unreadable_system_exits_1(tmp_path, capsys):
    path = tmp_path / "nope.json"
    path.write_text("{not json")
    assert main(["verify", "--system", str(path)]) == 1
    assert "--system" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# wronskian / eval / criterion / min-beta reports
# ---------------------------------------------------------------------------


def test_wronskian_certifies_canonical_instance(capsys):
    code = main(["wronskian", *R2, "--alphas", "1,2", "--n", "1"])
    assert code == 0
    report = _json_out(capsys)
    assert report["verdict"] == "certified nonzero"


def test_eval_reports_certified_decimals(capsys):
    code = main(["eval", *R2, "--z", "1/7", "--bits", "512"])
    assert code == 0
    report = _json_out(capsys)
    assert report["z"] == "1/7"
    assert report["bits"] == 512
    # frozen 30-digit prefixes; truncation toward zero is prefix-stable
    assert report["F"][0]["decimal"].startswith("0.025911802738654299509964214560")
    assert report["F"][1]["decimal"].startswith("0.028253552821257868789923775257")
    assert all(entry["error_exponent"] >= 512 for entry in report["F"])


def test_criterion_certified_exit_0(capsys):
    code = main(["criterion", *R2, "--alphas", "1",
                 "--beta", "1000000", "--n-range", "4:9"])
    assert code == 0
    report = _json_out(capsys)
    assert report["verdict"] is True
    assert report["beta"] == "1000000"
    assert report["V_emp"] == pytest.approx(12.486170777590452, rel=1e-9)


def test_criterion_uncertified_exit_1(capsys):
    code = main(["criterion", *R2, "--alphas", "1",
                 "--beta", "2", "--n-range", "4:8"])
    assert code == 1
    assert "CriterionNotSatisfied" in capsys.readouterr().err


def test_min_beta_report(capsys):
    code = main(["min-beta", *R2, "--alphas", "1",
                 "--search-bound", "64", "--n-range", "4:8"])
    assert code == 0
    report = _json_out(capsys)
    assert report["min_beta"] == 5
    assert report["search_bound"] == 64
    assert report["n_range"] == [4, 8]
    assert report["place"] == "inf"
    assert report["V_emp"] == pytest.approx(0.02518398663377175, rel=1e-9)


def test_min_beta_nothing_found_exit_1(capsys):
    code = main(["min-beta", *R2, "--alphas", "1",
                 "--search-bound", "2", "--n-range", "4:8"])
    assert code == 1
    captured = capsys.readouterr()
    assert json.loads(captured.out)["min_beta"] is None
    assert "no beta" in captured.err


# ---------------------------------------------------------------------------
# report formats and determinism
# ---------------------------------------------------------------------------


def test_reports_are_byte_identical_across_runs(tmp_path):
    argv = ["criterion", *R2, "--alphas", "1", "--beta", "1000000",
            "--n-range", "4:9"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main([*argv, "--out", str(a)]) == 0
    assert main([*argv, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_report_is_sorted_with_one_trailing_newline():
    text = emit_report({"b": 1, "a": Fraction(1, 2)}, "json", None)
    assert text.endswith("\n") and not text.endswith("\n\n")
    assert json.loads(text) == {"a": "1/2", "b": 1}
    assert text.index('"a"') < text.index('"b"')


def test_csv_format_flattens_dotted_keys(capsys):
    code = main(["criterion", *R2, "--alphas", "1", "--beta", "1000000",
                 "--n-range", "4:9", "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    keys = [line.split(",", 1)[0] for line in lines]
    assert "A_emp" in keys
    assert "diagnostics.fit_A.ok" in keys
    assert keys == sorted(keys)


def test_text_format_renders_nested_report(capsys):
    code = main(["criterion", *R2, "--alphas", "1", "--beta", "1000000",
                 "--n-range", "4:9", "--format", "text"])
    assert code == 0
    out = capsys.readouterr().out
    assert "verdict: True" in out
    assert "diagnostics:" in out


def test_denominator_profile_csv_has_one_row_per_index(tmp_path):
    prof = D_n_profile(Fraction(1, 3), Fraction(1), 10)
    text = emit_report(prof, "csv", str(tmp_path / "prof.csv"))
    lines = text.splitlines()
    assert len(lines) == 11  # indices 0..N inclusive
    assert lines[0] == "0,1"
    for k, line in enumerate(lines):
        idx, value = line.split(",")
        assert int(idx) == k
        assert int(value) >= 1


# ---------------------------------------------------------------------------
# config file merging
# ---------------------------------------------------------------------------


def test_config_file_mirrors_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "a": "1/3,1/4", "b": "1/2", "alphas": "1", "n": 1,
    }))
    assert main(["build", "--config", str(cfg)]) == 0
    assert _json_out(capsys)["n"] == 1


def test_cli_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "a": "1/3,1/4", "b": "1/2", "alphas": "1", "n": 1,
    }))
    assert main(["build", "--config", str(cfg), "--n", "2"]) == 0
    assert _json_out(capsys)["n"] == 2


def test_config_file_must_be_a_json_object(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2]")
    assert main(["build", "--config", str(cfg)]) == 1
    assert "--config" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# environment validation
# ---------------------------------------------------------------------------


def test_threads_env_must_be_a_positive_integer(monkeypatch, capsys):
    monkeypatch.setenv("HGPADE_THREADS", "0")
    assert main(["build", *R2, "--alphas", "1", "--n", "1"]) == 1
    assert "HGPADE_THREADS" in capsys.readouterr().err

    monkeypatch.setenv("HGPADE_THREADS", "soon")
    assert main(["build", *R2, "--alphas", "1", "--n", "1"]) == 1

    monkeypatch.setenv("HGPADE_THREADS", "4")
    assert main(["build", *R2, "--alphas", "1", "--n", "1"]) == 0


# ---------------------------------------------------------------------------
# the acceptance suite through the CLI
# ---------------------------------------------------------------------------


def test_suite_command_runs_green(capsys):
    code = main(["suite", "--level", "desk"])
    assert code == 0
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert report["all_passed"] is True
    assert report["level"] == "desk"
    assert len(report["checks"]) == 10
    # wall-clock timings never leak into the machine-readable format
    assert all("runtime_s" not in c for c in report["checks"])
    # progress goes to stderr, one line per check
    progress = [l for l in captured.err.splitlines() if l.startswith(("ok", "FAIL"))]
    assert len(progress) == 10
    assert all(l.startswith("ok") for l in progress)
