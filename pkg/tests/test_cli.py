"""End-to-end tests of the ``dyadlab`` command line driver.

Exit-code contract: 0 when every checked claim held, 2 when a run
falsified a claim, 1 for usage errors.
"""

import json

import pytest

from dyadlab.cli import identity_battery, main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def load(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


# -- usage errors --------------------------------------------------------


def test_no_command_is_a_usage_error(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_command_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_unknown_flag_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["identities", "--bogus", "3"])
    assert exc.value.code == 1


def test_bad_flag_value_exits_1():
    with pytest.raises(SystemExit) as exc:
        main(["identities", "--depth", "ham"])
    assert exc.value.code == 1


def test_invalid_parameters_exit_1(tmp_path, capsys):
    # depth below the battery's minimum is caught, not a traceback
    assert run(tmp_path, "identities", "--depth", "1") == 1
    assert "error" in capsys.readouterr().err


# -- config files --------------------------------------------------------


def test_config_overrides_default_and_flag_overrides_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("depth = 3   # comment\n\ntrials = 2\n")
    assert run(tmp_path, "identities", "--config", str(cfg)) == 0
    report = load(tmp_path, "identities.json")
    assert report["depth"] == 3 and report["trials"] == 2

    assert run(tmp_path, "identities", "--config", str(cfg),
               "--depth", "2") == 0
    report = load(tmp_path, "identities.json")
    assert report["depth"] == 2 and report["trials"] == 2


def test_config_unknown_key_exits_1(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("depth = 3\nwidgets = 9\n")
    assert run(tmp_path, "identities", "--config", str(cfg)) == 1
    err = capsys.readouterr().err
    assert "bad.cfg:2" in err and "widgets" in err


def test_config_malformed_line_exits_1(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("just some words\n")
    assert run(tmp_path, "identities", "--config", str(cfg)) == 1
    assert "bad.cfg:1" in capsys.readouterr().err


def test_config_bad_value_exits_1(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("depth = eels\n")
    assert run(tmp_path, "identities", "--config", str(cfg)) == 1
    assert "bad.cfg:1" in capsys.readouterr().err


def test_missing_config_file_exits_1(tmp_path):
    assert run(tmp_path, "identities", "--config",
               str(tmp_path / "nope.cfg")) == 1


# -- report files --------------------------------------------------------


def test_identities_passes_and_reports(tmp_path, capsys):
    assert run(tmp_path, "identities", "--depth", "3", "--trials", "2") == 0
    out = capsys.readouterr().out
    assert out.startswith("identities: PASS")
    assert "report:" in out
    report = load(tmp_path, "identities.json")
    assert report["all_passed"] is True
    names = set(report["checks"][0]) - {"trial"}
    assert {"haar_roundtrip", "parseval_pairing", "transform_involution",
            "factor4_per_interval", "paraproduct_decomposition",
            "slice_partition", "adjoint_pairing",
            "slice_bilinear_majorant"} == names


def test_identity_battery_vector_valued():
    report = identity_battery(seed=1, depth=3, trials=2, d=2)
    assert report["all_passed"]
    # scalar-only checks are skipped for d > 1
    assert "paraproduct_decomposition" not in report["checks"][0]


def test_reports_are_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["umd-probe", "--depth", "3", "--trials", "2",
                     "--restarts", "2", "--iters", "30",
                     "--out", str(out)]) == 0
    assert (a / "umd_probe.json").read_bytes() == \
        (b / "umd_probe.json").read_bytes()


def test_out_env_variable_is_honored(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DYADLAB_OUT", str(tmp_path / "envdir"))
    assert main(["series-bound", "--delta", "0.4"]) == 0
    assert (tmp_path / "envdir" / "series_bound.json").exists()
    assert str(tmp_path / "envdir") in capsys.readouterr().out


# -- subcommand behaviour ------------------------------------------------


def test_schur_check_passes(tmp_path):
    assert run(tmp_path, "schur-check", "--n", "6", "--trials", "2",
               "--k", "2", "--sign-trials", "2") == 0
    report = load(tmp_path, "schur_check.json")
    assert report["rank_one"]["ok"] and report["sign_matrices"]["ok"]


def test_lambda_equivalence_size_two_ratio_is_sixteen(tmp_path):
    assert run(tmp_path, "lambda-equivalence", "--k", "1", "--trials", "2",
               "--martingale-trials", "1", "--restarts", "4",
               "--iters", "100") == 0
    report = load(tmp_path, "lambda_equivalence.json")
    assert report["ratio_min"] == pytest.approx(16.0, rel=1e-6)
    assert report["ratio_max"] == pytest.approx(16.0, rel=1e-6)


def test_bellman_check_passes_with_frozen_values(tmp_path):
    assert run(tmp_path, "bellman-check", "--n", "9", "--depth", "2",
               "--samples", "50") == 0
    report = load(tmp_path, "bellman_check.json")
    assert report["checks"]["depth1_frozen"] is True
    assert report["frozen"]["depth1_value"] == 4.0
    assert report["frozen"]["dirac_value"] == 0.0
    assert report["grid_min_slack"] >= 0.0


def test_lemma51_default_run_passes(tmp_path, capsys):
    assert run(tmp_path, "lemma51") == 0
    report = load(tmp_path, "lemma51.json")
    assert report["meets_threshold"] is True
    assert report["identity_ok"] and report["theta_ok"]
    assert "achieved_c" in capsys.readouterr().out


def test_umd_probe_passes(tmp_path):
    assert run(tmp_path, "umd-probe", "--depth", "3", "--trials", "2",
               "--restarts", "2", "--iters", "30") == 0
    report = load(tmp_path, "umd_probe.json")
    assert report["within_reference"] is True
    assert report["best_lower"] <= 3.0 + 1e-6


def test_scaling_study_small_run_writes_csv(tmp_path):
    assert run(tmp_path, "scaling-study", "--k-max", "2", "--depth", "4",
               "--trials", "2", "--restarts", "2", "--iters", "30") == 0
    report = load(tmp_path, "scaling_study.json")
    assert [row["k"] for row in report["rows"]] == [1, 2]
    csv = (tmp_path / "scaling_study.csv").read_text()
    assert csv.startswith("k,m,n,max_lower,implied_c\n")


def test_hilbert_demo_passes(tmp_path):
    assert run(tmp_path, "hilbert-demo") == 0
    report = load(tmp_path, "hilbert_demo.json")
    assert report["accepted"] is True
    assert report["seed"] == 6


def test_series_bound_divergent_regime_passes(tmp_path):
    assert run(tmp_path, "series-bound", "--delta", "0.4") == 0
    report = load(tmp_path, "series_bound.json")
    assert report["verdict"] == "divergent"


def test_series_bound_default_terms_do_not_stabilize(tmp_path):
    # convergent verdict but the partial sums still move at k_max=60,
    # so the stabilization claim is (honestly) reported as failed
    assert run(tmp_path, "series-bound") == 2
    report = load(tmp_path, "series_bound.json")
    assert report["verdict"] == "convergent"
    assert report["stabilized"] is False
    assert report["last_term"] > report["tolerance"]


def test_series_bound_fast_decay_stabilizes(tmp_path):
    assert run(tmp_path, "series-bound", "--delta", "1.0",
               "--k-max", "200") == 0
    report = load(tmp_path, "series_bound.json")
    assert report["stabilized"] is True
    assert report["last_term"] <= 1e-6
