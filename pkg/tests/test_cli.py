import io
import json

import pytest

from treeshift.cli import EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_MISMATCH, EXIT_OK, main


def run(tmp_path, config: dict, *flags):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    out = io.StringIO()
    code = main(["--config", str(path), "--out", str(tmp_path / "out"), *flags], stream=out)
    return code, out.getvalue()


def test_verify_main_default(tmp_path):
    code, text = run(tmp_path, {"command": "verify_main"})
    assert code == EXIT_OK
    assert "2 > 1: VIOLATED" in text
    report = json.loads((tmp_path / "out" / "verify_main.json").read_text())
    assert report["exit_code"] == 0
    assert (tmp_path / "out" / "verify_main_hyponormality.csv").exists()


def test_verify_main_t_19(tmp_path):
    code, text = run(tmp_path, {"command": "verify_main", "t": "1.9"})
    assert code == EXIT_OK
    assert "20/19 > 1: VIOLATED" in text


def test_verify_main_invalid_q(tmp_path):
    code, text = run(tmp_path, {"command": "verify_main", "q": "1/3"})
    assert code == EXIT_CONFIG
    assert "square" in text


def test_verify_main_t_above_zeta_minus1(tmp_path):
    # the reciprocal moment drops to 1/2, so hyponormality at 0 is expected to hold
    code, text = run(tmp_path, {"command": "verify_main", "t": "4"})
    assert code == EXIT_OK
    assert "1/2: SATISFIED" in text


def test_verify_main_reports_mismatch(tmp_path):
    # gamma_{-1} = 1/4 makes the sequence at -1 fail the Hankel test
    code, text = run(tmp_path, {"command": "verify_main", "backward_moments": {"1": "1/4"}})
    assert code == EXIT_MISMATCH
    assert "mismatch: no RefutedAt" in text


def test_verify_subnormal_cases(tmp_path):
    assert run(tmp_path, {"command": "verify_subnormal"})[0] == EXIT_OK
    assert run(tmp_path, {"command": "verify_subnormal"}, "--precision", "320")[0] == EXIT_OK
    code, text = run(tmp_path, {"command": "verify_subnormal", "J": 2, "series_terms": 2})
    assert code == EXIT_INCONCLUSIVE
    assert "inconclusive" in text


@pytest.mark.parametrize(
    "config, expected",
    [
        ({"command": "moments"}, EXIT_OK),
        ({"command": "moments", "vertices": ["-5"]}, EXIT_CONFIG),
        ({"command": "moments", "vertices": []}, EXIT_OK),
        ({"command": "hankel", "expect": "ConsistentUpTo"}, EXIT_OK),
        ({"command": "hankel", "sequence": {"values": ["1", "1", "0", "0", "0"]}, "n_max": 2, "expect": "RefutedAt"}, EXIT_OK),
        ({"command": "hankel", "sequence": {"values": ["1", "1", "0", "0", "0"]}, "n_max": 2, "expect": "ConsistentUpTo"}, EXIT_MISMATCH),
        ({"command": "hankel", "sequence": {"values": ["1", "2"]}, "n_max": 3}, EXIT_CONFIG),
        ({"command": "hankel", "n_max": 0}, EXIT_OK),
        ({"command": "t0"}, EXIT_OK),
        ({"command": "t0", "sequence": {"values": ["1", "0", "0", "0"]}, "n_max": 2}, EXIT_CONFIG),
        ({"command": "t0", "n_max": 0}, EXIT_OK),
        ({"command": "classify", "gamma_minus1": "1/4", "expect": "CertifiedNotStieltjes"}, EXIT_OK),
        ({"command": "classify", "gamma_minus1": "2", "expect": "ConsistentUpTo"}, EXIT_OK),
        ({"command": "classify", "gamma_minus1": "abc"}, EXIT_CONFIG),
        ({"command": "classify", "n_max": 0, "gamma_minus1": "1"}, EXIT_OK),
        ({"command": "composition", "kappa": "inf"}, EXIT_OK),
        ({"command": "composition"}, EXIT_CONFIG),
        ({"command": "composition", "kappa": "inf", "support_size": 0}, EXIT_OK),
        ({"command": "nonsense"}, EXIT_CONFIG),
        ({"command": "verify_main", "kappa": "many"}, EXIT_CONFIG),
    ],
)
def test_thin_commands(tmp_path, config, expected):
    assert run(tmp_path, config)[0] == expected


def test_flags_override_config(tmp_path):
    code, _ = run(tmp_path, {"command": "moments"}, "--horizon-N", "3", "--truncation-K", "4")
    assert code == EXIT_OK
    report = json.loads((tmp_path / "out" / "moments.json").read_text())
    assert report["tables"][0]["headers"][-1] == "n=3"


def test_reports_are_deterministic(tmp_path):
    first = run(tmp_path, {"command": "composition", "kappa": "inf"}, "--seed", "5")[1]
    second = run(tmp_path, {"command": "composition", "kappa": "inf"}, "--seed", "5")[1]
    assert first == second


def test_missing_config_file(tmp_path):
    out = io.StringIO()
    assert main(["--config", str(tmp_path / "absent.json")], stream=out) == EXIT_CONFIG
