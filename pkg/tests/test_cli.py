import json

import pytest

from taukappa.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_compute_psi(capsys):
    code, out = run_cli(capsys, "compute", "psi", "--genus", "1", "--d", "1")
    assert code == 0 and out.strip() == "1/24"


def test_compute_psi_unstable_prints_zero(capsys):
    code, out = run_cli(capsys, "compute", "psi", "--genus", "0", "--d", "0,0")
    assert code == 0 and out.strip() == "0"


def test_compute_pure_kappa(capsys):
    code, out = run_cli(capsys, "compute", "kappa", "--genus", "2",
                        "--b", "1:3")
    assert code == 0 and out.strip() == "43/2880"


def test_compute_mixed_kappa(capsys):
    code, out = run_cli(capsys, "compute", "kappa", "--genus", "1",
                        "--b", "1:1", "--d", "0")
    assert code == 0 and out.strip() == "1/24"


def test_compute_json_format(capsys):
    code, out = run_cli(capsys, "--format", "json", "compute", "psi",
                        "--genus", "2", "--d", "2,3")
    assert code == 0
    assert json.loads(out)["value"] == "29/5760"


def test_usage_error_exit_code(capsys):
    code, _ = run_cli(capsys, "compute", "psi", "--genus", "1")
    assert code == 2
    code, _ = run_cli(capsys, "compute", "kappa", "--genus", "1", "--b", "1:1")
    assert code == 2


def test_denom_precondition_usage_errors(capsys):
    # unstable shapes and out-of-range invariants are usage errors (2),
    # never engine tracebacks
    code, _ = run_cli(capsys, "denom", "--genus", "0", "--n", "2")
    assert code == 2
    code, _ = run_cli(capsys, "denom", "--genus", "1", "--script-d")
    assert code == 2
    code, _ = run_cli(capsys, "denom", "--genus", "1", "--lemma20")
    assert code == 2


def test_argparse_usage_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["compute", "psi", "--genus", "not-a-number", "--d", "1"])
    assert exc.value.code == 2


def test_denom_commands(capsys):
    code, out = run_cli(capsys, "denom", "--genus", "1", "--n", "1")
    assert code == 0 and out.strip() == "24"
    code, out = run_cli(capsys, "denom", "--genus", "0", "--n", "3")
    assert code == 0 and out.strip() == "1"
    code, out = run_cli(capsys, "--format", "json", "denom", "--genus", "2",
                        "--script-d")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == "5760"
    assert payload["factorization"] == {"2": 7, "3": 2, "5": 1}


def test_denom_lemma20(capsys):
    code, out = run_cli(capsys, "denom", "--genus", "2", "--lemma20")
    assert code == 0 and "p=2" in out and "FAIL" not in out


def test_verify_identity_all_pass(capsys):
    code, out = run_cli(capsys, "verify", "thm8", "--gmax", "2", "--nmax", "2")
    assert code == 0
    assert "# thm8:" in out and "fails" not in out


def test_verify_conjecture_never_gates(capsys):
    code, out = run_cli(capsys, "verify", "conj13", "--gmax", "2",
                        "--nmax", "2")
    assert code == 0 and "conjectural, never gates" in out


def test_verify_virasoro_with_range(capsys):
    code, out = run_cli(capsys, "verify", "virasoro", "--k", "-1..1",
                        "--gmax", "1", "--nmax", "3", "--bmax", "0")
    assert code == 0
    assert out.count("holds") == 3


def test_verify_engines(capsys):
    code, out = run_cli(capsys, "verify", "engines", "--dmax", "4")
    assert code == 0 and "all agree" in out


def test_verify_string_and_substitution(capsys):
    code, out = run_cli(capsys, "verify", "string", "--gmax", "1",
                        "--nmax", "2", "--bmax", "1")
    assert code == 0
    code, out = run_cli(capsys, "verify", "substitution", "--gmax", "2",
                        "--nmax", "2", "--bmax", "2")
    assert code == 0 and "holds" in out


def test_verify_json_stream(capsys):
    code, out = run_cli(capsys, "--format", "json", "verify", "prop9",
                        "--gmax", "1", "--nmax", "2")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("{")]
    assert lines
    rec = json.loads(lines[0])
    assert set(rec) >= {"identity", "params", "lhs", "rhs", "residual",
                        "status"}


def test_cache_roundtrip_and_determinism(tmp_path, capsys):
    cache = tmp_path / "corr.cache"
    args = ("--cache", str(cache), "compute", "psi", "--genus", "2",
            "--d", "2,3")
    code, out1 = run_cli(capsys, *args)
    assert code == 0
    size1 = cache.read_text()
    code, out2 = run_cli(capsys, *args)
    assert code == 0
    assert out1 == out2
    assert cache.read_text() == size1      # warm rerun appends nothing


def test_workers_flag(capsys):
    code, out = run_cli(capsys, "--workers", "2", "verify", "thm8",
                        "--gmax", "1", "--nmax", "2")
    assert code == 0 and "# thm8:" in out


def test_engine_disagreement_exit_code(tmp_path, capsys):
    """A cache carrying a wrong value collides with a recomputed route."""
    cache = tmp_path / "poisoned.cache"
    cache.write_text("1|1||1/25\n")
    code = main(["--cache", str(cache), "verify", "engines", "--dmax", "2"])
    err = capsys.readouterr().err
    assert code == 1
    assert "engine disagreement" in err
