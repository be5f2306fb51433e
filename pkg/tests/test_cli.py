import io
import json
import subprocess
import sys
import time

import pytest

from gcmce import cli, concat, desk


def run(argv):
    out = io.StringIO()
    code = cli.run([str(a) for a in argv], out=out)
    text = out.getvalue()
    return code, (json.loads(text) if text.startswith("{") else text)


def test_workfactor_preset_fast_and_accurate():
    start = time.perf_counter()
    code, obj = run(["workfactor", "--preset", "appendix-b"])
    assert time.perf_counter() - start < 1.0
    assert code == 0
    w = obj["workfactor"]
    assert abs(w["W1"] / 1.4635e5 - 1) < 1e-3
    assert abs(w["p"] - 0.0345) <= 5e-4
    assert 29.6 <= w["log2W"] <= 29.8
    assert obj["seed"] == 0


def test_workfactor_custom_and_isd():
    code, obj = run(["workfactor", "--custom", "128,16,7,2,308,99,0,44"])
    assert code == 0 and obj["p"] == 1.0
    code, obj = run(["workfactor", "--isd", "16,7,2,7"])
    assert code == 0 and abs(obj["W"] - 3430 / 3) < 1e-9
    code, obj = run(["workfactor", "--custom", "128,16,7,2,308,40,6,44"])
    assert code == 1 and obj["error"] == "InfeasibleParameters"


def test_workfactor_simulated_counts():
    code, obj = run(["--seed", "2", "workfactor", "--codes", "3", "--trials", "300"])
    assert code == 0 and obj["stats"]["trials"] == 900


def test_keygen_encrypt_decrypt(tmp_path):
    pub, priv, ct = tmp_path / "k.pub", tmp_path / "k.priv", tmp_path / "ct"
    assert run(["keygen", "--preset", "nonstructural", "--seed", 5, "--public", pub, "--private", priv])[0] == 0
    code, enc = run(["encrypt", "--public", pub, "--out", ct, "--seed", 9])
    assert code == 0 and enc["error_weight"] == 2
    code, dec = run(["decrypt", "--private", priv, "--cryptogram", ct])
    assert code == 0 and dec["message"] == enc["message"]
    code, enc2 = run(["encrypt", "--public", pub, "--out", ct, "--message", "1f"])
    assert run(["decrypt", "--private", priv, "--cryptogram", ct])[1]["message"] == "1f"


def test_runs_are_byte_identical(tmp_path):
    outs = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        d.mkdir()
        run(["keygen", "--preset", "step1", "--seed", 3, "--public", d / "k.pub", "--private", d / "k.priv"])
        run(["encrypt", "--public", d / "k.pub", "--out", d / "ct", "--seed", 4])
        outs.append([(d / f).read_bytes() for f in ("k.pub", "k.priv", "ct")])
    assert outs[0] == outs[1]


def test_keygen_from_spec_file(tmp_path):
    spec_path = tmp_path / "rm.json"
    concat.save_spec(desk.rm_8_4_4(), spec_path)
    code, obj = run(["keygen", "--spec", spec_path, "--public", tmp_path / "p", "--private", tmp_path / "s"])
    assert code == 0 and (obj["n"], obj["k"], obj["t"]) == (8, 4, 1)
    code, obj = run(["keygen", "--spec", spec_path, "--t", 3, "--public", tmp_path / "p", "--private", tmp_path / "s"])
    assert code == 1 and obj["error"] == "ErrorBudgetTooLarge"


def test_attack_pipeline(tmp_path):
    pub, priv, ct, part = (tmp_path / x for x in ("k.pub", "k.priv", "ct", "part.json"))
    run(["keygen", "--preset", "step1", "--seed", 1, "--public", pub, "--private", priv])
    code, enc = run(["encrypt", "--public", pub, "--out", ct, "--seed", 2])
    code, obj = run(["attack", "step1", "--public", pub, "--shape", "8,4", "--out", part])
    assert code == 0 and len(obj["blocks"]) == 8
    code, obj = run(["attack", "blocks", "--public", pub, "--partition", part])
    assert code == 0 and all(c["k"] == 3 for c in obj["codes"])
    code, obj = run(["attack", "nonstruct", "--public", pub, "--cryptogram", ct, "--partition", part])
    assert code == 0 and obj["message"] == enc["message"] and "elapsed" not in obj
    code, obj = run(["attack", "isd", "--public", pub, "--cryptogram", ct, "--seed", 3])
    assert code == 0 and obj["message"] == enc["message"]


def test_alignment_commands(tmp_path):
    pub, priv, part = tmp_path / "k.pub", tmp_path / "k.priv", tmp_path / "blocks.json"
    run(["keygen", "--preset", "aligned", "--public", pub, "--private", priv, "--blocks-out", part])
    code, obj = run(["attack", "step2", "--public", pub, "--partition", part])
    assert code == 0 and obj["multiplicity"] == 1 and len(obj["order"]) == 4
    code, obj = run(["attack", "step31", "--public", pub, "--partition", part])
    assert code == 0 and obj["inner"]["k"] == 7
    run(["keygen", "--preset", "justesen", "--public", pub, "--private", priv, "--blocks-out", part])
    code, obj = run(["attack", "step2", "--public", pub, "--partition", part])
    assert code == 1 and obj["error"] == "SignatureMismatch"


def test_spec_check_repetition_outer(tmp_path):
    path = tmp_path / "spec.json"
    concat.save_spec(desk.step1_counterexample(0), path)
    code, obj = run(["spec-check", "--spec", path])
    assert code == 0 and obj["xi_empty_guaranteed"]
    assert any("Step 1 not guaranteed" in a for a in obj["advisory"])
    code, obj = run(["spec-check", "--preset", "step1"])
    assert not obj["xi_empty_guaranteed"]


def test_simulate_and_pretty():
    code, text = run(["--pretty", "simulate", "--codes", "2", "--trials", "100", "--n-A", "128"])
    assert code == 0 and "p_c" in text and "expected_counts:" in text
    code, obj = run(["simulate", "--codes", "2", "--trials", "100", "--fixed-weight", "2"])
    assert obj["p_c"] == 1.0


def test_domain_and_usage_errors(tmp_path):
    code, obj = run(["decrypt", "--private", tmp_path / "missing"])
    assert code == 1 and obj["error"] == "CliError"
    code, obj = run(["attack", "step2", "--public", tmp_path / "missing"])
    assert code == 1
    code, obj = run(["keygen"])
    assert code == 1
    with pytest.raises(SystemExit) as info:
        cli.run(["nosuchcommand"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.run(["workfactor", "--custom", "1,2,3"])
    assert info.value.code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gcmce.cli", "workfactor"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "seed=0" in proc.stderr
    assert json.loads(proc.stdout)["workfactor"]["n_w"] == 6
