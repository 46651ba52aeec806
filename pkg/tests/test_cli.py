import json
import subprocess
import sys

import pytest

from builders import fixture_json
from padchar.cli import main


def _report(tmp_path, argv):
    out = tmp_path / "report.json"
    code = main(argv + ["--report", str(out)])
    return code, json.loads(out.read_text())


def test_signs_on_pgsp4(tmp_path, capsys):
    code, rep = _report(tmp_path, ["signs", "c2_pgsp4_even"])
    assert code == 0
    assert rep["signs"]["eps_noram"]["G"] == "-1"
    assert rep["signs"]["unram_terms"]["G"]["0,1"] == "-1"
    assert rep["stable_sign_identity"]["holds"] is True
    assert "eps_unram contributions" in capsys.readouterr().out


def test_signs_trivial_and_elliptic(tmp_path):
    _, rep = _report(tmp_path, ["signs", "a1_split"])
    assert set(rep["signs"]["tilde_e"].values()) == {"+1"}
    _, rep = _report(tmp_path, ["signs", "a1_elliptic"])
    assert rep["signs"]["tilde_e"]["G"] == "-1"


def test_signs_reports_identity_mismatch_with_wrong_ranks(tmp_path):
    obj = fixture_json("a1_elliptic")
    obj["ranks"] = {"G": 0, "Gprime": 0, "H": 0, "Hprime": 0}
    path = tmp_path / "bad_ranks.json"
    path.write_text(json.dumps(obj))
    code, rep = _report(tmp_path, ["signs", str(path)])
    assert code == 2
    assert rep["stable_sign_identity"]["holds"] is False


def test_disc(tmp_path):
    code, rep = _report(tmp_path, ["disc", "c2_mixed_depth"])
    assert code == 0
    assert rep["v_gamma"] == "8"
    assert rep["root_H"] == ["0,1", "2,1"]


def test_mp_verify(tmp_path, capsys):
    code, rep = _report(tmp_path, ["mp-verify", "--system", "A1", "--trials", "200", "--seed", "7"])
    assert code == 0
    assert rep["systems"]["A1"]["passed"] == 200
    code, rep = _report(tmp_path, ["mp-verify", "--trials", "0"])
    assert code == 0
    assert all(v["passed"] == 0 and not v["failures"] for v in rep["systems"].values())
    code, rep = _report(tmp_path, ["mp-verify", "c2_mixed_depth", "--system", "C2",
                                   "--trials", "20", "--seed", "1"])
    assert code == 0
    assert "index_products" in rep
    capsys.readouterr()


def test_mp_verify_rejects_negative_trials():
    with pytest.raises(SystemExit):
        main(["mp-verify", "--trials", "-1"])


def test_seed_from_environment_is_deterministic(tmp_path, monkeypatch):
    monkeypatch.setenv("PADCHAR_SEED", "99")
    _, a = _report(tmp_path, ["stability", "c2_pgsp4_even", "--trials", "5"])
    _, b = _report(tmp_path, ["stability", "c2_pgsp4_even", "--trials", "5"])
    assert a == b
    assert a["seed"] == 99
    monkeypatch.setenv("PADCHAR_SEED", "nope")
    assert main(["mp-verify", "--trials", "1"]) == 1


def test_char_modes(tmp_path):
    _, rep = _report(tmp_path, ["char", "c2_pgsp4_even"])
    assert rep["value"] == {"terms": [{"symbol": "O*theta", "coeff": "-1"}]}
    _, rep = _report(tmp_path, ["char", "c2_pgsp4_even", "--twisted"])
    assert rep["value"] == {"terms": [{"symbol": "O*theta", "coeff": "1"}]}
    code, rep = _report(tmp_path, ["char", "a1_elliptic", "--stable"])
    assert code == 0
    assert rep["cross_check"]["holds"] is True


def test_char_modes_are_exclusive():
    with pytest.raises(SystemExit):
        main(["char", "a1_split", "--twisted", "--stable"])


def test_stability(tmp_path, capsys):
    code, rep = _report(tmp_path, ["stability", "c2_pgsp4_even"])
    assert code == 0
    assert rep["runs"][0]["label"] == "stable_partner"
    assert rep["untwisted_sign_flips"] == ["stable_partner"]
    assert "changes sign" in capsys.readouterr().out
    code, rep = _report(tmp_path, ["stability", "a1_elliptic", "--twist", "neg", "--trials", "3",
                                   "--seed", "2"])
    assert code == 0
    assert len(rep["runs"]) == 4


def test_validate_and_errors(tmp_path, capsys):
    assert main(["validate", "a2_rotation"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, _ = _report(tmp_path, ["validate", str(bad)])
    assert code == 1
    assert main(["signs", str(tmp_path / "missing.json")]) == 1
    assert "invalid input" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "padchar.cli", "signs", "a1_split"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "tilde_e" in proc.stdout
