from __future__ import annotations

import copy
import json
from math import comb

import jsonschema
import pytest

from flt2cert.bounds import Step, certify_bounds, counting_numbers, evaluate, verify_chain, verify_counting
from flt2cert.certificate import SCHEMA, build_certificate, certify, recheck, validate
from flt2cert.cli import main


def test_evaluate_is_restricted():
    assert evaluate("2**10 - 3*x // 2", {"x": 5}) == 1017
    for bad in ("__import__('os')", "x.y", "1/2", "2**-1", "[1]"):
        with pytest.raises((ValueError, KeyError)):
            evaluate(bad, {"x": 1})
    with pytest.raises(KeyError):
        evaluate("y", {})
    with pytest.raises(ValueError):
        evaluate("2**(2**30)", {})


def test_counting_identity_for_all_q_up_to_200():
    for q in range(1, 201):
        assert 3 * comb(3 * q - 1, q - 1) == comb(3 * q, q)


def test_counting_small_prime_verdicts():
    steps = {s.name: s for s in verify_counting(5)}
    assert steps["identity"].verdict and steps["stirling"].verdict
    assert not steps["end_to_end"].verdict  # 5 < 4 (5/2)^4
    with pytest.raises(ValueError):
        verify_counting(3)


def test_counting_at_257_is_exact():
    q, N, Np = counting_numbers(257)
    assert (q, N) == (128, comb(383, 127))
    steps = {s.name: s for s in verify_counting(257)}
    assert steps["end_to_end"].verdict == (comb(383, 127) * 2**256 > 256 * 5**256)
    assert steps["end_to_end"].verdict
    # the naive intermediate is reported even though it fails here
    assert not steps["stirling_to_target"].verdict and not steps["stirling_to_target"].mandatory


def test_threshold_behaviour_of_the_chain():
    assert certify_bounds(257).overall and certify_bounds(263).overall
    assert not certify_bounds(251).overall
    failing = {s.name for s in certify_bounds(251).counting + certify_bounds(251).chain if not s.verdict and s.mandatory}
    assert "end_to_end" in failing


def test_chain_data_are_integers_only():
    for s in verify_counting(257) + verify_chain(257):
        assert all(isinstance(v, int) for v in s.data.values())
        assert s.check() == s.verdict


def test_theorem_step_identity():
    s = {x.name: x for x in verify_chain(257, seed=3)}["theorem"]
    x, y = s.data["x"], s.data["y"]
    assert s.data["z"] == abs(x**257 + y**257) and s.verdict


def test_certificate_document_and_recheck(tmp_path):
    out = tmp_path / "c.json"
    doc, ok = certify(257, out)
    assert ok and doc["overall"] == "pass"
    loaded = json.loads(out.read_text())
    validate(loaded)
    assert recheck(loaded) == []
    assert {s["name"] for s in loaded["chain"]} >= {
        "entry_bound", "siegel_exponent", "H_bound", "delta_lower", "delta_upper", "s_exponent", "final", "theorem"}
    assert loaded["delta"]["present"] is False


def test_recheck_catches_tampering():
    doc, _ = build_certificate(257, skip_delta=True)
    bad = copy.deepcopy(doc)
    bad["chain"][0]["verdict"] = "fail"
    assert any("entry_bound" in m for m in recheck(bad))
    bad = copy.deepcopy(doc)
    bad["counting"]["end_to_end"]["data"]["N"] = "1"
    assert recheck(bad)
    bad = copy.deepcopy(doc)
    bad["overall"] = "fail"
    assert any("overall" in m for m in recheck(bad))
    bad = copy.deepcopy(doc)
    del bad["meta"]
    assert recheck(bad)[0].startswith("schema")


def test_certificate_small_prime_with_delta_smoke():
    doc, ok = build_certificate(5, seed=0)
    assert not ok
    assert doc["counting"]["identity"]["verdict"] == "pass"
    assert doc["counting"]["end_to_end"]["verdict"] == "fail"
    assert doc["delta"]["present"] and doc["delta"]["H_nonzero"] and doc["delta"]["ok"]
    assert recheck(doc) == []


def test_schema_rejects_non_string_numbers():
    doc, _ = build_certificate(257, skip_delta=True)
    doc["p"] = 257
    with pytest.raises(jsonschema.ValidationError):
        validate(doc)
    assert SCHEMA["required"] == ["version", "p", "counting", "chain", "rank", "delta", "meta"]


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["certify", "--prime", "257", "--out", str(out), "--skip-delta"]) == 0
    assert main(["recheck", str(out)]) == 0
    assert main(["certify", "--prime", "5", "--skip-delta"]) == 1
    assert main(["certify", "--prime", "4"]) == 2
    assert main(["certify", "--prime", "3"]) == 2
    assert main(["rank", "--prime", "37"]) == 0
    assert main(["nonsense"]) == 2
    assert main(["siegel", "--rows", "3", "--cols", "3", "--max-entry", "9"]) == 2
    capsys.readouterr()
    assert main(["rank", "--prime", "37"]) == 0
    rank = json.loads(capsys.readouterr().out)
    assert rank["irregular_ks"] == [5] and rank["irregular_exponents"] == [31] and rank["D"] == 17


def test_cli_series_and_siegel(capsys, tmp_path):
    csv_path = tmp_path / "s.csv"
    assert main(["series", "--prime", "5", "--theta", "psi1", "--deg", "25", "--check", "pthpower",
                 "--csv", str(csv_path)]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "n,c1,c2,c3,c4" and len(lines) == 27 and lines[1] == "0,-1,-1,-1,-1"
    # the strong normalized-coefficient bound breaks at n = 16 here, so the bounds check exits 1
    assert main(["series", "--prime", "5", "--theta", "2psi1", "--deg", "20", "--check", "bounds"]) == 1
    assert main(["series", "--prime", "5", "--theta", "bogus", "--deg", "5", "--check", "bounds"]) == 2
    capsys.readouterr()
    assert main(["siegel", "--rows", "3", "--cols", "8", "--max-entry", "99", "--seed", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert int(doc["inf_norm"]) <= int(doc["bound"])
    assert main(["siegel", "--rows", "3", "--cols", "8", "--max-entry", "99", "--seed", "4"]) == 0
    assert json.loads(capsys.readouterr().out) == doc


def test_step_roundtrip():
    s = Step("t", "a*b", "c", ">=", {"a": 3, "b": 4, "c": 12})
    assert s.verdict and s.as_dict()["data"] == {"a": "3", "b": "4", "c": "12"}
