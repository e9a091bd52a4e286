"""JSON bound certificates: assembly, schema validation and independent recheck."""

from __future__ import annotations

import json
import time
from pathlib import Path

import jsonschema

from .bernoulli import irregularity_index
from .bounds import RELATIONS, BoundCertificate, Step, certify_bounds, evaluate
from .cyclotomic import PrimeContext

VERSION = "1"
DELTA_MAX_PRIME = 13

_DEC = {"type": "string", "pattern": "^-?[0-9]+$"}
_STEP = {
    "type": "object",
    "required": ["name", "lhs", "rhs", "relation", "verdict"],
    "properties": {
        "name": {"type": "string"},
        "lhs": {"type": "string"},
        "rhs": {"type": "string"},
        "relation": {"enum": sorted(RELATIONS)},
        "verdict": {"enum": ["pass", "fail"]},
        "mandatory": {"type": "boolean"},
        "data": {"type": "object", "additionalProperties": _DEC},
        "note": {"type": "string"},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "p", "counting", "chain", "rank", "delta", "meta"],
    "properties": {
        "version": {"type": "string"},
        "p": _DEC,
        "overall": {"enum": ["pass", "fail"]},
        "counting": {
            "type": "object",
            "required": ["identity", "stirling", "end_to_end"],
            "additionalProperties": _STEP,
        },
        "chain": {"type": "array", "items": _STEP},
        "rank": {
            "type": "object",
            "required": ["i_p", "D"],
            "properties": {"i_p": _DEC, "D": _DEC, "irregular_ks": {"type": "array", "items": _DEC}},
        },
        "delta": {
            "type": "object",
            "required": ["present", "vanish_order", "H_nonzero"],
            "properties": {
                "present": {"type": "boolean"},
                "vanish_order": {"anyOf": [_DEC, {"type": "null"}]},
                "H_nonzero": {"anyOf": [{"type": "boolean"}, {"type": "null"}]},
            },
        },
        "meta": {
            "type": "object",
            "required": ["seed", "runtime_ms"],
            "properties": {"seed": _DEC, "runtime_ms": _DEC},
        },
    },
}


def validate(doc: dict) -> None:
    jsonschema.validate(doc, SCHEMA)


def _delta_smoke(p: int, seed: int) -> dict:
    from .delta import construct_delta

    w = 2 if p <= 7 else 1
    cert = construct_delta(p, w, deg=40, seed=seed)
    return {
        "present": True,
        "vanish_order": None if cert.vanish_order is None else str(cert.vanish_order),
        "H_nonzero": cert.H != 0,
        "ok": cert.ok,
        "weight": str(w),
        "R_hi": str(cert.params.R_hi),
    }


def build_certificate(p: int, seed: int = 0, skip_delta: bool = False) -> tuple[dict, bool]:
    """Certificate document and whether every mandatory item passed."""
    t0 = time.perf_counter()
    PrimeContext(p)
    bounds: BoundCertificate = certify_bounds(p, seed)
    report = irregularity_index(p)
    ok = bounds.overall
    delta = {"present": False, "vanish_order": None, "H_nonzero": None}
    if not skip_delta and p <= DELTA_MAX_PRIME:
        delta = _delta_smoke(p, seed)
        ok = ok and delta["ok"]
    doc = {
        "version": VERSION,
        "p": str(p),
        "overall": "pass" if ok else "fail",
        "counting": {s.name: s.as_dict() for s in bounds.counting},
        "chain": [s.as_dict() for s in bounds.chain],
        "rank": {
            "i_p": str(report.i_p),
            "D": str(report.D),
            "irregular_ks": [str(k) for k in report.irregular_ks],
        },
        "delta": delta,
        "meta": {"seed": str(seed), "runtime_ms": str(int((time.perf_counter() - t0) * 1000))},
    }
    validate(doc)
    return doc, ok


def certify(p: int, out_path: str | Path | None = None, seed: int = 0, skip_delta: bool = False) -> tuple[dict, bool]:
    doc, ok = build_certificate(p, seed, skip_delta)
    if out_path is not None:
        Path(out_path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc, ok


def _stored_steps(doc: dict) -> list[dict]:
    return list(doc["counting"].values()) + list(doc["chain"])


def recheck(doc: dict) -> list[str]:
    """Problems found when re-deriving the certificate; empty means it checks out.

    Two routes: every stored comparison is re-evaluated from its own data, and
    all steps are recomputed from p and compared with what was stored.
    """
    problems: list[str] = []
    try:
        validate(doc)
    except jsonschema.ValidationError as exc:
        return [f"schema: {exc.message}"]
    p = int(doc["p"])
    seed = int(doc["meta"]["seed"])
    for s in _stored_steps(doc):
        data = {k: int(v) for k, v in s.get("data", {}).items()}
        try:
            got = RELATIONS[s["relation"]](evaluate(s["lhs"], data), evaluate(s["rhs"], data))
        except (KeyError, ValueError) as exc:
            problems.append(f"{s['name']}: cannot evaluate ({exc})")
            continue
        if ("pass" if got else "fail") != s["verdict"]:
            problems.append(f"{s['name']}: stored verdict {s['verdict']} does not match its data")

    fresh = certify_bounds(p, seed)
    stored = {s["name"]: s for s in _stored_steps(doc)}
    for s in fresh.counting + fresh.chain:
        old = stored.get(s.name)
        if old is None:
            problems.append(f"{s.name}: missing")
            continue
        if s.as_dict()["data"] != old.get("data") or s.lhs != old["lhs"] or s.rhs != old["rhs"]:
            problems.append(f"{s.name}: stored comparison differs from recomputation")
        if ("pass" if s.verdict else "fail") != old["verdict"]:
            problems.append(f"{s.name}: verdict differs from recomputation")
    report = irregularity_index(p)
    if doc["rank"]["i_p"] != str(report.i_p) or doc["rank"]["D"] != str(report.D):
        problems.append("rank: differs from recomputation")
    mandatory_ok = all(s["verdict"] == "pass" for s in _stored_steps(doc) if s.get("mandatory", True))
    if doc["delta"]["present"]:
        mandatory_ok = mandatory_ok and bool(doc["delta"].get("ok", True))
    if "overall" in doc and doc["overall"] != ("pass" if mandatory_ok else "fail"):
        problems.append("overall verdict inconsistent with step verdicts")
    return problems


def step_from_dict(d: dict) -> Step:
    data = {k: int(v) for k, v in d.get("data", {}).items()}
    return Step(d["name"], d["lhs"], d["rhs"], d["relation"], data, d.get("mandatory", True), d.get("note", ""))
