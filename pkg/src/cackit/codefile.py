"""Canonical on-disk format for codes.

A code file is a single JSON object:

    {
      "schemaVersion": 1,
      "M": 2,
      "L": 21,
      "weights": [4],
      "amOppts": false,
      "codewords": [[[1, 13], [2, 0], ...], ...],
      "provenance": {"construction": "two-channel", ...}
    }

Codewords are lists of [channel, slot] cells; single-channel codes use
channel 1 throughout.  Files carry no verification status: loaders return
the code as data and callers re-verify.
"""

from __future__ import annotations

import json
from pathlib import Path

from .multi import MultiCode, MultiCodeword
from .single import SingleCode, SingleCodeword

SCHEMA_VERSION = 1


def code_to_payload(code: SingleCode | MultiCode) -> dict:
    """Serialize a code to the JSON payload structure."""
    if isinstance(code, SingleCode):
        channels = 1
        am_oppts = False
        codewords = [[[1, s] for s in cw.elements] for cw in code.codewords]
    else:
        channels = code.channels
        am_oppts = code.am_oppts
        codewords = [[[ch, s] for ch, s in cw.cells] for cw in code.codewords]
    return {
        "schemaVersion": SCHEMA_VERSION,
        "M": channels,
        "L": code.modulus,
        "weights": sorted(code.weights),
        "amOppts": am_oppts,
        "codewords": codewords,
        "provenance": code.provenance or {"manual": True},
    }


def payload_to_code(payload: dict) -> MultiCode:
    """Rebuild a code from its payload; raises ValueError on malformed data."""
    try:
        version = payload["schemaVersion"]
        channels = payload["M"]
        modulus = payload["L"]
        weights = tuple(sorted(payload["weights"]))
        am_oppts = bool(payload.get("amOppts", False))
        raw_codewords = payload["codewords"]
        provenance = payload.get("provenance", {"manual": True})
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed code payload: {exc}") from exc
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {version}")
    codewords = [
        MultiCodeword.of(channels, modulus, [(ch, s) for ch, s in cells])
        for cells in raw_codewords
    ]
    return MultiCode(channels, modulus, weights, codewords, provenance, am_oppts)


def save_code(code: SingleCode | MultiCode, path: str | Path) -> None:
    Path(path).write_text(json.dumps(code_to_payload(code), indent=2) + "\n")


def load_code(path: str | Path) -> MultiCode:
    return payload_to_code(json.loads(Path(path).read_text()))


def multi_to_single(code: MultiCode) -> SingleCode:
    """View a one-channel code as a single-channel code."""
    if any(ch != 1 for cw in code.codewords for ch, _ in cw.cells):
        raise ValueError("code occupies channels beyond channel 1")
    codewords = [
        SingleCodeword(code.modulus, tuple(s for _, s in cw.cells))
        for cw in code.codewords
    ]
    return SingleCode(code.modulus, code.weights, codewords, code.provenance)
