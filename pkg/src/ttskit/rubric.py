"""Listening-test rubric: five scored categories with verbatim descriptors.

The descriptor texts ship as package data so service payloads, exports, and
the browser client all quote exactly the same wording.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import MetricError

PHASE1_CODES = ("SI", "VN")
PHASE2_CODES = ("SI", "VN", "SP", "MP", "EP")


@dataclass(frozen=True)
class RubricCategory:
    code: str
    name: str
    phase: int  # table of origin: 1 for SI/VN, 2 for the consistency trio
    descriptors: dict[int, str]  # score (1..5) -> verbatim text


def load_rubric() -> list[RubricCategory]:
    raw = json.loads(resources.files("ttskit.data").joinpath("rubric.json").read_text("utf-8"))
    categories = []
    seen = set()
    for entry in raw["categories"]:
        code = entry["code"]
        if code in seen:
            raise MetricError("bad_rubric", f"duplicate category code {code}")
        seen.add(code)
        descriptors = {int(k): v for k, v in entry["descriptors"].items()}
        if sorted(descriptors) != [1, 2, 3, 4, 5]:
            raise MetricError("bad_rubric", f"category {code} must have descriptors for scores 1..5")
        categories.append(
            RubricCategory(code=code, name=entry["name"], phase=int(entry["phase"]), descriptors=descriptors)
        )
    return categories


def rubric_for_phase(phase: int) -> list[RubricCategory]:
    """Phase 1 scores {SI, VN}; phase 2 adds the three consistency categories."""
    if phase not in (1, 2):
        raise MetricError("bad_phase", f"phase must be 1 or 2, got {phase}")
    wanted = PHASE1_CODES if phase == 1 else PHASE2_CODES
    by_code = {c.code: c for c in load_rubric()}
    return [by_code[code] for code in wanted]


def rubric_to_payload(categories: list[RubricCategory]) -> list[dict]:
    return [
        {
            "code": c.code,
            "name": c.name,
            "phase": c.phase,
            "descriptors": {str(k): v for k, v in sorted(c.descriptors.items(), reverse=True)},
        }
        for c in categories
    ]
