"""Listening-test campaign store.

State lives in two plain files per campaign: `campaign.json` (definition and
status snapshot) and `ratings.log` (append-only JSONL of accepted rating and
revision events). All aggregates are pure folds over the log, so replaying
it from empty reproduces them exactly. Writes serialize through one lock.
"""

from __future__ import annotations

import json
import threading
import zlib
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ..errors import ServiceError
from ..metrics import MosResult, Rating, aggregate_mos, overall_consistency
from ..rubric import RubricCategory, rubric_for_phase

DRAFT, OPEN, CLOSED = "draft", "open", "closed"


@dataclass
class ClipRef:
    id: str
    audio_path: str
    transcript: str
    speaker_label: str = ""
    arm: str = "synthetic"  # "synthetic" or "natural"


@dataclass
class Group:
    id: str
    evaluator_ids: list[str]
    clip_ids: list[str]


@dataclass
class Campaign:
    id: str
    phase: int
    groups: list[Group]
    clips: dict[str, ClipRef]
    rubric: list[RubricCategory]
    status: str
    seed: int
    allow_revisions: bool = False

    def group_of_evaluator(self, evaluator_id: str) -> Group | None:
        for g in self.groups:
            if evaluator_id in g.evaluator_ids:
                return g
        return None

    def group_of_clip(self, clip_id: str) -> Group | None:
        for g in self.groups:
            if clip_id in g.clip_ids:
                return g
        return None


@dataclass
class CampaignConfig:
    id: str
    phase: int = 2
    seed: int = 0
    clips: list[ClipRef] = field(default_factory=list)
    group_ids: list[str] = field(default_factory=list)
    clips_per_group: int = 0
    evaluators_per_group: int = 0
    evaluator_ids: dict[str, list[str]] = field(default_factory=dict)  # group -> tokens
    clip_ids_by_group: dict[str, list[str]] = field(default_factory=dict)  # explicit assignment
    allow_revisions: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "CampaignConfig":
        clips = [ClipRef(**c) for c in raw.get("clips", [])]
        return cls(
            id=raw["id"],
            phase=int(raw.get("phase", 2)),
            seed=int(raw.get("seed", 0)),
            clips=clips,
            group_ids=list(raw.get("group_ids", [])),
            clips_per_group=int(raw.get("clips_per_group", 0)),
            evaluators_per_group=int(raw.get("evaluators_per_group", 0)),
            evaluator_ids={k: list(v) for k, v in raw.get("evaluator_ids", {}).items()},
            clip_ids_by_group={k: list(v) for k, v in raw.get("clip_ids_by_group", {}).items()},
            allow_revisions=bool(raw.get("allow_revisions", False)),
        )


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _rng_for(seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(tag.encode("utf-8"))])


def _check_token(kind: str, value: str) -> None:
    # ids flow into the ratings CSV unquoted; keep them delimiter-free
    if not value or any(ch in value for ch in ",\r\n"):
        raise ServiceError("bad_config", f"{kind} {value!r} must be non-empty and comma/newline-free")


def build_campaign(config: CampaignConfig) -> Campaign:
    """Seeded random clip-to-group allocation without replacement.

    Explicit per-group clip lists (clip_ids_by_group) bypass the random deal
    for curated campaigns; groups not listed there are dealt from the pool.
    """
    if not config.group_ids:
        raise ServiceError("bad_config", "campaign needs at least one group")
    for clip in config.clips:
        _check_token("clip id", clip.id)
    for tokens in config.evaluator_ids.values():
        for tok in tokens:
            _check_token("evaluator id", tok)
    known = {c.id for c in config.clips}
    explicit: dict[str, list[str]] = {}
    for gid, ids in config.clip_ids_by_group.items():
        missing = [i for i in ids if i not in known]
        if missing:
            raise ServiceError("bad_config", f"group {gid} references unknown clips {missing}")
        explicit[gid] = list(ids)

    dealt_groups = [g for g in config.group_ids if g not in explicit]
    taken = {cid for ids in explicit.values() for cid in ids}
    pool = [c.id for c in config.clips if c.id not in taken]
    per_group = config.clips_per_group or (len(pool) // max(1, len(dealt_groups)) if dealt_groups else 0)
    if dealt_groups and (per_group < 1 or len(pool) < len(dealt_groups) * per_group):
        raise ServiceError(
            "insufficient_clips",
            f"need {len(dealt_groups)} x {per_group} clips, have {len(pool)}",
        )

    rng = _rng_for(config.seed, "allocation")
    order = rng.permutation(len(pool))
    groups = []
    cursor = 0
    for gid in config.group_ids:
        if gid in explicit:
            clip_ids = explicit[gid]
        else:
            clip_ids = [pool[k] for k in order[cursor : cursor + per_group]]
            cursor += per_group
        evaluators = config.evaluator_ids.get(gid)
        if not evaluators:
            tok_rng = _rng_for(config.seed, f"tokens/{gid}")
            evaluators = [
                f"ev-{gid}-{i + 1:02d}-{tok_rng.integers(0, 16**6):06x}"
                for i in range(config.evaluators_per_group or 1)
            ]
        groups.append(Group(id=gid, evaluator_ids=evaluators, clip_ids=clip_ids))

    return Campaign(
        id=config.id,
        phase=config.phase,
        groups=groups,
        clips={c.id: c for c in config.clips},
        rubric=rubric_for_phase(config.phase),
        status=DRAFT,
        seed=config.seed,
        allow_revisions=config.allow_revisions,
    )


class CampaignStore:
    """One directory per campaign under `base_dir`; thread-safe writes."""

    def __init__(self, base_dir: str | Path, snapshot_every: int = 100):
        self.base_dir = Path(base_dir)
        self.snapshot_every = snapshot_every
        self._lock = threading.RLock()
        self._campaigns: dict[str, Campaign] = {}
        # (evaluator, clip, category) -> effective score; the log keeps every event
        self._effective: dict[str, dict[tuple[str, str, str], Rating]] = {}
        self._event_counts: dict[str, int] = {}
        self.base_dir.mkdir(parents=True, exist_ok=True)
        self._load_all()

    # -- persistence ---------------------------------------------------------

    def _dir(self, campaign_id: str) -> Path:
        return self.base_dir / "campaigns" / campaign_id

    def _load_all(self) -> None:
        root = self.base_dir / "campaigns"
        if not root.is_dir():
            return
        for cdir in sorted(root.iterdir()):
            meta = cdir / "campaign.json"
            if meta.is_file():
                campaign = _campaign_from_dict(json.loads(meta.read_text("utf-8")))
                self._campaigns[campaign.id] = campaign
                self._effective[campaign.id] = {}
                self._event_counts[campaign.id] = 0
                self._replay_log(campaign.id)

    def _replay_log(self, campaign_id: str) -> None:
        log = self._dir(campaign_id) / "ratings.log"
        if not log.is_file():
            return
        with open(log, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    self._apply_event(campaign_id, json.loads(line))

    def _apply_event(self, campaign_id: str, event: dict) -> None:
        key = (event["evaluator_id"], event["clip_id"], event["category"])
        self._effective[campaign_id][key] = Rating(
            evaluator_id=event["evaluator_id"],
            clip_id=event["clip_id"],
            category=event["category"],
            score=int(event["score"]),
            timestamp=event["timestamp"],
        )
        self._event_counts[campaign_id] = self._event_counts.get(campaign_id, 0) + 1

    def _append_event(self, campaign_id: str, event: dict) -> None:
        path = self._dir(campaign_id) / "ratings.log"
        with open(path, "a", encoding="utf-8") as f:
            f.write(json.dumps(event, sort_keys=True))
            f.write("\n")
        self._apply_event(campaign_id, event)
        if self._event_counts[campaign_id] % self.snapshot_every == 0:
            self._write_snapshot(campaign_id)

    def _write_snapshot(self, campaign_id: str) -> None:
        rows = self.effective_ratings(campaign_id)
        snap = {
            "campaign_id": campaign_id,
            "events_folded": self._event_counts[campaign_id],
            "ratings": [asdict(r) for r in rows],
        }
        (self._dir(campaign_id) / "snapshot.json").write_text(
            json.dumps(snap, sort_keys=True, indent=1), "utf-8"
        )

    def _save_campaign(self, campaign: Campaign) -> None:
        cdir = self._dir(campaign.id)
        cdir.mkdir(parents=True, exist_ok=True)
        (cdir / "campaign.json").write_text(
            json.dumps(_campaign_to_dict(campaign), sort_keys=True, indent=1), "utf-8"
        )

    # -- campaign lifecycle ----------------------------------------------------

    def create_campaign(self, config: CampaignConfig) -> Campaign:
        with self._lock:
            if config.id in self._campaigns:
                raise ServiceError("duplicate_campaign", f"campaign {config.id} already exists")
            campaign = build_campaign(config)
            self._campaigns[campaign.id] = campaign
            self._effective[campaign.id] = {}
            self._event_counts[campaign.id] = 0
            self._save_campaign(campaign)
            return campaign

    def get_campaign(self, campaign_id: str) -> Campaign:
        c = self._campaigns.get(campaign_id)
        if c is None:
            raise ServiceError("unknown_campaign", f"no campaign {campaign_id}")
        return c

    def set_status(self, campaign_id: str, status: str) -> Campaign:
        if status not in (DRAFT, OPEN, CLOSED):
            raise ServiceError("bad_status", f"invalid status {status}")
        with self._lock:
            c = self.get_campaign(campaign_id)
            if status == OPEN:
                empty = [g.id for g in c.groups if not g.clip_ids]
                if empty:
                    raise ServiceError("bad_config", f"groups without clips cannot open: {empty}")
            c.status = status
            self._save_campaign(c)
            return c

    def find_clip(self, clip_id: str, campaign_id: str | None = None) -> tuple[Campaign, ClipRef]:
        with self._lock:
            campaigns = list(self._campaigns.values())
        if campaign_id is not None:
            c = self.get_campaign(campaign_id)
            if clip_id in c.clips:
                return c, c.clips[clip_id]
            raise ServiceError("unknown_clip", f"no clip {clip_id} in campaign {campaign_id}")
        for c in campaigns:
            if clip_id in c.clips:
                return c, c.clips[clip_id]
        raise ServiceError("unknown_clip", f"no clip {clip_id}")

    # -- ratings ---------------------------------------------------------------

    def _validate(self, campaign: Campaign, evaluator_id: str, clip_id: str, category: str, score) -> None:
        if campaign.status != OPEN:
            raise ServiceError("closed", f"campaign {campaign.id} is not open")
        group = campaign.group_of_evaluator(evaluator_id)
        if group is None or clip_id not in group.clip_ids:
            raise ServiceError("not_assigned", f"{evaluator_id} is not assigned clip {clip_id}")
        if category not in {c.code for c in campaign.rubric}:
            raise ServiceError("bad_category", f"category {category} not in campaign rubric")
        if not isinstance(score, int) or isinstance(score, bool) or not 1 <= score <= 5:
            raise ServiceError("bad_score", f"score must be an integer in 1..5, got {score!r}")

    def submit_rating(
        self, campaign_id: str, evaluator_id: str, clip_id: str, category: str, score: int,
        timestamp: str | None = None,
    ) -> dict:
        with self._lock:
            campaign = self.get_campaign(campaign_id)
            self._validate(campaign, evaluator_id, clip_id, category, score)
            key = (evaluator_id, clip_id, category)
            if key in self._effective[campaign_id]:
                raise ServiceError("duplicate", f"rating for {key} already recorded")
            event = {
                "type": "rating",
                "evaluator_id": evaluator_id,
                "clip_id": clip_id,
                "category": category,
                "score": score,
                "timestamp": timestamp or _now_iso(),
            }
            self._append_event(campaign_id, event)
            return {"accepted": True, "revised": False, "events": self._event_counts[campaign_id]}

    def revise_rating(
        self, campaign_id: str, evaluator_id: str, clip_id: str, category: str, score: int,
        timestamp: str | None = None,
    ) -> dict:
        with self._lock:
            campaign = self.get_campaign(campaign_id)
            if not campaign.allow_revisions:
                raise ServiceError("revisions_disabled", f"campaign {campaign_id} does not allow revisions")
            self._validate(campaign, evaluator_id, clip_id, category, score)
            key = (evaluator_id, clip_id, category)
            if key not in self._effective[campaign_id]:
                raise ServiceError("not_found", f"no prior rating for {key}")
            event = {
                "type": "revision",
                "evaluator_id": evaluator_id,
                "clip_id": clip_id,
                "category": category,
                "score": score,
                "timestamp": timestamp or _now_iso(),
            }
            self._append_event(campaign_id, event)
            return {"accepted": True, "revised": True, "events": self._event_counts[campaign_id]}

    def _snapshot_effective(self, campaign_id: str) -> dict[tuple[str, str, str], Rating]:
        with self._lock:
            self.get_campaign(campaign_id)
            return dict(self._effective.get(campaign_id, {}))

    def effective_ratings(self, campaign_id: str) -> list[Rating]:
        """Current value per (evaluator, clip, category), deterministically ordered."""
        rows = list(self._snapshot_effective(campaign_id).values())
        rows.sort(key=lambda r: (r.clip_id, r.evaluator_id, r.category))
        return rows

    def audit_log(self, campaign_id: str) -> list[dict]:
        log = self._dir(campaign_id) / "ratings.log"
        if not log.is_file():
            return []
        return [json.loads(line) for line in log.read_text("utf-8").splitlines() if line.strip()]

    # -- views -------------------------------------------------------------------

    def assignment(self, campaign_id: str, evaluator_id: str) -> dict:
        campaign = self.get_campaign(campaign_id)
        group = campaign.group_of_evaluator(evaluator_id)
        if group is None:
            raise ServiceError("not_assigned", f"unknown evaluator {evaluator_id}")

        order_rng = _rng_for(campaign.seed, f"order/{evaluator_id}")
        order = order_rng.permutation(len(group.clip_ids))
        codes = [c.code for c in campaign.rubric]
        effective = self._snapshot_effective(campaign_id)

        clips = []
        for k in order:
            clip = campaign.clips[group.clip_ids[k]]
            scores = {
                cat: effective[(evaluator_id, clip.id, cat)].score
                for cat in codes
                if (evaluator_id, clip.id, cat) in effective
            }
            clips.append(
                {
                    "clip_id": clip.id,
                    "audio_url": f"/clips/{clip.id}/audio?campaign={campaign.id}",
                    "transcript": clip.transcript,
                    "speaker_label": clip.speaker_label,
                    "arm": clip.arm,
                    "scores": scores,
                    "completed": len(scores) == len(codes),
                }
            )
        from ..rubric import rubric_to_payload

        return {
            "campaign_id": campaign.id,
            "status": campaign.status,
            "phase": campaign.phase,
            "evaluator_id": evaluator_id,
            "group_id": group.id,
            "rubric": rubric_to_payload(campaign.rubric),
            "allow_revisions": campaign.allow_revisions,
            "clips": clips,
            "pending": [c["clip_id"] for c in clips if not c["completed"]],
            "completed": [c["clip_id"] for c in clips if c["completed"]],
        }

    def progress(self, campaign_id: str) -> dict:
        campaign = self.get_campaign(campaign_id)
        codes = [c.code for c in campaign.rubric]
        expected = sum(len(g.evaluator_ids) * len(g.clip_ids) * len(codes) for g in campaign.groups)
        effective = self._snapshot_effective(campaign_id)
        per_evaluator = {}
        for g in campaign.groups:
            for ev in g.evaluator_ids:
                done = sum(1 for (e, _, _) in effective if e == ev)
                per_evaluator[ev] = {
                    "group_id": g.id,
                    "submitted": done,
                    "expected": len(g.clip_ids) * len(codes),
                }
        return {
            "campaign_id": campaign_id,
            "status": campaign.status,
            "submitted": len(effective),
            "expected": expected,
            "evaluators": per_evaluator,
        }

    def results(self, campaign_id: str) -> dict:
        """Per-group and pooled MOS per category, plus the natural-vs-synthetic
        comparison when both arms carry ratings."""
        campaign = self.get_campaign(campaign_id)
        codes = [c.code for c in campaign.rubric]
        ratings = self.effective_ratings(campaign_id)

        def fold(rows: list[Rating]) -> dict[str, MosResult]:
            out = {}
            for code in codes:
                subset = [r for r in rows if r.category == code]
                if subset:
                    out[code] = aggregate_mos(subset, code)
            return out

        def mos_payload(by_cat: dict[str, MosResult]) -> dict:
            return {code: _mos_to_dict(res) for code, res in by_cat.items()}

        per_group = {}
        for g in sorted(campaign.groups, key=lambda g: g.id):
            rows = [r for r in ratings if r.clip_id in g.clip_ids]
            per_group[g.id] = mos_payload(fold(rows))

        overall = fold(ratings)
        vc = None
        if all(code in overall for code in ("SP", "MP", "EP")):
            vc = overall_consistency(overall["SP"], overall["MP"], overall["EP"])

        payload = {
            "campaign_id": campaign_id,
            "per_group": per_group,
            "overall": mos_payload(overall),
            "vc_overall": _mos_to_dict(vc) if vc else None,
            "comparison": None,
        }

        arms = {campaign.clips[r.clip_id].arm for r in ratings if r.clip_id in campaign.clips}
        if "natural" in arms and "synthetic" in arms:
            comparisons = {}
            per_arm: dict[str, dict[str, MosResult]] = {"natural": {}, "synthetic": {}}
            for arm in ("natural", "synthetic"):
                rows = [r for r in ratings if campaign.clips[r.clip_id].arm == arm]
                per_arm[arm] = fold(rows)
            for code in codes:
                if code in per_arm["natural"] and code in per_arm["synthetic"]:
                    nat, syn = per_arm["natural"][code], per_arm["synthetic"][code]
                    comparisons[code] = {
                        "natural": _mos_to_dict(nat),
                        "synthetic": _mos_to_dict(syn),
                        "difference": nat.mean - syn.mean,
                    }
            # voice-consistency summary per arm when all three sub-categories exist
            if all(c in per_arm["natural"] and c in per_arm["synthetic"] for c in ("SP", "MP", "EP")):
                vc_by_arm = {
                    arm: overall_consistency(per_arm[arm]["SP"], per_arm[arm]["MP"], per_arm[arm]["EP"])
                    for arm in ("natural", "synthetic")
                }
                comparisons["VC"] = {
                    "natural": _mos_to_dict(vc_by_arm["natural"]),
                    "synthetic": _mos_to_dict(vc_by_arm["synthetic"]),
                    "difference": vc_by_arm["natural"].mean - vc_by_arm["synthetic"].mean,
                }
            payload["comparison"] = comparisons
        return payload

    def results_csv(self, campaign_id: str) -> str:
        """Results shaped like the MOS summary tables (per-group rows, pooled
        overall row, and the natural-vs-synthetic table when two arms exist)."""
        from .. import reports

        campaign = self.get_campaign(campaign_id)
        payload = self.results(campaign_id)
        overall = {c: _mos_from_dict(d) for c, d in payload["overall"].items()}

        if campaign.phase == 1:
            names = {c.code: c.name for c in campaign.rubric}
            table = reports.mos_table_csv(
                [(names[code], res) for code, res in overall.items()]
            )
        else:
            group_rows = [
                (gid, {c: _mos_from_dict(d) for c, d in by_cat.items()})
                for gid, by_cat in payload["per_group"].items()
            ]
            vc = _mos_from_dict(payload["vc_overall"]) if payload["vc_overall"] else None
            table = reports.phase2_table_csv(group_rows, overall, vc)

        if payload["comparison"]:
            comp = payload["comparison"]
            nat = {c: _mos_from_dict(v["natural"]) for c, v in comp.items() if c != "VC"}
            syn = {c: _mos_from_dict(v["synthetic"]) for c, v in comp.items() if c != "VC"}
            nat_vc = _mos_from_dict(comp["VC"]["natural"]) if "VC" in comp else None
            syn_vc = _mos_from_dict(comp["VC"]["synthetic"]) if "VC" in comp else None
            table += "\n" + reports.natural_vs_synthetic_csv(nat, syn, nat_vc, syn_vc)
        return table

    def export_csv(self, campaign_id: str) -> str:
        from ..metrics import RATINGS_HEADER

        rows = [",".join(RATINGS_HEADER)]
        for r in self.effective_ratings(campaign_id):
            rows.append(f"{r.evaluator_id},{r.clip_id},{r.category},{r.score},{r.timestamp}")
        return "\n".join(rows) + "\n"


def _mos_to_dict(m: MosResult) -> dict:
    return {
        "category": m.category,
        "mean": m.mean,
        "ci95_halfwidth": m.ci95_halfwidth if m.ci_defined else None,
        "n": m.n,
        "approximate": m.approximate,
    }


def _mos_from_dict(d: dict) -> MosResult:
    hw = d["ci95_halfwidth"]
    return MosResult(
        category=d["category"],
        mean=d["mean"],
        ci95_halfwidth=hw if hw is not None else float("inf"),
        n=d["n"],
        approximate=d.get("approximate", False),
    )


def _campaign_to_dict(c: Campaign) -> dict:
    return {
        "id": c.id,
        "phase": c.phase,
        "status": c.status,
        "seed": c.seed,
        "allow_revisions": c.allow_revisions,
        "groups": [asdict(g) for g in c.groups],
        "clips": [asdict(clip) for clip in c.clips.values()],
    }


def _campaign_from_dict(raw: dict) -> Campaign:
    return Campaign(
        id=raw["id"],
        phase=int(raw["phase"]),
        groups=[Group(**g) for g in raw["groups"]],
        clips={c["id"]: ClipRef(**c) for c in raw["clips"]},
        rubric=rubric_for_phase(int(raw["phase"])),
        status=raw["status"],
        seed=int(raw["seed"]),
        allow_revisions=bool(raw.get("allow_revisions", False)),
    )
