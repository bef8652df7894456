import json
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient

from ttskit.audio import encode_wav, AudioBuffer
from ttskit.errors import ServiceError
from ttskit.metrics import Rating, aggregate_mos, load_ratings_csv
from ttskit.rubric import load_rubric
from ttskit.service import CampaignConfig, CampaignStore, ClipRef, create_app


def _clips(n: int, tmp_path=None, arm="synthetic", prefix="clip") -> list[ClipRef]:
    clips = []
    for i in range(n):
        path = f"/na/{prefix}{i:03d}.wav"
        if tmp_path is not None:
            wav = tmp_path / f"{prefix}{i:03d}.wav"
            if not wav.exists():
                buf = AudioBuffer(np.sin(np.arange(4000) * (0.05 + 0.001 * i)) * 0.5, 8000)
                wav.write_bytes(encode_wav(buf))
            path = str(wav)
        clips.append(ClipRef(id=f"{prefix}{i:03d}", audio_path=path, transcript=f"sentence {i}", arm=arm))
    return clips


def _config(cid="camp1", n_clips=10, groups=("g1", "g2"), per_group=5, phase=2,
            evaluators=2, seed=7, tmp_path=None, allow_revisions=False, clips=None):
    return CampaignConfig(
        id=cid,
        phase=phase,
        seed=seed,
        clips=clips if clips is not None else _clips(n_clips, tmp_path),
        group_ids=list(groups),
        clips_per_group=per_group,
        evaluators_per_group=evaluators,
        allow_revisions=allow_revisions,
    )


class TestCampaignCreation:
    def test_allocation_deterministic(self, tmp_path):
        s1 = CampaignStore(tmp_path / "a")
        s2 = CampaignStore(tmp_path / "b")
        c1 = s1.create_campaign(_config())
        c2 = s2.create_campaign(_config())
        assert [g.clip_ids for g in c1.groups] == [g.clip_ids for g in c2.groups]
        assert [g.evaluator_ids for g in c1.groups] == [g.evaluator_ids for g in c2.groups]

    def test_clips_partitioned(self, tmp_path):
        c = CampaignStore(tmp_path).create_campaign(_config())
        all_ids = [cid for g in c.groups for cid in g.clip_ids]
        assert len(all_ids) == len(set(all_ids)) == 10

    def test_phase_rubrics(self, tmp_path):
        store = CampaignStore(tmp_path)
        c1 = store.create_campaign(_config(cid="p1", phase=1))
        c2 = store.create_campaign(_config(cid="p2", phase=2))
        assert [c.code for c in c1.rubric] == ["SI", "VN"]
        assert [c.code for c in c2.rubric] == ["SI", "VN", "SP", "MP", "EP"]

    def test_insufficient_clips(self, tmp_path):
        with pytest.raises(ServiceError) as e:
            CampaignStore(tmp_path).create_campaign(_config(n_clips=5, per_group=5))
        assert e.value.code == "insufficient_clips"

    def test_csv_unsafe_ids_rejected(self, tmp_path):
        clips = _clips(2)
        clips[0].id = "bad,id"
        cfg = _config(cid="badid", clips=clips, groups=("g",), per_group=2, evaluators=1)
        with pytest.raises(ServiceError) as e:
            CampaignStore(tmp_path).create_campaign(cfg)
        assert e.value.code == "bad_config"

    def test_minimal_campaign(self, tmp_path):
        cfg = _config(cid="mini", n_clips=1, groups=("only",), per_group=1, evaluators=1)
        c = CampaignStore(tmp_path).create_campaign(cfg)
        assert len(c.groups) == 1
        assert len(c.groups[0].clip_ids) == 1

    def test_paper_shape(self, tmp_path):
        cfg = _config(
            cid="phase2",
            n_clips=720,
            groups=("013020", "008045", "002113", "995737"),
            per_group=50,
            evaluators=5,
        )
        c = CampaignStore(tmp_path).create_campaign(cfg)
        assert sum(len(g.clip_ids) for g in c.groups) == 200
        assert sum(len(g.evaluator_ids) for g in c.groups) == 20

    def test_reload_from_disk(self, tmp_path):
        store = CampaignStore(tmp_path)
        store.create_campaign(_config())
        store.set_status("camp1", "open")
        again = CampaignStore(tmp_path)
        c = again.get_campaign("camp1")
        assert c.status == "open"
        assert len(c.clips) == 10


class TestRatings:
    def _open_store(self, tmp_path, **kw):
        store = CampaignStore(tmp_path)
        campaign = store.create_campaign(_config(**kw))
        store.set_status(campaign.id, "open")
        return store, campaign

    def test_submit_and_progress(self, tmp_path):
        store, c = self._open_store(tmp_path)
        g = c.groups[0]
        ev, clip = g.evaluator_ids[0], g.clip_ids[0]
        ack = store.submit_rating(c.id, ev, clip, "SI", 4)
        assert ack["accepted"] and not ack["revised"]
        assert store.progress(c.id)["submitted"] == 1

    def test_duplicate_rejected(self, tmp_path):
        store, c = self._open_store(tmp_path)
        g = c.groups[0]
        ev, clip = g.evaluator_ids[0], g.clip_ids[0]
        store.submit_rating(c.id, ev, clip, "SI", 4)
        with pytest.raises(ServiceError) as e:
            store.submit_rating(c.id, ev, clip, "SI", 5)
        assert e.value.code == "duplicate"

    def test_validation_errors(self, tmp_path):
        store, c = self._open_store(tmp_path)
        g = c.groups[0]
        ev, clip = g.evaluator_ids[0], g.clip_ids[0]
        other_clip = c.groups[1].clip_ids[0]
        with pytest.raises(ServiceError) as e:
            store.submit_rating(c.id, "stranger", clip, "SI", 3)
        assert e.value.code == "not_assigned"
        with pytest.raises(ServiceError) as e:
            store.submit_rating(c.id, ev, other_clip, "SI", 3)
        assert e.value.code == "not_assigned"
        with pytest.raises(ServiceError) as e:
            store.submit_rating(c.id, ev, clip, "XX", 3)
        assert e.value.code == "bad_category"
        with pytest.raises(ServiceError) as e:
            store.submit_rating(c.id, ev, clip, "SI", 6)
        assert e.value.code == "bad_score"

    def test_closed_campaign(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config())
        g = c.groups[0]
        with pytest.raises(ServiceError) as e:  # still draft
            store.submit_rating(c.id, g.evaluator_ids[0], g.clip_ids[0], "SI", 3)
        assert e.value.code == "closed"

    def test_revision_flow(self, tmp_path):
        store, c = self._open_store(tmp_path, cid="rev", allow_revisions=True)
        g = c.groups[0]
        ev, clip = g.evaluator_ids[0], g.clip_ids[0]
        store.submit_rating(c.id, ev, clip, "SI", 2)
        store.revise_rating(c.id, ev, clip, "SI", 5)
        rows = store.effective_ratings(c.id)
        assert len(rows) == 1 and rows[0].score == 5
        log = store.audit_log(c.id)
        assert [e["type"] for e in log] == ["rating", "revision"]
        assert [e["score"] for e in log] == [2, 5]

    def test_revision_disabled_by_default(self, tmp_path):
        store, c = self._open_store(tmp_path)
        g = c.groups[0]
        ev, clip = g.evaluator_ids[0], g.clip_ids[0]
        store.submit_rating(c.id, ev, clip, "SI", 2)
        with pytest.raises(ServiceError) as e:
            store.revise_rating(c.id, ev, clip, "SI", 4)
        assert e.value.code == "revisions_disabled"

    def test_revision_requires_prior(self, tmp_path):
        store, c = self._open_store(tmp_path, cid="rev2", allow_revisions=True)
        g = c.groups[0]
        with pytest.raises(ServiceError) as e:
            store.revise_rating(c.id, g.evaluator_ids[0], g.clip_ids[0], "SI", 4)
        assert e.value.code == "not_found"

    def test_revision_survives_reload(self, tmp_path):
        store, c = self._open_store(tmp_path, cid="rev3", allow_revisions=True)
        g = c.groups[0]
        ev, clip = g.evaluator_ids[0], g.clip_ids[0]
        store.submit_rating(c.id, ev, clip, "SI", 2)
        store.revise_rating(c.id, ev, clip, "SI", 5)
        reloaded = CampaignStore(tmp_path)
        rows = reloaded.effective_ratings(c.id)
        assert len(rows) == 1 and rows[0].score == 5
        assert len(reloaded.audit_log(c.id)) == 2  # both events retained

    def test_open_requires_clips_in_every_group(self, tmp_path):
        clips = _clips(3)
        cfg = CampaignConfig(
            id="emptygrp", phase=1, clips=clips, group_ids=["a", "b"],
            clip_ids_by_group={"a": [c.id for c in clips], "b": []},
            evaluator_ids={"a": ["e1"], "b": ["e2"]},
        )
        store = CampaignStore(tmp_path)
        store.create_campaign(cfg)
        with pytest.raises(ServiceError) as e:
            store.set_status("emptygrp", "open")
        assert e.value.code == "bad_config"


class TestAssignment:
    def test_order_seeded_and_stable(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config())
        store.set_status(c.id, "open")
        ev = c.groups[0].evaluator_ids[0]
        a1 = store.assignment(c.id, ev)
        a2 = store.assignment(c.id, ev)
        assert [x["clip_id"] for x in a1["clips"]] == [x["clip_id"] for x in a2["clips"]]
        assert set(a1["pending"]) == set(c.groups[0].clip_ids)

    def test_pending_completed_partition(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config(phase=1))
        store.set_status(c.id, "open")
        g = c.groups[0]
        ev = g.evaluator_ids[0]
        clip = g.clip_ids[0]
        store.submit_rating(c.id, ev, clip, "SI", 4)
        a = store.assignment(c.id, ev)
        assert clip in a["pending"]  # VN still missing
        store.submit_rating(c.id, ev, clip, "VN", 4)
        a = store.assignment(c.id, ev)
        assert clip in a["completed"]
        assert set(a["pending"]) | set(a["completed"]) == set(g.clip_ids)
        assert not set(a["pending"]) & set(a["completed"])

    def test_rubric_payload_matches_bundled(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config(phase=2))
        a = store.assignment(c.id, c.groups[0].evaluator_ids[0])
        bundled = {r.code: r.descriptors for r in load_rubric()}
        for cat in a["rubric"]:
            for score, text in cat["descriptors"].items():
                assert text == bundled[cat["code"]][int(score)]


class TestFoldAndExport:
    def test_replay_reproduces_aggregates(self, tmp_path):
        store = CampaignStore(tmp_path / "one")
        c = store.create_campaign(_config(cid="fold", evaluators=3))
        store.set_status(c.id, "open")
        rng = np.random.default_rng(5)
        for g in c.groups:
            for ev in g.evaluator_ids:
                for clip in g.clip_ids:
                    for cat in ("SI", "VN", "SP", "MP", "EP"):
                        store.submit_rating(c.id, ev, clip, cat, int(rng.integers(1, 6)))
        export1 = store.export_csv(c.id)
        results1 = json.dumps(store.results(c.id), sort_keys=True)

        # replay: new store instance folds the same log from disk
        reloaded = CampaignStore(tmp_path / "one")
        assert reloaded.export_csv(c.id) == export1
        assert json.dumps(reloaded.results(c.id), sort_keys=True) == results1

    def test_export_round_trip(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config(cid="rt", phase=1))
        store.set_status(c.id, "open")
        g = c.groups[0]
        for i, clip in enumerate(g.clip_ids):
            store.submit_rating(c.id, g.evaluator_ids[0], clip, "SI", 1 + i % 5)
        csv_path = tmp_path / "export.csv"
        csv_path.write_text(store.export_csv(c.id))
        loaded = load_ratings_csv(csv_path)
        assert loaded == store.effective_ratings(c.id)

    def test_group_isolation(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config(cid="iso"))
        store.set_status(c.id, "open")
        g1, g2 = c.groups
        store.submit_rating(c.id, g1.evaluator_ids[0], g1.clip_ids[0], "SI", 5)
        store.submit_rating(c.id, g2.evaluator_ids[0], g2.clip_ids[0], "SI", 1)
        res = store.results(c.id)
        assert res["per_group"]["g1"]["SI"]["mean"] == 5.0
        assert res["per_group"]["g2"]["SI"]["mean"] == 1.0


def _engineer_scores(n: int, total: int) -> list[int]:
    """n integer scores in 1..5 summing to `total`."""
    base = total // n
    scores = [base] * n
    for k in range(total - base * n):
        scores[k] += 1
    assert sum(scores) == total and all(1 <= s <= 5 for s in scores)
    return scores


class TestResultsShape:
    def test_group_means_and_pooled_overall(self, tmp_path):
        # Engineered so group SI means are 4.03/3.70/3.52/4.63 and the pooled
        # overall lands on 3.95 at 2 decimals (unequal group sizes required).
        plan = {"013020": (30, 121), "008045": (37, 137), "002113": (33, 116), "995737": (30, 139)}
        clips = _clips(sum(n for n, _ in plan.values()), prefix="t9c")
        clip_iter = iter(clips)
        by_group = {gid: [next(clip_iter).id for _ in range(n)] for gid, (n, _) in plan.items()}
        cfg = CampaignConfig(
            id="table9",
            phase=2,
            clips=clips,
            group_ids=list(plan),
            clip_ids_by_group=by_group,
            evaluator_ids={gid: [f"ev-{gid}"] for gid in plan},
        )
        store = CampaignStore(tmp_path)
        campaign = store.create_campaign(cfg)
        store.set_status(campaign.id, "open")

        for g in campaign.groups:
            n, total = plan[g.id]
            for clip, score in zip(g.clip_ids, _engineer_scores(n, total)):
                store.submit_rating(campaign.id, g.evaluator_ids[0], clip, "SI", score)

        res = store.results(campaign.id)
        assert round(res["per_group"]["013020"]["SI"]["mean"], 2) == 4.03
        assert round(res["per_group"]["008045"]["SI"]["mean"], 2) == 3.70
        assert round(res["per_group"]["002113"]["SI"]["mean"], 2) == 3.52
        assert round(res["per_group"]["995737"]["SI"]["mean"], 2) == 4.63
        assert round(res["overall"]["SI"]["mean"], 2) == 3.95
        assert res["overall"]["SI"]["ci95_halfwidth"] > 0

    def test_single_rating_wide_ci(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config(cid="single", n_clips=2, groups=("g",), per_group=2, evaluators=1))
        store.set_status(c.id, "open")
        g = c.groups[0]
        store.submit_rating(c.id, g.evaluator_ids[0], g.clip_ids[0], "SI", 3)
        res = store.results(c.id)
        assert res["overall"]["SI"]["mean"] == 3.0
        assert res["overall"]["SI"]["ci95_halfwidth"] is None  # flagged wide

    def test_two_arms_comparison(self, tmp_path):
        clips = _clips(4, arm="synthetic") + _clips(4, arm="natural", prefix="nat")
        store = CampaignStore(tmp_path)
        cfg = _config(cid="arms", clips=clips, groups=("g",), per_group=8, evaluators=1, phase=1)
        c = store.create_campaign(cfg)
        store.set_status(c.id, "open")
        g = c.groups[0]
        ev = g.evaluator_ids[0]
        for clip_id in g.clip_ids:
            arm = c.clips[clip_id].arm
            store.submit_rating(c.id, ev, clip_id, "SI", 4 if arm == "synthetic" else 4)
        res = store.results(c.id)
        comp = res["comparison"]["SI"]
        assert comp["difference"] == pytest.approx(0.0)

    def test_two_arms_vc_comparison_phase2(self, tmp_path):
        clips = _clips(2, arm="synthetic") + _clips(2, arm="natural", prefix="nat")
        store = CampaignStore(tmp_path)
        cfg = _config(cid="arms2", clips=clips, groups=("g",), per_group=4, evaluators=1, phase=2)
        c = store.create_campaign(cfg)
        store.set_status(c.id, "open")
        g = c.groups[0]
        ev = g.evaluator_ids[0]
        for clip_id in g.clip_ids:
            natural = c.clips[clip_id].arm == "natural"
            for cat in ("SI", "VN", "SP", "MP", "EP"):
                store.submit_rating(c.id, ev, clip_id, cat, 5 if natural else 4)
        res = store.results(c.id)
        vc = res["comparison"]["VC"]
        assert vc["natural"]["mean"] == pytest.approx(5.0)
        assert vc["synthetic"]["mean"] == pytest.approx(4.0)
        assert vc["difference"] == pytest.approx(1.0)
        # results.csv carries the phase-2 table plus the two-arm table
        csv_text = store.results_csv(c.id)
        assert csv_text.splitlines()[0] == "group,SI,VN,SP,MP,EP,VC"
        assert "Natural Speech MOS" in csv_text
        assert "Synthetic Speech MOS" in csv_text

    def test_results_csv_phase1(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config(cid="csvp1", phase=1, evaluators=1))
        store.set_status(c.id, "open")
        g = c.groups[0]
        for clip in g.clip_ids:
            store.submit_rating(c.id, g.evaluator_ids[0], clip, "SI", 4)
            store.submit_rating(c.id, g.evaluator_ids[0], clip, "VN", 3)
        lines = store.results_csv(c.id).splitlines()
        assert lines[0] == "category,mos"
        assert any(l.startswith("Speech Intelligibility,4.00") for l in lines)
        assert any(l.startswith("Voice Naturalness,3.00") for l in lines)

    def test_vc_overall_present_phase2(self, tmp_path):
        store = CampaignStore(tmp_path)
        c = store.create_campaign(_config(cid="vc", evaluators=1))
        store.set_status(c.id, "open")
        g = c.groups[0]
        ev = g.evaluator_ids[0]
        for clip in g.clip_ids:
            for cat, score in (("SI", 4), ("VN", 4), ("SP", 5), ("MP", 4), ("EP", 3)):
                store.submit_rating(c.id, ev, clip, cat, score)
        res = store.results(c.id)
        assert res["vc_overall"]["mean"] == pytest.approx(4.0)
        # matches the metrics oracle on the same scores
        sp = aggregate_mos([Rating(ev, "x", "SP", 5)] * 1, "SP")
        assert res["overall"]["SP"]["mean"] == 5.0


class TestConcurrency:
    def test_distinct_tuples_all_persist(self, tmp_path):
        store = CampaignStore(tmp_path, snapshot_every=10_000)
        c = store.create_campaign(_config(cid="conc", n_clips=20, groups=("g",), per_group=20, evaluators=5))
        store.set_status(c.id, "open")
        g = c.groups[0]
        jobs = [(ev, clip) for ev in g.evaluator_ids for clip in g.clip_ids[:20]][:100]

        def submit(job):
            ev, clip = job
            return store.submit_rating(c.id, ev, clip, "SI", 3)

        with ThreadPoolExecutor(max_workers=32) as ex:
            results = list(ex.map(submit, jobs))
        assert all(r["accepted"] for r in results)
        assert len(store.effective_ratings(c.id)) == 100
        assert len(store.audit_log(c.id)) == 100

    def test_concurrent_duplicates_one_winner(self, tmp_path):
        store = CampaignStore(tmp_path, snapshot_every=10_000)
        c = store.create_campaign(_config(cid="dup", n_clips=2, groups=("g",), per_group=2, evaluators=1))
        store.set_status(c.id, "open")
        g = c.groups[0]
        ev, clip = g.evaluator_ids[0], g.clip_ids[0]
        wins, losses = [], []
        barrier = threading.Barrier(16)

        def submit(k):
            barrier.wait()
            try:
                store.submit_rating(c.id, ev, clip, "SI", 1 + k % 5)
                wins.append(k)
            except ServiceError as e:
                assert e.code == "duplicate"
                losses.append(k)

        threads = [threading.Thread(target=submit, args=(k,)) for k in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(wins) == 1
        assert len(losses) == 15
        assert len([e for e in store.audit_log(c.id)]) == 1


class TestHttpApi:
    @pytest.fixture
    def client(self, tmp_path):
        store = CampaignStore(tmp_path / "data")
        app = create_app(store)
        with TestClient(app) as client:
            client.store = store
            client.wav_dir = tmp_path
            yield client

    def _create_open(self, client, tmp_path=None, **kw):
        cfg = _config(tmp_path=client.wav_dir, **kw)
        r = client.post("/campaigns", json=cfg.__dict__ | {"clips": [c.__dict__ for c in cfg.clips]})
        assert r.status_code == 200, r.text
        cid = r.json()["id"]
        assert client.post(f"/campaigns/{cid}/open").json()["status"] == "open"
        return r.json()

    def test_full_flow(self, client):
        campaign = self._create_open(client, cid="http1", phase=1)
        group = campaign["groups"][0]
        ev = group["evaluator_ids"][0]
        a = client.get(f"/campaigns/http1/assignment", params={"evaluator": ev}).json()
        assert len(a["clips"]) == 5
        clip = a["clips"][0]["clip_id"]
        r = client.post("/ratings", json={
            "campaign_id": "http1", "evaluator_id": ev, "clip_id": clip,
            "category": "SI", "score": 4,
        })
        assert r.status_code == 200 and r.json()["accepted"]
        dup = client.post("/ratings", json={
            "campaign_id": "http1", "evaluator_id": ev, "clip_id": clip,
            "category": "SI", "score": 4,
        })
        assert dup.status_code == 409
        prog = client.get("/campaigns/http1/progress").json()
        assert prog["submitted"] == 1
        export = client.get("/campaigns/http1/export.csv")
        assert export.headers["content-type"].startswith("text/csv")
        assert export.text.splitlines()[0] == "evaluator_id,clip_id,category,score,timestamp"

    def test_error_codes(self, client):
        self._create_open(client, cid="http2", phase=1)
        assert client.get("/campaigns/nope/progress").status_code == 404
        r = client.post("/ratings", json={
            "campaign_id": "http2", "evaluator_id": "ghost", "clip_id": "x",
            "category": "SI", "score": 4,
        })
        assert r.status_code == 403

    def test_audio_range_requests(self, client):
        self._create_open(client, cid="http3", phase=1)
        campaign = client.store.get_campaign("http3")
        clip_id = campaign.groups[0].clip_ids[0]
        full = client.get(f"/clips/{clip_id}/audio")
        assert full.status_code == 200
        assert full.headers["accept-ranges"] == "bytes"
        part = client.get(f"/clips/{clip_id}/audio", headers={"Range": "bytes=0-99"})
        assert part.status_code == 206
        assert len(part.content) == 100
        assert part.headers["content-range"].startswith("bytes 0-99/")
        assert part.content == full.content[:100]
        tail = client.get(f"/clips/{clip_id}/audio", headers={"Range": "bytes=100-"})
        assert tail.status_code == 206
        assert tail.content == full.content[100:]
        bad = client.get(f"/clips/{clip_id}/audio", headers={"Range": f"bytes={10**9}-"})
        assert bad.status_code == 416

    def test_serves_ui_assets_same_origin(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body id='x'>listening test</body></html>")
        (ui / "main.js").write_text("console.log('ok');")
        store = CampaignStore(tmp_path / "data")
        with TestClient(create_app(store, ui_dir=ui)) as client:
            index = client.get("/")
            assert index.status_code == 200
            assert "listening test" in index.text
            asset = client.get("/ui/main.js")
            assert asset.status_code == 200
            assert asset.headers["content-type"].startswith("text/javascript")
            assert client.get("/ui/../secret").status_code in (403, 404)

    def test_results_endpoint(self, client):
        campaign = self._create_open(client, cid="http4", phase=1, evaluators=1)
        group = campaign["groups"][0]
        ev = group["evaluator_ids"][0]
        for clip in group["clip_ids"]:
            for cat in ("SI", "VN"):
                client.post("/ratings", json={
                    "campaign_id": "http4", "evaluator_id": ev, "clip_id": clip,
                    "category": cat, "score": 4,
                })
        res = client.get("/campaigns/http4/results").json()
        assert res["overall"]["SI"]["mean"] == 4.0
        assert res["overall"]["SI"]["n"] == 5
