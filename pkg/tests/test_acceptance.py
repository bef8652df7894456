"""Acceptance gate: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances are fixed here, not configurable.
"""

import itertools
import math
import random
import string
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from ttskit.audio import AudioBuffer, resample
from ttskit.corpus import SubsetRules, TABLE_EDGES_S, bucket_durations, build_subset
from ttskit.embed import (
    aggregate_embedding,
    compute_eer,
    plan_inference_windows,
    plan_training_partials,
)
from ttskit.errors import ServiceError
from ttskit.features import MelConfig, log_mel
from ttskit.metrics import MosResult, Rating, aggregate_mos, overall_consistency, wer
from ttskit.reports import comparison_csv, comparison_from_summary, wer_table_csv
from ttskit.service import CampaignConfig, CampaignStore, ClipRef
from ttskit.textnorm import NormConfig, normalize_text

from conftest import USABLE_IDS, make_fixture_manifest
from test_embed import eer_oracle, inference_window_count, training_window_count
from test_metrics import edit_distance_oracle


def _report(name: str) -> None:
    print(f"[ACCEPTANCE] {name}: PASS")


def test_corpus_triage_oracle():
    started = time.perf_counter()
    manifest = make_fixture_manifest()
    subset = build_subset(manifest, SubsetRules())
    assert [u.id for u in subset.utterances] == USABLE_IDS

    hist = bucket_durations(manifest, TABLE_EDGES_S)
    # brute-force recount, independent loop over 'low <= d < high'
    for b in hist.buckets:
        high = b.upper_s if b.upper_s is not None else math.inf
        want = [u.duration_s for u in manifest.utterances if b.lower_s <= u.duration_s < high]
        assert b.count == len(want)
        want_hours = sum(want) / 3600.0
        assert abs(b.hours - want_hours) <= 1e-6 * max(want_hours, 1e-12)
    assert hist.total_count == len(manifest)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"triage took {elapsed:.3f}s"
    _report(f"corpus triage oracle ({elapsed * 1000:.0f} ms)")


def test_wer_oracle_equivalence():
    started = time.perf_counter()
    vocab = ("a", "b", "c")
    sequences = [seq for n in range(6) for seq in itertools.product(vocab, repeat=n)]
    assert len(sequences) == 364
    checked = 0
    for ref in sequences:
        for hyp in sequences:
            assert wer(list(ref), list(hyp)).edits == edit_distance_oracle(ref, hyp)
            checked += 1
    elapsed = time.perf_counter() - started
    assert checked == 364 * 364
    assert elapsed < 30.0, f"WER sweep took {elapsed:.1f}s"
    _report(f"WER oracle equivalence ({checked} pairs, {elapsed:.1f} s)")


def test_eer_oracle_equivalence():
    rng = random.Random(2024)
    for case in range(1000):
        ng, ni = rng.randint(1, 100), rng.randint(1, 100)
        spread = rng.uniform(0.05, 0.5)
        genuine = [rng.gauss(0.6, spread) for _ in range(ng)]
        impostor = [rng.gauss(0.4, spread) for _ in range(ni)]
        got = compute_eer(genuine, impostor)
        want_eer, want_thr = eer_oracle(genuine, impostor)
        assert abs(got.eer - want_eer) <= 1e-9, f"case {case}"
        assert abs(got.threshold - want_thr) <= 1e-9, f"case {case}"
    _report("EER oracle equivalence (1000 random score-set pairs)")


def test_mos_arithmetic():
    result = aggregate_mos([Rating("e", "c", "SI", s) for s in (4, 4, 5, 3, 4)], "SI")
    assert result.mean == pytest.approx(4.00, abs=1e-12)
    assert result.ci95_halfwidth == pytest.approx(0.878, abs=1e-3)

    vc = overall_consistency(
        MosResult("SP", 4.07, 0.36, 80),
        MosResult("MP", 4.18, 0.21, 80),
        MosResult("EP", 3.62, 0.45, 80),
    )
    assert round(vc.mean, 2) == 3.96
    _report("MOS arithmetic (mean 4.00, halfwidth 0.878, consistency 3.96)")


def test_embedding_pipeline():
    rng = np.random.default_rng(99)
    for _ in range(10_000):
        partials = rng.standard_normal((int(rng.integers(1, 6)), 32))
        out = aggregate_embedding(list(partials))
        assert abs(float(np.linalg.norm(out.vector)) - 1.0) <= 1e-6

    rnd = random.Random(31337)
    for _ in range(10_000):
        d = rnd.uniform(0.01, 45.0)
        assert len(plan_inference_windows(d)) == inference_window_count(d), d
        assert len(plan_training_partials(d)) == training_window_count(d), d

    assert len(plan_inference_windows(2.0)) == 4
    _report("embedding pipeline (10k unit norms, 10k window plans, 2.0 s -> 4 windows)")


def test_dsp():
    rate_in, rate_out = 16000, 24000
    t = np.arange(rate_in) / rate_in
    sine = np.sin(2 * np.pi * 1000 * t)
    out = resample(sine, rate_in, rate_out)
    ref = np.sin(2 * np.pi * 1000 * np.arange(len(out)) / rate_out)
    edge = 256
    err = out[edge:-edge] - ref[edge:-edge]
    snr_db = 10 * np.log10(np.sum(ref[edge:-edge] ** 2) / np.sum(err**2))
    assert snr_db >= 60.0

    cfg = MelConfig()
    win = int(round(cfg.window_ms * cfg.source_rate / 1000))
    hop = int(round(cfg.hop_ms * cfg.source_rate / 1000))
    rnd = random.Random(404)
    for _ in range(1000):
        n = rnd.randint(win, 4 * cfg.source_rate)
        mel = log_mel(AudioBuffer(np.zeros(n), cfg.source_rate), cfg)
        assert mel.n_frames == 1 + (n - win) // hop

    rng = np.random.default_rng(17)
    x = rng.standard_normal(cfg.source_rate) * 0.05
    base = log_mel(AudioBuffer(x, cfg.source_rate), cfg).frames
    doubled = log_mel(AudioBuffer(2 * x, cfg.source_rate), cfg).frames
    above = base > math.log(cfg.log_floor) + 1e-9
    assert above.any()
    assert np.abs((doubled - base)[above] - math.log(4)).max() <= 1e-6
    _report(f"DSP (sine SNR {snr_db:.1f} dB, 1000 frame counts, ln4 shift)")


def test_text_normalization():
    rng = random.Random(808)
    alphabet = string.ascii_letters + string.digits + " .,!?';:-()\"<>" + "    "
    seeds = ["dr.", "mr", "no.", "it's", "1,000", "12.5", "hello,", "WORLD", "3rd", "(())"]
    cfg = NormConfig()
    for case in range(10_000):
        if case % 2:
            raw = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 48)))
        else:
            raw = " ".join(rng.choice(seeds) for _ in range(rng.randint(0, 9)))
        once = normalize_text(raw, cfg)
        assert normalize_text(once, cfg) == once, repr(raw)
        assert "  " not in once, repr(raw)
        assert not any(ch.islower() for ch in once), repr(raw)
    _report("text normalization (10k fuzz: idempotent, no lowercase, no double spaces)")


def _acceptance_campaign(base_dir, cid: str, n_clips: int, evaluators: int):
    store = CampaignStore(base_dir, snapshot_every=10_000)
    clips = [
        ClipRef(id=f"c{i:03d}", audio_path=f"/na/c{i:03d}.wav", transcript=f"s {i}")
        for i in range(n_clips)
    ]
    campaign = store.create_campaign(
        CampaignConfig(
            id=cid, phase=2, seed=5, clips=clips, group_ids=["g1"],
            clips_per_group=n_clips, evaluators_per_group=evaluators,
        )
    )
    store.set_status(cid, "open")
    return store, campaign


def test_service_determinism(tmp_path):
    # 500-rating log, then replay from empty via a fresh store on the same dir
    store, campaign = _acceptance_campaign(tmp_path / "replay", "acc", 20, 5)
    group = campaign.groups[0]
    rng = random.Random(12)
    submitted = 0
    for ev in group.evaluator_ids:
        for clip in group.clip_ids:
            for cat in ("SI", "VN", "SP", "MP", "EP"):
                store.submit_rating(
                    "acc", ev, clip, cat, rng.randint(1, 5),
                    timestamp=f"2024-01-01T00:00:{submitted % 60:02d}.{submitted:06d}Z",
                )
                submitted += 1
    assert submitted == 500
    export_first = store.export_csv("acc")
    import json as _json

    results_first = _json.dumps(store.results("acc"), sort_keys=True)

    replayed = CampaignStore(tmp_path / "replay", snapshot_every=10_000)
    assert replayed.export_csv("acc") == export_first
    assert _json.dumps(replayed.results("acc"), sort_keys=True) == results_first

    # 100 concurrent distinct tuples all persist
    store2, campaign2 = _acceptance_campaign(tmp_path / "conc", "acc2", 20, 5)
    group2 = campaign2.groups[0]
    jobs = [(ev, clip) for ev in group2.evaluator_ids for clip in group2.clip_ids]
    assert len(jobs) == 100

    def submit(job):
        ev, clip = job
        return store2.submit_rating("acc2", ev, clip, "SI", 3)

    with ThreadPoolExecutor(max_workers=32) as pool:
        outcomes = list(pool.map(submit, jobs))
    assert all(o["accepted"] for o in outcomes)
    assert len(store2.effective_ratings("acc2")) == 100

    # 100 concurrent duplicates of one tuple persist exactly one
    store3, campaign3 = _acceptance_campaign(tmp_path / "dup", "acc3", 2, 1)
    ev3 = campaign3.groups[0].evaluator_ids[0]
    clip3 = campaign3.groups[0].clip_ids[0]
    accepted, rejected = [], []
    barrier = threading.Barrier(100)

    def dup_submit(k):
        barrier.wait()
        try:
            store3.submit_rating("acc3", ev3, clip3, "SI", 1 + k % 5)
            accepted.append(k)
        except ServiceError as exc:
            assert exc.code == "duplicate"
            rejected.append(k)

    threads = [threading.Thread(target=dup_submit, args=(k,)) for k in range(100)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert len(accepted) == 1 and len(rejected) == 99
    assert len(store3.audit_log("acc3")) == 1
    _report("service determinism (500-rating replay byte-exact, 100/100 concurrency)")


def test_report_fidelity():
    table12 = comparison_csv(
        comparison_from_summary(
            "Reference Child Audio", 2.91, 0.07, "Synthetic Child Audio", 2.60, 0.06, n=50
        )
    )
    lines = table12.splitlines()
    assert lines[0] == "samples,Reference Child Audio MOS,Synthetic Child Audio MOS,difference"
    assert lines[1] == "50,2.91 ± 0.07,2.60 ± 0.06,0.31"

    table13 = wer_table_csv(
        [
            ("Adult Speech", 120, 3.43),
            ("Real Child Speech", 120, 15.27),
            ("Synthetic Child Speech", 120, 25.63),
        ]
    )
    rows = table13.splitlines()
    assert rows[0] == "data_type,utterances,wer"
    assert rows[1:] == [
        "Adult Speech,120,3.43",
        "Real Child Speech,120,15.27",
        "Synthetic Child Speech,120,25.63",
    ]
    _report("report fidelity (difference 0.31; WER table shape)")
