// Shared test scaffolding: fake API + assignment payload builders.

import type { ApiLike, Assignment, ClipView, RubricCategory, SubmitOutcome } from "../src/api.js";
import { BUNDLED_RUBRIC } from "../src/rubric.js";

export function rubricForPhase(phase: 1 | 2): RubricCategory[] {
  const codes = phase === 1 ? ["SI", "VN"] : ["SI", "VN", "SP", "MP", "EP"];
  return codes.map((code) => BUNDLED_RUBRIC.find((c) => c.code === code)!);
}

export function makeClips(n: number): ClipView[] {
  return Array.from({ length: n }, (_, i) => ({
    clip_id: `c${String(i).padStart(3, "0")}`,
    audio_url: `/clips/c${String(i).padStart(3, "0")}/audio?campaign=fake`,
    transcript: `sentence number ${i}`,
    speaker_label: "spk1",
    arm: "synthetic",
    scores: {},
    completed: false,
  }));
}

export class FakeApi implements ApiLike {
  submitted: Array<{ clipId: string; category: string; score: number }> = [];
  failNext = 0; // make the next N submits fail with a network error
  failOn = new Set<number>(); // 1-based submit-call numbers that fail instead
  private calls = 0;
  readonly store = new Map<string, number>();

  constructor(
    public assignment: Assignment,
    readonly base = "http://fake.test",
  ) {}

  url(path: string): string {
    return new URL(path, this.base).toString();
  }

  async fetchAssignment(): Promise<Assignment> {
    // reflect server-side state: completed flags and known scores
    const clips = this.assignment.clips.map((clip) => {
      const scores: Record<string, number> = {};
      for (const cat of this.assignment.rubric) {
        const got = this.store.get(`${clip.clip_id}/${cat.code}`);
        if (got !== undefined) scores[cat.code] = got;
      }
      return { ...clip, scores, completed: Object.keys(scores).length === this.assignment.rubric.length };
    });
    return {
      ...this.assignment,
      clips,
      pending: clips.filter((c) => !c.completed).map((c) => c.clip_id),
      completed: clips.filter((c) => c.completed).map((c) => c.clip_id),
    };
  }

  async submitRating(
    _campaign: string,
    _evaluator: string,
    clipId: string,
    category: string,
    score: number,
  ): Promise<SubmitOutcome> {
    if (!Number.isInteger(score) || score < 1 || score > 5) {
      throw new RangeError(`score out of range: ${score}`);
    }
    this.calls += 1;
    if (this.failNext > 0 || this.failOn.has(this.calls)) {
      if (this.failNext > 0) this.failNext -= 1;
      throw new TypeError("fetch failed (simulated network error)");
    }
    const key = `${clipId}/${category}`;
    if (this.store.has(key)) return "duplicate";
    this.store.set(key, score);
    this.submitted.push({ clipId, category, score });
    return "accepted";
  }
}

export function makeAssignment(phase: 1 | 2, nClips: number): Assignment {
  return {
    campaign_id: "fake",
    status: "open",
    phase,
    evaluator_id: "ev-test",
    group_id: "g1",
    rubric: rubricForPhase(phase),
    allow_revisions: false,
    clips: makeClips(nClips),
    pending: makeClips(nClips).map((c) => c.clip_id),
    completed: [],
  };
}

export async function waitFor(cond: () => boolean, ms = 5000): Promise<void> {
  const started = Date.now();
  while (!cond()) {
    if (Date.now() - started > ms) throw new Error("waitFor timed out");
    await new Promise((r) => setTimeout(r, 10));
  }
}
