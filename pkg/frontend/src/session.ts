// Evaluator session state: the pending-clip queue, score drafts (persisted
// locally so a network failure or reload loses nothing), and submission.

import { ApiLike, Assignment, ClipView } from "./api.js";
import { rubricMismatch } from "./rubric.js";

export interface DraftStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStore implements DraftStore {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}

export class EvalSession {
  assignment: Assignment | null = null;
  queue: ClipView[] = []; // pending clips in server-given order
  drafts: Record<string, number> = {}; // current clip's category -> score
  playedThrough = new Set<string>(); // clip ids heard to completion

  constructor(
    readonly api: ApiLike,
    readonly campaignId: string,
    readonly evaluatorToken: string,
    readonly storage: DraftStore = new MemoryStore(),
  ) {}

  private draftKey(clipId: string): string {
    return `listening-ui/${this.campaignId}/${this.evaluatorToken}/${clipId}`;
  }

  async load(): Promise<void> {
    const assignment = await this.api.fetchAssignment(this.campaignId, this.evaluatorToken);
    const mismatch = rubricMismatch(assignment.rubric);
    if (mismatch) {
      throw new Error(`rubric payload differs from the bundled descriptors (${mismatch})`);
    }
    this.assignment = assignment;
    this.queue = assignment.clips.filter((c) => !c.completed);
    this.restoreDraft();
  }

  get totalClips(): number {
    return this.assignment ? this.assignment.clips.length : 0;
  }

  get completedClips(): number {
    return this.totalClips - this.queue.length;
  }

  get progressFraction(): number {
    return this.totalClips === 0 ? 1 : this.completedClips / this.totalClips;
  }

  get currentClip(): ClipView | null {
    return this.queue.length ? this.queue[0] : null;
  }

  get categories(): string[] {
    return this.assignment ? this.assignment.rubric.map((c) => c.code) : [];
  }

  private restoreDraft(): void {
    this.drafts = {};
    const clip = this.currentClip;
    if (!clip) return;
    // server-known partial scores first, local draft on top
    for (const [cat, score] of Object.entries(clip.scores)) this.drafts[cat] = score;
    const raw = this.storage.getItem(this.draftKey(clip.clip_id));
    if (raw) {
      try {
        Object.assign(this.drafts, JSON.parse(raw));
      } catch {
        this.storage.removeItem(this.draftKey(clip.clip_id));
      }
    }
  }

  setScore(category: string, score: number): void {
    if (!Number.isInteger(score) || score < 1 || score > 5) {
      throw new RangeError(`score must be an integer in 1..5, got ${score}`);
    }
    if (!this.categories.includes(category)) {
      throw new RangeError(`unknown category ${category}`);
    }
    const clip = this.currentClip;
    if (!clip) throw new Error("no pending clip");
    this.drafts[category] = score;
    this.storage.setItem(this.draftKey(clip.clip_id), JSON.stringify(this.drafts));
  }

  markPlayedThrough(clipId: string): void {
    this.playedThrough.add(clipId);
  }

  hasPlayedThrough(clipId: string): boolean {
    return this.playedThrough.has(clipId);
  }

  missingCategories(): string[] {
    return this.categories.filter((c) => !(c in this.drafts));
  }

  /** null when submittable, else a human-readable blocker. */
  blocker(): string | null {
    const clip = this.currentClip;
    if (!clip) return "nothing pending";
    if (!this.hasPlayedThrough(clip.clip_id)) return "listen to the clip to the end first";
    const missing = this.missingCategories();
    if (missing.length) return `missing scores: ${missing.join(", ")}`;
    return null;
  }

  /**
   * Submit every category score for the current clip, advance the queue.
   * Duplicate responses count as success (the server already has the value),
   * which makes a retried half-failed submission idempotent.
   */
  async submitCurrent(): Promise<void> {
    const clip = this.currentClip;
    if (!clip) throw new Error("no pending clip");
    const blocker = this.blocker();
    if (blocker) throw new Error(blocker);
    for (const category of this.categories) {
      await this.api.submitRating(
        this.campaignId,
        this.assignment!.evaluator_id,
        clip.clip_id,
        category,
        this.drafts[category],
      );
    }
    this.storage.removeItem(this.draftKey(clip.clip_id));
    this.queue.shift();
    this.restoreDraft();
  }
}
