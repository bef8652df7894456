// Typed client for the listening-test service HTTP+JSON API.

export interface RubricCategory {
  code: string;
  name: string;
  phase: number;
  descriptors: Record<string, string>; // score "5".."1" -> verbatim text
}

export interface ClipView {
  clip_id: string;
  audio_url: string;
  transcript: string;
  speaker_label: string;
  arm: string;
  scores: Record<string, number>; // already-submitted scores by category code
  completed: boolean;
}

export interface Assignment {
  campaign_id: string;
  status: string;
  phase: number;
  evaluator_id: string;
  group_id: string;
  rubric: RubricCategory[];
  allow_revisions: boolean;
  clips: ClipView[];
  pending: string[];
  completed: string[];
}

export interface Progress {
  campaign_id: string;
  status: string;
  submitted: number;
  expected: number;
  evaluators: Record<string, { group_id: string; submitted: number; expected: number }>;
}

export type SubmitOutcome = "accepted" | "duplicate";

// What the session layer needs; ApiClient is the real implementation,
// tests substitute fakes.
export interface ApiLike {
  url(path: string): string;
  fetchAssignment(campaignId: string, evaluator: string): Promise<Assignment>;
  submitRating(
    campaignId: string,
    evaluatorId: string,
    clipId: string,
    category: string,
    score: number,
  ): Promise<SubmitOutcome>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let code = "http_error";
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && typeof body.error === "string") {
      code = body.error;
      detail = body.detail ?? detail;
    }
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiError(res.status, code, detail);
}

export class ApiClient implements ApiLike {
  constructor(readonly baseUrl: string) {}

  url(path: string): string {
    return new URL(path, this.baseUrl).toString();
  }

  async fetchAssignment(campaignId: string, evaluator: string): Promise<Assignment> {
    const res = await fetch(
      this.url(`/campaigns/${encodeURIComponent(campaignId)}/assignment?evaluator=${encodeURIComponent(evaluator)}`),
    );
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as Assignment;
  }

  async fetchProgress(campaignId: string): Promise<Progress> {
    const res = await fetch(this.url(`/campaigns/${encodeURIComponent(campaignId)}/progress`));
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as Progress;
  }

  // Scores outside 1..5 never reach the wire.
  async submitRating(
    campaignId: string,
    evaluatorId: string,
    clipId: string,
    category: string,
    score: number,
  ): Promise<SubmitOutcome> {
    if (!Number.isInteger(score) || score < 1 || score > 5) {
      throw new RangeError(`score must be an integer in 1..5, got ${score}`);
    }
    const res = await fetch(this.url("/ratings"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        campaign_id: campaignId,
        evaluator_id: evaluatorId,
        clip_id: clipId,
        category,
        score,
      }),
    });
    if (res.ok) return "accepted";
    const err = await parseError(res);
    if (err.code === "duplicate") return "duplicate"; // already stored server-side
    throw err;
  }
}
