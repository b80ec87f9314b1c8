/**
 * Typed client for the annotation scoring service.
 *
 * The wire-level record carries every score the server knows about; this
 * module is the only place that shape exists. Callers receive role-scoped
 * views instead, so a primary annotator can never observe the other
 * primary's score before a post is resolved, and the third reviewer stays
 * score-blind until their own score is in.
 */

export type Role = "Primary1" | "Primary2" | "ThirdReviewer";

export type RecordState = "PendingFirst" | "PendingSecond" | "Disputed" | "Resolved";

export type Resolution = "Consensus" | "ThirdReviewer" | "None";

export type RecordPayload = {
  post_id: string;
  score1: number | null;
  score2: number | null;
  score3: number | null;
  label1: boolean | null;
  label2: boolean | null;
  final_label: boolean | null;
  state: RecordState;
  resolved_by: Resolution;
};

/** What a given role is allowed to see of one record. */
export type RecordView = {
  postId: string;
  state: RecordState;
  disputed: boolean;
  resolved: boolean;
  /** the viewing role's own score, if submitted */
  ownScore: number | null;
  finalLabel: boolean | null;
  resolvedBy: Resolution;
  /** all three scores; null until the record is resolved */
  scores: { score1: number | null; score2: number | null; score3: number | null } | null;
};

export type PostView = { id: string; text: string };

export type ExportRecord = {
  postId: string;
  finalLabel: boolean;
  resolvedBy: Resolution;
};

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly reason: string,
  ) {
    super(reason);
    this.name = "ApiError";
  }
}

/** 409: someone else moved the record first; refresh and retry. */
export class ConflictError extends ApiError {
  constructor(reason: string) {
    super(409, reason);
    this.name = "ConflictError";
  }
}

const OWN_SCORE_FIELD: Record<Role, "score1" | "score2" | "score3"> = {
  Primary1: "score1",
  Primary2: "score2",
  ThirdReviewer: "score3",
};

export function redactRecord(payload: RecordPayload, role: Role): RecordView {
  const resolved = payload.state === "Resolved";
  return {
    postId: payload.post_id,
    state: payload.state,
    disputed: payload.state === "Disputed",
    resolved,
    ownScore: payload[OWN_SCORE_FIELD[role]],
    finalLabel: resolved ? payload.final_label : null,
    resolvedBy: payload.resolved_by,
    scores: resolved
      ? { score1: payload.score1, score2: payload.score2, score3: payload.score3 }
      : null,
  };
}

async function parseError(response: Response): Promise<never> {
  let reason = response.statusText;
  try {
    const body = (await response.json()) as { error?: string };
    if (typeof body.error === "string") reason = body.error;
  } catch {
    // body was not JSON; keep the status text
  }
  if (response.status === 409) throw new ConflictError(reason);
  throw new ApiError(response.status, reason);
}

/** Method surface the controllers depend on; tests substitute fakes. */
export interface AnnotationClient {
  fetchQueue(role: Role): Promise<string[]>;
  fetchPost(postId: string): Promise<PostView>;
  fetchRecord(postId: string, role: Role): Promise<RecordView>;
  submitScore(postId: string, role: Role, score: number): Promise<RecordView>;
  fetchExport(): Promise<ExportRecord[]>;
}

export class AnnotationApi implements AnnotationClient {
  constructor(private readonly baseUrl: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  async fetchQueue(role: Role): Promise<string[]> {
    const data = await this.getJson<{ role: string; post_ids: string[] }>(
      `/queue?role=${encodeURIComponent(role)}`,
    );
    return data.post_ids;
  }

  async fetchPost(postId: string): Promise<PostView> {
    return this.getJson<PostView>(`/posts/${encodeURIComponent(postId)}`);
  }

  async fetchRecord(postId: string, role: Role): Promise<RecordView> {
    const payload = await this.getJson<RecordPayload>(
      `/record/${encodeURIComponent(postId)}`,
    );
    return redactRecord(payload, role);
  }

  async submitScore(postId: string, role: Role, score: number): Promise<RecordView> {
    const response = await fetch(this.baseUrl + "/score", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ post_id: postId, role, score }),
    });
    if (!response.ok) await parseError(response);
    return redactRecord((await response.json()) as RecordPayload, role);
  }

  async fetchExport(): Promise<ExportRecord[]> {
    const data = await this.getJson<{
      records: { post_id: string; final_label: boolean; resolved_by: Resolution }[];
    }>("/export");
    return data.records.map((rec) => ({
      postId: rec.post_id,
      finalLabel: rec.final_label,
      resolvedBy: rec.resolved_by,
    }));
  }
}
