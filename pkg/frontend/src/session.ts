import { ApiError, ConflictError } from "./api";
import type { AnnotationClient } from "./api";
import type { RecordView, Role } from "./api";
import { checkScore } from "./validation";

export type SubmissionState =
  | "idle"
  | "submitting"
  | "accepted"
  | "conflict"
  | "rejected"
  | "blocked";

export type SessionView = {
  role: Role;
  queue: string[];
  selected: { postId: string; text: string; disputed: boolean } | null;
  submission: SubmissionState;
  /** blocked reason, or the server's reason rendered verbatim */
  message: string | null;
  /** role-scoped record returned for the last accepted submission */
  outcome: RecordView | null;
  /** completion banner: nothing left in this role's queue */
  done: boolean;
  /** network failure happened; data on screen may be stale, retry offered */
  offline: boolean;
};

/**
 * One annotator's working state: their queue, the open post, and the
 * fate of their last submission. All label logic stays server-side; this
 * class only replays what the service said.
 */
export class AnnotationSession {
  private queue: string[] = [];
  private selected: SessionView["selected"] = null;
  private submission: SubmissionState = "idle";
  private message: string | null = null;
  private outcome: RecordView | null = null;
  private done = false;
  private offline = false;

  constructor(
    private readonly api: AnnotationClient,
    readonly role: Role,
  ) {}

  async refresh(): Promise<void> {
    try {
      this.queue = await this.api.fetchQueue(this.role);
      this.offline = false;
      this.done = this.queue.length === 0;
    } catch (err) {
      if (err instanceof ApiError) throw err;
      // transport failure: keep what we have and offer a retry
      this.offline = true;
      this.message = "service unreachable; queue may be stale";
    }
  }

  async select(postId: string): Promise<void> {
    const [post, record] = await Promise.all([
      this.api.fetchPost(postId),
      this.api.fetchRecord(postId, this.role),
    ]);
    this.selected = { postId, text: post.text, disputed: record.disputed };
    this.submission = "idle";
    this.message = null;
  }

  async submit(rawScore: unknown): Promise<void> {
    if (!this.selected) {
      this.submission = "blocked";
      this.message = "select a post first";
      return;
    }
    const checked = checkScore(rawScore);
    if (!checked.ok) {
      // never reaches the network
      this.submission = "blocked";
      this.message = checked.reason;
      return;
    }
    const postId = this.selected.postId;
    this.submission = "submitting";
    try {
      const record = await this.api.submitScore(postId, this.role, checked.score);
      // the post leaves the queue only once the server accepted the score
      this.queue = this.queue.filter((id) => id !== postId);
      this.selected = null;
      this.outcome = record;
      this.submission = "accepted";
      this.message = null;
      this.done = this.queue.length === 0;
    } catch (err) {
      if (err instanceof ConflictError) {
        // someone else moved this record; show why and re-pull the queue
        this.submission = "conflict";
        this.message = err.reason;
        this.selected = null;
        await this.refresh();
      } else if (err instanceof ApiError) {
        this.submission = "rejected";
        this.message = err.reason;
      } else {
        this.submission = "idle";
        this.offline = true;
        this.message = "submission not delivered; retry";
      }
    }
  }

  view(): SessionView {
    return {
      role: this.role,
      queue: [...this.queue],
      selected: this.selected ? { ...this.selected } : null,
      submission: this.submission,
      message: this.message,
      outcome: this.outcome,
      done: this.done,
      offline: this.offline,
    };
  }
}
