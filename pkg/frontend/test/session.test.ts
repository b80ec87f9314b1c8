import { describe, expect, it, vi } from "vitest";

import { ApiError, ConflictError } from "../src/api";
import type { AnnotationClient, RecordView } from "../src/api";
import { AnnotationSession } from "../src/session";

function record(postId: string, overrides: Partial<RecordView> = {}): RecordView {
  return {
    postId,
    state: "PendingSecond",
    disputed: false,
    resolved: false,
    ownScore: null,
    finalLabel: null,
    resolvedBy: "None",
    scores: null,
    ...overrides,
  };
}

function makeClient(overrides: Partial<AnnotationClient> = {}): AnnotationClient {
  return {
    fetchQueue: vi.fn(async () => ["a", "b", "c"]),
    fetchPost: vi.fn(async (id: string) => ({ id, text: `text of ${id}` })),
    fetchRecord: vi.fn(async (id: string) => record(id)),
    submitScore: vi.fn(async (id: string) => record(id)),
    fetchExport: vi.fn(async () => []),
    ...overrides,
  };
}

describe("AnnotationSession", () => {
  it("renders the queue in service order", async () => {
    const session = new AnnotationSession(makeClient(), "Primary1");
    await session.refresh();
    expect(session.view().queue).toEqual(["a", "b", "c"]);
    expect(session.view().done).toBe(false);
  });

  it("shows the completion banner on an empty queue", async () => {
    const client = makeClient({ fetchQueue: vi.fn(async () => []) });
    const session = new AnnotationSession(client, "Primary1");
    await session.refresh();
    expect(session.view().done).toBe(true);
  });

  it("selecting a post loads its text and dispute flag", async () => {
    const client = makeClient({
      fetchRecord: vi.fn(async (id: string) => record(id, { state: "Disputed", disputed: true })),
    });
    const session = new AnnotationSession(client, "ThirdReviewer");
    await session.refresh();
    await session.select("b");
    expect(session.view().selected).toEqual({
      postId: "b",
      text: "text of b",
      disputed: true,
    });
  });

  it("an accepted score removes the post, but only after the 2xx", async () => {
    let release: (value: RecordView) => void = () => {};
    const pending = new Promise<RecordView>((resolve) => {
      release = resolve;
    });
    const client = makeClient({ submitScore: vi.fn(() => pending) });
    const session = new AnnotationSession(client, "Primary1");
    await session.refresh();
    await session.select("a");

    const submitted = session.submit(7);
    expect(session.view().queue).toContain("a");
    expect(session.view().submission).toBe("submitting");

    release(record("a"));
    await submitted;
    const view = session.view();
    expect(view.queue).toEqual(["b", "c"]);
    expect(view.submission).toBe("accepted");
    expect(view.outcome?.postId).toBe("a");
  });

  it("finishing the last post raises the banner", async () => {
    const client = makeClient({ fetchQueue: vi.fn(async () => ["only"]) });
    const session = new AnnotationSession(client, "Primary2");
    await session.refresh();
    await session.select("only");
    await session.submit(0);
    expect(session.view().done).toBe(true);
  });

  it.each([11, -1, 3.5, "abc", ""])("blocks %j before any request", async (raw) => {
    const client = makeClient();
    const session = new AnnotationSession(client, "Primary1");
    await session.refresh();
    await session.select("a");
    await session.submit(raw);
    const view = session.view();
    expect(view.submission).toBe("blocked");
    expect(view.message).toMatch(/0 to 10/);
    expect(client.submitScore).not.toHaveBeenCalled();
    expect(view.queue).toContain("a");
  });

  it("requires a selected post", async () => {
    const client = makeClient();
    const session = new AnnotationSession(client, "Primary1");
    await session.submit(5);
    expect(session.view().submission).toBe("blocked");
    expect(client.submitScore).not.toHaveBeenCalled();
  });

  it("a conflict shows the server's reason and refreshes the queue", async () => {
    const fetchQueue = vi
      .fn<AnnotationClient["fetchQueue"]>()
      .mockResolvedValueOnce(["a", "b"])
      .mockResolvedValueOnce(["b"]);
    const client = makeClient({
      fetchQueue,
      submitScore: vi.fn(async () => {
        throw new ConflictError("Primary1 already scored post 'a'");
      }),
    });
    const session = new AnnotationSession(client, "Primary1");
    await session.refresh();
    await session.select("a");
    await session.submit(4);
    const view = session.view();
    expect(view.submission).toBe("conflict");
    expect(view.message).toBe("Primary1 already scored post 'a'");
    expect(view.queue).toEqual(["b"]);
    expect(fetchQueue).toHaveBeenCalledTimes(2);
  });

  it("other rejections render the server reason verbatim", async () => {
    const client = makeClient({
      submitScore: vi.fn(async () => {
        throw new ApiError(400, "score must be an integer between 0 and 10");
      }),
    });
    const session = new AnnotationSession(client, "Primary1");
    await session.refresh();
    await session.select("a");
    await session.submit(9);
    const view = session.view();
    expect(view.submission).toBe("rejected");
    expect(view.message).toBe("score must be an integer between 0 and 10");
    expect(view.queue).toEqual(["a", "b", "c"]);
  });

  it("keeps the queue and offers a retry when the service drops", async () => {
    const fetchQueue = vi
      .fn<AnnotationClient["fetchQueue"]>()
      .mockResolvedValueOnce(["a", "b"])
      .mockRejectedValueOnce(new TypeError("fetch failed"));
    const session = new AnnotationSession(makeClient({ fetchQueue }), "Primary1");
    await session.refresh();
    await session.refresh();
    const view = session.view();
    expect(view.offline).toBe(true);
    expect(view.queue).toEqual(["a", "b"]);
    expect(view.message).toMatch(/stale/);
  });

  it("a failed delivery keeps the post selected for a retry", async () => {
    const client = makeClient({
      submitScore: vi.fn(async () => {
        throw new TypeError("fetch failed");
      }),
    });
    const session = new AnnotationSession(client, "Primary1");
    await session.refresh();
    await session.select("a");
    await session.submit(6);
    const view = session.view();
    expect(view.offline).toBe(true);
    expect(view.selected?.postId).toBe("a");
    expect(view.queue).toContain("a");
  });
});
