import { describe, expect, it, vi } from "vitest";

import type { AnnotationClient, ExportRecord, Role } from "../src/api";
import { ProgressDashboard } from "../src/dashboard";

function makeClient(
  queues: Partial<Record<Role, string[]>>,
  exported: ExportRecord[],
): AnnotationClient {
  return {
    fetchQueue: vi.fn(async (role: Role) => queues[role] ?? []),
    fetchPost: vi.fn(async (id: string) => ({ id, text: "" })),
    fetchRecord: vi.fn(),
    submitScore: vi.fn(),
    fetchExport: vi.fn(async () => exported),
  };
}

describe("ProgressDashboard", () => {
  it("a fresh corpus is all pending", async () => {
    const client = makeClient(
      { Primary1: ["a", "b", "c"], Primary2: ["a", "b", "c"] },
      [],
    );
    const counts = await new ProgressDashboard(client).refresh();
    expect(counts).toEqual({
      pending: 3,
      disputed: 0,
      resolved: 0,
      total: 3,
      byConsensus: 0,
      byThirdReviewer: 0,
      stale: false,
    });
  });

  it("full annotation resolves the whole corpus", async () => {
    const client = makeClient({}, [
      { postId: "a", finalLabel: true, resolvedBy: "ThirdReviewer" },
      { postId: "b", finalLabel: false, resolvedBy: "Consensus" },
      { postId: "c", finalLabel: true, resolvedBy: "Consensus" },
    ]);
    const counts = await new ProgressDashboard(client).refresh();
    expect(counts.resolved).toBe(3);
    expect(counts.total).toBe(3);
    expect(counts.byConsensus).toBe(2);
    expect(counts.byThirdReviewer).toBe(1);
  });

  it("pending posts are counted once even when both primaries owe a score", async () => {
    const client = makeClient({ Primary1: ["a", "b"], Primary2: ["b", "c"] }, []);
    const counts = await new ProgressDashboard(client).refresh();
    expect(counts.pending).toBe(3);
  });

  it("splits mid-flight posts across the three buckets", async () => {
    const client = makeClient(
      { Primary1: ["c"], Primary2: ["c"], ThirdReviewer: ["a"] },
      [{ postId: "b", finalLabel: true, resolvedBy: "Consensus" }],
    );
    const counts = await new ProgressDashboard(client).refresh();
    expect(counts).toMatchObject({ pending: 1, disputed: 1, resolved: 1, total: 3 });
  });

  it("serves the last snapshot with a stale flag when a fetch fails", async () => {
    const queues: Partial<Record<Role, string[]>> = { Primary1: ["a"], Primary2: ["a"] };
    const client = makeClient(queues, []);
    const dashboard = new ProgressDashboard(client);
    const fresh = await dashboard.refresh();
    expect(fresh.stale).toBe(false);

    vi.mocked(client.fetchExport).mockRejectedValueOnce(new TypeError("fetch failed"));
    const stale = await dashboard.refresh();
    expect(stale).toEqual({ ...fresh, stale: true });
  });

  it("starts stale until the first successful refresh", async () => {
    const client = makeClient({}, []);
    vi.mocked(client.fetchQueue).mockRejectedValue(new TypeError("down"));
    const counts = await new ProgressDashboard(client).refresh();
    expect(counts.stale).toBe(true);
    expect(counts.total).toBe(0);
  });
});
