import type { AnnotationClient } from "./api";

export type ProgressCounts = {
  pending: number;
  disputed: number;
  resolved: number;
  total: number;
  byConsensus: number;
  byThirdReviewer: number;
  /** a fetch failed; these numbers are the last successful snapshot */
  stale: boolean;
};

const EMPTY: ProgressCounts = {
  pending: 0,
  disputed: 0,
  resolved: 0,
  total: 0,
  byConsensus: 0,
  byThirdReviewer: 0,
  stale: true,
};

/**
 * Corpus-level progress derived purely from queue and export responses:
 * a post missing at least one primary score sits in a primary queue, a
 * disputed post sits in the third reviewer's queue, and everything
 * resolved appears in the export. No counting happens client-side that
 * the service could disagree with.
 */
export class ProgressDashboard {
  private last: ProgressCounts = EMPTY;

  constructor(private readonly api: AnnotationClient) {}

  async refresh(): Promise<ProgressCounts> {
    try {
      const [primary1, primary2, third, exported] = await Promise.all([
        this.api.fetchQueue("Primary1"),
        this.api.fetchQueue("Primary2"),
        this.api.fetchQueue("ThirdReviewer"),
        this.api.fetchExport(),
      ]);
      const pending = new Set([...primary1, ...primary2]).size;
      const disputed = third.length;
      const resolved = exported.length;
      this.last = {
        pending,
        disputed,
        resolved,
        total: pending + disputed + resolved,
        byConsensus: exported.filter((r) => r.resolvedBy === "Consensus").length,
        byThirdReviewer: exported.filter((r) => r.resolvedBy === "ThirdReviewer").length,
        stale: false,
      };
    } catch {
      this.last = { ...this.last, stale: true };
    }
    return this.last;
  }
}
