import type { PostView, RecordView } from "./api";

/**
 * What the third reviewer sees for an escalated post: the fact of the
 * disagreement, never the primaries' numbers. `primaryScores` is typed
 * null so a view holding them cannot even be constructed; the full
 * score breakdown only exists on resolved records.
 */
export type DisputeView = {
  postId: string;
  text: string;
  primariesDisagree: true;
  primaryScores: null;
};

export function disputeView(post: PostView, record: RecordView): DisputeView | null {
  if (!record.disputed) return null;
  return {
    postId: post.id,
    text: post.text,
    primariesDisagree: true,
    primaryScores: null,
  };
}
