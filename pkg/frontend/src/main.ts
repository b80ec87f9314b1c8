/**
 * Browser wiring. Role comes from the URL (?role=Primary1), matching the
 * three-person workflow: each annotator bookmarks their own link. All
 * state lives in the controllers; this file only renders and forwards
 * clicks.
 */

import { AnnotationApi } from "./api";
import type { Role } from "./api";
import { ProgressDashboard } from "./dashboard";
import { AnnotationSession } from "./session";
import type { SessionView } from "./session";

const ROLES: Role[] = ["Primary1", "Primary2", "ThirdReviewer"];

function pickRole(search: string): Role {
  const raw = new URLSearchParams(search).get("role");
  return (ROLES as string[]).includes(raw ?? "") ? (raw as Role) : "Primary1";
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function renderSession(view: SessionView): void {
  el("role").textContent = view.role;
  el("banner").textContent = view.done
    ? "All done - nothing left in your queue."
    : view.offline
      ? "Service unreachable. Data may be stale."
      : "";

  const list = el("queue");
  list.replaceChildren(
    ...view.queue.map((postId) => {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = "#";
      link.dataset.postId = postId;
      link.textContent = postId;
      item.append(link);
      return item;
    }),
  );

  const selected = el("selected");
  if (view.selected) {
    selected.hidden = false;
    el("post-text").textContent = view.selected.text;
    el("dispute-flag").textContent = view.selected.disputed
      ? "The primary annotators disagreed on this post. Score it independently."
      : "";
  } else {
    selected.hidden = true;
  }

  el("message").textContent = view.message ?? "";
  const outcome = view.outcome;
  el("outcome").textContent = outcome
    ? outcome.resolved
      ? `Resolved (${outcome.resolvedBy}): label ${outcome.finalLabel}`
      : `Recorded; record is now ${outcome.state}`
    : "";
}

async function boot(): Promise<void> {
  const api = new AnnotationApi("");
  const session = new AnnotationSession(api, pickRole(window.location.search));
  const dashboard = new ProgressDashboard(api);

  const redraw = () => renderSession(session.view());

  el("queue").addEventListener("click", async (event) => {
    const target = event.target as HTMLElement;
    if (!target.dataset.postId) return;
    event.preventDefault();
    await session.select(target.dataset.postId);
    redraw();
  });

  el("submit").addEventListener("click", async () => {
    const input = el("score") as HTMLInputElement;
    await session.submit(input.value);
    input.value = "";
    redraw();
  });

  el("refresh").addEventListener("click", async () => {
    await session.refresh();
    redraw();
  });

  const redrawProgress = async () => {
    const counts = await dashboard.refresh();
    el("progress").textContent =
      `${counts.resolved}/${counts.total} resolved ` +
      `(${counts.byConsensus} consensus, ${counts.byThirdReviewer} third reviewer), ` +
      `${counts.disputed} disputed, ${counts.pending} pending` +
      (counts.stale ? " [stale]" : "");
  };

  await session.refresh();
  redraw();
  await redrawProgress();
  setInterval(redrawProgress, 5000);
}

if (typeof document !== "undefined") {
  void boot();
}
