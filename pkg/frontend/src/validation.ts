export type ScoreCheck = { ok: true; score: number } | { ok: false; reason: string };

const REASON = "score must be a whole number from 0 to 10";

/**
 * Client-side gate for the 0-10 integer scale. Form inputs hand us
 * strings; anything that is not a whole number in range is blocked here,
 * before any request leaves the browser.
 */
export function checkScore(value: unknown): ScoreCheck {
  let num: number;
  if (typeof value === "number") {
    num = value;
  } else if (typeof value === "string" && value.trim() !== "") {
    num = Number(value.trim());
  } else {
    return { ok: false, reason: REASON };
  }
  if (!Number.isInteger(num) || num < 0 || num > 10) {
    return { ok: false, reason: REASON };
  }
  return { ok: true, score: num };
}
