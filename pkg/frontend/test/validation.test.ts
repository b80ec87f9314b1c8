import { describe, expect, it } from "vitest";

import { checkScore } from "../src/validation";

describe("checkScore", () => {
  it.each([0, 1, 5, 9, 10])("accepts the integer %d", (value) => {
    expect(checkScore(value)).toEqual({ ok: true, score: value });
  });

  it.each(["0", "7", " 10 "])("accepts form input %j", (value) => {
    expect(checkScore(value).ok).toBe(true);
  });

  it.each([-1, 11, 3.5, 100, Number.NaN, Number.POSITIVE_INFINITY])(
    "blocks the number %d",
    (value) => {
      const result = checkScore(value);
      expect(result.ok).toBe(false);
      if (!result.ok) expect(result.reason).toMatch(/0 to 10/);
    },
  );

  it.each(["", "  ", "abc", "7.5", "-1", "11", null, undefined, {}])(
    "blocks %j",
    (value) => {
      expect(checkScore(value).ok).toBe(false);
    },
  );
});
