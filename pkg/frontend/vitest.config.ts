import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // the e2e suite boots the real scoring service in a child process
    testTimeout: 20000,
    hookTimeout: 20000,
  },
});
