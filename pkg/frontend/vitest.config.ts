import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the integration test boots the Python service and paces a live run
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
