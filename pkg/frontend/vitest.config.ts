import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    // each suite boots its own backend process; allow for slow first boot
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
