import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        url: "http://localhost/",
      },
    },
    setupFiles: ["tests/setup.ts"],
    include: ["tests/**/*.test.ts"],
    // Each file spawns its own backend; keep them sequential.
    fileParallelism: false,
    testTimeout: 60_000,
    hookTimeout: 120_000,
  },
});
