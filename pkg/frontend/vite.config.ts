import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    proxy: {
      "/graph": "http://127.0.0.1:8080",
      "/alerts": "http://127.0.0.1:8080",
      "/whatif": "http://127.0.0.1:8080",
      "/events": "http://127.0.0.1:8080",
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
  },
});
