// Boots a real alert server process for a test suite and tears it down
// afterwards. The dashboard is exercised against the actual backend, not
// a mock, so these tests double as contract tests for the HTTP API.

import { spawn, type ChildProcess } from "node:child_process";
import { once } from "node:events";
import path from "node:path";
import { fileURLToPath } from "node:url";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REGIONS = path.join(HERE, "data", "regions.json");
const DIRECTORY = path.join(HERE, "data", "directory.json");

export interface Backend {
  baseUrl: string;
  stop(): Promise<void>;
}

export async function startBackend(): Promise<Backend> {
  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "fieldalert.server",
      "--regions", REGIONS, "--directory", DIRECTORY,
      "--host", "127.0.0.1", "--port", "0"],
    { stdio: ["ignore", "ignore", "pipe"] },
  );

  const baseUrl = await new Promise<string>((resolve, reject) => {
    let buffered = "";
    const timer = setTimeout(
      () => reject(new Error(`backend did not come up:\n${buffered}`)), 20_000);
    proc.stderr!.on("data", (chunk: Buffer) => {
      buffered += chunk.toString();
      const match = buffered.match(/listening on ([\d.]+):(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(`http://${match[1]}:${match[2]}`);
      }
    });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`backend exited early (${code}):\n${buffered}`));
    });
  });

  return {
    baseUrl,
    async stop() {
      if (proc.exitCode === null) {
        proc.kill("SIGINT");
        await Promise.race([
          once(proc, "exit"),
          new Promise((resolve) => setTimeout(resolve, 5_000)),
        ]);
        if (proc.exitCode === null) proc.kill("SIGKILL");
      }
    },
  };
}

let counter = 0;

/** A minimal valid report body; the location sits inside kumban Sangkalok. */
export function sampleReport(overrides: Record<string, unknown> = {}): Record<string, unknown> {
  counter += 1;
  return {
    id: "",
    kind: "Flood",
    details: { kind: "Flood", water_level_cm: 120 },
    location: { lat: 19.845519, lon: 102.078652 },
    province_id: "Louangphabang",
    district_id: "Louangprabang",
    kumban_id: "Sangkalok",
    reporter: "vil-ban-sangkha",
    reporter_phone: "+856 20 555 0500",
    description: `rising water near the school (${counter})`,
    created_at: "2013-09-25T07:05:02+00:00",
    state: "Submitted",
    severity: "Moderate",
    merged_into: null,
    attachments: [],
    ...overrides,
  };
}

export function freshKey(prefix: string): string {
  counter += 1;
  return `${prefix}-${counter}-${Date.now()}`;
}
