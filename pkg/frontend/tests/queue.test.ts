// Review queue ordering and rendering; pure DOM, no backend needed.

import { describe, expect, it } from "vitest";
import { buildQueue, renderQueue } from "../src/queue.js";
import type { ReportDict } from "../src/types.js";

function row(overrides: Partial<ReportDict>): ReportDict {
  return {
    id: "r-000001",
    kind: "Flood",
    details: { kind: "Flood", water_level_cm: 10 },
    location: { lat: 19.8, lon: 102.0 },
    geometry: null,
    province_id: "Louangphabang",
    district_id: "Louangprabang",
    kumban_id: "Sangkalok",
    reporter: "vil-ban-sangkha",
    reporter_phone: "",
    description: "",
    created_at: "2013-09-25T07:05:02+00:00",
    state: "Distributed",
    severity: "Minor",
    merged_into: null,
    attachments: [],
    ...overrides,
  };
}

describe("buildQueue", () => {
  it("keeps only reports still waiting on staff", () => {
    const queue = buildQueue([
      row({ id: "a", state: "Distributed" }),
      row({ id: "b", state: "UnderReview" }),
      row({ id: "c", state: "Verified" }),
      row({ id: "d", state: "Resolved" }),
      row({ id: "e", state: "Merged", merged_into: "a" }),
      row({ id: "f", state: "Submitted" }),
    ]);
    expect(queue.map((r) => r.id).sort()).toEqual(["a", "b"]);
  });

  it("sorts worst severity first, then oldest", () => {
    const queue = buildQueue([
      row({ id: "old-minor", severity: "Minor", created_at: "2013-09-20T00:00:00+00:00" }),
      row({ id: "new-extreme", severity: "Extreme", created_at: "2013-09-26T00:00:00+00:00" }),
      row({ id: "old-extreme", severity: "Extreme", created_at: "2013-09-21T00:00:00+00:00" }),
      row({ id: "new-severe", severity: "Severe", created_at: "2013-09-27T00:00:00+00:00" }),
    ]);
    expect(queue.map((r) => r.id))
      .toEqual(["old-extreme", "new-extreme", "new-severe", "old-minor"]);
  });

  it("breaks full ties by id so the order is stable", () => {
    const queue = buildQueue([row({ id: "b" }), row({ id: "a" })]);
    expect(queue.map((r) => r.id)).toEqual(["a", "b"]);
  });
});

describe("renderQueue", () => {
  it("renders one entry per open report and forwards clicks", () => {
    const host = document.createElement("div");
    const picked: string[] = [];
    renderQueue(host, [
      row({ id: "a", severity: "Extreme" }),
      row({ id: "b", state: "Resolved" }),
      row({ id: "c" }),
    ], (id) => picked.push(id));

    const buttons = host.querySelectorAll<HTMLButtonElement>("button[data-report-id]");
    expect(buttons.length).toBe(2);
    buttons[0]!.click();
    expect(picked).toEqual(["a"]); // extreme one sorted to the front
  });

  it("says so when nothing is waiting", () => {
    const host = document.createElement("div");
    renderQueue(host, [row({ id: "a", state: "Resolved" })], () => {});
    expect(host.querySelector("ol")).toBeNull();
    expect(host.textContent).toContain("No reports waiting");
  });
});
