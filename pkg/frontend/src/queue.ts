import { STRINGS } from "./strings.js";
import type { ReportDict, Severity } from "./types.js";

const SEVERITY_RANK: Record<Severity, number> = {
  Minor: 0,
  Moderate: 1,
  Severe: 2,
  Extreme: 3,
};

const OPEN_STATES = new Set(["Distributed", "UnderReview"]);

/** Reports still waiting on staff, worst first, oldest breaking ties. */
export function buildQueue(reports: ReportDict[]): ReportDict[] {
  return reports
    .filter((r) => OPEN_STATES.has(r.state))
    .sort((a, b) =>
      SEVERITY_RANK[b.severity] - SEVERITY_RANK[a.severity]
      || a.created_at.localeCompare(b.created_at)
      || a.id.localeCompare(b.id));
}

export type QueueSelectHandler = (reportId: string) => void;

export function renderQueue(
  container: HTMLElement,
  reports: ReportDict[],
  onSelect: QueueSelectHandler,
): void {
  container.classList.add("review-queue");
  const queue = buildQueue(reports);
  if (queue.length === 0) {
    container.replaceChildren();
    container.textContent = STRINGS.emptyQueue;
    return;
  }
  const list = document.createElement("ol");
  for (const report of queue) {
    const item = document.createElement("li");
    const btn = document.createElement("button");
    btn.type = "button";
    btn.dataset.reportId = report.id;
    btn.className = `queue-entry sev-${report.severity.toLowerCase()}`;
    btn.textContent =
      `${report.severity} ${report.kind} in ${report.district_id} (${report.state})`;
    btn.addEventListener("click", () => onSelect(report.id));
    item.append(btn);
    list.append(item);
  }
  container.replaceChildren(list);
}
