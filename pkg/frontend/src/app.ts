import { ApiClient } from "./api.js";
import { MapView } from "./mapview.js";
import { DetailPane } from "./panel.js";
import type { ParamSource } from "./panel.js";
import { renderQueue } from "./queue.js";
import { Session } from "./session.js";
import { STRINGS } from "./strings.js";
import type {
  ActorRow,
  Bbox,
  DisasterKind,
  LifecycleState,
  ReportFilter,
  Severity,
} from "./types.js";

const KINDS: DisasterKind[] = [
  "Flood", "BushFire", "Infrastructure",
  "HumanDisease", "AnimalDisease", "PlantDisease",
];
const STATES: LifecycleState[] = [
  "Submitted", "Distributed", "UnderReview", "Verified", "Resolved", "Merged",
];
const SEVERITIES: Severity[] = ["Minor", "Moderate", "Severe", "Extreme"];

// Wide enough for the whole country; pan/zoom is out of scope for now.
const HOME_VIEWPORT: Bbox = [13.5, 100.0, 22.8, 107.8];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function filterSelect(
  label: string,
  values: string[],
  onChange: (value: string) => void,
): HTMLLabelElement {
  const wrap = el("label", "filter", `${label} `);
  const select = el("select");
  select.append(new Option("all", ""));
  for (const value of values) select.append(new Option(value, value));
  select.addEventListener("change", () => onChange(select.value));
  wrap.append(select);
  return wrap;
}

/** window.prompt-driven parameter collection for the detail pane. */
const promptParams: ParamSource = (action, view) => {
  switch (action) {
    case "Assign": {
      const target = window.prompt("Assign to unit id:", view.responsible);
      return target ? { target } : null;
    }
    case "Merge": {
      const other = window.prompt("Merge with report id:");
      if (!other) return null;
      const swallow = window.confirm(
        "OK: this report is folded into the other. Cancel: let age decide.");
      return swallow ? { into: other } : { with: other };
    }
    case "Update": {
      const note = window.prompt("Note to the reporter (also logged):") ?? "";
      const description = window.prompt("New description (empty keeps it):");
      const fields = description ? { description } : {};
      return { fields, note };
    }
    case "AttachDocument": {
      const ref = window.prompt("Document reference (URL or file id):");
      return ref ? { ref } : null;
    }
    default:
      return {};
  }
};

async function signIn(root: HTMLElement, client: ApiClient): Promise<ActorRow> {
  const actors = await client.directory();
  return new Promise((resolve) => {
    const form = el("form", "login");
    const label = el("label", "", `${STRINGS.loginLabel} `);
    const select = el("select");
    for (const actor of actors) {
      select.append(new Option(`${actor.name || actor.actor_id} (${actor.role})`,
        actor.actor_id));
    }
    label.append(select);
    const go = el("button", "", "Open dashboard");
    go.type = "submit";
    form.append(label, go);
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const actor = actors.find((a) => a.actor_id === select.value);
      if (actor) {
        form.remove();
        resolve(actor);
      }
    });
    root.append(form);
  });
}

export async function startApp(root: HTMLElement, serverUrl: string): Promise<void> {
  const client = new ApiClient(serverUrl);
  const actor = await signIn(root, client);

  const header = el("header");
  header.append(
    el("h1", "", STRINGS.appTitle),
    el("span", "whoami", `${actor.name || actor.actor_id} · ${actor.role}`),
  );
  const staleBanner = el("div", "stale-banner", STRINGS.staleBanner);
  staleBanner.hidden = true;

  const filterBar = el("div", "filter-bar");
  const mapBox = el("div", "map-box");
  const queueBox = el("aside", "queue-box");
  const paneBox = el("section", "pane-box");
  root.append(header, staleBanner, filterBar, mapBox, queueBox, paneBox);

  const map = new MapView(mapBox, client, HOME_VIEWPORT);
  const pane = new DetailPane(paneBox, client, actor, promptParams);
  const session = new Session(client, actor);

  const filter: ReportFilter = {};
  const refreshQueue = async () => {
    renderQueue(queueBox, await client.listReports(filter), (id) => {
      void pane.show(id);
    });
  };
  const applyFilter = () => {
    void map.setFilter(filter);
    void refreshQueue();
  };
  filterBar.append(
    filterSelect("Kind", KINDS, (v) => {
      filter.kind = (v || undefined) as DisasterKind | undefined;
      applyFilter();
    }),
    filterSelect("State", STATES, (v) => {
      filter.state = (v || undefined) as LifecycleState | undefined;
      applyFilter();
    }),
    filterSelect("Severity", SEVERITIES, (v) => {
      filter.severity = (v || undefined) as Severity | undefined;
      applyFilter();
    }),
  );

  map.onSelect((id) => void pane.show(id));
  pane.onViewChange(() => {
    void map.refresh();
    void refreshQueue();
  });
  session.onMessages((messages) => {
    void map.refresh();
    void refreshQueue();
    const shown = pane.currentView?.report.id;
    if (shown && messages.some((m) => m.alert_summary.id === shown)) {
      void pane.show(shown);
    }
  });
  session.onStaleChange((stale) => {
    staleBanner.hidden = !stale;
  });

  await map.refresh();
  await refreshQueue();
  session.start();
}
