import type { ApiClient } from "./api.js";
import type { Bbox, DisasterKind, ReportDict, ReportFilter } from "./types.js";

const GLYPHS: Record<DisasterKind, string> = {
  Flood: "\u{1F30A}",
  BushFire: "\u{1F525}",
  Infrastructure: "\u{1F3DA}",
  HumanDisease: "\u{1F912}",
  AnimalDisease: "\u{1F404}",
  PlantDisease: "\u{1F33E}",
};

export type SelectHandler = (reportId: string) => void;

/**
 * Marker layer over a plain positioned element. Coordinates are
 * projected linearly into the viewport box; there is no tile layer, the
 * host page supplies whatever backdrop it wants.
 *
 * Markers always mirror the server's list answer for the current
 * viewport and filter: refresh() refetches and rebuilds rather than
 * patching, so the marker count can never drift from the server.
 */
export class MapView {
  readonly container: HTMLElement;
  private readonly client: ApiClient;
  private readonly layer: HTMLElement;
  private readonly banner: HTMLElement;
  private selectHandlers: SelectHandler[] = [];

  viewport: Bbox;
  filter: ReportFilter = {};

  constructor(container: HTMLElement, client: ApiClient, viewport: Bbox) {
    this.container = container;
    this.client = client;
    this.viewport = viewport;
    container.classList.add("map-view");
    this.banner = document.createElement("div");
    this.banner.className = "map-banner";
    this.banner.hidden = true;
    this.layer = document.createElement("div");
    this.layer.className = "marker-layer";
    container.append(this.banner, this.layer);
  }

  onSelect(handler: SelectHandler): void {
    this.selectHandlers.push(handler);
  }

  setViewport(viewport: Bbox): Promise<void> {
    this.viewport = viewport;
    return this.refresh();
  }

  setFilter(filter: ReportFilter): Promise<void> {
    this.filter = filter;
    return this.refresh();
  }

  markers(): HTMLElement[] {
    return Array.from(this.layer.querySelectorAll<HTMLElement>(".marker"));
  }

  markerFor(reportId: string): HTMLElement | null {
    return this.layer.querySelector<HTMLElement>(
      `.marker[data-report-id="${reportId}"]`,
    );
  }

  async refresh(): Promise<void> {
    let reports: ReportDict[];
    try {
      reports = await this.client.listReports(this.filter, this.viewport);
    } catch (err) {
      this.banner.textContent = `Server error: ${(err as Error).message}`;
      this.banner.hidden = false;
      return;
    }
    this.banner.hidden = true;
    this.layer.replaceChildren(
      ...reports.map((report) => this.buildMarker(report)),
    );
  }

  private buildMarker(report: ReportDict): HTMLElement {
    const [latMin, lonMin, latMax, lonMax] = this.viewport;
    const marker = document.createElement("button");
    marker.type = "button";
    marker.className = `marker sev-${report.severity.toLowerCase()}`;
    marker.dataset.reportId = report.id;
    marker.dataset.kind = report.kind;
    marker.dataset.state = report.state;
    marker.textContent = GLYPHS[report.kind];
    marker.title = `${report.kind} (${report.severity}) ${report.id}`;
    const x = (report.location.lon - lonMin) / (lonMax - lonMin);
    const y = (latMax - report.location.lat) / (latMax - latMin);
    marker.style.left = `${(x * 100).toFixed(2)}%`;
    marker.style.top = `${(y * 100).toFixed(2)}%`;
    marker.addEventListener("click", () => {
      for (const handler of this.selectHandlers) handler(report.id);
    });
    return marker;
  }
}
