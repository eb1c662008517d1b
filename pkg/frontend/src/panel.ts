import { ApiError } from "./api.js";
import type { ApiClient } from "./api.js";
import { legalActions, isVouchOnly } from "./gating.js";
import { STRINGS } from "./strings.js";
import type { ActorRow, ReportView } from "./types.js";

/** Supplies parameters for actions that need them (Assign, Merge, ...). */
export type ParamSource = (
  action: string,
  view: ReportView,
) => Record<string, unknown> | null;

export type ViewChangeHandler = (view: ReportView) => void;

/**
 * Detail pane for one report: facts, reporter contact, confirmation
 * counts, and the action buttons the signed-in actor may use.
 *
 * Buttons come from the gating table, never from guesswork about the
 * server; a click round-trips to the server and the pane re-renders
 * from the returned view, so what is on screen is always a state the
 * server confirmed. Server rejections land in the error strip with the
 * server's own error name.
 */
export class DetailPane {
  readonly container: HTMLElement;
  readonly actor: ActorRow;
  private readonly client: ApiClient;
  private readonly paramSource: ParamSource;
  private changeHandlers: ViewChangeHandler[] = [];
  private view: ReportView | null = null;
  private busy = false;

  constructor(
    container: HTMLElement,
    client: ApiClient,
    actor: ActorRow,
    paramSource: ParamSource = () => ({}),
  ) {
    this.container = container;
    this.client = client;
    this.actor = actor;
    this.paramSource = paramSource;
    container.classList.add("detail-pane");
    container.textContent = STRINGS.noSelection;
  }

  onViewChange(handler: ViewChangeHandler): void {
    this.changeHandlers.push(handler);
  }

  get currentView(): ReportView | null {
    return this.view;
  }

  async show(reportId: string): Promise<void> {
    this.renderFromView(await this.client.getView(reportId));
  }

  /** Action names currently rendered as buttons, in DOM order. */
  renderedActions(): string[] {
    return Array.from(
      this.container.querySelectorAll<HTMLElement>("button[data-action]"),
    ).map((btn) => btn.dataset.action as string);
  }

  buttonFor(action: string): HTMLButtonElement | null {
    return this.container.querySelector<HTMLButtonElement>(
      `button[data-action="${action}"]`,
    );
  }

  errorText(): string {
    return this.container.querySelector(".error-strip")?.textContent ?? "";
  }

  /**
   * Runs one action against the server and re-renders from its answer.
   * Explicit params win over the pane's param source.
   */
  async runAction(
    action: string,
    params?: Record<string, unknown>,
  ): Promise<ReportView | null> {
    if (!this.view || this.busy) return null;
    const reportId = this.view.report.id;
    const chosen = params ?? this.paramSource(action, this.view);
    if (chosen === null) return null; // source declined (dialog cancelled)
    this.busy = true;
    this.setButtonsDisabled(true);
    try {
      const fresh = isVouchOnly(action)
        ? await this.client.verify(reportId, this.actor.actor_id,
            typeof chosen.note === "string" ? chosen.note : "")
        : await this.client.action(reportId, this.actor.actor_id, action, chosen);
      this.renderFromView(fresh);
      for (const handler of this.changeHandlers) handler(fresh);
      return fresh;
    } catch (err) {
      if (err instanceof ApiError) {
        this.showError(`${err.name}: ${err.message}`);
        return null;
      }
      throw err;
    } finally {
      this.busy = false;
      this.setButtonsDisabled(false);
    }
  }

  renderFromView(view: ReportView): void {
    this.view = view;
    const { report, reliability } = view;
    this.container.replaceChildren();

    const heading = document.createElement("h2");
    heading.textContent = `${report.kind} ${report.id}`;
    heading.className = "report-heading";

    const state = document.createElement("span");
    state.className = `state-chip state-${report.state.toLowerCase()}`;
    state.dataset.field = "state";
    state.textContent = report.state;
    heading.append(" ", state);

    // contact first: staff call reporters back before anything else
    const phone = document.createElement("div");
    phone.className = "phone-banner";
    const phoneLink = document.createElement("a");
    phoneLink.href = `tel:${report.reporter_phone.replace(/\s+/g, "")}`;
    phoneLink.dataset.field = "reporter_phone";
    phoneLink.textContent = report.reporter_phone || "(no phone given)";
    phone.append(`${STRINGS.reporterPhone} (${report.reporter}): `, phoneLink);

    const facts = document.createElement("dl");
    facts.className = "facts";
    const fact = (label: string, value: string, field?: string) => {
      const dt = document.createElement("dt");
      dt.textContent = label;
      const dd = document.createElement("dd");
      dd.textContent = value;
      if (field) dd.dataset.field = field;
      facts.append(dt, dd);
    };
    fact("Severity", report.severity, "severity");
    fact("Where", [report.province_id, report.district_id, report.kumban_id]
      .filter(Boolean).join(" / "));
    fact("Position", `${report.location.lat}, ${report.location.lon}`);
    fact("Reported", report.created_at);
    fact(STRINGS.responsibleUnit, view.responsible, "responsible");
    if (report.description) fact("Description", report.description);
    if (report.merged_into) fact("Merged into", report.merged_into, "merged_into");

    const trust = document.createElement("p");
    trust.className = "reliability";
    trust.append(`${STRINGS.confirmations}: ${STRINGS.official} `);
    const official = document.createElement("b");
    official.dataset.field = "official";
    official.textContent = String(reliability.official);
    const user = document.createElement("b");
    user.dataset.field = "user";
    user.textContent = String(reliability.user);
    const score = document.createElement("b");
    score.dataset.field = "score";
    score.textContent = String(reliability.score);
    trust.append(official, `, ${STRINGS.user} `, user, `, ${STRINGS.score} `, score);

    const docs = document.createElement("ul");
    docs.className = "attachments";
    for (const ref of report.attachments) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = ref;
      link.textContent = ref;
      item.append(link);
      docs.append(item);
    }

    const errorStrip = document.createElement("div");
    errorStrip.className = "error-strip";
    errorStrip.hidden = true;

    const actions = document.createElement("div");
    actions.className = "actions";
    for (const name of legalActions(this.actor.role, report.state)) {
      const btn = document.createElement("button");
      btn.type = "button";
      btn.dataset.action = name;
      btn.textContent = STRINGS.action[name] ?? name;
      btn.addEventListener("click", () => void this.runAction(name));
      actions.append(btn);
    }

    this.container.append(heading, phone, facts, trust);
    if (report.attachments.length > 0) this.container.append(docs);
    this.container.append(errorStrip, actions);
  }

  private showError(text: string): void {
    const strip = this.container.querySelector<HTMLElement>(".error-strip");
    if (strip) {
      strip.textContent = text;
      strip.hidden = false;
    }
  }

  private setButtonsDisabled(disabled: boolean): void {
    for (const btn of this.container.querySelectorAll("button[data-action]")) {
      (btn as HTMLButtonElement).disabled = disabled;
    }
  }
}
