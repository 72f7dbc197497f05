/** DOM controller for the advisor screen.
 *
 * All probabilities on screen come from the service responses; the only
 * local game logic is entry validation and terminal classification,
 * which mirror the server's 422 rules so mistakes surface inline
 * without a round-trip. */

import { ApiClient, EvaluationAborted } from "./api.js";
import { POINT_VALUES, VALUE_LABELS } from "./cards.js";
import { asPercent, asProbability, bannerText } from "./format.js";
import { OpponentRow, SessionState } from "./state.js";
import { ActionEvaluation, ActionName, EvaluateResponse } from "./types.js";

const ACTION_TITLES: Record<ActionName, string> = {
  stand: "Stand",
  hit: "Hit",
  change14: "Change on 14",
};

export class AdvisorApp {
  readonly state = new SessionState();
  private selectedWhatIf: ActionName | null = null;

  constructor(
    private readonly root: Document,
    private readonly api: ApiClient,
  ) {}

  // ── element access ─────────────────────────────────────────────────

  private el<T extends HTMLElement>(id: string): T {
    const found = this.root.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  // ── lifecycle ──────────────────────────────────────────────────────

  init(): void {
    this.renderCardButtons();
    this.renderOpponents();
    this.bindRules();
    this.el<HTMLButtonElement>("reset").addEventListener("click", () => {
      this.state.resetHand();
      this.setError("");
      this.renderAll();
    });
    this.el<HTMLButtonElement>("table-load").addEventListener("click", () => {
      void this.loadTable();
    });
    this.renderAll();
  }

  private bindRules(): void {
    const decks = this.el<HTMLInputElement>("decks");
    const mode = this.el<HTMLSelectElement>("mode");
    const variant = this.el<HTMLSelectElement>("dealer-variant");
    const source = this.el<HTMLSelectElement>("source");
    const change = this.el<HTMLInputElement>("change-allowed");
    decks.value = String(this.state.rules.decks);
    mode.value = this.state.rules.mode;
    variant.value = this.state.rules.dealerVariant;
    source.value = this.state.rules.source;
    change.checked = this.state.rules.changeOn14Allowed;
    const refresh = () => {
      this.state.rules.decks = Math.max(1, Number(decks.value) || 1);
      this.state.rules.mode = mode.value as "open" | "dealer";
      this.state.rules.dealerVariant = variant.value as "V1" | "V2" | "V3";
      this.state.rules.source = source.value as "exact" | "reference";
      this.state.rules.changeOn14Allowed = change.checked;
      void this.reevaluate();
    };
    for (const control of [decks, mode, variant, source, change]) {
      control.addEventListener("change", refresh);
    }
  }

  private renderCardButtons(): void {
    const host = this.el<HTMLDivElement>("card-buttons");
    host.textContent = "";
    for (const value of POINT_VALUES) {
      const button = this.root.createElement("button");
      button.className = "card-btn";
      button.dataset.value = String(value);
      button.textContent = VALUE_LABELS[value];
      button.addEventListener("click", () => void this.enterCard(value));
      host.appendChild(button);
    }
  }

  renderOpponents(): void {
    const host = this.el<HTMLDivElement>("opponents");
    host.textContent = "";
    this.state.opponents.forEach((opp, i) => {
      host.appendChild(this.opponentRow(opp, i));
    });
    const add = this.root.createElement("button");
    add.id = "add-opponent";
    add.textContent = "+ opponent";
    add.addEventListener("click", () => {
      this.state.opponents.push({ policy: "stand17", hasStood: false, cardsTaken: 2 });
      this.renderOpponents();
      void this.reevaluate();
    });
    host.appendChild(add);
  }

  private opponentRow(opp: OpponentRow, index: number): HTMLElement {
    const row = this.root.createElement("div");
    row.className = "opponent-row";
    const policy = this.root.createElement("select");
    for (const name of ["stand12", "stand13", "stand14", "stand15", "stand16",
                        "stand17", "stand18", "stand19", "stand20", "stand21"]) {
      const option = this.root.createElement("option");
      option.value = name;
      option.textContent = name;
      policy.appendChild(option);
    }
    policy.value = opp.policy;
    policy.addEventListener("change", () => {
      opp.policy = policy.value;
      void this.reevaluate();
    });
    const stood = this.root.createElement("input");
    stood.type = "checkbox";
    stood.checked = opp.hasStood;
    stood.addEventListener("change", () => {
      opp.hasStood = stood.checked;
      void this.reevaluate();
    });
    const cards = this.root.createElement("input");
    cards.type = "number";
    cards.min = "2";
    cards.value = String(opp.cardsTaken);
    cards.addEventListener("change", () => {
      opp.cardsTaken = Math.max(2, Number(cards.value) || 2);
      void this.reevaluate();
    });
    const remove = this.root.createElement("button");
    remove.textContent = "×";
    remove.addEventListener("click", () => {
      this.state.opponents.splice(index, 1);
      this.renderOpponents();
      void this.reevaluate();
    });
    const stoodLabel = this.root.createElement("label");
    stoodLabel.append(stood, " stood with ");
    row.append(policy, stoodLabel, cards, " cards ", remove);
    return row;
  }

  // ── card entry and evaluation ──────────────────────────────────────

  async enterCard(value: number): Promise<void> {
    const error = this.state.validateCard(value);
    if (error) {
      this.setError(error);
      return; // no state change on a multiplicity violation
    }
    this.setError("");
    this.state.addCard(value);
    this.renderHand();
    await this.reevaluate();
  }

  async reevaluate(): Promise<void> {
    if (!this.state.canEvaluate) {
      this.state.lastEvaluation = null;
      this.renderAll();
      return;
    }
    this.setBanner("evaluating…", "pending");
    try {
      const response = await this.api.evaluate(
        this.state.buildRequest(this.api.nextRequestId()),
      );
      this.state.lastEvaluation = response;
      this.renderAll();
    } catch (err) {
      if (err instanceof EvaluationAborted) return; // a newer entry took over
      this.setError(err instanceof Error ? err.message : String(err));
      this.setBanner("service error", "error");
    }
  }

  whatIf(action: ActionName): void {
    if (!this.state.lastEvaluation) return;
    this.selectedWhatIf = action;
    this.renderWhatIf();
  }

  // ── rendering ──────────────────────────────────────────────────────

  renderAll(): void {
    this.renderHand();
    this.renderBannerFromState();
    this.renderEvaluations();
    this.renderWhatIf();
    this.renderChange14();
  }

  private renderHand(): void {
    const hand = this.el<HTMLDivElement>("hand-display");
    const cards = this.state.myCards.map((v) => VALUE_LABELS[v].split(" ")[0]).join("  ");
    hand.textContent = this.state.myCards.length
      ? `${cards}   (total ${this.state.total})`
      : "no cards yet";
  }

  private renderBannerFromState(): void {
    const cls = this.state.handClass;
    if (this.state.myCards.length === 0) {
      this.setBanner("enter your first card", "idle");
    } else if (cls === "einz") {
      this.setBanner("EINZ — show it and take the round", "terminal");
    } else if (cls === "bust") {
      this.setBanner("BUST — announce it", "terminal");
    } else if (!this.state.canEvaluate) {
      this.setBanner("enter your second card", "idle");
    } else if (this.state.lastEvaluation) {
      const response = this.state.lastEvaluation;
      const best = response.evaluations.find((e) => e.action === response.recommendation);
      if (best) this.setBanner(bannerText(best.action, best.win), "ready");
    }
  }

  private renderEvaluations(): void {
    const host = this.el<HTMLDivElement>("evaluations");
    host.textContent = "";
    const response = this.state.lastEvaluation;
    if (!response) return;
    for (const evaluation of response.evaluations) {
      host.appendChild(this.evaluationRow(evaluation, response));
    }
  }

  private evaluationRow(e: ActionEvaluation, response: EvaluateResponse): HTMLElement {
    const row = this.root.createElement("div");
    row.className = "eval-row" + (e.action === response.recommendation ? " recommended" : "");
    row.dataset.action = e.action;
    const name = this.root.createElement("span");
    name.className = "eval-action";
    name.textContent = `#${e.rank} ${ACTION_TITLES[e.action]}`;
    const numbers = this.root.createElement("span");
    numbers.className = "eval-numbers";
    numbers.textContent =
      `win ${asPercent(e.win)} · tie ${asPercent(e.tie)} · lose ${asPercent(e.lose)}`;
    const what = this.root.createElement("button");
    what.className = "whatif-btn";
    what.textContent = "what if?";
    what.disabled = this.state.handClass !== "live";
    what.addEventListener("click", () => this.whatIf(e.action));
    row.append(name, numbers, what);
    return row;
  }

  private renderWhatIf(): void {
    const host = this.el<HTMLDivElement>("whatif-panel");
    host.textContent = "";
    const response = this.state.lastEvaluation;
    if (!response || !this.selectedWhatIf) {
      host.hidden = true;
      return;
    }
    const evaluation = response.evaluations.find((e) => e.action === this.selectedWhatIf);
    if (!evaluation) {
      host.hidden = true;
      return;
    }
    host.hidden = false;
    const title = this.root.createElement("h3");
    title.textContent = `if you ${ACTION_TITLES[evaluation.action].toLowerCase()}`;
    const list = this.root.createElement("dl");
    const entries: [string, string][] = [
      ["win", asProbability(evaluation.win)],
      ["lose", asProbability(evaluation.lose)],
    ];
    for (const [m, p] of Object.entries(evaluation.tie_breakdown)) {
      entries.splice(1, 0, [`share the top among ${m}`, asProbability(p)]);
    }
    for (const [label, value] of entries) {
      const dt = this.root.createElement("dt");
      dt.textContent = label;
      const dd = this.root.createElement("dd");
      dd.textContent = value;
      list.append(dt, dd);
    }
    host.append(title, list);
  }

  private renderChange14(): void {
    const host = this.el<HTMLDivElement>("change14-panel");
    host.textContent = "";
    const comparison = this.state.lastEvaluation?.change14_comparison;
    if (!this.state.changeOn14Available || !comparison) {
      host.hidden = true;
      return;
    }
    host.hidden = false;
    const title = this.root.createElement("h3");
    title.textContent = `change on 14? (target ${comparison.stand_on}+)`;
    const body = this.root.createElement("p");
    body.textContent =
      `keep the hand: ${asPercent(comparison.continue)} · ` +
      `redeal: ${asPercent(comparison.restart)}`;
    const verdict = this.root.createElement("p");
    verdict.className = "verdict";
    verdict.textContent =
      comparison.restart >= comparison.continue
        ? "changing is the better choice"
        : "keeping the hand is the better choice";
    host.append(title, body, verdict);
  }

  private async loadTable(): Promise<void> {
    const id = Number(this.el<HTMLSelectElement>("table-select").value);
    const source = this.el<HTMLSelectElement>("table-source").value;
    const view = this.el<HTMLDivElement>("table-view");
    try {
      const data = await this.api.table(id, 1, source);
      const table = this.root.createElement("table");
      const caption = this.root.createElement("caption");
      caption.textContent = `${data.title} [${data.source}]`;
      table.appendChild(caption);
      const head = this.root.createElement("tr");
      head.appendChild(this.root.createElement("th"));
      for (const column of data.columns) {
        const th = this.root.createElement("th");
        th.textContent = column;
        head.appendChild(th);
      }
      table.appendChild(head);
      data.rows.forEach((rowName, i) => {
        const tr = this.root.createElement("tr");
        const th = this.root.createElement("th");
        th.textContent = rowName;
        tr.appendChild(th);
        for (const value of data.values[i]) {
          const td = this.root.createElement("td");
          td.textContent = value === null ? "" : asProbability(value);
          tr.appendChild(td);
        }
        table.appendChild(tr);
      });
      view.textContent = "";
      view.appendChild(table);
    } catch (err) {
      view.textContent = err instanceof Error ? err.message : String(err);
    }
  }

  // ── small helpers ──────────────────────────────────────────────────

  private setError(message: string): void {
    const el = this.el<HTMLDivElement>("inline-error");
    el.textContent = message;
    el.hidden = !message;
  }

  private setBanner(text: string, kind: string): void {
    const banner = this.el<HTMLDivElement>("banner");
    banner.textContent = text;
    banner.dataset.kind = kind;
  }
}
