/** Session state and the pure logic behind the advisor screen.
 *
 * Keeps everything the UI needs between requests: the rules, my cards as
 * dealt, the opponents' visible behavior, and the last evaluation
 * response. Card entry is validated against shoe multiplicities exactly
 * the way the server validates them (a violation would come back 422),
 * so bad entries are rejected inline without touching the state. */

import { capacity, classifyHand, handTotal, HandClass } from "./cards.js";
import { DealerVariant, EvaluateRequest, EvaluateResponse, GameMode, OpponentSpec, Source } from "./types.js";

export interface Rules {
  decks: number;
  mode: GameMode;
  dealerVariant: DealerVariant;
  changeOn14Allowed: boolean;
  source: Source;
}

export interface OpponentRow {
  policy: string;
  hasStood: boolean;
  cardsTaken: number;
}

export const DEFAULT_RULES: Rules = {
  decks: 8,
  mode: "open",
  dealerVariant: "V2",
  changeOn14Allowed: false,
  source: "reference",
};

export class SessionState {
  rules: Rules = { ...DEFAULT_RULES };
  myCards: number[] = [];
  opponents: OpponentRow[] = [{ policy: "stand18", hasStood: false, cardsTaken: 2 }];
  lastEvaluation: EvaluateResponse | null = null;

  get total(): number {
    return handTotal(this.myCards);
  }

  get handClass(): HandClass {
    return this.myCards.length ? classifyHand(this.myCards) : "live";
  }

  /** Cards known to be out of the shoe (my own hand; opponents' are hidden). */
  get removed(): number[] {
    return [...this.myCards].sort((a, b) => a - b);
  }

  /** Inline-validate a card entry; returns an error message or null. */
  validateCard(value: number): string | null {
    const held = this.removed.filter((v) => v === value).length;
    const cap = capacity(value, this.rules.decks);
    if (held + 1 > cap) {
      return `only ${cap} cards of value ${value} exist in ${this.rules.decks} deck(s)`;
    }
    if (this.handClass !== "live") {
      return `the hand is already ${this.handClass}`;
    }
    return null;
  }

  /** Add a card (callers validate first); returns the new classification. */
  addCard(value: number): HandClass {
    const error = this.validateCard(value);
    if (error) throw new Error(error);
    this.myCards.push(value);
    this.lastEvaluation = null;
    return this.handClass;
  }

  resetHand(): void {
    this.myCards = [];
    this.lastEvaluation = null;
  }

  /** The change-on-14 control is live exactly at a total of 14. */
  get changeOn14Available(): boolean {
    return (
      this.rules.changeOn14Allowed &&
      this.handClass === "live" &&
      this.myCards.length >= 2 &&
      this.total === 14
    );
  }

  /** An evaluation makes sense once the two-card hand is complete and live. */
  get canEvaluate(): boolean {
    return this.myCards.length >= 2 && this.handClass === "live";
  }

  buildRequest(requestId: string): EvaluateRequest {
    const opponents: OpponentSpec[] =
      this.rules.mode === "open"
        ? this.opponents.map((o) => ({
            policy: o.policy,
            has_stood: o.hasStood,
            ...(o.hasStood ? { cards_taken: o.cardsTaken } : {}),
          }))
        : [];
    const req: EvaluateRequest = {
      request_id: requestId,
      decks: this.rules.decks,
      mode: this.rules.mode,
      change_on_14_allowed: this.rules.changeOn14Allowed,
      hand: [...this.myCards],
      removed: this.removed,
      opponents,
      source: this.rules.source,
    };
    if (this.rules.mode === "dealer") {
      req.dealer_variant = this.rules.dealerVariant;
      delete req.opponents;
    }
    return req;
  }
}
