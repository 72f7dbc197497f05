/** Wire types mirrored from the advisor service (see fixtures/README.md). */

export type ActionName = "stand" | "hit" | "change14";
export type Source = "exact" | "reference";
export type GameMode = "open" | "dealer";
export type DealerVariant = "V1" | "V2" | "V3";

export interface OpponentSpec {
  policy: string;
  has_stood: boolean;
  cards_taken?: number;
  min_card_value?: number;
}

export interface EvaluateRequest {
  request_id?: string;
  decks: number;
  mode: GameMode;
  dealer_variant?: DealerVariant;
  change_on_14_allowed: boolean;
  hand: number[];
  removed?: number[];
  opponents?: OpponentSpec[];
  source: Source;
}

export interface ActionEvaluation {
  action: ActionName;
  win: number;
  tie: number;
  tie_breakdown: Record<string, number>;
  lose: number;
  rank: number;
}

export interface Change14Comparison {
  stand_on: number;
  continue: number;
  restart: number;
}

export interface EvaluateResponse {
  request_id: string | null;
  engine_version: string;
  source: Source;
  opponent_model: string;
  evaluations: ActionEvaluation[];
  recommendation: ActionName;
  change14_comparison?: Change14Comparison;
}

export interface TableResponse {
  id: number;
  title: string;
  source: Source;
  decks: number;
  columns: string[];
  rows: string[];
  values: (number | null)[][];
  notes: string[];
  engine_version: string;
}

export interface ApiError {
  error: string;
}
