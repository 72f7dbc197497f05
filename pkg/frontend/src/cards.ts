/** Point-value model mirrored from the engine: ten value classes, with
 * 2/3/4 sharing a face rank (J/Q/K) and therefore eight copies per deck.
 * Used only for entry validation and labels; probabilities always come
 * from the service. */

export const POINT_VALUES = [2, 3, 4, 5, 6, 7, 8, 9, 10, 11] as const;

export const PER_DECK: Record<number, number> = {
  2: 8, 3: 8, 4: 8, 5: 4, 6: 4, 7: 4, 8: 4, 9: 4, 10: 4, 11: 4,
};

export const VALUE_LABELS: Record<number, string> = {
  2: "2 / J", 3: "3 / Q", 4: "4 / K", 5: "5", 6: "6",
  7: "7", 8: "8", 9: "9", 10: "10", 11: "A",
};

export type HandClass = "live" | "einz" | "bust";

export function handTotal(cards: number[]): number {
  return cards.reduce((s, v) => s + v, 0);
}

/** Terminal classification: 21 at any size, or exactly two aces (22). */
export function classifyHand(cards: number[]): HandClass {
  const total = handTotal(cards);
  if (total === 21 || (total === 22 && cards.length === 2)) return "einz";
  if (total > 21) return "bust";
  return "live";
}

/** How many copies of `value` the rules allow in play at this deck count. */
export function capacity(value: number, decks: number): number {
  return (PER_DECK[value] ?? 0) * decks;
}
