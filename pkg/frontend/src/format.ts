/** Number rendering. Every probability shown in the UI goes through
 * these helpers so that displayed text equals the API payload value at
 * the rendered precision (the integration contract). */

export function asPercent(p: number, digits = 1): string {
  return `${(p * 100).toFixed(digits)}%`;
}

export function asProbability(p: number, digits = 3): string {
  return p.toFixed(digits);
}

export function bannerText(action: string, win: number): string {
  return `${action.toUpperCase()} — win ${asPercent(win)}`;
}
