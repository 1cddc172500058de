// Display formatting only. Numbers are never recomputed client-side: the
// exact API value always travels along in a data-exact attribute.

/** Scores are shown to two decimals. */
export function score2(value: number): string {
  return value.toFixed(2);
}

/** The API value, verbatim. */
export function exact(value: number): string {
  return String(value);
}

/** Width of a ratio bar; presentation only. */
export function barWidth(ratio: number): string {
  const clamped = Math.min(1, Math.max(0, ratio));
  return `${(clamped * 100).toFixed(1)}%`;
}
