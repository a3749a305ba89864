/** Display formatting for API values. Formatting only: the numbers
 * themselves always come from the server untouched. */

export function pct(x: number | null, digits = 1): string {
  return x === null ? "-" : `${(x * 100).toFixed(digits)}%`;
}

export function num(x: number | null, digits = 3): string {
  return x === null ? "-" : x.toFixed(digits);
}

export function pvalue(x: number | null): string {
  if (x === null) return "-";
  if (x >= 0.001) return x.toFixed(3);
  return x.toExponential(1);
}

export function ci(lo: number | null, hi: number | null): string {
  return lo === null || hi === null ? "-" : `[${num(lo, 2)}, ${num(hi, 2)}]`;
}

export function conditionLabel(c: {
  kind: string;
  token?: string;
  concept_id?: number;
  feature?: string;
  bucket?: string;
}): string {
  if (c.kind === "token") return `contains "${c.token}"`;
  if (c.kind === "concept") return `concept #${c.concept_id}`;
  return `${c.feature}=${c.bucket}`;
}

export function ruleLabel(conditions: Parameters<typeof conditionLabel>[0][]): string {
  return conditions.map(conditionLabel).join(" AND ");
}
