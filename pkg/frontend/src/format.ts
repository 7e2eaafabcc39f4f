/** HTML escaping and the income formatting shared by all screens. */

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

export function escapeAttr(value: string): string {
  return escapeHtml(value);
}

/** Incomes are expressed in thousands of euros: 2 renders as €2,000. */
export function euro(value: number): string {
  return `€${(value * 1000).toLocaleString('en-US')}`;
}

export function ordinal(n: number): string {
  const rem100 = n % 100;
  if (rem100 >= 11 && rem100 <= 13) return `${n}th`;
  switch (n % 10) {
    case 1:
      return `${n}st`;
    case 2:
      return `${n}nd`;
    case 3:
      return `${n}rd`;
    default:
      return `${n}th`;
  }
}

export function incomeVector(values: number[]): string {
  return `(${values.join(', ')})`;
}

/**
 * One-line explanation of how to read a distribution, spelled out for the
 * incomes actually on screen.
 */
export function readingAid(values: number[]): string {
  const parts = values.map(
    (v, i) => `${euro(v)} to the ${ordinal(i + 1)} person`,
  );
  const last = parts[parts.length - 1];
  const head = parts.slice(0, -1).join(', ');
  const body = parts.length > 1 ? `${head} and ${last}` : last;
  return `Reading: Distribution A gives an income of ${body}.`;
}
