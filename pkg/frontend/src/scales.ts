/**
 * Axis scales and tick helpers.  Everything here is a pure function of its
 * numeric inputs so rendered coordinates are reproducible bit for bit.
 */

export type ScaleKind = "linear" | "log";

/** Map `x` from `domain` onto `range` linearly. */
export function linearScale(
  domain: readonly [number, number],
  range: readonly [number, number],
): (x: number) => number {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  return (x: number) => r0 + ((x - d0) / span) * (r1 - r0);
}

/** Map `x` from a positive `domain` onto `range` by log10. */
export function log10Scale(
  domain: readonly [number, number],
  range: readonly [number, number],
): (x: number) => number {
  const inner = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  return (x: number) => inner(Math.log10(x));
}

export function makeScale(
  kind: ScaleKind,
  domain: readonly [number, number],
  range: readonly [number, number],
): (x: number) => number {
  return kind === "log" ? log10Scale(domain, range) : linearScale(domain, range);
}

/** Inclusive arithmetic ticks from `min` to `max` in steps of `step`. */
export function rangeTicks(min: number, max: number, step: number): number[] {
  const out: number[] = [];
  const n = Math.floor((max - min) / step + 1e-9);
  for (let i = 0; i <= n; i += 1) {
    // Recompute from the endpoints so accumulated float error cannot differ
    // between runs or platforms following IEEE-754 semantics.
    out.push(min + i * step);
  }
  return out;
}

/** Powers of ten from 10^minExp to 10^maxExp, every `stepExp` decades. */
export function decadeTicks(minExp: number, maxExp: number, stepExp = 1): number[] {
  const out: number[] = [];
  for (let e = maxExp; e >= minExp; e -= stepExp) {
    out.push(Math.pow(10, e));
  }
  return out.reverse();
}

/** Tick label for a linear axis (exact short decimal). */
export function formatLinearTick(v: number): string {
  const s = v.toFixed(2).replace(/(\.\d*?)0+$/, "$1").replace(/\.$/, "");
  return s === "-0" ? "0" : s;
}

/** Tick label for a log axis ("1" at 10^0, otherwise "1e<exp>"). */
export function formatLogTick(v: number): string {
  const exp = Math.round(Math.log10(v));
  return exp === 0 ? "1" : `1e${exp}`;
}
