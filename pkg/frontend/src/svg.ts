/**
 * Minimal deterministic SVG string assembly.  No DOM, no generated ids, no
 * timestamps: the same attributes in the same order always serialize to the
 * same bytes.
 */

/** Escape text content / attribute values. */
export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Format a coordinate to at most two decimals with no trailing zeros. */
export function fmt(n: number): string {
  const s = n.toFixed(2).replace(/(\.\d*?)0+$/, "$1").replace(/\.$/, "");
  return s === "-0" ? "0" : s;
}

/** Serialize one element; attribute order follows the object literal. */
export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children?: string | string[],
): string {
  const parts = Object.entries(attrs).map(
    ([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`,
  );
  const open = parts.length > 0 ? `<${tag} ${parts.join(" ")}` : `<${tag}`;
  if (children === undefined) {
    return `${open}/>`;
  }
  const inner = Array.isArray(children) ? children.join("") : children;
  return `${open}>${inner}</${tag}>`;
}

/** Text node helper: content is escaped, attributes pass through `el`. */
export function text(attrs: Record<string, string | number>, content: string): string {
  return el("text", attrs, esc(content));
}
