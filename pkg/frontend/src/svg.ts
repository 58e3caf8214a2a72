/** Minimal SVG string builder: no DOM, output is a plain XML string. */

export type Attrs = Record<string, string | number | undefined>;

export function escapeText(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(tag: string, attrs: Attrs = {}, children: string[] | string = []): string {
  const parts: string[] = [`<${tag}`];
  for (const [key, value] of Object.entries(attrs)) {
    if (value === undefined) continue;
    parts.push(` ${key}="${escapeText(String(value))}"`);
  }
  const body = Array.isArray(children) ? children.join("") : children;
  if (body.length === 0) {
    parts.push("/>");
  } else {
    parts.push(">", body, `</${tag}>`);
  }
  return parts.join("");
}

export function text(content: string, attrs: Attrs = {}): string {
  return el("text", attrs, escapeText(content));
}

export function svgDocument(width: number, height: number, children: string[]): string {
  return el(
    "svg",
    {
      xmlns: "http://www.w3.org/2000/svg",
      width,
      height,
      viewBox: `0 0 ${width} ${height}`,
      "font-family": "Helvetica, Arial, sans-serif",
    },
    children,
  );
}

/** Round to 2 decimals for compact path data. */
export function px(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

export function polylinePoints(xs: number[], ys: number[]): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
    pts.push(`${px(xs[i])},${px(ys[i])}`);
  }
  return pts.join(" ");
}
