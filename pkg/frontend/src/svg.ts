import { scaleLinear, type ScaleLinear } from "d3-scale";

/** Fixed-precision coordinate so identical inputs render identical bytes. */
export const fmt = (v: number): string => (Object.is(v, -0) ? "0" : v.toFixed(2));

export function element(
  tag: string,
  attrs: Record<string, string | number>,
  body = "",
): string {
  const rendered = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
  return body === "" ? `<${tag}${rendered}/>` : `<${tag}${rendered}>${body}</${tag}>`;
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`
  );
}

/** One plot panel: data-to-pixel scales inside a margined region. */
export interface Panel {
  x: ScaleLinear<number, number>;
  y: ScaleLinear<number, number>;
  left: number;
  top: number;
  width: number;
  height: number;
}

export function panel(
  left: number,
  top: number,
  width: number,
  height: number,
  xDomain: [number, number],
  yDomain: [number, number],
): Panel {
  return {
    left,
    top,
    width,
    height,
    x: scaleLinear().domain(xDomain).range([left, left + width]),
    y: scaleLinear().domain(yDomain).range([top + height, top]),
  };
}

export function polyline(
  p: Panel,
  xs: number[],
  ys: number[],
  stroke: string,
  extra: Record<string, string | number> = {},
): string {
  const d = xs
    .map((x, i) => `${i === 0 ? "M" : "L"}${fmt(p.x(x))},${fmt(p.y(ys[i]))}`)
    .join("");
  return element("path", { d, fill: "none", stroke, "stroke-width": 1.2, ...extra });
}

/** Closed band between a lower and an upper series. */
export function band(p: Panel, xs: number[], lower: number[], upper: number[], fill: string): string {
  const up = xs.map((x, i) => `${i === 0 ? "M" : "L"}${fmt(p.x(x))},${fmt(p.y(upper[i]))}`);
  const down = [...xs.keys()]
    .reverse()
    .map((i) => `L${fmt(p.x(xs[i]))},${fmt(p.y(lower[i]))}`);
  return element("path", { d: up.join("") + down.join("") + "Z", fill, stroke: "none" });
}

export function frame(p: Panel, title: string, xLabel: string, yLabel: string): string {
  const parts = [
    element("rect", {
      x: fmt(p.left), y: fmt(p.top), width: fmt(p.width), height: fmt(p.height),
      fill: "none", stroke: "#444", "stroke-width": 1,
    }),
    element(
      "text",
      { x: fmt(p.left + p.width / 2), y: fmt(p.top - 6), "text-anchor": "middle", "font-size": 12 },
      title,
    ),
    element(
      "text",
      { x: fmt(p.left + p.width / 2), y: fmt(p.top + p.height + 28), "text-anchor": "middle", "font-size": 11 },
      xLabel,
    ),
    element(
      "text",
      {
        x: fmt(p.left - 34), y: fmt(p.top + p.height / 2), "text-anchor": "middle", "font-size": 11,
        transform: `rotate(-90 ${fmt(p.left - 34)} ${fmt(p.top + p.height / 2)})`,
      },
      yLabel,
    ),
  ];
  // Min/max tick labels on both axes keep panels readable without a full axis.
  const [x0, x1] = p.x.domain();
  const [y0, y1] = p.y.domain();
  parts.push(
    element("text", { x: fmt(p.left), y: fmt(p.top + p.height + 14), "text-anchor": "middle", "font-size": 10 }, trim(x0)),
    element("text", { x: fmt(p.left + p.width), y: fmt(p.top + p.height + 14), "text-anchor": "middle", "font-size": 10 }, trim(x1)),
    element("text", { x: fmt(p.left - 4), y: fmt(p.top + p.height + 3), "text-anchor": "end", "font-size": 10 }, trim(y0)),
    element("text", { x: fmt(p.left - 4), y: fmt(p.top + 8), "text-anchor": "end", "font-size": 10 }, trim(y1)),
  );
  return parts.join("\n");
}

const trim = (v: number): string => {
  const s = v.toFixed(2);
  return s.replace(/\.?0+$/, "") || "0";
};

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo < hi)) {
    lo -= 1;
    hi += 1;
  }
  return [lo, hi];
}

/** Pad a domain by a fraction on both sides. */
export function padded([lo, hi]: [number, number], fraction = 0.05): [number, number] {
  const pad = (hi - lo) * fraction;
  return [lo - pad, hi + pad];
}
