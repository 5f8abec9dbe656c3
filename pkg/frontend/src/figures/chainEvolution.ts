import { join } from "node:path";
import { column, readTable } from "../csv.js";
import { band, element, extent, frame, padded, panel, polyline, svgDocument } from "../svg.js";

/**
 * Small-multiple panels showing selected chain iterations drawn over the
 * posterior 99% band, so the chain's walk into the posterior is visible.
 *
 * Inputs: chain.csv (iteration, x_t1..x_tT) and estimate.csv
 * (t, mean, variance, lower, upper).
 */
export function renderChainEvolution(inDir: string): string {
  const estimate = readTable(join(inDir, "estimate.csv"), [
    "t", "mean", "variance", "lower", "upper",
  ]);
  const chain = readTable(join(inDir, "chain.csv"), ["iteration"]);
  const stateColumns = chain.columns.filter((c) => /^x_t\d+$/.test(c));
  if (stateColumns.length === 0) {
    throw new Error(`${chain.path} has no x_t<n> state columns`);
  }
  stateColumns.sort((a, b) => Number(a.slice(3)) - Number(b.slice(3)));

  const ts = column(estimate, "t");
  const lower = column(estimate, "lower");
  const upper = column(estimate, "upper");
  const iterations = column(chain, "iteration");
  const K = iterations.length;
  const targets = [1, 2, 3, 5, 10, 50, K];
  const shown = [...new Set(targets.filter((k) => k >= 1 && k <= K))].sort((a, b) => a - b);

  const panelWidth = 170;
  const panelHeight = 150;
  const gap = 26;
  const left0 = 60;
  const top0 = 34;
  const width = left0 + shown.length * (panelWidth + gap);
  const height = top0 + panelHeight + 50;

  const allValues = [
    ...lower,
    ...upper,
    ...shown.flatMap((k) => stateColumns.map((c) => chain.rows[k - 1][c])),
  ];
  const yDomain = padded(extent(allValues));
  const xDomain: [number, number] = [ts[0], ts[ts.length - 1]];

  const body = shown.map((k, i) => {
    const p = panel(left0 + i * (panelWidth + gap), top0, panelWidth, panelHeight, xDomain, yDomain);
    const values = stateColumns.map((c) => chain.rows[k - 1][c]);
    return [
      band(p, ts, lower, upper, "#fbbf77"),
      polyline(p, ts, values, "#111"),
      frame(p, `iteration ${k}`, "t", i === 0 ? "x" : ""),
    ].join("\n");
  });

  body.push(
    element(
      "text",
      { x: left0, y: 16, "font-size": 13 },
      "Chain trajectories over the 99% posterior band",
    ),
  );
  return svgDocument(width, height, body.join("\n"));
}
