import { join } from "node:path";
import { groupBy, readTable } from "../csv.js";
import { element, extent, fmt, frame, padded, panel, svgDocument } from "../svg.js";

/**
 * Path-degeneracy plot: every particle as a dot, propagation lines from
 * each particle back to its ancestor, with the lineages that survive to
 * the final time drawn in red over the discarded grey ones.
 *
 * Input: lineage.csv (t, particle, ancestor, x, weight).
 */
export function renderLineage(inDir: string): string {
  const table = readTable(join(inDir, "lineage.csv"), [
    "t", "particle", "ancestor", "x", "weight",
  ]);
  const byTime = groupBy(table, "t");
  const times = [...byTime.keys()].sort((a, b) => a - b);
  const T = times.length;

  // x[t][i] = state of particle i at time t; ancestor[t][i] = its parent index.
  const position = new Map<number, Map<number, number>>();
  const parent = new Map<number, Map<number, number>>();
  for (const t of times) {
    const xs = new Map<number, number>();
    const as = new Map<number, number>();
    for (const i of byTime.get(t)!) {
      const row = table.rows[i];
      xs.set(row.particle, row.x);
      as.set(row.particle, row.ancestor);
    }
    position.set(t, xs);
    parent.set(t, as);
  }

  // Mark surviving (time, particle) pairs by tracing back from the final time.
  const surviving = new Set<string>();
  let current = new Set<number>(position.get(times[T - 1])!.keys());
  for (let k = T - 1; k >= 0; k--) {
    const t = times[k];
    const next = new Set<number>();
    for (const i of current) {
      surviving.add(`${t}:${i}`);
      const a = parent.get(t)!.get(i);
      if (k > 0 && a !== undefined) next.add(a);
    }
    current = next;
  }

  const width = 760;
  const height = 420;
  const p = panel(
    60, 34, width - 90, height - 90,
    [times[0], times[T - 1]],
    padded(extent(table.rows.map((r) => r.x))),
  );

  const greyLines: string[] = [];
  const redLines: string[] = [];
  const greyDots: string[] = [];
  const redDots: string[] = [];
  for (let k = 0; k < T; k++) {
    const t = times[k];
    for (const [i, x] of position.get(t)!) {
      const survives = surviving.has(`${t}:${i}`);
      (survives ? redDots : greyDots).push(
        element("circle", {
          cx: fmt(p.x(t)), cy: fmt(p.y(x)), r: 2,
          fill: survives ? "#c0392b" : "#b6b6b6",
        }),
      );
      if (k > 0) {
        const a = parent.get(t)!.get(i);
        const xPrev = a === undefined ? undefined : position.get(times[k - 1])!.get(a);
        if (xPrev !== undefined) {
          const line = element("line", {
            x1: fmt(p.x(times[k - 1])), y1: fmt(p.y(xPrev)),
            x2: fmt(p.x(t)), y2: fmt(p.y(x)),
            stroke: survives ? "#c0392b" : "#d4d4d4",
            "stroke-width": survives ? 1.2 : 0.6,
          });
          (survives ? redLines : greyLines).push(line);
        }
      }
    }
  }

  const body = [
    ...greyLines, ...greyDots, ...redLines, ...redDots,
    frame(p, "Particle lineages: surviving paths in red", "t", "x"),
  ];
  return svgDocument(width, height, body.join("\n"));
}
