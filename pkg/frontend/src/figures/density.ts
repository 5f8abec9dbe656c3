import { join } from "node:path";
import { readTable, type Table } from "../csv.js";
import { element, fmt, frame, panel, svgDocument } from "../svg.js";
import { heat } from "./landscape.js";

interface DensityGrid {
  times: number[];
  centers: number[];
  /** value[tIndex][xIndex] */
  values: number[][];
  max: number;
}

function toGrid(table: Table): DensityGrid {
  const times = [...new Set(table.rows.map((r) => r.t))].sort((a, b) => a - b);
  const centers = [...new Set(table.rows.map((r) => r.x))].sort((a, b) => a - b);
  const tIndex = new Map(times.map((t, i) => [t, i]));
  const xIndex = new Map(centers.map((x, i) => [x, i]));
  const values = times.map(() => centers.map(() => 0));
  let max = 0;
  for (const row of table.rows) {
    values[tIndex.get(row.t)!][xIndex.get(row.x)!] = row.density;
    if (row.density > max) max = row.density;
  }
  return { times, centers, values, max };
}

/**
 * Side-by-side particle-density heat maps for the filter and the MCMC
 * smoother on a shared blue-yellow-red color scale.
 *
 * Inputs: density_filter.csv and density_mcmc.csv (t, x, density).
 */
export function renderDensity(inDir: string): string {
  const required = ["t", "x", "density"];
  const filter = toGrid(readTable(join(inDir, "density_filter.csv"), required));
  const mcmc = toGrid(readTable(join(inDir, "density_mcmc.csv"), required));
  const shared = Math.max(filter.max, mcmc.max);

  const panelWidth = 320;
  const panelHeight = 300;
  const gap = 50;
  const width = 60 + 2 * panelWidth + gap + 30;
  const height = 34 + panelHeight + 60;

  const panels = [
    { grid: filter, title: "particle filter", left: 60 },
    { grid: mcmc, title: "MCMC smoother", left: 60 + panelWidth + gap },
  ].map(({ grid, title, left }, idx) => {
    const p = panel(
      left, 34, panelWidth, panelHeight,
      [grid.times[0], grid.times[grid.times.length - 1]],
      [grid.centers[0], grid.centers[grid.centers.length - 1]],
    );
    const cellW = p.width / grid.times.length;
    const cellH = p.height / grid.centers.length;
    const cells: string[] = [];
    for (let i = 0; i < grid.times.length; i++) {
      for (let j = 0; j < grid.centers.length; j++) {
        const v = shared > 0 ? grid.values[i][j] / shared : 0;
        cells.push(
          element("rect", {
            x: fmt(p.left + i * cellW),
            y: fmt(p.top + p.height - (j + 1) * cellH),
            width: fmt(cellW + 0.05),
            height: fmt(cellH + 0.05),
            fill: heat(v),
          }),
        );
      }
    }
    cells.push(frame(p, title, "t", idx === 0 ? "x" : ""));
    return cells.join("\n");
  });

  return svgDocument(width, height, panels.join("\n"));
}
