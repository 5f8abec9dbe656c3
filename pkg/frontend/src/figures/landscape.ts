import { readFileSync } from "node:fs";
import { join } from "node:path";
import { interpolateRdYlBu } from "d3-scale-chromatic";
import { column, readTable } from "../csv.js";
import { element, fmt, frame, panel, polyline, svgDocument, type Panel } from "../svg.js";

export interface Grid {
  times: number[];
  xGrid: number[];
  /** values[j][k]: state row j, time column k. */
  values: number[][];
}

/**
 * Parse the landscape grid file: comment line, time coordinates, state
 * coordinates, then one row of log-likelihood values per state node.
 */
export function readGrid(path: string): Grid {
  const lines = readFileSync(path, "utf8")
    .split("\n")
    .filter((line) => line.trim() !== "" && !line.startsWith("#"));
  const parse = (line: string) => line.trim().split(/\s+/).map(Number);
  const times = parse(lines[0]);
  const xGrid = parse(lines[1]);
  const values = lines.slice(2).map(parse);
  if (values.length !== xGrid.length || values.some((row) => row.length !== times.length)) {
    throw new Error(
      `grid in ${path} is ${values.length}x${values[0]?.length ?? 0}, ` +
        `expected ${xGrid.length}x${times.length} from its coordinate lines`,
    );
  }
  return { times, xGrid, values };
}

/** Blue (low) to yellow to red (high). */
export const heat = (v: number): string => interpolateRdYlBu(1 - v);

export function heatCells(p: Panel, grid: Grid, lo: number, hi: number): string[] {
  const cells: string[] = [];
  const cellW = p.width / grid.times.length;
  const cellH = p.height / grid.xGrid.length;
  for (let j = 0; j < grid.xGrid.length; j++) {
    for (let k = 0; k < grid.times.length; k++) {
      const v = hi > lo ? (grid.values[j][k] - lo) / (hi - lo) : 0;
      cells.push(
        element("rect", {
          x: fmt(p.left + k * cellW),
          y: fmt(p.top + p.height - (j + 1) * cellH),
          width: fmt(cellW + 0.05),
          height: fmt(cellH + 0.05),
          fill: heat(v),
        }),
      );
    }
  }
  return cells;
}

/**
 * The observation log-likelihood surface as a heat map with the filter and
 * MCMC smoother mean paths overlaid.
 *
 * Inputs: landscape_grid.txt, estimate_filter.csv, estimate_mcmc.csv.
 */
export function renderLandscape(inDir: string): string {
  const grid = readGrid(join(inDir, "landscape_grid.txt"));
  const filter = readTable(join(inDir, "estimate_filter.csv"), ["t", "mean"]);
  const mcmc = readTable(join(inDir, "estimate_mcmc.csv"), ["t", "mean", "lower", "upper"]);

  const flat = grid.values.flat();
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);

  const width = 760;
  const height = 440;
  const p = panel(
    60, 34, width - 90, height - 110,
    [grid.times[0], grid.times[grid.times.length - 1]],
    [grid.xGrid[0], grid.xGrid[grid.xGrid.length - 1]],
  );

  const body = [
    ...heatCells(p, grid, lo, hi),
    polyline(p, column(filter, "t"), column(filter, "mean"), "#ffffff", {
      "stroke-width": 2, "stroke-dasharray": "6 3",
    }),
    polyline(p, column(mcmc, "t"), column(mcmc, "mean"), "#111", { "stroke-width": 2 }),
    frame(p, "Observation surface with mean paths", "t", "x"),
    element("line", {
      x1: fmt(p.left), y1: fmt(height - 40), x2: fmt(p.left + 28), y2: fmt(height - 40),
      stroke: "#ffffff", "stroke-width": 2, "stroke-dasharray": "6 3",
    }),
    element("rect", {
      x: fmt(p.left - 2), y: fmt(height - 48), width: 32, height: 16, fill: "#888", opacity: 0.4,
    }),
    element("text", { x: fmt(p.left + 36), y: fmt(height - 36), "font-size": 11 }, "filter mean"),
    element("line", {
      x1: fmt(p.left + 140), y1: fmt(height - 40), x2: fmt(p.left + 168), y2: fmt(height - 40),
      stroke: "#111", "stroke-width": 2,
    }),
    element("text", { x: fmt(p.left + 176), y: fmt(height - 36), "font-size": 11 }, "smoother mean"),
  ];
  return svgDocument(width, height, body.join("\n"));
}
