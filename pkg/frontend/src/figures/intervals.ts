import { existsSync } from "node:fs";
import { join } from "node:path";
import { column, readTable } from "../csv.js";
import { band, element, extent, frame, padded, panel, polyline, svgDocument } from "../svg.js";

const COORDS = ["p_x", "p_y", "p_z"] as const;

/**
 * Per-coordinate position estimate: mean (black line) with the shaded 99%
 * credibility band (orange), plus the ground-truth trajectory overlaid
 * (dashed blue) when the run's dataset/truth.csv is present.
 *
 * Input: estimate.csv with t, mean_p_*, lower_p_*, upper_p_* columns.
 */
export function renderIntervals(inDir: string): string {
  const required = ["t", ...COORDS.flatMap((c) => [`mean_${c}`, `lower_${c}`, `upper_${c}`])];
  const estimate = readTable(join(inDir, "estimate.csv"), required);
  const truthPath = join(inDir, "dataset", "truth.csv");
  const truth = existsSync(truthPath) ? readTable(truthPath, ["t", ...COORDS]) : null;

  const ts = column(estimate, "t");
  const width = 760;
  const panelHeight = 140;
  const gap = 46;
  const height = 34 + 3 * panelHeight + 2 * gap + 60;

  const body = COORDS.map((coord, i) => {
    const mean = column(estimate, `mean_${coord}`);
    const lower = column(estimate, `lower_${coord}`);
    const upper = column(estimate, `upper_${coord}`);
    const truthValues = truth ? column(truth, coord) : [];
    const yDomain = padded(extent([...lower, ...upper, ...truthValues]));
    const p = panel(
      60, 34 + i * (panelHeight + gap), width - 90, panelHeight,
      [ts[0], ts[ts.length - 1]], yDomain,
    );
    const parts = [
      band(p, ts, lower, upper, "#fbbf77"),
      polyline(p, ts, mean, "#111"),
    ];
    if (truth) {
      parts.push(
        polyline(p, column(truth, "t"), truthValues, "#2563c9", {
          "stroke-dasharray": "5 3",
        }),
      );
    }
    parts.push(frame(p, coord, i === 2 ? "t" : "", "position [m]"));
    return parts.join("\n");
  });

  body.push(
    element(
      "text",
      { x: 60, y: 16, "font-size": 13 },
      "Posterior mean and 99% credibility band" + (truth ? " with ground truth" : ""),
    ),
  );
  return svgDocument(width, height, body.join("\n"));
}
