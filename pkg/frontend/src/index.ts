export { readTable, column, groupBy, SchemaError, type Table } from "./csv.js";
export { renderChainEvolution } from "./figures/chainEvolution.js";
export { renderLineage } from "./figures/lineage.js";
export { renderLandscape, readGrid } from "./figures/landscape.js";
export { renderDensity } from "./figures/density.js";
export { renderIntervals } from "./figures/intervals.js";

import { renderChainEvolution } from "./figures/chainEvolution.js";
import { renderDensity } from "./figures/density.js";
import { renderIntervals } from "./figures/intervals.js";
import { renderLandscape } from "./figures/landscape.js";
import { renderLineage } from "./figures/lineage.js";

/** Figure id to renderer; each takes a run output directory, returns SVG. */
export const FIGURES: Record<string, (inDir: string) => string> = {
  "chain-evolution": renderChainEvolution,
  lineage: renderLineage,
  landscape: renderLandscape,
  density: renderDensity,
  intervals: renderIntervals,
};
